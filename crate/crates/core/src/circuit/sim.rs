use std::collections::BTreeMap;

use super::{CircuitIr, Measure, Step};
use crate::channels::{apply_local, noise_kraus_local};
use crate::error::{Error, Result};
use crate::linalg::{check_qubits, gather_bits, ComplexMatrix, ZERO};
use crate::state::DensityOperator;

/// Probabilities below this are treated as numerical zero in distributions.
const PROBABILITY_FLOOR: f64 = 1e-14;

/// Runs the circuit on `input`, or on `|0...0>` when none is given.
pub fn simulate(ir: &CircuitIr, input: Option<&DensityOperator>) -> Result<DensityOperator> {
    let n = ir.n_qubits();
    let mut rho = match input {
        Some(rho) if rho.n_qubits() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: rho.n_qubits(),
            })
        }
        Some(rho) => rho.matrix().clone(),
        None => DensityOperator::zero_state(n)?.into_matrix(),
    };
    for step in ir.steps() {
        rho = match step {
            Step::Gate { gate, targets } => apply_local(&rho, n, &[gate.matrix()], targets),
            Step::Noise { kind, p, target } => apply_local(&rho, n, &noise_kraus_local(*kind, *p), &[*target]),
            Step::Measure(Measure::All) => dephase(&rho, n, &(0..n).collect::<Vec<_>>()),
            Step::Measure(Measure::Qubits(qs)) => dephase(&rho, n, qs),
        };
    }
    DensityOperator::new(rho)
}

/// Projective computational-basis measurement of `qubits` with the outcome
/// discarded: coherences between different outcomes vanish.
fn dephase(rho: &ComplexMatrix, n_qubits: usize, qubits: &[usize]) -> ComplexMatrix {
    let dim = rho.dim();
    ComplexMatrix::from_fn(dim, |r, c| {
        if gather_bits(n_qubits, qubits, r) == gather_bits(n_qubits, qubits, c) {
            rho.get(r, c)
        } else {
            ZERO
        }
    })
}

/// Bit string of `index` over `width` bits, most significant first.
pub fn outcome_label(index: usize, width: usize) -> String {
    (0..width)
        .map(|i| if (index >> (width - 1 - i)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Computational-basis outcome probabilities over all qubits. Outcomes with
/// numerically zero probability are omitted.
pub fn outcome_distribution(rho: &DensityOperator) -> BTreeMap<String, f64> {
    let n = rho.n_qubits();
    rho.diagonal()
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > PROBABILITY_FLOOR)
        .map(|(i, p)| (outcome_label(i, n), p))
        .collect()
}

/// Marginal outcome probabilities of `qubits`, labelled in the listed order.
pub fn outcome_distribution_over(rho: &DensityOperator, qubits: &[usize]) -> Result<BTreeMap<String, f64>> {
    let n = rho.n_qubits();
    if qubits.is_empty() {
        return Err(Error::Empty("measured qubits"));
    }
    check_qubits(n, qubits)?;
    let k = qubits.len();
    let mut probs = vec![0.0; 1 << k];
    for (i, p) in rho.diagonal().into_iter().enumerate() {
        probs[gather_bits(n, qubits, i)] += p;
    }
    Ok(probs
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > PROBABILITY_FLOOR)
        .map(|(i, p)| (outcome_label(i, k), p.min(1.0)))
        .collect())
}
