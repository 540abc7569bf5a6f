//! Quantum computational logic.
//!
//! A register is read as true when its last qubit is `|1>`. The truth
//! probability of a state is `Tr(P1 rho)` with `P1 = I (x) |1><1|`. `Not`
//! negates the last qubit. `And` tensors both inputs with a fresh `|0>`
//! ancilla and applies a Toffoli from the two truth qubits onto it, so the
//! ancilla becomes the new truth qubit. `Or` is the De Morgan composite.

use std::collections::HashMap;

use crate::channels::{lift_unitary, Gate, GateKind};
use crate::error::{Error, Result};
use crate::formula::FormulaAst;
use crate::state::{born_expectation, DensityOperator, Projector};

/// Falsity and truth projectors on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthProjectors {
    n_qubits: usize,
    p0: Projector,
    p1: Projector,
}

impl TruthProjectors {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1, "truth projectors need at least one qubit");
        let rest = Projector::identity(n_qubits - 1);
        let p0 = rest.tensor(&Projector::basis(1, 0).expect("1 qubit"));
        let p1 = rest.tensor(&Projector::basis(1, 1).expect("1 qubit"));
        Self { n_qubits, p0, p1 }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Falsity: last qubit `|0>`.
    pub fn falsity(&self) -> &Projector {
        &self.p0
    }

    /// Truth: last qubit `|1>`.
    pub fn truth(&self) -> &Projector {
        &self.p1
    }
}

/// `Tr(P1 rho)`
pub fn truth_probability(rho: &DensityOperator) -> Result<f64> {
    born_expectation(rho, TruthProjectors::new(rho.n_qubits()).truth())
}

/// Negation of the truth qubit.
pub fn qcl_not(rho: &DensityOperator) -> Result<DensityOperator> {
    apply_on_truth_qubit(GateKind::Not, rho)
}

fn apply_on_truth_qubit(kind: GateKind, rho: &DensityOperator) -> Result<DensityOperator> {
    if kind.arity() != 1 {
        return Err(Error::Arity {
            gate: kind.dsl_name().to_string(),
            expected: 1,
            found: kind.arity(),
        });
    }
    let n = rho.n_qubits();
    lift_unitary(&Gate::from(kind), n, &[n - 1])?.apply(rho)
}

/// Toffoli conjunction `T(rho (x) sigma (x) |0><0|)`, controlled on the truth
/// qubits of both inputs. The full composite state is returned.
pub fn qcl_and(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DensityOperator> {
    let (n, m) = (rho.n_qubits(), sigma.n_qubits());
    let ancilla = DensityOperator::zero_state(1)?;
    let joint = rho.tensor(sigma)?.tensor(&ancilla)?;
    let toffoli = lift_unitary(&Gate::from(GateKind::Toffoli), n + m + 1, &[n - 1, n + m - 1, n + m])?;
    toffoli.apply(&joint)
}

/// `Not(And(Not rho, Not sigma))`
pub fn qcl_or(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DensityOperator> {
    qcl_not(&qcl_and(&qcl_not(rho)?, &qcl_not(sigma)?)?)
}

/// Builds the composite state a formula denotes under `bindings`.
/// Every occurrence of an atom contributes its own copy of the bound state.
pub fn formula_state(
    ast: &FormulaAst,
    bindings: &HashMap<String, DensityOperator>,
) -> Result<DensityOperator> {
    match ast {
        FormulaAst::Atom(name) => bindings
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnboundAtom(name.clone())),
        FormulaAst::Not(inner) => qcl_not(&formula_state(inner, bindings)?),
        FormulaAst::Gate(kind, inner) => apply_on_truth_qubit(*kind, &formula_state(inner, bindings)?),
        FormulaAst::And(l, r) | FormulaAst::Or(l, r) => {
            let (left, right) = rayon::join(
                || formula_state(l, bindings),
                || formula_state(r, bindings),
            );
            let (left, right) = (left?, right?);
            if matches!(ast, FormulaAst::And(..)) {
                qcl_and(&left, &right)
            } else {
                qcl_or(&left, &right)
            }
        }
    }
}

/// Truth probability of the state a formula denotes.
pub fn eval_formula(ast: &FormulaAst, bindings: &HashMap<String, DensityOperator>) -> Result<f64> {
    // Fail on unbound atoms before doing any linear algebra.
    for atom in ast.atoms() {
        if !bindings.contains_key(atom) {
            return Err(Error::UnboundAtom(atom.to_string()));
        }
    }
    truth_probability(&formula_state(ast, bindings)?)
}

/// Truth probability read from the reduced state of the last qubit.
pub fn truth_probability_reduced(rho: &DensityOperator) -> Result<f64> {
    let n = rho.n_qubits();
    let traced: Vec<usize> = (0..n - 1).collect();
    let last = rho.partial_trace(&traced)?;
    Ok(last.matrix().get(1, 1).re)
}
