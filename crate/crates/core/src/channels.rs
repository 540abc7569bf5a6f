//! Gates, Kraus channels, projective measurement and noise.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, check_qubits, gather_bits, scatter_bits, ComplexMatrix, ONE, STRUCTURAL_TOL, ZERO};
use crate::state::DensityOperator;

/// The built-in gate roster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Identity,
    Not,
    CNot,
    Toffoli,
    Hadamard,
    SqrtNot,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::Identity,
        GateKind::Not,
        GateKind::CNot,
        GateKind::Toffoli,
        GateKind::Hadamard,
        GateKind::SqrtNot,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::CNot => 2,
            GateKind::Toffoli => 3,
            _ => 1,
        }
    }

    /// Lower-case name used by the circuit language.
    pub fn dsl_name(self) -> &'static str {
        match self {
            GateKind::Identity => "id",
            GateKind::Not => "not",
            GateKind::CNot => "cnot",
            GateKind::Toffoli => "toffoli",
            GateKind::Hadamard => "h",
            GateKind::SqrtNot => "sqrtnot",
        }
    }

    /// Exact lookup of a circuit-language name.
    pub fn from_dsl_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.dsl_name() == name)
    }

    /// Reproduces the classical gate on computational-basis inputs.
    pub fn is_semiclassical(self) -> bool {
        !matches!(self, GateKind::Hadamard | GateKind::SqrtNot)
    }

    pub fn matrix(self) -> ComplexMatrix {
        match self {
            GateKind::Identity => ComplexMatrix::identity(2),
            GateKind::Not => pauli_x(),
            GateKind::Hadamard => {
                let s = c(FRAC_1_SQRT_2, 0.0);
                ComplexMatrix::new(2, vec![s, s, s, -s]).expect("2x2")
            }
            GateKind::SqrtNot => {
                let (p, m) = (c(0.5, 0.5), c(0.5, -0.5));
                ComplexMatrix::new(2, vec![p, m, m, p]).expect("2x2")
            }
            GateKind::CNot => controlled_not(2),
            GateKind::Toffoli => controlled_not(3),
        }
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "i" | "id" | "identity" => GateKind::Identity,
            "not" | "x" => GateKind::Not,
            "cnot" | "xor" => GateKind::CNot,
            "toffoli" | "t" => GateKind::Toffoli,
            "h" | "hadamard" => GateKind::Hadamard,
            "sqrtnot" => GateKind::SqrtNot,
            _ => return Err(Error::UnknownGate(s.to_string())),
        };
        Ok(kind)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dsl_name())
    }
}

/// Permutation matrix flipping the last of `arity` qubits when all earlier ones are 1.
fn controlled_not(arity: usize) -> ComplexMatrix {
    let dim = 1usize << arity;
    let controls = dim - 2; // all control bits set, target bit clear
    ComplexMatrix::from_fn(dim, |i, j| {
        let image = if j & controls == controls { j ^ 1 } else { j };
        if i == image {
            ONE
        } else {
            ZERO
        }
    })
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).expect("2x2")
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]).expect("2x2")
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diag(&[ONE, c(-1.0, 0.0)])
}

/// A named unitary acting on `arity` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    name: String,
    arity: usize,
    matrix: ComplexMatrix,
}

impl Gate {
    /// Wraps an arbitrary unitary. The dimension must be a power of two.
    pub fn new(name: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        let arity = matrix.n_qubits().ok_or(Error::DimensionMismatch {
            expected: matrix.dim().next_power_of_two(),
            found: matrix.dim(),
        })?;
        if !matrix.is_unitary(STRUCTURAL_TOL) {
            return Err(Error::NotUnitary);
        }
        Ok(Self {
            name: name.into(),
            arity,
            matrix,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl From<GateKind> for Gate {
    fn from(kind: GateKind) -> Self {
        Gate {
            name: kind.dsl_name().to_string(),
            arity: kind.arity(),
            matrix: kind.matrix(),
        }
    }
}

/// Looks up a gate by name (`I`, `Not`, `CNot`, `Toffoli`, `H`, `SqrtNot`,
/// or their lower-case circuit-language spellings).
pub fn builtin_gate(name: &str) -> Result<Gate> {
    Ok(name.parse::<GateKind>()?.into())
}

/// Trace-preserving map given by a non-empty Kraus family.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOperation {
    n_qubits: usize,
    kraus: Vec<ComplexMatrix>,
}

impl QuantumOperation {
    /// Validates `sum A_i^dagger A_i = I` within the structural tolerance.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::Empty("Kraus family"))?;
        let dim = first.dim();
        let n_qubits = first.n_qubits().ok_or(Error::DimensionMismatch {
            expected: dim.next_power_of_two(),
            found: dim,
        })?;
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &kraus {
            sum = sum.try_add(&k.dagger().matmul(k)?)?;
        }
        let dev = sum.max_norm_diff(&ComplexMatrix::identity(dim));
        if dev > STRUCTURAL_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { n_qubits, kraus })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            kraus: vec![ComplexMatrix::identity(1 << n_qubits)],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `sum_i A_i rho A_i^dagger`, validated as a density operator.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        apply(self, rho)
    }
}

/// Embeds `u` on `targets` of an `n_qubits` register as a single-Kraus operation.
/// `targets[0]` is the gate's most significant input.
pub fn lift_unitary(u: &Gate, n_qubits: usize, targets: &[usize]) -> Result<QuantumOperation> {
    if targets.len() != u.arity {
        return Err(Error::Arity {
            gate: u.name.clone(),
            expected: u.arity,
            found: targets.len(),
        });
    }
    check_qubits(n_qubits, targets)?;
    Ok(QuantumOperation {
        n_qubits,
        kraus: vec![embed(u.matrix(), n_qubits, targets)],
    })
}

/// Places a `2^k x 2^k` operator on the `k` listed qubits, identity elsewhere.
pub(crate) fn embed(local: &ComplexMatrix, n_qubits: usize, targets: &[usize]) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let local_dim = local.dim();
    let mask = scatter_bits(n_qubits, targets, local_dim - 1);
    let mut out = vec![ZERO; dim * dim];
    for col in 0..dim {
        let local_col = gather_bits(n_qubits, targets, col);
        let rest = col & !mask;
        for local_row in 0..local_dim {
            let v = local.get(local_row, local_col);
            if v != ZERO {
                let row = rest | scatter_bits(n_qubits, targets, local_row);
                out[row * dim + col] = v;
            }
        }
    }
    ComplexMatrix::new(dim, out).expect("finite entries")
}

/// `sum_i A_i rho A_i^dagger`
pub fn apply(op: &QuantumOperation, rho: &DensityOperator) -> Result<DensityOperator> {
    if op.n_qubits != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: op.n_qubits,
            found: rho.n_qubits(),
        });
    }
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(m.dim());
    for a in &op.kraus {
        let term = a.matmul(m)?.matmul(&a.dagger())?;
        out = out.try_add(&term)?;
    }
    DensityOperator::new(out)
}

/// Computational-basis projective measurement of the listed qubits.
pub fn measurement_channel(n_qubits: usize, measured: &[usize]) -> Result<QuantumOperation> {
    if measured.is_empty() {
        return Err(Error::Empty("measured qubits"));
    }
    check_qubits(n_qubits, measured)?;
    let k = measured.len();
    let kraus = (0..1usize << k)
        .map(|outcome| {
            let local = ComplexMatrix::basis_projector(1 << k, outcome);
            embed(&local, n_qubits, measured)
        })
        .collect();
    Ok(QuantumOperation { n_qubits, kraus })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    BitFlip,
    Depolarizing,
}

impl NoiseKind {
    pub fn dsl_name(self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bitflip",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bitflip" | "bit_flip" => Ok(NoiseKind::BitFlip),
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            other => Err(format!("unknown noise kind `{other}`")),
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dsl_name())
    }
}

/// Single-qubit noise on `target`.
///
/// * bit flip: `{sqrt(1-p) I, sqrt(p) X}`
/// * depolarizing: `{sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}`
pub fn noise_channel(kind: NoiseKind, p: f64, n_qubits: usize, target: usize) -> Result<QuantumOperation> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability(p));
    }
    check_qubits(n_qubits, &[target])?;
    let local = noise_kraus_local(kind, p);
    let kraus = local
        .iter()
        .map(|k| embed(k, n_qubits, &[target]))
        .collect();
    Ok(QuantumOperation { n_qubits, kraus })
}

/// Single-qubit Kraus family of a noise channel.
pub(crate) fn noise_kraus_local(kind: NoiseKind, p: f64) -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(2);
    match kind {
        NoiseKind::BitFlip => vec![
            id.scale_real((1.0 - p).sqrt()),
            pauli_x().scale_real(p.sqrt()),
        ],
        NoiseKind::Depolarizing => {
            let w = (p / 4.0).sqrt();
            vec![
                id.scale_real((1.0 - 3.0 * p / 4.0).sqrt()),
                pauli_x().scale_real(w),
                pauli_y().scale_real(w),
                pauli_z().scale_real(w),
            ]
        }
    }
}

/// `sum_i K_i rho K_i^dagger` for local operators `K_i` on `targets`, without
/// building the full-register Kraus matrices.
pub(crate) fn apply_local(
    rho: &ComplexMatrix,
    n_qubits: usize,
    locals: &[ComplexMatrix],
    targets: &[usize],
) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let local_dim = 1usize << targets.len();
    let mask = scatter_bits(n_qubits, targets, local_dim - 1);
    let offsets: Vec<usize> = (0..local_dim)
        .map(|v| scatter_bits(n_qubits, targets, v))
        .collect();
    let src = rho.as_slice();
    let mut out = vec![ZERO; dim * dim];
    let mut left = vec![ZERO; dim * dim];
    for k in locals {
        for r in 0..dim {
            let lr = gather_bits(n_qubits, targets, r);
            let base = r & !mask;
            for col in 0..dim {
                let mut acc = ZERO;
                for (a, &off) in offsets.iter().enumerate() {
                    acc += k.get(lr, a) * src[(base | off) * dim + col];
                }
                left[r * dim + col] = acc;
            }
        }
        for r in 0..dim {
            for col in 0..dim {
                let lc = gather_bits(n_qubits, targets, col);
                let base = col & !mask;
                let mut acc = ZERO;
                for (b, &off) in offsets.iter().enumerate() {
                    acc += left[r * dim + (base | off)] * k.get(lc, b).conj();
                }
                out[r * dim + col] += acc;
            }
        }
    }
    ComplexMatrix::new(dim, out).expect("finite entries")
}

/// Sequential composition: `ops[0]` acts first. The Kraus family is the full
/// set of ordered products.
pub fn compose(ops: &[QuantumOperation]) -> Result<QuantumOperation> {
    let first = ops.first().ok_or(Error::Empty("operation list"))?;
    let mut kraus = first.kraus.clone();
    for op in &ops[1..] {
        if op.n_qubits != first.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: first.n_qubits,
                found: op.n_qubits,
            });
        }
        let mut next = Vec::with_capacity(kraus.len() * op.kraus.len());
        for b in &op.kraus {
            for a in &kraus {
                next.push(b.matmul(a)?);
            }
        }
        kraus = next;
    }
    Ok(QuantumOperation {
        n_qubits: first.n_qubits,
        kraus,
    })
}
