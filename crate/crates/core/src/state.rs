//! Quregisters, density operators, projectors and Born-rule evaluation.
//!
//! Every state ends up as a [`DensityOperator`]; pure states are converted
//! with [`QuRegister::to_density`] so one evaluation path serves both.

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64, MAX_QUBITS, STRUCTURAL_TOL};

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two(),
            found: dim,
        });
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            n_qubits: n,
            max: MAX_QUBITS,
        });
    }
    Ok(n)
}

/// Normalized state vector on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QuRegister {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl QuRegister {
    /// Accepts amplitudes whose norm is within `1e-10` of one (renormalizing
    /// them); anything further off is rejected.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::with_tolerance(amplitudes, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(mut amplitudes: Vec<C64>, tol: f64) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm_sq - 1.0).abs() > tol {
            return Err(Error::NotNormalized(norm_sq.sqrt()));
        }
        let inv = 1.0 / norm_sq.sqrt();
        for z in &mut amplitudes {
            *z *= inv;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Scales an arbitrary non-zero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    /// Computational basis state `|index>` on `n_qubits`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                index,
                n_qubits,
            });
        }
        let mut amplitudes = vec![c(0.0, 0.0); dim];
        amplitudes[index] = c(1.0, 0.0);
        Self::new(amplitudes)
    }

    /// The single qubit `c0|0> + c1|1>`.
    pub fn qubit(c0: C64, c1: C64) -> Result<Self> {
        Self::new(vec![c0, c1])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        }
    }

    /// `|psi><psi|`
    pub fn to_density(&self) -> DensityOperator {
        DensityOperator {
            n_qubits: self.n_qubits,
            matrix: self.projector_matrix(),
        }
    }

    /// `|psi><psi|` as a rank-1 projector.
    pub fn to_projector(&self) -> Projector {
        Projector {
            n_qubits: self.n_qubits,
            matrix: self.projector_matrix(),
        }
    }

    fn projector_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes).expect("same length")
    }
}

/// Outer product `|psi><psi|`.
pub fn pure_to_density(psi: &QuRegister) -> DensityOperator {
    psi.to_density()
}

/// Hermitian, positive semidefinite, unit-trace operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.dim())?;
        let eig = matrix.hermitian_eigenvalues(tol)?;
        if let Some(&lo) = eig.first() {
            if lo < -tol {
                return Err(Error::NotPositive(lo));
            }
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > tol {
            return Err(Error::TraceNotOne(tr.re));
        }
        Ok(Self { n_qubits, matrix })
    }

    /// Skips validation. Callers must already know the invariants hold.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let n_qubits = matrix.dim().trailing_zeros() as usize;
        Self { n_qubits, matrix }
    }

    /// `|0...0><0...0|`
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Ok(QuRegister::basis(n_qubits, 0)?.to_density())
    }

    /// `I / 2^n`
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        Ok(Self::from_trusted(
            ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        ))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr(rho^2)`; one exactly for pure states.
    pub fn purity(&self) -> f64 {
        // Tr(rho rho) = sum_ij |rho_ij|^2 for hermitian rho
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n_qubits = self.n_qubits + other.n_qubits;
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits,
            matrix: self.matrix.tensor(&other.matrix),
        })
    }

    /// Reduced state after tracing out the listed qubits.
    pub fn partial_trace(&self, traced: &[usize]) -> Result<Self> {
        let m = self.matrix.partial_trace(self.n_qubits, traced)?;
        Ok(Self::from_trusted(m))
    }

    /// Computational-basis populations, indexed per the basis convention.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.matrix.dim())
            .map(|i| self.matrix.get(i, i).re)
            .collect()
    }
}

/// Convex combination `sum w_i rho_i`.
pub fn mix(states: &[(f64, DensityOperator)]) -> Result<DensityOperator> {
    let (_, first) = states.first().ok_or(Error::Empty("mixture"))?;
    let dim = first.matrix.dim();
    let mut total = 0.0;
    let mut acc = ComplexMatrix::zeros(dim);
    for (w, rho) in states {
        if w.is_nan() || *w < 0.0 {
            return Err(Error::NegativeWeight(*w));
        }
        if rho.n_qubits != first.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: first.n_qubits,
                found: rho.n_qubits,
            });
        }
        total += w;
        acc = acc.try_add(&rho.matrix.scale_real(*w))?;
    }
    if (total - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::WeightSum(total));
    }
    Ok(DensityOperator::from_trusted(acc))
}

/// Hermitian idempotent operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let n_qubits = qubits_for_dim(matrix.dim())?;
        if !matrix.is_projector(tol) {
            return Err(Error::NotProjector);
        }
        Ok(Self { n_qubits, matrix })
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        let n_qubits = matrix.dim().trailing_zeros() as usize;
        Self { n_qubits, matrix }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(1 << n_qubits))
    }

    pub fn zero(n_qubits: usize) -> Self {
        Self::from_trusted(ComplexMatrix::zeros(1 << n_qubits))
    }

    /// Projector onto the computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        Ok(QuRegister::basis(n_qubits, index)?.to_projector())
    }

    /// `I - P`
    pub fn complement(&self) -> Self {
        let id = ComplexMatrix::identity(self.matrix.dim());
        Self::from_trusted(&id - &self.matrix)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            matrix: self.matrix.tensor(&other.matrix),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.trace().re.round() as usize
    }
}

/// Orthonormal basis defining an `n`-outcome measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalTest {
    basis: Vec<QuRegister>,
}

impl MaximalTest {
    pub fn new(basis: Vec<QuRegister>) -> Result<Self> {
        let first = basis.first().ok_or(Error::Empty("maximal test"))?;
        let n = first.n_qubits();
        for (i, e) in basis.iter().enumerate() {
            if e.n_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: e.n_qubits(),
                });
            }
            for (j, f) in basis.iter().enumerate().skip(i + 1) {
                if e.inner(f)?.norm() > STRUCTURAL_TOL {
                    return Err(Error::NotOrthonormal(i, j));
                }
            }
        }
        Ok(Self { basis })
    }

    pub fn computational(n_qubits: usize) -> Result<Self> {
        let basis = (0..1usize << n_qubits)
            .map(|i| QuRegister::basis(n_qubits, i))
            .collect::<Result<_>>()?;
        Self::new(basis)
    }

    pub fn n_outcomes(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QuRegister] {
        &self.basis
    }
}

/// `|<e_i|psi>|^2`
pub fn born_probability(psi: &QuRegister, test: &MaximalTest, outcome_index: usize) -> Result<f64> {
    let e = test.basis.get(outcome_index).ok_or(Error::IndexOutOfRange {
        index: outcome_index,
        n_qubits: test.n_outcomes(),
    })?;
    Ok(e.inner(psi)?.norm_sqr())
}

/// `Re Tr(rho P)`, checked to lie in `[0, 1]` up to tolerance and clamped.
pub fn born_expectation(rho: &DensityOperator, p: &Projector) -> Result<f64> {
    born_expectation_tol(rho, p, STRUCTURAL_TOL)
}

pub fn born_expectation_tol(rho: &DensityOperator, p: &Projector, tol: f64) -> Result<f64> {
    let v = trace_of_product(rho.matrix(), p.matrix())?.re;
    if !(-tol..=1.0 + tol).contains(&v) {
        return Err(Error::ProbabilityOutOfRange { value: v });
    }
    Ok(v.clamp(0.0, 1.0))
}

/// `Tr(a b)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let n = a.dim();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a.get(i, k) * b.get(k, i);
        }
    }
    Ok(acc)
}
