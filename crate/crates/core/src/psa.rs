//! Intensive valuations of projectors.
//!
//! A [`Psa`] assigns to every projector `P` the intensity `Tr(rho P)`. The
//! map is normalized (`I` gets 1), additive on orthogonal families, and does
//! not depend on the context a projector is read from. Conversely, the
//! intensities on an informationally complete family pin down `rho`, which
//! [`reconstruct_density`] recovers by linear inversion.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::channels::{pauli_x, pauli_y, pauli_z};
use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, STRUCTURAL_TOL};
use crate::state::{born_expectation_tol, trace_of_product, DensityOperator, Projector, QuRegister};

/// Agreement required between reconstructed and supplied intensities.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Potential state of affairs generated by a density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Psa {
    rho: DensityOperator,
}

impl Psa {
    pub fn new(rho: DensityOperator) -> Self {
        Self { rho }
    }

    pub fn n_qubits(&self) -> usize {
        self.rho.n_qubits()
    }

    pub fn rho(&self) -> &DensityOperator {
        &self.rho
    }

    /// `Tr(rho P)`
    pub fn intensity(&self, p: &Projector) -> Result<f64> {
        if p.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits(),
                found: p.n_qubits(),
            });
        }
        born_expectation_tol(&self.rho, p, STRUCTURAL_TOL)
    }
}

/// Free-function form of [`Psa::intensity`].
pub fn intensity(psa: &Psa, p: &Projector) -> Result<f64> {
    psa.intensity(p)
}

fn check_orthogonal(ps: &[Projector], tol: f64) -> Result<()> {
    for (i, p) in ps.iter().enumerate() {
        for (j, q) in ps.iter().enumerate().skip(i + 1) {
            if p.n_qubits() != q.n_qubits() {
                return Err(Error::DimensionMismatch {
                    expected: p.n_qubits(),
                    found: q.n_qubits(),
                });
            }
            if p.matrix().matmul(q.matrix())?.max_norm() > tol {
                return Err(Error::NotOrthogonal(i, j));
            }
        }
    }
    Ok(())
}

/// Join of pairwise-orthogonal projectors, i.e. their sum.
pub fn join_projectors(ps: &[Projector]) -> Result<Projector> {
    let first = ps.first().ok_or(Error::Empty("projector family"))?;
    check_orthogonal(ps, STRUCTURAL_TOL)?;
    let mut sum = ComplexMatrix::zeros(first.matrix().dim());
    for p in ps {
        sum = sum.try_add(p.matrix())?;
    }
    Projector::new(sum)
}

/// `|Psi(join ps) - sum Psi(p)| <= tol`. Errors if the family is not orthogonal.
pub fn check_additivity(psa: &Psa, ps: &[Projector], tol: f64) -> Result<bool> {
    let joined = psa.intensity(&join_projectors(ps)?)?;
    let summed = ps
        .iter()
        .map(|p| psa.intensity(p))
        .sum::<Result<f64>>()?;
    Ok((joined - summed).abs() <= tol)
}

/// `Q P = P`, i.e. the range of `p` lies inside the range of `q`.
pub fn is_below(p: &Projector, q: &Projector, tol: f64) -> Result<bool> {
    Ok(q.matrix().matmul(p.matrix())?.max_norm_diff(p.matrix()) <= tol)
}

/// Pairwise-orthogonal projectors resolving the identity: one measurement context.
#[derive(Debug, Clone, PartialEq)]
pub struct Context {
    projectors: Vec<Projector>,
}

impl Context {
    pub fn new(projectors: Vec<Projector>) -> Result<Self> {
        Self::with_tolerance(projectors, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(projectors: Vec<Projector>, tol: f64) -> Result<Self> {
        let first = projectors.first().ok_or(Error::Empty("context"))?;
        check_orthogonal(&projectors, tol)?;
        let dim = first.matrix().dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for p in &projectors {
            sum = sum.try_add(p.matrix())?;
        }
        let dev = sum.max_norm_diff(&ComplexMatrix::identity(dim));
        if dev > tol {
            return Err(Error::IncompleteContext(dev));
        }
        Ok(Self { projectors })
    }

    /// Rank-1 context of an orthonormal basis.
    pub fn from_basis(basis: &[QuRegister]) -> Result<Self> {
        Self::new(basis.iter().map(QuRegister::to_projector).collect())
    }

    pub fn computational(n_qubits: usize) -> Result<Self> {
        let basis = (0..1usize << n_qubits)
            .map(|i| QuRegister::basis(n_qubits, i))
            .collect::<Result<Vec<_>>>()?;
        Self::from_basis(&basis)
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn n_qubits(&self) -> usize {
        self.projectors[0].n_qubits()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

/// Intensities indexed by `(context, projector)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationTable {
    rows: Vec<Vec<f64>>,
}

impl ValuationTable {
    pub fn get(&self, context: usize, projector: usize) -> Option<f64> {
        self.rows.get(context)?.get(projector).copied()
    }

    /// Intensities of one context, in projector order.
    pub fn context(&self, context: usize) -> &[f64] {
        &self.rows[context]
    }

    pub fn n_contexts(&self) -> usize {
        self.rows.len()
    }

    /// `(context index, projector index, intensity)` triples.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(ci, row)| row.iter().enumerate().map(move |(pi, &v)| (ci, pi, v)))
    }
}

/// Intensity of every projector of every context.
pub fn global_valuation(psa: &Psa, contexts: &[Context]) -> Result<ValuationTable> {
    for ctx in contexts {
        if ctx.n_qubits() != psa.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: psa.n_qubits(),
                found: ctx.n_qubits(),
            });
        }
    }
    let rows = contexts
        .par_iter()
        .map(|ctx| ctx.projectors.iter().map(|p| psa.intensity(p)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(ValuationTable { rows })
}

/// Every projector shared by both contexts (equal within `STRUCTURAL_TOL` in
/// max-norm) receives the same intensity within `tol`. Vacuously true when
/// nothing is shared.
pub fn check_noncontextuality(psa: &Psa, c1: &Context, c2: &Context, tol: f64) -> Result<bool> {
    for p in &c1.projectors {
        for q in &c2.projectors {
            if p.n_qubits() == q.n_qubits() && p.matrix().max_norm_diff(q.matrix()) <= STRUCTURAL_TOL {
                let (a, b) = (psa.intensity(p)?, psa.intensity(q)?);
                if (a - b).abs() > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Tensor products of `{I, X, Y, Z}`, indexed in base 4 with qubit 0 as the
/// leading digit. They form an orthogonal basis of the hermitian matrices.
pub fn pauli_basis(n_qubits: usize) -> Vec<ComplexMatrix> {
    let singles = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    (0..1usize << (2 * n_qubits))
        .map(|k| {
            (0..n_qubits)
                .map(|q| &singles[(k >> (2 * (n_qubits - 1 - q))) & 3])
                .fold(ComplexMatrix::identity(1), |acc, m| acc.tensor(m))
        })
        .collect()
}

/// Recovers `rho` from intensities `Tr(rho P_i) = v_i` by least squares over the
/// Pauli basis. The family must span the `4^n`-dimensional hermitian space.
pub fn reconstruct_density(samples: &[(Projector, f64)], n_qubits: usize) -> Result<DensityOperator> {
    let basis = pauli_basis(n_qubits);
    let unknowns = basis.len();
    let m = samples.len();
    for (p, _) in samples {
        if p.n_qubits() != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: p.n_qubits(),
            });
        }
    }
    if m < unknowns {
        return Err(Error::RankDeficient {
            rank: m,
            needed: unknowns,
        });
    }

    // rho = sum_k x_k sigma_k with real x_k, so Tr(rho P) = sum_k x_k Tr(sigma_k P).
    let mut a = DMatrix::<f64>::zeros(m, unknowns);
    for (i, (p, _)) in samples.iter().enumerate() {
        for (k, sigma) in basis.iter().enumerate() {
            a[(i, k)] = trace_of_product(sigma, p.matrix())?.re;
        }
    }
    let b = DVector::from_iterator(m, samples.iter().map(|(_, v)| *v));

    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let cutoff = s_max * 1e-10;
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    if rank < unknowns {
        return Err(Error::RankDeficient {
            rank,
            needed: unknowns,
        });
    }
    let x = svd
        .solve(&b, cutoff)
        .map_err(|_| Error::RankDeficient { rank, needed: unknowns })?;
    let residual = (&a * &x - &b).amax();
    if residual > RECONSTRUCTION_TOL {
        return Err(Error::Inconsistent(residual));
    }

    let dim = 1usize << n_qubits;
    let mut rho = ComplexMatrix::zeros(dim);
    for (xk, sigma) in x.iter().zip(&basis) {
        rho = rho.try_add(&sigma.scale_real(*xk))?;
    }
    let trace_err = (rho.trace().re - 1.0).abs();
    if trace_err > RECONSTRUCTION_TOL {
        return Err(Error::Inconsistent(trace_err));
    }
    DensityOperator::new(rho)
}

/// The four single-qubit projectors `|0><0|, |1><1|, |+><+|, |+i><+i|`.
pub fn qubit_tomography_family() -> Vec<Projector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        (c(1.0, 0.0), c(0.0, 0.0)),
        (c(0.0, 0.0), c(1.0, 0.0)),
        (c(s, 0.0), c(s, 0.0)),
        (c(s, 0.0), c(0.0, s)),
    ]
    .into_iter()
    .map(|(c0, c1)| QuRegister::qubit(c0, c1).expect("unit vector").to_projector())
    .collect()
}

/// All `4^n` tensor products of [`qubit_tomography_family`]; informationally complete.
pub fn tomography_family(n_qubits: usize) -> Vec<Projector> {
    let single = qubit_tomography_family();
    let mut family = vec![Projector::identity(0)];
    for _ in 0..n_qubits {
        family = family
            .iter()
            .flat_map(|p| single.iter().map(move |q| p.tensor(q)))
            .collect();
    }
    family
}

/// Single-qubit hermitian observable with spectrum in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, STRUCTURAL_TOL)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        if matrix.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: matrix.dim(),
            });
        }
        for ev in matrix.hermitian_eigenvalues(tol)? {
            if (ev.abs() - 1.0).abs() > tol {
                return Err(Error::Spectrum(ev));
            }
        }
        Ok(Self { matrix })
    }

    /// `n . sigma` for a unit Bloch vector `(x, y, z)`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = pauli_x()
            .scale_real(x)
            .try_add(&pauli_y().scale_real(y))?
            .try_add(&pauli_z().scale_real(z))?;
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn neg(&self) -> Self {
        Self {
            matrix: self.matrix.scale_real(-1.0),
        }
    }
}

/// `Tr(rho (x (x) y))`
pub fn correlation(rho: &DensityOperator, x: &Observable, y: &Observable) -> Result<f64> {
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.n_qubits(),
        });
    }
    Ok(trace_of_product(rho.matrix(), &x.matrix.tensor(&y.matrix))?.re)
}

/// `S = E(a,b) + E(a,b') + E(a',b) - E(a',b')`
pub fn chsh_value(
    rho: &DensityOperator,
    a: &Observable,
    a_prime: &Observable,
    b: &Observable,
    b_prime: &Observable,
) -> Result<f64> {
    Ok(correlation(rho, a, b)? + correlation(rho, a, b_prime)? + correlation(rho, a_prime, b)?
        - correlation(rho, a_prime, b_prime)?)
}

/// A two-qubit state with the four CHSH settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSetup {
    pub rho: DensityOperator,
    pub a: Observable,
    pub a_prime: Observable,
    pub b: Observable,
    pub b_prime: Observable,
}

impl ChshSetup {
    pub fn value(&self) -> Result<f64> {
        chsh_value(&self.rho, &self.a, &self.a_prime, &self.b, &self.b_prime)
    }

    /// Singlet `(|01> - |10>)/sqrt2` with `a = Z`, `a' = X`,
    /// `b = -(Z+X)/sqrt2`, `b' = -(Z-X)/sqrt2`, giving `S = 2 sqrt2`.
    /// Bob's settings carry the minus sign because the singlet is
    /// anticorrelated; without it the same settings give `S = -2 sqrt2`.
    pub fn singlet_optimal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            rho: singlet(),
            a: Observable::from_bloch(0.0, 0.0, 1.0).expect("Z"),
            a_prime: Observable::from_bloch(1.0, 0.0, 0.0).expect("X"),
            b: Observable::from_bloch(-s, 0.0, -s).expect("unit"),
            b_prime: Observable::from_bloch(s, 0.0, -s).expect("unit"),
        }
    }

    /// `|00>` with the singlet-optimal settings; a separable reference point.
    pub fn product_reference() -> Self {
        Self {
            rho: DensityOperator::zero_state(2).expect("2 qubits"),
            ..Self::singlet_optimal()
        }
    }
}

/// `(|01> - |10>)/sqrt2`
pub fn singlet() -> DensityOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    QuRegister::new(vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)])
        .expect("unit vector")
        .to_density()
}
