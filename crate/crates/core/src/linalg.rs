//! Dense complex matrices and the structural predicates used across the crate.
//!
//! Basis convention: for an `n`-qubit operator, qubit 0 is the most
//! significant bit of a basis index, so `|x_0 x_1 ... x_{n-1}>` sits at
//! index `sum x_q * 2^(n-1-q)`. [`ComplexMatrix::tensor`] follows the same
//! convention: the left factor owns the high-order positions.

use std::fmt;
use std::ops::{Add, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default tolerance for structural predicates (hermitian, PSD, projector, unitary).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Default tolerance for arithmetic identities.
pub const ARITHMETIC_TOL: f64 = 1e-12;
/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 10;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Square dense matrix of `Complex64`, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails on an empty or
    /// non-square buffer and on non-finite entries.
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Empty("matrix dimension"));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    /// Real-valued convenience constructor.
    pub fn from_real(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(entries: &[C64]) -> Self {
        Self::from_fn(entries.len(), |i, j| if i == j { entries[i] } else { ZERO })
    }

    /// `|u><v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        Ok(Self::from_fn(u.len(), |i, j| u[i] * v[j].conj()))
    }

    /// `|x><x|` for the computational basis state `index` of dimension `dim`.
    pub fn basis_projector(dim: usize, index: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == index && j == index { ONE } else { ZERO })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(Self { dim: n, data: out })
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// Kronecker product; `self` occupies the high-order index positions.
    pub fn tensor(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        Self::from_fn(m * n, |i, j| {
            self.get(i / n, j / n) * other.get(i % n, j % n)
        })
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(c(factor, 0.0))
    }

    /// Largest absolute entry difference. Panics on a dimension mismatch.
    pub fn max_norm_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_norm_diff: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Partial trace over the listed qubit positions of an `n_qubits` operator.
    /// The remaining qubits keep their relative order.
    pub fn partial_trace(&self, n_qubits: usize, traced: &[usize]) -> Result<Self> {
        if self.dim != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << n_qubits,
                found: self.dim,
            });
        }
        let mut is_traced = vec![false; n_qubits];
        for &q in traced {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange { index: q, n_qubits });
            }
            if is_traced[q] {
                return Err(Error::RepeatedIndex(q));
            }
            is_traced[q] = true;
        }
        let kept: Vec<usize> = (0..n_qubits).filter(|&q| !is_traced[q]).collect();
        let gone: Vec<usize> = (0..n_qubits).filter(|&q| is_traced[q]).collect();

        let out_dim = 1usize << kept.len();
        let sum_dim = 1usize << gone.len();
        let mut out = vec![ZERO; out_dim * out_dim];
        for r in 0..out_dim {
            let r_base = scatter_bits(n_qubits, &kept, r);
            for col in 0..out_dim {
                let c_base = scatter_bits(n_qubits, &kept, col);
                let mut acc = ZERO;
                for t in 0..sum_dim {
                    let t_bits = scatter_bits(n_qubits, &gone, t);
                    acc += self.get(r_base | t_bits, c_base | t_bits);
                }
                out[r * out_dim + col] = acc;
            }
        }
        Ok(Self {
            dim: out_dim,
            data: out,
        })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub(crate) fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Ascending eigenvalues of a hermitian matrix.
    pub fn hermitian_eigenvalues(&self, tol: f64) -> Result<Vec<f64>> {
        let dev = self.hermitian_deviation();
        if dev > tol {
            return Err(Error::NotHermitian(dev));
        }
        // Symmetrize first so round-off in the lower triangle does not leak in.
        let m = DMatrix::from_fn(self.dim, self.dim, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        });
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(|a, b| a.total_cmp(b));
        Ok(eig)
    }

    /// True iff every eigenvalue is at least `-tol`. Errors on non-hermitian input.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        let eig = self.hermitian_eigenvalues(tol)?;
        Ok(eig.first().is_none_or(|&lo| lo >= -tol))
    }

    pub fn is_projector(&self, tol: f64) -> bool {
        if !self.is_hermitian(tol) {
            return false;
        }
        let sq = self.matmul(self).expect("same dimension");
        sq.max_norm_diff(self) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.dagger().matmul(self).expect("same dimension");
        prod.max_norm_diff(&Self::identity(self.dim)) <= tol
    }

    /// `self * v`
    pub fn apply_vector(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| {
                self.data[i * self.dim..(i + 1) * self.dim]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix add: dimension mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix sub: dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product of a non-empty sequence, left to right.
pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    factors.into_iter().fold(None, |acc, m| match acc {
        None => Some(m.clone()),
        Some(a) => Some(a.tensor(m)),
    })
}

/// Places the bits of `value` (most significant first) at the listed qubit
/// positions of an `n_qubits` basis index.
pub(crate) fn scatter_bits(n_qubits: usize, positions: &[usize], value: usize) -> usize {
    let k = positions.len();
    positions.iter().enumerate().fold(0, |acc, (slot, &q)| {
        let bit = (value >> (k - 1 - slot)) & 1;
        acc | (bit << (n_qubits - 1 - q))
    })
}

/// Inverse of [`scatter_bits`].
pub(crate) fn gather_bits(n_qubits: usize, positions: &[usize], index: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, &q| (acc << 1) | ((index >> (n_qubits - 1 - q)) & 1))
}

/// Validates a list of qubit indices: in range and pairwise distinct.
pub(crate) fn check_qubits(n_qubits: usize, qubits: &[usize]) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::IndexOutOfRange { index: q, n_qubits });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::RepeatedIndex(q));
        }
    }
    Ok(())
}
