//! Random states, unitaries and projector families for tests and demos.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, ComplexMatrix, C64};
use crate::psa::{Context, Observable};
use crate::state::{DensityOperator, Projector, QuRegister};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> QuRegister {
    let v: Vec<C64> = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
    QuRegister::normalized(v).expect("non-zero with probability one")
}

/// Random density operator `G G^dagger / Tr(G G^dagger)` with a random rank.
pub fn random_density<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> DensityOperator {
    let dim = 1usize << n_qubits;
    let rank = rng.random_range(1..=dim);
    let g = ComplexMatrix::from_fn(dim, |_, j| if j < rank { gaussian(rng) } else { c(0.0, 0.0) });
    let m = g.matmul(&g.dagger()).expect("square");
    let tr = m.trace().re;
    let m = m.scale_real(1.0 / tr);
    // G G^dagger is hermitian up to rounding; symmetrize before validating.
    let m = (&m + &m.dagger()).scale_real(0.5);
    DensityOperator::new(m).expect("valid by construction")
}

/// Haar-random unitary, returned as its orthonormal columns.
pub fn random_basis<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Vec<QuRegister> {
    unitary_columns(1usize << n_qubits, rng)
        .into_iter()
        .map(|v| QuRegister::new(v).expect("normalized"))
        .collect()
}

fn unitary_columns<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Vec<C64>> {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    cols
}

/// Another orthonormal basis of the span of `vectors`.
fn rotate_within<R: Rng + ?Sized>(vectors: &[QuRegister], rng: &mut R) -> Vec<QuRegister> {
    let u = unitary_columns(vectors.len(), rng);
    let dim = vectors[0].amplitudes().len();
    u.iter()
        .map(|col| {
            let mut out = vec![c(0.0, 0.0); dim];
            for (w, v) in col.iter().zip(vectors) {
                for (o, a) in out.iter_mut().zip(v.amplitudes()) {
                    *o += w * a;
                }
            }
            QuRegister::new(out).expect("unitary mix of orthonormal vectors")
        })
        .collect()
}

/// Two contexts on `n_qubits >= 1` that share their first projector.
///
/// The shared projector is rebuilt from a different basis of its range in the
/// second context, and the remaining blocks of the two contexts differ.
pub fn random_context_pair<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> (Context, Context) {
    let dim = 1usize << n_qubits;
    assert!(dim >= 2, "a shared block needs a non-trivial complement");
    let basis = random_basis(n_qubits, rng);
    let r = rng.random_range(1..dim);
    let (shared, rest) = basis.split_at(r);
    let build = |shared: &[QuRegister], rest: &[QuRegister], rng: &mut R| {
        let mut blocks = group_basis(shared, 1, rng);
        let k = rng.random_range(1..=rest.len());
        blocks.extend(group_basis(rest, k, rng));
        Context::new(blocks).expect("orthogonal resolution of identity")
    };
    let first = build(shared, rest, rng);
    let shared2 = rotate_within(shared, rng);
    let rest2 = rotate_within(rest, rng);
    let second = build(&shared2, &rest2, rng);
    (first, second)
}

/// `k` pairwise-orthogonal projectors built from disjoint groups of a random basis.
/// Their join is generally not the identity.
pub fn random_orthogonal_family<R: Rng + ?Sized>(n_qubits: usize, k: usize, rng: &mut R) -> Vec<Projector> {
    let dim = 1usize << n_qubits;
    assert!(k >= 1 && k <= dim, "family size must be in 1..=dim");
    let basis = random_basis(n_qubits, rng);
    let used = rng.random_range(k..=dim);
    group_basis(&basis[..used], k, rng)
}

/// A random measurement context with `k` blocks.
pub fn random_context<R: Rng + ?Sized>(n_qubits: usize, k: usize, rng: &mut R) -> Context {
    let basis = random_basis(n_qubits, rng);
    Context::new(group_basis(&basis, k, rng)).expect("orthogonal resolution of identity")
}

/// Splits basis vectors into `k` non-empty groups and sums each group's rank-1 projectors.
fn group_basis<R: Rng + ?Sized>(basis: &[QuRegister], k: usize, rng: &mut R) -> Vec<Projector> {
    let mut labels: Vec<usize> = (0..basis.len()).map(|i| if i < k { i } else { rng.random_range(0..k) }).collect();
    labels.shuffle(rng);
    (0..k)
        .map(|g| {
            let dim = basis[0].amplitudes().len();
            let m = basis
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == g)
                .fold(ComplexMatrix::zeros(dim), |acc, (v, _)| &acc + v.to_projector().matrix());
            Projector::new(m).expect("sum of orthogonal rank-1 projectors")
        })
        .collect()
}

/// `n . sigma` for a uniformly random unit vector `n`.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R) -> Observable {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return Observable::from_bloch(v[0] / norm, v[1] / norm, v[2] / norm).expect("unit vector");
        }
    }
}

/// Random separable two-qubit state: a convex mixture of product states.
pub fn random_separable<R: Rng + ?Sized>(rng: &mut R) -> DensityOperator {
    let terms = rng.random_range(1..=4);
    let mut weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let parts: Vec<(f64, DensityOperator)> = weights
        .into_iter()
        .map(|w| {
            let a = random_density(1, rng);
            let b = random_density(1, rng);
            (w, a.tensor(&b).expect("2 qubits"))
        })
        .collect();
    crate::state::mix(&parts).expect("weights sum to one")
}
