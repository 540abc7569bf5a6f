//! Quantitative acceptance checks. Runs without the test harness and prints
//! one PASS/FAIL line per criterion; exits non-zero if any criterion fails.

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

use qclsim::channels::NoiseKind;
use qclsim::circuit::{outcome_distribution, parse_circuit, sample, simulate};
use qclsim::psa::{check_additivity, check_noncontextuality, reconstruct_density, tomography_family, ChshSetup, Psa};
use qclsim::qcl::{eval_formula, qcl_and, qcl_not, truth_probability};
use qclsim::linalg::{ComplexMatrix, C64};
use qclsim::psa::Observable;
use qclsim::random::{
    random_context_pair, random_density, random_observable, random_orthogonal_family, random_separable,
};
use qclsim::state::{DensityOperator, Projector, QuRegister};
use qclsim::{parse_formula, psa::chsh_value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const THREE_WIRE: &str = "\
qubits 3
gate not 0
gate not 0
gate h 1
gate h 1
gate id 2
measure all
";

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn hadamard_halves() -> Outcome {
    let ir = parse_circuit("qubits 1\ngate h 0\nmeasure all\n").map_err(err)?;
    let dist = outcome_distribution(&simulate(&ir, None).map_err(err)?);
    let (p0, p1) = (dist.get("0").copied().unwrap_or(0.0), dist.get("1").copied().unwrap_or(0.0));
    let dev = (p0 - 0.5).abs().max((p1 - 0.5).abs());
    check(dev <= 1e-12, format!("p(0)={p0}, p(1)={p1}"), format!("deviation {dev:e}"))
}

fn reference_circuit_noiseless() -> Outcome {
    let ir = parse_circuit(THREE_WIRE).map_err(err)?;
    let dist = outcome_distribution(&simulate(&ir, None).map_err(err)?);
    let p = dist.get("000").copied().unwrap_or(0.0);
    if dist.len() != 1 || (p - 1.0).abs() > 1e-12 {
        return Err(format!("distribution {dist:?}"));
    }
    let mut seeds: Vec<u64> = (0..50).collect();
    let mut meta = ChaCha8Rng::seed_from_u64(0xF161);
    seeds.extend((0..50).map(|_| meta.random::<u64>()));
    for &seed in &seeds {
        let h = sample(&ir, 1024, seed).map_err(err)?;
        if h.counts.len() != 1 || h.count("000") != 1024 {
            return Err(format!("seed {seed}: {:?}", h.counts));
        }
    }
    Ok(format!("{{000: 1.0}}, 1024/1024 on {} seeds", seeds.len()))
}

fn reference_circuit_bitflip() -> Outcome {
    let ir = parse_circuit(THREE_WIRE)
        .map_err(err)?
        .with_noise_after_gates(NoiseKind::BitFlip, 0.05)
        .map_err(err)?;
    let mut meta = ChaCha8Rng::seed_from_u64(0xF162);
    let (mut modal, mut spread) = (0, 0);
    for _ in 0..100 {
        let h = sample(&ir, 1024, meta.random()).map_err(err)?;
        modal += usize::from(h.modal_outcome() == Some("000"));
        spread += usize::from(h.counts.keys().any(|k| k != "000"));
    }
    check(
        modal >= 99 && spread >= 99,
        format!("modal 000 in {modal}/100, spread in {spread}/100"),
        format!("modal 000 in {modal}/100, spread in {spread}/100"),
    )
}

fn not_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let rho = random_density(1 + i % 3, &mut rng);
        let p = truth_probability(&rho).map_err(err)?;
        let q = truth_probability(&qcl_not(&rho).map_err(err)?).map_err(err)?;
        worst = worst.max((q - (1.0 - p)).abs());
    }
    check(worst <= 1e-12, format!("200 states, max error {worst:e}"), format!("max error {worst:e}"))
}

fn and_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let rho = random_density(1 + i % 2, &mut rng);
        let sigma = random_density(1 + (i / 2) % 2, &mut rng);
        let p = truth_probability(&rho).map_err(err)?;
        let q = truth_probability(&sigma).map_err(err)?;
        let r = truth_probability(&qcl_and(&rho, &sigma).map_err(err)?).map_err(err)?;
        worst = worst.max((r - p * q).abs());
    }
    let bit = |v: usize| QuRegister::basis(1, v).map(|q| q.to_density()).map_err(err);
    let formula = parse_formula("a & b").map_err(err)?;
    for a in 0..2 {
        for b in 0..2 {
            let bindings: HashMap<String, DensityOperator> =
                [("a".to_string(), bit(a)?), ("b".to_string(), bit(b)?)].into_iter().collect();
            let t = eval_formula(&formula, &bindings).map_err(err)?;
            if t != (a & b) as f64 {
                return Err(format!("truth table fails at ({a}, {b}): {t}"));
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("200 pairs, max error {worst:e}; truth table exact"),
        format!("max error {worst:e}"),
    )
}

fn psa_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 4;
        let psa = Psa::new(random_density(n, &mut rng));
        worst = worst.max((psa.intensity(&Projector::identity(n)).map_err(err)? - 1.0).abs());
        let k = rng.random_range(1..=(1usize << n));
        let family = random_orthogonal_family(n, k, &mut rng);
        if !check_additivity(&psa, &family, 1e-10).map_err(err)? {
            return Err(format!("additivity fails on instance {i} (n={n}, k={k})"));
        }
    }
    check(
        worst <= 1e-10,
        format!("100 instances, dims 2-16, max |Psi(I)-1| {worst:e}"),
        format!("max |Psi(I)-1| {worst:e}"),
    )
}

fn noncontextuality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut passed = 0;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 1 + i % 4;
        let psa = Psa::new(random_density(n, &mut rng));
        let (a, b) = random_context_pair(n, &mut rng);
        let x = psa.intensity(&a.projectors()[0]).map_err(err)?;
        let y = psa.intensity(&b.projectors()[0]).map_err(err)?;
        worst = worst.max((x - y).abs());
        if check_noncontextuality(&psa, &a, &b, 1e-12).map_err(err)? && (x - y).abs() <= 1e-12 {
            passed += 1;
        }
    }
    check(
        passed == 100,
        format!("100/100 trials, max difference {worst:e}"),
        format!("{passed}/100 trials"),
    )
}

fn reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let n = 1 + i % 2;
        let rho = random_density(n, &mut rng);
        let psa = Psa::new(rho.clone());
        let samples = tomography_family(n)
            .into_iter()
            .map(|p| psa.intensity(&p).map(|v| (p, v)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let back = reconstruct_density(&samples, n).map_err(err)?;
        worst = worst.max(back.matrix().max_norm_diff(rho.matrix()));
    }
    check(worst <= 1e-8, format!("50 states, max-norm error {worst:e}"), format!("max-norm error {worst:e}"))
}

fn chsh() -> Outcome {
    let s = ChshSetup::singlet_optimal().value().map_err(err)?;
    if (s - 2.828427).abs() > 1e-6 {
        return Err(format!("singlet S = {s}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let s = if i % 2 == 0 {
            let rho = random_separable(&mut rng);
            let o: Vec<_> = (0..4).map(|_| random_observable(&mut rng)).collect();
            chsh_value(&rho, &o[0], &o[1], &o[2], &o[3]).map_err(err)?
        } else {
            // pure product state with settings aligned to its Bloch vectors, which sits on the bound
            let (u, v) = (random_density(1, &mut rng), random_density(1, &mut rng));
            let (u, v) = (pure_part(&u)?, pure_part(&v)?);
            let a = bloch_observable(&u)?;
            let b = bloch_observable(&v)?;
            let rho = u.tensor(&v).map_err(err)?;
            chsh_value(&rho, &a, &a, &b, &b.neg()).map_err(err)?
        };
        worst = worst.max(s.abs());
    }
    check(
        worst <= 2.0 + 1e-9,
        format!("singlet S = {s:.6}; separable max |S| = {worst:.12}"),
        format!("separable max |S| = {worst}"),
    )
}

/// Dominant eigenvector of a qubit state, as a pure state.
fn pure_part(rho: &DensityOperator) -> Result<DensityOperator, String> {
    let m = rho.matrix();
    let (x, y, z) = bloch(m);
    let r = (x * x + y * y + z * z).sqrt().max(1e-300);
    let (x, y, z) = (x / r, y / r, z / r);
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    let c0 = C64::new((theta / 2.0).cos(), 0.0);
    let c1 = C64::from_polar((theta / 2.0).sin(), phi);
    QuRegister::qubit(c0, c1).map(|q| q.to_density()).map_err(err)
}

fn bloch(m: &ComplexMatrix) -> (f64, f64, f64) {
    let off = m.get(1, 0);
    (2.0 * off.re, 2.0 * off.im, m.get(0, 0).re - m.get(1, 1).re)
}

fn bloch_observable(rho: &DensityOperator) -> Result<Observable, String> {
    let (x, y, z) = bloch(rho.matrix());
    let r = (x * x + y * y + z * z).sqrt();
    Observable::from_bloch(x / r, y / r, z / r).map_err(err)
}

fn statistical_soundness() -> Outcome {
    let ir = parse_circuit("qubits 1\ngate h 0\nmeasure all\n").map_err(err)?;
    let start = Instant::now();
    let h = sample(&ir, 1_000_000, 2024).map_err(err)?;
    let elapsed = start.elapsed().as_secs_f64();
    let f = h.frequency("0");
    check(
        (0.498..=0.502).contains(&f) && elapsed < 30.0,
        format!("f(0) = {f:.6} in {elapsed:.2} s"),
        format!("f(0) = {f:.6} in {elapsed:.2} s"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("hadamard halves", hadamard_halves),
        ("reference circuit, noiseless", reference_circuit_noiseless),
        ("reference circuit, bit-flip 0.05", reference_circuit_bitflip),
        ("not law", not_law),
        ("and law", and_law),
        ("psa axioms", psa_axioms),
        ("non-contextuality", noncontextuality),
        ("reconstruction round-trip", reconstruction),
        ("chsh witness", chsh),
        ("statistical soundness", statistical_soundness),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
