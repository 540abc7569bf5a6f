//! JSON inputs for `psa-table` and `chsh`.
//!
//! ```json
//! {
//!   "state": {"circuit": "bell.qc"},
//!   "contexts": [
//!     {"name": "z", "vectors": [[1, 0], [0, 1]], "labels": ["0", "1"]},
//!     {"name": "x", "projectors": [[[0.5, 0.5], [0.5, 0.5]], [[0.5, -0.5], [-0.5, 0.5]]]}
//!   ]
//! }
//! ```
//!
//! A complex entry is either a bare real number or a `[re, im]` pair. A state is
//! `{"circuit": path}`, `{"matrix": rows}` or `{"pure": amplitudes}`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use num_complex::Complex64;
use qclsim::psa::{ChshSetup, Context, Observable};
use qclsim::{ComplexMatrix, DensityOperator, Projector, QuRegister};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Pair([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

type Rows = Vec<Vec<Entry>>;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSource {
    Circuit(PathBuf),
    Matrix(Rows),
    Pure(Vec<Entry>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextInput {
    pub name: String,
    #[serde(default)]
    pub vectors: Option<Vec<Vec<Entry>>>,
    #[serde(default)]
    pub projectors: Option<Vec<Rows>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsaInput {
    pub state: StateSource,
    pub contexts: Vec<ContextInput>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshInput {
    pub state: StateSource,
    pub a: Rows,
    pub a_prime: Rows,
    pub b: Rows,
    pub b_prime: Rows,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: invalid input", path.display()))
}

fn matrix(rows: &Rows) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = rows.iter().map(|r| r.iter().map(|e| e.value()).collect()).collect();
    Ok(ComplexMatrix::from_rows(&rows)?)
}

fn vector(entries: &[Entry]) -> Vec<Complex64> {
    entries.iter().map(|e| e.value()).collect()
}

/// Resolves a state. Circuit paths are relative to `base`.
pub fn load_state(
    input: &StateSource,
    base: &Path,
    tol: f64,
    load_circuit: &dyn Fn(&Path) -> Result<DensityOperator>,
) -> Result<DensityOperator> {
    match input {
        StateSource::Circuit(path) => load_circuit(&base.join(path)),
        StateSource::Matrix(rows) => {
            Ok(DensityOperator::with_tolerance(matrix(rows)?, tol).context("invalid density matrix")?)
        }
        StateSource::Pure(amps) => Ok(QuRegister::with_tolerance(vector(amps), tol)
            .context("invalid pure state")?
            .to_density()),
    }
}

/// A validated context with one label per projector.
pub struct LabelledContext {
    pub name: String,
    pub labels: Vec<String>,
    pub context: Context,
}

pub fn load_context(input: &ContextInput, tol: f64) -> Result<LabelledContext> {
    let projectors: Vec<Projector> = match (&input.vectors, &input.projectors) {
        (Some(vs), None) => vs
            .iter()
            .map(|v| Ok(QuRegister::with_tolerance(vector(v), tol)?.to_projector()))
            .collect::<Result<_>>(),
        (None, Some(ps)) => ps
            .iter()
            .map(|p| Ok(Projector::with_tolerance(matrix(p)?, tol)?))
            .collect::<Result<_>>(),
        _ => bail!("give exactly one of `vectors` or `projectors`"),
    }
    .with_context(|| format!("context `{}`", input.name))?;
    let labels = match &input.labels {
        Some(labels) if labels.len() != projectors.len() => bail!(
            "context `{}`: {} labels for {} projectors",
            input.name,
            labels.len(),
            projectors.len()
        ),
        Some(labels) => labels.clone(),
        None => (0..projectors.len()).map(|i| format!("P{i}")).collect(),
    };
    let context = Context::with_tolerance(projectors, tol).with_context(|| format!("context `{}`", input.name))?;
    Ok(LabelledContext {
        name: input.name.clone(),
        labels,
        context,
    })
}

pub fn load_chsh(
    input: &ChshInput,
    base: &Path,
    tol: f64,
    load_circuit: &dyn Fn(&Path) -> Result<DensityOperator>,
) -> Result<ChshSetup> {
    let rho = load_state(&input.state, base, tol, load_circuit)?;
    if rho.n_qubits() != 2 {
        bail!("CHSH needs a two-qubit state, found {} qubit(s)", rho.n_qubits());
    }
    let obs = |name: &str, rows: &Rows| -> Result<Observable> {
        Observable::with_tolerance(matrix(rows)?, tol).with_context(|| format!("observable `{name}`"))
    };
    Ok(ChshSetup {
        rho,
        a: obs("a", &input.a)?,
        a_prime: obs("a_prime", &input.a_prime)?,
        b: obs("b", &input.b)?,
        b_prime: obs("b_prime", &input.b_prime)?,
    })
}
