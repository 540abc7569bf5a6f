//! `qclsim` command-line front end.

mod inputs;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qclsim::circuit::{outcome_distribution_over, sample, simulate};
use qclsim::formula::{AtomSource, FormulaFile};
use qclsim::psa::{global_valuation, ChshSetup, Psa};
use qclsim::qcl::eval_formula;
use qclsim::{parse_circuit, CircuitIr, DensityOperator, NoiseKind};
use serde_json::json;

use crate::inputs::{load_chsh, load_context, load_state, read_json, ChshInput, PsaInput};

#[derive(Debug, Parser)]
#[command(name = "qclsim", version, about = "Density-operator circuit simulation, quantum computational logic and projector valuations")]
struct Cli {
    /// Number of shots for `sample`.
    #[arg(long, global = true, default_value_t = 1024)]
    shots: u64,
    /// Seed of the shot sampler.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Noise injected after every gate step of every circuit, as `kind:p`.
    #[arg(long, global = true, value_parser = parse_noise)]
    noise: Option<(NoiseKind, f64)>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Tolerance for validating user-supplied states, projectors and observables.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Record,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the exact outcome distribution of a circuit.
    Run { circuit: PathBuf },
    /// Sample measurement outcomes of a circuit.
    Sample { circuit: PathBuf },
    /// Print the truth probability of a formula file.
    Eval { formula: PathBuf },
    /// Print the intensity of every projector of every context.
    PsaTable { input: PathBuf },
    /// Print the CHSH value of a JSON setup or of a preset (`singlet-optimal`, `product`).
    Chsh { input: String },
}

fn parse_noise(s: &str) -> std::result::Result<(NoiseKind, f64), String> {
    let (kind, p) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `<bitflip|depolarizing>:<p>`, found `{s}`"))?;
    let kind: NoiseKind = kind.parse()?;
    let p: f64 = p.parse().map_err(|_| format!("invalid probability `{p}`"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("probability {p} outside [0, 1]"));
    }
    Ok((kind, p))
}

impl Cli {
    fn load_circuit(&self, path: &Path) -> Result<CircuitIr> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let ir = parse_circuit(&text).with_context(|| path.display().to_string())?;
        match self.noise {
            Some((kind, p)) => Ok(ir.with_noise_after_gates(kind, p)?),
            None => Ok(ir),
        }
    }

    fn circuit_state(&self, path: &Path) -> Result<DensityOperator> {
        let ir = self.load_circuit(path)?;
        simulate(&ir, None).with_context(|| path.display().to_string())
    }

    fn run(&self) -> Result<String> {
        match &self.command {
            Command::Run { circuit } => self.cmd_run(circuit),
            Command::Sample { circuit } => self.cmd_sample(circuit),
            Command::Eval { formula } => self.cmd_eval(formula),
            Command::PsaTable { input } => self.cmd_psa_table(input),
            Command::Chsh { input } => self.cmd_chsh(input),
        }
    }

    fn cmd_run(&self, path: &Path) -> Result<String> {
        let ir = self.load_circuit(path)?;
        let rho = simulate(&ir, None).with_context(|| path.display().to_string())?;
        let dist = outcome_distribution_over(&rho, &ir.measured_qubits())?;
        Ok(match self.format {
            Format::Table => rows(&dist, " ", |p| format!("{p:.6}")),
            Format::Csv => format!("outcome,probability\n{}", rows(&dist, ",", |p| format!("{p:.6}"))),
            Format::Record => record(json!({ "distribution": dist })),
        })
    }

    fn cmd_sample(&self, path: &Path) -> Result<String> {
        if self.shots == 0 {
            bail!("--shots must be at least 1");
        }
        let ir = self.load_circuit(path)?;
        let hist = sample(&ir, self.shots, self.seed).with_context(|| path.display().to_string())?;
        Ok(match self.format {
            Format::Table => hist.to_table(),
            Format::Csv => hist.to_csv(),
            Format::Record => hist.to_record() + "\n",
        })
    }

    fn cmd_eval(&self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let file = FormulaFile::parse(&text).with_context(|| path.display().to_string())?;
        let base = parent_dir(path);
        let mut circuits: HashMap<PathBuf, DensityOperator> = HashMap::new();
        for b in &file.bindings {
            if let AtomSource::Circuit(rel) = &b.source {
                let rho = self
                    .circuit_state(&base.join(rel))
                    .with_context(|| format!("{}: line {}: atom `{}`", path.display(), b.line, b.name))?;
                circuits.insert(rel.clone(), rho);
            }
        }
        let bindings = file
            .bind(|rel| Ok(circuits[rel].clone()))
            .with_context(|| path.display().to_string())?;
        let p = eval_formula(&file.formula, &bindings).with_context(|| path.display().to_string())?;
        Ok(match self.format {
            Format::Table => format!("{p:.6}\n"),
            Format::Csv => format!("probability\n{p:.6}\n"),
            Format::Record => record(json!({ "formula": file.formula.to_string(), "probability": p })),
        })
    }

    fn cmd_psa_table(&self, path: &Path) -> Result<String> {
        let input: PsaInput = read_json(path)?;
        let base = parent_dir(path);
        let rho = load_state(&input.state, &base, self.tol, &|p| self.circuit_state(p))
            .with_context(|| format!("{}: state", path.display()))?;
        let contexts = input
            .contexts
            .iter()
            .map(|c| load_context(c, self.tol))
            .collect::<Result<Vec<_>>>()
            .with_context(|| path.display().to_string())?;
        if contexts.is_empty() {
            bail!("{}: no contexts given", path.display());
        }
        for c in &contexts {
            if c.context.n_qubits() != rho.n_qubits() {
                bail!(
                    "{}: context `{}` acts on {} qubit(s) but the state has {}",
                    path.display(),
                    c.name,
                    c.context.n_qubits(),
                    rho.n_qubits()
                );
            }
        }
        let psa = Psa::new(rho);
        let plain: Vec<_> = contexts.iter().map(|c| c.context.clone()).collect();
        let table = global_valuation(&psa, &plain)?;
        let entries: Vec<(&str, &str, f64)> = table
            .entries()
            .map(|(ci, pi, v)| (contexts[ci].name.as_str(), contexts[ci].labels[pi].as_str(), v))
            .collect();
        Ok(match self.format {
            Format::Table => {
                let w0 = entries.iter().map(|e| e.0.len()).chain([7]).max().unwrap_or(7);
                let w1 = entries.iter().map(|e| e.1.len()).chain([9]).max().unwrap_or(9);
                let mut out = format!("{:<w0$}  {:<w1$}  intensity\n", "context", "projector");
                for (c, p, v) in &entries {
                    let _ = writeln!(out, "{c:<w0$}  {p:<w1$}  {v:.6}");
                }
                out
            }
            Format::Csv => {
                let mut out = String::from("context,projector,intensity\n");
                for (c, p, v) in &entries {
                    let _ = writeln!(out, "{},{},{v:.6}", csv_field(c), csv_field(p));
                }
                out
            }
            Format::Record => record(json!({
                "rows": entries
                    .iter()
                    .map(|(c, p, v)| json!({ "context": c, "projector": p, "intensity": v }))
                    .collect::<Vec<_>>()
            })),
        })
    }

    fn cmd_chsh(&self, input: &str) -> Result<String> {
        let setup = match input {
            "singlet-optimal" => ChshSetup::singlet_optimal(),
            "product" => ChshSetup::product_reference(),
            path => {
                let path = Path::new(path);
                let input: ChshInput = read_json(path)?;
                load_chsh(&input, &parent_dir(path), self.tol, &|p| self.circuit_state(p))
                    .with_context(|| path.display().to_string())?
            }
        };
        let s = setup.value()?;
        Ok(match self.format {
            Format::Table => format!("{s:.6}\n"),
            Format::Csv => format!("S\n{s:.6}\n"),
            Format::Record => record(json!({ "S": s })),
        })
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn rows(dist: &BTreeMap<String, f64>, sep: &str, fmt: impl Fn(f64) -> String) -> String {
    dist.iter().map(|(k, &p)| format!("{k}{sep}{}\n", fmt(p))).collect()
}

fn record(value: serde_json::Value) -> String {
    serde_json::to_string(&value).expect("json value serializes") + "\n"
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| anyhow!("cannot write to standard output: {e}"))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run().and_then(|text| emit(&cli, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
