//! The circuit language, the density-operator simulator and the shot sampler.
//!
//! Circuit files are UTF-8, line oriented, with `#` comments:
//!
//! ```text
//! qubits 3
//! gate not 0
//! gate not 0
//! gate h 1
//! gate h 1
//! gate id 2
//! noise bitflip 0.05 2
//! measure all
//! ```
//!
//! Gate names are `id`, `not`, `h`, `sqrtnot`, `cnot` and `toffoli`; for the
//! controlled gates the last target is the negated qubit. Noise kinds are
//! `bitflip` and `depolarizing`. An optional final `measure all` or
//! `measure <i> [<j> ...]` closes the program.

mod parse;
mod sample;
mod sim;

use std::fmt;

use crate::channels::{GateKind, NoiseKind};
use crate::error::{Error, Result};
use crate::linalg::{check_qubits, MAX_QUBITS};

pub use parse::parse_circuit;
pub use sample::{sample, sample_sequential, Histogram, SHOTS_PER_STREAM};
pub use sim::{outcome_distribution, outcome_distribution_over, outcome_label, simulate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Measure {
    All,
    /// Listed qubits, in the order their bits appear in outcome labels.
    Qubits(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    Gate { gate: GateKind, targets: Vec<usize> },
    Noise { kind: NoiseKind, p: f64, target: usize },
    Measure(Measure),
}

/// Validated gate sequence over `n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitIr {
    n_qubits: usize,
    steps: Vec<Step>,
}

impl CircuitIr {
    pub fn new(n_qubits: usize, steps: Vec<Step>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::Empty("qubit register"));
        }
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n_qubits,
                max: MAX_QUBITS,
            });
        }
        for (i, step) in steps.iter().enumerate() {
            match step {
                Step::Gate { gate, targets } => {
                    if targets.len() != gate.arity() {
                        return Err(Error::Arity {
                            gate: gate.dsl_name().to_string(),
                            expected: gate.arity(),
                            found: targets.len(),
                        });
                    }
                    check_qubits(n_qubits, targets)?;
                }
                Step::Noise { p, target, .. } => {
                    if !(0.0..=1.0).contains(p) {
                        return Err(Error::BadProbability(*p));
                    }
                    check_qubits(n_qubits, &[*target])?;
                }
                Step::Measure(m) => {
                    if i + 1 != steps.len() {
                        return Err(Error::parse_kind(
                            crate::error::ParseErrorKind::MeasureNotLast,
                            0,
                            0,
                            "measure must be the final step",
                        ));
                    }
                    if let Measure::Qubits(qs) = m {
                        if qs.is_empty() {
                            return Err(Error::Empty("measured qubits"));
                        }
                        check_qubits(n_qubits, qs)?;
                    }
                }
            }
        }
        Ok(Self { n_qubits, steps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Qubits reported in outcomes: the final measure step, or every qubit.
    pub fn measured_qubits(&self) -> Vec<usize> {
        match self.steps.last() {
            Some(Step::Measure(Measure::Qubits(qs))) => qs.clone(),
            _ => (0..self.n_qubits).collect(),
        }
    }

    /// Copy with a noise step on every target after every gate step.
    pub fn with_noise_after_gates(&self, kind: NoiseKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::BadProbability(p));
        }
        let mut steps = Vec::with_capacity(self.steps.len() * 2);
        for step in &self.steps {
            steps.push(step.clone());
            if let Step::Gate { targets, .. } = step {
                steps.extend(targets.iter().map(|&target| Step::Noise { kind, p, target }));
            }
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            steps,
        })
    }
}

/// Canonical circuit text; [`parse_circuit`] reads it back to an equal IR.
impl fmt::Display for CircuitIr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for step in &self.steps {
            match step {
                Step::Gate { gate, targets } => {
                    write!(f, "gate {}", gate.dsl_name())?;
                    for t in targets {
                        write!(f, " {t}")?;
                    }
                    writeln!(f)?;
                }
                Step::Noise { kind, p, target } => {
                    writeln!(f, "noise {} {p:?} {target}", kind.dsl_name())?;
                }
                Step::Measure(Measure::All) => writeln!(f, "measure all")?,
                Step::Measure(Measure::Qubits(qs)) => {
                    write!(f, "measure")?;
                    for q in qs {
                        write!(f, " {q}")?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ir_validation() {
        let bad = CircuitIr::new(
            2,
            vec![
                Step::Measure(Measure::All),
                Step::Gate { gate: GateKind::Not, targets: vec![0] },
            ],
        );
        assert!(bad.is_err());
        let bad = CircuitIr::new(2, vec![Step::Gate { gate: GateKind::CNot, targets: vec![0] }]);
        assert!(matches!(bad, Err(Error::Arity { .. })));
        let bad = CircuitIr::new(2, vec![Step::Noise { kind: NoiseKind::BitFlip, p: 2.0, target: 0 }]);
        assert!(matches!(bad, Err(Error::BadProbability(_))));
        assert!(CircuitIr::new(0, vec![]).is_err());
        assert!(CircuitIr::new(11, vec![]).is_err());
    }

    #[test]
    fn noise_injection_follows_every_gate_target() {
        let ir = parse_circuit("qubits 3\ngate cnot 0 2\ngate h 1\nmeasure all\n").unwrap();
        let noisy = ir.with_noise_after_gates(NoiseKind::BitFlip, 0.1).unwrap();
        let kinds: Vec<String> = noisy.to_string().lines().map(str::to_string).collect();
        assert_eq!(
            kinds,
            vec![
                "qubits 3",
                "gate cnot 0 2",
                "noise bitflip 0.1 0",
                "noise bitflip 0.1 2",
                "gate h 1",
                "noise bitflip 0.1 1",
                "measure all",
            ]
        );
        assert!(ir.with_noise_after_gates(NoiseKind::BitFlip, 1.1).is_err());
    }

    #[test]
    fn measured_qubits_defaults_to_all() {
        let ir = parse_circuit("qubits 3\ngate h 1\n").unwrap();
        assert_eq!(ir.measured_qubits(), vec![0, 1, 2]);
        let ir = parse_circuit("qubits 3\nmeasure 2 0\n").unwrap();
        assert_eq!(ir.measured_qubits(), vec![2, 0]);
    }

    fn arb_step(n: usize) -> impl Strategy<Value = Step> {
        let gate = (prop::sample::select(GateKind::ALL.to_vec()), Just(n)).prop_flat_map(|(g, n)| {
            prop::sample::subsequence((0..n).collect::<Vec<_>>(), g.arity())
                .prop_shuffle()
                .prop_map(move |targets| Step::Gate { gate: g, targets })
        });
        let noise = (
            prop::sample::select(vec![NoiseKind::BitFlip, NoiseKind::Depolarizing]),
            0.0f64..=1.0,
            0..n,
        )
            .prop_map(|(kind, p, target)| Step::Noise { kind, p, target });
        prop_oneof![3 => gate, 1 => noise]
    }

    fn arb_ir() -> impl Strategy<Value = CircuitIr> {
        (3usize..=5).prop_flat_map(|n| {
            let measure = prop_oneof![
                Just(None),
                Just(Some(Measure::All)),
                prop::sample::subsequence((0..n).collect::<Vec<_>>(), 1..=n)
                    .prop_shuffle()
                    .prop_map(|qs| Some(Measure::Qubits(qs))),
            ];
            (prop::collection::vec(arb_step(n), 0..12), measure).prop_map(move |(mut steps, m)| {
                if let Some(m) = m {
                    steps.push(Step::Measure(m));
                }
                CircuitIr::new(n, steps).expect("generated IR is valid")
            })
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(ir in arb_ir()) {
            prop_assert_eq!(parse_circuit(&ir.to_string()).unwrap(), ir);
        }
    }
}
