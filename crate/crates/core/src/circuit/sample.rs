use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{outcome_distribution_over, simulate, CircuitIr};
use crate::error::{Error, Result};

/// Shots drawn from one ChaCha stream. Chunk `i` of a run uses stream `i`
/// of the generator seeded with the run seed, so counts do not depend on
/// how chunks are scheduled across threads.
pub const SHOTS_PER_STREAM: u64 = 65_536;

/// Outcome counts of a sampled run. Only observed outcomes are listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn count(&self, outcome: &str) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    /// Most frequent outcome; ties go to the smallest label.
    pub fn modal_outcome(&self) -> Option<&str> {
        let mut best: Option<(&str, u64)> = None;
        for (k, &v) in &self.counts {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        best.map(|(k, _)| k)
    }

    pub fn frequency(&self, outcome: &str) -> f64 {
        self.count(outcome) as f64 / self.shots as f64
    }

    /// `outcome count` lines preceded by a comment with shots and seed.
    pub fn to_table(&self) -> String {
        let mut out = format!("# shots {} seed {}\n", self.shots, self.seed);
        for (k, v) in &self.counts {
            let _ = writeln!(out, "{k} {v}");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count\n");
        for (k, v) in &self.counts {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }

    /// Single-line JSON record.
    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("histogram serializes")
    }
}

/// Samples `shots` measurement outcomes of the circuit's measured qubits.
/// Chunks run in parallel; the result equals [`sample_sequential`].
pub fn sample(ir: &CircuitIr, shots: u64, seed: u64) -> Result<Histogram> {
    let (labels, cdf) = prepare(ir, shots)?;
    let n_chunks = shots.div_ceil(SHOTS_PER_STREAM);
    let totals = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| draw_chunk(&cdf, seed, chunk, chunk_len(shots, chunk)))
        .reduce(|| vec![0; cdf.len()], merge);
    Ok(finish(labels, totals, shots, seed))
}

/// Single-threaded reference for [`sample`].
pub fn sample_sequential(ir: &CircuitIr, shots: u64, seed: u64) -> Result<Histogram> {
    let (labels, cdf) = prepare(ir, shots)?;
    let n_chunks = shots.div_ceil(SHOTS_PER_STREAM);
    let totals = (0..n_chunks)
        .map(|chunk| draw_chunk(&cdf, seed, chunk, chunk_len(shots, chunk)))
        .fold(vec![0; cdf.len()], merge);
    Ok(finish(labels, totals, shots, seed))
}

fn prepare(ir: &CircuitIr, shots: u64) -> Result<(Vec<String>, Vec<f64>)> {
    if shots == 0 {
        return Err(Error::Empty("shots"));
    }
    let rho = simulate(ir, None)?;
    let dist = outcome_distribution_over(&rho, &ir.measured_qubits())?;
    let total: f64 = dist.values().sum();
    let mut acc = 0.0;
    let mut labels = Vec::with_capacity(dist.len());
    let mut cdf = Vec::with_capacity(dist.len());
    for (label, p) in dist {
        acc += p / total;
        labels.push(label);
        cdf.push(acc);
    }
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    Ok((labels, cdf))
}

fn chunk_len(shots: u64, chunk: u64) -> u64 {
    (shots - chunk * SHOTS_PER_STREAM).min(SHOTS_PER_STREAM)
}

fn draw_chunk(cdf: &[f64], seed: u64, chunk: u64, len: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut counts = vec![0u64; cdf.len()];
    for _ in 0..len {
        let u: f64 = rng.random();
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        counts[idx] += 1;
    }
    counts
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

fn finish(labels: Vec<String>, totals: Vec<u64>, shots: u64, seed: u64) -> Histogram {
    let counts = labels
        .into_iter()
        .zip(totals)
        .filter(|&(_, n)| n > 0)
        .collect();
    Histogram { shots, seed, counts }
}
