//! Seeded Monte Carlo of the QM-versus-LR experiment: joint measurement
//! outcomes sampled from a three-qubit state, and the running depressing
//! factor of repeated Bernoulli trials.
//!
//! Every run owns a ChaCha8 stream selected by its run index, so results do
//! not depend on how runs are spread over threads.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{validation, Error, Result};
use crate::table::{Cell, Table};
use crate::tensor::{expectation3, BlochVector, PureState};

pub const DEFAULT_CAP: u64 = 1_000_000;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// p(a, b, c) = ⟨s| P_a ⊗ P_b ⊗ P_c |s⟩ with P_± = (I ± n·σ)/2. Index
/// 4i + 2j + k, where bit 0 is outcome +1 and bit 1 is −1.
pub fn outcome_probabilities(s: &PureState, a: &BlochVector, b: &BlochVector, c: &BlochVector) -> Result<[f64; 8]> {
    s.require_three()?;
    s.require_normalized()?;
    let mut p = [0.0; 8];
    for (idx, out) in p.iter_mut().enumerate() {
        let plus = |bit: usize| (idx >> bit) & 1 == 0;
        let v = expectation3(s, &a.projector(plus(2)), &b.projector(plus(1)), &c.projector(plus(0)))?;
        *out = v.re.max(0.0);
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("outcome probabilities sum to {total}")));
    }
    Ok(p)
}

/// Tally of sampled outcome triples, indexed like [`outcome_probabilities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointCounts {
    pub counts: [u64; 8],
}

impl JointCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Sign of the product abc for outcome index `idx`.
    pub fn parity(idx: usize) -> f64 {
        if idx.count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Empirical ⟨abc⟩.
    pub fn expectation(&self) -> f64 {
        let n = self.total() as f64;
        self.counts.iter().enumerate().map(|(i, &k)| Self::parity(i) * k as f64).sum::<f64>() / n
    }
}

/// Draws `n` joint outcomes of measuring (n_a·σ) ⊗ (n_b·σ) ⊗ (n_c·σ) on `s`.
pub fn sample_joint_outcomes(
    s: &PureState,
    a: &BlochVector,
    b: &BlochVector,
    c: &BlochVector,
    n: u64,
    seed: u64,
) -> Result<JointCounts> {
    let p = outcome_probabilities(s, a, b, c)?;
    let dist = WeightedIndex::new(p).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = rng_for(seed, 0);
    let mut counts = [0u64; 8];
    for _ in 0..n {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(JointCounts { counts })
}

/// Parameters of one depressing-factor experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepressionParams {
    /// Probability of the tested event (QM).
    pub q: f64,
    /// Probability the LR model assigns to it.
    pub r: f64,
    pub target_exponent: f64,
    pub cap: u64,
}

impl DepressionParams {
    pub fn new(q: f64, r: f64, target_exponent: f64, cap: u64) -> Result<Self> {
        for (name, p) in [("q", q), ("r", r)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(validation(format!("{name} = {p} is not a probability")));
            }
        }
        if q == r {
            return Err(Error::NoSeparation(q));
        }
        if !(target_exponent > 0.0 && target_exponent.is_finite()) {
            return Err(validation(format!("target exponent {target_exponent} must be positive")));
        }
        if cap == 0 {
            return Err(validation("trial cap must be positive"));
        }
        Ok(Self { q, r, target_exponent, cap })
    }

    /// log₁₀ D increments for a positive and a negative outcome.
    fn increments(&self) -> (f64, f64) {
        ((self.q / self.r).log10(), ((1.0 - self.q) / (1.0 - self.r)).log10())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub seed: u64,
    pub run_index: u64,
    pub params: DepressionParams,
    /// First trial with log₁₀ D ≥ target; `None` if the cap was reached first.
    pub crossing_trial: Option<u64>,
    /// Running log₁₀ D after each trial, when requested.
    pub trajectory: Option<Vec<f64>>,
}

impl SimulationRun {
    pub fn capped(&self) -> bool {
        self.crossing_trial.is_none()
    }
}

/// One experiment on substream `run_index` of `seed`.
pub fn simulate_run(params: &DepressionParams, seed: u64, run_index: u64, record_trajectory: bool) -> SimulationRun {
    let mut rng = rng_for(seed, run_index);
    let (up, down) = params.increments();
    let mut log_d = 0.0;
    let mut trajectory = record_trajectory.then(Vec::new);
    let mut crossing_trial = None;
    for trial in 1..=params.cap {
        log_d += if rng.random::<f64>() < params.q { up } else { down };
        if let Some(t) = trajectory.as_mut() {
            t.push(log_d);
        }
        if log_d >= params.target_exponent {
            crossing_trial = Some(trial);
            break;
        }
    }
    SimulationRun { seed, run_index, params: *params, crossing_trial, trajectory }
}

/// A single run (substream 0) without trajectory.
pub fn simulate_depression(q: f64, r: f64, target_exponent: f64, cap: u64, seed: u64) -> Result<SimulationRun> {
    let params = DepressionParams::new(q, r, target_exponent, cap)?;
    Ok(simulate_run(&params, seed, 0, false))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationBatch {
    pub runs: Vec<SimulationRun>,
}

impl SimulationBatch {
    /// Median crossing trial with capped runs ranked last; `None` when at
    /// least half the runs hit the cap.
    pub fn median_crossing(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.runs.iter().map(|r| r.crossing_trial.map_or(f64::INFINITY, |n| n as f64)).collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let m = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
        m.is_finite().then_some(m)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(vec!["run_index", "seed", "crossing_trial", "capped"]);
        for r in &self.runs {
            t.push(vec![
                Cell::Int(r.run_index as i64),
                Cell::Int(r.seed as i64),
                r.crossing_trial.map_or(Cell::Missing, |n| Cell::Int(n as i64)),
                Cell::Bool(r.capped()),
            ]);
        }
        t
    }
}

/// `runs` independent experiments, merged in run order.
pub fn simulate_batch(params: &DepressionParams, seed: u64, runs: u64) -> SimulationBatch {
    let runs = (0..runs).into_par_iter().map(|i| simulate_run(params, seed, i, false)).collect();
    SimulationBatch { runs }
}
