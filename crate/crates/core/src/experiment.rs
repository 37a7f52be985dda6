//! Monte-Carlo comparison of the shaped sequence's Huffman length against the
//! coding limit of the original sequence.
//!
//! Each trial draws `x` uniformly from `X^N`, shapes it, encodes `f(x)` with a
//! Huffman code built from its own frequencies and counts a success when the
//! encoded length is strictly below `Lc(x)`. Trial `i` draws from a ChaCha8
//! stream seeded with `seed` and positioned on stream `i`, so trials are
//! independent of execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::huffman::self_encoded_length;
use crate::seqcore::{coding_limit, Sequence};
use crate::shaping::{Shaper, ShapingParams};
use crate::typespace::{IndexCache, DEFAULT_BUDGET};

pub const DEFAULT_HISTORY: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub ns: u32,
    pub n: usize,
    pub k: usize,
    pub history: u64,
    pub seed: u64,
    pub budget: u64,
}

impl ExperimentConfig {
    /// Defaults: `N = 2 ns`, `K = 1`, 1000 trials, seed 0.
    pub fn new(ns: u32) -> Self {
        ExperimentConfig {
            ns,
            n: 2 * ns as usize,
            k: 1,
            history: DEFAULT_HISTORY,
            seed: 0,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn with_len(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_history(mut self, history: u64) -> Self {
        self.history = history;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn shaping_params(&self) -> ShapingParams {
        ShapingParams::new(self.ns, self.n)
            .with_k(self.k)
            .with_budget(self.budget)
    }

    pub fn validate(&self) -> Result<()> {
        if self.history == 0 {
            return Err(Error::InvalidParameter("history must be at least 1".into()));
        }
        self.shaping_params().validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// `Lc(x)` in bits.
    pub lc: f64,
    /// `Lc(f(x))` in bits.
    pub tlc: f64,
    /// Huffman-encoded length of `f(x)`.
    pub code_len: u64,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub ns: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub history: u64,
    pub seed: u64,
    pub medlc: f64,
    pub medtlc: f64,
    pub medcodel: f64,
    pub cs: u64,
    pub pcs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub report: ExperimentReport,
    pub trials: Vec<TrialRecord>,
}

/// Random source for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Draws `n` symbols i.i.d. uniform on `1..=ns`.
pub fn uniform_sequence<R: Rng>(rng: &mut R, n: usize, ns: u32) -> Sequence {
    let symbols = (0..n).map(|_| rng.gen_range(1..=ns)).collect();
    Sequence::new(symbols, ns).expect("symbols drawn in range")
}

pub fn run_trial<R: Rng>(shaper: &Shaper, rng: &mut R, trial: u64) -> Result<TrialRecord> {
    let params = shaper.params();
    let x = uniform_sequence(rng, params.n, params.ns);
    let lc = coding_limit(&x)?;
    let y = shaper.shape(&x)?;
    let tlc = coding_limit(&y)?;
    let code_len = self_encoded_length(&y)?;
    if shaper.unshape(&y)? != x {
        return Err(Error::RoundTrip { trial });
    }
    Ok(TrialRecord {
        trial,
        lc,
        tlc,
        code_len,
        success: (code_len as f64) < lc,
    })
}

pub fn run_experiment(config: &ExperimentConfig, cache: &IndexCache) -> Result<ExperimentRun> {
    config.validate()?;
    let shaper = Shaper::new(config.shaping_params(), cache)?;
    run_with_shaper(config, &shaper)
}

/// Runs the trials against an already built transform.
pub fn run_with_shaper(config: &ExperimentConfig, shaper: &Shaper) -> Result<ExperimentRun> {
    config.validate()?;
    if shaper.params().ns != config.ns
        || shaper.params().n != config.n
        || shaper.params().k != config.k
    {
        return Err(Error::InvalidParameter(
            "shaper does not match the experiment configuration".into(),
        ));
    }
    let trials = (0..config.history)
        .into_par_iter()
        .map(|t| run_trial(shaper, &mut trial_rng(config.seed, t), t))
        .collect::<Result<Vec<_>>>()?;
    let report = summarize(config, &trials);
    Ok(ExperimentRun { report, trials })
}

/// Aggregates trials in trial order.
pub fn summarize(config: &ExperimentConfig, trials: &[TrialRecord]) -> ExperimentReport {
    let count = trials.len() as f64;
    let (mut lc, mut tlc, mut code) = (0.0, 0.0, 0.0);
    let mut cs = 0;
    for t in trials {
        lc += t.lc;
        tlc += t.tlc;
        code += t.code_len as f64;
        cs += t.success as u64;
    }
    ExperimentReport {
        ns: config.ns,
        n: config.n,
        k: config.k,
        history: trials.len() as u64,
        seed: config.seed,
        medlc: lc / count,
        medtlc: tlc / count,
        medcodel: code / count,
        cs,
        pcs: 100.0 * cs as f64 / count,
    }
}
