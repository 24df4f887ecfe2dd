//! Parallel, reproducible Monte Carlo estimates of tails and expectations of
//! `C` under cap laws.
//!
//! Sample `i` draws all of its randomness from [`sample_rng`]`(seed, i)`.
//! Samples are grouped into fixed blocks of [`BLOCK`] indices; blocks run in
//! parallel and their partial results are merged in block order, so every
//! report is bit-identical for any worker count.

use capsmooth_core::bounds::{
    adversarial_expectation_bound, boosted_tail_bound, t0, t0_log, uniform_expectation_bound,
    uniform_log_tail_bound, uniform_tail_bound, BoostParams,
};
use capsmooth_core::condnum::ConditionNumber;
use capsmooth_core::distributions::AdversarialLaw;
use capsmooth_core::stats::{ks_statistic, ks_threshold, wilson_interval, NeumaierSum, Z95};
use capsmooth_core::stream::sample_rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Samples per work unit.
pub const BLOCK: u64 = 8192;

/// Stream index reserved for drawing a random center; sample indices stay below it.
pub const CENTER_STREAM: u64 = u64::MAX;

/// Whether thresholds apply to `C` or to `ln C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Events `C ≥ t`.
    Condition,
    /// Events `ln C > t`.
    Log,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Condition => "condition",
            Scale::Log => "log",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig<P> {
    pub problem: P,
    /// Sampling law; its cap center is the experiment's center.
    pub law: AdversarialLaw,
    /// Degree `d` used in the bounds; at least the problem's degree.
    pub d: u32,
    /// Sup of the profile used in the adversarial bounds, `H ≥ sup h`.
    pub h_sup: f64,
    pub samples: u64,
    pub t_grid: Vec<f64>,
    pub scale: Scale,
    pub seed: u64,
    pub workers: usize,
}

impl<P: ConditionNumber> ExperimentConfig<P> {
    pub fn validate(&self) -> Result<()> {
        if self.problem.dim() != self.law.n() as usize {
            return Err(CliError::invalid(format!(
                "law lives on P^{} but the problem on P^{}",
                self.law.n(),
                self.problem.dim()
            )));
        }
        if self.d < self.problem.degree() {
            return Err(CliError::invalid(format!(
                "d = {} is below the degree {} of the ill-posed set",
                self.d,
                self.problem.degree()
            )));
        }
        if self.samples == 0 {
            return Err(CliError::invalid("samples must be at least 1"));
        }
        if self.workers == 0 {
            return Err(CliError::invalid("workers must be at least 1"));
        }
        if !(self.h_sup >= self.law.h_sup()) {
            return Err(CliError::invalid(format!(
                "H = {} is below sup h = {}",
                self.h_sup,
                self.law.h_sup()
            )));
        }
        if self.t_grid.iter().any(|t| !t.is_finite()) || self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::invalid("t grid must be finite and strictly increasing"));
        }
        Ok(())
    }

    /// The tail bound that applies to this experiment at `t`, if any.
    pub fn tail_bound(&self, t: f64) -> Option<f64> {
        let (n, d, sigma) = (self.law.n(), self.d, self.law.sigma());
        if self.law.is_uniform() {
            match self.scale {
                Scale::Condition => uniform_tail_bound(n, d, sigma, t).ok(),
                Scale::Log => uniform_log_tail_bound(n, d, sigma, t).ok(),
            }
        } else {
            let beta = self.law.beta();
            match self.scale {
                Scale::Log => boosted_tail_bound(n, d, sigma, beta, self.h_sup, t).ok(),
                // C ≥ t ⇔ ln C ≥ ln t, and the boosted bound is continuous in t
                Scale::Condition if t > 0.0 => boosted_tail_bound(n, d, sigma, beta, self.h_sup, t.ln()).ok(),
                Scale::Condition => None,
            }
        }
    }

    /// Start of the range where [`ExperimentConfig::tail_bound`] applies.
    pub fn bound_threshold(&self) -> Result<f64> {
        let (n, d, sigma) = (self.law.n(), self.d, self.law.sigma());
        let v = if self.law.is_uniform() {
            match self.scale {
                Scale::Condition => t0(n, d, sigma)?,
                Scale::Log => t0_log(n, d, sigma)?,
            }
        } else {
            let t_eps = BoostParams::at_half_alpha(n, d, self.law.beta(), sigma, self.h_sup)?.t_eps;
            match self.scale {
                Scale::Log => t_eps,
                Scale::Condition => t_eps.exp(),
            }
        };
        Ok(v)
    }

    pub fn expectation_bound(&self) -> Result<f64> {
        let (n, d, sigma) = (self.law.n(), self.d, self.law.sigma());
        Ok(if self.law.is_uniform() {
            uniform_expectation_bound(n, d, sigma)?
        } else {
            adversarial_expectation_bound(n, d, sigma, self.law.beta(), self.h_sup)?
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub count: u64,
    pub survival: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// `NaN` where the bound does not apply.
    pub bound: f64,
    pub applicable: bool,
    /// Wilson lower limit above an applicable bound.
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub samples: u64,
    pub scale: Scale,
    pub threshold: f64,
    pub rows: Vec<TailRow>,
}

impl TailReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectationReport {
    pub samples: u64,
    pub mean: f64,
    pub stderr: f64,
    /// Samples with finite `C`; equal to `samples` because infinite draws are
    /// replaced.
    pub n_effective: u64,
    pub redraws: u64,
    pub bound: f64,
    /// `bound - (mean + 3·stderr)`.
    pub margin: f64,
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::invalid(format!("thread pool: {e}")))
}

fn blocks(samples: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = samples.div_ceil(BLOCK) as usize;
    (0..count).into_par_iter().map(move |b| {
        let b = b as u64;
        (b * BLOCK, ((b + 1) * BLOCK).min(samples))
    })
}

fn condition_of<P: ConditionNumber>(cfg: &ExperimentConfig<P>, index: u64) -> f64 {
    let mut rng = sample_rng(cfg.seed, index);
    cfg.problem.evaluate(&cfg.law.sample(&mut rng))
}

/// Empirical survival of `C` (or `ln C`) on the threshold grid.
pub fn estimate_tail<P: ConditionNumber + Sync>(cfg: &ExperimentConfig<P>) -> Result<TailReport> {
    cfg.validate()?;
    let grid = &cfg.t_grid;
    let k = grid.len();
    // hist[j] counts samples exceeding exactly the first j thresholds
    let hist = pool(cfg.workers)?.install(|| {
        blocks(cfg.samples)
            .map(|(lo, hi)| {
                let mut h = vec![0u64; k + 1];
                for i in lo..hi {
                    let c = condition_of(cfg, i);
                    let j = match cfg.scale {
                        Scale::Condition => grid.partition_point(|&t| t <= c),
                        Scale::Log => {
                            let lc = c.ln();
                            grid.partition_point(|&t| t < lc)
                        }
                    };
                    h[j] += 1;
                }
                h
            })
            .reduce(
                || vec![0u64; k + 1],
                |mut a, b| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    });
    let mut rows = Vec::with_capacity(k);
    let mut above: u64 = hist.iter().sum();
    for (j, &t) in grid.iter().enumerate() {
        above -= hist[j];
        let (wilson_lo, wilson_hi) = wilson_interval(above, cfg.samples, Z95);
        let bound = cfg.tail_bound(t);
        let applicable = bound.is_some();
        let bound = bound.unwrap_or(f64::NAN);
        rows.push(TailRow {
            t,
            count: above,
            survival: above as f64 / cfg.samples as f64,
            wilson_lo,
            wilson_hi,
            bound,
            applicable,
            violation: applicable && wilson_lo > bound,
        });
    }
    Ok(TailReport {
        samples: cfg.samples,
        scale: cfg.scale,
        threshold: cfg.bound_threshold()?,
        rows,
    })
}

/// Count, mean and centered second moment of one block.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    redraws: u64,
}

impl Moments {
    fn of(values: &[f64], redraws: u64) -> Self {
        let n = values.len() as u64;
        if n == 0 {
            return Self { redraws, ..Self::default() };
        }
        let mut s = NeumaierSum::new();
        values.iter().for_each(|&v| s.add(v));
        let mean = s.value() / n as f64;
        let mut q = NeumaierSum::new();
        values.iter().for_each(|&v| q.add((v - mean) * (v - mean)));
        Self { n, mean, m2: q.value(), redraws }
    }

    /// Pairwise combination of two blocks.
    fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return Self { redraws: self.redraws + other.redraws, ..other };
        }
        if other.n == 0 {
            return Self { redraws: self.redraws + other.redraws, ..self };
        }
        let n = self.n + other.n;
        let (na, nb) = (self.n as f64, other.n as f64);
        let delta = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
            redraws: self.redraws + other.redraws,
        }
    }
}

/// Draws that land on `Σ` give `C = ∞`; they are redrawn from the same stream.
const MAX_REDRAWS: u32 = 64;

/// Sample mean and standard error of `ln C`.
pub fn estimate_expectation<P: ConditionNumber + Sync>(cfg: &ExperimentConfig<P>) -> Result<ExpectationReport> {
    cfg.validate()?;
    let parts: Vec<Moments> = pool(cfg.workers)?.install(|| {
        blocks(cfg.samples)
            .map(|(lo, hi)| {
                let mut values = Vec::with_capacity((hi - lo) as usize);
                let mut redraws = 0;
                for i in lo..hi {
                    let mut rng = sample_rng(cfg.seed, i);
                    let mut c = cfg.problem.evaluate(&cfg.law.sample(&mut rng));
                    let mut tries = 0;
                    while !c.is_finite() && tries < MAX_REDRAWS {
                        redraws += 1;
                        tries += 1;
                        c = cfg.problem.evaluate(&cfg.law.sample(&mut rng));
                    }
                    if c.is_finite() {
                        values.push(c.ln());
                    }
                }
                Moments::of(&values, redraws)
            })
            .collect()
    });
    // merge in block order so the result does not depend on scheduling
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    if total.n == 0 {
        return Err(CliError::invalid("every draw had infinite condition"));
    }
    let var = if total.n > 1 { (total.m2 / (total.n - 1) as f64).max(0.0) } else { 0.0 };
    let stderr = (var / total.n as f64).sqrt();
    let bound = cfg.expectation_bound()?;
    Ok(ExpectationReport {
        samples: cfg.samples,
        mean: total.mean,
        stderr,
        n_effective: total.n,
        redraws: total.redraws,
        bound,
        margin: bound - (total.mean + 3.0 * stderr),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsOutcome {
    pub samples: u64,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// One-sample KS test of radii drawn from `law` against the radial CDF of
/// `reference` (normally the same law; a different one gives a negative
/// control).
pub fn ks_radial_test(
    law: &AdversarialLaw,
    reference: &AdversarialLaw,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<KsOutcome> {
    if samples < 1000 {
        return Err(CliError::invalid("KS test needs at least 1000 samples"));
    }
    let mut radii: Vec<f64> = pool(workers)?.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| law.sample_with_radius(&mut sample_rng(seed, i)).1)
            .collect()
    });
    radii.sort_by(f64::total_cmp);
    let sigma = reference.sigma();
    let statistic = ks_statistic(&radii, |r| reference.radial_cdf(r.min(sigma)).unwrap_or(1.0));
    let threshold = ks_threshold(radii.len());
    Ok(KsOutcome {
        samples,
        statistic,
        threshold,
        pass: statistic < threshold,
    })
}

/// `steps` points from `lo` to `hi`, evenly spaced in `ln t`.
pub fn log_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let mut g: Vec<f64> = grid(lo.ln(), hi.ln(), steps).into_iter().map(f64::exp).collect();
    // exact endpoints, so a grid starting at a threshold stays inside its domain
    if let Some(first) = g.first_mut() {
        *first = lo;
    }
    if steps > 1 {
        g[steps - 1] = hi;
    }
    g
}

/// `steps` evenly spaced points from `lo` to `hi`.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    grid(lo, hi, steps)
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
            .collect(),
    }
}
