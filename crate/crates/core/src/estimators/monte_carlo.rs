use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{CapacityEstimate, EstimateMethod};
use crate::channel::{sample_h, ChannelConfig, CovarianceScheme, RngStream};
use crate::error::{Error, Result};
use crate::linalg::logdet_posdef;

pub const MIN_SAMPLES: usize = 100;

/// Sample count, seed and sharding of a Monte Carlo run. Shard `i` draws from
/// `RngStream::new(seed, i)`, so results depend on `(seed, shards)` but not on
/// thread scheduling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSpec {
    samples: usize,
    seed: u64,
    shards: usize,
    confidence: f64,
}

impl Default for MonteCarloSpec {
    fn default() -> Self {
        Self {
            samples: 200_000,
            seed: 0,
            shards: 8,
            confidence: 0.95,
        }
    }
}

impl MonteCarloSpec {
    pub fn new(samples: usize, seed: u64, shards: usize, confidence: f64) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(format!(
                "need at least {MIN_SAMPLES} samples, got {samples}"
            )));
        }
        if shards == 0 || shards > samples {
            return Err(Error::InvalidParameter(format!(
                "shards must lie in 1..={samples}, got {shards}"
            )));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "confidence must lie in (0, 1), got {confidence}"
            )));
        }
        Ok(Self {
            samples,
            seed,
            shards,
            confidence,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shards(&self) -> usize {
        self.shards
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_samples(self, samples: usize) -> Result<Self> {
        Self::new(samples, self.seed, self.shards, self.confidence)
    }

    /// Sample counts per shard; the first `samples % shards` get one extra.
    pub(crate) fn shard_sizes(&self) -> impl Iterator<Item = usize> {
        let base = self.samples / self.shards;
        let extra = self.samples % self.shards;
        (0..self.shards).map(move |i| base + usize::from(i < extra))
    }

    /// Two-sided normal quantile for the configured confidence.
    pub fn z_score(&self) -> f64 {
        Normal::standard().inverse_cdf(0.5 * (1.0 + self.confidence))
    }
}

/// Running mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub(crate) fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub(crate) fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let n = self.count + other.count;
        let d = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Moments {
            count: n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    pub(crate) fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let var = (self.m2 / (self.count - 1) as f64).max(0.0);
        (var / self.count as f64).sqrt()
    }
}

/// Averages `draw` over the spec's samples, one stream per shard, shards
/// combined in index order.
pub(crate) fn sharded_mean(
    spec: &MonteCarloSpec,
    draw: impl Fn(&mut RngStream) -> Result<f64> + Sync,
) -> Result<CapacityEstimate> {
    let sizes: Vec<usize> = spec.shard_sizes().collect();
    let parts: Vec<Result<Moments>> = sizes
        .par_iter()
        .enumerate()
        .map(|(shard, &size)| {
            let mut rng = RngStream::new(spec.seed, shard as u64);
            let mut acc = Moments::default();
            for _ in 0..size {
                acc.push(draw(&mut rng)?);
            }
            Ok(acc)
        })
        .collect();
    let mut total = Moments::default();
    for part in parts {
        total = total.merge(part?);
    }
    let se = total.std_error();
    Ok(CapacityEstimate {
        nats: total.mean.max(0.0),
        uncertainty: spec.z_score() * se,
        std_error: se,
        method: EstimateMethod::MonteCarlo,
    })
}

/// Sample mean of `ln det(I + H Q Hᴴ)`.
pub fn mc_ergodic_capacity(
    cfg: &ChannelConfig,
    q: &CovarianceScheme,
    spec: &MonteCarloSpec,
) -> Result<CapacityEstimate> {
    if q.dim() != cfg.n_t() {
        return Err(Error::InvalidParameter(format!(
            "covariance is {0}x{0} but n_t={1}",
            q.dim(),
            cfg.n_t()
        )));
    }
    if cfg.power() == 0.0 {
        return Ok(CapacityEstimate {
            nats: 0.0,
            uncertainty: 0.0,
            std_error: 0.0,
            method: EstimateMethod::MonteCarlo,
        });
    }
    sharded_mean(spec, |rng| {
        let h = sample_h(cfg, rng);
        logdet_posdef(&q.received_covariance(&h).shifted(1.0))
    })
}

/// Sample mean of `ln(1 + P/(N_T(1+κ))·(W + κ|Z|²))` with `W = Σ|h_i|²` and
/// `Z = Σh_i` taken from the same draw of the single-row channel.
pub fn mc_new_scheme_capacity(
    cfg: &ChannelConfig,
    spec: &MonteCarloSpec,
) -> Result<CapacityEstimate> {
    if cfg.n_r() != 1 {
        return Err(Error::Unsupported(format!(
            "the Rician-weighted scheme estimate needs n_r=1, got n_r={}",
            cfg.n_r()
        )));
    }
    let k = cfg.kappa();
    let scale = cfg.power() / (cfg.n_t() as f64 * (1.0 + k));
    sharded_mean(spec, |rng| {
        let h = sample_h(cfg, rng);
        let row = h.row(0);
        let w: f64 = row.iter().map(|z| z.norm_sqr()).sum();
        let z: num_complex::Complex64 = row.iter().sum();
        Ok((scale * (w + k * z.norm_sqr())).ln_1p())
    })
}

/// Draws `‖H‖²_F` for every sample, concatenated in shard order.
pub(crate) fn sample_frobenius_sq(cfg: &ChannelConfig, spec: &MonteCarloSpec) -> Vec<f64> {
    let sizes: Vec<usize> = spec.shard_sizes().collect();
    let parts: Vec<Vec<f64>> = sizes
        .par_iter()
        .enumerate()
        .map(|(shard, &size)| {
            let mut rng = RngStream::new(spec.seed, shard as u64);
            (0..size)
                .map(|_| {
                    sample_h(cfg, &mut rng)
                        .as_slice()
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum()
                })
                .collect()
        })
        .collect();
    parts.concat()
}
