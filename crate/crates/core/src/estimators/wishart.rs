use crate::bounds::CapacityEstimate;
use crate::channel::ChannelConfig;
use crate::error::{Error, Result};
use crate::special::{
    integrate_interval, integrate_semiinfinite_with_hints, log_gamma, log_psi_factor,
    QuadratureRule,
};

use super::monte_carlo::{sample_frobenius_sq, MonteCarloSpec};

/// Per-interval tolerance when accumulating the CDF between samples.
const CDF_TOLERANCE: f64 = 1e-12;

/// Law of `W = Σ|h_i|²` over `n` i.i.d. Rician entries with unit mean power:
/// `w^{n−1} e^{−w} ψ(w, n) / Γ(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarWishartDensity {
    n: usize,
    kappa: f64,
    log_gamma_n: f64,
}

impl ScalarWishartDensity {
    pub fn new(n: usize, kappa: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Rician factor must be finite and >= 0, got {kappa}"
            )));
        }
        Ok(Self {
            n,
            kappa,
            log_gamma_n: log_gamma(n as f64)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `E W = n`
    pub fn mean(&self) -> f64 {
        self.n as f64
    }

    /// `sd W = √(n(1+2κ))/(1+κ)`
    pub fn std_dev(&self) -> f64 {
        (self.n as f64 * (1.0 + 2.0 * self.kappa)).sqrt() / (1.0 + self.kappa)
    }

    pub fn log_pdf(&self, w: f64) -> Result<f64> {
        if !(w >= 0.0) {
            return Err(Error::Domain(format!(
                "density argument must be >= 0, got {w}"
            )));
        }
        if w.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        let power = if self.n == 1 {
            0.0
        } else {
            (self.n - 1) as f64 * w.ln()
        };
        Ok(power - w - self.log_gamma_n + log_psi_factor(w, self.n, self.kappa)?)
    }

    pub fn pdf(&self, w: f64) -> Result<f64> {
        Ok(self.log_pdf(w)?.exp())
    }

    /// `∫₀^w pdf`
    pub fn cdf(&self, w: f64) -> Result<f64> {
        if !(w >= 0.0) {
            return Err(Error::Domain(format!("cdf argument must be >= 0, got {w}")));
        }
        let mut total = 0.0;
        let mut prev = 0.0;
        for x in self.breakpoints().into_iter().filter(|&x| x < w).chain([w]) {
            total += integrate_interval(|t| self.pdf_or_zero(t), prev, x, CDF_TOLERANCE)?.value;
            prev = x;
        }
        Ok(total.clamp(0.0, 1.0))
    }

    /// Points splitting the bulk of the density, for quadrature.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let (m, s) = (self.mean(), self.std_dev());
        [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|k| m + k * s)
            .filter(|&x| x > 0.0)
            .collect()
    }

    fn pdf_or_zero(&self, w: f64) -> f64 {
        self.pdf(w).unwrap_or(0.0)
    }
}

pub fn scalar_wishart_pdf(w: f64, density: &ScalarWishartDensity) -> Result<f64> {
    density.pdf(w)
}

/// Exact capacity when `min(N_T, N_R) = 1`:
/// `∫ ln(1 + (P/N_T) w) f_W(w) dw` with `n = max(N_T, N_R)`.
pub fn quadrature_capacity_m1(
    cfg: &ChannelConfig,
    rule: &QuadratureRule,
) -> Result<CapacityEstimate> {
    if cfg.m() != 1 {
        return Err(Error::Unsupported(format!(
            "exact quadrature capacity needs min(n_t, n_r) = 1, got n_t={}, n_r={}",
            cfg.n_t(),
            cfg.n_r()
        )));
    }
    let density = ScalarWishartDensity::new(cfg.n(), cfg.kappa())?;
    let snr = cfg.power() / cfg.n_t() as f64;
    if snr == 0.0 {
        return Ok(CapacityEstimate::quadrature(0.0, 0.0));
    }
    let r = integrate_semiinfinite_with_hints(
        |w| {
            let term = (snr * w).ln_1p();
            if term == 0.0 {
                0.0
            } else {
                term * density.pdf_or_zero(w)
            }
        },
        rule,
        &density.breakpoints(),
    )?;
    Ok(CapacityEstimate::quadrature(
        r.value.max(0.0),
        r.error_estimate,
    ))
}

/// Kolmogorov–Smirnov comparison of sampled `W` against [`ScalarWishartDensity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsReport {
    pub statistic: f64,
    pub samples: usize,
    pub n: usize,
    pub kappa: f64,
}

impl KsReport {
    /// Asymptotic 95% critical value `1.358/√N` of the one-sample test.
    pub fn critical_value_95(&self) -> f64 {
        1.358 / (self.samples as f64).sqrt()
    }
}

/// At `m = 1` the only eigenvalue of the Gram matrix is `W = ‖H‖²_F`; compares
/// its empirical distribution with the closed-form CDF.
pub fn empirical_eigen_check(cfg: &ChannelConfig, spec: &MonteCarloSpec) -> Result<KsReport> {
    if cfg.m() != 1 {
        return Err(Error::Unsupported(format!(
            "eigenvalue check needs min(n_t, n_r) = 1, got n_t={}, n_r={}",
            cfg.n_t(),
            cfg.n_r()
        )));
    }
    let density = ScalarWishartDensity::new(cfg.n(), cfg.kappa())?;
    let mut samples = sample_frobenius_sq(cfg, spec);
    samples.sort_by(f64::total_cmp);
    let statistic = ks_statistic(&samples, &density)?;
    Ok(KsReport {
        statistic,
        samples: samples.len(),
        n: cfg.n(),
        kappa: cfg.kappa(),
    })
}

/// `sup |F_N − F|` for sorted samples, with `F` accumulated interval by
/// interval between consecutive samples.
pub(crate) fn ks_statistic(sorted: &[f64], density: &ScalarWishartDensity) -> Result<f64> {
    let total = sorted.len() as f64;
    let mut cdf = 0.0;
    let mut prev = 0.0;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cdf += integrate_interval(|t| density.pdf_or_zero(t), prev, x, CDF_TOLERANCE)?.value;
        prev = x;
        let below = i as f64 / total;
        let above = (i + 1) as f64 / total;
        d = d.max((cdf - below).abs()).max((above - cdf).abs());
    }
    Ok(d)
}
