//! Closed-form capacity expressions and bounds. Everything is in nats.

use std::fmt;

use crate::channel::ChannelConfig;
use crate::error::{Error, Result};
use crate::special::{integrate_semiinfinite_with_hints, log_bessel_i, QuadratureRule};

/// Diagonal of the water-filled `Q̃` in the eigenbasis of `Υ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterfillAllocation {
    /// Length `N_T`; entries `2..N_T` are equal; sum is `P`.
    pub diagonal: Vec<f64>,
    /// `θ = κ(1+κ)/(N_R(1+N_Tκ))`
    pub threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimateMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl fmt::Display for EstimateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EstimateMethod::ClosedForm => "closed_form",
            EstimateMethod::Quadrature => "quadrature",
            EstimateMethod::MonteCarlo => "monte_carlo",
        })
    }
}

/// A capacity value in nats with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityEstimate {
    pub nats: f64,
    /// Half-width in nats: confidence half-width for Monte Carlo, the error
    /// estimate for quadrature, `0` for closed forms.
    pub uncertainty: f64,
    /// Standard error of the mean for Monte Carlo, otherwise equal to
    /// `uncertainty`.
    pub std_error: f64,
    pub method: EstimateMethod,
}

impl CapacityEstimate {
    pub fn closed_form(nats: f64) -> Self {
        Self {
            nats,
            uncertainty: 0.0,
            std_error: 0.0,
            method: EstimateMethod::ClosedForm,
        }
    }

    pub fn quadrature(nats: f64, error: f64) -> Self {
        Self {
            nats,
            uncertainty: error,
            std_error: error,
            method: EstimateMethod::Quadrature,
        }
    }

    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

fn positive_part(x: f64) -> f64 {
    // +0.0 rather than -0.0 or tiny negatives
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

fn require_single_receiver(cfg: &ChannelConfig, what: &str) -> Result<()> {
    if cfg.n_r() != 1 {
        return Err(Error::Unsupported(format!(
            "{what} is defined for a single receive antenna, got n_r={}",
            cfg.n_r()
        )));
    }
    Ok(())
}

pub fn waterfill_allocation(cfg: &ChannelConfig) -> WaterfillAllocation {
    let (n_t, n_r, k) = (cfg.n_t() as f64, cfg.n_r() as f64, cfg.kappa());
    let p = cfg.power() / n_t;
    let theta = k * (1.0 + k) / (n_r * (1.0 + n_t * k));
    let rest = positive_part(p - theta);
    let mut diagonal = vec![rest; cfg.n_t()];
    diagonal[0] = p.min(theta) * n_t + rest;
    WaterfillAllocation {
        diagonal,
        threshold: theta,
    }
}

/// Jensen bound `log det(I + N_R Υ Q̃)` at the water-filled `Q̃`.
pub fn capacity_upper_bound(cfg: &ChannelConfig) -> CapacityEstimate {
    let alloc = waterfill_allocation(cfg);
    let (n_t, n_r, k) = (cfg.n_t() as f64, cfg.n_r() as f64, cfg.kappa());
    let lead = (n_r * (1.0 + n_t * k) / (1.0 + k) * alloc.diagonal[0]).ln_1p();
    let rest = match alloc.diagonal.get(1) {
        Some(&q) if q > 0.0 => (n_t - 1.0) * (n_r / (1.0 + k) * q).ln_1p(),
        _ => 0.0,
    };
    CapacityEstimate::closed_form(lead + rest)
}

/// `ln(1 + N_R N_T P)`, the exact capacity of the `κ → ∞` channel. `κ` is
/// ignored.
pub fn deterministic_capacity(cfg: &ChannelConfig) -> CapacityEstimate {
    CapacityEstimate::closed_form((cfg.n_r() as f64 * cfg.n_t() as f64 * cfg.power()).ln_1p())
}

/// `N_T → ∞` limit with `Q = (P/N_T) I`:
/// `(N_R−1) ln(1 + P/(1+κ)) + ln(1 + (N_Rκ+1) P/(1+κ))`.
pub fn asymptotic_capacity_large_nt(
    n_r: usize,
    kappa: f64,
    power: f64,
) -> Result<CapacityEstimate> {
    if n_r == 0 {
        return Err(Error::InvalidParameter("n_r must be positive".into()));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) || !(power >= 0.0 && power.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need finite kappa >= 0 and power >= 0, got kappa={kappa}, power={power}"
        )));
    }
    let nr = n_r as f64;
    let s = power / (1.0 + kappa);
    Ok(CapacityEstimate::closed_form(
        (nr - 1.0) * s.ln_1p() + ((nr * kappa + 1.0) * s).ln_1p(),
    ))
}

/// Jensen bound for `Q^κ` with one receive antenna:
/// `ln(1 + P/(1+κ)·(1 + κ/(1+κ) + N_Tκ²/(1+κ)))`.
pub fn new_scheme_upper_bound(cfg: &ChannelConfig) -> Result<CapacityEstimate> {
    require_single_receiver(cfg, "the Rician-weighted upper bound")?;
    let (n_t, k, p) = (cfg.n_t() as f64, cfg.kappa(), cfg.power());
    let inner = 1.0 + k / (1.0 + k) + n_t * k * k / (1.0 + k);
    Ok(CapacityEstimate::closed_form(
        (p / (1.0 + k) * inner).ln_1p(),
    ))
}

/// `E ln(1 + Pκz/(1+κ))` where `z = |Z|²/N_T` has density
/// `(1+κ) e^{−N_Tκ} e^{−(1+κ)z} I₀(2√(N_Tκ(1+κ)z))`.
pub fn new_scheme_lower_bound(
    cfg: &ChannelConfig,
    rule: &QuadratureRule,
) -> Result<CapacityEstimate> {
    require_single_receiver(cfg, "the Rician-weighted lower bound")?;
    let (n_t, k, p) = (cfg.n_t() as f64, cfg.kappa(), cfg.power());
    if k == 0.0 || p == 0.0 {
        return Ok(CapacityEstimate::quadrature(0.0, 0.0));
    }
    let gain = p * k / (1.0 + k);
    let c = n_t * k * (1.0 + k);
    let log_scale = k.ln_1p() - n_t * k;
    let integrand = |z: f64| -> f64 {
        let term = (gain * z).ln_1p();
        if term == 0.0 {
            return 0.0;
        }
        // z is finite and >= 0, so the Bessel call cannot fail
        let log_i0 = log_bessel_i(0.0, 2.0 * (c * z).sqrt()).unwrap_or(f64::NEG_INFINITY);
        term * (log_scale - (1.0 + k) * z + log_i0).exp()
    };
    let mean = (1.0 + n_t * k) / (1.0 + k);
    let sd = (2.0 * n_t * k + 1.0).sqrt() / (1.0 + k);
    let hints: Vec<f64> = [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|s| mean + s * sd)
        .filter(|&x| x > 0.0)
        .collect();
    let r = integrate_semiinfinite_with_hints(integrand, rule, &hints)?;
    Ok(CapacityEstimate::quadrature(
        r.value.max(0.0),
        r.error_estimate,
    ))
}

/// `ln(1 + P N_T κ²/(1+κ)²)`, the large-`κ` form of the `Q^κ` bound.
pub fn new_scheme_large_kappa_approx(cfg: &ChannelConfig) -> Result<CapacityEstimate> {
    require_single_receiver(cfg, "the large-kappa approximation")?;
    let (n_t, k, p) = (cfg.n_t() as f64, cfg.kappa(), cfg.power());
    let r = k / (1.0 + k);
    Ok(CapacityEstimate::closed_form((p * n_t * r * r).ln_1p()))
}
