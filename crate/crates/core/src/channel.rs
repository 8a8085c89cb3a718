//! Rician MIMO channel model.
//!
//! Entries of the `N_R × N_T` fading matrix are i.i.d. complex Gaussian
//! `𝒩_c(μ/√2·(1+j), 2σ²)` with the normalization `μ² + 2σ² = 1`, so the
//! Rician factor `κ = μ²/2σ²` fixes `μ² = κ/(1+κ)` and `2σ² = 1/(1+κ)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::waterfill_allocation;
use crate::error::{Error, Result};
use crate::linalg::{gram, hermitian_eigen, ComplexMatrix, GramSide, HermitianMatrix};
use crate::special::log_bessel_i;

/// Slack allowed on the transmit power constraint `tr Q ≤ P`.
pub const POWER_SLACK: f64 = 1e-9;

/// Eigenvalues of user-supplied covariances down to this value are clipped
/// to zero; anything more negative is rejected.
pub const PSD_CLIP: f64 = -1e-12;

/// Antenna counts, Rician factor and transmit power of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    n_t: usize,
    n_r: usize,
    kappa: f64,
    power: f64,
}

impl ChannelConfig {
    /// `power` is the total average transmit power `P` in linear units.
    pub fn new(n_t: usize, n_r: usize, kappa: f64, power: f64) -> Result<Self> {
        if n_t == 0 || n_r == 0 {
            return Err(Error::InvalidParameter(format!(
                "antenna counts must be positive, got n_t={n_t}, n_r={n_r}"
            )));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Rician factor must be finite and >= 0, got {kappa}"
            )));
        }
        if !(power >= 0.0) || !power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transmit power must be finite and >= 0, got {power}"
            )));
        }
        Ok(Self {
            n_t,
            n_r,
            kappa,
            power,
        })
    }

    pub fn from_snr_db(n_t: usize, n_r: usize, kappa: f64, snr_db: f64) -> Result<Self> {
        Self::new(n_t, n_r, kappa, db_to_linear(snr_db))
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// `min(N_T, N_R)`
    pub fn m(&self) -> usize {
        self.n_t.min(self.n_r)
    }

    /// `max(N_T, N_R)`
    pub fn n(&self) -> usize {
        self.n_t.max(self.n_r)
    }

    /// `μ = √(κ/(1+κ))`
    pub fn mu(&self) -> f64 {
        (self.kappa / (1.0 + self.kappa)).sqrt()
    }

    /// `2σ² = 1/(1+κ)`, the variance of each complex entry.
    pub fn two_sigma_sq(&self) -> f64 {
        1.0 / (1.0 + self.kappa)
    }

    pub fn with_n_t(self, n_t: usize) -> Result<Self> {
        Self::new(n_t, self.n_r, self.kappa, self.power)
    }

    pub fn with_n_r(self, n_r: usize) -> Result<Self> {
        Self::new(self.n_t, n_r, self.kappa, self.power)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.n_t, self.n_r, kappa, self.power)
    }

    pub fn with_power(self, power: f64) -> Result<Self> {
        Self::new(self.n_t, self.n_r, self.kappa, power)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Seeded ChaCha8 stream. Each `(seed, stream_id)` pair names an independent
/// stream; Monte Carlo shards use one stream id each.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Two independent standard normals (Box–Muller).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        // u1 in (0, 1] so the log is finite
        let u1 = ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        (r * c, r * s)
    }
}

/// Draws one `N_R × N_T` fading matrix. Real and imaginary parts of every
/// entry are independent `𝒩(μ/√2, σ²)`.
pub fn sample_h(cfg: &ChannelConfig, rng: &mut RngStream) -> ComplexMatrix {
    let mean = cfg.mu() * FRAC_1_SQRT_2;
    let sd = (0.5 * cfg.two_sigma_sq()).sqrt();
    let len = cfg.n_r * cfg.n_t;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        let (a, b) = rng.gaussian_pair();
        data.push(Complex64::new(mean + sd * a, mean + sd * b));
    }
    ComplexMatrix::from_raw(cfg.n_r, cfg.n_t, data)
}

/// `M = E{H}`: every entry `μ/√2·(1+j)`.
pub fn mean_matrix(cfg: &ChannelConfig) -> ComplexMatrix {
    let v = cfg.mu() * FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(cfg.n_r, cfg.n_t, |_, _| Complex64::new(v, v))
}

/// Density of the entry magnitude `|h|`:
/// `2(1+κ) r exp(−(1+κ)r² − κ) I₀(2√(κ(1+κ)) r)`.
pub fn rician_envelope_pdf(r: f64, kappa: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("envelope must be >= 0, got {r}")));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!(
            "Rician factor must be finite and >= 0, got {kappa}"
        )));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    let arg = 2.0 * (kappa * (1.0 + kappa)).sqrt() * r;
    let log_pdf = 2f64.ln() + kappa.ln_1p() + r.ln() - (1.0 + kappa) * r * r - kappa
        + log_bessel_i(0.0, arg)?;
    Ok(log_pdf.exp())
}

/// `Υ = E{HᴴH}/N_R`: ones on the diagonal, `κ/(1+κ)` elsewhere.
pub fn upsilon(cfg: &ChannelConfig) -> HermitianMatrix {
    let k = cfg.kappa;
    HermitianMatrix::identity_plus_ones(cfg.n_t, 1.0 / (1.0 + k), k / (1.0 + k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceKind {
    /// `Q⁰ = (P/N_T) I`
    ScaledIdentity,
    /// `Q^κ = P/(N_T(1+κ)) (I + κΨ)`
    RicianWeighted,
    /// The covariance attaining the water-filled Jensen bound.
    Waterfill,
    Explicit,
}

/// Transmit covariance `Q` (positive semidefinite, `tr Q ≤ P`).
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceScheme {
    kind: CovarianceKind,
    matrix: HermitianMatrix,
    // Q = α I + β Ψ for the structured schemes
    structure: Option<(f64, f64)>,
}

impl CovarianceScheme {
    pub fn scaled_identity(cfg: &ChannelConfig) -> Self {
        Self::structured(
            CovarianceKind::ScaledIdentity,
            cfg.n_t,
            cfg.power / cfg.n_t as f64,
            0.0,
        )
    }

    pub fn rician_weighted(cfg: &ChannelConfig) -> Self {
        let alpha = cfg.power / (cfg.n_t as f64 * (1.0 + cfg.kappa));
        Self::structured(
            CovarianceKind::RicianWeighted,
            cfg.n_t,
            alpha,
            alpha * cfg.kappa,
        )
    }

    /// `U·diag(Q̃)·Uᴴ` with `U` the eigenvectors of `Υ`. The dominant
    /// eigenvector of `Υ` is `e/√N_T`, so this is `q₂ I + (q₁−q₂)/N_T · Ψ`.
    pub fn waterfill(cfg: &ChannelConfig) -> Self {
        let alloc = waterfill_allocation(cfg);
        let q1 = alloc.diagonal[0];
        let q2 = alloc.diagonal.get(1).copied().unwrap_or(0.0);
        let beta = if cfg.n_t == 1 {
            0.0
        } else {
            (q1 - q2) / cfg.n_t as f64
        };
        let alpha = if cfg.n_t == 1 { q1 } else { q2 };
        Self::structured(CovarianceKind::Waterfill, cfg.n_t, alpha, beta)
    }

    /// Validates a user-supplied covariance: eigenvalues in `[PSD_CLIP, 0)`
    /// are clipped to zero, anything below is rejected, and the trace must
    /// not exceed `P + POWER_SLACK`.
    pub fn explicit(cfg: &ChannelConfig, matrix: HermitianMatrix) -> Result<Self> {
        if matrix.dim() != cfg.n_t {
            return Err(Error::InvalidParameter(format!(
                "covariance must be {0}x{0}, got {1}x{1}",
                cfg.n_t,
                matrix.dim()
            )));
        }
        let eig = hermitian_eigen(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < PSD_CLIP {
            return Err(Error::InvalidParameter(format!(
                "covariance is not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        let matrix = if min < 0.0 {
            let clipped = crate::linalg::Eigen {
                values: eig.values.iter().map(|v| v.max(0.0)).collect(),
                vectors: eig.vectors,
            };
            HermitianMatrix::from_matrix(clipped.reconstruct())?
        } else {
            matrix
        };
        if matrix.trace() > cfg.power + POWER_SLACK {
            return Err(Error::InvalidParameter(format!(
                "covariance trace {} exceeds power budget {}",
                matrix.trace(),
                cfg.power
            )));
        }
        Ok(Self {
            kind: CovarianceKind::Explicit,
            matrix,
            structure: None,
        })
    }

    fn structured(kind: CovarianceKind, n_t: usize, alpha: f64, beta: f64) -> Self {
        Self {
            kind,
            matrix: HermitianMatrix::identity_plus_ones(n_t, alpha, beta),
            structure: Some((alpha, beta)),
        }
    }

    pub fn kind(&self) -> CovarianceKind {
        self.kind
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `H·Q·Hᴴ`. Structured schemes use `α·HHᴴ + β·(He)(He)ᴴ`.
    pub fn received_covariance(&self, h: &ComplexMatrix) -> HermitianMatrix {
        debug_assert_eq!(h.cols(), self.dim());
        match self.structure {
            Some((alpha, beta)) => {
                let g = gram(h, GramSide::Left);
                if beta == 0.0 {
                    return g.scaled(alpha);
                }
                let n_r = h.rows();
                let row_sums: Vec<Complex64> = (0..n_r).map(|i| h.row(i).iter().sum()).collect();
                let m = ComplexMatrix::from_fn(n_r, n_r, |i, j| {
                    g.get(i, j) * alpha + row_sums[i] * row_sums[j].conj() * beta
                });
                HermitianMatrix::from_upper(m)
            }
            None => {
                let hq = h
                    .matmul(self.matrix.as_matrix())
                    .expect("dimension checked");
                let n_r = h.rows();
                let m = ComplexMatrix::from_fn(n_r, n_r, |i, j| {
                    if j < i {
                        Complex64::new(0.0, 0.0)
                    } else {
                        hq.row(i)
                            .iter()
                            .zip(h.row(j))
                            .map(|(a, b)| a * b.conj())
                            .sum()
                    }
                });
                HermitianMatrix::from_upper(m)
            }
        }
    }
}
