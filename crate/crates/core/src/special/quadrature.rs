//! Quadrature over `[0, ∞)`: Gauss–Laguerre with an order-pair error
//! estimate, and adaptive Gauss–Kronrod (7/15) with a mapped tail.

use std::sync::{Arc, LazyLock};

use crate::error::{Error, Result};

/// Gauss–Laguerre results whose order-pair difference exceeds this are
/// recomputed adaptively.
pub const FALLBACK_THRESHOLD: f64 = 1e-7;

/// Tolerance used by the adaptive fallback.
pub const FALLBACK_TOLERANCE: f64 = 1e-10;

const DEFAULT_ORDER: usize = 64;
const MAX_PIECES: usize = 4000;

static DEFAULT_PAIR: LazyLock<(Arc<GaussLaguerre>, Arc<GaussLaguerre>)> = LazyLock::new(|| {
    (
        Arc::new(GaussLaguerre::new(DEFAULT_ORDER).expect("order 64 rule")),
        Arc::new(GaussLaguerre::new(check_order(DEFAULT_ORDER)).expect("order 96 rule")),
    )
});

fn check_order(order: usize) -> usize {
    order + order.div_ceil(2)
}

/// Value of an integral together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

/// Gauss–Laguerre rule for `∫₀^∞ g(x) e^{−x} dx`.
#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // w_i · e^{x_i}, for integrands that carry their own decay
    unweighted: Vec<f64>,
}

impl GaussLaguerre {
    /// Nodes by Newton iteration on `L_n` from the usual asymptotic starting
    /// guesses; weights `w_i = x_i / (n L_{n−1}(x_i))²`.
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter(
                "Gauss-Laguerre order must be >= 1".into(),
            ));
        }
        let n = order;
        let nf = n as f64;
        let mut nodes: Vec<f64> = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut unweighted = Vec::with_capacity(n);
        let mut z = 0.0;
        for i in 0..n {
            z = match i {
                0 => 3.0 / (1.0 + 2.4 * nf),
                1 => z + 15.0 / (1.0 + 2.5 * nf),
                _ => {
                    let ai = (i - 1) as f64;
                    z + ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - nodes[i - 2])
                }
            };
            let mut converged = false;
            for _ in 0..200 {
                let (p, pm1) = laguerre_pair(n, z);
                let dp = nf * (p - pm1) / z;
                let step = p / dp;
                z -= step;
                if step.abs() <= 1e-13 * z.abs() {
                    // one more step to settle at the last few ulps
                    let (p, pm1) = laguerre_pair(n, z);
                    z -= p / (nf * (p - pm1) / z);
                    converged = true;
                    break;
                }
            }
            if !converged || !z.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "Gauss-Laguerre node {i} of order {n} did not converge"
                )));
            }
            let (_, pm1) = laguerre_pair(n, z);
            let ln_w = z.ln() - 2.0 * (nf * pm1.abs()).ln();
            nodes.push(z);
            weights.push(ln_w.exp());
            unweighted.push((ln_w + z).exp());
        }
        Ok(Self {
            nodes,
            weights,
            unweighted,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ w_i g(x_i) ≈ ∫₀^∞ g(x) e^{−x} dx`.
    pub fn integrate_weighted(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * g(x))
            .sum()
    }

    /// `Σ w_i e^{x_i} f(x_i) ≈ ∫₀^∞ f(x) dx`, for `f` with roughly
    /// exponential decay.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.unweighted)
            .map(|(&x, &w)| {
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    w * v
                }
            })
            .sum()
    }
}

/// `(L_n(x), L_{n−1}(x))` by the three-term recurrence.
fn laguerre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf + 1.0 - x) * p2 - jf * p3) / (jf + 1.0);
    }
    (p1, p2)
}

/// How to evaluate a semi-infinite integral.
#[derive(Debug, Clone)]
pub enum QuadratureRule {
    /// Gauss–Laguerre at `primary.order()`, with `check` (≈1.5× the order)
    /// supplying the error estimate. Falls back to adaptive integration when
    /// the two disagree by more than [`FALLBACK_THRESHOLD`].
    GaussLaguerre {
        primary: Arc<GaussLaguerre>,
        check: Arc<GaussLaguerre>,
    },
    /// Adaptive Gauss–Kronrod until the summed error estimate is below
    /// `tolerance · max(1, |value|)`.
    Adaptive { tolerance: f64 },
}

impl Default for QuadratureRule {
    fn default() -> Self {
        let (primary, check) = DEFAULT_PAIR.clone();
        QuadratureRule::GaussLaguerre { primary, check }
    }
}

impl QuadratureRule {
    pub fn gauss_laguerre(order: usize) -> Result<Self> {
        if order == DEFAULT_ORDER {
            return Ok(Self::default());
        }
        Ok(QuadratureRule::GaussLaguerre {
            primary: Arc::new(GaussLaguerre::new(order)?),
            check: Arc::new(GaussLaguerre::new(check_order(order))?),
        })
    }

    pub fn adaptive(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 1e-2) {
            return Err(Error::InvalidParameter(format!(
                "adaptive tolerance must lie in (0, 1e-2], got {tolerance}"
            )));
        }
        Ok(QuadratureRule::Adaptive { tolerance })
    }
}

/// `∫₀^∞ f(x) dx` with the given rule.
pub fn integrate_semiinfinite(f: impl Fn(f64) -> f64, rule: &QuadratureRule) -> Result<Integral> {
    integrate_semiinfinite_with_hints(f, rule, &[])
}

/// As [`integrate_semiinfinite`], with extra breakpoints (typically around
/// the bulk of a peaked integrand) for the adaptive path.
pub fn integrate_semiinfinite_with_hints(
    f: impl Fn(f64) -> f64,
    rule: &QuadratureRule,
    hints: &[f64],
) -> Result<Integral> {
    match rule {
        QuadratureRule::GaussLaguerre { primary, check } => {
            let a = primary.integrate(&f);
            let b = check.integrate(&f);
            let diff = (a - b).abs();
            if diff.is_finite() && diff <= FALLBACK_THRESHOLD {
                Ok(Integral {
                    value: b,
                    error_estimate: diff,
                })
            } else {
                adaptive_semiinfinite(&f, FALLBACK_TOLERANCE, hints)
            }
        }
        QuadratureRule::Adaptive { tolerance } => adaptive_semiinfinite(&f, *tolerance, hints),
    }
}

/// `∫_a^b f(x) dx` by adaptive Gauss–Kronrod.
pub fn integrate_interval(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tolerance: f64,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(
            "interval endpoints must be finite".into(),
        ));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let r = adaptive(&f, vec![Piece::finite(lo, hi)], tolerance)?;
    Ok(Integral {
        value: sign * r.value,
        error_estimate: r.error_estimate,
    })
}

fn adaptive_semiinfinite(
    f: &impl Fn(f64) -> f64,
    tolerance: f64,
    hints: &[f64],
) -> Result<Integral> {
    let mut points: Vec<f64> = vec![0.0];
    points.extend((-4..=6).map(|e| 2f64.powi(e)));
    points.extend(hints.iter().copied().filter(|h| h.is_finite() && *h > 0.0));
    points.sort_by(f64::total_cmp);
    points.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));

    let mut pieces: Vec<Piece> = points
        .windows(2)
        .map(|w| Piece::finite(w[0], w[1]))
        .collect();
    let last = *points.last().expect("nonempty");
    pieces.push(Piece::tail(last, 0.0, 1.0));
    adaptive(f, pieces, tolerance)
}

#[derive(Debug, Clone, Copy)]
enum Domain {
    Finite,
    /// `x = origin + origin·t/(1−t)` for `t ∈ [lo, hi) ⊂ [0, 1)`.
    Tail {
        origin: f64,
    },
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    lo: f64,
    hi: f64,
    domain: Domain,
    value: f64,
    error: f64,
}

impl Piece {
    fn finite(lo: f64, hi: f64) -> Self {
        Piece {
            lo,
            hi,
            domain: Domain::Finite,
            value: 0.0,
            error: f64::INFINITY,
        }
    }

    fn tail(origin: f64, lo: f64, hi: f64) -> Self {
        Piece {
            lo,
            hi,
            domain: Domain::Tail { origin },
            value: 0.0,
            error: f64::INFINITY,
        }
    }

    fn evaluate(&mut self, f: &impl Fn(f64) -> f64) {
        let (value, error) = match self.domain {
            Domain::Finite => gauss_kronrod_15(f, self.lo, self.hi),
            Domain::Tail { origin } => {
                let scale = origin.max(1.0);
                let g = |t: f64| {
                    let om = 1.0 - t;
                    let v = f(origin + scale * t / om);
                    if v == 0.0 {
                        0.0
                    } else {
                        v * scale / (om * om)
                    }
                };
                gauss_kronrod_15(&g, self.lo, self.hi)
            }
        };
        self.value = value;
        self.error = error;
    }

    fn split(&self) -> (Piece, Piece) {
        let mid = 0.5 * (self.lo + self.hi);
        let mut a = *self;
        let mut b = *self;
        a.hi = mid;
        b.lo = mid;
        (a, b)
    }

    fn splittable(&self) -> bool {
        let mid = 0.5 * (self.lo + self.hi);
        mid > self.lo && mid < self.hi && (self.hi - self.lo) > 1e-14 * self.hi.abs().max(1e-300)
    }
}

fn adaptive(f: &impl Fn(f64) -> f64, mut pieces: Vec<Piece>, tolerance: f64) -> Result<Integral> {
    for p in pieces.iter_mut() {
        p.evaluate(f);
    }
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if !value.is_finite() || error.is_nan() {
            return Err(Error::QuadratureNonConvergence { value, error });
        }
        if error <= tolerance * value.abs().max(1.0) {
            return Ok(Integral {
                value,
                error_estimate: error,
            });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable())
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst.filter(|_| pieces.len() < MAX_PIECES) else {
            return Err(Error::QuadratureNonConvergence { value, error });
        };
        let (mut a, mut b) = pieces[i].split();
        a.evaluate(f);
        b.evaluate(f);
        pieces[i] = a;
        pieces.push(b);
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod value and `|K15 − G7|`.
fn gauss_kronrod_15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}
