//! Modified Bessel function of the first kind in the log domain, and the
//! functions built on it: the scalar Bessel hypergeometric function ₀F̃₁
//! and the non-centrality factor ψ of the scalar non-central Wishart density.
//!
//! Two regimes:
//! * `x < 15(ν+1)`: the ascending series `Σ (x²/4)^k / (k! Γ(k+ν+1))`,
//!   summed with periodic rescaling so it never overflows.
//! * otherwise: the uniform (Debye) asymptotic expansion. Its correction
//!   polynomials `u_k(t)` are generated by recurrence, and each term is
//!   evaluated as `s^k · u_k(t)/t^k` with `s = 1/√(ν²+x²)`, `t = νs`, which
//!   stays regular at `ν = 0` (where it reduces to Hankel's expansion).

use std::f64::consts::PI;
use std::sync::LazyLock;

use super::gamma::ln_gamma_positive;
use crate::error::{Error, Result};

const SERIES_CROSSOVER: f64 = 15.0;
const DEBYE_TERMS: usize = 64;

/// `u_k(t)/t^k` as coefficients of powers of `t²`, for `k = 0..DEBYE_TERMS`.
static DEBYE_POLYS: LazyLock<Vec<Vec<f64>>> = LazyLock::new(|| {
    // u_{k+1}(t) = ½ t²(1−t²) u_k'(t) + ⅛ ∫₀ᵗ (1−5s²) u_k(s) ds
    let mut u: Vec<f64> = vec![1.0];
    let mut out = Vec::with_capacity(DEBYE_TERMS);
    for k in 0..DEBYE_TERMS {
        // u_k has only powers t^{k}, t^{k+2}, ..., t^{3k}
        let reduced: Vec<f64> = (k..u.len()).step_by(2).map(|p| u[p]).collect();
        out.push(reduced);

        let mut next = vec![0.0; u.len() + 3];
        for (p, &c) in u.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if p > 0 {
                // ½ t² (1 − t²) · p c t^{p−1}
                let d = 0.5 * p as f64 * c;
                next[p + 1] += d;
                next[p + 3] -= d;
            }
            // ⅛ ∫ (c s^p − 5 c s^{p+2})
            next[p + 1] += c / (8.0 * (p + 1) as f64);
            next[p + 3] -= 5.0 * c / (8.0 * (p + 3) as f64);
        }
        while next.last() == Some(&0.0) {
            next.pop();
        }
        u = next;
    }
    out
});

fn check_args(nu: f64, x: f64) -> Result<()> {
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel order must be >= 0, got {nu}"
        )));
    }
    if !(x >= 0.0) || x.is_nan() {
        return Err(Error::Domain(format!(
            "Bessel argument must be >= 0, got {x}"
        )));
    }
    Ok(())
}

/// `ln I_ν(x)` for `ν ≥ 0`, `x ≥ 0`.
///
/// Returns `0` at `x = 0, ν = 0` and `-∞` at `x = 0, ν > 0`.
pub fn log_bessel_i(nu: f64, x: f64) -> Result<f64> {
    check_args(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x < SERIES_CROSSOVER * (nu + 1.0) {
        Ok(nu * (0.5 * x).ln() + series_over_power(nu, x))
    } else {
        Ok(debye_log(nu, x))
    }
}

/// `ln(I_ν(x) / (x/2)^ν)`; finite at `x = 0` where it equals `−ln Γ(ν+1)`.
pub(crate) fn log_bessel_i_over_power(nu: f64, x: f64) -> f64 {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x < SERIES_CROSSOVER * (nu + 1.0) {
        series_over_power(nu, x)
    } else {
        debye_log(nu, x) - nu * (0.5 * x).ln()
    }
}

/// `−ln Γ(ν+1) + ln Σ_k q^k / (k! (ν+1)_k)` with `q = x²/4`.
fn series_over_power(nu: f64, x: f64) -> f64 {
    const RESCALE: f64 = 1e250;
    let q = 0.25 * x * x;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_offset = 0.0_f64;
    let mut k = 0.0_f64;
    loop {
        k += 1.0;
        let ratio = q / (k * (k + nu));
        term *= ratio;
        sum += term;
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            log_offset += RESCALE.ln();
        }
        if ratio < 1.0 && term <= 1e-17 * sum {
            break;
        }
    }
    -ln_gamma_positive(nu + 1.0) + sum.ln() + log_offset
}

fn debye_log(nu: f64, x: f64) -> f64 {
    let r = nu.hypot(x);
    let s = 1.0 / r;
    let t = nu * s;
    let t2 = t * t;

    let mut sum = 1.0;
    let mut s_pow = 1.0;
    let mut prev = f64::INFINITY;
    for poly in DEBYE_POLYS.iter().skip(1) {
        s_pow *= s;
        // Horner in t²
        let p = poly.iter().rev().fold(0.0, |acc, c| acc * t2 + c);
        let term = s_pow * p;
        if term.abs() > prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if prev <= 1e-17 * sum.abs() {
            break;
        }
    }
    let eta = r + nu * (x / (nu + r)).ln();
    eta - 0.5 * (2.0 * PI).ln() - 0.5 * r.ln() + sum.ln()
}

/// `ln ₀F̃₁(m; r²) = ln[Γ(m) r^{−(m−1)} I_{m−1}(2r)]`, the scalar reduction of
/// the Bessel function of matrix argument. Equals `0` at `r² = 0`.
pub fn hyp0f1_scalar(m: usize, r_sq: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("0F1 parameter m must be >= 1".into()));
    }
    if !(r_sq >= 0.0) || !r_sq.is_finite() {
        return Err(Error::Domain(format!(
            "0F1 argument must be finite and >= 0, got {r_sq}"
        )));
    }
    if r_sq == 0.0 {
        return Ok(0.0);
    }
    let nu = (m - 1) as f64;
    Ok(ln_gamma_positive(m as f64) + log_bessel_i_over_power(nu, 2.0 * r_sq.sqrt()))
}

/// `ln ψ(w, n)`, the log of the non-centrality factor
///
/// `ψ(w,n) = Γ(n)[nκ(1+κ)]^{−(n−1)/2} ((1+κ)/e^κ)^n e^{−κw} w^{−(n−1)/2} I_{n−1}(2√(nκ(1+κ)w))`
///
/// rewritten as `n(ln(1+κ) − κ) − κw + ln ₀F̃₁(n; nκ(1+κ)w)`. At `κ = 0` it is
/// exactly `0`.
pub fn log_psi_factor(w: f64, n: usize, kappa: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("psi factor needs n >= 1".into()));
    }
    if !(w >= 0.0) || !w.is_finite() {
        return Err(Error::Domain(format!(
            "psi factor needs finite w >= 0, got {w}"
        )));
    }
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!(
            "psi factor needs finite kappa >= 0, got {kappa}"
        )));
    }
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let r_sq = nf * kappa * (1.0 + kappa) * w;
    Ok(nf * (kappa.ln_1p() - kappa) - kappa * w + hyp0f1_scalar(n, r_sq)?)
}

/// `ψ(w, n)`, see [`log_psi_factor`]. Exactly `1` at `κ = 0`.
pub fn psi_factor(w: f64, n: usize, kappa: f64) -> Result<f64> {
    Ok(log_psi_factor(w, n, kappa)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain power series for I_ν(x), summed directly. Only usable where it
    /// does not overflow.
    fn bessel_series_oracle(nu: f64, x: f64, terms: usize) -> f64 {
        let mut sum = 0.0;
        for k in 0..terms {
            let kf = k as f64;
            sum += ((2.0 * kf + nu) * (0.5 * x).ln()
                - ln_gamma_positive(kf + 1.0)
                - ln_gamma_positive(kf + nu + 1.0))
            .exp();
        }
        sum
    }

    #[test]
    fn debye_polynomials_match_known_low_orders() {
        // u1 = (3t − 5t³)/24, u2 = (81t² − 462t⁴ + 385t⁶)/1152
        let p = &DEBYE_POLYS;
        assert!((p[1][0] - 3.0 / 24.0).abs() < 1e-16);
        assert!((p[1][1] + 5.0 / 24.0).abs() < 1e-16);
        assert!((p[2][0] - 81.0 / 1152.0).abs() < 1e-16);
        assert!((p[2][1] + 462.0 / 1152.0).abs() < 1e-16);
        assert!((p[2][2] - 385.0 / 1152.0).abs() < 1e-16);
    }

    #[test]
    fn small_cases() {
        assert_eq!(log_bessel_i(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(log_bessel_i(2.0, 0.0).unwrap(), f64::NEG_INFINITY);
        let v = log_bessel_i(1.0, 2.0).unwrap().exp();
        let oracle = bessel_series_oracle(1.0, 2.0, 50);
        assert!((v / oracle - 1.0).abs() < 1e-13, "{v} vs {oracle}");
        assert!(log_bessel_i(-1.0, 1.0).is_err());
        assert!(log_bessel_i(1.0, -1.0).is_err());
    }

    #[test]
    fn large_argument_hankel_oracle() {
        // I_0(x) ≈ e^x/√(2πx) (1 + 1/(8x) + 9/(128x²) + 225/(3072x³))
        let x = 600.0;
        let oracle = x - 0.5 * (2.0 * PI * x).ln()
            + (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x) + 225.0 / (3072.0 * x * x * x)).ln();
        let v = log_bessel_i(0.0, x).unwrap();
        assert!((v - oracle).abs() < 1e-12, "{v} vs {oracle}");
        assert!(log_bessel_i(0.0, 1e6).unwrap().is_finite());
        assert!(log_bessel_i(30.0, 1e6).unwrap().is_finite());
    }

    #[test]
    fn regimes_agree_at_crossover() {
        for &nu in &[0.0, 0.5, 1.0, 2.0, 3.0, 7.0, 10.0, 31.0, 50.0, 100.0, 255.0] {
            for &f in &[0.9, 1.0, 1.1, 1.5] {
                let x = SERIES_CROSSOVER * (nu + 1.0) * f;
                let a = nu * (0.5 * x).ln() + series_over_power(nu, x);
                let b = debye_log(nu, x);
                // relative error of I itself is |a − b|
                assert!((a - b).abs() < 1e-10, "nu={nu} x={x}: series {a} debye {b}");
            }
        }
    }

    #[test]
    fn series_matches_direct_sum_below_overflow() {
        for &nu in &[0.0, 1.0, 4.0, 9.0] {
            for &x in &[0.01, 0.3, 1.0, 5.0, 12.0, 40.0] {
                let direct = bessel_series_oracle(nu, x, 200);
                let v = log_bessel_i(nu, x).unwrap();
                assert!((v - direct.ln()).abs() < 1e-12, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn hyp0f1_series_agreement() {
        // ₀F₁(;m;z) = Σ z^k / (k! (m)_k)
        for m in 1..=6usize {
            for &r in &[0.1, 1.0, 5.0, 20.0] {
                let z: f64 = r * r;
                let mut term = 1.0;
                let mut sum = 1.0;
                for k in 1..400 {
                    let kf = k as f64;
                    term *= z / (kf * (m as f64 + kf - 1.0));
                    sum += term;
                }
                let v = hyp0f1_scalar(m, z).unwrap();
                assert!(
                    (v - sum.ln()).abs() < 1e-10 * sum.ln().abs().max(1.0),
                    "m={m} r={r}"
                );
            }
        }
        assert_eq!(hyp0f1_scalar(3, 0.0).unwrap(), 0.0);
        let v = hyp0f1_scalar(1, 4.0).unwrap();
        assert!((v - log_bessel_i(0.0, 4.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn psi_limits() {
        assert_eq!(psi_factor(3.0, 4, 0.0).unwrap(), 1.0);
        assert!((psi_factor(3.0, 4, 1e-8).unwrap() - 1.0).abs() < 1e-6);
        let mut prev = f64::INFINITY;
        for &k in &[1e-4, 1e-6, 1e-8] {
            let d = (psi_factor(2.5, 3, k).unwrap() - 1.0).abs();
            assert!(d < prev);
            prev = d;
        }
        // ψ(0, n) = (1+κ)^n e^{−nκ}
        let k: f64 = 2.0;
        let v = psi_factor(0.0, 3, k).unwrap();
        assert!((v - ((1.0 + k).powi(3) * (-3.0 * k).exp())).abs() < 1e-14);
    }

    #[test]
    fn psi_never_nan() {
        for &w in &[0.0, 1e-300, 1e-10, 1.0, 50.0, 1e4, 1e8] {
            for n in [1, 2, 8, 64] {
                for &k in &[0.0, 1e-12, 0.3, 10.0, 1e3, 1e6] {
                    let v = psi_factor(w, n, k).unwrap();
                    assert!(!v.is_nan(), "w={w} n={n} k={k}");
                }
            }
        }
    }
}
