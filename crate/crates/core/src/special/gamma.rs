use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_positive(x))
}

pub(crate) fn ln_gamma_positive(x: f64) -> f64 {
    // Γ(1) = Γ(2) = 1 exactly; keep the two zeros of ln Γ exact.
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        return ln_gamma_positive(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln Γ̃_m(a) = m(m−1)/2 · ln π + Σ_{k=1..m} ln Γ(a − k + 1)`, the complex
/// multivariate gamma function. Requires `a > m − 1`.
pub fn log_multivariate_gamma(m: usize, a: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("multivariate gamma needs m >= 1".into()));
    }
    if !(a > (m - 1) as f64) {
        return Err(Error::Domain(format!(
            "multivariate gamma of order {m} requires a > {}, got {a}",
            m - 1
        )));
    }
    let mf = m as f64;
    let mut acc = 0.5 * mf * (mf - 1.0) * PI.ln();
    for k in 1..=m {
        acc += ln_gamma_positive(a - (k - 1) as f64);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_reference_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-14);
        // ln √π
        assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_087_07).abs() < 1e-14);
    }

    #[test]
    fn gamma_domain() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn multivariate_gamma_cases() {
        assert!((log_multivariate_gamma(1, 3.0).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!((log_multivariate_gamma(2, 2.0).unwrap() - PI.ln()).abs() < 1e-14);
        assert!(log_multivariate_gamma(3, 2.0).is_err());
        assert!(log_multivariate_gamma(0, 2.0).is_err());
    }

    #[test]
    fn gamma_recurrence() {
        for i in 1..200 {
            let x = 0.37 * i as f64;
            let lhs = ln_gamma_positive(x + 1.0);
            let rhs = ln_gamma_positive(x) + x.ln();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "x = {x}");
        }
    }
}
