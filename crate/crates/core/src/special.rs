//! Sine and cosine integrals.
//!
//! Power series below `x = 2`, modified Lentz continued fraction for the
//! complex exponential integral `E1(ix)` above it.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 200;
const SERIES_LIMIT: f64 = 2.0;

/// Returns `(Si(x), Ci(x))`.
///
/// `Ci(0)` is reported as negative infinity.
pub fn sin_cos_integrals(x: f64) -> Result<(f64, f64)> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Si/Ci need x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, f64::NEG_INFINITY));
    }
    if x.is_infinite() {
        return Ok((FRAC_PI_2, 0.0));
    }
    if x <= SERIES_LIMIT {
        Ok(series(x))
    } else {
        continued_fraction(x)
    }
}

fn series(x: f64) -> (f64, f64) {
    if x < 1e-8 {
        return (x, EULER_GAMMA + x.ln());
    }
    // Alternating terms x^k / (k * k!) split into odd (Si) and even (Ci) sums.
    let mut sum_sin = 0.0;
    let mut sum_cos = 0.0;
    let mut fact = 1.0;
    let mut k = 1usize;
    loop {
        fact *= x / k as f64;
        let term = fact / k as f64;
        // k = 1, 2 -> +, k = 3, 4 -> -, ...
        let sign = if k.div_ceil(2) % 2 == 1 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            sum_sin += sign * term;
        } else {
            sum_cos -= sign * term;
        }
        let scale = sum_sin.abs().max(sum_cos.abs()).max(TINY);
        if term < EPS * scale || k > MAX_ITER {
            break;
        }
        k += 1;
    }
    (sum_sin, EULER_GAMMA + x.ln() + sum_cos)
}

fn continued_fraction(x: f64) -> Result<(f64, f64)> {
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 2..=MAX_ITER {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = one / (d * a + b);
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            let h = h * Complex64::new(x.cos(), -x.sin());
            return Ok((FRAC_PI_2 + h.im, -h.re));
        }
    }
    Err(Error::Numerical(format!(
        "Si/Ci continued fraction did not converge at x = {x}"
    )))
}

/// `E(w) = Ci(w) - j Si(w)`, the antiderivative of `e^{-jw}/w`.
pub(crate) fn exp_integral_antiderivative(w: f64) -> Result<Complex64> {
    let (si, ci) = sin_cos_integrals(w)?;
    Ok(Complex64::new(ci, -si))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_limits() {
        assert_eq!(sin_cos_integrals(0.0).unwrap(), (0.0, f64::NEG_INFINITY));
        let (si, _) = sin_cos_integrals(1e4).unwrap();
        assert!((si - FRAC_PI_2).abs() < 1e-3);
        assert!(matches!(sin_cos_integrals(-1.0), Err(Error::Domain(_))));
        assert!(sin_cos_integrals(f64::NAN).is_err());
    }

    #[test]
    fn tabulated_values() {
        // Abramowitz & Stegun, table 5.1.
        let cases = [
            (0.5, 0.493_107_418_043_067, -0.177_784_078_806_612),
            (1.0, 0.946_083_070_367_183, 0.337_403_922_900_968),
            (2.0, 1.605_412_976_802_695, 0.422_980_828_774_865),
            (5.0, 1.549_931_244_944_674, -0.190_029_749_656_644),
            (10.0, 1.658_347_594_218_874, -0.045_456_433_004_455),
        ];
        for (x, si, ci) in cases {
            let (s, c) = sin_cos_integrals(x).unwrap();
            assert!((s - si).abs() < 1e-13, "Si({x}) = {s}");
            assert!((c - ci).abs() < 1e-13, "Ci({x}) = {c}");
        }
    }

    #[test]
    fn series_and_fraction_agree_at_the_switch() {
        let below = series(SERIES_LIMIT);
        let above = continued_fraction(SERIES_LIMIT).unwrap();
        assert!((below.0 - above.0).abs() < 1e-13);
        assert!((below.1 - above.1).abs() < 1e-13);
    }
}
