//! Floating-point views of exact values, for display and Monte Carlo
//! comparisons only. Nothing here feeds back into a certificate.

use inducert_core::exactnum::{QuadValue, Rational};
use num_bigint::{BigInt, Sign};
use num_traits::{ToPrimitive, Zero};

/// `(sign, log10 |x|)`, or `None` for zero. Works far outside the `f64`
/// exponent range.
pub fn rational_log10(r: &Rational) -> Option<(i8, f64)> {
    if r.is_zero() {
        return None;
    }
    let sign = if r.numer().sign() == Sign::Minus { -1 } else { 1 };
    Some((sign, bigint_log10(r.numer()) - bigint_log10(r.denom())))
}

fn bigint_log10(n: &BigInt) -> f64 {
    let bits = n.bits();
    let shift = bits.saturating_sub(60);
    let top = (n.magnitude() >> shift).to_f64().expect("fits in f64");
    top.log10() + shift as f64 * core::f64::consts::LOG10_2
}

/// `(sign, log10 |v|)` for a tower value, or `None` when it is zero.
pub fn quad_log10(v: &QuadValue) -> Option<(i8, f64)> {
    if v.is_zero() {
        return None;
    }
    let parts: Vec<(i8, f64)> = v
        .terms()
        .iter()
        .filter_map(|(rad, c)| rational_log10(c).map(|(s, l)| (s, l + 0.5 * (*rad as f64).log10())))
        .collect();
    let top = parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = parts.iter().map(|(s, l)| *s as f64 * 10f64.powf(l - top)).sum();
    // the exact sign is authoritative when the terms nearly cancel
    let sign = v.sign();
    let mag = if sum.abs() > 0.0 { sum.abs().log10() } else { -17.0 };
    Some((sign, top + mag))
}

pub fn rational_f64(r: &Rational) -> f64 {
    match rational_log10(r) {
        None => 0.0,
        Some((s, l)) => s as f64 * 10f64.powf(l),
    }
}

pub fn quad_f64(v: &QuadValue) -> f64 {
    match quad_log10(v) {
        None => 0.0,
        Some((s, l)) => s as f64 * 10f64.powf(l),
    }
}

fn sci(sl: Option<(i8, f64)>) -> String {
    match sl {
        None => "0".into(),
        Some((s, l)) => {
            let e = l.floor();
            let mant = 10f64.powf(l - e);
            format!("{}{:.6}e{}", if s < 0 { "-" } else { "" }, mant, e as i64)
        }
    }
}

/// Scientific notation such as `"-7.716049e-6"`, valid for tiny values.
pub fn rational_sci(r: &Rational) -> String {
    sci(rational_log10(r))
}

pub fn quad_sci(v: &QuadValue) -> String {
    sci(quad_log10(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use inducert_core::exactnum::rat;
    use num_traits::One;

    #[test]
    fn small_and_huge() {
        assert!((rational_f64(&rat(-5, 128)) + 5.0 / 128.0).abs() < 1e-15);
        let tiny = Rational::new(BigInt::one(), BigInt::from(10).pow(500));
        assert_eq!(rational_sci(&tiny), "1.000000e-500");
        let q = QuadValue::sqrt_times(3, rat(1, 3)).unwrap();
        assert!((quad_f64(&q) - 3f64.sqrt() / 3.0).abs() < 1e-12);
        let d = QuadValue::from_rational(rat(7, 4)).checked_sub(&QuadValue::sqrt(3).unwrap()).unwrap();
        assert!((quad_f64(&d) - (1.75 - 3f64.sqrt())).abs() < 1e-12);
    }
}
