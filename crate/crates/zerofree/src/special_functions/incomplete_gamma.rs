//! Incomplete gamma functions of real order and complex argument.
//!
//! Branch convention: every power `z^s` uses the principal logarithm,
//! `|arg z| < π`, with the cut along the negative real axis.

use super::gamma::{gamma, EULER_GAMMA};
use crate::error::{domain, no_convergence, Result};
use crate::jet::Field;
use num_complex::Complex64;

/// Below this modulus the power series are used, above it the continued fraction.
pub const SERIES_RADIUS: f64 = 2.5;
const CF_MAX_ITER: usize = 500;
const TINY: f64 = 1e-300;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Continued fraction for `C(s, z) = e^z z^{-s} Γ(s, z)`, valid off the negative
/// real axis and fast for large `|z|`. Generic so that derivatives in `s` can be
/// carried along with a [`crate::jet::Jet`].
pub fn tail_fraction<T: Field>(s: T, z: Complex64) -> Result<T> {
    let one = c(1.0);
    let tiny = T::cst(c(TINY));
    let mut b = (-s).shift(z + one);
    let mut f = if b.val().norm() < TINY { tiny } else { b };
    let mut cc = f;
    let mut d = T::cst(c(0.0));
    for k in 1..=CF_MAX_ITER {
        let kf = k as f64;
        let ak = (s.shift(c(-kf))).scale(c(kf));
        b = b.shift(c(2.0));
        d = b + ak * d;
        if d.val().norm() < TINY {
            d = tiny;
        }
        cc = b + ak / cc;
        if cc.val().norm() < TINY {
            cc = tiny;
        }
        d = d.recip();
        let delta = cc * d;
        f = f * delta;
        if (delta - T::cst(one)).max_norm() < 1e-15 {
            return Ok(f.recip());
        }
    }
    no_convergence(format!("incomplete gamma continued fraction at z = {z}"))
}

/// `z^s` on the principal branch.
pub fn cpow(z: Complex64, s: f64) -> Complex64 {
    (z.ln() * s).exp()
}

fn is_nonpositive_integer(s: f64) -> bool {
    s <= 0.0 && s == s.floor()
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re < 0.0
}

/// `Σ_{n≥0} (−z)^n / (n! (s+n))`, so that `γ(s, z) = z^s` times this sum.
fn lower_series_sum(s: f64, z: Complex64) -> Result<Complex64> {
    let mut term = c(1.0);
    let mut sum = c(1.0 / s);
    for n in 1..2000 {
        term = term * (-z) / n as f64;
        let t = term / (s + n as f64);
        sum += t;
        if t.norm() < 1e-17 * sum.norm() && n as f64 > z.norm() {
            return Ok(sum);
        }
    }
    no_convergence(format!("lower incomplete gamma series at z = {z}"))
}

/// `Γ(0, z) = −γ − log z − Σ_{n≥1} (−z)^n / (n n!)`.
fn upper_gamma_zero_series(z: Complex64) -> Result<Complex64> {
    let mut term = c(1.0);
    let mut sum = c(0.0);
    for n in 1..2000 {
        term = term * (-z) / n as f64;
        let t = term / n as f64;
        sum += t;
        if t.norm() < 1e-17 * sum.norm().max(1e-300) && n as f64 > z.norm() {
            return Ok(-EULER_GAMMA - z.ln() - sum);
        }
    }
    no_convergence(format!("Γ(0, z) series at z = {z}"))
}

/// Asymptotic expansion `z^{s-1} e^{-z} Σ (s−1)…(s−k) z^{-k}` truncated at its smallest term.
fn upper_gamma_asymptotic(s: f64, z: Complex64) -> Result<Complex64> {
    let mut term = c(1.0);
    let mut sum = c(1.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let next = term * (s - k as f64) / z;
        if next.norm() >= last {
            break;
        }
        last = next.norm();
        term = next;
        sum += term;
        if last < 1e-17 * sum.norm() {
            break;
        }
    }
    if last > 1e-10 * sum.norm() {
        return no_convergence(format!("asymptotic series for Γ({s}, {z}) too coarse"));
    }
    Ok(cpow(z, s - 1.0) * (-z).exp() * sum)
}

/// Below this modulus a failed continued fraction (near the cut) falls back to the series.
const SERIES_FALLBACK_RADIUS: f64 = 12.0;

fn upper_gamma_fraction(s: f64, z: Complex64) -> Result<Complex64> {
    match tail_fraction(c(s), z) {
        Ok(cf) => Ok((-z).exp() * cpow(z, s) * cf),
        Err(e) if z.norm() <= SERIES_FALLBACK_RADIUS => upper_gamma_series(s, z).map_err(|_| e),
        Err(e) => upper_gamma_asymptotic(s, z).map_err(|_| e),
    }
}

fn upper_gamma_series(s: f64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(s) {
        let mut g = upper_gamma_zero_series(z)?;
        let ez = (-z).exp();
        let mut k = 0.0;
        while k > s {
            k -= 1.0;
            g = (g - cpow(z, k) * ez) / k;
        }
        return Ok(g);
    }
    Ok(c(gamma(s)) - cpow(z, s) * lower_series_sum(s, z)?)
}

/// Upper incomplete gamma `Γ(s, z) = ∫_z^∞ u^{s−1} e^{−u} du` along the ray `z + R_{>0}`.
pub fn upper_incomplete_gamma(s: f64, z: Complex64) -> Result<Complex64> {
    if !s.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
        return domain("non-finite argument");
    }
    if z == c(0.0) {
        if s > 0.0 {
            return Ok(c(gamma(s)));
        }
        return domain("Γ(s, 0) diverges for s ≤ 0");
    }
    if on_cut(z) {
        return domain("argument on the branch cut");
    }
    if z.norm() > SERIES_RADIUS {
        return upper_gamma_fraction(s, z);
    }
    upper_gamma_series(s, z)
}

/// Lower incomplete gamma `γ(s, z) = ∫_0^z u^{s−1} e^{−u} du`, for `s > −1`, `s ≠ 0`,
/// `Re z ≥ 0`. Negative orders go through `γ(s, z) = (γ(s+1, z) + z^s e^{−z}) / s`.
pub fn lower_incomplete_gamma(s: f64, z: Complex64) -> Result<Complex64> {
    if !(s > -1.0) || s == 0.0 || !s.is_finite() {
        return domain(format!("order {s} outside (−1, ∞) \\ {{0}}"));
    }
    if z.re < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return domain("argument must have nonnegative real part");
    }
    if s < 0.0 {
        if z == c(0.0) {
            return domain("γ(s, 0) diverges for s < 0");
        }
        let up = lower_incomplete_gamma(s + 1.0, z)?;
        return Ok((up + cpow(z, s) * (-z).exp()) / s);
    }
    if z == c(0.0) {
        return Ok(c(0.0));
    }
    if z.norm() <= SERIES_RADIUS {
        return Ok(cpow(z, s) * lower_series_sum(s, z)?);
    }
    Ok(c(gamma(s)) - upper_gamma_fraction(s, z)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_special_case() {
        let z = Complex64::new(2.0, 0.0);
        let g = lower_incomplete_gamma(1.0, z).unwrap();
        assert!((g - c(1.0 - (-2.0f64).exp())).norm() < 1e-15);
        assert_eq!(lower_incomplete_gamma(1.0, c(0.0)).unwrap(), c(0.0));
        assert!((upper_incomplete_gamma(1.0, c(0.0)).unwrap() - c(1.0)).norm() < 1e-14);
        for &z in &[Complex64::new(0.3, -1.0), Complex64::new(5.0, 7.0), Complex64::new(-4.0, 0.5)] {
            let g = upper_incomplete_gamma(1.0, z).unwrap();
            assert!((g - (-z).exp()).norm() < 1e-13 * (-z).exp().norm());
        }
    }

    #[test]
    fn domain_errors() {
        assert!(lower_incomplete_gamma(0.0, c(1.0)).is_err());
        assert!(lower_incomplete_gamma(-1.5, c(1.0)).is_err());
        assert!(upper_incomplete_gamma(-0.5, c(0.0)).is_err());
        assert!(upper_incomplete_gamma(0.5, c(-3.0)).is_err());
    }

    #[test]
    fn series_and_fraction_agree_across_the_switch() {
        for &s in &[-1.9, -1.0, -0.5, 0.0, 0.4, 2.5] {
            for k in 0..16 {
                let th = -3.0 + 6.0 * k as f64 / 15.0;
                let z = Complex64::from_polar(SERIES_RADIUS, th);
                let cf = upper_gamma_fraction(s, z).unwrap();
                let se = upper_gamma_series(s, z).unwrap();
                assert!((cf - se).norm() < 1e-12 * cf.norm().max(1.0), "s={s} th={th}: {cf} {se}");
            }
        }
    }
}
