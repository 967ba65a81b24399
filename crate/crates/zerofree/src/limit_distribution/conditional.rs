//! The law of Σ_{j≥2} T_j^{−a} for a unit-intensity Poisson process conditioned on
//! T₁ = δ. Its characteristic function is exp ψ(t) with
//! ψ(t) = −∫_δ^∞ (1 − e^{itx^{−a}}) dx
//!      = δ − (−it)^{1/a} Γ(1 − 1/a) − a^{−1} (−it)^{1/a} Γ(−1/a, −itδ^{−a}),  t > 0,
//! and ψ(−t) = conj ψ(t).

use super::QuadratureSpec;
use crate::error::{domain, no_convergence, Result};
use crate::quadrature::gk_adaptive;
use crate::special_functions::gamma::gamma;
use crate::special_functions::incomplete_gamma::upper_incomplete_gamma;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check(a: f64, delta: f64) -> Result<()> {
    if !(a > 1.0) || !a.is_finite() {
        return domain("a must exceed 1");
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return domain("δ must be positive");
    }
    Ok(())
}

/// Cumulant series Σ_k (it)^k δ^{1−ak} / (k! (ak − 1)); used while |t| δ^{−a} ≤ 1.
fn exponent_series(a: f64, delta: f64, t: f64) -> Result<Complex64> {
    let x = t * delta.powf(-a);
    let mut p = Complex64::new(delta, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..200 {
        let kf = k as f64;
        p = p * I * x / kf;
        let term = p / (a * kf - 1.0);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            return Ok(sum);
        }
    }
    no_convergence("conditional exponent series")
}

/// ψ(t), the logarithm of the conditional characteristic function.
pub fn conditional_exponent(a: f64, delta: f64, t: f64) -> Result<Complex64> {
    check(a, delta)?;
    if t == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if t < 0.0 {
        return Ok(conditional_exponent(a, delta, -t)?.conj());
    }
    if t * delta.powf(-a) <= 1.0 {
        return exponent_series(a, delta, t);
    }
    let w = Complex64::from_polar(t.powf(1.0 / a), -FRAC_PI_2 / a);
    let z = Complex64::new(0.0, -t * delta.powf(-a));
    let upper = upper_incomplete_gamma(-1.0 / a, z)?;
    Ok(delta - w * gamma(1.0 - 1.0 / a) - w * upper / a)
}

/// ψ(t) by direct quadrature of −∫_δ^∞ (1 − e^{itx^{−a}}) dx (substituting x = δ/u).
pub fn conditional_exponent_direct(a: f64, delta: f64, t: f64) -> Result<Complex64> {
    check(a, delta)?;
    let k = t * delta.powf(-a);
    let r = gk_adaptive(
        |u| {
            if u <= 0.0 {
                return [0.0; 2];
            }
            let v = (Complex64::new(1.0, 0.0) - (I * k * u.powf(a)).exp()) * (delta / (u * u));
            [v.re, v.im]
        },
        0.0,
        1.0,
        1e-14,
        1e-13,
        2_000_000,
    )?;
    Ok(-Complex64::new(r.value[0], r.value[1]))
}

/// φ_{a,δ}(t) = exp ψ(t).
pub fn conditional_char_function(a: f64, delta: f64, t: f64) -> Result<Complex64> {
    Ok(conditional_exponent(a, delta, t)?.exp())
}

/// Frequency beyond which |φ_{a,δ}| < 1e−17.
fn frequency_cutoff(a: f64, delta: f64) -> Result<f64> {
    let mut t = 1.0;
    for _ in 0..200 {
        if conditional_exponent(a, delta, t)?.re < -39.0 {
            return Ok(t);
        }
        t *= 2.0;
    }
    no_convergence("characteristic function does not decay")
}

fn inversion(
    a: f64,
    delta: f64,
    spec: &QuadratureSpec,
    kernel: impl Fn(f64, Complex64) -> f64,
) -> Result<f64> {
    let top = frequency_cutoff(a, delta)?;
    let mut failure = None;
    let r = gk_adaptive(
        |t| match conditional_char_function(a, delta, t) {
            Ok(phi) => [kernel(t, phi)],
            Err(e) => {
                failure.get_or_insert(e);
                [0.0]
            }
        },
        0.0,
        top,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_evals.max(1_000_000),
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value[0])
}

/// Density f_{a,δ}(x) = (1/π) ∫₀^∞ Re(φ(t) e^{−itx}) dt.
pub fn conditional_density(a: f64, delta: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check(a, delta)?;
    let v = inversion(a, delta, spec, |t, phi| (phi * (-I * t * x).exp()).re)?;
    Ok(v / PI)
}

/// Distribution function 1/2 − (1/π) ∫₀^∞ Im(φ(t) e^{−itx}) / t dt.
pub fn conditional_cdf(a: f64, delta: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    check(a, delta)?;
    let mean = delta.powf(1.0 - a) / (a - 1.0);
    let v = inversion(a, delta, spec, |t, phi| {
        if t == 0.0 {
            mean - x
        } else {
            (phi * (-I * t * x).exp()).im / t
        }
    })?;
    Ok(0.5 - v / PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_paths_meet() {
        // series just below and gamma form just above |t| δ^{−a} = 1
        let (a, d) = (2.0, 1.0);
        let lo = exponent_series(a, d, 1.0).unwrap();
        let w = Complex64::from_polar(1.0, -FRAC_PI_2 / a);
        let up = upper_incomplete_gamma(-1.0 / a, Complex64::new(0.0, -1.0)).unwrap();
        let hi = d - w * gamma(1.0 - 1.0 / a) - w * up / a;
        assert!((lo - hi).norm() < 1e-13, "{lo} {hi}");
    }
}
