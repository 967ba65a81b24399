//! Zeros ζ_n of η_a in the lower half-plane (the poles of Ψ_a(z) = e^{−iz}/(z η_a(z))).
//!
//! For n ≥ 1 the zero ζ_n lies in the curved strip S_n between the curves Γ_n and Γ_{n+1},
//! Γ_n: x ↦ x − ix tan((n − 1/4)π − x/2), (2n − 3/2)π < x ≤ (2n − 1/2)π.
//! ζ₀ sits on the negative imaginary axis and ζ_{−n} = −conj ζ_n.

use crate::error::{domain, no_convergence, Error, Result};
use crate::jet::Jet;
use crate::special_functions::gamma::ln_gamma_abs;
use crate::special_functions::phi::{eta_a, eta_generic};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const NEWTON_MAX: usize = 50;
/// Newton stops once the scaled residual (see [`scaled_residual`]) is below this.
pub const RESIDUAL_TARGET: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub n: i64,
    pub a: f64,
    pub zeta: Complex64,
    pub dzeta_da: Complex64,
    /// |η_a(ζ)| relative to the size of the terms that cancel at the zero.
    pub residual: f64,
    pub guess_distance: f64,
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 1.0) || !a.is_finite() {
        return domain(format!("a = {a} must exceed 1"));
    }
    Ok(())
}

/// c_n(x) = x − ix tan((n − 1/4)π − x/2) on ((2n − 3/2)π, (2n − 1/2)π].
pub fn gamma_curve_point(n: u32, x: f64) -> Result<Complex64> {
    let nf = n as f64;
    if n == 0 || !(x > (2.0 * nf - 1.5) * PI && x <= (2.0 * nf - 0.5) * PI) {
        return domain(format!("x = {x} outside the parameter range of curve {n}"));
    }
    let t = ((nf - 0.25) * PI - 0.5 * x).tan();
    Ok(Complex64::new(x, -x * t))
}

/// Abscissa of the point of Γ_n at depth Im z = −y (y ≥ 0).
pub fn curve_abscissa_at_depth(n: u32, y: f64) -> f64 {
    let nf = n as f64;
    let depth = |x: f64| x * ((nf - 0.25) * PI - 0.5 * x).tan();
    let (mut lo, mut hi) = ((2.0 * nf - 1.5) * PI, (2.0 * nf - 0.5) * PI);
    if y <= 0.0 {
        return hi;
    }
    // depth decreases from +∞ at `lo` to 0 at `hi`
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if depth(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Whether z (Im z < 0) lies in the interior of the curved strip S_n.
pub fn in_strip(n: i64, z: Complex64) -> bool {
    if !(z.im < 0.0) {
        return false;
    }
    if n < 0 {
        return in_strip(-n, -z.conj());
    }
    let y = -z.im;
    let right = curve_abscissa_at_depth(n as u32 + 1, y);
    let left = if n == 0 { -curve_abscissa_at_depth(1, y) } else { curve_abscissa_at_depth(n as u32, y) };
    z.re > left && z.re < right
}

/// G = log|Γ(−1/a)|.
pub fn log_gamma_scale(a: f64) -> f64 {
    ln_gamma_abs(-1.0 / a)
}

/// Root of y − (1 + 1/a)/2 · log((2πn)² + y²) = G, by bisection.
pub fn guess_depth(a: f64, n: u32) -> Result<f64> {
    check_a(a)?;
    let g = log_gamma_scale(a);
    let k = 0.5 * (1.0 + 1.0 / a);
    let w = (2.0 * PI * n as f64).powi(2);
    let f = |y: f64| y - k * (w + y * y).ln() - g;
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e8 {
            return no_convergence("depth equation has no root");
        }
    }
    if f(lo) > 0.0 {
        return no_convergence("depth equation positive at zero");
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Asymptotic location (2n − 1/a)π + (1 + 1/a) arctan(2πn/Y_n) − iY_n of ζ_n, n ≥ 1.
pub fn initial_pole_guess(a: f64, n: u32) -> Result<Complex64> {
    if n == 0 {
        return domain("the asymptotic guess covers n ≥ 1 only");
    }
    let y = guess_depth(a, n)?;
    let nf = n as f64;
    let x = (2.0 * nf - 1.0 / a) * PI + (1.0 + 1.0 / a) * (2.0 * PI * nf / y).atan();
    Ok(Complex64::new(x, -y))
}

/// |η_a(z)| divided by 1 + |e^{iz}/(a z)|, the magnitude of the terms that cancel at a
/// zero deep in the lower half-plane.
pub fn scaled_residual(a: f64, z: Complex64, eta: Complex64) -> f64 {
    eta.norm() / (1.0 + ((I * z).exp() / (a * z)).norm())
}

/// dζ/da = −∂_aη / ∂_zη at a zero of η_a.
pub fn dzeta_da(a: f64, zeta: Complex64) -> Result<Complex64> {
    check_a(a)?;
    let jet = eta_generic(Jet::var(a), zeta)?;
    let dz = (jet.c0 - (I * zeta).exp()) / (a * zeta);
    Ok(-jet.c1 / dz)
}

fn newton(a: f64, mut z: Complex64) -> Result<(Complex64, f64)> {
    for _ in 0..NEWTON_MAX {
        let eta = eta_a(a, z)?;
        let res = scaled_residual(a, z, eta);
        let deriv = (eta - (I * z).exp()) / (a * z);
        let step = eta / deriv;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return no_convergence("Newton iterate left the finite plane");
        }
        if res < RESIDUAL_TARGET || step.norm() < 1e-15 * z.norm() {
            let eta = eta_a(a, z)?;
            let res2 = scaled_residual(a, z, eta);
            if res2 < 1e-12 {
                return Ok((z, res2));
            }
        }
    }
    no_convergence(format!("Newton iteration for a zero of eta near {z}"))
}

/// Newton refinement of the zero in S_n from `guess`; rejects roots outside S_n.
pub fn refine_pole(a: f64, n: i64, guess: Complex64) -> Result<PoleRecord> {
    check_a(a)?;
    if n == 0 {
        return zero_pole(a);
    }
    let (zeta, residual) = newton(a, guess)?;
    if !in_strip(n, zeta) {
        return Err(Error::StrayRoot { n, re: zeta.re, im: zeta.im });
    }
    let lemma = if n > 0 {
        initial_pole_guess(a, n as u32)?
    } else {
        -initial_pole_guess(a, (-n) as u32)?.conj()
    };
    Ok(PoleRecord {
        n,
        a,
        zeta,
        dzeta_da: dzeta_da(a, zeta)?,
        residual,
        guess_distance: (zeta - lemma).norm(),
    })
}

/// ζ_n for n ≥ 1 from the asymptotic guess.
pub fn find_pole(a: f64, n: u32) -> Result<PoleRecord> {
    if n == 0 {
        return zero_pole(a);
    }
    refine_pole(a, n as i64, initial_pole_guess(a, n)?)
}

/// ζ₀ = −iy: η_a(−iy) = 1 − Σ y^m/(m!(am − 1)) is real and decreasing in y.
pub fn zero_pole(a: f64) -> Result<PoleRecord> {
    check_a(a)?;
    let f = |y: f64| -> Result<f64> { Ok(eta_a(a, Complex64::new(0.0, -y))?.re) };
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            return no_convergence("no zero of eta on the imaginary axis");
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    // Newton along the axis, where η/η' is purely imaginary
    let mut y = 0.5 * (lo + hi);
    for _ in 0..3 {
        let z = Complex64::new(0.0, -y);
        let eta = eta_a(a, z)?;
        let deriv = (eta - (I * z).exp()) / (a * z);
        let step = (eta / deriv).im;
        if !(step.abs() < hi - lo + 1e-15 * y) {
            break;
        }
        y += step;
    }
    let zeta = Complex64::new(0.0, -y);
    let eta = eta_a(a, zeta)?;
    let residual = scaled_residual(a, zeta, eta);
    if !(residual < 1e-12) {
        return no_convergence(format!("zero on the imaginary axis, residual {residual:e}"));
    }
    Ok(PoleRecord {
        n: 0,
        a,
        zeta,
        dzeta_da: dzeta_da(a, zeta)?,
        residual,
        guess_distance: 0.0,
    })
}

/// Residue of Ψ_a at `center` by the trapezoid rule on a circle.
pub fn contour_residue(a: f64, center: Complex64, radius: f64, points: usize) -> Result<Complex64> {
    check_a(a)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let w = Complex64::from_polar(radius, 2.0 * PI * k as f64 / points as f64);
        let z = center + w;
        let psi = (-I * z).exp() / (z * eta_a(a, z)?);
        acc += psi * w;
    }
    Ok(acc / points as f64)
}

/// |contour residue of Ψ_a around ζ − (−a e^{−2iζ})| with 64 points at radius 1e−2.
pub fn residue_check(a: f64, record: &PoleRecord) -> Result<f64> {
    let z = record.zeta;
    let numeric = contour_residue(a, z, 1e-2, 64)?;
    Ok((numeric + a * (-2.0 * I * z).exp()).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_examples() {
        let p = gamma_curve_point(1, 1.5 * PI).unwrap();
        assert!(p.im.abs() < 1e-15);
        let q = gamma_curve_point(1, PI).unwrap();
        assert!((q - Complex64::new(PI, -PI)).norm() < 1e-14);
        assert!(gamma_curve_point(1, 0.5 * PI).is_err());
        assert!((curve_abscissa_at_depth(1, PI) - PI).abs() < 1e-12);
    }

    #[test]
    fn lemma_guess_for_a_two() {
        let z = initial_pole_guess(2.0, 1).unwrap();
        assert!((z.im + 4.32).abs() < 0.01 && (z.re - 6.16).abs() < 0.01, "{z}");
    }
}
