//! The entire function η_a, the exponent Φ_a(z) = z^{−1/a} η_a(z), its limit ξ(a)
//! and parameter derivatives.
//!
//! η_a(z) = e^{iz} − iz ∫₀¹ e^{izt} t^{−1/a} dt = 1 − Σ_{m≥1} (iz)^m / (m! (am − 1)).
//! For large |z| with Re z ≥ 0 it is evaluated as
//! η_a(z) = w^{1/a} Γ(1 − 1/a) + a^{−1} w^{1/a} Γ(−1/a, w),  w = −iz,
//! where log w = log|z| + i(arg z − π/2) continues the principal branch from the
//! right half-plane. The left half-plane follows from η_a(−z̄) = conj η_a(z).

use super::gamma::gamma_field;
use super::incomplete_gamma::tail_fraction;
use crate::error::{domain, no_convergence, Result};
use crate::jet::{Field, Jet};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Radius inside which the power series is always used.
pub const CROSSOVER_RADIUS: f64 = 8.0;
/// Below the real axis, points with |z| − |Im z| ≤ this margin (and |z| ≤ 40) also use the
/// series: the terms there cancel mildly, while the continued fraction nears its cut.
pub const AXIS_MARGIN: f64 = 4.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_shape(a: f64) -> Result<()> {
    if !(a > 1.0) || !a.is_finite() {
        return domain(format!("shape parameter a = {a} must exceed 1"));
    }
    Ok(())
}

/// Which evaluation path [`eta_a`] takes at `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaPath {
    Series,
    IncompleteGamma,
}

pub fn eta_path(z: Complex64) -> EtaPath {
    let r = z.norm();
    if r <= CROSSOVER_RADIUS || (z.im < 0.0 && r - z.im.abs() <= AXIS_MARGIN && r <= 40.0) {
        EtaPath::Series
    } else {
        EtaPath::IncompleteGamma
    }
}

pub(crate) fn eta_series<T: Field>(a: T, z: Complex64) -> Result<T> {
    let iz = I * z;
    let mut p = c(1.0);
    let mut sum = T::re(1.0);
    let r = z.norm();
    for m in 1..4000 {
        let mf = m as f64;
        p = p * iz / mf;
        let den = a.scale(c(mf)).shift(c(-1.0));
        let term = T::cst(p) / den;
        sum = sum - term;
        if mf > r && term.val().norm() < 1e-18 * sum.val().norm().max(1.0) {
            return Ok(sum);
        }
    }
    no_convergence(format!("eta series at z = {z}"))
}

pub(crate) fn eta_incomplete_gamma<T: Field>(a: T, z: Complex64) -> Result<T> {
    // Re z ≥ 0 here; arg z ∈ [−π/2, π/2].
    let logw = Complex64::new(z.norm().ln(), z.arg() - FRAC_PI_2);
    let w = -I * z;
    let s = -a.recip();
    let w_pow = (-(s * T::cst(logw))).exp();
    let head = w_pow * gamma_field(s.shift(c(1.0)));
    let tail = tail_fraction(s, w)?;
    Ok(head - s * tail.scale((-w).exp()))
}

/// η_a at `z` for a parameter carried as any [`Field`] scalar (pass a [`Jet`] to get
/// derivatives in `a`).
pub fn eta_generic<T: Field>(a: T, z: Complex64) -> Result<T> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return domain("non-finite argument");
    }
    if z.re < 0.0 {
        return eta_generic(a, -z.conj()).map(Field::conj);
    }
    match eta_path(z) {
        EtaPath::Series => eta_series(a, z),
        EtaPath::IncompleteGamma => eta_incomplete_gamma(a, z),
    }
}

/// η_a(z); entire in z.
pub fn eta_a(a: f64, z: Complex64) -> Result<Complex64> {
    check_shape(a)?;
    eta_generic(c(a), z)
}

/// η_a(z) forced through one evaluation path (used to validate the crossover).
pub fn eta_a_via(a: f64, z: Complex64, path: EtaPath) -> Result<Complex64> {
    check_shape(a)?;
    if z.re < 0.0 {
        return eta_a_via(a, -z.conj(), path).map(|v| v.conj());
    }
    match path {
        EtaPath::Series => eta_series(c(a), z),
        EtaPath::IncompleteGamma => eta_incomplete_gamma(c(a), z),
    }
}

/// ∂η_a/∂z = (η_a(z) − e^{iz}) / (a z).
pub fn eta_dz(a: f64, z: Complex64) -> Result<Complex64> {
    check_shape(a)?;
    if z.norm() < 1e-8 {
        // η_a(z) = 1 − iz/(a−1) + z²/(2(2a−1)) + O(z³)
        return Ok(-I / (a - 1.0) + z / (2.0 * a - 1.0));
    }
    let eta = eta_a(a, z)?;
    Ok((eta - (I * z).exp()) / (a * z))
}

/// ∂η_a/∂a at fixed z.
pub fn eta_da(a: f64, z: Complex64) -> Result<Complex64> {
    check_shape(a)?;
    Ok(eta_generic(Jet::var(a), z)?.d1())
}

fn check_point(z: Complex64) -> Result<()> {
    if z == c(0.0) {
        return domain("Φ_a is singular at z = 0");
    }
    if z.im > 0.0 {
        return domain("Φ_a is evaluated in the closed lower half-plane only");
    }
    Ok(())
}

/// Φ_a(z) = z^{−1/a} η_a(z) (principal power).
pub fn phi_a(a: f64, z: Complex64) -> Result<Complex64> {
    check_shape(a)?;
    check_point(z)?;
    Ok((-z.ln() / a).exp() * eta_a(a, z)?)
}

/// Φ_a through an explicit η path.
pub fn phi_a_via(a: f64, z: Complex64, path: EtaPath) -> Result<Complex64> {
    check_point(z)?;
    Ok((-z.ln() / a).exp() * eta_a_via(a, z, path)?)
}

/// Φ_a carried as a jet in `a` at a point of the closed lower half-plane.
pub fn phi_generic<T: Field>(a: T, z: Complex64) -> Result<T> {
    check_point(z)?;
    let pow = (-(a.recip() * T::cst(z.ln()))).exp();
    Ok(pow * eta_generic(a, z)?)
}

/// dΦ_a/dy = −a^{−1} y^{−1−1/a} e^{iy} on the positive axis.
pub fn phi_a_dy(a: f64, y: f64) -> Result<Complex64> {
    check_shape(a)?;
    if !(y > 0.0) {
        return domain("y must be positive");
    }
    Ok(-(I * y).exp() * y.powf(-1.0 - 1.0 / a) / a)
}

/// ∂Φ_a(y)/∂a on the positive axis.
pub fn phi_a_da(a: f64, y: f64) -> Result<Complex64> {
    check_shape(a)?;
    if !(y > 0.0) {
        return domain("y must be positive");
    }
    Ok(phi_generic(Jet::var(a), c(y))?.d1())
}

/// ξ(a) = lim_{y→∞} Φ_a(y) = −e^{−πi/(2a)} Γ(−1/a)/a = e^{−πi/(2a)} Γ(1 − 1/a).
pub fn xi_generic<T: Field>(a: T) -> T {
    let s = -a.recip();
    (s * T::cst(I * FRAC_PI_2)).exp() * gamma_field(s.shift(c(1.0)))
}

pub fn xi(a: f64) -> Result<Complex64> {
    check_shape(a)?;
    Ok(xi_generic(c(a)))
}

/// dξ/da.
pub fn xi_da(a: f64) -> Result<Complex64> {
    check_shape(a)?;
    Ok(xi_generic(Jet::var(a)).d1())
}
