//! The series F_k(y), the tail integral Π(y) and the log-weighted primitives
//! ∫₀^y (log u)^k e^{iu} du.

use super::gamma::{gamma_field, EULER_GAMMA};
use super::incomplete_gamma::tail_fraction;
use crate::error::{domain, no_convergence, Error, Result};
use crate::jet::{Field, Jet};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest y accepted by [`f_k_series`].
pub const SERIES_SAFE_Y: f64 = 30.0;
/// Split point between the power series and the continued-fraction forms.
const SPLIT: f64 = 8.0;

/// F_k(y) = Σ_{n≥1} (iy)^n / (n! n^k).
pub fn f_k_series(k: u32, y: f64) -> Result<Complex64> {
    if !(y > 0.0) {
        return domain("y must be positive");
    }
    if y > SERIES_SAFE_Y {
        return Err(Error::Overflow(format!("F_k series at y = {y} > {SERIES_SAFE_Y}")));
    }
    let iy = I * y;
    let mut p = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..400 {
        let nf = n as f64;
        p = p * iy / nf;
        let t = p / nf.powi(k as i32);
        sum += t;
        if nf > y && t.norm() < 1e-18 * sum.norm() {
            return Ok(sum);
        }
    }
    no_convergence("F_k series")
}

/// Constant part of F₂ in its closed form: π²/24 − γ²/2 + πiγ/2.
fn f2_constant() -> Complex64 {
    Complex64::new(PI * PI / 24.0 - EULER_GAMMA * EULER_GAMMA / 2.0, PI * EULER_GAMMA / 2.0)
}

/// Π(y) = ∫_y^∞ Γ(0, −iu)/u du.
///
/// Small y: from the series of F₂ via F₂ = Π + (π²/24 − γ²/2 + πiγ/2) + (πi/2 − γ − ½log y) log y.
/// Large y: Π(y) = e^{iy} ∂_s C(s, −iy)|_{s=0}, where Γ(s, z) = e^{−z} z^s C(s, z).
pub fn capital_pi(y: f64) -> Result<Complex64> {
    if !(y > 0.0) {
        return domain("y must be positive");
    }
    if y <= SPLIT {
        let l = y.ln();
        let f2 = f_k_series(2, y)?;
        return Ok(f2 - f2_constant() - (Complex64::new(-EULER_GAMMA - 0.5 * l, FRAC_PI_2)) * l);
    }
    let cf = tail_fraction(Jet::var(0.0), -I * y)?;
    Ok((I * y).exp() * cf.d1())
}

/// ∫_y^∞ u^{s−1} e^{iu} du = e^{iy} y^s C(s, −iy), as a jet in `s` around `s0`.
pub(crate) fn oscillatory_tail_jet(s0: f64, y: f64) -> Result<Jet> {
    let s = Jet::var(s0);
    let cf = tail_fraction(s, -I * y)?;
    Ok(((s * Jet::re(y.ln())).exp() * cf).scale((I * y).exp()))
}

/// ∫₀^∞ u^{s−1} e^{iu} du = Γ(s) e^{iπs/2} (continued analytically), as a jet around `s0`.
pub(crate) fn oscillatory_full_jet(s0: f64) -> Jet {
    let s = Jet::var(s0);
    gamma_field(s) * (s.scale(I * FRAC_PI_2)).exp()
}

/// ∫₀^y (log u)^k e^{iu} du for k ∈ {1, 2}.
pub fn log_weighted_integral(k: u32, y: f64) -> Result<Complex64> {
    if !(y > 0.0) {
        return domain("y must be positive");
    }
    if k != 1 && k != 2 {
        return domain("k must be 1 or 2");
    }
    if y <= SPLIT {
        return log_weighted_series(k, y);
    }
    let full = oscillatory_full_jet(1.0);
    let tail = oscillatory_tail_jet(1.0, y)?;
    let diff = full - tail;
    Ok(if k == 1 { diff.d1() } else { diff.d2() })
}

fn log_weighted_series(k: u32, y: f64) -> Result<Complex64> {
    let l = y.ln();
    let mut p = Complex64::new(1.0, 0.0); // i^n / n!
    let mut ypow = y; // y^{n+1}
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..400 {
        let m = (n + 1) as f64;
        if n > 0 {
            p = p * I / n as f64;
            ypow *= y;
        }
        let moment = if k == 1 {
            ypow * (l / m - 1.0 / (m * m))
        } else {
            ypow * (l * l / m - 2.0 * l / (m * m) + 2.0 / (m * m * m))
        };
        let t = p * moment;
        sum += t;
        if m > y && t.norm() < 1e-18 * sum.norm().max(1e-300) {
            return Ok(sum);
        }
    }
    no_convergence("log-weighted series")
}
