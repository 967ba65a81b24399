//! The constants K₁ (density 2 − K₁(c − 1/2)² near the edge) and K₂ (density K₂ c^{−3}
//! for large c).
//!
//! K₂ = (1/2π) Im ∫₀^∞ (F₁² + F₂)(y) e^{−iy}/y dy. Beyond Y1 the closed forms
//! F₁ = c₀ − L − e^{iy}C₀ and F₂ = e^{iy}C_s + C₂ + (c₀ − L/2)L, with L = log y,
//! c₀ = iπ/2 − γ, C₀ = C(0, −iy), C_s = ∂_s C(s, −iy)|₀ and C(s, z) = e^z z^{−s} Γ(s, z),
//! give (F₁² + F₂)e^{−iy}/y = P(L)e^{−iy}/y + (C_s − 2(c₀ − L)C₀)/y + e^{iy}C₀²/y
//! with P(L) = c₀² + C₂ − c₀L + L²/2. The first piece is a derivative in s of
//! ∫ y^{s−1}e^{−iy}, the second does not oscillate and the third is summed per
//! half-period.
//!
//! K₁ = 20 + (8/π) ∫₀^∞ (3y^{−4} + (3/2)y^{−2} − Im H̃₂(y)) dy with H̃₂ = −i e^{−iy} y^{−2} H₂.
//! Beyond Y1, J_k = ∫₀^y (log u)^k e^{iu} du = J_k(∞) − e^{iy} M_k(y) where M_k is the
//! k-th s-derivative of y^s C(s, −iy) at s = 1, so H₂ = h₀ + h₁e^{iy} + h₂e^{2iy}.
//! Numerically K₁ ≈ 4π² and K₂ ≈ π²/12; neither identity is used.

use super::QuadratureSpec;
use crate::error::{no_convergence, Result};
use crate::jet::{Field, Jet};
use crate::quadrature::{gk_adaptive, oscillatory_tail, Integral};
use crate::special_functions::gamma::EULER_GAMMA;
use crate::special_functions::incomplete_gamma::tail_fraction;
use crate::special_functions::series::{
    f_k_series, log_weighted_integral, oscillatory_full_jet, oscillatory_tail_jet,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const Y1: f64 = 8.0;
/// Below this the K₁ integrand is replaced by its limit 17/6.
const K1_ORIGIN: f64 = 0.01;

/// K₁ as computed by [`constant_k1`] with the default settings.
pub const K1_VALUE: f64 = 39.478_417_8;
/// K₂ as computed by [`constant_k2`] with the default settings.
pub const K2_VALUE: f64 = 0.822_467_033_424;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub value: f64,
    pub err: f64,
}

fn c0() -> Complex64 {
    Complex64::new(-EULER_GAMMA, FRAC_PI_2)
}

fn f2_constant() -> Complex64 {
    Complex64::new(PI * PI / 24.0 - EULER_GAMMA * EULER_GAMMA / 2.0, PI * EULER_GAMMA / 2.0)
}

fn collect<const N: usize>(
    failure: Option<crate::Error>,
    r: Integral<N>,
) -> Result<Integral<N>> {
    match failure {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Runs a fallible vector integrand through adaptive quadrature.
fn adaptive<const N: usize>(
    f: impl Fn(f64) -> Result<[f64; N]>,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral<N>> {
    let mut failure = None;
    let r = gk_adaptive(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; N]
            }
        },
        a,
        b,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_evals,
    )?;
    collect(failure, r)
}

/// ∫_start^∞ of a fallible oscillating integrand, per half-period.
fn oscillating<const N: usize>(
    f: impl Fn(f64) -> Result<[f64; N]>,
    start: f64,
    spec: &QuadratureSpec,
) -> Result<Integral<N>> {
    let mut failure = None;
    let r = oscillatory_tail(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; N]
            }
        },
        start,
        &spec.oscillatory(),
    );
    collect(failure, r)
}

/// ∫_Y^∞ of a fallible smooth integrand decaying at least like y^{−2}, via y = Y/t.
fn inverted<const N: usize>(
    f: impl Fn(f64) -> Result<[f64; N]>,
    start: f64,
    spec: &QuadratureSpec,
) -> Result<Integral<N>> {
    adaptive(
        |t| {
            if t <= 0.0 {
                return Ok([0.0; N]);
            }
            let y = start / t;
            let jac = start / (t * t);
            Ok(f(y)?.map(|v| v * jac))
        },
        0.0,
        1.0,
        spec,
    )
}

/// [C(0, −iy), ∂_s C(s, −iy)|₀].
fn tail_pair(y: f64) -> Result<(Complex64, Complex64)> {
    let t = tail_fraction(Jet::var(0.0), -I * y)?;
    Ok((t.c0, t.c1))
}

/// conj of the s-jet of ∫_Y^∞ u^{s−1} e^{iu} du at s = 0: value, first and second
/// s-derivatives of ∫_Y^∞ u^{s−1} e^{−iu} du.
fn conj_log_moments(y: f64) -> Result<[Complex64; 3]> {
    let t = oscillatory_tail_jet(0.0, y)?;
    Ok([t.c0.conj(), t.d1().conj(), t.d2().conj()])
}

fn k2_parts(spec: &QuadratureSpec) -> Result<([f64; 2], f64)> {
    let c0 = c0();
    // components: [K₂ integrand, companion F₁ integrand], imaginary parts only
    let near = adaptive(
        |y| {
            let f1 = f_k_series(1, y)?;
            let f2 = f_k_series(2, y)?;
            let w = (-I * y).exp() / y;
            Ok([((f1 * f1 + f2) * w).im, (f1 * w).im])
        },
        0.0,
        Y1,
        spec,
    )?;
    let [m0, m1, m2] = conj_log_moments(Y1)?;
    let poly = (c0 * c0 + f2_constant()) * m0 - c0 * m1 + 0.5 * m2;
    let lin = c0 * m0 - m1;
    let smooth = inverted(
        |y| {
            let (cz, cs) = tail_pair(y)?;
            let l = y.ln();
            Ok([((cs - 2.0 * (c0 - l) * cz) / y).im, (-cz / y).im])
        },
        Y1,
        spec,
    )?;
    let wave = oscillating(
        |y| {
            let (cz, _) = tail_pair(y)?;
            Ok([((I * y).exp() * cz * cz / y).im, 0.0])
        },
        Y1,
        spec,
    )?;
    let k2 = near.value[0] + poly.im + smooth.value[0] + wave.value[0];
    let comp = near.value[1] + lin.im + smooth.value[1];
    Ok(([k2 / (2.0 * PI), comp], (near.err + smooth.err + wave.err) / (2.0 * PI)))
}

/// K₂ with an error estimate.
pub fn constant_k2(spec: &QuadratureSpec) -> Result<ConstantEstimate> {
    let ([v, _], err) = k2_parts(spec)?;
    Ok(ConstantEstimate { value: v, err })
}

/// Im ∫₀^∞ F₁(y) e^{−iy}/y dy, which vanishes.
pub fn k2_companion(spec: &QuadratureSpec) -> Result<f64> {
    Ok(k2_parts(spec)?.0[1])
}

/// H₁ and H₂ from the log-weighted primitives J₁, J₂.
fn h_functions(y: f64) -> Result<(Complex64, Complex64)> {
    let j1 = log_weighted_integral(1, y)?;
    let j2 = log_weighted_integral(2, y)?;
    let l = y.ln();
    let e = (I * y).exp();
    let h1 = 2.0 * (I * j1 - I * e / y + (1.0 - e) * l - 1.0);
    let inner = j1 + I - 0.5 * I * l - e / y + I * e * l;
    let h2 = 3.0
        * (0.5 * I * j2 - inner * inner - I * e * l / y - l
            + (0.25 - 0.5 * e) * l * l);
    Ok((h1, h2))
}

fn im_tilde(h: Complex64, y: f64) -> f64 {
    (-I * (-I * y).exp() * h / (y * y)).im
}

/// 3y^{−4} + (3/2)y^{−2} − Im H̃₂(y); tends to 17/6 at the origin.
pub fn k1_integrand(y: f64) -> Result<f64> {
    let (_, h2) = h_functions(y)?;
    Ok(3.0 / y.powi(4) + 1.5 / (y * y) - im_tilde(h2, y))
}

/// Coefficients (h₀, h₁, h₂) of H₁ and H₂ in powers of e^{iy}, for y ≥ Y1.
fn h_split(y: f64) -> Result<([Complex64; 2], [Complex64; 3])> {
    let full = oscillatory_full_jet(1.0);
    let (j1_inf, j2_inf) = (full.d1(), full.d2());
    // M(s, y) = y^s C(s, −iy) = e^{−iy} ∫_y^∞ u^{s−1} e^{iu} du
    let m = oscillatory_tail_jet(1.0, y)?.scale((-I * y).exp());
    let (m1, m2) = (m.d1(), m.d2());
    let l = y.ln();
    let h1 = [2.0 * (I * j1_inf + l - 1.0), 2.0 * (-I * m1 - I / y - l)];
    let b = j1_inf + I - 0.5 * I * l;
    let q = -m1 - 1.0 / y + I * l;
    let h2 = [
        3.0 * (0.5 * I * j2_inf - b * b - l + 0.25 * l * l),
        3.0 * (-0.5 * I * m2 - 2.0 * b * q - I * l / y - 0.5 * l * l),
        -3.0 * q * q,
    ];
    Ok((h1, h2))
}

fn k1_parts(spec: &QuadratureSpec) -> Result<([f64; 2], f64)> {
    // components: [K₁ integrand, H₁ companion Im H̃₁ − 2y^{−2}]
    // Near the origin the integrand is a difference of terms of size y^{−4}, which
    // limits its absolute accuracy to about 1e−16 · y^{−4}.
    let noisy = QuadratureSpec { abs_tol: spec.abs_tol.max(1e-8), ..*spec };
    let origin = [17.0 / 6.0 * K1_ORIGIN, 0.5 * K1_ORIGIN];
    let near = adaptive(
        |y| {
            let (h1, h2) = h_functions(y)?;
            Ok([
                3.0 / y.powi(4) + 1.5 / (y * y) - im_tilde(h2, y),
                im_tilde(h1, y) - 2.0 / (y * y),
            ])
        },
        K1_ORIGIN,
        Y1,
        &noisy,
    )?;
    // −Im H̃ = y^{−2} Re(h₀e^{−iy} + h₁ + h₂e^{iy})
    let smooth = inverted(
        |y| {
            let (h1, h2) = h_split(y)?;
            Ok([h2[1].re / (y * y), -h1[1].re / (y * y)])
        },
        Y1,
        spec,
    )?;
    let wave = oscillating(
        |y| {
            let (h1, h2) = h_split(y)?;
            let e = (I * y).exp();
            Ok([
                (h2[0] / e + h2[2] * e).re / (y * y),
                -(h1[0] / e).re / (y * y),
            ])
        },
        Y1,
        spec,
    )?;
    let algebraic = [Y1.powi(-3) + 1.5 / Y1, -2.0 / Y1];
    let mut total = [0.0; 2];
    for k in 0..2 {
        total[k] = origin[k] + near.value[k] + smooth.value[k] + wave.value[k] + algebraic[k];
    }
    // the origin cut contributes O(K1_ORIGIN³)
    let err = near.err + smooth.err + wave.err + K1_ORIGIN.powi(3);
    Ok((total, err))
}

/// K₁ with an error estimate.
pub fn constant_k1(spec: &QuadratureSpec) -> Result<ConstantEstimate> {
    let ([v, _], err) = k1_parts(spec)?;
    let value = 20.0 + 8.0 / PI * v;
    if !value.is_finite() {
        return no_convergence("K1 integral");
    }
    Ok(ConstantEstimate { value, err: 8.0 / PI * err })
}

/// ∫₀^∞ (Im H̃₁(y) − 2y^{−2}) dy, which vanishes.
pub fn h1_companion(spec: &QuadratureSpec) -> Result<f64> {
    Ok(k1_parts(spec)?.0[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_matches_direct_h() {
        for y in [8.0, 11.3, 20.0] {
            let (h1, h2) = h_functions(y).unwrap();
            let (s1, s2) = h_split(y).unwrap();
            let e = (I * y).exp();
            assert!((h1 - (s1[0] + s1[1] * e)).norm() < 1e-11 * h1.norm().max(1.0));
            assert!((h2 - (s2[0] + s2[1] * e + s2[2] * e * e)).norm() < 1e-11 * h2.norm().max(1.0));
        }
    }

    #[test]
    fn k1_integrand_origin_limit() {
        let v = k1_integrand(0.02).unwrap();
        assert!((v - 17.0 / 6.0).abs() < 1e-2, "{v}");
    }
}
