//! Distribution of the scaled abscissa σ by direct quadrature.
//!
//! With a = 2c and η_a the entire function of [`crate::special_functions::phi`],
//! P(σ > c) = 1/2 + (1/π) ∫₀^∞ Im(e^{−iy} / (y η_a(y))) dy,
//! and the density is f(c) = −(2/π) ∫₀^∞ Im ∂_a(e^{−iy} / (y η_a(y))) dy.
//! Both integrals are evaluated together by carrying `a` as a [`Jet`].
//!
//! On [0, Y0] the integrand is smooth (its real part has a 1/y singularity, its imaginary
//! part does not) and adaptive Gauss–Kronrod is used. Beyond Y0, writing
//! Φ_a(y) = ξ + e^{iy} D(y) with D = y^{−1/a} C(−1/a, −iy)/a,
//! the integrand splits into e^{−iy} y^{−1−1/a}/ξ (integrated in closed form),
//! the non-oscillating −y^{−1−1/a} D/ξ², and the small oscillating remainder
//! e^{iy} y^{−1−1/a} D²/(ξ² Φ_a), summed per half-period with acceleration.

mod conditional;
mod constants;

pub use conditional::{
    conditional_cdf, conditional_char_function, conditional_density, conditional_exponent,
    conditional_exponent_direct,
};
pub use constants::{
    constant_k1, constant_k2, h1_companion, k1_integrand, k2_companion, ConstantEstimate,
    K1_VALUE, K2_VALUE,
};

use crate::error::{domain, Result};
use crate::jet::{Field, Jet};
use crate::quadrature::{gk_adaptive, oscillatory_tail, OscillatorySpec};
use crate::special_functions::incomplete_gamma::tail_fraction;
use crate::special_functions::phi::{eta_generic, xi_generic};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Where the direct evaluation of η_a hands over to the split form.
const SPLIT_Y: f64 = 8.0;
/// Closer than this to 1/2 the near-edge expansion replaces quadrature.
pub const EDGE_GUARD: f64 = 1e-4;

/// Tolerances and acceleration settings for the oscillatory integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Half-periods summed before acceleration.
    pub period_segments: usize,
    pub acceleration_depth: usize,
    pub max_evals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            period_segments: 48,
            acceleration_depth: 8,
            max_evals: 400_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return domain("tolerances must be positive");
        }
        if self.acceleration_depth < 1 || self.period_segments <= self.acceleration_depth {
            return domain("need period_segments > acceleration_depth ≥ 1");
        }
        Ok(())
    }

    pub(crate) fn oscillatory(&self) -> OscillatorySpec {
        OscillatorySpec {
            segments: self.period_segments,
            depth: self.acceleration_depth,
            half_period: PI,
        }
    }
}

/// A value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quadrature,
    Residue,
    MonteCarlo,
    Asymptotic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::Residue => "residue",
            Method::MonteCarlo => "montecarlo",
            Method::Asymptotic => "asymptotic",
        }
    }
}

/// Abscissa/value pairs with a method tag and per-point error estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub method: Method,
    pub err_estimates: Vec<f64>,
    pub seed: Option<u64>,
}

impl CurveTable {
    pub fn new(
        abscissae: Vec<f64>,
        values: Vec<f64>,
        method: Method,
        err_estimates: Vec<f64>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if abscissae.len() != values.len() || abscissae.len() != err_estimates.len() {
            return domain("curve columns differ in length");
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("abscissae must be strictly increasing");
        }
        if err_estimates.iter().any(|e| !e.is_finite() || *e < 0.0) {
            return domain("error estimates must be finite and nonnegative");
        }
        if method == Method::MonteCarlo && seed.is_none() {
            return domain("Monte Carlo curves must record their seed");
        }
        Ok(CurveTable { abscissae, values, method, err_estimates, seed })
    }
}

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.5) || !c.is_finite() {
        return domain(format!("c = {c} must exceed 1/2"));
    }
    Ok(())
}

/// e^{−iy}/(y η_a(y)) as a jet in a.
fn near_integrand(a: Jet, y: f64) -> Result<Jet> {
    let eta = eta_generic(a, Complex64::new(y, 0.0))?;
    Ok(eta.recip().scale((-I * y).exp() / y))
}

/// ∫₀^∞ e^{−iy}/(y η_a(y)) with the real part replaced by zero where it diverges: the
/// returned jet carries the imaginary part of the integral and of its a-derivatives.
/// Returns the jet and error bounds for its value and first derivative.
fn imaginary_integral(a: f64, spec: &QuadratureSpec) -> Result<(Jet, f64, f64)> {
    spec.validate()?;
    // Near a = 1 the k-th a-derivative of the integrand grows like (a − 1)^{−k−1};
    // each component is integrated in units of its own size.
    let w = (a - 1.0).min(1.0);
    let aj = Jet::var(a);
    let s = -aj.recip();
    let xi = xi_generic(aj);
    let xi2 = xi * xi;

    let mut failure = None;
    let near = gk_adaptive(
        |y| match near_integrand(aj, y) {
            Ok(g) => [g.c0.im, g.c1.im * w, g.c2.im * w * w],
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; 3]
            }
        },
        0.0,
        SPLIT_Y,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_evals,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }

    // Closed form of ∫_{Y0}^∞ y^{s−1} e^{−iy} dy = conj(e^{iY0} Y0^s C(s, −iY0)).
    let y0 = SPLIT_Y;
    let head = ((s * Jet::re(y0.ln())).exp() * tail_fraction(s, -I * y0)?)
        .scale((I * y0).exp())
        .conj()
        / xi;

    // D(y) y^{−1−1/a} as a jet.
    let weighted_d = |y: f64| -> Result<(Jet, Jet)> {
        let pw = (s * Jet::re(y.ln())).exp();
        let d = -(pw * tail_fraction(s, -I * y)?) * s;
        Ok((d, pw.scale(Complex64::new(1.0 / y, 0.0)) * d))
    };

    let mut failure = None;
    let smooth = gk_adaptive(
        |t| {
            if t <= 0.0 {
                return [0.0; 3];
            }
            let y = y0 / t;
            match weighted_d(y) {
                Ok((_, wd)) => {
                    let v = -(wd / xi2).scale(Complex64::new(y0 / (t * t), 0.0));
                    [v.c0.im, v.c1.im, v.c2.im]
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0; 3]
                }
            }
        },
        0.0,
        1.0,
        spec.abs_tol,
        spec.rel_tol,
        spec.max_evals,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }

    let mut failure = None;
    let wave = oscillatory_tail(
        |y| match weighted_d(y) {
            Ok((d, wd)) => {
                let e = (I * y).exp();
                let phi = xi + d.scale(e);
                let v = (wd * d / (xi2 * phi)).scale(e);
                [v.c0.im, v.c1.im, v.c2.im]
            }
            Err(e) => {
                failure.get_or_insert(e);
                [0.0; 3]
            }
        },
        y0,
        &spec.oscillatory(),
    );
    if let Some(e) = failure {
        return Err(e);
    }

    let near_value = [near.value[0], near.value[1] / w, near.value[2] / (w * w)];
    let im = |k: usize| near_value[k] + smooth.value[k] + wave.value[k];
    let total = Jet::new(
        Complex64::new(0.0, im(0) + head.c0.im),
        Complex64::new(0.0, im(1) + head.c1.im),
        Complex64::new(0.0, im(2) + head.c2.im),
    );
    let rest = smooth.err + wave.err;
    Ok((total, near.err + rest, near.err / w + rest))
}

/// P(σ > c) by quadrature with its error estimate.
pub fn prob_tail_quadrature(c: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let cdf = cdf_estimate(c, spec)?;
    Ok(Estimate { value: 1.0 - cdf.value, err: cdf.err })
}

/// P(σ ≤ c) with its error estimate.
pub fn cdf_estimate(c: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_c(c)?;
    if c - 0.5 < EDGE_GUARD {
        let t = c - 0.5;
        return Ok(Estimate {
            value: 2.0 * t - K1_VALUE * t.powi(3) / 3.0,
            err: t.powi(4) * 100.0,
        });
    }
    let (j, err, _) = imaginary_integral(2.0 * c, spec)?;
    Ok(Estimate { value: 0.5 - j.c0.im / PI, err: err / PI })
}

/// P(σ ≤ c).
pub fn cdf(c: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(cdf_estimate(c, spec)?.value)
}

/// Density of σ at c with its error estimate.
pub fn density_estimate(c: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    check_c(c)?;
    if c - 0.5 < EDGE_GUARD {
        return Ok(Estimate {
            value: density_asymptotic(c, Regime::NearHalf)?,
            err: (c - 0.5).powi(3) * 1000.0,
        });
    }
    let (j, _, err) = imaginary_integral(2.0 * c, spec)?;
    Ok(Estimate { value: -2.0 * j.c1.im / PI, err: 2.0 * err / PI })
}

/// Density of σ at c.
pub fn density(c: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(density_estimate(c, spec)?.value)
}

/// Partial integral ∫_{y0}^{1} Re(e^{−iy}/(y η_a(y))) dy, which diverges as y0 → 0.
pub fn real_part_partial_integral(c: f64, y0: f64) -> Result<f64> {
    check_c(c)?;
    if !(y0 > 0.0 && y0 < 1.0) {
        return domain("lower limit must lie in (0, 1)");
    }
    let a = Complex64::new(2.0 * c, 0.0);
    let mut failure = None;
    // substitute y = e^u to resolve the 1/y growth
    let r = gk_adaptive(
        |u| {
            let y = u.exp();
            match eta_generic(a, Complex64::new(y, 0.0)) {
                Ok(eta) => [((-I * y).exp() / eta).re],
                Err(e) => {
                    failure.get_or_insert(e);
                    [0.0]
                }
            }
        },
        y0.ln(),
        0.0,
        1e-12,
        1e-12,
        1_000_000,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    NearHalf,
    LargeC,
}

/// Leading behaviour of the density: 2 − K₁(c − 1/2)² near 1/2, K₂ c^{−3} for large c.
pub fn density_asymptotic(c: f64, regime: Regime) -> Result<f64> {
    match regime {
        Regime::NearHalf => {
            if !(c >= 0.5 && c < 0.6) {
                return domain("near-half expansion needs 1/2 ≤ c < 0.6");
            }
            Ok(2.0 - K1_VALUE * (c - 0.5).powi(2))
        }
        Regime::LargeC => {
            if !(c > 3.0) || !c.is_finite() {
                return domain("large-c expansion needs c > 3");
            }
            Ok(K2_VALUE / c.powi(3))
        }
    }
}

/// Quadrature curve of the CDF or density over a grid, evaluated in parallel.
pub fn quadrature_curve(
    grid: &[f64],
    density_curve: bool,
    spec: &QuadratureSpec,
) -> Result<CurveTable> {
    use rayon::prelude::*;
    let est: Vec<Estimate> = grid
        .par_iter()
        .map(|&c| {
            if density_curve {
                density_estimate(c, spec)
            } else {
                cdf_estimate(c, spec)
            }
        })
        .collect::<Result<_>>()?;
    CurveTable::new(
        grid.to_vec(),
        est.iter().map(|e| e.value).collect(),
        Method::Quadrature,
        est.iter().map(|e| e.err).collect(),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_table_rejects_unsorted() {
        assert!(CurveTable::new(vec![1.0, 0.9], vec![0.0, 0.0], Method::Quadrature, vec![0.0; 2], None)
            .is_err());
        assert!(CurveTable::new(vec![1.0], vec![0.0], Method::MonteCarlo, vec![0.0], None).is_err());
    }

    #[test]
    fn asymptotic_guards() {
        assert_eq!(density_asymptotic(0.5, Regime::NearHalf).unwrap(), 2.0);
        assert!(density_asymptotic(0.7, Regime::NearHalf).is_err());
        assert!(density_asymptotic(2.0, Regime::LargeC).is_err());
    }
}
