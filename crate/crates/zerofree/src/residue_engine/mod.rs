//! Distribution of σ as residue series over the zeros ζ_n of η_a:
//! P(σ > c) = Σ_n a e^{−2iζ_n}, f(c) = 2 Σ_n e^{−2iζ_n}(2ai dζ_n/da − 1), a = 2c,
//! folded over the symmetry ζ_{−n} = −conj ζ_n.

mod cache;
mod poles;

pub use cache::{read_table_csv, write_table_csv, PoleCache, ALGORITHM_VERSION, CSV_HEADER};
pub use poles::{
    contour_residue, curve_abscissa_at_depth, dzeta_da, find_pole, gamma_curve_point,
    guess_depth, in_strip, initial_pole_guess, log_gamma_scale, refine_pole, residue_check,
    scaled_residual, zero_pole, PoleRecord, RESIDUAL_TARGET,
};

use crate::error::{domain, Error, Result};
use crate::limit_distribution::Estimate;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Truncation used when none is given.
pub const DEFAULT_N_MAX: u32 = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleTable {
    pub a: f64,
    pub n_max: u32,
    /// ζ₀, ζ₁, …, ζ_{n_max}.
    pub records: Vec<PoleRecord>,
}

impl PoleTable {
    pub fn validate(&self) -> Result<()> {
        if self.records.len() != self.n_max as usize + 1 {
            return Err(Error::PoleTable(format!(
                "expected {} records, found {}",
                self.n_max + 1,
                self.records.len()
            )));
        }
        for (k, r) in self.records.iter().enumerate() {
            if r.n != k as i64 || r.a != self.a {
                return Err(Error::PoleTable(format!("record {k} is out of order")));
            }
            if !(r.residual < 1e-12) {
                return Err(Error::PoleTable(format!("pole {k} has residual {:e}", r.residual)));
            }
        }
        Ok(())
    }
}

/// Poles ζ₀ … ζ_{n_max} for one a, refined in parallel.
pub fn pole_table(a: f64, n_max: u32) -> Result<PoleTable> {
    if !(a > 1.0) {
        return domain("a must exceed 1");
    }
    let records = (0..=n_max).into_par_iter().map(|n| find_pole(a, n)).collect::<Result<Vec<_>>>()?;
    Ok(PoleTable { a, n_max, records })
}

/// Pole tables along an increasing grid of a. Each pole is warm-started from its value
/// at the previous grid point; the asymptotic guess is the fallback.
pub fn pole_sweep(a_grid: &[f64], n_max: u32) -> Result<Vec<PoleTable>> {
    if a_grid.iter().any(|a| !(*a > 1.0)) {
        return domain("every a must exceed 1");
    }
    let per_n: Vec<Vec<PoleRecord>> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut out = Vec::with_capacity(a_grid.len());
            let mut prev: Option<Complex64> = None;
            for &a in a_grid {
                let rec = match (n, prev) {
                    (0, _) => zero_pole(a)?,
                    (_, Some(z)) => refine_pole(a, n as i64, z).or_else(|_| find_pole(a, n))?,
                    (_, None) => find_pole(a, n)?,
                };
                prev = Some(rec.zeta);
                out.push(rec);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(a_grid
        .iter()
        .enumerate()
        .map(|(i, &a)| PoleTable { a, n_max, records: per_n.iter().map(|v| v[i]).collect() })
        .collect())
}

/// Folded residue terms: (a e^{−2iζ_n}, e^{−2iζ_n}(2ai ζ_n' − 1)) for one pole.
fn terms(r: &PoleRecord) -> (Complex64, Complex64) {
    let e = (-2.0 * I * r.zeta).exp();
    (r.a * e, e * (2.0 * r.a * I * r.dzeta_da - 1.0))
}

/// Sum over |n| ≤ n_max and an estimate of the omitted tail, for both series.
fn residue_sums(table: &PoleTable) -> Result<([f64; 2], [f64; 2])> {
    table.validate()?;
    let mut sum = [0.0; 2];
    let mut last = Vec::new();
    for r in &table.records {
        let (p, f) = terms(r);
        let w = if r.n == 0 { 1.0 } else { 2.0 };
        sum[0] += w * p.re;
        sum[1] += w * 2.0 * f.re;
        last.push([w * p.re, w * 2.0 * f.re]);
    }
    let tail = tail_estimate(table.a, &last);
    Ok(([sum[0] + tail[0], sum[1] + tail[1]], tail.map(f64::abs)))
}

/// Σ_{n > N} of terms decaying like n^{−p}, p = 2(1 + 1/a), fitted to the last terms.
fn tail_estimate(a: f64, terms: &[[f64; 2]]) -> [f64; 2] {
    let n = terms.len() - 1;
    if n < 8 {
        return [0.0; 2];
    }
    let p = 2.0 * (1.0 + 1.0 / a);
    let nf = n as f64;
    // Σ_{m>n} (m/n)^{−p} ≈ ∫_{n+1/2}^∞ (x/n)^{−p} dx
    let factor = nf.powf(p) * (nf + 0.5).powf(1.0 - p) / (p - 1.0);
    [terms[n][0] * factor, terms[n][1] * factor]
}

/// P(σ > c) from the residue series truncated at |n| ≤ n_max.
pub fn prob_tail_from_table(table: &PoleTable) -> Result<Estimate> {
    let (v, e) = residue_sums(table)?;
    Ok(Estimate { value: v[0], err: e[0] })
}

/// Density of σ at c = a/2 from the residue series.
pub fn density_from_table(table: &PoleTable) -> Result<Estimate> {
    let (v, e) = residue_sums(table)?;
    Ok(Estimate { value: v[1], err: e[1] })
}

pub fn prob_tail_residue(c: f64, n_max: u32) -> Result<Estimate> {
    prob_tail_from_table(&pole_table(2.0 * c, n_max)?)
}

pub fn density_residue(c: f64, n_max: u32) -> Result<Estimate> {
    density_from_table(&pole_table(2.0 * c, n_max)?)
}
