//! Monte Carlo route: σ of a random Dirichlet series Σ T_j^{−2s} built from a Poisson
//! process, as the root of T₁^{−2σ} = Σ_{j≥2} T_j^{−2σ}.
//!
//! Explicit realizations ([`sample_poisson`], [`solve_sigma`]) keep every point up to a
//! horizon and replace the rest by its mean. Near σ = 1/2 that mean decays like
//! H^{1−2σ}, so the batch sampler uses a layered realization instead: exact points up to
//! `exact_horizon`, then geometric bins summarised by their count and the moments of
//! log(x/centre), which reproduce Σ x^{−2σ} through a short Taylor series in σ, and
//! finally the mean beyond `2^far_log2 / intensity`. Bins up to the resolution limit are
//! built from the same exact points, so the exact horizon only changes how a realization
//! is evaluated, not the realization itself.

use crate::error::{domain, no_convergence, Error, Result};
use crate::limit_distribution::{CurveTable, Method};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Streams per sample in the layered sampler: gaps, far-field counts and moments.
const STREAMS_PER_SAMPLE: u64 = 2;
/// Points closer than this (in units of 1/intensity) to the origin are not resolved.
const NEAR_LIMIT_LOG2: i32 = -40;
/// Resolution limit of exact points, in units of 1/intensity.
const RESOLVED_LOG2: i32 = 13;
/// Bins per octave below and above the resolution limit.
const NEAR_BINS_PER_OCTAVE: i32 = 64;
const FAR_BINS_PER_OCTAVE: i32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRealization {
    pub points: Vec<f64>,
    pub intensity: f64,
    pub horizon: f64,
    pub seed: u64,
    pub stream_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSample {
    pub sigma: f64,
    /// Mean contribution (relative to T₁^{−2σ}) of the points beyond the horizon.
    pub tail_correction: f64,
    pub horizon_used: f64,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Points of a Poisson process on (0, horizon] by cumulative exponential gaps.
pub fn sample_poisson(intensity: f64, horizon: f64, seed: u64, stream_id: u64) -> Result<PoissonRealization> {
    if !(intensity > 0.0 && horizon > 0.0) || !intensity.is_finite() || !horizon.is_finite() {
        return domain("intensity and horizon must be positive");
    }
    let mut r = rng(seed, stream_id);
    let mut points = Vec::new();
    let mut x = 0.0;
    loop {
        let gap: f64 = Exp1.sample(&mut r);
        x += gap / intensity;
        if x > horizon {
            break;
        }
        points.push(x);
    }
    Ok(PoissonRealization { points, intensity, horizon, seed, stream_id })
}

/// How [`solve_sigma_with`] decides that the horizon is too short.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailGuard {
    /// Mean tail beyond the horizon must stay below this fraction of T₁^{−2σ}.
    MeanTail(f64),
    /// Accept any horizon (deterministic point sets whose tail is exactly the mean).
    Off,
}

/// Monotone root of a continuously differentiable increasing function on (lo, ∞) that
/// tends to −∞ at `lo`: safeguarded Newton inside a bisection bracket.
fn increasing_root(
    f: impl Fn(f64) -> (f64, f64),
    lo: f64,
    start_hi: f64,
    tol: f64,
) -> Result<f64> {
    let mut lo = lo;
    let mut hi = start_hi;
    let mut grow = 0;
    while f(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::NoRoot("function stays negative".into()));
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (v, d) = f(x);
        if v == 0.0 {
            return Ok(x);
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / d;
        let next = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= tol * x.max(1.0) || hi - lo <= tol * hi {
            return Ok(next);
        }
        x = next;
    }
    no_convergence("root bracket did not close")
}

/// σ for an explicit realization, with the literal mean-tail guard of 1e−6.
pub fn solve_sigma(real: &PoissonRealization, sigma_hi: f64, tol: f64) -> Result<SigmaSample> {
    solve_sigma_with(real, sigma_hi, tol, TailGuard::MeanTail(1e-6))
}

/// Root of g(σ) = x₁^{−2σ} − Σ_{j≥2} x_j^{−2σ} − λH^{1−2σ}/(2σ − 1).
pub fn solve_sigma_with(
    real: &PoissonRealization,
    sigma_hi: f64,
    tol: f64,
    guard: TailGuard,
) -> Result<SigmaSample> {
    if real.points.len() < 2 {
        return Err(Error::NoRoot("need at least two points".into()));
    }
    let x1 = real.points[0];
    let logs: Vec<f64> = real.points[1..].iter().map(|x| (x / x1).ln()).collect();
    let lh = (real.horizon / x1).ln();
    let lam = real.intensity * x1;
    // h(σ) = 1 − Σ (x1/x_j)^{2σ} − tail, all scaled by x1^{2σ}
    let h = |s: f64| -> (f64, f64) {
        let mut v = 1.0;
        let mut d = 0.0;
        for &l in &logs {
            let e = (-2.0 * s * l).exp();
            v -= e;
            d += 2.0 * l * e;
        }
        let q = 2.0 * s - 1.0;
        let t = lam * ((1.0 - 2.0 * s) * lh).exp() / q;
        (v - t, d + t * (2.0 * lh + 2.0 / q))
    };
    let sigma = increasing_root(h, 0.5, sigma_hi.max(0.5 + 1e-9), tol)?;
    let q = 2.0 * sigma - 1.0;
    let tail = lam * ((1.0 - 2.0 * sigma) * lh).exp() / q;
    if let TailGuard::MeanTail(rel) = guard {
        if !(tail < rel) {
            return Err(Error::Horizon(format!(
                "mean tail {tail:.3e} of the leading term exceeds {rel:e} at σ = {sigma:.6}"
            )));
        }
    }
    Ok(SigmaSample { sigma, tail_correction: tail, horizon_used: real.horizon })
}

/// Exact and far-field settings of the layered sampler, in units of 1/intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayeredConfig {
    /// Points up to this many mean spacings are evaluated individually.
    pub exact_horizon: f64,
    /// Binned far field ends at 2^far_log2 mean spacings; its mean covers the rest.
    pub far_log2: i32,
    /// Bound on the standard deviation of σ caused by replacing the far tail by its mean.
    pub tail_sd_bound: f64,
}

impl Default for LayeredConfig {
    fn default() -> Self {
        LayeredConfig { exact_horizon: 512.0, far_log2: 50, tail_sd_bound: 1e-6 }
    }
}

/// A summarised group of points: Σ_{x in bin} (x/T₁)^{−2σ} = e^{−2σ c}(n − 2σ s1 + 2σ² s2
/// − (4/3)σ³ s3 + (2/3)σ⁴ s4), with c = log(centre/T₁) and s_k = Σ log(x/centre)^k.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BinMoments {
    c: f64,
    n: f64,
    s: [f64; 4],
}

/// Layered representation of one realization, scaled so that T₁ = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredRealization {
    pub intensity: f64,
    pub first_point: f64,
    /// log(T_j/T₁) for the exactly evaluated points j ≥ 2.
    exact_logs: Vec<f64>,
    bins: Vec<BinMoments>,
    /// log of the far limit over T₁.
    far_log: f64,
}

/// Moments E[u^k], k = 1..4, of u = log(x/centre) for x uniform on a bin with log-width w.
fn bin_shape_moments(w: f64) -> [f64; 4] {
    let h = 0.5 * w;
    let (nodes, weights) = crate::quadrature::gauss_legendre(24);
    let mut num = [0.0; 4];
    let mut den = 0.0;
    for (x, wt) in nodes.iter().zip(&weights) {
        let u = h * x;
        let d = wt * u.exp();
        den += d;
        let mut p = 1.0;
        for m in num.iter_mut() {
            p *= u;
            *m += d * p;
        }
    }
    num.map(|m| m / den)
}

fn bin_of(x: f64, per_octave: i32) -> i64 {
    (x.log2() * per_octave as f64).floor() as i64
}

/// Draws one layered realization.
pub fn sample_layered(intensity: f64, seed: u64, index: u64, cfg: &LayeredConfig) -> Result<LayeredRealization> {
    if !(intensity > 0.0) || !intensity.is_finite() {
        return domain("intensity must be positive");
    }
    if !(cfg.exact_horizon > 0.0) || cfg.far_log2 <= RESOLVED_LOG2 {
        return domain("need a positive exact horizon and far_log2 above the resolution limit");
    }
    // work in units where the intensity is 1; σ is scale invariant
    let mut gaps = rng(seed, STREAMS_PER_SAMPLE * index);
    let resolved = 2f64.powi(RESOLVED_LOG2);
    let near = 2f64.powi(NEAR_LIMIT_LOG2);
    let mut points = Vec::new();
    let mut x = 0.0;
    loop {
        let g: f64 = Exp1.sample(&mut gaps);
        x += g;
        if x > resolved {
            break;
        }
        if x >= near {
            points.push(x);
        }
    }
    if points.is_empty() {
        return Err(Error::NoRoot("no points below the resolution limit".into()));
    }
    let t1 = points[0];
    let lt1 = t1.ln();
    let mut exact_logs = Vec::new();
    let mut bins: Vec<BinMoments> = Vec::new();
    let mut current: Option<(i64, BinMoments)> = None;
    let near_w = std::f64::consts::LN_2 / NEAR_BINS_PER_OCTAVE as f64;
    for &p in &points[1..] {
        if p <= cfg.exact_horizon {
            exact_logs.push(p.ln() - lt1);
            continue;
        }
        let k = bin_of(p, NEAR_BINS_PER_OCTAVE);
        let centre_log = (k as f64 + 0.5) * near_w;
        if current.map(|(ck, _)| ck) != Some(k) {
            if let Some((_, b)) = current.take() {
                bins.push(b);
            }
            current = Some((k, BinMoments { c: centre_log - lt1, n: 0.0, s: [0.0; 4] }));
        }
        let b = &mut current.as_mut().expect("bin open").1;
        let u = p.ln() - centre_log;
        b.n += 1.0;
        let mut pw = 1.0;
        for s in b.s.iter_mut() {
            pw *= u;
            *s += pw;
        }
    }
    if let Some((_, b)) = current.take() {
        bins.push(b);
    }
    // far field: Poisson counts per bin, log-moments from the CLT
    let mut far = rng(seed, STREAMS_PER_SAMPLE * index + 1);
    let far_w = std::f64::consts::LN_2 / FAR_BINS_PER_OCTAVE as f64;
    let shape = bin_shape_moments(far_w);
    let var1 = shape[1] - shape[0] * shape[0];
    let k_lo = RESOLVED_LOG2 as i64 * FAR_BINS_PER_OCTAVE as i64;
    let k_hi = cfg.far_log2 as i64 * FAR_BINS_PER_OCTAVE as i64;
    for k in k_lo..k_hi {
        let lo = (k as f64 * far_w).exp();
        let hi = ((k + 1) as f64 * far_w).exp();
        let mean = hi - lo;
        let n = if mean < 1e6 {
            Poisson::new(mean).map_err(|e| Error::Domain(e.to_string()))?.sample(&mut far)
        } else {
            let z: f64 = StandardNormal.sample(&mut far);
            (mean + mean.sqrt() * z).round().max(0.0)
        };
        let z: f64 = StandardNormal.sample(&mut far);
        if n == 0.0 {
            continue;
        }
        let s1 = n * shape[0] + (n * var1).sqrt() * z;
        bins.push(BinMoments {
            c: (k as f64 + 0.5) * far_w - lt1,
            n,
            s: [s1, n * shape[1], n * shape[2], n * shape[3]],
        });
    }
    Ok(LayeredRealization {
        intensity,
        first_point: t1 / intensity,
        exact_logs,
        bins,
        far_log: cfg.far_log2 as f64 * std::f64::consts::LN_2 - lt1,
    })
}

impl LayeredRealization {
    /// h(σ) = 1 − Σ_{j≥2}(T₁/T_j)^{2σ} − (mean beyond the far limit), and h'(σ).
    fn h(&self, s: f64) -> (f64, f64) {
        let mut v = 1.0;
        let mut d = 0.0;
        for &l in &self.exact_logs {
            let e = (-2.0 * s * l).exp();
            v -= e;
            d += 2.0 * l * e;
        }
        for b in &self.bins {
            let e = (-2.0 * s * b.c).exp();
            let [s1, s2, s3, s4] = b.s;
            let poly = b.n - 2.0 * s * s1 + 2.0 * s * s * s2 - 4.0 / 3.0 * s.powi(3) * s3
                + 2.0 / 3.0 * s.powi(4) * s4;
            let dpoly = -2.0 * s1 + 4.0 * s * s2 - 4.0 * s * s * s3 + 8.0 / 3.0 * s.powi(3) * s4;
            v -= e * poly;
            d += 2.0 * b.c * e * poly - e * dpoly;
        }
        // mean beyond the far limit; in units of T₁ the density of points is T₁·intensity
        let scale = self.first_point * self.intensity;
        let q = 2.0 * s - 1.0;
        let tail = scale * (self.far_log * (1.0 - 2.0 * s)).exp() / q;
        (v - tail, d + tail * (2.0 * self.far_log + 2.0 / q))
    }

    fn tail_sd(&self, s: f64) -> f64 {
        let scale = self.first_point * self.intensity;
        let q = 4.0 * s - 1.0;
        (scale * (self.far_log * (1.0 - 4.0 * s)).exp() / q).sqrt()
    }

    /// σ for this realization; errors if the far-field fluctuation could move it by more
    /// than the configured bound.
    pub fn solve(&self, tol: f64, cfg: &LayeredConfig) -> Result<SigmaSample> {
        let sigma = increasing_root(|s| self.h(s), 0.5, 2.0, tol)?;
        let (_, d) = self.h(sigma);
        let shift = self.tail_sd(sigma) / d;
        if !(shift < cfg.tail_sd_bound) {
            return Err(Error::Horizon(format!(
                "far-field fluctuation may move σ = {sigma:.6} by {shift:.2e}"
            )));
        }
        let scale = self.first_point * self.intensity;
        let tail = scale * (self.far_log * (1.0 - 2.0 * sigma)).exp() / (2.0 * sigma - 1.0);
        Ok(SigmaSample {
            sigma,
            tail_correction: tail,
            horizon_used: self.far_log.exp() * self.first_point,
        })
    }
}

/// σ for sample `index`, doubling the far field (up to 6 times) on a horizon failure.
pub fn sample_sigma(intensity: f64, seed: u64, index: u64, cfg: &LayeredConfig) -> Result<SigmaSample> {
    let mut c = *cfg;
    let mut last = None;
    for _ in 0..=6 {
        let real = sample_layered(intensity, seed, index, &c)?;
        match real.solve(1e-13, &c) {
            Err(Error::Horizon(m)) => {
                last = Some(m);
                c.far_log2 += 8;
            }
            other => return other,
        }
    }
    Err(Error::Horizon(last.unwrap_or_default()))
}

/// σ samples for indices 0..n, computed in parallel and returned in index order.
pub fn simulate_sigmas(n: usize, intensity: f64, seed: u64, cfg: &LayeredConfig) -> (Vec<f64>, usize) {
    let out: Vec<Option<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| sample_sigma(intensity, seed, i, cfg).ok().map(|s| s.sigma))
        .collect();
    let failed = out.iter().filter(|o| o.is_none()).count();
    (out.into_iter().flatten().collect(), failed)
}

/// Fraction of samples ≤ c at each grid point.
pub fn empirical_cdf_from(samples: &[f64], grid: &[f64], seed: u64) -> Result<CurveTable> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let values: Vec<f64> = grid
        .iter()
        .map(|c| sorted.partition_point(|s| s <= c) as f64 / n)
        .collect();
    // binomial standard error per point
    let errs = values.iter().map(|p| (p * (1.0 - p) / n).sqrt()).collect();
    CurveTable::new(grid.to_vec(), values, Method::MonteCarlo, errs, Some(seed))
}

/// Empirical CDF of σ over `c_grid` from `n_samples` layered realizations.
pub fn empirical_cdf(
    n_samples: usize,
    intensity: f64,
    base_horizon: f64,
    seed: u64,
    c_grid: &[f64],
) -> Result<CurveTable> {
    if n_samples < 1000 {
        return domain("need at least 1000 samples");
    }
    let cfg = LayeredConfig { exact_horizon: base_horizon * intensity, ..Default::default() };
    let (sigmas, failed) = simulate_sigmas(n_samples, intensity, seed, &cfg);
    if failed > 0 {
        return no_convergence(format!("{failed} of {n_samples} samples failed"));
    }
    empirical_cdf_from(&sigmas, c_grid, seed)
}

/// max |empirical − analytic| over a shared grid.
pub fn ks_distance(empirical: &CurveTable, analytic: &CurveTable) -> Result<f64> {
    if empirical.abscissae != analytic.abscissae {
        return Err(Error::GridMismatch(format!(
            "{} vs {} abscissae",
            empirical.abscissae.len(),
            analytic.abscissae.len()
        )));
    }
    Ok(empirical
        .values
        .iter()
        .zip(&analytic.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Kolmogorov–Smirnov statistic of a sample against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let v = x[i].min(y[j]);
        while i < x.len() && x[i] <= v {
            i += 1;
        }
        while j < y.len() && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let en = (n * m / (n + m)).sqrt();
    (d, kolmogorov_pvalue((en + 0.12 + 0.11 / en) * d))
}

/// P(K > λ) for the Kolmogorov distribution.
pub fn kolmogorov_pvalue(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let t = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { t } else { -t };
        if t < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Samples of Σ_{j≥2} T_j^{−a} given T₁ = δ (unit intensity): exact points on
/// (δ, δ + span] plus the mean (δ + span)^{1−a}/(a − 1) of the rest.
pub fn sample_conditional_sum(a: f64, delta: f64, n_samples: usize, seed: u64, span: f64) -> Result<Vec<f64>> {
    if !(a > 1.0 && delta > 0.0 && span > 0.0) {
        return domain("need a > 1, δ > 0 and a positive span");
    }
    let end = delta + span;
    let mean_tail = end.powf(1.0 - a) / (a - 1.0);
    let sd_tail = (end.powf(1.0 - 2.0 * a) / (2.0 * a - 1.0)).sqrt();
    let mean_total = delta.powf(1.0 - a) / (a - 1.0);
    if sd_tail > 1e-4 * mean_total {
        return Err(Error::Horizon(format!(
            "tail fluctuation {sd_tail:.2e} beyond {end} is not negligible"
        )));
    }
    Ok((0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(seed, i);
            let mut x = delta;
            let mut sum = 0.0;
            loop {
                let g: f64 = Exp1.sample(&mut r);
                x += g;
                if x > end {
                    break;
                }
                sum += x.powf(-a);
            }
            sum + mean_tail
        })
        .collect())
}

/// Monte Carlo summary written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub n_samples: usize,
    pub seed: u64,
    pub intensity: f64,
    pub c_grid: Vec<f64>,
    pub empirical_cdf: Vec<f64>,
    pub ks_vs_analytic: f64,
    pub failed_samples: usize,
    /// Set below 10³ samples, where the binomial error dwarfs any KS threshold.
    pub wide_uncertainty: bool,
}

/// Runs `n_samples` layered realizations and compares their CDF with `analytic` on its grid.
/// Unlike [`empirical_cdf`] this accepts small batches (flagged) and reports failed samples
/// instead of aborting.
pub fn monte_carlo_report(
    n_samples: usize,
    intensity: f64,
    seed: u64,
    analytic: &CurveTable,
    cfg: &LayeredConfig,
) -> Result<MonteCarloReport> {
    if n_samples == 0 {
        return domain("need at least one sample");
    }
    let (sigmas, failed) = simulate_sigmas(n_samples, intensity, seed, cfg);
    if sigmas.is_empty() {
        return no_convergence(format!("all {n_samples} samples failed"));
    }
    let empirical = empirical_cdf_from(&sigmas, &analytic.abscissae, seed)?;
    Ok(MonteCarloReport {
        n_samples,
        seed,
        intensity,
        c_grid: analytic.abscissae.clone(),
        ks_vs_analytic: ks_distance(&empirical, analytic)?,
        empirical_cdf: empirical.values,
        failed_samples: failed,
        wide_uncertainty: n_samples < 1000,
    })
}
