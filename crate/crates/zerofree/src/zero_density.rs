//! Zero densities of Dirichlet series f(s) = Σ_{j≤K} e^{−λ_j s}.
//!
//! With c_j = e^{−λ_j σ},
//! ν^{(K)}(σ) = (1/2π) [Σ_a λ_a² c_a² I₀ − Σ_{a≠b} λ_a λ_b c_a c_b I_{ab}],
//! where I₀ = ∫₀^∞ ∏_j J₀(c_j r) r dr and I_{ab} replaces the factors a, b by J₁.
//! All of these integrals share one pass over the nodes of a Gauss–Legendre panel rule on
//! [0, R]. R is chosen so that every c_j R is deep in the Hankel regime; beyond it each
//! factor is a finite sum of e^{±i c_j r} times a series in 1/r, and the tail is a sum of
//! ∫_R^∞ r^{−p} e^{iωr} dr, which are incomplete gamma functions.

use crate::error::{domain, no_convergence, Error, Result};
use crate::lattice_zeta::ShellSpectrum;
use crate::limit_distribution::{CurveTable, Estimate, Method, QuadratureSpec};
use crate::quadrature::{gk_adaptive, gl20};
use crate::special_functions::bessel::bessel_j01;
use crate::special_functions::incomplete_gamma::{tail_fraction, upper_incomplete_gamma, SERIES_RADIUS};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest c_j R at which the Hankel series replaces the Bessel factors.
const HANKEL_ARGUMENT: f64 = 24.0;
/// Terms kept in each Hankel series (in powers of 1/r).
const HANKEL_TERMS: usize = 28;
/// Largest K: the tail sums over 2^{K−1} frequency combinations.
pub const MAX_TERMS: usize = 16;
/// Cap on quadrature nodes for one set of integrals.
const MAX_NODES: usize = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExponentSource {
    Lattice,
    Poisson,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSequence {
    lambdas: Vec<f64>,
    pub source: ExponentSource,
}

impl ExponentSequence {
    pub fn new(lambdas: Vec<f64>, source: ExponentSource) -> Result<Self> {
        if lambdas.iter().any(|l| !l.is_finite()) {
            return domain("exponents must be finite");
        }
        if lambdas.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("exponents must be strictly increasing");
        }
        Ok(ExponentSequence { lambdas, source })
    }

    /// λ_j = 2 log p_j for the given positive integers.
    pub fn log_pairs(values: &[u64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| 2.0 * (v as f64).ln()).collect(), ExponentSource::Synthetic)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn shifted(&self, alpha: f64) -> Self {
        ExponentSequence { lambdas: self.lambdas.iter().map(|l| l + alpha).collect(), source: self.source }
    }

    /// Heuristic convergence abscissa of the infinite series these exponents truncate:
    /// max_j log(j)/λ_j over positive exponents. Finite sums converge everywhere.
    pub fn abscissa_guard(&self) -> f64 {
        self.lambdas
            .iter()
            .enumerate()
            .filter(|(_, l)| **l > 0.0)
            .map(|(j, l)| ((j + 1) as f64).ln() / l)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Which factors carry J₁: none, or the pair (a, b) with a < b.
pub type J1Pair = Option<(usize, usize)>;

fn hankel_coefficients(alpha: f64) -> [f64; HANKEL_TERMS] {
    let mu = 4.0 * alpha * alpha;
    let mut a = [0.0; HANKEL_TERMS];
    a[0] = 1.0;
    for k in 1..HANKEL_TERMS {
        let odd = (2 * k - 1) as f64;
        a[k] = a[k - 1] * (mu - odd * odd) / (8.0 * k as f64);
    }
    a
}

type Series = [Complex64; HANKEL_TERMS];

fn mul_series(x: &Series, y: &Series) -> Series {
    let mut out = [Complex64::new(0.0, 0.0); HANKEL_TERMS];
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().take(HANKEL_TERMS - i).enumerate() {
            out[i + j] += xi * yj;
        }
    }
    out
}

/// Power series of u/v for v with leading coefficient 1.
fn div_series(u: &Series, v: &Series) -> Series {
    let mut out = [Complex64::new(0.0, 0.0); HANKEL_TERMS];
    for k in 0..HANKEL_TERMS {
        let mut acc = u[k];
        for j in 1..=k {
            acc -= v[j] * out[k - j];
        }
        out[k] = acc / v[0];
    }
    out
}

/// ∫_R^∞ r^{−p} e^{iωr} dr for p > 1.
fn power_wave_tail(p: f64, omega: f64, r: f64) -> Result<Complex64> {
    let scale = r.powf(1.0 - p);
    let x = omega * r;
    if x == 0.0 {
        return Ok(Complex64::new(scale / (p - 1.0), 0.0));
    }
    let z = Complex64::new(0.0, -x);
    // ∫_1^∞ t^{−p} e^{−zt} dt = e^{−z} C(1 − p, z) = z^{p−1} Γ(1 − p, z)
    let t = if x.abs() > SERIES_RADIUS {
        (-z).exp() * tail_fraction(Complex64::new(1.0 - p, 0.0), z)?
    } else {
        (z.ln() * (p - 1.0)).exp() * upper_incomplete_gamma(1.0 - p, z)?
    };
    Ok(t * scale)
}

/// T(p₀ + m) for m < HANKEL_TERMS from one direct evaluation and the recurrence
/// p T(p + 1) = iω T(p) + R^{−p} e^{iωR}, run upward where p > |ωR| and downward below.
fn power_wave_tails(p0: f64, omega: f64, r: f64) -> Result<[Complex64; HANKEL_TERMS]> {
    let mut t = [Complex64::new(0.0, 0.0); HANKEL_TERMS];
    let x = omega * r;
    if x == 0.0 {
        for (m, v) in t.iter_mut().enumerate() {
            let p = p0 + m as f64;
            *v = Complex64::new(r.powf(1.0 - p) / (p - 1.0), 0.0);
        }
        return Ok(t);
    }
    let pivot = ((x.abs() - p0).ceil().max(0.0) as usize).min(HANKEL_TERMS - 1);
    t[pivot] = power_wave_tail(p0 + pivot as f64, omega, r)?;
    let i_omega = Complex64::new(0.0, omega);
    let edge = Complex64::from_polar(1.0, x);
    for m in pivot..HANKEL_TERMS - 1 {
        let p = p0 + m as f64;
        t[m + 1] = (i_omega * t[m] + edge * r.powf(-p)) / p;
    }
    for m in (0..pivot).rev() {
        let p = p0 + m as f64;
        t[m] = (t[m + 1] * p - edge * r.powf(-p)) / i_omega;
    }
    Ok(t)
}

/// Integrals ∫₀^∞ (∏_j J_{α_j}(c_j r)) r dr for several J₁ placements sharing the c_j.
pub fn bessel_product_integrals(coeffs: &[f64], patterns: &[J1Pair]) -> Result<Vec<Estimate>> {
    let k = coeffs.len();
    if k < 5 {
        return no_convergence(format!("K = {k}: Bessel products need at least 5 factors"));
    }
    if k > MAX_TERMS {
        return domain(format!("at most {MAX_TERMS} factors are supported"));
    }
    if coeffs.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
        return domain("coefficients must be positive");
    }
    for p in patterns.iter().flatten() {
        if !(p.0 < p.1 && p.1 < k) {
            return domain("J₁ pairs must be ordered indices below K");
        }
    }
    // r → r/c_max scales every integral by c_max^{−2}
    let cmax = coeffs.iter().cloned().fold(0.0, f64::max);
    let c: Vec<f64> = coeffs.iter().map(|x| x / cmax).collect();
    let cmin = c.iter().cloned().fold(f64::INFINITY, f64::min);
    let csum: f64 = c.iter().sum();
    let big_r = HANKEL_ARGUMENT / cmin;
    // a 20-point panel resolves a total phase of 8π to ~1e-17
    let width = 8.0 * PI / csum;
    let panels = (big_r / width).ceil() as usize;
    if panels * 20 > MAX_NODES {
        return no_convergence(format!(
            "coefficient ratio {:.3e} needs {} nodes",
            1.0 / cmin,
            panels * 20
        ));
    }
    let width = big_r / panels as f64;

    // finite part
    let (nodes, weights) = gl20();
    let mut head = vec![0.0; patterns.len()];
    let mut magnitude = 0.0;
    let mut j0 = vec![0.0; k];
    let mut j1 = vec![0.0; k];
    let masks: Vec<Vec<bool>> = patterns
        .iter()
        .map(|pat| (0..k).map(|j| matches!(pat, Some((a, b)) if *a == j || *b == j)).collect())
        .collect();
    for p in 0..panels {
        let lo = p as f64 * width;
        let half = 0.5 * width;
        for (x, w) in nodes.iter().zip(weights) {
            let r = lo + half * (x + 1.0);
            for j in 0..k {
                let (a, b) = bessel_j01(c[j] * r);
                j0[j] = a;
                j1[j] = b;
            }
            let wr = w * half * r;
            for (slot, mask) in head.iter_mut().zip(&masks) {
                let mut prod = 1.0;
                for j in 0..k {
                    prod *= if mask[j] { j1[j] } else { j0[j] };
                }
                *slot += wr * prod;
                magnitude += (wr * prod).abs();
            }
        }
    }

    // tail: J_α(x) = (2πx)^{−1/2} [u_α(x) e^{iχ} + conj(u_α(x)) e^{−iχ}],
    // u_α(x) = Σ i^m a_m(α) x^{−m}, χ = x − απ/2 − π/4
    let a0 = hankel_coefficients(0.0);
    let a1 = hankel_coefficients(1.0);
    let series = |a: &[f64; HANKEL_TERMS], cj: f64, eps: f64| -> Series {
        let mut s = [Complex64::new(0.0, 0.0); HANKEL_TERMS];
        let ie = Complex64::new(0.0, eps);
        let mut pw = Complex64::new(1.0, 0.0);
        for m in 0..HANKEL_TERMS {
            s[m] = pw * a[m];
            pw *= ie / cj;
        }
        s
    };
    // ratio series carry the extra phase e^{−iεπ/2} = −iε of a J₁ factor
    let mut base_by_sign = Vec::with_capacity(k);
    let mut ratio_by_sign = Vec::with_capacity(k);
    for &cj in &c {
        let mut b = Vec::new();
        let mut q = Vec::new();
        for eps in [1.0, -1.0] {
            let s0 = series(&a0, cj, eps);
            let mut s1 = series(&a1, cj, eps);
            for v in s1.iter_mut() {
                *v *= Complex64::new(0.0, -eps);
            }
            q.push(div_series(&s1, &s0));
            b.push(s0);
        }
        base_by_sign.push(b);
        ratio_by_sign.push(q);
    }
    let half_k = 0.5 * k as f64;
    let prefactor = (2.0 * PI).powf(-half_k) * c.iter().map(|x| x.powf(-0.5)).product::<f64>();
    let mut tail = vec![Complex64::new(0.0, 0.0); patterns.len()];
    let mut tail_last = 0.0;
    // ε₀ = +1; the mirrored combinations give complex conjugates
    for mask in 0..(1usize << (k - 1)) {
        let signs: Vec<usize> = (0..k).map(|j| if j > 0 && mask >> (j - 1) & 1 == 1 { 1 } else { 0 }).collect();
        let sgn = |j: usize| if signs[j] == 0 { 1.0 } else { -1.0 };
        let omega: f64 = (0..k).map(|j| sgn(j) * c[j]).sum();
        let phase_sum: f64 = (0..k).map(sgn).sum();
        let phase = Complex64::from_polar(1.0, -0.25 * PI * phase_sum);
        let mut base = base_by_sign[0][signs[0]];
        for j in 1..k {
            base = mul_series(&base, &base_by_sign[j][signs[j]]);
        }
        let waves = power_wave_tails(half_k - 1.0, omega, big_r)?;
        // Σ_m (base·q_a·q_b)[m] w[m] = Σ_n (base·q_a)[n] Σ_j q_b[j] w[n + j]
        let mut with_a: Vec<Option<Series>> = vec![None; k];
        let mut folded: Vec<Option<Series>> = vec![None; k];
        for pat in patterns.iter().flatten() {
            let (a, b) = *pat;
            if with_a[a].is_none() {
                with_a[a] = Some(mul_series(&base, &ratio_by_sign[a][signs[a]]));
            }
            if folded[b].is_none() {
                let q = &ratio_by_sign[b][signs[b]];
                let mut f = [Complex64::new(0.0, 0.0); HANKEL_TERMS];
                for (n, slot) in f.iter_mut().enumerate() {
                    for j in 0..HANKEL_TERMS - n {
                        *slot += q[j] * waves[n + j];
                    }
                }
                folded[b] = Some(f);
            }
        }
        let last_wave = waves[HANKEL_TERMS - 1].norm();
        for (slot, pat) in tail.iter_mut().zip(patterns) {
            let (acc, last) = match pat {
                None => (
                    base.iter().zip(&waves).map(|(x, w)| x * w).sum::<Complex64>(),
                    base[HANKEL_TERMS - 1].norm(),
                ),
                Some((a, b)) => {
                    let u = with_a[*a].as_ref().expect("filled above");
                    let f = folded[*b].as_ref().expect("filled above");
                    let q = &ratio_by_sign[*b][signs[*b]];
                    // leading-order size of the last product coefficient
                    let top = (0..HANKEL_TERMS).map(|n| (u[n] * q[HANKEL_TERMS - 1 - n]).norm()).sum::<f64>();
                    (u.iter().zip(f).map(|(x, w)| x * w).sum::<Complex64>(), top)
                }
            };
            tail_last = f64::max(tail_last, last * last_wave);
            *slot += phase * acc;
        }
    }
    let inv = 1.0 / (cmax * cmax);
    Ok(head
        .iter()
        .zip(&tail)
        .map(|(h, t)| Estimate {
            value: (h + 2.0 * prefactor * t.re) * inv,
            err: (2.0 * prefactor * tail_last * (1u64 << (k - 1)) as f64 + 1e-15 * magnitude) * inv,
        })
        .collect())
}

/// ∫₀^∞ (∏_j J_{α_j}(c_j r)) r dr with α_j = 1 exactly at `j1_positions` (0 or 2 indices).
pub fn bessel_product_integral(coeffs: &[f64], j1_positions: &[usize], _spec: &QuadratureSpec) -> Result<Estimate> {
    let pattern = match j1_positions {
        [] => None,
        [a, b] if a != b => Some(((*a).min(*b), (*a).max(*b))),
        _ => return domain("J₁ must sit at zero or two distinct positions"),
    };
    Ok(bessel_product_integrals(coeffs, &[pattern])?[0])
}

/// Terms with weight c_a c_b below this fraction of the largest are dropped.
const PAIR_PRUNE: f64 = 1e-16;

/// ν^{(K)}(σ) for the exponents given, with an error estimate.
pub fn nu_k_estimate(exponents: &ExponentSequence, sigma: f64, _spec: &QuadratureSpec) -> Result<Estimate> {
    let lam = exponents.lambdas();
    let k = lam.len();
    if k < 5 {
        return no_convergence(format!("K = {k}: ν needs at least 5 exponents"));
    }
    if !sigma.is_finite() {
        return domain("σ must be finite");
    }
    // c_j = e^{−λ_j σ}, scaled by the largest to avoid overflow; the sum is homogeneous
    // of degree 0 in the c_j because I scales like c^{−2}
    let logs: Vec<f64> = lam.iter().map(|l| -l * sigma).collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let c: Vec<f64> = logs.iter().map(|x| (x - top).exp()).collect();
    let mut patterns: Vec<J1Pair> = vec![None];
    let mut weights = vec![0.0];
    for a in 0..k {
        for b in a + 1..k {
            let w = c[a] * c[b];
            if w >= PAIR_PRUNE && lam[a] * lam[b] != 0.0 {
                patterns.push(Some((a, b)));
                weights.push(-2.0 * lam[a] * lam[b] * w);
            }
        }
    }
    weights[0] = (0..k).map(|a| lam[a] * lam[a] * c[a] * c[a]).sum();
    let ints = bessel_product_integrals(&c, &patterns)?;
    let mut value = 0.0;
    let mut err = 0.0;
    for (w, i) in weights.iter().zip(&ints) {
        value += w * i.value;
        err += (w * i.err).abs();
    }
    Ok(Estimate { value: value / (2.0 * PI), err: err / (2.0 * PI) })
}

/// ν^{(K)}(σ).
pub fn nu_k(exponents: &ExponentSequence, sigma: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(nu_k_estimate(exponents, sigma, spec)?.value)
}

/// Interval outside which ν^{(K)} vanishes: for σ above the right end the first term
/// outweighs all others together, below the left end the last one does, and f has no
/// zeros there.
pub fn nu_support(exponents: &ExponentSequence) -> Result<(f64, f64)> {
    let lam = exponents.lambdas();
    if lam.len() < 2 {
        return domain("need at least two exponents");
    }
    // g(σ) = log Σ_{j≠i} e^{−(λ_j − λ_i)σ}, increasing through 0 for i = K and decreasing
    // for i = 1
    let excess = |i: usize, s: f64| -> f64 {
        lam.iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, l)| (-(l - lam[i]) * s).exp())
            .sum::<f64>()
            .ln()
    };
    let root = |i: usize, sign: f64| -> f64 {
        // sign·g is increasing; bracket then bisect
        let g = |s: f64| sign * excess(i, s);
        let (mut lo, mut hi) = (-1.0, 1.0);
        while g(lo) > 0.0 {
            lo *= 2.0;
        }
        while g(hi) < 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let k = lam.len() - 1;
    Ok((root(k, 1.0), root(0, -1.0)))
}

/// ∫_{σ₁}^{σ₂} ν^{(K)}(σ) dσ: the expected number of zeros per unit height in the strip.
/// Tolerances are floored at 1e-8 absolute, 1e-7 relative.
pub fn h_frequency(exponents: &ExponentSequence, sigma1: f64, sigma2: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(sigma1 <= sigma2) {
        return domain("need σ₁ ≤ σ₂");
    }
    let (left, right) = nu_support(exponents)?;
    let (a, b) = (sigma1.max(left), sigma2.min(right));
    if a >= b {
        return Ok(0.0);
    }
    let mut cuts = vec![a];
    cuts.extend(collinear_points(exponents.lambdas(), a, b));
    cuts.push(b);
    let pieces = (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mut failure = None;
        // σ = w₀ + (w₁ − w₀)(3u² − 2u³) flattens the ω log|ω| behaviour at the cuts
        let len = w[1] - w[0];
        let r = gk_adaptive(
            |u| {
                let jac = 6.0 * u * (1.0 - u) * len;
                if jac == 0.0 {
                    return [0.0];
                }
                match nu_k(exponents, w[0] + len * u * u * (3.0 - 2.0 * u), spec) {
                    Ok(v) => [v * jac],
                    Err(e) => {
                        failure.get_or_insert(e);
                        [0.0]
                    }
                }
            },
            0.0,
            1.0,
            spec.abs_tol.max(1e-8) / pieces,
            spec.rel_tol.max(1e-7),
            spec.max_evals,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        total += r.value[0];
    }
    Ok(total)
}

/// σ in (a, b) where some signed sum Σ ±e^{−λ_j σ} vanishes. These are the points where
/// the terms can line up on a line through 0, and ν is not smooth there.
fn collinear_points(lam: &[f64], a: f64, b: f64) -> Vec<f64> {
    const GRID: usize = 512;
    let k = lam.len();
    let signed = |mask: usize, s: f64| -> f64 {
        (0..k)
            .map(|j| {
                let e = (-(lam[j] - lam[0]) * s).exp();
                if j > 0 && mask >> (j - 1) & 1 == 1 {
                    -e
                } else {
                    e
                }
            })
            .sum()
    };
    let mut out = Vec::new();
    for mask in 1..(1usize << (k - 1)) {
        let mut prev = (a, signed(mask, a));
        for i in 1..=GRID {
            let s = a + (b - a) * i as f64 / GRID as f64;
            let v = signed(mask, s);
            if prev.1 * v < 0.0 {
                let (mut lo, mut hi) = (prev.0, s);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if signed(mask, mid) * prev.1 > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = (s, v);
        }
    }
    out.retain(|x| *x > a + 1e-12 && *x < b - 1e-12);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCountResult {
    pub count: i64,
    /// (σ₁, σ₂, τ₁, τ₂) actually used, after any jitter of the τ bounds.
    pub rectangle: (f64, f64, f64, f64),
    pub winding_residual: f64,
}

fn dirichlet_value(lam: &[f64], s: Complex64) -> Complex64 {
    lam.iter().map(|l| (-s * l).exp()).sum()
}

/// Bound on |f'| over real parts in [a, b].
fn slope_bound(lam: &[f64], a: f64, b: f64) -> f64 {
    lam.iter().map(|l| l.abs() * (-l * a).exp().max((-l * b).exp())).sum::<f64>().max(1e-300)
}

/// Total change of arg f along the segment from `p` to `q`. A step is accepted when the
/// phase moves by less than π/8 over each of its halves, or when it is short enough that
/// |f| cannot drop by more than half (Lipschitz bound), which keeps f away from 0.
fn arg_change(lam: &[f64], p: Complex64, q: Complex64, floor: f64) -> Option<f64> {
    const MAX_TURN: f64 = PI / 8.0;
    let len = (q - p).norm();
    let dir = (q - p) / len;
    let mut t = 0.0;
    let mut f = dirichlet_value(lam, p);
    let mut total = 0.0;
    let mut step = len / 64.0;
    while t < len {
        if f.norm() < floor {
            return None;
        }
        let here = p + dir * t;
        step = step.min(len - t);
        let g = loop {
            let there = here + dir * step;
            let g = dirichlet_value(lam, there);
            let lip = slope_bound(lam, here.re.min(there.re), here.re.max(there.re));
            if step * lip <= 0.5 * f.norm() || step < len * 1e-13 {
                break g;
            }
            let m = dirichlet_value(lam, here + dir * (0.5 * step));
            if (m / f).arg().abs() < MAX_TURN && (g / m).arg().abs() < MAX_TURN && g.norm() >= floor {
                break g;
            }
            step *= 0.5;
        };
        t = if step >= len - t { len } else { t + step };
        total += (g / f).arg();
        f = g;
        step *= 2.0;
    }
    if f.norm() < floor {
        return None;
    }
    Some(total)
}

/// Number of zeros of Σ e^{−λ_j s} in (σ₁, σ₂) × (τ₁, τ₂) by the argument principle.
pub fn count_zeros_rectangle(
    exponents: &ExponentSequence,
    sigma1: f64,
    sigma2: f64,
    tau1: f64,
    tau2: f64,
) -> Result<ZeroCountResult> {
    let lam = exponents.lambdas();
    if lam.is_empty() {
        return domain("no exponents");
    }
    if !(sigma1 < sigma2 && tau1 < tau2) {
        return domain("degenerate rectangle");
    }
    let bound = |s: f64| lam.iter().map(|l| (-l * s).exp()).sum::<f64>();
    let floor = 1e-10 * bound(sigma1).min(bound(sigma2));
    const ATTEMPTS: usize = 5;
    for attempt in 0..ATTEMPTS {
        let jitter = attempt as f64 * 1e-3 * (tau2 - tau1).min(1.0);
        let (t1, t2) = (tau1 + jitter * 0.37, tau2 - jitter * 0.61);
        let corners = [
            Complex64::new(sigma1, t1),
            Complex64::new(sigma2, t1),
            Complex64::new(sigma2, t2),
            Complex64::new(sigma1, t2),
        ];
        let mut total = 0.0;
        let mut ok = true;
        for i in 0..4 {
            match arg_change(lam, corners[i], corners[(i + 1) % 4], floor) {
                Some(d) => total += d,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let turns = total / (2.0 * PI);
        let count = turns.round();
        return Ok(ZeroCountResult {
            count: count as i64,
            rectangle: (sigma1, sigma2, t1, t2),
            winding_residual: (turns - count).abs(),
        });
    }
    Err(Error::BoundaryZero(ATTEMPTS))
}

/// ν_L on a σ grid from the first K shells, each required to hold a single pair.
/// With `rescale = Some(n)` the curve is σ ↦ n² ν_L(nσ).
pub fn nu_for_lattice(
    spectrum: &ShellSpectrum,
    k: usize,
    sigma_grid: &[f64],
    rescale: Option<usize>,
    spec: &QuadratureSpec,
) -> Result<CurveTable> {
    if spectrum.shells.len() < k {
        return domain(format!("spectrum has {} shells, need {k}", spectrum.shells.len()));
    }
    if let Some(s) = spectrum.shells[..k].iter().find(|s| s.pairs != 1) {
        return Err(Error::DegenerateSpectrum(format!(
            "{} pairs share length {}",
            s.pairs, s.length
        )));
    }
    let lambdas: Vec<f64> = spectrum.shells[..k].iter().map(|s| 2.0 * s.length.ln()).collect();
    let seq = ExponentSequence::new(lambdas, ExponentSource::Lattice)?;
    let n = rescale.unwrap_or(1) as f64;
    let mut values = Vec::with_capacity(sigma_grid.len());
    let mut errs = Vec::with_capacity(sigma_grid.len());
    for &s in sigma_grid {
        let e = nu_k_estimate(&seq, n * s, spec)?;
        values.push(n * n * e.value);
        errs.push(n * n * e.err);
    }
    CurveTable::new(sigma_grid.to_vec(), values, Method::Quadrature, errs, None)
}
