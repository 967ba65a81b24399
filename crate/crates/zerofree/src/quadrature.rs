//! Quadrature primitives: Gauss–Legendre rules, adaptive Gauss–Kronrod for small
//! vector-valued integrands, and half-period summation of oscillatory tails with
//! repeated-averaging (Euler) acceleration.

use crate::error::{no_convergence, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Cached 20-point rule used for per-segment integration.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Fixed Gauss–Legendre integral of a vector-valued function over [a, b].
pub fn gl_fixed<const N: usize>(
    rule: &(Vec<f64>, Vec<f64>),
    a: f64,
    b: f64,
    f: &mut impl FnMut(f64) -> [f64; N],
) -> [f64; N] {
    let h = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [0.0; N];
    for (x, w) in rule.0.iter().zip(rule.1.iter()) {
        let v = f(mid + h * x);
        for k in 0..N {
            acc[k] += w * v[k];
        }
    }
    acc.map(|s| s * h)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<const N: usize>(f: &mut impl FnMut(f64) -> [f64; N], a: f64, b: f64) -> ([f64; N], f64) {
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];
    let fc = f(c);
    for k in 0..N {
        kron[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for k in 0..N {
            kron[k] += WGK[j] * (f1[k] + f2[k]);
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * (f1[k] + f2[k]);
            }
        }
    }
    let mut err = 0.0f64;
    for k in 0..N {
        kron[k] *= h;
        gauss[k] *= h;
        err = err.max((kron[k] - gauss[k]).abs());
    }
    (kron, err)
}

struct Piece<const N: usize> {
    a: f64,
    b: f64,
    val: [f64; N],
    err: f64,
}

impl<const N: usize> PartialEq for Piece<N> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<const N: usize> Eq for Piece<N> {}
impl<const N: usize> PartialOrd for Piece<N> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<const N: usize> Ord for Piece<N> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Result of an integration with its a-posteriori error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Integral<const N: usize> {
    pub value: [f64; N],
    pub err: f64,
}

/// Globally adaptive Gauss–Kronrod (7/15) integration of a vector-valued integrand.
/// The error is the largest componentwise estimate.
pub fn gk_adaptive<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_evals: usize,
) -> Result<Integral<N>> {
    let mut heap = BinaryHeap::new();
    let (v, e) = gk15(&mut f, a, b);
    heap.push(Piece { a, b, val: v, err: e });
    let mut evals = 15;
    loop {
        let mut total = [0.0; N];
        let mut err = 0.0;
        for p in heap.iter() {
            for k in 0..N {
                total[k] += p.val[k];
            }
            err += p.err;
        }
        let scale = total.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if err <= abs_tol.max(rel_tol * scale) {
            return Ok(Integral { value: total, err });
        }
        if evals >= max_evals {
            return no_convergence(format!(
                "adaptive quadrature on [{a}, {b}]: error {err:.3e} after {evals} evaluations"
            ));
        }
        let worst = heap.pop().expect("nonempty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // interval cannot be split further; accept its contribution
            heap.push(Piece { err: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, m);
        let (v2, e2) = gk15(&mut f, m, worst.b);
        evals += 30;
        heap.push(Piece { a: worst.a, b: m, val: v1, err: e1 });
        heap.push(Piece { a: m, b: worst.b, val: v2, err: e2 });
    }
}

/// Scalar convenience wrapper around [`gk_adaptive`].
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let r = gk_adaptive(|x| [f(x)], a, b, abs_tol, rel_tol, 2_000_000)?;
    Ok((r.value[0], r.err))
}

/// Repeated averaging of the trailing `depth + 1` partial sums (Euler transformation
/// for alternating series). Returns the accelerated value and the change between
/// the last two averaging levels.
pub fn euler_average<const N: usize>(partials: &[[f64; N]], depth: usize) -> ([f64; N], f64) {
    let depth = depth.min(partials.len().saturating_sub(1)).max(1);
    let mut row: Vec<[f64; N]> = partials[partials.len() - depth - 1..].to_vec();
    let mut prev_last = row[row.len() - 1];
    while row.len() > 1 {
        prev_last = row[row.len() - 1];
        row = row
            .windows(2)
            .map(|w| {
                let mut m = [0.0; N];
                for k in 0..N {
                    m[k] = 0.5 * (w[0][k] + w[1][k]);
                }
                m
            })
            .collect();
    }
    let v = row[0];
    let err = (0..N).fold(0.0f64, |m, k| m.max((v[k] - prev_last[k]).abs()));
    (v, err)
}

/// Settings for half-period summation of oscillatory tails.
#[derive(Debug, Clone, Copy)]
pub struct OscillatorySpec {
    /// Number of half-periods summed before acceleration.
    pub segments: usize,
    /// Averaging depth of the Euler transformation.
    pub depth: usize,
    /// Length of one half-period.
    pub half_period: f64,
}

impl Default for OscillatorySpec {
    fn default() -> Self {
        OscillatorySpec { segments: 48, depth: 8, half_period: PI }
    }
}

/// ∫_start^∞ f for an integrand that oscillates with the given half-period and a smooth
/// decaying envelope. Each half-period is integrated with a 20-point Gauss rule; the
/// partial sums are accelerated by repeated averaging.
pub fn oscillatory_tail<const N: usize>(
    mut f: impl FnMut(f64) -> [f64; N],
    start: f64,
    spec: &OscillatorySpec,
) -> Integral<N> {
    let rule = gl20();
    let mut partials = Vec::with_capacity(spec.segments);
    let mut acc = [0.0; N];
    for k in 0..spec.segments {
        let a = start + k as f64 * spec.half_period;
        let seg = gl_fixed(rule, a, a + spec.half_period, &mut f);
        for j in 0..N {
            acc[j] += seg[j];
        }
        partials.push(acc);
    }
    let (value, err) = euler_average(&partials, spec.depth);
    Integral { value, err }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((s - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let (v, _) = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-13, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn sine_integral_tail() {
        // ∫_π^∞ sin(y)/y dy = π/2 − Si(π)
        let si_pi = 1.851_937_051_982_466_2;
        let r = oscillatory_tail(|y| [y.sin() / y], PI, &OscillatorySpec::default());
        assert!((r.value[0] - (PI / 2.0 - si_pi)).abs() < 1e-12, "{:?}", r);
    }
}
