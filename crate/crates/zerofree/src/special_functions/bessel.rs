//! Bessel functions J₀ and J₁ of nonnegative real argument.

use std::f64::consts::PI;
use std::sync::OnceLock;

const SERIES_MAX: f64 = 8.0;
const HANKEL_MIN: f64 = 25.0;
const TRAPEZOID_POINTS: usize = 96;

/// J_order(x) for order 0 or 1 and x ≥ 0.
pub fn bessel_j(order: u32, x: f64) -> f64 {
    debug_assert!(order <= 1 && x >= 0.0);
    if x <= SERIES_MAX {
        series(order, x)
    } else if x < HANKEL_MIN {
        trapezoid(order, x)
    } else {
        hankel(order, x)
    }
}

/// J₀ and J₁ together.
pub fn bessel_j01(x: f64) -> (f64, f64) {
    if x >= HANKEL_MIN {
        hankel_pair(x)
    } else if x > SERIES_MAX {
        trapezoid_pair(x)
    } else {
        (series(0, x), series(1, x))
    }
}

fn series(order: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = if order == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let nu = order as f64;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && kf > 0.5 * x {
            break;
        }
    }
    sum
}

/// Trapezoid rule on J_n(x) = (1/2π)∫₀^{2π} cos(nτ − x sin τ) dτ, spectrally accurate.
fn trapezoid(order: u32, x: f64) -> f64 {
    let n = TRAPEZOID_POINTS;
    let nu = order as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let t = 2.0 * PI * k as f64 / n as f64;
        sum += (nu * t - x * t.sin()).cos();
    }
    sum / n as f64
}

fn sines() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..TRAPEZOID_POINTS)
            .map(|k| (2.0 * PI * k as f64 / TRAPEZOID_POINTS as f64).sin())
            .collect()
    })
}

/// Both orders from one trapezoid pass: J₀ = ⟨cos(x sin τ)⟩, J₁ = ⟨sin τ sin(x sin τ)⟩.
fn trapezoid_pair(x: f64) -> (f64, f64) {
    let (mut a, mut b) = (0.0, 0.0);
    for &st in sines() {
        let (s, c) = (x * st).sin_cos();
        a += c;
        b += st * s;
    }
    let n = TRAPEZOID_POINTS as f64;
    (a / n, b / n)
}

fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        // a_k i^k: real parts for even k (signs alternate), imaginary for odd k
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel(order: u32, x: f64) -> f64 {
    let nu = order as f64;
    let (p, q) = hankel_pq(nu, x);
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn hankel_pair(x: f64) -> (f64, f64) {
    let (p0, q0) = hankel_pq(0.0, x);
    let (p1, q1) = hankel_pq(1.0, x);
    let (s, c) = (x - 0.25 * PI).sin_cos();
    let amp = (2.0 / (PI * x)).sqrt();
    // χ₁ = χ₀ − π/2: cos χ₁ = sin χ₀, sin χ₁ = −cos χ₀
    (amp * (p0 * c - q0 * s), amp * (p1 * s + q1 * c))
}
