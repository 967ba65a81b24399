//! Real gamma, digamma and trigamma functions.

use crate::jet::{Field, Jet};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments; infinite at the nonpositive integers.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        if x == x.floor() {
            return f64::INFINITY;
        }
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, p) in LANCZOS.iter().enumerate().skip(1) {
        acc += p / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// Logarithm of |Γ(x)|.
pub fn ln_gamma_abs(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma_abs(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (k, p) in LANCZOS.iter().enumerate().skip(1) {
        acc += p / (x + k as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

pub fn digamma(mut x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        return digamma(1.0 - x) - PI / (PI * x).tan();
    }
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - series
}

pub fn trigamma(mut x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return PI * PI / (s * s) - trigamma(1.0 - x);
    }
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let series = 1.0 / x
        + r * (0.5
            + (1.0 / x)
                * (1.0 / 6.0
                    - r * (1.0 / 30.0 - r * (1.0 / 42.0 - r * (1.0 / 30.0 - r * 5.0 / 66.0)))));
    acc + series
}

/// Γ applied to a jet whose value is real.
pub fn gamma_jet(x: Jet) -> Jet {
    let x0 = x.c0.re;
    let g = gamma(x0);
    let p = digamma(x0);
    let t = trigamma(x0);
    x.compose(
        Complex64::new(g, 0.0),
        Complex64::new(g * p, 0.0),
        Complex64::new(g * (p * p + t), 0.0),
    )
}

/// Γ at a real-valued scalar of any [`Field`] type.
pub fn gamma_field<T: Field>(x: T) -> T {
    let x0 = x.val().re;
    let g = gamma(x0);
    if !T::CARRIES_DERIVATIVES {
        return T::re(g);
    }
    let p = digamma(x0);
    let t = trigamma(x0);
    x.apply(
        Complex64::new(g, 0.0),
        Complex64::new(g * p, 0.0),
        Complex64::new(g * (p * p + t), 0.0),
    )
}
