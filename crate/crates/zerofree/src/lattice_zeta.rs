//! Concrete lattices: primitive shell spectra, truncated Epstein zeta sums and the
//! abscissa σ̃_L, the root σ > n/2 of 2 m(L)^{−2σ} = Σ_{v∈L̂} |v|^{−2σ}, where L̂ holds
//! one vector from each ± pair of primitive vectors.

use crate::error::{domain, no_convergence, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use crate::special_functions::gamma::gamma;
use crate::special_functions::incomplete_gamma::{tail_fraction, upper_incomplete_gamma, SERIES_RADIUS};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Relative tolerance for merging vector lengths into one shell.
pub const SHELL_TOLERANCE: f64 = 1e-9;
/// Enumeration gives up beyond this many primitive pairs.
pub const MAX_PAIRS: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeBasis {
    pub dimension: usize,
    /// Basis vectors as rows.
    pub rows: Vec<Vec<f64>>,
    pub normalized: bool,
}

fn determinant(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("nonempty");
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            for j in col..n {
                m[i][j] -= f * m[col][j];
            }
        }
    }
    det
}

impl LatticeBasis {
    /// Checks shape and nonsingularity; `normalized` records whether |det| = 1.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return domain("dimension must be at least 2");
        }
        if rows.iter().any(|r| r.len() != n || r.iter().any(|x| !x.is_finite())) {
            return domain("basis must be a finite square matrix");
        }
        let det = determinant(&rows);
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(Error::SingularBasis);
        }
        let scale = rows.iter().map(|r| r.iter().map(|x| x * x).sum::<f64>().sqrt()).product::<f64>();
        if det.abs() < 1e-14 * scale {
            return Err(Error::SingularBasis);
        }
        Ok(LatticeBasis { dimension: n, rows, normalized: (det.abs() - 1.0).abs() <= 1e-12 })
    }

    pub fn determinant(&self) -> f64 {
        determinant(&self.rows)
    }

    /// Integer combination Σ x_i row_i.
    pub fn vector(&self, coords: &[i64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dimension];
        for (c, row) in coords.iter().zip(&self.rows) {
            for (vi, r) in v.iter_mut().zip(row) {
                *vi += *c as f64 * r;
            }
        }
        v
    }
}

/// Rows scaled by |det|^{−1/n}.
pub fn normalize_covolume(basis: &LatticeBasis) -> Result<LatticeBasis> {
    let det = basis.determinant();
    if det == 0.0 {
        return Err(Error::SingularBasis);
    }
    let scale = det.abs().powf(-1.0 / basis.dimension as f64);
    let rows = basis.rows.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut out = LatticeBasis::new(rows)?;
    out.normalized = true;
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LLL reduction (δ = 0.99) of the rows.
fn lll_reduce(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut b = rows.to_vec();
    let gram_schmidt = |b: &Vec<Vec<f64>>| -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut bs: Vec<Vec<f64>> = Vec::with_capacity(n);
        let mut mu = vec![vec![0.0; n]; n];
        for i in 0..n {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = dot(&b[i], &bs[j]) / dot(&bs[j], &bs[j]);
                for (vk, bk) in v.iter_mut().zip(&bs[j]) {
                    *vk -= mu[i][j] * bk;
                }
            }
            bs.push(v);
        }
        (bs, mu)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(&b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= q * y;
                }
            }
        }
        let (bs, mu) = gram_schmidt(&b);
        let lhs = dot(&bs[k], &bs[k]);
        let rhs = (0.99 - mu[k][k - 1] * mu[k][k - 1]) * dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Lattice vectors grouped by length, counting primitive ± pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub length: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellSpectrum {
    pub shells: Vec<Shell>,
    pub m_l: f64,
    pub cutoff_radius: f64,
    pub dimension: usize,
}

impl ShellSpectrum {
    /// Σ over primitive pairs of |v|^{−2σ}.
    pub fn primitive_sum(&self, sigma: f64) -> f64 {
        // smallest terms first
        self.shells.iter().rev().map(|s| s.pairs as f64 * s.length.powf(-2.0 * sigma)).sum()
    }
}

/// Squared lengths of the nonzero vectors (one per ± pair) with |v| ≤ radius, by
/// Fincke–Pohst enumeration over an LLL-reduced basis; optionally primitive ones only.
fn pair_norms(basis: &LatticeBasis, radius: f64, primitive: bool) -> Result<Vec<f64>> {
    let n = basis.dimension;
    let b = lll_reduce(&basis.rows);
    // Gram–Schmidt data of the reduced basis
    let mut bs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &bs[j]) / dot(&bs[j], &bs[j]);
            for (vk, bk) in v.iter_mut().zip(&bs[j]) {
                *vk -= mu[i][j] * bk;
            }
        }
        bs.push(v);
    }
    let q: Vec<f64> = bs.iter().map(|v| dot(v, v)).collect();
    let r2 = radius * radius * (1.0 + 4.0 * SHELL_TOLERANCE);
    let mut out = Vec::new();
    let mut x = vec![0i64; n];
    // depth-first over coordinates from the last one down
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        level: usize,
        partial: f64,
        x: &mut Vec<i64>,
        mu: &[Vec<f64>],
        q: &[f64],
        r2: f64,
        b: &[Vec<f64>],
        primitive: bool,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        let n = q.len();
        let centre: f64 = -(level + 1..n).map(|j| x[j] as f64 * mu[j][level]).sum::<f64>();
        let span = ((r2 - partial) / q[level]).max(0.0).sqrt();
        let lo = (centre - span).ceil() as i64;
        let hi = (centre + span).floor() as i64;
        for xi in lo..=hi {
            x[level] = xi;
            let d = xi as f64 - centre;
            let p = partial + d * d * q[level];
            if p > r2 {
                continue;
            }
            if level == 0 {
                // one of ±v: first nonzero coordinate (from the top) positive
                let lead = x.iter().rev().find(|c| **c != 0);
                match lead {
                    Some(c) if *c > 0 => {}
                    _ => continue,
                }
                if primitive && x.iter().fold(0, |g, c| gcd(g, *c)) != 1 {
                    continue;
                }
                let mut v = vec![0.0; n];
                for (c, row) in x.iter().zip(b) {
                    for (vi, r) in v.iter_mut().zip(row) {
                        *vi += *c as f64 * r;
                    }
                }
                out.push(dot(&v, &v));
                if out.len() > MAX_PAIRS {
                    return Err(Error::Explosion(format!("more than {MAX_PAIRS} vector pairs")));
                }
            } else {
                recurse(level - 1, p, x, mu, q, r2, b, primitive, out)?;
            }
        }
        x[level] = 0;
        Ok(())
    }
    recurse(n - 1, 0.0, &mut x, &mu, &q, r2, &b, primitive, &mut out)?;
    Ok(out)
}

/// All primitive ± pairs with |v| ≤ radius, grouped into shells.
pub fn enumerate_shells(basis: &LatticeBasis, radius: f64) -> Result<ShellSpectrum> {
    if !(radius > 0.0) || !radius.is_finite() {
        return domain("radius must be positive");
    }
    let mut norms = pair_norms(basis, radius, true)?;
    norms.sort_by(f64::total_cmp);
    let mut shells: Vec<Shell> = Vec::new();
    for n2 in norms {
        let len = n2.sqrt();
        if len > radius * (1.0 + SHELL_TOLERANCE) {
            continue;
        }
        match shells.last_mut() {
            Some(s) if (len - s.length).abs() <= SHELL_TOLERANCE * s.length => s.pairs += 1,
            _ => shells.push(Shell { length: len, pairs: 1 }),
        }
    }
    let Some(first) = shells.first() else {
        return domain(format!("no lattice vectors within radius {radius}"));
    };
    Ok(ShellSpectrum { m_l: first.length, shells, cutoff_radius: radius, dimension: basis.dimension })
}

/// Length of the shortest nonzero vector, by expanding the search radius.
pub fn minimum_length(basis: &LatticeBasis) -> Result<f64> {
    let mut r = basis
        .rows
        .iter()
        .map(|v| dot(v, v).sqrt())
        .fold(f64::INFINITY, f64::min);
    // a basis vector bounds m(L) from above, so one pass suffices
    r *= 1.0 + 1e-9;
    Ok(enumerate_shells(basis, r)?.m_l)
}

const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// ζ(s) for real s > 1 by Euler–Maclaurin summation.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return domain(format!("ζ(s) needs s > 1, got {s}"));
    }
    const N: usize = 12;
    let nf = N as f64;
    let mut sum: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // Σ B_{2j}/(2j)! s(s+1)…(s+2j−2) N^{−s−2j+1}
    let mut rising = s;
    let mut pw = nf.powf(-s - 1.0);
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = c * rising * pw;
        sum += term;
        if term.abs() < 1e-17 * sum {
            break;
        }
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        pw /= nf * nf;
    }
    Ok(sum)
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    let h = 0.5 * n as f64;
    PI.powf(h) / gamma(h + 1.0)
}

/// Upper estimate for Σ_{|v|>R} |v|^{−2σ}: twice the continuum integral.
fn continuum_tail(n: usize, radius: f64, sigma: f64) -> f64 {
    let nf = n as f64;
    2.0 * nf * unit_ball_volume(n) * radius.powf(nf - 2.0 * sigma) / (2.0 * sigma - nf)
}

/// Largest radius tried by the truncation loops, in units of m(L).
const RADIUS_CAP: f64 = 4096.0;

/// E_n(L, σ) = 2 ζ(2σ) Σ_{v∈L̂} |v|^{−2σ}, truncated where the tail estimate falls below tol.
pub fn epstein_zeta_real(basis: &LatticeBasis, sigma: f64, tol: f64) -> Result<f64> {
    let n = basis.dimension;
    if !(sigma > 0.5 * n as f64) {
        return domain(format!("σ = {sigma} must exceed n/2 = {}", 0.5 * n as f64));
    }
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let m = minimum_length(basis)?;
    let mut r = 3.0 * m;
    while continuum_tail(n, r, sigma) > tol {
        r *= 1.5;
        if r > RADIUS_CAP * m {
            return Err(Error::Tail(format!(
                "tail at radius {r:.3e} still exceeds {tol:e} for σ = {sigma}"
            )));
        }
    }
    let spectrum = enumerate_shells(basis, r)?;
    Ok(2.0 * riemann_zeta(2.0 * sigma)? * spectrum.primitive_sum(sigma))
}

/// Rows of the dual basis, (B⁻¹)ᵀ.
pub fn dual_basis(basis: &LatticeBasis) -> Result<LatticeBasis> {
    let n = basis.dimension;
    // Gauss–Jordan on [B | I]
    let mut m: Vec<Vec<f64>> = basis
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("nonempty");
        if m[pivot][col] == 0.0 {
            return Err(Error::SingularBasis);
        }
        m.swap(pivot, col);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for i in 0..n {
            if i != col {
                let f = m[i][col];
                for j in 0..2 * n {
                    m[i][j] -= f * m[col][j];
                }
            }
        }
    }
    // inverse in columns n..2n; the dual rows are its columns
    let rows = (0..n).map(|j| (0..n).map(|i| m[i][n + j]).collect()).collect();
    LatticeBasis::new(rows)
}

/// Γ(a, x) x^{−a} for x > 0.
fn scaled_upper_gamma(a: f64, x: f64) -> Result<f64> {
    let z = Complex64::new(x, 0.0);
    if x > SERIES_RADIUS {
        Ok((-x).exp() * tail_fraction(Complex64::new(a, 0.0), z)?.re)
    } else {
        Ok(upper_incomplete_gamma(a, z)?.re * x.powf(-a))
    }
}

/// Z_L(σ) = Σ′ |v|^{−2σ} over all nonzero vectors, for σ > n/2, by the theta splitting
/// π^{−σ}Γ(σ) Z_L(σ) = Σ′_L G(σ, π|v|²) + V⁻¹ Σ′_{L*} G(n/2 − σ, π|w|²) − 1/σ + 1/(V(σ − n/2)),
/// G(a, x) = Γ(a, x) x^{−a}, V the covolume. Both sums are cut at |v| ≤ radius.
pub fn epstein_zeta_theta(basis: &LatticeBasis, sigma: f64, radius: f64) -> Result<f64> {
    let n = basis.dimension as f64;
    if !(sigma > 0.5 * n) {
        return domain(format!("σ = {sigma} must exceed n/2 = {}", 0.5 * n));
    }
    let vol = basis.determinant().abs();
    let direct = pair_norms(basis, radius, false)?;
    let dual = pair_norms(&dual_basis(basis)?, radius, false)?;
    let mut sum = 0.0;
    // smallest terms first
    let mut terms: Vec<f64> = Vec::with_capacity(direct.len() + dual.len());
    for r2 in direct {
        terms.push(2.0 * scaled_upper_gamma(sigma, PI * r2)?);
    }
    for r2 in dual {
        terms.push(2.0 * scaled_upper_gamma(0.5 * n - sigma, PI * r2)? / vol);
    }
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    for t in terms {
        sum += t;
    }
    sum += 1.0 / (vol * (sigma - 0.5 * n)) - 1.0 / sigma;
    Ok(sum * PI.powf(sigma) / gamma(sigma))
}

/// α(σ, L) = 2 m^{−2σ} − Z_L(σ)/(2ζ(2σ)) with Z_L from the theta splitting.
pub fn alpha_theta(basis: &LatticeBasis, m_l: f64, sigma: f64, radius: f64) -> Result<f64> {
    Ok(2.0 * m_l.powf(-2.0 * sigma) - epstein_zeta_theta(basis, sigma, radius)? / (2.0 * riemann_zeta(2.0 * sigma)?))
}

/// α(σ, L) = 2 m^{−2σ} − Σ_{v∈L̂} |v|^{−2σ} from a truncated spectrum, with the mean
/// density of primitive pairs, V_n r^n/(2ζ(n)), standing in beyond the cutoff.
pub fn alpha_function(spectrum: &ShellSpectrum, sigma: f64) -> Result<f64> {
    let n = spectrum.dimension as f64;
    let r = spectrum.cutoff_radius;
    let tail = n * unit_ball_volume(spectrum.dimension) * r.powf(n - 2.0 * sigma)
        / (2.0 * riemann_zeta(n)? * (2.0 * sigma - n));
    Ok(2.0 * spectrum.m_l.powf(-2.0 * sigma) - spectrum.primitive_sum(sigma) - tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaTilde {
    pub sigma_tilde: f64,
    pub m_l: f64,
    pub shells_used: usize,
    pub radius: f64,
    pub radius_rounds: usize,
}

fn alpha_root(alpha: impl Fn(f64) -> Result<f64>, n: f64, tol: f64) -> Result<f64> {
    let mut lo = 0.5 * n;
    let mut hi = n;
    let mut grow = 0;
    while alpha(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 20 {
            return Err(Error::NoRoot("α stays negative".into()));
        }
    }
    // α → −∞ as σ → n/2⁺
    while hi - lo > tol * 0.01 * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if alpha(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root of α from the shell spectrum alone (truncated sum plus mean primitive density
/// beyond the cutoff). Converges slowly in the cutoff; see [`sigma_tilde`].
pub fn sigma_tilde_truncated(spectrum: &ShellSpectrum, tol: f64) -> Result<f64> {
    if spectrum.shells[0].pairs > 1 {
        return Err(Error::MultipleMinima { pairs: spectrum.shells[0].pairs });
    }
    alpha_root(|s| alpha_function(spectrum, s), spectrum.dimension as f64, tol)
}

/// Root of α with Z_L from the theta splitting cut at `radius`.
pub fn sigma_tilde_at_radius(basis: &LatticeBasis, radius: f64, tol: f64) -> Result<f64> {
    let m = minimum_length(basis)?;
    let first = enumerate_shells(basis, m * (1.0 + 1e-6))?;
    if first.shells[0].pairs > 1 {
        return Err(Error::MultipleMinima { pairs: first.shells[0].pairs });
    }
    alpha_root(|s| alpha_theta(basis, m, s, radius), basis.dimension as f64, tol)
}

/// Theta cutoffs start here (π R² ≈ 28, terms ~e^{−28}) or at 3 m(L) if larger.
const THETA_START: f64 = 3.0;

/// σ̃_L; fails with `MultipleMinima` when the first shell holds more than one pair.
/// The cutoff grows by 1.5 per round until successive roots differ by less than tol.
pub fn sigma_tilde(basis: &LatticeBasis, tol: f64) -> Result<SigmaTilde> {
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let m = minimum_length(basis)?;
    let first = enumerate_shells(basis, m * (1.0 + 1e-6))?;
    if first.shells[0].pairs > 1 {
        return Err(Error::MultipleMinima { pairs: first.shells[0].pairs });
    }
    let n = basis.dimension as f64;
    let mut r = THETA_START.max(3.0 * m);
    let mut prev = alpha_root(|s| alpha_theta(basis, m, s, r), n, tol)?;
    for round in 1..=8 {
        r *= 1.5;
        let root = alpha_root(|s| alpha_theta(basis, m, s, r), n, tol)?;
        if (root - prev).abs() < tol {
            return Ok(SigmaTilde {
                sigma_tilde: root,
                m_l: m,
                shells_used: enumerate_shells(basis, r)?.shells.len(),
                radius: r,
                radius_rounds: round,
            });
        }
        prev = root;
    }
    no_convergence(format!("σ̃ not stable to {tol:e} after 8 radius rounds (radius {r:.3})"))
}

/// Point z = x + iy of the standard fundamental domain, sampled with density ∝ y^{−2},
/// together with the number of proposals used.
pub fn sample_fundamental_domain(rng: &mut impl Rng) -> (f64, f64, usize) {
    let mut tries = 0;
    loop {
        tries += 1;
        let x: f64 = rng.gen::<f64>() - 0.5;
        let u: f64 = 1.0 - rng.gen::<f64>();
        let y = 0.5 * 3f64.sqrt() / u;
        if x * x + y * y >= 1.0 {
            return (x, y, tries);
        }
    }
}

/// Unimodular 2D lattice with rows [y^{−1/2}, 0] and [x y^{−1/2}, y^{1/2}].
pub fn random_lattice_2d(seed: u64) -> LatticeBasis {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, y, _) = sample_fundamental_domain(&mut rng);
    let s = y.sqrt();
    LatticeBasis { dimension: 2, rows: vec![vec![1.0 / s, 0.0], vec![x / s, s]], normalized: true }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_shear() {
        assert!((determinant(&[vec![1.0, 0.0], vec![0.3, 1.0]]) - 1.0).abs() < 1e-15);
        assert!((determinant(&[vec![0.0, 2.0], vec![3.0, 0.0]]) + 6.0).abs() < 1e-15);
    }

    #[test]
    fn lll_shortens_skewed_basis() {
        let b = lll_reduce(&[vec![1.0, 0.0], vec![7.0, 1.0]]);
        assert!(b.iter().all(|v| dot(v, v) <= 1.0 + 1e-12));
    }
}
