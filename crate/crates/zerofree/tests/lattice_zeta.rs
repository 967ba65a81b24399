use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use zerofree::lattice_zeta::*;
use zerofree::Error;

fn z2() -> LatticeBasis {
    LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
}

fn shear() -> LatticeBasis {
    LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.3, 1.0]]).unwrap()
}

/// Applies a random product of elementary unimodular row operations.
fn scramble(basis: &LatticeBasis, rng: &mut ChaCha8Rng) -> LatticeBasis {
    let mut rows = basis.rows.clone();
    let n = rows.len();
    for _ in 0..6 {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k = rng.gen_range(-3i32..=3) as f64;
        let add: Vec<f64> = rows[j].iter().map(|x| k * x).collect();
        for (a, b) in rows[i].iter_mut().zip(add) {
            *a += b;
        }
        if rng.gen_bool(0.3) {
            rows.swap(i, j);
        }
    }
    LatticeBasis::new(rows).unwrap()
}

#[test]
fn normalization_fixes_the_covolume() {
    let id = normalize_covolume(&z2()).unwrap();
    assert_eq!(id.rows, z2().rows);
    let two = LatticeBasis::new(vec![vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
    assert!(!two.normalized);
    let n = normalize_covolume(&two).unwrap();
    assert!(n.normalized);
    assert!((n.rows[0][0] - 1.0).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let dim = rng.gen_range(2..5);
        let rows = (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect();
        let b = LatticeBasis::new(rows).unwrap();
        assert!((normalize_covolume(&b).unwrap().determinant().abs() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn singular_basis_is_rejected() {
    let r = LatticeBasis::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
    assert!(matches!(r, Err(Error::SingularBasis)));
}

#[test]
fn integer_lattice_shells() {
    let s = enumerate_shells(&z2(), 1.5).unwrap();
    let got: Vec<(f64, usize)> = s.shells.iter().map(|x| (x.length, x.pairs)).collect();
    assert_eq!(got.len(), 2);
    assert!((got[0].0 - 1.0).abs() < 1e-15 && got[0].1 == 2);
    assert!((got[1].0 - 2f64.sqrt()).abs() < 1e-15 && got[1].1 == 2);
    let s = enumerate_shells(&z2(), 2.5).unwrap();
    assert!(s.shells.iter().any(|x| (x.length - 5f64.sqrt()).abs() < 1e-12 && x.pairs == 4));
    assert_eq!(s.m_l, 1.0);
}

#[test]
fn hexagonal_lattice_has_three_minimal_pairs() {
    let hex = LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.5, 0.5 * 3f64.sqrt()]]).unwrap();
    let hex = normalize_covolume(&hex).unwrap();
    let s = enumerate_shells(&hex, 1.5).unwrap();
    assert_eq!(s.shells[0].pairs, 3);
    // (2/√3)^{1/2}
    assert!((s.m_l - 1.074569931823542).abs() < 1e-12, "{}", s.m_l);
}

#[test]
fn integer_lattice_shells_match_brute_force() {
    let gcd = |mut a: i64, mut b: i64| {
        (a, b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let radius = 10.0;
    let mut counts = std::collections::BTreeMap::new();
    for x in -10i64..=10 {
        for y in -10i64..=10 {
            if (x, y) != (0, 0) && gcd(x, y) == 1 && x * x + y * y <= 100 {
                *counts.entry(x * x + y * y).or_insert(0usize) += 1;
            }
        }
    }
    let s = enumerate_shells(&z2(), radius).unwrap();
    assert_eq!(s.shells.len(), counts.len());
    for (shell, (n2, c)) in s.shells.iter().zip(&counts) {
        assert!((shell.length - (*n2 as f64).sqrt()).abs() < 1e-12);
        assert_eq!(shell.pairs * 2, *c, "|v|² = {n2}");
    }
}

#[test]
fn enumeration_is_independent_of_the_basis_chosen() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = enumerate_shells(&shear(), 6.0).unwrap();
    for _ in 0..10 {
        let s = enumerate_shells(&scramble(&shear(), &mut rng), 6.0).unwrap();
        assert_eq!(s.shells.len(), base.shells.len());
        for (a, b) in s.shells.iter().zip(&base.shells) {
            // scrambled rows reach ~10², so lengths agree to the shell tolerance only
            assert!((a.length - b.length).abs() < SHELL_TOLERANCE * b.length);
            assert_eq!(a.pairs, b.pairs);
        }
    }
}

#[test]
fn enumeration_cap_raises_explosion() {
    let r = enumerate_shells(&z2(), 3000.0);
    assert!(matches!(r, Err(Error::Explosion(_))), "{r:?}");
}

#[test]
fn riemann_zeta_values() {
    assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-12);
    assert!((riemann_zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
    // root of ζ(s) = 2, mpmath findroot
    assert!((riemann_zeta(1.7286472389981836).unwrap() - 2.0).abs() < 1e-12);
    assert!((riemann_zeta(1.72865).unwrap() - 2.0).abs() < 1e-4);
    assert!(matches!(riemann_zeta(1.0), Err(Error::Domain(_))));
}

#[test]
fn epstein_zeta_of_the_integer_lattice() {
    // 4 ζ(2) β(2), mpmath; the returned tail bound is at most tol
    let v = epstein_zeta_real(&z2(), 2.0, 1e-5).unwrap();
    assert!((v - 6.026812039691940).abs() < 1e-5, "{v}");
    assert!((v - 6.026813).abs() < 1e-5);
}

#[test]
fn epstein_zeta_domain_and_tail_errors() {
    assert!(matches!(epstein_zeta_real(&z2(), 1.0, 1e-6), Err(Error::Domain(_))));
    assert!(matches!(epstein_zeta_real(&z2(), 1.001, 1e-12), Err(Error::Tail(_))));
}

fn brute_force_sum(b: &LatticeBasis, radius: f64, sigma: f64) -> f64 {
    let mut direct = 0.0;
    let box_size = (2.0 * radius) as i64 + 2;
    for x in -box_size..=box_size {
        for y in -box_size..=box_size {
            if (x, y) == (0, 0) {
                continue;
            }
            let v = b.vector(&[x, y]);
            let r2 = v[0] * v[0] + v[1] * v[1];
            if r2 <= radius * radius {
                direct += r2.powf(-sigma);
            }
        }
    }
    direct
}

#[test]
fn epstein_zeta_factorizes_over_primitive_vectors() {
    let b = shear();
    let radius = 60.0;
    let spectrum = enumerate_shells(&b, radius).unwrap();
    for &sigma in &[1.8, 2.5] {
        // same truncation on both sides: multiples k v with k|v| ≤ R
        let factored: f64 = spectrum
            .shells
            .iter()
            .map(|s| {
                let kmax = (radius * (1.0 + 1e-12) / s.length).floor() as usize;
                2.0 * s.pairs as f64 * (1..=kmax).map(|k| (k as f64 * s.length).powf(-2.0 * sigma)).sum::<f64>()
            })
            .sum();
        let direct = brute_force_sum(&b, radius, sigma);
        assert!((factored - direct).abs() < 1e-12 * direct, "σ = {sigma}: {factored} vs {direct}");
    }
    for &sigma in &[4.0, 6.0] {
        let v = epstein_zeta_real(&b, sigma, 1e-12).unwrap();
        let direct = brute_force_sum(&b, 100.0, sigma);
        assert!((v - direct).abs() < 1e-10, "σ = {sigma}: {v} vs {direct}");
    }
}

#[test]
fn epstein_zeta_is_stable_under_radius_growth() {
    let b = shear();
    let tight = epstein_zeta_real(&b, 2.0, 1e-5).unwrap();
    let loose = epstein_zeta_real(&b, 2.0, 1e-3).unwrap();
    assert!(tight > loose && tight - loose < 1e-3, "{tight} {loose}");
}

#[test]
fn integer_lattice_has_multiple_minima() {
    match sigma_tilde(&z2(), 1e-10) {
        Err(Error::MultipleMinima { pairs }) => assert_eq!(pairs, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sheared_lattice_abscissa_is_stable_under_radius_doubling() {
    let b = shear();
    let s = sigma_tilde(&b, 1e-10).unwrap();
    assert!(s.sigma_tilde > 1.0 && s.sigma_tilde.is_finite());
    let m = s.m_l;
    let at_r = sigma_tilde_at_radius(&b, 3.0 * m.max(1.0), 1e-12).unwrap();
    let at_2r = sigma_tilde_at_radius(&b, 6.0 * m.max(1.0), 1e-12).unwrap();
    assert!((at_r - at_2r).abs() < 1e-8, "{at_r} {at_2r}");
    assert!((s.sigma_tilde - at_2r).abs() < 1e-8, "{} {at_2r}", s.sigma_tilde);
}

#[test]
fn abscissa_is_a_lattice_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let base = sigma_tilde(&shear(), 1e-10).unwrap().sigma_tilde;
    for _ in 0..10 {
        let s = sigma_tilde(&scramble(&shear(), &mut rng), 1e-10).unwrap().sigma_tilde;
        assert!((s - base).abs() < 1e-8, "{s} {base}");
    }
}

#[test]
fn alpha_increases_at_and_beyond_its_root() {
    for b in [shear(), random_lattice_2d(1), random_lattice_2d(2)] {
        let s = sigma_tilde(&b, 1e-12).unwrap();
        let a0 = alpha_theta(&b, s.m_l, s.sigma_tilde, s.radius).unwrap();
        assert!(a0.abs() < 1e-9, "{a0}");
        let mut prev = alpha_theta(&b, s.m_l, s.sigma_tilde - 1e-4, s.radius).unwrap();
        for i in 0..100 {
            let sigma = s.sigma_tilde + 0.02 * i as f64;
            let a = alpha_theta(&b, s.m_l, sigma, s.radius).unwrap();
            assert!(a > prev, "σ = {sigma}");
            prev = a;
        }
    }
}

#[test]
fn theta_splitting_matches_direct_sums() {
    // 4 ζ(2) β(2), mpmath
    assert!((epstein_zeta_theta(&z2(), 2.0, 4.5).unwrap() - 6.026812039691940).abs() < 1e-12);
    for b in [shear(), random_lattice_2d(9)] {
        for &sigma in &[4.0, 6.0] {
            let theta = epstein_zeta_theta(&b, sigma, 4.5).unwrap();
            let direct = epstein_zeta_real(&b, sigma, 1e-12).unwrap();
            assert!((theta - direct).abs() < 1e-10, "σ = {sigma}: {theta} vs {direct}");
        }
        // at σ = 2 the truncated sum sits below by at most its tail bound
        let theta = epstein_zeta_theta(&b, 2.0, 4.5).unwrap();
        let direct = epstein_zeta_real(&b, 2.0, 1e-4).unwrap();
        assert!(direct < theta && theta - direct < 1e-4, "{theta} vs {direct}");
    }
}

#[test]
fn truncated_and_theta_abscissae_agree() {
    let b = random_lattice_2d(0);
    let theta = sigma_tilde(&b, 1e-12).unwrap();
    let spectrum = enumerate_shells(&b, 300.0 * theta.m_l).unwrap();
    let truncated = sigma_tilde_truncated(&spectrum, 1e-12).unwrap();
    // the shell sum converges like a lattice-point discrepancy in the cutoff
    assert!((truncated - theta.sigma_tilde).abs() < 1e-6, "{truncated} vs {}", theta.sigma_tilde);
}

#[test]
fn fundamental_domain_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut tries, n) = (0usize, 200_000);
    for _ in 0..n {
        let (x, y, t) = sample_fundamental_domain(&mut rng);
        assert!(x.abs() <= 0.5 && x * x + y * y >= 1.0);
        tries += t;
    }
    let rate = n as f64 / tries as f64;
    // area ratio (π/3)/(2/√3) of the y⁻² measure
    let want = (PI / 3.0) / (2.0 / 3f64.sqrt());
    assert!((rate - want).abs() < 0.005, "{rate} vs {want}");
}

#[test]
fn random_lattices_have_finite_abscissae() {
    for seed in 0..1000 {
        let b = random_lattice_2d(seed);
        assert!((b.determinant().abs() - 1.0).abs() < 1e-12);
        let s = sigma_tilde(&b, 1e-10).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(s.sigma_tilde.is_finite() && s.sigma_tilde > 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epstein_zeta_dominates_its_minimal_vectors(seed in 0u64..10_000, s in 2.0f64..4.0) {
        let b = random_lattice_2d(seed);
        let v = epstein_zeta_real(&b, s, 1e-4).unwrap();
        let m = minimum_length(&b).unwrap();
        // ±k v_min alone contribute 2 ζ(2σ) m^{−2σ}
        prop_assert!(v >= 2.0 * riemann_zeta(2.0 * s).unwrap() * m.powf(-2.0 * s));
    }

    #[test]
    fn random_lattices_are_unimodular_and_reduced(seed in 0u64..1_000_000) {
        let b = random_lattice_2d(seed);
        prop_assert!((b.determinant().abs() - 1.0).abs() < 1e-12);
        let m = minimum_length(&b).unwrap();
        let first = (b.rows[0][0].powi(2) + b.rows[0][1].powi(2)).sqrt();
        // the first row of a fundamental-domain basis is a shortest vector
        prop_assert!((m - first).abs() < 1e-12 * first);
    }
}
