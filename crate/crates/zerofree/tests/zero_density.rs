use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zerofree::limit_distribution::QuadratureSpec;
use zerofree::zero_density::*;
use zerofree::lattice_zeta::{enumerate_shells, random_lattice_2d, sigma_tilde, LatticeBasis};
use zerofree::Error;

fn random_exponents(rng: &mut ChaCha8Rng, k: usize) -> ExponentSequence {
    let mut lam: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..4.0)).collect();
    lam.sort_by(f64::total_cmp);
    ExponentSequence::new(lam, ExponentSource::Synthetic).unwrap()
}

fn two_log_j() -> ExponentSequence {
    ExponentSequence::log_pairs(&[1, 2, 3, 4, 5, 6]).unwrap()
}

fn primes() -> ExponentSequence {
    ExponentSequence::log_pairs(&[2, 3, 5, 7, 11, 13]).unwrap()
}

#[test]
fn j1_exchange_identity_on_random_coefficient_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for trial in 0..20 {
        let k = 6 + trial % 5;
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
        let a = rng.gen_range(0..k);
        let mut patterns = vec![None];
        for b in (0..k).filter(|&b| b != a) {
            patterns.push(Some((a.min(b), a.max(b))));
        }
        let v = bessel_product_integrals(&c, &patterns).unwrap();
        let lhs = c[a] * v[0].value;
        let rhs: f64 = (0..k).filter(|&b| b != a).zip(&v[1..]).map(|(b, e)| c[b] * e.value).sum();
        assert!((lhs - rhs).abs() < 1e-6, "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn equal_coefficients_match_reference_quadrature() {
    // ∫₀^∞ J₀(r)⁶ r dr, scipy quad to r = 4·10⁴ with R⁻² extrapolation
    let v = bessel_product_integral(&[1.0; 6], &[], &QuadratureSpec::default()).unwrap();
    assert!((v.value - 0.336827961780).abs() < 1e-9, "{}", v.value);
}

#[test]
fn mixed_coefficients_match_reference_quadrature() {
    let c = [1.0, 0.8, 0.55, 0.43, 0.3, 0.21];
    let spec = QuadratureSpec::default();
    // scipy quad, extrapolated and raw at r = 4·10⁴ respectively
    let all_j0 = bessel_product_integral(&c, &[], &spec).unwrap();
    assert!((all_j0.value - 0.7584979762).abs() < 1e-8, "{}", all_j0.value);
    let pair = bessel_product_integral(&c, &[0, 2], &spec).unwrap();
    assert!((pair.value - 0.29180907991).abs() < 1e-8, "{}", pair.value);
}

#[test]
fn rescaling_coefficients_scales_by_inverse_square() {
    let spec = QuadratureSpec::default();
    let c = [0.9, 0.7, 0.5, 0.45, 0.3, 0.25, 0.2];
    for &mu in &[0.3, 2.5] {
        for pos in [&[][..], &[1, 4][..]] {
            let base = bessel_product_integral(&c, pos, &spec).unwrap().value;
            let scaled: Vec<f64> = c.iter().map(|x| mu * x).collect();
            let v = bessel_product_integral(&scaled, pos, &spec).unwrap().value;
            assert!((v * mu * mu - base).abs() < 1e-12, "{mu}: {v} {base}");
        }
    }
}

#[test]
fn fewer_than_five_factors_is_rejected() {
    let r = bessel_product_integral(&[1.0, 0.5, 0.3, 0.2], &[], &QuadratureSpec::default());
    assert!(matches!(r, Err(Error::Convergence(_))));
}

#[test]
fn shift_of_all_exponents_leaves_density_unchanged() {
    let spec = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..20 {
        let seq = random_exponents(&mut rng, 6 + trial % 3);
        let (l, r) = nu_support(&seq).unwrap();
        let sigma = rng.gen_range(l..r);
        let alpha = rng.gen_range(-2.0..2.0);
        let a = nu_k(&seq, sigma, &spec).unwrap();
        let b = nu_k(&seq.shifted(alpha), sigma, &spec).unwrap();
        assert!((a - b).abs() < 1e-6, "trial {trial}: {a} vs {b}");
    }
}

#[test]
fn density_is_nonnegative_across_the_strip() {
    let spec = QuadratureSpec::default();
    for seq in [two_log_j(), primes()] {
        let (l, r) = nu_support(&seq).unwrap();
        for i in 0..=60 {
            let sigma = l - 0.5 + (r - l + 1.0) * i as f64 / 60.0;
            let v = nu_k(&seq, sigma, &spec).unwrap();
            assert!(v >= -1e-6, "σ = {sigma}: {v}");
        }
    }
}

#[test]
fn density_vanishes_above_the_zero_free_abscissa() {
    let spec = QuadratureSpec::default();
    for seq in [two_log_j(), primes()] {
        let (_, r) = nu_support(&seq).unwrap();
        for d in [0.1, 0.5, 1.0] {
            let v = nu_k(&seq, r + d, &spec).unwrap();
            assert!(v.abs() < 1e-6, "σ = {}: {v}", r + d);
        }
    }
}

#[test]
fn known_density_values_for_prime_exponents() {
    // frozen from this implementation after the reference-quadrature checks above
    let spec = QuadratureSpec::default();
    let seq = primes();
    for (sigma, want) in [(-1.0, 0.0960976640084), (0.0, 0.68890957865944), (0.5, 0.339123155297808)] {
        let v = nu_k(&seq, sigma, &spec).unwrap();
        assert!((v - want).abs() < 1e-9, "σ = {sigma}: {v}");
    }
}

#[test]
fn two_term_series_zeros_are_counted_exactly() {
    let seq = ExponentSequence::new(vec![0.0, 1.0], ExponentSource::Synthetic).unwrap();
    let r = count_zeros_rectangle(&seq, -1.0, 1.0, 0.0, 20.0).unwrap();
    assert_eq!(r.count, 3);
    assert!(r.winding_residual < 0.01);
    let r = count_zeros_rectangle(&seq, -1.0, 1.0, 0.0, 2.0).unwrap();
    assert_eq!(r.count, 0);
    assert!(r.winding_residual < 0.01);
}

#[test]
fn zero_frequency_matches_integrated_density() {
    let spec = QuadratureSpec::default();
    let independent = [
        primes(),
        ExponentSequence::log_pairs(&[2, 3, 5, 7, 11, 13, 17]).unwrap(),
        ExponentSequence::new(vec![0.0, 0.61, 1.37, 1.9, 2.83, 3.4], ExponentSource::Synthetic).unwrap(),
        ExponentSequence::new(vec![0.0, 0.4142, 1.2361, 1.7321, 2.6458, 3.1623, 3.6056], ExponentSource::Synthetic)
            .unwrap(),
    ];
    let check = |seq: &ExponentSequence, a: f64, b: f64| {
        let c = count_zeros_rectangle(seq, a, b, 0.0, 2000.0).unwrap();
        assert!(c.winding_residual < 0.01);
        let freq = c.count as f64 / 2000.0;
        let h = h_frequency(seq, a, b, &spec).unwrap();
        assert!((freq / h - 1.0).abs() < 0.1, "{:?} on ({a}, {b}): {freq} vs {h}", seq.lambdas());
    };
    // 2 log j are linearly dependent, so only the whole strip is compared
    let seq = two_log_j();
    let (l, r) = nu_support(&seq).unwrap();
    check(&seq, l - 0.3, r + 0.3);
    for seq in &independent {
        let (l, r) = nu_support(seq).unwrap();
        let w = r - l;
        check(seq, l - 0.3, r + 0.3);
        check(seq, l + 0.25 * w, r - 0.25 * w);
    }
}

#[test]
fn whole_strip_frequency_is_the_exponent_span() {
    let seq = primes();
    let lam = seq.lambdas();
    let h = h_frequency(&seq, -3.0, 3.0, &QuadratureSpec::default()).unwrap();
    let want = (lam[lam.len() - 1] - lam[0]) / (2.0 * std::f64::consts::PI);
    assert!((h - want).abs() < 1e-7, "{h} vs {want}");
}

#[test]
fn frequency_is_additive_and_vanishes_on_empty_intervals() {
    let spec = QuadratureSpec::default();
    let seq = primes();
    assert_eq!(h_frequency(&seq, 0.3, 0.3, &spec).unwrap(), 0.0);
    let whole = h_frequency(&seq, -0.9, 0.6, &spec).unwrap();
    let left = h_frequency(&seq, -0.9, 0.05, &spec).unwrap();
    let right = h_frequency(&seq, 0.05, 0.6, &spec).unwrap();
    assert!((whole - left - right).abs() < 1e-8, "{whole} vs {}", left + right);
}

#[test]
fn repeated_lattice_lengths_are_rejected() {
    let z2 = LatticeBasis::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let spectrum = enumerate_shells(&z2, 5.0).unwrap();
    let r = nu_for_lattice(&spectrum, 6, &[1.0], None, &QuadratureSpec::default());
    assert!(matches!(r, Err(Error::DegenerateSpectrum(_))), "{r:?}");
}

#[test]
fn lattice_density_vanishes_beyond_the_abscissa() {
    let spec = QuadratureSpec::default();
    for seed in 0..3 {
        let b = random_lattice_2d(seed);
        let s = sigma_tilde(&b, 1e-10).unwrap().sigma_tilde;
        let spectrum = enumerate_shells(&b, 6.0).unwrap();
        let c = nu_for_lattice(&spectrum, 8, &[1.2 * s], None, &spec).unwrap();
        assert!(c.values[0].abs() < 1e-4, "seed {seed}: {}", c.values[0]);
    }
}

#[test]
fn lattice_density_is_unchanged_by_rescaling_the_lattice() {
    let spec = QuadratureSpec::default();
    let b = random_lattice_2d(0);
    let grid = [-0.3, 0.4, 0.9, 1.1];
    let base = nu_for_lattice(&enumerate_shells(&b, 6.0).unwrap(), 7, &grid, None, &spec).unwrap();
    // λ_j ↦ λ_j + 2 log μ under L ↦ μL
    let mu = 1.7;
    let scaled = LatticeBasis::new(b.rows.iter().map(|r| r.iter().map(|x| mu * x).collect()).collect()).unwrap();
    let moved = nu_for_lattice(&enumerate_shells(&scaled, 6.0 * mu).unwrap(), 7, &grid, None, &spec).unwrap();
    for (a, b) in base.values.iter().zip(&moved.values) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    let n = 2;
    let rescaled = nu_for_lattice(&enumerate_shells(&b, 6.0).unwrap(), 7, &[0.2, 0.45], Some(n), &spec).unwrap();
    let direct = nu_for_lattice(&enumerate_shells(&b, 6.0).unwrap(), 7, &[0.4, 0.9], None, &spec).unwrap();
    for (r, d) in rescaled.values.iter().zip(&direct.values) {
        assert!((r - 4.0 * d).abs() < 1e-12, "{r} vs {d}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_numbers_are_integral(seed in 0u64..1000, top in 5.0f64..80.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_exponents(&mut rng, 6);
        let r = count_zeros_rectangle(&seq, -2.0, 2.0, 0.0, top).unwrap();
        prop_assert!(r.winding_residual < 0.01);
    }

    #[test]
    fn zero_counts_add_over_stacked_rectangles(seed in 0u64..1000, mid in 5.0f64..35.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let seq = random_exponents(&mut rng, 5);
        let whole = count_zeros_rectangle(&seq, -3.0, 3.0, 0.0, 40.0).unwrap().count;
        let lower = count_zeros_rectangle(&seq, -3.0, 3.0, 0.0, mid).unwrap();
        let upper = count_zeros_rectangle(&seq, -3.0, 3.0, lower.rectangle.3, 40.0).unwrap().count;
        prop_assert_eq!(whole, lower.count + upper);
    }
}
