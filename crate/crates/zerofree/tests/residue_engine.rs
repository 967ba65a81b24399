use num_complex::Complex64;
use std::f64::consts::PI;
use zerofree::error::Error;
use zerofree::limit_distribution::{cdf, density, QuadratureSpec};
use zerofree::residue_engine::*;
use zerofree::special_functions::eta_a;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[test]
fn curve_depth_diverges_at_the_left_end() {
    let near = gamma_curve_point(1, 0.5 * PI + 1e-9).unwrap();
    assert!(near.im < -1e8);
    let top = gamma_curve_point(3, 5.5 * PI).unwrap();
    assert!(top.im.abs() < 1e-12);
}

#[test]
fn guess_depth_matches_explicit_expansion() {
    for a in [1.2, 2.0, 5.0] {
        let g = log_gamma_scale(a);
        for n in [20u32, 100, 400] {
            let nf = n as f64;
            let s = 1.0 + 1.0 / a;
            let q = (2.0 * PI * nf).powi(2) + g * g;
            let explicit = g + 0.5 * s * (1.0 + s * g / q) * q.ln();
            let y = guess_depth(a, n).unwrap();
            assert!((y - explicit).abs() < 5.0 / (nf + g), "a={a} n={n}: {y} {explicit}");
        }
    }
}

#[test]
fn guess_sinks_as_a_leaves_the_middle() {
    let mid = initial_pole_guess(2.0, 3).unwrap().im;
    assert!(initial_pole_guess(1.0005, 3).unwrap().im < mid - 3.0);
    assert!(initial_pole_guess(2000.0, 3).unwrap().im < mid - 3.0);
}

#[test]
fn pole_table_invariants() {
    for a in [1.01, 2.0, 5.0] {
        let t = pole_table(a, 400).unwrap();
        t.validate().unwrap();
        let g = log_gamma_scale(a);
        assert!(t.records[0].zeta.re.abs() < 1e-12);
        for r in &t.records {
            assert!(r.zeta.im < 0.0 && r.residual < 1e-12);
            assert!(in_strip(r.n, r.zeta), "a={a} n={}", r.n);
            if r.n > 0 {
                assert!(r.guess_distance <= 5.0 / (r.n as f64 + g), "a={a} n={}: {}", r.n, r.guess_distance);
            }
        }
    }
}

#[test]
fn refinement_from_the_guess_reaches_the_target() {
    let r = find_pole(2.0, 1).unwrap();
    assert!(r.residual < RESIDUAL_TARGET);
    assert!(eta_a(2.0, r.zeta).unwrap().norm() < 1e-12);
    let mirror = refine_pole(2.0, -1, -initial_pole_guess(2.0, 1).unwrap().conj()).unwrap();
    assert!((mirror.zeta + r.zeta.conj()).norm() < 1e-12);
}

#[test]
fn stray_roots_are_rejected() {
    // start in S₁ but claim strip 3
    let g = initial_pole_guess(2.0, 1).unwrap();
    assert!(matches!(refine_pole(2.0, 3, g), Err(Error::StrayRoot { n: 3, .. })));
}

#[test]
fn pole_derivative_matches_finite_differences() {
    let h = 1e-5;
    for n in [0u32, 1, 7] {
        let r = find_pole(2.0, n).unwrap();
        let fd = (find_pole(2.0 + h, n).unwrap().zeta - find_pole(2.0 - h, n).unwrap().zeta) / (2.0 * h);
        assert!((fd - r.dzeta_da).norm() < 1e-6 * r.dzeta_da.norm().max(1.0), "n={n}: {fd} {}", r.dzeta_da);
        if n == 0 {
            assert!(r.dzeta_da.re.abs() < 1e-12);
        }
    }
    // η_{a+h}(ζ + h ζ') = O(h²)
    let r = find_pole(2.0, 2).unwrap();
    let e1 = eta_a(2.0 + 1e-3, r.zeta + 1e-3 * r.dzeta_da).unwrap().norm();
    let e2 = eta_a(2.0 + 5e-4, r.zeta + 5e-4 * r.dzeta_da).unwrap().norm();
    assert!((e1 / e2 - 4.0).abs() < 0.2, "{e1} {e2}");
}

#[test]
fn contour_residues() {
    for n in [0u32, 1] {
        let r = find_pole(2.0, n).unwrap();
        assert!(residue_check(2.0, &r).unwrap() < 1e-8, "n={n}");
    }
    let origin = contour_residue(2.0, Complex64::new(0.0, 0.0), 1e-2, 64).unwrap();
    assert!((origin - 1.0).norm() < 1e-8, "{origin}");
}

#[test]
fn folded_terms_are_real_and_decay_at_the_predicted_rate() {
    let a = 3.0;
    let t = pole_table(a, 400).unwrap();
    let term = |n: usize| (a * (-2.0 * I * t.records[n].zeta).exp()).norm();
    let observed = term(400) / term(200);
    let model = 2f64.powf(-2.0 * (1.0 + 1.0 / a));
    assert!(observed / model > 0.5 && observed / model < 2.0, "{observed} {model}");
    // conjugate pair n, −n gives 2 Re of the n-term: the −n pole is −conj ζ_n
    let z = t.records[5].zeta;
    let pair = a * (-2.0 * I * z).exp() + a * (-2.0 * I * (-z.conj())).exp();
    assert!(pair.im.abs() < 1e-15 * pair.norm());
}

#[test]
fn residue_tail_complements_quadrature_cdf() {
    let spec = QuadratureSpec::default();
    for c in [0.6, 0.8, 1.0, 1.5, 2.5] {
        let tail = prob_tail_residue(c, DEFAULT_N_MAX).unwrap();
        let sum = tail.value + cdf(c, &spec).unwrap();
        let tol = if c == 1.0 { 1e-8 } else { 1e-6 };
        assert!((sum - 1.0).abs() < tol, "c={c}: {sum}");
    }
}

#[test]
fn residue_density_matches_quadrature() {
    let spec = QuadratureSpec::default();
    for c in [0.6, 0.8, 1.0, 1.5, 2.5] {
        let r = density_residue(c, DEFAULT_N_MAX).unwrap().value;
        let q = density(c, &spec).unwrap();
        let tol = if c <= 1.0 { 1e-8 } else { 1e-6 };
        assert!((r - q).abs() < tol, "c={c}: {r} {q}");
    }
    let f = density_residue(2.5, DEFAULT_N_MAX).unwrap().value;
    assert!((f - 0.05).abs() < 0.005);
}

#[test]
fn truncation_is_stable_at_large_c() {
    let a = density_residue(2.5, 200).unwrap().value;
    let b = density_residue(2.5, 400).unwrap().value;
    assert!((a - b).abs() < 1e-5, "{a} {b}");
}

#[test]
fn sweep_is_continuous_and_matches_fresh_tables() {
    let grid: Vec<f64> = (0..=20).map(|k| 1.8 + 0.01 * k as f64).collect();
    let tables = pole_sweep(&grid, 30).unwrap();
    for w in tables.windows(2) {
        for (p, q) in w[0].records.iter().zip(&w[1].records) {
            assert!((p.zeta - q.zeta).norm() < 1.0);
        }
    }
    let fresh = pole_table(grid[7], 30).unwrap();
    for (p, q) in fresh.records.iter().zip(&tables[7].records) {
        assert!((p.zeta - q.zeta).norm() < 1e-10 * p.zeta.norm());
    }
}

#[test]
fn cache_round_trip_is_bit_identical() {
    let dir = std::env::temp_dir().join(format!("zerofree-cache-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let cache = PoleCache::new(&dir);
    let computed = cache.get_or_compute(2.3, 40).unwrap();
    assert!(cache.path(2.3, 40).exists());
    let hit = cache.get_or_compute(2.3, 40).unwrap();
    assert_eq!(computed, hit);
    assert_eq!(computed, pole_table(2.3, 40).unwrap());
    assert_ne!(PoleCache::key(2.3, 40), PoleCache::key(2.3, 41));
    assert_ne!(PoleCache::key(2.3, 40), PoleCache::key(2.3 + 1e-15, 40));
    // a damaged file is recomputed and replaced
    std::fs::write(cache.path(2.3, 40), "garbage").unwrap();
    assert_eq!(cache.get_or_compute(2.3, 40).unwrap(), computed);
    let text = std::fs::read_to_string(cache.path(2.3, 40)).unwrap();
    assert!(text.starts_with(CSV_HEADER));
    assert_eq!(read_table_csv(&text).unwrap(), computed);
    std::fs::remove_dir_all(&dir).unwrap();
}
