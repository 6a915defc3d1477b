use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use proptest::prelude::*;
use qwalk_core::spectral::{
    build_step_matrix, check_quadruplet_symmetry, clean_dos, detect_edge_states, dos_ensemble,
    spectrum_of_field, DosBins, DosConfig, PhaseCounter,
};
use qwalk_core::{step, Boundary, CoinField, Complex64, WalkerState, Wall, WallSign};

fn wall_from(k: u8) -> Option<Wall> {
    match k % 3 {
        0 => None,
        1 => Some(Wall::at_origin(WallSign::Plus)),
        _ => Some(Wall::at_origin(WallSign::Minus)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matrix_reproduces_step(
        half in 2usize..12,
        width in 0.0..2.0 * PI,
        wall in 0u8..3,
        seed in any::<u64>(),
    ) {
        let sites = 2 * half;
        let field = CoinField::sample_spatial(0.5, width, sites, seed)
            .unwrap()
            .with_optional_wall(wall_from(wall))
            .unwrap();
        let u = build_step_matrix(&field, Boundary::Ring).unwrap();
        let v: Vec<Complex64> = (0..2 * sites)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let s = WalkerState::from_vector(&v).unwrap();
        let out = step(&s, &field, Boundary::Ring, 0).unwrap().to_vector();
        for r in 0..2 * sites {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..2 * sites {
                acc += v[c] * u[(r, c)];
            }
            prop_assert!((acc - out[r]).norm() < 1e-13);
        }
    }

    #[test]
    fn inertia_counts_match_dense(
        half in 3usize..30,
        mean in -PI..PI,
        width in 0.0..2.0 * PI,
        wall in 0u8..3,
        seed in any::<u64>(),
    ) {
        let field = CoinField::sample_spatial(mean, width, 2 * half, seed)
            .unwrap()
            .with_optional_wall(wall_from(wall))
            .unwrap();
        let spec = spectrum_of_field(&field).unwrap();
        let counter = PhaseCounter::new(&field).unwrap();
        for k in 1..40 {
            let w = PI * k as f64 / 40.0;
            if spec.phases.iter().any(|p| (p.abs() - w).abs() < 1e-7) {
                continue;
            }
            let dense = spec.phases.iter().filter(|p| p.abs() < w).count();
            prop_assert_eq!(counter.count_within(w).unwrap(), dense, "ω = {}", w);
        }
    }
}

#[test]
fn disordered_spectra_form_quadruplets() {
    let mut worst = 0.0f64;
    for k in 0..100 {
        let field = CoinField::sample_spatial(FRAC_PI_4, FRAC_PI_2, 100, k).unwrap();
        let r = check_quadruplet_symmetry(&spectrum_of_field(&field).unwrap(), 1e-9);
        assert!(r.holds(), "realization {k}: {r:?}");
        worst = worst.max(r.worst());
    }
    assert!(worst < 1e-9);
}

#[test]
fn wall_sign_controls_edge_states() {
    let clean = CoinField::clean(500, FRAC_PI_4).unwrap();
    let minus = clean
        .clone()
        .with_wall(Wall::at_origin(WallSign::Minus))
        .unwrap();
    let plus = clean.with_wall(Wall::at_origin(WallSign::Plus)).unwrap();
    let e = detect_edge_states(&spectrum_of_field(&minus).unwrap(), 1e-8);
    assert_eq!((e.at_zero, e.at_pi), (2, 2));
    let e = detect_edge_states(&spectrum_of_field(&plus).unwrap(), 1e-8);
    assert_eq!((e.at_zero, e.at_pi), (0, 0));
}

#[test]
fn clean_histogram_follows_band_formula() {
    let mut cfg = DosConfig::new(FRAC_PI_4, 0.0, 2000, 1);
    cfg.bins = DosBins::Uniform(64);
    let h = dos_ensemble(&cfg).unwrap();
    for (c, d) in h.centers().iter().zip(&h.density) {
        // skip the bins holding the band edges
        let edge = (c.abs() - FRAC_PI_4)
            .abs()
            .min((c.abs() - 3.0 * FRAC_PI_4).abs());
        if edge < 0.15 {
            continue;
        }
        let exact = clean_dos(*c, FRAC_PI_4);
        assert!(
            (d - exact).abs() < 0.02 + 0.05 * exact,
            "ω = {c}: {d} vs {exact}"
        );
    }
    assert!((h.integral() - 1.0).abs() < 1e-12);
}
