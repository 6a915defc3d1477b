use std::f64::consts::{FRAC_PI_4, PI};

use proptest::prelude::*;
use qwalk_core::dynamics::{
    probability_distribution, run_trajectory, RecordSchedule, TrajectoryConfig,
};
use qwalk_core::rng::generator;
use qwalk_core::{
    initial_state, step, Boundary, Chirality, CoinField, Complex64, DisorderMode, WalkerState,
    Wall, WallSign,
};
use rand::Rng;

fn random_state(sites: usize, seed: u64) -> WalkerState {
    let mut g = generator(seed);
    let v: Vec<Complex64> = (0..2 * sites)
        .map(|_| Complex64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5))
        .collect();
    let mut s = WalkerState::from_vector(&v).unwrap();
    s.normalize().unwrap();
    s
}

fn wall_from(k: u8) -> Option<Wall> {
    match k % 3 {
        0 => None,
        1 => Some(Wall::at_origin(WallSign::Plus)),
        _ => Some(Wall::at_origin(WallSign::Minus)),
    }
}

#[test]
fn ten_thousand_random_states_keep_their_norm() {
    let field = CoinField::sample_spatial(0.7, 1.3, 16, 5)
        .unwrap()
        .with_wall(Wall::at_origin(WallSign::Minus))
        .unwrap();
    let mut worst = 0.0f64;
    for k in 0..10_000 {
        let s = random_state(16, k);
        let out = step(&s, &field, Boundary::Ring, 0).unwrap();
        worst = worst.max((out.norm_sqr() - 1.0).abs());
    }
    assert!(worst < 1e-14, "worst norm drift {worst:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn step_is_unitary(
        half in 2usize..40,
        mean in -PI..PI,
        width in 0.0..2.0 * PI,
        temporal in any::<bool>(),
        wall in 0u8..3,
        seed in any::<u64>(),
    ) {
        let sites = 2 * half;
        let field = if temporal {
            CoinField::sample_temporal(mean, width, sites, 4, seed)
        } else {
            CoinField::sample_spatial(mean, width, sites, seed)
        }
        .unwrap()
        .with_optional_wall(wall_from(wall))
        .unwrap();
        let mut s = random_state(sites, seed ^ 1);
        for t in 0..4 {
            s = step(&s, &field, Boundary::Ring, t).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spatial_angles_stay_in_window(
        mean in -10.0..10.0f64,
        width in 0.0..7.0f64,
        seed in any::<u64>(),
    ) {
        let f = CoinField::sample_spatial(mean, width, 64, seed).unwrap();
        for &a in f.angles() {
            prop_assert!(a >= mean - width / 2.0 && a <= mean + width / 2.0);
        }
        let again = CoinField::sample_spatial(mean, width, 64, seed).unwrap();
        prop_assert_eq!(f.angles(), again.angles());
    }

    #[test]
    fn minus_wall_reverses_chirality(theta in -PI..PI, right in any::<bool>()) {
        let sites = 12;
        let field = CoinField::clean(sites, theta)
            .unwrap()
            .with_wall(Wall::at_origin(WallSign::Minus))
            .unwrap();
        let (chi, out_site, out_chi, sign) = if right {
            (Chirality::R, -1, Chirality::L, -1.0)
        } else {
            (Chirality::L, 1, Chirality::R, 1.0)
        };
        let s = WalkerState::delta(sites, 0, chi).unwrap();
        let out = step(&s, &field, Boundary::Ring, 0).unwrap();
        let a = out.amplitude(out_site, out_chi).unwrap();
        prop_assert!((a - Complex64::new(sign, 0.0)).norm() < 1e-15);
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn clean_walk_is_mirror_symmetric() {
    let sites = 2 * 100 + 4;
    let field = CoinField::clean(sites, FRAC_PI_4).unwrap();
    let mut s = initial_state(sites).unwrap();
    let o = sites / 2;
    for t in 0..100 {
        s = step(&s, &field, Boundary::Ring, t).unwrap();
        let p = probability_distribution(&s);
        let worst = (1..o)
            .map(|n| (p[o + n] - p[o - n]).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "t = {}: asymmetry {worst:e}", t + 1);
    }
}

#[test]
fn spatial_mean_within_three_sigma() {
    let (mean, width, n) = (FRAC_PI_4, FRAC_PI_4, 1_000_000);
    let f = CoinField::sample_spatial(mean, width, n, 2024).unwrap();
    let m = f.angles().iter().sum::<f64>() / n as f64;
    let sigma = width / (12.0 * n as f64).sqrt();
    assert!(
        (m - mean).abs() < 3.0 * sigma,
        "mean {m} off by {}",
        (m - mean).abs() / sigma
    );
}

#[test]
fn probability_conserved_over_ten_thousand_steps() {
    let steps = 10_000;
    for (mode, width, wall) in [
        (
            DisorderMode::Clean,
            0.0,
            Some(Wall::at_origin(WallSign::Minus)),
        ),
        (DisorderMode::Spatial, FRAC_PI_4, None),
        (
            DisorderMode::Temporal,
            FRAC_PI_4,
            Some(Wall::at_origin(WallSign::Plus)),
        ),
    ] {
        let cfg = TrajectoryConfig::new(mode, FRAC_PI_4, width, steps)
            .with_wall(wall)
            .with_seed(9)
            .with_schedule(RecordSchedule::Stride(1))
            .with_snapshots(vec![]);
        let tr = run_trajectory(&cfg).unwrap();
        assert!(
            tr.max_norm_error < 1e-10,
            "{mode:?}: {:e}",
            tr.max_norm_error
        );
    }
}

#[test]
fn open_line_guard_refuses_to_lose_probability() {
    let field = CoinField::clean(8, 0.0).unwrap();
    let mut s = WalkerState::delta(8, 0, Chirality::R).unwrap();
    let mut hit = None;
    for t in 0..8 {
        match step(&s, &field, Boundary::OpenLineGuard, t) {
            Ok(next) => s = next,
            Err(e) => {
                hit = Some(e);
                break;
            }
        }
    }
    assert!(matches!(
        hit,
        Some(qwalk_core::Error::BoundaryReached { .. })
    ));
    assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
}
