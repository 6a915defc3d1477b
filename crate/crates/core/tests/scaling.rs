use proptest::prelude::*;
use qwalk_core::scaling::{
    collapse_scatter, eval_dos_model, eval_xi_model, fit_dos, fit_xi, DosPoint, XiPoint,
    DOS_WINDOW, XI_WINDOW,
};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn xi_fit_recovers_parameters(xi0 in 0.1..50.0f64, log_tau in -3.0..2.5f64) {
        let tau = 10f64.powf(log_tau);
        let pts: Vec<XiPoint> = log_grid(1e-11, 1e-4, 15)
            .into_iter()
            .map(|dw| XiPoint { delta_omega: dw, xi: eval_xi_model(dw, xi0, tau).unwrap(), stderr: 0.0 })
            .collect();
        let fit = fit_xi(&pts, XI_WINDOW).unwrap();
        prop_assert!((fit.amplitude / xi0 - 1.0).abs() < 1e-9);
        prop_assert!((fit.tau / tau - 1.0).abs() < 1e-7);
        prop_assert!(fit.residual < 1e-10);
    }

    #[test]
    fn dos_fit_recovers_parameters(rho0 in 0.01..10.0f64, log_tau in -1.0..0.8f64) {
        let tau = 10f64.powf(log_tau);
        let pts: Vec<DosPoint> = log_grid(3e-4, 0.1, 20)
            .into_iter()
            .map(|dw| DosPoint { delta_omega: dw, rho: eval_dos_model(dw, rho0, tau).unwrap() })
            .collect();
        let fit = fit_dos(&pts, DOS_WINDOW, None).unwrap();
        prop_assert!((fit.amplitude / rho0 - 1.0).abs() < 1e-6, "ρ₀ {} vs {}", fit.amplitude, rho0);
        prop_assert!((fit.tau / tau - 1.0).abs() < 1e-6, "τ {} vs {}", fit.tau, tau);
        prop_assert!(!fit.is_mismatch());
    }
}

#[test]
fn exact_curves_collapse() {
    let mut curves = Vec::new();
    for (rho0, tau) in [(0.2, 1.5), (0.5, 3.0), (1.0, 6.0)] {
        let pts: Vec<DosPoint> = log_grid(3e-4, 0.1, 20)
            .into_iter()
            .map(|dw| DosPoint {
                delta_omega: dw,
                rho: eval_dos_model(dw, rho0, tau).unwrap(),
            })
            .collect();
        let fit = fit_dos(&pts, DOS_WINDOW, None).unwrap();
        curves.push(
            pts.iter()
                .map(|p| fit.rescale(p.delta_omega, p.rho).unwrap())
                .collect::<Vec<_>>(),
        );
    }
    assert!(collapse_scatter(&curves) < 1e-6);
}

#[test]
fn too_few_points_is_an_error() {
    let pts: Vec<XiPoint> = log_grid(1e-10, 1e-4, 4)
        .into_iter()
        .map(|dw| XiPoint {
            delta_omega: dw,
            xi: -dw.ln(),
            stderr: 0.0,
        })
        .collect();
    assert!(fit_xi(&pts, XI_WINDOW).is_err());
}
