//! The four subcommands. Each resolves its configuration, computes, and
//! writes CSV plus a JSON sidecar under the `--out` prefix.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::Serialize;

use qwalk_core::dynamics::{excess_kurtosis, TrajectoryConfig};
use qwalk_core::scaling::{
    collapse_scatter, fit_dos, fit_xi, model_scatter, DosPoint, RescaledPoint, ScalingFit, XiPoint,
};
use qwalk_core::spectral::{DosBins, DosConfig};
use qwalk_core::transfer::{Energy, LyapunovConfig};

use crate::cli::{DosArgs, EvolveArgs, FitArgs, LyapunovArgs, ModelArg};
use crate::error::Result;
use crate::input::{read_curves, Observable};
use crate::output::{num, with_suffix, write_json, CsvTable, Header};
use crate::parallel;

fn wall_name(w: crate::cli::WallArg) -> &'static str {
    match w {
        crate::cli::WallArg::None => "none",
        crate::cli::WallArg::Plus => "plus",
        crate::cli::WallArg::Minus => "minus",
    }
}

#[derive(Serialize)]
struct EvolveConfig {
    mode: &'static str,
    theta: f64,
    dtheta: f64,
    wall: &'static str,
    steps: usize,
    sites: usize,
    samples: usize,
    seed: u64,
    boundary: &'static str,
    snapshots: Vec<usize>,
}

#[derive(Serialize)]
struct SnapshotSummary {
    t: usize,
    mean_position: f64,
    excess_kurtosis: f64,
}

#[derive(Serialize)]
struct EvolveResults {
    final_t: usize,
    final_p0: f64,
    final_v: f64,
    max_norm_error: f64,
    snapshots: Vec<SnapshotSummary>,
}

pub fn evolve(a: &EvolveArgs) -> Result<()> {
    let command = a.canonical();
    let cfg = TrajectoryConfig::new(a.mode.into(), a.theta.value, a.dtheta.value, a.steps)
        .with_sites(a.sites())
        .with_wall(a.wall.wall())
        .with_seed(a.seed())
        .with_schedule(a.schedule())
        .with_snapshots(a.snapshots());
    let cfg = TrajectoryConfig {
        boundary: a.boundary.into(),
        ..cfg
    };
    let ens = parallel::ensemble(&cfg, a.samples)?;

    let config = EvolveConfig {
        mode: match a.mode {
            crate::cli::ModeArg::Clean => "clean",
            crate::cli::ModeArg::Spatial => "spatial",
            crate::cli::ModeArg::Temporal => "temporal",
        },
        theta: a.theta.value,
        dtheta: a.dtheta.value,
        wall: wall_name(a.wall),
        steps: a.steps,
        sites: a.sites(),
        samples: a.samples,
        seed: a.seed(),
        boundary: match a.boundary {
            crate::cli::BoundaryArg::Ring => "ring",
            crate::cli::BoundaryArg::Open => "open",
        },
        snapshots: a.snapshots(),
    };
    let header = Header::new(command.clone())
        .field("mode", config.mode)
        .field("theta", num(config.theta))
        .field("dtheta", num(config.dtheta))
        .field("wall", config.wall)
        .field("steps", config.steps)
        .field("sites", config.sites)
        .field("samples", config.samples)
        .field("seed", config.seed)
        .field("boundary", config.boundary);

    let series_path = with_suffix(&a.out, ".series.csv");
    let mut series = CsvTable::create(
        &series_path,
        &header,
        &["t", "P0", "v", "stderr_P0", "stderr_v"],
    )?;
    for i in 0..ens.times.len() {
        series.row([
            ens.times[i].to_string(),
            num(ens.survival_mean[i]),
            num(ens.variance_mean[i]),
            num(ens.survival_stderr[i]),
            num(ens.variance_stderr[i]),
        ])?;
    }
    series.finish()?;

    let dist_path = with_suffix(&a.out, ".dist.csv");
    let mut dist = CsvTable::create(&dist_path, &header, &["t", "n", "P", "stderr"])?;
    let n0 = ens.min_site();
    for s in &ens.snapshots {
        for (i, (p, e)) in s.mean.iter().zip(&s.stderr).enumerate() {
            dist.row([
                s.t.to_string(),
                (n0 + i as i64).to_string(),
                num(*p),
                num(*e),
            ])?;
        }
    }
    dist.finish()?;

    let last = ens.times.len() - 1;
    let results = EvolveResults {
        final_t: ens.times[last],
        final_p0: ens.survival_mean[last],
        final_v: ens.variance_mean[last],
        max_norm_error: ens.max_norm_error,
        snapshots: ens
            .snapshots
            .iter()
            .map(|s| SnapshotSummary {
                t: s.t,
                mean_position: s
                    .mean
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (n0 + i as i64) as f64 * p)
                    .sum(),
                excess_kurtosis: excess_kurtosis(&s.mean, n0),
            })
            .collect(),
    };
    write_json(&with_suffix(&a.out, ".json"), &command, &config, &results)?;
    println!(
        "wrote {} and {}: t = {}, P0 = {}, v = {}",
        series_path.display(),
        dist_path.display(),
        results.final_t,
        num(results.final_p0),
        num(results.final_v)
    );
    Ok(())
}

#[derive(Serialize)]
struct DosRunConfig {
    theta: f64,
    dtheta_s: f64,
    sites: usize,
    samples: usize,
    seed: u64,
    wall: &'static str,
    bins: String,
    edge_tol: Option<f64>,
}

#[derive(Serialize)]
struct EdgeStates {
    at_zero: f64,
    at_pi: f64,
    tol: Option<f64>,
}

#[derive(Serialize)]
struct DosResults {
    integral: f64,
    edge_states: EdgeStates,
}

pub fn dos(a: &DosArgs) -> Result<()> {
    let command = a.canonical();
    let mut cfg = DosConfig::new(a.theta.value, a.dtheta_s.value, a.sites, a.samples);
    cfg.seed = a.seed;
    cfg.wall = a.wall.wall();
    cfg.edge_tol = a.edge_tol();
    let deltas = a.log_window.as_ref().map(|w| {
        let mut d = w.values.clone();
        d.sort_by(|x, y| y.total_cmp(x));
        d.dedup();
        d
    });
    cfg.bins = match &deltas {
        Some(d) => DosBins::Symmetric(d.iter().map(|x| FRAC_PI_2 - x).collect()),
        None => DosBins::Uniform(a.bins),
    };
    let h = parallel::dos(&cfg)?;

    let config = DosRunConfig {
        theta: a.theta.value,
        dtheta_s: a.dtheta_s.value,
        sites: a.sites,
        samples: a.samples,
        seed: a.seed,
        wall: wall_name(a.wall),
        bins: match &a.log_window {
            Some(w) => format!("log-window {w}"),
            None => format!("uniform {}", a.bins),
        },
        edge_tol: cfg.edge_tol,
    };
    let header = Header::new(command.clone())
        .field("theta", num(config.theta))
        .field("dtheta_s", num(config.dtheta_s))
        .field("sites", config.sites)
        .field("samples", config.samples)
        .field("seed", config.seed)
        .field("wall", config.wall)
        .field("bins", &config.bins)
        .field("edge_tol", config.edge_tol.map_or("none".into(), num))
        .field("edge_states_at_zero", num(h.edge_states.0))
        .field("edge_states_at_pi", num(h.edge_states.1));

    let path = with_suffix(&a.out, ".csv");
    match &deltas {
        Some(d) => {
            let mut t = CsvTable::create(&path, &header, &["omega", "delta_omega", "rho"])?;
            for (w, rho) in d.windows(2).zip(&h.density) {
                let dw = (w[0] * w[1]).sqrt();
                t.row([num(FRAC_PI_2 - dw), num(dw), num(*rho)])?;
            }
            t.finish()?;
        }
        None => {
            let mut t = CsvTable::create(&path, &header, &["omega", "rho"])?;
            for (c, rho) in h.centers().iter().zip(&h.density) {
                t.row([num(*c), num(*rho)])?;
            }
            t.finish()?;
        }
    }
    let results = DosResults {
        integral: h.integral(),
        edge_states: EdgeStates {
            at_zero: h.edge_states.0,
            at_pi: h.edge_states.1,
            tol: cfg.edge_tol,
        },
    };
    write_json(&with_suffix(&a.out, ".json"), &command, &config, &results)?;
    println!(
        "wrote {}: {} samples, edge states ({}, {})",
        path.display(),
        a.samples,
        num(h.edge_states.0),
        num(h.edge_states.1)
    );
    Ok(())
}

#[derive(Serialize)]
struct LyapunovRunConfig {
    theta: f64,
    dtheta_s: Vec<f64>,
    omega: Vec<f64>,
    delta_omega: Vec<f64>,
    length: usize,
    seed: u64,
    renorm_interval: usize,
    blocks: usize,
}

#[derive(Serialize)]
struct LyapunovRow {
    omega: f64,
    delta_omega: f64,
    dtheta_s: f64,
    gamma: f64,
    gamma_raw: f64,
    gamma_stderr: f64,
    xi: f64,
    xi_stderr: f64,
    resampled: u64,
    interval_reductions: u32,
}

pub fn lyapunov(a: &LyapunovArgs) -> Result<()> {
    let command = a.canonical();
    let omegas = a
        .omega
        .as_ref()
        .map(|o| o.values.clone())
        .unwrap_or_default();
    let deltas = a.delta_omega().map(|d| d.values).unwrap_or_default();
    let energies: Vec<Energy> = omegas
        .iter()
        .map(|&w| Energy::Phase(w))
        .chain(deltas.iter().map(|&d| Energy::BelowHalfPi(d)))
        .collect();
    let mut cfgs = Vec::new();
    for &w in &a.dtheta_s.values {
        for &e in &energies {
            let mut c = LyapunovConfig::new(e, a.theta.value, w, a.length).with_seed(a.seed);
            c.renorm_interval = a.renorm_interval;
            c.blocks = a.blocks;
            c.validate()?;
            cfgs.push(c);
        }
    }
    let results = parallel::lyapunov_table(&cfgs)?;

    let config = LyapunovRunConfig {
        theta: a.theta.value,
        dtheta_s: a.dtheta_s.values.clone(),
        omega: omegas,
        delta_omega: deltas,
        length: a.length,
        seed: a.seed,
        renorm_interval: a.renorm_interval,
        blocks: a.blocks,
    };
    let header = Header::new(command.clone())
        .field("theta", num(config.theta))
        .field("length", config.length)
        .field("seed", config.seed)
        .field("renorm_interval", config.renorm_interval)
        .field("blocks", config.blocks);
    let path = with_suffix(&a.out, ".csv");
    let mut t = CsvTable::create(
        &path,
        &header,
        &[
            "omega",
            "delta_omega",
            "dtheta_s",
            "xi",
            "stderr",
            "N",
            "seed",
        ],
    )?;
    let mut rows = Vec::with_capacity(results.len());
    for r in &results {
        let dw = r.delta_omega.unwrap_or(FRAC_PI_2 - r.omega);
        t.row([
            num(r.omega),
            num(dw),
            num(r.width),
            num(r.xi),
            num(r.xi_stderr),
            r.length.to_string(),
            r.seed.to_string(),
        ])?;
        if r.interval_reductions > 0 {
            eprintln!(
                "qwalk: warning: ω = {}, δθ_s = {}: renormalization interval halved {} times to avoid overflow",
                num(r.omega),
                num(r.width),
                r.interval_reductions
            );
        }
        rows.push(LyapunovRow {
            omega: r.omega,
            delta_omega: dw,
            dtheta_s: r.width,
            gamma: r.gamma,
            gamma_raw: r.gamma_raw,
            gamma_stderr: r.stderr,
            xi: r.xi,
            xi_stderr: r.xi_stderr,
            resampled: r.resampled,
            interval_reductions: r.interval_reductions,
        });
    }
    t.finish()?;
    write_json(&with_suffix(&a.out, ".json"), &command, &config, &rows)?;
    println!("wrote {}: {} points", path.display(), rows.len());
    Ok(())
}

#[derive(Serialize)]
struct FitRunConfig {
    model: &'static str,
    inputs: Vec<String>,
    window: (f64, f64),
    tau_init: Option<f64>,
}

#[derive(Serialize)]
struct CurveFit {
    label: String,
    dtheta_s: Option<f64>,
    amplitude_name: &'static str,
    amplitude: f64,
    tau: f64,
    residual: f64,
    points: usize,
    iterations: usize,
    mismatch: bool,
}

#[derive(Serialize)]
struct FitResults {
    fits: Vec<CurveFit>,
    /// Largest log-distance between rescaled curves.
    collapse_scatter: f64,
    /// Spread of ln(data/model) over all points.
    model_scatter: f64,
}

pub fn fit(a: &FitArgs) -> Result<()> {
    let command = a.canonical();
    let window = a.window();
    let observable = match a.model {
        ModelArg::Xi => Observable::Xi,
        ModelArg::Dos => Observable::Dos,
    };
    let mut curves = Vec::new();
    for p in &a.inputs {
        curves.extend(read_curves(p, observable)?);
    }
    let inside = |dw: f64| dw >= window.0 && dw <= window.1;
    let mut fits: Vec<(ScalingFit, Vec<(f64, RescaledPoint)>)> = Vec::new();
    for c in &curves {
        let f = match a.model {
            ModelArg::Xi => fit_xi(
                &c.points
                    .iter()
                    .map(|p| XiPoint {
                        delta_omega: p.delta_omega,
                        xi: p.value,
                        stderr: p.stderr,
                    })
                    .collect::<Vec<_>>(),
                window,
            ),
            ModelArg::Dos => fit_dos(
                &c.points
                    .iter()
                    .map(|p| DosPoint {
                        delta_omega: p.delta_omega,
                        rho: p.value,
                    })
                    .collect::<Vec<_>>(),
                window,
                a.tau_init,
            ),
        }
        .map_err(|e| match e {
            qwalk_core::Error::Fit { reason, trace } => qwalk_core::Error::Fit {
                reason: format!("{}: {reason}", c.label),
                trace,
            },
            other => other,
        })?;
        let pts = c
            .points
            .iter()
            .filter(|p| inside(p.delta_omega))
            .map(|p| Ok((p.delta_omega, f.rescale(p.delta_omega, p.value)?)))
            .collect::<std::result::Result<Vec<_>, qwalk_core::Error>>()?;
        fits.push((f, pts));
    }
    let rescaled: Vec<Vec<RescaledPoint>> = fits
        .iter()
        .map(|(_, p)| p.iter().map(|(_, r)| *r).collect())
        .collect();
    let results = FitResults {
        fits: fits
            .iter()
            .zip(&curves)
            .map(|((f, _), c)| CurveFit {
                label: c.label.clone(),
                dtheta_s: c.dtheta_s,
                amplitude_name: match a.model {
                    ModelArg::Xi => "xi0",
                    ModelArg::Dos => "rho0",
                },
                amplitude: f.amplitude,
                tau: f.tau,
                residual: f.residual,
                points: f.points,
                iterations: f.iterations,
                mismatch: f.is_mismatch(),
            })
            .collect(),
        collapse_scatter: collapse_scatter(&rescaled),
        model_scatter: model_scatter(&rescaled),
    };
    let config = FitRunConfig {
        model: match a.model {
            ModelArg::Xi => "xi",
            ModelArg::Dos => "dos",
        },
        inputs: a.inputs.iter().map(|p| p.display().to_string()).collect(),
        window,
        tau_init: a.tau_init,
    };
    write_json(&with_suffix(&a.out, ".json"), &command, &config, &results)?;
    let header = Header::new(command.clone())
        .field("model", config.model)
        .field("window", format!("{},{}", num(window.0), num(window.1)))
        .field("collapse_scatter", num(results.collapse_scatter));
    write_collapse(
        &with_suffix(&a.out, ".collapse.csv"),
        &header,
        a.model,
        &curves,
        &fits,
    )?;
    for f in &results.fits {
        println!(
            "{}: {} = {}, tau = {}, residual = {}{}",
            f.label,
            f.amplitude_name,
            num(f.amplitude),
            num(f.tau),
            num(f.residual),
            if f.mismatch { " (model mismatch)" } else { "" }
        );
    }
    println!("collapse scatter {}", num(results.collapse_scatter));
    Ok(())
}

fn write_collapse(
    path: &Path,
    header: &Header,
    model: ModelArg,
    curves: &[crate::input::Curve],
    fits: &[(ScalingFit, Vec<(f64, RescaledPoint)>)],
) -> Result<()> {
    let mut t = CsvTable::create(
        path,
        header,
        &[
            "curve",
            "dtheta_s",
            "delta_omega",
            "x",
            "y",
            "model",
            "ratio",
        ],
    )?;
    for (k, (c, (_, pts))) in curves.iter().zip(fits).enumerate() {
        for (dw, r) in pts {
            let line = match model {
                ModelArg::Xi => r.x.ln().abs(),
                ModelArg::Dos => 1.0,
            };
            t.row([
                k.to_string(),
                c.dtheta_s.map_or(String::new(), num),
                num(*dw),
                num(r.x),
                num(r.y),
                num(line),
                num(r.ratio),
            ])?;
        }
    }
    t.finish()
}
