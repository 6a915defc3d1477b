//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qwalk_core::dynamics::RecordSchedule;
use qwalk_core::{Boundary, DisorderMode, Wall, WallSign};

use crate::angle::{Angle, AngleList, LogList};
use crate::commands;
use crate::error::Result;
use crate::parallel::{self, THREADS_ENV};

#[derive(Parser, Debug)]
#[command(
    name = "qwalk",
    version,
    about = "Disordered chiral quantum walks: dynamics, spectra, localization and scaling"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes the output.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve |0⟩⊗(|R⟩+i|L⟩)/√2 and record P_n(t), P_0(t) and v(t).
    Evolve(EvolveArgs),
    /// Disorder-averaged density of states and edge-state counts on a ring.
    Dos(DosArgs),
    /// Localization length from transfer-matrix Lyapunov exponents.
    Lyapunov(LyapunovArgs),
    /// Fit measured ξ(δω) or ρ(δω) to the critical forms and rescale.
    Fit(FitArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Clean,
    Spatial,
    Temporal,
}

impl From<ModeArg> for DisorderMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Clean => DisorderMode::Clean,
            ModeArg::Spatial => DisorderMode::Spatial,
            ModeArg::Temporal => DisorderMode::Temporal,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallArg {
    None,
    Plus,
    Minus,
}

impl WallArg {
    pub fn wall(self) -> Option<Wall> {
        match self {
            WallArg::None => None,
            WallArg::Plus => Some(Wall::at_origin(WallSign::Plus)),
            WallArg::Minus => Some(Wall::at_origin(WallSign::Minus)),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryArg {
    Ring,
    Open,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Ring => Boundary::Ring,
            BoundaryArg::Open => Boundary::OpenLineGuard,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelArg {
    Xi,
    Dos,
}

fn name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_owned())
        .unwrap_or_default()
}

#[derive(Args, Debug, Clone)]
pub struct EvolveArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Clean)]
    pub mode: ModeArg,
    /// Mean coin angle θ̄.
    #[arg(long, default_value = "pi/4")]
    pub theta: Angle,
    /// Disorder width δθ_s (spatial) or δθ_t (temporal).
    #[arg(long, visible_aliases = ["dtheta-s", "dtheta-t"], default_value = "0")]
    pub dtheta: Angle,
    /// Reflecting coin at the origin.
    #[arg(long, value_enum, default_value_t = WallArg::None)]
    pub wall: WallArg,
    #[arg(long, default_value_t = 100, value_parser = parse_count)]
    pub steps: usize,
    /// Ring size N (default 2·steps + 4, so the front never wraps).
    #[arg(long, visible_alias = "N", value_parser = parse_count)]
    pub sites: Option<usize>,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record every k-th step (default: every step to 100, then 40 per decade).
    #[arg(long)]
    pub stride: Option<usize>,
    /// Steps at which the full P_n is written (default: the last step).
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<usize>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Ring)]
    pub boundary: BoundaryArg,
    /// Output prefix: writes PREFIX.series.csv, PREFIX.dist.csv, PREFIX.json.
    #[arg(long)]
    pub out: PathBuf,
}

impl EvolveArgs {
    pub fn sites(&self) -> usize {
        self.sites.unwrap_or(2 * self.steps + 4)
    }

    /// The seed that enters the computation; clean runs draw nothing.
    pub fn seed(&self) -> u64 {
        if self.mode == ModeArg::Clean {
            0
        } else {
            self.seed
        }
    }

    pub fn snapshots(&self) -> Vec<usize> {
        if self.snapshots.is_empty() {
            vec![self.steps]
        } else {
            let mut s = self.snapshots.clone();
            s.sort_unstable();
            s.dedup();
            s
        }
    }

    pub fn schedule(&self) -> RecordSchedule {
        self.stride
            .map_or(RecordSchedule::Default, RecordSchedule::Stride)
    }

    pub fn canonical(&self) -> String {
        let mut c = format!(
            "qwalk evolve --mode {} --theta {} --dtheta {} --wall {} --steps {} --sites {} --samples {} --seed {}",
            name(&self.mode),
            self.theta,
            self.dtheta,
            name(&self.wall),
            self.steps,
            self.sites(),
            self.samples,
            self.seed()
        );
        if let Some(s) = self.stride {
            c += &format!(" --stride {s}");
        }
        let snaps: Vec<String> = self.snapshots().iter().map(usize::to_string).collect();
        c += &format!(
            " --snapshots {} --boundary {}",
            snaps.join(","),
            name(&self.boundary)
        );
        c
    }
}

#[derive(Args, Debug, Clone)]
pub struct DosArgs {
    #[arg(long, default_value = "pi/4")]
    pub theta: Angle,
    /// Spatial disorder width δθ_s.
    #[arg(long, visible_alias = "dtheta", default_value = "0")]
    pub dtheta_s: Angle,
    #[arg(long, visible_alias = "N", default_value_t = 500, value_parser = parse_count)]
    pub sites: usize,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reflecting coin at the origin; `none` leaves the ring uniform.
    #[arg(long, value_enum, default_value_t = WallArg::None)]
    pub wall: WallArg,
    /// Uniform bins over (−π, π]; must be even.
    #[arg(long, default_value_t = 1024)]
    pub bins: usize,
    /// Bin edges δω below π/2 instead of uniform bins, e.g. 3e-4..1e-1:13.
    #[arg(long)]
    pub log_window: Option<LogList>,
    /// Half-width of the windows at 0 and π whose states are counted as edge
    /// states and left out of ρ. Default: 0.1 of the mean level spacing when
    /// a wall is present, none otherwise. 0 disables.
    #[arg(long)]
    pub edge_tol: Option<f64>,
    /// Output prefix: writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    pub out: PathBuf,
}

impl DosArgs {
    pub fn edge_tol(&self) -> Option<f64> {
        match self.edge_tol {
            Some(t) if t > 0.0 => Some(t),
            Some(_) => None,
            None => self
                .wall
                .wall()
                .map(|_| qwalk_core::spectral::default_edge_tolerance(self.sites)),
        }
    }

    pub fn canonical(&self) -> String {
        let mut c = format!(
            "qwalk dos --theta {} --dtheta-s {} --sites {} --samples {} --seed {} --wall {}",
            self.theta,
            self.dtheta_s,
            self.sites,
            self.samples,
            self.seed,
            name(&self.wall)
        );
        match &self.log_window {
            Some(w) => c += &format!(" --log-window {w}"),
            None => c += &format!(" --bins {}", self.bins),
        }
        c += &format!(
            " --edge-tol {}",
            self.edge_tol().map_or("0".into(), crate::output::num)
        );
        c
    }
}

#[derive(Args, Debug, Clone)]
pub struct LyapunovArgs {
    #[arg(long, default_value = "pi/4")]
    pub theta: Angle,
    /// Disorder widths δθ_s; lists and ranges such as 0..2pi:9.
    #[arg(long, visible_aliases = ["dtheta", "sweep-dtheta-s"], default_value = "pi/4")]
    pub dtheta_s: AngleList,
    /// Quasi-energies ω.
    #[arg(long)]
    pub omega: Option<AngleList>,
    /// Offsets δω below π/2 (ω = π/2 − δω); ranges are geometric.
    /// Default 1e-12..1e-2:11 when no --omega is given.
    #[arg(long)]
    pub delta_omega: Option<LogList>,
    /// Chain length.
    #[arg(long, visible_alias = "N", default_value_t = 1_000_000, value_parser = parse_count)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 16)]
    pub renorm_interval: usize,
    #[arg(long, default_value_t = 100)]
    pub blocks: usize,
    /// Output prefix: writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    pub out: PathBuf,
}

impl LyapunovArgs {
    pub const DEFAULT_DELTAS: &'static str = "1e-12..1e-2:11";

    pub fn delta_omega(&self) -> Option<LogList> {
        match (&self.omega, &self.delta_omega) {
            (_, Some(d)) => Some(d.clone()),
            (None, None) => Some(Self::DEFAULT_DELTAS.parse().expect("valid default")),
            (Some(_), None) => None,
        }
    }

    pub fn canonical(&self) -> String {
        let mut c = format!(
            "qwalk lyapunov --theta {} --dtheta-s {}",
            self.theta, self.dtheta_s
        );
        if let Some(w) = &self.omega {
            c += &format!(" --omega {w}");
        }
        if let Some(d) = self.delta_omega() {
            c += &format!(" --delta-omega {d}");
        }
        c += &format!(
            " --length {} --seed {} --renorm-interval {} --blocks {}",
            self.length, self.seed, self.renorm_interval, self.blocks
        );
        c
    }
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[arg(value_enum)]
    pub model: ModelArg,
    /// Curve files written by `lyapunov` (xi) or `dos --log-window` (dos).
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Fit window in δω as LO,HI (default 1e-12,1e-3 for xi, 3e-4,1e-1 for dos).
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    /// Starting τ for the DOS fit (for example from a ξ fit); default 1.
    #[arg(long)]
    pub tau_init: Option<f64>,
    /// Output prefix: writes PREFIX.json and PREFIX.collapse.csv.
    #[arg(long)]
    pub out: PathBuf,
}

/// A non-negative integer, also written as `1e7` or `2.5e6` when exact.
fn parse_count(s: &str) -> std::result::Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) => Ok(x as usize),
        _ => Err(format!("'{s}' is not a whole number")),
    }
}

fn parse_window(s: &str) -> std::result::Result<(f64, f64), String> {
    let bad = || format!("window '{s}' must be LO,HI with 0 < LO < HI");
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > 0.0 && lo < hi && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err(bad())
    }
}

impl FitArgs {
    pub fn window(&self) -> (f64, f64) {
        match (self.window, self.model) {
            (Some(w), _) => w,
            (_, ModelArg::Xi) => qwalk_core::scaling::XI_WINDOW,
            (_, ModelArg::Dos) => qwalk_core::scaling::DOS_WINDOW,
        }
    }

    pub fn canonical(&self) -> String {
        let (lo, hi) = self.window();
        let mut c = format!("qwalk fit {}", name(&self.model));
        for p in &self.inputs {
            c += &format!(" --input {}", p.display());
        }
        c += &format!(
            " --window {},{}",
            crate::output::num(lo),
            crate::output::num(hi)
        );
        if let Some(t) = self.tau_init {
            c += &format!(" --tau-init {}", crate::output::num(t));
        }
        c
    }
}

/// Run the command line, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qwalk: error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let pool = parallel::pool(cli.threads)?;
    pool.install(|| match &cli.command {
        Command::Evolve(a) => commands::evolve(a),
        Command::Dos(a) => commands::dos(a),
        Command::Lyapunov(a) => commands::lyapunov(a),
        Command::Fit(a) => commands::fit(a),
    })
}
