//! Command-line front end.
//!
//! Parameter precedence: explicit flag, then `--config` JSON (keys are the
//! flag names without dashes, e.g. `"t-min"`, `"H"`), then `CAPSMOOTH_SEED`
//! for the seed, then the built-in default.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use capsmooth_core::bounds::{smoothness_alpha, GridPoint};
use capsmooth_core::condnum::{ConditionNumber, ConicProblem};
use capsmooth_core::distributions::{AdversarialLaw, Cap, RadialProfile};
use capsmooth_core::geometry::ProjPoint;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::commands::{self, Output};
use crate::error::{CliError, Result};
use crate::montecarlo::{ExperimentConfig, Scale};
use crate::profile::load_profile;
use crate::report::Format;
use crate::verify::{self, VerifyConfig};

pub const SEED_ENV: &str = "CAPSMOOTH_SEED";

#[derive(Debug, Parser)]
#[command(name = "capsmooth", version, about = "Smoothed analysis of conic condition numbers on projective caps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sphere volumes O_m, cap integrals I_m(sigma) and their sandwich bounds for m = 1..n
    Volumes(Flags),
    /// Emit draws from the cap law
    Sample(Flags),
    /// Monte Carlo tail of C (or ln C) against the tail bound
    Tail(Flags),
    /// Monte Carlo mean of ln C against the expectation bound
    Expect(Flags),
    /// Boosting inequality sweep (default grid unless a parameter is given)
    BoostCheck(Flags),
    /// Smoothness ratio ln mu(B) / ln nu(B) at shrinking radii
    Smoothness(Flags),
    /// Closing inequality on a log grid of n up to 10^6
    SmallCalc(Flags),
    /// Full acceptance suite
    Verify {
        /// Smaller Monte Carlo sample sizes
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        flags: Flags,
    },
}

/// Flags shared by every subcommand. All are optional here; defaults are
/// applied in [`Flags::resolve`].
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Flags {
    /// Projective dimension n [default: 3; m^2-1 for matrix:<m>]
    #[arg(long)]
    pub n: Option<u32>,
    /// Degree d of the hypersurface containing the ill-posed set [default: the problem's degree]
    #[arg(long)]
    pub d: Option<u32>,
    /// Cap radius sigma in (0, 1] [default: 0.5]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Pole order beta in [0, n) [default: 0]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Profile sup H used in the bounds [default: sup of the profile, 1 without one]
    #[arg(long = "H")]
    #[serde(rename = "H")]
    pub h: Option<f64>,
    /// CSV file of (r, h) pairs for the radial profile [default: h = 1]
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Boosting slack eps in (0, 1 - beta/n) [default: (1 - beta/n)/2]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Monte Carlo sample count [default: 100000]
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed [default: $CAPSMOOTH_SEED, else 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Smallest threshold [default: start of the bound's domain]
    #[arg(long = "t-min")]
    pub t_min: Option<f64>,
    /// Largest threshold [default: max(1e4, 10 t-min) for C, t-min + 6 for ln C]
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    /// Number of thresholds [default: 25]
    #[arg(long = "t-steps")]
    pub t_steps: Option<usize>,
    /// hyperplane | union:<k> | matrix:<m> [default: hyperplane]
    #[arg(long)]
    pub problem: Option<String>,
    /// pole | random | coords:<c0,c1,...> [default: pole]
    #[arg(long)]
    pub center: Option<String>,
    /// Output file [default: standard output]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json [default: csv]
    #[arg(long)]
    pub format: Option<String>,
    /// Threshold scale for tails: condition (C >= t) | log (ln C > t)
    /// [default: condition for the uniform law, log otherwise]
    #[arg(long)]
    pub scale: Option<String>,
    /// JSON file whose keys mirror the flag names
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! fill {
    ($dst:ident, $src:ident, $($field:ident),+) => {
        $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )+
    };
}

impl Flags {
    /// Fills unset flags from `other`.
    fn or(mut self, other: &Flags) -> Flags {
        fill!(self, other, n, d, sigma, beta, h, profile, eps, samples, seed, workers, t_min, t_max, t_steps, problem, center, out, format, scale);
        self
    }

    fn with_config(self) -> Result<Flags> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let file = File::open(&path).map_err(|e| CliError::invalid(format!("cannot open config {}: {e}", path.display())))?;
        let from_file: Flags = serde_json::from_reader(io::BufReader::new(file))
            .map_err(|e| CliError::invalid(format!("config {}: {e}", path.display())))?;
        Ok(self.or(&from_file))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemSpec {
    Hyperplane,
    Union(usize),
    Matrix(usize),
}

impl std::str::FromStr for ProblemSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let count = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| CliError::invalid(format!("bad problem size in '{s}'")))
        };
        match s.split_once(':') {
            None if s == "hyperplane" => Ok(ProblemSpec::Hyperplane),
            Some(("union", k)) => Ok(ProblemSpec::Union(count(k)?)),
            Some(("matrix", m)) => Ok(ProblemSpec::Matrix(count(m)?)),
            _ => Err(CliError::invalid(format!("unknown problem '{s}'"))),
        }
    }
}

/// Fully resolved parameters.
#[derive(Debug, Clone)]
pub struct Params {
    pub problem: ConicProblem,
    pub n: u32,
    pub d: u32,
    pub sigma: f64,
    pub beta: f64,
    pub h: f64,
    pub eps: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_steps: usize,
    pub law: AdversarialLaw,
    pub scale: Scale,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// Flags that narrow a checker sweep to one point.
    pub explicit_point: bool,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::invalid(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn parse_center(spec: &str, problem: &ConicProblem, seed: u64) -> Result<ProjPoint> {
    let n = problem.dim();
    match spec.split_once(':') {
        None if spec == "pole" => Ok(problem.ill_posed_point()),
        None if spec == "random" => Ok(verify::random_center(n, seed)),
        Some(("coords", list)) => {
            let coords = list
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| CliError::invalid(format!("bad coordinates '{list}'")))?;
            if coords.len() != n + 1 {
                return Err(CliError::invalid(format!("center needs {} coordinates, got {}", n + 1, coords.len())));
            }
            Ok(ProjPoint::normalize(&coords)?)
        }
        _ => Err(CliError::invalid(format!("unknown center '{spec}'"))),
    }
}

impl Flags {
    pub fn resolve(self) -> Result<Params> {
        let f = self.with_config()?;
        let spec: ProblemSpec = f.problem.as_deref().unwrap_or("hyperplane").parse()?;
        let problem = match spec {
            ProblemSpec::Hyperplane => ConicProblem::hyperplane(f.n.unwrap_or(3) as usize)?,
            ProblemSpec::Union(k) => ConicProblem::coordinate_hyperplanes(f.n.unwrap_or(3) as usize, k)?,
            ProblemSpec::Matrix(m) => ConicProblem::matrix(m)?,
        };
        let n = problem.dim() as u32;
        if let Some(given) = f.n {
            if given != n {
                return Err(CliError::invalid(format!("--n {given} does not match the problem dimension {n}")));
            }
        }
        let d = f.d.unwrap_or(problem.degree());
        if d < problem.degree() {
            return Err(CliError::invalid(format!("--d {d} is below the problem degree {}", problem.degree())));
        }
        let sigma = f.sigma.unwrap_or(0.5);
        let beta = f.beta.unwrap_or(0.0);
        let seed = match f.seed {
            Some(s) => s,
            None => env_seed()?.unwrap_or(0),
        };
        let center = parse_center(f.center.as_deref().unwrap_or("pole"), &problem, seed)?;
        let cap = Cap::new(center, sigma)?;
        let profile = match &f.profile {
            Some(path) => load_profile(path, n, beta, sigma)?,
            None => RadialProfile::constant_one(n, beta, sigma)?,
        };
        let law = AdversarialLaw::new(cap, beta, profile)?;
        let h = f.h.unwrap_or(law.h_sup());
        if !(h >= 1.0 && h >= law.h_sup() * (1.0 - 1e-12)) {
            return Err(CliError::invalid(format!("--H {h} must be at least max(1, sup h = {})", law.h_sup())));
        }
        let alpha = smoothness_alpha(n, beta)?;
        let eps = f.eps.unwrap_or(0.5 * alpha);
        if !(eps > 0.0 && eps < alpha) {
            return Err(CliError::invalid(format!("--eps {eps} must lie in (0, {alpha})")));
        }
        let scale = match f.scale.as_deref() {
            None if law.is_uniform() => Scale::Condition,
            None => Scale::Log,
            Some("condition") => Scale::Condition,
            Some("log") => Scale::Log,
            Some(other) => return Err(CliError::invalid(format!("unknown scale '{other}'"))),
        };
        let format = match f.format.as_deref().unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(CliError::invalid(format!("unknown format '{other}'"))),
        };
        let samples = f.samples.unwrap_or(100_000);
        let workers = f.workers.unwrap_or_else(default_workers);
        if samples == 0 || workers == 0 {
            return Err(CliError::invalid("--samples and --workers must be at least 1"));
        }
        Ok(Params {
            explicit_point: f.n.is_some() || f.beta.is_some() || f.h.is_some() || f.sigma.is_some() || f.eps.is_some(),
            problem,
            n,
            d,
            sigma,
            beta,
            h,
            eps,
            samples,
            seed,
            workers,
            t_min: f.t_min,
            t_max: f.t_max,
            t_steps: f.t_steps.unwrap_or(25),
            law,
            scale,
            out: f.out,
            format,
        })
    }
}

impl Params {
    pub fn experiment(&self) -> ExperimentConfig<ConicProblem> {
        ExperimentConfig {
            problem: self.problem.clone(),
            law: self.law.clone(),
            d: self.d,
            h_sup: self.h,
            samples: self.samples,
            t_grid: Vec::new(),
            scale: self.scale,
            seed: self.seed,
            workers: self.workers,
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code:
/// 0 success, 1 a bound or inequality was violated, 2 invalid parameters.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    match dispatch(cli.command) {
        Ok(violation) => {
            eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
            i32::from(violation)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    let output = match command {
        Command::Volumes(f) => {
            let p = f.resolve()?;
            (commands::volumes(p.n, p.sigma)?, p)
        }
        Command::Sample(f) => {
            let p = f.resolve()?;
            (commands::sample(&p.experiment())?, p)
        }
        Command::Tail(f) => {
            let p = f.resolve()?;
            let mut cfg = p.experiment();
            cfg.t_grid = commands::tail_grid(&cfg, p.t_min, p.t_max, p.t_steps)?;
            (commands::tail(&cfg)?, p)
        }
        Command::Expect(f) => {
            let p = f.resolve()?;
            (commands::expect(&p.experiment())?, p)
        }
        Command::BoostCheck(f) => {
            let p = f.resolve()?;
            let points = if p.explicit_point {
                vec![GridPoint { n: p.n, beta: p.beta, h_sup: p.h, sigma: p.sigma, eps: p.eps }]
            } else {
                commands::default_boost_points()
            };
            (commands::boost_check(&points, p.d)?, p)
        }
        Command::Smoothness(f) => {
            let p = f.resolve()?;
            (commands::smoothness(&p.experiment())?, p)
        }
        Command::SmallCalc(f) => {
            let given = f.n;
            let p = f.resolve()?;
            let ns = match given {
                Some(n) => vec![n],
                None => verify::small_calc_ns(),
            };
            (commands::small_calc(&ns)?, p)
        }
        Command::Verify { quick, flags } => {
            let p = flags.resolve()?;
            let cfg = VerifyConfig { quick, seed: p.seed, workers: p.workers };
            (commands::verify(&cfg)?, p)
        }
    };
    let (out, params) = output;
    write_output(&out, &params)?;
    Ok(out.violation)
}

fn write_output(out: &Output, params: &Params) -> Result<()> {
    match &params.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::invalid(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            out.table.write(params.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            out.table.write(params.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
