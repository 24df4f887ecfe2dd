//! Subcommand bodies: each turns resolved parameters into a report table and
//! says whether a bound or inequality was violated.

use capsmooth_core::bounds::{boosting_row, compare_expectation_bounds, small_calc_row, smoothness_alpha, smoothness_ratio, BoostParams, CheckGrid, GridPoint};
use capsmooth_core::condnum::{ConditionNumber, ConicProblem};
use capsmooth_core::stream::sample_rng;
use capsmooth_core::volumes::{cap_integral, cap_integral_bounds, sphere_volume, UpperBranch};

use crate::error::Result;
use crate::montecarlo::{
    estimate_expectation, estimate_tail, linear_grid, log_grid, ExpectationReport, ExperimentConfig, Scale,
    TailReport,
};
use crate::report::{format_float, Cell, Table};
use crate::verify::{self, VerifyConfig};

/// A finished subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Table,
    pub violation: bool,
}

fn coords_text(c: &[f64]) -> String {
    c.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(";")
}

fn experiment_meta(t: &mut Table, cfg: &ExperimentConfig<ConicProblem>) {
    t.meta("n", cfg.law.n());
    t.meta("d", cfg.d);
    t.meta("sigma", cfg.law.sigma());
    t.meta("beta", cfg.law.beta());
    t.meta("H", cfg.h_sup);
    t.meta("samples", cfg.samples);
    t.meta("seed", cfg.seed);
    t.meta("scale", cfg.scale.as_str());
    t.meta("center", coords_text(cfg.law.cap().center().coords()));
}

pub fn tail_table(cfg: &ExperimentConfig<ConicProblem>, report: &TailReport) -> Table {
    let mut t = Table::new(
        "tail",
        &["t", "count", "survival", "wilson_lo", "wilson_hi", "bound", "applicable", "violation"],
    );
    experiment_meta(&mut t, cfg);
    t.meta("threshold", report.threshold);
    for r in &report.rows {
        t.push(vec![
            r.t.into(),
            r.count.into(),
            r.survival.into(),
            r.wilson_lo.into(),
            r.wilson_hi.into(),
            r.bound.into(),
            r.applicable.into(),
            r.violation.into(),
        ]);
    }
    t
}

/// For a non-uniform law the proof-chain form of the bound is appended, with
/// a flag when the stated form is the smaller one.
pub fn expectation_table(cfg: &ExperimentConfig<ConicProblem>, r: &ExpectationReport) -> Result<Table> {
    let mut columns = vec!["samples", "mean", "stderr", "n_effective", "redraws", "bound", "margin"];
    let mut row: Vec<Cell> = vec![
        r.samples.into(),
        r.mean.into(),
        r.stderr.into(),
        r.n_effective.into(),
        r.redraws.into(),
        r.bound.into(),
        r.margin.into(),
    ];
    if !cfg.law.is_uniform() {
        let law = &cfg.law;
        let c = compare_expectation_bounds(law.n(), cfg.d, law.sigma(), law.beta(), cfg.h_sup)?;
        columns.extend(["bound_chain", "stated_below_chain"]);
        row.extend([c.chain.into(), c.stated_below_chain.into()]);
    }
    let mut t = Table::new("expect", &columns);
    experiment_meta(&mut t, cfg);
    t.push(row);
    Ok(t)
}

/// Threshold grid for a tail run: log-spaced on the `C` scale, linear on
/// the `ln C` scale.
pub fn tail_grid(cfg: &ExperimentConfig<ConicProblem>, t_min: Option<f64>, t_max: Option<f64>, steps: usize) -> Result<Vec<f64>> {
    let lo = match t_min {
        Some(t) => t,
        None => cfg.bound_threshold()?,
    };
    let hi = match (t_max, cfg.scale) {
        (Some(t), _) => t,
        (None, Scale::Condition) => (1e4f64).max(10.0 * lo),
        (None, Scale::Log) => lo + 6.0,
    };
    if !(lo < hi) && steps > 1 {
        return Err(crate::error::CliError::invalid(format!("t-min {lo} must be below t-max {hi}")));
    }
    Ok(match cfg.scale {
        Scale::Condition if lo > 0.0 => log_grid(lo, hi, steps),
        _ => linear_grid(lo, hi, steps),
    })
}

pub fn tail(cfg: &ExperimentConfig<ConicProblem>) -> Result<Output> {
    let report = estimate_tail(cfg)?;
    Ok(Output {
        violation: report.violations() > 0,
        table: tail_table(cfg, &report),
    })
}

pub fn expect(cfg: &ExperimentConfig<ConicProblem>) -> Result<Output> {
    let report = estimate_expectation(cfg)?;
    Ok(Output {
        violation: report.margin < 0.0,
        table: expectation_table(cfg, &report)?,
    })
}

/// Draws from the law, one row per sample: index, radius, coordinates.
pub fn sample(cfg: &ExperimentConfig<ConicProblem>) -> Result<Output> {
    let n = cfg.law.n() as usize;
    let mut columns: Vec<String> = ["index", "r", "condition"].map(String::from).to_vec();
    columns.extend((0..=n).map(|i| format!("x{i}")));
    let mut t = Table::new("sample", &columns);
    experiment_meta(&mut t, cfg);
    for i in 0..cfg.samples {
        let (z, r) = cfg.law.sample_with_radius(&mut sample_rng(cfg.seed, i));
        let mut row: Vec<Cell> = vec![i.into(), r.into(), cfg.problem.evaluate(&z).into()];
        row.extend(z.coords().iter().map(|&x| Cell::from(x)));
        t.push(row);
    }
    Ok(Output { table: t, violation: false })
}

/// `O_m`, `I_m(σ)` and the sandwich bounds for `m = 1..=n`.
pub fn volumes(n: u32, sigma: f64) -> Result<Output> {
    let mut t = Table::new(
        "volumes",
        &["m", "sigma", "sphere_volume", "cap_integral", "lower", "upper", "branch", "lower_holds", "upper_holds"],
    );
    t.meta("n", n);
    t.meta("sigma", sigma);
    let mut violation = false;
    for m in 1..=n {
        let mf = f64::from(m);
        let v = cap_integral(mf, sigma)?;
        let b = cap_integral_bounds(mf, sigma)?;
        let slack = 1e-12 * b.upper;
        let lower_holds = b.lower <= v + slack;
        // only the lower side counts as a violation; the upper side has a
        // known failure region near σ = 1 that is reported, not enforced
        violation |= !lower_holds;
        let branch = match b.branch {
            UpperBranch::Secant => "secant",
            UpperBranch::PiHalf => "pi_half",
        };
        t.push(vec![
            m.into(),
            sigma.into(),
            sphere_volume(m).into(),
            v.into(),
            b.lower.into(),
            b.upper.into(),
            branch.into(),
            lower_holds.into(),
            (v <= b.upper + slack).into(),
        ]);
    }
    Ok(Output { table: t, violation })
}

/// Boosting inequality on 200 log-spaced radii up to `ρ_ε` at each point;
/// one row per point, at the radius where `lhs/rhs` is largest.
pub fn boost_check(points: &[GridPoint], d: u32) -> Result<Output> {
    let mut t = Table::new(
        "boost-check",
        &["n", "beta", "H", "sigma", "eps", "rho_eps", "delta_eps", "t_eps", "rho", "ln_lhs", "ln_rhs", "pass"],
    );
    t.meta("d", d);
    t.meta("radii_per_point", 200u64);
    let mut violation = false;
    for p in points {
        let bp = BoostParams::new(p.n, d, p.beta, p.sigma, p.h_sup, p.eps)?;
        let mut worst = None;
        let mut all = true;
        for rho in log_grid(bp.rho_eps * 1e-8, bp.rho_eps, 200) {
            let row = boosting_row(p.n, p.beta, p.sigma, p.h_sup, p.eps, rho)?;
            all &= row.holds;
            let gap = row.ln_lhs - row.ln_rhs;
            if worst.is_none_or(|(g, _)| gap > g) {
                worst = Some((gap, row));
            }
        }
        let (_, row) = worst.expect("nonempty radius grid");
        violation |= !all;
        t.push(vec![
            p.n.into(),
            p.beta.into(),
            p.h_sup.into(),
            p.sigma.into(),
            p.eps.into(),
            bp.rho_eps.into(),
            bp.delta_eps.into(),
            bp.t_eps.into(),
            row.rho.into(),
            row.ln_lhs.into(),
            row.ln_rhs.into(),
            all.into(),
        ]);
    }
    Ok(Output { table: t, violation })
}

pub fn default_boost_points() -> Vec<GridPoint> {
    CheckGrid::default().points()
}

/// Smoothness ratio at decreasing radii; a gap above 0.02 at `ρ = 10^{-6}`
/// counts as a violation.
pub fn smoothness(cfg: &ExperimentConfig<ConicProblem>) -> Result<Output> {
    let law = &cfg.law;
    let alpha = smoothness_alpha(law.n(), law.beta())?;
    let mut t = Table::new("smoothness", &["n", "beta", "sigma", "rho", "ratio", "alpha", "abs_diff"]);
    let mut violation = false;
    for k in 1..=8 {
        let rho = 10f64.powi(-k);
        if rho >= law.sigma() {
            continue;
        }
        let ratio = smoothness_ratio(law, rho)?;
        let diff = (ratio - alpha).abs();
        if k == 6 {
            violation |= diff > 0.02;
        }
        t.push(vec![
            law.n().into(),
            law.beta().into(),
            law.sigma().into(),
            rho.into(),
            ratio.into(),
            alpha.into(),
            diff.into(),
        ]);
    }
    Ok(Output { table: t, violation })
}

pub fn small_calc(ns: &[u32]) -> Result<Output> {
    let mut t = Table::new("small-calc", &["n", "lhs", "rhs", "ratio", "holds"]);
    let mut violation = false;
    for &n in ns {
        let row = small_calc_row(n)?;
        violation |= !row.holds;
        t.push(vec![n.into(), row.lhs.into(), row.rhs.into(), (row.lhs / row.rhs).into(), row.holds.into()]);
    }
    Ok(Output { table: t, violation })
}

pub fn verify(cfg: &VerifyConfig) -> Result<Output> {
    let outcomes = verify::run_all(cfg)?;
    for o in &outcomes {
        eprintln!(
            "[{}] {:>2} {:<26} {:.2}s",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.elapsed.as_secs_f64()
        );
    }
    Ok(Output {
        violation: outcomes.iter().any(|o| !o.pass),
        table: verify::outcome_table(&outcomes, cfg),
    })
}
