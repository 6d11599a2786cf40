//! `exrisk`: expectiles, expected shortfall and value at risk from the
//! command line.
//!
//! Exit codes: 0 on success, 2 when an argument or input is invalid, 1 when a
//! computation fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use expectile_core::allocation::{es_euler, expectile_euler, Portfolio};
use expectile_core::asymptotics::{self, gumbel_relation, GumbelRelation, Order};
use expectile_core::concentration::{sample_size, size_ratio_curve, Measure, TailClass, TailKind};
use expectile_core::format::sig12;
use expectile_core::montecarlo::{
    alpha_grid, figure_series, ratio_table, ratio_table_csv, wasserstein_empirical, Comparison, FigureKind,
    SimulationConfig,
};
use expectile_core::risk::{self, DistortionSpec, OceParams};
use expectile_core::{DistributionSpec, LossSource, Mda, RiskError, Sample};

#[derive(Debug, Parser)]
#[command(name = "exrisk", version, about = "Expectiles, expected shortfall and value at risk")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a risk measure.
    Risk(RiskArgs),
    /// Levels β at which ES_β and the mean reproduce the expectile.
    BetaStar(LevelArgs),
    /// ES bounds on the expectile.
    Bounds(BoundsArgs),
    /// Euler contributions of portfolio components.
    Allocate(AllocateArgs),
    /// Asymptotic expansions as alpha -> 1, or a Hill estimate on data.
    Asympt(AsymptArgs),
    /// Sample sizes for a target estimation precision.
    SampleSize(SampleSizeArgs),
    /// Empirical vs theoretical ratio table (CSV).
    Table(TableArgs),
    /// Data series for the distortion and asymptotic-ratio figures (CSV).
    Figure(FigureArgs),
    /// Wasserstein distance between a sample and a distribution.
    Wasserstein(WassersteinArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Distribution, e.g. `pareto:a=2.1`, `student:nu=2.3`, `exp`, `uniform`,
    /// `power:a=2`, `twopoint:x1=0,x2=1,p=0.5`; append `,shift=v` to translate.
    #[arg(long, value_name = "SPEC", value_parser = parse_dist, required_unless_present = "data")]
    dist: Option<DistributionSpec>,
    /// CSV of scenarios (one column per component); the loss is the row sum.
    #[arg(long, value_name = "FILE", conflicts_with = "dist")]
    data: Option<PathBuf>,
    /// Evaluate on a sample of this size drawn from --dist.
    #[arg(long, value_name = "N", value_parser = parse_count, requires = "dist")]
    sample: Option<usize>,
    /// Seed for --sample.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RiskMeasure {
    Var,
    Es,
    Expectile,
    Oce,
    /// Distortion risk measure with the expectile's distortion.
    Distortion,
}

#[derive(Debug, Args)]
struct RiskArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "expectile")]
    measure: RiskMeasure,
    /// OCE loss parameter a in (0, 1).
    #[arg(long, required_if_eq("measure", "oce"))]
    oce_a: Option<f64>,
    /// OCE loss parameter b in [0, 1].
    #[arg(long, required_if_eq("measure", "oce"))]
    oce_b: Option<f64>,
    /// Emit CSV instead of a summary.
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct LevelArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    alpha: f64,
    /// Level of the ES lower bound; defaults to the β* point.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AllocMeasure {
    Expectile,
    Es,
}

#[derive(Debug, Args)]
struct AllocateArgs {
    /// CSV of scenarios, one column per component.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "expectile")]
    measure: AllocMeasure,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct AsymptArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    alpha: f64,
    /// Upper order statistics for the Hill estimate on --data or --sample.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct SampleSizeArgs {
    /// Moment class: `exp:k=2,r=1`, `subexp:k=0.5,r=1,s=0.4` or `poly:q=3,s=2.5`.
    #[arg(long, value_name = "CLASS", value_parser = parse_tail)]
    tail: TailKind,
    /// Tolerated probability of missing the precision.
    #[arg(long)]
    gamma: f64,
    /// Relative precision.
    #[arg(long)]
    eps: f64,
    /// One or more levels, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    big_c: f64,
    #[arg(long, default_value_t = 1.0)]
    small_c: f64,
    /// Distribution whose density sets the VaR sample size.
    #[arg(long, value_name = "SPEC", value_parser = parse_dist)]
    dist: Option<DistributionSpec>,
    /// Offset above q_alpha where the density floor is read.
    #[arg(long, default_value_t = 1e-3)]
    delta_offset: f64,
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_name = "SPEC", value_parser = parse_dist)]
    dist: DistributionSpec,
    #[arg(long, value_delimiter = ',', required = true)]
    alphas: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Reference measure: `es` or `var`.
    #[arg(long, value_parser = parse_comparison, default_value = "es")]
    vs: Comparison,
    /// Replications per cell; medians are reported.
    #[arg(long, default_value_t = 1)]
    replications: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Distortion,
    WeibullBeta,
    FrechetPareto,
    FrechetStudent,
}

#[derive(Debug, Args)]
struct FigureArgs {
    #[arg(long, value_enum)]
    kind: FigureArg,
    /// Shape for weibull-beta and frechet-pareto.
    #[arg(long)]
    a: Option<f64>,
    /// Degrees of freedom for frechet-student.
    #[arg(long)]
    nu: Option<f64>,
    /// Expectile level of the distortion curves.
    #[arg(long, default_value_t = 0.94)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    alpha_min: f64,
    #[arg(long, default_value_t = 0.9999)]
    alpha_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Debug, Args)]
struct WassersteinArgs {
    #[arg(long, value_name = "SPEC", value_parser = parse_dist)]
    dist: DistributionSpec,
    /// Sample size drawn from --dist.
    #[arg(long, value_parser = parse_count, required_unless_present = "data")]
    n: Option<usize>,
    /// Compare a sample read from CSV (row sums) instead.
    #[arg(long, value_name = "FILE", conflicts_with = "n")]
    data: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also report ES and expectile deviations against their bounds.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    csv: bool,
}

fn parse_dist(s: &str) -> Result<DistributionSpec, String> {
    s.parse().map_err(|e: RiskError| e.to_string())
}

fn parse_tail(s: &str) -> Result<TailKind, String> {
    s.parse().map_err(|e: RiskError| e.to_string())
}

fn parse_comparison(s: &str) -> Result<Comparison, String> {
    s.parse().map_err(|e: RiskError| e.to_string())
}

/// Positive integer, also in float notation such as `1e6` or `5e5`.
fn parse_count(s: &str) -> Result<usize, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(v >= 1.0) || v.fract() != 0.0 || v > 2f64.powi(53) {
        return Err(format!("`{s}` is not a positive integer"));
    }
    Ok(v as usize)
}

/// Why a run stopped.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Compute(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Compute(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Compute(m) => m,
        }
    }
}

fn flag_for(param: &str) -> String {
    match param {
        "epsilon" => "--eps".into(),
        "C" => "--big-c".into(),
        "c" => "--small-c".into(),
        other => format!("--{}", other.replace('_', "-")),
    }
}

fn failure(e: RiskError) -> Failure {
    match &e {
        RiskError::InvalidParameter { name, .. } | RiskError::OutOfRange { name, .. } => {
            Failure::Validation(format!("invalid value for {}: {e}", flag_for(name)))
        }
        _ if e.is_validation() => Failure::Validation(e.to_string()),
        _ => Failure::Compute(e.to_string()),
    }
}

/// Errors attributed to a specific flag, always a validation failure.
fn at_flag(flag: &'static str) -> impl Fn(RiskError) -> Failure {
    move |e| Failure::Validation(format!("invalid value for {flag}: {e}"))
}

type Run<T> = Result<T, Failure>;

fn read_total(path: &Path, flag: &'static str) -> Run<Sample> {
    let p = Portfolio::from_csv_path(path).map_err(at_flag(flag))?;
    match p.total_source().map_err(at_flag(flag))? {
        LossSource::Empirical(s) => Ok(s),
        LossSource::Parametric(_) => unreachable!("portfolios are empirical"),
    }
}

impl SourceArgs {
    fn source(&self) -> Run<LossSource> {
        if let Some(path) = &self.data {
            return Ok(LossSource::Empirical(read_total(path, "--data")?));
        }
        let d = self.dist.expect("clap enforces --dist or --data");
        match self.sample {
            Some(n) => Ok(LossSource::Empirical(
                d.sample(n, self.seed).map_err(at_flag("--sample"))?,
            )),
            None => Ok(LossSource::Parametric(d)),
        }
    }

    fn describe(&self) -> String {
        match (&self.data, &self.dist, self.sample) {
            (Some(p), _, _) => format!("data {}", p.display()),
            (None, Some(d), Some(n)) => format!("{d}, sample n={n} seed={}", self.seed),
            (None, Some(d), None) => d.to_string(),
            (None, None, _) => unreachable!(),
        }
    }
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

/// CSV text from a header and rows of cells.
fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

fn cmd_risk(a: &RiskArgs) -> Run<String> {
    let src = a.source.source()?;
    let alpha = a.alpha;
    let (name, value) = match a.measure {
        RiskMeasure::Var => ("var", risk::value_at_risk(&src, alpha).map_err(failure)?),
        RiskMeasure::Es => ("es", risk::expected_shortfall(&src, alpha).map_err(failure)?),
        RiskMeasure::Expectile => ("expectile", risk::expectile(&src, alpha).map_err(failure)?),
        RiskMeasure::Oce => {
            let p = OceParams::new(a.oce_a.unwrap_or(f64::NAN), a.oce_b.unwrap_or(f64::NAN)).map_err(|e| match &e {
                RiskError::OutOfRange { name: "b", .. } => at_flag("--oce-b")(e),
                _ => at_flag("--oce-a")(e),
            })?;
            ("oce", risk::oce(&src, p).map_err(failure)?)
        }
        RiskMeasure::Distortion => {
            let d = DistortionSpec::expectile(alpha).map_err(at_flag("--alpha"))?;
            ("distortion", risk::distortion_value(&src, d).map_err(failure)?)
        }
    };
    let interval = match a.measure {
        RiskMeasure::Expectile if !src.is_constant() => Some(risk::beta_star(&src, alpha).map_err(failure)?),
        _ => None,
    };
    if a.csv {
        let mut header = vec!["measure", "alpha", "value"];
        let mut row = vec![name.to_string(), sig12(alpha), sig12(value)];
        if let Some(bs) = interval {
            header.extend(["beta_star_lower", "beta_star_upper"]);
            row.extend([sig12(bs.lower), sig12(bs.upper)]);
        }
        return Ok(csv_text(&header, &[row]));
    }
    let mut out = format!("{name} at alpha = {alpha} for {}: {}\n", a.source.describe(), f4(value));
    if let Some(bs) = interval {
        writeln!(out, "beta* interval: [{}, {}]", f4(bs.lower), f4(bs.upper)).unwrap();
    }
    Ok(out)
}

fn cmd_beta_star(a: &LevelArgs) -> Run<String> {
    let src = a.source.source()?;
    let bs = risk::beta_star(&src, a.alpha).map_err(failure)?;
    let rebuilt = risk::reconstruct_expectile(&src, a.alpha, bs.point).map_err(failure)?;
    if a.csv {
        let row = [a.alpha, bs.expectile, bs.lower, bs.upper, bs.point, rebuilt]
            .map(sig12)
            .to_vec();
        return Ok(csv_text(
            &[
                "alpha",
                "expectile",
                "beta_lower",
                "beta_upper",
                "beta_point",
                "reconstructed",
            ],
            &[row],
        ));
    }
    Ok(format!(
        "expectile at alpha = {}: {}\nbeta* interval: [{}, {}], point {}\nreconstruction from ES at the point: {}\n",
        a.alpha,
        f4(bs.expectile),
        f4(bs.lower),
        f4(bs.upper),
        f4(bs.point),
        f4(rebuilt)
    ))
}

fn cmd_bounds(a: &BoundsArgs) -> Run<String> {
    let src = a.source.source()?;
    let e = risk::expectile(&src, a.alpha).map_err(failure)?;
    let beta = match a.beta {
        Some(b) => b,
        None => risk::beta_star(&src, a.alpha).map_err(failure)?.point,
    };
    let b = risk::expectile_bounds(&src, a.alpha, beta).map_err(failure)?;
    if a.csv {
        let row = [a.alpha, beta, b.lower, e, b.upper, b.es_cap].map(sig12).to_vec();
        return Ok(csv_text(
            &["alpha", "beta", "lower", "expectile", "upper", "es_cap"],
            &[row],
        ));
    }
    Ok(format!(
        "alpha = {}, beta = {}\nlower (ES_beta mix): {}\nexpectile:           {}\nupper (ES_alpha mix): {}\nES_(2alpha-1)/alpha: {}\n",
        a.alpha,
        f4(beta),
        f4(b.lower),
        f4(e),
        f4(b.upper),
        f4(b.es_cap)
    ))
}

fn cmd_allocate(a: &AllocateArgs) -> Run<String> {
    let p = Portfolio::from_csv_path(&a.data).map_err(at_flag("--data"))?;
    let contrib = match a.measure {
        AllocMeasure::Expectile => expectile_euler(&p, a.alpha),
        AllocMeasure::Es => es_euler(&p, a.alpha),
    }
    .map_err(failure)?;
    let total: f64 = contrib.iter().sum();
    if a.csv {
        let rows: Vec<Vec<String>> = contrib
            .iter()
            .enumerate()
            .map(|(k, c)| vec![k.to_string(), sig12(*c)])
            .collect();
        return Ok(csv_text(&["component", "contribution"], &rows));
    }
    let mut out = format!(
        "{} contributions at alpha = {} ({} scenarios)\n",
        measure_name(a.measure),
        a.alpha,
        p.len()
    );
    for (k, c) in contrib.iter().enumerate() {
        writeln!(out, "  component {k}: {}", f4(*c)).unwrap();
    }
    writeln!(out, "  total:       {}", f4(total)).unwrap();
    Ok(out)
}

fn measure_name(m: AllocMeasure) -> &'static str {
    match m {
        AllocMeasure::Expectile => "expectile",
        AllocMeasure::Es => "ES",
    }
}

fn cmd_asympt(a: &AsymptArgs) -> Run<String> {
    let src = a.source.source()?;
    if let LossSource::Empirical(s) = &src {
        let h = asymptotics::extreme_expectile_estimate(s, a.alpha, a.k).map_err(failure)?;
        if a.csv {
            let row = vec![
                sig12(a.alpha),
                h.k.to_string(),
                sig12(h.eta_hat),
                sig12(h.quantile),
                sig12(h.expectile),
            ];
            return Ok(csv_text(&["alpha", "k", "eta_hat", "quantile", "expectile"], &[row]));
        }
        return Ok(format!(
            "Hill estimate with k = {}: eta = {}\nquantile at alpha = {}: {}\nextreme expectile estimate: {}\n",
            h.k,
            f4(h.eta_hat),
            a.alpha,
            f4(h.quantile),
            f4(h.expectile)
        ));
    }
    let LossSource::Parametric(d) = &src else {
        unreachable!()
    };
    let class = d.mda_classify().map_err(failure)?;
    let bs = risk::beta_star(&src, a.alpha).map_err(failure)?;
    let exact_bs = (1.0 - bs.point) / (1.0 - a.alpha);
    let e = bs.expectile;
    let es = risk::expected_shortfall(&src, a.alpha).map_err(failure)?;
    let rows: Vec<(&str, f64, Option<f64>, Option<f64>)> = match class.mda {
        Mda::Frechet { .. } => {
            let mean = d.mean();
            let r1 = asymptotics::frechet_ratio_for(d, a.alpha, Order::First).map_err(failure)?;
            let r2 = asymptotics::frechet_ratio_for(d, a.alpha, Order::Second).map_err(failure)?;
            let b1 = asymptotics::frechet_beta_star_ratio_for(d, a.alpha, Order::First).map_err(failure)?;
            let b2 = asymptotics::frechet_beta_star_ratio_for(d, a.alpha, Order::Second).map_err(failure)?;
            vec![
                (
                    "e/ES (centered)",
                    (e - mean) / (es - mean),
                    Some(r1.value),
                    Some(r2.value),
                ),
                ("(1-beta*)/(1-alpha)", exact_bs, Some(b1.value), Some(b2.value)),
            ]
        }
        Mda::Weibull { .. } => {
            let x_hat = class.right_endpoint.expect("Weibull laws have an endpoint");
            let r1 = asymptotics::weibull_ratio_for(d, a.alpha, Order::First).map_err(failure)?;
            let r2 = asymptotics::weibull_ratio_for(d, a.alpha, Order::Second).map_err(failure)?;
            let b = asymptotics::weibull_beta_star_ratio_for(d, a.alpha).map_err(failure)?;
            vec![
                (
                    "(xhat-ES)/(xhat-e)",
                    (x_hat - es) / (x_hat - e),
                    Some(r1.value),
                    Some(r2.value),
                ),
                ("(1-beta*)/(1-alpha)", exact_bs, Some(b), None),
            ]
        }
        Mda::Gumbel => vec![
            ("e/ES", e / es, None, None),
            ("(1-beta*)/(1-alpha)", exact_bs, None, None),
        ],
    };
    let domain = match class.mda {
        Mda::Frechet { eta } => format!("Frechet, eta = {eta}"),
        Mda::Weibull { eta } => format!("Weibull, eta = {eta}"),
        // the built-in Gumbel family (exponential) satisfies the slow-variation condition
        Mda::Gumbel => match gumbel_relation(d.right_endpoint().is_some(), true) {
            GumbelRelation::Equivalent => "Gumbel, e ~ ES".to_string(),
            GumbelRelation::LogEquivalent => "Gumbel, ln e ~ ln ES".to_string(),
        },
    };
    if a.csv {
        let opt = |x: Option<f64>| x.map(sig12).unwrap_or_default();
        let rows: Vec<Vec<String>> = rows
            .iter()
            .map(|(n, x, f, s)| vec![n.to_string(), sig12(a.alpha), sig12(*x), opt(*f), opt(*s)])
            .collect();
        return Ok(csv_text(
            &["quantity", "alpha", "exact", "first_order", "second_order"],
            &rows,
        ));
    }
    let opt = |x: Option<f64>| x.map(f4).unwrap_or_else(|| "-".into());
    let mut out = format!("{d} at alpha = {} ({domain})\n", a.alpha);
    writeln!(out, "{:<22}{:>10}{:>10}{:>10}", "", "exact", "first", "second").unwrap();
    for (n, x, f, s) in rows {
        writeln!(out, "{n:<22}{:>10}{:>10}{:>10}", f4(x), opt(f), opt(s)).unwrap();
    }
    Ok(out)
}

fn cmd_sample_size(a: &SampleSizeArgs) -> Run<String> {
    let tc = TailClass::new(a.tail, a.big_c, a.small_c).map_err(|e| match &e {
        RiskError::InvalidParameter { name: "C", .. } => at_flag("--big-c")(e),
        RiskError::InvalidParameter { name: "c", .. } => at_flag("--small-c")(e),
        _ => at_flag("--tail")(e),
    })?;
    let mut rows = Vec::new();
    match &a.dist {
        Some(d) => {
            for r in size_ratio_curve(d, &tc, a.gamma, a.eps, &a.alpha, a.delta_offset).map_err(failure)? {
                rows.push((
                    r.alpha,
                    Some(r.n_var),
                    r.n_es,
                    r.n_expectile,
                    r.degenerate,
                    Some(r.delta_alpha),
                ));
            }
        }
        None => {
            for &alpha in &a.alpha {
                let es = sample_size(&tc, a.gamma, a.eps, alpha, Measure::Es).map_err(failure)?;
                let ex = sample_size(&tc, a.gamma, a.eps, alpha, Measure::Expectile).map_err(failure)?;
                rows.push((alpha, None, es.n, ex.n, es.degenerate || ex.degenerate, None));
            }
        }
    }
    if a.csv {
        let opt_n = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        let ratio = |n: u64, v: Option<u64>| v.map(|v| sig12(n as f64 / v as f64)).unwrap_or_default();
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|&(alpha, n_var, n_es, n_e, deg, delta)| {
                vec![
                    sig12(alpha),
                    sig12(a.eps),
                    sig12(a.gamma),
                    delta.map(sig12).unwrap_or_default(),
                    sig12(tc.big_c),
                    sig12(tc.small_c),
                    opt_n(n_var),
                    n_es.to_string(),
                    n_e.to_string(),
                    ratio(n_es, n_var),
                    ratio(n_e, n_var),
                    deg.to_string(),
                ]
            })
            .collect();
        return Ok(csv_text(
            &[
                "alpha",
                "epsilon",
                "gamma",
                "delta_alpha",
                "big_c",
                "small_c",
                "n_var",
                "n_es",
                "n_expectile",
                "ratio_es",
                "ratio_expectile",
                "degenerate",
            ],
            &cells,
        ));
    }
    let mut out = format!(
        "tail {} with C = {}, c = {}; gamma = {}, eps = {}\n",
        a.tail, tc.big_c, tc.small_c, a.gamma, a.eps
    );
    for (alpha, n_var, n_es, n_e, deg, delta) in rows {
        writeln!(out, "alpha = {alpha}").unwrap();
        if let (Some(nv), Some(delta)) = (n_var, delta) {
            writeln!(out, "  density floor:  {}", f4(delta)).unwrap();
            writeln!(out, "  n_VaR:          {nv}").unwrap();
        }
        writeln!(out, "  n_ES:           {n_es}").unwrap();
        writeln!(out, "  n_expectile:    {n_e}").unwrap();
        if let Some(nv) = n_var {
            writeln!(out, "  n_ES/n_VaR:     {}", f4(n_es as f64 / nv as f64)).unwrap();
            writeln!(out, "  n_e/n_VaR:      {}", f4(n_e as f64 / nv as f64)).unwrap();
        }
        if deg {
            writeln!(out, "  (degenerate: the bound holds for every n)").unwrap();
        }
    }
    Ok(out)
}

fn cmd_table(a: &TableArgs) -> Run<String> {
    let cfg =
        SimulationConfig::new(a.dist, a.alphas.clone(), a.ns.clone(), a.seed, a.vs).with_replications(a.replications);
    cfg.validate().map_err(failure)?;
    let rows = ratio_table(&cfg).map_err(failure)?;
    ratio_table_csv(&rows, &a.ns).map_err(failure)
}

fn cmd_figure(a: &FigureArgs) -> Run<String> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Validation(format!("--kind {} requires {flag}", kind_name(a.kind))))
    };
    let (kind, grid) = match a.kind {
        FigureArg::Distortion => {
            if a.points < 2 {
                return Err(Failure::Validation(
                    "invalid value for --points: need at least 2".into(),
                ));
            }
            let grid = (0..a.points).map(|i| i as f64 / (a.points - 1) as f64).collect();
            (FigureKind::DistortionCurves { alpha: a.alpha }, grid)
        }
        other => {
            let kind = match other {
                FigureArg::WeibullBeta => FigureKind::WeibullRatioBeta { a: need(a.a, "--a")? },
                FigureArg::FrechetPareto => FigureKind::FrechetRatioPareto { a: need(a.a, "--a")? },
                _ => FigureKind::FrechetRatioStudent {
                    nu: need(a.nu, "--nu")?,
                },
            };
            if !(a.alpha_min >= 0.5) {
                return Err(Failure::Validation(format!(
                    "invalid value for --alpha-min: {} is below 1/2",
                    a.alpha_min
                )));
            }
            let grid = alpha_grid(a.alpha_min, a.alpha_max, a.points).map_err(|e| match &e {
                RiskError::InvalidParameter { name: "points", .. } => at_flag("--points")(e),
                _ => at_flag("--alpha-min/--alpha-max")(e),
            })?;
            (kind, grid)
        }
    };
    figure_series(kind, &grid)
        .map_err(|e| match &e {
            RiskError::InvalidParameter { name: "a", .. } => at_flag("--a")(e),
            RiskError::InvalidParameter { name: "nu", .. } => at_flag("--nu")(e),
            _ => failure(e),
        })?
        .to_csv()
        .map_err(failure)
}

fn kind_name(k: FigureArg) -> String {
    k.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn cmd_wasserstein(a: &WassersteinArgs) -> Run<String> {
    let s = match (&a.data, a.n) {
        (Some(path), _) => read_total(path, "--data")?,
        (None, Some(n)) => a.dist.sample(n, a.seed).map_err(at_flag("--n"))?,
        (None, None) => unreachable!("clap enforces --n or --data"),
    };
    let w = wasserstein_empirical(&s, &a.dist);
    let dev = match a.alpha {
        Some(alpha) => {
            let (emp, par) = (LossSource::Empirical(s.clone()), LossSource::Parametric(a.dist));
            let d_es = (risk::expected_shortfall(&emp, alpha).map_err(failure)?
                - risk::expected_shortfall(&par, alpha).map_err(failure)?)
            .abs();
            let d_e =
                (risk::expectile(&emp, alpha).map_err(failure)? - risk::expectile(&par, alpha).map_err(failure)?).abs();
            Some((alpha, d_es, w / (1.0 - alpha), d_e, alpha * w / (1.0 - alpha)))
        }
        None => None,
    };
    if a.csv {
        let mut header = vec!["n", "wasserstein"];
        let mut row = vec![s.len().to_string(), sig12(w)];
        if let Some((alpha, d_es, b_es, d_e, b_e)) = dev {
            header.extend([
                "alpha",
                "es_deviation",
                "es_bound",
                "expectile_deviation",
                "expectile_bound",
            ]);
            row.extend([alpha, d_es, b_es, d_e, b_e].map(sig12));
        }
        return Ok(csv_text(&header, &[row]));
    }
    let mut out = format!("W1(sample of {}, {}) = {}\n", s.len(), a.dist, f4(w));
    if let Some((alpha, d_es, b_es, d_e, b_e)) = dev {
        writeln!(out, "alpha = {alpha}").unwrap();
        writeln!(out, "  |ES_n - ES|: {} <= {}", f4(d_es), f4(b_es)).unwrap();
        writeln!(out, "  |e_n - e|:   {} <= {}", f4(d_e), f4(b_e)).unwrap();
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Run<String> {
    match &cli.command {
        Command::Risk(a) => cmd_risk(a),
        Command::BetaStar(a) => cmd_beta_star(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Allocate(a) => cmd_allocate(a),
        Command::Asympt(a) => cmd_asympt(a),
        Command::SampleSize(a) => cmd_sample_size(a),
        Command::Table(a) => cmd_table(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Wasserstein(a) => cmd_wasserstein(a),
    }
}

/// Result of a run: exit code and the text for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => Outcome {
                    code: 0,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: format!("error: invalid value for --out: {}: {e}\n", path.display()),
                },
            },
            None => Outcome {
                code: 0,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(f) => Outcome {
            code: f.code(),
            stdout: String::new(),
            stderr: format!("error: {}\n", f.message()),
        },
    }
}
