//! Simulation tables of empirical vs theoretical ratios, exact Wasserstein
//! distances, and data series for the asymptotic figures.
//!
//! Each table cell draws its own sample keyed by
//! `rng::mix_seed(seed, [alpha index, n index, replication])`, so any cell can
//! be regenerated on its own and output does not depend on scheduling.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::asymptotics::{self, Order};
use crate::distributions::{DistributionSpec, LossSource, Sample};
use crate::error::{Result, RiskError};
use crate::format::sig12;
use crate::risk::{self, DistortionSpec};
use crate::rng::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    ExpectileVsVaR,
    ExpectileVsES,
}

impl FromStr for Comparison {
    type Err = RiskError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "var" | "q" | "quantile" => Ok(Comparison::ExpectileVsVaR),
            "es" | "cvar" => Ok(Comparison::ExpectileVsES),
            other => Err(RiskError::Parse {
                what: "comparison",
                reason: format!("expected `var` or `es`, got `{other}`"),
            }),
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::ExpectileVsVaR => "var",
            Comparison::ExpectileVsES => "es",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dist: DistributionSpec,
    pub alphas: Vec<f64>,
    pub ns: Vec<usize>,
    pub seed: u64,
    pub comparison: Comparison,
    /// Replications per cell; the reported ratio and Err% are medians.
    pub replications: usize,
}

impl SimulationConfig {
    pub fn new(dist: DistributionSpec, alphas: Vec<f64>, ns: Vec<usize>, seed: u64, comparison: Comparison) -> Self {
        SimulationConfig {
            dist,
            alphas,
            ns,
            seed,
            comparison,
            replications: 1,
        }
    }

    pub fn with_replications(mut self, r: usize) -> Self {
        self.replications = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(RiskError::invalid("alphas", "at least one level is required"));
        }
        for &a in &self.alphas {
            if !(0.5..1.0).contains(&a) {
                return Err(RiskError::range("alphas", a, "[1/2, 1)"));
            }
        }
        if self.ns.is_empty() {
            return Err(RiskError::invalid("ns", "at least one sample size is required"));
        }
        if self.ns.contains(&0) {
            return Err(RiskError::invalid("ns", "sample sizes must be >= 1"));
        }
        if self.replications == 0 {
            return Err(RiskError::invalid("replications", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioTableRow {
    pub alpha: f64,
    pub theoretical: f64,
    /// One entry per sample size, in the order of `SimulationConfig::ns`.
    pub empirical: Vec<f64>,
    pub err_pct: Vec<f64>,
}

fn ratio(src: &LossSource, alpha: f64, cmp: Comparison) -> Result<f64> {
    let e = risk::expectile(src, alpha)?;
    let denom = match cmp {
        Comparison::ExpectileVsVaR => risk::value_at_risk(src, alpha)?,
        Comparison::ExpectileVsES => risk::expected_shortfall(src, alpha)?,
    };
    if denom == 0.0 {
        return Err(RiskError::Singular("reference risk measure is zero"));
    }
    Ok(e / denom)
}

/// `e_alpha / VaR_alpha` or `e_alpha / ES_alpha` of the parametric law.
pub fn theoretical_ratio(dist: &DistributionSpec, alpha: f64, cmp: Comparison) -> Result<f64> {
    ratio(&LossSource::Parametric(*dist), alpha, cmp)
}

pub fn err_pct(theoretical: f64, empirical: f64) -> f64 {
    (theoretical - empirical).abs() / theoretical.abs() * 100.0
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn ratio_table(cfg: &SimulationConfig) -> Result<Vec<RatioTableRow>> {
    cfg.validate()?;
    let theo: Vec<f64> = cfg
        .alphas
        .iter()
        .map(|&a| theoretical_ratio(&cfg.dist, a, cfg.comparison))
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize, usize)> = (0..cfg.alphas.len())
        .flat_map(|i| (0..cfg.ns.len()).flat_map(move |j| (0..cfg.replications).map(move |r| (i, j, r))))
        .collect();
    let draws: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j, r)| {
            let seed = mix_seed(cfg.seed, &[i as u64, j as u64, r as u64]);
            let s = cfg.dist.sample(cfg.ns[j], seed)?;
            ratio(&LossSource::Empirical(s), cfg.alphas[i], cfg.comparison)
        })
        .collect::<Result<_>>()?;

    let reps = cfg.replications;
    let per_alpha = cfg.ns.len() * reps;
    Ok(cfg
        .alphas
        .iter()
        .enumerate()
        .map(|(i, &alpha)| {
            let mut empirical = Vec::with_capacity(cfg.ns.len());
            let mut errs = Vec::with_capacity(cfg.ns.len());
            for j in 0..cfg.ns.len() {
                let start = i * per_alpha + j * reps;
                let mut ratios = draws[start..start + reps].to_vec();
                let mut e: Vec<f64> = ratios.iter().map(|&x| err_pct(theo[i], x)).collect();
                empirical.push(median(&mut ratios));
                errs.push(median(&mut e));
            }
            RatioTableRow {
                alpha,
                theoretical: theo[i],
                empirical,
                err_pct: errs,
            }
        })
        .collect())
}

/// Compact label for a sample size: `1e6`, `5e5`, otherwise the integer.
pub fn n_label(n: usize) -> String {
    if n >= 10 {
        let mut m = n;
        let mut k = 0;
        while m.is_multiple_of(10) {
            m /= 10;
            k += 1;
        }
        if m < 10 && k > 0 {
            return format!("{m}e{k}");
        }
    }
    n.to_string()
}

pub fn ratio_table_header(ns: &[usize]) -> Vec<String> {
    let mut h = vec!["alpha".to_string(), "theo_ratio".to_string()];
    for &n in ns {
        let l = n_label(n);
        h.push(format!("emp_ratio_{l}"));
        h.push(format!("err_pct_{l}"));
    }
    h
}

pub fn ratio_table_csv(rows: &[RatioTableRow], ns: &[usize]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| RiskError::Io(e.to_string());
    w.write_record(ratio_table_header(ns)).map_err(io)?;
    for r in rows {
        let mut rec = vec![sig12(r.alpha), sig12(r.theoretical)];
        for (e, p) in r.empirical.iter().zip(&r.err_pct) {
            rec.push(sig12(*e));
            rec.push(sig12(*p));
        }
        w.write_record(&rec).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| RiskError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RiskError::Io(e.to_string()))
}

/// Order-1 Wasserstein distance `∫_0^1 |q_n(u) - q(u)| du` between a sample
/// and a parametric law.
///
/// Exact: on each step `((i-1)/n, i/n]` the empirical quantile is the constant
/// `x_i`, and the parametric quantile crosses it at `F(x_i)`, so each piece
/// is a difference of tail integrals `∫_u^1 q`.
pub fn wasserstein_empirical(s: &Sample, dist: &DistributionSpec) -> f64 {
    let n = s.len() as f64;
    let t = |u: f64| dist.tail_integral(u);
    let mut acc = 0.0;
    let mut comp = 0.0;
    let mut t_a = t(0.0);
    for (i, &x) in s.values().iter().enumerate() {
        let a = i as f64 / n;
        let b = if i + 1 == s.len() { 1.0 } else { (i + 1) as f64 / n };
        let c = dist.cdf(x).clamp(a, b);
        let t_c = t(c);
        let t_b = t(b);
        // below c: q <= x; above c: q >= x
        let below = (x * (c - a) - (t_a - t_c)).max(0.0);
        let above = ((t_c - t_b) - x * (b - c)).max(0.0);
        let piece = below + above;
        let y = piece - comp;
        let z = acc + y;
        comp = (z - acc) - y;
        acc = z;
        t_a = t_b;
    }
    acc
}

/// `n` levels in `[lo, hi]`, evenly spaced in `log(1 - alpha)`.
pub fn alpha_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) || lo > hi {
        return Err(RiskError::invalid(
            "alpha",
            format!("need 0 <= lo <= hi < 1, got [{lo}, {hi}]"),
        ));
    }
    if n < 2 {
        return Err(RiskError::invalid("points", format!("need at least 2 points, got {n}")));
    }
    let (l0, l1) = ((1.0 - lo).ln(), (1.0 - hi).ln());
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                1.0 - (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FigureKind {
    /// Expectile distortion and its optimal ES-mixture majorant at level `alpha`.
    DistortionCurves { alpha: f64 },
    /// `(1 - ES_alpha)/(1 - e_alpha)` for the power law `F(x) = x^a` on `[0, 1]`.
    WeibullRatioBeta { a: f64 },
    /// `e_alpha / ES_alpha` of the centered Pareto loss.
    FrechetRatioPareto { a: f64 },
    /// `e_alpha / ES_alpha` of the standard Student t loss.
    FrechetRatioStudent { nu: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSeries {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FigureSeries {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| RiskError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|&x| sig12(x))).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| RiskError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| RiskError::Io(e.to_string()))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Exact, first-order and second-order curves over `grid`.
///
/// `grid` holds `t` in `[0, 1]` for distortion curves and levels `alpha` in
/// `[1/2, 1)` for the ratio figures.
pub fn figure_series(kind: FigureKind, grid: &[f64]) -> Result<FigureSeries> {
    match kind {
        FigureKind::DistortionCurves { alpha } => {
            let phi = DistortionSpec::expectile(alpha)?;
            let mix = DistortionSpec::optimal_mixture(alpha)?;
            let rows = grid
                .iter()
                .map(|&t| {
                    if !(0.0..=1.0).contains(&t) {
                        return Err(RiskError::range("t", t, "[0, 1]"));
                    }
                    Ok(vec![t, phi.phi(t), mix.phi(t)])
                })
                .collect::<Result<_>>()?;
            Ok(FigureSeries {
                header: header(&["t", "phi", "phi_mixture"]),
                rows,
            })
        }
        FigureKind::WeibullRatioBeta { a } => {
            let d = DistributionSpec::power_beta(a)?;
            let src = LossSource::Parametric(d);
            let rows = grid
                .iter()
                .map(|&alpha| {
                    let e = risk::expectile(&src, alpha)?;
                    let es = risk::expected_shortfall(&src, alpha)?;
                    let first = asymptotics::weibull_ratio_for(&d, alpha, Order::First)?;
                    let second = asymptotics::weibull_ratio_for(&d, alpha, Order::Second)?;
                    Ok(vec![alpha, (1.0 - es) / (1.0 - e), first.value, second.value])
                })
                .collect::<Result<_>>()?;
            Ok(FigureSeries {
                header: header(&["alpha", "exact", "first_order", "second_order"]),
                rows,
            })
        }
        FigureKind::FrechetRatioPareto { a } => frechet_series(DistributionSpec::pareto(a)?, grid),
        FigureKind::FrechetRatioStudent { nu } => frechet_series(DistributionSpec::student_t(nu)?, grid),
    }
}

fn frechet_series(d: DistributionSpec, grid: &[f64]) -> Result<FigureSeries> {
    let centered = LossSource::Parametric(d.centered());
    let rows = grid
        .iter()
        .map(|&alpha| {
            let exact = ratio(&centered, alpha, Comparison::ExpectileVsES)?;
            let first = asymptotics::frechet_ratio_for(&d, alpha, Order::First)?;
            let second = asymptotics::frechet_ratio_for(&d, alpha, Order::Second)?;
            Ok(vec![alpha, exact, first.value, second.value])
        })
        .collect::<Result<_>>()?;
    Ok(FigureSeries {
        header: header(&["alpha", "exact", "first_order", "second_order"]),
        rows,
    })
}
