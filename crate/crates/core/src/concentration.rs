//! Deviation bounds and required sample sizes for empirical ES, expectile
//! and VaR.
//!
//! The constants `C` and `c` of the underlying Wasserstein concentration
//! inequalities are not known in closed form. They default to 1, so absolute
//! sizes are indicative only; ratios along `alpha` are what carry meaning.

use std::fmt;
use std::str::FromStr;

use crate::distributions::DistributionSpec;
use crate::error::{Result, RiskError};

/// Moment assumption on the loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailKind {
    /// `E[exp(r |L|^k)] < inf` with `k > 1`.
    ExpMoment { k: f64, r: f64 },
    /// `E[exp(r |L|^k)] < inf` with `0 < k < 1`, any `0 < s < k`.
    SubExpMoment { k: f64, r: f64, s: f64 },
    /// `E[|L|^q] < inf` with `q > 2`, any `2 < s < q`.
    PolyMoment { q: f64, s: f64 },
}

impl FromStr for TailKind {
    type Err = RiskError;

    /// `exp:k=2,r=1`, `subexp:k=0.5,r=1,s=0.4` or `poly:q=3,s=2.5`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: String| RiskError::Parse {
            what: "tail class",
            reason,
        };
        let (name, rest) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let mut params: Vec<(String, f64)> = Vec::new();
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| err(format!("`{}` is not a number", v.trim())))?;
            params.push((k.trim().to_ascii_lowercase(), v));
        }
        let mut take = |key: &str| -> Result<f64> {
            let pos = params
                .iter()
                .position(|(k, _)| k == key)
                .ok_or_else(|| err(format!("`{name}` needs {key}=")))?;
            Ok(params.remove(pos).1)
        };
        let kind = match name.trim().to_ascii_lowercase().as_str() {
            "exp" => TailKind::ExpMoment {
                k: take("k")?,
                r: take("r")?,
            },
            "subexp" => TailKind::SubExpMoment {
                k: take("k")?,
                r: take("r")?,
                s: take("s")?,
            },
            "poly" => TailKind::PolyMoment {
                q: take("q")?,
                s: take("s")?,
            },
            other => {
                return Err(err(format!(
                    "unknown tail class `{other}`, expected exp, subexp or poly"
                )))
            }
        };
        if let Some((k, _)) = params.first() {
            return Err(err(format!("unexpected parameter `{k}`")));
        }
        Ok(kind)
    }
}

impl fmt::Display for TailKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TailKind::ExpMoment { k, r } => write!(f, "exp:k={k},r={r}"),
            TailKind::SubExpMoment { k, r, s } => write!(f, "subexp:k={k},r={r},s={s}"),
            TailKind::PolyMoment { q, s } => write!(f, "poly:q={q},s={s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailClass {
    pub kind: TailKind,
    /// Prefactor `C`.
    pub big_c: f64,
    /// Rate `c`.
    pub small_c: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RiskError::invalid(
            name,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

impl TailClass {
    pub fn new(kind: TailKind, big_c: f64, small_c: f64) -> Result<Self> {
        positive("C", big_c)?;
        positive("c", small_c)?;
        match kind {
            TailKind::ExpMoment { k, r } => {
                positive("r", r)?;
                if !(k > 1.0) {
                    return Err(RiskError::invalid(
                        "k",
                        format!("exponential moment needs k > 1, got {k}"),
                    ));
                }
            }
            TailKind::SubExpMoment { k, r, s } => {
                positive("r", r)?;
                if !(k > 0.0 && k < 1.0) {
                    return Err(RiskError::range("k", k, "(0, 1)"));
                }
                if !(s > 0.0 && s < k) {
                    return Err(RiskError::invalid("s", format!("need 0 < s < k = {k}, got {s}")));
                }
            }
            TailKind::PolyMoment { q, s } => {
                if !(q > 2.0) || !q.is_finite() {
                    return Err(RiskError::invalid("q", format!("need q > 2, got {q}")));
                }
                if !(s > 2.0 && s < q) {
                    return Err(RiskError::invalid("s", format!("need 2 < s < q = {q}, got {s}")));
                }
            }
        }
        Ok(TailClass { kind, big_c, small_c })
    }

    /// Tail class with `C = c = 1`.
    pub fn with_unit_constants(kind: TailKind) -> Result<Self> {
        Self::new(kind, 1.0, 1.0)
    }

    /// `B(n, h)`, clamped to `[0, 1]`.
    pub fn bound(&self, n: f64, h: f64) -> f64 {
        let (c_big, c) = (self.big_c, self.small_c);
        let b = match self.kind {
            TailKind::ExpMoment { .. } => c_big * (-c * n * h * h).exp(),
            TailKind::SubExpMoment { s, .. } => c_big * (-c * n.powf(s) * h * h).exp(),
            TailKind::PolyMoment { s, .. } => c_big * n.powf(1.0 - s) * h.powf(2.0 * (1.0 - s)),
        };
        b.clamp(0.0, 1.0)
    }

    /// `H(gamma, h)` before rounding; `None` when the logarithm in the
    /// exponential branches is not negative.
    pub fn raw_size(&self, gamma: f64, h: f64) -> Option<f64> {
        let (c_big, c) = (self.big_c, self.small_c);
        match self.kind {
            TailKind::ExpMoment { .. } => {
                let l = -(gamma / c_big).ln();
                (l > 0.0).then(|| l / c * h.powi(-2))
            }
            TailKind::SubExpMoment { s, .. } => {
                let l = -(gamma / (2.0 * c_big)).ln();
                (l > 0.0).then(|| (l / c).powf(1.0 / s) * h.powf(-2.0 / s))
            }
            TailKind::PolyMoment { s, .. } => Some((c_big / gamma).powf(1.0 / (s - 1.0)) * h.powi(-2)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Es,
    Expectile,
}

fn check_level(alpha: f64) -> Result<()> {
    if (0.5..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(RiskError::range("alpha", alpha, "[1/2, 1)"))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(RiskError::range("gamma", gamma, "(0, 1)"))
    }
}

/// Wasserstein radius matching precision `eps`: `eps (1 - alpha)` for ES and
/// `eps (1 - alpha)/alpha` for the expectile.
pub fn radius(measure: Measure, eps: f64, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    let max = alpha / (1.0 - alpha);
    if !(eps > 0.0 && eps <= max) {
        return Err(RiskError::invalid(
            "epsilon",
            format!("need 0 < epsilon <= alpha/(1-alpha) = {max}, got {eps}"),
        ));
    }
    Ok(match measure {
        Measure::Es => eps * (1.0 - alpha),
        Measure::Expectile => eps * (1.0 - alpha) / alpha,
    })
}

/// Bound on `P[|R_{alpha,n} - R_alpha| >= eps]` for the empirical estimator.
pub fn deviation_bound(tc: &TailClass, n: u64, eps: f64, alpha: f64, measure: Measure) -> Result<f64> {
    if n == 0 {
        return Err(RiskError::invalid("n", "sample size must be >= 1"));
    }
    Ok(tc.bound(n as f64, radius(measure, eps, alpha)?))
}

/// A required sample size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSize {
    pub n: u64,
    /// Set when the closed form gives a nonpositive size (confidence level at
    /// or above the prefactor) and `n` was set to 1.
    pub degenerate: bool,
}

const MAX_SIZE: f64 = 9.007_199_254_740_992e15; // 2^53

fn round_size(raw: f64) -> Result<SampleSize> {
    if !raw.is_finite() || raw > MAX_SIZE {
        return Err(RiskError::Overflow(raw));
    }
    Ok(SampleSize {
        // absorb last-ulp noise so exact integers are not bumped up by one
        n: ((raw * (1.0 - 1e-12)).ceil() as u64).max(1),
        degenerate: false,
    })
}

/// Smallest `n` with `B(n, h) <= gamma`, from the closed form `H(gamma, h)`.
pub fn sample_size(tc: &TailClass, gamma: f64, eps: f64, alpha: f64, measure: Measure) -> Result<SampleSize> {
    check_gamma(gamma)?;
    let h = radius(measure, eps, alpha)?;
    match tc.raw_size(gamma, h) {
        Some(raw) => round_size(raw),
        None => Ok(SampleSize { n: 1, degenerate: true }),
    }
}

/// `-ln(gamma/4) / (2 eps^2) * delta^-2`, the size for the empirical quantile
/// when the density is at least `delta` near `q_alpha`.
pub fn var_sample_size(delta: f64, gamma: f64, eps: f64) -> Result<SampleSize> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(RiskError::invalid(
            "delta",
            format!("density floor must be > 0, got {delta}"),
        ));
    }
    check_gamma(gamma)?;
    positive("epsilon", eps)?;
    round_size(-(gamma / 4.0).ln() / (2.0 * eps * eps) / (delta * delta))
}

/// Sample sizes for VaR, ES and expectile at one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizeReport {
    pub alpha: f64,
    pub epsilon: f64,
    pub gamma: f64,
    /// Density floor `f(q_alpha + offset)`.
    pub delta_alpha: f64,
    pub big_c: f64,
    pub small_c: f64,
    pub n_var: u64,
    pub n_es: u64,
    pub n_expectile: u64,
    /// `n_es / n_var`
    pub ratio_es: f64,
    /// `n_expectile / n_var`
    pub ratio_expectile: f64,
    pub degenerate: bool,
}

/// Sample-size report along `alphas`, with the quantile density floor taken
/// at `q_alpha + delta_offset` (the upper end of the window, where a density
/// that decreases in the tail is smallest).
pub fn size_ratio_curve(
    dist: &DistributionSpec,
    tc: &TailClass,
    gamma: f64,
    eps: f64,
    alphas: &[f64],
    delta_offset: f64,
) -> Result<Vec<SampleSizeReport>> {
    if !dist.is_continuous() {
        return Err(RiskError::Unsupported(format!("{dist} has no density")));
    }
    positive("delta_offset", delta_offset)?;
    alphas
        .iter()
        .map(|&alpha| {
            let q = dist.quantile(alpha)?;
            let delta = dist.density(q + delta_offset).unwrap_or(0.0);
            if !(delta > 0.0) {
                return Err(RiskError::invalid(
                    "delta_offset",
                    format!("q_alpha + {delta_offset} leaves the support of {dist} at alpha = {alpha}"),
                ));
            }
            let n_var = var_sample_size(delta, gamma, eps)?;
            let n_es = sample_size(tc, gamma, eps, alpha, Measure::Es)?;
            let n_e = sample_size(tc, gamma, eps, alpha, Measure::Expectile)?;
            Ok(SampleSizeReport {
                alpha,
                epsilon: eps,
                gamma,
                delta_alpha: delta,
                big_c: tc.big_c,
                small_c: tc.small_c,
                n_var: n_var.n,
                n_es: n_es.n,
                n_expectile: n_e.n,
                ratio_es: n_es.n as f64 / n_var.n as f64,
                ratio_expectile: n_e.n as f64 / n_var.n as f64,
                degenerate: n_es.degenerate || n_e.degenerate,
            })
        })
        .collect()
}
