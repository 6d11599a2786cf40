//! Asymptotic expansions of `e_alpha / ES_alpha` and `(1 - β*)/(1 - alpha)`
//! as `alpha -> 1`, by extreme value domain, and the Hill-based extreme
//! expectile estimator.
//!
//! All expansions are truncated: the `o(.)` remainders are dropped.

use crate::distributions::{DistributionSpec, Mda, Sample};
use crate::error::{Result, RiskError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

/// A truncated expansion `leading * (1 + correction)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResult {
    pub order: Order,
    pub leading: f64,
    /// Zero at first order.
    pub correction: f64,
    pub value: f64,
    pub alpha: f64,
}

impl ExpansionResult {
    fn new(order: Order, leading: f64, correction: f64, alpha: f64) -> Self {
        let correction = if order == Order::First { 0.0 } else { correction };
        ExpansionResult {
            order,
            leading,
            correction,
            value: leading * (1.0 + correction),
            alpha,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.5..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(RiskError::range("alpha", alpha, "[1/2, 1)"))
    }
}

fn check_frechet(eta: f64, rho: f64) -> Result<()> {
    if !(eta > 1.0) || !eta.is_finite() {
        return Err(RiskError::invalid("eta", format!("tail index must be > 1, got {eta}")));
    }
    if !(rho <= 0.0) {
        return Err(RiskError::invalid(
            "rho",
            format!("second-order parameter must be <= 0, got {rho}"),
        ));
    }
    Ok(())
}

/// `(eta - 1)^((eta - 1)/eta) / eta`, the limit of `e_alpha / ES_alpha` for a
/// Fréchet tail with index `eta`.
pub fn frechet_constant(eta: f64) -> Result<f64> {
    check_frechet(eta, 0.0)?;
    Ok((eta - 1.0).powf((eta - 1.0) / eta) / eta)
}

/// Second-order coefficient `C_{eta,rho}` of the Fréchet expectile/ES ratio.
pub fn frechet_c(eta: f64, rho: f64) -> Result<f64> {
    check_frechet(eta, rho)?;
    if rho == 0.0 {
        Ok(((eta - 1.0).ln() + 1.0 / (eta - 1.0)) / eta)
    } else {
        Ok((eta - 1.0) / (rho * eta) * (1.0 - (eta - 1.0).powf(-rho / eta)) / (eta - rho - 1.0))
    }
}

/// `e_alpha / ES_alpha` for `1 - F in 2RV_{-eta,rho}` with auxiliary value
/// `a_at_q = A(q_alpha)`.
///
/// For a loss with nonzero mean, pass the auxiliary function and quantile of
/// the centered loss (see [`crate::distributions::EvClassification::recentered`]).
pub fn frechet_ratio(eta: f64, rho: f64, a_at_q: f64, alpha: f64, order: Order) -> Result<ExpansionResult> {
    check_alpha(alpha)?;
    check_frechet(eta, rho)?;
    let c0 = frechet_constant(eta)?;
    Ok(match order {
        Order::First => ExpansionResult::new(order, c0, 0.0, alpha),
        Order::Second => {
            let leading = c0 * (2.0 * alpha - 1.0).powf(1.0 / eta);
            ExpansionResult::new(order, leading, -frechet_c(eta, rho)? * a_at_q, alpha)
        }
    })
}

/// `(1 - β*)/(1 - alpha)` for a Fréchet tail.
pub fn frechet_beta_star_ratio(eta: f64, rho: f64, a_at_q: f64, alpha: f64, order: Order) -> Result<ExpansionResult> {
    check_alpha(alpha)?;
    check_frechet(eta, rho)?;
    let denom = eta - rho - 1.0;
    if denom == 0.0 {
        return Err(RiskError::Singular("eta - rho - 1 = 0"));
    }
    Ok(match order {
        Order::First => ExpansionResult::new(order, eta - 1.0, 0.0, alpha),
        Order::Second => {
            let leading = (eta - 1.0) / (2.0 * alpha - 1.0);
            let correction = -(eta - 1.0).powf(-rho / eta) / denom * a_at_q;
            ExpansionResult::new(order, leading, correction, alpha)
        }
    })
}

fn check_weibull(eta: f64, x_hat: f64, q: f64) -> Result<()> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(RiskError::invalid("eta", format!("must be > 0, got {eta}")));
    }
    if !(q < x_hat) {
        return Err(RiskError::invalid(
            "q",
            format!("quantile {q} must lie below the endpoint {x_hat}"),
        ));
    }
    Ok(())
}

/// `(x_hat - ES_alpha)/(x_hat - e_alpha)` for `1 - F(x_hat - 1/.) in 2RV_{-eta,rho}`.
///
/// `a0_at_q` is `A((x_hat - q)^(-eta/(eta+1)))`; pass zero when the tail is
/// exactly a power law. The constant uses `(x_hat - mean)`, so `mean = 0`
/// gives the zero-mean form.
#[allow(clippy::too_many_arguments)]
pub fn weibull_ratio(
    eta: f64,
    rho: f64,
    x_hat: f64,
    mean: f64,
    q: f64,
    a0_at_q: f64,
    alpha: f64,
    order: Order,
) -> Result<ExpansionResult> {
    check_alpha(alpha)?;
    check_weibull(eta, x_hat, q)?;
    if !(rho < 0.0) {
        return Err(RiskError::invalid("rho", format!("must be < 0, got {rho}")));
    }
    if eta - rho + 1.0 == 0.0 {
        return Err(RiskError::Singular("eta - rho + 1 = 0"));
    }
    if !(mean < x_hat) {
        return Err(RiskError::invalid(
            "mean",
            format!("mean {mean} must lie below the endpoint {x_hat}"),
        ));
    }
    let p = 1.0 / (eta + 1.0);
    let c = ((x_hat - mean) * (eta + 1.0)).powf(p);
    let leading = eta * ((2.0 * alpha - 1.0) * (x_hat - q)).powf(p) / ((eta + 1.0) * c);
    let mut correction = c * (x_hat - q).powf(eta * p) / ((eta + 1.0) * (x_hat - mean));
    if a0_at_q != 0.0 {
        correction += c.powf(-rho) * a0_at_q / (rho * (eta - rho + 1.0));
    }
    Ok(ExpansionResult::new(order, leading, correction, alpha))
}

/// `(x_hat (eta + 1)/(x_hat - q))^(eta/(eta+1))`, equivalent to
/// `(1 - β*)/(1 - alpha)` for a zero-mean Weibull-type loss.
pub fn weibull_beta_star_ratio(eta: f64, x_hat: f64, q: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_weibull(eta, x_hat, q)?;
    Ok((x_hat * (eta + 1.0) / (x_hat - q)).powf(eta / (eta + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GumbelRelation {
    /// `ln e_alpha ~ ln ES_alpha`
    LogEquivalent,
    /// `e_alpha ~ ES_alpha`
    Equivalent,
}

/// Gumbel-domain relation between expectile and ES: equivalence under a
/// finite endpoint or the slow-variation condition on `g` in
/// `F(x) = 1 - exp(-x^tau g(x))`, log-equivalence otherwise.
pub fn gumbel_relation(has_finite_endpoint: bool, satisfies_gu01: bool) -> GumbelRelation {
    if has_finite_endpoint || satisfies_gu01 {
        GumbelRelation::Equivalent
    } else {
        GumbelRelation::LogEquivalent
    }
}

/// Data for the expansions of a built-in family, evaluated at level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionInputs {
    pub eta: f64,
    pub rho: f64,
    /// Auxiliary function value fed to the expansion.
    pub aux: f64,
    /// Quantile of the loss (centered for Fréchet laws with nonzero mean).
    pub q: f64,
}

/// Fréchet inputs for the centered loss `L - E[L]`.
pub fn frechet_inputs(d: &DistributionSpec, alpha: f64) -> Result<ExpansionInputs> {
    let class = d.mda_classify()?;
    let Mda::Frechet { eta } = class.mda else {
        return Err(RiskError::Unsupported(format!("{d} is not of Fréchet type")));
    };
    let mean = d.mean();
    let class = class.recentered(mean);
    let q = d.quantile(alpha)? - mean;
    let aux = class.auxiliary.as_ref().map_or(0.0, |a| a.eval(q));
    Ok(ExpansionInputs {
        eta,
        rho: class.rho.unwrap_or(0.0),
        aux,
        q,
    })
}

/// [`frechet_ratio`] for a built-in Fréchet-type family, applied to the
/// centered loss.
pub fn frechet_ratio_for(d: &DistributionSpec, alpha: f64, order: Order) -> Result<ExpansionResult> {
    let inp = frechet_inputs(d, alpha)?;
    frechet_ratio(inp.eta, inp.rho, inp.aux, alpha, order)
}

/// [`frechet_beta_star_ratio`] for a built-in Fréchet-type family, applied to
/// the centered loss.
pub fn frechet_beta_star_ratio_for(d: &DistributionSpec, alpha: f64, order: Order) -> Result<ExpansionResult> {
    let inp = frechet_inputs(d, alpha)?;
    frechet_beta_star_ratio(inp.eta, inp.rho, inp.aux, alpha, order)
}

/// [`weibull_ratio`] for a built-in Weibull-type family.
pub fn weibull_ratio_for(d: &DistributionSpec, alpha: f64, order: Order) -> Result<ExpansionResult> {
    let class = d.mda_classify()?;
    let (Mda::Weibull { eta }, Some(x_hat)) = (class.mda, class.right_endpoint) else {
        return Err(RiskError::Unsupported(format!("{d} is not of Weibull type")));
    };
    let q = d.quantile(alpha)?;
    let a0 = class
        .auxiliary
        .as_ref()
        .map_or(0.0, |a| a.eval((x_hat - q).powf(-eta / (eta + 1.0))));
    weibull_ratio(eta, class.rho.unwrap_or(-1.0), x_hat, d.mean(), q, a0, alpha, order)
}

/// [`weibull_beta_star_ratio`] for a built-in Weibull-type family, applied
/// to the centered loss.
pub fn weibull_beta_star_ratio_for(d: &DistributionSpec, alpha: f64) -> Result<f64> {
    let class = d.mda_classify()?;
    let (Mda::Weibull { eta }, Some(x_hat)) = (class.mda, class.right_endpoint) else {
        return Err(RiskError::Unsupported(format!("{d} is not of Weibull type")));
    };
    let mean = d.mean();
    weibull_beta_star_ratio(eta, x_hat - mean, d.quantile(alpha)? - mean, alpha)
}

/// Hill estimate and the resulting extreme expectile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillEstimate {
    pub k: usize,
    pub eta_hat: f64,
    pub quantile: f64,
    pub expectile: f64,
}

/// Default number of upper order statistics, `ceil(n^0.7)`.
pub fn default_hill_k(n: usize) -> usize {
    (n as f64).powf(0.7).ceil() as usize
}

/// Hill estimator `k / sum_{i<=k} ln(X_(n-i+1) / X_(n-k))`.
pub fn hill(s: &Sample, k: usize) -> Result<f64> {
    let n = s.len();
    if k < 2 || k >= n {
        return Err(RiskError::invalid("k", format!("need 2 <= k < n = {n}, got {k}")));
    }
    let v = s.values();
    let threshold = v[n - k - 1];
    if !(threshold > 0.0) {
        return Err(RiskError::invalid(
            "k",
            format!("order statistic X_(n-k) = {threshold} must be positive"),
        ));
    }
    let lt = threshold.ln();
    let sum: f64 = v[n - k..].iter().map(|x| x.ln() - lt).sum();
    Ok(k as f64 / sum)
}

/// Extreme expectile `(eta_hat - 1)^(-1/eta_hat) q_{alpha,n}`.
pub fn extreme_expectile_estimate(s: &Sample, alpha: f64, k: Option<usize>) -> Result<HillEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(RiskError::range("alpha", alpha, "(0, 1)"));
    }
    let k = k.unwrap_or_else(|| default_hill_k(s.len()));
    let eta_hat = hill(s, k)?;
    if !(eta_hat > 1.0) {
        return Err(RiskError::invalid(
            "k",
            format!("Hill estimate {eta_hat} <= 1: no finite mean, expectile link undefined"),
        ));
    }
    let quantile = s.quantile(alpha);
    Ok(HillEstimate {
        k,
        eta_hat,
        quantile,
        expectile: (eta_hat - 1.0).powf(-1.0 / eta_hat) * quantile,
    })
}
