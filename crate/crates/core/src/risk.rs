//! Value at risk, expected shortfall, expectiles, optimized certainty
//! equivalents, the expectile/ES bound chain and distortion risk measures.

use crate::distributions::LossSource;
use crate::error::{Result, RiskError};
use crate::quadrature::tanh_sinh;
use crate::roots::{brent, BrentOptions};

/// Largest level accepted by expectile operations.
pub const MAX_EXPECTILE_LEVEL: f64 = 1.0 - 1e-12;

fn check_var_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(RiskError::range("alpha", alpha, "(0, 1)"))
    }
}

fn check_es_level(name: &'static str, alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(RiskError::range(name, alpha, "[0, 1)"))
    }
}

fn check_expectile_level(alpha: f64) -> Result<()> {
    if (0.5..=MAX_EXPECTILE_LEVEL).contains(&alpha) {
        Ok(())
    } else {
        Err(RiskError::range("alpha", alpha, "[1/2, 1 - 1e-12]"))
    }
}

/// Left quantile `inf { m : P[L <= m] >= alpha }`.
pub fn value_at_risk(src: &LossSource, alpha: f64) -> Result<f64> {
    check_var_level(alpha)?;
    Ok(src.quantile_unchecked(alpha))
}

/// `m + E[(L - m)^+] / (1 - alpha)`, minimized at `m = VaR_alpha`.
pub fn es_objective(src: &LossSource, alpha: f64, m: f64) -> f64 {
    m + src.upper_partial_moment(m) / (1.0 - alpha)
}

/// Expected shortfall `(1/(1-alpha)) ∫_alpha^1 q(u) du`.
pub fn expected_shortfall(src: &LossSource, alpha: f64) -> Result<f64> {
    check_es_level("alpha", alpha)?;
    if alpha == 0.0 {
        return Ok(src.mean());
    }
    let q = src.quantile_unchecked(alpha);
    let es = es_objective(src, alpha, q);
    debug_assert!(
        {
            let tail = src.tail_integral(alpha) / (1.0 - alpha);
            (tail - es).abs() <= 1e-9 * (1.0 + es.abs())
        },
        "plug-in ES {es} disagrees with the tail average at alpha={alpha}"
    );
    Ok(es)
}

/// `g(m) = alpha E[(L-m)^+] - (1-alpha) E[(L-m)^-]`, written as
/// `(2 alpha - 1) E[(L-m)^+] - (1 - alpha)(m - E[L])`.
pub fn expectile_foc(src: &LossSource, alpha: f64, m: f64) -> f64 {
    (2.0 * alpha - 1.0) * src.upper_partial_moment(m) - (1.0 - alpha) * (m - src.mean())
}

/// The `alpha`-expectile: the root of [`expectile_foc`].
///
/// Parametric laws use Brent's method on `[E[L], ES_alpha]`; samples are
/// solved exactly on the piecewise-linear segment holding the root.
pub fn expectile(src: &LossSource, alpha: f64) -> Result<f64> {
    check_expectile_level(alpha)?;
    if alpha == 0.5 {
        return Ok(src.mean());
    }
    match src {
        LossSource::Empirical(s) => {
            if s.is_constant() {
                return Ok(s.min());
            }
            Ok(empirical_expectile(s, alpha))
        }
        LossSource::Parametric(d) => {
            if d.is_degenerate() {
                return Ok(d.mean());
            }
            expectile_brent(src, alpha)
        }
    }
}

/// Expectile by Brent's method on the bracket `[E[L], ES_alpha]`, for any source.
pub fn expectile_brent(src: &LossSource, alpha: f64) -> Result<f64> {
    check_expectile_level(alpha)?;
    let mean = src.mean();
    let hi = expected_shortfall(src, alpha)?;
    if hi <= mean {
        return Ok(mean);
    }
    let opts = BrentOptions {
        xtol: 1e-13,
        ..BrentOptions::default()
    };
    Ok(brent(|m| expectile_foc(src, alpha, m), mean, hi, opts)?.x)
}

fn empirical_expectile(s: &crate::distributions::Sample, alpha: f64) -> f64 {
    let v = s.values();
    let n = v.len();
    let nf = n as f64;
    let mean = s.mean();
    let w = 2.0 * alpha - 1.0;
    let g = |m: f64| {
        let j = s.count_le(m);
        w * (s.suffix_sum(j) - m * (n - j) as f64) / nf - (1.0 - alpha) * (m - mean)
    };
    // largest i with g(v[i]) >= 0; g(v[0]) > 0 > g(v[n-1])
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if g(v[mid]) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // on [v[lo], v[hi]) the values strictly above m are those above v[lo]
    let j = s.count_le(v[lo]);
    let above = (n - j) as f64;
    let m = (w * s.suffix_sum(j) / nf + (1.0 - alpha) * mean) / (w * above / nf + (1.0 - alpha));
    m.clamp(v[lo], v[hi])
}

/// Parameters `(a, b)` of the loss `l(x) = x^+/a - b x^-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OceParams {
    a: f64,
    b: f64,
}

impl OceParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(RiskError::range("a", a, "(0, 1)"));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(RiskError::range("b", b, "[0, 1]"));
        }
        Ok(OceParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `(1 - a) / (1 - a b)`.
    pub fn lambda(&self) -> f64 {
        (1.0 - self.a) / (1.0 - self.a * self.b)
    }

    pub fn loss(&self, x: f64) -> f64 {
        if x >= 0.0 {
            x / self.a
        } else {
            self.b * x
        }
    }
}

/// `m + E[l_{a,b}(L - m)]`.
pub fn oce_objective(src: &LossSource, p: OceParams, m: f64) -> f64 {
    let upm = src.upper_partial_moment(m);
    let lpm = upm - (src.mean() - m);
    m + upm / p.a - p.b * lpm
}

/// Optimized certainty equivalent `inf_m { m + E[l_{a,b}(L - m)] }`,
/// evaluated as `(1 - b) ES_lambda + b E[L]`.
pub fn oce(src: &LossSource, p: OceParams) -> Result<f64> {
    if p.b == 1.0 {
        return Ok(src.mean());
    }
    let lambda = p.lambda();
    let value = (1.0 - p.b) * expected_shortfall(src, lambda)? + p.b * src.mean();
    debug_assert!(
        {
            let direct = oce_objective(src, p, src.quantile_unchecked(lambda));
            (direct - value).abs() <= 1e-9 * (1.0 + value.abs())
        },
        "OCE closed form disagrees with the objective at its minimizer"
    );
    Ok(value)
}

/// Weight of the mean in the expectile/ES reconstruction at level `beta`.
fn mean_weight(alpha: f64, beta: f64) -> f64 {
    (1.0 - alpha) / (alpha + (1.0 - 2.0 * alpha) * beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectileBounds {
    pub lower: f64,
    pub upper: f64,
    pub es_cap: f64,
}

/// Lower bound from `ES_beta`, upper bound from `ES_alpha`, and the cap
/// `ES_{(2 alpha - 1)/alpha}` on the expectile.
pub fn expectile_bounds(src: &LossSource, alpha: f64, beta: f64) -> Result<ExpectileBounds> {
    check_expectile_level(alpha)?;
    if !(beta > 0.0 && beta < 1.0) {
        return Err(RiskError::range("beta", beta, "(0, 1)"));
    }
    let mean = src.mean();
    let c = mean_weight(alpha, beta);
    let lower = (1.0 - c) * expected_shortfall(src, beta)? + c * mean;
    let k = (1.0 - alpha) / alpha;
    let upper = (1.0 - k) * expected_shortfall(src, alpha)? + k * mean;
    let es_cap = expected_shortfall(src, (2.0 * alpha - 1.0) / alpha)?;
    Ok(ExpectileBounds { lower, upper, es_cap })
}

/// The level(s) at which the ES lower bound is attained by the expectile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaStarResult {
    /// `P[L < e_alpha]`
    pub lower: f64,
    /// `P[L <= e_alpha]`
    pub upper: f64,
    pub point: f64,
    pub expectile: f64,
}

impl BetaStarResult {
    pub fn contains(&self, beta: f64, tol: f64) -> bool {
        beta >= self.lower - tol && beta <= self.upper + tol
    }
}

/// Computes `e_alpha` and the interval `[P[L < e], P[L <= e]]` of levels that
/// reproduce it from expected shortfall.
pub fn beta_star(src: &LossSource, alpha: f64) -> Result<BetaStarResult> {
    check_expectile_level(alpha)?;
    if src.is_constant() {
        return Err(RiskError::ConstantSource("beta*"));
    }
    let e = expectile(src, alpha)?;
    let (lower, upper, point) = if src.is_atomic() {
        let tol = 1e-12 * (1.0 + e.abs());
        let lower = src.prob_below(e - tol);
        let upper = src.cdf(e + tol);
        (lower, upper, 0.5 * (lower + upper))
    } else {
        let f = src.cdf(e);
        (f, f, f)
    };
    debug_assert!(0.0 < lower && lower <= point && point <= upper && upper < 1.0);
    Ok(BetaStarResult {
        lower,
        upper,
        point,
        expectile: e,
    })
}

/// `(1 - c) ES_beta + c E[L]` with `c = (1-alpha)/(alpha + (1-2 alpha) beta)`.
pub fn reconstruct_expectile(src: &LossSource, alpha: f64, beta: f64) -> Result<f64> {
    check_expectile_level(alpha)?;
    check_es_level("beta", beta)?;
    let c = mean_weight(alpha, beta);
    Ok((1.0 - c) * expected_shortfall(src, beta)? + c * src.mean())
}

/// How [`expectile_from_es`] treats a level outside the β* interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalCheck {
    Strict,
    Warn,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub value: f64,
    pub warning: Option<String>,
}

/// Expectile rebuilt from `ES_beta` and the mean; exact when `beta` lies in
/// the β* interval.
pub fn expectile_from_es(src: &LossSource, alpha: f64, beta: f64, check: IntervalCheck) -> Result<Reconstruction> {
    let value = reconstruct_expectile(src, alpha, beta)?;
    let warning = if alpha == 0.5 || src.is_constant() {
        None
    } else {
        let bs = beta_star(src, alpha)?;
        if bs.contains(beta, 1e-9) {
            None
        } else {
            let msg = format!(
                "beta = {beta} lies outside [{}, {}]; the value is only a lower bound",
                bs.lower, bs.upper
            );
            if check == IntervalCheck::Strict {
                return Err(RiskError::invalid("beta", msg));
            }
            Some(msg)
        }
    };
    Ok(Reconstruction { value, warning })
}

/// A concave distortion function on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionSpec {
    /// `phi(t) = alpha t / ((2 alpha - 1) t + 1 - alpha)`
    Expectile { alpha: f64 },
    /// `(1 - lambda)(t/(1-beta) ∧ 1) + lambda (t/(1-delta) ∧ 1)`
    MixtureEs { lambda: f64, beta: f64, delta: f64 },
}

impl DistortionSpec {
    pub fn expectile(alpha: f64) -> Result<Self> {
        check_expectile_level(alpha)?;
        Ok(DistortionSpec::Expectile { alpha })
    }

    pub fn mixture(lambda: f64, beta: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(RiskError::range("lambda", lambda, "[0, 1]"));
        }
        check_es_level("beta", beta)?;
        check_es_level("delta", delta)?;
        Ok(DistortionSpec::MixtureEs { lambda, beta, delta })
    }

    /// The smallest ES mixture dominating the expectile distortion.
    pub fn optimal_mixture(alpha: f64) -> Result<Self> {
        check_expectile_level(alpha)?;
        Self::mixture((1.0 - alpha) / alpha, alpha, 0.0)
    }

    pub fn phi(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match *self {
            DistortionSpec::Expectile { alpha } => alpha * t / ((2.0 * alpha - 1.0) * t + 1.0 - alpha),
            DistortionSpec::MixtureEs { lambda, beta, delta } => {
                (1.0 - lambda) * (t / (1.0 - beta)).min(1.0) + lambda * (t / (1.0 - delta)).min(1.0)
            }
        }
    }
}

/// Distortion risk measure `∫_0^1 phi'(t) q(1 - t) dt`.
pub fn distortion_value(src: &LossSource, d: DistortionSpec) -> Result<f64> {
    match d {
        DistortionSpec::MixtureEs { lambda, beta, delta } => {
            Ok((1.0 - lambda) * expected_shortfall(src, beta)? + lambda * expected_shortfall(src, delta)?)
        }
        DistortionSpec::Expectile { alpha } => {
            if alpha == 0.5 {
                return Ok(src.mean());
            }
            match src {
                LossSource::Empirical(s) => {
                    // each atom carries phi(upper tail incl. atom) - phi(upper tail excl. atom)
                    let v = s.values();
                    let n = v.len() as f64;
                    let mut acc = crate::distributions::CompensatedSum::default();
                    for (i, &x) in v.iter().enumerate() {
                        let w = d.phi((v.len() - i) as f64 / n) - d.phi((v.len() - i - 1) as f64 / n);
                        acc.add(w * x);
                    }
                    Ok(acc.value())
                }
                LossSource::Parametric(dist) if !dist.is_continuous() => {
                    let x1 = dist.quantile_unchecked(1e-300);
                    let x2 = dist.upper_quantile(1e-300);
                    let top = 1.0 - dist.cdf(x1);
                    let w = d.phi(top);
                    Ok(w * x2 + (1.0 - w) * x1)
                }
                LossSource::Parametric(dist) => {
                    let dphi = |t: f64| alpha * (1.0 - alpha) / ((2.0 * alpha - 1.0) * t + 1.0 - alpha).powi(2);
                    let tol = 1e-12;
                    let upper = tanh_sinh(|t| dphi(t) * dist.upper_quantile(t), 0.5, tol)?;
                    let lower = tanh_sinh(|s| dphi(1.0 - s) * dist.quantile_unchecked(s), 0.5, tol)?;
                    Ok(upper.value + lower.value)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionPoint {
    pub t: f64,
    pub phi: f64,
    pub phi_mixture: f64,
}

/// The expectile distortion and its optimal ES-mixture majorant on a uniform
/// grid of `grid` points over `[0, 1]`.
pub fn distortion_curves(alpha: f64, grid: usize) -> Result<Vec<DistortionPoint>> {
    if grid < 2 {
        return Err(RiskError::invalid(
            "grid",
            format!("need at least 2 points, got {grid}"),
        ));
    }
    let phi = DistortionSpec::expectile(alpha)?;
    let mix = DistortionSpec::optimal_mixture(alpha)?;
    Ok((0..grid)
        .map(|i| {
            let t = if i == grid - 1 {
                1.0
            } else {
                i as f64 / (grid - 1) as f64
            };
            DistortionPoint {
                t,
                phi: phi.phi(t),
                phi_mixture: mix.phi(t),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{DistributionSpec, Sample};
    use crate::special::lambert_w0;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn par(d: DistributionSpec) -> LossSource {
        LossSource::Parametric(d)
    }

    fn emp(v: &[f64]) -> LossSource {
        LossSource::Empirical(Sample::new(v.to_vec()).unwrap())
    }

    fn families() -> Vec<LossSource> {
        vec![
            par(DistributionSpec::uniform()),
            par(DistributionSpec::power_beta(1.1).unwrap()),
            par(DistributionSpec::exponential()),
            par(DistributionSpec::pareto(2.1).unwrap()),
            par(DistributionSpec::pareto(2.0).unwrap().with_shift(-1.0).unwrap()),
            par(DistributionSpec::student_t(2.3).unwrap()),
            par(DistributionSpec::two_point(0.0, 1.0, 0.5).unwrap()),
            emp(&[1.0, 2.0, 3.0, 4.0, 10.0]),
            emp(&[-3.0, 0.5, 0.5, 0.5, 2.0, 7.5]),
        ]
    }

    #[test]
    fn var_examples() {
        assert_eq!(value_at_risk(&emp(&[1.0, 2.0, 3.0, 4.0]), 0.5).unwrap(), 2.0);
        assert_relative_eq!(
            value_at_risk(&par(DistributionSpec::uniform()), 0.9).unwrap(),
            0.9,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            value_at_risk(&par(DistributionSpec::pareto(2.0).unwrap()), 0.75).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert!(value_at_risk(&par(DistributionSpec::uniform()), 0.0).is_err());
        assert!(value_at_risk(&par(DistributionSpec::uniform()), 1.0).is_err());
    }

    #[test]
    fn es_examples() {
        for src in families() {
            assert_eq!(expected_shortfall(&src, 0.0).unwrap(), src.mean());
        }
        let tp = par(DistributionSpec::two_point(0.0, 1.0, 0.5).unwrap());
        assert_relative_eq!(expected_shortfall(&tp, 4.0 / 9.0).unwrap(), 0.9, epsilon = 1e-15);
        let p2 = par(DistributionSpec::pareto(2.0).unwrap());
        assert_relative_eq!(expected_shortfall(&p2, 0.75).unwrap(), 3.0, epsilon = 1e-13);
        assert!(expected_shortfall(&p2, 1.0).is_err());
    }

    #[test]
    fn es_primal_minimum_at_quantile() {
        for src in families() {
            for &alpha in &[0.3, 0.8, 0.95] {
                let es = expected_shortfall(&src, alpha).unwrap();
                let q = value_at_risk(&src, alpha).unwrap();
                for k in -20..=20 {
                    let m = q + 0.05 * k as f64;
                    assert!(es_objective(&src, alpha, m) >= es - 1e-12 * (1.0 + es.abs()));
                }
            }
        }
    }

    #[test]
    fn es_equals_greedy_dual_on_samples() {
        // spread total mass 1 over the largest values with density at most 1/(1-alpha)
        let v = [5.0, -1.0, 2.0, 2.0, 9.0, 0.0, 3.5];
        let src = emp(&v);
        let mut sorted = v.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let n = sorted.len() as f64;
        for &alpha in &[0.1, 0.5, 0.6, 0.85, 0.99] {
            let cap = 1.0 / ((1.0 - alpha) * n);
            let mut left = 1.0;
            let mut dual = 0.0;
            for &x in &sorted {
                let w = cap.min(left);
                dual += w * x;
                left -= w;
            }
            assert_relative_eq!(expected_shortfall(&src, alpha).unwrap(), dual, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectile_examples() {
        for src in families() {
            assert_eq!(expectile(&src, 0.5).unwrap(), src.mean());
        }
        let u = par(DistributionSpec::uniform());
        assert_relative_eq!(expectile(&u, 0.9).unwrap(), 0.75, epsilon = 1e-12);
        let alpha: f64 = 0.9;
        let closed = ((alpha * (1.0 - alpha)).sqrt() - alpha) / (1.0 - 2.0 * alpha);
        assert_relative_eq!(closed, 0.75, epsilon = 1e-15);
        let e = par(DistributionSpec::exponential());
        let w = 1.0 + lambert_w0(8.0 / std::f64::consts::E).unwrap();
        assert_relative_eq!(expectile(&e, 0.9).unwrap(), w, epsilon = 1e-11);
        assert!((w - 2.040).abs() < 5e-4);
        assert!(expectile(&u, 0.4).is_err());
        assert!(expectile(&u, 1.0 - 1e-13).is_err());
    }

    #[test]
    fn pareto_two_expectile_closed_form() {
        let p = par(DistributionSpec::pareto(2.0).unwrap());
        for &alpha in &[0.6f64, 0.9, 0.99, 0.9999, 1.0 - 1e-9] {
            let closed = (alpha * (1.0 - alpha)).sqrt() / (1.0 - alpha);
            assert_relative_eq!(expectile(&p, alpha).unwrap(), closed, max_relative = 1e-11);
        }
    }

    #[test]
    fn empirical_expectile_agrees_with_brent() {
        for src in families() {
            for &alpha in &[0.55, 0.75, 0.9, 0.99] {
                let exact = expectile(&src, alpha).unwrap();
                let root = expectile_brent(&src, alpha).unwrap();
                assert!((exact - root).abs() < 1e-11, "{alpha}: {exact} vs {root}");
                assert!(expectile_foc(&src, alpha, exact).abs() <= 1e-10 * (1.0 + exact.abs()));
            }
        }
    }

    #[test]
    fn constant_sample() {
        let c = emp(&[2.5, 2.5, 2.5]);
        assert_eq!(expectile(&c, 0.9).unwrap(), 2.5);
        assert_eq!(beta_star(&c, 0.9).unwrap_err(), RiskError::ConstantSource("beta*"));
    }

    #[test]
    fn oce_examples() {
        for src in families() {
            for &alpha in &[0.1, 0.7, 0.95] {
                let p = OceParams::new(1.0 - alpha, 0.0).unwrap();
                assert_relative_eq!(
                    oce(&src, p).unwrap(),
                    expected_shortfall(&src, alpha).unwrap(),
                    epsilon = 1e-12
                );
            }
            assert_eq!(oce(&src, OceParams::new(0.3, 1.0).unwrap()).unwrap(), src.mean());
        }
        let u = par(DistributionSpec::uniform());
        assert_relative_eq!(
            oce(&u, OceParams::new(0.5, 0.0).unwrap()).unwrap(),
            0.75,
            epsilon = 1e-14
        );
        assert!(OceParams::new(1.0, 0.0).is_err());
        assert!(OceParams::new(0.5, 1.5).is_err());
    }

    #[test]
    fn oce_is_minimum_of_objective() {
        for src in families() {
            for &(a, b) in &[(0.2, 0.5), (0.6, 0.9), (0.05, 0.0)] {
                let p = OceParams::new(a, b).unwrap();
                let v = oce(&src, p).unwrap();
                let m_star = src.quantile_unchecked(p.lambda());
                assert_relative_eq!(oce_objective(&src, p, m_star), v, epsilon = 1e-10);
                for k in -10..=10 {
                    assert!(oce_objective(&src, p, m_star + 0.1 * k as f64) >= v - 1e-10);
                }
            }
        }
    }

    #[test]
    fn expectile_is_an_oce_fixed_point() {
        // e_alpha = inf { m : E[l_{a,b}(L - m)] <= 0 } with a = 1/(2 alpha), b = 2(1 - alpha)
        for src in families() {
            let alpha = 0.8;
            let p = OceParams::new(1.0 / (2.0 * alpha), 2.0 * (1.0 - alpha)).unwrap();
            let e = expectile(&src, alpha).unwrap();
            assert!((oce_objective(&src, p, e) - e).abs() < 1e-10);
        }
    }

    #[test]
    fn bounds_examples() {
        let alpha = 0.75;
        let u = par(DistributionSpec::uniform().with_shift(-0.5).unwrap());
        let b = expectile_bounds(&u, alpha, alpha).unwrap();
        let es = expected_shortfall(&u, alpha).unwrap();
        assert_relative_eq!(b.lower, es / 3.0, epsilon = 1e-14);
        for src in families() {
            let b = expectile_bounds(&src, 0.5, 0.3).unwrap();
            assert_relative_eq!(b.lower, src.mean(), epsilon = 1e-14);
            assert_relative_eq!(b.upper, src.mean(), epsilon = 1e-14);
        }
        let p = par(DistributionSpec::pareto(2.0).unwrap());
        let bs = beta_star(&p, 0.9).unwrap();
        let b = expectile_bounds(&p, 0.9, bs.point).unwrap();
        assert_relative_eq!(b.lower, bs.expectile, epsilon = 1e-9);
    }

    #[test]
    fn beta_star_examples() {
        let u = beta_star(&par(DistributionSpec::uniform()), 0.9).unwrap();
        assert_relative_eq!(u.point, 0.75, epsilon = 1e-12);
        let tp = par(DistributionSpec::two_point(0.0, 1.0, 0.5).unwrap());
        let b = beta_star(&tp, 0.9).unwrap();
        assert_eq!((b.lower, b.upper), (0.5, 0.5));
        assert_relative_eq!(b.expectile, 0.9, epsilon = 1e-12);
        assert_relative_eq!(reconstruct_expectile(&tp, 0.9, 0.5).unwrap(), 0.9, epsilon = 1e-12);
        let alpha: f64 = 0.9;
        let r = 2.0 * (alpha * (1.0 - alpha)).sqrt();
        let p = beta_star(&par(DistributionSpec::pareto(2.0).unwrap()), alpha).unwrap();
        assert_relative_eq!(p.point, (alpha + r) / (1.0 + r), epsilon = 1e-12);
    }

    #[test]
    fn reconstruction_over_whole_interval() {
        let src = emp(&[-3.0, 0.5, 0.5, 0.5, 2.0, 7.5, 0.5, 1.0]);
        for &alpha in &[0.55, 0.7, 0.9] {
            let bs = beta_star(&src, alpha).unwrap();
            for beta in [bs.lower, bs.point, bs.upper] {
                let r = reconstruct_expectile(&src, alpha, beta).unwrap();
                assert!(
                    (r - bs.expectile).abs() < 1e-12,
                    "{alpha} {beta}: {r} vs {}",
                    bs.expectile
                );
            }
        }
    }

    #[test]
    fn expectile_on_an_atom_opens_the_interval() {
        // mean 2, U(3) = 1/2, so (2a - 1)/2 = (1 - a) at a = 3/4
        let src = emp(&[0.0, 0.0, 3.0, 5.0]);
        let bs = beta_star(&src, 0.75).unwrap();
        assert_relative_eq!(bs.expectile, 3.0, epsilon = 1e-14);
        assert_eq!((bs.lower, bs.upper, bs.point), (0.5, 0.75, 0.625));
        for beta in [0.5, 0.6, 0.75] {
            assert_relative_eq!(reconstruct_expectile(&src, 0.75, beta).unwrap(), 3.0, epsilon = 1e-14);
        }
        assert!(reconstruct_expectile(&src, 0.75, 0.9).unwrap() < 3.0 - 1e-6);
    }

    #[test]
    fn from_es_examples() {
        let u = par(DistributionSpec::uniform());
        let r = expectile_from_es(&u, 0.9, 0.75, IntervalCheck::Strict).unwrap();
        assert_relative_eq!(r.value, 0.75, epsilon = 1e-12);
        assert!(r.warning.is_none());
        for src in families() {
            let r = expectile_from_es(&src, 0.5, 0.3, IntervalCheck::Strict).unwrap();
            assert_relative_eq!(r.value, src.mean(), epsilon = 1e-14);
        }
        let e = par(DistributionSpec::exponential());
        let w = lambert_w0(8.0 / std::f64::consts::E).unwrap();
        let beta = 1.0 - (-1.0 - w).exp();
        let r = expectile_from_es(&e, 0.9, beta, IntervalCheck::Strict).unwrap();
        assert_relative_eq!(r.value, 1.0 + w, epsilon = 1e-9);
        let r = expectile_from_es(&u, 0.9, 0.5, IntervalCheck::Warn).unwrap();
        assert!(r.warning.is_some());
        assert!(r.value < 0.75);
        assert!(expectile_from_es(&u, 0.9, 0.5, IntervalCheck::Strict).is_err());
    }

    #[test]
    fn distortion_examples() {
        for &t in &[0.0f64, 0.06, 0.3, 0.8, 1.0] {
            let src = par(DistributionSpec::two_point(0.0, 1.0, 1.0 - t.clamp(1e-9, 1.0 - 1e-9)).unwrap());
            let d = DistortionSpec::expectile(0.9).unwrap();
            assert_relative_eq!(
                distortion_value(&src, d).unwrap(),
                d.phi(t.clamp(1e-9, 1.0 - 1e-9)),
                epsilon = 1e-14
            );
            let e = expectile(&src, 0.9).unwrap();
            assert_relative_eq!(e, d.phi(t.clamp(1e-9, 1.0 - 1e-9)), epsilon = 1e-12);
        }
        for src in families() {
            let alpha = 0.9;
            let mix = distortion_value(&src, DistortionSpec::optimal_mixture(alpha).unwrap()).unwrap();
            let k = (1.0 - alpha) / alpha;
            let upper = (1.0 - k) * expected_shortfall(&src, alpha).unwrap() + k * src.mean();
            assert_relative_eq!(mix, upper, epsilon = 1e-12);
            let m = DistortionSpec::mixture(0.0, 0.0, 0.7).unwrap();
            assert_relative_eq!(distortion_value(&src, m).unwrap(), src.mean(), epsilon = 1e-14);
        }
    }

    #[test]
    fn distortion_sandwich() {
        for src in families() {
            for &alpha in &[0.6, 0.9, 0.99] {
                let r = distortion_value(&src, DistortionSpec::expectile(alpha).unwrap()).unwrap();
                let e = expectile(&src, alpha).unwrap();
                let k = (1.0 - alpha) / alpha;
                let upper = (1.0 - k) * expected_shortfall(&src, alpha).unwrap() + k * src.mean();
                let tol = 1e-9 * (1.0 + r.abs());
                assert!(e <= r + tol && r <= upper + tol, "alpha={alpha}: {e} <= {r} <= {upper}");
            }
        }
    }

    #[test]
    fn distortion_uniform_closed_form() {
        // ∫_0^1 phi'(t)(1 - t) dt = ∫_0^1 phi(t) dt
        let alpha: f64 = 0.8;
        let k = 2.0 * alpha - 1.0;
        let c = 1.0 - alpha;
        let exact = alpha / k * (1.0 - c / k * ((k + c) / c).ln());
        let r = distortion_value(
            &par(DistributionSpec::uniform()),
            DistortionSpec::expectile(alpha).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(r, exact, epsilon = 1e-12);
    }

    #[test]
    fn curve_examples() {
        let c = distortion_curves(0.94, 51).unwrap();
        assert_eq!((c[0].t, c[0].phi, c[0].phi_mixture), (0.0, 0.0, 0.0));
        assert_eq!((c[50].t, c[50].phi, c[50].phi_mixture), (1.0, 1.0, 1.0));
        for p in &c {
            assert!(p.phi <= p.phi_mixture + 1e-15);
        }
        let phi = DistortionSpec::expectile(0.94).unwrap();
        let mix = DistortionSpec::optimal_mixture(0.94).unwrap();
        assert_relative_eq!(phi.phi(0.06), 0.5, epsilon = 1e-14);
        assert_relative_eq!(mix.phi(0.06), 0.94, epsilon = 1e-14);
        assert!(distortion_curves(0.94, 1).is_err());
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-50.0f64..50.0, 2..40)
    }

    proptest! {
        #[test]
        fn cash_invariance(v in sample_strategy(), m in -10.0f64..10.0, alpha in 0.5f64..0.99) {
            let a = emp(&v);
            let shifted: Vec<f64> = v.iter().map(|x| x - m).collect();
            let b = emp(&shifted);
            let tol = 1e-9 * (1.0 + m.abs() + 50.0);
            prop_assert!((expected_shortfall(&b, alpha).unwrap() - (expected_shortfall(&a, alpha).unwrap() - m)).abs() < tol);
            prop_assert!((expectile(&b, alpha).unwrap() - (expectile(&a, alpha).unwrap() - m)).abs() < tol);
        }

        #[test]
        fn monotone_and_homogeneous(v in sample_strategy(), bump in prop::collection::vec(0.0f64..5.0, 40), k in 0.1f64..10.0, alpha in 0.5f64..0.99) {
            let a = emp(&v);
            let up: Vec<f64> = v.iter().zip(&bump).map(|(x, d)| x + d).collect();
            let b = emp(&up);
            prop_assert!(expected_shortfall(&b, alpha).unwrap() >= expected_shortfall(&a, alpha).unwrap() - 1e-9);
            prop_assert!(expectile(&b, alpha).unwrap() >= expectile(&a, alpha).unwrap() - 1e-9);
            let scaled: Vec<f64> = v.iter().map(|x| k * x).collect();
            let c = emp(&scaled);
            let tol = 1e-9 * (1.0 + 50.0 * k);
            prop_assert!((expected_shortfall(&c, alpha).unwrap() - k * expected_shortfall(&a, alpha).unwrap()).abs() < tol);
            prop_assert!((expectile(&c, alpha).unwrap() - k * expectile(&a, alpha).unwrap()).abs() < tol);
        }

        #[test]
        fn subadditive(pairs in prop::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 2..40), alpha in 0.5f64..0.99) {
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let s: Vec<f64> = pairs.iter().map(|p| p.0 + p.1).collect();
            let (x, y, s) = (emp(&x), emp(&y), emp(&s));
            for f in [expected_shortfall, expectile] {
                prop_assert!(f(&s, alpha).unwrap() <= f(&x, alpha).unwrap() + f(&y, alpha).unwrap() + 1e-9);
            }
        }

        #[test]
        fn expectile_below_es_and_increasing(v in sample_strategy(), a1 in 0.5f64..0.999, a2 in 0.5f64..0.999) {
            let src = emp(&v);
            let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
            let e_lo = expectile(&src, lo).unwrap();
            let e_hi = expectile(&src, hi).unwrap();
            prop_assert!(e_lo <= e_hi + 1e-9);
            prop_assert!(e_hi <= expected_shortfall(&src, hi).unwrap() + 1e-9);
        }

        #[test]
        fn bound_chain(v in sample_strategy(), alpha in 0.5f64..0.999, beta in 0.001f64..0.999) {
            let src = emp(&v);
            let b = expectile_bounds(&src, alpha, beta).unwrap();
            let e = expectile(&src, alpha).unwrap();
            let tol = 1e-9 * (1.0 + e.abs());
            prop_assert!(b.lower <= e + tol);
            prop_assert!(e <= b.upper + tol);
            prop_assert!(b.upper <= b.es_cap + tol);
        }

        #[test]
        fn reconstruction_exact_on_interval(v in sample_strategy(), alpha in 0.5001f64..0.999) {
            let src = emp(&v);
            prop_assume!(!src.is_constant());
            let bs = beta_star(&src, alpha).unwrap();
            prop_assert!(0.0 < bs.lower && bs.lower <= bs.point && bs.point <= bs.upper && bs.upper < 1.0);
            for beta in [bs.lower, bs.point, bs.upper] {
                let r = reconstruct_expectile(&src, alpha, beta).unwrap();
                prop_assert!((r - bs.expectile).abs() <= 1e-9 * (1.0 + bs.expectile.abs()));
            }
        }

        #[test]
        fn expectile_foc_residual(v in sample_strategy(), alpha in 0.5f64..0.9999) {
            let src = emp(&v);
            let e = expectile(&src, alpha).unwrap();
            prop_assert!(expectile_foc(&src, alpha, e).abs() <= 1e-10 * (1.0 + e.abs()));
        }

        #[test]
        fn distortion_curves_are_ordered(alpha in 0.5f64..0.999, grid in 2usize..200) {
            let c = distortion_curves(alpha, grid).unwrap();
            let mut prev = (0.0, 0.0);
            for p in &c {
                prop_assert!(p.phi <= p.phi_mixture + 1e-14);
                prop_assert!(p.phi >= prev.0 && p.phi_mixture >= prev.1);
                prev = (p.phi, p.phi_mixture);
            }
        }
    }
}
