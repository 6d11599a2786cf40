//! Parametric loss families, empirical samples, and the [`LossSource`] view
//! that the risk operations consume.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Result, RiskError};
use crate::rng::UniformStream;
use crate::special::StudentT;

/// Parametric family of a loss distribution, before the location shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `F(x) = x^a` on `[0, 1]`.
    PowerBeta {
        a: f64,
    },
    /// Unit-rate exponential.
    Exponential,
    /// `F(x) = 1 - (1 + x)^-a` on `[0, inf)`.
    Pareto {
        a: f64,
    },
    /// Standard Student t.
    StudentT {
        nu: f64,
    },
    /// `x1` with probability `p`, `x2` with probability `1 - p`.
    TwoPoint {
        x1: f64,
        x2: f64,
        p: f64,
    },
    Uniform01,
}

/// A parametric loss distribution: a [`Family`] plus an additive shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    family: Family,
    shift: f64,
    student: Option<StudentT>,
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(RiskError::invalid(name, format!("must be finite, got {v}")))
    }
}

fn check_open_unit(name: &'static str, u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(RiskError::range(name, u, "(0, 1)"))
    }
}

impl DistributionSpec {
    pub fn new(family: Family, shift: f64) -> Result<Self> {
        check_finite("shift", shift)?;
        match family {
            Family::PowerBeta { a } => {
                check_finite("a", a)?;
                if a <= 0.0 {
                    return Err(RiskError::invalid("a", format!("power shape must be > 0, got {a}")));
                }
            }
            Family::Pareto { a } => {
                check_finite("a", a)?;
                if a <= 1.0 {
                    return Err(RiskError::invalid(
                        "a",
                        format!("Pareto needs a > 1 for a finite mean, got {a}"),
                    ));
                }
            }
            Family::StudentT { nu } => {
                check_finite("nu", nu)?;
                if nu <= 1.0 {
                    return Err(RiskError::invalid(
                        "nu",
                        format!("Student t needs nu > 1 for a finite mean, got {nu}"),
                    ));
                }
            }
            Family::TwoPoint { x1, x2, p } => {
                check_finite("x1", x1)?;
                check_finite("x2", x2)?;
                if x1 > x2 {
                    return Err(RiskError::invalid("x1", format!("need x1 <= x2, got {x1} > {x2}")));
                }
                check_open_unit("p", p)?;
            }
            Family::Exponential | Family::Uniform01 => {}
        }
        let student = match family {
            Family::StudentT { nu } => Some(StudentT::new(nu)),
            _ => None,
        };
        Ok(DistributionSpec { family, shift, student })
    }

    pub fn power_beta(a: f64) -> Result<Self> {
        Self::new(Family::PowerBeta { a }, 0.0)
    }

    pub fn exponential() -> Self {
        Self::new(Family::Exponential, 0.0).expect("valid")
    }

    pub fn pareto(a: f64) -> Result<Self> {
        Self::new(Family::Pareto { a }, 0.0)
    }

    pub fn student_t(nu: f64) -> Result<Self> {
        Self::new(Family::StudentT { nu }, 0.0)
    }

    pub fn two_point(x1: f64, x2: f64, p: f64) -> Result<Self> {
        Self::new(Family::TwoPoint { x1, x2, p }, 0.0)
    }

    pub fn uniform() -> Self {
        Self::new(Family::Uniform01, 0.0).expect("valid")
    }

    pub fn with_shift(self, shift: f64) -> Result<Self> {
        Self::new(self.family, shift)
    }

    /// The same family shifted to zero mean.
    pub fn centered(self) -> Self {
        let raw_mean = self.mean() - self.shift;
        Self::new(self.family, -raw_mean).expect("finite mean")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Power exponent of `F(x) = x^a` for the power and uniform families.
    fn power(&self) -> Option<f64> {
        match self.family {
            Family::PowerBeta { a } => Some(a),
            Family::Uniform01 => Some(1.0),
            _ => None,
        }
    }

    fn student(&self) -> &StudentT {
        self.student.as_ref().expect("student family")
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self.family, Family::TwoPoint { .. })
    }

    /// True when the law is a point mass.
    pub fn is_degenerate(&self) -> bool {
        matches!(self.family, Family::TwoPoint { x1, x2, .. } if x1 == x2)
    }

    pub fn mean(&self) -> f64 {
        let raw = match self.family {
            Family::PowerBeta { a } => a / (a + 1.0),
            Family::Uniform01 => 0.5,
            Family::Exponential => 1.0,
            Family::Pareto { a } => 1.0 / (a - 1.0),
            Family::StudentT { .. } => 0.0,
            Family::TwoPoint { x1, x2, p } => p * x1 + (1.0 - p) * x2,
        };
        raw + self.shift
    }

    /// Left end of the support, if finite.
    pub fn left_endpoint(&self) -> Option<f64> {
        match self.family {
            Family::StudentT { .. } => None,
            Family::TwoPoint { x1, .. } => Some(x1 + self.shift),
            _ => Some(self.shift),
        }
    }

    /// `sup { x : F(x) < 1 }`, if finite.
    pub fn right_endpoint(&self) -> Option<f64> {
        match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => Some(1.0 + self.shift),
            Family::TwoPoint { x2, .. } => Some(x2 + self.shift),
            _ => None,
        }
    }

    /// `F(x) = P[L <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let y = x - self.shift;
        match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => {
                let a = self.power().unwrap();
                if y <= 0.0 {
                    0.0
                } else if y >= 1.0 {
                    1.0
                } else {
                    y.powf(a)
                }
            }
            Family::Exponential => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-y).exp_m1()
                }
            }
            Family::Pareto { a } => {
                if y <= 0.0 {
                    0.0
                } else {
                    -(-a * y.ln_1p()).exp_m1()
                }
            }
            Family::StudentT { .. } => self.student().cdf(y),
            Family::TwoPoint { x1, x2, p } => {
                if y < x1 {
                    0.0
                } else if y < x2 {
                    p
                } else {
                    1.0
                }
            }
        }
    }

    /// `P[L < x]`.
    pub fn prob_below(&self, x: f64) -> f64 {
        match self.family {
            Family::TwoPoint { x1, x2, p } => {
                let y = x - self.shift;
                if y <= x1 {
                    0.0
                } else if y <= x2 {
                    p
                } else {
                    1.0
                }
            }
            _ => self.cdf(x),
        }
    }

    /// Density, for the continuous families.
    pub fn density(&self, x: f64) -> Option<f64> {
        let y = x - self.shift;
        let d = match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => {
                let a = self.power().unwrap();
                if y <= 0.0 || y > 1.0 {
                    0.0
                } else {
                    a * y.powf(a - 1.0)
                }
            }
            Family::Exponential => {
                if y < 0.0 {
                    0.0
                } else {
                    (-y).exp()
                }
            }
            Family::Pareto { a } => {
                if y < 0.0 {
                    0.0
                } else {
                    a * (-(a + 1.0) * y.ln_1p()).exp()
                }
            }
            Family::StudentT { .. } => self.student().pdf(y),
            Family::TwoPoint { .. } => return None,
        };
        Some(d)
    }

    /// Left quantile `q(u) = inf { m : F(m) >= u }` for `0 < u < 1`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_open_unit("u", u)?;
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        if u > 0.5 {
            return self.upper_quantile(1.0 - u);
        }
        let raw = match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => u.powf(1.0 / self.power().unwrap()),
            Family::Exponential => -(-u).ln_1p(),
            Family::Pareto { a } => (-(-u).ln_1p() / a).exp_m1(),
            Family::StudentT { .. } => self.student().quantile(u),
            Family::TwoPoint { x1, x2, p } => {
                if u <= p {
                    x1
                } else {
                    x2
                }
            }
        };
        raw + self.shift
    }

    /// `q(1 - t)`, accurate for small `t` in `(0, 1)`.
    pub fn upper_quantile(&self, t: f64) -> f64 {
        let raw = match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => ((-t).ln_1p() / self.power().unwrap()).exp(),
            Family::Exponential => -t.ln(),
            Family::Pareto { a } => (-t.ln() / a).exp_m1(),
            Family::StudentT { .. } => {
                if t < 0.5 {
                    self.student().upper_quantile(t)
                } else {
                    -self.student().upper_quantile(1.0 - t)
                }
            }
            Family::TwoPoint { x1, x2, p } => {
                if t >= 1.0 - p {
                    x1
                } else {
                    x2
                }
            }
        };
        raw + self.shift
    }

    /// `∫_u^1 q(v) dv = (1 - u) ES_u` for `0 <= u <= 1`.
    pub fn tail_integral(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return self.mean();
        }
        let tail = 1.0 - u;
        let raw = match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => {
                let a = self.power().unwrap();
                // a (1 - u^(1/a + 1)) / (a + 1)
                -a * (((a + 1.0) / a) * u.ln()).exp_m1() / (a + 1.0)
            }
            Family::Exponential => tail * (1.0 - tail.ln()),
            Family::Pareto { a } => a / (a - 1.0) * tail.powf(1.0 - 1.0 / a) - tail,
            Family::StudentT { .. } => {
                let q = self.quantile_unchecked(u);
                self.student().tail_integral_at(q)
            }
            Family::TwoPoint { x1, x2, p } => {
                if u <= p {
                    (p - u) * x1 + (1.0 - p) * x2
                } else {
                    tail * x2
                }
            }
        };
        raw + tail * self.shift
    }

    /// Expected shortfall `(1/(1-β)) ∫_β^1 q(u) du` from the family's closed form.
    pub fn es_closed_form(&self, beta: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&beta) {
            return Err(RiskError::range("beta", beta, "[0, 1)"));
        }
        if beta == 0.0 {
            return Ok(self.mean());
        }
        let raw = match self.family {
            Family::Exponential => 1.0 - (1.0 - beta).ln(),
            Family::Pareto { a } => a / (a - 1.0) * (1.0 - beta).powf(-1.0 / a) - 1.0,
            Family::StudentT { nu } => {
                let q = self.student().quantile(beta);
                self.student().pdf(q) * (nu + q * q) / ((1.0 - beta) * (nu - 1.0))
            }
            _ => return Ok(self.tail_integral(beta) / (1.0 - beta)),
        };
        Ok(raw + self.shift)
    }

    /// `E[(L - m)^+]`.
    pub fn upper_partial_moment(&self, m: f64) -> f64 {
        let y = m - self.shift;
        match self.family {
            Family::PowerBeta { .. } | Family::Uniform01 => {
                let a = self.power().unwrap();
                if y <= 0.0 {
                    a / (a + 1.0) - y
                } else if y >= 1.0 {
                    0.0
                } else {
                    // ∫_y^1 (1 - x^a) dx
                    let one_minus = -((a + 1.0) * y.ln()).exp_m1();
                    (1.0 - y) - one_minus / (a + 1.0)
                }
            }
            Family::Exponential => {
                if y <= 0.0 {
                    1.0 - y
                } else {
                    (-y).exp()
                }
            }
            Family::Pareto { a } => {
                if y <= 0.0 {
                    1.0 / (a - 1.0) - y
                } else {
                    ((1.0 - a) * y.ln_1p()).exp() / (a - 1.0)
                }
            }
            Family::StudentT { .. } => self.student().upper_partial_moment(y),
            Family::TwoPoint { x1, x2, p } => p * (x1 - y).max(0.0) + (1.0 - p) * (x2 - y).max(0.0),
        }
    }

    /// Classification into the maximum domain of attraction of an extreme
    /// value law, with the second-order data known for each family.
    pub fn mda_classify(&self) -> Result<EvClassification> {
        match self.family {
            Family::Pareto { a } => Ok(EvClassification {
                mda: Mda::Frechet { eta: a },
                rho: Some(-1.0),
                auxiliary: Some(Auxiliary::power(a, -1.0).plus_power(-a * self.shift, -1.0)),
                right_endpoint: None,
            }),
            Family::StudentT { nu } => {
                let base = Auxiliary::power(nu * nu * (nu + 1.0) / (nu + 2.0), -2.0);
                let (aux, rho) = if self.shift != 0.0 {
                    (base.plus_power(-nu * self.shift, -1.0), -1.0)
                } else {
                    (base, -2.0)
                };
                Ok(EvClassification {
                    mda: Mda::Frechet { eta: nu },
                    rho: Some(rho),
                    auxiliary: Some(aux),
                    right_endpoint: None,
                })
            }
            Family::PowerBeta { a } if a != 1.0 => Ok(EvClassification {
                mda: Mda::Weibull { eta: 1.0 },
                rho: Some(-1.0),
                auxiliary: Some(Auxiliary::power((a - 1.0) / 2.0, -1.0)),
                right_endpoint: self.right_endpoint(),
            }),
            Family::PowerBeta { .. } | Family::Uniform01 => Ok(EvClassification {
                mda: Mda::Weibull { eta: 1.0 },
                rho: None,
                auxiliary: None,
                right_endpoint: self.right_endpoint(),
            }),
            Family::Exponential => Ok(EvClassification {
                mda: Mda::Gumbel,
                rho: None,
                auxiliary: None,
                right_endpoint: None,
            }),
            Family::TwoPoint { .. } => Err(RiskError::Unsupported(
                "two-point laws have no extreme value classification".into(),
            )),
        }
    }

    /// `n` draws by inverse transform of a seeded uniform stream, sorted.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Sample> {
        if n == 0 {
            return Err(RiskError::invalid("n", "sample size must be >= 1"));
        }
        let uniforms = UniformStream::new(seed).fill(n);
        let values: Vec<f64> = uniforms.par_iter().map(|&u| self.quantile_unchecked(u)).collect();
        Sample::new(values)
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::PowerBeta { a } => write!(f, "power:a={a}")?,
            Family::Exponential => write!(f, "exp")?,
            Family::Pareto { a } => write!(f, "pareto:a={a}")?,
            Family::StudentT { nu } => write!(f, "student:nu={nu}")?,
            Family::TwoPoint { x1, x2, p } => write!(f, "twopoint:x1={x1},x2={x2},p={p}")?,
            Family::Uniform01 => write!(f, "uniform")?,
        }
        if self.shift != 0.0 {
            let sep = match self.family {
                Family::Exponential | Family::Uniform01 => ":",
                _ => ",",
            };
            write!(f, "{sep}shift={}", self.shift)?;
        }
        Ok(())
    }
}

impl FromStr for DistributionSpec {
    type Err = RiskError;

    /// Parses the compact form `name[:key=value[,key=value]*]`, e.g.
    /// `pareto:a=2.1`, `student:nu=2.3,shift=1`, `exp`, `uniform:shift=-0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |reason: String| RiskError::Parse {
            what: "distribution",
            reason,
        };
        let s = s.trim();
        let (name, rest) = match s.find([':', ',']) {
            Some(i) => (&s[..i], &s[i + 1..]),
            None => (s, ""),
        };
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
        let mut take = |key: &str| -> Option<f64> {
            let pos = params.iter().position(|(k, _)| k == key)?;
            Some(params.remove(pos).1)
        };
        let shift = take("shift").unwrap_or(0.0);
        let name = name.trim().to_ascii_lowercase();
        let family = match name.as_str() {
            "power" | "beta" | "powerbeta" => Family::PowerBeta {
                a: take("a").ok_or_else(|| err("power needs a=".into()))?,
            },
            "exp" | "exponential" => Family::Exponential,
            "pareto" => Family::Pareto {
                a: take("a").ok_or_else(|| err("pareto needs a=".into()))?,
            },
            "student" | "t" | "studentt" => Family::StudentT {
                nu: take("nu").ok_or_else(|| err("student needs nu=".into()))?,
            },
            "twopoint" => Family::TwoPoint {
                x1: take("x1").ok_or_else(|| err("twopoint needs x1=".into()))?,
                x2: take("x2").ok_or_else(|| err("twopoint needs x2=".into()))?,
                p: take("p").ok_or_else(|| err("twopoint needs p=".into()))?,
            },
            "uniform" => Family::Uniform01,
            other => return Err(err(format!("unknown family `{other}`"))),
        };
        if let Some((k, _)) = params.first() {
            return Err(err(format!("unexpected parameter `{k}` for {name}")));
        }
        DistributionSpec::new(family, shift)
    }
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// An empirical sample, sorted ascending, with cached suffix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    // suffix[k] = sum of values[k..]
    suffix: Vec<f64>,
}

impl Sample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(RiskError::EmptySample);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(RiskError::NonFinite { index });
        }
        values.sort_by(f64::total_cmp);
        let n = values.len();
        let mut suffix = vec![0.0; n + 1];
        let mut acc = CompensatedSum::default();
        for k in (0..n).rev() {
            acc.add(values[k]);
            suffix[k] = acc.value();
        }
        Ok(Sample { values, suffix })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn n(&self) -> f64 {
        self.values.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.suffix[0] / self.n()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn is_constant(&self) -> bool {
        self.min() == self.max()
    }

    /// Number of values `<= x`.
    pub fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v <= x)
    }

    /// Number of values `< x`.
    pub fn count_lt(&self, x: f64) -> usize {
        self.values.partition_point(|&v| v < x)
    }

    /// Sum of the values with 0-based sorted index `>= k`.
    pub fn suffix_sum(&self, k: usize) -> f64 {
        self.suffix[k]
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.count_le(x) as f64 / self.n()
    }

    pub fn prob_below(&self, x: f64) -> f64 {
        self.count_lt(x) as f64 / self.n()
    }

    /// 1-based rank `k` of the left quantile: the smallest `k >= 1` with `k/n >= u`.
    pub fn quantile_rank(&self, u: f64) -> usize {
        let n = self.values.len();
        let mut k = ((u * self.n()).ceil() as usize).clamp(1, n);
        while k > 1 && (k - 1) as f64 / self.n() >= u {
            k -= 1;
        }
        while k < n && (k as f64 / self.n()) < u {
            k += 1;
        }
        k
    }

    /// Left quantile of the empirical measure.
    pub fn quantile(&self, u: f64) -> f64 {
        self.values[self.quantile_rank(u) - 1]
    }

    /// `∫_u^1 q_n(v) dv`, exact over the empirical steps.
    pub fn tail_integral(&self, u: f64) -> f64 {
        if u >= 1.0 {
            return 0.0;
        }
        if u <= 0.0 {
            return self.mean();
        }
        let k = self.quantile_rank(u);
        (k as f64 / self.n() - u) * self.values[k - 1] + self.suffix[k] / self.n()
    }

    /// `E[(L - m)^+]` under the empirical measure.
    pub fn upper_partial_moment(&self, m: f64) -> f64 {
        let j = self.count_le(m);
        let above = (self.values.len() - j) as f64;
        (self.suffix[j] - m * above).max(0.0) / self.n()
    }
}

/// A loss law that risk operations can be evaluated on.
#[derive(Debug, Clone, PartialEq)]
pub enum LossSource {
    Parametric(DistributionSpec),
    Empirical(Sample),
}

impl From<DistributionSpec> for LossSource {
    fn from(d: DistributionSpec) -> Self {
        LossSource::Parametric(d)
    }
}

impl From<Sample> for LossSource {
    fn from(s: Sample) -> Self {
        LossSource::Empirical(s)
    }
}

impl LossSource {
    pub fn mean(&self) -> f64 {
        match self {
            LossSource::Parametric(d) => d.mean(),
            LossSource::Empirical(s) => s.mean(),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            LossSource::Parametric(d) => d.cdf(x),
            LossSource::Empirical(s) => s.cdf(x),
        }
    }

    pub fn prob_below(&self, x: f64) -> f64 {
        match self {
            LossSource::Parametric(d) => d.prob_below(x),
            LossSource::Empirical(s) => s.prob_below(x),
        }
    }

    /// Left quantile for `0 < u < 1` (unchecked).
    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self {
            LossSource::Parametric(d) => d.quantile_unchecked(u),
            LossSource::Empirical(s) => s.quantile(u),
        }
    }

    pub fn tail_integral(&self, u: f64) -> f64 {
        match self {
            LossSource::Parametric(d) => d.tail_integral(u),
            LossSource::Empirical(s) => s.tail_integral(u),
        }
    }

    pub fn upper_partial_moment(&self, m: f64) -> f64 {
        match self {
            LossSource::Parametric(d) => d.upper_partial_moment(m),
            LossSource::Empirical(s) => s.upper_partial_moment(m),
        }
    }

    /// True when the law has atoms (empirical or two-point).
    pub fn is_atomic(&self) -> bool {
        match self {
            LossSource::Parametric(d) => !d.is_continuous(),
            LossSource::Empirical(_) => true,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            LossSource::Parametric(d) => d.is_degenerate(),
            LossSource::Empirical(s) => s.is_constant(),
        }
    }
}

/// Maximum domain of attraction of an extreme value law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mda {
    Frechet { eta: f64 },
    Weibull { eta: f64 },
    Gumbel,
}

/// Auxiliary function of a second-order regularly varying tail, kept as a
/// finite sum of power terms `c x^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Auxiliary {
    terms: Vec<(f64, f64)>,
}

impl Auxiliary {
    pub fn power(coef: f64, exponent: f64) -> Self {
        Auxiliary {
            terms: vec![(coef, exponent)],
        }
    }

    pub fn plus_power(mut self, coef: f64, exponent: f64) -> Self {
        if coef != 0.0 {
            match self.terms.iter_mut().find(|(_, p)| *p == exponent) {
                Some(term) => term.0 += coef,
                None => self.terms.push((coef, exponent)),
            }
        }
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * x.powf(p)).sum()
    }

    /// Regular variation index: the largest exponent with a nonzero coefficient.
    pub fn index(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter(|(c, _)| *c != 0.0)
            .map(|&(_, p)| p)
            .fold(None, |acc: Option<f64>, p| Some(acc.map_or(p, |a| a.max(p))))
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }
}

/// Extreme value classification with second-order data.
#[derive(Debug, Clone, PartialEq)]
pub struct EvClassification {
    pub mda: Mda,
    /// Second-order parameter, where known.
    pub rho: Option<f64>,
    pub auxiliary: Option<Auxiliary>,
    pub right_endpoint: Option<f64>,
}

impl EvClassification {
    pub fn eta(&self) -> Option<f64> {
        match self.mda {
            Mda::Frechet { eta } | Mda::Weibull { eta } => Some(eta),
            Mda::Gumbel => None,
        }
    }

    /// Fréchet data for the loss recentred by `mean`: the auxiliary function
    /// gains the term `eta * mean / x` and `rho` becomes `max(rho, -1)`.
    pub fn recentered(&self, mean: f64) -> EvClassification {
        match (self.mda, &self.auxiliary) {
            (Mda::Frechet { eta }, Some(aux)) if mean != 0.0 => EvClassification {
                mda: self.mda,
                rho: self.rho.map(|r| r.max(-1.0)),
                auxiliary: Some(aux.clone().plus_power(eta * mean, -1.0)),
                right_endpoint: self.right_endpoint,
            },
            _ => self.clone(),
        }
    }
}
