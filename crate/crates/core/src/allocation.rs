//! Euler contributions of portfolio components to ES and expectile capital.
//!
//! Allocations are computed on joint scenarios. The asymptotic results they
//! are compared against assume a non-degenerate joint tail limit, which a
//! finite sample cannot confirm.

use std::io::Read;
use std::path::Path;

use crate::asymptotics::frechet_constant;
use crate::distributions::{CompensatedSum, LossSource, Sample};
use crate::error::{Result, RiskError};
use crate::risk::{expectile, value_at_risk};

/// Joint scenarios of `d` loss components; the total is the row sum.
#[derive(Debug, Clone, PartialEq)]
pub struct Portfolio {
    components: Vec<Vec<f64>>,
    total: Vec<f64>,
}

impl Portfolio {
    /// Builds a portfolio from `d` columns of equal length.
    pub fn from_columns(components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(RiskError::invalid("components", "need at least one component"));
        }
        let n = components[0].len();
        if n == 0 {
            return Err(RiskError::EmptySample);
        }
        for (k, c) in components.iter().enumerate() {
            if c.len() != n {
                return Err(RiskError::invalid(
                    "components",
                    format!("component {k} has {} scenarios, expected {n}", c.len()),
                ));
            }
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(RiskError::NonFinite { index: i });
            }
        }
        let total = (0..n)
            .map(|i| {
                let mut s = CompensatedSum::default();
                for c in &components {
                    s.add(c[i]);
                }
                s.value()
            })
            .collect();
        Ok(Portfolio { components, total })
    }

    /// Builds a portfolio from scenario rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut cols = vec![Vec::with_capacity(rows.len()); d];
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(RiskError::invalid(
                    "rows",
                    format!("row {i} has {} columns, expected {d}", r.len()),
                ));
            }
            for (k, &v) in r.iter().enumerate() {
                cols[k].push(v);
            }
        }
        Self::from_columns(cols)
    }

    /// Reads scenario rows from CSV; a first row that does not parse as
    /// numbers is taken as a header.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| RiskError::Parse {
                what: "portfolio csv",
                reason: e.to_string(),
            })?;
            let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
            match parsed {
                Ok(row) => rows.push(row),
                Err(_) if i == 0 => continue,
                Err(e) => {
                    return Err(RiskError::Parse {
                        what: "portfolio csv",
                        reason: format!("line {}: {e}", i + 1),
                    })
                }
            }
        }
        if rows.is_empty() {
            return Err(RiskError::EmptySample);
        }
        Self::from_rows(&rows)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| RiskError::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(std::io::BufReader::new(f))
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn len(&self) -> usize {
        self.total.len()
    }

    pub fn is_empty(&self) -> bool {
        self.total.is_empty()
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.components[k]
    }

    pub fn total(&self) -> &[f64] {
        &self.total
    }

    pub fn total_source(&self) -> Result<LossSource> {
        Ok(LossSource::Empirical(Sample::new(self.total.clone())?))
    }

    /// Per-component sums over the scenarios selected by `keep`.
    fn masked_sums(&self, keep: impl Fn(f64) -> bool) -> (Vec<f64>, usize) {
        let mut count = 0;
        let mut sums = vec![CompensatedSum::default(); self.dim()];
        for (i, &t) in self.total.iter().enumerate() {
            if keep(t) {
                count += 1;
                for (s, c) in sums.iter_mut().zip(&self.components) {
                    s.add(c[i]);
                }
            }
        }
        (sums.iter().map(CompensatedSum::value).collect(), count)
    }

    fn means(&self) -> Vec<f64> {
        let (sums, n) = self.masked_sums(|_| true);
        sums.into_iter().map(|s| s / n as f64).collect()
    }
}

/// ES contributions: each component's average over the scenarios whose total
/// lies strictly above the empirical `alpha`-quantile of the total. Scenarios
/// tied with the quantile are excluded.
pub fn es_euler(p: &Portfolio, alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(RiskError::range("alpha", alpha, "[0, 1)"));
    }
    if alpha == 0.0 {
        return Ok(p.means());
    }
    let q = value_at_risk(&p.total_source()?, alpha)?;
    let (sums, count) = p.masked_sums(|t| t > q);
    if count == 0 {
        return Err(RiskError::EmptyTailEvent { alpha, threshold: q });
    }
    Ok(sums.into_iter().map(|s| s / count as f64).collect())
}

/// Expectile contributions
/// `(alpha E[L_k 1{L > e}] + (1 - alpha) E[L_k 1{L <= e}]) / (alpha + (1 - 2 alpha) P[L <= e])`
/// with `e` the expectile of the total. Totals within `1e-12 (1 + |e|)` of
/// `e` count as `<= e`.
pub fn expectile_euler(p: &Portfolio, alpha: f64) -> Result<Vec<f64>> {
    let total = p.total_source()?;
    let e = expectile(&total, alpha)?;
    let cut = e + 1e-12 * (1.0 + e.abs());
    let n = p.len() as f64;
    let (above, n_above) = p.masked_sums(|t| t > cut);
    let (below, n_below) = p.masked_sums(|t| t <= cut);
    let prob_le = n_below as f64 / n;
    debug_assert_eq!(n_above + n_below, p.len());
    let denom = alpha + (1.0 - 2.0 * alpha) * prob_le;
    Ok(above
        .iter()
        .zip(&below)
        .map(|(a, b)| (alpha * a / n + (1.0 - alpha) * b / n) / denom)
        .collect())
}

/// Expectile contributions through conditional ES at `beta = P[L <= e]`:
/// `(1 - c) E[L_k | L > e] + c E[L_k]` with `c = (1-alpha)/(alpha + (1-2 alpha) beta)`.
pub fn expectile_euler_es_form(p: &Portfolio, alpha: f64) -> Result<Vec<f64>> {
    let total = p.total_source()?;
    let e = expectile(&total, alpha)?;
    let cut = e + 1e-12 * (1.0 + e.abs());
    let (above, n_above) = p.masked_sums(|t| t > cut);
    let means = p.means();
    if n_above == 0 {
        // constant total: every weight collapses onto the mean
        return Ok(means);
    }
    let beta = 1.0 - n_above as f64 / p.len() as f64;
    let c = (1.0 - alpha) / (alpha + (1.0 - 2.0 * alpha) * beta);
    Ok(above
        .iter()
        .zip(&means)
        .map(|(a, m)| (1.0 - c) * a / n_above as f64 + c * m)
        .collect())
}

/// One level of [`euler_asymptotic_ratio`].
#[derive(Debug, Clone, PartialEq)]
pub struct EulerRatioRow {
    pub alpha: f64,
    /// Expectile over ES contribution for each component.
    pub ratios: Vec<Result<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EulerRatioTable {
    /// Limit `(eta-1)^((eta-1)/eta) / eta` of every ratio.
    pub constant: f64,
    pub rows: Vec<EulerRatioRow>,
}

/// Ratios of expectile to ES contributions along `alphas`, next to their
/// common limit for Fréchet-type components with index `eta`.
pub fn euler_asymptotic_ratio(p: &Portfolio, eta: f64, alphas: &[f64]) -> Result<EulerRatioTable> {
    let constant = frechet_constant(eta)?;
    let rows = alphas
        .iter()
        .map(|&alpha| {
            let ratios = match (expectile_euler(p, alpha), es_euler(p, alpha)) {
                (Ok(e), Ok(s)) => e
                    .iter()
                    .zip(&s)
                    .map(|(e, s)| {
                        if *s == 0.0 {
                            Err(RiskError::Singular("zero ES contribution"))
                        } else {
                            Ok(e / s)
                        }
                    })
                    .collect(),
                (Err(err), _) | (_, Err(err)) => vec![Err(err); p.dim()],
            };
            EulerRatioRow { alpha, ratios }
        })
        .collect();
    Ok(EulerRatioTable { constant, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::risk::expected_shortfall;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn hand_pair() -> Portfolio {
        Portfolio::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![3.0, 3.0]]).unwrap()
    }

    #[test]
    fn es_examples() {
        assert_eq!(es_euler(&hand_pair(), 0.7).unwrap(), vec![3.0, 3.0]);
        let v = vec![1.0, 5.0, 2.0, 8.0, 3.0];
        let single = Portfolio::from_columns(vec![v.clone()]).unwrap();
        // strict tail above q_0.6 = 3
        assert_relative_eq!(es_euler(&single, 0.6).unwrap()[0], 6.5);
        let twin = Portfolio::from_columns(vec![v.clone(), v]).unwrap();
        let c = es_euler(&twin, 0.3).unwrap();
        assert_eq!(c[0], c[1]);
        let flat = Portfolio::from_columns(vec![vec![1.0; 4]]).unwrap();
        assert!(matches!(es_euler(&flat, 0.5), Err(RiskError::EmptyTailEvent { .. })));
    }

    #[test]
    fn es_full_allocation_on_strict_tail() {
        let p = hand_pair();
        let c = es_euler(&p, 0.4).unwrap();
        let q = value_at_risk(&p.total_source().unwrap(), 0.4).unwrap();
        let tail: Vec<f64> = p.total().iter().copied().filter(|&t| t > q).collect();
        assert_relative_eq!(
            c.iter().sum::<f64>(),
            tail.iter().sum::<f64>() / tail.len() as f64,
            epsilon = 1e-14
        );
    }

    #[test]
    fn expectile_examples() {
        let v = vec![1.0, 5.0, 2.0, 8.0, 3.0];
        let single = Portfolio::from_columns(vec![v.clone()]).unwrap();
        let src = LossSource::Empirical(Sample::new(v).unwrap());
        assert_relative_eq!(
            expectile_euler(&single, 0.9).unwrap()[0],
            expectile(&src, 0.9).unwrap(),
            epsilon = 1e-12
        );
        let p = hand_pair();
        let half = expectile_euler(&p, 0.5).unwrap();
        assert_relative_eq!(half[0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(half[1], 1.0, epsilon = 1e-15);
        // exchangeable: scenario set closed under swapping the columns
        let sym = Portfolio::from_rows(&[
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![2.0, 5.0],
            vec![5.0, 2.0],
            vec![-1.0, 3.0],
            vec![3.0, -1.0],
        ])
        .unwrap();
        let c = expectile_euler(&sym, 0.8).unwrap();
        let e = expectile(&sym.total_source().unwrap(), 0.8).unwrap();
        assert_relative_eq!(c[0], e / 2.0, epsilon = 1e-12);
        assert_relative_eq!(c[1], e / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn constants() {
        let p = hand_pair();
        assert_eq!(euler_asymptotic_ratio(&p, 2.0, &[]).unwrap().constant, 0.5);
        assert_relative_eq!(
            euler_asymptotic_ratio(&p, 3.0, &[]).unwrap().constant,
            2f64.powf(2.0 / 3.0) / 3.0,
            epsilon = 1e-15
        );
        assert!(euler_asymptotic_ratio(&p, 1.0, &[0.9]).is_err());
    }

    #[test]
    fn single_pareto_ratio_near_the_limit() {
        let s = DistributionSpec::pareto(2.1).unwrap().sample(200_000, 11).unwrap();
        let p = Portfolio::from_columns(vec![s.values().to_vec()]).unwrap();
        let t = euler_asymptotic_ratio(&p, 2.1, &[0.99, 0.999]).unwrap();
        let last = t.rows[1].ratios[0].clone().unwrap();
        assert!((last - 0.5086).abs() < 0.05, "{last}");
        // d = 1 contributions are the risk measures of the total
        let src = LossSource::Empirical(s);
        let es = expected_shortfall(&src, 0.999).unwrap();
        assert_relative_eq!(es_euler(&p, 0.999).unwrap()[0], es, max_relative = 1e-12);
    }

    #[test]
    fn independent_component_tends_to_its_mean() {
        let heavy = DistributionSpec::pareto(1.5)
            .unwrap()
            .sample(100_000, 5)
            .unwrap()
            .values()
            .to_vec();
        let light: Vec<f64> = DistributionSpec::uniform()
            .sample(100_000, 6)
            .unwrap()
            .values()
            .to_vec();
        // independent pairing: shuffle one column by a fixed stride
        let light: Vec<f64> = (0..light.len()).map(|i| light[(i * 7919) % light.len()]).collect();
        let p = Portfolio::from_columns(vec![heavy, light]).unwrap();
        let c = es_euler(&p, 0.999).unwrap();
        assert!((c[1] - 0.5).abs() < 0.1, "{}", c[1]);
    }

    #[test]
    fn csv_with_and_without_header() {
        let a = Portfolio::from_csv_reader("x,y\n0,0\n0,1\n1,0\n3,3\n".as_bytes()).unwrap();
        let b = Portfolio::from_csv_reader("0,0\n0,1\n1,0\n3,3\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, hand_pair());
        assert!(Portfolio::from_csv_reader("x,y\n0,0\nfoo,1\n".as_bytes()).is_err());
        assert!(Portfolio::from_csv_reader("0,0\n0\n".as_bytes()).is_err());
        assert!(Portfolio::from_csv_reader("x,y\n".as_bytes()).is_err());
    }

    fn portfolio_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..4, 2usize..30)
            .prop_flat_map(|(d, n)| prop::collection::vec(prop::collection::vec(-20.0f64..20.0, d), n))
    }

    proptest! {
        #[test]
        fn expectile_full_allocation(rows in portfolio_strategy(), alpha in 0.5f64..0.995) {
            let p = Portfolio::from_rows(&rows).unwrap();
            let c = expectile_euler(&p, alpha).unwrap();
            let e = expectile(&p.total_source().unwrap(), alpha).unwrap();
            prop_assert!((c.iter().sum::<f64>() - e).abs() <= 1e-9 * (1.0 + e.abs()));
            let es_form = expectile_euler_es_form(&p, alpha).unwrap();
            for (a, b) in c.iter().zip(&es_form) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn translation_moves_only_that_component(rows in portfolio_strategy(), alpha in 0.5f64..0.995, shift in -5.0f64..5.0) {
            let p = Portfolio::from_rows(&rows).unwrap();
            let mut cols: Vec<Vec<f64>> = (0..p.dim()).map(|k| p.component(k).to_vec()).collect();
            for v in cols[0].iter_mut() {
                *v += shift;
            }
            let q = Portfolio::from_columns(cols).unwrap();
            let before = expectile_euler(&p, alpha).unwrap();
            let after = expectile_euler(&q, alpha).unwrap();
            prop_assert!((after[0] - before[0] - shift).abs() <= 1e-9 * (1.0 + before[0].abs()));
            for k in 1..p.dim() {
                prop_assert!((after[k] - before[k]).abs() <= 1e-9 * (1.0 + before[k].abs()));
            }
        }
    }
}
