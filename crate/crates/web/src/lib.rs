//! Browser bindings for the demo page in `www/`.
//!
//! Each operation returns a flat, row-major `Float64Array`; the column layout
//! is fixed per operation and listed on each function.

use expectile_core::asymptotics::{frechet_ratio_for, Order};
use expectile_core::montecarlo::alpha_grid;
use expectile_core::risk::{self, DistortionSpec};
use expectile_core::{DistributionSpec, LossSource, Result, RiskError};
use wasm_bindgen::prelude::*;

/// Rows `[t, phi(t), phi_mixture(t)]` on `points` evenly spaced `t` in `[0, 1]`.
pub fn distortion_points(alpha: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(RiskError::InvalidParameter {
            name: "points",
            reason: format!("need at least 2, got {points}"),
        });
    }
    let phi = DistortionSpec::expectile(alpha)?;
    let mix = DistortionSpec::optimal_mixture(alpha)?;
    Ok((0..points)
        .flat_map(|i| {
            let t = i as f64 / (points - 1) as f64;
            [t, phi.phi(t), mix.phi(t)]
        })
        .collect())
}

/// Rows `[alpha, VaR, ES, expectile, beta*]` along a grid dense near 1.
pub fn risk_profile_points(dist: &str, alpha_min: f64, alpha_max: f64, points: usize) -> Result<Vec<f64>> {
    let d: DistributionSpec = dist.parse()?;
    let src = LossSource::Parametric(d);
    let mut out = Vec::with_capacity(points * 5);
    for alpha in alpha_grid(alpha_min, alpha_max, points)? {
        let e = risk::expectile(&src, alpha)?;
        let beta = if alpha == 0.5 || src.is_constant() {
            f64::NAN
        } else {
            risk::beta_star(&src, alpha)?.point
        };
        out.extend([
            alpha,
            risk::value_at_risk(&src, alpha)?,
            risk::expected_shortfall(&src, alpha)?,
            e,
            beta,
        ]);
    }
    Ok(out)
}

/// Rows `[alpha, exact, first order, second order]` of `e_alpha / ES_alpha`
/// for the centered loss; `family` is `pareto` (shape `param`) or `student`
/// (degrees of freedom `param`).
pub fn frechet_ratio_points(
    family: &str,
    param: f64,
    alpha_min: f64,
    alpha_max: f64,
    points: usize,
) -> Result<Vec<f64>> {
    let d = match family {
        "pareto" => DistributionSpec::pareto(param)?,
        "student" => DistributionSpec::student_t(param)?,
        other => {
            return Err(RiskError::InvalidParameter {
                name: "family",
                reason: format!("expected pareto or student, got `{other}`"),
            })
        }
    };
    let mean = d.mean();
    let src = LossSource::Parametric(d);
    let mut out = Vec::with_capacity(points * 4);
    for alpha in alpha_grid(alpha_min, alpha_max, points)? {
        let e = risk::expectile(&src, alpha)?;
        let es = risk::expected_shortfall(&src, alpha)?;
        out.extend([
            alpha,
            (e - mean) / (es - mean),
            frechet_ratio_for(&d, alpha, Order::First)?.value,
            frechet_ratio_for(&d, alpha, Order::Second)?.value,
        ]);
    }
    Ok(out)
}

fn js(e: RiskError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn distortion_curves(alpha: f64, points: usize) -> std::result::Result<Vec<f64>, JsError> {
    distortion_points(alpha, points).map_err(js)
}

#[wasm_bindgen]
pub fn risk_profile(
    dist: &str,
    alpha_min: f64,
    alpha_max: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    risk_profile_points(dist, alpha_min, alpha_max, points).map_err(js)
}

#[wasm_bindgen]
pub fn frechet_ratio_curves(
    family: &str,
    param: f64,
    alpha_min: f64,
    alpha_max: f64,
    points: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    frechet_ratio_points(family, param, alpha_min, alpha_max, points).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distortion_rows() {
        let v = distortion_points(0.94, 5).unwrap();
        assert_eq!(v.len(), 15);
        assert_eq!(&v[..3], &[0.0, 0.0, 0.0]);
        assert!((v[12] - 1.0).abs() < 1e-15 && (v[13] - 1.0).abs() < 1e-15 && (v[14] - 1.0).abs() < 1e-15);
        for r in v.chunks(3) {
            assert!(r[2] >= r[1] - 1e-15);
        }
        assert!(distortion_points(0.94, 1).is_err());
        assert!(distortion_points(0.2, 5).is_err());
    }

    #[test]
    fn risk_profile_rows() {
        let v = risk_profile_points("uniform", 0.5, 0.99, 6).unwrap();
        assert_eq!(v.len(), 30);
        // uniform at alpha = 1/2: expectile = mean = 1/2
        assert!((v[3] - 0.5).abs() < 1e-12);
        assert!(v[4].is_nan());
        for r in v.chunks(5).skip(1) {
            let (a, var, es, e, beta) = (r[0], r[1], r[2], r[3], r[4]);
            let closed = ((a * (1.0 - a)).sqrt() - a) / (1.0 - 2.0 * a);
            assert!((e - closed).abs() < 1e-12);
            assert!((var - a).abs() < 1e-15);
            assert!(e <= es);
            assert!((beta - e).abs() < 1e-12);
        }
        assert!(risk_profile_points("gauss", 0.5, 0.9, 3).is_err());
    }

    #[test]
    fn frechet_rows() {
        let v = frechet_ratio_points("pareto", 2.9, 0.9, 0.9999, 4).unwrap();
        let c = 1.9f64.powf(1.9 / 2.9) / 2.9;
        let last = &v[12..];
        assert_eq!(last[0], 0.9999);
        assert!((last[1] - c).abs() < 0.01);
        assert_eq!(last[2], c);
        assert!(frechet_ratio_points("student", 2.3, 0.95, 0.999, 3).is_ok());
        assert!(frechet_ratio_points("normal", 2.0, 0.9, 0.99, 3).is_err());
    }
}
