//! Special functions: log-gamma, the regularized incomplete beta function,
//! the Student t law built on top of it, and the principal branch of the
//! Lambert W function.

use std::f64::consts::{E, PI};

use crate::error::{Result, RiskError};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let s = (PI * x).sin();
        return (PI / s.abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for the incomplete beta function, evaluated with the
/// modified Lentz algorithm.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// `one_minus_x` must equal `1 - x`; passing it separately keeps full
/// precision when `x` is close to one.
pub fn inc_beta(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if one_minus_x <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * one_minus_x.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(b, a, one_minus_x) / b
    }
}

/// Complement `1 - I_x(a, b)`, computed without cancellation in the upper tail.
pub fn inc_beta_complement(a: f64, b: f64, x: f64, one_minus_x: f64) -> f64 {
    inc_beta(b, a, one_minus_x, x)
}

/// Standard Student t distribution with `nu > 0` degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentT {
    nu: f64,
    ln_norm: f64,
}

impl StudentT {
    pub fn new(nu: f64) -> Self {
        let ln_norm = ln_gamma(0.5 * (nu + 1.0)) - ln_gamma(0.5 * nu) - 0.5 * (nu * PI).ln();
        StudentT { nu, ln_norm }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let r = x.abs() / self.nu.sqrt();
        if r > 1e150 {
            return 0.0;
        }
        (self.ln_norm - 0.5 * (self.nu + 1.0) * (r * r).ln_1p()).exp()
    }

    /// Survival function `P[T > x]` for `x >= 0` via `I_{nu/(nu+x^2)}(nu/2, 1/2) / 2`.
    fn upper_tail_nonneg(&self, x: f64) -> f64 {
        let r = x / self.nu.sqrt();
        let (t, one_minus_t) = if r > 1e150 {
            (1.0 / (r * r), 1.0)
        } else {
            let r2 = r * r;
            (1.0 / (1.0 + r2), r2 / (1.0 + r2))
        };
        0.5 * inc_beta(0.5 * self.nu, 0.5, t, one_minus_t)
    }

    pub fn sf(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.upper_tail_nonneg(x)
        } else {
            1.0 - self.upper_tail_nonneg(-x)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x >= 0.0 {
            1.0 - self.upper_tail_nonneg(x)
        } else {
            self.upper_tail_nonneg(-x)
        }
    }

    /// Solves `P[T > x] = p` for `0 < p <= 1/2`, returning `x >= 0`.
    ///
    /// Bracketed Newton iteration on `ln P[T > x]`, falling back to bisection
    /// whenever a step leaves the bracket.
    pub fn upper_quantile(&self, p: f64) -> f64 {
        if p >= 0.5 {
            return 0.0;
        }
        if p <= 0.0 {
            return f64::INFINITY;
        }
        let nu = self.nu;
        // Tail asymptote P[T > x] ~ K nu^((nu-1)/2) x^-nu as the starting point.
        let ln_k = self.ln_norm + 0.5 * (nu - 1.0) * nu.ln();
        let tail_guess = ((ln_k - p.ln()) / nu).exp();
        let mut x = if tail_guess.is_finite() && tail_guess > 0.0 {
            tail_guess
        } else {
            1.0
        };
        let ln_p = p.ln();
        let f = |x: f64| self.upper_tail_nonneg(x).ln() - ln_p;

        let mut lo = 0.0;
        let mut hi;
        if f(x) > 0.0 {
            lo = x;
            hi = 2.0 * x;
            while f(hi) > 0.0 {
                lo = hi;
                hi *= 2.0;
                if !hi.is_finite() {
                    return f64::INFINITY;
                }
            }
        } else {
            hi = x;
        }
        x = x.clamp(lo, hi);
        for _ in 0..200 {
            let s = self.upper_tail_nonneg(x);
            let fx = s.ln() - ln_p;
            if fx > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = -self.pdf(x) / s;
            let mut next = x - fx / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= 1e-15 * x.abs().max(1e-300) || hi - lo <= 1e-15 * hi {
                break;
            }
        }
        x
    }

    /// Left quantile `inf { x : P[T <= x] >= u }` for `0 < u < 1`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u > 0.5 {
            self.upper_quantile(1.0 - u)
        } else if u < 0.5 {
            -self.upper_quantile(u)
        } else {
            0.0
        }
    }

    /// `E[(T - x)^+]`, the upper partial moment, for `nu > 1`.
    pub fn upper_partial_moment(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.pdf(x) * (self.nu + x * x) / (self.nu - 1.0) - x * self.upper_tail_nonneg(x)
        } else {
            // E[(T-x)^+] = E[T - x] + E[(x-T)^+] and E[(x-T)^+] = E[(T+x)^+] by symmetry
            -x + self.upper_partial_moment(-x)
        }
    }

    /// `∫_u^1 q(v) dv` expressed through the quantile at `u`, for `nu > 1`.
    pub fn tail_integral_at(&self, q: f64) -> f64 {
        self.pdf(q) * (self.nu + q * q) / (self.nu - 1.0)
    }
}

/// Principal branch `W_0` of the Lambert W function, `w e^w = x` for
/// `x >= -1/e`, by Halley iteration.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let branch = -1.0 / E;
    if x.is_nan() || x < branch {
        return Err(RiskError::range("x", x, "[-1/e, inf)"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let mut w = if x < -0.25 {
        // series around the branch point
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x < 3.0 {
        (1.0 + x).ln() * 0.8
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    if x == branch {
        return Ok(-1.0);
    }
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1.abs() < 1e-300 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 1e-15 * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(ln_gamma(5.0), 24f64.ln(), epsilon = 1e-13);
        assert_relative_eq!(ln_gamma(0.5), PI.sqrt().ln(), epsilon = 1e-13);
        assert_relative_eq!(ln_gamma(0.1), 2.252_712_651_734_206, epsilon = 1e-12);
    }

    #[test]
    fn inc_beta_closed_forms() {
        // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a
        for &x in &[0.01, 0.3, 0.5, 0.77, 0.999] {
            assert_relative_eq!(
                inc_beta(1.0, 2.5, x, 1.0 - x),
                1.0 - (1.0 - x).powf(2.5),
                epsilon = 1e-13
            );
            assert_relative_eq!(inc_beta(3.2, 1.0, x, 1.0 - x), x.powf(3.2), epsilon = 1e-13);
        }
    }

    #[test]
    fn student_matches_statrs() {
        use statrs::distribution::{ContinuousCDF, StudentsT};
        for &nu in &[1.8, 2.1, 2.3, 3.0, 10.0] {
            let ours = StudentT::new(nu);
            let oracle = StudentsT::new(0.0, 1.0, nu).unwrap();
            for &x in &[-8.0, -1.5, -0.1, 0.0, 0.4, 2.0, 7.5, 40.0] {
                assert!((ours.cdf(x) - oracle.cdf(x)).abs() < 1e-12, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn student_quantile_inverts_cdf() {
        for &nu in &[1.8, 2.1, 2.9, 5.0] {
            let t = StudentT::new(nu);
            for i in 1..1000 {
                let u = i as f64 / 1000.0;
                let x = t.quantile(u);
                assert!((t.cdf(x) - u).abs() < 1e-12, "nu={nu} u={u}");
            }
            for &p in &[1e-6, 1e-12, 1e-40, 1e-200] {
                let x = t.upper_quantile(p);
                assert_relative_eq!(t.sf(x), p, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn student_upper_partial_moment_by_symmetry() {
        let t = StudentT::new(2.5);
        // E[(T-x)^+] - E[(x-T)^+] = -x and E[(x-T)^+] = E[(T+x)^+]
        for &x in &[0.3, 1.0, 4.0, 25.0] {
            let diff = t.upper_partial_moment(x) - t.upper_partial_moment(-x);
            assert_relative_eq!(diff, -x, epsilon = 1e-12);
        }
        assert_relative_eq!(t.upper_partial_moment(0.0), t.tail_integral_at(0.0), epsilon = 1e-15);
    }

    #[test]
    fn lambert_w_identity() {
        for &x in &[-1.0 / E, -0.3, -0.1, 1e-8, 0.5, 1.0, 8.0 / E, 10.0, 1e5, 1e300] {
            let w = lambert_w0(x).unwrap();
            if x.abs() < 1e200 {
                assert_relative_eq!(w * w.exp(), x, max_relative = 1e-13, epsilon = 1e-15);
            } else {
                assert_relative_eq!(w + w.ln(), x.ln(), max_relative = 1e-13);
            }
        }
        assert_relative_eq!(lambert_w0(E).unwrap(), 1.0, epsilon = 1e-15);
        assert!(lambert_w0(-0.5).is_err());
    }
}
