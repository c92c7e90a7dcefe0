//! Scalar helpers: compensated accumulation, removable-singularity
//! quotients, the incomplete gamma function and cubic interpolation.

use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, expm1, fabs, lgamma, log, sin, sinh};

/// Below this magnitude `sin x / x` and `sinh x / x` switch to Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// Neumaier-compensated running sum. Summation order is the push order, so
/// results are reproducible for a fixed sequence of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self { sum: 0.0, carry: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if fabs(self.sum) >= fabs(x) {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn sum_compensated(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value()
}

/// `sin(x)/x`, equal to 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    if fabs(x) < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        sin(x) / x
    }
}

/// `sinh(x)/x`, equal to 1 at the origin.
pub fn sinhc(x: f64) -> f64 {
    if fabs(x) < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 + x2 / 6.0 * (1.0 + x2 / 20.0 * (1.0 + x2 / 42.0 * (1.0 + x2 / 72.0)))
    } else {
        sinh(x) / x
    }
}

/// `ln(sinh(x)/x)` without overflow.
pub fn ln_sinhc(x: f64) -> f64 {
    let x = fabs(x);
    if x < 20.0 {
        log(sinhc(x))
    } else {
        x - log(2.0 * x) + libm::log1p(-exp(-2.0 * x))
    }
}

/// `expm1(x)/x`, equal to 1 at the origin.
pub fn expm1c(x: f64) -> f64 {
    if fabs(x) < SERIES_THRESHOLD {
        1.0 + x / 2.0 * (1.0 + x / 3.0 * (1.0 + x / 4.0 * (1.0 + x / 5.0)))
    } else {
        expm1(x) / x
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    lgamma(x)
}

/// Regularized lower incomplete gamma `P(a, x) = γ(a, x) / Γ(a)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..10_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if fabs(term) < fabs(sum) * 1e-17 {
            break;
        }
    }
    sum * exp(-x + a * log(x) - lgamma(a))
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = b + an / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if fabs(delta - 1.0) < 1e-16 {
            break;
        }
    }
    exp(-x + a * log(x) - lgamma(a)) * h
}

/// Poisson probability mass `e^{-λ} λ^k / k!` evaluated in log space.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let kf = k as f64;
    exp(-lambda + kf * log(lambda) - lgamma(kf + 1.0))
}

/// Natural cubic spline through `(x_i, y_i)` with strictly increasing `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return None;
        }
        // Thomas algorithm on the second-derivative system, m_0 = m_{n-1} = 0.
        let mut m = vec![0.0; n];
        if n > 2 {
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Some(Self { x, y, m })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn first(&self) -> f64 {
        self.x[0]
    }

    pub fn last(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Spline value on `[x_0, x_last]`; clamped to the end values outside.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => return self.y[i],
            Err(i) => i - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_series_matches_direct_at_threshold() {
        let x = SERIES_THRESHOLD * 0.999;
        let direct = sin(x) / x;
        assert!((sinc(x) - direct).abs() < 1e-16);
        assert!((sinhc(x) - sinh(x) / x).abs() < 1e-16);
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(sinhc(0.0), 1.0);
    }

    #[test]
    fn gamma_p_half_integer_is_erf() {
        // P(1/2, x) = erf(sqrt(x))
        for &x in &[0.01, 0.3, 1.0, 2.5, 9.0, 30.0] {
            let want = libm::erf(libm::sqrt(x));
            assert!((gamma_p(0.5, x) - want).abs() < 1e-14, "x = {x}");
        }
        // P(1, x) = 1 - e^{-x}
        for &x in &[0.1, 1.0, 4.0, 20.0] {
            assert!((gamma_p(1.0, x) + libm::expm1(-x)).abs() < 1e-14);
            assert!((gamma_q(1.0, x) - libm::exp(-x)).abs() < 1e-14 * libm::exp(-x).max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(sum_compensated(&xs), 2.0);
    }

    #[test]
    fn poisson_weights_sum_to_one() {
        let lambda = 37.5;
        let total: f64 = (0..400).map(|k| poisson_pmf(lambda, k)).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..41).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| sin(*t)).collect();
        let s = CubicSpline::new(x, y).unwrap();
        for k in 0..100 {
            let t = 0.5 + 3.0 * k as f64 / 100.0;
            assert!((s.eval(t) - sin(t)).abs() < 2e-5);
        }
        assert!(CubicSpline::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_none());
    }
}
