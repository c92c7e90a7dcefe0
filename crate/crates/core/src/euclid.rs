//! Segal–Bargmann transform on the real line by brute-force quadrature.
//!
//! Nothing here touches the spherical-function machinery: the transform is a
//! trapezoid sum over the samples, and both sides of each identity are
//! evaluated by independent tensor trapezoid rules in `(x, y)`. Trapezoid
//! sums converge geometrically for the smooth, rapidly decaying integrands
//! involved.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{cos, exp, fabs, sin, sqrt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::CompensatedSum;

/// Samples of a function on a uniform grid `x_i = -L + i·Δ`, `Δ = 2L/(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLine {
    half_width: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl SampledLine {
    pub fn new(half_width: f64, values: Vec<f64>) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidInput("grid half-width must be positive"));
        }
        if values.len() < 3 {
            return Err(Error::InvalidInput("at least three samples required"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("samples must be finite"));
        }
        let spacing = 2.0 * half_width / (values.len() - 1) as f64;
        Ok(SampledLine { half_width, spacing, values })
    }

    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("at least three samples required"));
        }
        let h = 2.0 * half_width / (n - 1) as f64;
        Self::new(half_width, (0..n).map(|i| f(-half_width + h * i as f64)).collect())
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.half_width + self.spacing * i as f64
    }

    fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.values.len() {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    fn edge(&self) -> f64 {
        fabs(self.values[0]).max(fabs(*self.values.last().unwrap()))
    }

    /// `∫ f(u)² du`.
    pub fn norm_sq(&self) -> f64 {
        (0..self.values.len())
            .map(|i| self.trapezoid_weight(i) * self.values[i] * self.values[i])
            .collect::<CompensatedSum>()
            .value()
    }
}

/// Tolerances and step sizes of the baseline checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub abs_tol: f64,
    /// Trapezoid step in `x` and `y` for the outer integrals.
    pub step: f64,
    /// Initial half-width of the `y` window; doubled until the edge is
    /// negligible.
    pub y_start: f64,
    /// The `y` window may not grow past this.
    pub y_limit: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig { abs_tol: 1e-10, step: 0.1, y_start: 4.0, y_limit: 64.0 }
    }
}

/// Samples whose kernel factor `e^{-(x-u)²/2t}` is below `e^{-KERNEL_CUT}`
/// are skipped.
const KERNEL_CUT: f64 = 70.0;

/// `F(x+iy)` together with the truncation bound `sup|f(±L)|·sup_u|kernel|`.
fn transform_with_tail(f: &SampledLine, t: f64, x: f64, y: f64) -> (Complex64, f64) {
    let scale = 1.0 / sqrt(2.0 * PI * t);
    let growth = exp(y * y / (2.0 * t));
    let tail = f.edge() * scale * growth;
    let reach = sqrt(2.0 * t * KERNEL_CUT);
    let lo = libm::floor((x - reach + f.half_width) / f.spacing).max(0.0) as usize;
    let hi = (libm::ceil((x + reach + f.half_width) / f.spacing).max(0.0) as usize).min(f.values.len() - 1);
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    if lo <= hi {
        for i in lo..=hi {
            let v = f.values[i];
            if v == 0.0 {
                continue;
            }
            let d = x - f.node(i);
            let mag = f.trapezoid_weight(i) * v * exp(-d * d / (2.0 * t));
            let phase = -y * d / t;
            re.add(mag * cos(phase));
            im.add(mag * sin(phase));
        }
    }
    (Complex64::new(re.value(), im.value()) * (scale * growth), tail)
}

/// `F(x+iy) = ∫ (2πt)^{-1/2} e^{-(x+iy-u)²/2t} f(u) du`.
pub fn sb_transform_1d(f: &SampledLine, t: f64, x: f64, y: f64, abs_tol: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    let (v, tail) = transform_with_tail(f, t, x, y);
    if tail > abs_tol {
        return Err(Error::TruncationError { tail });
    }
    Ok(v)
}

/// `e^{-y²/2t}·F(x+iy)`, with the truncation bound taken after the weight.
fn damped_transform(f: &SampledLine, t: f64, x: f64, y: f64, abs_tol: f64) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    let damp = exp(-y * y / (2.0 * t));
    let (v, tail) = transform_with_tail(f, t, x, y);
    if tail * damp > abs_tol {
        return Err(Error::TruncationError { tail: tail * damp });
    }
    Ok(v * damp)
}

/// Trapezoid sum of `g` on `[-y_max, y_max]` with `y_max` doubled from
/// `cfg.y_start` until `|g(±y_max)|` is below `cfg.abs_tol`.
fn symmetric_y_sum(cfg: &BaselineConfig, mut g: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut y_max = cfg.y_start;
    loop {
        let edge = fabs(g(y_max)?).max(fabs(g(-y_max)?));
        if edge <= cfg.abs_tol {
            break;
        }
        if y_max * 2.0 > cfg.y_limit {
            return Err(Error::TruncationError { tail: edge });
        }
        y_max *= 2.0;
    }
    let n = libm::ceil(y_max / cfg.step) as i64;
    let h = y_max / n as f64;
    let mut acc = CompensatedSum::new();
    for k in -n..=n {
        let w = if k.abs() == n { 0.5 * h } else { h };
        acc.add(w * g(h * k as f64)?);
    }
    Ok(acc.value())
}

/// `(∫∫ |F(x+iy)|² e^{-y²/t}/(πt)^{1/2} dx dy, ∫ f(u)² du)`, the outer
/// integral over `x ∈ [-X, X]` with `X` the sample half-width extended by
/// `box_margin`.
pub fn isometry_check_1d(f: &SampledLine, t: f64, box_margin: f64, cfg: &BaselineConfig) -> Result<(f64, f64)> {
    let rhs = f.norm_sq();
    if f.values.iter().all(|v| *v == 0.0) {
        return Ok((0.0, rhs));
    }
    let x_max = f.half_width + box_margin.max(0.0);
    let nx = libm::ceil(x_max / cfg.step) as i64;
    let hx = x_max / nx as f64;
    let weight = 1.0 / sqrt(PI * t);
    let lhs = symmetric_y_sum(cfg, |y| {
        let mut acc = CompensatedSum::new();
        for k in -nx..=nx {
            let w = if k.abs() == nx { 0.5 * hx } else { hx };
            acc.add(w * damped_transform(f, t, hx * k as f64, y, cfg.abs_tol)?.norm_sqr());
        }
        Ok(acc.value() * weight)
    })?;
    Ok((lhs, rhs))
}

/// `∫ F(x+iy)·e^{-y²/2t}/(2πt)^{1/2} dy`, which recovers `f(x)`.
pub fn inversion_check_1d(f: &SampledLine, t: f64, x: f64, cfg: &BaselineConfig) -> Result<f64> {
    if f.values.iter().all(|v| *v == 0.0) {
        return Ok(0.0);
    }
    let weight = 1.0 / sqrt(2.0 * PI * t);
    // imaginary parts cancel between ±y for real f
    symmetric_y_sum(cfg, |y| Ok(damped_transform(f, t, x, y, cfg.abs_tol)?.re * weight))
}

/// `|F(x₀+iy)|²` along a vertical line, `(y, value)` pairs.
pub fn vertical_profile(f: &SampledLine, t: f64, x0: f64, ys: &[f64], abs_tol: f64) -> Result<Vec<(f64, f64)>> {
    ys.iter().map(|y| Ok((*y, sb_transform_1d(f, t, x0, *y, abs_tol)?.norm_sqr()))).collect()
}

/// A named real test function.
pub type NamedFn = (&'static str, fn(f64) -> f64);

/// The three reference functions of the baseline: a Gaussian, the first
/// Hermite function shape `u·e^{-u²/2}` and a shifted Gaussian.
pub fn test_functions() -> [NamedFn; 3] {
    fn gauss(u: f64) -> f64 {
        exp(-u * u / 2.0)
    }
    fn hermite1(u: f64) -> f64 {
        u * exp(-u * u / 2.0)
    }
    fn shifted(u: f64) -> f64 {
        exp(-(u - 1.0) * (u - 1.0) / 2.0)
    }
    [("gaussian", gauss), ("hermite1", hermite1), ("shifted", shifted)]
}

/// Default sampling for the reference functions.
pub fn sample_default(f: fn(f64) -> f64) -> SampledLine {
    SampledLine::from_fn(14.0, 561, f).expect("valid grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        fabs(a - b) / fabs(b)
    }

    fn gaussian() -> SampledLine {
        sample_default(test_functions()[0].1)
    }

    #[test]
    fn gaussian_closed_form() {
        let f = gaussian();
        for t in [0.25, 0.5, 1.0] {
            for (x, y) in [(0.0, 0.0), (0.3, 0.7), (-1.2, 1.5), (2.0, -0.4)] {
                let z = Complex64::new(x, y);
                let exact = (-z * z / (2.0 * (1.0 + t))).exp() / sqrt(1.0 + t);
                let got = sb_transform_1d(&f, t, x, y, 1e-10).unwrap();
                assert!((got - exact).norm() <= 1e-8 * exact.norm(), "{t} {x} {y}");
            }
        }
    }

    #[test]
    fn real_axis_is_heat_evolution() {
        let f = gaussian();
        let v = sb_transform_1d(&f, 0.5, 0.8, 0.0, 1e-10).unwrap();
        assert!(v.im == 0.0);
        assert!(rel(v.re, exp(-0.64 / 3.0) / sqrt(1.5)) < 1e-10);
    }

    #[test]
    fn linear_in_f() {
        let a = sample_default(test_functions()[0].1);
        let b = sample_default(test_functions()[1].1);
        let c = SampledLine::new(14.0, a.values().iter().zip(b.values()).map(|(p, q)| 2.0 * p - 3.0 * q).collect())
            .unwrap();
        let z = |g: &SampledLine| sb_transform_1d(g, 0.5, 0.4, 0.9, 1e-10).unwrap();
        assert!((z(&c) - (z(&a) * 2.0 - z(&b) * 3.0)).norm() < 1e-13);
    }

    #[test]
    fn isometry_and_inversion_for_reference_functions() {
        let cfg = BaselineConfig::default();
        for (name, g) in test_functions() {
            let f = sample_default(g);
            for t in [0.25, 1.0] {
                let (l, r) = isometry_check_1d(&f, t, 0.0, &cfg).unwrap();
                assert!(fabs(l - r) <= 1e-6 * (1.0 + l), "{name} t={t}: {l} {r}");
                for x in [-0.7, 0.3, 1.4] {
                    let v = inversion_check_1d(&f, t, x, &cfg).unwrap();
                    assert!(fabs(v - g(x)) <= 1e-6 * fabs(g(x)).max(1e-3), "{name} t={t} x={x}: {v}");
                }
            }
        }
    }

    #[test]
    fn zero_function() {
        let f = SampledLine::new(5.0, alloc::vec![0.0; 101]).unwrap();
        let cfg = BaselineConfig::default();
        assert_eq!(isometry_check_1d(&f, 0.5, 0.0, &cfg).unwrap(), (0.0, 0.0));
        assert_eq!(inversion_check_1d(&f, 0.5, 0.1, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn decay_outside_support() {
        let v = inversion_check_1d(&gaussian(), 0.5, 9.0, &BaselineConfig::default()).unwrap();
        assert!(fabs(v) <= 1e-8);
    }

    #[test]
    fn truncated_grid_is_rejected() {
        let f = SampledLine::from_fn(2.0, 201, |u| exp(-u * u / 2.0)).unwrap();
        assert!(matches!(sb_transform_1d(&f, 0.5, 0.0, 0.0, 1e-10), Err(Error::TruncationError { .. })));
    }
}
