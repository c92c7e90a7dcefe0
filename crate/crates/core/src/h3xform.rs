//! Radial spherical transform on hyperbolic 3-space.
//!
//! Conventions (`|ρ|² = 1`):
//!
//! * `φ_ξ(r) = sin(ξr)/(ξ sinh r)`, continued to `φ_ξ(e^{iY}) = sinh(ξr)/(ξ sin r)`;
//! * `f̂(ξ) = (4π/ξ)∫₀^∞ f(r) sin(ξr) sinh(r) dr`;
//! * `f(r) = c_P ∫₀^∞ f̂(ξ) φ_ξ(r) ξ² dξ` with `c_P = 1/(2π²)`;
//! * the heat kernel `p_s` has `p̂_s(ξ) = e^{-s(ξ²+1)/2}`.
//!
//! Every spectral integral is truncated at a cutoff derived from the
//! Gaussian decay rate of its integrand; the neglected tail is estimated and
//! returned alongside the value.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, fabs, log, pow, sqrt};

use crate::error::{Error, Result};
use crate::math::{ln_sinhc, sinc, sinhc, CubicSpline};
use crate::quad::{integrate_breaks, QuadratureSpec};

/// `c_P` of the H³ Plancherel density `c_P ξ²`.
pub const C_PLANCHEREL: f64 = 1.0 / (2.0 * PI * PI);

/// Plancherel density `ξ ↦ c_P ξ²`, i.e. `|c(ξ)|^{-2}` up to the constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelMeasure {
    pub c_p: f64,
}

impl Default for PlancherelMeasure {
    fn default() -> Self {
        Self { c_p: C_PLANCHEREL }
    }
}

impl PlancherelMeasure {
    pub fn density(&self, xi: f64) -> f64 {
        self.c_p * xi * xi
    }
}

/// Spectral shape before the Gaussian factor.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Constant 1 on `[0, ∞)`.
    Unbounded,
    /// Indicator of `[0, a]`.
    Band(f64),
    /// Cubic interpolant, zero beyond the last node.
    Grid(CubicSpline),
}

/// `ξ ↦ amplitude·shape(ξ)·e^{-heat(ξ²+1)/2}`.
///
/// Heat evolution only changes `heat`, so it is exact for every shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    amplitude: f64,
    shape: Shape,
    heat: f64,
}

impl SpectralProfile {
    /// Transform of the heat kernel `p_s`.
    pub fn heat_kernel(s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidInput("heat-kernel time must be positive"));
        }
        Ok(Self { amplitude: 1.0, shape: Shape::Unbounded, heat: s })
    }

    /// Indicator `1_{[0,a]}`.
    pub fn band(a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidInput("band edge must be positive"));
        }
        Ok(Self { amplitude: 1.0, shape: Shape::Band(a), heat: 0.0 })
    }

    /// Cubic interpolant through nonnegative samples on an increasing grid
    /// in `[0, ∞)`.
    pub fn grid(xi: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xi.is_empty() || xi[0] < 0.0 || values.iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidInput("profile grid must lie in [0, ∞) with nonnegative values"));
        }
        Self::signed_grid(xi, values)
    }

    fn signed_grid(xi: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let spline = CubicSpline::new(xi, values)
            .ok_or(Error::InvalidInput("profile grid must be strictly increasing, finite, with ≥ 2 nodes"))?;
        Ok(Self { amplitude: 1.0, shape: Shape::Grid(spline), heat: 0.0 })
    }

    pub fn zero() -> Self {
        Self { amplitude: 0.0, shape: Shape::Band(1.0), heat: 0.0 }
    }

    /// Multiply by `e^{-s(ξ²+1)/2}`.
    pub fn with_heat(mut self, s: f64) -> Self {
        self.heat += s;
        self
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Accumulated Gaussian time: the profile carries `e^{-heat(ξ²+1)/2}`.
    pub fn heat(&self) -> f64 {
        self.heat
    }

    pub fn value(&self, xi: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let s = match &self.shape {
            Shape::Unbounded => 1.0,
            Shape::Band(a) => {
                if xi <= *a {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Grid(sp) => {
                if xi > sp.last() {
                    0.0
                } else {
                    sp.eval(xi)
                }
            }
        };
        self.amplitude * s * exp(-0.5 * self.heat * (xi * xi + 1.0))
    }

    /// `(ln|value|, sign)`; `ln|value| = -∞` where the profile vanishes.
    pub fn ln_abs_value(&self, xi: f64) -> (f64, f64) {
        let s = match &self.shape {
            Shape::Unbounded => 1.0,
            Shape::Band(a) => {
                if xi <= *a {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Grid(sp) => {
                if xi > sp.last() {
                    0.0
                } else {
                    sp.eval(xi)
                }
            }
        };
        let v = self.amplitude * s;
        if v == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        (log(fabs(v)) - 0.5 * self.heat * (xi * xi + 1.0), v.signum())
    }

    /// Right end of the support, if compact.
    pub fn support_end(&self) -> Option<f64> {
        match &self.shape {
            Shape::Unbounded => None,
            Shape::Band(a) => Some(*a),
            Shape::Grid(sp) => Some(sp.last()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
            || matches!(&self.shape, Shape::Grid(sp) if sp.values().iter().all(|v| *v == 0.0))
    }

    /// Square-integrable against `ξ²dξ`.
    pub fn is_admissible(&self) -> bool {
        self.is_zero() || self.support_end().is_some() || self.heat > 0.0
    }

    /// Short human-readable description, e.g. `heat:0.3` or `band:2`.
    pub fn describe(&self) -> String {
        let base = match &self.shape {
            Shape::Unbounded => format!("heat:{}", self.heat),
            Shape::Band(a) if self.heat == 0.0 => format!("band:{a}"),
            Shape::Band(a) => format!("band:{a}*heat:{}", self.heat),
            Shape::Grid(sp) if self.heat == 0.0 => format!("grid:{}", sp.nodes().len()),
            Shape::Grid(sp) => format!("grid:{}*heat:{}", sp.nodes().len(), self.heat),
        };
        if self.amplitude == 1.0 {
            base
        } else {
            format!("{}*{base}", self.amplitude)
        }
    }
}

/// Radial function on H³.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialFunction {
    /// `p_s(r) = e^{-s/2}(r/sinh r)e^{-r²/2s}/(2πs)^{3/2}`.
    HeatKernel { s: f64 },
    /// Cubic interpolant through samples, zero beyond the last radius.
    Grid(CubicSpline),
    /// Spherical inverse of a profile, evaluated on demand.
    FromProfile(SpectralProfile),
}

impl RadialFunction {
    pub fn grid(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.is_empty() || r[0] < 0.0 {
            return Err(Error::InvalidInput("radial grid must start at r ≥ 0"));
        }
        CubicSpline::new(r, values)
            .map(RadialFunction::Grid)
            .ok_or(Error::InvalidInput("radial grid must be strictly increasing, finite, with ≥ 2 nodes"))
    }

    pub fn value(&self, r: f64, quad: &QuadratureSpec) -> Result<f64> {
        match self {
            RadialFunction::HeatKernel { s } => Ok(heat_kernel_value(*s, r)),
            RadialFunction::Grid(sp) => Ok(if r > sp.last() { 0.0 } else { sp.eval(r) }),
            RadialFunction::FromProfile(p) => spherical_inverse_with(p, r, quad),
        }
    }

    /// `f(r)·sinh r`, computed without forming `sinh r` where possible.
    pub fn sinh_weighted(&self, r: f64, quad: &QuadratureSpec) -> Result<f64> {
        match self {
            RadialFunction::HeatKernel { s } => {
                Ok(exp(-0.5 * s - r * r / (2.0 * s)) * r / pow(2.0 * PI * s, 1.5))
            }
            RadialFunction::Grid(sp) => Ok(if r > sp.last() { 0.0 } else { sp.eval(r) * libm::sinh(r) }),
            RadialFunction::FromProfile(p) => {
                // f(r) sinh r = c_P ∫ f̂(ξ) ξ sin(ξr) dξ
                Ok(xi_integral(|x| p.value(x) * x * libm::sin(x * r), p, 0.5 * p.heat, 0.0, quad)?.value
                    * C_PLANCHEREL)
            }
        }
    }

    /// Radius beyond which the forward-transform integrand is negligible.
    fn radial_extent(&self, quad: &QuadratureSpec) -> Result<f64> {
        let l = log(1.0 / quad.abs_tol).max(1.0) + 20.0;
        match self {
            RadialFunction::HeatKernel { s } => Ok(sqrt(2.0 * s * l)),
            RadialFunction::Grid(sp) => Ok(sp.last()),
            RadialFunction::FromProfile(p) => {
                if p.is_zero() {
                    Ok(1.0)
                } else if p.heat > 0.0 {
                    Ok(sqrt(2.0 * p.heat * l))
                } else {
                    Err(Error::InvalidInput("profile without Gaussian decay has no absolutely convergent inverse"))
                }
            }
        }
    }
}

fn heat_kernel_value(s: f64, r: f64) -> f64 {
    exp(-0.5 * s - r * r / (2.0 * s)) / sinhc(r) / pow(2.0 * PI * s, 1.5)
}

/// Value of a spectral integral with its truncation bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegral {
    pub value: f64,
    /// Quadrature error estimate.
    pub error: f64,
    /// Estimate of the integral beyond the cutoff.
    pub tail: f64,
    pub cutoff: f64,
}

/// `∫₀^∞ g(ξ) dξ` for an integrand bounded by `C·e^{-rate·ξ² + growth·ξ}`
/// (times a polynomial) and supported where `p` is.
///
/// The cutoff is the smaller of the support end and
/// `xi_cutoff(rate) + growth/rate`, the latter moving the Gaussian window
/// past the peak of `e^{-rate ξ² + growth ξ}`.
pub(crate) fn xi_integral<F: FnMut(f64) -> f64>(
    mut g: F,
    p: &SpectralProfile,
    rate: f64,
    growth: f64,
    quad: &QuadratureSpec,
) -> Result<SpectralIntegral> {
    if p.is_zero() {
        return Ok(SpectralIntegral { value: 0.0, error: 0.0, tail: 0.0, cutoff: 0.0 });
    }
    let gaussian_end = if rate > 0.0 { Some(quad.xi_cutoff(rate) + growth.max(0.0) / rate) } else { None };
    let (end, truncated) = match (p.support_end(), gaussian_end) {
        (Some(s), Some(c)) if c < s => (c, true),
        (Some(s), _) => (s, false),
        (None, Some(c)) => (c, true),
        (None, None) => return Err(Error::FiniteLimitAbsent),
    };
    const PIECES: usize = 16;
    let mut pts = [0.0; PIECES + 1];
    for (k, v) in pts.iter_mut().enumerate() {
        *v = end * k as f64 / PIECES as f64;
    }
    let r = integrate_breaks(&mut g, &pts, quad)?;
    let tail = if truncated {
        let slope = 2.0 * rate * end - growth;
        if slope > 0.0 {
            fabs(g(end)) / slope
        } else {
            f64::INFINITY
        }
    } else {
        0.0
    };
    if !tail.is_finite() || tail > quad.abs_tol.max(quad.rel_tol * fabs(r.value)) {
        return Err(Error::GrowthError { xi_cutoff: end, integrand: g(end) });
    }
    Ok(SpectralIntegral { value: r.value, error: r.error, tail, cutoff: end })
}

/// `f̂(ξ)` at a single point.
pub fn spherical_forward_at(f: &RadialFunction, xi: f64, quad: &QuadratureSpec) -> Result<f64> {
    let end = f.radial_extent(quad)?;
    let pieces = 16;
    let pts: Vec<f64> = (0..=pieces).map(|k| end * k as f64 / pieces as f64).collect();
    let mut failure = None;
    let r = integrate_breaks(
        |r| match f.sinh_weighted(r, quad) {
            Ok(v) => v * r * sinc(xi * r),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        &pts,
        quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(4.0 * PI * r.value)
}

/// Spherical transform sampled on `xi_grid`, returned as a grid profile.
///
/// The grid values are the (real, possibly signed) transform values.
pub fn spherical_forward(f: &RadialFunction, xi_grid: &[f64], quad: &QuadratureSpec) -> Result<SpectralProfile> {
    let values = xi_grid
        .iter()
        .map(|x| spherical_forward_at(f, *x, quad))
        .collect::<Result<Vec<f64>>>()?;
    SpectralProfile::signed_grid(xi_grid.to_vec(), values)
}

/// `f(r) = c_P ∫ f̂(ξ) φ_ξ(r) ξ² dξ`.
pub fn spherical_inverse(p: &SpectralProfile, r: f64) -> Result<f64> {
    spherical_inverse_with(p, r, &QuadratureSpec::default())
}

pub fn spherical_inverse_with(p: &SpectralProfile, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidInput("radius must be nonnegative"));
    }
    let h = sinhc(r);
    let s = xi_integral(|x| p.value(x) * sinc(x * r) / h * x * x, p, 0.5 * p.heat, 0.0, quad)?;
    Ok(C_PLANCHEREL * s.value)
}

/// `‖f‖² = ∫ |f̂(ξ)|² c_P ξ² dξ`.
pub fn plancherel_norm_sq(p: &SpectralProfile) -> f64 {
    let quad = QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-12, max_panels: 8192 };
    match plancherel_norm_sq_with(p, &quad) {
        Ok(v) => v,
        Err(Error::QuadratureFailure { estimate, .. }) => estimate,
        Err(_) => f64::INFINITY,
    }
}

pub fn plancherel_norm_sq_with(p: &SpectralProfile, quad: &QuadratureSpec) -> Result<f64> {
    let s = xi_integral(
        |x| {
            let v = p.value(x);
            v * v * x * x
        },
        p,
        p.heat,
        0.0,
        quad,
    )?;
    Ok(C_PLANCHEREL * s.value)
}

/// Spectral form of the heat semigroup: multiply by `e^{-t(ξ²+1)/2}`.
pub fn heat_apply(p: &SpectralProfile, t: f64) -> Result<SpectralProfile> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    Ok(p.clone().with_heat(t))
}

/// Holomorphic extension `F(exp_{x₀}(iY))` at `|Y| = r < π`:
/// `c_P ∫ F̂(ξ)·sinh(ξr)/(ξ sin r)·ξ² dξ`.
pub fn eval_extension(pf: &SpectralProfile, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    let r = fabs(r);
    if r >= PI {
        return Err(Error::DomainError { what: "|Y|", value: r, limit: PI });
    }
    let ln_j = log(sinc(r));
    let s = xi_integral(
        |x| {
            let (lv, sign) = pf.ln_abs_value(x);
            sign * exp(lv + ln_sinhc(x * r) - ln_j) * x * x
        },
        pf,
        0.5 * pf.heat,
        r,
        quad,
    )?;
    Ok(C_PLANCHEREL * s.value)
}

/// Orbital integral `O_{|F|²}(iY) = ∫ |f̂|²e^{-t(ξ²+1)}φ_ξ(e^{iY}) dμ_Pl`
/// for `F = e^{tΔ/2}f` and `|Y| = r < π`.
pub fn orbital_integral(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    let r = fabs(r);
    if r >= PI {
        return Err(Error::DomainError { what: "|Y|", value: r, limit: PI });
    }
    let ln_j = log(sinc(r));
    let s = xi_integral(
        |x| {
            let (lv, _) = p.ln_abs_value(x);
            exp(2.0 * lv - t * (x * x + 1.0) + ln_sinhc(x * r) - ln_j) * x * x
        },
        p,
        p.heat + t,
        r,
        quad,
    )?;
    Ok(C_PLANCHEREL * s.value)
}

/// `sin(r)·O_{|F|²}(iY) = ∫ |f̂|²e^{-t(ξ²+1)}·sinh(ξr)/ξ dμ_Pl`, an entire
/// function of `r` with no restriction on `|Y|`.
pub fn orbital_integral_times_sin(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    orbital_integral_times_sin_scaled(p, t, r, 0.0, quad)
}

/// `e^{ln_scale}·sin(r)·O_{|F|²}(iY)` with the scale folded into the
/// integrand, for products that would overflow when formed afterwards.
pub(crate) fn orbital_integral_times_sin_scaled(
    p: &SpectralProfile,
    t: f64,
    r: f64,
    ln_scale: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let s = xi_integral(
        |x| {
            let (lv, _) = p.ln_abs_value(x);
            r * exp(2.0 * lv - t * (x * x + 1.0) + ln_sinhc(x * r) + ln_scale) * x * x
        },
        p,
        p.heat + t,
        fabs(r),
        quad,
    )?;
    Ok(C_PLANCHEREL * s.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn heat(s: f64) -> SpectralProfile {
        SpectralProfile::heat_kernel(s).unwrap()
    }

    #[test]
    fn plancherel_calibration() {
        for s in [0.25, 0.5, 1.0] {
            let want = exp(-s) / pow(4.0 * PI * s, 1.5);
            let got = plancherel_norm_sq(&heat(s));
            assert!((got - want).abs() < 1e-8 * want, "s={s}");
        }
        assert!((plancherel_norm_sq(&heat(0.5)) - 0.038511).abs() < 1e-6);
        assert_eq!(plancherel_norm_sq(&SpectralProfile::zero()), 0.0);
        let p = heat(0.4);
        let ratio = plancherel_norm_sq(&p.clone().scaled(3.0)) / plancherel_norm_sq(&p);
        assert!((ratio - 9.0).abs() < 1e-12);
        let band = plancherel_norm_sq(&SpectralProfile::band(2.0).unwrap());
        assert!((band - C_PLANCHEREL * 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn forward_heat_kernel() {
        let s = 0.5;
        let f = RadialFunction::HeatKernel { s };
        for k in 0..=16 {
            let xi = 0.5 * k as f64;
            let got = spherical_forward_at(&f, xi, &q()).unwrap();
            let want = exp(-s * (xi * xi + 1.0) / 2.0);
            assert!((got - want).abs() <= 1e-7 * want + 1e-12, "ξ={xi} {got} {want}");
        }
    }

    #[test]
    fn forward_linearity_and_zero() {
        let r: Vec<f64> = (0..=200).map(|i| i as f64 * 0.04).collect();
        let v: Vec<f64> = r.iter().map(|x| heat_kernel_value(0.4, *x)).collect();
        let f = RadialFunction::grid(r.clone(), v.clone()).unwrap();
        let f2 = RadialFunction::grid(r.clone(), v.iter().map(|x| 2.0 * x).collect()).unwrap();
        let z = RadialFunction::grid(r.clone(), alloc::vec![0.0; r.len()]).unwrap();
        for xi in [0.0, 1.0, 2.5] {
            let a = spherical_forward_at(&f, xi, &q()).unwrap();
            let b = spherical_forward_at(&f2, xi, &q()).unwrap();
            assert!((b - 2.0 * a).abs() < 1e-8 * a.abs(), "{a} {b}");
            assert_eq!(spherical_forward_at(&z, xi, &q()).unwrap(), 0.0);
            // spline interpolation of the heat kernel is accurate to ~1e-5
            assert!((a - exp(-0.2 * (xi * xi + 1.0))).abs() < 1e-4);
        }
        let grid = spherical_forward(&f, &[0.0, 1.0, 2.0], &q()).unwrap();
        assert_eq!(grid.support_end(), Some(2.0));
    }

    #[test]
    fn inverse_heat_kernel() {
        let t = 0.5;
        let p = heat(t);
        let at0 = spherical_inverse(&p, 0.0).unwrap();
        let want = exp(-t / 2.0) / pow(2.0 * PI * t, 1.5);
        assert!((at0 - want).abs() < 1e-9 * want);
        for r in [0.3, 1.0, 2.2, 4.0] {
            let got = spherical_inverse(&p, r).unwrap();
            let want = heat_kernel_value(t, r);
            assert!((got - want).abs() < 1e-8 * want + 1e-14, "r={r}");
        }
        assert_eq!(spherical_inverse(&SpectralProfile::zero(), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn round_trip_on_band_limited_profiles() {
        let profiles = [
            heat(0.25),
            heat(0.5),
            heat(1.0),
            SpectralProfile::band(12.0).unwrap().with_heat(0.5),
            SpectralProfile::band(9.0).unwrap().with_heat(1.0),
        ];
        for p in profiles {
            let f = RadialFunction::FromProfile(p.clone());
            for xi in [0.0, 0.7, 1.5, 3.0] {
                let got = spherical_forward_at(&f, xi, &q()).unwrap();
                let want = p.value(xi);
                assert!((got - want).abs() <= 1e-6 * want, "{} ξ={xi}: {got} {want}", p.describe());
            }
        }
    }

    #[test]
    fn heat_semigroup() {
        let p = heat_apply(&heat(0.3), 0.5).unwrap();
        assert_eq!(p, heat(0.8));
        let base = SpectralProfile::band(3.0).unwrap();
        let tiny = heat_apply(&base, 1e-8).unwrap();
        for xi in [0.0, 1.0, 2.9] {
            assert!((tiny.value(xi) - base.value(xi)).abs() < 1e-6);
        }
        for p in [heat(0.3), base] {
            let t = 0.7;
            assert!(plancherel_norm_sq(&heat_apply(&p, t).unwrap()) <= exp(-t) * plancherel_norm_sq(&p));
        }
        assert!(heat_apply(&heat(1.0), 0.0).is_err());
    }

    #[test]
    fn extension_examples() {
        let t = 0.5;
        let p = heat(t);
        let at0 = eval_extension(&p, 0.0, &q()).unwrap();
        assert!((at0 - spherical_inverse(&p, 0.0).unwrap()).abs() < 1e-8 * at0);
        let r: f64 = 1.0;
        let want = exp(-t / 2.0) * (r / libm::sin(r)) * exp(r * r / (2.0 * t)) / pow(2.0 * PI * t, 1.5);
        let got = eval_extension(&p, r, &q()).unwrap();
        assert!((got - want).abs() < 1e-6 * want);
        assert!(matches!(eval_extension(&p, PI, &q()), Err(Error::DomainError { .. })));
        // |F| diverges like 1/sin r near π: the product with sin r settles.
        let a = eval_extension(&p, PI - 1e-3, &q()).unwrap() * libm::sin(PI - 1e-3);
        let b = eval_extension(&p, PI - 1e-4, &q()).unwrap() * libm::sin(PI - 1e-4);
        assert!((a - b).abs() < 1e-2 * b.abs());
    }

    #[test]
    fn orbital_examples() {
        let p = heat(0.3);
        let t = 0.5;
        let o0 = orbital_integral(&p, t, 0.0, &q()).unwrap();
        let want = exp(-0.8) / pow(3.2 * PI, 1.5);
        assert!((o0 - want).abs() < 1e-9 * want);
        assert!((o0 - plancherel_norm_sq(&heat(0.8))).abs() < 1e-9 * want);
        let mut last = o0;
        for k in 1..30 {
            let r = PI * k as f64 / 30.5;
            let o = orbital_integral(&p, t, r, &q()).unwrap();
            assert!(o > last);
            last = o;
        }
        let lim = orbital_integral_times_sin(&p, t, PI, &q()).unwrap();
        let near = orbital_integral(&p, t, PI - 1e-3, &q()).unwrap() * libm::sin(PI - 1e-3);
        assert!(lim > 0.0 && (near - lim).abs() < 1e-2 * lim);
        assert!(matches!(orbital_integral(&p, t, 3.2, &q()), Err(Error::DomainError { .. })));
    }

    #[test]
    fn profile_validation() {
        assert!(SpectralProfile::heat_kernel(0.0).is_err());
        assert!(SpectralProfile::band(-1.0).is_err());
        assert!(SpectralProfile::grid(alloc::vec![0.0, 1.0], alloc::vec![1.0, -1.0]).is_err());
        assert!(SpectralProfile::grid(alloc::vec![1.0, 0.5], alloc::vec![1.0, 1.0]).is_err());
        assert_eq!(heat(0.3).describe(), "heat:0.3");
        assert_eq!(SpectralProfile::band(2.0).unwrap().describe(), "band:2");
    }

    proptest! {
        #[test]
        fn gutzmer_at_zero(s in 0.1f64..1.5, t in 0.1f64..1.5, band in prop::bool::ANY) {
            let p = if band { SpectralProfile::band(1.0 + 2.0 * s).unwrap() } else { heat(s) };
            let o = orbital_integral(&p, t, 0.0, &q()).unwrap();
            let n = plancherel_norm_sq(&heat_apply(&p, t).unwrap());
            prop_assert!((o - n).abs() <= 1e-9 * n);
        }
    }
}
