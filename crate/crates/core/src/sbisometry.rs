//! Tube integrals `G_F(R)` on H³ and the theorems built from them.
//!
//! `G_F(R)` is computed by five routes that share no intermediate results
//! beyond the profile:
//!
//! | route       | integrand                                                        | valid for  |
//! |-------------|------------------------------------------------------------------|------------|
//! | `euclid`    | `‖f̂‖²·P(ball of radius 2R)` with the Gaussian ball in closed form | all `R`    |
//! | `beta`      | `‖f̂‖²·β_R(ξ²+1)`                                                 | all `R`    |
//! | `geometric` | `‖f̂‖²e^{-tξ²}·∫_{|Y|≤2R} Ψ_ξ(Y)·G_t(Y) dY` by polar quadrature    | all `R`    |
//! | `direct`    | `∫_{|Y|≤2R} O_{|F|²}(iY)·α(Y) dY` with the singular orbital integral | `R < π/2`  |
//! | `series`    | even power series in `2R` with sphere moments                     | convergent |
//!
//! Here `G_t(Y) = e^{-|Y|²/4t}/(4πt)^{3/2}` and `P` is the probability that a
//! Gaussian vector with mean `2tξ·e₁` and covariance `2t` lies in the ball.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, expm1, fabs, lgamma, log, pow, sin, sqrt};

use crate::error::{Error, Result};
use crate::h3xform::{
    eval_extension, heat_apply, orbital_integral, orbital_integral_times_sin, plancherel_norm_sq, xi_integral,
    SpectralProfile, C_PLANCHEREL,
};
use crate::math::{gamma_p, sinc, CompensatedSum};
use crate::quad::{integrate_breaks, QuadratureSpec};
use crate::rootgeom::{polar_density, r_max, RootSystem};
use crate::specialfn::{alpha_density, beta_r, gaussian_ball_scaled, heat_gaussian, psi_entire, sphere_moment};

const D: usize = 3;

/// Largest power kept by the series route.
pub const SERIES_MAX_TERMS: usize = 80;

/// One way of computing `G_F(R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Euclid,
    Geometric,
    Direct,
    Series,
    Beta,
}

impl Route {
    /// CSV column order.
    pub const ALL: [Route; 5] = [Route::Euclid, Route::Geometric, Route::Direct, Route::Series, Route::Beta];

    pub fn name(self) -> &'static str {
        match self {
            Route::Euclid => "euclid",
            Route::Geometric => "geometric",
            Route::Direct => "direct",
            Route::Series => "series",
            Route::Beta => "beta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Route::ALL.iter().copied().find(|r| r.name() == name)
    }

    /// Position in [`Route::ALL`].
    pub fn index(self) -> usize {
        match self {
            Route::Euclid => 0,
            Route::Geometric => 1,
            Route::Direct => 2,
            Route::Series => 3,
            Route::Beta => 4,
        }
    }

    /// Whether the route is defined at tube radius `r`.
    pub fn in_domain(self, r: f64) -> bool {
        match self {
            Route::Direct => r < PI / 2.0,
            _ => true,
        }
    }
}

fn check_inputs(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput("tube radius must be nonnegative"));
    }
    Ok(())
}

/// `‖f̂‖²` as the integrand factor, with `P` supplied by the caller.
fn profile_sq(p: &SpectralProfile, xi: f64) -> f64 {
    let v = p.value(xi);
    v * v
}

/// Euclidean route: `∫ ‖f̂‖²·e^{-t(ξ²+1)}·e^{t}·I(3, t, ξ, 2R) dμ_Pl`, where the
/// exponentials cancel against the completed square.
pub fn gf_euclid(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_inputs(t, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let s = xi_integral(
        |x| profile_sq(p, x) * gaussian_ball_scaled(D, t, x, 2.0 * r) * x * x,
        p,
        p.heat(),
        0.0,
        quad,
    )?;
    Ok(C_PLANCHEREL * s.value)
}

/// Spectral-multiplier route `⟨f, β_R(-Δ) f⟩`.
pub fn gf_beta(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_inputs(t, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let rs = RootSystem::h3();
    let mut failure = None;
    let s = xi_integral(
        |x| match beta_r(&rs, t, x * x + 1.0, r) {
            Ok(b) => profile_sq(p, x) * b * x * x,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        p,
        p.heat(),
        0.0,
        quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(C_PLANCHEREL * s.value)
}

/// `Ψ_ξ(r)·e^{log_factor}` without overflow for large `ξr`.
fn psi_scaled(rs: &RootSystem, xi: f64, r: f64, log_factor: f64) -> f64 {
    let z = xi * r;
    if z < 600.0 {
        psi_entire(rs, [xi, 0.0], [r, 0.0]) * exp(log_factor)
    } else {
        // Ψ = sinh(z)/z = e^z (1 - e^{-2z})/(2z)
        exp(z + log_factor) * -expm1(-2.0 * z) / (2.0 * z)
    }
}

/// Polar quadrature `e^{-aξ²}·∫₀^b Ψ_ξ(r)·w(r)·μ(r) dr` with the Gaussian
/// weight `w(r) = e^{-r²/(2v)}/(2πv)^{3/2}` (variance `v`).
fn psi_ball(rs: &RootSystem, xi: f64, a: f64, v: f64, b: f64, quad: &QuadratureSpec) -> Result<f64> {
    let norm = pow(2.0 * PI * v, -1.5);
    let peak = (v * xi).min(b);
    let mut pts: Vec<f64> = (0..=8).map(|k| b * k as f64 / 8.0).collect();
    if peak > 0.0 && peak < b {
        pts.push(peak);
        pts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        pts.dedup();
    }
    let inner = integrate_breaks(
        |r| psi_scaled(rs, xi, r, -a * xi * xi - r * r / (2.0 * v)) * polar_density(rs, [r, 0.0]),
        &pts,
        quad,
    )?;
    Ok(norm * inner.value)
}

/// Geometric route: the bracket `∫_{|Y|≤2R} φ_ξ(e^{iY})α(Y)dY` is evaluated as
/// `e^{t}∫ Ψ_ξ·G_t` by polar quadrature of the entire function `Ψ_ξ`, so the
/// route exists for every `R`.
pub fn gf_geometric(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_inputs(t, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let rs = RootSystem::h3();
    let inner_quad = quad.tightened(0.1);
    let mut failure = None;
    let s = xi_integral(
        |x| match psi_ball(&rs, x, t, 2.0 * t, 2.0 * r, &inner_quad) {
            Ok(b) => profile_sq(p, x) * b * x * x,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        p,
        p.heat(),
        0.0,
        quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(C_PLANCHEREL * s.value)
}

/// Integrand of the direct route on the shell `|Y| = s`:
/// `O_{|F|²}(iY)·α(Y)·μ(Y)`.
pub fn direct_shell(p: &SpectralProfile, t: f64, s: f64, quad: &QuadratureSpec) -> Result<f64> {
    let rs = RootSystem::h3();
    let o = orbital_integral(p, t, s, quad)?;
    Ok(o * alpha_density(&rs, t, [s, 0.0]) * polar_density(&rs, [s, 0.0]))
}

/// Direct route through the (singular) orbital integrals, `0 < R < π/2`.
pub fn gf_direct(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_inputs(t, r)?;
    let limit = r_max(&RootSystem::h3());
    if r >= limit {
        return Err(Error::DomainError { what: "tube radius R", value: r, limit });
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let inner_quad = quad.tightened(0.1);
    let b = 2.0 * r;
    let pts: Vec<f64> = (0..=8).map(|k| b * k as f64 / 8.0).collect();
    let mut failure = None;
    let v = integrate_breaks(
        |s| match direct_shell(p, t, s, &inner_quad) {
            Ok(v) => v,
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
    Ok(v.value)
}

/// Terms of the series route.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesExpansion {
    pub value: f64,
    /// Term for each even power `n = 0, 2, 4, …` actually summed.
    pub terms: Vec<f64>,
    /// Ratio-test bound on the neglected terms.
    pub tail: f64,
}

/// `∫_{|y|≤b} |y|^n·e^{-|y|²/4t}/(4πt)^{3/2} dy = 2(4t)^{n/2}Γ((n+3)/2)P((n+3)/2, b²/4t)/√π`,
/// in log form.
fn ln_radial_moment(n: usize, t: f64, b: f64) -> f64 {
    let a = 0.5 * (n as f64 + 3.0);
    let p = gamma_p(a, b * b / (4.0 * t));
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    log(2.0) + 0.5 * n as f64 * log(4.0 * t) + lgamma(a) + log(p) - 0.5 * log(PI)
}

/// Series route: `G_F(R) = Σ_{n even} (m_n/n!)·M_n·Rad_n(2R)` with sphere
/// moments `m_n`, spectral moments `M_n = ∫‖f̂‖²e^{-tξ²}ξ^n dμ_Pl` and
/// Gaussian radial moments `Rad_n`. Every term is nonnegative.
pub fn gf_series_expansion(
    p: &SpectralProfile,
    t: f64,
    r: f64,
    quad: &QuadratureSpec,
    n_max: usize,
) -> Result<SeriesExpansion> {
    check_inputs(t, r)?;
    if r == 0.0 || p.is_zero() {
        return Ok(SeriesExpansion { value: 0.0, terms: Vec::new(), tail: 0.0 });
    }
    let rate = p.heat() + t;
    let mut terms = Vec::new();
    let mut sum = CompensatedSum::new();
    let mut prev = f64::NAN;
    let mut n = 0;
    while n <= n_max {
        let growth = sqrt(2.0 * rate * n as f64);
        let m = xi_integral(
            |x| profile_sq(p, x) * exp(-t * x * x) * pow(x, n as f64) * x * x,
            p,
            rate,
            growth,
            quad,
        )?
        .value
            * C_PLANCHEREL;
        let term = if m > 0.0 {
            exp(log(sphere_moment(D, n)) - lgamma(n as f64 + 1.0) + log(m) + ln_radial_moment(n, t, 2.0 * r))
        } else {
            0.0
        };
        sum.add(term);
        terms.push(term);
        let total = sum.value();
        if n >= 4 && prev > 0.0 {
            let q = term / prev;
            if q < 1.0 {
                let tail = term * q / (1.0 - q);
                if tail <= 0.1 * quad.rel_tol * total.max(quad.abs_tol) {
                    return Ok(SeriesExpansion { value: total, terms, tail });
                }
            }
        }
        if term == 0.0 && n >= 4 {
            return Ok(SeriesExpansion { value: total, terms, tail: 0.0 });
        }
        prev = term;
        n += 2;
    }
    let last = terms.last().copied().unwrap_or(0.0);
    Err(Error::SeriesNotConverged { terms: terms.len(), tail: last })
}

pub fn gf_series(p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec, n_max: usize) -> Result<f64> {
    gf_series_expansion(p, t, r, quad, n_max).map(|s| s.value)
}

/// `G_F(R)` by one route.
pub fn gf_route(route: Route, p: &SpectralProfile, t: f64, r: f64, quad: &QuadratureSpec) -> Result<f64> {
    match route {
        Route::Euclid => gf_euclid(p, t, r, quad),
        Route::Geometric => gf_geometric(p, t, r, quad),
        Route::Direct => gf_direct(p, t, r, quad),
        Route::Series => gf_series(p, t, r, quad, SERIES_MAX_TERMS),
        Route::Beta => gf_beta(p, t, r, quad),
    }
}

/// Values of the requested routes at one radius, in [`Route::ALL`] order.
/// A route is `None` outside its domain or when its series does not
/// converge.
pub fn tube_point(
    p: &SpectralProfile,
    t: f64,
    r: f64,
    routes: &[Route],
    quad: &QuadratureSpec,
) -> Result<[Option<f64>; 5]> {
    let mut out = [None; 5];
    for &route in routes {
        if !route.in_domain(r) {
            continue;
        }
        match gf_route(route, p, t, r, quad) {
            Ok(v) => out[route.index()] = Some(v),
            Err(Error::SeriesNotConverged { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Sampled `R ↦ G_F(R)` with per-route columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeCurve {
    pub t: f64,
    pub profile: alloc::string::String,
    pub radii: Vec<f64>,
    /// `values[i][route]` in [`Route::ALL`] order.
    pub values: Vec<[Option<f64>; 5]>,
    /// `‖f‖²` from the Plancherel formula.
    pub norm_sq: f64,
}

impl TubeCurve {
    pub fn new(t: f64, p: &SpectralProfile, radii: Vec<f64>, values: Vec<[Option<f64>; 5]>) -> Self {
        Self { t, profile: p.describe(), radii, values, norm_sq: plancherel_norm_sq(p) }
    }

    pub fn column(&self, route: Route) -> impl Iterator<Item = Option<f64>> + '_ {
        self.values.iter().map(move |v| v[route.index()])
    }

    /// Largest `|a - euclid|/(1 + |euclid|)` over the shared cells of `route`.
    pub fn discrepancy(&self, route: Route) -> f64 {
        self.values
            .iter()
            .filter_map(|v| match (v[0], v[route.index()]) {
                (Some(e), Some(a)) => Some(fabs(a - e) / (1.0 + fabs(e))),
                _ => None,
            })
            .fold(0.0, f64::max)
    }

    /// Every column nondecreasing in `R` (up to `slack`) and bounded by `‖f‖²`.
    pub fn is_monotone_bounded(&self, slack: f64) -> bool {
        Route::ALL.iter().all(|&route| {
            let col: Vec<f64> = self.column(route).flatten().collect();
            col.windows(2).all(|w| w[1] + slack >= w[0]) && col.iter().all(|v| *v <= self.norm_sq * (1.0 + slack) + slack)
        })
    }

    /// Relative error of the last euclid value against `‖f‖²`.
    pub fn limit_error(&self) -> Option<f64> {
        let last = self.values.last()?[0]?;
        if self.norm_sq == 0.0 {
            Some(fabs(last))
        } else {
            Some(fabs(last - self.norm_sq) / self.norm_sq)
        }
    }
}

/// Default radii: `0.1, 0.35, …` up to `6√t + π`, plus `π/2 - 0.02`, `π/2`
/// and the end point.
pub fn default_radii(t: f64) -> Vec<f64> {
    radii_to(6.0 * sqrt(t) + PI, usize::MAX)
}

/// `ln(1/abs_tol) + 10`, the envelope depth used for integration extents.
fn envelope_depth(quad: &QuadratureSpec) -> f64 {
    log(1.0 / quad.abs_tol).max(1.0) + 10.0
}

/// Extent in `|Y|` past which the tube integrand is negligible. With
/// `|f̂|² ~ e^{-sξ²}` the integrand in `(ξ, y)` is bounded by
/// `e^{-(s+t)ξ² + ξy - y²/4t}`, whose maximum over `ξ` is
/// `e^{-y²s/(4t(s+t))}`; compact support up to `a` caps the window at `2ta`.
pub fn tube_envelope_extent(p: &SpectralProfile, t: f64, quad: &QuadratureSpec) -> f64 {
    let l = envelope_depth(quad);
    let s = p.heat();
    let from_heat = if s > 0.0 { sqrt(4.0 * t * (s + t) / s * l) } else { f64::INFINITY };
    let from_support = match p.support_end() {
        Some(a) => 2.0 * t * a + sqrt(4.0 * t * l),
        None => f64::INFINITY,
    };
    from_heat.min(from_support)
}

/// Radius at which `G_F(R)` has reached its limit: `6√t + π`, or the
/// envelope extent halved when that is larger (the tube ball has radius `2R`).
pub fn limit_radius(p: &SpectralProfile, t: f64, quad: &QuadratureSpec) -> f64 {
    (6.0 * sqrt(t) + PI).max(0.5 * tube_envelope_extent(p, t, quad))
}

/// Radius at which the base-point inversion integral has converged; the
/// integrand is bounded by `e^{-y²s/(2t(s+t))}`, or centred at `ta` for
/// support up to `a`.
pub fn inversion_limit_radius(p: &SpectralProfile, t: f64, quad: &QuadratureSpec) -> f64 {
    let l = envelope_depth(quad);
    let s = p.heat();
    let from_heat = if s > 0.0 { sqrt(2.0 * t * (s + t) / s * l) } else { f64::INFINITY };
    let from_support = match p.support_end() {
        Some(a) => t * a + sqrt(2.0 * t * l),
        None => f64::INFINITY,
    };
    (6.0 * sqrt(t) + PI).max(from_heat.min(from_support))
}

/// `0.1, 0.35, …` up to `end`, with `π/2 - 0.02`, `π/2` and `end` added, at
/// most about `max_points` points (the step grows beyond 0.25 if needed).
pub fn radii_to(end: f64, max_points: usize) -> Vec<f64> {
    let step = (end / max_points.max(1) as f64).max(0.25);
    let mut r: Vec<f64> = Vec::new();
    let mut x = 0.1;
    while x < end {
        r.push(x);
        x += step;
    }
    if end > PI / 2.0 {
        r.push(PI / 2.0 - 0.02);
        r.push(PI / 2.0);
    }
    r.push(end);
    r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    r.dedup_by(|a, b| fabs(*a - *b) < 1e-12);
    r
}

/// Tube curve over [`default_radii`] with every applicable route.
pub fn global_isometry_report(p: &SpectralProfile, t: f64, quad: &QuadratureSpec) -> Result<TubeCurve> {
    tube_curve(p, t, default_radii(t), &Route::ALL, quad)
}

/// Sequential tube curve over arbitrary radii.
pub fn tube_curve(
    p: &SpectralProfile,
    t: f64,
    radii: Vec<f64>,
    routes: &[Route],
    quad: &QuadratureSpec,
) -> Result<TubeCurve> {
    let values = radii.iter().map(|&r| tube_point(p, t, r, routes, quad)).collect::<Result<Vec<_>>>()?;
    Ok(TubeCurve::new(t, p, radii, values))
}

/// How the base-point inversion integral is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InversionRoute {
    /// `F(exp iY)` from the holomorphic extension; needs `R < π`.
    Direct,
    /// `φ_ξ·j^{c 1/2}` replaced by the entire `Ψ_ξ`; any `R`.
    Spectral,
}

/// `e^{t/2}∫_{|Y|≤R} F(exp_{x₀} iY)·j^c(Y)^{1/2}·e^{-|Y|²/2t}/(2πt)^{3/2} dY`,
/// which tends to `f(x₀)` as `R → ∞`.
pub fn inversion_at_base(
    p: &SpectralProfile,
    t: f64,
    r: f64,
    route: InversionRoute,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_inputs(t, r)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let rs = RootSystem::h3();
    let inner_quad = quad.tightened(0.1);
    match route {
        InversionRoute::Spectral => {
            let mut failure = None;
            let s = xi_integral(
                |x| match psi_ball(&rs, x, 0.5 * t, t, r, &inner_quad) {
                    Ok(b) => p.value(x) * b * x * x,
                    Err(e) => {
                        failure.get_or_insert(e);
                        0.0
                    }
                },
                p,
                0.5 * p.heat(),
                0.0,
                quad,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            Ok(C_PLANCHEREL * s.value)
        }
        InversionRoute::Direct => {
            if r >= PI {
                return Err(Error::DomainError { what: "inversion radius R", value: r, limit: PI });
            }
            let pf = heat_apply(p, t)?;
            let norm = exp(0.5 * t) * pow(2.0 * PI * t, -1.5);
            let pts: Vec<f64> = (0..=8).map(|k| r * k as f64 / 8.0).collect();
            let mut failure = None;
            let v = integrate_breaks(
                |y| match eval_extension(&pf, y, &inner_quad) {
                    Ok(f) => f * sinc(y) * exp(-y * y / (2.0 * t)) * polar_density(&rs, [y, 0.0]),
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
            Ok(norm * v.value)
        }
    }
}

/// Recover `f̂ = F̂·e^{t(ξ²+1)/2}` from the profile of `F|_{G/K}`.
///
/// Fails with [`Error::FiniteLimitAbsent`] when
/// `∫‖F̂‖²e^{t}e^{tξ²}dμ_Pl` diverges, i.e. when `F` is not in the image of
/// the heat operator.
pub fn surjectivity_reconstruct(pf: &SpectralProfile, t: f64) -> Result<SpectralProfile> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    let f = pf.clone().with_heat(-t);
    if !f.is_admissible() {
        return Err(Error::FiniteLimitAbsent);
    }
    Ok(f)
}

/// `lim_{R→∞} G(R) = ∫‖F̂‖²e^{t}e^{tξ²}dμ_Pl`, finite exactly when the
/// reconstruction succeeds.
pub fn finite_limit(pf: &SpectralProfile, t: f64) -> Result<f64> {
    Ok(plancherel_norm_sq(&surjectivity_reconstruct(pf, t)?))
}

/// One row of the no-invariant-density table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpossibilityRow {
    pub xi: f64,
    /// `∫_{|Y|≤π} sinh(ξ|Y|)/(ξ sin|Y|)·α(Y) dY`.
    pub lhs: f64,
    /// `e^{t(ξ²+1)}`.
    pub rhs: f64,
    pub ratio: f64,
    /// `LHS·ξ·e^{-πξ}`, bounded by the mass constant.
    pub scaled_lhs: f64,
}

/// Table for a radial density `α` on the ball of radius π.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpossibilityTable {
    /// `M = ½∫_{|Y|≤π} α(Y)/sin|Y| dY`, so that `LHS(ξ) ≤ M e^{πξ}/ξ`.
    pub mass_constant: f64,
    pub rows: Vec<ImpossibilityRow>,
}

impl ImpossibilityTable {
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|r| r.scaled_lhs <= self.mass_constant * (1.0 + 1e-12))
    }
}

/// Demonstrates that no radial density `α ≥ 0` reproduces `e^{t(ξ²+1)}`
/// from the continued spherical functions: the left side grows at most like
/// `e^{π|ξ|}`.
pub fn no_invariant_density_demo(
    t: f64,
    alpha: &dyn Fn(f64) -> f64,
    xi_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<ImpossibilityTable> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    if xi_grid.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidInput("ξ grid must be positive"));
    }
    let pts: Vec<f64> = (0..=8).map(|k| PI * k as f64 / 8.0).collect();
    let mass = integrate_breaks(|r| 0.5 * 4.0 * PI * r * r * alpha(r) / sin(r), &pts, quad)?.value;
    let mut rows = Vec::with_capacity(xi_grid.len());
    for &xi in xi_grid {
        let lhs = integrate_breaks(
            |r| 4.0 * PI * r * r * libm::sinh(xi * r) / (xi * sin(r)) * alpha(r),
            &pts,
            quad,
        )?
        .value;
        let rhs = exp(t * (xi * xi + 1.0));
        rows.push(ImpossibilityRow { xi, lhs, rhs, ratio: lhs / rhs, scaled_lhs: lhs * xi * exp(-PI * xi) });
    }
    Ok(ImpossibilityTable { mass_constant: mass, rows })
}

/// The truncated unwrapped heat density `α` of H³ on the ball of radius π.
pub fn truncated_alpha(t: f64) -> impl Fn(f64) -> f64 {
    let rs = RootSystem::h3();
    move |r| if r < PI { alpha_density(&rs, t, [r, 0.0]) } else { 0.0 }
}

/// Shell quantities at `|Y| = s` used by the cancellation demonstration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellSample {
    pub s: f64,
    /// `O_{|F|²}(iY)·μ(Y)`, diverging like `1/sin s` at `s = π`. `None` for `s ≥ π`.
    pub raw: Option<f64>,
    /// `raw·sin s`, from the entire form of the orbital integral.
    pub times_sin: f64,
    /// Same quantity through `Ψ_ξ`: `μ(Y)·s·∫‖F̂‖²e^{t}Ψ_ξ(s) dμ_Pl`.
    pub psi_route: f64,
}

pub fn shell_sample(p: &SpectralProfile, t: f64, s: f64, quad: &QuadratureSpec) -> Result<ShellSample> {
    let rs = RootSystem::h3();
    let mu = polar_density(&rs, [s, 0.0]);
    let raw = if s < PI { Some(orbital_integral(p, t, s, quad)? * mu) } else { None };
    let times_sin = orbital_integral_times_sin(p, t, s, quad)? * mu;
    let sv = xi_integral(
        |x| {
            let (lv, _) = p.ln_abs_value(x);
            if lv == f64::NEG_INFINITY {
                0.0
            } else {
                psi_scaled(&rs, x, s, 2.0 * lv - t * (x * x + 1.0)) * x * x
            }
        },
        p,
        p.heat() + t,
        s,
        quad,
    )?;
    let psi_route = mu * s * C_PLANCHEREL * sv.value;
    Ok(ShellSample { s, raw, times_sin, psi_route })
}

/// `e^{-r²/4t}/(4πt)^{3/2}`, exposed for callers assembling tube integrands.
pub fn tube_gaussian(t: f64, r: f64) -> f64 {
    heat_gaussian(D, t, r)
}
