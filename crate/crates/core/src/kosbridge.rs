//! Shift-operator form of the isometry and its reduction to the tube form.
//!
//! In the complex case the shift operator is the differential operator
//! `D = C_D·∏_{α∈Σ⁺}(-D_α)∘∏_{α∈Σ⁺} sin⟨α,Y⟩`, taking `φ_ξ(e^{iY})` to
//! `ψ_ξ(iY) = Σ_w e^{-⟨wξ,Y⟩}`. Under the Gutzmer integral this turns the
//! singular orbital integral into an entire function, which is how
//! [`kos_isometry`] evaluates it.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, fabs, pow, sin, sqrt};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::h3xform::{orbital_integral_times_sin_scaled, xi_integral, SpectralProfile, C_PLANCHEREL};
use crate::quad::{integrate_breaks, QuadratureSpec};
use crate::rootgeom::{in_omega, mat_vec, rho_sq, RootSystem, Vec2};
use crate::sbisometry::{gf_euclid, limit_radius, tube_envelope_extent};
use crate::specialfn::{phi_continued, psi_euclidean};

/// How directional derivatives are taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeScheme {
    /// Rank one: differentiate the exponentials of the Weyl sum exactly, or
    /// use a complex step for arbitrary analytic functions.
    Symbolic,
    /// Nested fourth-order central differences with the given step.
    CentralDifference4 { step: f64 },
}

/// Calibrated shift operator.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator {
    pub rs: RootSystem,
    pub c_d: f64,
    pub scheme: DerivativeScheme,
    /// Largest relative calibration residual over the probes.
    pub residual: f64,
}

/// Default step of the rank-two difference scheme.
pub const FD_STEP: f64 = 1e-2;
const CALIBRATION_TOL: f64 = 1e-6;
const CALIBRATION_PROBES: usize = 20;

fn sin_product(rs: &RootSystem, y: Vec2) -> f64 {
    rs.positive_roots().iter().map(|a| sin(rs.dot(*a, y))).product()
}

/// `∏_{α∈Σ⁺}(-D_α) g` at `y` by nested fourth-order central differences, with
/// `D_α` the derivative along `α`.
fn neg_directional_product(rs: &RootSystem, g: &dyn Fn(Vec2) -> f64, y: Vec2, h: f64) -> f64 {
    fn rec(rs: &RootSystem, g: &dyn Fn(Vec2) -> f64, y: Vec2, h: f64, k: usize) -> f64 {
        let roots = rs.positive_roots();
        if k == roots.len() {
            return g(y);
        }
        let a = roots[k];
        let at = |s: f64| rec(rs, g, [y[0] + s * a[0], y[1] + s * a[1]], h, k + 1);
        let d = (-at(2.0 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2.0 * h)) / (12.0 * h);
        -d
    }
    rec(rs, g, y, h, 0)
}

impl ShiftOperator {
    /// `D h` at `y` for an arbitrary function `h` defined near `y`.
    pub fn apply(&self, h: &dyn Fn(Vec2) -> f64, y: Vec2) -> f64 {
        let rs = &self.rs;
        let g = |p: Vec2| sin_product(rs, p) * h(p);
        let step = match self.scheme {
            DerivativeScheme::Symbolic => FD_STEP,
            DerivativeScheme::CentralDifference4 { step } => step,
        };
        self.c_d * neg_directional_product(rs, &g, y, step)
    }

    /// `D φ_ξ(e^{iY})` by the operator's own scheme.
    ///
    /// Symbolic: `∏ sin⟨α,Y⟩·φ_ξ = C_rs·A(ξ,Y)/π(ξ)` and each `-D_α` brings
    /// down `⟨wξ, α⟩` from `e^{-⟨wξ,Y⟩}`.
    pub fn apply_to_phi(&self, xi: Vec2, y: Vec2) -> Result<f64> {
        let rs = &self.rs;
        match self.scheme {
            DerivativeScheme::Symbolic => {
                let pxi = crate::rootgeom::pi_poly(rs, xi);
                let mut acc = 0.0;
                for (wx, s) in rs.weyl().orbit(xi) {
                    let factor: f64 = rs.positive_roots().iter().map(|a| rs.dot(wx, *a)).product();
                    acc += s * factor * exp(-rs.dot(wx, y));
                }
                Ok(self.c_d * rs.psi_constant() * acc / pxi)
            }
            DerivativeScheme::CentralDifference4 { .. } => {
                let failure = core::cell::Cell::new(None);
                let v = self.apply(
                    &|p| match phi_continued(rs, xi, p) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.set(Some(e));
                            0.0
                        }
                    },
                    y,
                );
                match failure.into_inner() {
                    Some(e) => Err(e),
                    None => Ok(v),
                }
            }
        }
    }
}

fn probe_points(rs: &RootSystem, n: usize, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let bound = crate::rootgeom::r_max(rs);
    while out.len() < n {
        let y = [rng.gen_range(-bound..bound), if rs.rank() == 2 { rng.gen_range(-bound..bound) } else { 0.0 }];
        // stay inside Ω and off the walls
        if in_omega(rs, y, 0.9) && rs.positive_roots().iter().all(|a| fabs(rs.dot(*a, y)) > 0.05) {
            out.push(y);
        }
    }
    out
}

/// Fix `C_D` so that `D φ_{ξ₀} = ψ_{ξ₀}` at fixed probe points (`ξ₀ = 1.5·e₁`
/// rotated off the walls in rank two).
pub fn calibrate_d(rs: &RootSystem, _t: f64) -> Result<ShiftOperator> {
    calibrate_d_at(rs, 1.5)
}

/// Calibration at spectral magnitude `xi0`.
pub fn calibrate_d_at(rs: &RootSystem, xi0: f64) -> Result<ShiftOperator> {
    let scheme = if rs.rank() == 1 {
        DerivativeScheme::Symbolic
    } else {
        DerivativeScheme::CentralDifference4 { step: FD_STEP }
    };
    let dir = if rs.rank() == 1 { [1.0, 0.0] } else { [libm::cos(0.3), libm::sin(0.3)] };
    let xi = [xi0 * dir[0], xi0 * dir[1]];
    let mut op = ShiftOperator { rs: rs.clone(), c_d: 1.0, scheme, residual: 0.0 };
    let probes = probe_points(rs, CALIBRATION_PROBES, 0xd0);
    let mut raw = Vec::with_capacity(probes.len());
    let mut target = Vec::with_capacity(probes.len());
    for y in &probes {
        raw.push(op.apply_to_phi(xi, *y)?);
        target.push(psi_euclidean(rs, rs.weyl(), xi, *y));
    }
    // least-squares scalar fit
    let num: f64 = raw.iter().zip(&target).map(|(a, b)| a * b).sum();
    let den: f64 = raw.iter().map(|a| a * a).sum();
    let c = num / den;
    let residual = raw
        .iter()
        .zip(&target)
        .map(|(a, b)| fabs(c * a - b) / fabs(*b))
        .fold(0.0, f64::max);
    if !(residual <= CALIBRATION_TOL) {
        return Err(Error::CalibrationFailure { residual });
    }
    op.c_d = c;
    op.residual = residual;
    Ok(op)
}

/// Left side of the Gaussian derivative identity,
/// `∏_{α∈Σ⁺} D_α e^{-|Y|²/4t}`: complex step in rank one, fourth-order
/// differences in rank two.
pub fn gaussian_derivative_lhs(rs: &RootSystem, t: f64, y: Vec2) -> f64 {
    if rs.rank() == 1 {
        let a = rs.positive_roots()[0][0];
        let h = 1e-20;
        let z = Complex64::new(y[0], h * a);
        let g = (-z * z / (4.0 * t)).exp();
        g.im / h
    } else {
        let g = |p: Vec2| exp(-rs.dot(p, p) / (4.0 * t));
        let sign = if rs.positive_roots().len() & 1 == 0 { 1.0 } else { -1.0 };
        sign * neg_directional_product(rs, &g, y, FD_STEP)
    }
}

/// `(∏_{α∈Σ⁺} -⟨α,Y⟩/2t)·e^{-|Y|²/4t}`.
pub fn gaussian_derivative_rhs(rs: &RootSystem, t: f64, y: Vec2) -> f64 {
    let f: f64 = rs.positive_roots().iter().map(|a| -rs.dot(*a, y) / (2.0 * t)).product();
    f * exp(-rs.dot(y, y) / (4.0 * t))
}

/// Largest relative deviation between the two sides over 100 fixed probe
/// points in the box `|y_i| ≤ 3√t`. Deviations are measured against
/// `max(|rhs|, 1e-6·sup|rhs|)` so that zeros of the right side on the walls
/// do not dominate.
pub fn gaussian_derivative_identity_check(rs: &RootSystem, t: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a55);
    let b = 3.0 * sqrt(t);
    let pts: Vec<Vec2> = (0..100)
        .map(|_| [rng.gen_range(-b..b), if rs.rank() == 2 { rng.gen_range(-b..b) } else { 0.0 }])
        .collect();
    let pairs: Vec<(f64, f64)> =
        pts.iter().map(|y| (gaussian_derivative_lhs(rs, t, *y), gaussian_derivative_rhs(rs, t, *y))).collect();
    let sup = pairs.iter().map(|p| fabs(p.1)).fold(0.0, f64::max);
    pairs
        .iter()
        .map(|(l, r)| fabs(l - r) / fabs(*r).max(1e-6 * sup))
        .fold(0.0, f64::max)
}

/// `max |LHS(wY) - det(w)·LHS(Y)|` over the Weyl group at `y`.
pub fn gaussian_derivative_alternation(rs: &RootSystem, t: f64, y: Vec2) -> f64 {
    let base = gaussian_derivative_lhs(rs, t, y);
    rs.weyl()
        .elements()
        .iter()
        .zip(rs.weyl().signs())
        .map(|(m, s)| fabs(gaussian_derivative_lhs(rs, t, mat_vec(m, y)) - s * base))
        .fold(0.0, f64::max)
}

fn require_h3(rs: &RootSystem) -> Result<()> {
    if rs.rank() != 1 || rs.positive_roots().len() != 1 || fabs(rho_sq(rs) - 1.0) > 1e-12 {
        return Err(Error::InvalidInput("the spectral profiles are defined on H³ only"));
    }
    Ok(())
}

/// `e^{t}/(|W|(4πt)^{1/2})·∫_ℝ D(O_{|F|²}(iy))·e^{-y²/4t} dy` on H³, with
/// `D` applied under the Gutzmer integral (`D φ_ξ = ψ_ξ = 2cosh(ξy)`) and
/// the `y` integral done by quadrature.
pub fn kos_isometry(p: &SpectralProfile, t: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    if p.is_zero() {
        return Ok(0.0);
    }
    let rs = RootSystem::h3();
    let op = calibrate_d(&rs, t)?;
    let w = rs.weyl().len() as f64;
    let inner_quad = quad.tightened(0.1);
    let end = tube_envelope_extent(p, t, quad);
    let pts: Vec<f64> = (0..=16).map(|k| end * k as f64 / 16.0).collect();
    let mut failure = None;
    let integral = integrate_breaks(
        |y| {
            // D(O)(y)·e^{-y²/4t}, exponents combined to stay finite
            let r = xi_integral(
                |x| {
                    let v = p.value(x);
                    let dphi = op.apply_to_phi([x, 0.0], [y, 0.0]).unwrap_or(f64::NAN);
                    let ln_scale = -t * (x * x + 1.0) - y * y / (4.0 * t);
                    let g = if dphi != 0.0 && dphi.is_finite() && fabs(x * y) < 600.0 {
                        dphi * exp(ln_scale)
                    } else {
                        // ψ dominated by e^{|ξy|}
                        exp(fabs(x * y) + ln_scale)
                    };
                    v * v * g * x * x
                },
                p,
                p.heat() + t,
                y,
                &inner_quad,
            );
            match r {
                Ok(s) => C_PLANCHEREL * s.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &pts,
        quad,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    // even integrand: ∫_ℝ = 2∫_0^∞
    Ok(exp(t * rho_sq(&rs)) / (w * sqrt(4.0 * PI * t)) * 2.0 * integral.value)
}

/// `d/dy ln e^{-y²/4t}` by a complex step, so that `D_α e^{-y²/4t}` can be
/// formed as this factor times a Gaussian folded into another exponent.
fn gaussian_log_derivative(t: f64, y: f64) -> f64 {
    let h = 1e-20;
    let z = Complex64::new(y, h);
    (-z * z / (4.0 * t)).im / h
}

/// The two finished formulas linked by the formal integration by parts:
///
/// * `e^{t}/(4πt)^{1/2}·C_D·∫₀^∞ [sin y·O_{|F|²}(iy)]·(D_α e^{-y²/4t}) dy`,
///   the shift-operator side with `D^*` moved onto the Gaussian;
/// * `G_F` by the Euclidean route at [`limit_radius`].
pub fn integration_by_parts_check(p: &SpectralProfile, t: f64, quad: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("heat time t must be positive"));
    }
    let rs = RootSystem::h3();
    require_h3(&rs)?;
    let tube = gf_euclid(p, t, limit_radius(p, t, quad), quad)?;
    if p.is_zero() {
        return Ok((0.0, tube));
    }
    let op = calibrate_d(&rs, t)?;
    let inner_quad = quad.tightened(0.1);
    let end = tube_envelope_extent(p, t, quad);
    let pts: Vec<f64> = (0..=16).map(|k| end * k as f64 / 16.0).collect();
    let mut failure = None;
    let integral = integrate_breaks(
        |y| match orbital_integral_times_sin_scaled(p, t, y, -y * y / (4.0 * t), &inner_quad) {
            Ok(s) => s * gaussian_log_derivative(t, y),
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
    // Weyl reduction to the positive chamber cancels |W|.
    let value = exp(t * rho_sq(&rs)) / pow(4.0 * PI * t, 0.5) * op.c_d * integral.value;
    Ok((value, tube))
}
