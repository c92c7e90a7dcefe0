//! Continued spherical functions, heat kernels and Gaussian ball integrals.
//!
//! The central object is the entire function
//! `Ψ_ξ(Y) = C_rs·A(ξ,Y)/(π(ξ)π(Y))` with `A(ξ,Y) = Σ_w det(w) e^{-⟨wξ,Y⟩}`.
//! Its quotient form loses every digit on a Weyl wall, so near walls it is
//! evaluated as a Cauchy mean over a complex torus around `(ξ, Y)`, which is
//! exact for entire functions up to the trapezoid aliasing error.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{erf, erfc, exp, expm1, fabs, pow, sqrt};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{gamma_p, poisson_pmf, sinhc, CompensatedSum};
use crate::quad::{composite_nodes, integrate, QuadratureSpec};
use crate::rootgeom::{jc_half, jnc_half, pi_poly, rho_sq, RootSystem, Vec2, WeylGroup};

/// Heat time `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatParams {
    t: f64,
}

impl HeatParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput("heat time t must be positive and finite"));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Variance `2t` of the Gaussian `e^{-|y|²/4t}`.
    pub fn variance(&self) -> f64 {
        2.0 * self.t
    }
}

/// Numerical policy for the `A/(π·π)` quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalEvalConfig {
    /// Below this value of `|π(ξ)π(Y)|` the quotient is replaced by the
    /// torus mean.
    pub cancellation_threshold: f64,
    /// The torus mean uses `2·series_terms` nodes per circle.
    pub series_terms: usize,
}

impl Default for SphericalEvalConfig {
    fn default() -> Self {
        Self { cancellation_threshold: 1e-3, series_terms: 12 }
    }
}

impl SphericalEvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cancellation_threshold > 0.0) {
            return Err(Error::InvalidInput("cancellation_threshold must be positive"));
        }
        if self.series_terms < 4 {
            return Err(Error::InvalidInput("series_terms must be at least 4"));
        }
        Ok(())
    }
}

/// `A(ξ, Y) = Σ_w det(w)·e^{-⟨wξ, Y⟩}`.
pub fn weyl_sum_a(rs: &RootSystem, w: &WeylGroup, xi: Vec2, y: Vec2) -> f64 {
    let mut acc = CompensatedSum::new();
    for (wx, s) in w.orbit(xi) {
        acc.add(s * exp(-rs.dot(wx, y)));
    }
    acc.value()
}

/// `ψ_ξ(iY) = Σ_w e^{-⟨wξ, Y⟩}`, the flat counterpart with value `|W|` at 0.
pub fn psi_euclidean(rs: &RootSystem, w: &WeylGroup, xi: Vec2, y: Vec2) -> f64 {
    let mut acc = CompensatedSum::new();
    for (wx, _) in w.orbit(xi) {
        acc.add(exp(-rs.dot(wx, y)));
    }
    acc.value()
}

/// `C_rs` from the leading Taylor term of `A`: with `N = |Σ⁺|`,
/// `A(ξ,Y) = (-1)^N/N!·Σ_w det(w)⟨wξ,Y⟩^N + O(|Y|^{N+1})` and the alternating
/// sum equals `c·π(ξ)π(Y)`, so `C_rs = 1/c` forces `Ψ_ξ(0) = 1`.
pub(crate) fn normalization_constant(rs: &RootSystem) -> Result<f64> {
    let n = rs.positive_roots().len() as i32;
    let probes: [(Vec2, Vec2); 3] = [
        ([1.0, 0.37], [0.61, 1.13]),
        ([0.83, -0.29], [1.7, 0.41]),
        ([2.1, 1.3], [-0.77, 0.52]),
    ];
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let mut values = [0.0; 3];
    for (slot, (xi, v)) in values.iter_mut().zip(probes.iter()) {
        let mut acc = CompensatedSum::new();
        for (wx, s) in rs.weyl().orbit(*xi) {
            acc.add(s * pow(rs.dot(wx, *v), n as f64));
        }
        *slot = sign / fact * acc.value() / (pi_poly(rs, *xi) * pi_poly(rs, *v));
    }
    let c = values[0];
    if !c.is_finite() || fabs(c) < 1e-12 || values.iter().any(|v| fabs(v - c) > 1e-9 * fabs(c)) {
        return Err(Error::InvalidRootSystem("Weyl sum does not reduce to a multiple of π(ξ)π(Y)"));
    }
    Ok(1.0 / c)
}

/// Entire spherical function `Ψ_ξ(Y) = φ_ξ(e^{iY})·j^c(Y)^{1/2}`, normalised
/// by `Ψ_ξ(0) = 1`.
pub fn psi_entire(rs: &RootSystem, xi: Vec2, y: Vec2) -> f64 {
    psi_entire_with(rs, xi, y, &SphericalEvalConfig::default())
}

pub fn psi_entire_with(rs: &RootSystem, xi: Vec2, y: Vec2, cfg: &SphericalEvalConfig) -> f64 {
    if rs.is_orthogonal() {
        return rs
            .positive_roots()
            .iter()
            .map(|a| sinhc(rs.dot(xi, *a) * rs.dot(*a, y) / rs.dot(*a, *a)))
            .product();
    }
    let denom = pi_poly(rs, xi) * pi_poly(rs, y);
    if fabs(denom) >= cfg.cancellation_threshold {
        return rs.psi_constant() * weyl_sum_a(rs, rs.weyl(), xi, y) / denom;
    }
    torus_mean(rs, xi, y, cfg)
}

fn cdot(rs: &RootSystem, a: [Complex64; 2], b: [Complex64; 2]) -> Complex64 {
    if rs.rank() == 1 {
        a[0] * b[0]
    } else {
        a[0] * b[0] + a[1] * b[1]
    }
}

fn psi_quotient_complex(rs: &RootSystem, xi: [Complex64; 2], y: [Complex64; 2]) -> Complex64 {
    let mut a = Complex64::new(0.0, 0.0);
    for (m, &s) in rs.weyl().elements().iter().zip(rs.weyl().signs()) {
        let wx = [m[0][0] * xi[0] + m[0][1] * xi[1], m[1][0] * xi[0] + m[1][1] * xi[1]];
        a += s * (-cdot(rs, wx, y)).exp();
    }
    let mut p = Complex64::new(1.0, 0.0);
    for r in rs.positive_roots() {
        let rc = [Complex64::new(r[0], 0.0), Complex64::new(r[1], 0.0)];
        p *= cdot(rs, rc, xi) * cdot(rs, rc, y);
    }
    rs.psi_constant() * a / p
}

// Direction with the largest smallest root pairing, so every factor of π
// moves linearly along the complex line.
fn torus_direction(rs: &RootSystem) -> Vec2 {
    let mut best = ([1.0, 0.0], 0.0);
    for k in 0..24 {
        let th = PI * (k as f64 + 0.5) / 24.0;
        let u = [libm::cos(th), libm::sin(th)];
        let m = rs
            .positive_roots()
            .iter()
            .map(|a| fabs(rs.dot(*a, u)))
            .fold(f64::INFINITY, f64::min);
        if m > best.1 {
            best = (u, m);
        }
    }
    best.0
}

// Radius of the circle `p + ρ e^{iθ} u` that stays furthest from the zeros
// of `π` on that complex line.
fn torus_radius(rs: &RootSystem, p: Vec2, u: Vec2, base: f64) -> f64 {
    let mut best = (base, -1.0);
    for k in 0..9 {
        let rho = base * (1.0 + 0.125 * k as f64);
        let clearance = rs
            .positive_roots()
            .iter()
            .map(|a| {
                let au = rs.dot(*a, u);
                let zero = -rs.dot(*a, p) / au;
                fabs(rho - fabs(zero)) * fabs(au)
            })
            .fold(f64::INFINITY, f64::min);
        if clearance > best.1 {
            best = (rho, clearance);
        }
    }
    best.0
}

fn torus_mean(rs: &RootSystem, xi: Vec2, y: Vec2, cfg: &SphericalEvalConfig) -> f64 {
    let u = torus_direction(rs);
    let r_y = torus_radius(rs, y, u, 0.5 / rs.norm(xi).max(1.0));
    let r_x = torus_radius(rs, xi, u, 0.5 / rs.norm(y).max(1.0));
    let m = 2 * cfg.series_terms;
    let circle = |p: Vec2, r: f64| -> Vec<[Complex64; 2]> {
        (0..m)
            .map(|k| {
                let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / m as f64);
                [Complex64::new(p[0], 0.0) + z * u[0], Complex64::new(p[1], 0.0) + z * u[1]]
            })
            .collect()
    };
    let xs = circle(xi, r_x);
    let ys = circle(y, r_y);
    let mut acc = CompensatedSum::new();
    for x in &xs {
        for yy in &ys {
            acc.add(psi_quotient_complex(rs, *x, *yy).re);
        }
    }
    acc.value() / (m * m) as f64
}

/// Continued spherical function `φ_ξ(e^{iY}) = Ψ_ξ(Y)/j^c(Y)^{1/2}`.
pub fn phi_continued(rs: &RootSystem, xi: Vec2, y: Vec2) -> Result<f64> {
    let j = jc_half(rs, y);
    if fabs(j) < 1e-14 {
        return Err(Error::SingularPoint { jc_half: j });
    }
    Ok(psi_entire(rs, xi, y) / j)
}

/// Flat heat kernel `e^{-r²/4t}/(4πt)^{d/2}` at `|Y| = r`.
pub fn heat_gaussian(d: usize, t: f64, r: f64) -> f64 {
    exp(-r * r / (4.0 * t)) / pow(4.0 * PI * t, 0.5 * d as f64)
}

/// `ν^c_{t2}(Y) = e^{t2|ρ|²/2}·j^c(Y)^{-1/2}·e^{-|Y|²/2t2}/(2πt2)^{d/2}`.
pub fn nu_c_unwrapped(rs: &RootSystem, t2: f64, y: Vec2) -> f64 {
    let d = rs.dimension() as f64;
    let r2 = rs.dot(y, y);
    exp(0.5 * t2 * rho_sq(rs) - r2 / (2.0 * t2)) / jc_half(rs, y) / pow(2.0 * PI * t2, 0.5 * d)
}

/// `α(Y) = ν^c_{2t}(Y)·j^c(Y) = e^{t|ρ|²}·j^c(Y)^{1/2}·e^{-|Y|²/4t}/(4πt)^{d/2}`.
pub fn alpha_density(rs: &RootSystem, t: f64, y: Vec2) -> f64 {
    exp(t * rho_sq(rs)) * jc_half(rs, y) * heat_gaussian(rs.dimension(), t, rs.norm(y))
}

/// `ν^{nc}_t(Y) = e^{-t|ρ|²/2}·j^{nc}(Y)^{-1/2}·e^{-|Y|²/2t}/(2πt)^{d/2}`.
pub fn nu_nc(rs: &RootSystem, t: f64, y: Vec2) -> f64 {
    let d = rs.dimension() as f64;
    let r2 = rs.dot(y, y);
    exp(-0.5 * t * rho_sq(rs) - r2 / (2.0 * t)) / jnc_half(rs, y) / pow(2.0 * PI * t, 0.5 * d)
}

/// `e^{-ts²}·I(d,t,s,b)`, i.e. the probability that a Gaussian vector with
/// mean `2ts·e₁` and covariance `2t·Id` lies in the ball of radius `b`.
///
/// Closed forms for `d = 1, 3`; Poisson mixture of regularised incomplete
/// gamma functions otherwise.
pub fn gaussian_ball_scaled(d: usize, t: f64, s: f64, b: f64) -> f64 {
    if b <= 0.0 {
        return 0.0;
    }
    let m = 2.0 * t * fabs(s);
    let sigma = sqrt(2.0 * t);
    let k = sigma * core::f64::consts::SQRT_2;
    let erf_pair = |lo: f64, hi: f64| -> f64 {
        // ½[erf(lo) + erf(hi)] with hi ≥ |lo|, keeping digits when lo < 0.
        if lo >= 0.0 {
            0.5 * (erf(lo) + erf(hi))
        } else {
            0.5 * (erfc(-lo) - erfc(hi))
        }
    };
    match d {
        1 => erf_pair((b - m) / k, (b + m) / k).clamp(0.0, 1.0),
        3 => {
            let z = b / sigma;
            let p = if m == 0.0 {
                erf(z / core::f64::consts::SQRT_2) - sqrt(2.0 / PI) * z * exp(-0.5 * z * z)
            } else {
                let g = b - m;
                erf_pair(g / k, (b + m) / k)
                    - sigma / (m * sqrt(2.0 * PI))
                        * exp(-g * g / (2.0 * sigma * sigma))
                        * -expm1(-2.0 * b * m / (sigma * sigma))
            };
            p.clamp(0.0, 1.0)
        }
        _ => {
            let lambda = t * s * s;
            let x = b * b / (4.0 * t);
            let kmax = (lambda + 12.0 * sqrt(lambda) + 40.0) as u64;
            let mut acc = CompensatedSum::new();
            for k in 0..=kmax {
                let w = poisson_pmf(lambda, k);
                if w > 0.0 {
                    acc.add(w * gamma_p(k as f64 + 0.5 * d as f64, x));
                }
            }
            acc.value().clamp(0.0, 1.0)
        }
    }
}

/// `I(d,t,s,b) = ∫_{|y|≤b} e^{s y₁}·e^{-|y|²/4t}/(4πt)^{d/2} dy`.
pub fn gaussian_ball_i(d: usize, t: f64, s: f64, b: f64) -> f64 {
    exp(t * s * s) * gaussian_ball_scaled(d, t, s, b)
}

/// `β_R(λ) = e^{-tλ}e^{t|ρ|²}·I(d, t, √(λ-|ρ|²), 2R)`.
pub fn beta_r(rs: &RootSystem, t: f64, lambda: f64, r: f64) -> Result<f64> {
    let rho2 = rho_sq(rs);
    if lambda < rho2 {
        return Err(Error::DomainError { what: "spectral parameter λ", value: lambda, limit: rho2 });
    }
    // The exponentials cancel exactly against the completed square.
    Ok(gaussian_ball_scaled(rs.dimension(), t, sqrt(lambda - rho2), 2.0 * r))
}

/// `∫_{S^{d-1}} (u·e₁)^n du` for the normalised surface measure.
pub fn sphere_moment(d: usize, n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let mut m = 1.0;
    let mut k = 0;
    while k < n {
        m *= (k as f64 + 1.0) / (k as f64 + d as f64);
        k += 2;
    }
    m
}

const EIGEN_PROBES: usize = 10;
const EIGEN_STEP: f64 = 1e-3;
const EIGEN_TOL: f64 = 1e-5;

/// Unnormalised sphere integral `∫_{S^{d-1}} g(r·u) du` for `d ∈ {1, 2, 3}`.
fn sphere_integral(d: usize, r: f64, g: &dyn Fn(&[f64]) -> f64) -> f64 {
    const AZIMUTH: usize = 48;
    match d {
        1 => g(&[r]) + g(&[-r]),
        2 => {
            let mut acc = CompensatedSum::new();
            for k in 0..AZIMUTH {
                let th = 2.0 * PI * k as f64 / AZIMUTH as f64;
                acc.add(g(&[r * libm::cos(th), r * libm::sin(th)]));
            }
            acc.value() * 2.0 * PI / AZIMUTH as f64
        }
        _ => {
            let mut acc = CompensatedSum::new();
            for (c, w) in composite_nodes(-1.0, 1.0, 4) {
                let s = sqrt((1.0 - c * c).max(0.0));
                for k in 0..AZIMUTH {
                    let ph = 2.0 * PI * k as f64 / AZIMUTH as f64;
                    acc.add(w * g(&[r * c, r * s * libm::cos(ph), r * s * libm::sin(ph)]));
                }
            }
            acc.value() * 2.0 * PI / AZIMUTH as f64
        }
    }
}

/// Both sides of the radialisation identity
/// `∫_{|Y|≤2R} Ψ(Y)β(|Y|)dY = Ψ(0)·∫_{|Y|≤2R} e^{√σ y₁}β(|Y|)dY`
/// for a Laplacian eigenfunction `ΔΨ = σΨ` on `ℝ^d`, `d ∈ {1, 2, 3}`.
///
/// The eigenfunction property is checked first by central differences at
/// fixed pseudo-random points of the ball.
pub fn euclid_radialization_check(
    d: usize,
    sigma: f64,
    psi: &dyn Fn(&[f64]) -> f64,
    beta_radial: &dyn Fn(f64) -> f64,
    r: f64,
    quad: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if !(1..=3).contains(&d) {
        return Err(Error::InvalidInput("radialisation check supports d = 1, 2, 3"));
    }
    if !(r > 0.0) || sigma < 0.0 {
        return Err(Error::InvalidInput("radius must be positive and σ nonnegative"));
    }
    let residual = eigen_residual(d, sigma, psi, 2.0 * r);
    if !(residual <= EIGEN_TOL) {
        return Err(Error::NotAnEigenfunction { residual });
    }
    let radial_power = |x: f64| pow(x, (d - 1) as f64);
    let lhs = integrate(
        |x| beta_radial(x) * radial_power(x) * sphere_integral(d, x, psi),
        0.0,
        2.0 * r,
        quad,
    )?
    .value;
    let k = sqrt(sigma);
    let plane = move |y: &[f64]| exp(k * y[0]);
    let origin = [0.0; 3];
    let rhs = psi(&origin[..d])
        * integrate(
            |x| beta_radial(x) * radial_power(x) * sphere_integral(d, x, &plane),
            0.0,
            2.0 * r,
            quad,
        )?
        .value;
    Ok((lhs, rhs))
}

fn eigen_residual(d: usize, sigma: f64, psi: &dyn Fn(&[f64]) -> f64, radius: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b7e);
    let mut worst: f64 = 0.0;
    let mut found = 0;
    while found < EIGEN_PROBES {
        let mut y = [0.0; 3];
        for c in y.iter_mut().take(d) {
            *c = rng.gen_range(-radius..radius);
        }
        if y.iter().map(|c| c * c).sum::<f64>() > radius * radius {
            continue;
        }
        found += 1;
        let p0 = psi(&y[..d]);
        let mut lap = 0.0;
        for i in 0..d {
            let mut yp = y;
            let mut ym = y;
            yp[i] += EIGEN_STEP;
            ym[i] -= EIGEN_STEP;
            lap += (psi(&yp[..d]) - 2.0 * p0 + psi(&ym[..d])) / (EIGEN_STEP * EIGEN_STEP);
        }
        let scale = fabs(p0) * (1.0 + sigma);
        let res = fabs(lap - sigma * p0) / scale.max(f64::MIN_POSITIVE);
        worst = worst.max(res);
    }
    // NaN propagates as failure.
    if worst.is_nan() {
        f64::INFINITY
    } else {
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootgeom::mat_vec;
    use proptest::prelude::*;

    fn h3() -> RootSystem {
        RootSystem::h3()
    }

    #[test]
    fn weyl_sum_rank_one() {
        let rs = h3();
        let (s, y) = (1.3, 0.7);
        let a = weyl_sum_a(&rs, rs.weyl(), [s, 0.0], [y, 0.0]);
        assert!((a + 2.0 * libm::sinh(s * y)).abs() < 1e-14);
        assert_eq!(weyl_sum_a(&rs, rs.weyl(), [0.0, 0.0], [y, 0.0]), 0.0);
    }

    #[test]
    fn constants_by_preset() {
        assert!((h3().psi_constant() + 0.5).abs() < 1e-15);
        assert!((RootSystem::a1xa1().psi_constant() - 0.25).abs() < 1e-15);
        assert!(RootSystem::a2().psi_constant().is_finite());
    }

    #[test]
    fn psi_entire_examples() {
        let rs = h3();
        let v = psi_entire(&rs, [2.0, 0.0], [0.5, 0.0]);
        assert!((v - libm::sinh(1.0)).abs() < 1e-15);
        assert_eq!(psi_entire(&rs, [3.0, 0.0], [0.0, 0.0]), 1.0);
        let v = psi_entire(&rs, [1.0, 0.0], [PI, 0.0]);
        assert!((v - libm::sinh(PI) / PI).abs() < 1e-14);
        let a2 = RootSystem::a2();
        assert!((psi_entire(&a2, [1.3, -0.4], [0.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!((psi_entire(&a2, [0.0, 0.0], [0.8, 0.3]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn torus_mean_matches_quotient_off_walls() {
        let a2 = RootSystem::a2();
        let cfg = SphericalEvalConfig::default();
        for (xi, y) in [([1.2, 0.3], [0.4, 0.9]), ([2.5, -1.0], [-0.3, 0.6]), ([0.7, 0.7], [1.4, 0.2])] {
            let q = psi_entire_with(&a2, xi, y, &cfg);
            let t = torus_mean(&a2, xi, y, &cfg);
            assert!((q - t).abs() < 1e-10 * q.abs(), "{q} {t}");
        }
    }

    #[test]
    fn near_wall_continuity() {
        let a2 = RootSystem::a2();
        let cfg = SphericalEvalConfig::default();
        let xi = [1.1, 0.45];
        let h = sqrt(3.0) / 2.0;
        // Approach the wall ⟨α₃,Y⟩ = 0 along its normal.
        let on = psi_entire_with(&a2, xi, [h, -0.5], &cfg);
        let off = psi_entire_with(&a2, xi, [h + 0.06 * 0.5, -0.5 + 0.06 * h], &cfg);
        assert!(on.is_finite() && off.is_finite());
        assert!((on - off).abs() < 0.2 * on.abs());
    }

    #[test]
    fn phi_examples() {
        let rs = h3();
        let v = phi_continued(&rs, [1.0, 0.0], [PI / 2.0, 0.0]).unwrap();
        assert!((v - libm::sinh(PI / 2.0)).abs() < 1e-13);
        assert_eq!(phi_continued(&rs, [1.0, 0.0], [0.0, 0.0]).unwrap(), 1.0);
        let r = PI - 1e-3;
        let v = phi_continued(&rs, [1.0, 0.0], [r, 0.0]).unwrap();
        assert!(v > 0.9 * libm::sinh(r) / libm::sin(r));
        assert!(matches!(phi_continued(&rs, [1.0, 0.0], [PI, 0.0]), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn euclidean_psi() {
        let rs = h3();
        let v = psi_euclidean(&rs, rs.weyl(), [1.5, 0.0], [0.8, 0.0]);
        assert!((v - 2.0 * libm::cosh(1.2)).abs() < 1e-14);
        let a2 = RootSystem::a2();
        assert_eq!(psi_euclidean(&a2, a2.weyl(), [0.0, 0.0], [0.4, 1.0]), 6.0);
        assert_eq!(psi_euclidean(&a2, a2.weyl(), [0.3, 1.0], [0.0, 0.0]), 6.0);
    }

    #[test]
    fn heat_peak() {
        assert!((heat_gaussian(3, 0.5, 0.0) - pow(2.0 * PI, -1.5)).abs() < 1e-16);
    }

    #[test]
    fn ball_examples() {
        let v = gaussian_ball_i(3, 0.25, 0.0, 2.0);
        let want = erf(2.0) - 4.0 / sqrt(PI) * exp(-4.0);
        assert!((v - want).abs() < 1e-15);
        assert!((v - 0.95399).abs() < 1e-5);
        assert_eq!(gaussian_ball_i(3, 0.25, 1.0, 0.0), 0.0);
        for d in [1, 3, 6] {
            let (t, s) = (0.5, 1.7);
            let v = gaussian_ball_i(d, t, s, 40.0 * sqrt(t));
            let lim = exp(t * s * s);
            assert!((v - lim).abs() < 1e-10 * lim, "d={d}");
        }
    }

    #[test]
    fn ball_closed_forms_match_mixture() {
        // The Poisson mixture is valid for all d; compare on d = 1, 3.
        for d in [1usize, 3] {
            for &(t, s, b) in &[(0.25, 0.0, 2.0), (0.5, 1.2, 1.0), (0.5, 3.0, 0.7), (1.0, 0.4, 3.5)] {
                let lambda = t * s * s;
                let x = b * b / (4.0 * t);
                let mix: f64 = (0..200u64)
                    .map(|k| poisson_pmf(lambda, k) * gamma_p(k as f64 + 0.5 * d as f64, x))
                    .sum();
                let closed = gaussian_ball_scaled(d, t, s, b);
                assert!((mix - closed).abs() < 1e-13, "d={d} {mix} {closed}");
            }
        }
    }

    #[test]
    fn ball_d1_matches_direct_quadrature() {
        let spec = QuadratureSpec { abs_tol: 1e-15, rel_tol: 1e-13, max_panels: 4096 };
        for &(t, s, b) in &[(0.25, 0.5, 1.0), (1.0, 2.0, 3.0), (0.5, 0.0, 0.2)] {
            let direct = integrate(|y| exp(s * y) * heat_gaussian(1, t, fabs(y)), -b, b, &spec).unwrap().value;
            let closed = gaussian_ball_i(1, t, s, b);
            assert!((direct - closed).abs() < 1e-10 * closed);
        }
    }

    #[test]
    fn beta_examples() {
        let rs = h3();
        let v = beta_r(&rs, 0.25, 1.0, 1.0).unwrap();
        assert!((v - gaussian_ball_i(3, 0.25, 0.0, 2.0)).abs() < 1e-15);
        assert!((beta_r(&rs, 0.5, 7.0, 40.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(beta_r(&rs, 0.5, 3.0, 0.0).unwrap(), 0.0);
        assert!(matches!(beta_r(&rs, 0.5, 0.5, 1.0), Err(Error::DomainError { .. })));
        let a2 = RootSystem::a2();
        assert!((beta_r(&a2, 0.3, 6.0, 40.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moments() {
        assert_eq!(sphere_moment(3, 0), 1.0);
        assert_eq!(sphere_moment(3, 5), 0.0);
        assert!((sphere_moment(3, 2) - 1.0 / 3.0).abs() < 1e-16);
        // Brute-force average of u₁² over S² by the sphere rule.
        let avg = sphere_integral(3, 1.0, &|u: &[f64]| u[0] * u[0]) / (4.0 * PI);
        assert!((avg - 1.0 / 3.0).abs() < 1e-13);
        for n in (0..12).step_by(2) {
            assert!((sphere_moment(3, n) - 1.0 / (n as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn moment_series_reproduces_radial_average() {
        for &sr in &[0.1, 1.0, 3.0, 5.0] {
            let mut acc = 0.0;
            let mut fact = 1.0;
            for n in 0..80usize {
                if n > 0 {
                    fact *= n as f64;
                }
                acc += pow(sr, n as f64) * sphere_moment(3, n) / fact;
            }
            let want = libm::sinh(sr) / sr;
            assert!((acc - want).abs() < 1e-10 * want);
        }
    }

    #[test]
    fn kernel_masses() {
        let spec = QuadratureSpec { abs_tol: 1e-14, rel_tol: 1e-13, max_panels: 4096 };
        let rs = h3();
        let t = 0.5;
        let mass_c = integrate(
            |r| 4.0 * PI * r * r * nu_c_unwrapped(&rs, 2.0 * t, [r, 0.0]) * jc_half(&rs, [r, 0.0]).powi(2),
            0.0,
            60.0 * sqrt(t),
            &spec,
        )
        .unwrap()
        .value;
        assert!((mass_c - 1.0).abs() < 1e-10, "{mass_c}");
        let t = 0.7;
        let mass_nc = integrate(
            |r| 4.0 * PI * r * r * nu_nc(&rs, t, [r, 0.0]) * jnc_half(&rs, [r, 0.0]).powi(2),
            0.0,
            60.0 * sqrt(t),
            &spec,
        )
        .unwrap()
        .value;
        assert!((mass_nc - 1.0).abs() < 1e-10, "{mass_nc}");
    }

    #[test]
    fn radialisation_examples() {
        let rs = h3();
        let spec = QuadratureSpec::default();
        let t = 0.25;
        let beta = move |r: f64| heat_gaussian(3, t, r);
        let psi = |y: &[f64]| {
            let r = sqrt(y.iter().map(|c| c * c).sum::<f64>());
            psi_entire(&rs, [2.0, 0.0], [r, 0.0])
        };
        let (l, r) = euclid_radialization_check(3, 4.0, &psi, &beta, 1.0, &spec).unwrap();
        assert!((l - r).abs() < 1e-8 * r);
        let one = |_: &[f64]| 1.0;
        let (l, r) = euclid_radialization_check(3, 0.0, &one, &beta, 1.0, &spec).unwrap();
        assert!((l - gaussian_ball_i(3, t, 0.0, 2.0)).abs() < 1e-9 && (r - l).abs() < 1e-12);
        let plane = |y: &[f64]| exp(2.0 * y[0]);
        let (l, r) = euclid_radialization_check(3, 4.0, &plane, &beta, 1.0, &spec).unwrap();
        assert!((l - r).abs() < 1e-12 * r);
        let bad = |y: &[f64]| y[0] * y[0];
        assert!(matches!(
            euclid_radialization_check(3, 4.0, &bad, &beta, 1.0, &spec),
            Err(Error::NotAnEigenfunction { .. })
        ));
    }

    fn radial_laplacian_residual(rs: &RootSystem, xi: Vec2, y: Vec2) -> f64 {
        // Δ_𝔭 restricted to K-invariant functions is π⁻¹∘Δ_𝔞∘π.
        let h = 1e-3;
        let f = |p: Vec2| pi_poly(rs, p) * psi_entire(rs, xi, p);
        let mut lap = 0.0;
        for i in 0..rs.rank() {
            let mut p = y;
            let mut m = y;
            p[i] += h;
            m[i] -= h;
            lap += (f(p) - 2.0 * f(y) + f(m)) / (h * h);
        }
        let lhs = lap / pi_poly(rs, y);
        let rhs = rs.dot(xi, xi) * psi_entire(rs, xi, y);
        fabs(lhs - rhs) / fabs(rhs)
    }

    proptest! {
        #[test]
        fn psi_is_laplace_eigenfunction(x0 in 0.3f64..3.0, x1 in -2.0f64..2.0, y0 in 0.2f64..1.5, y1 in 0.2f64..1.5) {
            for rs in [RootSystem::a2(), RootSystem::a1xa1()] {
                let y = [y0, y1];
                // keep clear of walls where the π division amplifies stencil noise
                let clear = rs.positive_roots().iter().all(|a| fabs(rs.dot(*a, y)) > 0.05);
                if clear {
                    prop_assert!(radial_laplacian_residual(&rs, [x0, x1], y) < 1e-4);
                }
            }
        }

        #[test]
        fn psi_matches_phi_times_jc(xi in 0.0f64..6.0, r in 0.0f64..3.1) {
            let rs = h3();
            let phi = phi_continued(&rs, [xi, 0.0], [r, 0.0]).unwrap();
            let psi = psi_entire(&rs, [xi, 0.0], [r, 0.0]);
            prop_assert!((psi - phi * jc_half(&rs, [r, 0.0])).abs() <= 1e-10 * psi.abs());
        }

        #[test]
        fn weyl_sum_symmetries(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0, idx in 0usize..6) {
            let rs = RootSystem::a2();
            let w = rs.weyl();
            let (xi, y) = ([a, b], [c, d]);
            let s = weyl_sum_a(&rs, w, xi, y);
            prop_assert!((s - weyl_sum_a(&rs, w, y, xi)).abs() <= 1e-10 * (1.0 + s.abs()));
            let wx = mat_vec(&w.elements()[idx], xi);
            prop_assert!((weyl_sum_a(&rs, w, wx, y) - w.signs()[idx] * s).abs() <= 1e-10 * (1.0 + s.abs()));
            let p = psi_entire(&rs, xi, y);
            prop_assert!((p - psi_entire(&rs, y, xi)).abs() <= 1e-10 * (1.0 + p.abs()));
            prop_assert!((psi_entire(&rs, wx, y) - p).abs() <= 1e-9 * (1.0 + p.abs()));
            let wy = mat_vec(&w.elements()[idx], y);
            prop_assert!((psi_entire(&rs, xi, wy) - p).abs() <= 1e-9 * (1.0 + p.abs()));
        }

        #[test]
        fn ball_monotone_and_bounded(s in 0.0f64..5.0, t in 0.1f64..2.0, b in 0.0f64..8.0, db in 0.0f64..1.0) {
            for d in [1usize, 3, 6] {
                let p1 = gaussian_ball_scaled(d, t, s, b);
                let p2 = gaussian_ball_scaled(d, t, s, b + db);
                prop_assert!(p2 + 1e-14 >= p1);
                prop_assert!((0.0..=1.0).contains(&p1));
            }
        }
    }
}
