//! Fixed end-to-end checks with their pass thresholds, shared by the
//! acceptance test target and the command-line `selftest` runner.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{exp, fabs, pow, sqrt};

use crate::error::{Error, Result};
use crate::euclid::{inversion_check_1d, isometry_check_1d, sample_default, test_functions, BaselineConfig};
use crate::h3xform::{heat_apply, plancherel_norm_sq, spherical_inverse, SpectralProfile};
use crate::kosbridge::{gaussian_derivative_identity_check, integration_by_parts_check, kos_isometry};
use crate::quad::{integrate, QuadratureSpec};
use crate::rootgeom::{jc_half, jnc_half, RootSystem};
use crate::sbisometry::{
    gf_beta, gf_direct, gf_euclid, gf_geometric, gf_series_expansion, inversion_at_base, no_invariant_density_demo,
    shell_sample, surjectivity_reconstruct, truncated_alpha, InversionRoute, SERIES_MAX_TERMS,
};
use crate::specialfn::{euclid_radialization_check, heat_gaussian, nu_c_unwrapped, nu_nc, psi_entire};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub passed: bool,
    pub detail: String,
}

/// A named check.
pub struct Criterion {
    pub name: &'static str,
    pub run: fn() -> Result<CheckResult>,
}

impl Criterion {
    /// Runs the check; numerical errors count as failures.
    pub fn evaluate(&self) -> CheckResult {
        match (self.run)() {
            Ok(r) => r,
            Err(e) => CheckResult { passed: false, detail: format!("error: {e}") },
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    fabs(a - b) / fabs(b)
}

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn heat(s: f64) -> SpectralProfile {
    SpectralProfile::heat_kernel(s).expect("positive heat time")
}

fn outcome(passed: bool, detail: String) -> Result<CheckResult> {
    Ok(CheckResult { passed, detail })
}

fn global_isometry() -> Result<CheckResult> {
    let t = 0.5;
    let end = 6.0 * sqrt(t) + PI;
    let heat_norm = exp(-0.3) / pow(1.2 * PI, 1.5);
    let band_norm = (8.0 / 3.0) / (2.0 * PI * PI);
    let e1 = rel(gf_euclid(&heat(0.3), t, end, &q())?, heat_norm);
    let e2 = rel(gf_euclid(&SpectralProfile::band(2.0)?, t, end, &q())?, band_norm);
    outcome(e1 <= 1e-6 && e2 <= 1e-6, format!("heat rel {e1:.2e} (norm {heat_norm:.7}), band rel {e2:.2e}"))
}

fn analytic_continuation() -> Result<CheckResult> {
    let p = heat(0.3);
    let t = 0.5;
    let mut geo = 0.0f64;
    for r in [0.5, PI / 2.0, 2.5] {
        geo = geo.max(rel(gf_geometric(&p, t, r, &q())?, gf_euclid(&p, t, r, &q())?));
    }
    let mut dir = 0.0f64;
    for r in [0.25, 0.5, 1.0, 1.4] {
        dir = dir.max(rel(gf_direct(&p, t, r, &q())?, gf_euclid(&p, t, r, &q())?));
    }
    let r = PI / 2.0 - 0.02;
    let edge = rel(gf_direct(&p, t, r, &q())?, gf_euclid(&p, t, r, &q())?);
    outcome(
        geo <= 1e-7 && dir <= 1e-5 && edge <= 1e-4,
        format!("geometric rel {geo:.2e}, direct rel {dir:.2e}, direct at π/2-0.02 rel {edge:.2e}"),
    )
}

fn blow_up_witness() -> Result<CheckResult> {
    let p = heat(0.3);
    let t = 0.5;
    let mid = shell_sample(&p, t, PI / 2.0, &q())?;
    let near = shell_sample(&p, t, PI - 1e-3, &q())?;
    let limit = shell_sample(&p, t, PI, &q())?.times_sin;
    let growth = near.raw.unwrap_or(f64::NAN) / mid.raw.unwrap_or(f64::NAN);
    let settle = rel(near.times_sin, limit);
    outcome(growth >= 1e3 && settle <= 1e-2, format!("raw growth {growth:.3e}, shell×sin vs limit rel {settle:.2e}"))
}

fn partial_isometry() -> Result<CheckResult> {
    let p = heat(0.3);
    let t = 0.5;
    let mut beta = 0.0f64;
    for r in [0.25, 0.75, 1.25, PI / 2.0, 2.0, 2.75] {
        beta = beta.max(rel(gf_beta(&p, t, r, &q())?, gf_euclid(&p, t, r, &q())?));
    }
    let mut series = 0.0f64;
    let mut nonneg = true;
    for r in [0.25, 0.5, 0.8, 1.0] {
        let s = gf_series_expansion(&p, t, r, &q(), SERIES_MAX_TERMS)?;
        nonneg &= s.terms.iter().all(|v| *v >= 0.0);
        series = series.max(rel(s.value, gf_euclid(&p, t, r, &q())?));
    }
    outcome(
        beta <= 1e-12 && series <= 1e-7 && nonneg,
        format!("beta rel {beta:.2e}, series rel {series:.2e}, coefficients nonnegative: {nonneg}"),
    )
}

fn inversion() -> Result<CheckResult> {
    let p = heat(0.4);
    let t = 0.5;
    let f0 = spherical_inverse(&p, 0.0)?;
    // p_s(x₀) = e^{-s/2}(2πs)^{-3/2} for the profile e^{-s(ξ²+1)/2}
    let closed = exp(-0.2) / pow(0.8 * PI, 1.5);
    let lim = rel(inversion_at_base(&p, t, 30.0 * sqrt(t), InversionRoute::Spectral, &q())?, f0);
    let mut agree = 0.0f64;
    for r in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let a = inversion_at_base(&p, t, r, InversionRoute::Direct, &q())?;
        let b = inversion_at_base(&p, t, r, InversionRoute::Spectral, &q())?;
        agree = agree.max(rel(a, b));
    }
    let oracle = rel(f0, closed);
    outcome(
        lim <= 1e-5 && agree <= 1e-6 && oracle <= 1e-8,
        format!("limit rel {lim:.2e}, direct/spectral rel {agree:.2e}, f(x0) vs closed form rel {oracle:.2e}"),
    )
}

fn surjectivity() -> Result<CheckResult> {
    let t = 0.5;
    let mut worst = 0.0f64;
    for f in [heat(0.3), SpectralProfile::band(2.0)?, SpectralProfile::band(5.0)?.with_heat(0.1)] {
        let back = surjectivity_reconstruct(&heat_apply(&f, t)?, t)?;
        for k in 0..=40 {
            let x = 0.1 * k as f64;
            let v = f.value(x);
            if v != 0.0 {
                worst = worst.max(rel(back.value(x), v));
            }
        }
    }
    let absent = matches!(surjectivity_reconstruct(&heat(0.3), t), Err(Error::FiniteLimitAbsent));
    outcome(worst <= 1e-12 && absent, format!("round trip rel {worst:.2e}, FiniteLimitAbsent for t'<t: {absent}"))
}

fn euclidean_baseline() -> Result<CheckResult> {
    let cfg = BaselineConfig::default();
    let mut iso = 0.0f64;
    let mut inv = 0.0f64;
    for (_, g) in test_functions() {
        let f = sample_default(g);
        for t in [0.25, 1.0] {
            let (l, r) = isometry_check_1d(&f, t, 0.0, &cfg)?;
            iso = iso.max(fabs(l - r) / (1.0 + l));
            for x in [-0.7, 0.3, 1.4] {
                inv = inv.max(rel(inversion_check_1d(&f, t, x, &cfg)?, g(x)));
            }
        }
    }
    outcome(iso <= 1e-6 && inv <= 1e-6, format!("isometry rel {iso:.2e}, inversion rel {inv:.2e}"))
}

fn kos_equivalence() -> Result<CheckResult> {
    let t = 0.5;
    let mut kos = 0.0f64;
    for p in [heat(0.3), SpectralProfile::band(2.0)?] {
        kos = kos.max(rel(kos_isometry(&p, t, &q())?, plancherel_norm_sq(&p)));
    }
    let g1 = gaussian_derivative_identity_check(&RootSystem::h3(), t);
    let g2 = gaussian_derivative_identity_check(&RootSystem::a2(), t);
    let (a, b) = integration_by_parts_check(&heat(0.3), t, &q())?;
    let ibp = rel(a, b);
    outcome(
        kos <= 1e-5 && g1 <= 1e-12 && g2 <= 1e-5 && ibp <= 1e-5,
        format!("kos rel {kos:.2e}, gaussder rank1 {g1:.2e}, A2 {g2:.2e}, integration by parts rel {ibp:.2e}"),
    )
}

fn kernel_masses() -> Result<CheckResult> {
    let tight = QuadratureSpec::new(1e-14, 1e-13, 4096)?;
    let rs = RootSystem::h3();
    let t = 0.5;
    let mc = integrate(
        |r| 4.0 * PI * r * r * nu_c_unwrapped(&rs, 2.0 * t, [r, 0.0]) * pow(jc_half(&rs, [r, 0.0]), 2.0),
        0.0,
        60.0 * sqrt(t),
        &tight,
    )?
    .value;
    let mnc = integrate(
        |r| 4.0 * PI * r * r * nu_nc(&rs, t, [r, 0.0]) * pow(jnc_half(&rs, [r, 0.0]), 2.0),
        0.0,
        60.0 * sqrt(t),
        &tight,
    )?
    .value;
    let mut cal = 0.0f64;
    for s in [0.25, 0.5, 1.0] {
        cal = cal.max(rel(plancherel_norm_sq(&heat(s)), exp(-s) * pow(4.0 * PI * s, -1.5)));
    }
    let (e1, e2) = (fabs(mc - 1.0), fabs(mnc - 1.0));
    outcome(
        e1 <= 1e-10 && e2 <= 1e-10 && cal <= 1e-8,
        format!("compact mass err {e1:.2e}, noncompact mass err {e2:.2e}, Plancherel calibration rel {cal:.2e}"),
    )
}

fn radialisation_lemma() -> Result<CheckResult> {
    let rs = RootSystem::h3();
    let t = 0.25;
    let beta = move |r: f64| heat_gaussian(3, t, r);
    let psi = |y: &[f64]| {
        let r = sqrt(y.iter().map(|c| c * c).sum::<f64>());
        psi_entire(&rs, [2.0, 0.0], [r, 0.0])
    };
    let (l, r) = euclid_radialization_check(3, 4.0, &psi, &beta, 1.0, &q())?;
    let e = rel(l, r);
    outcome(e <= 1e-8, format!("(d, σ, R) = (3, 4, 1): lhs {l:.10}, rhs {r:.10}, rel {e:.2e}"))
}

fn impossibility() -> Result<CheckResult> {
    let t = 0.5;
    let alpha = truncated_alpha(t);
    let grid: Vec<f64> = (1..=30).map(|k| 0.5 * k as f64).collect();
    let tab = no_invariant_density_demo(t, &alpha, &grid, &q())?;
    let ratio = tab.rows.iter().find(|r| r.xi == 12.0).map(|r| r.ratio).unwrap_or(f64::NAN);
    let worst = tab.rows.iter().map(|r| r.scaled_lhs).fold(0.0, f64::max);
    outcome(
        tab.bound_holds() && ratio < 1e-10,
        format!("max LHS·ξ·e^(-πξ) {worst:.4} ≤ M = {:.4}, ratio at ξ=12 {ratio:.2e}", tab.mass_constant),
    )
}

/// The eleven end-to-end checks in their fixed order.
pub fn criteria() -> [Criterion; 11] {
    [
        Criterion { name: "global isometry", run: global_isometry },
        Criterion { name: "analytic continuation past R_max", run: analytic_continuation },
        Criterion { name: "blow-up witness", run: blow_up_witness },
        Criterion { name: "partial isometry identity", run: partial_isometry },
        Criterion { name: "inversion at the base point", run: inversion },
        Criterion { name: "surjectivity round trip", run: surjectivity },
        Criterion { name: "Euclidean baseline", run: euclidean_baseline },
        Criterion { name: "shift-operator equivalence", run: kos_equivalence },
        Criterion { name: "kernel masses and Plancherel calibration", run: kernel_masses },
        Criterion { name: "Euclidean radialisation lemma", run: radialisation_lemma },
        Criterion { name: "no invariant density", run: impossibility },
    ]
}
