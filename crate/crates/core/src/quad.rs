//! Adaptive Gauss–Kronrod quadrature with a deterministic refinement order.
//!
//! Every integral in the crate funnels through [`integrate`] so that one
//! [`QuadratureSpec`] governs the whole error budget. Panels are bisected
//! worst-first; ties go to the leftmost panel, and the final sum is taken in
//! left-to-right panel order with compensated accumulation, so a given
//! integrand always yields the same bits.

use alloc::vec::Vec;
use libm::{fabs, log, pow, sqrt};

use crate::error::{Error, Result};
use crate::math::CompensatedSum;

/// Numerical contract for every integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_panels: 4096 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_panels: usize) -> Result<Self> {
        let spec = Self { abs_tol, rel_tol, max_panels };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive"));
        }
        if self.max_panels < 8 {
            return Err(Error::InvalidInput("max_panels must be at least 8"));
        }
        Ok(())
    }

    /// Same panel budget with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self { abs_tol: self.abs_tol * factor, rel_tol: self.rel_tol * factor, ..*self }
    }

    /// Spectral truncation point for an integrand carrying `e^{-t_eff ξ²}`.
    ///
    /// `ξ_max = sqrt(max(1, ln(1/abs_tol)) / t_eff) + 10 / sqrt(t_eff)`, which
    /// leaves the Gaussian factor below `abs_tol` even against `e^{ξ·2R}`
    /// growth for the radii used by the tube integrals.
    pub fn xi_cutoff(&self, t_eff: f64) -> f64 {
        let l = log(1.0 / self.abs_tol).max(1.0);
        sqrt(l / t_eff) + 10.0 / sqrt(t_eff)
    }
}

/// Result of a one-dimensional integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fabs(res_k);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (fabs(f1) + fabs(f2));
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * fabs(fc - mean);
    for j in 0..7 {
        res_asc += WGK[j] * (fabs(fv1[j] - mean) + fabs(fv2[j] - mean));
    }
    let h = fabs(half);
    let value = res_k * half;
    res_abs *= h;
    res_asc *= h;
    let mut err = fabs((res_k - res_g) * half);
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * pow(200.0 * err / res_asc, 1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel { a, b, value, error: err }
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral> {
    integrate_breaks(f, &[a, b], spec)
}

/// Integrate `f` over `[points[0], points[last]]`, with the interior points
/// used as initial panel boundaries (kinks, peaks, known scales).
pub fn integrate_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("integration needs at least two endpoints"));
    }
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    for w in points.windows(2) {
        if w[1] > w[0] {
            panels.push(gk15(&mut f, w[0], w[1]));
        } else if w[1] < w[0] {
            return Err(Error::InvalidInput("integration breakpoints must be nondecreasing"));
        }
    }
    if panels.is_empty() {
        return Ok(Integral { value: 0.0, error: 0.0, panels: 0 });
    }
    let width = points[points.len() - 1] - points[0];
    loop {
        let (value, error) = totals(&panels);
        let target = spec.abs_tol.max(spec.rel_tol * fabs(value));
        if error <= target {
            return Ok(Integral { value, error, panels: panels.len() });
        }
        let mut worst = 0;
        for (i, p) in panels.iter().enumerate() {
            if p.error > panels[worst].error {
                worst = i;
            }
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if panels.len() >= spec.max_panels || (p.b - p.a) < 1e-13 * width || mid <= p.a || mid >= p.b {
            return Err(Error::QuadratureFailure { panels: panels.len(), estimate: value, error });
        }
        let left = gk15(&mut f, p.a, mid);
        let right = gk15(&mut f, mid, p.b);
        panels[worst] = left;
        panels.insert(worst + 1, right);
    }
}

fn totals(panels: &[Panel]) -> (f64, f64) {
    let mut v = CompensatedSum::new();
    let mut e = CompensatedSum::new();
    for p in panels {
        v.add(p.value);
        e.add(p.error);
    }
    (v.value(), e.value())
}

/// Nodes and weights of the composite 15-point Kronrod rule with `panels`
/// equal panels on `[a, b]`. Used for fixed tensor-product quadrature.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(15 * panels);
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let c = lo + 0.5 * h;
        let half = 0.5 * h;
        for j in 0..7 {
            out.push((c - half * XGK[j], half * WGK[j]));
        }
        out.push((c, half * WGK[7]));
        for j in (0..7).rev() {
            out.push((c + half * XGK[j], half * WGK[j]));
        }
    }
    out
}
