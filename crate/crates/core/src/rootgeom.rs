//! Root systems of rank at most two and the geometry they determine.
//!
//! Vectors are stored as `[f64; 2]`; for rank-one systems the second
//! coordinate is carried along but never read. All roots have multiplicity
//! two (complex type), so the flat dimension is `d = n + 2|Σ⁺|`.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{fabs, sqrt};

use crate::error::{Error, Result};
use crate::math::{ln_gamma, sinc, sinhc};
use crate::quad::composite_nodes;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

const IDENTITY: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
const MATCH_TOL: f64 = 1e-9;

/// Largest group the reflection closure may produce before it is declared
/// malformed.
pub const CLOSURE_LIMIT: usize = 1024;

/// Finite reflection group acting on `𝔞`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeylGroup {
    rank: usize,
    elements: Vec<Mat2>,
    signs: Vec<f64>,
}

impl WeylGroup {
    /// Closure of `generators` under multiplication, breadth first from the
    /// identity. Element order is deterministic.
    pub fn closure(rank: usize, generators: &[Mat2], limit: usize) -> Result<Self> {
        let mut elements: Vec<Mat2> = Vec::new();
        let mut queue: VecDeque<Mat2> = VecDeque::new();
        queue.push_back(IDENTITY);
        while let Some(g) = queue.pop_front() {
            if elements.iter().any(|h| mat_close(h, &g)) {
                continue;
            }
            if elements.len() == limit {
                return Err(Error::ClosureOverflow { limit });
            }
            for s in generators {
                queue.push_back(mat_mul(&g, s));
            }
            elements.push(g);
        }
        let signs = elements.iter().map(|m| det(m).signum()).collect();
        Ok(Self { rank, elements, signs })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    /// `det(w)` for each element, in element order.
    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    /// `(w·v, det w)` for every element.
    pub fn orbit(&self, v: Vec2) -> impl Iterator<Item = (Vec2, f64)> + '_ {
        self.elements.iter().zip(self.signs.iter()).map(move |(m, &s)| (mat_vec(m, v), s))
    }

    /// Index of the product `w_i w_j`, if present.
    pub fn product_index(&self, i: usize, j: usize) -> Option<usize> {
        let p = mat_mul(&self.elements[i], &self.elements[j]);
        self.elements.iter().position(|m| mat_close(m, &p))
    }
}

/// Reduced root system of the complex type with rank 1 or 2.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSystem {
    name: String,
    rank: usize,
    roots: Vec<Vec2>,
    weyl: WeylGroup,
    polar_constant: f64,
    c_rs: f64,
}

impl RootSystem {
    /// Validate `positive_roots` and precompute the Weyl group and the
    /// normalisation constants.
    pub fn new(name: &str, rank: usize, positive_roots: &[Vec2]) -> Result<Self> {
        if rank == 0 || rank > 2 {
            return Err(Error::InvalidRootSystem("rank must be 1 or 2"));
        }
        if positive_roots.is_empty() {
            return Err(Error::InvalidRootSystem("at least one positive root is required"));
        }
        let roots: Vec<Vec2> = positive_roots
            .iter()
            .map(|a| if rank == 1 { [a[0], 0.0] } else { *a })
            .collect();
        for a in &roots {
            if !(a[0].is_finite() && a[1].is_finite()) || norm_sq(*a) < 1e-24 {
                return Err(Error::InvalidRootSystem("roots must be finite and nonzero"));
            }
        }
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[i + 1..] {
                let cross = a[0] * b[1] - a[1] * b[0];
                if fabs(cross) <= MATCH_TOL * sqrt(norm_sq(*a) * norm_sq(*b)) {
                    return Err(Error::InvalidRootSystem("roots must be pairwise non-proportional"));
                }
            }
        }
        for a in &roots {
            for b in &roots {
                let r = reflect(*a, *b);
                let listed = roots
                    .iter()
                    .any(|c| close(*c, r) || close([-c[0], -c[1]], r));
                if !listed {
                    return Err(Error::InvalidRootSystem("root set not closed under its reflections"));
                }
            }
        }
        let generators: Vec<Mat2> = roots.iter().map(|a| reflection_matrix(*a)).collect();
        let weyl = WeylGroup::closure(rank, &generators, CLOSURE_LIMIT)?;
        let mut rs = Self {
            name: String::from(name),
            rank,
            roots,
            weyl,
            polar_constant: 0.0,
            c_rs: 0.0,
        };
        rs.polar_constant = polar_constant(&rs);
        rs.c_rs = crate::specialfn::normalization_constant(&rs)?;
        Ok(rs)
    }

    /// Hyperbolic 3-space: rank one, a single unit root.
    pub fn h3() -> Self {
        Self::new("h3", 1, &[[1.0, 0.0]]).expect("h3 preset is valid")
    }

    pub fn a1() -> Self {
        Self::new("a1", 1, &[[1.0, 0.0]]).expect("a1 preset is valid")
    }

    pub fn a1xa1() -> Self {
        Self::new("a1xa1", 2, &[[1.0, 0.0], [0.0, 1.0]]).expect("a1xa1 preset is valid")
    }

    /// Unit roots at 0°, 120° and 60°.
    pub fn a2() -> Self {
        let h = sqrt(3.0) / 2.0;
        Self::new("a2", 2, &[[1.0, 0.0], [-0.5, h], [0.5, h]]).expect("a2 preset is valid")
    }

    /// Preset by name: `h3`, `a1`, `a1xa1` or `a2`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "h3" => Ok(Self::h3()),
            "a1" => Ok(Self::a1()),
            "a1xa1" => Ok(Self::a1xa1()),
            "a2" => Ok(Self::a2()),
            _ => Err(Error::InvalidInput("unknown root-system preset")),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn positive_roots(&self) -> &[Vec2] {
        &self.roots
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    /// `d = n + 2|Σ⁺|`.
    pub fn dimension(&self) -> usize {
        self.rank + 2 * self.roots.len()
    }

    /// Inner product on `𝔞`, restricted to the first `rank` coordinates.
    pub fn dot(&self, a: Vec2, b: Vec2) -> f64 {
        if self.rank == 1 {
            a[0] * b[0]
        } else {
            a[0] * b[0] + a[1] * b[1]
        }
    }

    pub fn norm(&self, v: Vec2) -> f64 {
        sqrt(self.dot(v, v))
    }

    /// `ρ = Σ_{α∈Σ⁺} α` (half-sum with multiplicity two).
    pub fn rho(&self) -> Vec2 {
        self.roots.iter().fold([0.0, 0.0], |acc, a| [acc[0] + a[0], acc[1] + a[1]])
    }

    /// Constant `C_rs` with `Ψ_ξ = C_rs·A(ξ,Y)/(π(ξ)π(Y))`.
    pub fn psi_constant(&self) -> f64 {
        self.c_rs
    }

    /// Constant `C_μ` of the polar density `C_μ·π(Y)²`.
    pub fn polar_constant(&self) -> f64 {
        self.polar_constant
    }

    /// True when the positive roots are pairwise orthogonal, in which case
    /// every spherical quantity factorises over the roots.
    pub fn is_orthogonal(&self) -> bool {
        self.roots.iter().enumerate().all(|(i, a)| {
            self.roots[i + 1..].iter().all(|b| fabs(self.dot(*a, *b)) < MATCH_TOL)
        })
    }
}

/// Reflection closure of the root reflections.
pub fn build_weyl_group(rs: &RootSystem) -> WeylGroup {
    rs.weyl.clone()
}

/// `π(v) = ∏_{α∈Σ⁺} ⟨α, v⟩`.
pub fn pi_poly(rs: &RootSystem, v: Vec2) -> f64 {
    rs.roots.iter().map(|a| rs.dot(*a, v)).product()
}

/// `|ρ|²`.
pub fn rho_sq(rs: &RootSystem) -> f64 {
    let r = rs.rho();
    rs.dot(r, r)
}

/// `j^c(Y)^{1/2} = ∏ sin⟨α,Y⟩/⟨α,Y⟩`.
pub fn jc_half(rs: &RootSystem, y: Vec2) -> f64 {
    rs.roots.iter().map(|a| sinc(rs.dot(*a, y))).product()
}

/// `j^{nc}(Y)^{1/2} = ∏ sinh⟨α,Y⟩/⟨α,Y⟩`.
pub fn jnc_half(rs: &RootSystem, y: Vec2) -> f64 {
    rs.roots.iter().map(|a| sinhc(rs.dot(*a, y))).product()
}

/// Polar density `μ(Y) = C_μ·π(Y)²` on `𝔞`, with `C_μ` fixed so that
/// radial integrals over `𝔭` equal integrals over the positive chamber.
pub fn polar_density(rs: &RootSystem, y: Vec2) -> f64 {
    let p = pi_poly(rs, y);
    rs.polar_constant * p * p
}

/// Largest radius whose ball lies in `Ω`: `π/(2 max|α|)`.
pub fn r_max(rs: &RootSystem) -> f64 {
    let longest = rs.roots.iter().map(|a| rs.norm(*a)).fold(0.0, f64::max);
    PI / (2.0 * longest)
}

/// `|⟨α,Y⟩| < scale·π/2` for every positive root (`scale = 1` is `Ω`,
/// `scale = 2` is `2Ω`).
pub fn in_omega(rs: &RootSystem, y: Vec2, scale: f64) -> bool {
    let bound = scale * PI / 2.0;
    rs.roots.iter().all(|a| fabs(rs.dot(*a, y)) < bound)
}

fn polar_constant(rs: &RootSystem) -> f64 {
    let d = rs.dimension() as f64;
    let ln_ball = 0.5 * d * libm::log(PI) - ln_gamma(0.5 * d + 1.0);
    let sphere = d * libm::exp(ln_ball);
    let arc = if rs.rank == 1 {
        let p = pi_poly(rs, [1.0, 0.0]);
        p * p
    } else {
        // π(u)² is a trigonometric polynomial of degree 2|Σ⁺|, integrated
        // exactly by the composite rule.
        let total: f64 = composite_nodes(0.0, 2.0 * PI, 8)
            .into_iter()
            .map(|(th, w)| {
                let p = pi_poly(rs, [libm::cos(th), libm::sin(th)]);
                w * p * p
            })
            .sum();
        total / rs.weyl.len() as f64
    };
    sphere / arc
}

fn norm_sq(a: Vec2) -> f64 {
    a[0] * a[0] + a[1] * a[1]
}

fn close(a: Vec2, b: Vec2) -> bool {
    fabs(a[0] - b[0]) < MATCH_TOL && fabs(a[1] - b[1]) < MATCH_TOL
}

fn reflect(v: Vec2, a: Vec2) -> Vec2 {
    let c = 2.0 * (v[0] * a[0] + v[1] * a[1]) / norm_sq(a);
    [v[0] - c * a[0], v[1] - c * a[1]]
}

fn reflection_matrix(a: Vec2) -> Mat2 {
    let n = norm_sq(a);
    [
        [1.0 - 2.0 * a[0] * a[0] / n, -2.0 * a[0] * a[1] / n],
        [-2.0 * a[1] * a[0] / n, 1.0 - 2.0 * a[1] * a[1] / n],
    ]
}

pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn mat_close(a: &Mat2, b: &Mat2) -> bool {
    (0..2).all(|i| (0..2).all(|j| fabs(a[i][j] - b[i][j]) < MATCH_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadratureSpec};
    use proptest::prelude::*;

    fn presets() -> [RootSystem; 4] {
        [RootSystem::h3(), RootSystem::a1(), RootSystem::a1xa1(), RootSystem::a2()]
    }

    #[test]
    fn group_orders() {
        assert_eq!(RootSystem::a1().weyl().len(), 2);
        assert_eq!(RootSystem::a1xa1().weyl().len(), 4);
        assert_eq!(RootSystem::a2().weyl().len(), 6);
    }

    #[test]
    fn group_axioms() {
        for rs in presets() {
            let w = rs.weyl();
            assert!(mat_close(&w.elements()[0], &IDENTITY));
            for i in 0..w.len() {
                let m = w.elements()[i];
                let mt = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
                let p = mat_mul(&m, &mt);
                assert!((0..2).all(|a| (0..2).all(|b| fabs(p[a][b] - IDENTITY[a][b]) < 1e-12)));
                for j in 0..w.len() {
                    let k = w.product_index(i, j).expect("closed under products");
                    assert_eq!(w.signs()[k], w.signs()[i] * w.signs()[j]);
                }
            }
        }
    }

    #[test]
    fn closure_overflow_on_irrational_angle() {
        let a = [1.0, 0.0];
        let b = [libm::cos(1.0), libm::sin(1.0)];
        let e = WeylGroup::closure(2, &[reflection_matrix(a), reflection_matrix(b)], CLOSURE_LIMIT)
            .unwrap_err();
        assert_eq!(e, Error::ClosureOverflow { limit: CLOSURE_LIMIT });
    }

    #[test]
    fn validation_rejects_bad_roots() {
        assert!(RootSystem::new("x", 2, &[[1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(RootSystem::new("x", 2, &[[0.0, 0.0]]).is_err());
        assert!(RootSystem::new("x", 3, &[[1.0, 0.0]]).is_err());
        let b = [libm::cos(1.0), libm::sin(1.0)];
        assert!(RootSystem::new("x", 2, &[[1.0, 0.0], b]).is_err());
        assert!(RootSystem::preset("b2").is_err());
    }

    #[test]
    fn dimensions_and_rho() {
        let h3 = RootSystem::h3();
        assert_eq!(h3.dimension(), 3);
        assert_eq!(rho_sq(&h3), 1.0);
        assert_eq!(RootSystem::a1xa1().dimension(), 6);
        assert_eq!(RootSystem::a2().dimension(), 8);
        let l = 1.7;
        let scaled = RootSystem::new("a1", 1, &[[l, 0.0]]).unwrap();
        assert!((rho_sq(&scaled) - l * l).abs() < 1e-15);
        // 2ρ for A2 is twice the long root (1, √3): |ρ|² = 4.
        assert!((rho_sq(&RootSystem::a2()) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pi_poly_examples() {
        let a1 = RootSystem::a1();
        assert_eq!(pi_poly(&a1, [2.0, 0.0]), 2.0);
        let a2 = RootSystem::a2();
        let h = sqrt(3.0) / 2.0;
        assert!(pi_poly(&a2, [h, 0.5]).abs() < 1e-15);
        let v = [1.0, 0.0];
        assert!((pi_poly(&a2, v) - 1.0 * -0.5 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn jacobian_examples() {
        let h3 = RootSystem::h3();
        assert_eq!(jc_half(&h3, [0.0, 0.0]), 1.0);
        assert_eq!(jnc_half(&h3, [0.0, 0.0]), 1.0);
        assert!((jc_half(&h3, [PI / 2.0, 0.0]) - 2.0 / PI).abs() < 1e-15);
        assert!((jnc_half(&h3, [1.0, 0.0]) - 1.1752011936438014).abs() < 1e-15);
        assert!(fabs(jc_half(&h3, [PI, 0.0])) < 1e-15);
    }

    #[test]
    fn polar_density_matches_ball_volume() {
        let h3 = RootSystem::h3();
        assert!((polar_density(&h3, [1.0, 0.0]) - 4.0 * PI).abs() < 1e-13);
        let spec = QuadratureSpec::default();
        let vol = integrate(|r| polar_density(&h3, [r, 0.0]), 0.0, 1.0, &spec).unwrap().value;
        assert!((vol - 4.0 * PI / 3.0).abs() < 1e-13);
        for rs in presets() {
            if rs.rank() == 2 {
                let h = sqrt(3.0) / 2.0;
                let wall = if rs.name() == "a2" { [h, 0.5] } else { [0.0, 1.0] };
                assert!(polar_density(&rs, wall).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rank_two_polar_density_matches_ball_volume() {
        // ∫ over the chamber of μ on the unit disc equals the unit ball volume in ℝ^d.
        let spec = QuadratureSpec::default();
        for rs in [RootSystem::a1xa1(), RootSystem::a2()] {
            let d = rs.dimension() as f64;
            let ball = libm::exp(0.5 * d * libm::log(PI) - ln_gamma(0.5 * d + 1.0));
            // Integrate μ over the whole disc and divide by |W|.
            let total = integrate(
                |r| {
                    integrate(
                        |th| polar_density(&rs, [r * libm::cos(th), r * libm::sin(th)]) * r,
                        0.0,
                        2.0 * PI,
                        &spec,
                    )
                    .unwrap()
                    .value
                },
                0.0,
                1.0,
                &spec,
            )
            .unwrap()
            .value;
            let chamber = total / rs.weyl().len() as f64;
            assert!((chamber - ball).abs() < 1e-9 * ball, "{} {chamber} {ball}", rs.name());
        }
    }

    #[test]
    fn omega_membership() {
        let h3 = RootSystem::h3();
        assert!((r_max(&h3) - PI / 2.0).abs() < 1e-15);
        assert!(in_omega(&h3, [0.0, 0.0], 1.0));
        assert!(!in_omega(&h3, [PI / 2.0, 0.0], 1.0));
        assert!(in_omega(&h3, [PI - 1e-9, 0.0], 2.0));
        assert!(!in_omega(&h3, [PI, 0.0], 2.0));
    }

    #[test]
    fn a2_r_max_by_rejection_sampling() {
        use rand::{Rng, SeedableRng};
        let rs = RootSystem::a2();
        let rm = r_max(&rs);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut closest_outside = f64::INFINITY;
        for _ in 0..200_000 {
            let y = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let r = rs.norm(y);
            if r < rm {
                assert!(in_omega(&rs, y, 1.0));
            } else if !in_omega(&rs, y, 1.0) {
                closest_outside = closest_outside.min(r);
            }
        }
        assert!(closest_outside >= rm && closest_outside < rm + 0.01);
    }

    proptest! {
        #[test]
        fn pi_poly_alternates(idx in 0usize..6, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let rs = RootSystem::a2();
            let w = rs.weyl();
            let v = [x, y];
            let wv = mat_vec(&w.elements()[idx], v);
            let lhs = pi_poly(&rs, wv);
            let rhs = w.signs()[idx] * pi_poly(&rs, v);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn jacobians_weyl_invariant(which in 0usize..4, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let rs = presets()[which].clone();
            let v = [x, y];
            for (wv, _) in rs.weyl().orbit(v) {
                prop_assert!((jc_half(&rs, wv) - jc_half(&rs, v)).abs() <= 1e-12);
                prop_assert!((jnc_half(&rs, wv) - jnc_half(&rs, v)).abs() <= 1e-12 * jnc_half(&rs, v));
            }
        }

        #[test]
        fn jnc_is_termwise_continuation(x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let rs = RootSystem::a2();
            let v = [x, y];
            for a in rs.positive_roots() {
                let z = num_complex::Complex64::new(0.0, rs.dot(*a, v));
                // sinh(x)/x = sin(ix)/(ix)
                let cont = if z.im.abs() < 1e-8 { 1.0 } else { (z.sin() / z).re };
                prop_assert!((cont - sinhc(rs.dot(*a, v))).abs() <= 1e-12 * cont.abs());
            }
            prop_assert!(jnc_half(&rs, v) >= 1.0);
        }
    }
}
