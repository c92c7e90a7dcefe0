
use num_complex::Complex64;
use sbtube::h3xform::{eval_extension, spherical_inverse_with, C_PLANCHEREL};
use sbtube::quad::integrate;
use sbtube::rootgeom::polar_density;
use sbtube::{QuadratureSpec, RootSystem, SpectralProfile};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn polar_consistency_on_h3() {
    let rs = RootSystem::h3();
    let spec = QuadratureSpec::new(1e-12, 1e-11, 4096).unwrap();
    let g = |r: f64| (-r * r).exp() * (0.7 * r).cosh();
    let big_r = 1.8;
    let cube = integrate(
        |x| {
            let ry = (big_r * big_r - x * x).max(0.0).sqrt();
            integrate(
                |y| {
                    let rz = (big_r * big_r - x * x - y * y).max(0.0).sqrt();
                    integrate(|z| g((x * x + y * y + z * z).sqrt()), -rz, rz, &spec).unwrap().value
                },
                -ry,
                ry,
                &spec,
            )
            .unwrap()
            .value
        },
        -big_r,
        big_r,
        &spec,
    )
    .unwrap()
    .value;
    let polar = integrate(|r| g(r) * polar_density(&rs, [r, 0.0]), 0.0, big_r, &spec).unwrap().value;
    assert!(rel(cube, polar) <= 1e-8, "{cube} {polar}");
}

/// `c_P∫ F̂(ξ)·sin(ξz)/(ξ sinh z)·ξ² dξ` at complex `z`.
fn inverse_at_complex(p: &SpectralProfile, z: Complex64, end: f64) -> f64 {
    let spec = QuadratureSpec::new(1e-13, 1e-12, 8192).unwrap();
    let v = integrate(
        |x| {
            if x == 0.0 {
                return 0.0;
            }
            let k = (z * x).sin() / (z.sinh() * x);
            p.value(x) * k.re * x * x
        },
        0.0,
        end,
        &spec,
    )
    .unwrap()
    .value;
    C_PLANCHEREL * v
}

#[test]
fn extension_is_continuation_of_inverse() {
    let q = QuadratureSpec::default();
    for p in [SpectralProfile::heat_kernel(0.5).unwrap(), SpectralProfile::band(6.0).unwrap().with_heat(0.3)] {
        let end = 40.0;
        for r in [0.3, 1.0, 2.0] {
            let real = spherical_inverse_with(&p, r, &q).unwrap();
            assert!(rel(inverse_at_complex(&p, Complex64::new(r, 0.0), end), real) <= 1e-8, "{r}");
            let ext = eval_extension(&p, r, &q).unwrap();
            assert!(rel(inverse_at_complex(&p, Complex64::new(0.0, r), end), ext) <= 1e-8, "{r}");
        }
    }
}
