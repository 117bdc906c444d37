mod common;

use common::*;
use num_complex::Complex64 as C;
use torus_pencil::elliptic::{apply_torus, OperatorKind};
use torus_pencil::field::{GridField, GridMeasure};
use torus_pencil::fundsol::*;
use torus_pencil::Error;

#[test]
fn kernel_is_even_in_y() {
    let k = FourierKernel::new(1.5, 2f64.ln()).unwrap();
    for &(x, y) in &[(0.1, 0.4), (0.5, 2.0), (0.33, 3.0)] {
        assert!((k.eval(x, y) - k.eval(x, -y)).abs() < 1e-13);
    }
}

#[test]
fn sampled_kernel_satisfies_the_equation_to_second_order() {
    let err = |n: usize| {
        let g = grid(n, 4 * n);
        let e = fundsol_fourier(1.5, g).unwrap();
        let r = apply_torus(&e.field, OperatorKind::Lrho(1.5));
        (0..g.len())
            .filter(|&c| {
                let (x, y) = g.center(c);
                x.min(g.period() - x).hypot(y) > 0.3
            })
            .map(|c| r.values[c].abs())
            .fold(0.0, f64::max)
    };
    let (a, b) = (err(32), err(64));
    assert!(a < 0.05 && a / b > 3.5, "{a} {b}");
}

#[test]
fn fourier_and_weierstrass_agree() {
    let g = grid(24, 64);
    let f = fundsol_fourier(1.5, g).unwrap();
    let w = fundsol_weierstrass(1.5, g, 1e-8).unwrap();
    let h = g.h();
    for c in 0..g.len() {
        let (x, y) = g.center(c);
        if x.min(g.period() - x).hypot(y) > 4.0 * h {
            assert!((f.field.values[c] - w.field.values[c]).abs() < 1e-6);
        }
    }
}

#[test]
fn genus_zero_factor_at_minus_one_is_log_two() {
    assert!((weierstrass_h(C::new(-1.0, 0.0), 0) - 2f64.ln()).abs() < 1e-14);
}

#[test]
fn generalized_kernel_has_no_resonant_modes() {
    for p in [1i64, 2] {
        let g = grid(16, 32);
        let k = discrete_kernel(g, KernelKind::Generalized(p)).unwrap();
        let s: C = (0..g.len()).map(|c| k.values[c] * C::from_polar(1.0, p as f64 * g.center(c).1)).sum();
        assert!(s.norm() < 1e-10 * k.max_abs(), "{s}");
    }
}

#[test]
fn uniform_density_has_constant_potential() {
    let g = grid(16, 32);
    let nu = GridMeasure::from_density(&GridField::constant(g, 1.0));
    let pi = potential(&nu, KernelKind::Rho(1.5)).unwrap();
    assert!(pi.values.iter().all(|v| (v - 1.0 / 2.25).abs() < 1e-12));
}

#[test]
fn potential_is_linear_and_translation_covariant() {
    let g = grid(16, 32);
    let kind = KernelKind::Rho(0.7);
    let a = GridMeasure::from_density(&GridField::from_fn(g, |x, y| (x * 3.0).sin().abs() + y.cos().powi(2)));
    let b = GridMeasure::dirac(g, 37);
    let pa = potential(&a, kind).unwrap();
    let pb = potential(&b, kind).unwrap();
    let pab = potential(&a.add(&b), kind).unwrap();
    assert!(pab.max_diff(&pa.zip_with(&pb, |u, v| u + v)) < 1e-12 * pab.max_abs());
    let origin = g.locate(0.0, 0.0);
    let k = discrete_kernel(g, kind).unwrap();
    let (i0, j0) = g.ij(origin);
    let (i, j) = g.ij(37);
    let shifted = k.translated(i as isize - i0 as isize, j as isize - j0 as isize);
    assert!(shifted.max_diff(&pb) < 1e-12 * pb.max_abs());
}

#[test]
fn smooth_potential_is_reconstructed() {
    let g = grid(16, 48);
    let nu = GridMeasure::from_density(&GridField::from_fn(g, |x, y| (-((x - 0.3) / 0.1).powi(2) - (y / 0.5).powi(2)).exp()));
    let v = potential(&nu, KernelKind::Rho(1.5)).unwrap();
    let r = representation_check(&v, 1.5).unwrap();
    assert!(r.residual <= 1e-6 * v.max_abs().max(1.0), "{}", r.residual);
}

#[test]
fn resonant_mode_alone_is_fitted() {
    let g = grid(16, 48);
    let cst = C::new(-0.3, 1.1);
    let v = GridField::from_fn(g, |_, y| (cst * C::from_polar(1.0, y)).re);
    let r = representation_check(&v, 1.0).unwrap();
    assert!((r.fitted.unwrap() - cst).norm() < 1e-8);
    assert!(r.residual < 1e-8);
}

#[test]
fn positive_bump_breaks_mass_symmetry() {
    let g = grid(32, 256);
    let bump = GridField::from_fn(g, |x, y| (-((x - 0.3) / 0.1).powi(2) - ((y - 0.5) / 0.3).powi(2)).exp());
    let nu = GridMeasure::from_density(&bump);
    assert!(matches!(check_mass_symmetry(&nu, 1, 1.0), Err(Error::MassSymmetryViolated(_))));
    // its generalised potential is an L_1-function up to the removed resonant part
    let v = potential(&nu, KernelKind::Generalized(1)).unwrap();
    assert!(check_mass_symmetry(&riesz_measure(&v, 1.0), 1, v.max_abs()).is_ok());
}
