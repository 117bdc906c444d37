mod common;

use common::*;
use num_complex::Complex64 as C;
use std::f64::consts::PI;
use torus_pencil::domain::DomainMask;
use torus_pencil::pencil::*;
use torus_pencil::shape::{Primitive, ShapeExpr};
use torus_pencil::Error;

fn opts() -> SpectrumOptions {
    SpectrumOptions::default()
}

#[test]
fn strip_real_eigenvalues_are_multiples_of_two() {
    let m = sector(128, 128, 2.0);
    let s = spectrum(&m, &SearchBox::new(-5.0, 5.0, -1.0, 1.0), 50, &opts()).unwrap();
    for want in [-4.0, -2.0, 2.0, 4.0] {
        let near = s.eigenvalues.iter().map(|z| (z - C::new(want, 0.0)).norm()).fold(f64::INFINITY, f64::min);
        assert!(near / want.abs() < 0.02, "{want}: {:?}", s.eigenvalues);
    }
    assert!(s.residuals.iter().all(|r| *r < 1e-6));
}

#[test]
fn wide_strip_has_critical_value_one() {
    let r = rho_min(&sector(32, 128, 1.0), &opts()).unwrap();
    assert!((r.value.unwrap() - 1.0).abs() < 0.02);
    let q = r.eigenfunction.unwrap();
    assert!(q.min() >= 0.0);
}

#[test]
fn reflected_spectrum_is_negated_and_conjugation_holds() {
    // asymmetric strip: the reflection is a different mask
    let m = strip(64, 64, -0.3, 1.4);
    let bx = SearchBox::new(-4.0, 4.0, -12.0, 12.0);
    let s = spectrum(&m, &bx, 200, &opts()).unwrap();
    let rep = check_spectrum_symmetries(&m, &s, &opts(), 0.03).unwrap();
    assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    assert!(rep.checked_shift_pairs > 0);
}

#[test]
fn disc_bump_strictly_lowers_critical_value() {
    let base = sector(32, 64, 2.0);
    let shape = ShapeExpr::new().union(Primitive::Strip { ymin: -PI / 4.0, ymax: PI / 4.0 }).union(Primitive::Disc {
        cx: 0.35,
        cy: PI / 4.0,
        r: 0.2,
    });
    let bigger = torus_pencil::domain::build_domain(log2(), 32, 64, &shape).unwrap();
    let r = check_monotonicity(&base, &bigger, &opts()).unwrap();
    assert!(r.strict && r.inner > r.outer);
    assert!(matches!(check_monotonicity(&base, &base, &opts()), Err(Error::Inconclusive(_))));
}

#[test]
fn growing_strips_decrease_to_the_limit() {
    let seq: Vec<DomainMask> = (2..6).map(|n| strip(16, 256, -PI / 2.0 + 1.0 / n as f64, PI / 2.0 - 1.0 / n as f64)).collect();
    let limit = sector(16, 256, 1.0);
    let r = check_shrinking_limit(&seq, &limit, &opts()).unwrap();
    assert!(r.monotone);
    for (k, v) in r.values.iter().enumerate() {
        let n = (k + 2) as f64;
        let want = PI / (PI - 2.0 / n);
        assert!((v - want).abs() / want < 0.02, "n {n}: {v} vs {want}");
    }
    assert!((r.limit - 1.0).abs() < 0.02);
}

#[test]
fn symmetric_strip_matches_its_reflection() {
    let m = sector(32, 64, 2.0);
    let p = matsaev_probe(&m, &SearchBox::new(0.5, 6.0, -10.0, 10.0), &opts()).unwrap();
    assert!(p.hausdorff < 1e-8);
    assert!(p.negative_gap.unwrap() < 0.02);
}

#[test]
fn torus_minus_one_cell_is_grid_limited() {
    let g = grid(16, 16);
    let mut inside = vec![true; g.len()];
    inside[0] = false;
    let m = DomainMask::from_cells(g, inside).unwrap();
    let r = rho_min(&m, &opts()).unwrap();
    assert!(r.grid_limited || r.value.is_some_and(|v| v < 1.0), "{:?}", r.value);
}

#[test]
fn band_has_no_spectrum() {
    let s = spectrum(&band(32, 64), &SearchBox::new(0.1, 10.0, -PI / 2f64.ln(), PI / 2f64.ln()), 50, &opts()).unwrap();
    assert!(s.eigenvalues.is_empty());
    assert!(rho_min(&band(32, 64), &opts()).unwrap().value.is_none());
}
