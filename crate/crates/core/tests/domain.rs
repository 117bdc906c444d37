mod common;

use common::*;
use std::f64::consts::PI;
use torus_pencil::domain::*;
use torus_pencil::elliptic::*;
use torus_pencil::field::GridField;
use torus_pencil::grid::TorusSpec;
use torus_pencil::shape::{parse_shape_file, Primitive, ShapeExpr};
use torus_pencil::window::LogWindow;

#[test]
fn strip_band_and_tubes_classify() {
    let s = sector(16, 64, 2.0);
    assert_eq!(s.n_components, 1);
    assert!(s.spiral[0].is_connected() && s.spiral[0].k == 1 && s.spiral[0].y_winding == 0);
    assert!(!band(16, 64).spiral[0].is_connected());
    for k in [2i64, 3] {
        let m = shape(log2(), 96, 96, Primitive::Tube { k, l: 1, eps: 0.05 });
        let cls = classify_spiral(&m, 4).unwrap();
        assert!(cls.iter().all(|c| c.is_connected() && c.k as i64 == k), "{cls:?}");
    }
}

#[test]
fn components_are_counted() {
    let two = ShapeExpr::new().union(Primitive::Strip { ymin: -1.0, ymax: -0.5 }).union(Primitive::Strip { ymin: 0.5, ymax: 1.0 });
    assert_eq!(build_domain(log2(), 16, 64, &two).unwrap().n_components, 2);
    let disc = shape(TorusSpec::new(2.0).unwrap(), 32, 32, Primitive::Disc { cx: 1.0, cy: 0.0, r: 0.7 });
    assert_eq!(disc.n_components, 1);
    assert_eq!(components(&disc).len(), 1);
}

#[test]
fn shape_file_builds_the_same_mask() {
    let f = parse_shape_file("torus 0.6931471805599453 16 32\n+ strip -pi/4 pi/4\n").unwrap();
    let m = build_domain(TorusSpec::new(f.period).unwrap(), f.nx, f.ny, &f.shape).unwrap();
    assert_eq!(m.inside, sector(16, 32, 2.0).inside);
}

#[test]
fn operator_on_resonant_mode() {
    let g = grid(16, 64);
    let f = GridField::from_fn(g, |_, y| y.cos());
    let out = apply_torus(&f, OperatorKind::Lrho(2.0));
    for c in 0..g.len() {
        let want = 3.0 * f.values[c];
        assert!((out.values[c] - want).abs() < g.hy * g.hy, "{} vs {want}", out.values[c]);
    }
}

#[test]
fn constant_data_gives_constant_solution() {
    let m = shape(TorusSpec::new(2.0).unwrap(), 32, 32, Primitive::Disc { cx: 1.0, cy: 0.0, r: 0.7 });
    let u = solve_dirichlet(&m, &GridField::constant(m.grid, 1.0), BoundaryMode::Fitted).unwrap();
    assert!(u.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn disc_harmonic_extension_of_cosine() {
    let err = |n: usize| {
        let spec = TorusSpec::new(2.0).unwrap();
        let ny = (n as f64 * PI).round() as usize;
        let m = shape(spec, n, ny, Primitive::Disc { cx: 1.0, cy: 0.0, r: 0.7 });
        let data = GridField::from_fn(m.grid, |x, _| x - 1.0);
        let u = solve_dirichlet(&m, &data, BoundaryMode::Fitted).unwrap();
        let e = m.inside_cells().iter().map(|&c| (u.values[c] - (m.grid.center(c).0 - 1.0)).abs()).fold(0.0, f64::max);
        e / m.grid.h()
    };
    // data are read at the outside neighbour, so the error is first order
    for n in [32, 64, 128] {
        assert!(err(n) < 1.5, "n {n}: error / h = {}", err(n));
    }
}

#[test]
fn harmonic_measure_of_whole_boundary_and_of_one_side() {
    let m = sector(16, 64, 1.0);
    let lat = Lattice::from_mask(&m, BoundaryMode::Fitted);
    let z0 = m.grid.locate(0.3, 0.0);
    assert!((harmonic_measure(&lat, |_| true, z0).unwrap() - 1.0).abs() < 1e-12);
    // long window: the end caps carry almost no measure seen from the middle
    let w = LogWindow::lift(&m, 0, 16, BoundaryMode::Fitted).unwrap();
    let mid = w.cell_of(z0, 8);
    let top = harmonic_measure(&w.lattice, |p| matches!(p.target, BoundaryRef::Cell(_)) && p.y > 0.0, mid).unwrap();
    assert!((top - 0.5).abs() < 0.02, "{top}");
}
