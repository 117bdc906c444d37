#![allow(dead_code)]

use std::f64::consts::PI;
use torus_pencil::domain::{build_domain, DomainMask};
use torus_pencil::grid::{Grid, TorusSpec};
use torus_pencil::shape::{Primitive, ShapeExpr};

pub fn log2() -> TorusSpec {
    TorusSpec::new(2f64.ln()).unwrap()
}

pub fn grid(nx: usize, ny: usize) -> Grid {
    Grid::new(log2(), nx, ny).unwrap()
}

pub fn shape(spec: TorusSpec, nx: usize, ny: usize, p: Primitive) -> DomainMask {
    build_domain(spec, nx, ny, &ShapeExpr::new().union(p)).unwrap()
}

pub fn strip(nx: usize, ny: usize, ymin: f64, ymax: f64) -> DomainMask {
    shape(log2(), nx, ny, Primitive::Strip { ymin, ymax })
}

/// Symmetric strip of opening pi / target, whose critical value is `target`.
pub fn sector(nx: usize, ny: usize, target: f64) -> DomainMask {
    strip(nx, ny, -PI / (2.0 * target), PI / (2.0 * target))
}

pub fn band(nx: usize, ny: usize) -> DomainMask {
    let p = 2f64.ln();
    shape(log2(), nx, ny, Primitive::Band { xmin: 0.25 * p, xmax: 0.75 * p })
}
