//! Five-point discretisations of the Laplacian, d/dx and L_rho on torus masks and log windows,
//! and the Dirichlet solves built on them.
//!
//! Near a boundary crossing at fraction theta of the spacing the second difference uses the
//! Shortley-Weller weights and the first difference the matching three-point formula, so
//! both stay second order on fitted masks.

use crate::domain::{DomainMask, DIRS};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::grid::Grid;
use crate::sparse::{Csr, SparseLu};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorKind {
    Laplacian,
    Dx,
    Lrho(f64),
}

/// Where Dirichlet values sit relative to boundary-adjacent cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// At the fitted crossing stored in the mask.
    Fitted,
    /// At the centre of the outside neighbour.
    Cells,
}

/// A set of cells on a lattice that is periodic in y and, optionally, in x.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
    pub x0: f64,
    pub y0: f64,
    pub periodic_x: bool,
    pub inside: Vec<bool>,
    pub offsets: Vec<[f64; 4]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryRef {
    Cell(usize),
    Left(usize),
    Right(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub target: BoundaryRef,
    pub x: f64,
    pub y: f64,
}

impl Lattice {
    pub fn torus(grid: &Grid) -> Lattice {
        Lattice {
            nx: grid.nx,
            ny: grid.ny,
            hx: grid.hx,
            hy: grid.hy,
            x0: 0.0,
            y0: -std::f64::consts::PI,
            periodic_x: true,
            inside: vec![true; grid.len()],
            offsets: vec![[1.0; 4]; grid.len()],
        }
    }

    pub fn from_mask(mask: &DomainMask, mode: BoundaryMode) -> Lattice {
        let mut l = Lattice::torus(&mask.grid);
        l.inside = mask.inside.clone();
        if mode == BoundaryMode::Fitted {
            l.offsets = mask.offsets.clone();
        }
        l
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn center(&self, c: usize) -> (f64, f64) {
        let (i, j) = self.ij(c);
        (self.x0 + (i as f64 + 0.5) * self.hx, self.y0 + (j as f64 + 0.5) * self.hy)
    }

    /// Neighbour cell, or `None` past a non-periodic x edge.
    pub fn neighbor(&self, c: usize, d: usize) -> Option<usize> {
        let (i, j) = self.ij(c);
        let (di, dj) = DIRS[d];
        let ni = i as isize + di;
        let ni = if self.periodic_x {
            ni.rem_euclid(self.nx as isize) as usize
        } else if ni < 0 || ni >= self.nx as isize {
            return None;
        } else {
            ni as usize
        };
        let nj = (j as isize + dj).rem_euclid(self.ny as isize) as usize;
        Some(self.idx(ni, nj))
    }
}

/// Interior numbering plus the operator pieces and their couplings to boundary values.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub dofs: Vec<usize>,
    pub dof_of: Vec<Option<usize>>,
    pub lap: Csr<f64>,
    pub dx: Csr<f64>,
    pub points: Vec<BoundaryPoint>,
    lap_bnd: Vec<Vec<(usize, f64)>>,
    dx_bnd: Vec<Vec<(usize, f64)>>,
}

fn axis_weights(tm: f64, tp: f64, h: f64) -> ([f64; 3], [f64; 3]) {
    // order: minus neighbour, centre, plus neighbour
    let s = tm + tp;
    let lap = [2.0 / (h * h * tm * s), -2.0 / (h * h * tm * tp), 2.0 / (h * h * tp * s)];
    let dx = [-tp / (h * tm * s), (tp - tm) / (h * tm * tp), tm / (h * tp * s)];
    (lap, dx)
}

impl Discretization {
    pub fn new(lat: &Lattice) -> Result<Self> {
        let dofs: Vec<usize> = (0..lat.len()).filter(|&c| lat.inside[c]).collect();
        if dofs.is_empty() {
            return Err(Error::EmptyInterior);
        }
        let mut dof_of = vec![None; lat.len()];
        for (k, &c) in dofs.iter().enumerate() {
            dof_of[c] = Some(k);
        }
        let mut points = Vec::new();
        let mut lap_rows = Vec::with_capacity(dofs.len());
        let mut dx_rows = Vec::with_capacity(dofs.len());
        let mut lap_bnd = Vec::with_capacity(dofs.len());
        let mut dx_bnd = Vec::with_capacity(dofs.len());
        for (k, &c) in dofs.iter().enumerate() {
            let (cx, cy) = lat.center(c);
            let j = lat.ij(c).1;
            let mut theta = [1.0; 4];
            let mut nb: [Option<BoundaryRef>; 4] = [None; 4];
            let mut nb_dof: [Option<usize>; 4] = [None; 4];
            for d in 0..4 {
                match lat.neighbor(c, d) {
                    Some(n) if lat.inside[n] => nb_dof[d] = dof_of[n],
                    Some(n) => {
                        theta[d] = lat.offsets[c][d];
                        nb[d] = Some(BoundaryRef::Cell(n));
                    }
                    None => {
                        theta[d] = 0.5;
                        nb[d] = Some(if d == 0 { BoundaryRef::Left(j) } else { BoundaryRef::Right(j) });
                    }
                }
            }
            let (lx, dxw) = axis_weights(theta[0], theta[1], lat.hx);
            let (ly, _) = axis_weights(theta[2], theta[3], lat.hy);
            let mut lr = vec![(k, lx[1] + ly[1])];
            let mut dr = vec![(k, dxw[1])];
            let mut lb = Vec::new();
            let mut db = Vec::new();
            let weights = [(lx[0], dxw[0]), (lx[2], dxw[2]), (ly[0], 0.0), (ly[2], 0.0)];
            for d in 0..4 {
                let (wl, wd) = weights[d];
                if let Some(n) = nb_dof[d] {
                    lr.push((n, wl));
                    if wd != 0.0 {
                        dr.push((n, wd));
                    }
                } else if let Some(target) = nb[d] {
                    let h = if d < 2 { lat.hx } else { lat.hy };
                    let (ux, uy) = (DIRS[d].0 as f64, DIRS[d].1 as f64);
                    let p = points.len();
                    points.push(BoundaryPoint { target, x: cx + ux * theta[d] * h, y: cy + uy * theta[d] * h });
                    lb.push((p, wl));
                    if wd != 0.0 {
                        db.push((p, wd));
                    }
                }
            }
            lap_rows.push(lr);
            dx_rows.push(dr);
            lap_bnd.push(lb);
            dx_bnd.push(db);
        }
        Ok(Self { dofs, dof_of, lap: Csr::from_rows(lap_rows), dx: Csr::from_rows(dx_rows), points, lap_bnd, dx_bnd })
    }

    pub fn n(&self) -> usize {
        self.dofs.len()
    }

    pub fn operator(&self, kind: OperatorKind) -> Csr<f64> {
        match kind {
            OperatorKind::Laplacian => self.lap.clone(),
            OperatorKind::Dx => self.dx.clone(),
            OperatorKind::Lrho(rho) => Csr::combine(&[(1.0, &self.lap), (2.0 * rho, &self.dx)], rho * rho),
        }
    }

    /// Contribution of known boundary values to each interior row of L_rho.
    pub fn boundary_term(&self, rho: f64, values: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|k| {
                let a: f64 = self.lap_bnd[k].iter().map(|&(p, w)| w * values[p]).sum();
                let b: f64 = self.dx_bnd[k].iter().map(|&(p, w)| w * values[p]).sum();
                a + 2.0 * rho * b
            })
            .collect()
    }

    /// Interior vector to a full cell array (zero outside).
    pub fn scatter(&self, u: &[f64], len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (k, &c) in self.dofs.iter().enumerate() {
            out[c] = u[k];
        }
        out
    }

    pub fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.dofs.iter().map(|&c| full[c]).collect()
    }
}

/// Matrix of an operator over the inside cells of a mask, Dirichlet-0 outside.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub matrix: Csr<f64>,
    pub dofs: Vec<usize>,
}

pub fn assemble(mask: &DomainMask, kind: OperatorKind, mode: BoundaryMode) -> Result<OperatorMatrix> {
    let disc = Discretization::new(&Lattice::from_mask(mask, mode))?;
    Ok(OperatorMatrix { kind, matrix: disc.operator(kind), dofs: disc.dofs })
}

/// Periodic operator on every cell of the torus.
pub fn torus_operator(grid: &Grid, kind: OperatorKind) -> Csr<f64> {
    Discretization::new(&Lattice::torus(grid)).expect("torus has cells").operator(kind)
}

/// Applies the periodic operator to a field.
pub fn apply_torus(field: &GridField, kind: OperatorKind) -> GridField {
    let g = field.grid;
    let (hx2, hy2) = (g.hx * g.hx, g.hy * g.hy);
    let (lap_w, dx_w, diag) = match kind {
        OperatorKind::Laplacian => (1.0, 0.0, 0.0),
        OperatorKind::Dx => (0.0, 1.0, 0.0),
        OperatorKind::Lrho(r) => (1.0, 2.0 * r, r * r),
    };
    let v = &field.values;
    let values = (0..g.len())
        .map(|c| {
            let l = v[g.shift(c, -1, 0)];
            let r = v[g.shift(c, 1, 0)];
            let d = v[g.shift(c, 0, -1)];
            let u = v[g.shift(c, 0, 1)];
            let lap = (l - 2.0 * v[c] + r) / hx2 + (d - 2.0 * v[c] + u) / hy2;
            let dx = (r - l) / (2.0 * g.hx);
            lap_w * lap + dx_w * dx + diag * v[c]
        })
        .collect();
    GridField { grid: g, values }
}

/// Solution of the Dirichlet problem for L_rho on a lattice, with source density `f` on the
/// inside cells and boundary values produced by `g`.
#[derive(Clone, Debug)]
pub struct DirichletSolution {
    pub values: Vec<f64>,
    pub residual: f64,
}

pub fn solve_lrho(lat: &Lattice, rho: f64, source: Option<&[f64]>, g: impl Fn(&BoundaryPoint) -> f64) -> Result<DirichletSolution> {
    let disc = Discretization::new(lat)?;
    let a = disc.operator(OperatorKind::Lrho(rho));
    let bvals: Vec<f64> = disc.points.iter().map(&g).collect();
    let bt = disc.boundary_term(rho, &bvals);
    let rhs: Vec<f64> = (0..disc.n()).map(|k| source.map_or(0.0, |s| s[disc.dofs[k]]) - bt[k]).collect();
    let (u, residual) = SparseLu::new(&a)?.solve(&rhs)?;
    Ok(DirichletSolution { values: disc.scatter(&u, lat.len()), residual })
}

/// Laplace Dirichlet problem on a torus mask; `data` is read at the outside neighbour of each
/// crossing and applied at the crossing.
pub fn solve_dirichlet(mask: &DomainMask, data: &GridField, mode: BoundaryMode) -> Result<GridField> {
    let lat = Lattice::from_mask(mask, mode);
    let sol = solve_lrho(&lat, 0.0, None, |p| match p.target {
        BoundaryRef::Cell(c) => data.values[c],
        _ => 0.0,
    })?;
    let mut values = sol.values;
    for c in 0..mask.grid.len() {
        if !mask.inside[c] {
            values[c] = data.values[c];
        }
    }
    Ok(GridField { grid: mask.grid, values })
}

/// Harmonic measure at `z0` of the boundary points selected by `target`.
pub fn harmonic_measure(lat: &Lattice, target: impl Fn(&BoundaryPoint) -> bool, z0: usize) -> Result<f64> {
    let disc = Discretization::new(lat)?;
    if !disc.points.iter().any(&target) {
        return Err(Error::TargetEmpty);
    }
    if !lat.inside[z0] {
        return Err(Error::Parse("z0 is not an inside cell".into()));
    }
    let sol = solve_lrho(lat, 0.0, None, |p| if target(p) { 1.0 } else { 0.0 })?;
    Ok(sol.values[z0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_domain;
    use crate::grid::TorusSpec;
    use crate::shape::{Primitive, ShapeExpr};
    use std::f64::consts::PI;

    fn grid(n: usize) -> Grid {
        Grid::new(TorusSpec::new(2f64.ln()).unwrap(), n, n).unwrap()
    }

    #[test]
    fn periodic_laplacian_rows_sum_to_zero() {
        let a = torus_operator(&grid(12), OperatorKind::Laplacian);
        for i in 0..a.n {
            let s: f64 = a.row(i).map(|e| e.1).sum();
            assert!(s.abs() < 1e-8 * a.norm_inf());
        }
    }

    #[test]
    fn lrho_of_constant() {
        let g = grid(16);
        let f = apply_torus(&GridField::constant(g, 3.0), OperatorKind::Lrho(1.7));
        assert!(f.values.iter().all(|v| (v - 3.0 * 1.7 * 1.7).abs() < 1e-9));
        let a = torus_operator(&g, OperatorKind::Lrho(1.7));
        let m = a.matvec(&vec![3.0; g.len()]);
        assert!(m.iter().all(|v| (v - 3.0 * 1.7 * 1.7).abs() < 1e-8));
    }

    #[test]
    fn adjoint_is_negated_rho() {
        let g = grid(10);
        let a = torus_operator(&g, OperatorKind::Lrho(0.8)).transpose();
        let b = torus_operator(&g, OperatorKind::Lrho(-0.8));
        for i in 0..a.n {
            for (j, v) in a.row(i) {
                assert!((v - b.get(i, j)).abs() < 1e-9 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn fitted_weights_reduce_to_centred() {
        let (l, d) = axis_weights(1.0, 1.0, 0.5);
        assert_eq!(l, [4.0, -8.0, 4.0]);
        assert_eq!(d, [-1.0, 0.0, 1.0]);
        // exact on quadratics for any offsets
        let (l, d) = axis_weights(0.3, 0.8, 0.1);
        let q = |t: f64| 2.0 + 3.0 * t + 5.0 * t * t;
        let vals = [q(-0.03), q(0.0), q(0.08)];
        let lap: f64 = l.iter().zip(vals).map(|(w, v)| w * v).sum();
        let dx: f64 = d.iter().zip(vals).map(|(w, v)| w * v).sum();
        assert!((lap - 10.0).abs() < 1e-9);
        assert!((dx - 3.0).abs() < 1e-9);
    }

    #[test]
    fn linear_profile_across_strip() {
        let spec = TorusSpec::new(2f64.ln()).unwrap();
        let m = build_domain(spec, 16, 64, &ShapeExpr::new().union(Primitive::Strip { ymin: 0.0, ymax: PI })).unwrap();
        let data = GridField::from_fn(m.grid, |_, y| if y < -PI / 2.0 { 1.0 } else { 0.0 });
        let u = solve_dirichlet(&m, &data, BoundaryMode::Fitted).unwrap();
        for c in m.inside_cells() {
            let (_, y) = m.grid.center(c);
            assert!((u.values[c] - y / PI).abs() < 1e-10);
        }
    }
}
