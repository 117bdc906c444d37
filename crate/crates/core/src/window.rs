//! Truncated lifts of torus masks to the log-plane.
//!
//! A window covers x in [lo*P, hi*P] and keeps y periodic, which is the log-coordinate
//! picture of a T-homogeneous plane domain with the origin and infinity cut off. The two
//! x edges carry Dirichlet data at the cell faces.

use crate::domain::{DomainMask, DIRS};
use crate::elliptic::{BoundaryMode, Lattice};
use crate::error::{Error, Result};
use crate::grid::Grid;
use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct LogWindow {
    pub grid: Grid,
    /// Window spans periods `lo..hi` in x.
    pub lo: i64,
    pub hi: i64,
    pub lattice: Lattice,
}

impl LogWindow {
    /// Lift of every inside cell of `mask` to the window.
    pub fn lift(mask: &DomainMask, lo: i64, hi: i64, mode: BoundaryMode) -> Result<Self> {
        if hi <= lo {
            return Err(Error::WindowTooSmall(format!("empty window {lo}..{hi}")));
        }
        let g = mask.grid;
        let periods = (hi - lo) as usize;
        let nx = periods * g.nx;
        let mut inside = vec![false; nx * g.ny];
        let mut offsets = vec![[1.0; 4]; nx * g.ny];
        for j in 0..g.ny {
            for i in 0..nx {
                let t = g.idx(i % g.nx, j);
                inside[j * nx + i] = mask.inside[t];
                if mode == BoundaryMode::Fitted {
                    offsets[j * nx + i] = mask.offsets[t];
                }
            }
        }
        let lattice = Lattice {
            nx,
            ny: g.ny,
            hx: g.hx,
            hy: g.hy,
            x0: lo as f64 * g.period(),
            y0: -std::f64::consts::PI,
            periodic_x: false,
            inside,
            offsets,
        };
        Ok(Self { grid: g, lo, hi, lattice })
    }

    /// Window cell of torus cell `c` in the period copy starting at x = copy*P.
    pub fn cell_of(&self, c: usize, copy: i64) -> usize {
        let (i, j) = self.grid.ij(c);
        let col = (copy - self.lo) as usize * self.grid.nx + i;
        self.lattice.idx(col, j)
    }

    /// Column whose left face is at x = k*P.
    pub fn column_at_period(&self, k: i64) -> usize {
        ((k - self.lo) as usize * self.grid.nx).min(self.lattice.nx - 1)
    }

    /// Connected piece of the lift containing `seed`.
    pub fn component_of(&self, seed: usize) -> Vec<bool> {
        let lat = &self.lattice;
        let mut keep = vec![false; lat.len()];
        if !lat.inside[seed] {
            return keep;
        }
        keep[seed] = true;
        let mut queue = VecDeque::from([seed]);
        while let Some(c) = queue.pop_front() {
            for d in 0..DIRS.len() {
                if let Some(n) = lat.neighbor(c, d) {
                    if lat.inside[n] && !keep[n] {
                        keep[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        keep
    }

    /// The window lattice restricted to `keep`.
    pub fn restricted(&self, keep: &[bool]) -> Lattice {
        let mut l = self.lattice.clone();
        for (c, k) in keep.iter().enumerate() {
            if !k {
                l.inside[c] = false;
            }
        }
        l
    }

    /// Rows of column `col` that are set in `keep`.
    pub fn column_rows(&self, keep: &[bool], col: usize) -> Vec<usize> {
        (0..self.lattice.ny).filter(|&j| keep[self.lattice.idx(col, j)]).collect()
    }
}

/// Maximal cyclic runs of consecutive rows, each listed from its first row upward.
pub fn cyclic_runs(rows: &[usize], ny: usize) -> Vec<Vec<usize>> {
    let mut set = vec![false; ny];
    for &r in rows {
        set[r] = true;
    }
    if set.iter().all(|&b| b) {
        return vec![(0..ny).collect()];
    }
    let mut runs = Vec::new();
    let start = (0..ny).find(|&j| !set[j]).unwrap_or(0);
    let mut cur: Vec<usize> = Vec::new();
    for t in 1..=ny {
        let j = (start + t) % ny;
        if set[j] {
            cur.push(j);
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_domain;
    use crate::grid::TorusSpec;
    use crate::shape::{Primitive, ShapeExpr};
    use std::f64::consts::PI;

    #[test]
    fn lift_repeats_mask() {
        let spec = TorusSpec::new(1.0).unwrap();
        let m = build_domain(spec, 8, 12, &ShapeExpr::new().union(Primitive::Disc { cx: 0.5, cy: 0.0, r: 0.4 })).unwrap();
        let w = LogWindow::lift(&m, -2, 1, BoundaryMode::Cells).unwrap();
        assert_eq!(w.lattice.nx, 24);
        for c in m.inside_cells() {
            for copy in -2..1 {
                assert!(w.lattice.inside[w.cell_of(c, copy)]);
            }
        }
        let (x, _) = w.lattice.center(w.cell_of(0, -2));
        assert!((x - (-2.0 + 1.0 / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn runs_wrap_around() {
        assert_eq!(cyclic_runs(&[0, 1, 5, 7], 8), vec![vec![5], vec![7, 0, 1]]);
        assert_eq!(cyclic_runs(&[0, 1, 2], 3).len(), 1);
        assert!(cyclic_runs(&[], 4).is_empty());
    }

    #[test]
    fn strip_lift_is_one_piece() {
        let spec = TorusSpec::new(2f64.ln()).unwrap();
        let m = build_domain(spec, 8, 12, &ShapeExpr::new().union(Primitive::Strip { ymin: -PI / 4.0, ymax: PI / 4.0 })).unwrap();
        let w = LogWindow::lift(&m, 0, 3, BoundaryMode::Fitted).unwrap();
        let seed = w.cell_of(m.inside_cells()[0], 0);
        let keep = w.component_of(seed);
        assert_eq!(keep.iter().filter(|&&b| b).count(), 3 * m.n_inside());
    }
}
