//! Rasterised torus domains, their components and spiral classification.

use crate::error::{Error, Result};
use crate::grid::{Grid, TorusSpec};
use crate::shape::ShapeExpr;
use std::collections::VecDeque;

/// Neighbour directions in the order -x, +x, -y, +y.
pub const DIRS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpiralKind {
    NotConnected,
    Connected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpiralClass {
    pub kind: SpiralKind,
    /// Minimal |n1| over cycles of the component (0 when not connected).
    pub k: u32,
    /// y-winding of a realising cycle, reduced to the smallest representative.
    pub y_winding: i64,
    /// Set when the detection window could not settle the answer.
    pub inconclusive: bool,
}

impl SpiralClass {
    pub fn is_connected(&self) -> bool {
        self.kind == SpiralKind::Connected
    }

    fn not_connected() -> Self {
        Self { kind: SpiralKind::NotConnected, k: 0, y_winding: 0, inconclusive: false }
    }
}

/// A rasterised open subset of the torus.
///
/// `offsets[c][d]` is the distance, in units of the spacing along direction `d`, from the
/// centre of inside cell `c` to the boundary crossing toward its outside neighbour. Masks
/// built from a shape carry fitted values in (0, 1]; masks built from raw cells put the
/// crossing on the cell face (0.5).
#[derive(Clone, Debug)]
pub struct DomainMask {
    pub grid: Grid,
    pub inside: Vec<bool>,
    pub labels: Vec<Option<usize>>,
    pub n_components: usize,
    pub spiral: Vec<SpiralClass>,
    pub offsets: Vec<[f64; 4]>,
}

const MIN_OFFSET: f64 = 1e-3;

fn label_components(grid: &Grid, inside: &[bool]) -> (Vec<Option<usize>>, usize) {
    let mut labels = vec![None; grid.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..grid.len() {
        if !inside[start] || labels[start].is_some() {
            continue;
        }
        labels[start] = Some(count);
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            for &(di, dj) in &DIRS {
                let n = grid.shift(c, di, dj);
                if inside[n] && labels[n].is_none() {
                    labels[n] = Some(count);
                    queue.push_back(n);
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

fn boundary_offset(grid: &Grid, shape: &ShapeExpr, c: usize, d: usize) -> f64 {
    let (x, y) = grid.center(c);
    let (dx, dy) = (DIRS[d].0 as f64 * grid.hx, DIRS[d].1 as f64 * grid.hy);
    let p = grid.period();
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if shape.contains(x + mid * dx, y + mid * dy, p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).clamp(MIN_OFFSET, 1.0)
}

/// Rasterises `shape`: a cell is inside iff its centre is inside.
pub fn build_domain(spec: TorusSpec, nx: usize, ny: usize, shape: &ShapeExpr) -> Result<DomainMask> {
    let grid = Grid::new(spec, nx, ny)?;
    let inside: Vec<bool> = (0..grid.len())
        .map(|c| {
            let (x, y) = grid.center(c);
            shape.contains(x, y, spec.period)
        })
        .collect();
    let mut mask = DomainMask::from_cells(grid, inside)?;
    for c in 0..grid.len() {
        if !mask.inside[c] {
            continue;
        }
        for d in 0..4 {
            let n = grid.shift(c, DIRS[d].0, DIRS[d].1);
            if !mask.inside[n] {
                mask.offsets[c][d] = boundary_offset(&grid, shape, c, d);
            }
        }
    }
    Ok(mask)
}

impl DomainMask {
    /// Mask from raw cell flags, with unit boundary offsets.
    pub fn from_cells(grid: Grid, inside: Vec<bool>) -> Result<Self> {
        assert_eq!(inside.len(), grid.len());
        let n_inside = inside.iter().filter(|&&b| b).count();
        if n_inside == 0 {
            return Err(Error::EmptyDomain);
        }
        if n_inside == grid.len() {
            return Err(Error::AllCellsInside);
        }
        let (labels, n_components) = label_components(&grid, &inside);
        let mut mask = Self { grid, inside, labels, n_components, spiral: Vec::new(), offsets: vec![[1.0; 4]; grid.len()] };
        for c in 0..grid.len() {
            let nb = [grid.shift(c, -1, 0), grid.shift(c, 1, 0), grid.shift(c, 0, -1), grid.shift(c, 0, 1)];
            for (d, &n) in nb.iter().enumerate() {
                if mask.inside[c] != mask.inside[n] {
                    mask.offsets[c][d] = 0.5;
                }
            }
        }
        mask.spiral = (0..n_components).map(|k| period_lattice(&mask, k)).collect();
        Ok(mask)
    }

    pub fn n_inside(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn inside_cells(&self) -> Vec<usize> {
        (0..self.grid.len()).filter(|&c| self.inside[c]).collect()
    }

    pub fn component_cells(&self, k: usize) -> Vec<usize> {
        (0..self.grid.len()).filter(|&c| self.labels[c] == Some(k)).collect()
    }

    /// Cells of the mask that lie at 4-neighbour graph distance <= `width` from the complement.
    pub fn boundary_layer(&self, width: usize) -> Vec<bool> {
        let mut dist = vec![usize::MAX; self.grid.len()];
        let mut queue = VecDeque::new();
        for c in 0..self.grid.len() {
            if !self.inside[c] {
                dist[c] = 0;
                queue.push_back(c);
            }
        }
        while let Some(c) = queue.pop_front() {
            if dist[c] >= width {
                continue;
            }
            for &(di, dj) in &DIRS {
                let n = self.grid.shift(c, di, dj);
                if dist[n] == usize::MAX {
                    dist[n] = dist[c] + 1;
                    queue.push_back(n);
                }
            }
        }
        (0..self.grid.len()).map(|c| self.inside[c] && dist[c] <= width).collect()
    }

    /// Sub-mask holding one component, keeping fitted offsets.
    pub fn component_mask(&self, k: usize) -> DomainMask {
        let inside: Vec<bool> = self.labels.iter().map(|l| *l == Some(k)).collect();
        let mut m = DomainMask::from_cells(self.grid, inside).expect("component of a valid mask");
        for c in 0..self.grid.len() {
            if m.inside[c] {
                m.offsets[c] = self.offsets[c];
            }
        }
        m
    }

    /// Whole-cell translation with wrap-around.
    pub fn translated(&self, di: isize, dj: isize) -> DomainMask {
        let g = self.grid;
        let mut inside = vec![false; g.len()];
        let mut offsets = vec![[1.0; 4]; g.len()];
        for c in 0..g.len() {
            let t = g.shift(c, di, dj);
            inside[t] = self.inside[c];
            offsets[t] = self.offsets[c];
        }
        let mut m = DomainMask::from_cells(g, inside).expect("translate keeps validity");
        m.offsets = offsets;
        m
    }

    /// Image under (x, y) -> (-x, -y).
    pub fn reflected(&self) -> DomainMask {
        let g = self.grid;
        let mut inside = vec![false; g.len()];
        let mut offsets = vec![[1.0; 4]; g.len()];
        for c in 0..g.len() {
            let (i, j) = g.ij(c);
            let t = g.idx(g.nx - 1 - i, g.ny - 1 - j);
            inside[t] = self.inside[c];
            let o = self.offsets[c];
            offsets[t] = [o[1], o[0], o[3], o[2]];
        }
        let mut m = DomainMask::from_cells(g, inside).expect("reflection keeps validity");
        m.offsets = offsets;
        m
    }

    /// One-cell (4-neighbour) dilation; offsets reset to cell level.
    pub fn dilated(&self) -> Result<DomainMask> {
        let g = self.grid;
        let inside = (0..g.len()).map(|c| self.inside[c] || DIRS.iter().any(|&(di, dj)| self.inside[g.shift(c, di, dj)])).collect();
        DomainMask::from_cells(g, inside)
    }

    /// One-cell (4-neighbour) erosion; offsets reset to cell level.
    pub fn eroded(&self) -> Result<DomainMask> {
        let g = self.grid;
        let inside = (0..g.len()).map(|c| self.inside[c] && DIRS.iter().all(|&(di, dj)| self.inside[g.shift(c, di, dj)])).collect();
        DomainMask::from_cells(g, inside)
    }

    pub fn is_subset_of(&self, other: &DomainMask) -> bool {
        self.grid == other.grid && (0..self.grid.len()).all(|c| !self.inside[c] || other.inside[c])
    }

    /// 0/1 CSV, one grid row (fixed y) per line, rows ordered by increasing y.
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut s = String::with_capacity(g.len() * 2);
        for j in 0..g.ny {
            let row: Vec<&str> = (0..g.nx).map(|i| if self.inside[g.idx(i, j)] { "1" } else { "0" }).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(spec: TorusSpec, text: &str) -> Result<DomainMask> {
        let rows: Vec<Vec<bool>> = text
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| {
                l.split(',')
                    .map(|t| match t.trim() {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(Error::Parse(format!("mask entry '{other}'"))),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<_>>()?;
        let ny = rows.len();
        let nx = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != nx) {
            return Err(Error::Parse("ragged mask rows".into()));
        }
        let grid = Grid::new(spec, nx, ny)?;
        DomainMask::from_cells(grid, rows.into_iter().flatten().collect())
    }
}

/// Sub-masks, one per component.
pub fn components(mask: &DomainMask) -> Vec<DomainMask> {
    (0..mask.n_components).map(|k| mask.component_mask(k)).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

/// Lattice of translations (n1, n1') carried by closed loops of a component, in the form
/// spanned by (k, l) and (0, m).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PeriodLattice {
    pub k: i64,
    pub l: i64,
    pub m: i64,
}

impl PeriodLattice {
    fn add(&mut self, a: i64, b: i64) {
        if a == 0 {
            self.m = gcd(self.m, b);
        } else if self.k == 0 {
            self.k = a;
            self.l = b;
        } else {
            let (g, s, t) = ext_gcd(self.k, a);
            let rest = (a / g) * self.l - (self.k / g) * b;
            self.l = s * self.l + t * b;
            self.k = g;
            self.m = gcd(self.m, rest);
        }
        if self.k < 0 {
            self.k = -self.k;
            self.l = -self.l;
        }
        if self.m != 0 {
            self.l = self.l.rem_euclid(self.m);
            if 2 * self.l > self.m {
                self.l -= self.m;
            }
        }
    }
}

/// Exact homology of a component: every non-tree edge of a breadth-first lift closes a loop
/// whose translation vector is recorded.
pub fn component_lattice(mask: &DomainMask, comp: usize) -> PeriodLattice {
    let g = mask.grid;
    let (nx, ny) = (g.nx as i64, g.ny as i64);
    let mut lift: Vec<Option<(i64, i64)>> = vec![None; g.len()];
    let mut lat = PeriodLattice::default();
    let Some(root) = (0..g.len()).find(|&c| mask.labels[c] == Some(comp)) else {
        return lat;
    };
    let (ri, rj) = g.ij(root);
    lift[root] = Some((ri as i64, rj as i64));
    let mut queue = VecDeque::from([root]);
    while let Some(c) = queue.pop_front() {
        let (ci, cj) = lift[c].unwrap();
        for &(di, dj) in &DIRS {
            let n = g.shift(c, di, dj);
            if mask.labels[n] != Some(comp) {
                continue;
            }
            let (li, lj) = (ci + di as i64, cj + dj as i64);
            match lift[n] {
                None => {
                    lift[n] = Some((li, lj));
                    queue.push_back(n);
                }
                Some((oi, oj)) => {
                    let (a, b) = ((li - oi) / nx, (lj - oj) / ny);
                    if a != 0 || b != 0 {
                        lat.add(a, b);
                    }
                }
            }
        }
    }
    lat
}

fn period_lattice(mask: &DomainMask, comp: usize) -> SpiralClass {
    let lat = component_lattice(mask, comp);
    if lat.k == 0 {
        SpiralClass::not_connected()
    } else {
        SpiralClass { kind: SpiralKind::Connected, k: lat.k as u32, y_winding: lat.l, inconclusive: false }
    }
}

/// Window-lift classification: each component is lifted to `window_periods` copies in x and
/// in y, and the smallest x-translate of a representative cell reachable inside the lift
/// gives k.
pub fn classify_spiral(mask: &DomainMask, window_periods: usize) -> Result<Vec<SpiralClass>> {
    if window_periods < 2 {
        return Err(Error::WindowTooSmall(format!("window_periods = {window_periods} < 2")));
    }
    let g = mask.grid;
    let w = window_periods;
    let (wx, wy) = (w * g.nx, w * g.ny);
    let torus_cell = |a: usize, b: usize| g.idx(a % g.nx, b % g.ny);
    let mut out = Vec::with_capacity(mask.n_components);
    for comp in 0..mask.n_components {
        let cells = mask.component_cells(comp);
        let rep = *cells.iter().max_by_key(|&&c| (g.ij(c).0, std::cmp::Reverse(c))).unwrap();
        let (ri, rj) = g.ij(rep);
        let b0 = w / 2;
        let start = (ri, rj + b0 * g.ny);
        let mut seen = vec![false; wx * wy];
        let mut queue = VecDeque::from([start]);
        seen[start.1 * wx + start.0] = true;
        let mut touches_x_edge = false;
        let mut best: Option<(usize, i64)> = None;
        while let Some((a, b)) = queue.pop_front() {
            if a == 0 || a == wx - 1 {
                touches_x_edge = true;
            }
            if a % g.nx == ri && b % g.ny == rj && a > ri {
                let k = (a - ri) / g.nx;
                let l = (b / g.ny) as i64 - b0 as i64;
                if best.is_none_or(|(bk, bl)| (k, l.abs()) < (bk, bl.abs())) {
                    best = Some((k, l));
                }
            }
            for &(di, dj) in &DIRS {
                let na = a as isize + di;
                let nb = b as isize + dj;
                if na < 0 || nb < 0 || na >= wx as isize || nb >= wy as isize {
                    continue;
                }
                let (na, nb) = (na as usize, nb as usize);
                let id = nb * wx + na;
                if !seen[id] && mask.labels[torus_cell(na, nb)] == Some(comp) {
                    seen[id] = true;
                    queue.push_back((na, nb));
                }
            }
        }
        out.push(match best {
            Some((k, l)) => SpiralClass { kind: SpiralKind::Connected, k: k as u32, y_winding: l, inconclusive: false },
            None => SpiralClass { inconclusive: touches_x_edge, ..SpiralClass::not_connected() },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Primitive;
    use std::f64::consts::PI;

    fn spec() -> TorusSpec {
        TorusSpec::new(2f64.ln()).unwrap()
    }

    fn strip(w: f64) -> ShapeExpr {
        ShapeExpr::new().union(Primitive::Strip { ymin: -w, ymax: w })
    }

    #[test]
    fn strip_is_one_spiral_component() {
        let m = build_domain(spec(), 32, 32, &strip(PI / 4.0)).unwrap();
        assert_eq!(m.n_components, 1);
        assert_eq!(m.spiral[0], SpiralClass { kind: SpiralKind::Connected, k: 1, y_winding: 0, inconclusive: false });
        assert_eq!(classify_spiral(&m, 4).unwrap()[0].k, 1);
    }

    #[test]
    fn band_is_not_spiral() {
        let p = spec().period;
        let e = ShapeExpr::new().union(Primitive::Band { xmin: p / 4.0, xmax: 3.0 * p / 4.0 });
        let m = build_domain(spec(), 32, 32, &e).unwrap();
        assert_eq!(m.spiral[0].kind, SpiralKind::NotConnected);
        let w = classify_spiral(&m, 4).unwrap();
        assert_eq!(w[0].kind, SpiralKind::NotConnected);
        assert!(!w[0].inconclusive);
    }

    #[test]
    fn band_plus_strip_is_one_component() {
        let p = spec().period;
        let e = ShapeExpr::new()
            .union(Primitive::Band { xmin: p / 4.0, xmax: 3.0 * p / 4.0 })
            .union(Primitive::Strip { ymin: -PI / 4.0, ymax: PI / 4.0 });
        let m = build_domain(spec(), 32, 32, &e).unwrap();
        assert_eq!(m.n_components, 1);
        assert!(m.spiral[0].is_connected());
    }

    #[test]
    fn tubes_report_their_winding() {
        for k in 1..=3 {
            let e = ShapeExpr::new().union(Primitive::Tube { k, l: 1, eps: 0.25 });
            let m = build_domain(spec(), 64, 64, &e).unwrap();
            assert_eq!(m.n_components, 1, "k = {k}");
            assert_eq!(m.spiral[0].k as i64, k);
            assert_eq!(m.spiral[0].y_winding, 1);
            let w = classify_spiral(&m, 4).unwrap();
            assert_eq!(w[0].k as i64, k);
            assert_eq!(w[0].y_winding, 1);
        }
    }

    #[test]
    fn full_rejected_empty_rejected() {
        let all = ShapeExpr::new().union(Primitive::Strip { ymin: -4.0, ymax: 4.0 });
        assert!(matches!(build_domain(spec(), 16, 16, &all), Err(Error::AllCellsInside)));
        let none = ShapeExpr::new().union(Primitive::Disc { cx: 0.3, cy: 0.0, r: 1e-4 });
        assert!(matches!(build_domain(spec(), 16, 16, &none), Err(Error::EmptyDomain)));
    }

    #[test]
    fn torus_minus_disc_has_both_cycles() {
        let e = ShapeExpr::new().union(Primitive::Strip { ymin: -4.0, ymax: 4.0 }).minus(Primitive::Disc { cx: 0.3, cy: 0.0, r: 0.2 });
        let m = build_domain(spec(), 32, 32, &e).unwrap();
        let lat = component_lattice(&m, 0);
        assert_eq!((lat.k, lat.m), (1, 1));
    }

    #[test]
    fn fitted_offsets_locate_strip_edges() {
        // 32 rows: the edge y = pi/4 sits half a cell above the last inside centre.
        let m = build_domain(spec(), 16, 32, &strip(PI / 4.0)).unwrap();
        let top = m.grid.idx(3, 19);
        assert!(m.inside[top] && !m.inside[m.grid.idx(3, 20)]);
        assert!((m.offsets[top][3] - 0.5).abs() < 1e-9);
        assert_eq!(m.offsets[top][0], 1.0);
    }

    #[test]
    fn csv_round_trip() {
        let m = build_domain(spec(), 16, 16, &strip(1.0)).unwrap();
        let back = DomainMask::from_csv(spec(), &m.to_csv()).unwrap();
        assert_eq!(back.inside, m.inside);
    }

    #[test]
    fn reflection_and_translation_preserve_class() {
        let e = ShapeExpr::new().union(Primitive::Tube { k: 2, l: 1, eps: 0.3 });
        let m = build_domain(spec(), 48, 48, &e).unwrap();
        let r = m.reflected();
        let t = m.translated(5, -7);
        for other in [&r, &t] {
            assert_eq!(other.spiral[0].k, m.spiral[0].k);
            assert_eq!(other.spiral[0].kind, m.spiral[0].kind);
        }
    }
}
