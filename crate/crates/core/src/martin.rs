//! Martin function of a lifted component and four independent estimates of its growth order.
//!
//! The Martin function is approximated by ratios of harmonic measures of a far target on a
//! truncated lift. Growth is read from slice maxima, decay from the harmonic measure of
//! slices, and the conformal modulus and extremal distance from Dirichlet energies of 0/1
//! potentials across one or several period slabs.

use crate::domain::DomainMask;
use crate::elliptic::{solve_lrho, BoundaryMode, BoundaryRef, Lattice};
use crate::error::{Error, Result};
use crate::sparse::{Csr, SparseLu};
use crate::window::{cyclic_runs, LogWindow};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateMethod {
    Growth,
    HmDecay,
    Modulus,
    Extremal,
    Pencil,
}

impl EstimateMethod {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Growth => "growth",
            Self::HmDecay => "hm_decay",
            Self::Modulus => "modulus",
            Self::Extremal => "extremal",
            Self::Pencil => "pencil",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RhoEstimate {
    pub method: EstimateMethod,
    pub value: f64,
    pub ci: f64,
    pub n_range: (i64, i64),
}

/// Least-squares line through the points; returns slope, intercept, R^2 and the slope's
/// standard error.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let se = if xs.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, icpt, r2, se)
}

fn middle_half<T: Copy>(v: &[T]) -> Vec<T> {
    let n = v.len();
    if n < 4 {
        return v.to_vec();
    }
    v[n / 4..n - n / 4].to_vec()
}

fn check_component(mask: &DomainMask, comp: usize, z0: usize) -> Result<usize> {
    let class = mask.spiral.get(comp).ok_or_else(|| Error::Parse(format!("no component {comp}")))?;
    if !class.is_connected() {
        return Err(Error::Inconclusive(format!("component {comp} is not connected on spirals")));
    }
    if mask.labels[z0] != Some(comp) {
        return Err(Error::Parse(format!("z0 = {z0} is not in component {comp}")));
    }
    Ok(class.k as usize)
}

/// Approximate Martin function on a window x in [-nP, nP].
#[derive(Clone, Debug)]
pub struct MartinApprox {
    pub window: LogWindow,
    /// Cells of the lifted component of z0.
    pub component: Vec<bool>,
    pub h: Vec<f64>,
    /// Window cell of the base point, where h = 1.
    pub z0: usize,
    pub n_used: usize,
    /// x-period of the lifted component in units of P.
    pub period_mult: usize,
    /// Relative change of h on the middle third against the n-1 window.
    pub window_change: f64,
}

fn martin_raw(mask: &DomainMask, z0: usize, n: usize) -> Result<(LogWindow, Vec<bool>, Vec<f64>, usize)> {
    let w = LogWindow::lift(mask, -(n as i64), n as i64, BoundaryMode::Fitted)?;
    let z0w = w.cell_of(z0, 0);
    let keep = w.component_of(z0w);
    let col = w.lattice.nx - 1;
    let runs = cyclic_runs(&w.column_rows(&keep, col), w.lattice.ny);
    let arc = runs.into_iter().max_by_key(|r| r.len()).ok_or(Error::TargetEmpty)?;
    let cut = arc.len() / 6;
    let mut target = vec![false; w.lattice.ny];
    for &r in &arc[cut..arc.len() - cut] {
        target[r] = true;
    }
    let lat = w.restricted(&keep);
    let sol = solve_lrho(&lat, 0.0, None, |p| match p.target {
        BoundaryRef::Right(r) if target[r] => 1.0,
        _ => 0.0,
    })?;
    let base = sol.values[z0w];
    if !(base > 1e-300) {
        return Err(Error::UnderflowBeyondN(n));
    }
    let h = sol.values.iter().map(|v| v / base).collect();
    Ok((w, keep, h, z0w))
}

/// Martin function normalised at `z0` (a torus cell of `comp`), from a window of n periods
/// on each side.
pub fn martin_function(mask: &DomainMask, comp: usize, z0: usize, n: usize) -> Result<MartinApprox> {
    let k = check_component(mask, comp, z0)?;
    if n < 3 {
        return Err(Error::WindowTooSmall(format!("n = {n} < 3")));
    }
    let (w, keep, h, z0w) = martin_raw(mask, z0, n)?;
    let (w1, _, h1, _) = martin_raw(mask, z0, n - 1)?;
    let nx = mask.grid.nx;
    let third = (n - 1) as f64 * mask.grid.period() / 3.0;
    let (mut diff, mut top) = (0.0f64, 0.0f64);
    for c1 in 0..w1.lattice.len() {
        let (i, j) = w1.lattice.ij(c1);
        if w1.lattice.center(c1).0.abs() > third {
            continue;
        }
        let c = w.lattice.idx(i + nx, j);
        diff = diff.max((h[c] - h1[c1]).abs());
        top = top.max(h[c].abs());
    }
    let change = diff / top.max(f64::MIN_POSITIVE);
    if change > 0.02 {
        return Err(Error::WindowTooSmall(format!("H moved by {:.2}% between n = {} and n = {n}", 100.0 * change, n - 1)));
    }
    Ok(MartinApprox { window: w, component: keep, h, z0: z0w, n_used: n, period_mult: k, window_change: change })
}

impl MartinApprox {
    fn column_max(&self, col: usize) -> f64 {
        let lat = &self.window.lattice;
        (0..lat.ny).map(|j| lat.idx(col, j)).filter(|&c| self.component[c]).map(|c| self.h[c]).fold(0.0, f64::max)
    }

    /// Spread of H(x + kP, y) / H(x, y) over the middle third, k the component's period
    /// multiple: returns the mean ratio and the largest relative deviation from it.
    pub fn periodicity(&self) -> (f64, f64) {
        let lat = &self.window.lattice;
        let shift = self.period_mult * self.window.grid.nx;
        let third = self.n_used as f64 * self.window.grid.period() / 3.0;
        let mut ratios = Vec::new();
        for c in 0..lat.len() {
            let (i, j) = lat.ij(c);
            let x = lat.center(c).0;
            if !self.component[c] || x.abs() > third || i + shift >= lat.nx {
                continue;
            }
            let d = lat.idx(i + shift, j);
            let floor = 1e-8 * self.column_max(i);
            if self.component[d] && self.h[c] > floor {
                ratios.push(self.h[d] / self.h[c]);
            }
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
        let dev = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
        (mean, dev)
    }
}

/// Slope of log max H over slices at x = kP against x.
pub fn rho_from_growth(h: &MartinApprox) -> Result<RhoEstimate> {
    let n = h.n_used as i64;
    let ks: Vec<i64> = middle_half(&(-n + 1..n).collect::<Vec<_>>());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &k in &ks {
        let col = h.window.column_at_period(k);
        let m = h.column_max(col);
        if m > 0.0 {
            xs.push(h.window.lattice.center(h.window.lattice.idx(col, 0)).0);
            ys.push(m.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::FitUnstable(0.0));
    }
    let (slope, _, r2, se) = fit_line(&xs, &ys);
    if r2 < 0.99 {
        return Err(Error::FitUnstable(r2));
    }
    Ok(RhoEstimate { method: EstimateMethod::Growth, value: slope, ci: 2.0 * se, n_range: (ks[0], *ks.last().unwrap()) })
}

/// Harmonic measure at z0 of the whole slice x = nP, in the lift truncated to [-mP, nP].
pub fn slice_measures(mask: &DomainMask, comp: usize, z0: usize, n_max: usize, depth: usize) -> Result<Vec<(i64, f64)>> {
    check_component(mask, comp, z0)?;
    let mut out = Vec::new();
    for n in 1..=n_max as i64 {
        let w = LogWindow::lift(mask, -(depth as i64), n, BoundaryMode::Fitted)?;
        let z0w = w.cell_of(z0, 0);
        let keep = w.component_of(z0w);
        let lat = w.restricted(&keep);
        if w.column_rows(&keep, lat.nx - 1).is_empty() {
            return Err(Error::TargetEmpty);
        }
        let sol = solve_lrho(&lat, 0.0, None, |p| match p.target {
            BoundaryRef::Right(_) => 1.0,
            _ => 0.0,
        })?;
        let om = sol.values[z0w];
        if !(om > 1e-300) {
            break;
        }
        out.push((n, om));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct DecayReport {
    pub estimate: RhoEstimate,
    pub measures: Vec<(i64, f64)>,
    /// max/min of omega_n T^(n rho) over n in [3, 8].
    pub band_ratio: f64,
}

pub fn rho_from_hm_decay(mask: &DomainMask, comp: usize, z0: usize, n_max: usize) -> Result<DecayReport> {
    let meas = slice_measures(mask, comp, z0, n_max, n_max.max(4))?;
    if meas.len() < 3 {
        return Err(Error::UnderflowBeyondN(meas.len()));
    }
    let p = mask.grid.period();
    let used = middle_half(&meas);
    let xs: Vec<f64> = used.iter().map(|(n, _)| *n as f64 * p).collect();
    let ys: Vec<f64> = used.iter().map(|(_, w)| -w.ln()).collect();
    let (slope, _, _, se) = fit_line(&xs, &ys);
    let band: Vec<f64> = meas.iter().filter(|(n, _)| (3..=8).contains(n)).map(|(n, w)| w * (slope * *n as f64 * p).exp()).collect();
    let band_ratio = band.iter().cloned().fold(0.0, f64::max) / band.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(DecayReport {
        estimate: RhoEstimate { method: EstimateMethod::HmDecay, value: slope, ci: 2.0 * se, n_range: (used[0].0, used.last().unwrap().0) },
        measures: meas,
        band_ratio,
    })
}

/// Dirichlet energy of the 0/1 potential across the lift slab [0, periods*P] of `comp`, with
/// the potential 0 on the arc at x = 0, 1 on the far face and insulated sides.
pub fn slab_energy(mask: &DomainMask, comp: usize, periods: usize) -> Result<f64> {
    let w = LogWindow::lift(mask, 0, periods as i64, BoundaryMode::Cells)?;
    let lat = &w.lattice;
    let g = mask.grid;
    let mut in_comp = lat.inside.clone();
    for (c, b) in in_comp.iter_mut().enumerate() {
        let (i, j) = lat.ij(c);
        *b = *b && mask.labels[g.idx(i % g.nx, j)] == Some(comp);
    }
    let rows0: Vec<usize> = (0..lat.ny).filter(|&j| in_comp[lat.idx(0, j)]).collect();
    let runs = cyclic_runs(&rows0, lat.ny);
    let first = runs.first().ok_or(Error::NotSeparating)?;
    if first.len() == lat.ny {
        return Err(Error::NotSimplyConnected);
    }
    let sub = LogWindow { lattice: Lattice { inside: in_comp, ..lat.clone() }, ..w.clone() };
    let keep = sub.component_of(lat.idx(0, first[0]));
    if cyclic_runs(&sub.column_rows(&keep, 0), lat.ny).len() != 1 {
        return Err(Error::NotSeparating);
    }
    if sub.column_rows(&keep, lat.nx - 1).is_empty() {
        return Err(Error::NotSeparating);
    }
    fv_energy(&sub.restricted(&keep))
}

/// Finite-volume Dirichlet energy on the inside cells of a window lattice: potential 0 on
/// the left face, 1 on the right face, no flux elsewhere.
pub fn fv_energy(lat: &Lattice) -> Result<f64> {
    let dofs: Vec<usize> = (0..lat.len()).filter(|&c| lat.inside[c]).collect();
    let mut dof_of = vec![usize::MAX; lat.len()];
    for (k, &c) in dofs.iter().enumerate() {
        dof_of[c] = k;
    }
    let gx = lat.hy / lat.hx;
    let gy = lat.hx / lat.hy;
    let mut rows = Vec::with_capacity(dofs.len());
    let mut rhs = vec![0.0; dofs.len()];
    for (k, &c) in dofs.iter().enumerate() {
        let mut row = Vec::with_capacity(5);
        let mut diag = 0.0;
        for d in 0..4 {
            let cond = if d < 2 { gx } else { gy };
            match lat.neighbor(c, d) {
                Some(n) if lat.inside[n] => {
                    row.push((dof_of[n], -cond));
                    diag += cond;
                }
                Some(_) => {}
                None => {
                    diag += 2.0 * cond;
                    if d == 1 {
                        rhs[k] += 2.0 * cond;
                    }
                }
            }
        }
        row.push((k, diag));
        rows.push(row);
    }
    let (u, _) = SparseLu::new(&Csr::from_rows(rows))?.solve(&rhs)?;
    let mut energy = 0.0;
    for (k, &c) in dofs.iter().enumerate() {
        for d in [1, 3] {
            if let Some(n) = lat.neighbor(c, d) {
                if lat.inside[n] {
                    energy += (if d == 1 { gx } else { gy }) * (u[dof_of[n]] - u[k]).powi(2);
                }
            }
        }
        if lat.neighbor(c, 0).is_none() {
            energy += 2.0 * gx * u[k].powi(2);
        }
        if lat.neighbor(c, 1).is_none() {
            energy += 2.0 * gx * (1.0 - u[k]).powi(2);
        }
    }
    Ok(energy)
}

/// Conformal modulus of the one-period quadrilateral, converted to a growth order.
pub fn rho_from_modulus(mask: &DomainMask, comp: usize) -> Result<RhoEstimate> {
    let k = mask.spiral.get(comp).filter(|s| s.is_connected()).ok_or(Error::NotSeparating)?.k as usize;
    let modulus = 1.0 / slab_energy(mask, comp, k)?;
    Ok(RhoEstimate { method: EstimateMethod::Modulus, value: PI / (k as f64 * mask.grid.period()) * modulus, ci: 0.0, n_range: (1, 1) })
}

/// Slope in n of the extremal distance across n-period slabs.
pub fn rho_from_extremal(mask: &DomainMask, comp: usize, n_max: usize) -> Result<RhoEstimate> {
    let k = mask.spiral.get(comp).filter(|s| s.is_connected()).ok_or(Error::NotSeparating)?.k as usize;
    if n_max < 2 {
        return Err(Error::WindowTooSmall(format!("n_max = {n_max} < 2")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for n in 1..=n_max {
        xs.push(n as f64);
        ys.push(1.0 / slab_energy(mask, comp, n * k)?);
    }
    let (slope, _, _, se) = fit_line(&xs, &ys);
    let scale = PI / (k as f64 * mask.grid.period());
    Ok(RhoEstimate { method: EstimateMethod::Extremal, value: scale * slope, ci: 2.0 * scale * se, n_range: (1, n_max as i64) })
}

#[derive(Clone, Debug)]
pub struct BetaReport {
    pub terms: Vec<(i64, f64)>,
    pub beta: f64,
    pub diverging: bool,
}

/// max over n of (max of v on the slice x = nP of the lifted component) times the harmonic
/// measure of that slice seen from z0. `v` takes lift coordinates.
pub fn beta_functional(mask: &DomainMask, comp: usize, z0: usize, v: impl Fn(f64, f64) -> f64, n_max: usize) -> Result<BetaReport> {
    let meas = slice_measures(mask, comp, z0, n_max, n_max.max(4))?;
    let w = LogWindow::lift(mask, 0, n_max as i64 + 1, BoundaryMode::Fitted)?;
    let keep = w.component_of(w.cell_of(z0, 0));
    let lat = &w.lattice;
    let mut terms = Vec::new();
    for &(n, om) in &meas {
        let col = w.column_at_period(n);
        let vmax = (0..lat.ny)
            .map(|j| lat.idx(col, j))
            .filter(|&c| keep[c])
            .map(|c| {
                let (x, y) = lat.center(c);
                v(x, y)
            })
            .fold(0.0, f64::max);
        terms.push((n, vmax * om));
    }
    let beta = terms.iter().map(|t| t.1).fold(0.0, f64::max);
    let diverging = match (terms.first(), terms.last()) {
        (Some(a), Some(b)) => b.1 > 10.0 * a.1 && a.1 > 0.0,
        _ => false,
    };
    Ok(BetaReport { terms, beta, diverging })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_domain;
    use crate::grid::TorusSpec;
    use crate::shape::{Primitive, ShapeExpr};

    fn strip(p: f64, nx: usize, ny: usize, half: f64) -> DomainMask {
        build_domain(TorusSpec::new(p).unwrap(), nx, ny, &ShapeExpr::new().union(Primitive::Strip { ymin: -half, ymax: half })).unwrap()
    }

    #[test]
    fn unit_square_has_modulus_one() {
        // a pi x pi slab across the strip |y| < pi/2 on the torus with P = pi
        let m = strip(PI, 16, 16, PI / 2.0);
        let e = slab_energy(&m, 0, 1).unwrap();
        assert!((e - 1.0).abs() < 1e-12, "energy {e}");
    }

    #[test]
    fn fit_line_recovers_exact_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let (s, i, r2, se) = fit_line(&xs, &ys);
        assert!((s - 2.5).abs() < 1e-14 && (i + 1.0).abs() < 1e-14 && r2 > 0.999999 && se < 1e-12);
    }

    #[test]
    fn full_circle_is_not_simply_connected() {
        let m = build_domain(
            TorusSpec::new(1.0).unwrap(),
            8,
            8,
            &ShapeExpr::new().union(Primitive::Strip { ymin: -PI, ymax: PI }).minus(Primitive::Disc { cx: 0.5, cy: 0.0, r: 0.5 }),
        )
        .unwrap();
        assert!(matches!(slab_energy(&m, 0, 1), Err(Error::NotSimplyConnected)));
    }

    #[test]
    fn strip_estimators_are_close() {
        let m = strip(2f64.ln(), 16, 48, PI / 4.0);
        let z0 = m.grid.locate(0.01, 0.0);
        let h = martin_function(&m, 0, z0, 4).unwrap();
        let g = rho_from_growth(&h).unwrap();
        assert!((g.value - 2.0).abs() < 0.05, "growth {}", g.value);
        let (ratio, dev) = h.periodicity();
        assert!((ratio - 4.0).abs() < 0.1 && dev < 0.03, "{ratio} {dev}");
        let md = rho_from_modulus(&m, 0).unwrap();
        assert!((md.value - 2.0).abs() < 1e-9, "modulus {}", md.value);
        let ex = rho_from_extremal(&m, 0, 3).unwrap();
        assert!((ex.value - 2.0).abs() < 1e-9, "extremal {}", ex.value);
    }
}
