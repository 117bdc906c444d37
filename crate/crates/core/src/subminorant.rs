//! Maximal L_rho-subminorants of an obstacle, the set characteristic lambda = 1/rho, and the
//! existence and minimality criteria built on them.
//!
//! On the periodic five-point stencil, L_rho v >= 0 at a cell reads v_c <= sum a_n v_n / |d|
//! with positive neighbour weights a_n as long as rho * hx < 1. The map
//! T(v)_c = min(m_c, sum a_n v_n / |d|) is then monotone, so Gauss-Seidel sweeps of T from
//! v = m decrease to its greatest fixed point, which is the maximal subminorant. An
//! active-set solve polishes the limit to round-off.

use crate::domain::{build_domain, DomainMask};
use crate::elliptic::{apply_torus, OperatorKind};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::grid::Grid;
use crate::pencil::{rho_min, SpectrumOptions};
use crate::shape::{Primitive, ShapeExpr};
use crate::sparse::{Csr, SparseLu};
use crate::subfunction::{is_subfunction, Verdict};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubminorantStatus {
    Nonzero,
    IdenticallyZero,
    Diverged,
}

#[derive(Clone, Debug)]
pub struct SubminorantResult {
    pub m: GridField,
    pub rho: f64,
    pub v: GridField,
    pub contact: Vec<bool>,
    /// max over cells of |min(m - v, L_rho v / |d|)|.
    pub complementarity: f64,
    /// max(v - m) and max(-L_rho v / |d|), both ideally <= 0.
    pub infeasibility: f64,
    pub status: SubminorantStatus,
    pub sweeps: usize,
    pub polished: bool,
}

#[derive(Clone, Debug)]
pub struct SubminorantOptions {
    pub tol: f64,
    pub max_sweeps: usize,
    /// Iterates below -bound * (1 + max|m|) count as divergence.
    pub bound: f64,
    /// Relaxation factor in (0, 1]; values below 1 damp the sweeps.
    pub relaxation: f64,
}

impl Default for SubminorantOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_sweeps: 200_000, bound: 1e6, relaxation: 1.0 }
    }
}

struct Stencil {
    /// weights for -x, +x, -y, +y, divided by |d|
    w: [f64; 4],
    d: f64,
}

fn stencil(grid: &Grid, rho: f64) -> Result<Stencil> {
    let (hx, hy) = (grid.hx, grid.hy);
    if rho * hx >= 1.0 {
        return Err(Error::InvalidGrid(format!("rho * hx = {} must be below 1", rho * hx)));
    }
    let d = -2.0 / (hx * hx) - 2.0 / (hy * hy) + rho * rho;
    if d >= 0.0 {
        return Err(Error::InvalidGrid("diagonal of L_rho is not negative".into()));
    }
    let ad = d.abs();
    Ok(Stencil { w: [(1.0 / (hx * hx) - rho / hx) / ad, (1.0 / (hx * hx) + rho / hx) / ad, 1.0 / (hy * hy) / ad, 1.0 / (hy * hy) / ad], d })
}

fn neighbours(g: &Grid, c: usize) -> [usize; 4] {
    [g.shift(c, -1, 0), g.shift(c, 1, 0), g.shift(c, 0, -1), g.shift(c, 0, 1)]
}

/// L_rho v / |d| at every cell.
fn scaled_residual(v: &GridField, rho: f64, st: &Stencil) -> Vec<f64> {
    apply_torus(v, OperatorKind::Lrho(rho)).values.iter().map(|x| x / st.d.abs()).collect()
}

/// Solves v = m on the contact set and L_rho v = 0 elsewhere.
fn active_set_solve(m: &GridField, contact: &[bool], st: &Stencil) -> Result<GridField> {
    let g = m.grid;
    let rows: Vec<Vec<(usize, f64)>> = (0..g.len())
        .map(|c| {
            if contact[c] {
                vec![(c, 1.0)]
            } else {
                let nb = neighbours(&g, c);
                let mut r: Vec<(usize, f64)> = (0..4).map(|k| (nb[k], st.w[k])).collect();
                r.push((c, -1.0));
                r
            }
        })
        .collect();
    let rhs: Vec<f64> = (0..g.len()).map(|c| if contact[c] { m.values[c] } else { 0.0 }).collect();
    let (v, _) = SparseLu::new(&Csr::from_rows(rows))?.solve(&rhs)?;
    Ok(GridField { grid: g, values: v })
}

fn complementarity(m: &GridField, v: &GridField, r: &[f64]) -> (f64, f64) {
    let mut comp = 0.0f64;
    let mut infeas = f64::NEG_INFINITY;
    for c in 0..v.values.len() {
        let gap = m.values[c] - v.values[c];
        comp = comp.max(gap.min(r[c]).abs());
        infeas = infeas.max(-gap).max(-r[c]);
    }
    (comp, infeas)
}

/// Greatest v with v <= m and L_rho v >= 0 on the whole torus.
pub fn maximal_subminorant(m: &GridField, rho: f64, opts: &SubminorantOptions) -> Result<SubminorantResult> {
    let g = m.grid;
    let st = stencil(&g, rho)?;
    let scale = m.max_abs().max(1e-300);
    let floor = -opts.bound * (1.0 + m.max_abs());
    let mut v = m.clone();
    let mut sweeps = 0;
    let mut diverged = false;
    loop {
        let mut change = 0.0f64;
        for c in 0..g.len() {
            let nb = neighbours(&g, c);
            let s: f64 = (0..4).map(|k| st.w[k] * v.values[nb[k]]).sum();
            let t = m.values[c].min(s);
            let new = v.values[c] + opts.relaxation * (t - v.values[c]);
            change = change.max((new - v.values[c]).abs());
            v.values[c] = new;
        }
        sweeps += 1;
        if v.min() < floor {
            diverged = true;
            break;
        }
        if change <= 1e-3 * opts.tol.sqrt() * scale || change == 0.0 {
            break;
        }
        if sweeps >= opts.max_sweeps {
            return Err(Error::IterationLimit(sweeps));
        }
    }
    if diverged {
        let r = scaled_residual(&v, rho, &st);
        let (comp, infeas) = complementarity(m, &v, &r);
        return Ok(SubminorantResult {
            m: m.clone(),
            rho,
            contact: vec![false; g.len()],
            v,
            complementarity: comp,
            infeasibility: infeas,
            status: SubminorantStatus::Diverged,
            sweeps,
            polished: false,
        });
    }
    // active-set polish starting from the sweep limit
    let mut contact: Vec<bool> = (0..g.len()).map(|c| m.values[c] - v.values[c] <= 1e-6 * scale).collect();
    let mut polished = false;
    for _ in 0..50 {
        let Ok(w) = active_set_solve(m, &contact, &st) else { break };
        let r = scaled_residual(&w, rho, &st);
        let next: Vec<bool> = (0..g.len()).map(|c| m.values[c] - w.values[c] <= r[c]).collect();
        let (comp, _) = complementarity(m, &w, &r);
        let close = w.max_diff(&v) <= 1e-4 * scale + 1e-12;
        if next == contact && comp <= opts.tol * scale && close {
            v = w;
            polished = true;
            break;
        }
        if !close {
            break;
        }
        contact = next;
    }
    let r = scaled_residual(&v, rho, &st);
    let (comp, infeas) = complementarity(m, &v, &r);
    let contact: Vec<bool> = (0..g.len()).map(|c| (m.values[c] - v.values[c]).abs() <= opts.tol * scale).collect();
    let status = if v.max_abs() <= 1e-8 * scale { SubminorantStatus::IdenticallyZero } else { SubminorantStatus::Nonzero };
    Ok(SubminorantResult { m: m.clone(), rho, v, contact, complementarity: comp, infeasibility: infeas, status, sweeps, polished })
}

#[derive(Clone, Debug)]
pub struct LambdaValue {
    /// 1/rho per component, 0 when not connected on spirals.
    pub per_component: Vec<f64>,
    pub lambda: f64,
    pub inner: f64,
    pub outer: f64,
    /// Some component is not connected on spirals and contributes 0.
    pub non_spiral: bool,
}

fn lambda_of(mask: &DomainMask, opts: &SpectrumOptions) -> Result<(Vec<f64>, bool)> {
    let mut per = Vec::new();
    let mut non_spiral = false;
    for k in 0..mask.n_components {
        if !mask.spiral[k].is_connected() {
            non_spiral = true;
            per.push(0.0);
            continue;
        }
        let r = rho_min(&mask.component_mask(k), opts)?;
        per.push(match r.value {
            Some(v) => 1.0 / v,
            None if r.grid_limited => 0.0,
            None => return Err(Error::Inconclusive(format!("component {k} has no critical value"))),
        });
    }
    Ok((per, non_spiral))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

/// lambda of an open set, with the one-cell dilation and erosion as outer and inner values.
pub fn lambda(mask: &DomainMask, opts: &SpectrumOptions) -> Result<LambdaValue> {
    let (per, non_spiral) = lambda_of(mask, opts)?;
    let lam = max_of(&per);
    let outer = match mask.dilated() {
        Ok(d) => max_of(&lambda_of(&d, opts)?.0),
        Err(Error::AllCellsInside) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let inner = match mask.eroded() {
        Ok(e) => max_of(&lambda_of(&e, opts)?.0),
        Err(Error::EmptyDomain) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(LambdaValue { per_component: per, lambda: lam, inner: inner.min(lam), outer: outer.max(lam), non_spiral })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Existence {
    Guaranteed,
    Excluded,
    Borderline,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct ExistenceReport {
    pub verdict: Existence,
    pub lambda: Option<LambdaValue>,
    pub target: f64,
    pub nonnegative: bool,
}

/// Compares lambda of {m > 0} with 1/rho.
pub fn existence_test(m: &GridField, rho: f64, opts: &SpectrumOptions) -> Result<ExistenceReport> {
    let target = 1.0 / rho;
    let nonnegative = m.min() >= 0.0;
    let pos: Vec<bool> = m.values.iter().map(|&x| x > 0.0).collect();
    let mask = match DomainMask::from_cells(m.grid, pos) {
        Ok(mask) => mask,
        Err(Error::EmptyDomain) => return Ok(ExistenceReport { verdict: Existence::Excluded, lambda: None, target, nonnegative }),
        Err(Error::AllCellsInside) => {
            // m > 0 everywhere: its minimum is a positive constant subminorant
            return Ok(ExistenceReport { verdict: Existence::Guaranteed, lambda: None, target, nonnegative });
        }
        Err(e) => return Err(e),
    };
    let lam = lambda(&mask, opts)?;
    let margin = 0.02 * target;
    let verdict = if (lam.lambda - target).abs() <= margin {
        Existence::Borderline
    } else if lam.outer < target - margin {
        Existence::Excluded
    } else if nonnegative && lam.lambda > target + margin {
        Existence::Guaranteed
    } else {
        Existence::Undetermined
    };
    Ok(ExistenceReport { verdict, lambda: Some(lam), target, nonnegative })
}

#[derive(Clone, Debug)]
pub struct IntegralReport {
    /// Integral over y of m at each x column.
    pub slices: Vec<f64>,
    pub refuted: bool,
}

/// Per-column y-integrals of the obstacle; a negative one rules out any subminorant.
pub fn integral_condition(m: &GridField) -> IntegralReport {
    let g = m.grid;
    let slices: Vec<f64> = (0..g.nx).map(|i| (0..g.ny).map(|j| m.values[g.idx(i, j)]).sum::<f64>() * g.hy).collect();
    let tol = 1e-10 * (1.0 + m.max_abs()) * 2.0 * PI;
    let refuted = slices.iter().any(|&s| s < -tol);
    IntegralReport { slices, refuted }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Minimality {
    Minimal,
    Nonminimal,
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct MinimalityReport {
    pub verdict: Minimality,
    /// Cells of the harmonicity set {|L_rho v| <= tol}.
    pub harmonic_cells: usize,
    /// Critical values of the proper components of the harmonicity set.
    pub component_rhos: Vec<Option<f64>>,
    /// Description and critical value of the witness that decided minimality.
    pub witness: Option<(String, f64)>,
    pub reason: String,
}

pub fn minimality_test(v: &GridField, rho: f64, opts: &SpectrumOptions) -> Result<MinimalityReport> {
    let cert = is_subfunction(v, rho);
    if cert.verdict == Verdict::Not {
        return Err(Error::Inconclusive(format!("not a subfunction: min mass {:.3e}", cert.min_mass)));
    }
    let g = v.grid;
    let dens = cert.nu.density();
    let tol = cert.tol;
    let zero_tol = 1e-10 * (1.0 + v.max_abs());
    let base = MinimalityReport {
        verdict: Minimality::Undetermined,
        harmonic_cells: 0,
        component_rhos: Vec::new(),
        witness: None,
        reason: String::new(),
    };
    if v.min() > zero_tol {
        return Ok(MinimalityReport { verdict: Minimality::Nonminimal, reason: format!("v >= {:.3e} > 0", v.min()), ..base });
    }
    if dens.min() > tol {
        return Ok(MinimalityReport { verdict: Minimality::Nonminimal, reason: format!("L_rho v >= {:.3e} > 0", dens.min()), ..base });
    }
    let harm: Vec<bool> = dens.values.iter().map(|x| x.abs() <= tol).collect();
    let count = harm.iter().filter(|&&b| b).count();
    let mut report = MinimalityReport { harmonic_cells: count, ..base };
    let whole = count == g.len();
    if !whole && count > 0 {
        let mask = DomainMask::from_cells(g, harm.clone())?;
        for k in 0..mask.n_components {
            let rm = if mask.spiral[k].is_connected() { rho_min(&mask.component_mask(k), opts)?.value } else { None };
            report.component_rhos.push(rm);
            if let Some(r) = rm {
                if r < rho && report.witness.is_none() {
                    report.witness = Some((format!("component {k}"), r));
                }
            }
        }
    }
    if report.witness.is_none() && count > 0 {
        // sub-strips of the harmonicity set are witnesses too, since rho decreases with the set
        let hmask = if whole { None } else { Some(DomainMask::from_cells(g, harm)?) };
        for width in [PI / 2.0, PI, 1.5 * PI] {
            for centre in [0.0, PI / 2.0, PI, -PI / 2.0] {
                let strip = build_domain(
                    g.spec,
                    g.nx,
                    g.ny,
                    &ShapeExpr::new().union(Primitive::Strip { ymin: centre - width / 2.0, ymax: centre + width / 2.0 }),
                )?;
                if hmask.as_ref().is_some_and(|h| !strip.is_subset_of(h)) {
                    continue;
                }
                if let Some(r) = rho_min(&strip, opts)?.value {
                    if r < rho {
                        report.witness = Some((format!("strip of width {width:.4} centred at y = {centre:.4}"), r));
                        break;
                    }
                }
            }
            if report.witness.is_some() {
                break;
            }
        }
    }
    if let Some((w, r)) = &report.witness {
        report.verdict = Minimality::Minimal;
        report.reason = format!("{w} has critical value {r:.6} < {rho}");
    } else {
        report.reason = "no component of the harmonicity set is below rho".into();
    }
    Ok(report)
}
