//! L_rho-subfunctions: certificates, the plane lift, mollification, Green functions of
//! subdomains, the Dirichlet problem, Riesz decomposition, sweeping, and the one-variable
//! rho-trigonometric case.

use crate::domain::DomainMask;
use crate::elliptic::{apply_torus, BoundaryMode, BoundaryRef, Discretization, Lattice, OperatorKind};
use crate::error::{Error, Result};
use crate::field::{GridField, GridMeasure};
use crate::fundsol::mass_tolerance;
use crate::sparse::SparseLu;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Subfunction,
    Borderline,
    Not,
}

#[derive(Clone, Debug)]
pub struct SubfunctionCertificate {
    pub rho: f64,
    /// L_rho v as a cell measure.
    pub nu: GridMeasure,
    /// Most negative density of nu.
    pub min_mass: f64,
    pub tol: f64,
    pub verdict: Verdict,
}

pub fn is_subfunction(v: &GridField, rho: f64) -> SubfunctionCertificate {
    let dens = apply_torus(v, OperatorKind::Lrho(rho));
    let tol = mass_tolerance(&v.grid, rho, v.max_abs());
    let min_mass = dens.min();
    let verdict = if min_mass >= -tol {
        Verdict::Subfunction
    } else if min_mass >= -2.0 * tol {
        Verdict::Borderline
    } else {
        Verdict::Not
    };
    SubfunctionCertificate { rho, nu: GridMeasure::from_density(&dens), min_mass, tol, verdict }
}

#[derive(Clone, Debug)]
pub struct LiftReport {
    /// max |V(x + P, y) e^{-rho P} - V(x, y)| relative to max |V|.
    pub periodicity_error: f64,
    /// min over cells where v is a subfunction of e^{-rho x} Delta_h V.
    pub min_scaled_laplacian: f64,
    /// Largest |e^{-rho x} Delta_h V - L_rho v|, the stencil discrepancy.
    pub discrepancy: f64,
    pub subharmonic: bool,
}

/// Lifts v to V = v e^{rho x} on `periods` copies and checks subharmonicity and the
/// multiplicative periodicity.
pub fn lift_check(v: &GridField, rho: f64, periods: usize) -> LiftReport {
    let g = v.grid;
    let nxw = periods.max(2) * g.nx;
    let big = |i: usize, j: usize| v.values[g.idx(i % g.nx, j)] * (rho * (i as f64 + 0.5) * g.hx).exp();
    let lv = apply_torus(v, OperatorKind::Lrho(rho));
    let tol = mass_tolerance(&g, rho, v.max_abs());
    let mut per = 0.0f64;
    let mut vmax = 0.0f64;
    let mut min_lap = f64::INFINITY;
    let mut disc = 0.0f64;
    for j in 0..g.ny {
        for i in 0..nxw {
            let val = big(i, j);
            vmax = vmax.max(val.abs() * (-rho * (i as f64 + 0.5) * g.hx).exp());
            if i + g.nx < nxw {
                per = per.max((big(i + g.nx, j) * (-rho * g.period()).exp() - val).abs() * (-rho * (i as f64 + 0.5) * g.hx).exp());
            }
            if i == 0 || i + 1 == nxw {
                continue;
            }
            let (jd, ju) = ((j + g.ny - 1) % g.ny, (j + 1) % g.ny);
            let lap = (big(i - 1, j) - 2.0 * val + big(i + 1, j)) / (g.hx * g.hx) + (big(i, jd) - 2.0 * val + big(i, ju)) / (g.hy * g.hy);
            let scaled = lap * (-rho * (i as f64 + 0.5) * g.hx).exp();
            let c = g.idx(i % g.nx, j);
            disc = disc.max((scaled - lv.values[c]).abs());
            if lv.values[c] >= -tol {
                min_lap = min_lap.min(scaled);
            }
        }
    }
    let slack = tol + disc;
    LiftReport {
        periodicity_error: per / vmax.max(f64::MIN_POSITIVE),
        min_scaled_laplacian: min_lap,
        discrepancy: disc,
        subharmonic: min_lap >= -slack,
    }
}

/// Average over dilations and rotations of the lift: weights alpha_eps(e^s) e^{(rho+2) sigma}
/// on whole-cell shifts s = (sigma, tau), alpha_eps a bump of radius eps around 1 in the plane.
pub fn mollify(v: &GridField, rho: f64, eps: f64) -> Result<GridField> {
    let g = v.grid;
    let min = 2.0 * g.h();
    if eps < min {
        return Err(Error::EpsTooSmall { eps, min });
    }
    // |e^s - 1| < eps needs |s| below about eps / (1 - eps)
    let reach = eps / (1.0 - eps.min(0.5));
    let ri = (reach / g.hx).ceil() as isize;
    let rj = (reach / g.hy).ceil() as isize;
    let mut weights = Vec::new();
    for di in -ri..=ri {
        for dj in -rj..=rj {
            let (s, t) = (di as f64 * g.hx, dj as f64 * g.hy);
            let r = ((s.exp() * t.cos() - 1.0).powi(2) + (s.exp() * t.sin()).powi(2)).sqrt() / eps;
            if r < 1.0 {
                let w = (-1.0 / (1.0 - r * r)).exp() * ((rho + 2.0) * s).exp();
                weights.push((di, dj, w));
            }
        }
    }
    let total: f64 = weights.iter().map(|w| w.2).sum();
    let values = (0..g.len()).map(|c| weights.iter().map(|&(di, dj, w)| w * v.values[g.shift(c, di, dj)]).sum::<f64>() / total).collect();
    Ok(GridField { grid: g, values })
}

/// Factorised L_rho on a mask, reused across right-hand sides.
pub struct MaskedSolver {
    pub rho: f64,
    pub disc: Discretization,
    lu: SparseLu<f64>,
    grid: crate::grid::Grid,
}

impl MaskedSolver {
    pub fn new(mask: &DomainMask, rho: f64, mode: BoundaryMode) -> Result<Self> {
        let disc = Discretization::new(&Lattice::from_mask(mask, mode))?;
        let lu = SparseLu::new(&disc.operator(OperatorKind::Lrho(rho))).map_err(|_| Error::RhoInSpectrum(rho))?;
        Ok(Self { rho, disc, lu, grid: mask.grid })
    }

    /// Solves L_rho u = f (density on inside cells) with u = data at the boundary; outside
    /// cells of the result carry `data` (or 0). Returns the field and the relative residual.
    pub fn solve(&self, f: Option<&[f64]>, data: Option<&GridField>) -> Result<(GridField, f64)> {
        let bvals: Vec<f64> = self
            .disc
            .points
            .iter()
            .map(|p| match (p.target, data) {
                (BoundaryRef::Cell(c), Some(d)) => d.values[c],
                _ => 0.0,
            })
            .collect();
        let bt = self.disc.boundary_term(self.rho, &bvals);
        let rhs: Vec<f64> = (0..self.disc.n()).map(|k| f.map_or(0.0, |f| f[self.disc.dofs[k]]) - bt[k]).collect();
        let (u, res) = self.lu.solve(&rhs).map_err(|_| Error::RhoInSpectrum(self.rho))?;
        let mut values = match data {
            Some(d) => d.values.clone(),
            None => vec![0.0; self.grid.len()],
        };
        for (k, &c) in self.disc.dofs.iter().enumerate() {
            values[c] = u[k];
        }
        Ok((GridField { grid: self.grid, values }, res))
    }

    /// Fails with RhoAboveCritical when the Green operator loses its sign: the solution of
    /// L_rho u = 1 with zero data must be <= 0.
    pub fn check_sign(&self) -> Result<()> {
        let ones = vec![1.0; self.grid.len()];
        let (u, _) = self.solve(Some(&ones), None)?;
        let scale = u.max_abs();
        let top = u.max();
        if top > 1e-10 * scale {
            return Err(Error::RhoAboveCritical { rho: self.rho, max_value: top });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GreenLrho {
    pub rho: f64,
    pub sources: Vec<usize>,
    pub columns: Vec<GridField>,
    pub residuals: Vec<f64>,
}

/// Green function of L_rho in the mask for unit masses at `sources`.
pub fn green_lrho(mask: &DomainMask, rho: f64, sources: &[usize]) -> Result<GreenLrho> {
    let s = MaskedSolver::new(mask, rho, BoundaryMode::Fitted)?;
    let mut columns = Vec::new();
    let mut residuals = Vec::new();
    for &src in sources {
        if !mask.inside[src] {
            return Err(Error::Parse(format!("source {src} is outside the mask")));
        }
        let mut f = vec![0.0; mask.grid.len()];
        f[src] = 1.0 / mask.grid.cell_area();
        let (g, res) = s.solve(Some(&f), None)?;
        let top = g.max();
        if top > 1e-10 * g.max_abs() {
            return Err(Error::RhoAboveCritical { rho, max_value: top });
        }
        columns.push(g);
        residuals.push(res);
    }
    Ok(GreenLrho { rho, sources: sources.to_vec(), columns, residuals })
}

/// Green function of the strip |y| < pi/2 from the series over shifts of the right
/// half-plane Green function.
pub fn strip_green_series(rho: f64, period: f64, z: (f64, f64), zeta: (f64, f64)) -> f64 {
    let hp = |zx: f64, zy: f64, wx: f64, wy: f64| {
        let (a, b) = (zx.exp() * zy.cos(), zx.exp() * zy.sin());
        let (c, d) = (wx.exp() * wy.cos(), wx.exp() * wy.sin());
        ((a - c).hypot(b - d) / (a + c).hypot(b - d)).ln() / (2.0 * PI)
    };
    let term = |k: i64| {
        let xi = zeta.0 + k as f64 * period;
        hp(z.0, z.1, xi, zeta.1) * (rho * xi).exp() * (-rho * z.0).exp()
    };
    let mut sum = term(0);
    for dir in [1i64, -1] {
        for k in 1.. {
            let t = term(dir * k);
            sum += t;
            if t.abs() < 1e-17 && k > 5 {
                break;
            }
            if k > 100_000 {
                break;
            }
        }
    }
    sum
}

/// Dirichlet problem L_rho q = 0 in the mask with q = f on the boundary.
pub fn dirichlet_lrho(mask: &DomainMask, rho: f64, f: &GridField) -> Result<GridField> {
    Ok(MaskedSolver::new(mask, rho, BoundaryMode::Fitted)?.solve(None, Some(f))?.0)
}

/// Upper-semicontinuous data given by cell suprema: solves for the decreasing Lipschitz
/// regularisations f_k(z) = max_w f(w) - L_k |z - w| and returns every level, finest last.
pub fn dirichlet_lrho_usc(mask: &DomainMask, rho: f64, f: &GridField, levels: usize) -> Result<Vec<GridField>> {
    let g = f.grid;
    let s = MaskedSolver::new(mask, rho, BoundaryMode::Fitted)?;
    let spread = f.max() - f.min();
    let mut out = Vec::new();
    for k in 0..levels {
        let lip = spread.max(1e-12) / (g.h() * 2f64.powi((levels - k) as i32));
        let r = (spread / (lip * g.h())).ceil().max(1.0) as isize;
        let reg = GridField {
            grid: g,
            values: (0..g.len())
                .map(|c| {
                    let mut m = f.values[c];
                    for di in -r..=r {
                        for dj in -r..=r {
                            let d = (di as f64 * g.hx).hypot(dj as f64 * g.hy);
                            m = m.max(f.values[g.shift(c, di, dj)] - lip * d);
                        }
                    }
                    m
                })
                .collect(),
        };
        out.push(s.solve(None, Some(&reg))?.0);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RieszDecomposition {
    /// Least L_rho-majorant of v in the mask (v outside).
    pub q: GridField,
    /// Green potential of nu restricted to the mask (0 outside).
    pub potential: GridField,
    pub nu: GridMeasure,
    pub reconstruction_error: f64,
    pub solver_residual: f64,
}

/// v = q + Pi in the mask, with Pi the Green potential of nu = L_rho v restricted to the mask.
pub fn riesz_decompose(v: &GridField, mask: &DomainMask, rho: f64) -> Result<RieszDecomposition> {
    let s = MaskedSolver::new(mask, rho, BoundaryMode::Cells)?;
    s.check_sign()?;
    let dens = apply_torus(v, OperatorKind::Lrho(rho));
    let (pot, r1) = s.solve(Some(&dens.values), None)?;
    let (q, r2) = s.solve(None, Some(v))?;
    let err = mask.inside_cells().iter().map(|&c| (v.values[c] - q.values[c] - pot.values[c]).abs()).fold(0.0, f64::max);
    let scale = v.max_abs().max(f64::MIN_POSITIVE);
    Ok(RieszDecomposition {
        q,
        potential: pot,
        nu: GridMeasure::from_density(&dens),
        reconstruction_error: err / scale,
        solver_residual: r1.max(r2),
    })
}

/// v outside the mask, its least L_rho-majorant inside.
pub fn sweep(v: &GridField, mask: &DomainMask, rho: f64) -> Result<GridField> {
    if mask.n_inside() == 0 {
        return Ok(v.clone());
    }
    let s = MaskedSolver::new(mask, rho, BoundaryMode::Cells)?;
    s.check_sign()?;
    Ok(s.solve(None, Some(v))?.0)
}

/// A sampled 2 pi-periodic indicator on nodes theta_i = -pi + i * 2 pi / n.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigIndicator {
    pub rho: f64,
    pub values: Vec<f64>,
}

impl TrigIndicator {
    pub fn from_fn(rho: f64, n: usize, f: impl Fn(f64) -> f64) -> Self {
        Self { rho, values: (0..n).map(|i| f(-PI + i as f64 * 2.0 * PI / n as f64)).collect() }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.n() as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        -PI + i as f64 * self.step()
    }

    fn node(&self, phi: f64) -> i64 {
        ((phi + PI) / self.step()).round() as i64
    }

    fn at(&self, i: i64) -> f64 {
        self.values[i.rem_euclid(self.n() as i64) as usize]
    }

    /// Most negative value of the discrete h'' + rho^2 h.
    pub fn min_second_difference(&self) -> f64 {
        let d = self.step();
        (0..self.n() as i64)
            .map(|i| (self.at(i - 1) - 2.0 * self.at(i) + self.at(i + 1)) / (d * d) + self.rho * self.rho * self.at(i))
            .fold(f64::INFINITY, f64::min)
    }

    /// Left side of the three-point relation for nodes i1 < i2 < i3 (unwrapped indices).
    pub fn three_point(&self, i1: i64, i2: i64, i3: i64) -> f64 {
        let d = self.step();
        let r = self.rho;
        let (p1, p2, p3) = (i1 as f64 * d, i2 as f64 * d, i3 as f64 * d);
        self.at(i1) * (r * (p2 - p3)).sin() + self.at(i2) * (r * (p3 - p1)).sin() + self.at(i3) * (r * (p1 - p2)).sin()
    }

    /// Largest positive excess of the three-point relation over `samples` random node triples
    /// spanning less than pi/rho - 10 steps.
    pub fn three_point_excess(&self, samples: usize, seed: u64) -> f64 {
        let span = ((PI / self.rho) / self.step()).floor() as i64 - 10;
        if span < 2 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let i1 = rng.gen_range(0..self.n() as i64);
            let a = rng.gen_range(1..span);
            let b = rng.gen_range(a + 1..=span);
            worst = worst.max(self.three_point(i1, i1 + a, i1 + b));
        }
        worst
    }
}

/// Replaces h on the arc (alpha, beta), snapped to nodes, by the rho-sinusoid through the
/// end values.
pub fn tc_majorant(h: &TrigIndicator, alpha: f64, beta: f64) -> Result<TrigIndicator> {
    let (ia, ib) = (h.node(alpha), h.node(beta));
    let d = h.step();
    let width = (ib - ia) as f64 * d;
    if width * h.rho >= PI {
        return Err(Error::ArcTooWide(width));
    }
    let (ha, hb) = (h.at(ia), h.at(ib));
    let den = (h.rho * width).sin();
    let mut out = h.clone();
    let n = h.n() as i64;
    for i in ia + 1..ib {
        let phi = (i - ia) as f64 * d;
        out.values[i.rem_euclid(n) as usize] = (ha * (h.rho * (width - phi)).sin() + hb * (h.rho * phi).sin()) / den;
    }
    Ok(out)
}
