//! Spectrum of the quadratic pencil Q(rho) = K + 2 rho B + rho^2 I, where K and B are the
//! Dirichlet Laplacian and centred d/dx over the inside cells of a mask.
//!
//! Eigenvalues come from the companion matrix [[0, I], [-K, -2B]] acting on (q, rho q):
//! densely for small masks, otherwise by shift-invert Arnoldi around shifts that tile the
//! search box. A Ritz pair is kept only when its own backward error passes the tolerance.

use crate::domain::DomainMask;
use crate::elliptic::{BoundaryMode, Discretization, Lattice};
use crate::error::{Error, Result};
use crate::field::{ComplexField, GridField};
use crate::sparse::{norm2, Csr, SparseLu};
use faer::Mat;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

type C = Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self { re_min, re_max, im_min, im_max }
    }

    pub fn contains(&self, z: C) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Box shrunk by `m` on every side.
    pub fn shrink(&self, m: f64) -> Self {
        Self::new(self.re_min + m, self.re_max - m, self.im_min + m, self.im_max - m)
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.re_max, -self.re_min, -self.im_max, -self.im_min)
    }

    fn center(&self) -> C {
        C::new(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))
    }

    fn half_diagonal(&self) -> f64 {
        0.5 * (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn split(&self) -> Vec<SearchBox> {
        let w = self.re_max - self.re_min;
        let h = self.im_max - self.im_min;
        if w > 2.0 * h {
            let m = 0.5 * (self.re_min + self.re_max);
            vec![Self::new(self.re_min, m, self.im_min, self.im_max), Self::new(m, self.re_max, self.im_min, self.im_max)]
        } else if h > 2.0 * w {
            let m = 0.5 * (self.im_min + self.im_max);
            vec![Self::new(self.re_min, self.re_max, self.im_min, m), Self::new(self.re_min, self.re_max, m, self.im_max)]
        } else {
            let mr = 0.5 * (self.re_min + self.re_max);
            let mi = 0.5 * (self.im_min + self.im_max);
            vec![
                Self::new(self.re_min, mr, self.im_min, mi),
                Self::new(mr, self.re_max, self.im_min, mi),
                Self::new(self.re_min, mr, mi, self.im_max),
                Self::new(mr, self.re_max, mi, self.im_max),
            ]
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    /// Backward-error tolerance for accepting an eigenpair.
    pub tol: f64,
    pub krylov_dim: usize,
    /// Masks with at most this many inside cells use the dense companion solve.
    pub dense_limit: usize,
    pub max_depth: usize,
    pub seed: u64,
    pub mode: BoundaryMode,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { tol: 1e-8, krylov_dim: 40, dense_limit: 300, max_depth: 6, seed: 7, mode: BoundaryMode::Fitted }
    }
}

/// The pencil matrices of a mask.
pub struct Pencil {
    pub disc: Discretization,
    pub k: Csr<f64>,
    pub b: Csr<f64>,
    kc: Csr<C>,
    bc: Csr<C>,
    norm_k: f64,
    norm_b: f64,
}

impl Pencil {
    pub fn new(mask: &DomainMask, mode: BoundaryMode) -> Result<Self> {
        let disc = Discretization::new(&Lattice::from_mask(mask, mode))?;
        let k = disc.lap.clone();
        let b = disc.dx.clone();
        Ok(Self { kc: k.to_complex(), bc: b.to_complex(), norm_k: k.norm_inf(), norm_b: b.norm_inf(), k, b, disc })
    }

    pub fn n(&self) -> usize {
        self.k.n
    }

    pub fn matrix(&self, rho: C) -> Csr<C> {
        Csr::combine(&[(C::new(1.0, 0.0), &self.kc), (2.0 * rho, &self.bc)], rho * rho)
    }

    pub fn apply(&self, rho: C, q: &[C]) -> Vec<C> {
        let kq = self.kc.matvec(q);
        let bq = self.bc.matvec(q);
        (0..q.len()).map(|i| kq[i] + 2.0 * rho * bq[i] + rho * rho * q[i]).collect()
    }

    /// Normwise backward error of an approximate eigenpair.
    pub fn backward_error(&self, rho: C, q: &[C]) -> f64 {
        let scale = self.norm_k + 2.0 * rho.norm() * self.norm_b + rho.norm_sqr();
        norm2(&self.apply(rho, q)) / (scale * norm2(q)).max(f64::MIN_POSITIVE)
    }

    /// Plain residual |Q(rho) q| / |q|.
    pub fn residual(&self, rho: C, q: &[C]) -> f64 {
        norm2(&self.apply(rho, q)) / norm2(q).max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub rho: C,
    /// Values on the inside cells, in the pencil's degree-of-freedom order.
    pub q: Vec<C>,
    pub backward_error: f64,
}

fn best_vector(p: &Pencil, rho: C, y: &[C]) -> (Vec<C>, f64) {
    let n = p.n();
    let q1: Vec<C> = y[..n].to_vec();
    let e1 = p.backward_error(rho, &q1);
    if rho.norm() > 1.0 {
        let q2: Vec<C> = y[n..].iter().map(|v| v / rho).collect();
        let e2 = p.backward_error(rho, &q2);
        if e2 < e1 {
            return (q2, e2);
        }
    }
    (q1, e1)
}

/// All eigenpairs by a dense eigen-decomposition of the companion matrix.
pub fn dense_eigenpairs(p: &Pencil) -> Result<Vec<Eigenpair>> {
    let n = p.n();
    let mut a = Mat::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        a[(i, n + i)] = 1.0;
        for (j, v) in p.k.row(i) {
            a[(n + i, j)] = -v;
        }
        for (j, v) in p.b.row(i) {
            a[(n + i, n + j)] = -2.0 * v;
        }
    }
    let eig = a.eigen().map_err(|e| Error::SolverFailure(format!("dense eigen: {e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        let rho = s[i];
        let y: Vec<C> = (0..2 * n).map(|r| u[(r, i)]).collect();
        let (q, be) = best_vector(p, rho, &y);
        out.push(Eigenpair { rho, q, backward_error: be });
    }
    Ok(out)
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Ritz pairs from one shift, with the radius around the shift inside which every
/// eigenvalue is believed to have been found.
struct ShiftRun {
    pairs: Vec<Eigenpair>,
    trusted: f64,
}

fn shift_invert_run(p: &Pencil, sigma: C, opts: &SpectrumOptions, seed: u64) -> Result<ShiftRun> {
    let n = p.n();
    let lu = SparseLu::new(&p.matrix(sigma))?;
    let two_b_plus = |a: &[C]| -> Vec<C> {
        let ba = p.bc.matvec(a);
        (0..n).map(|i| 2.0 * ba[i] + sigma * a[i]).collect()
    };
    let op = |x: &[C]| -> Result<Vec<C>> {
        let (a, b) = x.split_at(n);
        let t = two_b_plus(a);
        let r: Vec<C> = (0..n).map(|i| -b[i] - t[i]).collect();
        let (u, _) = lu.solve(&r)?;
        let mut out = u.clone();
        out.extend((0..n).map(|i| a[i] + sigma * u[i]));
        Ok(out)
    };
    let m = opts.krylov_dim.min(2 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v0: Vec<C> = (0..2 * n).map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
    let nv = norm2(&v0);
    v0.iter_mut().for_each(|x| *x /= nv);
    let mut basis = vec![v0];
    let mut h = vec![vec![C::new(0.0, 0.0); m]; m + 1];
    let mut dim = m;
    for j in 0..m {
        let mut w = op(&basis[j])?;
        for _ in 0..2 {
            for (i, vi) in basis.iter().enumerate() {
                let c = dot(vi, &w);
                h[i][j] += c;
                w.iter_mut().zip(vi).for_each(|(wk, vk)| *wk -= c * vk);
            }
        }
        let beta = norm2(&w);
        h[j + 1][j] = C::new(beta, 0.0);
        if beta < 1e-13 * h[j][j].norm().max(1e-300) || j + 1 == m {
            dim = j + 1;
            if beta >= 1e-13 * h[j][j].norm().max(1e-300) {
                break;
            }
            h[j + 1][j] = C::new(0.0, 0.0);
            break;
        }
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
    }
    let hm = Mat::<C>::from_fn(dim, dim, |i, j| h[i][j]);
    let eig = hm.eigen().map_err(|e| Error::SolverFailure(format!("Hessenberg eigen: {e:?}")))?;
    let theta = eig.S().column_vector();
    let s = eig.U();
    let beta_last = h[dim][dim - 1].norm();
    let mut pairs = Vec::new();
    let mut trusted = f64::INFINITY;
    let mut far = 0.0f64;
    for i in 0..dim {
        let th = theta[i];
        if th.norm() < 1e-300 {
            continue;
        }
        let rho = sigma + 1.0 / th;
        let dist = (rho - sigma).norm();
        let estimate = beta_last * s[(dim - 1, i)].norm() / th.norm();
        if estimate > 1e-4 {
            trusted = trusted.min(dist);
            continue;
        }
        let mut y = vec![C::new(0.0, 0.0); 2 * n];
        for (k, vk) in basis.iter().enumerate().take(dim) {
            let c = s[(k, i)];
            y.iter_mut().zip(vk).for_each(|(yi, vi)| *yi += c * vi);
        }
        let (q, be) = best_vector(p, rho, &y);
        if be <= opts.tol {
            far = far.max(dist);
            pairs.push(Eigenpair { rho, q, backward_error: be });
        } else {
            trusted = trusted.min(dist);
        }
    }
    if !trusted.is_finite() {
        // every Ritz value converged: the Krylov space is invariant or exhausted
        trusted = if dim < m { f64::INFINITY } else { far };
    }
    Ok(ShiftRun { pairs, trusted: 0.95 * trusted })
}

fn search_box(p: &Pencil, bx: &SearchBox, opts: &SpectrumOptions) -> Result<Vec<Eigenpair>> {
    if p.n() <= opts.dense_limit {
        return Ok(dense_eigenpairs(p)?.into_iter().filter(|e| e.backward_error <= opts.tol && bx.contains(e.rho)).collect());
    }
    let mut out = Vec::new();
    let mut stack = vec![(*bx, 0usize)];
    let mut counter = 0u64;
    while let Some((tile, depth)) = stack.pop() {
        let sigma = tile.center();
        counter += 1;
        let run = shift_invert_run(p, sigma, opts, opts.seed.wrapping_add(counter))?;
        if run.trusted >= tile.half_diagonal() || depth >= opts.max_depth {
            if run.trusted < tile.half_diagonal() {
                return Err(Error::Inconclusive(format!(
                    "shift {sigma} covers radius {:.3e} of tile radius {:.3e}",
                    run.trusted,
                    tile.half_diagonal()
                )));
            }
            // values on a shared tile edge may show up from both sides with rounding noise
            let before = out.len();
            for e in run.pairs {
                let slack = 1e-7 * e.rho.norm().max(1.0);
                if tile.shrink(-slack).contains(e.rho)
                    && bx.contains(e.rho)
                    && !out[..before].iter().any(|o: &Eigenpair| (o.rho - e.rho).norm() <= slack)
                {
                    out.push(e);
                }
            }
        } else {
            stack.extend(tile.split().into_iter().map(|t| (t, depth + 1)));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<C>,
    pub eigenfunctions: Vec<ComplexField>,
    pub residuals: Vec<f64>,
    pub rho_min: Option<f64>,
    /// More than `max_count` values were found; the list was cut.
    pub truncated: bool,
    pub search_box: SearchBox,
    pub tol_real: f64,
}

fn to_field(mask: &DomainMask, dofs: &[usize], q: &[C]) -> ComplexField {
    let mut values = vec![C::new(0.0, 0.0); mask.grid.len()];
    let mx = q.iter().fold(0.0f64, |m, v| m.max(v.norm())).max(f64::MIN_POSITIVE);
    for (k, &c) in dofs.iter().enumerate() {
        values[c] = q[k] / mx;
    }
    ComplexField { grid: mask.grid, values }
}

/// Tolerance on |Im rho| for calling an eigenvalue real.
pub fn tol_real(mask: &DomainMask, tol: f64) -> f64 {
    10.0 * tol + 5.0 * mask.grid.h().powi(2)
}

pub fn spectrum(mask: &DomainMask, bx: &SearchBox, max_count: usize, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let p = Pencil::new(mask, opts.mode)?;
    let mut pairs = search_box(&p, bx, opts)?;
    pairs.sort_by(|a, b| a.rho.norm().total_cmp(&b.rho.norm()).then(a.rho.im.total_cmp(&b.rho.im)));
    let truncated = pairs.len() > max_count;
    pairs.truncate(max_count);
    let tr = tol_real(mask, opts.tol);
    let rho_min = pairs
        .iter()
        .filter(|e| e.rho.re > 0.0 && e.rho.im.abs() <= tr)
        .filter(|e| sign_definite(mask, &p.disc.dofs, &e.q).is_some())
        .map(|e| e.rho.re)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    Ok(SpectrumResult {
        eigenvalues: pairs.iter().map(|e| e.rho).collect(),
        eigenfunctions: pairs.iter().map(|e| to_field(mask, &p.disc.dofs, &e.q)).collect(),
        residuals: pairs.iter().map(|e| e.backward_error).collect(),
        rho_min,
        truncated,
        search_box: *bx,
        tol_real: tr,
    })
}

/// Real, single-signed version of an eigenvector (max 1), if it is one.
pub fn sign_definite(mask: &DomainMask, dofs: &[usize], q: &[C]) -> Option<Vec<f64>> {
    let (imax, _) = q.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
    let phase = q[imax] / q[imax].norm();
    let scale = q[imax].norm();
    let layer = mask.boundary_layer(2);
    let mut out = Vec::with_capacity(q.len());
    for (k, v) in q.iter().enumerate() {
        let w = v / phase / scale;
        if w.im.abs() > 1e-6 {
            return None;
        }
        let floor = if layer[dofs[k]] { -1e-3 } else { -1e-6 };
        if w.re < floor {
            return None;
        }
        out.push(w.re);
    }
    Some(out)
}

#[derive(Clone, Debug)]
pub struct RhoMin {
    pub value: Option<f64>,
    pub per_component: Vec<Option<f64>>,
    /// Positive sign-normalised eigenfunction for the minimising component.
    pub eigenfunction: Option<GridField>,
    pub backward_error: f64,
    /// The search reached 1/hx without a candidate: the answer is below grid resolution.
    pub grid_limited: bool,
}

/// Least real pencil eigenvalue along the ray `direction` (+1 or -1) from 0, found by marching
/// shifts; when `signed` the eigenfunction must be single-signed.
fn march_real(mask: &DomainMask, direction: f64, signed: bool, opts: &SpectrumOptions) -> Result<(Option<Eigenpair>, Vec<usize>, bool)> {
    let p = Pencil::new(mask, opts.mode)?;
    let dofs = p.disc.dofs.clone();
    let tr = tol_real(mask, opts.tol);
    let cap = 1.0 / mask.grid.hx;
    let accept = |e: &Eigenpair| -> bool {
        e.rho.re * direction > 0.0 && e.rho.im.abs() <= tr && (!signed || sign_definite(mask, &dofs, &e.q).is_some())
    };
    let pick = |cands: Vec<Eigenpair>| cands.into_iter().min_by(|a, b| a.rho.re.abs().total_cmp(&b.rho.re.abs()));
    if p.n() <= opts.dense_limit {
        let all = dense_eigenpairs(&p)?;
        let best = pick(all.into_iter().filter(|e| e.backward_error <= opts.tol && accept(e)).collect());
        let limited = best.as_ref().is_none_or(|e| e.rho.re.abs() > cap);
        return Ok((best.filter(|e| e.rho.re.abs() <= cap), dofs, limited));
    }
    let mut sigma = 0.0;
    let mut counter = 0;
    loop {
        counter += 1;
        let run = shift_invert_run(&p, C::new(sigma, 0.0), opts, opts.seed.wrapping_add(counter))?;
        let lo = sigma - run.trusted;
        let hi = sigma + run.trusted;
        let found = pick(
            run.pairs
                .into_iter()
                .filter(|e| {
                    let t = e.rho.re * direction;
                    accept(e) && t >= lo.min(0.0).max(sigma - run.trusted) && t <= hi
                })
                .collect(),
        );
        if let Some(e) = found {
            return Ok((Some(e), dofs, false));
        }
        if run.trusted <= 1e-12 {
            return Err(Error::Inconclusive(format!("shift {sigma} made no progress")));
        }
        sigma = direction * (sigma.abs() + run.trusted);
        if sigma.abs() > cap {
            return Ok((None, dofs, true));
        }
        if counter > 200 {
            return Err(Error::Inconclusive("real-axis march did not terminate".into()));
        }
    }
}

/// Critical value: least positive real eigenvalue with a single-signed eigenfunction, per
/// component, minimised over components connected on spirals.
pub fn rho_min(mask: &DomainMask, opts: &SpectrumOptions) -> Result<RhoMin> {
    let mut per = Vec::with_capacity(mask.n_components);
    let mut best: Option<(f64, GridField, f64)> = None;
    let mut limited = false;
    for comp in 0..mask.n_components {
        if !mask.spiral[comp].is_connected() {
            per.push(None);
            continue;
        }
        let sub = mask.component_mask(comp);
        let (pair, dofs, lim) = march_real(&sub, 1.0, true, opts)?;
        limited |= lim;
        match pair {
            Some(e) => {
                let r = e.rho.re;
                per.push(Some(r));
                if best.as_ref().is_none_or(|b| r < b.0) {
                    let q = sign_definite(&sub, &dofs, &e.q).unwrap_or_default();
                    let mut values = vec![0.0; mask.grid.len()];
                    for (k, &c) in dofs.iter().enumerate() {
                        values[c] = q.get(k).copied().unwrap_or(0.0);
                    }
                    best = Some((r, GridField { grid: mask.grid, values }, e.backward_error));
                }
            }
            None => per.push(None),
        }
    }
    Ok(match best {
        Some((v, f, be)) => {
            RhoMin { value: Some(v), per_component: per, eigenfunction: Some(f), backward_error: be, grid_limited: limited }
        }
        None => RhoMin { value: None, per_component: per, eigenfunction: None, backward_error: f64::NAN, grid_limited: limited },
    })
}

/// Largest negative real eigenvalue (no sign condition).
pub fn max_negative_real(mask: &DomainMask, opts: &SpectrumOptions) -> Result<Option<f64>> {
    Ok(march_real(mask, -1.0, false, opts)?.0.map(|e| e.rho.re))
}

fn nearest(z: C, set: &[C]) -> f64 {
    set.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min)
}

/// One-sided distance from the points of `a` well inside `bx` to the set `b`.
fn inner_distance(a: &[C], b: &[C], bx: &SearchBox, margin: f64) -> f64 {
    let inner = bx.shrink(margin);
    a.iter().filter(|z| inner.contains(**z)).map(|z| nearest(*z, b)).fold(0.0, f64::max)
}

/// Symmetric distance between two spectra computed in the same box, ignoring points within
/// `margin` of the box edges.
pub fn hausdorff_inner(a: &[C], b: &[C], bx: &SearchBox, margin: f64) -> f64 {
    inner_distance(a, b, bx, margin).max(inner_distance(b, a, bx, margin))
}

#[derive(Clone, Debug, Default)]
pub struct SymmetryReport {
    pub min_abs_re: f64,
    pub conjugation: f64,
    pub shift: f64,
    pub reflection: f64,
    pub translation: f64,
    pub checked_shift_pairs: usize,
    pub violations: Vec<String>,
}

pub fn check_spectrum_symmetries(
    mask: &DomainMask,
    result: &SpectrumResult,
    opts: &SpectrumOptions,
    rel_tol: f64,
) -> Result<SymmetryReport> {
    let bx = result.search_box;
    let ev = &result.eigenvalues;
    let margin = 1e-3 * (bx.re_max - bx.re_min).max(bx.im_max - bx.im_min);
    let mut rep = SymmetryReport { min_abs_re: ev.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min), ..Default::default() };
    if rep.min_abs_re <= 1e-6 {
        rep.violations.push(format!("eigenvalue with |Re| = {:.3e}", rep.min_abs_re));
    }
    let conj: Vec<C> = ev.iter().map(|z| z.conj()).collect();
    rep.conjugation = inner_distance(&conj, ev, &bx, margin);
    let w = 2.0 * PI / mask.grid.period();
    for s in [w, -w] {
        for z in ev {
            let t = z + C::new(0.0, s);
            if bx.shrink(margin + 0.05 * z.norm()).contains(t) {
                rep.checked_shift_pairs += 1;
                rep.shift = rep.shift.max(nearest(t, ev) / z.norm().max(1.0));
            }
        }
    }
    let refl = spectrum(&mask.reflected(), &bx.negated(), usize::MAX, opts)?;
    let neg: Vec<C> = refl.eigenvalues.iter().map(|z| -z).collect();
    rep.reflection = hausdorff_inner(&neg, ev, &bx, margin);
    let g = mask.grid;
    let tr = spectrum(&mask.translated((g.nx / 3) as isize, (g.ny / 5) as isize), &bx, usize::MAX, opts)?;
    rep.translation = hausdorff_inner(&tr.eigenvalues, ev, &bx, margin);
    let scale = ev.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for (name, v, lim) in [
        ("conjugation", rep.conjugation, 1e-6 * scale),
        ("shift", rep.shift, rel_tol),
        ("reflection", rep.reflection, 1e-6 * scale),
        ("translation", rep.translation, 1e-6 * scale),
    ] {
        if v > lim {
            rep.violations.push(format!("{name}: {v:.3e} > {lim:.3e}"));
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub inner: f64,
    pub outer: f64,
    pub margin: f64,
    pub strict: bool,
}

pub fn check_monotonicity(inner: &DomainMask, outer: &DomainMask, opts: &SpectrumOptions) -> Result<MonotonicityReport> {
    if !inner.is_subset_of(outer) || inner.n_inside() == outer.n_inside() {
        return Err(Error::Inconclusive("masks must be strictly nested".into()));
    }
    let a = rho_min(inner, opts)?.value.ok_or_else(|| Error::Inconclusive("inner mask has no critical value".into()))?;
    let b = rho_min(outer, opts)?.value.ok_or_else(|| Error::Inconclusive("outer mask has no critical value".into()))?;
    let margin = 1e-9 * b.max(1.0);
    if (a - b).abs() <= margin {
        return Err(Error::Inconclusive(format!("difference {:.3e} below resolution", a - b)));
    }
    Ok(MonotonicityReport { inner: a, outer: b, margin, strict: a > b + margin })
}

#[derive(Clone, Debug)]
pub struct ShrinkingReport {
    pub values: Vec<f64>,
    pub limit: f64,
    pub monotone: bool,
    /// Max-norm changes of successive normalised eigenfunctions on the first mask.
    pub eigenfunction_steps: Vec<f64>,
}

pub fn check_shrinking_limit(sequence: &[DomainMask], limit: &DomainMask, opts: &SpectrumOptions) -> Result<ShrinkingReport> {
    let mut values = Vec::new();
    let mut funcs = Vec::new();
    for m in sequence.iter().chain(std::iter::once(limit)) {
        let r = rho_min(m, opts)?;
        values.push(r.value.ok_or_else(|| Error::Inconclusive("mask without critical value".into()))?);
        funcs.push(r.eigenfunction.unwrap());
    }
    let limit_value = values.pop().unwrap();
    let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-9) && values.last().is_none_or(|v| *v >= limit_value - 1e-9);
    let base = &sequence[0];
    let steps = funcs
        .windows(2)
        .map(|w| base.inside_cells().iter().map(|&c| (w[0].values[c] - w[1].values[c]).abs()).fold(0.0, f64::max))
        .collect();
    Ok(ShrinkingReport { values, limit: limit_value, monotone, eigenfunction_steps: steps })
}

#[derive(Clone, Debug)]
pub struct MatsaevReport {
    pub spectrum: Vec<C>,
    pub reflected_spectrum: Vec<C>,
    pub hausdorff: f64,
    pub rho_min: Option<f64>,
    pub max_negative: Option<f64>,
    /// |max_negative + rho_min| / rho_min.
    pub negative_gap: Option<f64>,
}

pub fn matsaev_probe(mask: &DomainMask, bx: &SearchBox, opts: &SpectrumOptions) -> Result<MatsaevReport> {
    let s = spectrum(mask, bx, usize::MAX, opts)?;
    let r = spectrum(&mask.reflected(), bx, usize::MAX, opts)?;
    let margin = 1e-3 * (bx.re_max - bx.re_min).max(bx.im_max - bx.im_min);
    let hausdorff = hausdorff_inner(&s.eigenvalues, &r.eigenvalues, bx, margin);
    let rm = rho_min(mask, opts)?.value;
    let neg = max_negative_real(mask, opts)?;
    let gap = match (rm, neg) {
        (Some(a), Some(b)) => Some((a + b).abs() / a),
        _ => None,
    };
    Ok(MatsaevReport {
        spectrum: s.eigenvalues,
        reflected_spectrum: r.eigenvalues,
        hausdorff,
        rho_min: rm,
        max_negative: neg,
        negative_gap: gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_domain;
    use crate::grid::TorusSpec;
    use crate::shape::{Primitive, ShapeExpr};

    fn strip_mask(n: usize, half: f64) -> DomainMask {
        let spec = TorusSpec::new(2f64.ln()).unwrap();
        build_domain(spec, n, n, &ShapeExpr::new().union(Primitive::Strip { ymin: -half, ymax: half })).unwrap()
    }

    #[test]
    fn dense_and_arnoldi_agree() {
        let m = strip_mask(16, PI / 4.0);
        let bx = SearchBox::new(0.0, 6.0, -10.0, 10.0);
        let dense = spectrum(&m, &bx, 100, &SpectrumOptions::default()).unwrap();
        let it = spectrum(&m, &bx, 100, &SpectrumOptions { dense_limit: 0, ..Default::default() }).unwrap();
        assert!(!dense.eigenvalues.is_empty());
        assert_eq!(dense.eigenvalues.len(), it.eigenvalues.len(), "{:?} vs {:?}", dense.eigenvalues, it.eigenvalues);
        assert!(hausdorff_inner(&dense.eigenvalues, &it.eigenvalues, &bx, 0.0) < 1e-8);
    }

    #[test]
    fn strip_critical_value_coarse() {
        let m = strip_mask(32, PI / 4.0);
        let r = rho_min(&m, &SpectrumOptions::default()).unwrap();
        let v = r.value.unwrap();
        assert!((v - 2.0).abs() < 0.02, "rho_min = {v}");
        assert!(r.eigenfunction.unwrap().min() >= -1e-6);
    }

    #[test]
    fn zero_is_never_an_eigenvalue() {
        let m = strip_mask(16, PI / 3.0);
        let s = spectrum(&m, &SearchBox::new(-3.0, 3.0, -3.0, 3.0), 100, &SpectrumOptions::default()).unwrap();
        assert!(s.eigenvalues.iter().all(|z| z.re.abs() > 0.5));
    }
}
