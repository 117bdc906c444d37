//! Fundamental solutions of L_rho on the whole torus and torus potentials.
//!
//! With a unit point mass, E = (1/(2 pi P)) sum a_kl e^{i(w_k x + l y)}, w_k = 2 pi k / P and
//! a_kl = 1 / ((rho + i w_k)^2 - l^2). The double sum converges slowly, so one index is summed
//! in closed form: over k for fixed l (the periodic Green function of d/dx + b) or over l for
//! fixed k (the cosine kernel), whichever leaves the faster-decaying series at the point.
//!
//! The shift series of log-Weierstrass factors gives 2 pi E independently.
//!
//! Potentials use the exact inverse of the discrete periodic symbol, so applying the torus
//! operator to a potential returns the measure to round-off.

use crate::elliptic::{apply_torus, OperatorKind};
use crate::error::{Error, Result};
use crate::field::{GridField, GridMeasure};
use crate::grid::Grid;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

type C = Complex64;

const NEAR_INTEGER: f64 = 1e-3;

fn check_rho(rho: f64) -> Result<()> {
    if (rho - rho.round()).abs() < NEAR_INTEGER {
        return Err(Error::NearIntegerRho(rho));
    }
    Ok(())
}

/// a_kl on the torus with x-period `period`.
pub fn fourier_coefficient(rho: f64, period: f64, k: i64, l: i64) -> C {
    if k == 0 {
        return C::new(1.0 / (rho * rho - (l * l) as f64), 0.0);
    }
    let a = C::new(rho, 2.0 * PI * k as f64 / period);
    1.0 / (a * a - (l * l) as f64)
}

/// (1/P) sum_k e^{i w_k x} / (b + i w_k) for x in (0, P).
fn green_dx(b: f64, x: f64, p: f64) -> f64 {
    if b >= 0.0 {
        (-b * x).exp() / -(-b * p).exp_m1()
    } else {
        -(b * (p - x)).exp() / -(b * p).exp_m1()
    }
}

/// (1/P) sum_k e^{i w_k x} / (b + i w_k)^2, the b-derivative of `green_dx` with sign flipped.
fn green_dx2(b: f64, x: f64, p: f64) -> f64 {
    let q = -(-b * p).exp_m1();
    x * (-b * x).exp() / q + p * (-b * (x + p)).exp() / (q * q)
}

/// Closed-form kernel evaluator, optionally with the resonant modes (0, +-p) removed.
#[derive(Clone, Copy, Debug)]
pub struct FourierKernel {
    pub rho: f64,
    pub period: f64,
    /// Integer order whose resonant modes are dropped.
    pub resonant: Option<i64>,
}

impl FourierKernel {
    pub fn new(rho: f64, period: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self { rho, period, resonant: None })
    }

    pub fn generalized(p: i64, period: f64) -> Self {
        Self { rho: p as f64, period, resonant: Some(p.abs()) }
    }

    fn t_l(&self, l: i64, x: f64) -> f64 {
        let (r, p) = (self.rho, self.period);
        match self.resonant {
            Some(q) if l == q && q > 0 => {
                let qf = q as f64;
                (0.5 - x / p - green_dx(2.0 * qf, x, p) + 1.0 / (2.0 * qf * p)) / (2.0 * qf)
            }
            Some(0) if l == 0 => {
                let t = x / p;
                -0.5 * p * (t * t - t + 1.0 / 6.0)
            }
            _ if l == 0 => green_dx2(r, x, p),
            _ => {
                let lf = l as f64;
                (green_dx(r - lf, x, p) - green_dx(r + lf, x, p)) / (2.0 * lf)
            }
        }
    }

    fn s_k(&self, k: i64, y: f64) -> C {
        let ay = y.abs();
        let s = PI - ay;
        if k == 0 {
            let r = self.rho;
            return C::new(
                match self.resonant {
                    Some(0) => PI * PI / 6.0 - s * s / 2.0,
                    Some(q) => {
                        let qf = q as f64;
                        s * (qf * ay).sin() / qf - (qf * y).cos() / (2.0 * qf * qf)
                    }
                    None => PI * (r * s).cos() / (r * (PI * r).sin()),
                },
                0.0,
            );
        }
        let a = C::new(self.rho, 2.0 * PI * k as f64 / self.period);
        let i = C::new(0.0, 1.0);
        PI * i * (i * a * ay).exp() * (1.0 + (2.0 * i * a * s).exp()) / (a * ((2.0 * PI * i * a).exp() - 1.0))
    }

    /// E at (x, y); the point must not be a lattice translate of 0.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let p = self.period;
        let x = x.rem_euclid(p);
        let y = (y + PI).rem_euclid(2.0 * PI) - PI;
        let rate_x = x.min(p - x);
        let rate_y = 2.0 * PI * y.abs() / p;
        const EPS: f64 = 1e-16;
        if rate_x >= rate_y {
            let mut sum = self.t_l(0, x);
            let r = (-rate_x).exp();
            for l in 1.. {
                let t = 2.0 * (l as f64 * y).cos() * self.t_l(l, x);
                sum += t;
                let bound = self.t_l(l, x).abs() * 2.0 * r / (1.0 - r);
                if l as f64 > self.rho + 1.0 && bound < EPS * sum.abs().max(1.0) {
                    break;
                }
            }
            sum / (2.0 * PI)
        } else {
            let mut sum = self.s_k(0, y).re;
            let r = (-rate_y).exp();
            for k in 1.. {
                let w = 2.0 * PI * k as f64 * x / p;
                let sk = self.s_k(k, y);
                sum += 2.0 * (C::new(w.cos(), w.sin()) * sk).re;
                if sk.norm() * 2.0 * r / (1.0 - r) < EPS * sum.abs().max(1.0) {
                    break;
                }
            }
            sum / (2.0 * PI * p)
        }
    }
}

/// Sampled kernel with its singular cell.
#[derive(Clone, Debug)]
pub struct KernelField {
    pub field: GridField,
    /// Cell containing the origin.
    pub singular_cell: usize,
    /// The singular cell holds the cell average of the logarithmic part, not a point value.
    pub placeholder: bool,
}

fn log_rect_integral(a: f64, b: f64) -> f64 {
    // integral of log|z| over [0, a] x [0, b], a, b >= 0
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    0.5 * (a * b * (a * a + b * b).ln() - 3.0 * a * b + a * a * (b / a).atan() + b * b * (a / b).atan())
}

/// Mean of log|z| over the rectangle [x0, x1] x [y0, y1].
pub fn mean_log_over_rect(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let j = |x: f64, y: f64| x.signum() * y.signum() * log_rect_integral(x.abs(), y.abs());
    (j(x1, y1) - j(x0, y1) - j(x1, y0) + j(x0, y0)) / ((x1 - x0) * (y1 - y0))
}

fn sample(grid: Grid, f: impl Fn(f64, f64) -> f64) -> KernelField {
    let mut field = GridField::from_fn(grid, &f);
    let sc = grid.locate(0.0, 0.0);
    let (i, j) = grid.ij(sc);
    let (x0, y0) = (i as f64 * grid.hx, -PI + j as f64 * grid.hy);
    let (xc, yc) = grid.center(sc);
    let regular = field.values[sc] - (xc.hypot(yc)).ln() / (2.0 * PI);
    field.values[sc] = regular + mean_log_over_rect(x0, x0 + grid.hx, y0, y0 + grid.hy) / (2.0 * PI);
    KernelField { field, singular_cell: sc, placeholder: true }
}

/// E_rho sampled at cell centres by closed-form Fourier synthesis.
pub fn fundsol_fourier(rho: f64, grid: Grid) -> Result<KernelField> {
    let k = FourierKernel::new(rho, grid.period())?;
    Ok(sample(grid, |x, y| k.eval(x, y)))
}

/// Generalised kernel for integer order p: resonant modes zeroed, so that
/// L_p E' = delta - cos(p y)/(pi P) for p >= 1 and delta - 1/(2 pi P) for p = 0.
pub fn fundsol_generalized(p: i64, grid: Grid) -> KernelField {
    let k = FourierKernel::generalized(p, grid.period());
    sample(grid, |x, y| k.eval(x, y))
}

/// log of the Weierstrass primary factor of genus p, log|E(u, p)|.
pub fn weierstrass_h(u: C, p: u32) -> f64 {
    if u.norm() < 0.5 {
        // -Re sum_{j > p} u^j / j, summed directly to avoid cancellation
        let mut s: f64 = 0.0;
        let mut pw = u.powu(p + 1);
        let mut j = p + 1;
        loop {
            s -= pw.re / j as f64;
            pw *= u;
            j += 1;
            if pw.norm() <= 1e-17 * s.abs() || pw.norm() < 1e-300 {
                break s;
            }
        }
    } else {
        let mut s = (1.0 - u).norm().ln();
        let mut pw = C::new(1.0, 0.0);
        for j in 1..=p {
            pw *= u;
            s += pw.re / j as f64;
        }
        s
    }
}

/// Shift series sum_k H(e^{z + kP}, p) e^{-rho (x + kP)}, divided by 2 pi.
#[derive(Clone, Copy, Debug)]
pub struct WeierstrassKernel {
    pub rho: f64,
    pub period: f64,
    pub tol: f64,
}

impl WeierstrassKernel {
    pub fn new(rho: f64, period: f64, tol: f64) -> Result<Self> {
        check_rho(rho)?;
        if rho < 0.0 {
            return Err(Error::Parse("the shift series needs rho > 0".into()));
        }
        Ok(Self { rho, period, tol })
    }

    fn term(&self, x: f64, y: f64, k: i64, p: u32) -> f64 {
        let xs = x + k as f64 * self.period;
        weierstrass_h(C::from_polar(xs.exp(), y), p) * (-self.rho * xs).exp()
    }

    /// Value and number of shifts used.
    pub fn eval(&self, x: f64, y: f64) -> (f64, usize) {
        let p = self.rho.floor() as u32;
        let x = x.rem_euclid(self.period);
        let mut sum = self.term(x, y, 0, p);
        let mut used = 1;
        for (dir, rate) in [(1i64, self.rho - p as f64), (-1, p as f64 + 1.0 - self.rho)] {
            // the log factor in the terms slows the geometric decay; halve the rate
            let r = (-0.5 * rate * self.period).exp();
            for k in 1.. {
                let t = self.term(x, y, dir * k, p);
                sum += t;
                used += 1;
                let u = x + (dir * k) as f64 * self.period;
                if u.abs() > 1.0 && t.abs() * r / (1.0 - r) < 0.1 * self.tol {
                    break;
                }
            }
        }
        (sum / (2.0 * PI), used)
    }
}

/// (1/2 pi) times the shift series, sampled at cell centres.
pub fn fundsol_weierstrass(rho: f64, grid: Grid, tol: f64) -> Result<KernelField> {
    let k = WeierstrassKernel::new(rho, grid.period(), tol)?;
    Ok(sample(grid, |x, y| k.eval(x, y).0))
}

/// Which discrete kernel a potential uses.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelKind {
    Rho(f64),
    /// Integer order with the (0, +-p) modes removed.
    Generalized(i64),
}

/// Symbol of the periodic five-point L_rho on the DFT mode (k, l).
pub fn discrete_symbol(grid: &Grid, rho: f64, k: usize, l: usize) -> C {
    let tx = 2.0 * PI * k as f64 / grid.nx as f64;
    let ty = 2.0 * PI * l as f64 / grid.ny as f64;
    C::new(
        (2.0 * tx.cos() - 2.0) / (grid.hx * grid.hx) + (2.0 * ty.cos() - 2.0) / (grid.hy * grid.hy) + rho * rho,
        2.0 * rho * tx.sin() / grid.hx,
    )
}

fn fft2(grid: &Grid, data: &mut [C], inverse: bool) {
    let mut planner = FftPlanner::new();
    let (nx, ny) = (grid.nx, grid.ny);
    let fx = if inverse { planner.plan_fft_inverse(nx) } else { planner.plan_fft_forward(nx) };
    let fy = if inverse { planner.plan_fft_inverse(ny) } else { planner.plan_fft_forward(ny) };
    fx.process(data);
    let mut col = vec![C::new(0.0, 0.0); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = data[j * nx + i];
        }
        fy.process(&mut col);
        for j in 0..ny {
            data[j * nx + i] = col[j];
        }
    }
    if inverse {
        let s = 1.0 / (nx * ny) as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

fn kernel_hat(grid: &Grid, kind: KernelKind) -> Result<Vec<C>> {
    let rho = match kind {
        KernelKind::Rho(r) => {
            check_rho(r)?;
            r
        }
        KernelKind::Generalized(p) => p as f64,
    };
    let area = grid.cell_area();
    let mut hat = vec![C::new(0.0, 0.0); grid.len()];
    for l in 0..grid.ny {
        for k in 0..grid.nx {
            if let KernelKind::Generalized(p) = kind {
                let p = p.unsigned_abs() as usize % grid.ny;
                if k == 0 && (l == p || l == (grid.ny - p) % grid.ny) {
                    continue;
                }
            }
            let s = discrete_symbol(grid, rho, k, l);
            if s.norm() < 1e-300 {
                return Err(Error::RhoInSpectrum(rho));
            }
            hat[l * grid.nx + k] = 1.0 / (s * area);
        }
    }
    Ok(hat)
}

/// Discrete kernel: the potential of a unit mass at the cell containing the origin corner.
pub fn discrete_kernel(grid: Grid, kind: KernelKind) -> Result<GridField> {
    let mut hat = kernel_hat(&grid, kind)?;
    fft2(&grid, &mut hat, true);
    // DFT index (0, 0) is cell (0, 0); roll so that it sits at the origin cell
    let origin = grid.locate(0.0, 0.0);
    let (_, jo) = grid.ij(origin);
    let mut values = vec![0.0; grid.len()];
    for c in 0..grid.len() {
        let (i, j) = grid.ij(c);
        values[grid.idx(i, (j + jo) % grid.ny)] = hat[c].re;
    }
    Ok(GridField { grid, values })
}

/// Torus potential of a cell measure: circular convolution with the discrete kernel.
pub fn potential(nu: &GridMeasure, kind: KernelKind) -> Result<GridField> {
    let grid = nu.grid;
    let hat = kernel_hat(&grid, kind)?;
    let mut data: Vec<C> = nu.mass.iter().map(|&m| C::new(m, 0.0)).collect();
    fft2(&grid, &mut data, false);
    data.iter_mut().zip(&hat).for_each(|(d, h)| *d *= h);
    fft2(&grid, &mut data, true);
    Ok(GridField { grid, values: data.iter().map(|z| z.re).collect() })
}

/// Measure nu = L_rho v of a field on the whole torus.
pub fn riesz_measure(v: &GridField, rho: f64) -> GridMeasure {
    GridMeasure::from_density(&apply_torus(v, OperatorKind::Lrho(rho)))
}

#[derive(Clone, Debug)]
pub struct RepresentationReport {
    pub rho: f64,
    /// max |v - potential - fitted part|.
    pub residual: f64,
    /// Integer case: sum of e^{+-ipy} against nu.
    pub mass_integrals: Option<[C; 2]>,
    /// Integer case: fitted C in Re(C e^{ipy}).
    pub fitted: Option<C>,
    pub tolerance: f64,
}

/// Grid-scaled tolerance for L_rho masses of a field of size `scale`.
pub fn mass_tolerance(grid: &Grid, rho: f64, scale: f64) -> f64 {
    grid.h().powi(2) * (1.0 + rho * rho).powi(2) * scale + 1e-10
}

/// The integrals of e^{+-ipy} against nu.
pub fn mass_integrals(nu: &GridMeasure, p: i64) -> [C; 2] {
    let g = nu.grid;
    let pf = p as f64;
    [1.0, -1.0].map(|s| (0..g.len()).map(|c| nu.mass[c] * C::from_polar(1.0, s * pf * g.center(c).1)).sum::<C>())
}

/// Fails unless both resonant integrals vanish to the quadrature tolerance for fields of size
/// `scale`.
pub fn check_mass_symmetry(nu: &GridMeasure, p: i64, scale: f64) -> Result<[C; 2]> {
    let g = nu.grid;
    let ints = mass_integrals(nu, p);
    let tol = mass_tolerance(&g, p as f64, scale) * 2.0 * PI * g.period();
    let worst = ints[0].norm().max(ints[1].norm());
    if worst > tol {
        return Err(Error::MassSymmetryViolated(worst));
    }
    Ok(ints)
}

/// Reconstructs v from its own Riesz measure; for integer rho first checks that nu has no
/// resonant mass and then fits the Re(C e^{ipy}) remainder.
pub fn representation_check(v: &GridField, rho: f64) -> Result<RepresentationReport> {
    let grid = v.grid;
    let nu = riesz_measure(v, rho);
    let p = rho.round();
    if (rho - p).abs() >= NEAR_INTEGER {
        let pi = potential(&nu, KernelKind::Rho(rho))?;
        return Ok(RepresentationReport { rho, residual: pi.max_diff(v), mass_integrals: None, fitted: None, tolerance: 0.0 });
    }
    let p = p as i64;
    let ints = check_mass_symmetry(&nu, p, v.max_abs())?;
    let tol = mass_tolerance(&grid, p as f64, v.max_abs()) * 2.0 * PI * grid.period();
    let ys: Vec<f64> = (0..grid.len()).map(|c| grid.center(c).1).collect();
    let pf = p as f64;
    let w = v.zip_with(&potential(&nu, KernelKind::Generalized(p))?, |a, b| a - b);
    // project onto cos(py), sin(py) (or the constants when p = 0)
    let n = grid.len() as f64;
    let (mut a, mut b) = (0.0, 0.0);
    for c in 0..grid.len() {
        a += w.values[c] * (pf * ys[c]).cos();
        b += w.values[c] * (pf * ys[c]).sin();
    }
    let (a, b) = if p == 0 { (a / n, 0.0) } else { (2.0 * a / n, 2.0 * b / n) };
    let fitted = C::new(a, -b);
    let residual = (0..grid.len()).map(|c| (w.values[c] - (fitted * C::from_polar(1.0, pf * ys[c])).re).abs()).fold(0.0, f64::max);
    Ok(RepresentationReport { rho, residual, mass_integrals: Some(ints), fitted: Some(fitted), tolerance: tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TorusSpec;

    fn grid(nx: usize, ny: usize) -> Grid {
        Grid::new(TorusSpec::new(2f64.ln()).unwrap(), nx, ny).unwrap()
    }

    /// Brute-force double sum with a Gaussian damping factor removed in the limit; only used
    /// far from the singularity where both closed forms are valid.
    fn brute(rho: f64, p: f64, x: f64, y: f64, skip: Option<(i64, i64)>) -> f64 {
        let mut s = 0.0;
        let n = 400;
        for k in -n..=n {
            for l in -n..=n {
                if skip.is_some_and(|(a, b)| a == k && b.abs() == l.abs()) {
                    continue;
                }
                let w = 2.0 * PI * k as f64 / p;
                s += (fourier_coefficient(rho, p, k, l) * C::from_polar(1.0, w * x + l as f64 * y)).re;
            }
        }
        s / (2.0 * PI * p)
    }

    #[test]
    fn closed_forms_agree_with_each_other_and_brute_force() {
        let p = 2f64.ln();
        let kern = FourierKernel::new(1.5, p).unwrap();
        for &(x, y) in &[(0.3, 1.0), (0.1, 2.5), (0.5, -0.7)] {
            let v = kern.eval(x, y);
            let b = brute(1.5, p, x, y, None);
            assert!((v - b).abs() < 5e-3, "{v} vs {b}");
        }
        // both closed forms at one point
        let (x, y) = (0.3, 1.0);
        let sx: f64 = (kern.t_l(0, x) + (1..200).map(|l| 2.0 * (l as f64 * y).cos() * kern.t_l(l, x)).sum::<f64>()) / (2.0 * PI);
        let sy: f64 = (kern.s_k(0, y).re
            + (1..200).map(|k| 2.0 * (C::from_polar(1.0, 2.0 * PI * k as f64 * x / p) * kern.s_k(k, y)).re).sum::<f64>())
            / (2.0 * PI * p);
        assert!((sx - sy).abs() < 1e-12, "{sx} vs {sy}");
    }

    #[test]
    fn resonant_closed_forms_match_series() {
        let p = 2f64.ln();
        for q in [0i64, 1, 2] {
            let kern = FourierKernel::generalized(q, p);
            let (x, y) = (0.25, 1.3);
            let sx: f64 = (kern.t_l(0, x) + (1..300).map(|l| 2.0 * (l as f64 * y).cos() * kern.t_l(l, x)).sum::<f64>()) / (2.0 * PI);
            let sy: f64 = (kern.s_k(0, y).re
                + (1..300).map(|k| 2.0 * (C::from_polar(1.0, 2.0 * PI * k as f64 * x / p) * kern.s_k(k, y)).re).sum::<f64>())
                / (2.0 * PI * p);
            assert!((sx - sy).abs() < 1e-10, "p = {q}: {sx} vs {sy}");
            // resonance-removed k = 0 sum against a direct l-sum
            let direct: f64 = (-4000i64..=4000).filter(|l| l.abs() != q).map(|l| (l as f64 * y).cos() / ((q * q - l * l) as f64)).sum();
            assert!((kern.s_k(0, y).re - direct).abs() < 1e-3, "{} vs {direct}", kern.s_k(0, y).re);
        }
    }

    #[test]
    fn mean_log_matches_quadrature() {
        let (x0, x1, y0, y1) = (0.0, 0.2, -0.1, 0.3);
        let n = 800;
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                let x = x0 + (a as f64 + 0.5) * (x1 - x0) / n as f64;
                let y = y0 + (b as f64 + 0.5) * (y1 - y0) / n as f64;
                s += x.hypot(y).ln();
            }
        }
        s /= (n * n) as f64;
        assert!((mean_log_over_rect(x0, x1, y0, y1) - s).abs() < 1e-4);
    }

    #[test]
    fn genus_bound_on_half_circle() {
        for p in [1u32, 2] {
            let worst = (0..360)
                .map(|t| {
                    let u = C::from_polar(0.5, t as f64 * PI / 180.0);
                    weierstrass_h(u, p).abs() / 0.5f64.powi(p as i32 + 1)
                })
                .fold(0.0, f64::max);
            assert!(worst < 2.0, "p = {p}: {worst}");
        }
        assert!((weierstrass_h(C::new(-1.0, 0.0), 0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn discrete_kernel_inverts_operator() {
        let g = grid(16, 24);
        let k = discrete_kernel(g, KernelKind::Rho(1.5)).unwrap();
        let lk = apply_torus(&k, OperatorKind::Lrho(1.5));
        let o = g.locate(0.0, 0.0);
        for c in 0..g.len() {
            let want = if c == o { 1.0 / g.cell_area() } else { 0.0 };
            assert!((lk.values[c] - want).abs() < 1e-8 * (1.0 / g.cell_area()));
        }
    }

    #[test]
    fn shift_series_matches_fourier_off_the_singularity() {
        let g = grid(32, 48);
        for rho in [0.5, 1.5, 2.5] {
            let f = fundsol_fourier(rho, g).unwrap();
            let w = fundsol_weierstrass(rho, g, 1e-10).unwrap();
            let mut worst = 0.0f64;
            for c in 0..g.len() {
                let (x, y) = g.center(c);
                let dx = x.min(g.period() - x) / g.hx;
                if dx.hypot(y / g.hy) > 4.0 {
                    worst = worst.max((f.field.values[c] - w.field.values[c]).abs());
                }
            }
            assert!(worst < 1e-8, "rho = {rho}: {worst}");
        }
    }

    #[test]
    fn near_integer_is_rejected() {
        assert!(matches!(fundsol_fourier(2.0005, grid(8, 8)), Err(Error::NearIntegerRho(_))));
    }
}
