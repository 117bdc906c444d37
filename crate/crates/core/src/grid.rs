use crate::error::{Error, Result};
use std::f64::consts::PI;

/// The torus obtained from the rectangle (0,P) x (-pi,pi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusSpec {
    pub period: f64,
}

impl TorusSpec {
    pub fn new(period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidGrid(format!("period must be positive, got {period}")));
        }
        Ok(Self { period })
    }

    /// Dilation factor T = e^P of the homogeneous plane domain.
    pub fn dilation(&self) -> f64 {
        self.period.exp()
    }

    pub fn y_period(&self) -> f64 {
        2.0 * PI
    }
}

/// Uniform cell-centred discretisation of the torus, wrapping in both directions.
///
/// Cell `(i, j)` has centre `((i + 1/2) hx, -pi + (j + 1/2) hy)` and flat index `j * nx + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub spec: TorusSpec,
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

impl Grid {
    pub fn new(spec: TorusSpec, nx: usize, ny: usize) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(Error::InvalidGrid(format!("need nx, ny >= 8, got {nx} x {ny}")));
        }
        Ok(Self { spec, nx, ny, hx: spec.period / nx as f64, hy: 2.0 * PI / ny as f64 })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn period(&self) -> f64 {
        self.spec.period
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, c: usize) -> (usize, usize) {
        (c % self.nx, c / self.nx)
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.hx
    }

    pub fn y(&self, j: usize) -> f64 {
        -PI + (j as f64 + 0.5) * self.hy
    }

    pub fn center(&self, c: usize) -> (f64, f64) {
        let (i, j) = self.ij(c);
        (self.x(i), self.y(j))
    }

    /// Index of the cell reached by a signed whole-cell offset, with wrap-around.
    pub fn shift(&self, c: usize, di: isize, dj: isize) -> usize {
        let (i, j) = self.ij(c);
        let i = (i as isize + di).rem_euclid(self.nx as isize) as usize;
        let j = (j as isize + dj).rem_euclid(self.ny as isize) as usize;
        self.idx(i, j)
    }

    /// The cell containing the point, after reduction modulo the periods.
    pub fn locate(&self, x: f64, y: f64) -> usize {
        let xr = x.rem_euclid(self.period());
        let yr = (y + PI).rem_euclid(2.0 * PI);
        let i = ((xr / self.hx).floor() as usize).min(self.nx - 1);
        let j = ((yr / self.hy).floor() as usize).min(self.ny - 1);
        self.idx(i, j)
    }

    /// Largest spacing, the resolution scale used by tolerances.
    pub fn h(&self) -> f64 {
        self.hx.max(self.hy)
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_grids() {
        let spec = TorusSpec::new(2f64.ln()).unwrap();
        assert!(Grid::new(spec, 4, 16).is_err());
        assert!(TorusSpec::new(-1.0).is_err());
    }

    #[test]
    fn locate_inverts_center() {
        let g = Grid::new(TorusSpec::new(0.7).unwrap(), 12, 20).unwrap();
        for c in 0..g.len() {
            let (x, y) = g.center(c);
            assert_eq!(g.locate(x, y), c);
            assert_eq!(g.locate(x + 3.0 * 0.7, y - 4.0 * PI), c);
        }
    }

    #[test]
    fn shift_wraps() {
        let g = Grid::new(TorusSpec::new(1.0).unwrap(), 8, 8).unwrap();
        assert_eq!(g.shift(g.idx(0, 0), -1, -1), g.idx(7, 7));
        assert_eq!(g.shift(g.idx(7, 3), 1, 0), g.idx(0, 3));
    }
}
