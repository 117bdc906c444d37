//! Sampled fields and cell measures on the torus grid.

use crate::error::{Error, Result};
use crate::grid::{Grid, TorusSpec};
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

/// Signed mass per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct GridMeasure {
    pub grid: Grid,
    pub mass: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|c| {
                let (x, y) = grid.center(c);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_diff(&self, other: &GridField) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        GridField { grid: self.grid, values }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Whole-cell translation with wrap-around.
    pub fn translated(&self, di: isize, dj: isize) -> GridField {
        let mut values = vec![0.0; self.grid.len()];
        for c in 0..self.grid.len() {
            values[self.grid.shift(c, di, dj)] = self.values[c];
        }
        GridField { grid: self.grid, values }
    }

    /// `x,y,value` lines preceded by the `# nx ny P` header.
    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut s = format!("# {} {} {}\nx,y,value\n", g.nx, g.ny, g.period());
        for c in 0..g.len() {
            let (x, y) = g.center(c);
            s.push_str(&format!("{x:.12e},{y:.12e},{:e}\n", self.values[c]));
        }
        s
    }

    /// Matrix block: header `# nx ny P`, then one line per grid row of increasing y.
    pub fn to_matrix_csv(&self) -> String {
        let g = self.grid;
        let mut s = format!("# {} {} {}\n", g.nx, g.ny, g.period());
        for j in 0..g.ny {
            let row: Vec<String> = (0..g.nx).map(|i| format!("{:e}", self.values[g.idx(i, j)])).collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }

    /// Reads either CSV layout written above.
    pub fn from_csv(text: &str) -> Result<GridField> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = loop {
            let l = lines.next().ok_or_else(|| Error::Parse("missing '# nx ny P' header".into()))?;
            let toks: Vec<&str> = l.trim_start_matches('#').split_whitespace().collect();
            if l.starts_with('#') && toks.len() == 3 {
                if let (Ok(nx), Ok(ny), Ok(p)) = (toks[0].parse(), toks[1].parse(), toks[2].parse::<f64>()) {
                    break (nx, ny, p);
                }
            }
        };
        let grid = Grid::new(TorusSpec::new(header.2)?, header.0, header.1)?;
        let body: Vec<&str> = lines.filter(|l| !l.starts_with('#') && !l.starts_with('x')).collect();
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}'")));
        let mut values = vec![0.0; grid.len()];
        if body.len() == grid.len() && body.iter().all(|l| l.split(',').count() == 3) {
            for l in body {
                let t: Vec<&str> = l.split(',').collect();
                values[grid.locate(num(t[0])?, num(t[1])?)] = num(t[2])?;
            }
        } else if body.len() == grid.ny {
            for (j, l) in body.iter().enumerate() {
                let row: Vec<f64> = l.split(',').map(num).collect::<Result<_>>()?;
                if row.len() != grid.nx {
                    return Err(Error::Parse(format!("row {j} has {} entries", row.len())));
                }
                for (i, v) in row.into_iter().enumerate() {
                    values[grid.idx(i, j)] = v;
                }
            }
        } else {
            return Err(Error::Parse("field body matches neither layout".into()));
        }
        Ok(GridField { grid, values })
    }
}

impl ComplexField {
    pub fn real(&self) -> GridField {
        GridField { grid: self.grid, values: self.values.iter().map(|z| z.re).collect() }
    }

    pub fn to_csv(&self) -> String {
        let g = self.grid;
        let mut s = format!("# {} {} {}\nx,y,re,im\n", g.nx, g.ny, g.period());
        for c in 0..g.len() {
            let (x, y) = g.center(c);
            let z = self.values[c];
            s.push_str(&format!("{x:.12e},{y:.12e},{:e},{:e}\n", z.re, z.im));
        }
        s
    }
}

impl GridMeasure {
    pub fn zeros(grid: Grid) -> Self {
        Self { grid, mass: vec![0.0; grid.len()] }
    }

    pub fn dirac(grid: Grid, cell: usize) -> Self {
        let mut m = Self::zeros(grid);
        m.mass[cell] = 1.0;
        m
    }

    /// Measure with the given density (mass = density x cell area).
    pub fn from_density(density: &GridField) -> Self {
        let a = density.grid.cell_area();
        Self { grid: density.grid, mass: density.values.iter().map(|d| d * a).collect() }
    }

    pub fn density(&self) -> GridField {
        let a = self.grid.cell_area();
        GridField { grid: self.grid, values: self.mass.iter().map(|m| m / a).collect() }
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.mass.iter().map(|m| m.abs()).sum()
    }

    pub fn add(&self, other: &GridMeasure) -> GridMeasure {
        GridMeasure { grid: self.grid, mass: self.mass.iter().zip(&other.mass).map(|(a, b)| a + b).collect() }
    }
}
