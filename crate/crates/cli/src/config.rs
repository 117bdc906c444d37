//! `key value` run configuration.

use crate::failure::Failure;
use std::path::{Path, PathBuf};
use torus_pencil::pencil::SearchBox;

/// Where a field input comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSource {
    File(PathBuf),
    Constant(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Fourier,
    Weierstrass,
    Discrete,
    /// Integer order with the resonant modes removed.
    Generalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub period: Option<f64>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub shape: Option<PathBuf>,
    pub rho: Option<f64>,
    pub search_box: Option<SearchBox>,
    /// Backward-error tolerance of accepted eigenpairs.
    pub tol: f64,
    /// Fixed-point tolerance of the subminorant iteration.
    pub obstacle_tol: f64,
    pub max_count: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub field: Option<FieldSource>,
    pub obstacle: Option<FieldSource>,
    pub sources: Vec<(f64, f64)>,
    pub z0: Option<(f64, f64)>,
    pub kernel: Kernel,
    pub slice_x: Vec<f64>,
    pub slice_y: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            period: None,
            nx: None,
            ny: None,
            shape: None,
            rho: None,
            search_box: None,
            tol: 1e-8,
            obstacle_tol: 1e-10,
            max_count: 64,
            seed: 7,
            out: PathBuf::from("out"),
            field: None,
            obstacle: None,
            sources: Vec::new(),
            z0: None,
            kernel: Kernel::Fourier,
            slice_x: Vec::new(),
            slice_y: Vec::new(),
        }
    }
}

fn number(key: &str, v: &str) -> Result<f64, Failure> {
    let x: f64 = v.parse().map_err(|_| Failure::config(format!("{key}: '{v}' is not a number")))?;
    if !x.is_finite() {
        return Err(Failure::config(format!("{key}: '{v}' is not finite")));
    }
    Ok(x)
}

fn list(key: &str, v: &str) -> Result<Vec<f64>, Failure> {
    v.split(',').map(|t| number(key, t.trim())).collect()
}

fn point(key: &str, v: &str) -> Result<(f64, f64), Failure> {
    match list(key, v)?[..] {
        [x, y] => Ok((x, y)),
        _ => Err(Failure::config(format!("{key}: expected 'x,y'"))),
    }
}

fn positive(key: &str, v: &str) -> Result<f64, Failure> {
    let x = number(key, v)?;
    if x <= 0.0 {
        return Err(Failure::config(format!("{key} must be positive")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize, Failure> {
    v.parse().map_err(|_| Failure::config(format!("{key}: '{v}' is not a count")))
}

pub fn parse_box(v: &str) -> Result<SearchBox, Failure> {
    match list("box", v)?[..] {
        [a, b, c, d] if a < b && c < d => Ok(SearchBox::new(a, b, c, d)),
        [_, _, _, _] => Err(Failure::config("box: need re_min < re_max and im_min < im_max")),
        _ => Err(Failure::config("box: expected 're_min,re_max,im_min,im_max'")),
    }
}

fn field_source(base: &Path, v: &str) -> FieldSource {
    match v.parse::<f64>() {
        Ok(c) if c.is_finite() => FieldSource::Constant(c),
        _ => FieldSource::File(base.join(v)),
    }
}

impl RunConfig {
    /// Applies one `key value` setting; relative paths resolve against `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), Failure> {
        let v = value.trim();
        match key {
            "period" => self.period = Some(positive(key, v)?),
            "nx" => self.nx = Some(count(key, v)?),
            "ny" => self.ny = Some(count(key, v)?),
            "shape" => self.shape = Some(base.join(v)),
            "rho" => self.rho = Some(positive(key, v)?),
            "box" => self.search_box = Some(parse_box(v)?),
            "tol" => self.tol = positive(key, v)?,
            "obstacle_tol" => self.obstacle_tol = positive(key, v)?,
            "max_count" => self.max_count = count(key, v)?,
            "seed" => self.seed = v.parse().map_err(|_| Failure::config(format!("seed: '{v}' is not an integer")))?,
            "out" => self.out = base.join(v),
            "field" => self.field = Some(field_source(base, v)),
            "obstacle" => self.obstacle = Some(field_source(base, v)),
            "source" => self.sources.push(point(key, v)?),
            "z0" => self.z0 = Some(point(key, v)?),
            "kernel" => {
                self.kernel = match v {
                    "fourier" => Kernel::Fourier,
                    "weierstrass" => Kernel::Weierstrass,
                    "discrete" => Kernel::Discrete,
                    "generalized" => Kernel::Generalized,
                    _ => return Err(Failure::config(format!("kernel: unknown '{v}'"))),
                }
            }
            "slice_x" => self.slice_x.extend(list(key, v)?),
            "slice_y" => self.slice_y.extend(list(key, v)?),
            _ => return Err(Failure::config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, Failure> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            if value.trim().is_empty() {
                return Err(Failure::config(format!("line {}: '{key}' has no value", n + 1)));
            }
            cfg.set(key, value, base).map_err(|e| Failure::config(format!("line {}: {}", n + 1, e.message)))?;
        }
        Ok(cfg)
    }

    pub fn rho(&self) -> Result<f64, Failure> {
        self.rho.ok_or_else(|| Failure::config("this command needs 'rho'"))
    }
}
