//! Shape language for torus domains: primitives combined by union and difference.

use crate::error::{Error, Result};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    /// ymin < y < ymax (mod 2 pi)
    Strip {
        ymin: f64,
        ymax: f64,
    },
    /// xmin < x < xmax (mod P)
    Band {
        xmin: f64,
        xmax: f64,
    },
    Rect {
        x0: f64,
        x1: f64,
        y0: f64,
        y1: f64,
    },
    Disc {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Polygon(Vec<(f64, f64)>),
    /// Neighbourhood of half-width `eps` of the closed geodesic winding `k` times in x and
    /// `l` times in y, i.e. the lines y = 2 pi l x / (k P) + (translates).
    Tube {
        k: i64,
        l: i64,
        eps: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Union,
    Difference,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShapeExpr {
    pub terms: Vec<(Op, Primitive)>,
}

/// A parsed shape file: torus header plus the expression.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeFile {
    pub period: f64,
    pub nx: usize,
    pub ny: usize,
    pub shape: ShapeExpr,
}

fn in_periodic_interval(v: f64, lo: f64, hi: f64, period: f64) -> bool {
    if hi - lo >= period {
        return true;
    }
    let t = (v - lo).rem_euclid(period);
    t > 0.0 && t < hi - lo
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn point_in_polygon(x: f64, y: f64, poly: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

impl Primitive {
    pub fn contains(&self, x: f64, y: f64, period: f64) -> bool {
        let tau = 2.0 * PI;
        match *self {
            Primitive::Strip { ymin, ymax } => in_periodic_interval(y, ymin, ymax, tau),
            Primitive::Band { xmin, xmax } => in_periodic_interval(x, xmin, xmax, period),
            Primitive::Rect { x0, x1, y0, y1 } => in_periodic_interval(x, x0, x1, period) && in_periodic_interval(y, y0, y1, tau),
            Primitive::Disc { cx, cy, r } => {
                let mx = (r / period).ceil() as i64 + 1;
                let my = (r / tau).ceil() as i64 + 1;
                let dx0 = (x - cx).rem_euclid(period);
                let dy0 = (y - cy).rem_euclid(tau);
                for a in -mx..=mx {
                    for b in -my..=my {
                        let dx = dx0 + a as f64 * period;
                        let dy = dy0 + b as f64 * tau;
                        if dx * dx + dy * dy < r * r {
                            return true;
                        }
                    }
                }
                false
            }
            Primitive::Polygon(ref poly) => {
                if poly.len() < 3 {
                    return false;
                }
                let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for &(px, py) in poly {
                    xmin = xmin.min(px);
                    xmax = xmax.max(px);
                    ymin = ymin.min(py);
                    ymax = ymax.max(py);
                }
                let a0 = ((xmin - x) / period).floor() as i64;
                let a1 = ((xmax - x) / period).ceil() as i64;
                let b0 = ((ymin - y) / tau).floor() as i64;
                let b1 = ((ymax - y) / tau).ceil() as i64;
                for a in a0..=a1 {
                    for b in b0..=b1 {
                        if point_in_polygon(x + a as f64 * period, y + b as f64 * tau, poly) {
                            return true;
                        }
                    }
                }
                false
            }
            Primitive::Tube { k, l, eps } => {
                let g = gcd(k, l).max(1);
                let (k, l) = (k / g, l / g);
                let a = k as f64 * period;
                let b = tau * l as f64;
                let c = x * b - y * a;
                let spacing = tau * period;
                let d = (c - spacing * (c / spacing).round()).abs();
                d / a.hypot(b) < eps
            }
        }
    }
}

impl ShapeExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, op: Op, p: Primitive) -> Self {
        self.terms.push((op, p));
        self
    }

    pub fn union(self, p: Primitive) -> Self {
        self.with(Op::Union, p)
    }

    pub fn minus(self, p: Primitive) -> Self {
        self.with(Op::Difference, p)
    }

    pub fn contains(&self, x: f64, y: f64, period: f64) -> bool {
        let mut acc = false;
        for (op, p) in &self.terms {
            match op {
                Op::Union => acc = acc || p.contains(x, y, period),
                Op::Difference => acc = acc && !p.contains(x, y, period),
            }
        }
        acc
    }

    /// Mirror image under (x, y) -> (-x, -y).
    pub fn reflected(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(op, p)| {
                let q = match p.clone() {
                    Primitive::Strip { ymin, ymax } => Primitive::Strip { ymin: -ymax, ymax: -ymin },
                    Primitive::Band { xmin, xmax } => Primitive::Band { xmin: -xmax, xmax: -xmin },
                    Primitive::Rect { x0, x1, y0, y1 } => Primitive::Rect { x0: -x1, x1: -x0, y0: -y1, y1: -y0 },
                    Primitive::Disc { cx, cy, r } => Primitive::Disc { cx: -cx, cy: -cy, r },
                    Primitive::Polygon(v) => Primitive::Polygon(v.into_iter().map(|(a, b)| (-a, -b)).collect()),
                    t @ Primitive::Tube { .. } => t,
                };
                (*op, q)
            })
            .collect();
        Self { terms }
    }
}

/// Evaluates a numeric token: products and quotients of numbers, `pi` and `P`.
fn parse_value(tok: &str, period: f64) -> std::result::Result<f64, String> {
    let (sign, body) = match tok.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, tok),
    };
    let mut value = 1.0;
    let mut op = '*';
    let mut start = 0;
    let chars: Vec<char> = body.chars().collect();
    for pos in 0..=chars.len() {
        if pos == chars.len() || chars[pos] == '*' || chars[pos] == '/' {
            let factor: String = chars[start..pos].iter().collect();
            let f = match factor.as_str() {
                "pi" => PI,
                "P" => period,
                s => s.parse::<f64>().map_err(|_| format!("bad number '{tok}'"))?,
            };
            if op == '*' {
                value *= f;
            } else {
                value /= f;
            }
            if pos < chars.len() {
                op = chars[pos];
            }
            start = pos + 1;
        }
    }
    Ok(sign * value)
}

pub fn parse_shape_file(text: &str) -> Result<ShapeFile> {
    let mut header: Option<(f64, usize, usize)> = None;
    let mut shape = ShapeExpr::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::ShapeParse { line: line_no, msg };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks[0] == "torus" {
            if toks.len() != 4 {
                return Err(err("expected 'torus P nx ny'".into()));
            }
            let p = parse_value(toks[1], 0.0).map_err(err)?;
            let nx = toks[2].parse().map_err(|_| err("bad nx".into()))?;
            let ny = toks[3].parse().map_err(|_| err("bad ny".into()))?;
            header = Some((p, nx, ny));
            continue;
        }
        let period = header.ok_or_else(|| err("primitive before torus header".into()))?.0;
        let (op, rest) = match toks[0] {
            "+" => (Op::Union, &toks[1..]),
            "-" => (Op::Difference, &toks[1..]),
            t if t.starts_with('+') => (Op::Union, &toks[..]),
            t if t.starts_with('-') => (Op::Difference, &toks[..]),
            _ => return Err(err("primitive lines start with '+' or '-'".into())),
        };
        let mut rest: Vec<String> = rest.iter().map(|s| s.to_string()).collect();
        if let Some(first) = rest.first_mut() {
            if first.len() > 1 && (first.starts_with('+') || first.starts_with('-')) {
                *first = first[1..].to_string();
            }
        }
        let kind = rest.first().cloned().ok_or_else(|| err("missing primitive".into()))?;
        let vals: Vec<f64> = rest[1..].iter().map(|t| parse_value(t, period)).collect::<std::result::Result<_, _>>().map_err(err)?;
        let need = |n: usize| -> Result<()> {
            if vals.len() == n {
                Ok(())
            } else {
                Err(Error::ShapeParse { line: line_no, msg: format!("{kind} takes {n} values") })
            }
        };
        let prim = match kind.as_str() {
            "strip" => {
                need(2)?;
                Primitive::Strip { ymin: vals[0], ymax: vals[1] }
            }
            "band" => {
                need(2)?;
                Primitive::Band { xmin: vals[0], xmax: vals[1] }
            }
            "rect" => {
                need(4)?;
                Primitive::Rect { x0: vals[0], x1: vals[1], y0: vals[2], y1: vals[3] }
            }
            "disc" => {
                need(3)?;
                Primitive::Disc { cx: vals[0], cy: vals[1], r: vals[2] }
            }
            "tube" => {
                need(3)?;
                if vals[0] < 1.0 || vals[0].fract() != 0.0 || vals[1].fract() != 0.0 {
                    return Err(err("tube needs integer k >= 1 and integer l".into()));
                }
                Primitive::Tube { k: vals[0] as i64, l: vals[1] as i64, eps: vals[2] }
            }
            "polygon" => {
                if vals.len() < 6 || !vals.len().is_multiple_of(2) {
                    return Err(err("polygon needs at least three x y pairs".into()));
                }
                Primitive::Polygon(vals.chunks(2).map(|c| (c[0], c[1])).collect())
            }
            other => return Err(err(format!("unknown primitive '{other}'"))),
        };
        shape = shape.with(op, prim);
    }
    let (period, nx, ny) = header.ok_or(Error::ShapeParse { line: 0, msg: "missing torus header".into() })?;
    Ok(ShapeFile { period, nx, ny, shape })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_wraps_in_y() {
        let s = Primitive::Strip { ymin: 3.0, ymax: 3.5 };
        assert!(s.contains(0.1, 3.2 - 2.0 * PI, 1.0));
        assert!(!s.contains(0.1, 0.0, 1.0));
    }

    #[test]
    fn difference_removes() {
        let e = ShapeExpr::new().union(Primitive::Strip { ymin: -1.0, ymax: 1.0 }).minus(Primitive::Disc { cx: 0.5, cy: 0.0, r: 0.2 });
        assert!(!e.contains(0.5, 0.0, 1.0));
        assert!(e.contains(0.5, 0.5, 1.0));
        // periodic image of the disc
        assert!(!e.contains(1.55, 0.0, 1.0));
    }

    #[test]
    fn tube_follows_its_line() {
        let p = 2f64.ln();
        let t = Primitive::Tube { k: 2, l: 1, eps: 0.05 };
        for s in 0..20 {
            let x = s as f64 * 0.17;
            let y = 2.0 * PI * x / (2.0 * p);
            assert!(t.contains(x, y, p));
            assert!(!t.contains(x, y + 0.3, p));
        }
    }

    #[test]
    fn parses_shape_file() {
        let f = parse_shape_file("# demo\ntorus 0.693147 64 64\n+ strip -pi/4 pi/4\n- disc P/2 0 0.1\n+tube 3 1 0.05\n").unwrap();
        assert_eq!(f.nx, 64);
        assert_eq!(f.shape.terms.len(), 3);
        assert_eq!(f.shape.terms[0].1, Primitive::Strip { ymin: -PI / 4.0, ymax: PI / 4.0 });
        assert!(matches!(f.shape.terms[1], (Op::Difference, Primitive::Disc { .. })));
        assert!(matches!(f.shape.terms[2], (Op::Union, Primitive::Tube { k: 3, l: 1, .. })));
    }

    #[test]
    fn parse_errors_carry_line() {
        match parse_shape_file("torus 1 16 16\n+ blob 1 2\n") {
            Err(Error::ShapeParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_shape_file("+ strip 0 1\n").is_err());
    }

    #[test]
    fn value_tokens() {
        assert!((parse_value("-3*pi/4", 0.0).unwrap() + 0.75 * PI).abs() < 1e-15);
        assert!((parse_value("P/2", 0.8).unwrap() - 0.4).abs() < 1e-15);
    }
}
