mod common;

use common::*;
use torus_pencil::martin::*;
use torus_pencil::pencil::{rho_min, SpectrumOptions};

fn base(m: &torus_pencil::domain::DomainMask) -> usize {
    m.grid.locate(0.01, 0.0)
}

#[test]
fn martin_function_of_sector_is_the_power_profile() {
    for target in [1.0f64, 2.0] {
        let m = sector(16, 96, target);
        let h = martin_function(&m, 0, base(&m), 4).unwrap();
        let lat = &h.window.lattice;
        let (x0, y0) = lat.center(h.z0);
        let exact = |x: f64, y: f64| (target * (x - x0)).exp() * (target * y).cos() / (target * y0).cos();
        let third = 4.0 * m.grid.period() / 3.0;
        let mut worst = 0.0f64;
        for col in 0..lat.nx {
            let cells: Vec<usize> = (0..lat.ny).map(|j| lat.idx(col, j)).filter(|&c| h.component[c]).collect();
            if cells.is_empty() || lat.center(cells[0]).0.abs() > third {
                continue;
            }
            let top = cells.iter().map(|&c| h.h[c]).fold(0.0, f64::max);
            for &c in &cells {
                let (x, y) = lat.center(c);
                worst = worst.max((h.h[c] - exact(x, y)).abs() / top);
            }
        }
        assert!(worst < 0.05, "target {target}: {worst}");
        let (ratio, dev) = h.periodicity();
        let want = 2f64.powf(target);
        assert!((ratio / want - 1.0).abs() < 0.03 && dev < 0.03, "{ratio} vs {want}, dev {dev}");
    }
}

#[test]
fn growth_and_decay_agree_with_pencil() {
    let m = sector(16, 96, 1.0);
    let p = rho_min(&m, &SpectrumOptions::default()).unwrap().value.unwrap();
    let g = rho_from_growth(&martin_function(&m, 0, base(&m), 4).unwrap()).unwrap();
    let d = rho_from_hm_decay(&m, 0, base(&m), 8).unwrap();
    for v in [g.value, d.estimate.value] {
        assert!((v - 1.0).abs() < 0.05 && (v / p - 1.0).abs() < 0.05, "{v} vs {p}");
    }
    assert!(d.band_ratio <= 10.0, "band ratio {}", d.band_ratio);
    assert!(g.ci > 0.0 && g.ci < 0.1);
}

#[test]
fn extremal_slope_matches_modulus() {
    let m = sector(16, 64, 2.0);
    let md = rho_from_modulus(&m, 0).unwrap();
    let ex = rho_from_extremal(&m, 0, 4).unwrap();
    assert!((md.value - 2.0).abs() < 0.1);
    assert!((ex.value / md.value - 1.0).abs() < 0.02);
}

#[test]
fn window_must_hold_three_periods() {
    let m = sector(16, 64, 2.0);
    assert!(matches!(martin_function(&m, 0, base(&m), 2), Err(torus_pencil::Error::WindowTooSmall(_))));
}

#[test]
fn beta_functional_separates_growth_rates() {
    let target = 2.0;
    let m = sector(16, 96, target);
    let z0 = base(&m);
    let h = |x: f64, y: f64| (target * x).exp() * (target * y).cos();
    let b = beta_functional(&m, 0, z0, h, 8).unwrap();
    assert!(!b.diverging && b.beta.is_finite() && b.beta > 0.0);
    let fast = beta_functional(&m, 0, z0, |x, y| (2.0 * target * x).exp() * (target * y).cos().max(0.0), 8).unwrap();
    assert!(fast.diverging);
    let zero = beta_functional(&m, 0, z0, |_, _| 0.0, 8).unwrap();
    assert_eq!(zero.beta, 0.0);
}

#[test]
fn band_has_no_martin_growth() {
    let m = band(16, 32);
    let z0 = m.inside_cells()[0];
    assert!(martin_function(&m, 0, z0, 4).is_err());
}
