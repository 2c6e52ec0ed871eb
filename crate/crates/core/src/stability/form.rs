use serde::{Deserialize, Serialize};

use super::test_fns::RadialTestFn;
use crate::error::{Error, Result};
use crate::radial::{gauss_legendre, power_tail, Dimension, RadialGrid, RadialProfile};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormTest {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

const REL_EPS: f64 = 1e-8;

fn breaks_within(grid: &RadialGrid, a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = grid.nodes().iter().copied().filter(|&r| r > a && r < b).collect();
    v.extend(extra.iter().copied().filter(|&r| r > a && r < b));
    v.push(a);
    v.push(b);
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// `σ_N ∫ (v_r² - g'(u) v²) t^{N-1} dt` for `v` supported inside `[r_min, 1]`.
pub fn quadratic_form(
    grid: &RadialGrid,
    dim: Dimension,
    gprime: impl Fn(f64) -> f64,
    v: &dyn RadialTestFn,
) -> Result<f64> {
    let (a, b) = v.support();
    if a < grid.r_min() * (1.0 - 1e-12) || b > 1.0 || a >= b {
        return Err(Error::InvalidArgument(format!(
            "test function support [{a}, {b}] must lie inside [{}, 1]",
            grid.r_min()
        )));
    }
    let breaks = breaks_within(grid, a, b, &v.breakpoints());
    let vmax = breaks.iter().map(|&r| v.value(r).abs()).fold(0.0, f64::max);
    for end in [a, b] {
        let value = v.value(end);
        if value.abs() > 1e-10 * vmax.max(f64::MIN_POSITIVE) {
            return Err(Error::NotCompactlySupported { r: end, value });
        }
    }
    let m = dim.as_f64() - 1.0;
    let integral = gauss_legendre(&breaks, |t| {
        let (vv, dv) = (v.value(t), v.deriv(t));
        (dv * dv - gprime(t) * vv * vv) * t.powf(m)
    });
    Ok(dim.sphere_area() * integral)
}

/// Both sides of `(N-1)∫ u_r² η² t^{N-1} ≤ ∫ u_r² ((tη)')² t^{N-1}` over `(0, 1)`.
pub fn radial_form_test(u: &RadialProfile, dim: Dimension, eta: &dyn RadialTestFn) -> Result<FormTest> {
    let ur = u.require_deriv(1)?;
    let grid = u.grid();
    let (s0, s1) = eta.support();
    let b = s1.min(1.0);
    let a = s0.max(grid.r_min());
    for (r, _) in grid.nodes().iter().zip(ur).filter(|(r, _)| **r >= a && **r <= b) {
        let d = eta.value(*r) + r * eta.deriv(*r);
        if !d.is_finite() || d.abs() > 1e150 {
            return Err(Error::UnboundedTestFunction { r: *r });
        }
    }
    if a >= b {
        return Ok(FormTest {
            lhs: 0.0,
            rhs: 0.0,
            holds: true,
        });
    }
    let n1 = dim.as_f64() - 1.0;
    let slope = |t: f64| u.eval_deriv(1, t).unwrap_or(0.0);
    let lhs_at = |t: f64| {
        let (e, w) = (eta.value(t), slope(t));
        n1 * w * w * e * e * t.powf(n1)
    };
    let rhs_at = |t: f64| {
        let d = eta.value(t) + t * eta.deriv(t);
        let w = slope(t);
        w * w * d * d * t.powf(n1)
    };
    let breaks = breaks_within(grid, a, b, &eta.breakpoints());
    let mut lhs = gauss_legendre(&breaks, lhs_at);
    let mut rhs = gauss_legendre(&breaks, rhs_at);
    if s0 < grid.r_min() {
        let (x0, x1) = (grid.nodes()[0], grid.nodes()[1]);
        let tail_start = s0.max(0.0);
        lhs += power_tail(x0, x1, lhs_at(x0), lhs_at(x1), tail_start)?;
        rhs += power_tail(x0, x1, rhs_at(x0), rhs_at(x1), tail_start)?;
    }
    let holds = lhs <= rhs + REL_EPS * lhs.abs().max(rhs.abs());
    Ok(FormTest { lhs, rhs, holds })
}
