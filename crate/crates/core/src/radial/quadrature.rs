//! Composite quadrature on radial grids.
//!
//! Each panel `[x₀, x₁]` is integrated exactly for the power law
//! `f₀ (x/x₀)^q` through both samples when they share a sign, and by the
//! trapezoid rule otherwise. The rule is second order for smooth integrands
//! and exact for the pure powers that dominate near `r = 0`.

use crate::error::{Error, Result};
use crate::radial::grid::RadialGrid;

fn power_exponent(x0: f64, x1: f64, f0: f64, f1: f64) -> Option<f64> {
    if f0 == 0.0 || f1 == 0.0 || (f0 > 0.0) != (f1 > 0.0) {
        return None;
    }
    let q = (f1 / f0).ln() / (x1 / x0).ln();
    q.is_finite().then_some(q)
}

fn panel(x0: f64, x1: f64, f0: f64, f1: f64) -> f64 {
    if let Some(q) = power_exponent(x0, x1, f0, f1) {
        let ratio = x1 / x0;
        let v = if (q + 1.0).abs() < 1e-9 {
            f0 * x0 * ratio.ln()
        } else {
            f0 * x0 * ((q + 1.0) * ratio.ln()).exp_m1() / (q + 1.0)
        };
        if v.is_finite() {
            return v;
        }
    }
    0.5 * (f0 + f1) * (x1 - x0)
}

/// Value at `x ∈ [x0, x1]` of the same interpolant the panel rule integrates.
fn panel_interp(x0: f64, x1: f64, f0: f64, f1: f64, x: f64) -> f64 {
    match power_exponent(x0, x1, f0, f1) {
        Some(q) => f0 * (x / x0).powf(q),
        None => f0 + (f1 - f0) * (x - x0) / (x1 - x0),
    }
}

fn check_finite(grid: &RadialGrid, f: &[f64]) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for {} nodes",
            f.len(),
            grid.len()
        )));
    }
    match f.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite { r: grid.nodes()[i] }),
        None => Ok(()),
    }
}

/// Power-law estimate of `∫_a^{r_min} f` from the first two samples.
pub fn origin_tail(grid: &RadialGrid, f: &[f64], a: f64) -> Result<f64> {
    let x = grid.nodes();
    power_tail(x[0], x[1], f[0], f[1], a)
}

/// `∫_a^{x0} f` for the power law through `(x0, f0)` and `(x1, f1)`.
pub fn power_tail(x0: f64, x1: f64, f0: f64, f1: f64, a: f64) -> Result<f64> {
    if a >= x0 || f0 == 0.0 {
        return Ok(0.0);
    }
    let q = power_exponent(x0, x1, f0, f1).unwrap_or(0.0);
    if q <= -1.0 && a <= 0.0 {
        return Err(Error::NonIntegrable { exponent: q });
    }
    if (q + 1.0).abs() < 1e-9 {
        return Ok(f0 * x0 * (x0 / a).ln());
    }
    let frac = if a <= 0.0 { 0.0 } else { (a / x0).powf(q + 1.0) };
    Ok(f0 * x0 * (1.0 - frac) / (q + 1.0))
}

/// `∫_a^b f(t) dt` from samples of `f` on `grid`. If `a < r_min` the
/// uncovered piece is added as a power-law tail.
pub fn integrate(grid: &RadialGrid, f: &[f64], a: f64, b: f64) -> Result<f64> {
    check_finite(grid, f)?;
    if b < a {
        return Ok(-integrate(grid, f, b, a)?);
    }
    let x = grid.nodes();
    let tail = origin_tail(grid, f, a)?;
    let (a, b) = (a.max(x[0]), b.min(1.0));
    if b <= a {
        return Ok(tail);
    }
    let (ia, ib) = (grid.locate(a), grid.locate(b));
    let fa = panel_interp(x[ia], x[ia + 1], f[ia], f[ia + 1], a);
    let fb = panel_interp(x[ib], x[ib + 1], f[ib], f[ib + 1], b);
    if ia == ib {
        return Ok(tail + panel(a, b, fa, fb));
    }
    let mut sum = panel(a, x[ia + 1], fa, f[ia + 1]);
    for i in ia + 1..ib {
        sum += panel(x[i], x[i + 1], f[i], f[i + 1]);
    }
    if b > x[ib] {
        sum += panel(x[ib], b, f[ib], fb);
    }
    Ok(tail + sum)
}

/// `∫_a^b t^m φ(t) dt`.
pub fn weighted_integral(grid: &RadialGrid, phi: &[f64], m: f64, a: f64, b: f64) -> Result<f64> {
    check_finite(grid, phi)?;
    let f: Vec<f64> = grid.nodes().iter().zip(phi).map(|(t, p)| t.powf(m) * p).collect();
    integrate(grid, &f, a, b)
}

/// Running integral `∫_{r_min}^{r_i} f` at every node (no origin tail).
pub fn cumulative(grid: &RadialGrid, f: &[f64]) -> Result<Vec<f64>> {
    check_finite(grid, f)?;
    let x = grid.nodes();
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 0..x.len() - 1 {
        acc += panel(x[i], x[i + 1], f[i], f[i + 1]);
        out.push(acc);
    }
    Ok(out)
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss–Legendre on each panel between consecutive `breaks`.
/// Used where the integrand is available in closed form.
pub fn gauss_legendre(breaks: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    breaks
        .windows(2)
        .map(|w| {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            h * GL_NODES
                .iter()
                .zip(GL_WEIGHTS)
                .map(|(x, wt)| wt * (f(c - h * x) + f(c + h * x)))
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_on_unit_interval() {
        let g = RadialGrid::geometric(300, 1e-6).unwrap();
        let one = vec![1.0; g.len()];
        assert_relative_eq!(weighted_integral(&g, &one, 0.0, 0.0, 1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(weighted_integral(&g, &one, 9.0, 0.0, 1.0).unwrap(), 0.1, max_relative = 1e-12);
    }

    #[test]
    fn inverse_square_on_outer_half() {
        let g = RadialGrid::geometric(500, 1e-6).unwrap();
        let phi: Vec<f64> = g.nodes().iter().map(|t| 4.0 / (t * t)).collect();
        let v = weighted_integral(&g, &phi, 9.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(v, (1.0 - 2f64.powi(-8)) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(v, 0.498047, epsilon = 1e-6);
    }

    #[test]
    fn sign_change_falls_back_to_trapezoid() {
        let g = RadialGrid::uniform(2001, 1e-3).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|t| (3.0 * t).cos()).collect();
        let exact = ((3.0f64).sin() - (3e-3f64).sin()) / 3.0;
        assert_relative_eq!(integrate(&g, &f, 1e-3, 1.0).unwrap(), exact, epsilon = 1e-6);
    }

    #[test]
    fn non_integrable_tail_is_rejected() {
        let g = RadialGrid::geometric(100, 1e-4).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|t| 1.0 / (t * t)).collect();
        assert!(matches!(integrate(&g, &f, 0.0, 1.0), Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn rejects_nan() {
        let g = RadialGrid::uniform(5, 0.1).unwrap();
        assert!(integrate(&g, &[1.0, f64::NAN, 1.0, 1.0, 1.0], 0.1, 1.0).is_err());
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_15() {
        let v = gauss_legendre(&[0.0, 0.5, 1.0], |t| t.powi(15));
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        let v = gauss_legendre(&[0.0, 1.0], |t| (std::f64::consts::PI * t).sin());
        assert!((v - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    }
}
