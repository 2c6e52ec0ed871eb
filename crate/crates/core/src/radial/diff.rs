//! Finite-difference derivatives on arbitrary (typically geometric) grids.
//!
//! Weights come from Fornberg's recursion on a five-point stencil, centred
//! where possible and one-sided at the ends. The stencil is rescaled to
//! unit width before the recursion so that nodes near `r_min = 1e-6` do not
//! lose precision.

use crate::error::{Error, Result};
use crate::radial::grid::RadialGrid;
use crate::radial::profile::RadialProfile;

const STENCIL: usize = 5;

/// Fornberg weights `c[k][j]` for derivatives `0..=max_order` at `x0`.
pub fn fornberg_weights(x0: f64, xs: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// `order`-th derivative samples of `values` at every node of `grid`.
pub fn derivative_samples(grid: &RadialGrid, values: &[f64], order: usize) -> Result<Vec<f64>> {
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidArgument(format!("derivative order {order} not in 1..=3")));
    }
    let x = grid.nodes();
    if x.len() < STENCIL {
        return Err(Error::GridTooCoarse {
            order,
            needed: STENCIL,
            have: x.len(),
        });
    }
    let half = STENCIL / 2;
    let out = (0..x.len())
        .map(|i| {
            let start = i.saturating_sub(half).min(x.len() - STENCIL);
            let xs = &x[start..start + STENCIL];
            let scale = xs[STENCIL - 1] - xs[0];
            let local: Vec<f64> = xs.iter().map(|&xj| (xj - x[i]) / scale).collect();
            let w = fornberg_weights(0.0, &local, order);
            let sum: f64 = w[order]
                .iter()
                .zip(&values[start..start + STENCIL])
                .map(|(wj, vj)| wj * vj)
                .sum();
            sum / scale.powi(order as i32)
        })
        .collect();
    Ok(out)
}

/// The `order`-th derivative of `profile` as a new profile on the same grid.
pub fn differentiate(profile: &RadialProfile, order: usize) -> Result<RadialProfile> {
    let d = derivative_samples(profile.grid(), profile.values(), order)?;
    RadialProfile::new(profile.grid().clone(), d)
}

/// Fills any missing `u_r, u_rr, u_rrr` slots by differentiating `u`.
pub fn with_numerical_derivatives(profile: &RadialProfile) -> Result<RadialProfile> {
    let mut p = profile.clone();
    for k in 1..=3 {
        if p.deriv(k).is_none() {
            let d = derivative_samples(p.grid(), p.values(), k)?;
            p.set_deriv(k, d)?;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!(w[2], vec![1.0, -2.0, 1.0]);
        assert_eq!(w[1], vec![-0.5, 0.0, 0.5]);
    }

    #[test]
    fn too_coarse() {
        let g = RadialGrid::uniform(4, 0.1).unwrap();
        let p = RadialProfile::from_fn(g, |r| r).unwrap();
        assert!(matches!(differentiate(&p, 1), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn square_first_derivative() {
        let g = RadialGrid::geometric(400, 1e-4).unwrap();
        let p = RadialProfile::from_fn(g, |r| r * r).unwrap();
        let d = differentiate(&p, 1).unwrap();
        for (r, v) in d.nodes().iter().zip(d.values()) {
            assert!((v - 2.0 * r).abs() <= 1e-10 * (1.0 + r), "r={r} v={v}");
        }
    }

    #[test]
    fn log_second_derivative() {
        let g = RadialGrid::geometric(2000, 1e-6).unwrap();
        let p = RadialProfile::from_fn(g, |r| -2.0 * r.ln()).unwrap();
        let d = differentiate(&p, 2).unwrap();
        let n = d.nodes().len();
        for (i, (r, v)) in d.nodes().iter().zip(d.values()).enumerate() {
            let exact = 2.0 / (r * r);
            // one-sided stencils lose an order at the two ends
            let tol = if i < 2 || i + 2 >= n { 1e-4 } else { 1e-6 };
            assert!(((v - exact) / exact).abs() < tol, "r={r}");
        }
    }
}
