use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::radial::dimension::Dimension;
use crate::radial::profile::RadialProfile;
use crate::radial::quadrature::weighted_integral;

/// Norms on the annulus `B₁ ∖ B_{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnulusNorms {
    /// `‖∇u‖_{L²(B₁∖B_{1/2})}`
    pub grad_l2: f64,
    /// `‖u‖_{H¹(B₁∖B_{1/2})}`
    pub h1: f64,
}

pub fn annulus_norms(u: &RadialProfile, dim: Dimension) -> Result<AnnulusNorms> {
    let ur = u.require_deriv(1)?;
    let m = dim.as_f64() - 1.0;
    let sigma = dim.sphere_area();
    let grid = u.grid();
    let ur2: Vec<f64> = ur.iter().map(|x| x * x).collect();
    let u2: Vec<f64> = u.values().iter().map(|x| x * x).collect();
    let grad2 = sigma * weighted_integral(grid, &ur2, m, 0.5, 1.0)?;
    let l2 = sigma * weighted_integral(grid, &u2, m, 0.5, 1.0)?;
    Ok(AnnulusNorms {
        grad_l2: grad2.sqrt(),
        h1: (grad2 + l2).sqrt(),
    })
}

/// `‖u‖_{H¹(B₁)}`, with a power-law tail below `r_min`.
pub fn ball_h1_norm(u: &RadialProfile, dim: Dimension) -> Result<f64> {
    let ur = u.require_deriv(1)?;
    let m = dim.as_f64() - 1.0;
    let grid = u.grid();
    let dens: Vec<f64> = ur.iter().zip(u.values()).map(|(d, v)| d * d + v * v).collect();
    Ok((dim.sphere_area() * weighted_integral(grid, &dens, m, 0.0, 1.0)?).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::RadialGrid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_profile() {
        let g = RadialGrid::geometric(100, 1e-3).unwrap();
        let p = RadialProfile::from_jet(g, |_| [0.0; 4]).unwrap();
        let n = annulus_norms(&p, Dimension::new(3).unwrap()).unwrap();
        assert_eq!(n.grad_l2, 0.0);
        assert_eq!(n.h1, 0.0);
    }

    #[test]
    fn log_profile_n10() {
        let g = RadialGrid::default_geometric();
        let p = RadialProfile::from_jet(g, |r| [-2.0 * r.ln(), -2.0 / r, 2.0 / (r * r), -4.0 / r.powi(3)])
            .unwrap();
        let n = annulus_norms(&p, Dimension::new(10).unwrap()).unwrap();
        let expected = PI.powi(5) / 12.0 * (1.0 - 2f64.powi(-8)) / 2.0;
        assert_relative_eq!(n.grad_l2.powi(2), expected, max_relative = 1e-12);
    }

    #[test]
    fn linear_profile_n2() {
        let g = RadialGrid::default_geometric();
        let p = RadialProfile::new(g.clone(), g.nodes().iter().map(|r| 1.0 - r).collect())
            .unwrap()
            .with_deriv(1, vec![-1.0; g.len()])
            .unwrap();
        let n = annulus_norms(&p, Dimension::new(2).unwrap()).unwrap();
        assert_relative_eq!(n.grad_l2.powi(2), 3.0 * PI / 4.0, max_relative = 1e-5);
    }

    #[test]
    fn missing_derivative() {
        let g = RadialGrid::geometric(100, 1e-3).unwrap();
        let p = RadialProfile::from_fn(g, |r| r).unwrap();
        assert!(annulus_norms(&p, Dimension::new(3).unwrap()).is_err());
    }
}
