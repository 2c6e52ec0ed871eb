//! Explicit singular solutions with all derivatives up to order three.

use crate::error::{Error, Result};
use crate::radial::{Dimension, Nonlinearity, RadialGrid, RadialProfile};

/// `u = c |log r|`.
pub fn log_profile(grid: RadialGrid, c: f64) -> Result<RadialProfile> {
    RadialProfile::from_jet(grid, |r| [-c * r.ln(), -c / r, c / (r * r), -2.0 * c / r.powi(3)])
}

/// `u = r^{-β} - 1`.
pub fn power_profile(grid: RadialGrid, beta: f64) -> Result<RadialProfile> {
    RadialProfile::from_jet(grid, |r| {
        let p = r.powf(-beta);
        [
            p - 1.0,
            -beta * p / r,
            beta * (beta + 1.0) * p / (r * r),
            -beta * (beta + 1.0) * (beta + 2.0) * p / r.powi(3),
        ]
    })
}

/// A singular solution `u` of `-Δu = λ f(u)` together with `f` and `λ`.
#[derive(Clone, Debug)]
pub struct SingularSolution {
    pub nonlinearity: Nonlinearity,
    pub lambda: f64,
    pub profile: RadialProfile,
}

/// `f = e^u`, `λ = 2(N-2)`, `u = 2|log r|` (`N ≥ 3`; the extremal one for `N ≥ 10`).
pub fn gelfand_singular(dim: Dimension, grid: RadialGrid) -> Result<SingularSolution> {
    if dim.get() < 3 {
        return Err(Error::Hypothesis(format!("2|log r| is not a solution for {dim}")));
    }
    Ok(SingularSolution {
        nonlinearity: Nonlinearity::Exp,
        lambda: 2.0 * (dim.as_f64() - 2.0),
        profile: log_profile(grid, 2.0)?,
    })
}

/// `f = (1+u)^p` with `p` the Joseph–Lundgren exponent, `u = r^{-2/(p-1)} - 1`
/// and `λ = β(N - 2 - β)`, `β = 2/(p-1)` (`N > 10`).
pub fn joseph_lundgren_singular(dim: Dimension, grid: RadialGrid) -> Result<SingularSolution> {
    let p = dim
        .joseph_lundgren()
        .ok_or_else(|| Error::Hypothesis(format!("the Joseph–Lundgren exponent needs N > 10, got {dim}")))?;
    let beta = 2.0 / (p - 1.0);
    Ok(SingularSolution {
        nonlinearity: Nonlinearity::power(p)?,
        lambda: beta * (dim.as_f64() - 2.0 - beta),
        profile: power_profile(grid, beta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joseph_lundgren_potential_is_critical_hardy() {
        let dim = Dimension::new(16).unwrap();
        let s = joseph_lundgren_singular(dim, RadialGrid::geometric(50, 1e-4).unwrap()).unwrap();
        let p = dim.joseph_lundgren().unwrap();
        for (r, u) in s.profile.nodes().iter().zip(s.profile.values()) {
            let v = s.lambda * s.nonlinearity.deriv(*u) * r * r;
            assert!((v - dim.hardy_constant()).abs() < 1e-9, "{v}");
            assert!((s.nonlinearity.eval(*u) - r.powf(-2.0 * p / (p - 1.0))).abs() < 1e-9 * r.powf(-4.3));
        }
    }
}
