//! First eigenvalue of the radial linearized operator
//! `-(t^{N-1} φ')' - t^{N-1} V φ = μ t^{N-1} φ`, `φ(1) = 0`, zero flux at `r_min`.
//!
//! Vertex-centred finite volumes: cell masses are exact integrals of `t^{N-1}`,
//! edge conductances are exact harmonic averages of `t^{N-1}`. The potential
//! is split as `V = a²/r² + (V - a²/r²)` with `a = (N-2)/2`; the remainder is
//! lumped, while the inverse-square part gets the weight that makes
//! `ψ = r^{-a}` an exact interior null vector, so the discrete Hardy
//! inequality holds with the sharp constant. Without this, potentials that are
//! critical at the origin pick up an `O(h²)` error of the wrong sign and a
//! spurious mode near `r_min`. The resulting pencil is symmetric tridiagonal;
//! the smallest `μ` is isolated by Sturm-count bisection and the eigenvector
//! recovered by inverse iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::diff::derivative_samples;
use crate::radial::{gauss_legendre, Dimension, Nonlinearity, RadialGrid, RadialProfile};

#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    grid: RadialGrid,
    potential: Vec<f64>,
    dim: Dimension,
    /// Samples are cell averages rather than nodal values.
    cell_averaged: bool,
}

impl LinearizedOperator {
    pub fn new(grid: RadialGrid, potential: Vec<f64>, dim: Dimension) -> Result<Self> {
        if potential.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} potential samples for {} nodes",
                potential.len(),
                grid.len()
            )));
        }
        if let Some(i) = potential.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { r: grid.nodes()[i] });
        }
        Ok(Self {
            grid,
            potential,
            dim,
            cell_averaged: false,
        })
    }

    pub fn from_fn(grid: RadialGrid, dim: Dimension, v: impl Fn(f64) -> f64) -> Result<Self> {
        let potential = grid.nodes().iter().map(|&r| v(r)).collect();
        Self::new(grid, potential, dim)
    }

    /// Potential averaged over each finite-volume cell against `t^{N-1}`.
    /// Resolves features narrower than the grid spacing; `breakpoints` marks
    /// where `v` is only piecewise smooth.
    pub fn from_cell_averages(
        grid: RadialGrid,
        dim: Dimension,
        v: impl Fn(f64) -> f64,
        breakpoints: &[f64],
    ) -> Result<Self> {
        let x = grid.nodes();
        let m = dim.as_f64() - 1.0;
        let mut sorted = breakpoints.to_vec();
        sorted.sort_by(f64::total_cmp);
        let potential = (0..x.len())
            .map(|j| {
                let (lo, hi) = cell(x, j);
                if hi <= lo {
                    return v(x[j]);
                }
                let start = sorted.partition_point(|&b| b <= lo);
                let mut breaks = vec![lo];
                breaks.extend(sorted[start..].iter().copied().take_while(|&b| b < hi));
                breaks.push(hi);
                let num = gauss_legendre(&breaks, |t| v(t) * t.powf(m));
                let den = gauss_legendre(&breaks, |t| t.powf(m));
                num / den
            })
            .collect();
        let mut op = Self::new(grid, potential, dim)?;
        op.cell_averaged = true;
        Ok(op)
    }

    /// Potential `λ f'(u(r))` of a solution of `-Δu = λ f(u)`.
    pub fn from_solution(u: &RadialProfile, f: &Nonlinearity, lambda: f64, dim: Dimension) -> Result<Self> {
        let potential = u.values().iter().map(|&s| lambda * f.deriv_extended(s)).collect();
        Self::new(u.grid().clone(), potential, dim)
    }

    /// Potential read off the profile alone, see [`potential_from_profile`].
    pub fn from_profile(u: &RadialProfile, dim: Dimension) -> Result<Self> {
        Self::new(u.grid().clone(), potential_from_profile(u, dim)?, dim)
    }

    /// The operator with potential `V + c`.
    pub fn shifted(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            potential: self.potential.iter().map(|v| v + c).collect(),
            dim: self.dim,
            cell_averaged: self.cell_averaged,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    /// `max r²|V|`, the scale of the potential relative to the Laplacian.
    pub fn hardy_scale(&self) -> f64 {
        self.grid
            .nodes()
            .iter()
            .zip(&self.potential)
            .map(|(r, v)| r * r * v.abs())
            .fold(0.0, f64::max)
    }

    /// Suffix of the operator starting at the node nearest `r`.
    fn truncated(&self, r: f64) -> Option<Self> {
        let i = self.grid.nearest(r);
        if self.grid.len() - i < 3 || i == 0 {
            return None;
        }
        let grid = RadialGrid::from_nodes(self.grid.nodes()[i..].to_vec()).ok()?;
        Some(Self {
            grid,
            potential: self.potential[i..].to_vec(),
            dim: self.dim,
            cell_averaged: self.cell_averaged,
        })
    }
}

/// `((N-2)/2)²`, the sharp Hardy constant.
fn critical_coefficient(dim: Dimension) -> f64 {
    let a = 0.5 * (dim.as_f64() - 2.0);
    a * a
}

/// Control volume of node `j`: from the midpoint with its left neighbour
/// (or `r_min`) to the midpoint with its right neighbour (or the node).
fn cell(x: &[f64], j: usize) -> (f64, f64) {
    let lo = if j == 0 { x[0] } else { 0.5 * (x[j - 1] + x[j]) };
    let hi = if j + 1 < x.len() { 0.5 * (x[j] + x[j + 1]) } else { x[j] };
    (lo, hi)
}

/// `g'(u(r))` for a solution of `-Δu = g(u)`, from differentiating the
/// equation once: `g'(u) u_r = -u_rrr - (N-1) u_rr / r + (N-1) u_r / r²`.
/// Missing derivative samples are computed numerically.
pub fn potential_from_profile(u: &RadialProfile, dim: Dimension) -> Result<Vec<f64>> {
    let sample = |k: usize| -> Result<Vec<f64>> {
        match u.deriv(k) {
            Some(d) => Ok(d.to_vec()),
            None => derivative_samples(u.grid(), u.values(), k),
        }
    };
    let (d1, d2, d3) = (sample(1)?, sample(2)?, sample(3)?);
    let n1 = dim.as_f64() - 1.0;
    u.nodes()
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if d1[i] == 0.0 {
                return Err(Error::NotMonotone { r });
            }
            Ok((-d3[i] - n1 * d2[i] / r + n1 * d1[i] / (r * r)) / d1[i])
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Spectral,
    FormSampling,
    Combined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    #[serde(rename = "mu1")]
    pub first_eigenvalue: f64,
    pub semistable: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub method: Method,
    pub grid_size: usize,
    pub r_min: f64,
    /// `μ₁` recomputed with the inner cutoff moved to `10 r_min`, minus `μ₁`.
    pub r_min_sensitivity: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenConfig {
    /// Relative width at which bisection stops.
    pub bisection_rtol: f64,
    /// Semi-stability tolerance factor, applied to `1 + max r²|V|`.
    pub tol: f64,
    pub inverse_iterations: usize,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self {
            bisection_rtol: 1e-12,
            tol: 1e-6,
            inverse_iterations: 4,
        }
    }
}

struct Pencil {
    /// Conductance of edge `(j, j+1)`, `j = 0..n-1`.
    k: Vec<f64>,
    mass: Vec<f64>,
    /// Assembled `∫ V φ_j²` per node.
    pot: Vec<f64>,
}

impl Pencil {
    fn assemble(op: &LinearizedOperator) -> Self {
        let x = op.grid.nodes();
        let n = op.dim.as_f64();
        let m = x.len() - 1;
        let k: Vec<f64> = x
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                if op.dim.get() == 2 {
                    1.0 / (b / a).ln()
                } else {
                    (n - 2.0) * a.powf(n - 2.0) / -((n - 2.0) * (a / b).ln()).exp_m1()
                }
            })
            .collect();
        let mass: Vec<f64> = (0..m)
            .map(|j| {
                let (lo, hi) = cell(x, j);
                lo.powf(n) * (n * (hi / lo).ln()).exp_m1() / n
            })
            .collect();
        let a2 = critical_coefficient(op.dim);
        let a = a2.sqrt();
        let pot = (0..m)
            .map(|j| {
                let r = x[j];
                let v = op.potential[j];
                // the zero-flux row keeps the lumped weight; its ground-state
                // remainder is already nonnegative
                if a2 == 0.0 || j == 0 {
                    return v * mass[j];
                }
                let psi = |i: usize| (x[i] / r).powf(-a);
                let a_psi = k[j - 1] * (1.0 - psi(j - 1)) + k[j] * (1.0 - psi(j + 1));
                // the critical part in the same representation as the samples
                let critical = if op.cell_averaged {
                    let (lo, hi) = cell(x, j);
                    a2 * lo.powf(n - 2.0) * ((n - 2.0) * (hi / lo).ln()).exp_m1() / (n - 2.0)
                } else {
                    a2 * mass[j] / (r * r)
                };
                v * mass[j] - critical + a_psi
            })
            .collect();
        Self { k, mass, pot }
    }

    fn len(&self) -> usize {
        self.mass.len()
    }

    /// LDLᵀ pivots of `A - (V + μ) M`, computed without cancellation between
    /// the (large) conductances and the (small) diagonal shift.
    fn pivots(&self, mu: f64) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.len());
        let mut e_prev = 0.0;
        for j in 0..self.len() {
            let w = -self.pot[j] - mu * self.mass[j];
            let e = if j == 0 {
                w
            } else {
                let kl = self.k[j - 1];
                let mut dp = kl + e_prev;
                if dp == 0.0 {
                    dp = f64::EPSILON * kl;
                }
                w + kl * e_prev / dp
            };
            d.push(self.k[j] + e);
            e_prev = e;
        }
        d
    }

    fn count_below(&self, mu: f64) -> usize {
        self.pivots(mu).iter().filter(|&&d| d < 0.0).count()
    }

    fn rayleigh(&self, phi: &[f64]) -> f64 {
        let m = self.len();
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..m {
            let next = if j + 1 < m { phi[j + 1] } else { 0.0 };
            num += self.k[j] * (next - phi[j]).powi(2) - self.pot[j] * phi[j] * phi[j];
            den += self.mass[j] * phi[j] * phi[j];
        }
        num / den
    }

    /// Solves `(A - (V + σ) M) x = b` given the pivots at `σ`.
    fn solve(&self, d: &[f64], b: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut z = vec![0.0; m];
        z[0] = b[0];
        for j in 1..m {
            z[j] = b[j] + self.k[j - 1] * z[j - 1] / d[j - 1];
        }
        let mut x = vec![0.0; m];
        x[m - 1] = z[m - 1] / d[m - 1];
        for j in (0..m - 1).rev() {
            x[j] = (z[j] + self.k[j] * x[j + 1]) / d[j];
        }
        x
    }
}

/// Smallest eigenvalue and its eigenvector (normalized to `max = 1`, with the
/// Dirichlet node included as a trailing zero).
pub fn first_eigenpair(op: &LinearizedOperator, cfg: &EigenConfig) -> Result<(f64, Vec<f64>)> {
    if op.grid.len() < 3 {
        return Err(Error::InvalidGrid("eigenproblem needs at least 3 nodes".into()));
    }
    let pencil = Pencil::assemble(op);
    let vmax = pencil
        .pot
        .iter()
        .zip(&pencil.mass)
        .map(|(p, m)| p / m)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut lo = -vmax.max(0.0) - 1.0;
    let trial: Vec<f64> = op.grid.nodes()[..pencil.len()].iter().map(|r| 1.0 - r * r).collect();
    let rq = pencil.rayleigh(&trial);
    let mut hi = rq + 1e-12 * rq.abs().max(1.0);
    let mut grow = 1.0;
    while pencil.count_below(hi) == 0 {
        hi += grow * hi.abs().max(1.0);
        grow *= 2.0;
        if !hi.is_finite() {
            return Err(Error::InvalidArgument("eigenvalue bracket diverged".into()));
        }
    }
    while pencil.count_below(lo) > 0 {
        lo -= lo.abs().max(1.0);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= cfg.bisection_rtol * mid.abs().max(1.0) || mid == lo || mid == hi {
            break;
        }
        if pencil.count_below(mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mu = 0.5 * (lo + hi);

    let d = pencil.pivots(lo);
    let mut x: Vec<f64> = trial.clone();
    for _ in 0..cfg.inverse_iterations.max(1) {
        let b: Vec<f64> = x.iter().zip(&pencil.mass).map(|(xi, m)| xi * m).collect();
        x = pencil.solve(&d, &b);
        let scale = x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if !(scale.is_finite() && scale > 0.0) {
            break;
        }
        x.iter_mut().for_each(|v| *v /= scale);
    }
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x.push(0.0);
    Ok((mu, x))
}

/// Spectral semi-stability verdict.
pub fn first_eigenvalue(op: &LinearizedOperator, cfg: &EigenConfig) -> Result<StabilityVerdict> {
    let (mu, _) = first_eigenpair(op, cfg)?;
    let tolerance = cfg.tol * (1.0 + op.hardy_scale());
    let mut flags = Vec::new();
    if let Some(flag) = singularity_flag(op) {
        flags.push(flag);
    }
    let r_min_sensitivity = op
        .truncated(10.0 * op.grid.r_min())
        .and_then(|t| first_eigenpair(&t, cfg).ok())
        .map(|(m, _)| m - mu);
    Ok(StabilityVerdict {
        first_eigenvalue: mu,
        semistable: mu >= -tolerance,
        margin: mu,
        tolerance,
        method: Method::Spectral,
        grid_size: op.grid.len(),
        r_min: op.grid.r_min(),
        r_min_sensitivity,
        flags,
    })
}

/// Flags potentials whose `r²|V|` still grows at the inner cutoff.
fn singularity_flag(op: &LinearizedOperator) -> Option<String> {
    let x = op.grid.nodes();
    let v = &op.potential;
    let j = op.grid.nearest(10.0 * x[0]);
    if j == 0 {
        return None;
    }
    let s0 = x[0] * x[0] * v[0].abs();
    let s1 = x[j] * x[j] * v[j].abs();
    (s0 > 1.0 && s0 > 2.0 * s1).then(|| {
        format!(
            "potential grows faster than C/r^2 near r_min (r^2|V| = {s0:.3e} at r_min vs {s1:.3e} at 10 r_min); discretization unreliable"
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: u32, nodes: usize) -> f64 {
        let grid = RadialGrid::geometric(nodes, 1e-6).unwrap();
        let op = LinearizedOperator::from_fn(grid, Dimension::new(n).unwrap(), |_| 0.0).unwrap();
        first_eigenvalue(&op, &EigenConfig::default()).unwrap().first_eigenvalue
    }

    #[test]
    fn ball_laplacian_n3() {
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((laplacian(3, 2000) - pi2).abs() / pi2 < 1e-3);
    }

    #[test]
    fn cell_averages_resolve_narrow_spike() {
        let grid = RadialGrid::geometric(400, 1e-3).unwrap();
        let dim = Dimension::new(3).unwrap();
        let (c, w) = (0.3, 1e-7);
        let spike = |r: f64| if (r - c).abs() < w { 1e9 } else { 0.0 };
        let op = LinearizedOperator::from_cell_averages(grid.clone(), dim, spike, &[c - w, c + w]).unwrap();
        let j = grid.locate(c);
        let total: f64 = op.potential().iter().sum();
        assert!(op.potential()[j] > 0.0 || op.potential()[j + 1] > 0.0);
        // 2e-7 * 1e9 spread over one cell of width ~ r * 0.017
        assert!(total < 1e9 * 2e-7 / (c * 0.01));
        let smooth = LinearizedOperator::from_cell_averages(grid.clone(), dim, |r| r, &[]).unwrap();
        for (r, v) in grid.nodes().iter().zip(smooth.potential()).skip(1).take(grid.len() - 2) {
            assert!((v - r).abs() < 1e-2 * r, "{r} {v}");
        }
    }

    #[test]
    fn shift_moves_eigenvalue() {
        let grid = RadialGrid::geometric(400, 1e-4).unwrap();
        let op = LinearizedOperator::from_fn(grid, Dimension::new(4).unwrap(), |r| 3.0 / (1.0 + r)).unwrap();
        let cfg = EigenConfig::default();
        let base = first_eigenvalue(&op, &cfg).unwrap().first_eigenvalue;
        for c in [-1.0, 1.0] {
            let m = first_eigenvalue(&op.shifted(c), &cfg).unwrap().first_eigenvalue;
            assert!((m - (base - c)).abs() < 1e-9 * base.abs().max(1.0));
        }
    }

    #[test]
    fn eigenvector_is_positive() {
        let grid = RadialGrid::geometric(300, 1e-3).unwrap();
        let op = LinearizedOperator::from_fn(grid, Dimension::new(3).unwrap(), |_| 0.0).unwrap();
        let (_, v) = first_eigenpair(&op, &EigenConfig::default()).unwrap();
        assert!(v[..v.len() - 1].iter().all(|&x| x > 0.0));
        assert_eq!(*v.last().unwrap(), 0.0);
    }

    #[test]
    fn potential_of_log_profile() {
        let grid = RadialGrid::geometric(50, 1e-3).unwrap();
        let u = crate::closed_form::log_profile(grid, 2.0).unwrap();
        let v = potential_from_profile(&u, Dimension::new(9).unwrap()).unwrap();
        for (r, g) in u.nodes().iter().zip(v) {
            assert!((g * r * r - 14.0).abs() < 1e-9);
        }
    }

    #[test]
    fn super_hardy_potential_is_flagged() {
        let grid = RadialGrid::geometric(400, 1e-6).unwrap();
        let op = LinearizedOperator::from_fn(grid, Dimension::new(10).unwrap(), |r| r.powf(-2.5)).unwrap();
        let v = first_eigenvalue(&op, &EigenConfig::default()).unwrap();
        assert_eq!(v.flags.len(), 1);
    }
}
