//! Radial shooting for `u'' + (N-1)/r u' + λ f(u) = 0`, `u'(0) = 0`, `u(1) = 0`,
//! and the branch `a = u(0) ↦ λ(a)` of classical solutions.
//!
//! The ODE is integrated in `s = log r` with state `(u, r u_r)`, which turns
//! the `(N-1)/r` term into a constant coefficient and keeps steps uniform in
//! the scale-invariant variable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ode::{Halt, Stepper};
use crate::radial::{differentiate, Dimension, Nonlinearity, RadialGrid, RadialProfile};
use crate::stability::{first_eigenvalue, EigenConfig, LinearizedOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Integration stops once `|u|` exceeds this value.
    pub ceiling: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            ceiling: 1e8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShotOutcome {
    Reached,
    /// Finite-time blow-up: `|u|` passed the ceiling at radius `r`.
    BlowUp { r: f64 },
}

#[derive(Clone, Debug)]
pub struct Shot {
    /// Samples on the requested grid with `u_r`, `u_rr`, `u_rrr`; `None` after blow-up.
    pub profile: Option<RadialProfile>,
    pub boundary_value: f64,
    pub outcome: ShotOutcome,
    /// First radius in `(0, 1]` where `u` changes sign, if any grid node saw it.
    pub first_zero: Option<f64>,
}

struct Ivp<'a> {
    f: &'a Nonlinearity,
    n: f64,
    lambda: f64,
    a: f64,
    cfg: ShootConfig,
}

impl<'a> Ivp<'a> {
    fn new(f: &'a Nonlinearity, dim: Dimension, lambda: f64, a: f64, cfg: ShootConfig) -> Self {
        Self {
            f,
            n: dim.as_f64(),
            lambda,
            a,
            cfg,
        }
    }

    /// Starting radius and `(u, r u_r)` there from the Taylor series at 0.
    fn start(&self, r_cap: f64) -> (f64, [f64; 2]) {
        let (fa, dfa) = (self.f.eval_extended(self.a), self.f.deriv_extended(self.a));
        let scale = self.lambda * fa.abs().max(dfa.abs()).max(f64::MIN_POSITIVE);
        let r = r_cap.min(1e-3 / scale.sqrt()).min(1e-3);
        let c = self.lambda * fa;
        let d = self.lambda * dfa * c / (8.0 * self.n * (self.n + 2.0));
        let r2 = r * r;
        let u = self.a - c * r2 / (2.0 * self.n) + d * r2 * r2;
        let v = -c * r2 / self.n + 4.0 * d * r2 * r2;
        (r.ln(), [u, v])
    }

    fn rhs(&self) -> impl FnMut(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |s, y| {
            let g = self.lambda * (2.0 * s).exp() * self.f.eval_extended(y[0]);
            [y[1], -(self.n - 2.0) * y[1] - g]
        }
    }

    fn stepper(&self) -> Stepper {
        Stepper::new(self.cfg.rtol, self.cfg.atol).with_ceiling(self.cfg.ceiling)
    }

    fn jet(&self, r: f64, y: [f64; 2]) -> [f64; 4] {
        let n1 = self.n - 1.0;
        let u = y[0];
        let ur = y[1] / r;
        let urr = -self.lambda * self.f.eval_extended(u) - n1 * ur / r;
        let urrr = -self.lambda * self.f.deriv_extended(u) * ur - n1 * urr / r + n1 * ur / (r * r);
        [u, ur, urr, urrr]
    }

    /// Whether the solution reaches `r = 1` without a sign change, and `u(1)`.
    fn probe(&self, stations: &[f64]) -> (bool, f64) {
        let (mut s, mut y) = self.start(stations[0]);
        let mut st = self.stepper();
        let mut rhs = self.rhs();
        for &r in stations {
            match st.advance(&mut rhs, s, y, r.ln()) {
                Ok(next) => y = next,
                Err(_) => return (false, f64::NEG_INFINITY),
            }
            s = r.ln();
            if y[0] < 0.0 {
                return (false, y[0]);
            }
        }
        (true, y[0])
    }
}

/// Integrates the initial-value problem `u(0) = a`, `u'(0) = 0` to `r = 1`,
/// sampling on `grid`. Below zero `f` is continued by its tangent line so
/// overshooting shots still reach the boundary.
pub fn shoot(
    f: &Nonlinearity,
    dim: Dimension,
    grid: &RadialGrid,
    lambda: f64,
    a: f64,
    cfg: &ShootConfig,
) -> Result<Shot> {
    if !(lambda >= 0.0 && a >= 0.0) {
        return Err(Error::InvalidArgument(format!("shoot needs λ ≥ 0 and a ≥ 0, got λ = {lambda}, a = {a}")));
    }
    if lambda == 0.0 {
        let profile = RadialProfile::from_jet(grid.clone(), |_| [a, 0.0, 0.0, 0.0])?;
        return Ok(Shot {
            profile: Some(profile),
            boundary_value: a,
            outcome: ShotOutcome::Reached,
            first_zero: None,
        });
    }
    let ivp = Ivp::new(f, dim, lambda, a, *cfg);
    let (mut s, mut y) = ivp.start(grid.r_min());
    let mut st = ivp.stepper();
    let mut rhs = ivp.rhs();
    let mut jets = Vec::with_capacity(grid.len());
    let mut first_zero = None;
    for &r in grid.nodes() {
        match st.advance(&mut rhs, s, y, r.ln()) {
            Ok(next) => y = next,
            Err(Halt::Ceiling { x }) | Err(Halt::NonFinite { x }) | Err(Halt::StepUnderflow { x }) => {
                return Ok(Shot {
                    profile: None,
                    boundary_value: f64::NEG_INFINITY,
                    outcome: ShotOutcome::BlowUp { r: x.exp() },
                    first_zero,
                });
            }
        }
        s = r.ln();
        if first_zero.is_none() && y[0] < 0.0 {
            first_zero = Some(r);
        }
        jets.push(ivp.jet(r, y));
    }
    let boundary_value = y[0];
    let profile = RadialProfile::from_jet(grid.clone(), |r| jets[grid.nearest(r)])?;
    Ok(Shot {
        profile: Some(profile),
        boundary_value,
        outcome: ShotOutcome::Reached,
        first_zero,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchConfig {
    pub a_max: f64,
    pub samples: usize,
    /// Smallest ladder value as a fraction of `a_max`.
    pub a_min_ratio: f64,
    pub shoot: ShootConfig,
    pub lambda_rtol: f64,
    pub boundary_tol: f64,
    pub eigen: EigenConfig,
    pub compute_eigenvalues: bool,
    pub execution: Execution,
}

impl Default for BranchConfig {
    fn default() -> Self {
        Self {
            a_max: 20.0,
            samples: 48,
            a_min_ratio: 1e-3,
            shoot: ShootConfig::default(),
            lambda_rtol: 1e-9,
            boundary_tol: 1e-9,
            eigen: EigenConfig::default(),
            compute_eigenvalues: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchPoint {
    pub a: f64,
    pub lambda: f64,
    #[serde(rename = "eigenvalue")]
    pub first_eigenvalue: Option<f64>,
    /// Below the first turning point, i.e. on the minimal branch.
    pub minimal: bool,
    /// `u(1)` of the accepted shot.
    pub boundary_residual: f64,
    pub profile_ref: Option<String>,
    #[serde(skip)]
    pub profile: RadialProfile,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TurningPoint {
    pub a: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub dimension: Dimension,
    pub nonlinearity: Nonlinearity,
    pub points: Vec<BranchPoint>,
    pub lambda_star_estimate: f64,
    /// `[max sampled λ, extrapolated upper value]`.
    pub lambda_star_interval: [f64; 2],
    pub turning_detected: bool,
    pub turning_point: Option<TurningPoint>,
}

/// Stations for sign-change probing: geometric from `r0` to 1.
fn probe_stations(r0: f64) -> Vec<f64> {
    let n = 240;
    (0..n).map(|i| r0.powf(1.0 - i as f64 / (n - 1) as f64)).chain([1.0]).collect()
}

/// `λ(a)`: the parameter for which the solution with `u(0) = a` vanishes at
/// `r = 1`. Returns the largest bisected value that does not overshoot.
pub fn lambda_for(f: &Nonlinearity, dim: Dimension, a: f64, cfg: &BranchConfig) -> Result<(f64, f64)> {
    if !(a > 0.0) {
        return Err(Error::Bracket { a });
    }
    let stations = probe_stations(1e-3);
    let fine = |lambda: f64| Ivp::new(f, dim, lambda, a, cfg.shoot).probe(&stations);
    let fa = f.eval(a);
    let mut lo = 0.0;
    let mut lo_val = a;
    let mut hi = (2.0 * dim.as_f64() * a / fa.max(f64::MIN_POSITIVE)).max(1e-12);
    let mut found = false;
    for _ in 0..400 {
        let (ok, v) = fine(hi);
        if !ok || v < 0.0 {
            found = true;
            break;
        }
        lo = hi;
        lo_val = v;
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    if !found {
        return Err(Error::Bracket { a });
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let converged = hi - lo <= cfg.lambda_rtol * hi && lo_val.abs() <= cfg.boundary_tol;
        if converged {
            break;
        }
        let (ok, v) = fine(mid);
        if ok && v >= 0.0 {
            lo = mid;
            lo_val = v;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(Error::Bracket { a });
    }
    Ok((lo, lo_val))
}

fn golden_max(mut lo: f64, mut hi: f64, rtol: f64, mut eval: impl FnMut(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    while hi - lo > rtol * hi {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = eval(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Relative height a sampled local maximum of `λ(a)` needs over both
/// neighbours to be reported as a turning point.
pub const TURNING_RTOL: f64 = 1e-6;

/// Log-spaced values of `a` in `(0, a_max]`.
pub fn ladder(cfg: &BranchConfig) -> Vec<f64> {
    let n = cfg.samples.max(2);
    let lo = cfg.a_max * cfg.a_min_ratio;
    (0..n)
        .map(|i| lo * (cfg.a_max / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

/// Samples the branch of classical solutions over the `a`-ladder, refines the
/// first turning point if one is seen, and attaches first eigenvalues.
pub fn solve_branch(f: &Nonlinearity, dim: Dimension, grid: &RadialGrid, cfg: &BranchConfig) -> Result<Branch> {
    let ladder = ladder(cfg);
    let lambdas = cfg.execution.map(&ladder, |&a| lambda_for(f, dim, a, cfg));
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(ladder.len());
    for (a, l) in ladder.iter().zip(lambdas) {
        samples.push((*a, l?.0));
    }

    // a local maximum must clear bisection noise to count as a fold
    let clears = |hi: f64, lo: f64| hi > lo * (1.0 + TURNING_RTOL);
    let turning_index = (1..samples.len().saturating_sub(1))
        .find(|&i| clears(samples[i].1, samples[i - 1].1) && clears(samples[i].1, samples[i + 1].1));
    let turning_point = match turning_index {
        Some(i) => {
            let (a, lambda) = golden_max(samples[i - 1].0, samples[i + 1].0, 1e-7, |a| {
                lambda_for(f, dim, a, cfg).map(|x| x.0).unwrap_or(f64::NEG_INFINITY)
            });
            samples.push((a, lambda));
            samples.sort_by(|x, y| x.0.total_cmp(&y.0));
            Some(TurningPoint { a, lambda })
        }
        None => None,
    };
    let a_turn = turning_point.map_or(f64::INFINITY, |t| t.a);

    let built = cfg.execution.map(&samples, |&(a, lambda)| -> Result<BranchPoint> {
        let shot = shoot(f, dim, grid, lambda, a, &cfg.shoot)?;
        let profile = shot.profile.ok_or(Error::Bracket { a })?;
        let first_eigenvalue = if cfg.compute_eigenvalues {
            let op = LinearizedOperator::from_solution(&profile, f, lambda, dim)?;
            Some(first_eigenvalue(&op, &cfg.eigen)?.first_eigenvalue)
        } else {
            None
        };
        Ok(BranchPoint {
            a,
            lambda,
            first_eigenvalue,
            minimal: a <= a_turn,
            boundary_residual: shot.boundary_value,
            profile_ref: None,
            profile,
        })
    });
    let points = built.into_iter().collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(Error::EmptyBranch);
    }

    let lambda_star_estimate = points.iter().map(|p| p.lambda).fold(f64::NEG_INFINITY, f64::max);
    let upper = match turning_point {
        Some(_) => lambda_star_estimate,
        None => {
            let k = points.len();
            if k >= 2 {
                let (p1, p2) = (&points[k - 2], &points[k - 1]);
                let extrapolated = (p2.a * p2.lambda - p1.a * p1.lambda) / (p2.a - p1.a);
                extrapolated.max(lambda_star_estimate)
            } else {
                lambda_star_estimate
            }
        }
    };
    Ok(Branch {
        dimension: dim,
        nonlinearity: f.clone(),
        points,
        lambda_star_estimate,
        lambda_star_interval: [lambda_star_estimate, upper],
        turning_detected: turning_point.is_some(),
        turning_point,
    })
}

#[derive(Clone, Debug)]
pub struct Extremal {
    pub profile: RadialProfile,
    pub a: f64,
    pub lambda: f64,
    /// Relative gap between the two largest minimal-branch values of `λ`.
    pub gap: f64,
    pub low_confidence: bool,
}

/// Relative `λ` window, below the branch maximum, inside which points count
/// as approximations of the extremal solution.
pub const EXTREMAL_WINDOW: f64 = 1e-3;
/// Gap between the top two sampled `λ` above which the approximation is flagged.
pub const EXTREMAL_GAP_TOL: f64 = 1e-2;

/// The minimal-branch profile with the largest `a` among points whose `λ` is
/// within [`EXTREMAL_WINDOW`] of the branch maximum.
pub fn extremal_profile(branch: &Branch) -> Result<Extremal> {
    let minimal: Vec<&BranchPoint> = branch.points.iter().filter(|p| p.minimal).collect();
    let top = minimal
        .iter()
        .map(|p| p.lambda)
        .fold(f64::NEG_INFINITY, f64::max);
    let best = minimal
        .iter()
        .filter(|p| p.lambda >= top * (1.0 - EXTREMAL_WINDOW))
        .max_by(|x, y| x.a.total_cmp(&y.a))
        .ok_or(Error::EmptyBranch)?;
    let mut ls: Vec<f64> = minimal.iter().map(|p| p.lambda).collect();
    ls.sort_by(|x, y| y.total_cmp(x));
    let gap = if ls.len() >= 2 { (ls[0] - ls[1]) / ls[0] } else { f64::INFINITY };
    Ok(Extremal {
        profile: best.profile.clone(),
        a: best.a,
        lambda: best.lambda,
        gap,
        low_confidence: gap > EXTREMAL_GAP_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeSource {
    /// Use the stored `u_r` and `u_rr` samples.
    Stored,
    /// Differentiate the stored values numerically.
    Numerical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub at: f64,
}

/// Weighted max norm of `u_rr + (N-1)u_r/r + λ f(u)` on the grid, each node
/// scaled by `|u_rr| + (N-1)|u_r|/r + λ|f(u)|`.
pub fn ode_residual(
    u: &RadialProfile,
    dim: Dimension,
    f: &Nonlinearity,
    lambda: f64,
    source: DerivativeSource,
) -> Result<Residual> {
    let (ur, urr) = match source {
        DerivativeSource::Stored => (u.require_deriv(1)?.to_vec(), u.require_deriv(2)?.to_vec()),
        DerivativeSource::Numerical => (
            differentiate(u, 1)?.values().to_vec(),
            differentiate(u, 2)?.values().to_vec(),
        ),
    };
    let n1 = dim.as_f64() - 1.0;
    let mut worst = Residual { max: 0.0, at: u.grid().r_min() };
    for (i, &r) in u.nodes().iter().enumerate() {
        let fu = f.eval_extended(u.values()[i]);
        let res = urr[i] + n1 * ur[i] / r + lambda * fu;
        let scale = urr[i].abs() + n1 * ur[i].abs() / r + lambda * fu.abs();
        let rel = if scale > 0.0 { res.abs() / scale } else { res.abs() };
        if rel > worst.max {
            worst = Residual { max: rel, at: r };
        }
    }
    Ok(worst)
}
