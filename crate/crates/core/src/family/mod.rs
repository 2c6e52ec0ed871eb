//! Semi-stable, radially decreasing, unbounded `H¹` solutions built from a
//! seed `h ≥ 0` through
//!
//! ```text
//! Φ(r) = r^{2√(N-1)} (1 + ∫₀^r h),    Φ'(r) = (N-1) r^{N-3} u_r(r)²,    u_r < 0,
//! ```
//!
//! for `N ≥ 10`, together with the recovered nonlinearity `g = -Δu ∘ u⁻¹`,
//! a weighted Hardy inequality, and generators of solutions with prescribed
//! large derivatives along a sequence of radii.
//!
//! Writing `u_r = -r^{e₁} φ(r)` with `e₁ = -N/2 + √(N-1) + 1`,
//! `φ² = 2(1 + H)/√(N-1) + r h/(N-1)` where `H = ∫₀^r h`.

mod counter;
mod seed;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ode::{Halt, Stepper};
use crate::radial::profile::fmt_f64;
use crate::radial::{gauss_legendre, Dimension, Nonlinearity, RadialGrid, RadialProfile, Table};
use crate::stability::{
    first_eigenvalue, CappedPower, EigenConfig, FormTest, LinearizedOperator, LogBump, Method, RadialTestFn,
    StabilityVerdict,
};

pub use counter::{
    counterexample_first, counterexample_second, counterexample_third, Counterexample, CounterexampleTarget,
    TargetCheck,
};
pub use seed::{Seed, Term};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    #[default]
    #[serde(rename = "u(1)=0")]
    ZeroAtBoundary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    #[serde(rename = "N")]
    pub dimension: Dimension,
    pub h: Seed,
    #[serde(default)]
    pub normalization: Normalization,
}

/// Relative slack for nodewise inequalities that hold with equality for `h ≡ 0`.
const NODEWISE_RTOL: f64 = 1e-12;
/// Pointwise tolerance on `h ≥ 0`.
const H_NEG_TOL: f64 = 1e-12;

impl FamilySpec {
    pub fn new(dimension: Dimension, h: Seed) -> Result<Self> {
        if dimension.get() < 10 {
            return Err(Error::Hypothesis(format!(
                "the family requires N >= 10, got N = {}",
                dimension.get()
            )));
        }
        Self::unchecked(dimension, h)
    }

    /// Skips the `N ≥ 10` gate. Below it `u` stays bounded; useful only to
    /// probe which property fails.
    pub fn unchecked(dimension: Dimension, h: Seed) -> Result<Self> {
        h.validate()?;
        Ok(Self {
            dimension,
            h,
            normalization: Normalization::ZeroAtBoundary,
        })
    }

    fn s(&self) -> f64 {
        self.dimension.sqrt_nm1()
    }

    /// `e₁ = -N/2 + √(N-1) + 1`, the power of `r` in `|u_r|` for `h ≡ 0`.
    pub fn slope_exponent(&self) -> f64 {
        self.dimension.singular_exponent() - 1.0
    }

    pub fn phi(&self, r: f64) -> f64 {
        let big_h = self.h.jet(r)[3];
        r.powf(2.0 * self.s()) * (1.0 + big_h)
    }

    pub fn phi_prime(&self, r: f64) -> f64 {
        let [h, _, _, big_h] = self.h.jet(r);
        let s = self.s();
        r.powf(2.0 * s - 1.0) * (2.0 * s * (1.0 + big_h) + r * h)
    }

    /// `[φ, φ', φ'']` with `u_r = -r^{e₁} φ`.
    pub fn amplitude(&self, r: f64) -> [f64; 3] {
        let [h, h1, h2, big_h] = self.h.jet(r);
        let s = self.s();
        let n1 = self.dimension.as_f64() - 1.0;
        let a = 2.0 * (1.0 + big_h) / s + r * h / n1;
        let a1 = 2.0 * h / s + (h + r * h1) / n1;
        let a2 = 2.0 * h1 / s + (2.0 * h1 + r * h2) / n1;
        let phi = a.sqrt();
        [phi, a1 / (2.0 * phi), a2 / (2.0 * phi) - a1 * a1 / (4.0 * phi * phi * phi)]
    }

    /// `[u_r, u_rr, u_rrr]` at `r`.
    pub fn slope_jet(&self, r: f64) -> [f64; 3] {
        let e1 = self.slope_exponent();
        let [p, p1, p2] = self.amplitude(r);
        let q = r.powf(e1);
        [
            -q * p,
            -q * (e1 * p / r + p1),
            -q * (e1 * (e1 - 1.0) * p / (r * r) + 2.0 * e1 * p1 / r + p2),
        ]
    }

    /// `r² g'(u(r)) = -r² u_rrr/u_r - (N-1) r u_rr/u_r + (N-1)`.
    pub fn r2_gprime(&self, r: f64) -> f64 {
        let [d1, d2, d3] = self.slope_jet(r);
        let n1 = self.dimension.as_f64() - 1.0;
        -r * r * d3 / d1 - n1 * r * d2 / d1 + n1
    }

    /// `g(u(r)) = -u_rr - (N-1) u_r / r`.
    pub fn g_at(&self, r: f64) -> f64 {
        let [d1, d2, _] = self.slope_jet(r);
        -d2 - (self.dimension.as_f64() - 1.0) * d1 / r
    }

    /// Checks `h ≥ 0` and `Φ' > 0` at the nodes and the seed breakpoints.
    fn check_admissible(&self, nodes: &[f64]) -> Result<()> {
        let bps = self.h.breakpoints();
        for &r in nodes.iter().chain(&bps).filter(|&&r| r > 0.0 && r <= 1.0) {
            let h = self.h.h(r);
            if !h.is_finite() {
                return Err(Error::NonFinite { r });
            }
            if h < -H_NEG_TOL * (1.0 + h.abs()) {
                return Err(Error::Construction {
                    r,
                    what: format!("seed is negative (h = {h:e})"),
                });
            }
            let p = self.phi_prime(r);
            if !(p > 0.0) {
                return Err(Error::NonPositivePhiPrime { r });
            }
        }
        Ok(())
    }
}

/// The family member of `spec` on `grid`, with exact `u_r`, `u_rr`, `u_rrr`
/// and `u = ∫_r^1 |u_r|` by Gauss–Legendre between nodes.
pub fn build_family(spec: &FamilySpec, grid: &RadialGrid) -> Result<RadialProfile> {
    let x = grid.nodes();
    spec.check_admissible(x)?;
    let bps = spec.h.breakpoints();
    let e1 = spec.slope_exponent();
    let speed = |t: f64| t.powf(e1) * spec.amplitude(t)[0];
    let panel = |a: f64, b: f64| {
        let lo = bps.partition_point(|&v| v <= a);
        let mut breaks = vec![a];
        breaks.extend(bps[lo..].iter().copied().take_while(|&v| v < b));
        breaks.push(b);
        gauss_legendre(&breaks, speed)
    };
    let n = x.len();
    let mut u = vec![0.0; n];
    let last = x[n - 1];
    u[n - 1] = if last < 1.0 { panel(last, 1.0) } else { 0.0 };
    for i in (0..n - 1).rev() {
        u[i] = u[i + 1] + panel(x[i], x[i + 1]);
    }
    let mut d = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for (i, &r) in x.iter().enumerate() {
        let j = spec.slope_jet(r);
        for k in 0..3 {
            if !j[k].is_finite() {
                return Err(Error::NonFinite { r });
            }
            d[k][i] = j[k];
        }
    }
    let [d1, d2, d3] = d;
    RadialProfile::new(grid.clone(), u)?
        .with_deriv(1, d1)?
        .with_deriv(2, d2)?
        .with_deriv(3, d3)
}

/// `max |(N-1) r^{N-3} u_r² - Φ'| / Φ'` over the nodes.
pub fn construction_residual(spec: &FamilySpec, u: &RadialProfile) -> Result<f64> {
    let ur = u.require_deriv(1)?;
    let n = spec.dimension.as_f64();
    Ok(u.nodes()
        .iter()
        .zip(ur)
        .map(|(&r, &d)| {
            let p = spec.phi_prime(r);
            ((n - 1.0) * r.powf(n - 3.0) * d * d - p).abs() / p
        })
        .fold(0.0, f64::max))
}

/// First node where `|u_r| < √2 (N-1)^{-1/4} r^{e₁}` fails, if any.
pub fn slope_lower_bound_violation(spec: &FamilySpec, u: &RadialProfile) -> Result<Option<f64>> {
    let ur = u.require_deriv(1)?;
    let c = 2f64.sqrt() * (spec.dimension.as_f64() - 1.0).powf(-0.25);
    let e1 = spec.slope_exponent();
    Ok(u.nodes()
        .iter()
        .zip(ur)
        .find(|(&r, &d)| d.abs() < c * r.powf(e1) * (1.0 - NODEWISE_RTOL))
        .map(|(&r, _)| r))
}

/// `g(s) = -Δu(u⁻¹(s))` sampled at the nodes, with `g'` from the third
/// derivative, in increasing `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveredG {
    pub s: Vec<f64>,
    pub g: Vec<f64>,
    pub gprime: Vec<f64>,
}

pub fn recover_g(u: &RadialProfile, dim: Dimension) -> Result<RecoveredG> {
    let x = u.nodes();
    let v = u.values();
    if let Some(i) = (0..x.len() - 1).find(|&i| !(v[i + 1] < v[i])) {
        return Err(Error::NotMonotone { r: x[i + 1] });
    }
    let filled;
    let u = if (1..=3).all(|k| u.deriv(k).is_some()) {
        u
    } else {
        filled = crate::radial::with_numerical_derivatives(u)?;
        &filled
    };
    let (d1, d2, d3) = (u.require_deriv(1)?, u.require_deriv(2)?, u.require_deriv(3)?);
    let n1 = dim.as_f64() - 1.0;
    let mut out = RecoveredG {
        s: Vec::with_capacity(x.len()),
        g: Vec::with_capacity(x.len()),
        gprime: Vec::with_capacity(x.len()),
    };
    for i in (0..x.len()).rev() {
        let r = x[i];
        let g = -d2[i] - n1 * d1[i] / r;
        let dg = -d3[i] - n1 * d2[i] / r + n1 * d1[i] / (r * r);
        out.s.push(v[i]);
        out.g.push(g);
        out.gprime.push(dg / d1[i]);
    }
    Ok(out)
}

impl RecoveredG {
    pub fn nonlinearity(&self) -> Result<Nonlinearity> {
        Ok(Nonlinearity::Table(Table::new(
            self.s.clone(),
            self.g.clone(),
            self.gprime.clone(),
        )?))
    }

    pub fn min_g(&self) -> f64 {
        self.g.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV `s,g`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "g"])?;
        for (s, g) in self.s.iter().zip(&self.g) {
            w.write_record([fmt_f64(*s), fmt_f64(*g)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV `s,f,fprime`, readable as a tabulated nonlinearity.
    pub fn write_table_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "f", "fprime"])?;
        for ((s, g), gp) in self.s.iter().zip(&self.g).zip(&self.gprime) {
            w.write_record([fmt_f64(*s), fmt_f64(*g), fmt_f64(*gp)])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTrip {
    /// `max |u_shot - u| / max |u|` over nodes in `[2 r_min, 1]`.
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub at: f64,
}

/// Integrates `-Δv = g(v)` outward from `r_min` with the data of `u` there
/// and compares `v` with `u` at the nodes.
pub fn round_trip(u: &RadialProfile, dim: Dimension, g: &Nonlinearity) -> Result<RoundTrip> {
    let x = u.nodes();
    let ur = u.require_deriv(1)?;
    let scale = u.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut st = Stepper::new(1e-12, 1e-14 * scale.max(1.0));
    let n2 = dim.as_f64() - 2.0;
    let mut rhs = |s: f64, y: &[f64; 2]| [y[1], -n2 * y[1] - (2.0 * s).exp() * g.eval(y[0])];
    let mut y = [u.values()[0], x[0] * ur[0]];
    let lo = 2.0 * x[0];
    let (mut worst, mut at, mut top) = (0.0f64, x[0], 0.0f64);
    for i in 1..x.len() {
        y = st
            .advance(&mut rhs, x[i - 1].ln(), y, x[i].ln())
            .map_err(|h| match h {
                Halt::Ceiling { x } | Halt::StepUnderflow { x } | Halt::NonFinite { x } => {
                    Error::NonFinite { r: x.exp() }
                }
            })?;
        if x[i] >= lo {
            let err = (y[0] - u.values()[i]).abs();
            top = top.max(u.values()[i].abs());
            if err > worst {
                worst = err;
                at = x[i];
            }
        }
    }
    Ok(RoundTrip {
        max_rel_error: if top > 0.0 { worst / top } else { worst },
        max_abs_error: worst,
        at,
    })
}

/// Both sides of `∫ (4Φ²/Φ') ξ'² ≥ ∫ Φ' ξ²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardyTest {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

const HARDY_PANELS: usize = 64;

/// Weighted Hardy inequality for `Φ` given as `r ↦ (Φ(r), Φ'(r))`.
pub fn hardy_check(phi: &dyn Fn(f64) -> (f64, f64), xi: &dyn RadialTestFn, extra_breaks: &[f64]) -> Result<HardyTest> {
    let (a, b) = xi.support();
    if !(b > a) {
        return Ok(HardyTest { lhs: 0.0, rhs: 0.0, holds: true });
    }
    let mut breaks: Vec<f64> = if a > 0.0 {
        let l = (b / a).ln();
        (0..=HARDY_PANELS).map(|i| a * (l * i as f64 / HARDY_PANELS as f64).exp()).collect()
    } else {
        (0..=HARDY_PANELS).map(|i| b * i as f64 / HARDY_PANELS as f64).collect()
    };
    breaks.extend(xi.breakpoints().into_iter().chain(extra_breaks.iter().copied()).filter(|&r| r > a && r < b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    for &r in breaks.iter().filter(|&&r| r > 0.0) {
        if !(phi(r).1 > 0.0) {
            return Err(Error::NonPositivePhiPrime { r });
        }
    }
    let lhs = gauss_legendre(&breaks, |t| {
        let (p, dp) = phi(t);
        let d = xi.deriv(t);
        4.0 * p * p / dp * d * d
    });
    let rhs = gauss_legendre(&breaks, |t| phi(t).1 * xi.value(t).powi(2));
    let holds = lhs >= rhs - 1e-10 * lhs.abs().max(rhs.abs());
    Ok(HardyTest { lhs, rhs, holds })
}

impl FamilySpec {
    pub fn hardy_check(&self, xi: &dyn RadialTestFn) -> Result<HardyTest> {
        hardy_check(&|r| (self.phi(r), self.phi_prime(r)), xi, &self.h.breakpoints())
    }

    /// `(N-1) ∫ u_r² η² t^{N-1}` against `∫ u_r² ((tη)')² t^{N-1}` with the
    /// exact `u_r`, over the part of the support of `η` above `r_min`.
    pub fn form_test(&self, eta: &dyn RadialTestFn, r_min: f64) -> Result<FormTest> {
        let (s0, s1) = eta.support();
        let (a, b) = (s0.max(r_min), s1.min(1.0));
        if !(b > a) {
            return Ok(FormTest { lhs: 0.0, rhs: 0.0, holds: true });
        }
        let n1 = self.dimension.as_f64() - 1.0;
        let l = (b / a).ln();
        let mut breaks: Vec<f64> = (0..=HARDY_PANELS).map(|i| a * (l * i as f64 / HARDY_PANELS as f64).exp()).collect();
        breaks.extend(
            self.h
                .breakpoints()
                .into_iter()
                .chain(eta.breakpoints())
                .filter(|&r| r > a && r < b),
        );
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let w = |t: f64| {
            let d = self.slope_jet(t)[0];
            d * d * t.powf(n1)
        };
        let lhs = gauss_legendre(&breaks, |t| n1 * w(t) * eta.value(t).powi(2));
        let rhs = gauss_legendre(&breaks, |t| w(t) * (eta.value(t) + t * eta.deriv(t)).powi(2));
        let holds = lhs <= rhs + 1e-8 * lhs.abs().max(rhs.abs());
        Ok(FormTest { lhs, rhs, holds })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyCheckConfig {
    /// Number of randomized test functions.
    pub form_tests: usize,
    pub seed: u64,
    pub eigen: EigenConfig,
    pub execution: Execution,
}

impl Default for FamilyCheckConfig {
    fn default() -> Self {
        Self {
            form_tests: 16,
            seed: 0,
            eigen: EigenConfig::default(),
            execution: Execution::default(),
        }
    }
}

/// Random log-bumps with supports in `[r_min, 1]` and powers between
/// `-√(N-1) - 1` and `1`.
fn random_test_fns(dim: Dimension, r_min: f64, count: usize, seed: u64) -> Vec<LogBump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lmin = r_min.ln();
    (0..count)
        .map(|_| {
            let lo = rng.gen_range(lmin..0.5f64.ln()).exp();
            let hi = (lo * rng.gen_range(2f64.ln()..(1.0 / lo).ln().max(2f64.ln() + 1e-9)).exp()).min(1.0);
            LogBump {
                lo,
                hi,
                exponent: rng.gen_range(-dim.sqrt_nm1() - 1.0..1.0),
            }
        })
        .collect()
}

/// Semi-stability of a family member, by three independent checks: the
/// nodewise inequality `Φ' ≥ 2√(N-1) Φ/r` behind the Hardy argument, the
/// radial stability inequality over randomized test functions, and the
/// spectral first eigenvalue with the potential averaged over each cell.
pub fn verify_family_semistability(
    spec: &FamilySpec,
    u: &RadialProfile,
    cfg: &FamilyCheckConfig,
) -> Result<StabilityVerdict> {
    let dim = spec.dimension;
    if dim.get() < 10 {
        return Err(Error::Hypothesis(format!(
            "semi-stability of the family is only asserted for N >= 10, got N = {}",
            dim.get()
        )));
    }
    let s = spec.s();
    for &r in u.nodes() {
        let (p, dp) = (spec.phi(r), spec.phi_prime(r));
        if dp < 2.0 * s * p / r * (1.0 - NODEWISE_RTOL) {
            return Err(Error::Construction {
                r,
                what: "Φ' < 2√(N-1) Φ / r".into(),
            });
        }
    }

    let r_min = u.grid().r_min();
    let mut fns: Vec<Box<dyn RadialTestFn>> = random_test_fns(dim, r_min, cfg.form_tests, cfg.seed)
        .into_iter()
        .map(|b| Box::new(b) as Box<dyn RadialTestFn>)
        .collect();
    for cap in [10.0 * r_min, 0.1] {
        fns.push(Box::new(CappedPower::energy_cutoff(dim, cap)));
    }
    let forms: Vec<Result<FormTest>> = cfg.execution.map(&fns, |f| spec.form_test(f.as_ref(), r_min));
    let mut failed = 0usize;
    for f in &forms {
        match f {
            Ok(t) if t.holds => {}
            Ok(_) => failed += 1,
            Err(e) => return Err(Error::Construction { r: r_min, what: format!("form test: {e}") }),
        }
    }

    let bps = spec.h.breakpoints();
    let op = LinearizedOperator::from_cell_averages(u.grid().clone(), dim, |r| spec.r2_gprime(r) / (r * r), &bps)?;
    let mut verdict = first_eigenvalue(&op, &cfg.eigen)?;
    let spectral_ok = verdict.semistable;
    verdict.method = Method::Combined;
    verdict.semistable = spectral_ok && failed == 0;
    verdict.flags.push("nodewise Φ' ≥ 2√(N-1)Φ/r holds".into());
    verdict.flags.push(format!("form tests: {}/{} hold", fns.len() - failed, fns.len()));
    if !spectral_ok {
        verdict.flags.push("spectral check failed".into());
    }
    Ok(verdict)
}

/// `‖u‖_{H¹(B₁)}` on `grid` and on `grid` extended down to `r_min/2`, with
/// their relative difference.
pub fn h1_halving(spec: &FamilySpec, grid: &RadialGrid) -> Result<(f64, f64, f64)> {
    let fine_nodes: Vec<f64> = {
        let r0 = grid.r_min();
        let x = grid.nodes();
        let ratio = (x[1] / x[0]).max(1.0 + 1e-6);
        let mut extra = Vec::new();
        let mut r = r0 / ratio;
        while r > 0.5 * r0 * (1.0 + 1e-12) {
            extra.push(r);
            r /= ratio;
        }
        extra.push(0.5 * r0);
        extra.reverse();
        extra.into_iter().chain(x.iter().copied()).collect()
    };
    let coarse = build_family(spec, grid)?;
    let fine = build_family(spec, &RadialGrid::from_nodes(fine_nodes)?)?;
    let a = crate::radial::ball_h1_norm(&coarse, spec.dimension)?;
    let b = crate::radial::ball_h1_norm(&fine, spec.dimension)?;
    Ok((a, b, (a - b).abs() / b))
}
