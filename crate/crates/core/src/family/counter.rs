//! Family members whose first, second or third radial derivative exceeds
//! prescribed magnitudes `M_n` along radii `r_n ↓ 0`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::seed::{Seed, Term, K_MASS};
use super::{build_family, recover_g, FamilySpec};
use crate::error::{Error, Result};
use crate::radial::{Dimension, RadialGrid, RadialProfile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleTarget {
    pub radii: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub derivative_order: u8,
}

impl CounterexampleTarget {
    pub fn new(radii: Vec<f64>, magnitudes: Vec<f64>, derivative_order: u8) -> Result<Self> {
        if radii.is_empty() || radii.len() != magnitudes.len() {
            return Err(Error::InvalidArgument("need as many magnitudes as radii (at least one)".into()));
        }
        if !(1..=3).contains(&derivative_order) {
            return Err(Error::InvalidArgument(format!("derivative order {derivative_order} not in 1..=3")));
        }
        if radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) || radii.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidArgument("radii must decrease strictly inside (0, 1]".into()));
        }
        if magnitudes.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument("magnitudes must be positive and finite".into()));
        }
        Ok(Self {
            radii,
            magnitudes,
            derivative_order,
        })
    }

    /// `r_n = ratio^n`, `M_n = magnitude(n)` for `n = 1..=count`.
    pub fn geometric(ratio: f64, count: usize, magnitude: impl Fn(usize) -> f64, derivative_order: u8) -> Result<Self> {
        let radii = (1..=count).map(|n| ratio.powi(n as i32)).collect();
        let magnitudes = (1..=count).map(magnitude).collect();
        Self::new(radii, magnitudes, derivative_order)
    }

    /// Half width of the localized piece at `r_n`: a quarter of the distance
    /// to the nearest neighbour (including `1` and `0`).
    fn half_widths(&self) -> Vec<f64> {
        let r = &self.radii;
        (0..r.len())
            .map(|i| {
                let mut gap = r[i];
                if i == 0 {
                    if r[0] < 1.0 {
                        gap = gap.min(1.0 - r[0]);
                    }
                } else {
                    gap = gap.min(r[i - 1] - r[i]);
                }
                if i + 1 < r.len() {
                    gap = gap.min(r[i] - r[i + 1]);
                }
                gap / 4.0
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetCheck {
    pub n: usize,
    pub r: f64,
    pub required: f64,
    pub achieved: f64,
    pub met: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub spec: FamilySpec,
    pub target: CounterexampleTarget,
    pub checks: Vec<TargetCheck>,
    pub all_met: bool,
    /// `min g` over the tabulated range, for orders 2 and 3.
    pub min_g: Option<f64>,
    /// `min r² g'(u)` over the nodes, for order 3.
    pub min_r2_gprime: Option<f64>,
    pub constants: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub profile: RadialProfile,
}

fn target_grid(grid: &RadialGrid, t: &CounterexampleTarget) -> Result<RadialGrid> {
    let last = *t.radii.last().expect("nonempty");
    if last <= grid.r_min() {
        return Err(Error::InvalidGrid(format!(
            "target radius {last:e} is not above r_min = {:e}",
            grid.r_min()
        )));
    }
    grid.with_extra_nodes(&t.radii)
}

fn check_order(t: &CounterexampleTarget, k: u8) -> Result<()> {
    if t.derivative_order != k {
        return Err(Error::InvalidArgument(format!(
            "target has derivative order {}, expected {k}",
            t.derivative_order
        )));
    }
    Ok(())
}

fn evaluate(spec: &FamilySpec, t: &CounterexampleTarget, k: usize) -> Vec<TargetCheck> {
    t.radii
        .iter()
        .zip(&t.magnitudes)
        .enumerate()
        .map(|(i, (&r, &m))| {
            let achieved = spec.slope_jet(r)[k - 1].abs();
            TargetCheck {
                n: i + 1,
                r,
                required: m,
                achieved,
                met: achieved >= m,
            }
        })
        .collect()
}

fn require_finite(values: &[f64], radii: &[f64], what: &str) -> Result<()> {
    match values.iter().zip(radii).find(|(v, _)| !v.is_finite()) {
        Some((_, &r)) => Err(Error::Construction {
            r,
            what: format!("{what} overflows"),
        }),
        None => Ok(()),
    }
}

/// `|u_r(r_n)| ≥ M_n` from bumps `h(r_n) = y_n = (N-1) M_n² r_n^{N-2√(N-1)-3}`,
/// using `Φ' ≥ h r^{2√(N-1)}`. The `n`-th bump has mass at most `2^{-n}`.
pub fn counterexample_first(dim: Dimension, target: &CounterexampleTarget, grid: &RadialGrid) -> Result<Counterexample> {
    check_order(target, 1)?;
    let n = dim.as_f64();
    let s = dim.sqrt_nm1();
    let y: Vec<f64> = target
        .radii
        .iter()
        .zip(&target.magnitudes)
        .map(|(&r, &m)| (n - 1.0) * m * m * r.powf(n - 2.0 * s - 3.0))
        .collect();
    require_finite(&y, &target.radii, "bump height y_n")?;
    let mut notes = Vec::new();
    let mut terms = Vec::with_capacity(y.len());
    for (i, ((&centre, quarter), &height)) in target.radii.iter().zip(target.half_widths()).zip(&y).enumerate() {
        // the n-th bump carries mass at most 2^{-n}, so h stays in L¹ as the sequence grows
        let budget = 0.5f64.powi(i as i32 + 1) / (height * K_MASS);
        let half_width = quarter.min(budget);
        if half_width < quarter {
            notes.push(format!("bump {} narrowed to half width {half_width:.3e}", i + 1));
        }
        terms.push(Term::Bump {
            centre,
            half_width,
            height,
        });
    }
    let spec = FamilySpec::new(dim, Seed { terms })?;
    let grid = target_grid(grid, target)?;
    let profile = build_family(&spec, &grid)?;
    let checks = evaluate(&spec, target, 1);
    Ok(Counterexample {
        all_met: checks.iter().all(|c| c.met),
        spec,
        target: target.clone(),
        checks,
        min_g: None,
        min_r2_gprime: None,
        constants: BTreeMap::new(),
        notes,
        profile,
    })
}

/// Constants bounding `u_rr` from below for increasing seeds with `0 ≤ h ≤ 1`:
/// `|u_r| ≤ D r^{e₁}` with `D² = G/(N-1)`, `G = 4√(N-1) + 1`, and
/// `-u_rr ≥ E h' r^{e₁+1} - F r^{e₁-1}` with `E = 1/(2(N-1)D)`, `F = (N-3)D/2`.
pub(crate) fn second_order_constants(dim: Dimension) -> [f64; 4] {
    let n = dim.as_f64();
    let g = 4.0 * dim.sqrt_nm1() + 1.0;
    let d = (g / (n - 1.0)).sqrt();
    [g, d, 1.0 / (2.0 * (n - 1.0) * d), (n - 3.0) * d / 2.0]
}

/// `|u_rr(r_n)| ≥ M_n` with `g ≥ 0`, from a smooth staircase `0 ≤ h ≤ 1`
/// with slopes `h'(r_n) = y_n`. Ramps are narrowed until their total rise
/// stays below one.
pub fn counterexample_second(dim: Dimension, target: &CounterexampleTarget, grid: &RadialGrid) -> Result<Counterexample> {
    check_order(target, 2)?;
    let [g_n, d_n, e_n, f_n] = second_order_constants(dim);
    let e1 = dim.singular_exponent() - 1.0;
    let y: Vec<f64> = target
        .radii
        .iter()
        .zip(&target.magnitudes)
        .map(|(&r, &m)| (m + f_n * r.powf(e1 - 1.0)) / (e_n * r.powf(e1 + 1.0)))
        .collect();
    require_finite(&y, &target.radii, "ramp slope y_n")?;
    let budget = 1.0 / (target.radii.len() as f64 + 1.0);
    let mut notes = Vec::new();
    let terms = target
        .radii
        .iter()
        .zip(target.half_widths())
        .zip(&y)
        .enumerate()
        .map(|(i, ((&centre, gap_w), &slope))| {
            let w = gap_w.min(budget / (slope * K_MASS));
            if w < gap_w {
                notes.push(format!("ramp {} narrowed to half width {w:.3e}", i + 1));
            }
            Term::Ramp {
                centre,
                half_width: w,
                rise: slope * w * K_MASS,
            }
        })
        .collect();
    let spec = FamilySpec::new(dim, Seed { terms })?;
    let grid = target_grid(grid, target)?;
    let profile = build_family(&spec, &grid)?;
    let checks = evaluate(&spec, target, 2);
    let g = recover_g(&profile, dim)?;
    let ur = profile.require_deriv(1)?;
    let max_d = profile
        .nodes()
        .iter()
        .zip(ur)
        .map(|(&r, &d)| d.abs() / r.powf(e1))
        .fold(0.0, f64::max);
    if max_d > d_n * (1.0 + 1e-12) {
        notes.push(format!("|u_r| r^(-e1) reaches {max_d:.6} above D_N"));
    }
    let all_met = checks.iter().all(|c| c.met);
    if !all_met {
        notes.push("infeasible at the requested magnitudes after narrowing".into());
    }
    let constants = BTreeMap::from([
        ("D_N".to_string(), d_n),
        ("E_N".to_string(), e_n),
        ("F_N".to_string(), f_n),
        ("G_N".to_string(), g_n),
        ("max_abs_ur_over_power".to_string(), max_d),
    ]);
    Ok(Counterexample {
        all_met,
        spec,
        target: target.clone(),
        checks,
        min_g: Some(g.min_g()),
        min_r2_gprime: None,
        constants,
        notes,
        profile,
    })
}

/// `σ = -e₁(e₁ - 1) √2 (N-1)^{-1/4}` with `e₁ = -N/2 + √(N-1) + 1`.
pub(crate) fn sigma(dim: Dimension) -> f64 {
    let e1 = dim.singular_exponent() - 1.0;
    -e1 * (e1 - 1.0) * 2f64.sqrt() * (dim.as_f64() - 1.0).powf(-0.25)
}

const CALIBRATION_START: f64 = 0.5;
const CALIBRATION_HALVINGS: usize = 60;

/// `|u_rrr(r_n)| ≥ M_n` with `g, g' ≥ 0`, from a concave seed
/// `h = ∫₀^r z` with `z` decreasing in `[0, ε']` and `z'(r_n) = -y_n`. The
/// slope cap `ε'` is halved until `r² g'(u) ≥ (N-2)²/8` at every node and
/// every target is met.
pub fn counterexample_third(dim: Dimension, target: &CounterexampleTarget, grid: &RadialGrid) -> Result<Counterexample> {
    check_order(target, 3)?;
    let n = dim.as_f64();
    let e1 = dim.singular_exponent() - 1.0;
    let c0 = 2f64.sqrt() * (n - 1.0).powf(-0.25);
    let sig = sigma(dim);
    let y: Vec<f64> = target
        .radii
        .iter()
        .zip(&target.magnitudes)
        .map(|(&r, &m)| (r.powf(2.0 - e1) * m - sig + 1.0) * (2.0 * c0 + 1.0) * (n - 1.0) / r.powi(3))
        .collect();
    require_finite(&y, &target.radii, "curvature y_n")?;
    let grid = target_grid(grid, target)?;
    let margin = (n - 2.0).powi(2) / 8.0;
    let gap_w = target.half_widths();
    let count = target.radii.len() as f64;

    let mut eps = CALIBRATION_START;
    let mut worst_r = 1.0;
    for _ in 0..CALIBRATION_HALVINGS {
        let mut terms = vec![Term::Power {
            coeff: eps,
            exponent: 1.0,
        }];
        for ((&centre, &gw), &yn) in target.radii.iter().zip(&gap_w).zip(&y) {
            let w = gw.min(eps / (2.0 * count * yn * K_MASS));
            terms.push(Term::RampIntegral {
                centre,
                half_width: w,
                rise: -yn * w * K_MASS,
            });
        }
        let spec = FamilySpec::new(dim, Seed { terms })?;
        let (min_r2, at) = grid
            .nodes()
            .iter()
            .map(|&r| (spec.r2_gprime(r), r))
            .fold((f64::INFINITY, 1.0), |a, b| if b.0 < a.0 { b } else { a });
        let checks = evaluate(&spec, target, 3);
        let signed_ok = target
            .radii
            .iter()
            .zip(&target.magnitudes)
            .all(|(&r, &m)| spec.slope_jet(r)[2] >= m);
        if min_r2 >= margin && signed_ok {
            let profile = build_family(&spec, &grid)?;
            let g = recover_g(&profile, dim)?;
            let constants = BTreeMap::from([
                ("epsilon_prime".to_string(), eps),
                ("sigma".to_string(), sig),
                ("r2_gprime_margin".to_string(), margin),
            ]);
            return Ok(Counterexample {
                all_met: checks.iter().all(|c| c.met),
                spec,
                target: target.clone(),
                checks,
                min_g: Some(g.min_g()),
                min_r2_gprime: Some(min_r2),
                constants,
                notes: vec![format!("slope cap calibrated to {eps:.3e}")],
                profile,
            });
        }
        worst_r = if min_r2 < margin {
            at
        } else {
            target
                .radii
                .iter()
                .zip(&target.magnitudes)
                .find(|(&r, &m)| spec.slope_jet(r)[2] < m)
                .map(|(&r, _)| r)
                .unwrap_or(at)
        };
        eps *= 0.5;
    }
    Err(Error::Calibration { r: worst_r })
}
