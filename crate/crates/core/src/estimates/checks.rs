use std::collections::BTreeMap;

use super::sup::{scan, Scan, TracePoint};
use super::{outcome, CheckContext, EstimateReport, GridMeta, HypothesisCheck, HypothesisStatus, Outcome, TheoremId};
use crate::error::Result;
use crate::radial::{
    annulus_norms, ball_h1_norm, integrate, with_numerical_derivatives, Dimension, RadialProfile, Regime,
};

/// Relative slack for the nodewise monotonicity laws.
const MONOTONE_RTOL: f64 = 1e-8;

/// `∫_{B_r} |∇u|²`, with a power-law tail below `r_min`.
pub fn weighted_energy(u: &RadialProfile, dim: Dimension, r: f64) -> Result<f64> {
    let f = energy_density(u, dim)?;
    integrate(u.grid(), &f, 0.0, r)
}

fn energy_density(u: &RadialProfile, dim: Dimension) -> Result<Vec<f64>> {
    let ur = u.require_deriv(1)?;
    let m = dim.as_f64() - 1.0;
    let sigma = dim.sphere_area();
    Ok(u.nodes().iter().zip(ur).map(|(t, d)| sigma * t.powf(m) * d * d).collect())
}

fn meta(u: &RadialProfile) -> GridMeta {
    GridMeta {
        nodes: u.grid().len(),
        r_min: u.grid().r_min(),
    }
}

fn h1_hypothesis(u: &RadialProfile, dim: Dimension) -> HypothesisCheck {
    match ball_h1_norm(u, dim) {
        Ok(v) if v.is_finite() => HypothesisCheck {
            name: "H1".into(),
            status: HypothesisStatus::Satisfied,
            detail: format!("||u||_H1(B1) = {v:.6e}"),
        },
        Ok(_) | Err(_) => HypothesisCheck {
            name: "H1".into(),
            status: HypothesisStatus::Violated,
            detail: "energy density not integrable at the origin".into(),
        },
    }
}

fn decreasing_hypothesis(u: &RadialProfile) -> HypothesisCheck {
    let ok = u.is_radially_decreasing(0.0);
    HypothesisCheck {
        name: "radially decreasing".into(),
        status: if ok { HypothesisStatus::Satisfied } else { HypothesisStatus::Violated },
        detail: if ok { "u_r <= 0 at every node".into() } else { "u_r > 0 at some node".into() },
    }
}

struct Draft {
    id: TheoremId,
    item: Option<String>,
    regime: Option<Regime>,
    hypotheses: Vec<HypothesisCheck>,
    quantities: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl Draft {
    fn new(id: TheoremId, regime: Option<Regime>, hypotheses: Vec<HypothesisCheck>) -> Self {
        Self {
            id,
            item: None,
            regime,
            hypotheses,
            quantities: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    fn item(mut self, item: &str) -> Self {
        self.item = Some(item.into());
        self
    }

    fn quantity(mut self, k: &str, v: f64) -> Self {
        self.quantities.insert(k.into(), v);
        self
    }

    /// Report for a scanned ratio; the constant is `sup / normalizer`.
    fn finish(self, u: &RadialProfile, s: Scan, normalizer: f64) -> EstimateReport {
        let holds = s.plateaus();
        let mut quantities = self.quantities;
        quantities.insert("raw_sup".into(), s.sup);
        if let Some(t) = s.trace.first() {
            quantities.insert("ratio_at_r_min".into(), t.ratio);
        }
        EstimateReport {
            theorem_id: self.id,
            item: self.item,
            regime: self.regime,
            empirical_constant: s.sup / normalizer,
            sup_location: s.at,
            holds_uniformly: holds,
            slope_at_origin: s.slope_at_origin,
            refinement_trend: String::new(),
            outcome: outcome(&self.hypotheses, holds),
            hypotheses: self.hypotheses,
            quantities,
            notes: self.notes,
            grid_meta: meta(u),
            trace: s.trace,
        }
    }

    fn vacuous(self, u: &RadialProfile, why: &str) -> EstimateReport {
        let mut notes = self.notes;
        notes.push(why.into());
        EstimateReport {
            theorem_id: self.id,
            item: self.item,
            regime: self.regime,
            empirical_constant: 0.0,
            sup_location: u.grid().r_min(),
            holds_uniformly: true,
            slope_at_origin: None,
            refinement_trend: String::new(),
            outcome: Outcome::Vacuous,
            hypotheses: self.hypotheses,
            quantities: self.quantities,
            notes,
            grid_meta: meta(u),
            trace: Vec::new(),
        }
    }
}

/// Runs `check` on `u` and on its coarsening, and records the change of
/// every constant in `refinement_trend`.
fn with_trend(
    u: &RadialProfile,
    ctx: &CheckContext,
    check: impl Fn(&RadialProfile, &CheckContext) -> Result<Vec<EstimateReport>>,
) -> Result<Vec<EstimateReport>> {
    let mut fine = check(u, ctx)?;
    if ctx.skip_refinement {
        for r in &mut fine {
            r.refinement_trend = "not computed".into();
        }
        return Ok(fine);
    }
    let coarse_ctx = CheckContext {
        skip_refinement: true,
        ..ctx.clone()
    };
    let coarse = u.coarsened().and_then(|c| check(&c, &coarse_ctx));
    match coarse {
        Ok(coarse) => {
            for (f, c) in fine.iter_mut().zip(coarse) {
                let (a, b) = (c.empirical_constant, f.empirical_constant);
                let rel = if b != 0.0 { (b - a).abs() / b.abs() } else { (b - a).abs() };
                f.refinement_trend = format!(
                    "half density {} -> full density {} (relative change {:.2e})",
                    crate::radial::profile::fmt_f64(a),
                    crate::radial::profile::fmt_f64(b),
                    rel
                );
                f.quantities.insert("refinement_rel_change".into(), rel);
            }
        }
        Err(e) => {
            for f in &mut fine {
                f.refinement_trend = format!("coarse rerun unavailable: {e}");
            }
        }
    }
    Ok(fine)
}

fn single(v: Vec<EstimateReport>) -> EstimateReport {
    v.into_iter().next().expect("one report")
}

/// Weighted energy on `(0, r)` against `‖∇u‖²_{L²(B₁∖B_{1/2})} r^{2√(N-1)+2}`.
pub fn check_lemma_essential(u: &RadialProfile, dim: Dimension, ctx: &CheckContext) -> Result<EstimateReport> {
    with_trend(u, ctx, |u, ctx| {
        let draft = Draft::new(TheoremId::LemmaEssential, Some(dim.regime()), vec![ctx.semistable(), h1_hypothesis(u, dim)]);
        let grad2 = annulus_norms(u, dim)?.grad_l2.powi(2);
        if grad2 == 0.0 {
            return Ok(vec![draft.vacuous(u, "grad_l2 = 0 on the annulus (constant profile)")]);
        }
        let f = energy_density(u, dim)?;
        let grid = u.grid();
        integrate(grid, &f, 0.0, grid.r_min())?;
        let expo = dim.energy_exponent();
        let lhs = |r: f64| integrate(grid, &f, 0.0, r).unwrap_or(f64::NAN);
        let rhs = |r: f64| grad2 * r.powf(expo);
        let s = scan(u.nodes(), grid.r_min(), 1.0, &lhs, &rhs);
        Ok(vec![draft.quantity("grad_l2_squared", grad2).finish(u, s, 1.0)])
    })
    .map(single)
}

/// `|u(r) - u(r/2)|` against `‖∇u‖_{L²(B₁∖B_{1/2})} r^{-N/2+√(N-1)+2}`.
pub fn check_rand2r(u: &RadialProfile, dim: Dimension, ctx: &CheckContext) -> Result<EstimateReport> {
    with_trend(u, ctx, |u, ctx| {
        let draft = Draft::new(TheoremId::PropRand2r, Some(dim.regime()), vec![ctx.semistable(), h1_hypothesis(u, dim)]);
        let grad = annulus_norms(u, dim)?.grad_l2;
        if grad == 0.0 {
            return Ok(vec![draft.vacuous(u, "grad_l2 = 0 on the annulus (constant profile)")]);
        }
        let e = dim.singular_exponent();
        let lhs = |r: f64| (u.eval(r) - u.eval(0.5 * r)).abs();
        let rhs = |r: f64| grad * r.powf(e);
        let s = scan(u.nodes(), 2.0 * u.grid().r_min(), 1.0, &lhs, &rhs);
        Ok(vec![draft.quantity("grad_l2", grad).finish(u, s, 1.0)])
    })
    .map(single)
}

/// `|u(r)|` against `‖u‖_{H¹(B₁∖B_{1/2})}` times `1`, `|log r| + 1` or
/// `r^{-N/2+√(N-1)+2}` according to the regime of `N`.
pub fn check_thm_principal(u: &RadialProfile, dim: Dimension, ctx: &CheckContext) -> Result<EstimateReport> {
    with_trend(u, ctx, |u, ctx| {
        let regime = dim.regime();
        let draft = Draft::new(TheoremId::ThmPrincipal, Some(regime), vec![ctx.semistable(), h1_hypothesis(u, dim)]);
        let h1 = annulus_norms(u, dim)?.h1;
        if h1 == 0.0 {
            return Ok(vec![draft.vacuous(u, "H1 norm on the annulus vanishes")]);
        }
        let e = dim.singular_exponent();
        let bound = move |r: f64| match regime {
            Regime::Bounded => 1.0,
            Regime::Logarithmic => r.ln().abs() + 1.0,
            Regime::Power => r.powf(e),
        };
        let lhs = |r: f64| u.eval(r).abs();
        let rhs = |r: f64| h1 * bound(r);
        let s = scan(u.nodes(), u.grid().r_min(), 1.0, &lhs, &rhs);
        Ok(vec![draft.quantity("h1", h1).finish(u, s, 1.0)])
    })
    .map(single)
}

fn min_abs_slope_on_annulus(u: &RadialProfile) -> Result<f64> {
    let ur = u.require_deriv(1)?;
    let mut m = u
        .nodes()
        .iter()
        .zip(ur)
        .filter(|(r, _)| **r >= 0.5)
        .map(|(_, d)| d.abs())
        .fold(f64::INFINITY, f64::min);
    if let Some(d) = u.eval_deriv(1, 0.5) {
        m = m.min(d.abs());
    }
    Ok(m)
}

fn ensure_derivatives(u: &RadialProfile) -> Result<(RadialProfile, Vec<String>)> {
    let missing: Vec<String> = (1..=3)
        .filter(|k| u.deriv(*k).is_none())
        .map(|k| format!("derivative of order {k} computed numerically"))
        .collect();
    Ok((with_numerical_derivatives(u)?, missing))
}

/// Pointwise bounds for an extremal solution, normalized by
/// `min_{[1/2,1]} |u*_r|`: `u* ≤ C(1-r)` (`N < 10`), `u* ≤ C|log r|` (`N = 10`),
/// `u* ≤ C(r^{-N/2+√(N-1)+2} - 1)` (`N > 10`), and for `N ≥ 10`
/// `|∂^k u*| ≤ C r^{-N/2+√(N-1)+2-k}`, `k = 1, 2, 3`.
pub fn check_thm_extremal(ustar: &RadialProfile, dim: Dimension, ctx: &CheckContext) -> Result<Vec<EstimateReport>> {
    with_trend(ustar, ctx, |u, ctx| {
        let (u, notes) = ensure_derivatives(u)?;
        let regime = dim.regime();
        let mut hyps = vec![decreasing_hypothesis(&u)];
        if let Some(low) = ctx.extremal_low_confidence {
            hyps.push(HypothesisCheck {
                name: "extremal approximation".into(),
                status: if low { HypothesisStatus::Violated } else { HypothesisStatus::Satisfied },
                detail: if low {
                    "branch too sparse near lambda*".into()
                } else {
                    "top of branch resolved".into()
                },
            });
        }
        let norm = min_abs_slope_on_annulus(&u)?;
        let e = dim.singular_exponent();
        let draft = |item: &str| {
            let mut d = Draft::new(TheoremId::ThmExtremal, Some(regime), hyps.clone())
                .item(item)
                .quantity("min_abs_ur_annulus", norm);
            d.notes.extend(notes.iter().cloned());
            d
        };
        let (x0, x1) = (u.grid().r_min(), 1.0);
        let mut out = Vec::new();
        let value = |r: f64| u.eval(r);
        let (item, bound): (&str, Box<dyn Fn(f64) -> f64>) = match regime {
            Regime::Bounded => ("i", Box::new(|r: f64| 1.0 - r)),
            Regime::Logarithmic => ("ii", Box::new(|r: f64| -r.ln())),
            Regime::Power => ("iii", Box::new(move |r: f64| r.powf(e) - 1.0)),
        };
        let items: Vec<(String, Box<dyn Fn(f64) -> f64 + '_>, Box<dyn Fn(f64) -> f64>)> = {
            let mut v: Vec<(String, Box<dyn Fn(f64) -> f64 + '_>, Box<dyn Fn(f64) -> f64>)> =
                vec![(item.to_string(), Box::new(value), bound)];
            if regime != Regime::Bounded {
                for k in 1..=3usize {
                    let uk = u.clone();
                    v.push((
                        format!("iv.k={k}"),
                        Box::new(move |r: f64| uk.eval_deriv(k, r).unwrap_or(f64::NAN).abs()),
                        Box::new(move |r: f64| r.powf(e - k as f64)),
                    ));
                }
            }
            v
        };
        for (name, lhs, rhs) in items {
            let d = draft(&name);
            if !(norm > 0.0) {
                let mut d = d;
                d.hypotheses.push(HypothesisCheck {
                    name: "nondegenerate normalizer".into(),
                    status: HypothesisStatus::Violated,
                    detail: "min |u_r| on [1/2, 1] is zero".into(),
                });
                let s = scan(u.nodes(), x0, x1, &*lhs, &*rhs);
                out.push(d.finish(&u, s, f64::NAN));
                continue;
            }
            let s = scan(u.nodes(), x0, x1, &*lhs, &*rhs);
            let limit = s.trace.first().map(|t| t.ratio).unwrap_or(f64::NAN);
            out.push(d.quantity("normalized_limit_at_r_min", limit / norm).finish(&u, s, norm));
        }
        Ok(out)
    })
}

/// `|∂^k u| ≤ M' ‖∇u‖_{L²(B₁∖B_{1/2})} r^{-N/2+√(N-1)+2-k}` on `(r_min, 1/2]`,
/// item `k` requiring `g ≥ 0`, then also nondecreasing, then also convex.
pub fn check_thm_estimas(u: &RadialProfile, dim: Dimension, ctx: &CheckContext) -> Result<Vec<EstimateReport>> {
    with_trend(u, ctx, |u, ctx| {
        let (u, notes) = ensure_derivatives(u)?;
        let grad = annulus_norms(&u, dim)?.grad_l2;
        let e = dim.singular_exponent();
        let names = ["i", "ii", "iii"];
        let mut out = Vec::new();
        for k in 1..=3usize {
            let mut hyps = vec![ctx.semistable(), h1_hypothesis(&u, dim), ctx.g_flag("g >= 0", |f| f.nonnegative)];
            if k >= 2 {
                hyps.push(ctx.g_flag("g nondecreasing", |f| f.nondecreasing));
            }
            if k >= 3 {
                hyps.push(ctx.g_flag("g convex", |f| f.convex));
            }
            let mut d = Draft::new(TheoremId::ThmEstimas, Some(dim.regime()), hyps)
                .item(names[k - 1])
                .quantity("grad_l2", grad);
            d.notes.extend(notes.iter().cloned());
            if grad == 0.0 {
                out.push(d.vacuous(&u, "grad_l2 = 0 on the annulus (constant profile)"));
                continue;
            }
            let lhs = |r: f64| u.eval_deriv(k, r).unwrap_or(f64::NAN).abs();
            let rhs = |r: f64| grad * r.powf(e - k as f64);
            let s = scan(u.nodes(), u.grid().r_min(), 0.5, &lhs, &rhs);
            out.push(d.finish(&u, s, 1.0));
        }
        Ok(out)
    })
}

/// Monotonicity laws for radially decreasing solutions with `g ≥ 0`
/// nondecreasing: `r^{N-1}|u_r|` nondecreasing, `|u_r|/r` nonincreasing,
/// `max/min` of `|u_r|` on `[1/2, 1]` at most `2^{N-1}`, and the ratio
/// `q = ‖∇u‖_{L²(B₁∖B_{1/2})} / min_{[1/2,1]} |u_r|`.
pub fn check_monotonias(u: &RadialProfile, dim: Dimension, ctx: &CheckContext) -> Result<EstimateReport> {
    with_trend(u, ctx, |u, ctx| {
        let hyps = vec![
            decreasing_hypothesis(u),
            ctx.g_flag("g >= 0", |f| f.nonnegative),
            ctx.g_flag("g nondecreasing", |f| f.nondecreasing),
        ];
        let draft = Draft::new(TheoremId::LemmaMonotonias, Some(dim.regime()), hyps).item("i-iv");
        let ur = u.require_deriv(1)?;
        if ur.iter().all(|&d| d == 0.0) {
            return Ok(vec![draft.vacuous(u, "u_r vanishes identically")]);
        }
        let n1 = dim.as_f64() - 1.0;
        let x = u.nodes();
        let w1: Vec<f64> = x.iter().zip(ur).map(|(r, d)| r.powf(n1) * d.abs()).collect();
        let w2: Vec<f64> = x.iter().zip(ur).map(|(r, d)| d.abs() / r).collect();
        let mut first_bad_i = None;
        let mut first_bad_ii = None;
        let mut bad_i = 0usize;
        let mut bad_ii = 0usize;
        for j in 0..x.len() - 1 {
            if w1[j + 1] < w1[j] * (1.0 - MONOTONE_RTOL) {
                bad_i += 1;
                first_bad_i.get_or_insert(x[j + 1]);
            }
            if w2[j + 1] > w2[j] * (1.0 + MONOTONE_RTOL) {
                bad_ii += 1;
                first_bad_ii.get_or_insert(x[j + 1]);
            }
        }
        let ann: Vec<f64> = x.iter().zip(ur).filter(|(r, _)| **r >= 0.5).map(|(_, d)| d.abs()).collect();
        let mx = ann.iter().fold(0.0f64, |a, &v| a.max(v));
        let mn = min_abs_slope_on_annulus(u)?;
        let spread = if mn > 0.0 { mx / mn } else { f64::INFINITY };
        let bound = 2f64.powf(n1);
        let grad = annulus_norms(u, dim)?.grad_l2;
        let q = if mn > 0.0 { grad / mn } else { f64::INFINITY };
        let holds = bad_i == 0 && bad_ii == 0 && spread <= bound;
        let mut draft = draft
            .quantity("violations_i", bad_i as f64)
            .quantity("violations_ii", bad_ii as f64)
            .quantity("max_over_min_annulus", spread)
            .quantity("bound_iii", bound)
            .quantity("q", q);
        if let Some(r) = first_bad_i {
            draft.notes.push(format!("r^(N-1)|u_r| decreases near r = {r:.6e}"));
        }
        if let Some(r) = first_bad_ii {
            draft.notes.push(format!("|u_r|/r increases near r = {r:.6e}"));
        }
        let at = ann
            .iter()
            .zip(x.iter().filter(|r| **r >= 0.5))
            .fold((0.0, 0.5), |(m, at), (v, r)| if *v > m { (*v, *r) } else { (m, at) })
            .1;
        let trace: Vec<TracePoint> = x
            .iter()
            .zip(w1.iter().zip(&w2))
            .map(|(&r, (&a, &b))| TracePoint {
                r,
                lhs: a,
                rhs: b,
                ratio: if b > 0.0 { a / b } else { f64::NAN },
            })
            .collect();
        let mut report = draft.vacuous(u, "");
        report.notes.pop();
        report.empirical_constant = spread;
        report.sup_location = at;
        report.holds_uniformly = holds;
        report.outcome = outcome(&report.hypotheses, holds);
        report.trace = trace;
        Ok(vec![report])
    })
    .map(single)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialGrid;
    use approx::assert_relative_eq;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn log_profile() -> RadialProfile {
        let g = RadialGrid::geometric(600, 1e-4).unwrap();
        RadialProfile::from_jet(g, |r| [-2.0 * r.ln(), -2.0 / r, 2.0 / (r * r), -4.0 / r.powi(3)]).unwrap()
    }

    fn annulus_grad2(n: u32) -> f64 {
        // sigma_N * int_{1/2}^1 4 t^{N-3} dt
        let k = (n - 2) as f64;
        dim(n).sphere_area() * 4.0 * (1.0 - 0.5f64.powf(k)) / k
    }

    #[test]
    fn essential_ratio_is_flat_for_log_profile() {
        // int_{B_r} |grad u|^2 = sigma * r^8 / 2 at N = 10
        let u = log_profile();
        let rep = check_lemma_essential(&u, dim(10), &CheckContext::default()).unwrap();
        let expected = dim(10).sphere_area() * 0.5 / annulus_grad2(10);
        assert_relative_eq!(rep.empirical_constant, expected, max_relative = 1e-6);
        assert!(rep.holds_uniformly);
        assert!(rep.slope_at_origin.unwrap().abs() < 1e-6);
        assert_eq!(rep.outcome, Outcome::Skipped);
    }

    #[test]
    fn rand2r_constant_for_log_profile() {
        let u = log_profile();
        let rep = check_rand2r(&u, dim(10), &CheckContext::default()).unwrap();
        let expected = 2.0 * 2f64.ln() / annulus_grad2(10).sqrt();
        assert_relative_eq!(rep.empirical_constant, expected, max_relative = 1e-6);
        assert!(rep.holds_uniformly);
    }

    #[test]
    fn zero_profile_is_vacuous() {
        let g = RadialGrid::geometric(100, 1e-3).unwrap();
        let u = RadialProfile::from_jet(g, |_| [0.0; 4]).unwrap();
        let rep = check_thm_principal(&u, dim(5), &CheckContext::default()).unwrap();
        assert_eq!(rep.outcome, Outcome::Vacuous);
        let rep = check_monotonias(&u, dim(5), &CheckContext::default()).unwrap();
        assert_eq!(rep.outcome, Outcome::Vacuous);
    }

    #[test]
    fn unbounded_profile_breaks_bounded_regime_estimate() {
        let g = RadialGrid::geometric(400, 1e-6).unwrap();
        let u = RadialProfile::from_jet(g, |r| [-r.ln(), -1.0 / r, 1.0 / (r * r), -2.0 / r.powi(3)]).unwrap();
        let rep = check_thm_principal(&u, dim(3), &CheckContext::default()).unwrap();
        assert!(!rep.holds_uniformly);
        assert_relative_eq!(rep.sup_location, 1e-6, max_relative = 1e-9);
    }

    #[test]
    fn monotonicity_laws_for_quadratic_profile() {
        let g = RadialGrid::geometric(200, 1e-3).unwrap();
        let u = RadialProfile::from_jet(g, |r| [1.0 - r * r, -2.0 * r, -2.0, 0.0]).unwrap();
        let ctx = CheckContext::default().with_g_flags(crate::radial::Nonlinearity::Exp.flags());
        let rep = check_monotonias(&u, dim(3), &ctx).unwrap();
        assert_eq!(rep.outcome, Outcome::Pass);
        assert_relative_eq!(rep.empirical_constant, 2.0, max_relative = 1e-12);
        assert_relative_eq!(rep.quantities["q"], annulus_grad2_quadratic() / 1.0, max_relative = 1e-6);
    }

    fn annulus_grad2_quadratic() -> f64 {
        // sqrt(4 pi int_{1/2}^1 4 t^4 dt) / min|u_r| with min|u_r| = 1
        (4.0 * std::f64::consts::PI * 4.0 * (1.0 - 1.0 / 32.0) / 5.0).sqrt()
    }

    #[test]
    fn extremal_items_for_log_profile() {
        let u = log_profile();
        let reps = check_thm_extremal(&u, dim(10), &CheckContext::default()).unwrap();
        let items: Vec<_> = reps.iter().map(|r| r.item.clone().unwrap()).collect();
        assert_eq!(items, ["ii", "iv.k=1", "iv.k=2", "iv.k=3"]);
        for (rep, c) in reps.iter().zip([1.0, 1.0, 1.0, 2.0]) {
            // off-node derivatives are interpolated
            assert_relative_eq!(rep.empirical_constant, c, max_relative = 1e-3);
            assert!(rep.holds_uniformly, "{}", rep.label());
        }
        assert_eq!(reps[0].outcome, Outcome::Pass);
        assert!(reps[0].refinement_trend.contains("relative change"));
    }

    #[test]
    fn estimas_hypotheses_accumulate() {
        let u = log_profile();
        let reps = check_thm_estimas(&u, dim(10), &CheckContext::default()).unwrap();
        let counts: Vec<_> = reps.iter().map(|r| r.hypotheses.len()).collect();
        assert_eq!(counts, [3, 4, 5]);
        assert!(reps.iter().all(|r| r.outcome == Outcome::Skipped));
    }

    #[test]
    fn weighted_energy_of_log_profile() {
        let u = log_profile();
        let w = weighted_energy(&u, dim(10), 0.3).unwrap();
        assert_relative_eq!(w, dim(10).sphere_area() * 0.5 * 0.3f64.powi(8), max_relative = 1e-6);
    }
}
