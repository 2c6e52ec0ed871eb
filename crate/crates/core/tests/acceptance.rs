//! End-to-end acceptance suite. Runs every criterion at its stated tolerance,
//! prints one line per criterion and exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semistable::branch::{extremal_profile, ode_residual, solve_branch, Branch, BranchConfig, DerivativeSource};
use semistable::closed_form::{log_profile, power_profile};
use semistable::estimates::{check_lemma_essential, check_monotonias, check_thm_extremal, CheckContext};
use semistable::family::{
    build_family, construction_residual, counterexample_first, counterexample_second, counterexample_third,
    h1_halving, recover_g, round_trip, slope_lower_bound_violation, verify_family_semistability, Counterexample,
    CounterexampleTarget, FamilyCheckConfig, FamilySpec, Seed, Term,
};
use semistable::radial::{Dimension, Nonlinearity, RadialGrid, RadialProfile};
use semistable::stability::{first_eigenvalue, EigenConfig, LinearizedOperator};

type Outcome = Result<String, String>;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:.1?}, limit {limit:?}"))
}

/// Branches shared between criteria 1, 2 and 8.
struct Branches {
    exp10: Branch,
    jl16: Branch,
}

fn jl_config() -> BranchConfig {
    BranchConfig {
        a_max: 1e7,
        a_min_ratio: 1e-8,
        samples: 60,
        ..BranchConfig::default()
    }
}

fn criterion_1(store: &mut Option<Branch>) -> Outcome {
    let t = Instant::now();
    let grid = RadialGrid::default_geometric();
    let b = solve_branch(&Nonlinearity::Exp, dim(10), &grid, &BranchConfig::default()).map_err(|e| e.to_string())?;
    let ls = b.lambda_star_estimate;
    ensure((15.8..=16.0).contains(&ls), format!("lambda* = {ls}"))?;
    let e = extremal_profile(&b).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (&r, &u) in e.profile.nodes().iter().zip(e.profile.values()) {
        if (1e-3..1.0).contains(&r) {
            let exact = -2.0 * r.ln();
            worst = worst.max((u - exact).abs() / exact);
        }
    }
    ensure(worst < 0.02, format!("extremal rel. error {worst:.3e} vs 2|log r|"))?;
    within(t, Duration::from_secs(60))?;
    *store = Some(b);
    Ok(format!(
        "lambda* = {ls:.9}, extremal rel. error {worst:.2e} on [1e-3,1], {:.1?}",
        t.elapsed()
    ))
}

fn criterion_2(store: &mut Option<Branch>) -> Outcome {
    let t = Instant::now();
    let d = dim(16);
    let p = d.joseph_lundgren().unwrap();
    let beta = 2.0 / (p - 1.0);
    let lambda = beta * (14.0 - beta);
    let f = Nonlinearity::power(p).unwrap();
    let grid = RadialGrid::default_geometric();
    let u = power_profile(grid, beta).map_err(|e| e.to_string())?;
    let res = ode_residual(&u, d, &f, lambda, DerivativeSource::Stored).map_err(|e| e.to_string())?;
    ensure(res.max < 1e-6, format!("ODE residual {:e}", res.max))?;
    let op = LinearizedOperator::from_solution(&u, &f, lambda, d).map_err(|e| e.to_string())?;
    let mu = first_eigenvalue(&op, &EigenConfig::default()).map_err(|e| e.to_string())?.first_eigenvalue;
    ensure(mu >= -1e-6, format!("mu1 = {mu:e}"))?;
    let mut ctx = CheckContext::default().with_g_flags(f.flags());
    ctx.extremal_low_confidence = Some(false);
    let reports = check_thm_extremal(&u, d, &ctx).map_err(|e| e.to_string())?;
    let iii = reports.iter().find(|r| r.item.as_deref() == Some("iii")).ok_or("item iii missing")?;
    let ratio = iii.quantities["ratio_at_r_min"];
    ensure((0.9..=1.1).contains(&ratio), format!("u/(r^e - 1) at r_min = {ratio}"))?;
    within(t, Duration::from_secs(30))?;
    let elapsed = t.elapsed();
    // the sampled branch feeds criterion 8
    let b = solve_branch(&f, d, &RadialGrid::default_geometric(), &jl_config()).map_err(|e| e.to_string())?;
    *store = Some(b);
    Ok(format!(
        "residual {:.1e}, mu1 = {mu:.4}, u/(r^e-1) at r_min = {ratio:.6}, {elapsed:.1?}",
        res.max
    ))
}

fn laplacian_mu(n: u32, nodes: usize) -> Result<f64, String> {
    let grid = RadialGrid::geometric(nodes, 1e-6).map_err(|e| e.to_string())?;
    let op = LinearizedOperator::from_fn(grid, dim(n), |_| 0.0).map_err(|e| e.to_string())?;
    Ok(first_eigenvalue(&op, &EigenConfig::default()).map_err(|e| e.to_string())?.first_eigenvalue)
}

fn criterion_3() -> Outcome {
    let pi2 = std::f64::consts::PI.powi(2);
    // first zero of J0
    let j0 = 2.404_825_557_695_773_f64;
    let mut out = Vec::new();
    for (n, exact) in [(3u32, pi2), (2, j0 * j0)] {
        let errs: Vec<f64> = [1000, 2000, 4000]
            .iter()
            .map(|&m| laplacian_mu(n, m).map(|mu| (mu - exact).abs() / exact))
            .collect::<Result<_, _>>()?;
        ensure(errs[2] < 1e-3, format!("N = {n}: rel. error {:.2e} at 4000 nodes", errs[2]))?;
        let order = (errs[1] / errs[2]).log2();
        ensure(order >= 1.9, format!("N = {n}: observed order {order:.3}"))?;
        out.push(format!("N={n} err {:.1e} order {order:.2}", errs[2]));
    }
    Ok(out.join("; "))
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut out = Vec::new();
    for n in [9u32, 10, 11, 12] {
        let c = 2.0 * (n as f64 - 2.0);
        let op = LinearizedOperator::from_fn(RadialGrid::default_geometric(), dim(n), |r| c / (r * r))
            .map_err(|e| e.to_string())?;
        let mu = first_eigenvalue(&op, &EigenConfig::default()).map_err(|e| e.to_string())?.first_eigenvalue;
        if n == 9 {
            ensure(mu < -1e-2, format!("N = 9: mu1 = {mu:e}"))?;
        } else {
            ensure(mu >= -1e-4, format!("N = {n}: mu1 = {mu:e}"))?;
        }
        out.push(format!("N={n} mu1 {mu:.3e}"));
    }
    within(t, Duration::from_secs(20))?;
    Ok(out.join("; "))
}

fn criterion_5() -> Outcome {
    let grid = RadialGrid::default_geometric();
    let d12 = dim(12);
    let beta = 2.0 / (dim(16).joseph_lundgren().unwrap() - 1.0);
    let family = FamilySpec::new(d12, Seed::zero()).map_err(|e| e.to_string())?;
    let inputs: Vec<(&str, Dimension, RadialProfile)> = vec![
        ("N=10 log", dim(10), log_profile(grid.clone(), 2.0).map_err(|e| e.to_string())?),
        ("N=16 power", dim(16), power_profile(grid.clone(), beta).map_err(|e| e.to_string())?),
        ("N=12 family h=0", d12, build_family(&family, &grid).map_err(|e| e.to_string())?),
    ];
    let mut out = Vec::new();
    for (name, d, u) in inputs {
        let ctx = CheckContext::spectral(&u, d).map_err(|e| e.to_string())?;
        let rep = check_lemma_essential(&u, d, &ctx).map_err(|e| e.to_string())?;
        ensure(rep.empirical_constant.is_finite(), format!("{name}: K not finite"))?;
        let window: Vec<f64> = rep
            .trace
            .iter()
            .filter(|p| (1e-4..=0.5).contains(&p.r))
            .map(|p| p.ratio)
            .collect();
        let (lo, hi) = window
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        let spread = hi / lo - 1.0;
        ensure(spread <= 0.05, format!("{name}: ratio varies by {spread:.3e} on [1e-4, 1/2]"))?;
        let change = rep.quantities["refinement_rel_change"];
        ensure(change < 0.01, format!("{name}: grid doubling changes K by {change:.3e}"))?;
        out.push(format!("{name}: K {:.5} spread {spread:.1e} doubling {change:.1e}", rep.empirical_constant));
    }
    Ok(out.join("; "))
}

fn random_seed(rng: &mut ChaCha8Rng) -> Seed {
    let mut seed = Seed::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let centre: f64 = rng.gen_range(0.05..0.9);
        let room = centre.min(1.0 - centre);
        seed = seed.with(Term::Bump {
            centre,
            half_width: rng.gen_range(0.1..0.9) * room,
            height: rng.gen_range(0.1..5.0),
        });
    }
    seed
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let grid = RadialGrid::default_geometric();
    let mut worst = [0.0f64; 3];
    for case in 0..20 {
        let d = dim(rng.gen_range(10..=20));
        let spec = FamilySpec::new(d, random_seed(&mut rng)).map_err(|e| e.to_string())?;
        let tag = format!("case {case} (N = {}, h = {:?})", d.get(), spec.h.terms);
        let u = build_family(&spec, &grid).map_err(|e| format!("{tag}: {e}"))?;
        let res = construction_residual(&spec, &u).map_err(|e| e.to_string())?;
        ensure(res < 1e-8, format!("{tag}: construction residual {res:e}"))?;
        let low = slope_lower_bound_violation(&spec, &u).map_err(|e| e.to_string())?;
        ensure(low.is_none(), format!("{tag}: slope lower bound fails at {low:?}"))?;
        let (h1, _, rel) = h1_halving(&spec, &grid).map_err(|e| e.to_string())?;
        ensure(h1.is_finite() && rel < 1e-3, format!("{tag}: H1 norm {h1}, change {rel:e} on halving r_min"))?;
        let cfg = FamilyCheckConfig {
            seed: case,
            ..FamilyCheckConfig::default()
        };
        let v = verify_family_semistability(&spec, &u, &cfg).map_err(|e| format!("{tag}: {e}"))?;
        ensure(v.semistable, format!("{tag}: not semi-stable, mu1 = {:e} (tol {:e}), {:?}", v.first_eigenvalue, v.tolerance, v.flags))?;
        let g = recover_g(&u, d).map_err(|e| e.to_string())?;
        let trip = round_trip(&u, d, &g.nonlinearity().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(trip.max_rel_error < 1e-4, format!("{tag}: round trip {:e}", trip.max_rel_error))?;
        worst[0] = worst[0].max(res);
        worst[1] = worst[1].max(rel);
        worst[2] = worst[2].max(trip.max_rel_error);
    }
    Ok(format!(
        "20 seeds: residual <= {:.1e}, H1 halving <= {:.1e}, round trip <= {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn criterion_7() -> Outcome {
    let d = dim(10);
    let grid = RadialGrid::geometric(RadialGrid::DEFAULT_NODES, 2f64.powi(-22)).unwrap();
    let mut out = Vec::new();
    type Build = fn(Dimension, &CounterexampleTarget, &RadialGrid) -> semistable::Result<Counterexample>;
    let builds: [(u8, Build); 3] = [(1, counterexample_first), (2, counterexample_second), (3, counterexample_third)];
    for (k, build) in builds {
        let t = Instant::now();
        let target = CounterexampleTarget::geometric(0.5, 20, |n| n as f64, k).unwrap();
        let cx = build(d, &target, &grid).map_err(|e| format!("k = {k}: {e}"))?;
        let short: Vec<usize> = cx.checks.iter().filter(|c| !c.met).map(|c| c.n).collect();
        ensure(cx.all_met, format!("k = {k}: targets missed at n = {short:?}"))?;
        let v = verify_family_semistability(&cx.spec, &cx.profile, &FamilyCheckConfig::default())
            .map_err(|e| format!("k = {k}: {e}"))?;
        ensure(v.semistable, format!("k = {k}: not semi-stable"))?;
        let mut line = format!("k={k} 20/20");
        if k >= 2 {
            let g = recover_g(&cx.profile, d).map_err(|e| e.to_string())?.min_g();
            ensure(g >= 0.0, format!("k = {k}: min g = {g:e}"))?;
            line += &format!(" min g {g:.2e}");
        }
        if k == 3 {
            let m = cx.min_r2_gprime.ok_or("k = 3: r^2 g' not reported")?;
            ensure(m > 0.0, format!("k = 3: min r^2 g'(u) = {m:e}"))?;
            line += &format!(" min r2g' {m:.2e}");
        }
        within(t, Duration::from_secs(120)).map_err(|e| format!("k = {k}: {e}"))?;
        out.push(format!("{line} ({:.1?})", t.elapsed()));
    }
    Ok(out.join("; "))
}

fn criterion_8(b: &Branches) -> Outcome {
    let mut checked = 0;
    for (branch, f) in [(&b.exp10, Nonlinearity::Exp), (&b.jl16, b.jl16.nonlinearity.clone())] {
        let d = branch.dimension;
        let ctx = CheckContext {
            g_flags: Some(f.flags()),
            skip_refinement: true,
            ..CheckContext::default()
        };
        for p in &branch.points {
            let rep = check_monotonias(&p.profile, d, &ctx).map_err(|e| e.to_string())?;
            let q = &rep.quantities;
            let tag = format!("N = {}, a = {:e}", d.get(), p.a);
            ensure(q["violations_i"] == 0.0, format!("{tag}: r^(N-1)|u_r| decreases ({} nodes)", q["violations_i"]))?;
            ensure(q["violations_ii"] == 0.0, format!("{tag}: |u_r|/r increases ({} nodes)", q["violations_ii"]))?;
            ensure(
                q["max_over_min_annulus"] <= q["bound_iii"],
                format!("{tag}: max/min {} > {}", q["max_over_min_annulus"], q["bound_iii"]),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} branch profiles (N=10 exp, N=16 Joseph-Lundgren)"))
}

fn extremal_constants(f: Nonlinearity, n: u32, scale: f64) -> Result<Vec<(String, f64)>, String> {
    let cfg = BranchConfig {
        a_max: 20.0 * scale,
        compute_eigenvalues: false,
        ..BranchConfig::default()
    };
    let f = if scale == 1.0 { f } else { f.scaled(scale).map_err(|e| e.to_string())? };
    let b = solve_branch(&f, dim(n), &RadialGrid::default_geometric(), &cfg).map_err(|e| e.to_string())?;
    let e = extremal_profile(&b).map_err(|e| e.to_string())?;
    let mut ctx = CheckContext::default().with_g_flags(f.flags());
    ctx.extremal_low_confidence = Some(e.low_confidence);
    ctx.skip_refinement = true;
    let reports = check_thm_extremal(&e.profile, dim(n), &ctx).map_err(|e| e.to_string())?;
    Ok(reports.into_iter().map(|r| (r.label(), r.empirical_constant)).collect())
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [3u32, 10] {
        let base = extremal_constants(Nonlinearity::Exp, n, 1.0)?;
        for m in [0.1, 10.0] {
            let scaled = extremal_constants(Nonlinearity::Exp, n, m)?;
            for ((label, c0), (_, c1)) in base.iter().zip(&scaled) {
                let rel = (c1 - c0).abs() / c0.abs();
                ensure(rel < 1e-3, format!("N = {n}, M = {m}: {label} {c0} -> {c1}"))?;
                worst = worst.max(rel);
                count += 1;
            }
        }
    }
    Ok(format!("{count} constants, max rel. change {worst:.1e}"))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut exp10 = None;
    let mut jl16 = None;
    results.push(("C1 Gelfand N=10 threshold and extremal profile", criterion_1(&mut exp10)));
    results.push(("C2 Joseph-Lundgren N=16 explicit extremal", criterion_2(&mut jl16)));
    results.push(("C3 eigenvalue calibration and order", criterion_3()));
    results.push(("C4 Hardy threshold", criterion_4()));
    results.push(("C5 weighted energy ratio flat and grid-stable", criterion_5()));
    results.push(("C6 randomized family members", criterion_6()));
    results.push(("C7 derivative counterexamples", criterion_7()));
    let c8 = match (exp10, jl16) {
        (Some(exp10), Some(jl16)) => criterion_8(&Branches { exp10, jl16 }),
        _ => Err("branches from C1/C2 unavailable".into()),
    };
    results.push(("C8 monotonicity laws on branch profiles", c8));
    results.push(("C9 scaling invariance of extremal constants", criterion_9()));

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
