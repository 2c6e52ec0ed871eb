use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use semistable::branch::{extremal_profile, ode_residual, solve_branch, BranchConfig, DerivativeSource, Extremal};
use semistable::estimates::{
    check_lemma_essential, check_monotonias, check_rand2r, check_thm_estimas, check_thm_extremal,
    check_thm_principal, CheckContext, EstimateReport, GridMeta, TheoremId,
};
use semistable::family::{
    build_family, construction_residual, counterexample_first, counterexample_second, counterexample_third,
    h1_halving, recover_g, round_trip, slope_lower_bound_violation, verify_family_semistability, Counterexample,
    CounterexampleTarget, FamilyCheckConfig, FamilySpec, Seed, Term,
};
use semistable::radial::{Dimension, Nonlinearity, RadialGrid, RadialProfile, Table};
use semistable::report::{ReportEntry, VerificationReport};
use semistable::stability::{first_eigenvalue, EigenConfig, LinearizedOperator, StabilityVerdict};
use semistable::Execution;

use crate::args::{Cli, Command, Format, Global, Grading, Ladder};
use crate::output::Sink;
use crate::Usage;

/// Thresholds for the family checks.
const CONSTRUCTION_TOL: f64 = 1e-8;
const H1_HALVING_TOL: f64 = 1e-3;
const ROUND_TRIP_TOL: f64 = 1e-4;

struct Run<'a> {
    g: &'a Global,
    dim: Dimension,
    sink: Sink,
    config: Value,
}

/// Runs the command; `Ok(true)` when every asserted check passes.
pub fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    for (name, v) in [
        ("--tol-ode", g.tol_ode),
        ("--tol-bisection", g.tol_bisection),
        ("--tol-eigen", g.tol_eigen),
        ("--tol-assert", g.tol_assert),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Usage(format!("{name} must be positive, got {v}")).into());
        }
    }
    let dim = Dimension::new(g.dim)?;
    let run = Run {
        g,
        dim,
        sink: Sink::new(g.out.clone(), g.format)?,
        config: serde_json::to_value(cli)?,
    };
    match &cli.command {
        Command::Branch { ladder } => run.branch(ladder),
        Command::Extremal { ladder } => run.extremal(ladder),
        Command::Verify {
            profile,
            theorem,
            g: gdesc,
            ladder,
        } => run.verify(profile.as_deref(), theorem, gdesc.as_deref(), ladder),
        Command::Family {
            h: _,
            counterexample: Some(k),
            radii,
            magnitudes,
            count,
            form_tests,
        } => run.counterexample(k, radii, magnitudes, *count, *form_tests),
        Command::Family { h, form_tests, .. } => run.family(h, *form_tests),
        Command::Hardy { coefficient } => run.hardy(*coefficient),
        Command::Stability { profile, lambda } => run.stability(profile, *lambda),
    }
}

pub fn parse_nonlinearity(desc: &str, dim: Dimension) -> Result<Nonlinearity> {
    let (head, rest) = desc.split_once(':').unwrap_or((desc, ""));
    Ok(match head {
        "exp" if rest.is_empty() => Nonlinearity::Exp,
        "power" if rest == "jl" => Nonlinearity::power(dim.joseph_lundgren().ok_or_else(|| {
            Usage(format!("power:jl needs N > 10, got N = {}", dim.get()))
        })?)?,
        "power" => Nonlinearity::power(parse_f64(rest, "power exponent")?)?,
        "table" if !rest.is_empty() => {
            let file = File::open(rest).with_context(|| format!("opening nonlinearity table {rest}"))?;
            Nonlinearity::Table(Table::read_csv(file)?)
        }
        _ => return Err(Usage(format!("unknown nonlinearity '{desc}' (exp | power:<p> | power:jl | table:<path>)")).into()),
    })
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Usage(format!("bad {what} '{s}'")).into())
}

/// `zero`, or `+`-joined `power:c:q` and `bump:centre:halfwidth:height` terms.
pub fn parse_seed(desc: &str) -> Result<Seed> {
    if desc.trim() == "zero" {
        return Ok(Seed::zero());
    }
    let mut seed = Seed::zero();
    for part in desc.split('+') {
        let fields: Vec<&str> = part.trim().split(':').collect();
        let num = |i: usize| parse_f64(fields[i], "seed parameter");
        let term = match (fields[0], fields.len()) {
            ("power", 3) => Term::Power {
                coeff: num(1)?,
                exponent: num(2)?,
            },
            ("bump", 4) => Term::Bump {
                centre: num(1)?,
                half_width: num(2)?,
                height: num(3)?,
            },
            _ => return Err(Usage(format!("bad seed term '{part}' (power:c:q | bump:centre:halfwidth:height)")).into()),
        };
        seed = seed.with(term);
    }
    seed.validate()?;
    Ok(seed)
}

fn parse_target(k: &str, radii: &str, magnitudes: &str, count: usize, dim: Dimension) -> Result<CounterexampleTarget> {
    let order: u8 = k
        .trim()
        .strip_prefix("k=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Usage(format!("bad counterexample order '{k}' (k=1 | k=2 | k=3)")))?;
    let ratio = match radii.split_once(':') {
        None if radii == "dyadic" => 0.5,
        None if radii == "triadic" => 1.0 / 3.0,
        Some(("geometric", q)) => parse_f64(q, "radius ratio")?,
        _ => return Err(Usage(format!("bad radii '{radii}' (dyadic | triadic | geometric:<ratio>)")).into()),
    };
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Usage(format!("radius ratio {ratio} must lie in (0, 1)")).into());
    }
    let magnitude: Box<dyn Fn(usize) -> f64> = match magnitudes.split_once(':') {
        None if magnitudes == "linear" => Box::new(|n| n as f64),
        None if magnitudes == "factorial" => Box::new(|n| (1..=n).map(|i| i as f64).product()),
        None if magnitudes == "pow10" => Box::new(|n| 10f64.powi(n as i32)),
        // n times the rate r^{e-k} of the pointwise bound for the k-th derivative
        None if magnitudes == "escape" => {
            let rate = dim.singular_exponent() - order as f64;
            Box::new(move |n| n as f64 * ratio.powi(n as i32).powf(rate))
        }
        Some(("const", m)) => {
            let m = parse_f64(m, "magnitude")?;
            Box::new(move |_| m)
        }
        _ => return Err(Usage(format!("bad magnitudes '{magnitudes}' (linear | factorial | pow10 | escape | const:<M>)")).into()),
    };
    Ok(CounterexampleTarget::geometric(ratio, count, magnitude, order)?)
}

fn check(name: &str, passed: bool, value: f64, threshold: f64, detail: impl Into<String>) -> ReportEntry {
    ReportEntry::Check {
        check: name.into(),
        passed,
        value,
        threshold,
        detail: detail.into(),
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

impl Run<'_> {
    fn execution(&self) -> Execution {
        if self.g.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    fn eigen(&self) -> EigenConfig {
        EigenConfig {
            tol: self.g.tol_eigen,
            ..EigenConfig::default()
        }
    }

    fn grid_with_rmin(&self, r_min: f64) -> Result<RadialGrid> {
        Ok(match self.g.grading {
            Grading::Geometric => RadialGrid::geometric(self.g.grid_nodes, r_min)?,
            Grading::Uniform => RadialGrid::uniform(self.g.grid_nodes, r_min)?,
        })
    }

    fn grid(&self) -> Result<RadialGrid> {
        self.grid_with_rmin(self.g.grid_rmin)
    }

    fn nonlinearity(&self) -> Result<Nonlinearity> {
        parse_nonlinearity(&self.g.nonlinearity, self.dim)
    }

    fn branch_config(&self, ladder: &Ladder) -> BranchConfig {
        let mut cfg = BranchConfig {
            a_max: ladder.a_max,
            samples: ladder.samples,
            a_min_ratio: ladder.a_min_ratio,
            lambda_rtol: self.g.tol_bisection,
            eigen: self.eigen(),
            compute_eigenvalues: false,
            execution: self.execution(),
            ..BranchConfig::default()
        };
        cfg.shoot.rtol = self.g.tol_ode;
        cfg
    }

    fn finish(&self, entries: Vec<ReportEntry>, grid: &RadialGrid) -> Result<bool> {
        let report = VerificationReport::new(
            self.config.clone(),
            entries,
            self.g.seed,
            GridMeta {
                nodes: grid.len(),
                r_min: grid.r_min(),
            },
        );
        let path = self.sink.json("report.json", &report)?;
        for e in report.entries.iter().filter(|e| e.failed()) {
            match e {
                ReportEntry::Check { check, detail, .. } => eprintln!("check failed: {check}: {detail}"),
                ReportEntry::Stability { check, verdict, .. } => {
                    eprintln!("check failed: {check}: mu1 = {:e}", verdict.first_eigenvalue)
                }
                ReportEntry::Estimate(r) => eprintln!("check failed: {}", r.label()),
            }
        }
        say!("{} (report: {})", status(report.overall_pass), path.display());
        Ok(report.overall_pass)
    }

    fn write_profile(&self, rel: &str, u: &RadialProfile) -> Result<()> {
        self.sink.write_with(rel, |buf| Ok(u.write_csv(buf)?))?;
        Ok(())
    }

    fn solution_verdict(&self, u: &RadialProfile, f: &Nonlinearity, lambda: f64) -> Result<StabilityVerdict> {
        let op = LinearizedOperator::from_solution(u, f, lambda, self.dim)?;
        Ok(first_eigenvalue(&op, &self.eigen())?)
    }

    fn residual_check(&self, u: &RadialProfile, f: &Nonlinearity, lambda: f64, name: &str) -> Result<ReportEntry> {
        let res = ode_residual(u, self.dim, f, lambda, DerivativeSource::Stored)?;
        Ok(check(
            name,
            res.max < self.g.tol_assert,
            res.max,
            self.g.tol_assert,
            format!("weighted max ODE residual at r = {:e}", res.at),
        ))
    }

    fn branch(&self, ladder: &Ladder) -> Result<bool> {
        let f = self.nonlinearity()?;
        let grid = self.grid()?;
        let cfg = self.branch_config(ladder);
        let mut branch = solve_branch(&f, self.dim, &grid, &cfg)?;
        // μ₁ vanishes at the fold itself, so only points strictly before it are asserted
        let fold = branch.turning_point.map_or(f64::INFINITY, |t| t.a);
        let verdicts = cfg
            .execution
            .map(&branch.points, |p| self.solution_verdict(&p.profile, &f, p.lambda));

        let mut entries = Vec::new();
        let (mut worst_res, mut worst_res_at) = (0.0f64, 0.0);
        let mut worst_boundary = 0.0f64;
        let (mut min_mu, mut unstable_minimal) = (f64::INFINITY, Vec::new());
        for (i, (p, v)) in branch.points.iter_mut().zip(verdicts).enumerate() {
            let v = v?;
            p.first_eigenvalue = Some(v.first_eigenvalue);
            let rel = format!("profiles/point_{i:03}.csv");
            self.write_profile(&rel, &p.profile)?;
            p.profile_ref = Some(rel);
            let res = ode_residual(&p.profile, self.dim, &f, p.lambda, DerivativeSource::Stored)?;
            if res.max > worst_res {
                (worst_res, worst_res_at) = (res.max, p.a);
            }
            worst_boundary = worst_boundary.max(p.boundary_residual.abs() / p.a.max(1.0));
            if p.minimal && p.a < fold {
                min_mu = min_mu.min(v.first_eigenvalue);
                if !v.semistable {
                    unstable_minimal.push(p.a);
                }
            }
        }
        entries.push(check(
            "ode_residual",
            worst_res < self.g.tol_assert,
            worst_res,
            self.g.tol_assert,
            format!("largest weighted residual over the branch, at a = {worst_res_at:e}"),
        ));
        entries.push(check(
            "boundary_value",
            worst_boundary < self.g.tol_assert,
            worst_boundary,
            self.g.tol_assert,
            "max |u(1)| / max(1, a)",
        ));
        entries.push(check(
            "minimal_branch_semistable",
            unstable_minimal.is_empty(),
            min_mu,
            0.0,
            if unstable_minimal.is_empty() {
                "every minimal-branch point before the fold is semi-stable".to_string()
            } else {
                format!("not semi-stable at a = {unstable_minimal:?}")
            },
        ));

        match self.sink.format {
            Format::Json => {
                self.sink.json("branch.json", &branch)?;
            }
            Format::Csv => {
                self.sink.write_with("branch.csv", |buf| {
                    let mut w = csv::Writer::from_writer(buf);
                    w.write_record(["a", "lambda", "eigenvalue", "minimal", "boundary_residual", "profile_ref"])?;
                    for p in &branch.points {
                        w.write_record([
                            p.a.to_string(),
                            p.lambda.to_string(),
                            p.first_eigenvalue.map(|m| m.to_string()).unwrap_or_default(),
                            p.minimal.to_string(),
                            p.boundary_residual.to_string(),
                            p.profile_ref.clone().unwrap_or_default(),
                        ])?;
                    }
                    w.flush()?;
                    Ok(())
                })?;
            }
        }
        say!(
            "branch: N = {}, {} points, lambda_star_estimate = {}, turning_detected = {}",
            self.dim.get(),
            branch.points.len(),
            branch.lambda_star_estimate,
            branch.turning_detected
        );
        self.finish(entries, &grid)
    }

    fn solve_extremal(&self, f: &Nonlinearity, ladder: &Ladder) -> Result<(Extremal, RadialGrid, Value)> {
        let grid = self.grid()?;
        let branch = solve_branch(f, self.dim, &grid, &self.branch_config(ladder))?;
        let e = extremal_profile(&branch)?;
        let meta = json!({
            "a": e.a,
            "lambda": e.lambda,
            "gap": e.gap,
            "low_confidence": e.low_confidence,
            "lambda_star_estimate": branch.lambda_star_estimate,
            "lambda_star_interval": branch.lambda_star_interval,
            "turning_detected": branch.turning_detected,
        });
        Ok((e, grid, meta))
    }

    fn extremal(&self, ladder: &Ladder) -> Result<bool> {
        let f = self.nonlinearity()?;
        let (e, grid, mut meta) = self.solve_extremal(&f, ladder)?;
        let verdict = self.solution_verdict(&e.profile, &f, e.lambda)?;
        self.write_profile("extremal.csv", &e.profile)?;
        let entries = vec![
            self.residual_check(&e.profile, &f, e.lambda, "ode_residual")?,
            ReportEntry::Stability {
                check: "extremal_semistable".into(),
                verdict: verdict.clone(),
                hypotheses: Vec::new(),
            },
        ];
        meta["verdict"] = serde_json::to_value(&verdict)?;
        meta["profile"] = json!("extremal.csv");
        self.sink.summary("extremal", &meta)?;
        say!(
            "extremal: a = {}, lambda = {}, mu1 = {:e}, low_confidence = {}",
            e.a, e.lambda, verdict.first_eigenvalue, e.low_confidence
        );
        self.finish(entries, &grid)
    }

    fn verify(&self, profile: Option<&Path>, theorem: &str, gdesc: Option<&str>, ladder: &Ladder) -> Result<bool> {
        let selected: Vec<TheoremId> = if theorem == "all" {
            TheoremId::ALL.to_vec()
        } else {
            vec![theorem.parse().map_err(|e: semistable::Error| Usage(e.to_string()))?]
        };
        let (u, mut ctx) = match profile {
            Some(path) => {
                let file = File::open(path).with_context(|| format!("opening profile {}", path.display()))?;
                let u = RadialProfile::read_csv(file)?;
                let ctx = CheckContext::spectral(&u, self.dim).unwrap_or_else(|e| {
                    eprintln!("note: no spectral verdict for this profile ({e}); semi-stability left unchecked");
                    CheckContext::default()
                });
                (u, ctx)
            }
            None => {
                let f = self.nonlinearity()?;
                let (e, _, _) = self.solve_extremal(&f, ladder)?;
                self.write_profile("extremal.csv", &e.profile)?;
                let verdict = self.solution_verdict(&e.profile, &f, e.lambda)?;
                let mut ctx = CheckContext::default().with_verdict(verdict).with_g_flags(f.flags());
                ctx.extremal_low_confidence = Some(e.low_confidence);
                (e.profile, ctx)
            }
        };
        match gdesc {
            Some("recovered") => ctx = ctx.with_g_flags(recover_g(&u, self.dim)?.nonlinearity()?.flags()),
            Some(desc) => ctx = ctx.with_g_flags(parse_nonlinearity(desc, self.dim)?.flags()),
            None => {}
        }

        let mut reports: Vec<EstimateReport> = Vec::new();
        for id in selected {
            match id {
                TheoremId::LemmaEssential => reports.push(check_lemma_essential(&u, self.dim, &ctx)?),
                TheoremId::PropRand2r => reports.push(check_rand2r(&u, self.dim, &ctx)?),
                TheoremId::ThmPrincipal => reports.push(check_thm_principal(&u, self.dim, &ctx)?),
                TheoremId::ThmExtremal => reports.extend(check_thm_extremal(&u, self.dim, &ctx)?),
                TheoremId::ThmEstimas => reports.extend(check_thm_estimas(&u, self.dim, &ctx)?),
                TheoremId::LemmaMonotonias => reports.push(check_monotonias(&u, self.dim, &ctx)?),
            }
        }
        let mut summary = Vec::new();
        for r in &reports {
            let rel = format!("traces/{}.csv", r.label());
            self.sink.write_with(&rel, |buf| Ok(r.write_trace_csv(buf)?))?;
            summary.push(json!({
                "label": r.label(),
                "outcome": r.outcome,
                "empirical_constant": r.empirical_constant,
                "holds_uniformly": r.holds_uniformly,
                "trace": rel,
            }));
            say!(
                "{:<28} {:?} C = {:e} uniform = {}",
                r.label(),
                r.outcome,
                r.empirical_constant,
                r.holds_uniformly
            );
        }
        self.sink.summary("verify", &Value::Array(summary))?;
        let grid = u.grid().clone();
        self.finish(reports.into_iter().map(ReportEntry::Estimate).collect(), &grid)
    }

    fn family_config(&self, form_tests: usize) -> FamilyCheckConfig {
        FamilyCheckConfig {
            form_tests,
            seed: self.g.seed,
            eigen: self.eigen(),
            execution: self.execution(),
        }
    }

    fn family(&self, h: &str, form_tests: usize) -> Result<bool> {
        let spec = FamilySpec::new(self.dim, parse_seed(h)?)?;
        let grid = self.grid()?;
        let u = build_family(&spec, &grid)?;
        let residual = construction_residual(&spec, &u)?;
        let lower = slope_lower_bound_violation(&spec, &u)?;
        let (h1, h1_fine, h1_rel) = h1_halving(&spec, &grid)?;
        let verdict = verify_family_semistability(&spec, &u, &self.family_config(form_tests))?;
        let g = recover_g(&u, self.dim)?;
        let trip = round_trip(&u, self.dim, &g.nonlinearity()?)?;

        self.sink.json("spec.json", &spec)?;
        self.write_profile("profile.csv", &u)?;
        self.sink.write_with("g.csv", |buf| Ok(g.write_table_csv(buf)?))?;
        let entries = vec![
            check(
                "construction_identity",
                residual < CONSTRUCTION_TOL,
                residual,
                CONSTRUCTION_TOL,
                "max relative residual of (N-1) r^(N-3) u_r^2 = Φ'",
            ),
            check(
                "slope_lower_bound",
                lower.is_none(),
                lower.unwrap_or(0.0),
                0.0,
                match lower {
                    Some(r) => format!("|u_r| below the bound at r = {r:e}"),
                    None => "holds at every node".into(),
                },
            ),
            check(
                "h1_norm_halving",
                h1_rel < H1_HALVING_TOL && h1.is_finite(),
                h1_rel,
                H1_HALVING_TOL,
                format!("H1 norm {h1} vs {h1_fine} with r_min halved"),
            ),
            ReportEntry::Stability {
                check: "family_semistable".into(),
                verdict: verdict.clone(),
                hypotheses: Vec::new(),
            },
            check(
                "round_trip",
                trip.max_rel_error < ROUND_TRIP_TOL,
                trip.max_rel_error,
                ROUND_TRIP_TOL,
                format!("shooting with the recovered g, worst at r = {:e}", trip.at),
            ),
        ];
        let summary = json!({
            "spec": spec,
            "h": spec.h.describe(),
            "u_at_r_min": u.values()[0],
            "construction_residual": residual,
            "h1_norm": h1,
            "h1_rel_change": h1_rel,
            "min_g": g.min_g(),
            "round_trip": trip,
            "semistable": verdict.semistable,
            "verdict": verdict,
            "profile": "profile.csv",
            "g_table": "g.csv",
        });
        self.sink.summary("family", &summary)?;
        say!(
            "family: N = {}, h = {}, semistable = {}, u(r_min) = {}",
            self.dim.get(),
            spec.h.describe(),
            verdict.semistable,
            u.values()[0]
        );
        self.finish(entries, &grid)
    }

    fn counterexample(&self, k: &str, radii: &str, magnitudes: &str, count: usize, form_tests: usize) -> Result<bool> {
        let target = parse_target(k, radii, magnitudes, count, self.dim)?;
        let last = *target.radii.last().expect("nonempty target");
        // the target radii must sit strictly inside the grid
        let r_min = self.g.grid_rmin.min(last / 4.0);
        let grid = self.grid_with_rmin(r_min)?;
        let build = match target.derivative_order {
            1 => counterexample_first,
            2 => counterexample_second,
            3 => counterexample_third,
            o => bail!(Usage(format!("derivative order {o} not in 1..=3"))),
        };
        let cx: Counterexample = build(self.dim, &target, &grid)?;
        let verdict = verify_family_semistability(&cx.spec, &cx.profile, &self.family_config(form_tests))?;
        let g = recover_g(&cx.profile, self.dim)?;
        self.write_profile("profile.csv", &cx.profile)?;
        self.sink.write_with("g.csv", |buf| Ok(g.write_table_csv(buf)?))?;
        self.sink.json("spec.json", &cx.spec)?;

        let short = cx.checks.iter().filter(|c| !c.met).count();
        let mut entries = vec![check(
            "targets_met",
            cx.all_met,
            short as f64,
            0.0,
            format!("{} of {} targets met", cx.checks.len() - short, cx.checks.len()),
        )];
        if let Some(m) = cx.min_g {
            entries.push(check("g_nonnegative", m >= 0.0, m, 0.0, "min of the recovered g"));
        }
        if let Some(m) = cx.min_r2_gprime {
            entries.push(check("r2_gprime_positive", m > 0.0, m, 0.0, "min over nodes of r^2 g'(u)"));
        }
        entries.push(ReportEntry::Stability {
            check: "family_semistable".into(),
            verdict: verdict.clone(),
            hypotheses: Vec::new(),
        });
        let mut summary = serde_json::to_value(&cx)?;
        summary["semistable"] = json!(verdict.semistable);
        summary["verdict"] = serde_json::to_value(&verdict)?;
        summary["grid_r_min"] = json!(r_min);
        self.sink.summary("counterexample", &summary)?;
        say!(
            "counterexample k={}: {}/{} targets met, semistable = {}",
            target.derivative_order,
            cx.checks.len() - short,
            cx.checks.len(),
            verdict.semistable
        );
        self.finish(entries, &grid)
    }

    fn hardy(&self, coefficient: Option<f64>) -> Result<bool> {
        let n = self.dim.as_f64();
        let c = coefficient.unwrap_or(2.0 * (n - 2.0));
        let hardy = self.dim.hardy_constant();
        let grid = self.grid()?;
        let op = LinearizedOperator::from_fn(grid.clone(), self.dim, |r| c / (r * r))?;
        let verdict = first_eigenvalue(&op, &self.eigen())?;
        let predicted = c <= hardy;
        let entries = vec![check(
            "hardy_threshold",
            verdict.semistable == predicted,
            verdict.first_eigenvalue,
            -verdict.tolerance,
            format!("c = {c} vs (N-2)^2/4 = {hardy}: semi-stability predicted {predicted}, observed {}", verdict.semistable),
        )];
        let summary = json!({
            "dimension": self.dim.get(),
            "coefficient": c,
            "hardy_constant": hardy,
            "predicted_semistable": predicted,
            "semistable": verdict.semistable,
            "verdict": verdict,
        });
        self.sink.summary("hardy", &summary)?;
        say!(
            "hardy: N = {}, c = {c}, (N-2)^2/4 = {hardy}, mu1 = {:e}",
            self.dim.get(),
            verdict.first_eigenvalue
        );
        self.finish(entries, &grid)
    }

    fn stability(&self, profile: &Path, lambda: Option<f64>) -> Result<bool> {
        let file = File::open(profile).with_context(|| format!("opening profile {}", profile.display()))?;
        let u = RadialProfile::read_csv(file)?;
        let verdict = match lambda {
            Some(l) => self.solution_verdict(&u, &self.nonlinearity()?, l)?,
            None => first_eigenvalue(&LinearizedOperator::from_profile(&u, self.dim)?, &self.eigen())?,
        };
        let summary = json!({
            "dimension": self.dim.get(),
            "semistable": verdict.semistable,
            "verdict": verdict,
        });
        self.sink.summary("stability", &summary)?;
        say!("stability: mu1 = {:e}, semistable = {}", verdict.first_eigenvalue, verdict.semistable);
        let entries = vec![ReportEntry::Stability {
            check: "spectral".into(),
            verdict,
            hypotheses: Vec::new(),
        }];
        let grid = u.grid().clone();
        self.finish(entries, &grid)
    }
}
