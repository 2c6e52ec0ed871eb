use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "semistable", version, about = "Semi-stable radial solutions of -Δu = g(u) in the unit ball")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Space dimension N.
    #[arg(long, global = true, default_value_t = 10)]
    pub dim: u32,
    /// `exp`, `power:<p>`, `power:jl` or `table:<csv with s,f,fprime>`.
    #[arg(long, global = true, default_value = "exp")]
    pub nonlinearity: String,
    #[arg(long, global = true, default_value_t = 2000)]
    pub grid_nodes: usize,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub grid_rmin: f64,
    #[arg(long, global = true, value_enum, default_value_t = Grading::Geometric)]
    pub grading: Grading,
    /// Relative tolerance of the ODE integrator.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol_ode: f64,
    /// Relative width at which the λ bisection stops.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_bisection: f64,
    /// Semi-stability tolerance factor for the first eigenvalue.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_eigen: f64,
    /// Threshold for residual-type checks.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_assert: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[serde(skip)]
    #[arg(long, global = true, env = "SEMISTABLE_OUT", default_value = "semistable-out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Run the data-parallel loops on one thread.
    #[serde(skip)]
    #[arg(long, global = true)]
    pub sequential: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grading {
    Geometric,
    Uniform,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Ladder {
    /// Largest `u(0)` sampled.
    #[arg(long, default_value_t = 20.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 48)]
    pub samples: usize,
    /// Smallest `u(0)` as a fraction of `a_max`.
    #[arg(long, default_value_t = 1e-3)]
    pub a_min_ratio: f64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Sample the branch λ(a) with profiles and first eigenvalues.
    Branch {
        #[command(flatten)]
        ladder: Ladder,
    },
    /// Approximate the extremal solution from the minimal branch.
    Extremal {
        #[command(flatten)]
        ladder: Ladder,
    },
    /// Run the pointwise and energy estimate checks on a profile.
    Verify {
        /// Profile CSV `r,u,u_r,u_rr,u_rrr`; without it the extremal
        /// solution of `--nonlinearity` is computed first.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Theorem id or `all`.
        #[arg(long, default_value = "all")]
        theorem: String,
        /// Nonlinearity whose structural flags stand in for those of `g`,
        /// or `recovered` to read them off `-Δu` of the profile.
        #[arg(long)]
        g: Option<String>,
        #[command(flatten)]
        ladder: Ladder,
    },
    /// Build a member of the semi-stable family, or a counterexample.
    Family {
        /// Seed `h`: `zero` or `+`-joined terms `power:c:q`, `bump:centre:halfwidth:height`.
        #[arg(long, default_value = "zero", conflicts_with = "counterexample")]
        h: String,
        /// `k=1`, `k=2` or `k=3`.
        #[arg(long)]
        counterexample: Option<String>,
        /// `dyadic`, `triadic` or `geometric:<ratio>`.
        #[arg(long, default_value = "dyadic")]
        radii: String,
        /// `linear`, `factorial`, `pow10`, `escape` (n times the bound's rate) or `const:<M>`.
        #[arg(long, default_value = "linear")]
        magnitudes: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Randomized form tests in the semi-stability check.
        #[arg(long, default_value_t = 16)]
        form_tests: usize,
    },
    /// First eigenvalue for the potential `c/r²` against the Hardy constant.
    Hardy {
        /// Defaults to `2(N-2)`, the potential of `u = -2 log r`.
        #[arg(long)]
        coefficient: Option<f64>,
    },
    /// Spectral semi-stability of a profile.
    Stability {
        #[arg(long)]
        profile: PathBuf,
        /// Use `λ f'(u)` with `--nonlinearity` instead of `-Δu` read off the profile.
        #[arg(long)]
        lambda: Option<f64>,
    },
}
