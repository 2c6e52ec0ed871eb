use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::profile::fmt_f64;

/// The nonlinearity `f` of `-Δu = λ f(u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Nonlinearity {
    /// `e^s`
    Exp,
    /// `(1 + s)^p`
    Power { p: f64 },
    /// Cubic Hermite interpolation of sampled `(s, f, f')`.
    Table(Table),
    /// `f(s / factor)` for an inner `f`.
    Scaled {
        inner: Box<Nonlinearity>,
        factor: f64,
    },
}

/// Structural properties of `f`. The standing assumption on `f` is: `C¹`,
/// nondecreasing, convex, `f(0) > 0`, and `f(s)/s → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub nonnegative: bool,
    pub nondecreasing: bool,
    pub convex: bool,
    pub positive_at_zero: bool,
    pub superlinear: bool,
}

impl Flags {
    pub fn standard(&self) -> bool {
        self.nondecreasing && self.convex && self.positive_at_zero && self.superlinear
    }
}

/// A sampled value at which a declared flag was observed to fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlagViolation {
    pub flag: String,
    pub at: f64,
}

impl Nonlinearity {
    pub fn power(p: f64) -> Result<Self> {
        if !(p > 1.0) {
            return Err(Error::InvalidArgument(format!("power exponent p = {p} must exceed 1")));
        }
        Ok(Nonlinearity::Power { p })
    }

    /// `f(·/factor)`; the extremal solution scales by `factor`.
    pub fn scaled(self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor {factor} must be positive")));
        }
        Ok(Nonlinearity::Scaled {
            inner: Box::new(self),
            factor,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Exp => s.exp(),
            Nonlinearity::Power { p } => (1.0 + s).powf(*p),
            Nonlinearity::Table(t) => t.eval(s).0,
            Nonlinearity::Scaled { inner, factor } => inner.eval(s / factor),
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::Exp => s.exp(),
            Nonlinearity::Power { p } => p * (1.0 + s).powf(p - 1.0),
            Nonlinearity::Table(t) => t.eval(s).1,
            Nonlinearity::Scaled { inner, factor } => inner.deriv(s / factor) / factor,
        }
    }

    /// `f` on `[0, ∞)`, continued as its tangent line at 0 for `s < 0`.
    /// Shooting trajectories may overshoot below zero before the sign of
    /// `u(1)` is read off.
    pub fn eval_extended(&self, s: f64) -> f64 {
        if s >= 0.0 {
            self.eval(s)
        } else {
            self.eval(0.0) + self.deriv(0.0) * s
        }
    }

    pub fn deriv_extended(&self, s: f64) -> f64 {
        self.deriv(s.max(0.0))
    }

    pub fn flags(&self) -> Flags {
        match self {
            Nonlinearity::Exp | Nonlinearity::Power { .. } => Flags {
                nonnegative: true,
                nondecreasing: true,
                convex: true,
                positive_at_zero: true,
                superlinear: true,
            },
            Nonlinearity::Table(t) => t.flags(),
            Nonlinearity::Scaled { inner, .. } => inner.flags(),
        }
    }

    /// Checks the declared flags at the sampled arguments `s ≥ 0`.
    pub fn check_flags_at(&self, samples: &[f64]) -> Option<FlagViolation> {
        let flags = self.flags();
        for &s in samples.iter().filter(|&&s| s >= 0.0) {
            let (f, fp) = (self.eval(s), self.deriv(s));
            if flags.nonnegative && f < 0.0 {
                return Some(FlagViolation { flag: "nonnegative".into(), at: s });
            }
            if flags.nondecreasing && fp < 0.0 {
                return Some(FlagViolation { flag: "nondecreasing".into(), at: s });
            }
        }
        None
    }

    pub fn label(&self) -> String {
        match self {
            Nonlinearity::Exp => "exp".into(),
            Nonlinearity::Power { p } => format!("power:{}", fmt_f64(*p)),
            Nonlinearity::Table(t) => format!("table[{}]", t.s.len()),
            Nonlinearity::Scaled { inner, factor } => {
                format!("{}/{}", inner.label(), fmt_f64(*factor))
            }
        }
    }
}

/// Sampled nonlinearity `s ↦ (f(s), f'(s))`, strictly increasing in `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    s: Vec<f64>,
    f: Vec<f64>,
    fprime: Vec<f64>,
}

impl Table {
    pub fn new(s: Vec<f64>, f: Vec<f64>, fprime: Vec<f64>) -> Result<Self> {
        if s.len() < 2 || s.len() != f.len() || s.len() != fprime.len() {
            return Err(Error::InvalidArgument("table needs ≥ 2 rows of equal length".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table abscissae must be strictly increasing".into()));
        }
        if s.iter().chain(&f).chain(&fprime).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("table contains non-finite entries".into()));
        }
        Ok(Self { s, f, fprime })
    }

    /// Reads CSV with header `s,f,fprime`.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if headers != ["s", "f", "fprime"] {
            return Err(Error::InvalidArgument(format!(
                "nonlinearity table header must be s,f,fprime, got {headers:?}"
            )));
        }
        let (mut s, mut f, mut fp) = (Vec::new(), Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let num = |k: usize| -> Result<f64> {
                rec.get(k)
                    .unwrap_or("")
                    .trim()
                    .parse()
                    .map_err(|e| Error::InvalidArgument(format!("bad table entry: {e}")))
            };
            s.push(num(0)?);
            f.push(num(1)?);
            fp.push(num(2)?);
        }
        Self::new(s, f, fp)
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.s
    }

    /// `(f, f')`, linear beyond the tabulated range.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let n = self.s.len();
        if x <= self.s[0] {
            return (self.f[0] + self.fprime[0] * (x - self.s[0]), self.fprime[0]);
        }
        if x >= self.s[n - 1] {
            return (self.f[n - 1] + self.fprime[n - 1] * (x - self.s[n - 1]), self.fprime[n - 1]);
        }
        let i = self.s.partition_point(|&v| v <= x) - 1;
        let h = self.s[i + 1] - self.s[i];
        let t = (x - self.s[i]) / h;
        let (y0, y1, d0, d1) = (self.f[i], self.f[i + 1], self.fprime[i], self.fprime[i + 1]);
        let (t2, t3) = (t * t, t * t * t);
        let val = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1;
        let der = ((6.0 * t2 - 6.0 * t) * (y0 - y1)) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (3.0 * t2 - 2.0 * t) * d1;
        (val, der)
    }

    fn flags(&self) -> Flags {
        let n = self.s.len();
        let (fz, _) = self.eval(0.0);
        Flags {
            nonnegative: self.f.iter().all(|&v| v >= 0.0),
            nondecreasing: self.fprime.iter().all(|&v| v >= 0.0),
            convex: self.fprime.windows(2).all(|w| w[1] >= w[0]),
            positive_at_zero: fz > 0.0,
            superlinear: self.s[n - 1] > 0.0 && self.fprime[n - 1] * self.s[n - 1] > self.f[n - 1],
        }
    }
}
