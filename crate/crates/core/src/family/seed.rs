//! Seed functions `h` built from closed-form pieces, each carrying `h`,
//! `h'`, `h''` and `H = ∫₀^r h` exactly.
//!
//! Localized pieces use the `C²` kernel `K(x) = (1 - x²)³` on `|x| < 1`,
//! whose mass is `32/35`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const K_MASS: f64 = 32.0 / 35.0;

/// `K`, `K'`, `K''` at `x`.
fn kernel(x: f64) -> [f64; 3] {
    if x.abs() >= 1.0 {
        return [0.0; 3];
    }
    let q = 1.0 - x * x;
    [q * q * q, -6.0 * x * q * q, -6.0 * q * q + 24.0 * x * x * q]
}

/// `∫_{-1}^x K`.
fn kernel_int(x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    let (x2, x3) = (x * x, x * x * x);
    x - x3 + 0.6 * x3 * x2 - x3 * x2 * x2 / 7.0 + 0.5 * K_MASS
}

fn q_poly(x: f64) -> f64 {
    let x2 = x * x;
    x2 / 2.0 - x2 * x2 / 4.0 + x2 * x2 * x2 / 10.0 - x2 * x2 * x2 * x2 / 56.0
}

fn r_poly(x: f64) -> f64 {
    let x2 = x * x;
    let x3 = x2 * x;
    x3 / 6.0 - x3 * x2 / 20.0 + x3 * x2 * x2 / 70.0 - x3 * x2 * x2 * x2 / 504.0
}

/// Smooth step `S(x) = ∫_{-1}^x K / (32/35)`, from 0 to 1.
fn step(x: f64) -> f64 {
    kernel_int(x) / K_MASS
}

/// `∫_{-1}^x S`; equals `x` for `x ≥ 1`.
fn step_int(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        x
    } else {
        0.5 * (x + 1.0) + (q_poly(x) - q_poly(1.0)) / K_MASS
    }
}

/// `∫_{-1}^x ∫_{-1}^t S`.
fn step_int2(x: f64) -> f64 {
    let inner = |x: f64| 0.25 * (x + 1.0).powi(2) + (r_poly(x) + r_poly(1.0) - q_poly(1.0) * (x + 1.0)) / K_MASS;
    if x <= -1.0 {
        0.0
    } else if x >= 1.0 {
        inner(1.0) + 0.5 * (x * x - 1.0)
    } else {
        inner(x)
    }
}

/// One additive piece of `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// `coeff · r^exponent`, `exponent > -1`.
    Power { coeff: f64, exponent: f64 },
    /// `height · K((r - centre)/half_width)`.
    Bump { centre: f64, half_width: f64, height: f64 },
    /// `rise · S((r - centre)/half_width)`; slope `rise·35/(32·half_width)` at the centre.
    Ramp { centre: f64, half_width: f64, rise: f64 },
    /// Antiderivative of a ramp: `h' = rise · S((r - centre)/half_width)`.
    RampIntegral { centre: f64, half_width: f64, rise: f64 },
}

/// `[h, h', h'', H]` of a single term.
type Jet = [f64; 4];

impl Term {
    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(format!("{what} in seed term {self:?}")));
        match *self {
            Term::Power { coeff, exponent } => {
                if !(exponent > -1.0) || !coeff.is_finite() || !exponent.is_finite() {
                    return bad("exponent must exceed -1");
                }
            }
            Term::Bump { centre, half_width, height: a }
            | Term::Ramp { centre, half_width, rise: a }
            | Term::RampIntegral { centre, half_width, rise: a } => {
                if !(half_width > 0.0 && centre.is_finite() && half_width.is_finite()) {
                    return bad("half width must be positive");
                }
                if !a.is_finite() {
                    return bad("amplitude overflow");
                }
                if centre - half_width < 0.0 {
                    return bad("support must lie in r ≥ 0");
                }
            }
        }
        Ok(())
    }

    fn jet(&self, r: f64) -> Jet {
        match *self {
            Term::Power { coeff, exponent: q } => {
                if coeff == 0.0 {
                    return [0.0; 4];
                }
                let p = r.powf(q);
                [coeff * p, coeff * q * p / r, coeff * q * (q - 1.0) * p / (r * r), coeff * p * r / (q + 1.0)]
            }
            Term::Bump { centre, half_width: w, height } => {
                let x = (r - centre) / w;
                let [k, k1, k2] = kernel(x);
                [height * k, height * k1 / w, height * k2 / (w * w), height * w * kernel_int(x)]
            }
            Term::Ramp { centre, half_width: w, rise } => {
                let x = (r - centre) / w;
                let [k, k1, _] = kernel(x);
                [
                    rise * step(x),
                    rise * k / (w * K_MASS),
                    rise * k1 / (w * w * K_MASS),
                    rise * w * step_int(x),
                ]
            }
            Term::RampIntegral { centre, half_width: w, rise } => {
                let x = (r - centre) / w;
                let [k, _, _] = kernel(x);
                [
                    rise * w * step_int(x),
                    rise * step(x),
                    rise * k / (w * K_MASS),
                    rise * w * w * step_int2(x),
                ]
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Term::Power { .. } => Vec::new(),
            Term::Bump { centre, half_width, .. }
            | Term::Ramp { centre, half_width, .. }
            | Term::RampIntegral { centre, half_width, .. } => {
                vec![centre - half_width, centre, centre + half_width]
            }
        }
    }
}

/// The seed `h ≥ 0` on `(0, 1]`, a finite sum of [`Term`]s.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub terms: Vec<Term>,
}

impl Seed {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn power(coeff: f64, exponent: f64) -> Self {
        Self {
            terms: vec![Term::Power { coeff, exponent }],
        }
    }

    pub fn with(mut self, t: Term) -> Self {
        self.terms.push(t);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.terms.iter().try_for_each(Term::validate)
    }

    /// `[h, h', h'', H]` at `r`.
    pub fn jet(&self, r: f64) -> [f64; 4] {
        self.terms.iter().fold([0.0; 4], |mut acc, t| {
            let j = t.jet(r);
            for (a, b) in acc.iter_mut().zip(j) {
                *a += b;
            }
            acc
        })
    }

    pub fn h(&self, r: f64) -> f64 {
        self.jet(r)[0]
    }

    /// Sorted radii in `(0, 1)` where a term changes its formula.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .terms
            .iter()
            .flat_map(Term::breakpoints)
            .filter(|&r| r > 0.0 && r < 1.0)
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "zero".into();
        }
        let kinds: Vec<&str> = self
            .terms
            .iter()
            .map(|t| match t {
                Term::Power { .. } => "power",
                Term::Bump { .. } => "bump",
                Term::Ramp { .. } => "ramp",
                Term::RampIntegral { .. } => "ramp_integral",
            })
            .collect();
        let mut counts: Vec<(String, usize)> = Vec::new();
        for k in kinds {
            match counts.iter_mut().find(|(n, _)| n == k) {
                Some((_, c)) => *c += 1,
                None => counts.push((k.to_string(), 1)),
            }
        }
        counts
            .into_iter()
            .map(|(k, c)| if c == 1 { k } else { format!("{c}x{k}") })
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::gauss_legendre;

    fn check_jet(t: Term, lo: f64, hi: f64) {
        let s = Seed { terms: vec![t.clone()] };
        let mut breaks: Vec<f64> = vec![lo, hi];
        breaks.extend(s.breakpoints().into_iter().filter(|&b| b > lo && b < hi));
        breaks.sort_by(f64::total_cmp);
        let fine: Vec<f64> = breaks
            .windows(2)
            .flat_map(|w| (0..40).map(move |i| w[0] + (w[1] - w[0]) * i as f64 / 40.0))
            .chain([hi])
            .collect();
        let big_h = |r: f64| s.jet(r)[3];
        let bps = s.breakpoints();
        for &r in fine.iter().skip(1) {
            let [h, d1, d2, _] = s.jet(r);
            let dh = 1e-6 * r.max(1e-3);
            if bps.iter().any(|b| (b - r).abs() < 10.0 * dh) {
                continue;
            }
            let [hp, d1p, ..] = s.jet(r + dh);
            let [hm, d1m, ..] = s.jet(r - dh);
            let scale = 1.0 + h.abs() + d1.abs() + d2.abs();
            assert!(((hp - hm) / (2.0 * dh) - d1).abs() < 1e-5 * scale, "{t:?} h' at {r}");
            assert!(((d1p - d1m) / (2.0 * dh) - d2).abs() < 1e-4 * scale, "{t:?} h'' at {r}");
            let mut panels: Vec<f64> = fine.iter().copied().filter(|&x| x < r).collect();
            panels.push(r);
            let stepwise = gauss_legendre(&panels, |x| s.h(x));
            assert!((big_h(r) - big_h(lo) - stepwise).abs() < 1e-9 * (1.0 + stepwise.abs()), "{t:?} H at {r}");
        }
    }

    #[test]
    fn jets_are_consistent() {
        check_jet(Term::Power { coeff: 2.0, exponent: 1.5 }, 0.01, 1.0);
        check_jet(Term::Bump { centre: 0.4, half_width: 0.1, height: 3.0 }, 0.2, 0.7);
        check_jet(Term::Ramp { centre: 0.4, half_width: 0.1, rise: 0.7 }, 0.2, 0.7);
        check_jet(Term::RampIntegral { centre: 0.4, half_width: 0.1, rise: -0.3 }, 0.2, 0.7);
    }

    #[test]
    fn kernel_constants() {
        assert!((kernel_int(1.0) - K_MASS).abs() < 1e-15);
        assert_eq!(step(-2.0), 0.0);
        assert!((step(1.0) - 1.0).abs() < 1e-15);
        assert!((step(0.0) - 0.5).abs() < 1e-15);
        assert!((step_int(1.0) - 1.0).abs() < 1e-15);
        // step_int2 is continuous with slope 1 at x = 1
        let e = 1e-7;
        assert!((step_int2(1.0 + e) - step_int2(1.0 - e) - 2.0 * e).abs() < 1e-12);
    }

    #[test]
    fn ramp_slope_at_centre() {
        let t = Term::Ramp { centre: 0.5, half_width: 0.01, rise: 0.2 };
        assert!((t.jet(0.5)[1] - 0.2 / (0.01 * K_MASS)).abs() < 1e-9);
    }

    #[test]
    fn describe_counts_terms() {
        let s = Seed::power(1.0, 1.0)
            .with(Term::Bump { centre: 0.5, half_width: 0.1, height: 1.0 })
            .with(Term::Bump { centre: 0.2, half_width: 0.1, height: 1.0 });
        assert_eq!(s.describe(), "power+2xbump");
        assert_eq!(Seed::zero().describe(), "zero");
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(Seed::power(1.0, -1.5).validate().is_err());
        assert!(Seed::zero()
            .with(Term::Bump { centre: 0.1, half_width: 0.2, height: 1.0 })
            .validate()
            .is_err());
    }
}
