//! Radial test functions for the quadratic form and the radial stability inequality.

use crate::radial::Dimension;

pub trait RadialTestFn: Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn deriv(&self, r: f64) -> f64;
    /// Closed interval outside which the function vanishes.
    fn support(&self) -> (f64, f64);
    /// Interior radii where the function is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `r^q B(x)` with `B(x) = exp(1 - 1/(1 - x²))` and `x` the position of
/// `log r` inside `[log lo, log hi]` rescaled to `(-1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBump {
    pub lo: f64,
    pub hi: f64,
    pub exponent: f64,
}

impl LogBump {
    fn x(&self, r: f64) -> f64 {
        2.0 * (r / self.lo).ln() / (self.hi / self.lo).ln() - 1.0
    }
}

impl RadialTestFn for LogBump {
    fn value(&self, r: f64) -> f64 {
        let x = self.x(r);
        if x.abs() >= 1.0 {
            return 0.0;
        }
        r.powf(self.exponent) * (1.0 - 1.0 / (1.0 - x * x)).exp()
    }

    fn deriv(&self, r: f64) -> f64 {
        let x = self.x(r);
        if x.abs() >= 1.0 {
            return 0.0;
        }
        let one = 1.0 - x * x;
        let b = (1.0 - 1.0 / one).exp();
        let db = -2.0 * x / (one * one) * b;
        let dx = 2.0 / (r * (self.hi / self.lo).ln());
        r.powf(self.exponent - 1.0) * (self.exponent * b + r * db * dx)
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// `r^q sin(π log(r/lo) / log(hi/lo))` on `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SineLog {
    pub lo: f64,
    pub hi: f64,
    pub exponent: f64,
}

impl RadialTestFn for SineLog {
    fn value(&self, r: f64) -> f64 {
        if r <= self.lo || r >= self.hi {
            return 0.0;
        }
        let l = (self.hi / self.lo).ln();
        r.powf(self.exponent) * (std::f64::consts::PI * (r / self.lo).ln() / l).sin()
    }

    fn deriv(&self, r: f64) -> f64 {
        if r <= self.lo || r >= self.hi {
            return 0.0;
        }
        let l = (self.hi / self.lo).ln();
        let th = std::f64::consts::PI * (r / self.lo).ln() / l;
        r.powf(self.exponent - 1.0) * (self.exponent * th.sin() + std::f64::consts::PI / l * th.cos())
    }

    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// `cap^q` on `[0, cap]`, `t^q` on `(cap, 1/2]`, then the linear ramp
/// `2 (1/2)^q (1 - t)` down to zero at `t = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CappedPower {
    pub cap: f64,
    pub exponent: f64,
}

impl CappedPower {
    /// The cut-off used to bound the weighted energy on `(0, r)` for
    /// semi-stable solutions: exponent `-√(N-1) - 1`, capped at `r`.
    pub fn energy_cutoff(dim: Dimension, r: f64) -> Self {
        Self {
            cap: r,
            exponent: -dim.sqrt_nm1() - 1.0,
        }
    }
}

impl RadialTestFn for CappedPower {
    fn value(&self, t: f64) -> f64 {
        let q = self.exponent;
        if t <= self.cap {
            self.cap.powf(q)
        } else if t <= 0.5 {
            t.powf(q)
        } else if t < 1.0 {
            2.0 * 0.5f64.powf(q) * (1.0 - t)
        } else {
            0.0
        }
    }

    fn deriv(&self, t: f64) -> f64 {
        let q = self.exponent;
        if t <= self.cap {
            0.0
        } else if t <= 0.5 {
            q * t.powf(q - 1.0)
        } else if t < 1.0 {
            -2.0 * 0.5f64.powf(q)
        } else {
            0.0
        }
    }

    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![self.cap, 0.5]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_deriv(f: &dyn RadialTestFn, r: f64) {
        let h = 1e-6 * r;
        let fd = (f.value(r + h) - f.value(r - h)) / (2.0 * h);
        let d = f.deriv(r);
        assert!((fd - d).abs() <= 1e-6 * d.abs().max(1.0), "r={r}: {fd} vs {d}");
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = LogBump { lo: 1e-3, hi: 0.9, exponent: -4.0 };
        let s = SineLog { lo: 1e-3, hi: 0.9, exponent: -1.5 };
        let c = CappedPower { cap: 0.1, exponent: -4.0 };
        for r in [0.002, 0.01, 0.05, 0.3, 0.7] {
            check_deriv(&b, r);
            check_deriv(&s, r);
        }
        for r in [0.05, 0.3, 0.7] {
            check_deriv(&c, r);
        }
    }

    #[test]
    fn capped_power_is_continuous() {
        let c = CappedPower { cap: 0.1, exponent: -4.0 };
        assert!((c.value(0.5) - 16.0).abs() < 1e-12);
        assert!((c.value(0.5 + 1e-12) - 16.0).abs() < 1e-9);
        assert_eq!(c.value(1.0), 0.0);
        assert!((c.value(0.01) - 1e4).abs() < 1e-8);
    }
}
