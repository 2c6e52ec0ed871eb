use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Space dimension `N ≥ 2` of the ball `B₁ ⊂ ℝᴺ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

/// Which of the three growth regimes a dimension falls into. The boundary is
/// `N = 10`, where `-N/2 + √(N-1) + 2` changes sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "N<10")]
    Bounded,
    #[serde(rename = "N=10")]
    Logarithmic,
    #[serde(rename = "N>10")]
    Power,
}

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Surface measure of the unit sphere `S^{N-1}`, i.e. `2π^{N/2} / Γ(N/2)`.
    pub fn sphere_area(self) -> f64 {
        // |S^1| = 2π, |S^2| = 4π, and |S^{n-1}| = 2π/(n-2) |S^{n-3}|.
        let mut n = if self.0 % 2 == 0 { 2 } else { 3 };
        let mut area = if n == 2 { 2.0 * PI } else { 4.0 * PI };
        while n < self.0 {
            n += 2;
            area *= 2.0 * PI / (n as f64 - 2.0);
        }
        area
    }

    pub fn regime(self) -> Regime {
        match self.0 {
            n if n < 10 => Regime::Bounded,
            10 => Regime::Logarithmic,
            _ => Regime::Power,
        }
    }

    /// `√(N-1)`.
    pub fn sqrt_nm1(self) -> f64 {
        (self.as_f64() - 1.0).sqrt()
    }

    /// Growth exponent `-N/2 + √(N-1) + 2` of semi-stable solutions near the origin.
    pub fn singular_exponent(self) -> f64 {
        -self.as_f64() / 2.0 + self.sqrt_nm1() + 2.0
    }

    /// Exponent `2√(N-1) + 2` in the weighted energy bound.
    pub fn energy_exponent(self) -> f64 {
        2.0 * self.sqrt_nm1() + 2.0
    }

    /// Optimal constant `(N-2)²/4` of the radial Hardy inequality.
    pub fn hardy_constant(self) -> f64 {
        let m = self.as_f64() - 2.0;
        m * m / 4.0
    }

    /// Joseph–Lundgren exponent `p_N = (N - 2√(N-1)) / (N - 2√(N-1) - 4)`, defined for `N > 10`.
    pub fn joseph_lundgren(self) -> Option<f64> {
        if self.0 <= 10 {
            return None;
        }
        let a = self.as_f64() - 2.0 * self.sqrt_nm1();
        Some(a / (a - 4.0))
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}", self.0)
    }
}
