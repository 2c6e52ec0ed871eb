//! Sup of a ratio `lhs(r)/rhs(r)` over grid nodes, sharpened by zooming in
//! around the running maximizer.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct Scan {
    pub sup: f64,
    pub at: f64,
    /// Sup over nodes in `[lo, 10 lo]`.
    pub inner: f64,
    /// Sup over nodes above `10 lo`.
    pub outer: f64,
    pub slope_at_origin: Option<f64>,
    pub trace: Vec<TracePoint>,
}

/// Above this factor the ratio near the inner cutoff is read as still growing.
pub(crate) const PLATEAU_SLACK: f64 = 1.05;
const ZOOM_ROUNDS: usize = 3;
const ZOOM_POINTS: usize = 21;

impl Scan {
    /// Finite sup that does not keep rising toward the inner cutoff.
    pub fn plateaus(&self) -> bool {
        if !self.sup.is_finite() {
            return false;
        }
        if self.outer > 0.0 {
            self.inner <= PLATEAU_SLACK * self.outer
        } else {
            self.inner == 0.0
        }
    }
}

pub(crate) fn scan(nodes: &[f64], lo: f64, hi: f64, lhs: &dyn Fn(f64) -> f64, rhs: &dyn Fn(f64) -> f64) -> Scan {
    let ratio = |r: f64| {
        let (l, b) = (lhs(r), rhs(r));
        (l, b, if b > 0.0 { l / b } else { f64::NAN })
    };
    let mut trace = Vec::new();
    for &r in nodes.iter().filter(|&&r| r >= lo && r <= hi) {
        let (l, b, q) = ratio(r);
        if q.is_nan() {
            continue;
        }
        trace.push(TracePoint { r, lhs: l, rhs: b, ratio: q });
    }
    let Some(first) = trace.first().map(|t| t.r) else {
        return Scan {
            sup: 0.0,
            at: lo,
            inner: 0.0,
            outer: 0.0,
            slope_at_origin: None,
            trace,
        };
    };
    let (mut best, mut at) = (f64::NEG_INFINITY, first);
    let mut k = 0;
    for (i, t) in trace.iter().enumerate() {
        if t.ratio > best || t.ratio.is_infinite() {
            best = t.ratio;
            at = t.r;
            k = i;
        }
    }
    let mut inner = 0.0f64;
    let mut outer = 0.0f64;
    for t in &trace {
        if t.r <= 10.0 * first {
            inner = inner.max(t.ratio);
        } else {
            outer = outer.max(t.ratio);
        }
    }

    if best.is_finite() {
        let mut left = trace[k.saturating_sub(1)].r;
        let mut right = trace[(k + 1).min(trace.len() - 1)].r;
        for _ in 0..ZOOM_ROUNDS {
            if right <= left {
                break;
            }
            let step = (right / left).ln() / (ZOOM_POINTS - 1) as f64;
            let mut local = None;
            for j in 0..ZOOM_POINTS {
                let r = (left * (step * j as f64).exp()).clamp(lo, hi);
                let q = ratio(r).2;
                if q.is_finite() && q > best {
                    best = q;
                    at = r;
                    local = Some(r);
                }
            }
            let centre = local.unwrap_or(at);
            let w = step.exp();
            left = (centre / w).max(lo);
            right = (centre * w).min(hi);
        }
        if at <= 10.0 * first {
            inner = inner.max(best);
        } else {
            outer = outer.max(best);
        }
    }

    let slope_at_origin = {
        let target = 10.0 * first;
        let j = trace.iter().position(|t| t.r >= target).unwrap_or(trace.len() - 1);
        let (a, b) = (&trace[0], &trace[j]);
        (j > 0 && a.ratio > 0.0 && b.ratio > 0.0).then(|| (b.ratio / a.ratio).ln() / (b.r / a.r).ln())
    };

    Scan {
        sup: best,
        at,
        inner,
        outer,
        slope_at_origin,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nodes() -> Vec<f64> {
        (0..200).map(|i| 1e-4f64.powf(1.0 - i as f64 / 199.0)).collect()
    }

    #[test]
    fn flat_ratio_plateaus_with_zero_slope() {
        let s = scan(&nodes(), 1e-4, 1.0, &|r| 3.0 * r * r, &|r| r * r);
        assert!((s.sup - 3.0).abs() < 1e-12);
        assert!(s.plateaus());
        assert!(s.slope_at_origin.unwrap().abs() < 1e-9);
    }

    #[test]
    fn growing_ratio_does_not_plateau() {
        let s = scan(&nodes(), 1e-4, 1.0, &|r| 1.0 / r, &|_| 1.0);
        assert!(!s.plateaus());
        assert!((s.slope_at_origin.unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn zoom_finds_peak_between_nodes() {
        let peak = 0.0123;
        let s = scan(&nodes(), 1e-4, 1.0, &|r| 1.0 / (1.0 + ((r / peak).ln() * 50.0).powi(2)), &|_| 1.0);
        assert!((s.sup - 1.0).abs() < 1e-3, "{}", s.sup);
        assert!((s.at / peak - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_bound_nodes_are_skipped() {
        let s = scan(&[0.5, 0.75, 1.0], 0.5, 1.0, &|r| 1.0 - r, &|r| 1.0 - r);
        assert_eq!(s.trace.len(), 2);
    }
}
