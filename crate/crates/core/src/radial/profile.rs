use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::radial::grid::RadialGrid;

/// A radial function sampled on a [`RadialGrid`], optionally together with
/// its first three radial derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
    derivs: [Option<Vec<f64>>; 3],
}

const DERIV_NAMES: [&str; 3] = ["u_r", "u_rr", "u_rrr"];

impl RadialProfile {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        check_samples(&grid, &values)?;
        Ok(Self {
            grid,
            values,
            derivs: [None, None, None],
        })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    /// Samples `r ↦ [u, u_r, u_rr, u_rrr]`.
    pub fn from_jet(grid: RadialGrid, f: impl Fn(f64) -> [f64; 4]) -> Result<Self> {
        let jets: Vec<[f64; 4]> = grid.nodes().iter().map(|&r| f(r)).collect();
        let column = |k: usize| jets.iter().map(|j| j[k]).collect::<Vec<_>>();
        Self::new(grid, column(0))?
            .with_deriv(1, column(1))?
            .with_deriv(2, column(2))?
            .with_deriv(3, column(3))
    }

    pub fn with_deriv(mut self, order: usize, samples: Vec<f64>) -> Result<Self> {
        self.set_deriv(order, samples)?;
        Ok(self)
    }

    pub fn set_deriv(&mut self, order: usize, samples: Vec<f64>) -> Result<()> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidArgument(format!("derivative order {order} not in 1..=3")));
        }
        check_samples(&self.grid, &samples)?;
        self.derivs[order - 1] = Some(samples);
        Ok(())
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn deriv(&self, order: usize) -> Option<&[f64]> {
        self.derivs.get(order.checked_sub(1)?)?.as_deref()
    }

    pub fn require_deriv(&self, order: usize) -> Result<&[f64]> {
        self.deriv(order)
            .ok_or(Error::MissingDerivative(DERIV_NAMES[order.clamp(1, 3) - 1]))
    }

    /// `c·u` with all stored derivatives scaled alike.
    pub fn scaled(&self, c: f64) -> Self {
        let scale = |v: &Vec<f64>| v.iter().map(|x| c * x).collect::<Vec<_>>();
        Self {
            grid: self.grid.clone(),
            values: scale(&self.values),
            derivs: [
                self.derivs[0].as_ref().map(scale),
                self.derivs[1].as_ref().map(scale),
                self.derivs[2].as_ref().map(scale),
            ],
        }
    }

    /// Restriction to every other node; the node `r = 1` is always kept.
    pub fn coarsened(&self) -> Result<Self> {
        let n = self.values.len();
        let mut idx: Vec<usize> = (0..n).step_by(2).collect();
        if *idx.last().unwrap() != n - 1 {
            idx.push(n - 1);
        }
        let pick = |v: &[f64]| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let grid = RadialGrid::from_nodes(pick(self.grid.nodes()))?;
        Ok(Self {
            grid,
            values: pick(&self.values),
            derivs: [
                self.derivs[0].as_deref().map(pick),
                self.derivs[1].as_deref().map(pick),
                self.derivs[2].as_deref().map(pick),
            ],
        })
    }

    /// Interpolated value at `r`. Cubic Hermite when `u_r` is stored,
    /// otherwise linear in `log r`.
    pub fn eval(&self, r: f64) -> f64 {
        interpolate(self.grid.nodes(), &self.values, self.deriv(1), r)
    }

    /// Interpolated `k`-th derivative, using the `k+1`-th for Hermite slopes when present.
    pub fn eval_deriv(&self, order: usize, r: f64) -> Option<f64> {
        let d = self.deriv(order)?;
        Some(interpolate(self.grid.nodes(), d, self.deriv(order + 1), r))
    }

    pub fn is_radially_decreasing(&self, tol: f64) -> bool {
        match self.deriv(1) {
            Some(d) => d.iter().all(|&x| x <= tol),
            None => self.values.windows(2).all(|w| w[1] <= w[0] + tol),
        }
    }

    /// Writes `r,u,u_r,u_rr,u_rrr`; missing derivative columns are left empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["r", "u", "u_r", "u_rr", "u_rrr"])?;
        for (i, r) in self.grid.nodes().iter().enumerate() {
            let mut rec = vec![fmt_f64(*r), fmt_f64(self.values[i])];
            for d in &self.derivs {
                rec.push(d.as_ref().map(|d| fmt_f64(d[i])).unwrap_or_default());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        let expected = ["r", "u", "u_r", "u_rr", "u_rrr"];
        if headers.len() < 2 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
            return Err(Error::InvalidArgument(format!(
                "profile CSV header must be r,u,u_r,u_rr,u_rrr, got {:?}",
                headers.iter().collect::<Vec<_>>()
            )));
        }
        let mut cols: [Vec<Option<f64>>; 5] = Default::default();
        for rec in rdr.records() {
            let rec = rec?;
            for (k, col) in cols.iter_mut().enumerate() {
                let cell = rec.get(k).map(str::trim).unwrap_or("");
                col.push(if cell.is_empty() {
                    None
                } else {
                    Some(cell.parse::<f64>().map_err(|e| {
                        Error::InvalidArgument(format!("bad number {cell:?}: {e}"))
                    })?)
                });
            }
        }
        let dense = |c: &Vec<Option<f64>>, name: &str| -> Result<Vec<f64>> {
            c.iter()
                .map(|x| x.ok_or_else(|| Error::InvalidArgument(format!("missing {name} value"))))
                .collect()
        };
        let grid = RadialGrid::from_nodes(dense(&cols[0], "r")?)?;
        let mut profile = Self::new(grid, dense(&cols[1], "u")?)?;
        for k in 1..=3 {
            let c = &cols[k + 1];
            if c.iter().all(Option::is_some) && !c.is_empty() {
                profile.set_deriv(k, dense(c, DERIV_NAMES[k - 1])?)?;
            }
        }
        Ok(profile)
    }
}

/// Shortest round-trip decimal form; exponent notation outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn check_samples(grid: &RadialGrid, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for a grid of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { r: grid.nodes()[i] });
    }
    Ok(())
}

pub(crate) fn interpolate(nodes: &[f64], values: &[f64], slopes: Option<&[f64]>, r: f64) -> f64 {
    let i = nodes.partition_point(|&x| x <= r).saturating_sub(1).min(nodes.len() - 2);
    let (x0, x1) = (nodes[i], nodes[i + 1]);
    let (y0, y1) = (values[i], values[i + 1]);
    match slopes {
        Some(d) => {
            let h = x1 - x0;
            let t = (r - x0) / h;
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                + (t3 - 2.0 * t2 + t) * h * d[i]
                + (-2.0 * t3 + 3.0 * t2) * y1
                + (t3 - t2) * h * d[i + 1]
        }
        None => {
            let t = (r / x0).ln() / (x1 / x0).ln();
            y0 + t * (y1 - y0)
        }
    }
}
