//! Adaptive Dormand–Prince 5(4) stepping for two-component first-order systems.

pub type State = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Halt {
    /// `|y|` exceeded the ceiling at `x`.
    Ceiling { x: f64 },
    StepUnderflow { x: f64 },
    NonFinite { x: f64 },
}

#[derive(Clone, Debug)]
pub struct Stepper {
    pub rtol: f64,
    pub atol: f64,
    pub ceiling: f64,
    pub max_steps: usize,
    h: f64,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Stepper {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ceiling: f64::INFINITY,
            max_steps: 1_000_000,
            h: 0.0,
        }
    }

    pub fn with_ceiling(mut self, ceiling: f64) -> Self {
        self.ceiling = ceiling;
        self
    }

    /// Integrates `y' = f(x, y)` from `x` to `x_end`, landing exactly on `x_end`.
    /// The step size carries over between calls.
    pub fn advance<F>(&mut self, f: &mut F, mut x: f64, mut y: State, x_end: f64) -> Result<State, Halt>
    where
        F: FnMut(f64, &State) -> State,
    {
        let span = x_end - x;
        if span == 0.0 {
            return Ok(y);
        }
        let dir = span.signum();
        if self.h == 0.0 || self.h.signum() != dir {
            self.h = span * 0.1;
        }
        let mut steps = 0;
        while (x_end - x) * dir > 0.0 {
            steps += 1;
            if steps > self.max_steps {
                return Err(Halt::StepUnderflow { x });
            }
            let mut h = self.h;
            let last = (x + h - x_end) * dir >= 0.0;
            if last {
                h = x_end - x;
            }
            let mut k = [[0.0; 2]; 7];
            k[0] = f(x, &y);
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    ys[0] += h * A[s][j] * kj[0];
                    ys[1] += h * A[s][j] * kj[1];
                }
                k[s] = f(x + C[s] * h, &ys);
            }
            let mut y_new = y;
            let mut err = [0.0; 2];
            for s in 0..7 {
                if s < 6 {
                    y_new[0] += h * A[6][s] * k[s][0];
                    y_new[1] += h * A[6][s] * k[s][1];
                }
                err[0] += h * E[s] * k[s][0];
                err[1] += h * E[s] * k[s][1];
            }
            if !(y_new[0].is_finite() && y_new[1].is_finite()) {
                if h.abs() < 1e-14 * x.abs().max(1e-300) {
                    return Err(Halt::NonFinite { x });
                }
                self.h = h * 0.2;
                continue;
            }
            let norm = ((0..2)
                .map(|i| {
                    let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    (err[i] / sc).powi(2)
                })
                .sum::<f64>()
                / 2.0)
                .sqrt();
            if norm <= 1.0 {
                x = if last { x_end } else { x + h };
                y = y_new;
                if y[0].abs() > self.ceiling {
                    return Err(Halt::Ceiling { x });
                }
                let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h = h * grow;
                } else {
                    self.h = self.h.abs().max(h.abs() * grow) * dir;
                }
            } else {
                self.h = h * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
                if self.h.abs() < 1e-15 * x.abs().max(1e-300) {
                    return Err(Halt::StepUnderflow { x });
                }
            }
        }
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let mut st = Stepper::new(1e-12, 1e-14);
        let mut f = |_x: f64, y: &State| [y[1], -y[0]];
        let y = st.advance(&mut f, 0.0, [1.0, 0.0], 10.0).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((y[1] + 10f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn ceiling_stops_blow_up() {
        let mut st = Stepper::new(1e-8, 1e-10).with_ceiling(1e8);
        // y' = y², y(0) = 1 blows up at x = 1
        let mut f = |_x: f64, y: &State| [y[0] * y[0], 0.0];
        match st.advance(&mut f, 0.0, [1.0, 0.0], 2.0) {
            Err(Halt::Ceiling { x }) => assert!((x - 1.0).abs() < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn backward_integration() {
        let mut st = Stepper::new(1e-12, 1e-14);
        let mut f = |_x: f64, y: &State| [y[0], 0.0];
        let y = st.advance(&mut f, 1.0, [1.0, 0.0], 0.0).unwrap();
        assert!((y[0] - (-1f64).exp()).abs() < 1e-11);
    }
}
