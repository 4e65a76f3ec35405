//! Vector-valued natural cubic smoothing splines in flat space.
//!
//! [`solve_smoothing_spline`] returns the exact minimizer of
//!
//! ```text
//! ∫ ‖γ''(t)‖² dt + λ Σᵢ ‖γ(tᵢ) − dᵢ‖²
//! ```
//!
//! over C² curves. The minimizer is a natural cubic spline with knots at the
//! data times; it is found from a pentadiagonal system for the interior knot
//! second derivatives. `λ = +∞` gives the interpolating natural spline.

mod banded;

use crate::error::{Error, Result};
use banded::Pentadiagonal;

/// Knots closer than this are rejected.
pub const MIN_KNOT_SPACING: f64 = 1e-12;

/// Strictly increasing knot times `t_0 < … < t_m` inside the domain `[0, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotGrid {
    times: Vec<f64>,
    end: f64,
}

impl KnotGrid {
    pub fn new(times: Vec<f64>, end: f64) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "at least two knots are required, got {}",
                times.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) || !end.is_finite() {
            return Err(Error::InvalidInput("knot times must be finite".into()));
        }
        for (j, w) in times.windows(2).enumerate() {
            if !(w[1] - w[0] > MIN_KNOT_SPACING) {
                return Err(Error::InvalidInput(format!(
                    "knot times must be strictly increasing: t[{}] = {} and t[{}] = {}",
                    j,
                    w[0],
                    j + 1,
                    w[1]
                )));
            }
        }
        if times[0] < 0.0 || times[times.len() - 1] > end {
            return Err(Error::InvalidInput(format!(
                "knot times [{}, {}] do not fit in the domain [0, {end}]",
                times[0],
                times[times.len() - 1]
            )));
        }
        Ok(KnotGrid { times, end })
    }

    /// Grid whose domain ends at the last knot.
    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        let end = times.last().copied().unwrap_or(0.0);
        KnotGrid::new(times, end)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of knots, `m + 1`.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    fn spacing(&self, j: usize) -> f64 {
        self.times[j + 1] - self.times[j]
    }
}

/// Where a parameter falls relative to the knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Before,
    Inside(usize),
    After,
}

/// A fitted natural cubic smoothing spline, stored as knot values and knot
/// second derivatives per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingSpline {
    grid: KnotGrid,
    values: Vec<Vec<f64>>,
    second_derivs: Vec<Vec<f64>>,
    lambda: f64,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "lambda must be positive, got {lambda}"
        )))
    }
}

/// Solves for the smoothing spline through `data` (one row per knot).
pub fn solve_smoothing_spline(
    grid: &KnotGrid,
    data: &[Vec<f64>],
    lambda: f64,
) -> Result<SmoothingSpline> {
    check_lambda(lambda)?;
    if data.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: data.len(),
        });
    }
    let r = data[0].len();
    for row in data {
        if row.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("data must be finite".into()));
        }
    }

    let m = grid.len() - 1;
    let n_int = m - 1;
    // Second-difference matrix Q: column p (interior knot) has entries
    // (qa, qb, qc) at rows p-1, p, p+1.
    let qa: Vec<f64> = (0..=m)
        .map(|p| {
            if p >= 1 {
                1.0 / grid.spacing(p - 1)
            } else {
                0.0
            }
        })
        .collect();
    let qc: Vec<f64> = (0..=m)
        .map(|p| if p < m { 1.0 / grid.spacing(p) } else { 0.0 })
        .collect();
    let qb: Vec<f64> = (0..=m).map(|p| -qa[p] - qc[p]).collect();

    let inv_lambda = 1.0 / lambda;
    let mut sys = Pentadiagonal::zeros(n_int);
    for q in 0..n_int {
        let p = q + 1;
        let (hl, hr) = (grid.spacing(p - 1), grid.spacing(p));
        sys.diag[q] =
            (hl + hr) / 3.0 + inv_lambda * (qa[p] * qa[p] + qb[p] * qb[p] + qc[p] * qc[p]);
        if q + 1 < n_int {
            sys.off1[q] = hr / 6.0 + inv_lambda * (qb[p] * qa[p + 1] + qc[p] * qb[p + 1]);
        }
        if q + 2 < n_int {
            sys.off2[q] = inv_lambda * qc[p] * qa[p + 2];
        }
    }
    let factor = sys.factor()?;

    let mut values = vec![vec![0.0; r]; m + 1];
    let mut second_derivs = vec![vec![0.0; r]; m + 1];
    let mut column = vec![0.0; m + 1];
    for k in 0..r {
        for (c, row) in column.iter_mut().zip(data) {
            *c = row[k];
        }
        let rhs: Vec<f64> = (1..m)
            .map(|p| qa[p] * column[p - 1] + qb[p] * column[p] + qc[p] * column[p + 1])
            .collect();
        let mut sigma = vec![0.0; m + 1];
        sigma[1..m].copy_from_slice(&factor.solve(&rhs));
        for i in 0..=m {
            let a = if lambda.is_infinite() {
                column[i]
            } else {
                // (Qσ)_i picks up columns i-1, i, i+1; σ vanishes at the ends.
                let mut q_sigma = qb[i] * sigma[i];
                if i >= 1 {
                    q_sigma += qc[i - 1] * sigma[i - 1];
                }
                if i < m {
                    q_sigma += qa[i + 1] * sigma[i + 1];
                }
                column[i] - inv_lambda * q_sigma
            };
            values[i][k] = a;
            second_derivs[i][k] = sigma[i];
        }
    }

    Ok(SmoothingSpline {
        grid: grid.clone(),
        values,
        second_derivs,
        lambda,
    })
}

impl SmoothingSpline {
    pub fn grid(&self) -> &KnotGrid {
        &self.grid
    }

    /// Fitted values at the knots, one row per knot.
    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Second derivatives at the knots; first and last rows are zero.
    pub fn second_derivs(&self) -> &[Vec<f64>] {
        &self.second_derivs
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of coordinates `r`.
    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if (0.0..=self.grid.end).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain {
                t,
                lo: 0.0,
                hi: self.grid.end,
            })
        }
    }

    fn locate(&self, t: f64) -> Region {
        let times = self.grid.times();
        let m = times.len() - 1;
        if t < times[0] {
            Region::Before
        } else if t > times[m] {
            Region::After
        } else {
            let j = times.partition_point(|&k| k <= t).saturating_sub(1);
            Region::Inside(j.min(m - 1))
        }
    }

    fn value_in(&self, region: Region, t: f64) -> Vec<f64> {
        let times = self.grid.times();
        let m = times.len() - 1;
        match region {
            Region::Inside(j) => {
                let h = self.grid.spacing(j);
                let tau = t - times[j];
                let rest = h - tau;
                let bend = tau * rest / 6.0;
                let (fl, fr) = (rest / h, tau / h);
                let (wl, wr) = (1.0 + fl, 1.0 + fr);
                (0..self.dim())
                    .map(|k| {
                        self.values[j][k] * fl + self.values[j + 1][k] * fr
                            - bend
                                * (wl * self.second_derivs[j][k]
                                    + wr * self.second_derivs[j + 1][k])
                    })
                    .collect()
            }
            Region::Before => {
                let slope = self.deriv_in(Region::Inside(0), times[0]);
                let dt = t - times[0];
                self.values[0]
                    .iter()
                    .zip(&slope)
                    .map(|(a, s)| a + s * dt)
                    .collect()
            }
            Region::After => {
                let slope = self.deriv_in(Region::Inside(m - 1), times[m]);
                let dt = t - times[m];
                self.values[m]
                    .iter()
                    .zip(&slope)
                    .map(|(a, s)| a + s * dt)
                    .collect()
            }
        }
    }

    fn deriv_in(&self, region: Region, t: f64) -> Vec<f64> {
        let times = self.grid.times();
        let m = times.len() - 1;
        let j = match region {
            Region::Inside(j) => j,
            Region::Before => return self.deriv_in(Region::Inside(0), times[0]),
            Region::After => return self.deriv_in(Region::Inside(m - 1), times[m]),
        };
        let h = self.grid.spacing(j);
        let tau = t - times[j];
        let rest = h - tau;
        (0..self.dim())
            .map(|k| {
                (self.values[j + 1][k] - self.values[j][k]) / h
                    + (self.second_derivs[j][k] * (h - 3.0 * rest * rest / h)
                        + self.second_derivs[j + 1][k] * (3.0 * tau * tau / h - h))
                        / 6.0
            })
            .collect()
    }

    fn second_deriv_in(&self, region: Region, t: f64) -> Vec<f64> {
        match region {
            Region::Inside(j) => {
                let h = self.grid.spacing(j);
                let tau = t - self.grid.times()[j];
                (0..self.dim())
                    .map(|k| {
                        self.second_derivs[j][k] * (h - tau) / h
                            + self.second_derivs[j + 1][k] * tau / h
                    })
                    .collect()
            }
            Region::Before | Region::After => vec![0.0; self.dim()],
        }
    }

    /// Spline value at `t ∈ [0, end]`; linear continuation outside the knot span.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        Ok(self.value_in(self.locate(t), t))
    }

    pub fn eval_deriv(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        Ok(self.deriv_in(self.locate(t), t))
    }

    pub fn eval_second_deriv(&self, t: f64) -> Result<Vec<f64>> {
        self.check_domain(t)?;
        Ok(self.second_deriv_in(self.locate(t), t))
    }

    /// `∫ ‖s''‖² dt`, exact for the piecewise-linear second derivative.
    pub fn bending_energy(&self) -> f64 {
        (0..self.grid.len() - 1)
            .map(|j| {
                let h = self.grid.spacing(j);
                let (a, b) = (&self.second_derivs[j], &self.second_derivs[j + 1]);
                h / 3.0
                    * a.iter()
                        .zip(b)
                        .map(|(x, y)| x * x + x * y + y * y)
                        .sum::<f64>()
            })
            .sum()
    }

    /// `Σᵢ ‖s(tᵢ) − dᵢ‖²`.
    pub fn misfit(&self, data: &[Vec<f64>]) -> f64 {
        self.values
            .iter()
            .zip(data)
            .map(|(a, d)| a.iter().zip(d).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
            .sum()
    }

    /// Splits the spline on `[u, u+1]` into cubic Bézier pieces at the knots
    /// strictly inside the window.
    pub fn restrict_to_window(&self, u: usize) -> Result<Vec<CubicPiece>> {
        let (lo, hi) = (u as f64, u as f64 + 1.0);
        if hi > self.grid.end {
            return Err(Error::Domain {
                t: hi,
                lo: 0.0,
                hi: self.grid.end,
            });
        }
        let mut breaks = vec![lo];
        breaks.extend(
            self.grid
                .times()
                .iter()
                .copied()
                .filter(|&t| t > lo && t < hi),
        );
        breaks.push(hi);
        Ok(breaks
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let region = self.locate(0.5 * (a + b));
                let span = (b - a) / 3.0;
                let p0 = self.value_in(self.locate(a), a);
                let p3 = self.value_in(self.locate(b), b);
                let da = self.deriv_in(region, a);
                let db = self.deriv_in(region, b);
                let p1 = p0.iter().zip(&da).map(|(p, d)| p + span * d).collect();
                let p2 = p3.iter().zip(&db).map(|(p, d)| p - span * d).collect();
                CubicPiece {
                    breakpoints: [a, b],
                    control: [p0, p1, p2, p3],
                }
            })
            .collect())
    }
}

/// A cubic polynomial on `[a, b]` given by its four Bézier control points.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicPiece {
    pub breakpoints: [f64; 2],
    pub control: [Vec<f64>; 4],
}

impl CubicPiece {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.breakpoints[0] && t <= self.breakpoints[1]
    }

    /// De Casteljau evaluation at `t ∈ [a, b]`. Returns the end control
    /// points exactly at `t = a` and `t = b`.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let [a, b] = self.breakpoints;
        let s = (t - a) / (b - a);
        let r = 1.0 - s;
        let c = &self.control;
        (0..c[0].len())
            .map(|k| {
                let q0 = r * c[0][k] + s * c[1][k];
                let q1 = r * c[1][k] + s * c[2][k];
                let q2 = r * c[2][k] + s * c[3][k];
                let u0 = r * q0 + s * q1;
                let u1 = r * q1 + s * q2;
                r * u0 + s * u1
            })
            .collect()
    }
}

/// Evaluates a run of pieces covering a window; the first piece containing `t` wins.
pub fn eval_pieces(pieces: &[CubicPiece], t: f64) -> Option<Vec<f64>> {
    pieces.iter().find(|p| p.contains(t)).map(|p| p.eval(t))
}
