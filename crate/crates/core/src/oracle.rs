//! Brute-force reference for the flat-space smoothing problem.
//!
//! The curve is sampled on `M` uniform nodes over `[t_0, t_m]`, the bending
//! term is replaced by squared second differences and every data time is
//! snapped to its nearest node. The resulting convex quadratic is minimized
//! exactly through a banded QR factorization of its least-squares form.
//! Nothing here shares code with [`crate::spline1d`]; it exists to check that
//! module independently.

use crate::error::{Error, Result};
use crate::spline1d::SmoothingSpline;

pub const MIN_GRID_SIZE: usize = 50;

/// A curve sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedCurve {
    pub start: f64,
    pub step: f64,
    /// One row per node.
    pub values: Vec<Vec<f64>>,
}

impl DiscretizedCurve {
    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn time(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn nearest_node(&self, t: f64) -> usize {
        let j = ((t - self.start) / self.step).round();
        (j.max(0.0) as usize).min(self.values.len() - 1)
    }

    /// `Σ ‖(γ_{j+1} − 2γ_j + γ_{j−1}) / Δ²‖² Δ` over interior nodes.
    pub fn bending_energy(&self) -> f64 {
        let d = self.step;
        self.values
            .windows(3)
            .map(|w| {
                w[0].iter()
                    .zip(&w[1])
                    .zip(&w[2])
                    .map(|((a, b), c)| {
                        let s = (a - 2.0 * b + c) / (d * d);
                        s * s
                    })
                    .sum::<f64>()
                    * d
            })
            .sum()
    }
}

/// Minimizes the discretized energy on `grid_size` nodes.
pub fn discretized_energy_min(
    times: &[f64],
    data: &[Vec<f64>],
    lambda: f64,
    grid_size: usize,
) -> Result<DiscretizedCurve> {
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::InvalidInput(format!(
            "grid size must be at least {MIN_GRID_SIZE}, got {grid_size}"
        )));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "the oracle needs a finite positive lambda, got {lambda}"
        )));
    }
    if times.len() != data.len() || times.len() < 2 {
        return Err(Error::InvalidInput(
            "need at least two data points with matching times".into(),
        ));
    }
    let r = data[0].len();
    let start = times[0];
    let end = times[times.len() - 1];
    if !(end > start) {
        return Err(Error::InvalidInput(
            "data times must span a positive interval".into(),
        ));
    }
    let step = (end - start) / (grid_size - 1) as f64;
    let mut curve = DiscretizedCurve {
        start,
        step,
        values: vec![vec![0.0; r]; grid_size],
    };

    // Least-squares rows: second differences scaled by Δ^{-3/2}, and one
    // √λ-weighted row per datum at its snapped node.
    let mut ls = BandedLeastSquares::new(grid_size, r);
    let scale = step.powf(-1.5);
    let zeros = vec![0.0; r];
    for j in 0..grid_size - 2 {
        ls.add_row(j, [scale, -2.0 * scale, scale], &zeros);
    }
    let w = lambda.sqrt();
    let mut hit = vec![false; grid_size];
    for (t, d) in times.iter().zip(data) {
        if d.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                found: d.len(),
            });
        }
        let j = curve.nearest_node(*t);
        hit[j] = true;
        let b: Vec<f64> = d.iter().map(|v| w * v).collect();
        ls.add_row(j, [w, 0.0, 0.0], &b);
    }
    if hit.iter().filter(|&&h| h).count() < 2 {
        return Err(Error::InvalidInput(
            "data snap to fewer than two distinct grid nodes".into(),
        ));
    }
    let x = ls.solve()?;
    for (row, sol) in curve.values.iter_mut().zip(x) {
        *row = sol;
    }
    Ok(curve)
}

/// A curve whose flat-space energy can be measured.
pub trait EnergyCurve {
    fn bending(&self) -> f64;
    fn value_at(&self, t: f64) -> Vec<f64>;
}

impl EnergyCurve for DiscretizedCurve {
    fn bending(&self) -> f64 {
        self.bending_energy()
    }

    fn value_at(&self, t: f64) -> Vec<f64> {
        self.values[self.nearest_node(t)].clone()
    }
}

impl EnergyCurve for SmoothingSpline {
    fn bending(&self) -> f64 {
        self.bending_energy()
    }

    fn value_at(&self, t: f64) -> Vec<f64> {
        self.eval(t)
            .expect("energy is measured at the spline's own data times")
    }
}

/// Bending energy plus `λ Σᵢ ‖γ(tᵢ) − dᵢ‖²`. With `λ = ∞` the misfit term is
/// zero for exact interpolation and infinite otherwise.
pub fn energy_of<C: EnergyCurve>(curve: &C, times: &[f64], data: &[Vec<f64>], lambda: f64) -> f64 {
    let misfit: f64 = times
        .iter()
        .zip(data)
        .map(|(&t, d)| {
            curve
                .value_at(t)
                .iter()
                .zip(d)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
        })
        .sum();
    let data_term = if lambda.is_infinite() {
        if misfit == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lambda * misfit
    };
    curve.bending() + data_term
}

/// Sequential Givens QR for least-squares problems whose rows have at most
/// three consecutive non-zeros. `R` keeps an upper bandwidth of two.
#[derive(Debug, Clone)]
struct BandedLeastSquares {
    /// `r[i][k] = R[i][i + k]`
    r: Vec<[f64; 3]>,
    qtb: Vec<Vec<f64>>,
    filled: Vec<bool>,
}

impl BandedLeastSquares {
    fn new(n: usize, ncols: usize) -> Self {
        BandedLeastSquares {
            r: vec![[0.0; 3]; n],
            qtb: vec![vec![0.0; ncols]; n],
            filled: vec![false; n],
        }
    }

    /// Adds the row with `coeffs` in columns `start..start + 3` and right-hand side `rhs`.
    fn add_row(&mut self, start: usize, mut coeffs: [f64; 3], rhs: &[f64]) {
        let n = self.r.len();
        let mut b = rhs.to_vec();
        let mut c = start;
        for (k, v) in coeffs.iter_mut().enumerate() {
            if c + k >= n {
                *v = 0.0;
            }
        }
        while c < n {
            if coeffs[0] == 0.0 {
                if coeffs.iter().all(|&v| v == 0.0) {
                    return;
                }
                coeffs = [coeffs[1], coeffs[2], 0.0];
                c += 1;
                continue;
            }
            if !self.filled[c] {
                self.r[c] = coeffs;
                self.qtb[c] = b;
                self.filled[c] = true;
                return;
            }
            let a = self.r[c][0];
            let rho = a.hypot(coeffs[0]);
            let (cs, sn) = (a / rho, coeffs[0] / rho);
            for (x, y) in self.r[c].iter_mut().zip(coeffs.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = cs * u + sn * v;
                *y = -sn * u + cs * v;
            }
            for (x, y) in self.qtb[c].iter_mut().zip(b.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = cs * u + sn * v;
                *y = -sn * u + cs * v;
            }
            coeffs = [coeffs[1], coeffs[2], 0.0];
            c += 1;
        }
    }

    fn solve(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.r.len();
        let ncols = self.qtb.first().map_or(0, Vec::len);
        let mut x = vec![vec![0.0; ncols]; n];
        for i in (0..n).rev() {
            let d = self.r[i][0];
            if !self.filled[i] || d == 0.0 {
                return Err(Error::Singular { row: i, pivot: d });
            }
            let mut row = self.qtb[i].clone();
            for off in 1..3 {
                if i + off < n {
                    for (s, later) in row.iter_mut().zip(&x[i + off]) {
                        *s -= self.r[i][off] * later;
                    }
                }
            }
            x[i] = row.into_iter().map(|s| s / d).collect();
        }
        Ok(x)
    }
}
