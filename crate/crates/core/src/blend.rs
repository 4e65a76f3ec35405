//! Blended smoothing splines on a manifold.
//!
//! For every integer `i ∈ {0, …, n}` the data point whose time is closest to
//! `i` becomes the anchor `d(i)`. All data are lifted to the tangent space at
//! each anchor with the logarithm, a natural cubic smoothing spline is solved
//! there, and mapped back with the exponential. On `[i, i+1]` the images of the
//! splines at `d(i)` and `d(i+1)` are combined geodesically with the smoothstep
//! weight `w(s) = 3s² − 2s³`, which makes the composite curve C¹.
//!
//! Only the restriction of each tangent spline to the windows adjacent to its
//! anchor is kept, so evaluating the fitted curve costs three exponentials and
//! one logarithm regardless of the number of data points.

use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, TangentVector};
use crate::spline1d::{eval_pieces, solve_smoothing_spline, CubicPiece, KnotGrid};

/// The smoothstep weight `3s² − 2s³` on `[0, 1]`.
pub fn weight(s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain {
            t: s,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(s * s * (3.0 - 2.0 * s))
}

/// Data, times and settings for one fit.
#[derive(Debug, Clone)]
pub struct FitProblem {
    times: KnotGrid,
    data: Vec<Point>,
    intervals: usize,
    lambda: f64,
}

impl FitProblem {
    pub fn new(times: Vec<f64>, data: Vec<Point>, intervals: usize, lambda: f64) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidInput(
                "the number of intervals must be at least 1".into(),
            ));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        let times = KnotGrid::new(times, intervals as f64)?;
        if data.len() != times.len() {
            return Err(Error::InvalidInput(format!(
                "{} data points but {} times",
                data.len(),
                times.len()
            )));
        }
        Ok(FitProblem {
            times,
            data,
            intervals,
            lambda,
        })
    }

    pub fn times(&self) -> &KnotGrid {
        &self.times
    }

    pub fn data(&self) -> &[Point] {
        &self.data
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// For each `i ∈ {0, …, n}`, the index of the datum whose time is closest to
/// `i`; ties go to the smaller index.
pub fn select_anchors(times: &KnotGrid, n: usize) -> Vec<usize> {
    let t = times.times();
    (0..=n)
        .map(|i| {
            let target = i as f64;
            let mut best = 0;
            for (k, tk) in t.iter().enumerate() {
                if (tk - target).abs() < (t[best] - target).abs() {
                    best = k;
                }
            }
            best
        })
        .collect()
}

/// Anchor data indices `k_0, …, k_n` and the anchor points `d(i) = d_{k_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    indices: Vec<usize>,
    points: Vec<Point>,
}

impl AnchorSet {
    pub fn new(indices: Vec<usize>, points: Vec<Point>) -> Result<Self> {
        if indices.len() != points.len() || indices.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "anchor set needs matching index and point lists of length at least 2 (got {} and {})",
                indices.len(),
                points.len()
            )));
        }
        Ok(AnchorSet { indices, points })
    }

    pub fn from_data(indices: Vec<usize>, data: &[Point]) -> Result<Self> {
        let points = indices
            .iter()
            .map(|&k| {
                data.get(k)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("anchor index {k} is out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        AnchorSet::new(indices, points)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Tangent coordinates of every datum at anchor `i`. The anchor's own row is exactly zero.
pub fn lift_data<M: Manifold>(
    manifold: &M,
    anchors: &AnchorSet,
    i: usize,
    data: &[Point],
) -> Result<Vec<Vec<f64>>> {
    let anchor = &anchors.points[i];
    let own = anchors.indices[i];
    data.iter()
        .enumerate()
        .map(|(j, d)| {
            if j == own {
                return Ok(vec![0.0; anchor.dim()]);
            }
            manifold
                .log(anchor, d)
                .map(TangentVector::into_coords)
                .map_err(|e| Error::Lift {
                    data_index: j,
                    anchor: i,
                    anchor_data_index: own,
                    reason: e.to_string(),
                })
        })
        .collect()
}

/// Tangent-space curves used on one interval `[i, i+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPieces {
    /// Spline at anchor `d(i)`, restricted to `[i, i+1]`.
    pub left: Vec<CubicPiece>,
    /// Spline at anchor `d(i+1)`, restricted to `[i, i+1]`.
    pub right: Vec<CubicPiece>,
}

/// Position and velocity mismatch of the fitted curve at an interior integer time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Junction {
    pub t: usize,
    pub position_gap: f64,
    pub velocity_gap: f64,
    /// Larger of the one-sided speeds at the junction.
    pub speed: f64,
}

/// A fitted C¹ curve `B: [0, n] → M`.
#[derive(Debug, Clone)]
pub struct BlendedSpline<M> {
    manifold: M,
    lambda: f64,
    times: Vec<f64>,
    anchors: AnchorSet,
    intervals: Vec<IntervalPieces>,
}

/// Fits the blended spline to `problem`.
pub fn fit<M: Manifold>(manifold: M, problem: &FitProblem) -> Result<BlendedSpline<M>> {
    let dim = manifold.ambient_dim();
    for (j, d) in problem.data.iter().enumerate() {
        manifold
            .check_point(d)
            .map_err(|e| Error::InvalidInput(format!("datum {j}: {e}")))?;
    }
    let n = problem.intervals;
    let anchors = AnchorSet::from_data(select_anchors(&problem.times, n), &problem.data)?;

    let mut left: Vec<Vec<CubicPiece>> = Vec::with_capacity(n);
    let mut right: Vec<Vec<CubicPiece>> = Vec::with_capacity(n);
    for i in 0..=n {
        let lifted = lift_data(&manifold, &anchors, i, &problem.data)?;
        debug_assert!(lifted.iter().all(|r| r.len() == dim));
        let spline = solve_smoothing_spline(&problem.times, &lifted, problem.lambda)?;
        if i > 0 {
            right.push(spline.restrict_to_window(i - 1)?);
        }
        if i < n {
            left.push(spline.restrict_to_window(i)?);
        }
    }
    let intervals = left
        .into_iter()
        .zip(right)
        .map(|(left, right)| IntervalPieces { left, right })
        .collect();

    Ok(BlendedSpline {
        manifold,
        lambda: problem.lambda,
        times: problem.times.times().to_vec(),
        anchors,
        intervals,
    })
}

fn pieces_cover(pieces: &[CubicPiece], lo: f64, hi: f64, dim: usize) -> bool {
    !pieces.is_empty()
        && pieces[0].breakpoints[0] == lo
        && pieces[pieces.len() - 1].breakpoints[1] == hi
        && pieces
            .windows(2)
            .all(|w| w[0].breakpoints[1] == w[1].breakpoints[0])
        && pieces.iter().all(|p| {
            p.breakpoints[0] < p.breakpoints[1] && p.control.iter().all(|c| c.len() == dim)
        })
}

impl<M: Manifold> BlendedSpline<M> {
    /// Reassembles a fitted curve from stored parts (as read from a model file).
    pub fn from_parts(
        manifold: M,
        lambda: f64,
        times: Vec<f64>,
        anchors: AnchorSet,
        intervals: Vec<IntervalPieces>,
    ) -> Result<Self> {
        let n = intervals.len();
        if n == 0 || anchors.len() != n + 1 {
            return Err(Error::InvalidInput(format!(
                "{} intervals need {} anchors, got {}",
                n,
                n + 1,
                anchors.len()
            )));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        KnotGrid::new(times.clone(), n as f64)?;
        let dim = manifold.ambient_dim();
        for (i, p) in anchors.points.iter().enumerate() {
            manifold
                .check_point(p)
                .map_err(|e| Error::InvalidInput(format!("anchor {i}: {e}")))?;
        }
        for (i, iv) in intervals.iter().enumerate() {
            let (lo, hi) = (i as f64, i as f64 + 1.0);
            if !pieces_cover(&iv.left, lo, hi, dim) || !pieces_cover(&iv.right, lo, hi, dim) {
                return Err(Error::InvalidInput(format!(
                    "pieces of interval {i} do not cover [{lo}, {hi}] with {dim}-dimensional control points"
                )));
            }
        }
        Ok(BlendedSpline {
            manifold,
            lambda,
            times,
            anchors,
            intervals,
        })
    }

    pub fn manifold(&self) -> &M {
        &self.manifold
    }

    /// Number of unit intervals `n`; the curve is defined on `[0, n]`.
    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn anchors(&self) -> &AnchorSet {
        &self.anchors
    }

    pub fn intervals(&self) -> &[IntervalPieces] {
        &self.intervals
    }

    /// Total number of stored tangent control vectors.
    pub fn tangent_control_count(&self) -> usize {
        self.intervals
            .iter()
            .map(|iv| 4 * (iv.left.len() + iv.right.len()))
            .sum()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let hi = self.n() as f64;
        if (0.0..=hi).contains(&t) {
            Ok(())
        } else {
            Err(Error::Domain { t, lo: 0.0, hi })
        }
    }

    fn tangent(&self, pieces: &[CubicPiece], anchor: usize, t: f64) -> Result<TangentVector> {
        let coords = eval_pieces(pieces, t).ok_or(Error::Domain {
            t,
            lo: pieces[0].breakpoints[0],
            hi: pieces[pieces.len() - 1].breakpoints[1],
        })?;
        TangentVector::new(self.anchors.points[anchor].clone(), coords)
    }

    /// Left and right tangent-space curve values on interval `i` at time `t`.
    pub fn tangent_values(&self, i: usize, t: f64) -> Result<(TangentVector, TangentVector)> {
        let iv = &self.intervals[i];
        Ok((
            self.tangent(&iv.left, i, t)?,
            self.tangent(&iv.right, i + 1, t)?,
        ))
    }

    /// The blended function of interval `i` at `t ∈ [i, i+1]`.
    pub fn eval_on_interval(&self, i: usize, t: f64) -> Result<Point> {
        if i >= self.n() {
            return Err(Error::InvalidInput(format!("interval {i} does not exist")));
        }
        let s = t - i as f64;
        let w = weight(s)?;
        let (tl, tr) = self.tangent_values(i, t)?;
        let l = self.manifold.exp(&self.anchors.points[i], &tl)?;
        let r = self.manifold.exp(&self.anchors.points[i + 1], &tr)?;
        self.manifold.weighted_mean_two(&l, &r, w)
    }

    /// `B(t)` for `t ∈ [0, n]`; `t = n` is evaluated on the last interval.
    pub fn eval(&self, t: f64) -> Result<Point> {
        self.check_domain(t)?;
        let i = (t.floor() as usize).min(self.n() - 1);
        self.eval_on_interval(i, t)
    }

    /// `‖Ḃ(t)‖` by a central geodesic difference, one-sided at the ends of the domain.
    pub fn speed(&self, t: f64, h: f64) -> Result<f64> {
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!(
                "step h must be positive, got {h}"
            )));
        }
        self.check_domain(t)?;
        let end = self.n() as f64;
        if t - h < 0.0 {
            let d = self
                .manifold
                .dist(&self.eval(t)?, &self.eval((t + h).min(end))?)?;
            Ok(d / h)
        } else if t + h > end {
            let d = self.manifold.dist(&self.eval(t - h)?, &self.eval(t)?)?;
            Ok(d / h)
        } else {
            let d = self.manifold.dist(&self.eval(t - h)?, &self.eval(t + h)?)?;
            Ok(d / (2.0 * h))
        }
    }

    /// Position and velocity gaps at every interior integer time.
    pub fn junction_report(&self, h: f64) -> Result<Vec<Junction>> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidInput(format!(
                "step h must be in (0, 1), got {h}"
            )));
        }
        (1..self.n())
            .map(|i| {
                let t = i as f64;
                let from_left = self.eval_on_interval(i - 1, t)?;
                let from_right = self.eval_on_interval(i, t)?;
                let position_gap = self.manifold.dist(&from_left, &from_right)?;
                let ahead = self.manifold.log(&from_right, &self.eval(t + h)?)?;
                let behind = self.manifold.log(&from_right, &self.eval(t - h)?)?;
                let v_right = ahead.scaled(1.0 / h);
                let v_left = behind.scaled(-1.0 / h);
                let diff = TangentVector::new(
                    from_right.clone(),
                    v_left
                        .coords()
                        .iter()
                        .zip(v_right.coords())
                        .map(|(a, b)| a - b)
                        .collect(),
                )?;
                Ok(Junction {
                    t: i,
                    position_gap,
                    velocity_gap: self.manifold.norm(&diff),
                    speed: self
                        .manifold
                        .norm(&v_left)
                        .max(self.manifold.norm(&v_right)),
                })
            })
            .collect()
    }

    /// `Σᵢ dist²(B(tᵢ), dᵢ)` against the given data.
    pub fn data_misfit(&self, data: &[Point]) -> Result<f64> {
        if data.len() != self.times.len() {
            return Err(Error::InvalidInput(format!(
                "{} data points for {} stored times",
                data.len(),
                self.times.len()
            )));
        }
        self.times
            .iter()
            .zip(data)
            .map(|(&t, d)| self.manifold.dist(&self.eval(t)?, d).map(|x| x * x))
            .sum()
    }
}
