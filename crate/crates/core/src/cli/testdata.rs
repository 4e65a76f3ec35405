//! Deterministic synthetic datasets: a smooth curve or a geodesic random walk,
//! perturbed by Gaussian noise in the tangent space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::datafile::DataFile;
use crate::error::{Error, Result};
use crate::manifold::{Euclidean, Manifold, ManifoldKind, Point, So3, Sphere2, TangentVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TimeLayout {
    /// `t_i = t_end · i / (count − 1)`
    Uniform,
    /// Sorted uniform draws on `[0, t_end]`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Shape {
    /// Fixed smooth curve sampled at the data times.
    Curve,
    /// Random walk with geodesic steps of length in [0.4, 0.8].
    Walk,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestDataSpec {
    pub kind: ManifoldKind,
    pub dim: usize,
    pub count: usize,
    pub t_end: f64,
    pub noise: f64,
    pub seed: u64,
    pub times: TimeLayout,
    pub shape: Shape,
}

impl TestDataSpec {
    /// 100 noisy sphere points at random times in [0, 4].
    pub fn noisy_sphere(seed: u64) -> Self {
        TestDataSpec {
            kind: ManifoldKind::Sphere2,
            dim: 3,
            count: 100,
            t_end: 4.0,
            noise: 0.05,
            seed,
            times: TimeLayout::Random,
            shape: Shape::Curve,
        }
    }

    /// 10 well-separated sphere points at `t_i = i`.
    pub fn sphere_walk(seed: u64) -> Self {
        TestDataSpec {
            kind: ManifoldKind::Sphere2,
            dim: 3,
            count: 10,
            t_end: 9.0,
            noise: 0.0,
            seed,
            times: TimeLayout::Uniform,
            shape: Shape::Walk,
        }
    }
}

fn smooth_curve(kind: ManifoldKind, dim: usize, t: f64) -> Point {
    match kind {
        ManifoldKind::Sphere2 => {
            let (lon, lat) = (0.6 * t, 0.4 * (1.5 * t).sin());
            Point::new(vec![
                lat.cos() * lon.cos(),
                lat.cos() * lon.sin(),
                lat.sin(),
            ])
        }
        ManifoldKind::So3 => {
            So3::from_rotation_vector([0.5 * (0.7 * t).sin(), 0.25 * t, 0.3 * (0.9 * t).cos()])
        }
        ManifoldKind::Euclidean => Point::new(
            (0..dim)
                .map(|k| (0.7 * (k + 1) as f64 * t + k as f64).sin())
                .collect(),
        ),
    }
}

fn random_tangent(
    kind: ManifoldKind,
    base: &Point,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TangentVector> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    match kind {
        ManifoldKind::Sphere2 => {
            let mut g: Vec<f64> = (0..3).map(|_| scale * normal.sample(rng)).collect();
            let x = base.coords();
            let along: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
            g.iter_mut().zip(x).for_each(|(a, b)| *a -= along * b);
            TangentVector::new(base.clone(), g)
        }
        ManifoldKind::So3 => {
            let w = [0; 3].map(|_| scale * normal.sample(rng));
            So3::tangent_from_body_rate(base, w)
        }
        ManifoldKind::Euclidean => TangentVector::new(
            base.clone(),
            (0..base.dim())
                .map(|_| scale * normal.sample(rng))
                .collect(),
        ),
    }
}

fn exp(kind: ManifoldKind, dim: usize, x: &Point, v: &TangentVector) -> Result<Point> {
    match kind {
        ManifoldKind::Sphere2 => Sphere2.exp(x, v),
        ManifoldKind::So3 => So3.exp(x, v),
        ManifoldKind::Euclidean => Euclidean::new(dim).exp(x, v),
    }
}

/// Generates a dataset; identical specs give identical output.
pub fn generate(spec: &TestDataSpec) -> Result<DataFile> {
    if spec.count < 2 {
        return Err(Error::InvalidInput("count must be at least 2".into()));
    }
    if !(spec.t_end > 0.0 && spec.t_end.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t-end must be positive, got {}",
            spec.t_end
        )));
    }
    if !(spec.noise >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "noise must be non-negative, got {}",
            spec.noise
        )));
    }
    let dim = match spec.kind {
        ManifoldKind::Sphere2 => 3,
        ManifoldKind::So3 => 9,
        ManifoldKind::Euclidean if spec.dim >= 1 => spec.dim,
        ManifoldKind::Euclidean => {
            return Err(Error::InvalidInput("euclidean data need --dim".into()))
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let times: Vec<f64> = match spec.times {
        TimeLayout::Uniform => (0..spec.count)
            .map(|i| spec.t_end * i as f64 / (spec.count - 1) as f64)
            .collect(),
        TimeLayout::Random => loop {
            let mut t: Vec<f64> = (0..spec.count)
                .map(|_| rng.random_range(0.0..=spec.t_end))
                .collect();
            t.sort_by(f64::total_cmp);
            if t.windows(2).all(|w| w[1] - w[0] > 1e-9) {
                break t;
            }
        },
    };

    let clean: Vec<Point> = match spec.shape {
        Shape::Curve => times
            .iter()
            .map(|&t| smooth_curve(spec.kind, dim, t))
            .collect(),
        Shape::Walk => {
            let mut pts = Vec::with_capacity(spec.count);
            let origin = smooth_curve(spec.kind, dim, 0.0);
            let start = random_tangent(spec.kind, &origin, 1.0, &mut rng)?;
            pts.push(exp(spec.kind, dim, &origin, &start)?);
            while pts.len() < spec.count {
                let last = pts.last().expect("non-empty");
                let dir = random_tangent(spec.kind, last, 1.0, &mut rng)?;
                let len = rng.random_range(0.4..0.8);
                let norm = dir.coords().iter().map(|c| c * c).sum::<f64>().sqrt();
                let step = dir.scaled(len / norm);
                pts.push(exp(spec.kind, dim, last, &step)?);
            }
            pts
        }
    };

    let points = if spec.noise > 0.0 {
        clean
            .iter()
            .map(|p| {
                let v = random_tangent(spec.kind, p, spec.noise, &mut rng)?;
                exp(spec.kind, dim, p, &v)
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        clean
    };
    Ok(DataFile { times, points })
}
