//! Riemannian manifolds described only through their exponential and logarithm maps.
//!
//! Points and tangent vectors are stored in embedded (ambient) coordinates:
//! `r` entries for Euclidean space, a unit 3-vector for the sphere and a
//! row-major 3x3 matrix for rotations. Everything the fitting code needs is
//! expressed through [`Manifold::exp`], [`Manifold::log`] and the tangent
//! inner product.

mod counting;
mod euclidean;
mod so3;
mod sphere;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counting::{CallCounts, Counting};
pub use euclidean::Euclidean;
pub use so3::So3;
pub use sphere::Sphere2;

/// Unit-norm tolerance for sphere points.
pub const SPHERE_POINT_TOL: f64 = 1e-12;
/// Orthogonality tolerance `‖MᵀM − I‖_F` for rotation matrices.
pub const SO3_POINT_TOL: f64 = 1e-10;
/// Tangency tolerance for both curved manifolds.
pub const TANGENT_TOL: f64 = 1e-10;

/// A point of a manifold, in embedded coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point::new(coords)
    }
}

/// A tangent vector together with the point it is attached to.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: Point,
    coords: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: Point, coords: Vec<f64>) -> Result<Self> {
        if base.dim() != coords.len() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: coords.len(),
            });
        }
        Ok(TangentVector { base, coords })
    }

    pub fn zero(base: Point) -> Self {
        let coords = vec![0.0; base.dim()];
        TangentVector { base, coords }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn scaled(&self, a: f64) -> TangentVector {
        TangentVector {
            base: self.base.clone(),
            coords: self.coords.iter().map(|c| a * c).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Euclidean,
    Sphere2,
    So3,
}

impl ManifoldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ManifoldKind::Euclidean => "euclidean",
            ManifoldKind::Sphere2 => "sphere2",
            ManifoldKind::So3 => "so3",
        }
    }
}

impl fmt::Display for ManifoldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(ManifoldKind::Euclidean),
            "sphere2" => Ok(ManifoldKind::Sphere2),
            "so3" => Ok(ManifoldKind::So3),
            other => Err(Error::InvalidInput(format!(
                "unknown manifold kind `{other}`"
            ))),
        }
    }
}

/// Which manifold a model lives on, and its ambient dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldDescriptor {
    pub kind: ManifoldKind,
    pub ambient_dim: usize,
}

impl ManifoldDescriptor {
    pub fn new(kind: ManifoldKind, ambient_dim: usize) -> Result<Self> {
        let ok = match kind {
            ManifoldKind::Euclidean => ambient_dim >= 1,
            ManifoldKind::Sphere2 => ambient_dim == 3,
            ManifoldKind::So3 => ambient_dim == 9,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "ambient dimension {ambient_dim} is not valid for {kind}"
            )));
        }
        Ok(ManifoldDescriptor { kind, ambient_dim })
    }
}

/// The exp/log interface every fitting routine is written against.
///
/// `dist` and `weighted_mean_two` are provided in terms of `exp`, `log` and
/// `inner`, so an implementation only supplies the two maps and the metric.
pub trait Manifold {
    fn descriptor(&self) -> ManifoldDescriptor;

    fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point>;

    fn log(&self, x: &Point, y: &Point) -> Result<TangentVector>;

    /// Riemannian metric at the common base point of `u` and `v`.
    fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64;

    /// Checks that `x` lies on the manifold to the documented tolerance.
    fn check_point(&self, x: &Point) -> Result<()>;

    /// Checks that `v` is tangent at its base point.
    fn check_tangent(&self, v: &TangentVector) -> Result<()>;

    fn ambient_dim(&self) -> usize {
        self.descriptor().ambient_dim
    }

    fn norm(&self, v: &TangentVector) -> f64 {
        self.inner(v, v).sqrt()
    }

    fn dist(&self, x: &Point, y: &Point) -> Result<f64> {
        let v = self.log(x, y)?;
        Ok(self.norm(&v))
    }

    /// Geodesic combination `exp_x(a · log_x(y))`.
    ///
    /// The logarithm is always evaluated, so the result is well-posed for
    /// every `a` or for none. The endpoints return `x` and `y` exactly.
    fn weighted_mean_two(&self, x: &Point, y: &Point, a: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::InvalidInput(format!("weight {a} is outside [0, 1]")));
        }
        let v = self.log(x, y)?;
        let mean = self.exp(x, &v.scaled(a))?;
        if a == 0.0 {
            Ok(x.clone())
        } else if a == 1.0 {
            Ok(y.clone())
        } else {
            Ok(mean)
        }
    }
}

/// One of the shipped manifolds, chosen at run time from a descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnyManifold {
    Euclidean(Euclidean),
    Sphere2(Sphere2),
    So3(So3),
}

impl AnyManifold {
    pub fn from_descriptor(desc: ManifoldDescriptor) -> Result<Self> {
        let desc = ManifoldDescriptor::new(desc.kind, desc.ambient_dim)?;
        Ok(match desc.kind {
            ManifoldKind::Euclidean => AnyManifold::Euclidean(Euclidean::new(desc.ambient_dim)),
            ManifoldKind::Sphere2 => AnyManifold::Sphere2(Sphere2),
            ManifoldKind::So3 => AnyManifold::So3(So3),
        })
    }

    fn inner_ref(&self) -> &dyn Manifold {
        match self {
            AnyManifold::Euclidean(m) => m,
            AnyManifold::Sphere2(m) => m,
            AnyManifold::So3(m) => m,
        }
    }
}

impl Manifold for AnyManifold {
    fn descriptor(&self) -> ManifoldDescriptor {
        self.inner_ref().descriptor()
    }

    fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        self.inner_ref().exp(x, v)
    }

    fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.inner_ref().log(x, y)
    }

    fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        self.inner_ref().inner(u, v)
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        self.inner_ref().check_point(x)
    }

    fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        self.inner_ref().check_tangent(v)
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Shared argument validation for `exp`.
pub(crate) fn check_exp_args(dim: usize, x: &Point, v: &TangentVector) -> Result<()> {
    check_dim(dim, x.dim())?;
    check_dim(dim, v.coords().len())?;
    if v.base() != x {
        return Err(Error::InvalidInput(
            "tangent vector is not attached to the point it is applied at".into(),
        ));
    }
    Ok(())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_dimensions() {
        assert!(ManifoldDescriptor::new(ManifoldKind::Sphere2, 3).is_ok());
        assert!(ManifoldDescriptor::new(ManifoldKind::Sphere2, 4).is_err());
        assert!(ManifoldDescriptor::new(ManifoldKind::So3, 9).is_ok());
        assert!(ManifoldDescriptor::new(ManifoldKind::So3, 3).is_err());
        assert!(ManifoldDescriptor::new(ManifoldKind::Euclidean, 0).is_err());
        assert!(ManifoldDescriptor::new(ManifoldKind::Euclidean, 5).is_ok());
    }

    #[test]
    fn kind_round_trips_through_strings() {
        for k in [
            ManifoldKind::Euclidean,
            ManifoldKind::Sphere2,
            ManifoldKind::So3,
        ] {
            assert_eq!(k.as_str().parse::<ManifoldKind>().unwrap(), k);
        }
        assert!("hyperbolic".parse::<ManifoldKind>().is_err());
    }

    #[test]
    fn weighted_mean_rejects_weights_outside_unit_interval() {
        let m = Euclidean::new(1);
        let x = Point::new(vec![0.0]);
        let y = Point::new(vec![1.0]);
        assert!(m.weighted_mean_two(&x, &y, -0.1).is_err());
        assert!(m.weighted_mean_two(&x, &y, 1.1).is_err());
        assert_eq!(m.weighted_mean_two(&x, &y, 0.25).unwrap().coords(), &[0.25]);
    }

    #[test]
    fn exp_rejects_foreign_tangent_vector() {
        let m = Euclidean::new(2);
        let x = Point::new(vec![0.0, 0.0]);
        let v = TangentVector::new(Point::new(vec![1.0, 0.0]), vec![1.0, 1.0]).unwrap();
        assert!(matches!(m.exp(&x, &v), Err(Error::InvalidInput(_))));
    }
}
