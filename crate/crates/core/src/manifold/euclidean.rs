use super::{
    check_dim, check_exp_args, dot, Manifold, ManifoldDescriptor, ManifoldKind, Point,
    TangentVector,
};
use crate::error::{Error, Result};

/// Flat space `R^r`: exp is addition and log is subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Self {
        Euclidean { dim }
    }
}

impl Manifold for Euclidean {
    fn descriptor(&self) -> ManifoldDescriptor {
        ManifoldDescriptor {
            kind: ManifoldKind::Euclidean,
            ambient_dim: self.dim,
        }
    }

    fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        check_exp_args(self.dim, x, v)?;
        Ok(Point::new(
            x.coords()
                .iter()
                .zip(v.coords())
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        check_dim(self.dim, x.dim())?;
        check_dim(self.dim, y.dim())?;
        let coords = y
            .coords()
            .iter()
            .zip(x.coords())
            .map(|(b, a)| b - a)
            .collect();
        TangentVector::new(x.clone(), coords)
    }

    fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        dot(u.coords(), v.coords())
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        check_dim(self.dim, x.dim())?;
        if x.coords().iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput(
                "point has non-finite coordinates".into(),
            ))
        }
    }

    fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        check_dim(self.dim, v.coords().len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_is_addition() {
        let m = Euclidean::new(2);
        let x = Point::new(vec![1.0, 2.0]);
        let v = TangentVector::new(x.clone(), vec![3.0, 4.0]).unwrap();
        assert_eq!(m.exp(&x, &v).unwrap().coords(), &[4.0, 6.0]);
    }

    #[test]
    fn log_is_subtraction() {
        let m = Euclidean::new(2);
        let v = m
            .log(&Point::new(vec![1.0, 2.0]), &Point::new(vec![4.0, 6.0]))
            .unwrap();
        assert_eq!(v.coords(), &[3.0, 4.0]);
    }

    #[test]
    fn log_of_self_is_zero_and_dist_matches_norm() {
        let m = Euclidean::new(3);
        let x = Point::new(vec![0.3, -1.0, 2.5]);
        assert!(m.log(&x, &x).unwrap().coords().iter().all(|&c| c == 0.0));
        let y = Point::new(vec![3.3, 3.0, 2.5]);
        assert_eq!(m.dist(&x, &y).unwrap(), 5.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = Euclidean::new(2);
        let x = Point::new(vec![1.0, 2.0, 3.0]);
        assert!(matches!(
            m.log(&x, &x),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
    }
}
