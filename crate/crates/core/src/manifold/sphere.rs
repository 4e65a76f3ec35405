use super::{
    check_dim, check_exp_args, dot, Manifold, ManifoldDescriptor, ManifoldKind, Point,
    TangentVector, SPHERE_POINT_TOL, TANGENT_TOL,
};
use crate::error::{Error, Result};

/// Below this norm (or angle) the closed forms switch to their Taylor expansions.
const SMALL: f64 = 1e-8;
/// `⟨x, y⟩ ≤ −1 + CUT_TOL` is treated as antipodal.
const CUT_TOL: f64 = 1e-9;

/// The unit sphere S² embedded in R³ with the induced metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Sphere2;

fn norm3(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

impl Manifold for Sphere2 {
    fn descriptor(&self) -> ManifoldDescriptor {
        ManifoldDescriptor {
            kind: ManifoldKind::Sphere2,
            ambient_dim: 3,
        }
    }

    fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        check_exp_args(3, x, v)?;
        let x = x.coords();
        let v = v.coords();
        let nv = norm3(v);
        let (c, sinc) = if nv < SMALL {
            let n2 = nv * nv;
            (1.0 - 0.5 * n2, 1.0 - n2 / 6.0)
        } else {
            (nv.cos(), nv.sin() / nv)
        };
        let mut y: Vec<f64> = (0..3).map(|k| c * x[k] + sinc * v[k]).collect();
        let ny = norm3(&y);
        y.iter_mut().for_each(|e| *e /= ny);
        Ok(Point::new(y))
    }

    fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        check_dim(3, x.dim())?;
        check_dim(3, y.dim())?;
        let xc = x.coords();
        let yc = y.coords();
        let c = dot(xc, yc).clamp(-1.0, 1.0);
        if c <= -1.0 + CUT_TOL {
            return Err(Error::CutLocus(format!(
                "sphere points {xc:?} and {yc:?} are (nearly) antipodal, <x,y> = {c}"
            )));
        }
        // Component of y orthogonal to x; its norm is sin θ.
        let mut w: Vec<f64> = (0..3).map(|k| yc[k] - c * xc[k]).collect();
        let drift = dot(&w, xc);
        w.iter_mut().zip(xc).for_each(|(e, xk)| *e -= drift * xk);
        let s = norm3(&w);
        let theta = s.atan2(c);
        let factor = if theta < SMALL {
            1.0 + theta * theta / 6.0
        } else {
            theta / s
        };
        TangentVector::new(x.clone(), w.into_iter().map(|e| factor * e).collect())
    }

    fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        dot(u.coords(), v.coords())
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        check_dim(3, x.dim())?;
        let n = norm3(x.coords());
        if (n - 1.0).abs() <= SPHERE_POINT_TOL {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "point {:?} is not on the unit sphere (norm {n})",
                x.coords()
            )))
        }
    }

    fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        check_dim(3, v.coords().len())?;
        let d = dot(v.coords(), v.base().coords());
        if d.abs() <= TANGENT_TOL {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "vector is not tangent to the sphere at its base (<v,x> = {d})"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn p(c: [f64; 3]) -> Point {
        Point::new(c.to_vec())
    }

    #[test]
    fn quarter_great_circle() {
        let x = p([0.0, 0.0, 1.0]);
        let v = TangentVector::new(x.clone(), vec![FRAC_PI_2, 0.0, 0.0]).unwrap();
        let y = Sphere2.exp(&x, &v).unwrap();
        for (a, b) in y.coords().iter().zip([1.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn log_inverts_quarter_circle() {
        let v = Sphere2
            .log(&p([0.0, 0.0, 1.0]), &p([1.0, 0.0, 0.0]))
            .unwrap();
        for (a, b) in v.coords().iter().zip([FRAC_PI_2, 0.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(
            Sphere2
                .dist(&p([0.0, 0.0, 1.0]), &p([1.0, 0.0, 0.0]))
                .unwrap(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn log_of_self_is_zero() {
        let x = p([0.6, 0.0, 0.8]);
        let v = Sphere2.log(&x, &x).unwrap();
        assert!(v.coords().iter().all(|c| c.abs() == 0.0));
        assert_eq!(Sphere2.dist(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let x = p([0.6, 0.0, 0.8]);
        let y = Sphere2.exp(&x, &TangentVector::zero(x.clone())).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn arc_midpoint() {
        let m = Sphere2
            .weighted_mean_two(&p([0.0, 0.0, 1.0]), &p([1.0, 0.0, 0.0]), 0.5)
            .unwrap();
        for (a, b) in m.coords().iter().zip([SQRT_2 / 2.0, 0.0, SQRT_2 / 2.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn antipodal_log_is_refused() {
        let err = Sphere2
            .log(&p([0.0, 0.0, 1.0]), &p([0.0, 0.0, -1.0]))
            .unwrap_err();
        assert!(err.is_well_posedness());
        let near = p([1e-6, 0.0, -(1.0f64 - 1e-12).sqrt()]);
        assert!(Sphere2.log(&p([0.0, 0.0, 1.0]), &near).is_err());
    }

    #[test]
    fn tiny_steps_use_the_series_branch() {
        let x = p([0.0, 0.0, 1.0]);
        let v = TangentVector::new(x.clone(), vec![3e-9, -2e-9, 0.0]).unwrap();
        let y = Sphere2.exp(&x, &v).unwrap();
        let back = Sphere2.log(&x, &y).unwrap();
        for (a, b) in back.coords().iter().zip(v.coords()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-22);
        }
    }

    #[test]
    fn membership_checks() {
        assert!(Sphere2.check_point(&p([0.0, 0.0, 1.0])).is_ok());
        assert!(Sphere2.check_point(&p([0.0, 0.0, 1.001])).is_err());
        let x = p([0.0, 0.0, 1.0]);
        assert!(Sphere2
            .check_tangent(&TangentVector::new(x.clone(), vec![1.0, 0.0, 0.0]).unwrap())
            .is_ok());
        assert!(Sphere2
            .check_tangent(&TangentVector::new(x, vec![0.0, 0.0, 1.0]).unwrap())
            .is_err());
    }
}
