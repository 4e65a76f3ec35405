use std::f64::consts::PI;

use super::{
    check_dim, check_exp_args, dot, Manifold, ManifoldDescriptor, ManifoldKind, Point,
    TangentVector, SO3_POINT_TOL, TANGENT_TOL,
};
use crate::error::{Error, Result};

const SMALL: f64 = 1e-8;
/// Relative rotations with angle at least `π − CUT_TOL` have no unique logarithm.
const CUT_TOL: f64 = 1e-6;

type Mat3 = [f64; 9];

/// The rotation group SO(3) as row-major 3x3 matrices.
///
/// Tangent vectors at `B` are ambient matrices `V` with `BᵀV` skew-symmetric.
/// The metric is the ambient Frobenius inner product, so the distance between
/// two rotations is `√2` times their relative rotation angle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct So3;

fn as_mat(c: &[f64]) -> Mat3 {
    let mut m = [0.0; 9];
    m.copy_from_slice(c);
    m
}

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = (0..3).map(|k| a[3 * i + k] * b[3 * k + j]).sum();
        }
    }
    out
}

/// `aᵀ b`
fn tmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            out[3 * i + j] = (0..3).map(|k| a[3 * k + i] * b[3 * k + j]).sum();
        }
    }
    out
}

fn hat(w: [f64; 3]) -> Mat3 {
    [0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0]
}

/// Axial vector of the skew part of `m`.
fn vee_skew(m: &Mat3) -> [f64; 3] {
    [
        0.5 * (m[7] - m[5]),
        0.5 * (m[2] - m[6]),
        0.5 * (m[3] - m[1]),
    ]
}

fn det(m: &Mat3) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
        + m[2] * (m[3] * m[7] - m[4] * m[6])
}

/// Rodrigues' formula for the rotation with rotation vector `w`.
pub(crate) fn rotation_from_vector(w: [f64; 3]) -> Mat3 {
    let theta = dot(&w, &w).sqrt();
    let (a, b) = if theta < SMALL {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    let k = hat(w);
    let k2 = mul(&k, &k);
    let mut r = [0.0; 9];
    for i in 0..9 {
        r[i] = a * k[i] + b * k2[i];
    }
    r[0] += 1.0;
    r[4] += 1.0;
    r[8] += 1.0;
    r
}

/// Rotation vector of `r`, refusing angles in the band next to π.
fn vector_from_rotation(r: &Mat3) -> Result<[f64; 3]> {
    let cos = ((r[0] + r[4] + r[8] - 1.0) * 0.5).clamp(-1.0, 1.0);
    let s = vee_skew(r);
    let sin = dot(&s, &s).sqrt();
    let theta = sin.atan2(cos);
    if theta >= PI - CUT_TOL {
        return Err(Error::CutLocus(format!(
            "relative rotation angle {theta} is within {CUT_TOL} of pi"
        )));
    }
    if theta < SMALL {
        let f = 1.0 + theta * theta / 6.0;
        return Ok([f * s[0], f * s[1], f * s[2]]);
    }
    if cos > -0.5 {
        let f = theta / sin;
        return Ok([f * s[0], f * s[1], f * s[2]]);
    }
    // Large angles: the skew part is small, so read the axis off the symmetric
    // part (R + Rᵀ)/2 − cos·I = (1 − cos) a aᵀ and take its sign from the skew part.
    let one_minus = 1.0 - cos;
    let sym =
        |i: usize, j: usize| 0.5 * (r[3 * i + j] + r[3 * j + i]) - if i == j { cos } else { 0.0 };
    let k = (0..3)
        .max_by(|&i, &j| sym(i, i).total_cmp(&sym(j, j)))
        .unwrap_or(0);
    let mut axis = [sym(0, k), sym(1, k), sym(2, k)];
    let scale = (sym(k, k) * one_minus).sqrt();
    axis.iter_mut().for_each(|a| *a /= scale);
    let n = dot(&axis, &axis).sqrt();
    axis.iter_mut().for_each(|a| *a /= n);
    if dot(&axis, &s) < 0.0 {
        axis.iter_mut().for_each(|a| *a = -*a);
    }
    Ok([theta * axis[0], theta * axis[1], theta * axis[2]])
}

impl So3 {
    /// Rotation `exp(hat(w))` for a rotation vector `w`.
    pub fn from_rotation_vector(w: [f64; 3]) -> Point {
        Point::new(rotation_from_vector(w).to_vec())
    }

    /// Tangent vector `B·hat(w)` at `base`, i.e. body angular velocity `w`.
    /// Its norm is `√2·|w|`.
    pub fn tangent_from_body_rate(base: &Point, w: [f64; 3]) -> Result<TangentVector> {
        check_dim(9, base.dim())?;
        TangentVector::new(base.clone(), mul(&as_mat(base.coords()), &hat(w)).to_vec())
    }
}

impl Manifold for So3 {
    fn descriptor(&self) -> ManifoldDescriptor {
        ManifoldDescriptor {
            kind: ManifoldKind::So3,
            ambient_dim: 9,
        }
    }

    fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        check_exp_args(9, x, v)?;
        let b = as_mat(x.coords());
        let omega = tmul(&b, &as_mat(v.coords()));
        let r = rotation_from_vector(vee_skew(&omega));
        Ok(Point::new(mul(&b, &r).to_vec()))
    }

    fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        check_dim(9, x.dim())?;
        check_dim(9, y.dim())?;
        let b = as_mat(x.coords());
        let rel = tmul(&b, &as_mat(y.coords()));
        let w = vector_from_rotation(&rel)?;
        TangentVector::new(x.clone(), mul(&b, &hat(w)).to_vec())
    }

    fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        dot(u.coords(), v.coords())
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        check_dim(9, x.dim())?;
        let m = as_mat(x.coords());
        let g = tmul(&m, &m);
        let err = (0..9)
            .map(|i| {
                let id = if i % 4 == 0 { 1.0 } else { 0.0 };
                (g[i] - id).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if err > SO3_POINT_TOL {
            return Err(Error::InvalidInput(format!(
                "matrix is not orthogonal (|MᵀM − I|_F = {err})"
            )));
        }
        if det(&m) <= 0.0 {
            return Err(Error::InvalidInput(
                "matrix has non-positive determinant".into(),
            ));
        }
        Ok(())
    }

    fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        check_dim(9, v.coords().len())?;
        let o = tmul(&as_mat(v.base().coords()), &as_mat(v.coords()));
        let asym = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| (o[3 * i + j] + o[3 * j + i]).abs())
            .fold(0.0, f64::max);
        if asym <= TANGENT_TOL {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "BᵀV is not skew-symmetric (max |Ω + Ωᵀ| = {asym})"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    const I: Mat3 = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];

    fn rot_z(theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(vec![c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
    }

    #[test]
    fn exp_of_quarter_turn_about_z() {
        let id = Point::new(I.to_vec());
        let v = TangentVector::new(id.clone(), hat([0.0, 0.0, FRAC_PI_2]).to_vec()).unwrap();
        let r = So3.exp(&id, &v).unwrap();
        let expected = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        for (a, b) in r.coords().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn dist_is_scaled_rotation_angle() {
        let id = Point::new(I.to_vec());
        for theta in [1e-9, 1e-3, 0.5, 2.0, 2.9, 3.1, PI - 1e-5] {
            assert_abs_diff_eq!(
                So3.dist(&id, &rot_z(theta)).unwrap(),
                SQRT_2 * theta,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn log_of_self_is_zero() {
        let x = rot_z(0.7);
        let v = So3.log(&x, &x).unwrap();
        assert!(v.coords().iter().all(|c| c.abs() < 1e-16));
    }

    #[test]
    fn half_turn_is_refused() {
        let id = Point::new(I.to_vec());
        let err = So3.log(&id, &rot_z(PI)).unwrap_err();
        assert!(err.is_well_posedness());
        assert!(So3.log(&id, &rot_z(PI - 1e-7)).is_err());
    }

    #[test]
    fn large_angle_log_round_trips() {
        let axis = [0.48, -0.6, 0.64];
        for theta in [2.2, 2.8, 3.0, 3.1] {
            let w = axis.map(|a| a * theta);
            let id = Point::new(I.to_vec());
            let v = TangentVector::new(id.clone(), hat(w).to_vec()).unwrap();
            let r = So3.exp(&id, &v).unwrap();
            let back = So3.log(&id, &r).unwrap();
            for (a, b) in back.coords().iter().zip(v.coords()) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn exp_near_zero_matches_first_order() {
        let id = Point::new(I.to_vec());
        let omega = hat([4e-9, -3e-9, 5e-9]);
        let r = So3
            .exp(
                &id,
                &TangentVector::new(id.clone(), omega.to_vec()).unwrap(),
            )
            .unwrap();
        let err: f64 = (0..9)
            .map(|i| (r.coords()[i] - I[i] - omega[i]).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-15, "err = {err}");
    }

    #[test]
    fn membership_checks() {
        assert!(So3.check_point(&rot_z(0.3)).is_ok());
        let reflection = Point::new(vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0]);
        assert!(So3.check_point(&reflection).is_err());
        let scaled = Point::new(I.iter().map(|v| v * 1.01).collect());
        assert!(So3.check_point(&scaled).is_err());
        let x = rot_z(0.3);
        let good = TangentVector::new(
            x.clone(),
            mul(&as_mat(x.coords()), &hat([0.1, 0.2, 0.3])).to_vec(),
        )
        .unwrap();
        assert!(So3.check_tangent(&good).is_ok());
        let bad = TangentVector::new(x, I.to_vec()).unwrap();
        assert!(So3.check_tangent(&bad).is_err());
    }
}
