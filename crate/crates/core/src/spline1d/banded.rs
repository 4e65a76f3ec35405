//! LDLᵀ factorization of symmetric positive-definite pentadiagonal matrices.

use crate::error::{Error, Result};

/// Symmetric matrix with two non-zero super-diagonals.
#[derive(Debug, Clone)]
pub(crate) struct Pentadiagonal {
    pub diag: Vec<f64>,
    /// `off1[i] = A[i][i+1]`
    pub off1: Vec<f64>,
    /// `off2[i] = A[i][i+2]`
    pub off2: Vec<f64>,
}

impl Pentadiagonal {
    pub fn zeros(n: usize) -> Self {
        Pentadiagonal {
            diag: vec![0.0; n],
            off1: vec![0.0; n.saturating_sub(1)],
            off2: vec![0.0; n.saturating_sub(2)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn factor(&self) -> Result<Ldlt> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        for i in 0..n {
            if i >= 2 {
                l2[i] = self.off2[i - 2] / d[i - 2];
            }
            if i >= 1 {
                let mut a = self.off1[i - 1];
                if i >= 2 {
                    a -= l2[i] * l1[i - 1] * d[i - 2];
                }
                l1[i] = a / d[i - 1];
            }
            let mut di = self.diag[i];
            if i >= 1 {
                di -= l1[i] * l1[i] * d[i - 1];
            }
            if i >= 2 {
                di -= l2[i] * l2[i] * d[i - 2];
            }
            if !(di > 0.0) || !di.is_finite() {
                return Err(Error::Singular { row: i, pivot: di });
            }
            d[i] = di;
        }
        Ok(Ldlt { d, l1, l2 })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Ldlt {
    d: Vec<f64>,
    l1: Vec<f64>,
    l2: Vec<f64>,
}

impl Ldlt {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 0..n {
            if i >= 1 {
                x[i] -= self.l1[i] * x[i - 1];
            }
            if i >= 2 {
                x[i] -= self.l2[i] * x[i - 2];
            }
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                x[i] -= self.l1[i + 1] * x[i + 1];
            }
            if i + 2 < n {
                x[i] -= self.l2[i + 2] * x[i + 2];
            }
        }
        x
    }
}
