use std::sync::atomic::{AtomicUsize, Ordering};

use super::{Manifold, ManifoldDescriptor, Point, TangentVector};
use crate::error::Result;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CallCounts {
    pub exp: usize,
    pub log: usize,
}

/// Wraps a manifold and counts calls to `exp` and `log`.
#[derive(Debug, Default)]
pub struct Counting<M> {
    inner: M,
    exp_calls: AtomicUsize,
    log_calls: AtomicUsize,
}

impl<M> Counting<M> {
    pub fn new(inner: M) -> Self {
        Counting {
            inner,
            exp_calls: AtomicUsize::new(0),
            log_calls: AtomicUsize::new(0),
        }
    }

    pub fn counts(&self) -> CallCounts {
        CallCounts {
            exp: self.exp_calls.load(Ordering::Relaxed),
            log: self.log_calls.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.exp_calls.store(0, Ordering::Relaxed);
        self.log_calls.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: Manifold> Manifold for Counting<M> {
    fn descriptor(&self) -> ManifoldDescriptor {
        self.inner.descriptor()
    }

    fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        self.exp_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.exp(x, v)
    }

    fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.log_calls.fetch_add(1, Ordering::Relaxed);
        self.inner.log(x, y)
    }

    fn inner(&self, u: &TangentVector, v: &TangentVector) -> f64 {
        self.inner.inner(u, v)
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        self.inner.check_point(x)
    }

    fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        self.inner.check_tangent(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Sphere2;

    #[test]
    fn counts_and_resets() {
        let m = Counting::new(Sphere2);
        let x = Point::new(vec![0.0, 0.0, 1.0]);
        let y = Point::new(vec![0.0, 1.0, 0.0]);
        m.weighted_mean_two(&x, &y, 0.3).unwrap();
        m.dist(&x, &y).unwrap();
        assert_eq!(m.counts(), CallCounts { exp: 1, log: 2 });
        m.reset();
        assert_eq!(m.counts(), CallCounts::default());
    }
}
