//! Floating-point scalar abstraction shared by every numeric routine.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// IEEE floating-point type the numeric layers are generic over (`f32`, `f64`).
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Converts an `f64` literal. Every finite `f64` has a nearest value in
    /// the supported types, so this never fails for them.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `n` Chebyshev–Gauss nodes on `[lo, hi]`, ascending. The nodes are strictly
/// interior, so endpoint singularities are never sampled.
pub fn chebyshev_nodes<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    let mid = (lo + hi) / T::lit(2.0);
    let half = (hi - lo) / T::lit(2.0);
    let n_t = T::lit(n as f64);
    (0..n)
        .rev()
        .map(|k| {
            let theta = T::PI() * T::lit(2.0 * k as f64 + 1.0) / (T::lit(2.0) * n_t);
            mid + half * theta.cos()
        })
        .collect()
}

/// `n` equally spaced points on `[lo, hi]` including both endpoints.
pub fn uniform_nodes<T: Scalar>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::lit((n - 1) as f64);
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * T::lit(i as f64) })
                .collect()
        }
    }
}
