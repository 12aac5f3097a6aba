//! Adaptive integration of the linear ODEs the pairings need, and grid
//! representations of coefficients that have no closed form.

mod coeff;
mod grid;
mod integrate;
mod linear;

pub use coeff::{CoeffFn, Lifter};
pub use grid::{Grid, MAX_GRID_ORDER};
pub use integrate::{integrate_system, Rhs};
pub use linear::{grid_eval, solve_forced2, solve_linear1, solve_linear2, MIN_GRID_STEPS};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default absolute and relative integrator tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Initial value problem on `[lo, hi]` with the state given at `origin`.
///
/// `origin` is normally an endpoint. An interior origin integrates both
/// ways and yields one ascending trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Ivp<T> {
    pub origin: T,
    pub lo: T,
    pub hi: T,
    pub state: Vec<T>,
    pub atol: T,
    pub rtol: T,
    /// Upper bound on the step length, if any.
    pub max_step: Option<T>,
}

impl<T: Scalar> Ivp<T> {
    /// State given at `a`, integrated towards `b` (either direction).
    pub fn new(a: T, b: T, state: Vec<T>) -> Self {
        Ivp {
            origin: a,
            lo: a.min(b),
            hi: a.max(b),
            state,
            atol: T::lit(DEFAULT_TOL),
            rtol: T::lit(DEFAULT_TOL),
            max_step: None,
        }
    }

    /// State given at `origin` inside `[lo, hi]`.
    pub fn interior(origin: T, lo: T, hi: T, state: Vec<T>) -> Self {
        Ivp {
            origin,
            lo,
            hi,
            ..Ivp::new(lo, hi, state)
        }
    }

    pub fn with_tolerances(mut self, atol: T, rtol: T) -> Self {
        self.atol = atol;
        self.rtol = rtol;
        self
    }

    pub fn with_max_step(mut self, h: T) -> Self {
        self.max_step = Some(h);
        self
    }

    pub fn with_state(mut self, state: Vec<T>) -> Self {
        self.state = state;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::InvalidIvp(format!(
                "empty interval [{}, {}]",
                self.lo, self.hi
            )));
        }
        if !(self.origin >= self.lo && self.origin <= self.hi) {
            return Err(Error::InvalidIvp(format!(
                "initial point {} outside [{}, {}]",
                self.origin, self.lo, self.hi
            )));
        }
        if !(self.atol > T::zero() && self.rtol > T::zero()) {
            return Err(Error::InvalidIvp("tolerances must be positive".into()));
        }
        if self.max_step.is_some_and(|h| !(h > T::zero())) {
            return Err(Error::InvalidIvp("maximum step must be positive".into()));
        }
        if self.state.is_empty() || !self.state.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidIvp("initial state must be finite and non-empty".into()));
        }
        Ok(())
    }
}

/// Accepted steps of an integration: the state and its derivative at each
/// step end. Forward and two-sided runs are ascending, backward runs
/// descending.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    xs: Vec<T>,
    states: Vec<Vec<T>>,
    rates: Vec<Vec<T>>,
    pub atol: T,
    pub rtol: T,
    pub accepted: usize,
    pub rejected: usize,
}

impl<T: Scalar> Trajectory<T> {
    fn start(x: T, state: Vec<T>, rate: Vec<T>, atol: T, rtol: T) -> Self {
        Trajectory {
            xs: vec![x],
            states: vec![state],
            rates: vec![rate],
            atol,
            rtol,
            accepted: 0,
            rejected: 0,
        }
    }

    fn push(&mut self, x: T, state: Vec<T>, rate: Vec<T>) {
        self.xs.push(x);
        self.states.push(state);
        self.rates.push(rate);
    }

    /// Glues a run from the origin down to `lo` and one from the origin up
    /// to `hi` into one ascending trajectory.
    fn join(left: Trajectory<T>, right: Trajectory<T>) -> Self {
        let mut out = Trajectory {
            xs: left.xs.into_iter().rev().collect(),
            states: left.states.into_iter().rev().collect(),
            rates: left.rates.into_iter().rev().collect(),
            atol: left.atol,
            rtol: left.rtol,
            accepted: left.accepted + right.accepted,
            rejected: left.rejected + right.rejected,
        };
        out.xs.extend(right.xs.into_iter().skip(1));
        out.states.extend(right.states.into_iter().skip(1));
        out.rates.extend(right.rates.into_iter().skip(1));
        out
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn states(&self) -> &[Vec<T>] {
        &self.states
    }

    pub fn rates(&self) -> &[Vec<T>] {
        &self.rates
    }

    pub fn state(&self, i: usize) -> &[T] {
        &self.states[i]
    }

    pub fn span(&self) -> (T, T) {
        let (a, b) = (self.xs[0], self.xs[self.xs.len() - 1]);
        (a.min(b), a.max(b))
    }

    /// Multiplies every state and rate by `c` (exact for linear homogeneous
    /// problems).
    pub fn scaled(mut self, c: T) -> Self {
        for v in self.states.iter_mut().chain(self.rates.iter_mut()) {
            for e in v.iter_mut() {
                *e = *e * c;
            }
        }
        self
    }

    /// State at `x` by cubic Hermite interpolation of each component.
    pub fn interpolate(&self, x: T) -> Result<Vec<T>> {
        let (lo, hi) = self.span();
        let slack = (hi - lo) * T::lit(1e-12);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfSpan {
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let n = self.xs.len();
        if n == 1 {
            return Ok(self.states[0].clone());
        }
        let ascending = self.xs[0] < self.xs[n - 1];
        let i = if ascending {
            self.xs.partition_point(|v| *v <= x)
        } else {
            self.xs.partition_point(|v| *v >= x)
        }
        .saturating_sub(1)
        .min(n - 2);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        Ok((0..self.states[i].len())
            .map(|k| {
                h00 * self.states[i][k]
                    + h10 * h * self.rates[i][k]
                    + h01 * self.states[i + 1][k]
                    + h11 * h * self.rates[i + 1][k]
            })
            .collect())
    }

    /// Component `k` as a grid function (value and derivative at the steps).
    pub fn component(&self, k: usize) -> Result<Grid<T>> {
        Grid::from_unsorted(
            self.xs.clone(),
            self.states.iter().map(|s| s[k]).collect(),
            self.rates.iter().map(|r| r[k]).collect(),
            None,
        )
    }

    /// For a `(f, f')` state: `f` as a grid carrying `f'` and `f''`.
    pub fn jet_grid(&self) -> Result<Grid<T>> {
        if self.states.first().map_or(0, Vec::len) < 2 {
            return Err(Error::InvalidArgument("jet_grid needs a state (f, f')".into()));
        }
        Grid::from_unsorted(
            self.xs.clone(),
            self.states.iter().map(|s| s[0]).collect(),
            self.states.iter().map(|s| s[1]).collect(),
            Some(self.rates.iter().map(|r| r[1]).collect()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ivp_validation() {
        assert!(Ivp::new(0.0, 0.0, vec![1.0]).validate().is_err());
        assert!(Ivp::new(0.0, 1.0, vec![]).validate().is_err());
        assert!(Ivp::new(0.0, 1.0, vec![1.0]).with_tolerances(0.0, 1e-8).validate().is_err());
        assert!(Ivp::interior(2.0, 0.0, 1.0, vec![1.0]).validate().is_err());
        let back = Ivp::new(1.0, -1.0, vec![1.0]);
        assert_eq!((back.lo, back.hi, back.origin), (-1.0, 1.0, 1.0));
        assert!(back.validate().is_ok());
    }

    #[test]
    fn dense_output_of_the_sine() {
        let rhs = |_x: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -y[0];
            Ok(())
        };
        let t = integrate_system(rhs, &Ivp::new(0.0, 3.0, vec![0.0, 1.0])).unwrap();
        for x in [0.3, 1.234, 2.9] {
            let s = t.interpolate(x).unwrap();
            assert!((s[0] - f64::sin(x)).abs() < 1e-5);
        }
        assert!(t.interpolate(3.5).is_err());
        let g = t.component(0).unwrap();
        assert!((g.eval(1.0, 0).unwrap() - 1f64.sin()).abs() < 1e-5);
    }
}
