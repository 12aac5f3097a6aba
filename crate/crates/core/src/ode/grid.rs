use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A function known at strictly increasing nodes through its value, first
/// derivative and (optionally) second derivative.
///
/// Between nodes it is the Hermite interpolant of the stored data: cubic
/// from `(f, f')`, quintic when `f''` is present.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    nodes: Vec<T>,
    values: Vec<T>,
    slopes: Vec<T>,
    curvatures: Option<Vec<T>>,
}

/// Highest derivative order a grid answers: the interpolating polynomial
/// has degree at most five, and orders above three carry no information.
pub const MAX_GRID_ORDER: usize = 3;

impl<T> Grid<T> {
    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl<T: Copy> Grid<T> {
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn slopes(&self) -> &[T] {
        &self.slopes
    }

    pub fn curvatures(&self) -> Option<&[T]> {
        self.curvatures.as_deref()
    }

    pub fn span(&self) -> (T, T) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

impl<T: Scalar> Grid<T> {
    pub fn new(nodes: Vec<T>, values: Vec<T>, slopes: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes".into()));
        }
        if values.len() != nodes.len() || slopes.len() != nodes.len() {
            return Err(Error::InvalidGrid("array lengths differ".into()));
        }
        if !nodes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
        }
        if !nodes
            .iter()
            .chain(&values)
            .chain(&slopes)
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidGrid("non-finite entry".into()));
        }
        Ok(Grid {
            nodes,
            values,
            slopes,
            curvatures: None,
        })
    }

    /// Attaches exact second derivatives at the nodes.
    pub fn with_curvatures(mut self, curvatures: Vec<T>) -> Result<Self> {
        if curvatures.len() != self.nodes.len() {
            return Err(Error::InvalidGrid("curvature length differs".into()));
        }
        if !curvatures.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite curvature".into()));
        }
        self.curvatures = Some(curvatures);
        Ok(self)
    }

    /// Builds a grid from samples in any monotone order.
    pub fn from_unsorted(
        nodes: Vec<T>,
        values: Vec<T>,
        slopes: Vec<T>,
        curvatures: Option<Vec<T>>,
    ) -> Result<Self> {
        let descending = nodes.len() >= 2 && nodes[0] > nodes[nodes.len() - 1];
        let fix = |mut v: Vec<T>| {
            if descending {
                v.reverse();
            }
            v
        };
        let grid = Grid::new(fix(nodes), fix(values), fix(slopes))?;
        match curvatures {
            Some(c) => grid.with_curvatures(fix(c)),
            None => Ok(grid),
        }
    }

    /// Index `i` of the cell `[x_i, x_{i+1}]` holding `x`.
    fn cell(&self, x: T) -> Result<usize> {
        let (lo, hi) = self.span();
        // rounding slack only; anything further out is a caller error
        let slack = (hi - lo) * T::lit(1e-12);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::OutOfSpan {
                x: x.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let i = self.nodes.partition_point(|n| *n <= x);
        Ok(i.saturating_sub(1).min(self.nodes.len() - 2))
    }

    /// Local polynomial coefficients in `s = x - x_i` for cell `i`.
    fn cell_poly(&self, i: usize) -> [T; 6] {
        let h = self.nodes[i + 1] - self.nodes[i];
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let two = T::lit(2.0);
        match &self.curvatures {
            None => {
                let delta = (f1 - f0) / h;
                let c2 = (T::lit(3.0) * delta - two * d0 - d1) / h;
                let c3 = (d0 + d1 - two * delta) / (h * h);
                [f0, d0, c2, c3, T::zero(), T::zero()]
            }
            Some(curv) => {
                let (a0, a1) = (curv[i], curv[i + 1]);
                let a = (f1 - (f0 + d0 * h + a0 * h * h / two)) / (h * h * h);
                let b = (d1 - (d0 + a0 * h)) / (h * h);
                let c = (a1 - a0) / h;
                let half = T::lit(0.5);
                let c3 = T::lit(10.0) * a - T::lit(4.0) * b + half * c;
                let c4 = (T::lit(-15.0) * a + T::lit(7.0) * b - c) / h;
                let c5 = (T::lit(6.0) * a - T::lit(3.0) * b + half * c) / (h * h);
                [f0, d0, a0 / two, c3, c4, c5]
            }
        }
    }

    /// Derivative of order `order` (0 = value) at `x`.
    pub fn eval(&self, x: T, order: usize) -> Result<T> {
        if order > MAX_GRID_ORDER {
            return Err(Error::Unavailable {
                what: format!("derivative of order {order} of a grid function"),
            });
        }
        let i = self.cell(x)?;
        let s = x - self.nodes[i];
        Ok(poly_derivative(&self.cell_poly(i), s, order))
    }

    /// `(f, f', f'')` at `x`.
    pub fn jet(&self, x: T) -> Result<(T, T, T)> {
        let i = self.cell(x)?;
        let s = x - self.nodes[i];
        let p = self.cell_poly(i);
        Ok((
            poly_derivative(&p, s, 0),
            poly_derivative(&p, s, 1),
            poly_derivative(&p, s, 2),
        ))
    }
}

fn poly_derivative<T: Scalar>(coeffs: &[T; 6], s: T, order: usize) -> T {
    // falling factorial k!/(k-order)! times c_k s^(k-order), by Horner
    let mut acc = T::zero();
    for k in (order..6).rev() {
        let mut factor = 1.0;
        for j in 0..order {
            factor *= (k - j) as f64;
        }
        acc = acc * s + coeffs[k] * T::lit(factor);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> (f64, f64, f64), xs: &[f64], quintic: bool) -> Grid<f64> {
        let jets: Vec<_> = xs.iter().map(|&x| f(x)).collect();
        let g = Grid::new(
            xs.to_vec(),
            jets.iter().map(|j| j.0).collect(),
            jets.iter().map(|j| j.1).collect(),
        )
        .unwrap();
        if quintic {
            g.with_curvatures(jets.iter().map(|j| j.2).collect()).unwrap()
        } else {
            g
        }
    }

    #[test]
    fn cubic_reproduces_cubics_exactly() {
        let f = |x: f64| (x * x * x - x, 3.0 * x * x - 1.0, 6.0 * x);
        let g = sampled(f, &[0.0, 0.7, 1.5, 2.0], false);
        for x in [0.1, 0.9, 1.99] {
            let (v, d, dd) = g.jet(x).unwrap();
            let (ev, ed, edd) = f(x);
            assert!((v - ev).abs() < 1e-13 && (d - ed).abs() < 1e-12 && (dd - edd).abs() < 1e-11);
        }
    }

    #[test]
    fn quintic_reproduces_quintics_exactly() {
        let f = |x: f64| {
            (
                x.powi(5) - 2.0 * x.powi(3),
                5.0 * x.powi(4) - 6.0 * x * x,
                20.0 * x.powi(3) - 12.0 * x,
            )
        };
        let g = sampled(f, &[-1.0, 0.2, 1.0], true);
        for x in [-0.5, 0.5, 0.99] {
            let (v, d, dd) = g.jet(x).unwrap();
            let (ev, ed, edd) = f(x);
            assert!((v - ev).abs() < 1e-12 && (d - ed).abs() < 1e-11 && (dd - edd).abs() < 1e-10);
            let third = g.eval(x, 3).unwrap();
            assert!((third - (60.0 * x * x - 12.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn reciprocal_square_sampled_finely() {
        let f = |x: f64| (2.0 / (x * x), -4.0 / x.powi(3), 12.0 / x.powi(4));
        let xs: Vec<f64> = (0..=200).map(|i| 1.0 + i as f64 * 0.01).collect();
        let g = sampled(f, &xs, false);
        assert!((g.eval(1.505, 0).unwrap() - f(1.505).0).abs() < 1e-9);
    }

    #[test]
    fn outside_the_span_is_an_error() {
        let g = sampled(|x| (x, 1.0, 0.0), &[0.0, 1.0], false);
        assert!(matches!(g.eval(1.5, 0), Err(Error::OutOfSpan { .. })));
        assert!(matches!(g.eval(-0.1, 0), Err(Error::OutOfSpan { .. })));
        assert!(g.eval(1.0, 0).is_ok());
        assert!(matches!(g.eval(0.5, 4), Err(Error::Unavailable { .. })));
    }

    #[test]
    fn construction_checks() {
        assert!(Grid::new(vec![0.0], vec![0.0], vec![0.0]).is_err());
        assert!(Grid::new(vec![0.0, 0.0], vec![0.0; 2], vec![0.0; 2]).is_err());
        assert!(Grid::new(vec![0.0, 1.0], vec![0.0; 3], vec![0.0; 2]).is_err());
        let g = Grid::from_unsorted(vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], None).unwrap();
        assert_eq!(g.nodes(), &[0.0, 1.0]);
    }
}
