//! Dormand–Prince 5(4) with a PI step-size controller.

use super::{Ivp, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

// Fifth-order solution minus embedded fourth-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 10.0;
const MAX_SHRINK: f64 = 0.2;
// PI exponents: 1/5 - 0.75*beta and beta
const ALPHA: f64 = 0.17;
const BETA: f64 = 0.04;
const MAX_STEPS: usize = 100_000;
const MIN_STEP_FRACTION: f64 = 1e-12;

/// Right-hand side `f(x, y, dydx)` of a first-order system.
pub trait Rhs<T> {
    fn eval(&mut self, x: T, y: &[T], dydx: &mut [T]) -> Result<()>;
}

impl<T, F> Rhs<T> for F
where
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    fn eval(&mut self, x: T, y: &[T], dydx: &mut [T]) -> Result<()> {
        self(x, y, dydx)
    }
}

/// Integrates `y' = f(x, y)` over the IVP's span starting from its origin.
///
/// A run starting at an interior point integrates both halves and returns
/// one ascending trajectory. The result is bitwise reproducible for
/// identical inputs.
pub fn integrate_system<T: Scalar, F: Rhs<T>>(mut rhs: F, ivp: &Ivp<T>) -> Result<Trajectory<T>> {
    ivp.validate()?;
    let width = ivp.hi - ivp.lo;
    if ivp.origin == ivp.lo {
        run(&mut rhs, ivp, ivp.hi, width)
    } else if ivp.origin == ivp.hi {
        run(&mut rhs, ivp, ivp.lo, width)
    } else {
        let left = run(&mut rhs, ivp, ivp.lo, width)?;
        let right = run(&mut rhs, ivp, ivp.hi, width)?;
        Ok(Trajectory::join(left, right))
    }
}

fn weighted_rms<T: Scalar>(v: &[T], y0: &[T], y1: &[T], atol: T, rtol: T) -> T {
    let n = T::lit(v.len() as f64);
    let sum = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            let r = *e / sc;
            r * r
        })
        .fold(T::zero(), |acc, r| acc + r);
    (sum / n).sqrt()
}

fn check_finite<T: Scalar>(x: T, v: &[T]) -> Result<()> {
    if v.iter().all(|e| e.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { x: x.as_f64() })
    }
}

fn run<T: Scalar, F: Rhs<T>>(rhs: &mut F, ivp: &Ivp<T>, end: T, width: T) -> Result<Trajectory<T>> {
    let dim = ivp.state.len();
    let dir = if end > ivp.origin { T::one() } else { -T::one() };
    let min_step = width * T::lit(MIN_STEP_FRACTION);
    let (atol, rtol) = (ivp.atol, ivp.rtol);

    let mut x = ivp.origin;
    let mut y = ivp.state.clone();
    let mut f0 = vec![T::zero(); dim];
    rhs.eval(x, &y, &mut f0)?;
    check_finite(x, &f0)?;

    let mut traj = Trajectory::start(x, y.clone(), f0.clone(), atol, rtol);

    // Initial step guess (Hairer, Nørsett & Wanner, II.4).
    let d0 = weighted_rms(&y, &y, &y, atol, rtol);
    let d1 = weighted_rms(&f0, &y, &y, atol, rtol);
    let mut h0 = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    h0 = h0.min((end - x).abs());
    let probe: Vec<T> = y.iter().zip(&f0).map(|(a, b)| *a + dir * h0 * *b).collect();
    let mut f1 = vec![T::zero(); dim];
    rhs.eval(x + dir * h0, &probe, &mut f1)?;
    let diff: Vec<T> = f1.iter().zip(&f0).map(|(a, b)| *a - *b).collect();
    let d2 = weighted_rms(&diff, &y, &y, atol, rtol) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / dmax).powf(T::lit(0.2))
    };
    let max_step = ivp.max_step.unwrap_or(width);
    let mut h = (T::lit(100.0) * h0).min(h1).min(max_step).min((end - x).abs()).max(min_step);

    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); dim]; 7];
    k[0].clone_from(&f0);
    let mut stage = vec![T::zero(); dim];
    let mut y_new = vec![T::zero(); dim];
    let mut err = vec![T::zero(); dim];
    let mut err_prev = T::lit(1e-4);
    let mut last_rejected = false;

    loop {
        if traj.accepted + traj.rejected >= MAX_STEPS {
            return Err(Error::TooManySteps(MAX_STEPS));
        }
        let remaining = (end - x).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let step = dir * h;

        for s in 1..7 {
            for i in 0..dim {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + T::lit(A[s][j]) * kj[i];
                }
                stage[i] = y[i] + step * acc;
            }
            let xs = if s == 6 || (s == 5 && last) {
                if last { end } else { x + step }
            } else {
                x + T::lit(C[s]) * step
            };
            rhs.eval(xs, &stage, &mut k[s])?;
            if s == 6 {
                y_new.clone_from(&stage);
            }
        }
        for i in 0..dim {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate() {
                acc = acc + T::lit(E[j]) * kj[i];
            }
            err[i] = step * acc;
        }
        let err_norm = weighted_rms(&err, &y, &y_new, atol, rtol);
        if !err_norm.is_finite() {
            // treat as a hard rejection
            traj.rejected += 1;
            h = h * T::lit(MAX_SHRINK);
            if h < min_step {
                return Err(Error::StepUnderflow {
                    x: x.as_f64(),
                    h: h.as_f64(),
                });
            }
            last_rejected = true;
            continue;
        }

        if err_norm <= T::one() {
            let x_new = if last { end } else { x + step };
            check_finite(x_new, &y_new)?;
            traj.push(x_new, y_new.clone(), k[6].clone());
            traj.accepted += 1;
            if last {
                return Ok(traj);
            }
            let mut fac = err_norm.max(T::lit(1e-10)).powf(T::lit(ALPHA))
                / err_prev.powf(T::lit(BETA))
                / T::lit(SAFETY);
            fac = fac.max(T::lit(1.0 / MAX_GROWTH)).min(T::lit(1.0 / MAX_SHRINK));
            let mut h_next = h / fac;
            if last_rejected {
                h_next = h_next.min(h);
            }
            err_prev = err_norm.max(T::lit(1e-4));
            x = x_new;
            y.clone_from(&y_new);
            let fsal = k[6].clone();
            k[0] = fsal;
            h = h_next.min(max_step);
            last_rejected = false;
        } else {
            traj.rejected += 1;
            let fac = (err_norm.powf(T::lit(ALPHA)) / T::lit(SAFETY)).min(T::lit(1.0 / MAX_SHRINK));
            h = h / fac;
            last_rejected = true;
        }
        if h < min_step {
            return Err(Error::StepUnderflow {
                x: x.as_f64(),
                h: h.as_f64(),
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oscillator(_x: f64, y: &[f64], d: &mut [f64]) -> Result<()> {
        d[0] = y[1];
        d[1] = -y[0];
        Ok(())
    }

    #[test]
    fn sine_to_a_quarter_period() {
        let ivp = Ivp::new(0.0, std::f64::consts::FRAC_PI_2, vec![0.0, 1.0]);
        let t = integrate_system(oscillator, &ivp).unwrap();
        let (x, y) = (t.xs()[t.len() - 1], t.state(t.len() - 1));
        assert_eq!(x, std::f64::consts::FRAC_PI_2);
        assert!((y[0] - 1.0).abs() < 1e-8);
        assert!(y[1].abs() < 1e-8);
    }

    #[test]
    fn straight_line_is_exact() {
        let rhs = |_x: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = 0.0;
            Ok(())
        };
        let t = integrate_system(rhs, &Ivp::new(0.0, 3.0, vec![1.0, 2.0])).unwrap();
        assert!((t.state(t.len() - 1)[0] - 7.0).abs() < 1e-12);
    }

    #[test]
    fn backward_and_two_sided_runs() {
        let back = integrate_system(oscillator, &Ivp::new(1.0, -1.0, vec![1.0_f64.sin(), 1.0_f64.cos()])).unwrap();
        assert!(back.xs().windows(2).all(|w| w[0] > w[1]));
        let end = back.state(back.len() - 1);
        assert!((end[0] - (-1.0_f64).sin()).abs() < 1e-8);

        let both = integrate_system(oscillator, &Ivp::interior(0.0, -2.0, 2.0, vec![0.0, 1.0])).unwrap();
        assert!(both.xs().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(both.xs()[0], -2.0);
        assert_eq!(both.xs()[both.len() - 1], 2.0);
        for (x, y) in both.xs().iter().zip(both.states()) {
            assert!((y[0] - x.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn singularity_reports_step_underflow() {
        // y' = 1/(1-x)^2 blows up at x = 1
        let rhs = |x: f64, _y: &[f64], d: &mut [f64]| {
            d[0] = 1.0 / ((1.0 - x) * (1.0 - x));
            Ok(())
        };
        let err = integrate_system(rhs, &Ivp::new(0.0, 2.0, vec![0.0])).unwrap_err();
        assert!(
            matches!(err, Error::StepUnderflow { .. } | Error::NonFinite { .. } | Error::TooManySteps(_)),
            "{err:?}"
        );
    }

    #[test]
    fn deterministic_bitwise() {
        let rhs = |x: f64, y: &[f64], d: &mut [f64]| {
            d[0] = y[1];
            d[1] = -0.5 * x * y[0];
            Ok(())
        };
        let ivp = Ivp::new(0.0, 2.0, vec![1.0, 0.0]);
        let a = integrate_system(rhs, &ivp).unwrap();
        let b = integrate_system(rhs, &ivp).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_precision_run() {
        let rhs = |_x: f32, y: &[f32], d: &mut [f32]| {
            d[0] = y[1];
            d[1] = -y[0];
            Ok(())
        };
        let ivp = Ivp::new(0.0_f32, 1.0, vec![0.0, 1.0]).with_tolerances(1e-6, 1e-6);
        let t = integrate_system(rhs, &ivp).unwrap();
        assert!((t.state(t.len() - 1)[0] - 1.0_f32.sin()).abs() < 1e-5);
    }
}
