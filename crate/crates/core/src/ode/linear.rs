use super::{integrate_system, CoeffFn, Grid, Ivp, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Steps across the interval below which no grid-producing solve goes.
pub const MIN_GRID_STEPS: usize = 256;

// Caps the step so interpolation between steps stays at the integrator's
// accuracy. An explicit `max_step` wins.
fn resolved<T: Scalar>(ivp: &Ivp<T>) -> Ivp<T> {
    let mut ivp = ivp.clone();
    if ivp.max_step.is_none() {
        ivp.max_step = Some((ivp.hi - ivp.lo) / T::lit(MIN_GRID_STEPS as f64));
    }
    ivp
}

fn expect_dim<T>(ivp: &Ivp<T>, dim: usize) -> Result<()> {
    if ivp.state.len() == dim {
        Ok(())
    } else {
        Err(Error::InvalidIvp(format!(
            "expected a state of dimension {dim}, got {}",
            ivp.state.len()
        )))
    }
}

/// Integrates `φ'' = U φ + K φ' + λ φ` for the state `(φ, φ')`.
///
/// The equation is homogeneous, so the run uses the initial state scaled
/// to unit max-norm and rescales afterwards: the step sequence, and hence
/// `φ'/φ`, does not depend on the scale of the initial data.
pub fn solve_linear2<T: Scalar>(
    u: &CoeffFn<T>,
    k: &CoeffFn<T>,
    lambda: T,
    ivp: &Ivp<T>,
) -> Result<Trajectory<T>> {
    expect_dim(ivp, 2)?;
    ivp.validate()?;
    let scale = ivp.state[0].abs().max(ivp.state[1].abs());
    let scale = if scale > T::zero() { scale } else { T::one() };
    let unit = resolved(ivp)
        .with_state(vec![ivp.state[0] / scale, ivp.state[1] / scale]);
    let rhs = |x: T, y: &[T], d: &mut [T]| {
        d[0] = y[1];
        d[1] = (u.eval(x, 0)? + lambda) * y[0] + k.eval(x, 0)? * y[1];
        Ok(())
    };
    Ok(integrate_system(rhs, &unit)?.scaled(scale))
}

/// Solves `u' + c(x) u + f(x) = 0` and returns `u` as a grid with `u'`
/// (and `u''` whenever `c'` and `f'` can be evaluated) at every step.
pub fn solve_linear1<T: Scalar>(coeff: &CoeffFn<T>, forcing: &CoeffFn<T>, ivp: &Ivp<T>) -> Result<CoeffFn<T>> {
    expect_dim(ivp, 1)?;
    let rhs = |x: T, y: &[T], d: &mut [T]| {
        d[0] = -coeff.eval(x, 0)? * y[0] - forcing.eval(x, 0)?;
        Ok(())
    };
    let traj = integrate_system(rhs, &resolved(ivp))?;
    let curvatures: Result<Vec<T>> = traj
        .xs()
        .iter()
        .zip(traj.states().iter().zip(traj.rates()))
        .map(|(&x, (s, r))| {
            Ok(-coeff.eval(x, 1)? * s[0] - coeff.eval(x, 0)? * r[0] - forcing.eval(x, 1)?)
        })
        .collect();
    let grid = Grid::from_unsorted(
        traj.xs().to_vec(),
        traj.states().iter().map(|s| s[0]).collect(),
        traj.rates().iter().map(|r| r[0]).collect(),
        curvatures.ok(),
    )?;
    Ok(CoeffFn::grid(grid))
}

/// Solves `p'' + a(x) p + f(x) = 0` for the state `(p, p')` and returns
/// `p` as a grid carrying `p'` and the exact `p''` at every step.
pub fn solve_forced2<T: Scalar>(a: &CoeffFn<T>, forcing: &CoeffFn<T>, ivp: &Ivp<T>) -> Result<Grid<T>> {
    expect_dim(ivp, 2)?;
    let rhs = |x: T, y: &[T], d: &mut [T]| {
        d[0] = y[1];
        d[1] = -a.eval(x, 0)? * y[0] - forcing.eval(x, 0)?;
        Ok(())
    };
    let traj = integrate_system(rhs, &resolved(ivp))?;
    Grid::from_unsorted(
        traj.xs().to_vec(),
        traj.states().iter().map(|s| s[0]).collect(),
        traj.states().iter().map(|s| s[1]).collect(),
        Some(traj.rates().iter().map(|r| r[1]).collect()),
    )
}

/// `(f, f', f'')` at `x`.
pub fn grid_eval<T: Scalar>(g: &CoeffFn<T>, x: T) -> Result<(T, T, T)> {
    g.jet(x)
}
