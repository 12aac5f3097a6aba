//! Numerical certification of a pairing: integrate the linear equation, map
//! `φ` to `ψ`, and evaluate the nonlinear residual along the way.

use crate::error::{Error, Result};
use crate::ode::{solve_linear2, Ivp, Trajectory};
use crate::pairing::{LinearOde, NonlinearOde, Transform};
use crate::scalar::{uniform_nodes, Scalar};

/// Default number of residual samples.
pub const DEFAULT_SAMPLES: usize = 201;
/// Default pass threshold on the scaled residual.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Default pole mask, relative to `max|φ|` over the run.
pub const DEFAULT_POLE_FRACTION: f64 = 1e-6;
/// Runs with more than this fraction of masked samples are inconclusive.
pub const MAX_MASKED_FRACTION: f64 = 0.5;

/// `ψ` and its first two derivatives at one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MappedSample<T> {
    pub x: T,
    pub phi: T,
    pub dphi: T,
    pub psi: T,
    pub dpsi: T,
    pub ddpsi: T,
    pub masked: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MappedSolution<T> {
    pub samples: Vec<MappedSample<T>>,
    pub eps_pole: T,
}

impl<T> MappedSolution<T> {
    pub fn masked(&self) -> usize {
        self.samples.iter().filter(|s| s.masked).count()
    }
}

/// Maps `φ` to `ψ = P + Qφ'/φ` at `n` evenly spaced points of the run.
///
/// `φ''` and `φ'''` come from the linear equation itself, so `ψ'` and `ψ''`
/// are exact functions of the interpolated `(φ, φ')`. Points with
/// `|φ| < eps_pole` (default `1e-6·max|φ|`) sit on a pole of `ψ` and are
/// masked.
pub fn map_solution<T: Scalar>(
    phi: &Trajectory<T>,
    lin: &LinearOde<T>,
    t: &Transform<T>,
    eps_pole: Option<T>,
    n: usize,
) -> Result<MappedSolution<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let scale = phi.states().iter().fold(T::zero(), |m, s| m.max(s[0].abs()));
    let eps_pole = eps_pole.unwrap_or(T::lit(DEFAULT_POLE_FRACTION) * scale);
    let (lo, hi) = phi.span();
    let mut samples = Vec::with_capacity(n);
    for x in uniform_nodes(lo, hi, n) {
        let state = phi.interpolate(x)?;
        let (f, df) = (state[0], state[1]);
        let (u, du) = (lin.u.eval(x, 0)?, lin.u.eval(x, 1)?);
        let (k, dk) = (lin.k.eval(x, 0)?, lin.k.eval(x, 1)?);
        let ddf = (u + lin.lambda) * f + k * df;
        let dddf = du * f + (u + lin.lambda + dk) * df + k * ddf;

        let (p, dp, ddp) = t.p.jet(x)?;
        let (q, dq, ddq) = t.q.jet(x)?;
        let r = df / f;
        let dr = ddf / f - r * r;
        let ddr = dddf / f - r * (ddf / f) - T::lit(2.0) * r * dr;
        samples.push(MappedSample {
            x,
            phi: f,
            dphi: df,
            psi: p + q * r,
            dpsi: dp + dq * r + q * dr,
            ddpsi: ddp + ddq * r + T::lit(2.0) * dq * dr + q * ddr,
            masked: !(f.abs() >= eps_pole),
        });
    }
    let mapped = MappedSolution { samples, eps_pole };
    if mapped.masked() == mapped.samples.len() {
        return Err(Error::Degenerate);
    }
    Ok(mapped)
}

/// One row of a verification report.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample<T> {
    pub x: T,
    pub phi: T,
    pub dphi: T,
    pub psi: T,
    pub dpsi: T,
    /// `ψ'' − (S + Vψ + V1ψ' + Wψ² + Rψ³ + λψ)`.
    pub residual: T,
    /// `|residual| / (1 + |ψ''| + Σ|terms|)`, the quantity compared with
    /// the tolerance.
    pub scaled: T,
    pub masked: bool,
}

/// Residual statistics over the unmasked samples.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport<T> {
    pub samples: Vec<ResidualSample<T>>,
    /// Largest scaled residual.
    pub max_residual: T,
    /// Largest absolute residual.
    pub max_abs_residual: T,
    /// Root mean square of the scaled residual.
    pub rms_residual: T,
    pub masked: usize,
    pub mask_reason: String,
    pub eps_pole: T,
    pub tol: T,
    pub atol: T,
    pub rtol: T,
    /// More than half of the samples were masked.
    pub inconclusive: bool,
    pub passed: bool,
}

impl<T: Scalar> VerificationReport<T> {
    pub fn masked_fraction(&self) -> f64 {
        self.masked as f64 / self.samples.len() as f64
    }

    pub fn unmasked(&self) -> impl Iterator<Item = &ResidualSample<T>> {
        self.samples.iter().filter(|s| !s.masked)
    }
}

/// Evaluates the nonlinear equation along mapped samples.
pub fn residual<T: Scalar>(nl: &NonlinearOde<T>, mapped: &MappedSolution<T>, tol: T) -> Result<VerificationReport<T>> {
    let mut samples = Vec::with_capacity(mapped.samples.len());
    let (mut max_scaled, mut max_abs, mut sum_sq, mut count) = (T::zero(), T::zero(), T::zero(), 0usize);
    for m in &mapped.samples {
        let (residual, scaled) = if m.masked {
            (T::nan(), T::nan())
        } else {
            let (r, scale) = nl.residual(m.x, m.psi, m.dpsi, m.ddpsi)?;
            let scaled = r.abs() / (T::one() + scale);
            // NaN must not slip through the max
            max_scaled = if scaled.is_nan() { T::infinity() } else { max_scaled.max(scaled) };
            max_abs = if r.is_nan() { T::infinity() } else { max_abs.max(r.abs()) };
            sum_sq = sum_sq + scaled * scaled;
            count += 1;
            (r, scaled)
        };
        samples.push(ResidualSample {
            x: m.x,
            phi: m.phi,
            dphi: m.dphi,
            psi: m.psi,
            dpsi: m.dpsi,
            residual,
            scaled,
            masked: m.masked,
        });
    }
    if count == 0 {
        return Err(Error::Degenerate);
    }
    let masked = samples.len() - count;
    let inconclusive = masked as f64 > MAX_MASKED_FRACTION * samples.len() as f64;
    Ok(VerificationReport {
        max_residual: max_scaled,
        max_abs_residual: max_abs,
        rms_residual: (sum_sq / T::lit(count as f64)).sqrt(),
        masked,
        mask_reason: format!("|phi| < {:e} (pole of psi)", mapped.eps_pole.as_f64()),
        eps_pole: mapped.eps_pole,
        tol,
        atol: T::nan(),
        rtol: T::nan(),
        inconclusive,
        passed: max_scaled <= tol && !inconclusive,
        samples,
    })
}

/// Knobs of [`verify_pair`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions<T> {
    pub samples: usize,
    pub eps_pole: Option<T>,
    pub tol: T,
}

impl<T: Scalar> Default for VerifyOptions<T> {
    fn default() -> Self {
        VerifyOptions {
            samples: DEFAULT_SAMPLES,
            eps_pole: None,
            tol: T::lit(DEFAULT_TOL),
        }
    }
}

impl<T: Scalar> VerifyOptions<T> {
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }
}

/// Integrates the linear equation, maps the solution and checks the
/// nonlinear one.
pub fn verify_pair<T: Scalar>(
    lin: &LinearOde<T>,
    t: &Transform<T>,
    nl: &NonlinearOde<T>,
    ivp: &Ivp<T>,
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport<T>> {
    let phi = solve_linear2(&lin.u, &lin.k, lin.lambda, ivp)?;
    let mapped = map_solution(&phi, lin, t, opts.eps_pole, opts.samples)?;
    let mut report = residual(nl, &mapped, opts.tol)?;
    report.atol = ivp.atol;
    report.rtol = ivp.rtol;
    Ok(report)
}
