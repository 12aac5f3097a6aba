//! Pairing second-order linear ODEs with nonlinear ones through
//! `ψ = P + Qφ'/φ`: symbolic synthesis, the coefficient equations, adaptive
//! integration and numerical verification.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod ode;
pub mod pairing;
pub mod riccati;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type CoeffFnF64 = ode::CoeffFn<f64>;
pub type GridF64 = ode::Grid<f64>;
pub type IvpF64 = ode::Ivp<f64>;
pub type TrajectoryF64 = ode::Trajectory<f64>;
pub type LinearOdeF64 = pairing::LinearOde<f64>;
pub type NonlinearOdeF64 = pairing::NonlinearOde<f64>;
pub type TransformF64 = pairing::Transform<f64>;
pub type VerificationReportF64 = verify::VerificationReport<f64>;
