//! Order reduction and symmetry certification for central-force problems.
//!
//! The crate reduces five planar central-force families to a linear
//! oscillator plus a conservation law, certifies the point symmetries of the
//! reduced system through determining-equation residuals, maps generators
//! between the original and reduced charts, and checks every claim against
//! numerically integrated orbits.
//!
//! Symbolic work uses exact rational coefficients ([`expr`]); numeric work is
//! generic over the floating-point scalar ([`Real`]), with `f64` aliases
//! below.

pub mod expr;
pub mod numverify;
pub mod problems;
pub mod quadrature;
pub mod reduce;
mod scalar;
pub mod symbols;
pub mod symmetry;

pub use scalar::Real;

pub type OrbitState = numverify::OrbitState<f64>;
pub type OrbitOptions = numverify::OrbitOptions<f64>;
pub type Trajectory = numverify::Trajectory<f64>;
pub type OscillatorFit = numverify::OscillatorFit<f64>;
pub type FrequencyEstimate = numverify::FrequencyEstimate<f64>;
pub type DefectOptions = numverify::DefectOptions<f64>;
pub type DefectMeasure = numverify::DefectMeasure<f64>;
pub type Env = expr::Env<f64>;
