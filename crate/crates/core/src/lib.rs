//! Simulation and classicality checks for pre- and post-selection paradoxes.
//!
//! The crate has two engines that produce the same kind of output, a joint
//! distribution over outcome strings:
//!
//! * [`quantum`]: pure states, unitaries and projective measurements in
//!   double precision, with Lüders state update.
//! * [`ontic`]: finite ontic models (outcome functions plus disturbance
//!   kernels) evaluated exactly over arbitrary-precision rationals.
//!
//! [`stats`] condenses either engine's output into [`OperationalStats`], which
//! every diagnostic in [`classicality`] consumes. [`zoo`] builds the concrete
//! models: the quantum three-box protocol, a cheating non-invasive model, two
//! macrorealist models and three classical card/ball games. [`game`] plays the
//! adversarial betting game by Monte Carlo, and [`format`] reads and writes
//! the JSON model-description files.

pub mod classicality;
pub mod distribution;
pub mod error;
pub mod format;
pub mod game;
pub mod ontic;
pub mod quantum;
pub mod rational;
pub mod stats;
pub mod validation;
pub mod zoo;

pub use distribution::OutcomeDistribution;
pub use error::{Error, Result};
pub use ontic::{OnticMeasurement, OnticModel, Preparation};
pub use quantum::{Ket, ProjectiveMeasurement, QuantumScenario, Unitary};
pub use rational::Prob;
pub use stats::{OperationalStats, Roles};
pub use zoo::NamedModel;

/// Measurement and outcome labels shared by the three-box models.
pub mod labels {
    pub const M1: &str = "M1";
    pub const M2: &str = "M2";
    pub const MA: &str = "MA";
    pub const N: &str = "N";
    pub const BOX1: &str = "1";
    pub const NOT_BOX1: &str = "¬1";
    pub const BOX2: &str = "2";
    pub const NOT_BOX2: &str = "¬2";
    pub const A: &str = "A";
    pub const NOT_A: &str = "¬A";
}
