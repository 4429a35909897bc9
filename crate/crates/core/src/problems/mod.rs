//! Experiment generators, problem builders and quality metrics.

mod bb;
pub mod bp;
pub mod game;
pub mod image;
mod instance;
pub mod rpca;
mod toy;
pub mod tv;

pub use bb::{projected_bb, BbOutcome};
pub use instance::{ImageSource, Instance, InstanceSpec};
pub use toy::{toy_distance, toy_lp};
