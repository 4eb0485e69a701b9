//! Spin correlations of massive particle pairs observed from a moving frame.
//!
//! The singlet correlation between spin measurements along `a` and `b`,
//! seen by an observer for whom the pair moves with velocity `β`, loses its
//! rest-frame form and with it part of the CHSH violation. This crate
//! computes that correlation, scans and optimizes CHSH values, checks the
//! underlying Dirac operator identities numerically and audits key
//! distribution tests against a beam velocity distribution.

pub mod audit;
pub mod bell;
pub mod dirac;
pub mod error;
pub mod kinematics;
pub mod linalg;
pub mod observables;

pub use error::{Error, Result};
pub use kinematics::{BeamVelocity, Direction, Vec3};
