//! Exact arithmetic on p-adic solenoids and bounded remainder sets for their
//! rotations.
//!
//! Everything that decides a result (floors, memberships, counts, volumes) is
//! computed in exact rational or real-quadratic arithmetic. Floating point
//! only appears in Weyl sums and in presentation.

pub mod brs;
pub mod cutproject;
pub mod error;
pub mod exact;
pub mod par;
pub mod solenoid;

pub use error::{Error, Result};
pub use exact::{rat, ExactReal, Prime, PrimeSet, Rational};
pub use par::Execution;
pub use solenoid::{AdeleVector, GammaElement, SolenoidPoint};
