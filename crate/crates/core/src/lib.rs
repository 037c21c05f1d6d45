//! Mean age of information (AoI) for two sources sharing a lossy,
//! random-delay channel under a cyclic (age-agnostic) scheduler.
//!
//! The crate is `no_std` and only needs `alloc`. It contains:
//!
//! - [`schedule`]: the `(u, u1, r)` cycle representation, its slot-string
//!   form, the source-2 dual and the windowed placement sums `r̃(i)`.
//! - [`analytic`]: exact mean AoI, both through the Markov chain of AoI
//!   cycles (renewal-reward route) and through the closed form, plus the
//!   weighted objective and its `f - g + h` decomposition.
//! - [`optimizer`]: uniform placement arrangement, the rational search over
//!   `a = u2/u1`, the insertion-search heuristic and a brute-force oracle.
//! - [`sim`]: a deterministic, seedable discrete-event simulator for cyclic
//!   and probabilistic generate-at-will schedulers.
//!
//! Indices that appear in public signatures (`transition_prob`,
//! `slot_counts`, `r_tilde`, ...) are 1-based.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
mod error;
mod math;
pub mod optimizer;
pub mod schedule;
pub mod sim;

pub use analytic::{AoiBreakdown, DerivedQuantities, Scenario, SourceParams};
pub use error::{Error, Result};
pub use optimizer::SearchResult;
pub use sim::{ServiceKind, ServiceModel, SimConfig, SimEstimate};

pub use schedule::{CyclicSchedule, SlotSequence, Source};
