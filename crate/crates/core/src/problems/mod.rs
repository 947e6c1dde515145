//! Proxy objective functions for the four benchmark families.
//!
//! Each proxy keeps the search-space shape and the penalty contract of the
//! problem it stands in for:
//!
//! | proxy        | space                       | penalty               |
//! |--------------|-----------------------------|-----------------------|
//! | [`Windwake`] | 2·n continuous coordinates  | `0` when turbines are too close |
//! | [`PipeProxy`]| d continuous in `[0, 1]`    | `2` outside the feasible ball   |
//! | [`EspProxy`] | 49 categorical, 8 options   | none (plateaus by quantisation) |
//! | [`HpoProxy`] | conditional mixed           | `0` when simulated cost > 8     |
//!
//! Objectives are minimised; maximisation targets (power, accuracy) are
//! negated here. Penalty values are returned bit-exactly.
//!
//! These types are pure functions of the point. Timing, artificial delays,
//! noise and external simulators are layered on in the `surrobench` crate.

mod esp;
mod hpo;
mod pipe;
mod windwake;

pub use esp::EspProxy;
pub use hpo::{HpoProxy, HPO_TIME_LIMIT};
pub use pipe::PipeProxy;
pub use windwake::{Scenario, Windwake, WindwakeConfig};

use crate::space::{Point, SearchSpace};

/// A deterministic objective over a search space.
pub trait Objective {
    fn space(&self) -> &SearchSpace;

    /// Objective value at a valid point.
    fn value(&self, p: &Point) -> f64;

    fn known_optimum(&self) -> Option<f64> {
        None
    }
}
