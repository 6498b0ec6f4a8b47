//! Monte Carlo simulation of the branched geodesic flow.

mod estimate;
mod realize;
pub mod rng;
mod trace;

pub use estimate::{
    estimate_crossing_rates, estimate_entropy_rate, estimate_sphere_length, estimate_with_events,
    simulate, simulate_with_events, sphere_base, Execution, SamplePlan, SideRate, SimEstimates, SphereEstimate,
    MAX_TANGENTIAL_FRACTION,
};
pub use realize::{
    realize, Branch, Circle, CircleLink, Passage, RealizedSheet, RealizedSurface, SurfaceTile,
};
pub use trace::{sample_initial, trace, CrossingEvent, FlowState, TANGENTIAL_TOLERANCE};
