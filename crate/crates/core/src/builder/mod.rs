//! Multi-segment trajectory construction and the boundary-value solver.

mod chain;
mod controls;
mod guess;
pub mod lm;
mod residuals;
mod scenario;
mod sections;
mod solution;
mod solve;

pub use chain::{evaluate_chain, evaluate_chain_with, Chain, ChainSettings, SegmentRecord};
pub use controls::{control_spans, local_direction, repropagate, ControlSpan};
pub use guess::{default_initial_guess, COPLANAR_TOL};
pub use residuals::{boundary_residuals, residuals, CIRCULAR_TARGET_ECC};
pub use scenario::{
    default_section_count, default_segment_count, Scenario, ScenarioKind, SegmentParams, Target,
};
pub use sections::{partition_sections, solve_sections};
pub use solution::{count_revolutions, TrajectorySolution, SAMPLES_PER_REV};
pub use solve::{solve_scenario, solve_trace, piece_limit, SolverSettings};
