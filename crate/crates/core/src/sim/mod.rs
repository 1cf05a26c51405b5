//! Deterministic RF simulator: floorplans with attenuating walls, a
//! log-distance propagation model, surveys and scripted walks.

mod floorplan;
mod presets;
mod propagation;
pub mod rng;
mod scenario;
mod survey;
mod walk;

pub use floorplan::{Floorplan, Wall};
pub use presets::{preset, preset_hall, preset_office, PRESET_NAMES};
pub use propagation::{mean_rss, sample_rss, PropagationParams};
pub use scenario::{grid_layout, Placement, Scenario};
pub use survey::{observe, survey, survey_positions, test_queries};
pub use walk::{export_trace, walk, walk_positions, WalkStep};
