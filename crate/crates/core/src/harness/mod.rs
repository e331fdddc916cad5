//! Scenario runner, renderings, run records and the command-line front end.

pub mod cli;
pub mod conditioned;
pub mod criteria;
pub mod record;
pub mod render;
pub mod scenario;
pub mod suites;
pub mod tolerances;

pub use conditioned::{floor_window_law, reflected_window_law, ConditionedWalks};
pub use criteria::CRITERIA;
pub use record::{read_records, RecordWriter, RunRecord};
pub use render::{render_path_svg, render_rows};
pub use scenario::{Check, Context, Report};
pub use suites::{broken_periodic_step, run_suite, suite_names};
pub use tolerances::Tolerances;
