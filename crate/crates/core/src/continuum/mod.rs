//! Continuum paths: exact piecewise-linear algebra, the zigzag process and
//! the periodic Brownian approximants.

pub mod brownian;
pub mod path;
pub mod zigzag;

pub use brownian::{BrownianGrid, PeriodicBrownian, PeriodicBrownianSample};
pub use path::{
    pl_carrier, pl_inverse, pl_pitman, pl_running_max, rescale_path, shift_to_local_max,
    shift_to_local_max_periodic, PlPath, Rational, Scalar,
};
pub use zigzag::{sample_zigzag, sample_zigzag_palm, PeriodicZigzag, ZigzagSample, ZigzagSpec};
