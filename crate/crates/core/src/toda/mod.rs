//! The ultra-discrete Toda lattice: finite and periodic dynamics, the path
//! encoding that turns a step into Pitman's transform plus a shift, and
//! random states whose law the dynamics preserve.

pub mod bridge;
pub mod exact;
pub mod sample;
pub mod state;

pub use bridge::{
    toda_decode_path, toda_decode_periodic, toda_encode_path, toda_invariants, toda_step_via_path, TodaInvariants,
};
pub use sample::{
    sample_rational_state, sample_toda_palm, sample_toda_periodic_compositions, sample_toda_periodic_dirichlet,
    sample_toda_periodic_integer,
    toda_palm_step, TodaPalmWindow,
};
pub use state::{toda_step, toda_step_periodic, TodaState, TodaValue};
