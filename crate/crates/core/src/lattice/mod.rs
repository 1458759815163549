//! Holohedries, their frequency modules and the integer group action on
//! mode indices.

mod group;
mod module;

pub use group::{build_holohedry, GroupElement, Holohedry, SymmetryDescriptor, CLOSURE_TOL};
pub use module::{
    generate_frequency_module, integer_rank, real_rank, FrequencyModule, IntMatrix, ModeIndex,
    CONSTRUCTION_TOL, DEFAULT_RELATION_BOUND, RANK_TOL,
};
pub(crate) use module::for_each_bounded;
