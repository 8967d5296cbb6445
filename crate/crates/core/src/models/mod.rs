//! Built-in nonlinear functions, split-form systems and their seeded surrogates.

mod functions;
mod mtx;
mod surrogate;
mod system;

pub use functions::{
    beam_function, beam_g1, porous_g1, porous_g1_function, porous_g2, porous_g2_function,
    BeamMaterial, PorousMaterial, ScalarFunction,
};
pub use mtx::{
    format_matrix_market, load_system_files, load_system_matrix_market, parse_matrix_market,
    read_matrix_market, write_matrix_market, FunctionSpec, SystemManifest,
};
pub use surrogate::{
    beam_surrogate, build_surrogate_system, porous_surrogate, DuctGeometry, Model, BEAM_A0_NORM,
    BEAM_A2_NORM, BEAM_ANEG_NORM,
};
pub use system::SplitFormSystem;
