//! File formats, parallel sweeps and argument parsing for the `hurot`
//! command line. The numerics live in `hurot_core`.

pub mod io;
pub mod parse;
pub mod sweep;

pub use hurot_core as core;
