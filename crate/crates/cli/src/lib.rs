//! Library side of the `phasetopo` binary: config parsing, presets, the
//! pipeline driver and report writers.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod presets;
