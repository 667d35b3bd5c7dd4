//! File formats, experiment drivers and the command-line front end.

pub mod cli;
pub mod experiments;
pub mod formats;
