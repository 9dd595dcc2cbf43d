//! Shared machinery for the command-line applications: option
//! processing for the speaker-identification tool and the file-emitting
//! visualizers.

pub mod emit;
pub mod options;
