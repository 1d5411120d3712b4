//! Front end for `psgate-core`: gate naming, file formats, report documents
//! and the subcommands of the `psgate` binary.

pub mod commands;
pub mod gates;
pub mod matrix_io;
pub mod report;
