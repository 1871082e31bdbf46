//! Command-line front end for `qterm`: program files, reports, and the
//! `check`, `reach`, `diverge`, `simulate` and `example` commands.

pub mod app;
pub mod file;
pub mod render;
pub mod report;
