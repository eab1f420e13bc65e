//! Model files, reports and the random campaign behind the `prnred` binary.

pub mod campaign;
pub mod model;
pub mod render;
pub mod report;
