//! Generators shared by the property tests and the acceptance run.
#![allow(dead_code)]

pub mod docgen;
pub mod fuzz;
