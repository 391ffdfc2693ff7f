//! Command-line front end: argument parsing, output formats, the result
//! cache and the self-test suite.

pub mod cache;
pub mod checks;
pub mod commands;
pub mod render;
pub mod words;
