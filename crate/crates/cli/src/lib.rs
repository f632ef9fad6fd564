//! Command-line front end and HTTP session server for `colav-core`.

pub mod catalog;
pub mod commands;
pub mod server;
