//! Command line and local JSON service over the knowbase engine.

pub mod api;
pub mod cli;
pub mod service;
