//! Command-line tool and HTTP/JSON service for the APULSE solver.
//!
//! Both surfaces share [`api`], so a CLI `solve` and a `POST /api/solve`
//! with the same inputs emit the same bytes.

pub mod api;
pub mod cli;
pub mod registry;
pub mod service;
