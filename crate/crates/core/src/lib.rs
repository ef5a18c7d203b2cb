//! Growth, estimation and degree-distribution tools for directed networks
//! formed by a mix of random and preferential attachment.
//!
//! - [`netmodel`] grows networks and logs every attachment draw.
//! - [`likelihood`] and [`em`] estimate the preferential weight alpha from a log.
//! - [`degree_dist`] gives the stationary and finite-time in-degree laws.
//! - [`ingest`] replays a timestamped citation dataset as a growth sequence.

pub mod degree_dist;
pub mod em;
pub mod error;
pub mod ingest;
pub mod likelihood;
pub mod netmodel;
pub mod numeric;

pub use error::{Error, Result};
