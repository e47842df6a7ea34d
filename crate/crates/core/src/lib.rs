//! Parallel transport, holonomy and curvature for connections on trivial
//! SO(3)- and S³-bundles, with the rolling-sphere connections as examples.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod connections;
pub mod lie;
pub mod paths;
pub mod surface;
pub mod transport;
pub mod verify;
