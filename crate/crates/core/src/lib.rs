//! Entropy exchange, entanglement fidelity and quantum Fano-type upper bounds.
//!
//! The building blocks live in [`linalg`], [`quantum`] and [`entropy`];
//! [`bounds`] evaluates the bound family and [`optimize`] tightens it over its
//! free probability vectors. [`sweep`], [`verify`] and [`channel_spec`] back
//! the command-line front end.

pub mod bounds;
pub mod channel_spec;
pub mod closed_form;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod optimize;
pub mod quantum;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
