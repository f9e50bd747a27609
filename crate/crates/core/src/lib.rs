//! Verification lab for indefinite almost paracontact metric structures.

pub mod charts;
pub mod classify;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod gallery;
pub mod identities;
pub mod jets;
pub mod json;
pub mod levi_civita;
pub mod manifest;
pub mod parse;
pub mod residual;
pub mod tensors;

pub use error::{Error, Result};
