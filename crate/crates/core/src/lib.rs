//! Exact combinatorial dimensions of finite real-valued function classes.
//!
//! A finite class is a values matrix (functions x domain points). On top of
//! that representation this crate computes margin-shattering dimensions (with
//! and without a shift vector), VC dimension of partial `{0,1,*}` classes,
//! and L_p covering numbers, all exactly at desk scale with explicit
//! certificates. Composition operators (k-fold pointwise maximum, shift,
//! scale, sign thresholding, hinge loss), disambiguation of partial classes,
//! sparse-average net construction, affine-class generators and witness
//! searches, and closed-form bound evaluators round out the toolkit.

pub mod affine;
pub mod bounds;
pub mod class;
pub mod compose;
pub mod covering;
pub mod dims;
pub mod disambig;
pub mod error;
pub mod generate;

pub use class::{DiscretizerSpec, Label, Measure, PartialClass, SampledClass};
pub use dims::{DimResult, SearchBudget, ShatterCertificate, ShatterMode};
pub use error::{Error, Result};
