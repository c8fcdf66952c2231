//! Syntax-aware pre-training toolkit for semantic error recognition, at desk scale.
//!
//! The pipeline: parse CoNLL-U dependency trees ([`deptree`]), turn them into
//! masked-language-model and word-pair prediction examples ([`examplegen`]),
//! train a small transformer encoder with exact analytic gradients
//! ([`encoder`], [`trainer`]), clean and split labeled corpora ([`dataops`]),
//! and score binary error-recognition runs ([`evalkit`]). [`synth`] provides a
//! toy grammar for end-to-end experiments without external parses.

pub mod dataops;
pub mod deptree;
pub mod encoder;
pub mod evalkit;
pub mod examplegen;
pub mod synth;
pub mod trainer;

pub use deptree::{DepLabel, DepNode, DepTree, RelationClass2, RelationClass3};
