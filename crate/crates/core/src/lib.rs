//! Matrix interpretations for termination proofs of term rewriting systems,
//! with exact rational arithmetic.
//!
//! The crate parses rewrite systems and interpretations, evaluates terms to
//! linear matrix forms, checks rule and dependency-pair constraints under an
//! entrywise or a value-based ordering, and transforms interpretations:
//! natural matrices to bit matrices, and rational interpretations to natural
//! ones through Jordan-block encodings.

pub mod encoding;
pub mod interpretation;
pub mod matrix;
pub mod rat;
pub mod representation;
mod syntax;
pub mod transform;
pub mod trs;

pub use matrix::Mat;
pub use rat::Rat;
pub use syntax::ParseError;
