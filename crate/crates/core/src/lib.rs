//! k-convex hulls, k-cross approximations and greedy orthonormal frames for
//! centrally symmetric polytopes, over exact rationals or `f64`.
//!
//! * [`kernel`]: polytopes in vertex and halfspace form, conversion,
//!   polarity, projections, sections and inclusion tests.
//! * [`hulls`]: the families `Q_k` and `R_k`, duality, diameters and the
//!   step-lemma checks.
//! * [`frames`]: greedy frames and factor verification.
//! * [`harness`]: body generation and experiment suites.
//!
//! The guide in `book/` walks through each layer; its snippets run as doc-tests.

pub mod error;
pub mod frames;
pub mod harness;
pub mod hulls;
pub mod kernel;

pub use error::{Error, Result};
pub use kernel::*;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polytopes.md")]
    mod polytopes {}
    #[doc = include_str!("../../../book/src/hulls.md")]
    mod hulls {}
    #[doc = include_str!("../../../book/src/frames.md")]
    mod frames {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
