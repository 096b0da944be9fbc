//! Exact coloring counts, uniform sampling and coupon-process bounds for
//! triangle-free graphs.
//!
//! The crate checks, instance by instance and in exact arithmetic, the
//! quantitative steps of the counting argument that colors triangle-free
//! graphs of maximum degree `Δ` with `⌈(1+ε)Δ/ln Δ⌉` colors:
//!
//! * [`chromatic`] counts proper `k`-colorings and extensions of partial
//!   colorings with arbitrary-precision integers.
//! * [`sampling`] draws exactly uniform colorings by self-reducibility and
//!   measures the distribution of available-color lists.
//! * [`coupon`] models independent uniform picks from color lists and the
//!   set of colors left uncovered, with its exact moments and the lower-bound
//!   chain on its expectation.
//! * [`verify`] composes the above into per-instance reports.
//!
//! The guide in `book/` walks through each piece; its code snippets are
//! compiled and run as doc-tests of this crate.

pub mod chromatic;
pub mod coupon;
mod error;
pub mod graph;
mod number;
pub mod rng;
pub mod sampling;
pub mod verify;

pub use chromatic::{Budget, Counter, PartialColoring};
pub use error::{Error, Result};
pub use graph::{Graph, Palette};
pub use number::{BigCount, ExactRatio};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/coupon.md")]
    mod coupon {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
