//! Exact reconstruction and verification of a rank-2 toric vector bundle from
//! tropical multi-section data.
//!
//! The crate has two halves:
//!
//! * an exact half ([`exact`], [`fan`], [`cover`], [`gluing`]) that works over
//!   arbitrary-precision rationals and sparse Laurent polynomials and proves
//!   gluing identities symbolically, and
//! * a numeric half ([`tropic`], [`caustic`]) that demonstrates the metric
//!   degeneration limits of the Fubini-Study connection and the gradient-flow
//!   local model at the branch point.
//!
//! Everything in the exact half is deterministic and allocation churn aside
//! pure; values are immutable after construction and safe to share across
//! threads.

pub mod caustic;
pub mod cover;
pub mod exact;
pub mod fan;
pub mod gluing;
pub mod report;
pub mod tropic;
