//! Exact computation of Jordan partitions of tensor products of Jordan blocks.
//!
//! For positive integers `r <= s` and a prime `p`, the Jordan canonical form of
//! `J_r ⊗ J_s` over a field of characteristic `p` (both blocks with eigenvalue 1)
//! is a direct sum of `min(r, s)` Jordan blocks whose sizes form a partition of
//! `r·s`. This crate computes that partition two independent ways:
//!
//! * [`jordan`] — a six-case base-`p` recursion for the multiplicity composition
//!   `c(r, s, p)` together with a parallel recursion that reconstructs the full
//!   partition `λ(r, s, p)` with explicit part values;
//! * [`gfp`] — a ground-truth oracle that extracts the block structure of the
//!   nilpotent matrix `J_r ⊗ J_s − I` by linear algebra over GF(p);
//!
//! and [`verify`] checks the classical periodicity, least-period, subperiodicity
//! and reflection properties of `s ↦ c(r, s, p)` on finite grids, reporting
//! counterexamples when a check fails.

mod arith;

pub mod gfp;
pub mod jordan;
pub mod verify;

pub use gfp::{oracle_jordan_partition, GFpMatrix, GfpError, Partition};
pub use jordan::{
    decompose, jordan_composition, jordan_partition, Composition, JordanError, Query,
    RunLengthPartition,
};
pub use verify::{TheoremId, VerificationReport, VerifyStatus};
