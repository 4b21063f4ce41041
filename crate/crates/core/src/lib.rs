//! Sphere-plate Casimir force computation and measurement analysis.
//!
//! The crate evaluates the Casimir force between a metal-coated sphere and
//! plate from the Lifshitz formula (proximity-force form) for several
//! dielectric models — Drude, plasma, an infrared-optics approximation, and
//! tabulated optical data mapped to the imaginary frequency axis by the
//! dispersion relation. On top of the force engine it provides surface
//! roughness corrections, thermal corrections, the patch-potential electric
//! force, the finite plate-size factor, and the statistics pipeline used to
//! compare a measured force-distance relation against theory (Student-t
//! confidence intervals, error budgets, separation-offset fitting, RMS
//! deviations).
//!
//! The `casimir` binary exposes the four batch commands `force`, `analyze`,
//! `budget` and `roughness` on top of this library.
//!
//! All library interfaces are SI (m, N, rad/s, K, V); data files use the
//! nm / pN / eV conventions described in the parser documentation.

// Negated float comparisons like `!(x > 0.0)` are used throughout to make
// precondition checks reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod corrections;
pub mod lifshitz;
pub mod optics;
pub mod quad;
pub mod roughness;
pub mod stats;
