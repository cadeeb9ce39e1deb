//! Computable Choquet random sup-measures on finite carriers.
//!
//! The crate covers two halves of the same object:
//!
//! * exact set-function calculus: capacities stored as full tables, their
//!   Möbius measures, complete-alternation checks, Choquet and extremal
//!   integrals, tail dependence functionals and their dual representation;
//! * Monte Carlo: LePage series simulation with an exact stopping rule,
//!   Fréchet scale estimation and statistical checks tying the simulated
//!   law back to closed forms.
//!
//! On a finite carrier every sup-measure is determined by its values on
//! singletons, upper semicontinuity is automatic, and a capacity with
//! `θ(∅) = 0` is an extremal coefficient functional exactly when its Möbius
//! measure is nonnegative. The upper semicontinuity conditions that appear
//! in the continuous theory therefore reduce to nothing here.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carrier;
pub mod error;
pub mod integrals;
pub mod io;
pub mod random;
pub mod setfun;
pub mod simulate;
pub mod tdf;
pub mod transforms;
pub mod verify;

pub use carrier::{sup_integral, Carrier, PointFunction, SubsetMask, SupMeasureVector, Torus};
pub use error::{Error, Result};
pub use integrals::{choquet_integral, comonotone_formula, comonotonic, extremal_integral, Functional};
pub use setfun::{capacity_from_measure, classify, mobius_inverse, Capacity, Classification, MobiusMeasure};
pub use tdf::{DiscreteMeasure, SpectralAtom, TailDependenceFunctional};
