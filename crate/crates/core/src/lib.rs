//! Orbit-method parameters, metaplectic double-cover invariants, coadjoint-orbit
//! Fourier transforms, and tempered character values for a fixed catalog of
//! low-rank real reductive groups.
//!
//! All structural computations (root systems, chambers, positive systems,
//! descent, cover invariants) are exact over the rationals and roots of unity;
//! floating point only enters when a Fourier exponential sum or a quadrature
//! oracle is evaluated numerically.

pub mod characters;
pub mod linalg;
pub mod metaplectic;
pub mod orbits;
pub mod params;
pub mod phase;
pub mod rat;
pub mod realform;
pub mod rootdata;
