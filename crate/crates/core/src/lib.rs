//! Certified norm brackets for generalized Herz–Schur multipliers on
//! finitely generated groups.

pub mod family;
pub mod group;
pub mod linalg;
pub mod multiplier;
pub mod schur;
