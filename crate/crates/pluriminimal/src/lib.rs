//! Weierstrass representation for pluriminimal immersions.
//!
//! A map `f: C^m -> R^n` of the form `f(Q) = Re ∫_P^Q (ω_1, ..., ω_n) + const`
//! is a pluriminimal immersion (its restriction to every complex curve is a
//! minimal immersion) exactly when the holomorphic 1-forms `ω_i` are closed,
//! the conformality tensor `Σ ω_i ⊗ ω_i` vanishes, and the coefficient matrix
//! `(ω_ik)` has maximal rank. This crate provides:
//!
//! - an expression tree for entire functions of several complex variables with
//!   exact first and second derivatives ([`expr`], [`jet`]);
//! - Weierstrass data together with the condition checks, the immersion
//!   evaluator, and induced-geometry diagnostics ([`data`], [`checks`],
//!   [`immerse`], [`geometry`]);
//! - the explicit `C^2 -> R^6` solution families built from two arbitrary
//!   entire functions, plus a self-intersection search ([`family`],
//!   [`intersect`]);
//! - an exact-arithmetic finder for quadratic relations among exact polynomial
//!   1-forms, with congruence diagonalization and data emission ([`relation`]);
//! - mesh export of complex-curve restrictions and a small CLI ([`mesh`],
//!   [`cli`]).

pub mod checks;
pub mod cli;
pub mod data;
pub mod exact;
pub mod expr;
pub mod family;
pub mod geometry;
pub mod immerse;
pub mod intersect;
pub mod jet;
pub mod mesh;
pub mod relation;

pub use data::{OneForm, WeierstrassData};
pub use expr::HoloExpr;
pub use jet::Jet2;

/// Complex scalar used on every floating-point evaluation path.
pub type C64 = num_complex::Complex64;
