//! Numerical laboratory for the continuous LWE (CLWE) problem family.
//!
//! The crate provides faithful samplers for the CLWE and homogeneous CLWE
//! distributions, the sample transformations relating them (rejection
//! sampling, noise-add-and-rescale, BDD-to-CLWE, hybrid embedding), two
//! concrete attacks (an LLL-based solver for the noiseless problem and a
//! covariance eigenvalue distinguisher), and closed-form or Monte-Carlo
//! evaluators for the lattice-Gaussian and statistical-query quantities
//! that govern the hardness of the problem. Everything is cross-validated
//! against brute-force oracles at desk scale.
//!
//! Width convention: a Gaussian of width `s` has density proportional to
//! `exp(-pi*||x/s||^2)`, i.e. covariance `s^2/(2*pi) * I`. All widths in
//! this crate follow that convention; standard deviations appear only in
//! [`numerics::width_to_std`].

pub mod distributions;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod numerics;
pub mod reductions;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
