//! Numerical toolkit for Cesàro summability of multiple Fourier series of
//! functions of bounded Waterman Λ-variation.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure
//! computation: file formats, the command line and thread pools live in the
//! `waterman` companion crate.
//!
//! Module map:
//!
//! * [`sequences`]: Λ-sequences and the Cesàro numbers `A_n^α`.
//! * [`kernels`]: Dirichlet and Cesàro kernels, `B(α)` estimates, kernel integrals.
//! * [`variation`]: symmetric differences and Λ-variations over interval systems.
//! * [`summation`]: (C,α) means by partial sums and by kernel quadrature.
//! * [`counterexample`]: the staged "diagonal" function whose cubic means
//!   at the origin stay away from zero.
#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

mod error;

pub mod counterexample;
pub mod function;
pub mod kernels;
pub mod quadrature;
pub mod sequences;
pub mod summation;
pub mod variation;

pub use error::{Error, Result};
pub use function::{MultiFunction, RealFunction};
pub use sequences::{CesaroOrder, LambdaSeq};
