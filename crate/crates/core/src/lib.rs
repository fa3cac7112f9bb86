//! Exact computer-algebra toolkit around the q-enumeration of totally
//! symmetric plane partitions.
//!
//! * [`qfield`] exact polynomials and rational functions in `q, q^n, q^j`,
//!   prime-field images and fraction-free linear algebra.
//! * [`qcomb`] q-binomials, q-Pochhammer symbols and the two product formulas.
//! * [`tspp`] brute-force enumeration of totally symmetric plane partitions.
//! * [`okada`] the Okada matrix, its determinant and normalized cofactors, and
//!   the three identities the cofactors must satisfy.
//! * [`ore`] shift operators, sequence tables, skew division and telescoping
//!   certificate checks.
//! * [`guess`] fit-and-validate recurrence guessing over prime fields.

pub mod error;
pub mod guess;
pub mod okada;
pub mod ore;
pub mod qcomb;
pub mod qfield;
pub mod tspp;

pub use error::{Error, Result};
pub use qfield::{Fp, Monomial, Poly, PrimePoint, RatFunc, Var};
