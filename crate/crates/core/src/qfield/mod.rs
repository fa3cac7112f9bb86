//! Exact arithmetic: integers, polynomials and rational functions in
//! `q, xn, xj, xi`, prime-field images, and exact linear solving.

pub mod dense;
mod gcd;
mod json;
pub mod linalg;
pub mod modular;
mod poly;
mod ratfunc;

pub use gcd::gcd;
pub use linalg::{det_fraction_free, solve_fraction_free, solve_linear, Field};
pub use modular::{Fp, PrimePoint};
pub use poly::{Monomial, Poly, Support, Var, NVARS};
pub use ratfunc::RatFunc;
