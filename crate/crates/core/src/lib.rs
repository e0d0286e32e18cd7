//! Exact arithmetic for quadratic Dirichlet L-functions over the hyperelliptic
//! ensemble `H_n` of monic squarefree polynomials in `F_q[t]`.

pub mod cache;
pub mod characters;
pub mod ensemble;
pub mod error;
pub mod lfunctions;
pub mod poly;
pub mod random_model;
pub mod resonator;
mod roots;

pub use error::{Error, Result};
pub use poly::{enumerate_monic, pi_q_exact, FactoredPoly, Fq, IrreducibleTable, Poly};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
