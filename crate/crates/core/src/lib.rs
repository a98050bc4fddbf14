//! Locally associated orders in real quadratic fields.
//!
//! The order of index `n` in `Q(sqrt d)` is locally associated exactly when
//! the least power of the fundamental unit lying in it equals `L(n, d)`, a
//! multiplicative function of `n` built from Legendre symbols. This crate
//! computes that criterion directly ([`laorder`]), decides it by rules for
//! prime `d` ([`classify`]), and studies the Pell-equation condition that
//! governs the index-`p` order of `Q(sqrt p)` ([`pell`]).
//!
//! - [`arith`]: primality, factorization, Legendre symbols, binomial residues
//! - [`quadfield`]: ring arithmetic and fundamental units
//! - [`laorder`]: the `L` function and the minimal unit power
//! - [`classify`]: prime-power rules, coprimality combiner, traces
//! - [`pell`]: minimal Pell solutions and the prime scanner
//! - [`tables`]: batch tables, undetermined-case counts, unit cache files

pub mod arith;
pub mod classify;
mod decimal;
pub mod error;
pub mod laorder;
pub mod pell;
pub mod quadfield;
pub mod tables;

pub use arith::{factorize, is_prime, legendre, PrimeFactorization};
pub use classify::{classify, classify_general, Classification, RuleTag};

pub use error::{Error, Result};
pub use laorder::{is_locally_associated_direct, l_value, minimal_unit_power, MinPowerResult};
pub use pell::{conjecture_check, pell_min_solution, theorem41_check, PellSolution};

pub use quadfield::{fundamental_unit, make_field, FieldDesc, ModQuadInt, QuadInt};
pub use tables::TableRow;
