//! The `L` function, order membership, and the direct locally-associated test.
//!
//! For the fundamental unit `u` of `Q(sqrt d)` let `m` be the least exponent
//! with `u^m` in the order `R_n`. Then `m | L(n, d)`, and `R_n` is locally
//! associated iff `m = L(n, d)`. The search here walks the divisors of
//! `L(n, d)` upward and powers `u` modulo `n`, so nothing larger than `n`
//! is ever materialized.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{self, divisors_ascending, PrimeFactorization};
use crate::error::{Error, Result};
use crate::quadfield::{global_unit_cache, make_field, pow_mod, FieldDesc, ModQuadInt, QuadInt};

/// Local factor `L(q^k, d)` for a prime `q` and `k >= 1`.
pub fn l_prime_power(q: u64, k: u32, d: i64) -> BigUint {
    l_prime_power_factors(q, k, d).value()
}

fn l_prime_power_factors(q: u64, k: u32, d: i64) -> PrimeFactorization {
    assert!(k >= 1, "prime power exponent must be positive");
    if q == 2 {
        return match d.rem_euclid(8) {
            1 if k == 1 => PrimeFactorization::one(),
            1 => pf(&[(2, k - 1)]),
            5 if k == 1 => pf(&[(3, 1)]),
            5 => pf(&[(2, k - 1), (3, 1)]),
            _ => pf(&[(2, k)]),
        };
    }
    let symbol = arith::legendre(d, q).expect("q is an odd prime");
    let head = if k > 1 {
        pf(&[(q, k - 1)])
    } else {
        PrimeFactorization::one()
    };
    let tail = match symbol {
        0 => pf(&[(q, 1)]),
        1 => arith::factorize(q - 1).expect("q - 1 is positive"),
        // q + 1 may overflow; it is even, and (q + 1)/2 = q/2 + 1 fits.
        _ => pf(&[(2, 1)]).mul(&arith::factorize(q / 2 + 1).expect("positive")),
    };
    head.mul(&tail)
}

fn pf(pairs: &[(u64, u32)]) -> PrimeFactorization {
    PrimeFactorization::from_pairs(pairs.iter().copied()).expect("literal primes")
}

/// Prime factorization of `L(n, d)` given that of `n`.
pub fn l_factorization(n: &PrimeFactorization, d: i64) -> PrimeFactorization {
    n.factors()
        .iter()
        .fold(PrimeFactorization::one(), |acc, &(q, k)| {
            acc.mul(&l_prime_power_factors(q, k, d))
        })
}

/// `L(n, d)` for a factored `n`.
pub fn l_value_factored(n: &PrimeFactorization, d: i64) -> BigUint {
    l_factorization(n, d).value()
}

/// `L(n, d)`; `n = 0` is a domain error.
pub fn l_value(n: u64, d: i64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::domain("L(n, d) is defined for n >= 1"));
    }
    Ok(l_value_factored(&arith::factorize(n)?, d))
}

/// Membership in the order `R_n = Z[n alpha]`.
pub trait OrderMembership {
    fn in_order(&self, n: &BigUint) -> Result<bool>;
}

impl OrderMembership for QuadInt {
    fn in_order(&self, n: &BigUint) -> Result<bool> {
        if n.is_zero() {
            return Err(Error::domain("order index must be positive"));
        }
        Ok(self
            .y()
            .is_multiple_of(&num_bigint::BigInt::from(n.clone())))
    }
}

impl OrderMembership for ModQuadInt {
    fn in_order(&self, n: &BigUint) -> Result<bool> {
        if self.modulus() != n {
            return Err(Error::ModulusMismatch {
                left: self.modulus().to_string(),
                right: n.to_string(),
            });
        }
        Ok(self.y().is_zero())
    }
}

/// Least power of the fundamental unit in `R_n`, compared against `L(n, d)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinPowerResult {
    #[serde(with = "crate::decimal")]
    pub n: BigUint,
    pub d: u64,
    #[serde(rename = "L", with = "crate::decimal")]
    pub l_value: BigUint,
    #[serde(with = "crate::decimal")]
    pub m: BigUint,
    pub locally_associated: bool,
}

/// Minimal unit power for an index given by its factorization.
pub fn minimal_unit_power_factored(
    n: &PrimeFactorization,
    field: &FieldDesc,
) -> Result<MinPowerResult> {
    let unit = global_unit_cache().get_or_compute(field);
    minimal_power_with_unit(n, &unit)
}

pub(crate) fn minimal_power_with_unit(
    n: &PrimeFactorization,
    unit: &QuadInt,
) -> Result<MinPowerResult> {
    let d = unit.field().d() as i64;
    let index = n.value();
    let l_fact = l_factorization(n, d);
    let l_value = l_fact.value();
    let base = ModQuadInt::reduce(unit, &index)?;
    let mut m = None;
    for e in divisors_ascending(&l_fact) {
        if base.pow(&e).in_order(&index)? {
            m = Some(e);
            break;
        }
    }
    // u^L(n,d) always lies in R_n, so the last divisor succeeds at the latest.
    let m = m.expect("u^L(n, d) lies in R_n");
    Ok(MinPowerResult {
        locally_associated: m == l_value,
        n: index,
        d: unit.field().d(),
        l_value,
        m,
    })
}

/// Minimal unit power for `R_n` in `Q(sqrt d)`.
pub fn minimal_unit_power(n: u64, d: i64) -> Result<MinPowerResult> {
    let field = make_field(d)?;
    if n == 0 {
        return Err(Error::domain("order index must be positive"));
    }
    minimal_unit_power_factored(&arith::factorize(n)?, &field)
}

/// Ground-truth decision: is `R_n` in `Q(sqrt d)` locally associated?
pub fn is_locally_associated_direct(n: u64, d: i64) -> Result<bool> {
    Ok(minimal_unit_power(n, d)?.locally_associated)
}

/// `u^k mod n` for the fundamental unit of `field`.
pub fn unit_pow_mod(field: &FieldDesc, k: &BigUint, n: &BigUint) -> Result<ModQuadInt> {
    let unit = global_unit_cache().get_or_compute(field);
    pow_mod(&unit, k, n)
}
