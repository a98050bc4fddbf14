//! Integer utilities: deterministic primality for 64-bit inputs, factorization,
//! Legendre symbols, divisor enumeration and binomial residues.
//!
//! Everything here operates on `u64` at the boundary. Values that can outgrow
//! 64 bits (products of prime powers, divisors of `L(n, d)`) are carried as
//! [`BigUint`].

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trial division bound used before switching to Pollard rho.
const TRIAL_LIMIT: u64 = 1_000_000;

/// Witness set that makes Miller-Rabin exact for every `n < 2^64`.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test, exact for the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for arbitrary-precision input; anything above `u64::MAX` is a
/// capacity error.
pub fn is_prime_big(n: &BigUint) -> Result<bool> {
    Ok(is_prime(to_u64_checked(n)?))
}

pub(crate) fn to_u64_checked(n: &BigUint) -> Result<u64> {
    n.to_u64()
        .ok_or_else(|| Error::Capacity(format!("{n} exceeds the 64-bit bound")))
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_LIMIT))
}

/// All primes `<= limit`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("sieve limit fits in memory");
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Prime factorization `p_1^a_1 ... p_k^a_k`, primes strictly ascending,
/// exponents at least one. The empty factorization is `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PrimeFactorization {
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from `(prime, exponent)` pairs in any order.
    /// Repeated primes are merged; every base is checked for primality.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u32)>) -> Result<Self> {
        let mut factors: Vec<(u64, u32)> = Vec::new();
        for (p, e) in pairs {
            if !is_prime(p) {
                return Err(Error::domain(format!("{p} is not prime")));
            }
            if e == 0 {
                return Err(Error::domain(format!("exponent of {p} must be positive")));
            }
            factors.push((p, e));
        }
        factors.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(Self { factors: merged })
    }

    pub fn prime_power(p: u64, k: u32) -> Result<Self> {
        Self::from_pairs([(p, k)])
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer this factorization multiplies out to.
    pub fn value(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }

    /// Product of two factorizations (exponents add on shared primes).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    out.push((p, e + f));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    out.push((p, e));
                    i += 1;
                }
                (Some(_), Some(&(q, f))) => {
                    out.push((q, f));
                    j += 1;
                }
                (Some(&pe), None) => {
                    out.push(pe);
                    i += 1;
                }
                (None, Some(&qf)) => {
                    out.push(qf);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self { factors: out }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

impl std::fmt::Display for PrimeFactorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Pollard rho with Brent's cycle detection. `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    debug_assert!(n > 3 && n % 2 == 1 && !is_prime(n));
    const BATCH: u64 = 128;
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut y = 2u64;
        let mut x;
        let mut ys = y;
        let mut q = 1u64;
        let mut r = 1u64;
        let mut g = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += BATCH;
            }
            r *= 2;
            if g == 1 {
                continue;
            }
            if g == n {
                // Batch overshot: replay one step at a time.
                loop {
                    ys = f(ys);
                    g = gcd_u64(x.abs_diff(ys), n);
                    if g > 1 {
                        break;
                    }
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_into(n: u64, out: &mut Vec<(u64, u32)>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push((n, 1));
        return;
    }
    let d = pollard_brent(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Factors `n >= 1`: trial division by primes below 10^6, then Pollard rho.
pub fn factorize(n: u64) -> Result<PrimeFactorization> {
    if n == 0 {
        return Err(Error::domain("cannot factor 0"));
    }
    let mut rest = n;
    let mut found: Vec<(u64, u32)> = Vec::new();
    for &p in small_primes() {
        if p.saturating_mul(p) > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            found.push((p, e));
        }
    }
    if rest > 1 {
        if rest < TRIAL_LIMIT.saturating_mul(TRIAL_LIMIT) || is_prime(rest) {
            // Every prime below the trial limit is gone, so a remainder under
            // the limit squared has no two factors left.
            found.push((rest, 1));
        } else {
            factor_into(rest, &mut found);
        }
    }
    PrimeFactorization::from_pairs(found)
}

/// Factors an arbitrary-precision `n`, rejecting values above `u64::MAX`.
pub fn factorize_big(n: &BigUint) -> Result<PrimeFactorization> {
    factorize(to_u64_checked(n)?)
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// Legendre symbol `(a | p)` for an odd prime `p`, by Euler's criterion.
pub fn legendre(a: i64, p: u64) -> Result<i8> {
    require_odd_prime(p)?;
    let r = (a as i128).rem_euclid(p as i128) as u64;
    Ok(euler_criterion(r, p))
}

/// Legendre symbol for an arbitrary-precision numerator.
pub fn legendre_big(a: &BigInt, p: u64) -> Result<i8> {
    require_odd_prime(p)?;
    let r = a.mod_floor(&BigInt::from(p));
    let r = r.to_u64().expect("residue below p fits in u64");
    Ok(euler_criterion(r, p))
}

fn euler_criterion(r: u64, p: u64) -> i8 {
    if r == 0 {
        return 0;
    }
    match pow_mod(r, (p - 1) / 2, p) {
        1 => 1,
        x if x == p - 1 => -1,
        x => unreachable!("Euler criterion produced {x} mod prime {p}"),
    }
}

/// Every divisor of the factored integer, strictly ascending.
pub fn divisors_ascending(f: &PrimeFactorization) -> Vec<BigUint> {
    let mut divisors = vec![BigUint::one()];
    for &(p, e) in f.factors() {
        let p = BigUint::from(p);
        let len = divisors.len();
        let mut power = BigUint::one();
        for _ in 0..e {
            power *= &p;
            for i in 0..len {
                let next = &divisors[i] * &power;
                divisors.push(next);
            }
        }
    }
    divisors.sort_unstable();
    divisors
}

/// `C(n, k) mod q` for prime `q`, through Lucas' theorem digit by digit.
pub fn binom_mod(n: u64, k: u64, q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::domain(format!("modulus {q} is not prime")));
    }
    if k > n {
        return Err(Error::domain(format!("k = {k} exceeds n = {n}")));
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1 % q;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % q, k % q);
        if ki > ni {
            return Ok(0);
        }
        acc = mul_mod(acc, small_binom_mod(ni, ki, q), q);
        n /= q;
        k /= q;
    }
    Ok(acc)
}

/// `C(n, k) mod q` for `k <= n < q`: no factor of the product is divisible by `q`.
fn small_binom_mod(n: u64, k: u64, q: u64) -> u64 {
    let k = k.min(n - k);
    let (mut num, mut den) = (1 % q, 1 % q);
    for i in 0..k {
        num = mul_mod(num, n - i, q);
        den = mul_mod(den, i + 1, q);
    }
    // q is prime and den is a unit mod q
    mul_mod(num, pow_mod(den, q - 2, q), q)
}
