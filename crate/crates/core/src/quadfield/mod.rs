//! Arithmetic in the ring of integers `Z[alpha]` of a real quadratic field
//! `Q(sqrt d)`, where `alpha = (1 + sqrt d) / 2` for `d = 1 (mod 4)` and
//! `alpha = sqrt d` otherwise.
//!
//! Elements are stored in the `{1, alpha}` basis. In that basis the order of
//! index `n` is exactly the set of elements whose `alpha` coordinate is
//! divisible by `n`, for both residue classes of `d`.

pub mod cf;
mod unit;

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

pub use unit::{fundamental_unit, global_unit_cache, UnitCache};

use crate::arith;
use crate::error::{Error, Result};

/// A real quadratic field `Q(sqrt d)` with squarefree `d > 1`, together with
/// the minimal polynomial `alpha^2 = t alpha + c` of its integral generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldDesc {
    d: u64,
    half_basis: bool,
    trace_coeff: u64,
    const_coeff: u64,
}

/// Validates `d` and builds its field description.
pub fn make_field(d: i64) -> Result<FieldDesc> {
    if d <= 1 {
        return Err(Error::domain(format!(
            "d = {d}: only real quadratic fields (d > 1) are supported"
        )));
    }
    let d = d as u64;
    let factors = arith::factorize(d)?;
    if !factors.is_squarefree() {
        return Err(Error::domain(format!(
            "d = {d} is not squarefree ({factors})"
        )));
    }
    let half_basis = d % 4 == 1;
    let (trace_coeff, const_coeff) = if half_basis { (1, (d - 1) / 4) } else { (0, d) };
    Ok(FieldDesc {
        d,
        half_basis,
        trace_coeff,
        const_coeff,
    })
}

impl FieldDesc {
    pub fn d(&self) -> u64 {
        self.d
    }

    /// True when the integral basis is `{1, (1 + sqrt d)/2}`.
    pub fn half_basis(&self) -> bool {
        self.half_basis
    }

    /// `t` in `alpha^2 = t alpha + c`.
    pub fn trace_coeff(&self) -> u64 {
        self.trace_coeff
    }

    /// `c` in `alpha^2 = t alpha + c`.
    pub fn const_coeff(&self) -> u64 {
        self.const_coeff
    }

    fn check_same(&self, other: &FieldDesc) -> Result<()> {
        if self != other {
            return Err(Error::MixedField {
                left: self.d,
                right: other.d,
            });
        }
        Ok(())
    }
}

/// An element written as `(rational + irrational * sqrt d) / denom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtCoords {
    pub rational: BigInt,
    pub irrational: BigInt,
    pub denom: u8,
}

/// An algebraic integer `x + y alpha` with arbitrary-precision coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadInt {
    field: FieldDesc,
    x: BigInt,
    y: BigInt,
}

impl QuadInt {
    pub fn new(field: FieldDesc, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self {
            field,
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn one(field: FieldDesc) -> Self {
        Self::new(field, 1, 0)
    }

    /// Builds `(a + b sqrt d) / denom` with `denom` in `{1, 2}`; fails when the
    /// value is not an algebraic integer.
    pub fn from_sqrt_coords(
        field: FieldDesc,
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        denom: u8,
    ) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        match (denom, field.half_basis) {
            (1, false) => Ok(Self::new(field, a, b)),
            // a + b sqrt d = (a - b) + 2b alpha
            (1, true) => Ok(Self::new(field, &a - &b, &b * 2)),
            // (a + b sqrt d)/2 = (a - b)/2 + b alpha
            (2, true) if a.is_even() == b.is_even() => Ok(Self::new(field, (&a - &b) / 2, b)),
            (2, false) if a.is_even() && b.is_even() => Ok(Self::new(field, a / 2, b / 2)),
            _ => Err(Error::domain(format!(
                "({a} + {b} sqrt {}) / {denom} is not an algebraic integer",
                field.d
            ))),
        }
    }

    pub fn field(&self) -> FieldDesc {
        self.field
    }

    /// Coefficient of `1`.
    pub fn x(&self) -> &BigInt {
        &self.x
    }

    /// Coefficient of `alpha`.
    pub fn y(&self) -> &BigInt {
        &self.y
    }

    /// `(2x + y + y sqrt d) / 2` for half-basis fields, `(x + y sqrt d) / 1`
    /// otherwise.
    pub fn sqrt_coords(&self) -> SqrtCoords {
        if self.field.half_basis {
            SqrtCoords {
                rational: &self.x * 2 + &self.y,
                irrational: self.y.clone(),
                denom: 2,
            }
        } else {
            SqrtCoords {
                rational: self.x.clone(),
                irrational: self.y.clone(),
                denom: 1,
            }
        }
    }

    /// `(a, b)` with value `a + b sqrt d`, when both are integers.
    pub fn integral_sqrt_coords(&self) -> Option<(BigInt, BigInt)> {
        let c = self.sqrt_coords();
        if c.denom == 1 {
            return Some((c.rational, c.irrational));
        }
        if c.rational.is_even() && c.irrational.is_even() {
            Some((c.rational / 2, c.irrational / 2))
        } else {
            None
        }
    }

    /// `N(x + y alpha) = x^2 + t x y - c y^2`.
    pub fn norm(&self) -> BigInt {
        let t = BigInt::from(self.field.trace_coeff);
        let c = BigInt::from(self.field.const_coeff);
        &self.x * &self.x + t * &self.x * &self.y - c * &self.y * &self.y
    }

    /// Galois conjugate, `alpha -> t - alpha`.
    pub fn conjugate(&self) -> Self {
        let t = BigInt::from(self.field.trace_coeff);
        Self::new(self.field, &self.x + t * &self.y, -&self.y)
    }

    pub fn mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.field.check_same(&other.field)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &QuadInt) -> QuadInt {
        let t = BigInt::from(self.field.trace_coeff);
        let c = BigInt::from(self.field.const_coeff);
        let yy = &self.y * &other.y;
        let x = &self.x * &other.x + c * &yy;
        let y = &self.x * &other.y + &other.x * &self.y + t * yy;
        QuadInt::new(self.field, x, y)
    }

    /// Exact power by binary exponentiation.
    pub fn pow(&self, mut k: u64) -> QuadInt {
        let mut acc = QuadInt::one(self.field);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Sign of the real number `x + y alpha` (its embedding with `sqrt d > 0`).
    pub fn signum(&self) -> Sign {
        let SqrtCoords {
            rational: a,
            irrational: b,
            ..
        } = self.sqrt_coords();
        // compare a against -b sqrt d
        match (a.sign(), b.sign()) {
            (Sign::NoSign, s) | (s, Sign::NoSign) => s,
            (sa, sb) if sa == sb => sa,
            (sa, _) => {
                let lhs = &a * &a;
                let rhs = &b * &b * BigInt::from(self.field.d);
                match lhs.cmp(&rhs) {
                    std::cmp::Ordering::Greater => sa,
                    std::cmp::Ordering::Less => -sa,
                    std::cmp::Ordering::Equal => Sign::NoSign,
                }
            }
        }
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = if self.field.half_basis { "α" } else { "√" };
        if self.field.half_basis {
            write!(f, "{} + {}·{sym}", self.x, self.y)
        } else {
            write!(f, "{} + {}·{sym}{}", self.x, self.y, self.field.d)
        }
    }
}

impl fmt::Display for SqrtCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} + {}·√d)/{}",
            self.rational, self.irrational, self.denom
        )
    }
}

/// An element with coordinates reduced modulo `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModQuadInt {
    field: FieldDesc,
    modulus: BigUint,
    x: BigUint,
    y: BigUint,
}

fn reduce_coord(v: &BigInt, n: &BigUint) -> BigUint {
    let n = BigInt::from(n.clone());
    v.mod_floor(&n)
        .to_biguint()
        .expect("floor residue is nonnegative")
}

impl ModQuadInt {
    /// Reduction of an exact element modulo `n >= 1`.
    pub fn reduce(v: &QuadInt, n: &BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::domain("modulus must be positive"));
        }
        Ok(Self {
            field: v.field,
            modulus: n.clone(),
            x: reduce_coord(&v.x, n),
            y: reduce_coord(&v.y, n),
        })
    }

    pub fn one(field: FieldDesc, n: &BigUint) -> Result<Self> {
        Self::reduce(&QuadInt::one(field), n)
    }

    pub fn field(&self) -> FieldDesc {
        self.field
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn x(&self) -> &BigUint {
        &self.x
    }

    pub fn y(&self) -> &BigUint {
        &self.y
    }

    pub fn mul(&self, other: &ModQuadInt) -> Result<ModQuadInt> {
        self.field.check_same(&other.field)?;
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus.to_string(),
                right: other.modulus.to_string(),
            });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &ModQuadInt) -> ModQuadInt {
        let n = &self.modulus;
        let yy = &self.y * &other.y % n;
        let x = (&self.x * &other.x + self.field.const_coeff * &yy) % n;
        let y = (&self.x * &other.y + &other.x * &self.y + self.field.trace_coeff * yy) % n;
        ModQuadInt {
            field: self.field,
            modulus: n.clone(),
            x,
            y,
        }
    }

    pub fn pow(&self, k: &BigUint) -> ModQuadInt {
        let mut acc = ModQuadInt {
            field: self.field,
            modulus: self.modulus.clone(),
            x: BigUint::one() % &self.modulus,
            y: BigUint::zero(),
        };
        let bits = k.bits();
        for i in (0..bits).rev() {
            acc = acc.mul_unchecked(&acc);
            if k.bit(i) {
                acc = acc.mul_unchecked(self);
            }
        }
        acc
    }
}

/// `a^k` reduced modulo `n`, with reduction after every multiplication.
pub fn pow_mod(a: &QuadInt, k: &BigUint, n: &BigUint) -> Result<ModQuadInt> {
    Ok(ModQuadInt::reduce(a, n)?.pow(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(d: i64) -> FieldDesc {
        make_field(d).unwrap()
    }

    #[test]
    fn make_field_examples() {
        let f5 = field(5);
        assert!(f5.half_basis());
        assert_eq!((f5.trace_coeff(), f5.const_coeff()), (1, 1));
        let f3 = field(3);
        assert!(!f3.half_basis());
        assert_eq!((f3.trace_coeff(), f3.const_coeff()), (0, 3));
        assert!(matches!(make_field(12), Err(Error::Domain(_))));
        assert!(matches!(make_field(1), Err(Error::Domain(_))));
        assert!(matches!(make_field(-5), Err(Error::Domain(_))));
        assert!(matches!(make_field(0), Err(Error::Domain(_))));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(QuadInt::new(field(3), 2, 1).norm(), BigInt::from(1));
        assert_eq!(QuadInt::new(field(5), 0, 1).norm(), BigInt::from(-1));
        for d in [2, 3, 5, 13, 17] {
            assert_eq!(QuadInt::one(field(d)).norm(), BigInt::one());
        }
    }

    #[test]
    fn pow_examples() {
        let u = QuadInt::new(field(3), 2, 1);
        assert_eq!(u.pow(0), QuadInt::one(field(3)));
        assert_eq!(u.pow(2), QuadInt::new(field(3), 7, 4));
        let g = QuadInt::new(field(5), 0, 1);
        // golden ratio powers follow Fibonacci: phi^n = F(n-1) + F(n) phi
        assert_eq!(g.pow(10), QuadInt::new(field(5), 34, 55));
    }

    #[test]
    fn mixed_field_rejected() {
        let a = QuadInt::new(field(3), 2, 1);
        let b = QuadInt::new(field(5), 0, 1);
        assert!(matches!(a.mul(&b), Err(Error::MixedField { .. })));
    }

    #[test]
    fn sqrt_coordinate_roundtrip() {
        let f = field(13);
        let u = QuadInt::from_sqrt_coords(f, 3, 1, 2).unwrap();
        assert_eq!((u.x(), u.y()), (&BigInt::from(1), &BigInt::from(1)));
        let c = u.sqrt_coords();
        assert_eq!((c.rational, c.irrational, c.denom), (3.into(), 1.into(), 2));
        assert!(QuadInt::from_sqrt_coords(f, 2, 1, 2).is_err());
        assert!(QuadInt::from_sqrt_coords(field(3), 1, 1, 2).is_err());
        let v = QuadInt::from_sqrt_coords(f, 4, 2, 1).unwrap();
        assert_eq!(v.integral_sqrt_coords(), Some((4.into(), 2.into())));
        assert_eq!(u.integral_sqrt_coords(), None);
    }

    #[test]
    fn pow_mod_examples() {
        let f = field(3);
        let u = QuadInt::new(f, 2, 1);
        let two = BigUint::from(2u32);
        let r = pow_mod(&u, &BigUint::zero(), &BigUint::from(7u32)).unwrap();
        assert_eq!((r.x(), r.y()), (&BigUint::one(), &BigUint::zero()));
        let r = pow_mod(&u, &two, &two).unwrap();
        assert_eq!((r.x(), r.y()), (&BigUint::one(), &BigUint::zero()));
        assert!(pow_mod(&u, &two, &BigUint::zero()).is_err());
    }

    #[test]
    fn modulus_mismatch_rejected() {
        let u = QuadInt::new(field(3), 2, 1);
        let a = ModQuadInt::reduce(&u, &BigUint::from(5u32)).unwrap();
        let b = ModQuadInt::reduce(&u, &BigUint::from(7u32)).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn signum_matches_float() {
        for d in [2i64, 3, 5, 13] {
            let f = field(d);
            for x in -6i64..=6 {
                for y in -6i64..=6 {
                    let v = QuadInt::new(f, x, y);
                    let alpha = if f.half_basis() {
                        (1.0 + (d as f64).sqrt()) / 2.0
                    } else {
                        (d as f64).sqrt()
                    };
                    let r = x as f64 + y as f64 * alpha;
                    let expect = if r > 0.0 {
                        Sign::Plus
                    } else if r < 0.0 {
                        Sign::Minus
                    } else {
                        Sign::NoSign
                    };
                    assert_eq!(v.signum(), expect, "{v} in d={d}");
                }
            }
        }
    }

    fn squarefree_d() -> impl Strategy<Value = FieldDesc> {
        (2i64..500).prop_filter_map("squarefree", |d| make_field(d).ok())
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(
            f in squarefree_d(),
            a in (-1000i64..1000, -1000i64..1000),
            b in (-1000i64..1000, -1000i64..1000),
        ) {
            let a = QuadInt::new(f, a.0, a.1);
            let b = QuadInt::new(f, b.0, b.1);
            prop_assert_eq!(a.mul(&b).unwrap().norm(), a.norm() * b.norm());
        }

        #[test]
        fn norm_is_product_with_conjugate(f in squarefree_d(), x in -500i64..500, y in -500i64..500) {
            let a = QuadInt::new(f, x, y);
            let p = a.mul(&a.conjugate()).unwrap();
            prop_assert_eq!(p.y(), &BigInt::zero());
            prop_assert_eq!(p.x(), &a.norm());
        }

        #[test]
        fn reduction_is_a_ring_homomorphism(
            f in squarefree_d(),
            a in (-10_000i64..10_000, -10_000i64..10_000),
            b in (-10_000i64..10_000, -10_000i64..10_000),
            n in 1u32..200,
        ) {
            let n = BigUint::from(n);
            let a = QuadInt::new(f, a.0, a.1);
            let b = QuadInt::new(f, b.0, b.1);
            let lhs = ModQuadInt::reduce(&a.mul(&b).unwrap(), &n).unwrap();
            let rhs = ModQuadInt::reduce(&a, &n).unwrap()
                .mul(&ModQuadInt::reduce(&b, &n).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn pow_mod_matches_exact_power(
            f in squarefree_d(),
            a in (-30i64..30, -30i64..30),
            k in 0u64..=40,
            n in 1u32..=50,
        ) {
            let a = QuadInt::new(f, a.0, a.1);
            let n = BigUint::from(n);
            let fast = pow_mod(&a, &BigUint::from(k), &n).unwrap();
            let exact = ModQuadInt::reduce(&a.pow(k), &n).unwrap();
            prop_assert_eq!(fast, exact);
        }
    }
}
