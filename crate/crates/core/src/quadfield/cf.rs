//! The PQa recurrence for the continued fraction of `(P0 + sqrt(D)) / Q0`.
//!
//! Alongside the partial quotients it tracks the convergent numerators `A_i`,
//! denominators `B_i`, and `G_i = Q0 A_i - P0 B_i`, which satisfy
//! `G_i^2 - D B_i^2 = (-1)^(i+1) Q_{i+1} Q0`. Only exact integer arithmetic is
//! used; the floor of `sqrt(D)` comes from Newton iteration.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// One step of the recurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PqaStep {
    pub index: usize,
    pub partial_quotient: BigInt,
    pub g: BigInt,
    pub b: BigInt,
    /// `Q_{i+1}`, the denominator of the next complete quotient.
    pub q_next: BigInt,
}

impl PqaStep {
    /// Sign of `G_i^2 - D B_i^2`.
    pub fn norm_sign(&self) -> i8 {
        if self.index % 2 == 0 {
            -1
        } else {
            1
        }
    }
}

#[derive(Debug, Clone)]
pub struct Pqa {
    radicand: BigInt,
    sqrt_floor: BigInt,
    p: BigInt,
    q: BigInt,
    a: [BigInt; 2],
    b: [BigInt; 2],
    g: [BigInt; 2],
    index: usize,
}

impl Pqa {
    /// Expansion of `(p0 + sqrt(radicand)) / q0`. Requires a non-square
    /// positive radicand, `q0 != 0` and `q0 | radicand - p0^2`.
    pub fn new(p0: i64, q0: i64, radicand: u64) -> Self {
        let radicand = BigInt::from(radicand);
        let sqrt_floor = radicand.sqrt();
        assert!(
            &sqrt_floor * &sqrt_floor != radicand,
            "radicand {radicand} is a perfect square"
        );
        let (p0, q0) = (BigInt::from(p0), BigInt::from(q0));
        assert!(!q0.is_zero(), "q0 must be nonzero");
        assert!(
            ((&radicand - &p0 * &p0) % &q0).is_zero(),
            "q0 must divide radicand - p0^2"
        );
        Self {
            a: [BigInt::zero(), BigInt::one()],
            b: [BigInt::one(), BigInt::zero()],
            g: [-p0.clone(), q0.clone()],
            radicand,
            sqrt_floor,
            p: p0,
            q: q0,
            index: 0,
        }
    }

    fn floor_quotient(&self) -> BigInt {
        // sqrt(D) is irrational, so the floor only depends on floor(sqrt(D)).
        let numerator = if self.q.is_positive() {
            &self.p + &self.sqrt_floor
        } else {
            &self.p + &self.sqrt_floor + 1u32
        };
        numerator.div_floor(&self.q)
    }
}

impl Iterator for Pqa {
    type Item = PqaStep;

    fn next(&mut self) -> Option<PqaStep> {
        let a_i = self.floor_quotient();
        let next = |pair: &mut [BigInt; 2]| {
            let v = &a_i * &pair[1] + &pair[0];
            pair[0] = std::mem::replace(&mut pair[1], v.clone());
            v
        };
        let _ = next(&mut self.a);
        let b = next(&mut self.b);
        let g = next(&mut self.g);
        let p_next = &a_i * &self.q - &self.p;
        let q_next = (&self.radicand - &p_next * &p_next) / &self.q;
        self.p = p_next;
        self.q = q_next.clone();
        let step = PqaStep {
            index: self.index,
            partial_quotient: a_i,
            g,
            b,
            q_next,
        };
        self.index += 1;
        Some(step)
    }
}

/// First solution `(G, B)` of `G^2 - D B^2 = +-q0^2` produced by the expansion
/// of `(p0 + sqrt(D)) / q0`: the convergent that closes the first period.
pub fn first_period_solution(p0: i64, q0: i64, radicand: u64) -> PqaStep {
    let target = BigInt::from(q0).abs();
    Pqa::new(p0, q0, radicand)
        .find(|step| step.q_next == target)
        .expect("the expansion of a quadratic irrational is eventually periodic")
}
