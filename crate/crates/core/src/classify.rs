//! Rule-based classification of orders `R_n` in `Q(sqrt p)` for prime `p`.
//!
//! `n` is split into prime powers `q^k`. `R_n` is locally associated iff every
//! `R_{q^k}` is and the values `L(q^k, p)` are pairwise coprime. Each prime
//! power is settled by a congruence rule where one applies; the remaining
//! base cases (`R_p`, `R_2` for `p = 5 mod 8`, `R_q` and `R_{q^2}` for
//! `q = 3 mod 4` when `p != 3 mod 4`, and `R_4`/`R_9` in `Q(sqrt 2)`/`Q(sqrt 3)`)
//! go to the direct unit-power computation.
//!
//! The classifier never assumes `R_p` is locally associated; it computes it.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{self, is_prime, PrimeFactorization};
use crate::error::{Error, Result};
use crate::laorder::{self, l_prime_power, minimal_unit_power_factored, MinPowerResult};
use crate::quadfield::{make_field, FieldDesc};

/// Which rule settled a step of a classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleTag {
    /// `n = 2`, `p != 5 (mod 8)`: locally associated.
    Case1,
    /// `n = 4`, `p = 1 (mod 8)`: locally associated.
    Case2,
    /// `n = 3`, `p != 3 (mod 4)`: locally associated.
    Case3,
    /// `R_{p^k}` follows `R_p`.
    Case4,
    /// `p = 5 (mod 8)`: `R_4` follows `R_2`.
    Case5,
    /// `q` odd, `q != p`: `R_{q^k}` follows `R_{q^2}`.
    Case6,
    /// `q` odd, `q != p`, and `p = 3 (mod 4)` or `q = 1 (mod 4)`: not locally associated.
    Case7,
    /// `n = 4`, `p = 3 (mod 4)`: not locally associated.
    Case8,
    /// `n = 8`, `p` odd: not locally associated.
    Case9,
    /// `L(n, d) = 1`.
    TrivialL1,
    /// Inherited failure from a larger order containing this one.
    Towers,
    /// Pairwise coprimality of the prime-power `L` values.
    CoprimeCombiner,
    /// Settled by the direct unit-power computation.
    DirectBaseCase,
    /// `n = 2`, `p = 5 (mod 8)`, computed directly.
    Undetermined1,
    /// `n = q`, `q = 3 (mod 4)`, `q > 3`, `p != 3 (mod 4)`, computed directly.
    Undetermined2,
    /// `n = q^2` with `R_q` locally associated, computed directly.
    Undetermined3,
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(with = "crate::decimal")]
    pub subindex: BigUint,
    pub rule: RuleTag,
    pub outcome: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectComputation {
    #[serde(with = "crate::decimal")]
    pub subindex: BigUint,
    #[serde(with = "crate::decimal")]
    pub m: BigUint,
    #[serde(rename = "L", with = "crate::decimal")]
    pub l_value: BigUint,
}

impl From<&MinPowerResult> for DirectComputation {
    fn from(r: &MinPowerResult) -> Self {
        Self {
            subindex: r.n.clone(),
            m: r.m.clone(),
            l_value: r.l_value.clone(),
        }
    }
}

/// Verdict for `R_n` with the steps that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(with = "crate::decimal")]
    pub n: BigUint,
    pub d: u64,
    pub verdict: bool,
    pub trace: Vec<TraceStep>,
    #[serde(rename = "direct")]
    pub direct_computations: Vec<DirectComputation>,
}

impl Classification {
    /// `;`-joined rule tags, in trace order.
    pub fn rules_string(&self) -> String {
        self.trace
            .iter()
            .map(|s| s.rule.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }

    /// The combiner step, present when `n` has two or more prime factors.
    pub fn coprimality(&self) -> Option<&TraceStep> {
        self.trace
            .iter()
            .find(|s| s.rule == RuleTag::CoprimeCombiner)
    }
}

/// Outcome for a single prime-power index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePowerVerdict {
    pub verdict: bool,
    pub rule: RuleTag,
    /// Direct computations this verdict rests on, smallest index first.
    pub direct: Vec<MinPowerResult>,
}

impl PrimePowerVerdict {
    fn by_rule(verdict: bool, rule: RuleTag) -> Self {
        Self {
            verdict,
            rule,
            direct: Vec::new(),
        }
    }
}

fn direct(q: u64, k: u32, field: &FieldDesc) -> Result<MinPowerResult> {
    minimal_unit_power_factored(&PrimeFactorization::prime_power(q, k)?, field)
}

/// Classifies `R_{q^k}` in `Q(sqrt p)` for primes `q`, `p` and `k >= 1`.
pub fn classify_prime_power(q: u64, k: u32, p: u64) -> Result<PrimePowerVerdict> {
    if !is_prime(q) {
        return Err(Error::domain(format!("{q} is not prime")));
    }
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if k == 0 {
        return Err(Error::domain("prime power exponent must be positive"));
    }
    let field = make_field(p as i64)?;
    prime_power_rules(q, k, p, &field)
}

fn prime_power_rules(q: u64, k: u32, p: u64, field: &FieldDesc) -> Result<PrimePowerVerdict> {
    use RuleTag::*;

    if q == p {
        let base = direct(p, 1, field)?;
        if k == 1 {
            return Ok(PrimePowerVerdict {
                verdict: base.locally_associated,
                rule: DirectBaseCase,
                direct: vec![base],
            });
        }
        let mut verdict = base.locally_associated;
        let mut used = vec![base];
        // The lift from R_p to R_{p^2} is only argued for p > 3.
        if verdict && p <= 3 {
            let square = direct(p, 2, field)?;
            verdict = square.locally_associated;
            used.push(square);
        }
        return Ok(PrimePowerVerdict {
            verdict,
            rule: Case4,
            direct: used,
        });
    }

    if q == 2 {
        // p is odd here
        return Ok(match (k, p % 8) {
            (1, 1) => PrimePowerVerdict::by_rule(true, TrivialL1),
            (1, 3 | 7) => PrimePowerVerdict::by_rule(true, Case1),
            (1, _) => {
                let r = direct(2, 1, field)?;
                PrimePowerVerdict {
                    verdict: r.locally_associated,
                    rule: Undetermined1,
                    direct: vec![r],
                }
            }
            (2, 1) => PrimePowerVerdict::by_rule(true, Case2),
            (2, 3 | 7) => PrimePowerVerdict::by_rule(false, Case8),
            (2, _) => {
                let r = direct(2, 1, field)?;
                PrimePowerVerdict {
                    verdict: r.locally_associated,
                    rule: Case5,
                    direct: vec![r],
                }
            }
            (3, _) => PrimePowerVerdict::by_rule(false, Case9),
            _ => PrimePowerVerdict::by_rule(false, Towers),
        });
    }

    if p % 4 == 3 || q % 4 == 1 {
        return Ok(PrimePowerVerdict::by_rule(false, Case7));
    }

    // q = 3 (mod 4), q != p, p != 3 (mod 4)
    match k {
        1 if q == 3 => Ok(PrimePowerVerdict::by_rule(true, Case3)),
        1 => {
            let r = direct(q, 1, field)?;
            Ok(PrimePowerVerdict {
                verdict: r.locally_associated,
                rule: Undetermined2,
                direct: vec![r],
            })
        }
        2 => {
            let below = prime_power_rules(q, 1, p, field)?;
            if !below.verdict {
                return Ok(PrimePowerVerdict {
                    verdict: false,
                    rule: Towers,
                    direct: below.direct,
                });
            }
            let r = direct(q, 2, field)?;
            let mut used = below.direct;
            let verdict = r.locally_associated;
            used.push(r);
            Ok(PrimePowerVerdict {
                verdict,
                rule: Undetermined3,
                direct: used,
            })
        }
        _ => {
            let square = prime_power_rules(q, 2, p, field)?;
            Ok(PrimePowerVerdict {
                verdict: square.verdict,
                rule: Case6,
                direct: square.direct,
            })
        }
    }
}

/// Joins per-prime-power verdicts: each must hold and the `L` values must be
/// pairwise coprime.
fn combine(
    n: &PrimeFactorization,
    d: u64,
    mut settle: impl FnMut(u64, u32) -> Result<PrimePowerVerdict>,
) -> Result<Classification> {
    let mut trace = Vec::with_capacity(n.factors().len() + 1);
    let mut direct_computations: Vec<DirectComputation> = Vec::new();
    let mut verdict = true;
    let mut l_values = Vec::with_capacity(n.factors().len());
    for &(q, k) in n.factors() {
        let pp = settle(q, k)?;
        for r in &pp.direct {
            if !direct_computations.iter().any(|c| c.subindex == r.n) {
                direct_computations.push(r.into());
            }
        }
        trace.push(TraceStep {
            subindex: BigUint::from(q).pow(k),
            rule: pp.rule,
            outcome: pp.verdict,
        });
        verdict &= pp.verdict;
        l_values.push(l_prime_power(q, k, d as i64));
    }
    if l_values.len() > 1 {
        let coprime = l_values
            .iter()
            .enumerate()
            .all(|(i, a)| l_values[i + 1..].iter().all(|b| a.gcd(b).is_one()));
        trace.push(TraceStep {
            subindex: n.value(),
            rule: RuleTag::CoprimeCombiner,
            outcome: coprime,
        });
        verdict &= coprime;
    }
    Ok(Classification {
        n: n.value(),
        d,
        verdict,
        trace,
        direct_computations,
    })
}

/// Rule-based classification for a factored index in `Q(sqrt p)`.
pub fn classify_factored(n: &PrimeFactorization, p: u64) -> Result<Classification> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let field = make_field(p as i64)?;
    combine(n, p, |q, k| prime_power_rules(q, k, p, &field))
}

/// Rule-based classification of `R_n` in `Q(sqrt p)`.
pub fn classify(n: u64, p: u64) -> Result<Classification> {
    classify_factored(&index_factorization(n)?, p)
}

/// Classification for any admissible `d`. Prime `d` uses the rules; composite
/// `d` settles every prime power by direct computation.
pub fn classify_general_factored(n: &PrimeFactorization, d: i64) -> Result<Classification> {
    let field = make_field(d)?;
    if is_prime(field.d()) {
        return classify_factored(n, field.d());
    }
    direct_classification(n, &field)
}

pub fn classify_general(n: u64, d: i64) -> Result<Classification> {
    classify_general_factored(&index_factorization(n)?, d)
}

/// Prime-power decomposition with every prime power resolved directly.
pub fn direct_classification(n: &PrimeFactorization, field: &FieldDesc) -> Result<Classification> {
    combine(n, field.d(), |q, k| {
        let r = direct(q, k, field)?;
        Ok(PrimePowerVerdict {
            verdict: r.locally_associated,
            rule: RuleTag::DirectBaseCase,
            direct: vec![r],
        })
    })
}

/// Does the rule-based verdict agree with the direct computation on all of `R_n`?
pub fn cross_validate(n: u64, p: u64) -> Result<bool> {
    let fast = classify(n, p)?.verdict;
    Ok(fast == laorder::is_locally_associated_direct(n, p as i64)?)
}

fn index_factorization(n: u64) -> Result<PrimeFactorization> {
    if n == 0 {
        return Err(Error::domain("order index must be positive"));
    }
    arith::factorize(n)
}
