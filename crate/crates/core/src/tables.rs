//! Batch tables over ranges of `(d, n)`, counts for the cases the rules leave
//! to direct computation, and persistence of the fundamental-unit cache.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Roots;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime, primes_up_to};
use crate::classify::classify_general_factored;
use crate::error::{Error, Result};
use crate::laorder::{is_locally_associated_direct, minimal_unit_power_factored};
use crate::quadfield::{make_field, FieldDesc, QuadInt, UnitCache};

/// CSV header, fixed.
pub const CSV_HEADER: [&str; 6] = ["d", "n", "locally_associated", "m", "L", "rules"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: u64,
    pub n: u64,
    pub verdict: bool,
    #[serde(with = "crate::decimal")]
    pub m: BigUint,
    #[serde(with = "crate::decimal")]
    pub l_value: BigUint,
    pub rules: String,
}

fn table_row(field: &FieldDesc, n: u64) -> Result<TableRow> {
    let factors = factorize(n)?;
    let class = classify_general_factored(&factors, field.d() as i64)?;
    let direct = minimal_unit_power_factored(&factors, field)?;
    if class.verdict != direct.locally_associated {
        return Err(Error::Inconsistent {
            n: n.to_string(),
            d: field.d(),
        });
    }
    Ok(TableRow {
        d: field.d(),
        n,
        verdict: class.verdict,
        m: direct.m,
        l_value: direct.l_value,
        rules: class.rules_string(),
    })
}

/// Rows for every `(d, n)` with `d` in `d_values` and `1 <= n <= n_max`,
/// ordered by `d` then `n`. Each `d` is computed as one parallel batch.
#[derive(Debug)]
pub struct TableRows {
    fields: std::vec::IntoIter<FieldDesc>,
    n_max: u64,
    pending: std::vec::IntoIter<TableRow>,
    failed: bool,
}

impl Iterator for TableRows {
    type Item = Result<TableRow>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.failed {
                return None;
            }
            if let Some(row) = self.pending.next() {
                return Some(Ok(row));
            }
            let field = self.fields.next()?;
            let batch: Result<Vec<TableRow>> = (1..=self.n_max)
                .into_par_iter()
                .map(|n| table_row(&field, n))
                .collect();
            match batch {
                Ok(rows) => self.pending = rows.into_iter(),
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
    }
}

/// Validates every `d` up front, so a bad value fails before any row exists.
pub fn generate_table(d_values: &BTreeSet<u64>, n_max: u64) -> Result<TableRows> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1"));
    }
    let fields = d_values
        .iter()
        .map(|&d| {
            i64::try_from(d)
                .map_err(|_| Error::Capacity(format!("d = {d} is too large")))
                .and_then(make_field)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TableRows {
        fields: fields.into_iter(),
        n_max,
        pending: Vec::new().into_iter(),
        failed: false,
    })
}

/// Squarefree `d` in `[d_min, d_max]`, optionally primes only.
pub fn d_range(d_min: u64, d_max: u64, primes_only: bool) -> Result<BTreeSet<u64>> {
    if d_min > d_max {
        return Err(Error::domain(format!("empty range {d_min}..={d_max}")));
    }
    let mut out = BTreeSet::new();
    for d in d_min.max(2)..=d_max {
        let keep = if primes_only {
            is_prime(d)
        } else {
            factorize(d)?.is_squarefree()
        };
        if keep {
            out.insert(d);
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(rows: impl IntoIterator<Item = Result<TableRow>>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let row = row?;
        w.write_record([
            row.d.to_string(),
            row.n.to_string(),
            u8::from(row.verdict).to_string(),
            row.m.to_string(),
            row.l_value.to_string(),
            row.rules,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_jsonl<W: Write>(
    rows: impl IntoIterator<Item = Result<TableRow>>,
    mut out: W,
) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, &row?)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// The three families of prime-power orders in `Q(sqrt p)` that the rules
/// hand to direct computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UndeterminedCase {
    /// `p = 5 (mod 8)`, `n = 2`.
    IndexTwo,
    /// `p != 3 (mod 4)`, `n = q` prime with `q = 3 (mod 4)`, `q > 3`.
    IndexPrime,
    /// `p != 3 (mod 4)`, `n = q^2` with `q = 3 (mod 4)` and `R_q` locally associated.
    IndexPrimeSquare,
}

impl UndeterminedCase {
    pub fn id(self) -> u8 {
        match self {
            UndeterminedCase::IndexTwo => 1,
            UndeterminedCase::IndexPrime => 2,
            UndeterminedCase::IndexPrimeSquare => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(UndeterminedCase::IndexTwo),
            2 => Ok(UndeterminedCase::IndexPrime),
            3 => Ok(UndeterminedCase::IndexPrimeSquare),
            _ => Err(Error::domain(format!(
                "unknown case {id}; expected 1, 2 or 3"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndeterminedStats {
    pub case_id: u8,
    pub occurrences: u64,
    pub locally_associated: u64,
    pub parameters: String,
}

/// Ranges for [`undetermined_stats`]. Cases 2 and 3 need an index bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsPolicy {
    pub cases: Vec<UndeterminedCase>,
    pub n_max: Option<u64>,
}

/// Does `(p, n)` belong to `case`? `r_q_la` is consulted only for case 3.
pub fn in_undetermined_case(
    case: UndeterminedCase,
    p: u64,
    n: u64,
    r_q_la: impl FnOnce(u64) -> Result<bool>,
) -> Result<bool> {
    Ok(match case {
        UndeterminedCase::IndexTwo => n == 2 && p % 8 == 5,
        UndeterminedCase::IndexPrime => p % 4 != 3 && n > 3 && n % 4 == 3 && is_prime(n),
        UndeterminedCase::IndexPrimeSquare => {
            let q = Roots::sqrt(&n);
            p % 4 != 3 && q * q == n && q % 4 == 3 && is_prime(q) && q != p && r_q_la(q)?
        }
    })
}

/// Counts occurrences and locally associated verdicts (direct computation)
/// over primes `p <= p_max`.
pub fn undetermined_stats(p_max: u64, policy: &StatsPolicy) -> Result<Vec<UndeterminedStats>> {
    if p_max < 2 {
        return Err(Error::domain("p_max must be at least 2"));
    }
    let primes = primes_up_to(p_max);
    policy
        .cases
        .iter()
        .map(|&case| {
            let pairs: Vec<(u64, u64)> = match case {
                UndeterminedCase::IndexTwo => primes
                    .iter()
                    .filter(|&&p| p % 8 == 5)
                    .map(|&p| (p, 2))
                    .collect(),
                UndeterminedCase::IndexPrime | UndeterminedCase::IndexPrimeSquare => {
                    let n_max = policy.n_max.ok_or_else(|| {
                        Error::domain(format!("case {} needs an index bound", case.id()))
                    })?;
                    let qs: Vec<u64> = primes_up_to(Roots::sqrt(&n_max).max(n_max.min(1 << 24)))
                        .into_iter()
                        .filter(|&q| {
                            q % 4 == 3 && (q > 3 || case == UndeterminedCase::IndexPrimeSquare)
                        })
                        .collect();
                    let mut pairs = Vec::new();
                    for &p in primes.iter().filter(|&&p| p % 4 != 3) {
                        for &q in &qs {
                            let n = if case == UndeterminedCase::IndexPrime {
                                Some(q).filter(|&n| n <= n_max)
                            } else {
                                q.checked_mul(q).filter(|&n| n <= n_max)
                            };
                            if let Some(n) = n {
                                pairs.push((p, n));
                            }
                        }
                    }
                    pairs
                }
            };
            let verdicts: Vec<Option<bool>> = pairs
                .par_iter()
                .map(|&(p, n)| {
                    let member = in_undetermined_case(case, p, n, |q| {
                        is_locally_associated_direct(q, p as i64)
                    })?;
                    if !member {
                        return Ok(None);
                    }
                    is_locally_associated_direct(n, p as i64).map(Some)
                })
                .collect::<Result<_>>()?;
            let occurrences = verdicts.iter().flatten().count() as u64;
            let locally_associated = verdicts.iter().flatten().filter(|&&v| v).count() as u64;
            let parameters = match (case, policy.n_max) {
                (UndeterminedCase::IndexTwo, _) => format!("p<={p_max}, p=5 mod 8, n=2"),
                (UndeterminedCase::IndexPrime, Some(n)) => {
                    format!("p<={p_max}, p!=3 mod 4, n=q<={n}, q=3 mod 4, q>3")
                }
                (_, n) => format!(
                    "p<={p_max}, p!=3 mod 4, n=q^2<={}, q=3 mod 4, R_q locally associated",
                    n.unwrap_or_default()
                ),
            };
            Ok(UndeterminedStats {
                case_id: case.id(),
                occurrences,
                locally_associated,
                parameters,
            })
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
struct CachedUnit {
    d: u64,
    x: String,
    y: String,
    norm: i64,
}

/// Writes one `{d, x, y, norm}` JSON object per line, ascending by `d`.
pub fn save_unit_cache(path: &Path, cache: &UnitCache) -> Result<()> {
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for unit in cache.entries() {
        let norm = if unit.norm().is_negative() { -1 } else { 1 };
        let record = CachedUnit {
            d: unit.field().d(),
            x: unit.x().to_string(),
            y: unit.y().to_string(),
            norm,
        };
        serde_json::to_writer(&mut out, &record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a cache file into a fresh [`UnitCache`], rejecting the whole file on
/// the first bad entry.
pub fn load_unit_cache(path: &Path) -> Result<UnitCache> {
    let cache = UnitCache::new();
    load_unit_cache_into(path, &cache)?;
    Ok(cache)
}

pub fn load_unit_cache_into(path: &Path, cache: &UnitCache) -> Result<usize> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut units = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        units.push(parse_cache_line(i + 1, &line)?);
    }
    let count = units.len();
    for unit in units {
        cache.insert(unit)?;
    }
    Ok(count)
}

fn parse_cache_line(line_no: usize, line: &str) -> Result<QuadInt> {
    let fail = |d: String, reason: String| Error::UnitCache {
        line: line_no,
        d,
        reason,
    };
    let rec: CachedUnit =
        serde_json::from_str(line).map_err(|e| fail("?".into(), e.to_string()))?;
    let d = rec.d.to_string();
    let field = i64::try_from(rec.d)
        .map_err(|_| Error::Capacity(format!("d = {d} is too large")))
        .and_then(make_field)
        .map_err(|e| fail(d.clone(), e.to_string()))?;
    let x: BigInt = rec
        .x
        .parse()
        .map_err(|_| fail(d.clone(), format!("bad x {:?}", rec.x)))?;
    let y: BigInt = rec
        .y
        .parse()
        .map_err(|_| fail(d.clone(), format!("bad y {:?}", rec.y)))?;
    let unit = QuadInt::new(field, x, y);
    let norm = unit.norm();
    if !norm.abs().is_one() {
        return Err(fail(d, format!("norm {norm} is not +-1")));
    }
    if norm != BigInt::from(rec.norm) {
        return Err(fail(
            d,
            format!("stored norm {} but computed {norm}", rec.norm),
        ));
    }
    if unit.signum() != num_bigint::Sign::Plus || unit == QuadInt::one(field) {
        return Err(fail(d, "unit must exceed 1".into()));
    }
    Ok(unit)
}
