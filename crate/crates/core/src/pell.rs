//! Minimal solutions of `x^2 - p y^2 = 1` and the scan over primes asking
//! whether the minimal solution has `p` not dividing `y`.
//!
//! For an odd prime `p` the index-`p` order of `Q(sqrt p)` is locally
//! associated exactly when some solution has `p ∤ y`. If `p | y_1` then
//! `y_{k+1} = x_1 y_k + y_1 x_k` keeps every `y_k` divisible by `p`, so the
//! minimal solution decides the question.

use std::collections::VecDeque;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::laorder::is_locally_associated_direct;
use crate::quadfield::cf::first_period_solution;

/// Minimal positive solution of `x^2 - p y^2 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PellSolution {
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub x: BigUint,
    #[serde(with = "crate::decimal")]
    pub y: BigUint,
}

/// Minimal solution for any non-square `d > 1`: the convergent closing the
/// first period of `sqrt d`, squared when that period has odd length.
pub(crate) fn min_pell_solution(d: u64) -> PellSolution {
    let step = first_period_solution(0, 1, d);
    let negative = step.norm_sign() < 0;
    let (mut x, mut y) = (step.g, step.b);
    if negative {
        let d_big = BigInt::from(d);
        (x, y) = (&x * &x + d_big * &y * &y, BigInt::from(2) * &x * &y);
    }
    PellSolution {
        p: d,
        x: x.to_biguint().expect("convergents are positive"),
        y: y.to_biguint().expect("convergents are positive"),
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    Ok(())
}

fn require_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    Ok(())
}

pub fn pell_min_solution(p: u64) -> Result<PellSolution> {
    require_odd_prime(p)?;
    Ok(min_pell_solution(p))
}

/// Does the conjectured statement hold at `p`? For `p = 2` this is whether
/// the index-2 order of `Q(sqrt 2)` is locally associated.
pub fn conjecture_check(p: u64) -> Result<bool> {
    require_prime(p)?;
    if p == 2 {
        return is_locally_associated_direct(2, 2);
    }
    Ok(!min_pell_solution(p).y.is_multiple_of(&BigUint::from(p)))
}

/// Compares the direct verdict on `R_p` in `Q(sqrt p)` with the Pell side
/// (`p ∤ y` for the minimal solution). `false` means the two disagree.
pub fn theorem41_check(p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    let order_side = is_locally_associated_direct(p, p as i64)?;
    let pell_side = !min_pell_solution(p).y.is_multiple_of(&BigUint::from(p));
    Ok(order_side == pell_side)
}

/// One scanned prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanEntry {
    pub p: u64,
    pub holds: bool,
    pub solution: PellSolution,
}

fn scan_one(p: u64) -> Result<ScanEntry> {
    Ok(ScanEntry {
        p,
        holds: conjecture_check(p)?,
        solution: min_pell_solution(p),
    })
}

/// Streams [`ScanEntry`] values for every prime in `(after, p_max]` in
/// ascending order. Primes are evaluated in parallel blocks.
#[derive(Debug)]
pub struct ConjectureScan {
    next: u64,
    p_max: u64,
    buffer: VecDeque<ScanEntry>,
}

const SCAN_BLOCK: u64 = 2048;

impl ConjectureScan {
    pub fn new(p_max: u64) -> Self {
        Self::resume_after(0, p_max)
    }

    /// Continues a scan whose last completed prime was `last`.
    pub fn resume_after(last: u64, p_max: u64) -> Self {
        Self {
            next: last.saturating_add(1).max(2),
            p_max,
            buffer: VecDeque::new(),
        }
    }

    fn refill(&mut self) -> Result<()> {
        while self.buffer.is_empty() && self.next <= self.p_max {
            let end = self
                .next
                .saturating_add(SCAN_BLOCK)
                .min(self.p_max.saturating_add(1));
            let block: Vec<u64> = (self.next..end).filter(|&n| is_prime(n)).collect();
            let entries: Result<Vec<ScanEntry>> = block.into_par_iter().map(scan_one).collect();
            self.buffer.extend(entries?);
            self.next = end;
            if end == u64::MAX {
                break;
            }
        }
        Ok(())
    }
}

impl Iterator for ConjectureScan {
    type Item = Result<ScanEntry>;

    fn next(&mut self) -> Option<Self::Item> {
        if let Err(e) = self.refill() {
            self.next = self.p_max.saturating_add(1);
            return Some(Err(e));
        }
        self.buffer.pop_front().map(Ok)
    }
}

/// `(p, holds)` for every prime `p <= p_max`.
pub fn conjecture_scan(p_max: u64) -> Result<Vec<(u64, bool)>> {
    if p_max < 2 {
        return Err(Error::domain("p_max must be at least 2"));
    }
    ConjectureScan::new(p_max)
        .map(|e| e.map(|e| (e.p, e.holds)))
        .collect()
}

/// Reads the last completed prime from a checkpoint file. A missing or empty
/// file means nothing has been scanned yet.
pub fn load_checkpoint(path: &Path) -> Result<Option<u64>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let text = text.trim();
    if text.is_empty() {
        return Ok(None);
    }
    text.parse()
        .map(Some)
        .map_err(|_| Error::Checkpoint(format!("expected a prime, found {text:?}")))
}

/// Records `last` as the last completed prime (write then rename).
pub fn save_checkpoint(path: &Path, last: u64) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        writeln!(f, "{last}")?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)?;
    Ok(())
}
