use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{One, Signed};

use super::cf::first_period_solution;
use super::{FieldDesc, QuadInt};
use crate::error::{Error, Result};

/// The smallest unit `u > 1` of the ring of integers.
///
/// Integer basis: the period of `sqrt d` closes on the minimal solution of
/// `x^2 - d y^2 = +-1`. Half basis: the period of `(1 + sqrt d)/2` closes on
/// the minimal solution of `x^2 - d y^2 = +-4`, giving `u = (x + y sqrt d)/2`.
pub fn fundamental_unit(field: &FieldDesc) -> QuadInt {
    let d = field.d();
    let (p0, q0, denom) = if field.half_basis() {
        (1, 2, 2)
    } else {
        (0, 1, 1)
    };
    let step = first_period_solution(p0, q0, d);
    let unit = QuadInt::from_sqrt_coords(*field, step.g, step.b, denom)
        .expect("period convergent is an algebraic integer");
    debug_assert_eq!(unit.norm().abs(), num_bigint::BigInt::one());
    unit
}

/// Memoized fundamental units keyed by `d`.
///
/// Readers share a lock; a miss computes outside the lock and the first
/// writer wins, so concurrent misses on the same `d` may duplicate work but
/// always agree on the stored value.
#[derive(Debug, Default)]
pub struct UnitCache {
    units: RwLock<HashMap<u64, Arc<QuadInt>>>,
}

impl UnitCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, d: u64) -> Option<Arc<QuadInt>> {
        self.units
            .read()
            .expect("unit cache poisoned")
            .get(&d)
            .cloned()
    }

    pub fn get_or_compute(&self, field: &FieldDesc) -> Arc<QuadInt> {
        if let Some(u) = self.get(field.d()) {
            return u;
        }
        let fresh = Arc::new(fundamental_unit(field));
        self.units
            .write()
            .expect("unit cache poisoned")
            .entry(field.d())
            .or_insert(fresh)
            .clone()
    }

    /// Inserts a unit obtained elsewhere (e.g. from a cache file) after
    /// checking that it is a unit of norm `+-1` greater than one.
    pub fn insert(&self, unit: QuadInt) -> Result<()> {
        if !unit.norm().abs().is_one() || !unit.signum().eq(&num_bigint::Sign::Plus) {
            return Err(Error::domain(format!(
                "{unit} is not a unit greater than one"
            )));
        }
        self.units
            .write()
            .expect("unit cache poisoned")
            .insert(unit.field().d(), Arc::new(unit));
        Ok(())
    }

    /// Snapshot of all cached units, ascending by `d`.
    pub fn entries(&self) -> Vec<Arc<QuadInt>> {
        let mut all: Vec<_> = self
            .units
            .read()
            .expect("unit cache poisoned")
            .values()
            .cloned()
            .collect();
        all.sort_by_key(|u| u.field().d());
        all
    }

    pub fn len(&self) -> usize {
        self.units.read().expect("unit cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Process-wide cache used by the order and classification routines.
pub fn global_unit_cache() -> &'static UnitCache {
    static CACHE: OnceLock<UnitCache> = OnceLock::new();
    CACHE.get_or_init(UnitCache::new)
}
