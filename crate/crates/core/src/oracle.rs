//! Brute-force reference miner used to cross-check the list-based search.
//!
//! Enumerates every non-empty itemset over the database's distinct items
//! as a bitmask, recomputes support and mean utility occupancy straight
//! from the transactions, and keeps what clears both thresholds. Nothing
//! here shares code with the UO-list machinery — that independence is the
//! point — so it is exponential in the item count and capped accordingly.

use std::collections::{BTreeMap, BTreeSet};

use crate::datamodel::{Item, Itemset, Pattern, ProfitTable, QuantDatabase};
use crate::preprocess::{ConfigError, MiningParams};
use crate::scalar::{count, Scalar};

/// Default cap on distinct items; 2^16 - 1 candidate sets is still fast.
pub const DEFAULT_MAX_ITEMS: usize = 16;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(
        "database has {count} distinct items; exhaustive enumeration is capped at {cap} \
         (generate a smaller instance)"
    )]
    TooManyItems { count: usize, cap: usize },
}

/// What an exhaustive run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<S> {
    /// Qualifying patterns, sorted by display form like the search output.
    pub patterns: Vec<Pattern<S>>,
    /// Candidate itemsets examined: `2^m - 1` for `m` distinct items.
    pub enumerated: u64,
}

/// Per-transaction view precomputed for mask arithmetic: which of the
/// distinct items are present, their utilities, and the transaction total.
struct MaskedTx<S> {
    mask: u64,
    utils: Vec<S>,
    tu: S,
}

fn masked_view<S: Scalar>(
    db: &QuantDatabase<S>,
    profits: &ProfitTable<S>,
    universe: &[Item],
) -> Vec<MaskedTx<S>> {
    let slot: BTreeMap<&Item, usize> =
        universe.iter().enumerate().map(|(i, item)| (item, i)).collect();
    db.transactions()
        .iter()
        .map(|tx| {
            let mut mask = 0u64;
            let mut utils = vec![S::zero(); universe.len()];
            for (item, quantity) in tx.items() {
                let i = slot[item];
                mask |= 1 << i;
                utils[i] = count::<S>(*quantity as usize)
                    * profits.profit(item).expect("parsing guarantees known items");
            }
            MaskedTx { mask, utils, tu: tx.tu() }
        })
        .collect()
}

/// Mines by exhaustive enumeration: every itemset with support at least
/// `ceil(alpha * |D|)` and mean occupancy at least `beta`.
pub fn enumerate_all<S: Scalar>(
    db: &QuantDatabase<S>,
    profits: &ProfitTable<S>,
    alpha: S,
    beta: S,
    max_items: usize,
) -> Result<OracleResult<S>, OracleError> {
    let params = MiningParams::new(alpha, beta, db.len())?;
    let universe: Vec<Item> = db
        .transactions()
        .iter()
        .flat_map(|tx| tx.items().iter().map(|(item, _)| item.clone()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    // 63 is the mask width's hard ceiling; any practical cap sits far below
    let cap = max_items.min(63);
    if universe.len() > cap {
        return Err(OracleError::TooManyItems { count: universe.len(), cap });
    }
    let txs = masked_view(db, profits, &universe);

    let mut patterns = Vec::new();
    let full: u64 = 1 << universe.len();
    for candidate in 1..full {
        let mut sup = 0usize;
        let mut occupancy_sum = S::zero();
        for tx in &txs {
            if tx.mask & candidate == candidate {
                sup += 1;
                let mut util = S::zero();
                let mut bits = candidate;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    util = util + tx.utils[i];
                    bits &= bits - 1;
                }
                occupancy_sum = occupancy_sum + util / tx.tu;
            }
        }
        if sup < params.minsup_count() {
            continue;
        }
        let uo = occupancy_sum / count(sup);
        if uo >= beta {
            let items = (0..universe.len())
                .filter(|i| candidate & (1 << i) != 0)
                .map(|i| universe[i].clone())
                .collect();
            let itemset = Itemset::new(items).expect("universe items are distinct");
            patterns.push(Pattern { itemset, sup, uo });
        }
    }
    patterns.sort_by_cached_key(|p| p.itemset.to_string());
    Ok(OracleResult { patterns, enumerated: full - 1 })
}

/// Support and mean occupancy of one itemset, straight from the
/// definition. `None` occupancy when the itemset occurs nowhere.
pub fn uo_brute<S: Scalar>(
    itemset: &Itemset,
    db: &QuantDatabase<S>,
    profits: &ProfitTable<S>,
) -> (usize, Option<S>) {
    let mut sup = 0usize;
    let mut occupancy_sum = S::zero();
    for tx in db.transactions() {
        let mut util = S::zero();
        let mut hit = 0usize;
        for (item, quantity) in tx.items() {
            if itemset.contains(item) {
                hit += 1;
                util = util + count::<S>(*quantity as usize)
                    * profits.profit(item).expect("parsing guarantees known items");
            }
        }
        if hit == itemset.len() {
            sup += 1;
            occupancy_sum = occupancy_sum + util / tx.tu();
        }
    }
    if sup == 0 {
        (0, None)
    } else {
        (sup, Some(occupancy_sum / count(sup)))
    }
}
