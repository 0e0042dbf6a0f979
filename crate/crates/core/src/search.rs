//! Depth-first mining over the implicit pattern-extension tree.
//!
//! The tree is never materialized: each frame holds the UO-lists of one
//! node's extensions, joins later siblings onto earlier ones to form the
//! next level, and recurses. Four concerns gate the walk:
//!
//! * the support gate (always on) — nodes below the support floor are
//!   never expanded, since support only shrinks along extensions;
//! * bound pruning (`s2`) — a subtree is skipped once the occupancy
//!   upper bound [`upper_bound`] drops below β;
//! * early abandoning (`s3`) — a join aborts mid-merge when the child
//!   provably cannot reach the floor;
//! * child filtering (`s4`) — freshly built children below the floor are
//!   dropped instead of carried.
//!
//! None of the toggles changes the mined set, only the work done to find
//! it.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::datamodel::{Itemset, Pattern, ProfitTable, QuantDatabase};
use crate::preprocess::{
    build_initial_uolists, build_order, frequent_items, scan_stats, ConfigError, MiningParams,
    OrderPolicy,
};
use crate::scalar::{count, Scalar};
use crate::uolist::{construct, PatternNode, UOList};

/// Search-level errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(
        "upper bound needs 1 <= minsup_count <= support; got support {have}, minsup_count {need}"
    )]
    BoundNeedsSupport { have: usize, need: usize },
}

/// Optional accelerations. The support gate is always active; none of
/// these change the result set, only the node count visited to reach it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StrategySet {
    /// `s2`: skip a subtree once its occupancy upper bound falls below β.
    pub bound_pruning: bool,
    /// `s3`: abandon a join as soon as the child provably misses the floor.
    pub early_abandon: bool,
    /// `s4`: drop just-built children below the floor instead of carrying them.
    pub child_filter: bool,
}

impl StrategySet {
    pub const fn all() -> Self {
        StrategySet { bound_pruning: true, early_abandon: true, child_filter: true }
    }

    /// The bare search: support gate only.
    pub const fn baseline() -> Self {
        StrategySet { bound_pruning: false, early_abandon: false, child_filter: false }
    }

    /// Every toggle combination, baseline first — for differential runs.
    pub fn subsets() -> [StrategySet; 8] {
        let mut out = [StrategySet::baseline(); 8];
        for (i, set) in out.iter_mut().enumerate() {
            set.bound_pruning = i & 1 != 0;
            set.early_abandon = i & 2 != 0;
            set.child_filter = i & 4 != 0;
        }
        out
    }
}

impl Default for StrategySet {
    fn default() -> Self {
        StrategySet::all()
    }
}

impl fmt::Display for StrategySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("s1")?;
        if self.bound_pruning {
            f.write_str("+s2")?;
        }
        if self.early_abandon {
            f.write_str("+s3")?;
        }
        if self.child_filter {
            f.write_str("+s4")?;
        }
        Ok(())
    }
}

impl FromStr for StrategySet {
    type Err = String;

    /// Parses a comma list from `{s2, s3, s4}`; the empty string means
    /// none of them (the always-on support gate remains).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut set = StrategySet::baseline();
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match token {
                "s2" => set.bound_pruning = true,
                "s3" => set.early_abandon = true,
                "s4" => set.child_filter = true,
                "s1" => return Err("s1 is always enabled; list only s2, s3, s4".into()),
                other => Err(format!("unknown strategy {other:?}; expected s2, s3 or s4"))?,
            }
        }
        Ok(set)
    }
}

/// One mining run's configuration.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SearchConfig {
    pub strategies: StrategySet,
    pub order: OrderPolicy,
    /// Verify the bound and closure invariants while searching, counting
    /// violations in [`SearchStats::audit`]. Costs one bound computation
    /// per explored node even where pruning is off.
    pub audit_bounds: bool,
}

/// Counters and timing from one run.
#[derive(Debug, Clone, Default)]
pub struct SearchStats {
    /// Nodes whose list construction was attempted: the 1-item nodes plus
    /// every sibling join.
    pub visited_nodes: u64,
    /// Attempted sibling joins (`visited_nodes` minus the 1-items).
    pub joins: u64,
    /// Subtrees skipped by the occupancy upper bound (`s2`).
    pub pruned_by_bound: u64,
    /// Support-based discards: gate skips, abandoned joins, vacuous or
    /// filtered children.
    pub pruned_by_support: u64,
    pub wall_time: Duration,
    pub audit: AuditCounters,
}

/// Invariant violations observed while auditing — all zero unless the
/// occupancy arithmetic is broken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AuditCounters {
    /// An emitted pattern's occupancy exceeded an ancestor's upper bound.
    pub emitted_over_bound: u64,
    /// A child's upper bound exceeded its parent's.
    pub child_bound_over_parent: u64,
    /// A child's support exceeded its parent's.
    pub child_support_over_parent: u64,
}

impl AuditCounters {
    pub fn total(&self) -> u64 {
        self.emitted_over_bound + self.child_bound_over_parent + self.child_support_over_parent
    }
}

/// The highest mean occupancy any pattern in this node's subtree can
/// reach: the mean of the `minsup_count` largest per-transaction
/// `uo + ruo` sums in its UO-list.
///
/// Sound because per shared transaction a descendant's occupancy is at
/// most this node's `uo + ruo`, descendants only lose transactions, and a
/// qualifying descendant keeps at least `minsup_count` of them — so the
/// top slice's mean dominates every descendant's mean.
pub fn upper_bound<S: Scalar>(list: &UOList<S>, minsup_count: usize) -> Result<S, SearchError> {
    let have = list.entries.len();
    if minsup_count == 0 || have < minsup_count {
        return Err(SearchError::BoundNeedsSupport { have, need: minsup_count });
    }
    let mut sums: Vec<S> = list.entries.iter().map(|e| e.uo + e.ruo).collect();
    sums.sort_by(|a, b| b.partial_cmp(a).expect("occupancies are finite"));
    let top = sums[..minsup_count].iter().fold(S::zero(), |acc, v| acc + *v);
    Ok(top / count(minsup_count))
}

struct Ctx<S> {
    minsup: usize,
    beta: S,
    strategies: StrategySet,
    audit: bool,
    tol: S,
}

/// One frame of the depth-first walk: `node` is the pattern whose
/// extension list we are processing (`None` at the root), `node_bound`
/// its upper bound when one was computed, `bound_floor` the minimum
/// bound along the path down to `node`.
fn huop_search<S: Scalar>(
    ctx: &Ctx<S>,
    node: Option<&PatternNode<S>>,
    extensions: &[PatternNode<S>],
    node_bound: Option<S>,
    bound_floor: Option<S>,
    out: &mut Vec<(Vec<u32>, usize, S)>,
    stats: &mut SearchStats,
) {
    for (ia, xa) in extensions.iter().enumerate() {
        let sup = xa.table.sup;
        if sup < ctx.minsup {
            // reachable only when s3 and s4 are both off and a sub-floor
            // child was carried here; its whole subtree is hopeless
            stats.pruned_by_support += 1;
            continue;
        }
        let uo = xa.table.sum_uo / count(sup);
        if uo >= ctx.beta {
            if ctx.audit {
                if let Some(floor) = bound_floor {
                    if uo > floor + ctx.tol {
                        stats.audit.emitted_over_bound += 1;
                    }
                }
            }
            out.push((xa.list.items.clone(), sup, uo));
        }

        let bound = if ctx.strategies.bound_pruning || ctx.audit {
            let phi = upper_bound(&xa.list, ctx.minsup).expect("support was gated above");
            if ctx.audit {
                if let Some(parent_phi) = node_bound {
                    if phi > parent_phi + ctx.tol {
                        stats.audit.child_bound_over_parent += 1;
                    }
                }
            }
            Some(phi)
        } else {
            None
        };
        if ctx.strategies.bound_pruning {
            if let Some(phi) = bound {
                if phi < ctx.beta {
                    stats.pruned_by_bound += 1;
                    continue; // no extension below can reach β
                }
            }
        }

        if ia + 1 == extensions.len() {
            continue; // last sibling: nothing to extend with
        }
        let floor = if ctx.strategies.early_abandon { Some(ctx.minsup) } else { None };
        let mut children: Vec<PatternNode<S>> = Vec::new();
        for xb in &extensions[ia + 1..] {
            stats.joins += 1;
            stats.visited_nodes += 1;
            let joined = construct(node.map(|n| &n.list), &xa.list, &xb.list, floor)
                .expect("sibling lists share this frame's prefix");
            match joined {
                None => stats.pruned_by_support += 1, // abandoned mid-join
                Some(child) => {
                    if ctx.audit && child.table.sup > sup {
                        stats.audit.child_support_over_parent += 1;
                    }
                    if child.table.sup == 0 {
                        stats.pruned_by_support += 1; // no shared transactions
                    } else if ctx.strategies.child_filter && child.table.sup < ctx.minsup {
                        stats.pruned_by_support += 1;
                    } else {
                        children.push(child);
                    }
                }
            }
        }
        if !children.is_empty() {
            let child_floor = match (bound_floor, bound) {
                (Some(f), Some(p)) => Some(f.min(p)),
                (None, p) => p,
                (f, None) => f,
            };
            huop_search(ctx, Some(xa), &children, bound, child_floor, out, stats);
        }
    }
}

/// Mines every pattern that is both frequent — support at least
/// `ceil(alpha * |D|)` — and dominant — mean utility occupancy at least
/// `beta`.
///
/// Two database scans (stats, then initial lists), then a depth-first walk
/// that never touches the database again. Patterns come back sorted by
/// their display form; the result set is identical for every strategy and
/// order configuration.
pub fn mine<S: Scalar>(
    db: &QuantDatabase<S>,
    profits: &ProfitTable<S>,
    alpha: S,
    beta: S,
    config: &SearchConfig,
) -> Result<(Vec<Pattern<S>>, SearchStats), SearchError> {
    let started = Instant::now();
    let params = MiningParams::new(alpha, beta, db.len())?;
    let item_stats = scan_stats(db);
    let frequent = frequent_items(&item_stats, &params);
    let order = build_order(&item_stats, config.order);
    let initial = build_initial_uolists(db, &frequent, &order, profits);

    let mut stats = SearchStats { visited_nodes: initial.len() as u64, ..Default::default() };
    let ctx = Ctx {
        minsup: params.minsup_count(),
        beta,
        strategies: config.strategies,
        audit: config.audit_bounds,
        tol: S::from_f64(1e-9).unwrap_or_else(S::zero),
    };
    let mut raw: Vec<(Vec<u32>, usize, S)> = Vec::new();
    huop_search(&ctx, None, &initial, None, None, &mut raw, &mut stats);

    let mut patterns: Vec<Pattern<S>> = raw
        .into_iter()
        .map(|(ranks, sup, uo)| {
            let items = ranks
                .iter()
                .map(|r| order.item_at(*r).expect("rank from this order").clone())
                .collect();
            let itemset = Itemset::new(items).expect("mined patterns are valid itemsets");
            Pattern { itemset, sup, uo }
        })
        .collect();
    patterns.sort_by_cached_key(|p| p.itemset.to_string());
    stats.wall_time = started.elapsed();
    Ok((patterns, stats))
}
