//! First-scan statistics, frequency filtering, item ordering, and the
//! per-item occupancy lists that seed the search.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::datamodel::{item_utility, Item, ProfitTable, QuantDatabase};
use crate::scalar::{count, Scalar};
use crate::uolist::{PatternNode, UOEntry};

/// Parameter-domain errors (mining thresholds and generator knobs).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("alpha must lie in (0, 1], got {0}")]
    AlphaOutOfRange(String),
    #[error("beta must lie in (0, 1], got {0}")]
    BetaOutOfRange(String),
    #[error(
        "minimum support count {minsup} over {db_size} transactions: with a floor below 2 \
         every transaction's own row qualifies and the output is just an echo of the input; \
         raise alpha until ceil(alpha * {db_size}) >= 2"
    )]
    DegenerateSupport { minsup: usize, db_size: usize },
    #[error("{name} must be at least 1")]
    ZeroParam { name: &'static str },
    #[error("avg_len {avg_len} must lie in [1, n_items = {n_items}]")]
    AvgLenOutOfRange { avg_len: f64, n_items: usize },
    #[error("profit range [{low}, {high}] must satisfy 0 < low <= high, both finite")]
    BadProfitRange { low: String, high: String },
}

/// Validated thresholds for one mining run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiningParams<S> {
    alpha: S,
    beta: S,
    minsup_count: usize,
    db_size: usize,
}

impl<S: Scalar> MiningParams<S> {
    /// Checks `0 < alpha, beta <= 1` and derives the absolute support
    /// floor `ceil(alpha * |D|)`.
    ///
    /// A floor below 2 is rejected: at minsup 1 every transaction is its
    /// own qualifying pattern, so the run would only echo the input.
    pub fn new(alpha: S, beta: S, db_size: usize) -> Result<Self, ConfigError> {
        if !(alpha > S::zero() && alpha <= S::one()) {
            return Err(ConfigError::AlphaOutOfRange(alpha.to_string()));
        }
        if !(beta > S::zero() && beta <= S::one()) {
            return Err(ConfigError::BetaOutOfRange(beta.to_string()));
        }
        // The epsilon absorbs binary-decimal drift so e.g. alpha 0.07 over
        // 100 rows gives a floor of 7, not ceil(7.000000000000001) = 8.
        let eps = S::from_f64(1e-9).unwrap_or_else(S::zero);
        let scaled = alpha * count::<S>(db_size) - eps;
        let minsup_count = scaled.ceil().to_usize().unwrap_or(0);
        if minsup_count < 2 {
            return Err(ConfigError::DegenerateSupport { minsup: minsup_count, db_size });
        }
        Ok(MiningParams { alpha, beta, minsup_count, db_size })
    }

    pub fn alpha(&self) -> S {
        self.alpha
    }

    pub fn beta(&self) -> S {
        self.beta
    }

    /// Absolute support floor `ceil(alpha * |D|)`.
    pub fn minsup_count(&self) -> usize {
        self.minsup_count
    }

    pub fn db_size(&self) -> usize {
        self.db_size
    }
}

/// Per-item support and transaction-weighted utility from the first scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemStats<S> {
    stats: BTreeMap<Item, (usize, S)>,
}

impl<S: Scalar> ItemStats<S> {
    /// Number of transactions containing the item (0 if never seen).
    pub fn support(&self, item: &Item) -> usize {
        self.stats.get(item).map_or(0, |(sup, _)| *sup)
    }

    /// Sum of `tu` over the item's supporting transactions.
    pub fn twu(&self, item: &Item) -> S {
        self.stats.get(item).map_or_else(S::zero, |(_, twu)| *twu)
    }

    /// Items in lexicographic order.
    pub fn items(&self) -> impl Iterator<Item = &Item> {
        self.stats.keys()
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }
}

/// One pass over the database: support and twu per item.
pub fn scan_stats<S: Scalar>(db: &QuantDatabase<S>) -> ItemStats<S> {
    let mut stats: BTreeMap<Item, (usize, S)> = BTreeMap::new();
    for tx in db.transactions() {
        for (item, _) in tx.items() {
            let entry = stats.entry(item.clone()).or_insert((0, S::zero()));
            entry.0 += 1;
            entry.1 = entry.1 + tx.tu();
        }
    }
    ItemStats { stats }
}

/// Items meeting the absolute support floor — the only alphabet the
/// search will ever mention.
pub fn frequent_items<S: Scalar>(
    stats: &ItemStats<S>,
    params: &MiningParams<S>,
) -> BTreeSet<Item> {
    stats
        .stats
        .iter()
        .filter(|(_, (sup, _))| *sup >= params.minsup_count())
        .map(|(item, _)| item.clone())
        .collect()
}

/// Ranking policy for the processing order ≺; ties always break by name,
/// ascending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OrderPolicy {
    Lexicographic,
    TwuAscending,
    TwuDescending,
    #[default]
    SupportAscending,
    SupportDescending,
}

impl OrderPolicy {
    pub const ALL: [OrderPolicy; 5] = [
        OrderPolicy::Lexicographic,
        OrderPolicy::TwuAscending,
        OrderPolicy::TwuDescending,
        OrderPolicy::SupportAscending,
        OrderPolicy::SupportDescending,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OrderPolicy::Lexicographic => "lexi",
            OrderPolicy::TwuAscending => "twu-asc",
            OrderPolicy::TwuDescending => "twu-desc",
            OrderPolicy::SupportAscending => "sup-asc",
            OrderPolicy::SupportDescending => "sup-desc",
        }
    }
}

impl fmt::Display for OrderPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lexi" => Ok(OrderPolicy::Lexicographic),
            "twu-asc" => Ok(OrderPolicy::TwuAscending),
            "twu-desc" => Ok(OrderPolicy::TwuDescending),
            "sup-asc" => Ok(OrderPolicy::SupportAscending),
            "sup-desc" => Ok(OrderPolicy::SupportDescending),
            other => Err(format!(
                "unknown order {other:?}; expected one of lexi, twu-asc, twu-desc, sup-asc, sup-desc"
            )),
        }
    }
}

/// A concrete total order over every item the stats scan saw. Rank 0 is
/// processed first; UO-lists identify items by these ranks.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemOrder {
    items: Vec<Item>,
    ranks: HashMap<Item, u32>,
    policy: OrderPolicy,
}

impl ItemOrder {
    pub fn rank(&self, item: &Item) -> Option<u32> {
        self.ranks.get(item).copied()
    }

    pub fn item_at(&self, rank: u32) -> Option<&Item> {
        self.items.get(rank as usize)
    }

    /// Items in rank order.
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn policy(&self) -> OrderPolicy {
        self.policy
    }
}

/// Ranks all scanned items under the policy. Sorting is stable over the
/// lexicographic base order, which is exactly the tie-break rule.
pub fn build_order<S: Scalar>(stats: &ItemStats<S>, policy: OrderPolicy) -> ItemOrder {
    let mut items: Vec<Item> = stats.items().cloned().collect(); // name-ascending base
    let finite = |v: S, w: S| v.partial_cmp(&w).expect("stats values are finite");
    match policy {
        OrderPolicy::Lexicographic => {}
        OrderPolicy::TwuAscending => items.sort_by(|a, b| finite(stats.twu(a), stats.twu(b))),
        OrderPolicy::TwuDescending => items.sort_by(|a, b| finite(stats.twu(b), stats.twu(a))),
        OrderPolicy::SupportAscending => items.sort_by_key(|i| stats.support(i)),
        OrderPolicy::SupportDescending => {
            items.sort_by_key(|i| std::cmp::Reverse(stats.support(i)))
        }
    }
    let ranks = items
        .iter()
        .enumerate()
        .map(|(rank, item)| (item.clone(), rank as u32))
        .collect();
    ItemOrder { items, ranks, policy }
}

/// Second database pass: the 1-item occupancy lists, rank-ascending, one
/// per frequent item, entries in tid order.
///
/// An item's occupancy is its share of the *full* row utility; its
/// remaining occupancy sums only frequent items ranked after it —
/// infrequent items can never extend a pattern, so counting them would
/// merely loosen the search bound.
pub fn build_initial_uolists<S: Scalar>(
    db: &QuantDatabase<S>,
    frequent: &BTreeSet<Item>,
    order: &ItemOrder,
    profits: &ProfitTable<S>,
) -> Vec<PatternNode<S>> {
    let mut ranks: Vec<u32> = frequent
        .iter()
        .map(|item| order.rank(item).expect("frequent item was ranked"))
        .collect();
    ranks.sort_unstable();
    let slot: HashMap<u32, usize> = ranks.iter().enumerate().map(|(s, r)| (*r, s)).collect();
    let mut nodes: Vec<PatternNode<S>> =
        ranks.iter().map(|rank| PatternNode::new(vec![*rank])).collect();

    let mut members: Vec<(u32, S)> = Vec::new();
    for tx in db.transactions() {
        members.clear();
        for (item, _) in tx.items() {
            let rank = order.rank(item).expect("scanned item was ranked");
            if slot.contains_key(&rank) {
                let util = item_utility(item, tx, profits).expect("member item has utility");
                members.push((rank, util));
            }
        }
        members.sort_unstable_by_key(|(rank, _)| *rank);
        let tu = tx.tu();
        let mut after = S::zero(); // utility of members ranked behind the cursor
        for &(rank, util) in members.iter().rev() {
            nodes[slot[&rank]].push(UOEntry {
                tid: tx.tid(),
                uo: util / tu,
                ruo: after / tu,
            });
            after = after + util;
        }
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    fn item(name: &str) -> Item {
        Item::new(name).unwrap()
    }

    fn names(order: &ItemOrder) -> Vec<&str> {
        order.items().iter().map(|i| i.as_str()).collect()
    }

    #[test]
    fn minsup_count_is_ceiling_of_alpha_share() {
        let p = MiningParams::new(0.30, 0.30, 10).unwrap();
        assert_eq!(p.minsup_count(), 3);
        assert_eq!(MiningParams::new(0.25, 0.5, 10).unwrap().minsup_count(), 3);
        assert_eq!(MiningParams::new(0.20, 0.5, 10).unwrap().minsup_count(), 2);
        assert_eq!(MiningParams::new(1.0, 1.0, 10).unwrap().minsup_count(), 10);
        // decimal thresholds must not pick up a spurious +1 from binary drift
        assert_eq!(MiningParams::new(0.07, 0.5, 100).unwrap().minsup_count(), 7);
    }

    #[test]
    fn degenerate_support_floor_is_rejected() {
        let err = MiningParams::new(0.10, 0.30, 10).unwrap_err();
        assert!(matches!(err, ConfigError::DegenerateSupport { minsup: 1, db_size: 10 }));
        assert!(MiningParams::new(0.05, 0.30, 10).is_err());
        assert!(MiningParams::new(0.5, 0.5, 0).is_err());
    }

    #[test]
    fn threshold_domain_is_half_open_unit_interval() {
        assert!(matches!(
            MiningParams::new(0.0, 0.5, 10),
            Err(ConfigError::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            MiningParams::new(1.5, 0.5, 10),
            Err(ConfigError::AlphaOutOfRange(_))
        ));
        assert!(matches!(
            MiningParams::new(0.5, 0.0, 10),
            Err(ConfigError::BetaOutOfRange(_))
        ));
        assert!(matches!(
            MiningParams::new(0.5, -0.1, 10),
            Err(ConfigError::BetaOutOfRange(_))
        ));
        assert!(matches!(
            MiningParams::new(f64::NAN, 0.5, 10),
            Err(ConfigError::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn scan_counts_support_and_twu() {
        let (db, _) = testdata::example_db();
        let stats = scan_stats(&db);
        assert_eq!(stats.support(&item("a")), 5);
        assert_eq!(stats.support(&item("b")), 5);
        assert_eq!(stats.support(&item("c")), 8);
        assert_eq!(stats.support(&item("d")), 7);
        assert_eq!(stats.support(&item("e")), 4);
        assert_eq!(stats.support(&item("zz")), 0);
        // twu(e) = 49 + 58 + 61 + 42
        assert!((stats.twu(&item("e")) - 210.0).abs() < 1e-9);
        assert!((stats.twu(&item("a")) - 272.0).abs() < 1e-9);
    }

    #[test]
    fn scan_of_single_transaction() {
        let profits = crate::datamodel::parse_profit_table::<f64>("x 2\ny 3\n").unwrap();
        let db = crate::datamodel::parse_transactions("x:1 y:2\n", &profits).unwrap();
        let stats = scan_stats(&db);
        assert_eq!(stats.len(), 2);
        assert_eq!(stats.support(&item("x")), 1);
        assert!((stats.twu(&item("x")) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn frequent_items_applies_the_floor() {
        let (db, _) = testdata::example_db();
        let stats = scan_stats(&db);
        let all = frequent_items(&stats, &MiningParams::new(0.30, 0.3, 10).unwrap());
        assert_eq!(all.len(), 5);
        let only_c = frequent_items(&stats, &MiningParams::new(0.80, 0.3, 10).unwrap());
        assert_eq!(only_c.iter().map(|i| i.as_str()).collect::<Vec<_>>(), vec!["c"]);
        let none = frequent_items(&stats, &MiningParams::new(1.0, 0.3, 10).unwrap());
        assert!(none.is_empty());
    }

    #[test]
    fn support_ascending_order_with_lexicographic_ties() {
        let (db, _) = testdata::example_db();
        let stats = scan_stats(&db);
        let order = build_order(&stats, OrderPolicy::SupportAscending);
        // a and b tie at support 5 and stay name-ascending
        assert_eq!(names(&order), vec!["e", "a", "b", "d", "c"]);
        assert_eq!(order.rank(&item("e")), Some(0));
        assert_eq!(order.rank(&item("c")), Some(4));
        assert_eq!(order.item_at(1), Some(&item("a")));
    }

    #[test]
    fn remaining_order_policies() {
        let (db, _) = testdata::example_db();
        let stats = scan_stats(&db);
        assert_eq!(
            names(&build_order(&stats, OrderPolicy::SupportDescending)),
            vec!["c", "d", "a", "b", "e"]
        );
        assert_eq!(
            names(&build_order(&stats, OrderPolicy::Lexicographic)),
            vec!["a", "b", "c", "d", "e"]
        );
        // twu: b 196, e 210, a 272, d 306, c 371
        assert_eq!(
            names(&build_order(&stats, OrderPolicy::TwuAscending)),
            vec!["b", "e", "a", "d", "c"]
        );
        assert_eq!(
            names(&build_order(&stats, OrderPolicy::TwuDescending)),
            vec!["c", "d", "a", "e", "b"]
        );
    }

    #[test]
    fn order_of_single_item() {
        let profits = crate::datamodel::parse_profit_table::<f64>("x 1\n").unwrap();
        let db = crate::datamodel::parse_transactions("x:1\nx:2\n", &profits).unwrap();
        let order = build_order(&scan_stats(&db), OrderPolicy::SupportAscending);
        assert_eq!(order.len(), 1);
        assert_eq!(order.rank(&item("x")), Some(0));
    }

    fn example_initial_lists() -> Vec<PatternNode<f64>> {
        let (db, profits) = testdata::example_db();
        let stats = scan_stats(&db);
        let params = MiningParams::new(0.30, 0.30, db.len()).unwrap();
        let frequent = frequent_items(&stats, &params);
        let order = build_order(&stats, OrderPolicy::SupportAscending);
        build_initial_uolists(&db, &frequent, &order, &profits)
    }

    #[test]
    fn initial_list_of_e_matches_worked_values() {
        let nodes = example_initial_lists();
        let e = &nodes[0]; // rank 0 under support-ascending
        assert_eq!(e.list.items, vec![0]);
        let tids: Vec<u32> = e.list.entries.iter().map(|x| x.tid).collect();
        assert_eq!(tids, vec![5, 6, 8, 10]);
        let expect = [
            (0.1837, 0.8163),
            (0.6207, 0.3793),
            (0.5902, 0.4098),
            (0.2143, 0.7857),
        ];
        for (entry, (uo, ruo)) in e.list.entries.iter().zip(expect) {
            assert!((entry.uo - uo).abs() <= 1e-4, "uo {} vs {uo}", entry.uo);
            assert!((entry.ruo - ruo).abs() <= 1e-4, "ruo {} vs {ruo}", entry.ruo);
        }
        assert_eq!(e.table.sup, 4);
        assert!((e.table.sum_uo - 1.6089).abs() <= 1e-4);
    }

    #[test]
    fn last_ranked_item_has_zero_remaining() {
        let nodes = example_initial_lists();
        let c = nodes.last().unwrap(); // rank 4 = c
        assert_eq!(c.table.sup, 8);
        assert!(c.list.entries.iter().all(|x| x.ruo == 0.0));
    }

    #[test]
    fn remaining_occupancy_of_a_in_t5() {
        let nodes = example_initial_lists();
        let a = &nodes[1]; // rank 1
        let t5 = a.list.entries.iter().find(|x| x.tid == 5).unwrap();
        assert!((t5.ruo - 0.6735).abs() <= 1e-4, "got {}", t5.ruo);
    }

    #[test]
    fn occupancies_partition_each_transaction() {
        // with every item frequent, the per-row occupancies must sum to 1
        let (db, profits) = testdata::example_db();
        let stats = scan_stats(&db);
        let params = MiningParams::new(0.20, 0.30, db.len()).unwrap();
        let frequent = frequent_items(&stats, &params);
        assert_eq!(frequent.len(), 5);
        let order = build_order(&stats, OrderPolicy::SupportAscending);
        let nodes = build_initial_uolists(&db, &frequent, &order, &profits);
        for tx in db.transactions() {
            let total: f64 = nodes
                .iter()
                .flat_map(|n| n.list.entries.iter())
                .filter(|e| e.tid == tx.tid())
                .map(|e| e.uo)
                .sum();
            assert!((total - 1.0).abs() <= 1e-9, "tid {}: {}", tx.tid(), total);
        }
    }

    #[test]
    fn remaining_occupancy_skips_infrequent_items() {
        // z appears once; with minsup 2 it is infrequent. Under the
        // support-descending order z ranks *after* a, yet ruo(a) must count
        // only b — z can never extend a pattern, however large its utility.
        let profits = crate::datamodel::parse_profit_table::<f64>("a 1\nb 1\nz 100\n").unwrap();
        let db =
            crate::datamodel::parse_transactions("a:1 b:1 z:1\na:1 b:1\n", &profits).unwrap();
        let stats = scan_stats(&db);
        let params = MiningParams::new(1.0, 0.5, db.len()).unwrap();
        let frequent = frequent_items(&stats, &params);
        assert_eq!(frequent.len(), 2);
        let order = build_order(&stats, OrderPolicy::SupportDescending);
        let nodes = build_initial_uolists(&db, &frequent, &order, &profits);
        let rank_a = order.rank(&item("a")).unwrap();
        let a = nodes.iter().find(|n| n.list.items == vec![rank_a]).unwrap();
        let t1 = &a.list.entries[0];
        assert_eq!(t1.tid, 1);
        assert!((t1.uo - 1.0 / 102.0).abs() <= 1e-12);
        assert!((t1.ruo - 1.0 / 102.0).abs() <= 1e-12, "ruo counts only b: {}", t1.ruo);
    }
}
