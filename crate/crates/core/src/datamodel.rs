//! Quantitative transaction data: items, profits, transactions, patterns.
//!
//! Both file formats are line-oriented UTF-8; blank lines and lines whose
//! first character is `#` are skipped:
//!
//! * transactions — whitespace-separated `item:quantity` tokens, one
//!   transaction per line, e.g. `a:2 c:4 d:7`;
//! * profits — one `item profit` pair per line, e.g. `c 11`.
//!
//! Transaction ids are assigned 1..=n in file order. Serialization keeps
//! the stored item order, so a parse → serialize → parse round trip is
//! exact.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::Scalar;

/// Errors from parsing, construction and utility lookups.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    /// Malformed profit or transaction input; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    /// Item token failed validation.
    #[error("invalid item name {0:?}: must be non-empty with no whitespace or ':'")]
    BadItemName(String),
    /// Unit profits must be strictly positive (and finite).
    #[error("profit for {item:?} must be a positive finite number")]
    NonPositiveProfit { item: String },
    /// Quantities must be at least 1.
    #[error("quantity for {item:?} must be at least 1")]
    ZeroQuantity { item: String },
    /// The same item appeared twice where it must be unique.
    #[error("duplicate item {0:?}")]
    DuplicateItem(String),
    /// An item without a profit entry.
    #[error("item {0:?} has no profit entry")]
    UnknownItem(String),
    /// A transaction must contain at least one item.
    #[error("transaction {0} is empty")]
    EmptyTransaction(u32),
    /// Transaction ids must be strictly increasing.
    #[error("transaction id {0} is not greater than its predecessor")]
    NonAscendingTid(u32),
    /// Utility lookup of an item the transaction does not contain.
    #[error("item {item:?} does not occur in transaction {tid}")]
    AbsentItem { tid: u32, item: String },
    /// An itemset must contain at least one item.
    #[error("itemset is empty")]
    EmptyItemset,
}

fn format_err(line: usize, msg: impl Into<String>) -> DataError {
    DataError::Format { line, msg: msg.into() }
}

/// An item identifier: any non-empty token without whitespace or `:`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item(String);

impl Item {
    /// Validates and wraps a token.
    pub fn new(token: impl Into<String>) -> Result<Self, DataError> {
        let token = token.into();
        if token.is_empty() || token.contains(':') || token.chars().any(char::is_whitespace) {
            return Err(DataError::BadItemName(token));
        }
        Ok(Item(token))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unit profit per item; every profit is strictly positive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProfitTable<S> {
    profits: BTreeMap<Item, S>,
}

impl<S: Scalar> ProfitTable<S> {
    pub fn new() -> Self {
        ProfitTable { profits: BTreeMap::new() }
    }

    /// Registers an item's unit profit; rejects duplicates and
    /// non-positive or non-finite values.
    pub fn insert(&mut self, item: Item, profit: S) -> Result<(), DataError> {
        if !(profit > S::zero()) || !profit.is_finite() {
            return Err(DataError::NonPositiveProfit { item: item.0 });
        }
        if self.profits.contains_key(&item) {
            return Err(DataError::DuplicateItem(item.0));
        }
        self.profits.insert(item, profit);
        Ok(())
    }

    pub fn profit(&self, item: &Item) -> Option<S> {
        self.profits.get(item).copied()
    }

    pub fn len(&self) -> usize {
        self.profits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profits.is_empty()
    }

    /// Entries in lexicographic item order.
    pub fn iter(&self) -> impl Iterator<Item = (&Item, S)> {
        self.profits.iter().map(|(i, p)| (i, *p))
    }
}

/// One basket row: distinct items with positive quantities. The row's
/// total utility `tu` is fixed at construction; items keep their input
/// order so files round-trip untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantTransaction<S> {
    tid: u32,
    items: Vec<(Item, u32)>,
    tu: S,
}

impl<S: Scalar> QuantTransaction<S> {
    /// Builds a transaction, validating quantities, uniqueness and profit
    /// coverage, and caching `tu = Σ quantity × profit`.
    pub fn new(
        tid: u32,
        items: Vec<(Item, u32)>,
        profits: &ProfitTable<S>,
    ) -> Result<Self, DataError> {
        if items.is_empty() {
            return Err(DataError::EmptyTransaction(tid));
        }
        let mut tu = S::zero();
        for (idx, (item, quantity)) in items.iter().enumerate() {
            if *quantity == 0 {
                return Err(DataError::ZeroQuantity { item: item.0.clone() });
            }
            if items[..idx].iter().any(|(prev, _)| prev == item) {
                return Err(DataError::DuplicateItem(item.0.clone()));
            }
            let profit = profits
                .profit(item)
                .ok_or_else(|| DataError::UnknownItem(item.0.clone()))?;
            tu = tu + S::from_u32(*quantity).expect("quantity fits in scalar") * profit;
        }
        Ok(QuantTransaction { tid, items, tu })
    }

    pub fn tid(&self) -> u32 {
        self.tid
    }

    /// Total utility of the whole row.
    pub fn tu(&self) -> S {
        self.tu
    }

    pub fn items(&self) -> &[(Item, u32)] {
        &self.items
    }

    pub fn quantity(&self, item: &Item) -> Option<u32> {
        self.items.iter().find(|(i, _)| i == item).map(|(_, q)| *q)
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.quantity(item).is_some()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty rows
    }
}

/// An ordered collection of transactions with strictly increasing tids.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantDatabase<S> {
    transactions: Vec<QuantTransaction<S>>,
}

impl<S: Scalar> QuantDatabase<S> {
    pub fn new(transactions: Vec<QuantTransaction<S>>) -> Result<Self, DataError> {
        for pair in transactions.windows(2) {
            if pair[1].tid <= pair[0].tid {
                return Err(DataError::NonAscendingTid(pair[1].tid));
            }
        }
        Ok(QuantDatabase { transactions })
    }

    pub fn transactions(&self) -> &[QuantTransaction<S>] {
        &self.transactions
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }
}

/// A non-empty, duplicate-free set of items, kept and displayed in
/// lexicographic order (`a c d`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Itemset {
    items: Vec<Item>,
}

impl Itemset {
    pub fn new(mut items: Vec<Item>) -> Result<Self, DataError> {
        if items.is_empty() {
            return Err(DataError::EmptyItemset);
        }
        items.sort();
        for pair in items.windows(2) {
            if pair[0] == pair[1] {
                return Err(DataError::DuplicateItem(pair[0].0.clone()));
            }
        }
        Ok(Itemset { items })
    }

    /// Convenience constructor from string tokens.
    pub fn from_tokens<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Result<Self, DataError> {
        let items = tokens
            .into_iter()
            .map(Item::new)
            .collect::<Result<Vec<_>, _>>()?;
        Itemset::new(items)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.items.binary_search(item).is_ok()
    }

    /// True when every member also occurs in `other`.
    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.items.iter().all(|i| other.contains(i))
    }
}

impl fmt::Display for Itemset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, item) in self.items.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ")?;
            }
            f.write_str(item.as_str())?;
        }
        Ok(())
    }
}

/// A mined result: itemset, support count, and mean utility occupancy.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern<S> {
    pub itemset: Itemset,
    pub sup: usize,
    pub uo: S,
}

/// Parses a profit file; errors name the offending 1-based line.
pub fn parse_profit_table<S: Scalar>(text: &str) -> Result<ProfitTable<S>, DataError> {
    let mut table = ProfitTable::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut fields = raw.split_whitespace();
        let item_token = fields.next().expect("non-blank line has a field");
        let profit_token = fields
            .next()
            .ok_or_else(|| format_err(line, format!("expected \"item profit\", got {raw:?}")))?;
        if let Some(extra) = fields.next() {
            return Err(format_err(line, format!("unexpected trailing field {extra:?}")));
        }
        let item = Item::new(item_token).map_err(|e| format_err(line, e.to_string()))?;
        let profit: S = profit_token
            .parse()
            .map_err(|_| format_err(line, format!("unreadable profit {profit_token:?}")))?;
        table
            .insert(item, profit)
            .map_err(|e| format_err(line, e.to_string()))?;
    }
    Ok(table)
}

/// Parses a transactions file against an already-loaded profit table;
/// tids are assigned 1..=n in file order.
pub fn parse_transactions<S: Scalar>(
    text: &str,
    profits: &ProfitTable<S>,
) -> Result<QuantDatabase<S>, DataError> {
    let mut transactions = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let tid = transactions.len() as u32 + 1;
        let mut items = Vec::new();
        for token in raw.split_whitespace() {
            let (item_token, quantity_token) = token.split_once(':').ok_or_else(|| {
                format_err(line, format!("expected item:quantity, got {token:?}"))
            })?;
            let item = Item::new(item_token).map_err(|e| format_err(line, e.to_string()))?;
            let quantity: u32 = quantity_token.parse().map_err(|_| {
                format_err(line, format!("unreadable quantity {quantity_token:?}"))
            })?;
            items.push((item, quantity));
        }
        let tx = QuantTransaction::new(tid, items, profits)
            .map_err(|e| format_err(line, e.to_string()))?;
        transactions.push(tx);
    }
    QuantDatabase::new(transactions)
}

/// Renders a profit table in its file format, items in lexicographic order.
pub fn serialize_profit_table<S: Scalar>(table: &ProfitTable<S>) -> String {
    let mut out = String::new();
    for (item, profit) in table.iter() {
        out.push_str(&format!("{item} {profit}\n"));
    }
    out
}

/// Renders transactions in their file format, stored order throughout.
pub fn serialize_transactions<S: Scalar>(db: &QuantDatabase<S>) -> String {
    let mut out = String::new();
    for tx in db.transactions() {
        for (idx, (item, quantity)) in tx.items().iter().enumerate() {
            if idx > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{item}:{quantity}"));
        }
        out.push('\n');
    }
    out
}

/// Utility of one item occurrence: quantity × unit profit.
pub fn item_utility<S: Scalar>(
    item: &Item,
    tx: &QuantTransaction<S>,
    profits: &ProfitTable<S>,
) -> Result<S, DataError> {
    let quantity = tx.quantity(item).ok_or_else(|| DataError::AbsentItem {
        tid: tx.tid(),
        item: item.0.clone(),
    })?;
    let profit = profits
        .profit(item)
        .ok_or_else(|| DataError::UnknownItem(item.0.clone()))?;
    Ok(S::from_u32(quantity).expect("quantity fits in scalar") * profit)
}

/// Utility of a whole itemset inside one transaction; errors if any member
/// is missing from the row.
pub fn itemset_utility_in_tx<S: Scalar>(
    itemset: &Itemset,
    tx: &QuantTransaction<S>,
    profits: &ProfitTable<S>,
) -> Result<S, DataError> {
    let mut total = S::zero();
    for item in itemset.items() {
        total = total + item_utility(item, tx, profits)?;
    }
    Ok(total)
}

/// Renders patterns one per line — lexicographic item list, support, and
/// occupancy at four decimals, tab-separated — with lines sorted by the
/// item string, e.g. `a c d\t4\t0.8972`.
pub fn serialize_patterns<S: Scalar>(patterns: &[Pattern<S>]) -> String {
    let mut keyed: Vec<(String, String)> = patterns
        .iter()
        .map(|p| {
            let key = p.itemset.to_string();
            let line = format!("{key}\t{}\t{:.4}\n", p.sup, p.uo);
            (key, line)
        })
        .collect();
    keyed.sort();
    keyed.into_iter().map(|(_, line)| line).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    fn item(name: &str) -> Item {
        Item::new(name).unwrap()
    }

    #[test]
    fn parses_example_profit_table() {
        let table: ProfitTable<f64> = parse_profit_table(testdata::EXAMPLE_PROFITS).unwrap();
        assert_eq!(table.len(), 5);
        assert_eq!(table.profit(&item("a")), Some(7.0));
        assert_eq!(table.profit(&item("c")), Some(11.0));
        assert_eq!(table.profit(&item("e")), Some(9.0));
        assert_eq!(table.profit(&item("z")), None);
    }

    #[test]
    fn empty_profit_stream_gives_empty_table() {
        let table: ProfitTable<f64> = parse_profit_table("").unwrap();
        assert!(table.is_empty());
    }

    #[test]
    fn duplicate_profit_line_is_rejected_with_line_number() {
        let err = parse_profit_table::<f64>("a 7\nb 2\na 3\n").unwrap_err();
        match err {
            DataError::Format { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("\"a\""), "message should name the item: {msg}");
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn non_positive_profit_is_rejected() {
        assert!(parse_profit_table::<f64>("a 0\n").is_err());
        assert!(parse_profit_table::<f64>("a -3\n").is_err());
        assert!(parse_profit_table::<f64>("a inf\n").is_err());
        assert!(parse_profit_table::<f64>("a nan\n").is_err());
    }

    #[test]
    fn parses_example_transactions_with_cached_tu() {
        let (db, _) = testdata::example_db();
        assert_eq!(db.len(), 10);
        let tus: Vec<f64> = db.transactions().iter().map(|t| t.tu()).collect();
        assert_eq!(tus, vec![65.0, 37.0, 38.0, 11.0, 49.0, 58.0, 23.0, 61.0, 59.0, 42.0]);
        assert_eq!(db.transactions()[0].tid(), 1);
        assert_eq!(db.transactions()[9].tid(), 10);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let profits: ProfitTable<f64> = parse_profit_table("# demo\n\na 7\n").unwrap();
        let db = parse_transactions("# header\n\na:2\n\n# tail\na:1\n", &profits).unwrap();
        assert_eq!(db.len(), 2);
        assert_eq!(db.transactions()[1].tid(), 2);
    }

    #[test]
    fn zero_quantity_is_rejected_with_line_number() {
        let profits: ProfitTable<f64> = parse_profit_table("a 7\n").unwrap();
        let err = parse_transactions("a:0\n", &profits).unwrap_err();
        assert!(matches!(err, DataError::Format { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn unknown_item_is_rejected_naming_item_and_line() {
        let profits: ProfitTable<f64> = parse_profit_table("a 7\n").unwrap();
        let err = parse_transactions("a:1 q:2\n", &profits).unwrap_err();
        match err {
            DataError::Format { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("\"q\""), "{msg}");
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_item_within_transaction_is_rejected() {
        let profits: ProfitTable<f64> = parse_profit_table("a 7\n").unwrap();
        let err = parse_transactions("a:1 a:2\n", &profits).unwrap_err();
        assert!(matches!(err, DataError::Format { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn malformed_token_is_rejected() {
        let profits: ProfitTable<f64> = parse_profit_table("a 7\n").unwrap();
        assert!(parse_transactions("a\n", &profits).is_err());
        assert!(parse_transactions("a:x\n", &profits).is_err());
        assert!(parse_transactions("a:\n", &profits).is_err());
    }

    #[test]
    fn item_utility_matches_quantity_times_profit() {
        let (db, profits) = testdata::example_db();
        let t3 = &db.transactions()[2];
        assert_eq!(item_utility(&item("a"), t3, &profits).unwrap(), 21.0);
        assert_eq!(item_utility(&item("c"), t3, &profits).unwrap(), 11.0);
        let t6 = &db.transactions()[5];
        assert_eq!(item_utility(&item("e"), t6, &profits).unwrap(), 36.0);
    }

    #[test]
    fn item_utility_absent_item_errors() {
        let (db, profits) = testdata::example_db();
        let t1 = &db.transactions()[0];
        let err = item_utility(&item("e"), t1, &profits).unwrap_err();
        assert!(matches!(err, DataError::AbsentItem { tid: 1, .. }), "{err:?}");
    }

    #[test]
    fn itemset_utility_sums_members() {
        let (db, profits) = testdata::example_db();
        let t3 = &db.transactions()[2];
        let ab = Itemset::from_tokens(["a", "b"]).unwrap();
        assert_eq!(itemset_utility_in_tx(&ab, t3, &profits).unwrap(), 25.0);
        // a full row's itemset recovers tu exactly
        let t1 = &db.transactions()[0];
        let acd = Itemset::from_tokens(["a", "c", "d"]).unwrap();
        assert_eq!(itemset_utility_in_tx(&acd, t1, &profits).unwrap(), t1.tu());
        // singleton reduces to item_utility
        let a = Itemset::from_tokens(["a"]).unwrap();
        assert_eq!(
            itemset_utility_in_tx(&a, t3, &profits).unwrap(),
            item_utility(&item("a"), t3, &profits).unwrap()
        );
    }

    #[test]
    fn itemset_utility_partial_membership_errors() {
        let (db, profits) = testdata::example_db();
        let t1 = &db.transactions()[0]; // a, c, d
        let ae = Itemset::from_tokens(["a", "e"]).unwrap();
        assert!(itemset_utility_in_tx(&ae, t1, &profits).is_err());
    }

    #[test]
    fn tu_equals_sum_of_item_utilities() {
        let (db, profits) = testdata::example_db();
        for tx in db.transactions() {
            let direct: f64 = tx
                .items()
                .iter()
                .map(|(i, _)| item_utility(i, tx, &profits).unwrap())
                .sum();
            assert!((direct - tx.tu()).abs() <= 1e-9 * tx.tu());
        }
    }

    #[test]
    fn item_name_validation() {
        assert!(Item::new("a").is_ok());
        assert!(Item::new("item_9").is_ok());
        assert!(Item::new("").is_err());
        assert!(Item::new("a b").is_err());
        assert!(Item::new("a:b").is_err());
        assert!(Item::new("a\t").is_err());
    }

    #[test]
    fn itemset_is_sorted_and_rejects_duplicates() {
        let set = Itemset::from_tokens(["d", "a", "c"]).unwrap();
        assert_eq!(set.to_string(), "a c d");
        assert!(Itemset::from_tokens(["a", "a"]).is_err());
        assert!(Itemset::new(vec![]).is_err());
    }

    #[test]
    fn serialize_patterns_formats_and_sorts() {
        let patterns = vec![
            Pattern { itemset: Itemset::from_tokens(["c"]).unwrap(), sup: 8, uo: 0.646822 },
            Pattern {
                itemset: Itemset::from_tokens(["a", "c", "d"]).unwrap(),
                sup: 4,
                uo: 0.8971536,
            },
            Pattern { itemset: Itemset::from_tokens(["a", "b"]).unwrap(), sup: 3, uo: 0.43341668 },
        ];
        assert_eq!(
            serialize_patterns(&patterns),
            "a b\t3\t0.4334\na c d\t4\t0.8972\nc\t8\t0.6468\n"
        );
        assert_eq!(serialize_patterns::<f64>(&[]), "");
    }

    #[test]
    fn shorter_itemset_sorts_before_its_extensions() {
        let patterns = vec![
            Pattern { itemset: Itemset::from_tokens(["a", "b", "d"]).unwrap(), sup: 3, uo: 0.5 },
            Pattern { itemset: Itemset::from_tokens(["a", "b"]).unwrap(), sup: 3, uo: 0.5 },
        ];
        let out = serialize_patterns(&patterns);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("a b\t"));
        assert!(lines[1].starts_with("a b d\t"));
    }

    #[test]
    fn database_round_trips_exactly() {
        let (db, profits) = testdata::example_db();
        let profit_text = serialize_profit_table(&profits);
        let tx_text = serialize_transactions(&db);
        let profits2: ProfitTable<f64> = parse_profit_table(&profit_text).unwrap();
        let db2 = parse_transactions(&tx_text, &profits2).unwrap();
        assert_eq!(profits, profits2);
        assert_eq!(db, db2);
    }

    #[test]
    fn database_rejects_non_ascending_tids() {
        let profits: ProfitTable<f64> = parse_profit_table("a 1\n").unwrap();
        let t1 = QuantTransaction::new(2, vec![(item("a"), 1)], &profits).unwrap();
        let t2 = QuantTransaction::new(2, vec![(item("a"), 1)], &profits).unwrap();
        assert!(matches!(
            QuantDatabase::new(vec![t1, t2]),
            Err(DataError::NonAscendingTid(2))
        ));
    }
}
