//! High utility occupancy pattern mining over quantitative transaction
//! databases.
//!
//! A pattern qualifies when it is *frequent* — support at least ⌈α·|D|⌉ —
//! and *dominant* — on average it contributes at least a β share of its
//! supporting transactions' total utility. The miner scans the database
//! exactly twice, then searches an implicit set-enumeration tree
//! depth-first, carrying a compact occupancy list per node so candidate
//! evaluation never touches the database again.
//!
//! Pipeline: [`preprocess::scan_stats`] → [`preprocess::frequent_items`] →
//! [`preprocess::build_order`] → [`preprocess::build_initial_uolists`] →
//! [`search::mine`]. The exhaustive [`oracle`] re-derives everything from
//! definitions for differential testing, and [`gen`] produces seeded
//! synthetic inputs.
//!
//! Numeric types are generic over [`scalar::Scalar`] (any IEEE float); the
//! aliases below fix `f64`, which every documented tolerance assumes.

pub mod datamodel;
pub mod gen;
pub mod oracle;
pub mod preprocess;
pub mod scalar;
pub mod search;
pub mod uolist;

pub use datamodel::{DataError, Item, Itemset};
pub use preprocess::{ConfigError, ItemOrder, OrderPolicy};
pub use scalar::Scalar;
pub use search::{mine, AuditCounters, SearchConfig, SearchError, SearchStats, StrategySet};
pub use uolist::JoinError;

/// `f64` concretions of the generic types — the defaults throughout.
pub type ProfitTable = datamodel::ProfitTable<f64>;
pub type QuantTransaction = datamodel::QuantTransaction<f64>;
pub type QuantDatabase = datamodel::QuantDatabase<f64>;
pub type Pattern = datamodel::Pattern<f64>;
pub type ItemStats = preprocess::ItemStats<f64>;
pub type MiningParams = preprocess::MiningParams<f64>;
pub type UOEntry = uolist::UOEntry<f64>;
pub type UOList = uolist::UOList<f64>;
pub type FUTable = uolist::FUTable<f64>;
pub type PatternNode = uolist::PatternNode<f64>;
pub type GenParams = gen::GenParams<f64>;
pub type OracleResult = oracle::OracleResult<f64>;
