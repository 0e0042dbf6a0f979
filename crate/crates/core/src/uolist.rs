//! Per-pattern occupancy lists and the sibling join that extends them.
//!
//! A pattern's UO-list holds one `(tid, uo, ruo)` entry per supporting
//! transaction; its FU-table keeps the support and the occupancy sums so
//! averages never require walking the list. Joining the lists of two
//! siblings yields the child's list without touching the database — the
//! whole search runs on these structures after the second scan.

use crate::scalar::{count, Scalar};

/// Join- and summary-contract violations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JoinError {
    /// The two lists do not name siblings (same length, equal prefix,
    /// strictly ascending last ranks).
    #[error("join requires same-prefix siblings with ascending last ranks; got {xa:?} and {xb:?}")]
    MismatchedSiblings { xa: Vec<u32>, xb: Vec<u32> },
    /// Extensions of length ≥ 3 need the common prefix's UO-list for the
    /// overlap correction.
    #[error("joining {0}-item patterns requires the common-prefix UO-list")]
    MissingPrefix(usize),
    /// 1-item siblings have an empty prefix; passing a list is a caller bug.
    #[error("1-item siblings take no prefix UO-list")]
    UnexpectedPrefix,
    /// The supplied prefix list does not belong to the siblings' prefix.
    #[error("prefix UO-list {prefix:?} does not match the siblings' common prefix")]
    PrefixMismatch { prefix: Vec<u32> },
    /// The prefix list is missing a transaction both siblings share —
    /// only possible when the inputs were not built by this module.
    #[error("prefix UO-list lacks tid {tid} shared by both siblings")]
    PrefixEntryMissing { tid: u32 },
    /// Averages over an empty support are undefined.
    #[error("support is zero: occupancy averages are undefined")]
    EmptySupport,
}

/// One supporting transaction's view of a pattern: the pattern's share of
/// the row utility and the share still available after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UOEntry<S> {
    pub tid: u32,
    pub uo: S,
    pub ruo: S,
}

/// A pattern's occupancy list. `items` holds the pattern as ranks in the
/// active processing order, ascending; entries are tid-ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct UOList<S> {
    pub items: Vec<u32>,
    pub entries: Vec<UOEntry<S>>,
}

impl<S: Scalar> UOList<S> {
    pub fn support(&self) -> usize {
        self.entries.len()
    }
}

/// A pattern's summary row: support plus occupancy sums. Averages are
/// taken on demand so repeated threshold checks stay O(1).
#[derive(Debug, Clone, PartialEq)]
pub struct FUTable<S> {
    pub items: Vec<u32>,
    pub sup: usize,
    pub sum_uo: S,
    pub sum_ruo: S,
}

impl<S: Scalar> FUTable<S> {
    /// Mean utility occupancy over the supporting transactions.
    pub fn utility_occupancy(&self) -> Result<S, JoinError> {
        if self.sup == 0 {
            return Err(JoinError::EmptySupport);
        }
        Ok(self.sum_uo / count(self.sup))
    }

    /// Mean remaining occupancy over the supporting transactions.
    pub fn remaining_uo(&self) -> Result<S, JoinError> {
        if self.sup == 0 {
            return Err(JoinError::EmptySupport);
        }
        Ok(self.sum_ruo / count(self.sup))
    }
}

/// A UO-list paired with its FU-table — one node of the search tree.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternNode<S> {
    pub list: UOList<S>,
    pub table: FUTable<S>,
}

impl<S: Scalar> PatternNode<S> {
    /// An empty node for the given pattern; fill it with [`Self::push`].
    pub fn new(items: Vec<u32>) -> Self {
        PatternNode {
            list: UOList { items: items.clone(), entries: Vec::new() },
            table: FUTable { items, sup: 0, sum_uo: S::zero(), sum_ruo: S::zero() },
        }
    }

    /// Appends an entry (tids must arrive ascending) and keeps the
    /// summary in step.
    pub fn push(&mut self, entry: UOEntry<S>) {
        debug_assert!(
            self.list.entries.last().map_or(true, |prev| prev.tid < entry.tid),
            "entries must arrive tid-ascending"
        );
        self.table.sup += 1;
        self.table.sum_uo = self.table.sum_uo + entry.uo;
        self.table.sum_ruo = self.table.sum_ruo + entry.ruo;
        self.list.entries.push(entry);
    }

    pub fn items(&self) -> &[u32] {
        &self.list.items
    }

    pub fn support(&self) -> usize {
        self.table.sup
    }
}

/// Joins the lists of two same-prefix siblings `Xa ≺ Xb` into their child
/// `Xab`, intersecting on tid.
///
/// Per shared transaction the child's occupancy is `uo(Xa) + uo(Xb)`,
/// minus the prefix's own occupancy when the siblings are 2 items or
/// longer (their lists both count it, so it is double-counted once); the
/// remaining occupancy is inherited from `Xb`, whose last item is the
/// child's last item. `prefix` is therefore required exactly when the
/// siblings have 2 or more items.
///
/// With `support_floor` set, the join keeps a countdown starting at
/// `sup(Xa)` on a working copy — the stored tables are never touched —
/// decrementing per `Xa` entry without a partner. The moment the countdown
/// proves the child cannot reach the floor, the join aborts and returns
/// `None`. A completed join therefore always has `sup >= floor` whenever
/// `floor <= sup(Xa)`.
pub fn construct<S: Scalar>(
    prefix: Option<&UOList<S>>,
    xa: &UOList<S>,
    xb: &UOList<S>,
    support_floor: Option<usize>,
) -> Result<Option<PatternNode<S>>, JoinError> {
    let k = xa.items.len();
    let siblings_ok = k >= 1
        && xb.items.len() == k
        && xa.items[..k - 1] == xb.items[..k - 1]
        && xa.items[k - 1] < xb.items[k - 1];
    if !siblings_ok {
        return Err(JoinError::MismatchedSiblings { xa: xa.items.clone(), xb: xb.items.clone() });
    }
    match prefix {
        None if k >= 2 => return Err(JoinError::MissingPrefix(k + 1)),
        Some(_) if k < 2 => return Err(JoinError::UnexpectedPrefix),
        Some(p) if p.items != xa.items[..k - 1] => {
            return Err(JoinError::PrefixMismatch { prefix: p.items.clone() })
        }
        _ => {}
    }

    let mut child_items = xa.items.clone();
    child_items.push(xb.items[k - 1]);
    let mut child = PatternNode::new(child_items);

    let mut countdown = xa.entries.len(); // working copy of sup(Xa)
    let mut ib = 0;
    let mut ip = 0;
    for ea in &xa.entries {
        while ib < xb.entries.len() && xb.entries[ib].tid < ea.tid {
            ib += 1;
        }
        let partner = match xb.entries.get(ib) {
            Some(eb) if eb.tid == ea.tid => eb,
            _ => {
                countdown -= 1;
                if let Some(floor) = support_floor {
                    if countdown < floor {
                        return Ok(None); // child provably below the floor
                    }
                }
                continue;
            }
        };
        let mut uo = ea.uo + partner.uo;
        if let Some(p) = prefix {
            while ip < p.entries.len() && p.entries[ip].tid < ea.tid {
                ip += 1;
            }
            match p.entries.get(ip) {
                Some(ep) if ep.tid == ea.tid => uo = uo - ep.uo,
                _ => return Err(JoinError::PrefixEntryMissing { tid: ea.tid }),
            }
        }
        child.push(UOEntry { tid: ea.tid, uo, ruo: partner.ruo });
    }
    Ok(Some(child))
}
