//! Synthetic quantitative databases for fuzzing and benchmarks.
//!
//! Reproducibility across platforms and toolchain versions is the whole
//! point, so the module carries its own generator — SplitMix64 (Steele,
//! Lea & Flood's fixed-increment design, the same mixer `java.util
//! .SplittableRandom` uses) — instead of a crate whose stream might
//! change between releases. A seed pins every byte of the output.

use crate::datamodel::{Item, ProfitTable, QuantDatabase, QuantTransaction};
use crate::preprocess::ConfigError;
use crate::scalar::{count, Scalar};

/// Knobs for one synthetic database.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams<S> {
    pub n_transactions: usize,
    /// Universe size; items are named `i1 .. iN`.
    pub n_items: usize,
    /// Mean row length. Actual lengths are Poisson, clamped to
    /// `[1, n_items]`.
    pub avg_len: f64,
    /// Quantities are uniform over `1..=max_quantity`.
    pub max_quantity: u32,
    /// Each item's unit profit is drawn once, uniformly from this interval.
    pub profit_range: (S, S),
    pub seed: u64,
}

impl<S: Scalar> Default for GenParams<S> {
    fn default() -> Self {
        GenParams {
            n_transactions: 100,
            n_items: 10,
            avg_len: 4.0,
            max_quantity: 5,
            profit_range: (S::one(), count(10)),
            seed: 1,
        }
    }
}

impl<S: Scalar> GenParams<S> {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.n_transactions == 0 {
            return Err(ConfigError::ZeroParam { name: "n_transactions" });
        }
        if self.n_items == 0 {
            return Err(ConfigError::ZeroParam { name: "n_items" });
        }
        if self.max_quantity == 0 {
            return Err(ConfigError::ZeroParam { name: "max_quantity" });
        }
        if !(self.avg_len >= 1.0 && self.avg_len <= self.n_items as f64) {
            return Err(ConfigError::AvgLenOutOfRange {
                avg_len: self.avg_len,
                n_items: self.n_items,
            });
        }
        let (low, high) = self.profit_range;
        if !(low > S::zero() && high >= low && high.is_finite()) {
            return Err(ConfigError::BadProfitRange {
                low: low.to_string(),
                high: high.to_string(),
            });
        }
        Ok(())
    }
}

/// SplitMix64: `state += 0x9E3779B97F4A7C15` per step, output through a
/// two-round xor-shift-multiply finalizer. Full 2^64 period, passes
/// BigCrush, and trivial to reimplement elsewhere when a stream needs to
/// be checked against this one.
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform over the open interval (0, 1): the top 53 bits, centered
    /// on the half-steps so neither endpoint can occur.
    fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform over `0..n`. Plain modulo: the bias is under 2^-40 for the
    /// ranges used here and the stream stays one-draw-per-value, which
    /// keeps outputs easy to predict by hand.
    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Poisson count via unit-rate arrivals: how many exponential
    /// inter-arrival times fit into a window of length `lambda`. Summing
    /// `-ln(u)` terms instead of multiplying uniforms keeps large means
    /// from underflowing.
    fn poisson(&mut self, lambda: f64) -> u64 {
        let mut t = 0.0;
        let mut k = 0u64;
        loop {
            t -= self.next_f64().ln();
            if t > lambda {
                return k;
            }
            k += 1;
        }
    }
}

/// Builds a database and matching profit table from the given knobs.
/// Identical params — seed included — give identical output on every
/// platform.
pub fn generate<S: Scalar>(
    params: &GenParams<S>,
) -> Result<(QuantDatabase<S>, ProfitTable<S>), ConfigError> {
    params.validate()?;
    let mut rng = SplitMix64::new(params.seed);

    let items: Vec<Item> = (1..=params.n_items)
        .map(|i| Item::new(format!("i{i}")).expect("generated names are valid"))
        .collect();

    let (low, high) = params.profit_range;
    let mut profits = ProfitTable::new();
    for item in &items {
        let unit = S::from_f64(rng.next_f64()).expect("unit interval fits any float");
        let profit = low + (high - low) * unit;
        profits.insert(item.clone(), profit).expect("each item is inserted once");
    }

    let mut indices: Vec<usize> = (0..params.n_items).collect();
    let mut transactions = Vec::with_capacity(params.n_transactions);
    for tid in 1..=params.n_transactions {
        let len = rng.poisson(params.avg_len).clamp(1, params.n_items as u64) as usize;
        // partial Fisher–Yates: after `len` swaps the head is a uniform
        // draw of `len` distinct items
        for j in 0..len {
            let k = j + rng.below((params.n_items - j) as u64) as usize;
            indices.swap(j, k);
        }
        let mut chosen = indices[..len].to_vec();
        chosen.sort_unstable();
        let row: Vec<(Item, u32)> = chosen
            .into_iter()
            .map(|i| (items[i].clone(), 1 + rng.below(params.max_quantity as u64) as u32))
            .collect();
        let tx = QuantTransaction::new(tid as u32, row, &profits)
            .expect("generated rows are valid by construction");
        transactions.push(tx);
    }
    let db = QuantDatabase::new(transactions).expect("tids ascend by construction");
    Ok((db, profits))
}
