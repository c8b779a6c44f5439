//! Support-bounded itemset enumeration with in-pass outcome accumulation.
//!
//! Per-item row bitsets drive a depth-first expansion: each child itemset's
//! bitset is the parent's intersected with one more item's, and the outcome
//! sum / sum-of-squares / count are tallied in the same traversal, so each
//! emitted itemset is scanned exactly once. Support is the sole pruning
//! criterion; divergence is non-monotone and is never used to prune.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::dataset::{display_items, DiscretizedDataset, ItemId, Itemset};
use crate::error::{Error, Result};
use crate::outcome::OutcomeVector;
use crate::scalar::Scalar;
use crate::stats::{welch_t, SampleStats};

/// Sample the subgroup's t-value is computed against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Baseline {
    /// The entire dataset, subgroup included; matches the divergence
    /// definition, which subtracts the global mean.
    #[default]
    Global,
    /// Everything outside the subgroup.
    Complement,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Global => "global",
            Baseline::Complement => "complement",
        }
    }
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Baseline> {
        match s.to_lowercase().as_str() {
            "global" => Ok(Baseline::Global),
            "complement" => Ok(Baseline::Complement),
            other => Err(Error::InvalidOutcomeSpec {
                spec: other.to_owned(),
                reason: "baseline must be global or complement".into(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MineOptions {
    /// Abort when the result would exceed this many records.
    pub max_records: usize,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
    pub baseline: Baseline,
    /// Text echoed into the result's metadata.
    pub outcome_desc: String,
}

impl Default for MineOptions {
    fn default() -> Self {
        MineOptions {
            max_records: 5_000_000,
            threads: None,
            baseline: Baseline::default(),
            outcome_desc: String::new(),
        }
    }
}

/// Smallest match count with support ≥ threshold; the epsilon keeps exact
/// integer products (e.g. 0.25 × 8) from rounding up.
pub fn min_count(threshold: f64, n_rows: usize) -> usize {
    ((threshold * n_rows as f64 - 1e-9).ceil() as usize).max(1)
}

/// One mined subgroup with its single-pass statistics. `mean`, `divergence`,
/// and `t` are `None` when no matching row has a defined outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ItemsetRecord<S> {
    pub itemset: Itemset,
    pub match_count: usize,
    pub support: f64,
    /// Accumulators over matching rows with non-⊥ outcomes.
    pub stats: SampleStats<S>,
    pub mean: Option<S>,
    pub divergence: Option<S>,
    pub t: Option<S>,
}

impl<S> ItemsetRecord<S> {
    pub fn outcome_count(&self) -> usize
    where
        S: Scalar,
    {
        self.stats.count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignFilter {
    Positive,
    Negative,
    Absolute,
}

impl std::str::FromStr for SignFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<SignFilter> {
        match s.to_lowercase().as_str() {
            "pos" | "positive" => Ok(SignFilter::Positive),
            "neg" | "negative" => Ok(SignFilter::Negative),
            "abs" | "absolute" => Ok(SignFilter::Absolute),
            other => Err(Error::InvalidOutcomeSpec {
                spec: other.to_owned(),
                reason: "sign must be pos, neg, or abs".into(),
            }),
        }
    }
}

/// All itemsets above the support threshold, in canonical (lexicographic
/// item-id) order, plus the empty-itemset record. Subset-closed by
/// anti-monotonicity, which is what makes exact Shapley attribution possible.
#[derive(Debug, Clone, PartialEq)]
pub struct MiningResult<S> {
    labels: Vec<String>,
    records: Vec<ItemsetRecord<S>>,
    global: ItemsetRecord<S>,
    threshold: f64,
    outcome_desc: String,
    baseline: Baseline,
    n_rows: usize,
}

impl<S: Scalar> MiningResult<S> {
    pub fn records(&self) -> &[ItemsetRecord<S>] {
        &self.records
    }

    pub fn n_records(&self) -> usize {
        self.records.len()
    }

    /// The empty-itemset record: support 1, divergence 0, t 0.
    pub fn global(&self) -> &ItemsetRecord<S> {
        &self.global
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn outcome_desc(&self) -> &str {
        &self.outcome_desc
    }

    pub fn baseline(&self) -> Baseline {
        self.baseline
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Item display labels, indexed by item id.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn display_itemset(&self, itemset: &Itemset) -> String {
        display_items(itemset, |id| self.labels[id.index()].as_str())
    }

    /// Itemset from display labels, spelled exactly as reports print them.
    /// Labels resolve against the mined dictionary, so this works without
    /// the original dataset.
    pub fn itemset_from_labels<T: AsRef<str>>(&self, labels: &[T]) -> Result<Itemset> {
        let mut ids = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref();
            let id = self
                .labels
                .iter()
                .position(|l| l == label)
                .map(|i| ItemId(i as u32))
                .ok_or_else(|| Error::InvalidItemset(format!("unknown item {label:?}")))?;
            ids.push(id);
        }
        ids.sort_unstable();
        ids.dedup();
        Ok(Itemset::from_sorted_unchecked(ids))
    }

    /// Record lookup by canonical itemset; the empty itemset resolves to the
    /// global record.
    pub fn get(&self, itemset: &Itemset) -> Option<&ItemsetRecord<S>> {
        if itemset.is_empty() {
            return Some(&self.global);
        }
        self.records
            .binary_search_by(|r| r.itemset.cmp(itemset))
            .ok()
            .map(|i| &self.records[i])
    }

    /// Top k records by divergence. Ties break by higher support, then
    /// canonical itemset order; the empty itemset and records with undefined
    /// divergence are excluded.
    pub fn top_k_records(&self, k: usize, sign: SignFilter) -> Vec<&ItemsetRecord<S>> {
        let mut candidates: Vec<&ItemsetRecord<S>> = self
            .records
            .iter()
            .filter(|r| r.divergence.is_some())
            .collect();
        // Stable sort: equal keys keep canonical order.
        candidates.sort_by(|a, b| {
            let (da, db) = (a.divergence.unwrap(), b.divergence.unwrap());
            let key = match sign {
                SignFilter::Positive => db.partial_cmp(&da),
                SignFilter::Negative => da.partial_cmp(&db),
                SignFilter::Absolute => db.abs().partial_cmp(&da.abs()),
            };
            key.unwrap()
                .then(b.match_count.cmp(&a.match_count))
        });
        candidates.truncate(k);
        candidates
    }
}

/// Fixed-size row bitset; trailing bits past n_rows stay zero.
#[derive(Clone)]
struct RowSet {
    words: Vec<u64>,
}

impl RowSet {
    fn zeros(n_rows: usize) -> RowSet {
        RowSet {
            words: vec![0; n_rows.div_ceil(64)],
        }
    }

    fn full(n_rows: usize) -> RowSet {
        let mut set = RowSet::zeros(n_rows);
        for (i, w) in set.words.iter_mut().enumerate() {
            let remaining = n_rows - i * 64;
            *w = if remaining >= 64 {
                u64::MAX
            } else {
                (1u64 << remaining) - 1
            };
        }
        set
    }

    fn insert(&mut self, row: usize) {
        self.words[row / 64] |= 1 << (row % 64);
    }

    /// self ∧ other, returning the intersection and its population count.
    fn intersect(&self, other: &RowSet) -> (usize, RowSet) {
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        let count = words.iter().map(|w| w.count_ones() as usize).sum();
        (count, RowSet { words })
    }

    /// Outcome accumulators over the set rows, in one scan.
    fn accumulate<S: Scalar>(&self, outcome: &[Option<S>]) -> SampleStats<S> {
        let mut stats = SampleStats::new();
        for (i, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let row = i * 64 + w.trailing_zeros() as usize;
                if let Some(v) = outcome[row] {
                    stats.push(v);
                }
                w &= w - 1;
            }
        }
        stats
    }
}

struct Ctx<'a, S> {
    item_sets: Vec<RowSet>,
    attr_of: Vec<u32>,
    /// Per attribute: first item id of the following attribute.
    next_offset: Vec<u32>,
    outcome: &'a [Option<S>],
    global: SampleStats<S>,
    global_mean: S,
    baseline: Baseline,
    n_rows: usize,
    min_count: usize,
    emitted: AtomicUsize,
    max_records: usize,
}

impl<S: Scalar> Ctx<'_, S> {
    fn record(&self, itemset: Itemset, match_count: usize, stats: SampleStats<S>) -> ItemsetRecord<S> {
        let mean = stats.mean();
        let divergence = mean.map(|m| m - self.global_mean);
        let t = match self.baseline {
            Baseline::Global => welch_t(&stats, &self.global),
            Baseline::Complement => welch_t(&stats, &self.global.minus(&stats)),
        };
        ItemsetRecord {
            itemset,
            match_count,
            support: match_count as f64 / self.n_rows as f64,
            stats,
            mean,
            divergence,
            t,
        }
    }

    fn n_items(&self) -> u32 {
        self.item_sets.len() as u32
    }

    /// Expand every extension of `prefix` (whose rows are `rows`) by items
    /// with id ≥ `first`, emitting records in DFS pre-order — which is
    /// exactly canonical lexicographic order.
    fn dfs(
        &self,
        prefix: &mut Vec<ItemId>,
        rows: &RowSet,
        first: u32,
        out: &mut Vec<ItemsetRecord<S>>,
    ) -> Result<()> {
        for c in first..self.n_items() {
            let (count, child_rows) = rows.intersect(&self.item_sets[c as usize]);
            if count < self.min_count {
                continue;
            }
            if self.emitted.fetch_add(1, Ordering::Relaxed) >= self.max_records {
                return Err(Error::RecordCap {
                    cap: self.max_records,
                });
            }
            let stats = child_rows.accumulate(self.outcome);
            prefix.push(ItemId(c));
            out.push(self.record(
                Itemset::from_sorted_unchecked(prefix.clone()),
                count,
                stats,
            ));
            let next = self.next_offset[self.attr_of[c as usize] as usize];
            self.dfs(prefix, &child_rows, next, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Enumerate all itemsets with support ≥ `threshold` over the dataset,
/// scoring each against the outcome vector.
pub fn mine<S: Scalar>(
    dataset: &DiscretizedDataset,
    outcome: &OutcomeVector<S>,
    threshold: f64,
    options: &MineOptions,
) -> Result<MiningResult<S>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    if outcome.len() != dataset.n_rows() {
        return Err(Error::OutcomeLength {
            expected: dataset.n_rows(),
            found: outcome.len(),
        });
    }
    if outcome.global().count == 0 {
        return Err(Error::EmptyOutcome);
    }

    let n_rows = dataset.n_rows();
    let mut item_sets: Vec<RowSet> = (0..dataset.n_items())
        .map(|_| RowSet::zeros(n_rows))
        .collect();
    for (r, row) in dataset.rows().iter().enumerate() {
        for id in row {
            item_sets[id.index()].insert(r);
        }
    }
    let attr_of: Vec<u32> = dataset.items().iter().map(|i| i.attribute).collect();
    let next_offset: Vec<u32> = (0..dataset.n_attributes() as u32)
        .map(|a| {
            attr_of
                .iter()
                .position(|&x| x > a)
                .unwrap_or(dataset.n_items()) as u32
        })
        .collect();

    let global = *outcome.global();
    let global_mean = global.mean().expect("count checked above");
    let ctx = Ctx {
        item_sets,
        attr_of,
        next_offset,
        outcome: outcome.values(),
        global,
        global_mean,
        baseline: options.baseline,
        n_rows,
        min_count: min_count(threshold, n_rows),
        emitted: AtomicUsize::new(0),
        max_records: options.max_records,
    };

    let run = || -> Result<Vec<Vec<ItemsetRecord<S>>>> {
        let full = RowSet::full(n_rows);
        (0..ctx.n_items())
            .into_par_iter()
            .map(|root| {
                let mut out = Vec::new();
                let mut prefix = Vec::new();
                // The root's candidate range is just [root, root]: expanding
                // from `full` with first=root would re-enumerate later roots.
                let (count, rows) = full.intersect(&ctx.item_sets[root as usize]);
                if count >= ctx.min_count {
                    if ctx.emitted.fetch_add(1, Ordering::Relaxed) >= ctx.max_records {
                        return Err(Error::RecordCap {
                            cap: ctx.max_records,
                        });
                    }
                    let stats = rows.accumulate(ctx.outcome);
                    prefix.push(ItemId(root));
                    out.push(ctx.record(
                        Itemset::from_sorted_unchecked(prefix.clone()),
                        count,
                        stats,
                    ));
                    let next = ctx.next_offset[ctx.attr_of[root as usize] as usize];
                    ctx.dfs(&mut prefix, &rows, next, &mut out)?;
                }
                Ok(out)
            })
            .collect()
    };
    let per_root = match options.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }?;

    let records: Vec<ItemsetRecord<S>> = per_root.into_iter().flatten().collect();
    debug_assert!(records.windows(2).all(|w| w[0].itemset < w[1].itemset));

    let mut global_record = ctx.record(Itemset::empty(), n_rows, global);
    // Fixed by definition, immune to any floating-point residue.
    global_record.divergence = Some(S::zero());
    global_record.t = Some(S::zero());

    Ok(MiningResult {
        labels: dataset.items().iter().map(|i| i.label.clone()).collect(),
        records,
        global: global_record,
        threshold,
        outcome_desc: options.outcome_desc.clone(),
        baseline: options.baseline,
        n_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Attribute;

    /// Two attributes: a ∈ {x,y} (items 0,1), b ∈ {u,v} (items 2,3).
    /// Rows: (x,u), (x,u), (x,v), (y,v).
    fn tiny() -> DiscretizedDataset {
        let attrs = vec![
            Attribute::categorical("a", vec!["x".into(), "y".into()]),
            Attribute::categorical("b", vec!["u".into(), "v".into()]),
        ];
        let rows = vec![
            vec![ItemId(0), ItemId(2)],
            vec![ItemId(0), ItemId(2)],
            vec![ItemId(0), ItemId(3)],
            vec![ItemId(1), ItemId(3)],
        ];
        DiscretizedDataset::from_parts(attrs, rows, vec![0, 1, 2, 3]).unwrap()
    }

    fn outcome(values: &[f64]) -> OutcomeVector<f64> {
        OutcomeVector::from_values(values.iter().map(|&v| Some(v)).collect())
    }

    #[test]
    fn enumerates_exactly_the_frequent_itemsets() {
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        // min_count = 2: {a=x}:3, {b=u}:2, {b=v}:2, {a=x,b=u}:2.
        let r = mine(&d, &o, 0.5, &MineOptions::default()).unwrap();
        let got: Vec<String> = r.records().iter().map(|x| r.display_itemset(&x.itemset)).collect();
        assert_eq!(got, ["{a=x}", "{a=x, b=u}", "{b=u}", "{b=v}"]);
        let sub = r.get(&d.itemset_from_labels(&["a=x", "b=u"]).unwrap()).unwrap();
        assert_eq!(sub.match_count, 2);
        assert_eq!(sub.support, 0.5);
        assert_eq!(sub.mean, Some(1.5));
        assert_eq!(sub.divergence, Some(1.5 - 2.5));
    }

    #[test]
    fn support_one_keeps_only_universal_itemsets() {
        let attrs = vec![
            Attribute::categorical("a", vec!["x".into()]),
            Attribute::categorical("b", vec!["u".into(), "v".into()]),
        ];
        let rows = vec![
            vec![ItemId(0), ItemId(1)],
            vec![ItemId(0), ItemId(2)],
        ];
        let d = DiscretizedDataset::from_parts(attrs, rows, vec![0, 1]).unwrap();
        let o = outcome(&[1.0, 3.0]);
        let r = mine(&d, &o, 1.0, &MineOptions::default()).unwrap();
        let got: Vec<String> = r.records().iter().map(|x| r.display_itemset(&x.itemset)).collect();
        assert_eq!(got, ["{a=x}"]);
        assert_eq!(r.global().divergence, Some(0.0));
        assert_eq!(r.global().t, Some(0.0));
        assert_eq!(r.global().match_count, 2);
    }

    #[test]
    fn empty_itemset_lookup_hits_the_global_record() {
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        let r = mine(&d, &o, 0.5, &MineOptions::default()).unwrap();
        let g = r.get(&Itemset::empty()).unwrap();
        assert_eq!(g.match_count, 4);
        assert_eq!(g.divergence, Some(0.0));
    }

    #[test]
    fn welch_baselines_differ_as_hand_computed() {
        // {a=x, b=u} holds outcomes {1,2}; the rest are {3,4}.
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        let set = d.itemset_from_labels(&["a=x", "b=u"]).unwrap();

        let global = mine(&d, &o, 0.5, &MineOptions::default()).unwrap();
        let t = global.get(&set).unwrap().t.unwrap();
        assert!((t - 1.5f64.sqrt()).abs() < 1e-12, "{t}");

        let opts = MineOptions {
            baseline: Baseline::Complement,
            ..MineOptions::default()
        };
        let complement = mine(&d, &o, 0.5, &opts).unwrap();
        let t = complement.get(&set).unwrap().t.unwrap();
        assert!((t - 2.0 / 0.5f64.sqrt()).abs() < 1e-12, "{t}");
    }

    #[test]
    fn top_k_orders_by_sign_support_then_canonical() {
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        let r = mine(&d, &o, 0.25, &MineOptions::default()).unwrap();
        let top = r.top_k_records(2, SignFilter::Positive);
        let labels: Vec<String> = top.iter().map(|x| r.display_itemset(&x.itemset)).collect();
        // {a=y}=+1.5 and {a=y,b=v}=+1.5 tie; higher support wins... both have
        // count 1, so canonical order decides: {a=y} precedes {a=y, b=v}.
        assert_eq!(labels, ["{a=y}", "{a=y, b=v}"]);

        let bottom = r.top_k_records(1, SignFilter::Negative);
        assert_eq!(r.display_itemset(&bottom[0].itemset), "{a=x, b=u}");

        let abs = r.top_k_records(1, SignFilter::Absolute);
        assert_eq!(abs[0].divergence, Some(1.5));
    }

    #[test]
    fn record_cap_aborts_with_the_cap() {
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        let opts = MineOptions {
            max_records: 2,
            ..MineOptions::default()
        };
        match mine(&d, &o, 0.25, &opts) {
            Err(Error::RecordCap { cap }) => assert_eq!(cap, 2),
            other => panic!("expected the cap error, got {other:?}"),
        }
    }

    #[test]
    fn thread_count_is_unobservable() {
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        let one = mine(
            &d,
            &o,
            0.25,
            &MineOptions {
                threads: Some(1),
                ..MineOptions::default()
            },
        )
        .unwrap();
        let eight = mine(
            &d,
            &o,
            0.25,
            &MineOptions {
                threads: Some(8),
                ..MineOptions::default()
            },
        )
        .unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn threshold_validation() {
        let d = tiny();
        let o = outcome(&[1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            mine(&d, &o, 0.0, &MineOptions::default()),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(matches!(
            mine(&d, &o, 1.5, &MineOptions::default()),
            Err(Error::InvalidThreshold(_))
        ));
    }

    #[test]
    fn all_bottom_subgroup_is_kept_without_statistics() {
        // Outcome defined only on the {a=y} row: {a=x...} subgroups match
        // rows but have no defined outcome.
        let d = tiny();
        let o = OutcomeVector::from_values(vec![None, None, None, Some(4.0)]);
        let r = mine(&d, &o, 0.5, &MineOptions::default()).unwrap();
        let sub = r.get(&d.itemset_from_labels(&["a=x"]).unwrap()).unwrap();
        assert_eq!(sub.match_count, 3);
        assert_eq!(sub.mean, None);
        assert_eq!(sub.divergence, None);
        assert_eq!(sub.t, None);
        // Undefined divergence never ranks.
        assert!(r
            .top_k_records(10, SignFilter::Absolute)
            .iter()
            .all(|x| x.divergence.is_some()));
    }

    #[test]
    fn min_count_boundaries() {
        assert_eq!(min_count(0.25, 8), 2);
        assert_eq!(min_count(0.26, 8), 3);
        assert_eq!(min_count(1.0, 7), 7);
        assert_eq!(min_count(1e-9, 1000), 1);
        assert_eq!(min_count(0.0175, 5700), 100);
    }
}
