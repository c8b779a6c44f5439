//! Seeded synthetic instances and brute-force reference implementations.
//!
//! The brute-force miner and the permutation attribution oracle deliberately
//! share no traversal or accumulation code with the production paths; they
//! exist so the fast implementations can be checked against first principles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Attribute, DiscretizedDataset, ItemId, Itemset};
use crate::error::Result;
use crate::miner::{min_count, MiningResult};
use crate::outcome::OutcomeVector;

/// One random mining instance: dataset, outcome, and a support threshold.
pub struct Synthetic {
    pub dataset: DiscretizedDataset,
    pub outcome: OutcomeVector<f64>,
    pub threshold: f64,
}

/// Deterministic instance from a seed: ≤ 6 attributes of 2–4 values, ≤ 200
/// rows, outcomes uniform on [−1, 1] with about 10% undefined.
pub fn random_instance(seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_attrs: usize = rng.gen_range(1..=6);
    let n_rows: usize = rng.gen_range(5..=200);
    let domains: Vec<usize> = (0..n_attrs).map(|_| rng.gen_range(2..=4)).collect();

    let attributes: Vec<Attribute> = domains
        .iter()
        .enumerate()
        .map(|(a, &k)| {
            Attribute::categorical(format!("a{a}"), (0..k).map(|v| format!("v{v}")).collect())
        })
        .collect();
    let offsets: Vec<u32> = domains
        .iter()
        .scan(0u32, |acc, &k| {
            let o = *acc;
            *acc += k as u32;
            Some(o)
        })
        .collect();
    let rows: Vec<Vec<ItemId>> = (0..n_rows)
        .map(|_| {
            (0..n_attrs)
                .map(|a| ItemId(offsets[a] + rng.gen_range(0..domains[a]) as u32))
                .collect()
        })
        .collect();
    let dataset = DiscretizedDataset::from_parts(attributes, rows, (0..n_rows).collect())
        .expect("generated rows are valid");

    let mut values: Vec<Option<f64>> = (0..n_rows)
        .map(|_| (!rng.gen_bool(0.1)).then(|| rng.gen_range(-1.0..1.0)))
        .collect();
    if values.iter().all(Option::is_none) {
        values[0] = Some(rng.gen_range(-1.0..1.0));
    }
    Synthetic {
        dataset,
        outcome: OutcomeVector::from_values(values),
        threshold: rng.gen_range(0.02..0.5),
    }
}

/// One subgroup found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteRecord {
    pub itemset: Itemset,
    pub match_count: usize,
    pub outcome_count: usize,
    pub mean: Option<f64>,
    pub divergence: Option<f64>,
}

/// Every itemset with support ≥ threshold, by trying all item combinations
/// over distinct attributes and scanning every row per combination. Output is
/// sorted canonically.
pub fn brute_force_mine(
    dataset: &DiscretizedDataset,
    outcome: &OutcomeVector<f64>,
    threshold: f64,
) -> Vec<BruteRecord> {
    let needed = min_count(threshold, dataset.n_rows());
    let global_mean = outcome.global_mean().expect("outcome defined somewhere");

    // All (attribute, item) choices, one optional per attribute.
    let mut picks: Vec<Vec<(usize, ItemId)>> = vec![Vec::new(); dataset.n_attributes()];
    for (i, item) in dataset.items().iter().enumerate() {
        picks[item.attribute as usize].push((item.attribute as usize, ItemId(i as u32)));
    }

    let mut out = Vec::new();
    let mut chosen: Vec<(usize, ItemId)> = Vec::new();
    enumerate(dataset, outcome, &picks, 0, &mut chosen, needed, global_mean, &mut out);
    out.sort_by(|a, b| a.itemset.cmp(&b.itemset));
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    dataset: &DiscretizedDataset,
    outcome: &OutcomeVector<f64>,
    picks: &[Vec<(usize, ItemId)>],
    attr: usize,
    chosen: &mut Vec<(usize, ItemId)>,
    needed: usize,
    global_mean: f64,
    out: &mut Vec<BruteRecord>,
) {
    if attr == picks.len() {
        if chosen.is_empty() {
            return;
        }
        let mut match_count = 0;
        let mut outcome_count = 0;
        let mut sum = 0.0;
        for (r, row) in dataset.rows().iter().enumerate() {
            // Independent matching: the row's item at each chosen attribute
            // must be the chosen item.
            if chosen.iter().all(|&(a, id)| row[a] == id) {
                match_count += 1;
                if let Some(v) = outcome.get(r) {
                    outcome_count += 1;
                    sum += v;
                }
            }
        }
        if match_count >= needed {
            let mean = (outcome_count > 0).then(|| sum / outcome_count as f64);
            out.push(BruteRecord {
                itemset: Itemset::from_sorted_unchecked(
                    chosen.iter().map(|&(_, id)| id).collect(),
                ),
                match_count,
                outcome_count,
                mean,
                divergence: mean.map(|m| m - global_mean),
            });
        }
        return;
    }
    enumerate(dataset, outcome, picks, attr + 1, chosen, needed, global_mean, out);
    for &pick in &picks[attr] {
        chosen.push(pick);
        enumerate(dataset, outcome, picks, attr + 1, chosen, needed, global_mean, out);
        chosen.pop();
    }
}

/// Shapley via the definition nobody optimizes: the average over all |I|!
/// orderings of each item's marginal divergence. Feasible for |I| ≤ 6.
pub fn permutation_shapley(
    itemset: &Itemset,
    result: &MiningResult<f64>,
) -> Result<Vec<(ItemId, f64)>> {
    let ids: Vec<ItemId> = itemset.items().to_vec();
    let m = ids.len();
    let delta = |subset: &[ItemId]| -> Result<f64> {
        let mut sorted = subset.to_vec();
        sorted.sort_unstable();
        let set = result
            .get(&Itemset::from_sorted_unchecked(sorted))
            .and_then(|r| r.divergence);
        set.ok_or_else(|| crate::error::Error::MissingSubset {
            itemset: result.display_itemset(itemset),
            missing: format!("{subset:?}"),
        })
    };

    let mut totals = vec![0.0f64; m];
    let mut order: Vec<usize> = (0..m).collect();
    let mut n_orders = 0usize;
    permute(&mut order, 0, &mut |perm| -> Result<()> {
        n_orders += 1;
        let mut prefix: Vec<ItemId> = Vec::with_capacity(m);
        let mut before = 0.0;
        for &pos in perm {
            prefix.push(ids[pos]);
            let after = delta(&prefix)?;
            totals[pos] += after - before;
            before = after;
        }
        Ok(())
    })?;

    Ok(ids
        .into_iter()
        .zip(totals)
        .map(|(id, t)| (id, t / n_orders as f64))
        .collect())
}

/// Call `f` with every permutation of `items[k..]` (Heap-style recursion).
fn permute<E>(
    items: &mut Vec<usize>,
    k: usize,
    f: &mut impl FnMut(&[usize]) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    if k == items.len() {
        return f(items);
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f)?;
        items.swap(k, i);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_seed_deterministic() {
        let a = random_instance(42);
        let b = random_instance(42);
        assert_eq!(a.dataset.rows(), b.dataset.rows());
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.threshold, b.threshold);
        assert!(a.dataset.n_rows() <= 200);
        assert!(a.dataset.n_attributes() <= 6);
    }

    #[test]
    fn permute_visits_every_ordering_once() {
        let mut order = vec![0, 1, 2];
        let mut seen = Vec::new();
        permute::<()>(&mut order, 0, &mut |p| {
            seen.push(p.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 6);
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 6);
    }
}
