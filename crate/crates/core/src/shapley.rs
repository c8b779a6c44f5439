//! Exact Shapley attribution of an itemset's divergence to its items.
//!
//! The game over an itemset I values each subset J at Δ(J), with Δ(∅) = 0, so
//! the contributions of the items sum to Δ(I). Every Δ(J) is already in the
//! mining result: subset closure makes the exact 2^|I| sum affordable.

use crate::dataset::{ItemId, Itemset};
use crate::error::{Error, Result};
use crate::miner::{MiningResult, SignFilter};
use crate::scalar::Scalar;

/// Exact enumeration caps at 2^25 subsets; itemsets never get close, since
/// their size is bounded by the attribute count.
const MAX_EXACT: usize = 25;

/// Per-item share of one itemset's divergence.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution<S> {
    pub itemset: Itemset,
    pub divergence: S,
    /// One entry per item, in canonical itemset order.
    pub contributions: Vec<(ItemId, S)>,
    /// |Σ contributions − divergence|; zero up to rounding by construction.
    pub residual_check: S,
}

/// Shapley weights w[j] = j!(m−1−j)!/m! for subset size j, built iteratively
/// to avoid factorial overflow.
fn weights<S: Scalar>(m: usize) -> Vec<S> {
    let mut w = Vec::with_capacity(m);
    let mut current = S::one() / S::from_count(m);
    for j in 0..m {
        w.push(current);
        if j + 1 < m {
            current = current * S::from_count(j + 1) / S::from_count(m - 1 - j);
        }
    }
    w
}

/// Contribution of every item of `itemset` to its divergence, per the exact
/// weighted sum of marginals over all subsets.
pub fn shapley<S: Scalar>(itemset: &Itemset, result: &MiningResult<S>) -> Result<Attribution<S>> {
    let ids = itemset.items();
    let m = ids.len();
    if m == 0 {
        return Ok(Attribution {
            itemset: itemset.clone(),
            divergence: S::zero(),
            contributions: Vec::new(),
            residual_check: S::zero(),
        });
    }
    if m > MAX_EXACT {
        return Err(Error::InvalidItemset(format!(
            "itemset of {m} items exceeds the exact-attribution limit of {MAX_EXACT}"
        )));
    }

    // Δ over the subset lattice, indexed by bitmask over `ids`.
    let mut delta = vec![S::zero(); 1 << m];
    for mask in 1usize..(1 << m) {
        let subset: Vec<ItemId> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &id)| id)
            .collect();
        let subset = Itemset::from_sorted_unchecked(subset);
        delta[mask] = result
            .get(&subset)
            .and_then(|r| r.divergence)
            .ok_or_else(|| Error::MissingSubset {
                itemset: result.display_itemset(itemset),
                missing: result.display_itemset(&subset),
            })?;
    }

    let w = weights::<S>(m);
    let mut contributions = vec![S::zero(); m];
    for mask in 1usize..(1 << m) {
        let size = mask.count_ones() as usize;
        for (i, c) in contributions.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *c = *c + w[size - 1] * (delta[mask] - delta[mask & !(1 << i)]);
            }
        }
    }

    let divergence = delta[(1 << m) - 1];
    let total = contributions
        .iter()
        .fold(S::zero(), |acc, &c| acc + c);
    Ok(Attribution {
        itemset: itemset.clone(),
        divergence,
        contributions: ids.iter().copied().zip(contributions).collect(),
        residual_check: (total - divergence).abs(),
    })
}

/// Attributions for the top-k records of a result; k past the end simply
/// attributes everything.
pub fn shapley_batch<S: Scalar>(
    result: &MiningResult<S>,
    k: usize,
    sign: SignFilter,
) -> Result<Vec<Attribution<S>>> {
    result
        .top_k_records(k, sign)
        .into_iter()
        .map(|r| shapley(&r.itemset, result))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, DiscretizedDataset};
    use crate::miner::{mine, MineOptions};
    use crate::outcome::OutcomeVector;

    /// A ∈ {a1,a0}, B ∈ {b1,b0}; one row per combination with outcomes
    /// chosen so Δ({A=a1}) = 0.2, Δ({B=b1}) = 0.1, Δ(both) = 0.4.
    fn pair_result() -> (DiscretizedDataset, MiningResult<f64>) {
        let attrs = vec![
            Attribute::categorical("A", vec!["a1".into(), "a0".into()]),
            Attribute::categorical("B", vec!["b1".into(), "b0".into()]),
        ];
        let rows = vec![
            vec![ItemId(0), ItemId(2)],
            vec![ItemId(0), ItemId(3)],
            vec![ItemId(1), ItemId(2)],
            vec![ItemId(1), ItemId(3)],
        ];
        let d = DiscretizedDataset::from_parts(attrs, rows, vec![0, 1, 2, 3]).unwrap();
        let o = OutcomeVector::from_values(vec![Some(0.4), Some(0.0), Some(-0.2), Some(-0.2)]);
        let r = mine(&d, &o, 0.2, &MineOptions::default()).unwrap();
        (d, r)
    }

    #[test]
    fn singleton_contribution_is_its_own_divergence() {
        let (d, r) = pair_result();
        let single = d.itemset_from_labels(&["A=a1"]).unwrap();
        let at = shapley(&single, &r).unwrap();
        assert_eq!(at.contributions.len(), 1);
        assert!((at.contributions[0].1 - 0.2).abs() < 1e-12);
        assert!((at.divergence - 0.2).abs() < 1e-12);
    }

    #[test]
    fn pair_splits_by_averaged_marginals() {
        // Both orderings averaged: a gets (0.2 + (0.4-0.1))/2 = 0.25,
        // b gets (0.1 + (0.4-0.2))/2 = 0.15.
        let (d, r) = pair_result();
        let both = d.itemset_from_labels(&["A=a1", "B=b1"]).unwrap();
        let at = shapley(&both, &r).unwrap();
        assert!((at.contributions[0].1 - 0.25).abs() < 1e-12);
        assert!((at.contributions[1].1 - 0.15).abs() < 1e-12);
        assert!(at.residual_check < 1e-12);
    }

    #[test]
    fn efficiency_holds_for_every_mined_itemset() {
        let (_, r) = pair_result();
        for record in r.records() {
            let at = shapley(&record.itemset, &r).unwrap();
            let total: f64 = at.contributions.iter().map(|(_, c)| c).sum();
            assert!((total - record.divergence.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn duplicated_attribute_gets_symmetric_contributions() {
        // B mirrors A row by row, so the two items are interchangeable.
        let attrs = vec![
            Attribute::categorical("A", vec!["x".into(), "y".into()]),
            Attribute::categorical("B", vec!["x".into(), "y".into()]),
        ];
        let rows = vec![
            vec![ItemId(0), ItemId(2)],
            vec![ItemId(0), ItemId(2)],
            vec![ItemId(1), ItemId(3)],
        ];
        let d = DiscretizedDataset::from_parts(attrs, rows, vec![0, 1, 2]).unwrap();
        let o = OutcomeVector::<f64>::from_values(vec![Some(1.0), Some(2.0), Some(6.0)]);
        let r = mine(&d, &o, 0.1, &MineOptions::default()).unwrap();
        let both = d.itemset_from_labels(&["A=x", "B=x"]).unwrap();
        let at = shapley(&both, &r).unwrap();
        assert!((at.contributions[0].1 - at.contributions[1].1).abs() < 1e-12);
    }

    #[test]
    fn unmined_subset_is_a_clean_error() {
        let (d, r) = pair_result();
        // Mine again with a threshold that excludes the pair itself.
        let o = OutcomeVector::from_values(vec![Some(0.4), Some(0.0), Some(-0.2), Some(-0.2)]);
        let tight = mine(&d, &o, 0.3, &MineOptions::default()).unwrap();
        let both = d.itemset_from_labels(&["A=a1", "B=b1"]).unwrap();
        assert!(shapley(&both, &r).is_ok());
        match shapley(&both, &tight) {
            Err(Error::MissingSubset { missing, .. }) => {
                assert_eq!(missing, "{A=a1, B=b1}");
            }
            other => panic!("expected a missing-subset error, got {other:?}"),
        }
    }

    #[test]
    fn empty_itemset_attribution_is_empty() {
        let (_, r) = pair_result();
        let at = shapley(&Itemset::empty(), &r).unwrap();
        assert!(at.contributions.is_empty());
        assert_eq!(at.divergence, 0.0);
    }

    #[test]
    fn batch_clamps_to_the_result_size() {
        let (_, r) = pair_result();
        let all = shapley_batch(&r, 100, SignFilter::Absolute).unwrap();
        assert_eq!(all.len(), r.n_records());
        let none = shapley_batch(&r, 0, SignFilter::Absolute).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn weights_match_the_factorial_formula() {
        let w = weights::<f64>(4);
        let fact = |n: usize| (1..=n).product::<usize>() as f64;
        for (j, &wj) in w.iter().enumerate() {
            let expect = fact(j) * fact(4 - 1 - j) / fact(4);
            assert!((wj - expect).abs() < 1e-15, "j={j}");
        }
    }
}
