//! The mined universe: attributes with finite domains, integer-encoded items,
//! and rows as sorted item-id vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index into the item dictionary. Ids are contiguous and grouped by
/// attribute, so ordering by id equals ordering by (attribute, value).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One attribute=value selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub attribute: u32,
    pub value: u32,
    /// Display form: "sex=Male", "age<25", "LSAT≤33.0".
    pub label: String,
}

/// An attribute with its finite domain. `values` hold the raw domain labels
/// ("Male", "(33.0-41.0]"); item display labels are derived once, at
/// dictionary construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub values: Vec<String>,
    /// Interval strategies bake the column name into their bin labels, in
    /// which case the raw label is already the display label.
    pub self_labeled: bool,
}

impl Attribute {
    pub fn categorical(name: impl Into<String>, values: Vec<String>) -> Attribute {
        Attribute {
            name: name.into(),
            values,
            self_labeled: false,
        }
    }
}

/// Display label for one attribute=value pair. The '=' is dropped when the
/// value leads with a comparator so categories like "<25" render as "age<25"
/// while "[1,3]" stays "#prior=[1,3]".
pub fn item_label(attribute: &str, value: &str) -> String {
    match value.chars().next() {
        Some('<') | Some('>') | Some('≤') | Some('≥') => format!("{attribute}{value}"),
        _ => format!("{attribute}={value}"),
    }
}

/// A conjunction of items over distinct attributes, kept sorted by item id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Itemset {
    items: Vec<ItemId>,
}

impl Itemset {
    pub fn empty() -> Itemset {
        Itemset::default()
    }

    /// Caller guarantees the ids are sorted, unique, and one-per-attribute.
    pub(crate) fn from_sorted_unchecked(items: Vec<ItemId>) -> Itemset {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
        Itemset { items }
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.items.binary_search(&item).is_ok()
    }

    /// True iff every item of `self` is in `other`.
    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.items.iter().all(|i| other.contains(*i))
    }

    /// The subset with `item` removed; `self` is unchanged.
    pub fn without(&self, item: ItemId) -> Itemset {
        Itemset {
            items: self.items.iter().copied().filter(|&i| i != item).collect(),
        }
    }
}

/// Immutable discretized dataset. Construction validates the row encoding;
/// afterwards the value is freely shareable across threads.
#[derive(Debug, Clone)]
pub struct DiscretizedDataset {
    attributes: Vec<Attribute>,
    items: Vec<Item>,
    /// First item id of each attribute; `item id = offset[attr] + value`.
    offsets: Vec<u32>,
    rows: Vec<Vec<ItemId>>,
    /// Index of each kept row in the table it was built from.
    source_rows: Vec<usize>,
}

impl DiscretizedDataset {
    /// Builds the dictionary and checks that every row holds exactly one item
    /// per attribute, in attribute order.
    pub fn from_parts(
        attributes: Vec<Attribute>,
        rows: Vec<Vec<ItemId>>,
        source_rows: Vec<usize>,
    ) -> Result<DiscretizedDataset> {
        let mut items = Vec::new();
        let mut offsets = Vec::with_capacity(attributes.len());
        for (a, attr) in attributes.iter().enumerate() {
            offsets.push(items.len() as u32);
            if attr.values.is_empty() {
                return Err(Error::InvalidItemset(format!(
                    "attribute {:?} has an empty domain",
                    attr.name
                )));
            }
            for (v, value) in attr.values.iter().enumerate() {
                let label = if attr.self_labeled {
                    value.clone()
                } else {
                    item_label(&attr.name, value)
                };
                items.push(Item {
                    attribute: a as u32,
                    value: v as u32,
                    label,
                });
            }
        }
        if source_rows.len() != rows.len() {
            return Err(Error::InvalidItemset(format!(
                "{} rows but {} source indices",
                rows.len(),
                source_rows.len()
            )));
        }
        let dataset = DiscretizedDataset {
            attributes,
            items,
            offsets,
            rows,
            source_rows,
        };
        for (r, row) in dataset.rows.iter().enumerate() {
            if row.len() != dataset.attributes.len() {
                return Err(Error::InvalidItemset(format!(
                    "row {r} holds {} items, expected one per attribute ({})",
                    row.len(),
                    dataset.attributes.len()
                )));
            }
            for (a, &id) in row.iter().enumerate() {
                let item = dataset
                    .items
                    .get(id.index())
                    .ok_or_else(|| Error::InvalidItemset(format!("row {r}: unknown item {id:?}")))?;
                if item.attribute != a as u32 {
                    return Err(Error::InvalidItemset(format!(
                        "row {r}: item {id:?} out of attribute order"
                    )));
                }
            }
        }
        Ok(dataset)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.index()]
    }

    pub fn item_id(&self, attribute: u32, value: u32) -> ItemId {
        ItemId(self.offsets[attribute as usize] + value)
    }

    pub fn rows(&self) -> &[Vec<ItemId>] {
        &self.rows
    }

    pub fn source_rows(&self) -> &[usize] {
        &self.source_rows
    }

    /// Item whose display label is `label`, if any.
    pub fn item_by_label(&self, label: &str) -> Option<ItemId> {
        self.items
            .iter()
            .position(|i| i.label == label)
            .map(|i| ItemId(i as u32))
    }

    /// Validated itemset from arbitrary ids: sorts, rejects duplicates,
    /// unknown ids, and two items on one attribute.
    pub fn itemset(&self, ids: &[ItemId]) -> Result<Itemset> {
        let mut items = ids.to_vec();
        items.sort_unstable();
        items.dedup();
        if items.len() != ids.len() {
            return Err(Error::InvalidItemset("duplicate item".into()));
        }
        let mut seen_attr: Option<u32> = None;
        for &id in &items {
            let item = self
                .items
                .get(id.index())
                .ok_or_else(|| Error::InvalidItemset(format!("unknown item {id:?}")))?;
            if seen_attr == Some(item.attribute) {
                return Err(Error::InvalidItemset(format!(
                    "two items on attribute {:?}",
                    self.attributes[item.attribute as usize].name
                )));
            }
            seen_attr = Some(item.attribute);
        }
        Ok(Itemset::from_sorted_unchecked(items))
    }

    /// Itemset from display labels, e.g. ["age<25", "sex=Male"].
    pub fn itemset_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Itemset> {
        let ids = labels
            .iter()
            .map(|l| {
                self.item_by_label(l.as_ref().trim())
                    .ok_or_else(|| Error::InvalidItemset(format!("unknown item {:?}", l.as_ref())))
            })
            .collect::<Result<Vec<_>>>()?;
        self.itemset(&ids)
    }

    /// True iff every item of the itemset appears in the row. Rows are sorted
    /// by construction, so each membership test is a binary search.
    pub fn row_matches(&self, row: usize, itemset: &Itemset) -> bool {
        let row = &self.rows[row];
        itemset.items().iter().all(|i| row.binary_search(i).is_ok())
    }

    pub fn display_itemset(&self, itemset: &Itemset) -> String {
        display_items(itemset, |id| self.items[id.index()].label.as_str())
    }
}

/// "{a, b, c}" with labels supplied by the caller.
pub fn display_items<'a>(itemset: &Itemset, label: impl Fn(ItemId) -> &'a str) -> String {
    let mut out = String::from("{");
    for (i, &id) in itemset.items().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(label(id));
    }
    out.push('}');
    out
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
