//! Turns raw columns into finite domains: categorical identity, quantile
//! bins, explicit right-closed interval edges, or an explicit value mapping.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::{item_label, Attribute, DiscretizedDataset, ItemId};
use crate::error::{Error, Result};
use crate::table::{fmt_number, Cell, RawTable};

/// Per-column discretization strategy.
///
/// JSON forms: `"categorical"`, `{"quantile": 3}`, `{"edges": [33.0, 41.0]}`,
/// `{"mapping": {"1": "yes", "0": "no"}}`. Mapping keys match the cell's
/// display form (integral numbers without the trailing ".0").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Categorical,
    Quantile(usize),
    Edges(Vec<f64>),
    Mapping(BTreeMap<String, String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Drop rows with a missing value in any discretized column.
    #[default]
    DropRow,
    /// Missing values become their own category per column.
    OwnCategory,
}

/// Which columns to mine and how to bin them. Attribute order follows the
/// table's column order, not the order of keys in this map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "SpecDoc")]
pub struct DiscretizationSpec {
    pub columns: BTreeMap<String, Strategy>,
    #[serde(default)]
    pub missing: MissingPolicy,
}

/// Accepts the full document or a bare column→strategy map.
#[derive(Deserialize)]
#[serde(untagged)]
enum SpecDoc {
    Full {
        columns: BTreeMap<String, Strategy>,
        #[serde(default)]
        missing: MissingPolicy,
    },
    Bare(BTreeMap<String, Strategy>),
}

impl From<SpecDoc> for DiscretizationSpec {
    fn from(doc: SpecDoc) -> Self {
        match doc {
            SpecDoc::Full { columns, missing } => DiscretizationSpec { columns, missing },
            SpecDoc::Bare(columns) => DiscretizationSpec {
                columns,
                missing: MissingPolicy::default(),
            },
        }
    }
}

impl DiscretizationSpec {
    pub fn new(columns: BTreeMap<String, Strategy>, missing: MissingPolicy) -> Self {
        DiscretizationSpec { columns, missing }
    }

    fn validate(&self) -> Result<()> {
        for (name, strategy) in &self.columns {
            match strategy {
                Strategy::Quantile(n) if *n < 2 => {
                    return Err(Error::InvalidSpec(format!(
                        "column {name:?}: quantile needs at least 2 bins, got {n}"
                    )));
                }
                Strategy::Edges(edges) => {
                    if edges.is_empty() {
                        return Err(Error::InvalidSpec(format!(
                            "column {name:?}: edges must not be empty"
                        )));
                    }
                    if edges.iter().any(|e| !e.is_finite()) {
                        return Err(Error::InvalidSpec(format!(
                            "column {name:?}: edges must be finite"
                        )));
                    }
                    if edges.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::InvalidSpec(format!(
                            "column {name:?}: edges must be strictly increasing"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Default spec for a table: quantile(3) for numeric columns, categorical
/// otherwise. `exclude` lists columns to leave out of the mined set (resolved
/// names); all-missing columns are skipped with a warning.
pub fn default_spec(table: &RawTable, exclude: &[String]) -> DiscretizationSpec {
    let mut columns = BTreeMap::new();
    for (i, name) in table.column_names.iter().enumerate() {
        if exclude.iter().any(|e| e == name) {
            continue;
        }
        let non_missing = table.rows().iter().any(|r| !r[i].is_missing());
        if !non_missing {
            log::warn!("column {name:?} is entirely missing; left out of the default spec");
            continue;
        }
        let strategy = if table.column_is_numeric(i) {
            Strategy::Quantile(3)
        } else {
            Strategy::Categorical
        };
        columns.insert(name.clone(), strategy);
    }
    DiscretizationSpec::new(columns, MissingPolicy::DropRow)
}

/// Domain and per-row value assignment for one column.
struct BuiltColumn {
    values: Vec<String>,
    self_labeled: bool,
    assignment: Vec<u32>,
}

const MISSING_LABEL: &str = "missing";

pub fn discretize(table: &RawTable, spec: &DiscretizationSpec) -> Result<DiscretizedDataset> {
    spec.validate()?;

    // Resolve spec keys against the table, then take table column order.
    let mut by_index: BTreeMap<usize, (&str, &Strategy)> = BTreeMap::new();
    for (name, strategy) in &spec.columns {
        let idx = table.column_index(name)?;
        if by_index.insert(idx, (name.as_str(), strategy)).is_some() {
            return Err(Error::InvalidSpec(format!(
                "two spec entries resolve to column {:?}",
                table.column_names[idx]
            )));
        }
    }
    if by_index.is_empty() {
        return Err(Error::InvalidSpec("no columns to mine".into()));
    }

    // Rows kept under the missing policy; quantiles and domains are computed
    // over these rows only.
    let kept: Vec<usize> = match spec.missing {
        MissingPolicy::OwnCategory => (0..table.n_rows()).collect(),
        MissingPolicy::DropRow => (0..table.n_rows())
            .filter(|&r| by_index.keys().all(|&c| !table.cell(r, c).is_missing()))
            .collect(),
    };
    if kept.is_empty() {
        return Err(Error::InvalidSpec(
            "no rows remain after applying the missing-value policy".into(),
        ));
    }

    let mut attributes = Vec::with_capacity(by_index.len());
    let mut assignments = Vec::with_capacity(by_index.len());
    for (&col, &(name, strategy)) in &by_index {
        let built = match strategy {
            Strategy::Categorical => build_categorical(table, col, name, &kept),
            Strategy::Quantile(n) => build_quantile(table, col, name, &kept, *n)?,
            Strategy::Edges(edges) => build_edges(table, col, name, &kept, edges)?,
            Strategy::Mapping(map) => build_mapping(table, col, name, &kept, map)?,
        };
        attributes.push(Attribute {
            name: name.to_owned(),
            values: built.values,
            self_labeled: built.self_labeled,
        });
        assignments.push(built.assignment);
    }

    let mut offsets = Vec::with_capacity(attributes.len());
    let mut next = 0u32;
    for attr in &attributes {
        offsets.push(next);
        next += attr.values.len() as u32;
    }
    let rows: Vec<Vec<ItemId>> = (0..kept.len())
        .map(|r| {
            (0..attributes.len())
                .map(|a| ItemId(offsets[a] + assignments[a][r]))
                .collect()
        })
        .collect();

    DiscretizedDataset::from_parts(attributes, rows, kept)
}

fn build_categorical(table: &RawTable, col: usize, _name: &str, kept: &[usize]) -> BuiltColumn {
    let mut values: Vec<String> = Vec::new();
    let mut index: HashMap<String, u32> = HashMap::new();
    let mut assignment = Vec::with_capacity(kept.len());
    for &r in kept {
        let cell = table.cell(r, col);
        let key = if cell.is_missing() {
            MISSING_LABEL.to_owned()
        } else {
            cell.display()
        };
        let id = *index.entry(key.clone()).or_insert_with(|| {
            values.push(key);
            (values.len() - 1) as u32
        });
        assignment.push(id);
    }
    BuiltColumn {
        values,
        self_labeled: false,
        assignment,
    }
}

/// Interval labels: "col≤e0", "col=(e0-e1]", ..., "col>elast". Bins are
/// right-closed so the lowest bin reads "col≤v".
fn interval_labels(name: &str, edges: &[f64]) -> Vec<String> {
    let mut labels = Vec::with_capacity(edges.len() + 1);
    labels.push(format!("{name}≤{}", fmt_number(edges[0])));
    for w in edges.windows(2) {
        labels.push(format!("{name}=({}-{}]", fmt_number(w[0]), fmt_number(w[1])));
    }
    labels.push(format!("{name}>{}", fmt_number(edges[edges.len() - 1])));
    labels
}

/// Bin index for a right-closed edge list: count of edges strictly below v.
fn bin_of(edges: &[f64], v: f64) -> u32 {
    edges.partition_point(|&e| e < v) as u32
}

fn numeric_column(table: &RawTable, col: usize, name: &str, kept: &[usize]) -> Result<Vec<Option<f64>>> {
    kept.iter()
        .map(|&r| match table.cell(r, col) {
            Cell::Number(v) => Ok(Some(*v)),
            Cell::Missing => Ok(None),
            Cell::Text(s) => Err(Error::NonNumericColumn {
                column: name.to_owned(),
                row: r + 1,
                value: s.clone(),
            }),
        })
        .collect()
}

/// Shared tail of the two interval strategies: missing cells (own-category
/// policy only) get an extra category after the bins.
fn build_intervals(
    name: &str,
    edges: &[f64],
    numbers: &[Option<f64>],
) -> BuiltColumn {
    let mut values = interval_labels(name, edges);
    let mut missing_id = None;
    let assignment = numbers
        .iter()
        .map(|v| match v {
            Some(v) => bin_of(edges, *v),
            None => *missing_id.get_or_insert_with(|| {
                values.push(item_label(name, MISSING_LABEL));
                (values.len() - 1) as u32
            }),
        })
        .collect();
    BuiltColumn {
        values,
        self_labeled: true,
        assignment,
    }
}

fn build_edges(
    table: &RawTable,
    col: usize,
    name: &str,
    kept: &[usize],
    edges: &[f64],
) -> Result<BuiltColumn> {
    let numbers = numeric_column(table, col, name, kept)?;
    Ok(build_intervals(name, edges, &numbers))
}

fn build_quantile(
    table: &RawTable,
    col: usize,
    name: &str,
    kept: &[usize],
    n_bins: usize,
) -> Result<BuiltColumn> {
    let numbers = numeric_column(table, col, name, kept)?;
    let mut sorted: Vec<f64> = numbers.iter().flatten().copied().collect();
    if sorted.is_empty() {
        return Err(Error::InvalidSpec(format!(
            "column {name:?}: no numeric values to bin"
        )));
    }
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // k-th cut sits at index ceil(k*len/n)-1; duplicate cuts and cuts at the
    // maximum would leave empty bins, so they are merged away.
    let len = sorted.len();
    let max = sorted[len - 1];
    let mut edges: Vec<f64> = Vec::with_capacity(n_bins - 1);
    for k in 1..n_bins {
        let idx = (k * len).div_ceil(n_bins) - 1;
        let e = sorted[idx];
        if e < max && edges.last() != Some(&e) {
            edges.push(e);
        }
    }
    if edges.len() + 1 < n_bins {
        log::warn!(
            "column {name:?}: {n_bins} quantile bins requested, {} kept after merging ties",
            edges.len() + 1
        );
    }
    if edges.is_empty() {
        // Constant column: a single catch-all category.
        let mut values = vec![item_label(name, "any")];
        let mut missing_id = None;
        let assignment = numbers
            .iter()
            .map(|v| match v {
                Some(_) => 0,
                None => *missing_id.get_or_insert_with(|| {
                    values.push(item_label(name, MISSING_LABEL));
                    (values.len() - 1) as u32
                }),
            })
            .collect();
        return Ok(BuiltColumn {
            values,
            self_labeled: true,
            assignment,
        });
    }
    Ok(build_intervals(name, &edges, &numbers))
}

fn build_mapping(
    table: &RawTable,
    col: usize,
    name: &str,
    kept: &[usize],
    map: &BTreeMap<String, String>,
) -> Result<BuiltColumn> {
    let mut values: Vec<String> = Vec::new();
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut unmapped: Vec<String> = Vec::new();
    let mut missing_id = None;
    let mut assignment = Vec::with_capacity(kept.len());
    for &r in kept {
        let cell = table.cell(r, col);
        if cell.is_missing() {
            assignment.push(*missing_id.get_or_insert_with(|| {
                values.push(MISSING_LABEL.to_owned());
                (values.len() - 1) as u32
            }));
            continue;
        }
        let key = cell.display();
        match map.get(&key) {
            Some(label) => {
                let id = match index.get(label.as_str()) {
                    Some(&id) => id,
                    None => {
                        values.push(label.clone());
                        let id = (values.len() - 1) as u32;
                        index.insert(label.as_str(), id);
                        id
                    }
                };
                assignment.push(id);
            }
            None => {
                if !unmapped.contains(&key) {
                    unmapped.push(key);
                }
                assignment.push(0);
            }
        }
    }
    if !unmapped.is_empty() {
        unmapped.sort();
        return Err(Error::InvalidSpec(format!(
            "column {name:?}: unmapped values: {}",
            unmapped.join(", ")
        )));
    }
    Ok(BuiltColumn {
        values,
        self_labeled: false,
        assignment,
    })
}
