//! Per-row outcome functions: a value in ℝ or ⊥ (absent) for every row.
//!
//! Three families: a numeric attribute, a confusion statistic over
//! truth/prediction columns (⊥ masks the rows the statistic conditions away),
//! and a rank valuation γ applied to a rank column or to ranks derived from a
//! score column.

use std::collections::HashMap;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stats::SampleStats;
use crate::table::{Cell, RawTable};

/// Outcomes for every dataset row plus the global accumulator (o(∅)).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeVector<S> {
    values: Vec<Option<S>>,
    global: SampleStats<S>,
}

impl<S: Scalar> OutcomeVector<S> {
    pub fn from_values(values: Vec<Option<S>>) -> OutcomeVector<S> {
        let global = SampleStats::from_values(values.iter().flatten().copied());
        OutcomeVector { values, global }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<S>] {
        &self.values
    }

    pub fn get(&self, row: usize) -> Option<S> {
        self.values[row]
    }

    pub fn global(&self) -> &SampleStats<S> {
        &self.global
    }

    /// o(∅): mean over all non-⊥ rows.
    pub fn global_mean(&self) -> Option<S> {
        self.global.mean()
    }
}

fn cell_number<S: Scalar>(cell: &Cell, column: &str, row: usize) -> Result<Option<S>> {
    match cell {
        Cell::Number(v) => Ok(Some(S::from_f64(*v).expect("finite float"))),
        Cell::Missing => Ok(None),
        Cell::Text(s) => Err(Error::NonNumericColumn {
            column: column.to_owned(),
            row: row + 1,
            value: s.clone(),
        }),
    }
}

fn cell_bool(cell: &Cell, column: &str, row: usize) -> Result<bool> {
    let bad = |value: String| Error::NotBoolean {
        column: column.to_owned(),
        row: row + 1,
        value,
    };
    match cell {
        Cell::Number(v) if *v == 0.0 => Ok(false),
        Cell::Number(v) if *v == 1.0 => Ok(true),
        Cell::Number(v) => Err(bad(v.to_string())),
        Cell::Text(s) => match s.to_lowercase().as_str() {
            "true" | "t" | "yes" | "y" => Ok(true),
            "false" | "f" | "no" | "n" => Ok(false),
            _ => Err(bad(s.clone())),
        },
        Cell::Missing => Err(Error::MissingValue {
            column: column.to_owned(),
            row: row + 1,
        }),
    }
}

/// o(x) = the column's numeric value; missing cells become ⊥.
pub fn attribute_outcome<S: Scalar>(
    table: &RawTable,
    rows: &[usize],
    column: &str,
) -> Result<OutcomeVector<S>> {
    let col = table.column_index(column)?;
    let values = rows
        .iter()
        .map(|&r| cell_number(table.cell(r, col), column, r))
        .collect::<Result<Vec<_>>>()?;
    let out = OutcomeVector::from_values(values);
    if out.global.count == 0 {
        return Err(Error::EmptyOutcome);
    }
    Ok(out)
}

/// Which confusion statistic a truth/prediction pair turns into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfusionKind {
    Fpr,
    Fnr,
    Tpr,
    Tnr,
    Error,
    Accuracy,
}

impl ConfusionKind {
    /// The three-case outcome: ⊥ on rows the statistic conditions away,
    /// else 0/1. The subgroup mean of this vector is the statistic itself.
    fn apply(self, truth: bool, pred: bool) -> Option<bool> {
        match self {
            ConfusionKind::Fpr => (!truth).then_some(pred),
            ConfusionKind::Fnr => truth.then_some(!pred),
            ConfusionKind::Tpr => truth.then_some(pred),
            ConfusionKind::Tnr => (!truth).then_some(!pred),
            ConfusionKind::Error => Some(pred != truth),
            ConfusionKind::Accuracy => Some(pred == truth),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConfusionKind::Fpr => "fpr",
            ConfusionKind::Fnr => "fnr",
            ConfusionKind::Tpr => "tpr",
            ConfusionKind::Tnr => "tnr",
            ConfusionKind::Error => "error",
            ConfusionKind::Accuracy => "accuracy",
        }
    }
}

impl FromStr for ConfusionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ConfusionKind> {
        match s.to_lowercase().as_str() {
            "fpr" => Ok(ConfusionKind::Fpr),
            "fnr" => Ok(ConfusionKind::Fnr),
            "tpr" => Ok(ConfusionKind::Tpr),
            "tnr" => Ok(ConfusionKind::Tnr),
            "error" => Ok(ConfusionKind::Error),
            "accuracy" => Ok(ConfusionKind::Accuracy),
            other => Err(Error::InvalidOutcomeSpec {
                spec: other.to_owned(),
                reason: "unknown confusion statistic".into(),
            }),
        }
    }
}

/// Confusion outcome from boolean truth/prediction columns (0/1, true/false,
/// yes/no). Both columns must be present on every retained row.
pub fn confusion_outcome<S: Scalar>(
    table: &RawTable,
    rows: &[usize],
    truth: &str,
    pred: &str,
    kind: ConfusionKind,
) -> Result<OutcomeVector<S>> {
    let t_col = table.column_index(truth)?;
    let p_col = table.column_index(pred)?;
    let values = rows
        .iter()
        .map(|&r| {
            let t = cell_bool(table.cell(r, t_col), truth, r)?;
            let p = cell_bool(table.cell(r, p_col), pred, r)?;
            Ok(kind.apply(t, p).map(|hit| if hit { S::one() } else { S::zero() }))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = OutcomeVector::from_values(values);
    if out.global.count == 0 {
        return Err(Error::EmptyOutcome);
    }
    Ok(out)
}

/// Rank valuation γ: non-increasing in the rank position.
#[derive(Debug, Clone, PartialEq)]
pub struct RankValuation<S> {
    kind: ValuationKind<S>,
}

#[derive(Debug, Clone, PartialEq)]
enum ValuationKind<S> {
    TopK(usize),
    Power(S),
    Linear(usize),
    Table { values: Vec<S>, default: S },
}

impl<S: Scalar> RankValuation<S> {
    /// γ(i) = 1 for i ≤ k, else 0.
    pub fn top_k(k: usize) -> Result<RankValuation<S>> {
        if k == 0 {
            return Err(Error::InvalidValuation("top-k needs k ≥ 1".into()));
        }
        Ok(RankValuation {
            kind: ValuationKind::TopK(k),
        })
    }

    /// γ(i) = i^exponent with exponent < 0.
    pub fn power(exponent: S) -> Result<RankValuation<S>> {
        if !(exponent < S::zero()) {
            return Err(Error::InvalidValuation(format!(
                "power exponent must be negative, got {exponent}"
            )));
        }
        Ok(RankValuation {
            kind: ValuationKind::Power(exponent),
        })
    }

    /// γ(i) = (N − i)/N, floored at 0 past the population size.
    pub fn linear(n: usize) -> Result<RankValuation<S>> {
        if n == 0 {
            return Err(Error::InvalidValuation("linear needs a population ≥ 1".into()));
        }
        Ok(RankValuation {
            kind: ValuationKind::Linear(n),
        })
    }

    /// Explicit γ values for ranks 1..=len, `default` beyond. The sequence
    /// (including the default) must be non-increasing.
    pub fn table(values: Vec<S>, default: S) -> Result<RankValuation<S>> {
        let non_increasing = values.windows(2).all(|w| w[0] >= w[1])
            && values.last().map_or(true, |&last| default <= last);
        if !non_increasing {
            return Err(Error::InvalidValuation(
                "table valuation must be non-increasing in rank".into(),
            ));
        }
        Ok(RankValuation {
            kind: ValuationKind::Table { values, default },
        })
    }

    pub fn eval(&self, rank: usize) -> S {
        debug_assert!(rank >= 1);
        match &self.kind {
            ValuationKind::TopK(k) => {
                if rank <= *k {
                    S::one()
                } else {
                    S::zero()
                }
            }
            ValuationKind::Power(e) => S::from_count(rank).powf(*e),
            ValuationKind::Linear(n) => {
                if rank >= *n {
                    S::zero()
                } else {
                    S::from_count(n - rank) / S::from_count(*n)
                }
            }
            ValuationKind::Table { values, default } => {
                values.get(rank - 1).copied().unwrap_or(*default)
            }
        }
    }
}

/// o(x) = γ(rank(x)) over an explicit positive-integer rank column.
/// Duplicate, zero, fractional, or missing ranks are rejected; ranks that do
/// not cover 1..N exactly are allowed but logged.
pub fn rank_outcome<S: Scalar>(
    table: &RawTable,
    rows: &[usize],
    column: &str,
    valuation: &RankValuation<S>,
) -> Result<OutcomeVector<S>> {
    let col = table.column_index(column)?;
    let bad = |row: usize, reason: String| Error::InvalidRanks {
        column: column.to_owned(),
        reason: format!("row {}: {reason}", row + 1),
    };
    let mut ranks = Vec::with_capacity(rows.len());
    for &r in rows {
        match table.cell(r, col) {
            Cell::Number(v) if v.fract() == 0.0 && *v >= 1.0 => ranks.push(*v as usize),
            Cell::Number(v) => return Err(bad(r, format!("{v} is not a positive integer rank"))),
            Cell::Text(s) => return Err(bad(r, format!("{s:?} is not a rank"))),
            Cell::Missing => {
                return Err(Error::MissingValue {
                    column: column.to_owned(),
                    row: r + 1,
                })
            }
        }
    }
    let mut seen: HashMap<usize, usize> = HashMap::with_capacity(ranks.len());
    for (i, &rank) in ranks.iter().enumerate() {
        if let Some(first) = seen.insert(rank, i) {
            return Err(Error::InvalidRanks {
                column: column.to_owned(),
                reason: format!("rank {rank} appears at rows {} and {}", first + 1, i + 1),
            });
        }
    }
    if ranks.iter().any(|&r| r > ranks.len()) {
        log::warn!(
            "column {column:?}: ranks are not a permutation of 1..{}; gaps kept as given",
            ranks.len()
        );
    }
    Ok(rank_outcome_from_ranks(&ranks, valuation))
}

/// γ applied to already-validated ranks; never produces ⊥.
pub fn rank_outcome_from_ranks<S: Scalar>(
    ranks: &[usize],
    valuation: &RankValuation<S>,
) -> OutcomeVector<S> {
    OutcomeVector::from_values(ranks.iter().map(|&r| Some(valuation.eval(r))).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Descending,
    Ascending,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Direction> {
        match s.to_lowercase().as_str() {
            "desc" | "descending" => Ok(Direction::Descending),
            "asc" | "ascending" => Ok(Direction::Ascending),
            other => Err(Error::InvalidOutcomeSpec {
                spec: other.to_owned(),
                reason: "direction must be asc or desc".into(),
            }),
        }
    }
}

/// Ranks 1..=N from a score column: rank 1 is the best score under the
/// direction; ties keep input order (stable sort) and are logged.
pub fn ranks_from_score(
    table: &RawTable,
    rows: &[usize],
    column: &str,
    direction: Direction,
) -> Result<Vec<usize>> {
    let col = table.column_index(column)?;
    let mut scores = Vec::with_capacity(rows.len());
    for &r in rows {
        match table.cell(r, col) {
            Cell::Number(v) => scores.push(*v),
            Cell::Missing => {
                return Err(Error::MissingValue {
                    column: column.to_owned(),
                    row: r + 1,
                })
            }
            Cell::Text(s) => {
                return Err(Error::NonNumericColumn {
                    column: column.to_owned(),
                    row: r + 1,
                    value: s.clone(),
                })
            }
        }
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    match direction {
        Direction::Descending => order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap()),
        Direction::Ascending => order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap()),
    }
    if order.windows(2).any(|w| scores[w[0]] == scores[w[1]]) {
        log::info!("column {column:?}: tied scores ranked by input order");
    }
    let mut ranks = vec![0usize; scores.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    Ok(ranks)
}

/// Parsed form of the CLI outcome grammar:
/// `attribute:COL`, `KIND:TRUTH:PRED` (fpr/fnr/tpr/tnr/error/accuracy),
/// `rank:COL:VALUATION`, `rank:SCORECOL:asc|desc:VALUATION`, with VALUATION
/// one of `topk=K`, `power=A` (γ(i)=i^−|A|), `linear`.
#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeSpec {
    Attribute {
        column: String,
    },
    Confusion {
        kind: ConfusionKind,
        truth: String,
        pred: String,
    },
    Rank {
        column: String,
        direction: Option<Direction>,
        valuation: ValuationSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValuationSpec {
    TopK(usize),
    Power(f64),
    Linear,
}

impl ValuationSpec {
    fn parse(token: &str, spec: &str) -> Result<ValuationSpec> {
        let invalid = |reason: String| Error::InvalidOutcomeSpec {
            spec: spec.to_owned(),
            reason,
        };
        if token == "linear" {
            return Ok(ValuationSpec::Linear);
        }
        if let Some(k) = token.strip_prefix("topk=") {
            let k: usize = k
                .parse()
                .map_err(|_| invalid(format!("{k:?} is not a valid k")))?;
            if k == 0 {
                return Err(invalid("topk needs k ≥ 1".into()));
            }
            return Ok(ValuationSpec::TopK(k));
        }
        if let Some(a) = token.strip_prefix("power=") {
            let a: f64 = a
                .parse()
                .map_err(|_| invalid(format!("{a:?} is not a valid exponent")))?;
            if !a.is_finite() || a == 0.0 {
                return Err(invalid("power exponent must be a nonzero real".into()));
            }
            return Ok(ValuationSpec::Power(a));
        }
        Err(invalid(format!("unknown rank valuation {token:?}")))
    }

    /// Concrete γ; `n` is the ranked population size (used by `linear`).
    pub fn to_valuation<S: Scalar>(self, n: usize) -> Result<RankValuation<S>> {
        match self {
            ValuationSpec::TopK(k) => RankValuation::top_k(k),
            ValuationSpec::Power(a) => {
                RankValuation::power(S::from_f64(-a.abs()).expect("finite exponent"))
            }
            ValuationSpec::Linear => RankValuation::linear(n),
        }
    }
}

impl FromStr for OutcomeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<OutcomeSpec> {
        let invalid = |reason: &str| Error::InvalidOutcomeSpec {
            spec: s.to_owned(),
            reason: reason.into(),
        };
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(invalid("empty component"));
        }
        match parts[0].to_lowercase().as_str() {
            "attribute" => match parts.len() {
                2 => Ok(OutcomeSpec::Attribute {
                    column: parts[1].to_owned(),
                }),
                _ => Err(invalid("expected attribute:COL")),
            },
            kind @ ("fpr" | "fnr" | "tpr" | "tnr" | "error" | "accuracy") => match parts.len() {
                3 => Ok(OutcomeSpec::Confusion {
                    kind: kind.parse()?,
                    truth: parts[1].to_owned(),
                    pred: parts[2].to_owned(),
                }),
                _ => Err(invalid("expected KIND:TRUTH_COL:PREDICTION_COL")),
            },
            "rank" => {
                let (direction, tail) = match parts.len() {
                    3 => (None, parts[2]),
                    4 => (Some(parts[2].parse::<Direction>()?), parts[3]),
                    _ => return Err(invalid("expected rank:COL[:asc|desc]:VALUATION")),
                };
                Ok(OutcomeSpec::Rank {
                    column: parts[1].to_owned(),
                    direction,
                    valuation: ValuationSpec::parse(tail, s)?,
                })
            }
            _ => Err(invalid(
                "expected attribute:, fpr:, fnr:, tpr:, tnr:, error:, accuracy:, or rank:",
            )),
        }
    }
}

impl OutcomeSpec {
    /// Columns the outcome reads; these are excluded from mining by default.
    pub fn source_columns(&self) -> Vec<&str> {
        match self {
            OutcomeSpec::Attribute { column } => vec![column],
            OutcomeSpec::Confusion { truth, pred, .. } => vec![truth, pred],
            OutcomeSpec::Rank { column, .. } => vec![column],
        }
    }

    /// Evaluate over the given (kept) rows of the table.
    pub fn evaluate<S: Scalar>(&self, table: &RawTable, rows: &[usize]) -> Result<OutcomeVector<S>> {
        match self {
            OutcomeSpec::Attribute { column } => attribute_outcome(table, rows, column),
            OutcomeSpec::Confusion { kind, truth, pred } => {
                confusion_outcome(table, rows, truth, pred, *kind)
            }
            OutcomeSpec::Rank {
                column,
                direction,
                valuation,
            } => {
                let valuation = valuation.to_valuation::<S>(rows.len())?;
                match direction {
                    Some(d) => {
                        let ranks = ranks_from_score(table, rows, column, *d)?;
                        Ok(rank_outcome_from_ranks(&ranks, &valuation))
                    }
                    None => rank_outcome(table, rows, column, &valuation),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::RawTable;

    fn table_of(names: &[&str], rows: Vec<Vec<Cell>>) -> RawTable {
        RawTable::new(names.iter().map(|s| s.to_string()).collect(), rows).unwrap()
    }

    fn num(v: f64) -> Cell {
        Cell::Number(v)
    }

    fn all_rows(t: &RawTable) -> Vec<usize> {
        (0..t.n_rows()).collect()
    }

    #[test]
    fn attribute_outcome_passes_numbers_through_and_masks_missing() {
        let t = table_of(&["z"], vec![vec![num(1.0)], vec![Cell::Missing], vec![num(3.0)]]);
        let o: OutcomeVector<f64> = attribute_outcome(&t, &all_rows(&t), "z").unwrap();
        assert_eq!(o.values(), &[Some(1.0), None, Some(3.0)]);
        assert_eq!(o.global().count, 2);
        assert_eq!(o.global_mean(), Some(2.0));
    }

    #[test]
    fn attribute_outcome_rejects_text() {
        let t = table_of(&["z"], vec![vec![Cell::Text("x".into())]]);
        assert!(matches!(
            attribute_outcome::<f64>(&t, &[0], "z"),
            Err(Error::NonNumericColumn { .. })
        ));
    }

    #[test]
    fn fpr_masks_positives_and_scores_negatives() {
        // truth [F,F], pred [T,F] → values [1,0], o(∅)=0.5.
        let t = table_of(
            &["t", "p"],
            vec![vec![num(0.0), num(1.0)], vec![num(0.0), num(0.0)]],
        );
        let o: OutcomeVector<f64> =
            confusion_outcome(&t, &all_rows(&t), "t", "p", ConfusionKind::Fpr).unwrap();
        assert_eq!(o.values(), &[Some(1.0), Some(0.0)]);
        assert_eq!(o.global_mean(), Some(0.5));
    }

    #[test]
    fn fnr_mirrors_fpr() {
        // truth [T,T,F], pred [F,T,F] → values [1,0,⊥], o(∅)=0.5.
        let t = table_of(
            &["t", "p"],
            vec![
                vec![num(1.0), num(0.0)],
                vec![num(1.0), num(1.0)],
                vec![num(0.0), num(0.0)],
            ],
        );
        let o: OutcomeVector<f64> =
            confusion_outcome(&t, &all_rows(&t), "t", "p", ConfusionKind::Fnr).unwrap();
        assert_eq!(o.values(), &[Some(1.0), Some(0.0), None]);
        assert_eq!(o.global_mean(), Some(0.5));
    }

    #[test]
    fn error_and_accuracy_never_mask() {
        let t = table_of(
            &["t", "p"],
            vec![vec![num(1.0), num(0.0)], vec![num(0.0), num(0.0)]],
        );
        let e: OutcomeVector<f64> =
            confusion_outcome(&t, &all_rows(&t), "t", "p", ConfusionKind::Error).unwrap();
        assert_eq!(e.values(), &[Some(1.0), Some(0.0)]);
        let a: OutcomeVector<f64> =
            confusion_outcome(&t, &all_rows(&t), "t", "p", ConfusionKind::Accuracy).unwrap();
        assert_eq!(a.values(), &[Some(0.0), Some(1.0)]);
    }

    #[test]
    fn all_bottom_outcome_is_an_error() {
        // No negatives at all → FPR undefined everywhere.
        let t = table_of(&["t", "p"], vec![vec![num(1.0), num(1.0)]]);
        assert!(matches!(
            confusion_outcome::<f64>(&t, &[0], "t", "p", ConfusionKind::Fpr),
            Err(Error::EmptyOutcome)
        ));
    }

    #[test]
    fn top_k_valuation_is_an_indicator() {
        let v: RankValuation<f64> = RankValuation::top_k(3).unwrap();
        assert_eq!(v.eval(3), 1.0);
        assert_eq!(v.eval(4), 0.0);
    }

    #[test]
    fn power_valuation_examples() {
        let v: RankValuation<f64> = RankValuation::power(-0.1).unwrap();
        assert_eq!(v.eval(1), 1.0);
        assert!((v.eval(10) - 10f64.powf(-0.1)).abs() < 1e-15);
        assert!(RankValuation::<f64>::power(0.1).is_err());
    }

    #[test]
    fn table_valuation_must_be_non_increasing() {
        assert!(RankValuation::table(vec![3.0, 2.0, 2.0], 0.0).is_ok());
        assert!(RankValuation::table(vec![1.0, 2.0], 0.0).is_err());
        assert!(RankValuation::table(vec![2.0, 1.0], 1.5).is_err());
        let v = RankValuation::table(vec![5.0, 4.0], 1.0).unwrap();
        assert_eq!(v.eval(2), 4.0);
        assert_eq!(v.eval(99), 1.0);
    }

    #[test]
    fn ranks_from_scores_with_ties_keep_input_order() {
        let t = table_of(
            &["s"],
            vec![vec![num(3.0)], vec![num(1.0)], vec![num(2.0)]],
        );
        let ranks = ranks_from_score(&t, &all_rows(&t), "s", Direction::Descending).unwrap();
        assert_eq!(ranks, [1, 3, 2]);

        let tied = table_of(&["s"], vec![vec![num(5.0)], vec![num(5.0)]]);
        let ranks = ranks_from_score(&tied, &all_rows(&tied), "s", Direction::Descending).unwrap();
        assert_eq!(ranks, [1, 2]);
    }

    #[test]
    fn rank_column_rejects_duplicates_and_zeros() {
        let v: RankValuation<f64> = RankValuation::top_k(1).unwrap();
        let dup = table_of(&["r"], vec![vec![num(1.0)], vec![num(1.0)]]);
        assert!(matches!(
            rank_outcome(&dup, &all_rows(&dup), "r", &v),
            Err(Error::InvalidRanks { .. })
        ));
        let zero = table_of(&["r"], vec![vec![num(0.0)]]);
        assert!(rank_outcome(&zero, &[0], "r", &v).is_err());
        let frac = table_of(&["r"], vec![vec![num(1.5)]]);
        assert!(rank_outcome(&frac, &[0], "r", &v).is_err());
    }

    #[test]
    fn outcome_spec_grammar() {
        assert_eq!(
            "attribute:ZFYA".parse::<OutcomeSpec>().unwrap(),
            OutcomeSpec::Attribute {
                column: "ZFYA".into()
            }
        );
        assert_eq!(
            "fpr:two_year_recid:predicted".parse::<OutcomeSpec>().unwrap(),
            OutcomeSpec::Confusion {
                kind: ConfusionKind::Fpr,
                truth: "two_year_recid".into(),
                pred: "predicted".into(),
            }
        );
        assert_eq!(
            "rank:position:topk=10".parse::<OutcomeSpec>().unwrap(),
            OutcomeSpec::Rank {
                column: "position".into(),
                direction: None,
                valuation: ValuationSpec::TopK(10),
            }
        );
        assert_eq!(
            "rank:zfya:desc:power=0.1".parse::<OutcomeSpec>().unwrap(),
            OutcomeSpec::Rank {
                column: "zfya".into(),
                direction: Some(Direction::Descending),
                valuation: ValuationSpec::Power(0.1),
            }
        );
        for bad in [
            "attribute",
            "fpr:only_one",
            "rank:c:sideways:topk=3",
            "rank:c:topk=0",
            "rank:c:power=0",
            "mystery:c",
            "attribute::x",
        ] {
            assert!(bad.parse::<OutcomeSpec>().is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn power_spec_normalizes_the_exponent_sign() {
        // power=0.1 and power=-0.1 both mean γ(i) = i^-0.1.
        let v1: RankValuation<f64> = ValuationSpec::Power(0.1).to_valuation(10).unwrap();
        let v2: RankValuation<f64> = ValuationSpec::Power(-0.1).to_valuation(10).unwrap();
        assert_eq!(v1.eval(7), v2.eval(7));
    }
}
