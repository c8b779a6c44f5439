//! Serialization of mining results and attributions: CSV, JSON, a markdown
//! top-k table, and an SVG bar chart per attribution.
//!
//! Every renderer works off [`JsonResult`], the plain-f64 document form, so a
//! reloaded `itemsets.json` re-ranks into exactly the same markdown the run
//! produced. Machine formats (CSV/JSON) keep full float precision; the
//! human-facing markdown and SVG round to 4 decimal places.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dataset::Itemset;
use crate::error::Result;
use crate::miner::{ItemsetRecord, MiningResult, SignFilter};
use crate::scalar::Scalar;
use crate::shapley::Attribution;

/// A t-value cell: a finite number, "inf" (zero pooled variance with nonzero
/// divergence), or null (undefined, rendered "—" in tables). The string form
/// exists because JSON has no infinity literal.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TValue(pub Option<f64>);

impl Serialize for TValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            None => s.serialize_none(),
            Some(v) if v.is_infinite() => s.serialize_str("inf"),
            Some(v) => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for TValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Option::<Repr>::deserialize(d)? {
            None => Ok(TValue(None)),
            Some(Repr::Num(v)) => Ok(TValue(Some(v))),
            Some(Repr::Str(s)) if s == "inf" => Ok(TValue(Some(f64::INFINITY))),
            Some(Repr::Str(s)) => Err(serde::de::Error::custom(format!(
                "t must be a number, \"inf\", or null, not {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub threshold: f64,
    pub outcome: String,
    pub baseline: String,
    pub n_rows: usize,
    pub dataset_hash: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonRecord {
    pub items: Vec<String>,
    pub item_ids: Vec<u32>,
    pub support: f64,
    /// Rows matching the itemset; support × n_rows.
    pub count: usize,
    /// Matching rows with a defined outcome.
    pub outcome_count: usize,
    pub outcome: Option<f64>,
    pub divergence: Option<f64>,
    pub t: TValue,
}

impl JsonRecord {
    pub fn display_itemset(&self) -> String {
        format!("{{{}}}", self.items.join(", "))
    }
}

/// Document form of a full mining result; `records` keep canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonResult {
    pub meta: RunMeta,
    pub global: JsonRecord,
    pub records: Vec<JsonRecord>,
}

fn json_record<S: Scalar>(record: &ItemsetRecord<S>, result: &MiningResult<S>) -> JsonRecord {
    let f = |v: S| v.to_f64().expect("scalar fits f64");
    JsonRecord {
        items: record
            .itemset
            .items()
            .iter()
            .map(|id| result.labels()[id.index()].clone())
            .collect(),
        item_ids: record.itemset.items().iter().map(|id| id.0).collect(),
        support: record.support,
        count: record.match_count,
        outcome_count: record.stats.count,
        outcome: record.mean.map(f),
        divergence: record.divergence.map(f),
        t: TValue(record.t.map(f)),
    }
}

pub fn to_json_result<S: Scalar>(
    result: &MiningResult<S>,
    dataset_hash: Option<String>,
) -> JsonResult {
    JsonResult {
        meta: RunMeta {
            threshold: result.threshold(),
            outcome: result.outcome_desc().to_owned(),
            baseline: result.baseline().name().to_owned(),
            n_rows: result.n_rows(),
            dataset_hash,
        },
        global: json_record(result.global(), result),
        records: result.records().iter().map(|r| json_record(r, result)).collect(),
    }
}

fn csv_float(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_t(t: TValue) -> String {
    match t.0 {
        None => String::new(),
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => v.to_string(),
    }
}

/// `itemset,support,count,outcome,divergence,t`, the empty itemset first.
/// Full float precision; byte-identical across runs of the same input.
pub fn write_csv<W: Write>(out: W, result: &JsonResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["itemset", "support", "count", "outcome", "divergence", "t"])?;
    for r in std::iter::once(&result.global).chain(&result.records) {
        w.write_record([
            r.display_itemset(),
            r.support.to_string(),
            r.count.to_string(),
            csv_float(r.outcome),
            csv_float(r.divergence),
            csv_t(r.t),
        ])?;
    }
    w.flush().map_err(crate::error::Error::from)?;
    Ok(())
}

pub fn write_json<W: Write>(out: W, result: &JsonResult) -> Result<()> {
    serde_json::to_writer(out, result)?;
    Ok(())
}

pub fn read_json<R: Read>(input: R) -> Result<JsonResult> {
    Ok(serde_json::from_reader(input)?)
}

/// The ranking used by `top_k_records`, replayed on document records:
/// divergence per sign, then higher support, then canonical order (the
/// incoming order, preserved by the stable sort).
pub fn rank_records<'a>(records: &'a [JsonRecord], k: usize, sign: SignFilter) -> Vec<&'a JsonRecord> {
    let mut rows: Vec<&JsonRecord> = records.iter().filter(|r| r.divergence.is_some()).collect();
    rows.sort_by(|a, b| {
        let (da, db) = (a.divergence.unwrap(), b.divergence.unwrap());
        let key = match sign {
            SignFilter::Positive => db.partial_cmp(&da),
            SignFilter::Negative => da.partial_cmp(&db),
            SignFilter::Absolute => db.abs().partial_cmp(&da.abs()),
        };
        key.unwrap().then(b.count.cmp(&a.count))
    });
    rows.truncate(k);
    rows
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

fn md_t(t: TValue) -> String {
    match t.0 {
        None => "—".into(),
        Some(v) if v.is_infinite() => "inf".into(),
        Some(v) => fmt4(v),
    }
}

fn md_section(out: &mut String, title: &str, rows: &[&JsonRecord]) {
    out.push_str(&format!("## {title}\n\n"));
    out.push_str("| itemset | sup | Δ | t |\n|---|---:|---:|---:|\n");
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} |\n",
            md_cell(&r.display_itemset()),
            fmt4(r.support),
            fmt4(r.divergence.unwrap()),
            md_t(r.t),
        ));
    }
    out.push('\n');
}

/// Top-k markdown table. With no sign, both the highest and lowest
/// divergence blocks are emitted; with a sign, just that block.
pub fn top_markdown(result: &JsonResult, k: usize, sign: Option<SignFilter>) -> String {
    let mut out = String::new();
    out.push_str("# Top itemsets by divergence\n\n");
    out.push_str(&format!("- outcome: {}\n", result.meta.outcome));
    if let Some(global) = result.global.outcome {
        out.push_str(&format!(
            "- global outcome o(∅) = {} over {} rows\n",
            fmt4(global),
            result.meta.n_rows
        ));
    }
    out.push_str(&format!("- support threshold: {}\n", result.meta.threshold));
    out.push_str(&format!("- itemsets mined: {}\n", result.records.len()));
    out.push_str(&format!("- t-test baseline: {}\n\n", result.meta.baseline));

    match sign {
        Some(SignFilter::Positive) => {
            md_section(&mut out, "Highest divergence", &rank_records(&result.records, k, SignFilter::Positive));
        }
        Some(SignFilter::Negative) => {
            md_section(&mut out, "Lowest divergence", &rank_records(&result.records, k, SignFilter::Negative));
        }
        Some(SignFilter::Absolute) => {
            md_section(&mut out, "Largest absolute divergence", &rank_records(&result.records, k, SignFilter::Absolute));
        }
        None => {
            md_section(&mut out, "Highest divergence", &rank_records(&result.records, k, SignFilter::Positive));
            md_section(&mut out, "Lowest divergence", &rank_records(&result.records, k, SignFilter::Negative));
        }
    }
    out
}

/// Document form of one attribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonAttribution {
    pub itemset: Vec<String>,
    pub divergence: f64,
    pub contributions: Vec<JsonContribution>,
    pub residual_check: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonContribution {
    pub item: String,
    pub value: f64,
}

pub fn to_json_attribution<S: Scalar>(
    at: &Attribution<S>,
    result: &MiningResult<S>,
) -> JsonAttribution {
    let f = |v: S| v.to_f64().expect("scalar fits f64");
    JsonAttribution {
        itemset: at
            .itemset
            .items()
            .iter()
            .map(|id| result.labels()[id.index()].clone())
            .collect(),
        divergence: f(at.divergence),
        contributions: at
            .contributions
            .iter()
            .map(|(id, v)| JsonContribution {
                item: result.labels()[id.index()].clone(),
                value: f(*v),
            })
            .collect(),
        residual_check: f(at.residual_check),
    }
}

pub fn write_attribution_json<W: Write>(out: W, at: &JsonAttribution) -> Result<()> {
    serde_json::to_writer_pretty(out, at)?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '&' => "&amp;".to_owned(),
            '<' => "&lt;".to_owned(),
            '>' => "&gt;".to_owned(),
            '"' => "&quot;".to_owned(),
            '\'' => "&apos;".to_owned(),
            c => c.to_string(),
        })
        .collect()
}

const BAR_POS: &str = "#4878a8";
const BAR_NEG: &str = "#b0524f";

/// Horizontal bar chart of one attribution: one bar per item, ordered by
/// contribution magnitude, negative bars drawn leftward from the zero axis.
pub fn attribution_svg(at: &JsonAttribution) -> String {
    let mut bars: Vec<&JsonContribution> = at.contributions.iter().collect();
    bars.sort_by(|a, b| b.value.abs().partial_cmp(&a.value.abs()).unwrap());

    let (width, label_w, bar_h, gap, top) = (680.0, 200.0, 24.0, 10.0, 48.0);
    let chart_w = width - label_w - 80.0;
    let axis_x = label_w + chart_w / 2.0;
    let max = bars
        .iter()
        .map(|c| c.value.abs())
        .fold(f64::EPSILON, f64::max);
    let scale = (chart_w / 2.0 - 8.0) / max;
    let height = top + bars.len() as f64 * (bar_h + gap) + 24.0;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n"
    ));
    svg.push_str(&format!(
        "  <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    ));
    let title = format!(
        "{{{}}}  Δ = {}",
        at.itemset.join(", "),
        fmt4(at.divergence)
    );
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"24\" font-size=\"14\" fill=\"#222\">{}</text>\n",
        xml_escape(&title)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{axis_x}\" y1=\"{}\" x2=\"{axis_x}\" y2=\"{}\" stroke=\"#999\"/>\n",
        top - 8.0,
        height - 16.0
    ));
    for (i, c) in bars.iter().enumerate() {
        let y = top + i as f64 * (bar_h + gap);
        let w = c.value.abs() * scale;
        let (x, color) = if c.value < 0.0 {
            (axis_x - w, BAR_NEG)
        } else {
            (axis_x, BAR_POS)
        };
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"#222\" text-anchor=\"end\">{}</text>\n",
            label_w - 8.0,
            y + bar_h / 2.0 + 4.0,
            xml_escape(&c.item)
        ));
        svg.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{y}\" width=\"{w:.2}\" height=\"{bar_h}\" fill=\"{color}\"/>\n"
        ));
        let (vx, anchor) = if c.value < 0.0 {
            (axis_x - w - 6.0, "end")
        } else {
            (axis_x + w + 6.0, "start")
        };
        svg.push_str(&format!(
            "  <text x=\"{vx:.2}\" y=\"{}\" font-size=\"11\" fill=\"#444\" text-anchor=\"{anchor}\">{}</text>\n",
            y + bar_h / 2.0 + 4.0,
            fmt4(c.value)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Filesystem-safe slug for an itemset's report files.
pub fn itemset_slug(itemset: &Itemset, labels: &[String]) -> String {
    let mut slug = String::new();
    for id in itemset.items() {
        if !slug.is_empty() {
            slug.push('_');
        }
        for ch in labels[id.index()].chars() {
            slug.push(if ch.is_ascii_alphanumeric() { ch } else { '-' });
        }
    }
    if slug.is_empty() {
        slug.push_str("empty");
    }
    slug
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attribute, DiscretizedDataset, ItemId};
    use crate::miner::{mine, MineOptions};
    use crate::outcome::OutcomeVector;
    use crate::shapley::shapley;

    fn mined() -> (DiscretizedDataset, MiningResult<f64>) {
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
        let d = DiscretizedDataset::from_parts(attrs, rows, vec![0, 1, 2, 3]).unwrap();
        let o = OutcomeVector::from_values(vec![Some(1.0), Some(2.0), Some(3.0), Some(4.0)]);
        let opts = MineOptions {
            outcome_desc: "attribute:z".into(),
            ..MineOptions::default()
        };
        let r = mine(&d, &o, 0.5, &opts).unwrap();
        (d, r)
    }

    #[test]
    fn csv_column_contract() {
        let (_, r) = mined();
        let doc = to_json_result(&r, None);
        let mut buf = Vec::new();
        write_csv(&mut buf, &doc).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "itemset,support,count,outcome,divergence,t");
        assert_eq!(lines[1], "{},1,4,2.5,0,0");
        assert_eq!(lines.len(), 2 + r.n_records());
        // Itemsets with a comma in the display form get RFC-4180 quoting.
        let pair = lines.iter().find(|l| l.contains("a=x, b=u")).unwrap();
        assert!(pair.starts_with("\"{a=x, b=u}\",0.5,2,"), "{pair}");
        let fields: Vec<&str> = pair.rsplitn(4, ',').collect();
        let t: f64 = fields[0].parse().unwrap();
        assert!((t - 1.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(fields[1], "-1");
        assert_eq!(fields[2], "1.5");

        // Same input, same bytes.
        let mut again = Vec::new();
        write_csv(&mut again, &doc).unwrap();
        assert_eq!(again, text.as_bytes());
    }

    #[test]
    fn json_round_trips_including_odd_t_values() {
        let (_, r) = mined();
        let mut doc = to_json_result(&r, Some("abc123".into()));
        doc.records[0].t = TValue(Some(f64::INFINITY));
        doc.records[1].t = TValue(None);
        let mut buf = Vec::new();
        write_json(&mut buf, &doc).unwrap();
        let back = read_json(&buf[..]).unwrap();
        assert_eq!(back, doc);
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("\"inf\""), "{text}");
        assert!(text.contains("\"dataset_hash\":\"abc123\""));
    }

    #[test]
    fn markdown_reproduces_from_a_reloaded_document() {
        let (_, r) = mined();
        let doc = to_json_result(&r, None);
        let mut buf = Vec::new();
        write_json(&mut buf, &doc).unwrap();
        let reloaded = read_json(&buf[..]).unwrap();
        let a = top_markdown(&doc, 3, None);
        let b = top_markdown(&reloaded, 3, None);
        assert_eq!(a, b);
        assert!(a.contains("| {b=v} | 0.5000 | 1.0000 | 1.2247 |"), "{a}");
        assert!(a.contains("## Highest divergence"));
        assert!(a.contains("## Lowest divergence"));
    }

    #[test]
    fn markdown_single_sign_emits_one_block() {
        let (_, r) = mined();
        let doc = to_json_result(&r, None);
        let md = top_markdown(&doc, 2, Some(SignFilter::Negative));
        assert!(md.contains("## Lowest divergence"));
        assert!(!md.contains("## Highest divergence"));
    }

    #[test]
    fn ranking_on_documents_matches_the_result_ranking() {
        let (_, r) = mined();
        let doc = to_json_result(&r, None);
        for sign in [SignFilter::Positive, SignFilter::Negative, SignFilter::Absolute] {
            let from_result: Vec<String> = r
                .top_k_records(3, sign)
                .iter()
                .map(|x| r.display_itemset(&x.itemset))
                .collect();
            let from_doc: Vec<String> = rank_records(&doc.records, 3, sign)
                .iter()
                .map(|x| x.display_itemset())
                .collect();
            assert_eq!(from_result, from_doc, "{sign:?}");
        }
    }

    #[test]
    fn svg_escapes_labels_and_draws_negatives_leftward() {
        let at = JsonAttribution {
            itemset: vec!["age<25".into(), "#prior>3".into()],
            divergence: 0.3,
            contributions: vec![
                JsonContribution {
                    item: "age<25".into(),
                    value: 0.4,
                },
                JsonContribution {
                    item: "#prior>3".into(),
                    value: -0.1,
                },
            ],
            residual_check: 0.0,
        };
        let svg = attribution_svg(&at);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("age&lt;25"));
        assert!(svg.contains(BAR_NEG));
        assert!(!svg.contains("age<25"), "unescaped label leaked");
    }

    #[test]
    fn attribution_document_carries_labels() {
        let (d, r) = mined();
        let set = d.itemset_from_labels(&["a=x", "b=u"]).unwrap();
        let at = shapley(&set, &r).unwrap();
        let doc = to_json_attribution(&at, &r);
        assert_eq!(doc.itemset, ["a=x", "b=u"]);
        assert_eq!(doc.contributions.len(), 2);
        assert!(doc.residual_check < 1e-12);
    }

    #[test]
    fn slugs_are_filesystem_safe() {
        let (d, _) = mined();
        let set = d.itemset_from_labels(&["a=x", "b=u"]).unwrap();
        let labels: Vec<String> = d.items().iter().map(|i| i.label.clone()).collect();
        assert_eq!(itemset_slug(&set, &labels), "a-x_b-u");
        assert_eq!(itemset_slug(&Itemset::empty(), &labels), "empty");
    }
}
