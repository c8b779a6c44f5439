//! Raw public datasets → mining-ready CSV plus the matching discretization
//! spec. Nothing here ships data; the user supplies the raw files.

use std::collections::BTreeMap;
use std::fs;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::{NaiveDate, NaiveDateTime};
use divminer::discretize::{DiscretizationSpec, MissingPolicy, Strategy};

use crate::{CompasArgs, LawschoolArgs};

/// Header-indexed access to one CSV record.
struct Row<'a> {
    record: &'a csv::StringRecord,
    index: &'a BTreeMap<String, usize>,
}

impl Row<'_> {
    fn text(&self, column: &str) -> &str {
        self.record.get(self.index[column]).unwrap_or("").trim()
    }

    fn number(&self, column: &str) -> Option<f64> {
        let text = self.text(column);
        (!text.is_empty()).then(|| text.parse().ok()).flatten()
    }
}

fn read_raw(path: &Path, required: &[&str]) -> Result<(Vec<csv::StringRecord>, BTreeMap<String, usize>)> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let index: BTreeMap<String, usize> = reader
        .headers()?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_owned(), i))
        .collect();
    let missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|c| !index.contains_key(*c))
        .collect();
    if !missing.is_empty() {
        bail!(
            "{} is missing required columns: {}",
            path.display(),
            missing.join(", ")
        );
    }
    let records = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((records, index))
}

fn write_spec(path: &Path, spec: &DiscretizationSpec) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(out, spec)?;
    Ok(())
}

fn categorical_spec(columns: &[&str]) -> DiscretizationSpec {
    DiscretizationSpec::new(
        columns
            .iter()
            .map(|c| (c.to_string(), Strategy::Categorical))
            .collect(),
        MissingPolicy::DropRow,
    )
}

/// Defendant screening dataset: standard row filters, published bin labels,
/// and a prediction thresholded on the decile score.
pub fn compas(args: &CompasArgs) -> Result<()> {
    const REQUIRED: [&str; 11] = [
        "age",
        "c_charge_degree",
        "race",
        "sex",
        "priors_count",
        "days_b_screening_arrest",
        "decile_score",
        "is_recid",
        "two_year_recid",
        "c_jail_in",
        "c_jail_out",
    ];
    let (records, index) = read_raw(&args.raw, &REQUIRED)?;
    let total = records.len();

    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("compas.csv");
    let mut out = csv::Writer::from_writer(BufWriter::new(File::create(&csv_path)?));
    out.write_record([
        "age",
        "charge",
        "#prior",
        "stay",
        "race",
        "sex",
        "two_year_recid",
        "predicted",
    ])?;

    let mut kept = 0usize;
    let mut bad_dates = 0usize;
    for record in &records {
        let row = Row {
            record,
            index: &index,
        };
        // The usual screening-window and data-quality filters.
        match row.number("days_b_screening_arrest") {
            Some(d) if (-30.0..=30.0).contains(&d) => {}
            _ => continue,
        }
        if row.number("is_recid") == Some(-1.0) {
            continue;
        }
        let charge = row.text("c_charge_degree");
        if charge != "F" && charge != "M" {
            continue;
        }
        let Some(stay) = stay_bucket(row.text("c_jail_in"), row.text("c_jail_out")) else {
            bad_dates += 1;
            continue;
        };
        let (Some(age), Some(priors), Some(decile), Some(recid)) = (
            row.number("age"),
            row.number("priors_count"),
            row.number("decile_score"),
            row.number("two_year_recid"),
        ) else {
            continue;
        };

        let age = if age < 25.0 {
            "<25"
        } else if age <= 45.0 {
            "25-45"
        } else {
            ">45"
        };
        let priors = if priors == 0.0 {
            "0"
        } else if priors <= 3.0 {
            "[1,3]"
        } else {
            ">3"
        };
        let race = match row.text("race") {
            "African-American" => "Afr-Am",
            "Caucasian" => "Cauc",
            "Native American" => "Native-Am",
            other => other,
        };
        let predicted = if decile >= args.cut as f64 { "1" } else { "0" };
        out.write_record([
            age,
            charge,
            priors,
            stay,
            race,
            row.text("sex"),
            if recid == 0.0 { "0" } else { "1" },
            predicted,
        ])?;
        kept += 1;
    }
    out.flush()?;
    if kept == 0 {
        bail!("{}: no rows survived the filters", args.raw.display());
    }
    if bad_dates > 0 {
        log::warn!("{bad_dates} rows dropped for unparseable jail dates");
    }

    let spec_path = args.out.join("compas.spec.json");
    write_spec(
        &spec_path,
        &categorical_spec(&["age", "charge", "#prior", "stay", "race", "sex"]),
    )?;
    println!(
        "compas: kept {kept} of {total} rows (prediction: decile score >= {}) -> {}, {}",
        args.cut,
        csv_path.display(),
        spec_path.display()
    );
    Ok(())
}

/// Jail stay length bucket, from timestamps like `2013-08-13 06:03:42`
/// (bare dates accepted). None when either endpoint does not parse.
fn stay_bucket(jail_in: &str, jail_out: &str) -> Option<&'static str> {
    let parse = |s: &str| {
        NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S")
            .ok()
            .or_else(|| {
                NaiveDate::parse_from_str(s, "%Y-%m-%d")
                    .ok()
                    .and_then(|d| d.and_hms_opt(0, 0, 0))
            })
    };
    let days = (parse(jail_out)? - parse(jail_in)?).num_days();
    Some(if days <= 7 {
        "<week"
    } else if days <= 93 {
        "1w-3M"
    } else if days <= 365 {
        "3M-1y"
    } else {
        ">1y"
    })
}

/// Law school survey: entrance scores, demographics, and the normalized
/// first-year average, with the published score bin edges.
pub fn lawschool(args: &LawschoolArgs) -> Result<()> {
    const REQUIRED: [&str; 5] = ["LSAT", "UGPA", "race", "sex", "ZFYA"];
    let (records, index) = read_raw(&args.raw, &REQUIRED)?;
    let total = records.len();

    fs::create_dir_all(&args.out)?;
    let csv_path = args.out.join("lawschool.csv");
    let mut out = csv::Writer::from_writer(BufWriter::new(File::create(&csv_path)?));
    out.write_record(["LSAT", "UGPA", "race", "sex", "ZFYA"])?;

    let mut kept = 0usize;
    for record in &records {
        let row = Row {
            record,
            index: &index,
        };
        // All four numeric fields must parse; race must be present.
        let (Some(_), Some(_), Some(sex), Some(_)) = (
            row.number("LSAT"),
            row.number("UGPA"),
            row.number("sex"),
            row.number("ZFYA"),
        ) else {
            continue;
        };
        let race = row.text("race");
        if race.is_empty() {
            continue;
        }
        let sex = if sex == args.female_code as f64 {
            "Female"
        } else {
            "Male"
        };
        out.write_record([
            row.text("LSAT"),
            row.text("UGPA"),
            race,
            sex,
            row.text("ZFYA"),
        ])?;
        kept += 1;
    }
    out.flush()?;
    if kept == 0 {
        bail!("{}: no usable rows", args.raw.display());
    }

    let mut columns = BTreeMap::new();
    columns.insert("LSAT".to_owned(), Strategy::Edges(vec![33.0, 41.0]));
    columns.insert("UGPA".to_owned(), Strategy::Edges(vec![3.0, 3.5]));
    columns.insert("race".to_owned(), Strategy::Categorical);
    columns.insert("sex".to_owned(), Strategy::Categorical);
    let spec_path = args.out.join("lawschool.spec.json");
    write_spec(
        &spec_path,
        &DiscretizationSpec::new(columns, MissingPolicy::DropRow),
    )?;
    println!(
        "lawschool: kept {kept} of {total} rows -> {}, {}",
        csv_path.display(),
        spec_path.display()
    );
    Ok(())
}
