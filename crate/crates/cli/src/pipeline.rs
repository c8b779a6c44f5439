//! The `run` subcommand: one pass from CSV to report files.

use std::fs;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use divminer::dataset::Itemset;
use divminer::discretize::{default_spec, discretize, DiscretizationSpec};
use divminer::miner::{mine, MineOptions, SignFilter};
use divminer::outcome::OutcomeSpec;
use divminer::report::{
    attribution_svg, itemset_slug, to_json_attribution, to_json_result, top_markdown,
    write_attribution_json, write_csv, write_json,
};
use divminer::table::{load_csv, LoadOptions};
use divminer::{MiningResult, OutcomeVector};
use sha2::{Digest, Sha256};

use crate::{FormatArg, RunArgs};

pub fn run(args: &RunArgs) -> Result<()> {
    if args.top == 0 {
        bail!("--top must be at least 1");
    }
    let started = Instant::now();

    let table = load_csv(&args.input, LoadOptions::default())
        .with_context(|| format!("reading {}", args.input.display()))?;
    let dataset_hash = file_sha256(&args.input)?;
    log::info!(
        "loaded {} rows x {} columns from {}",
        table.n_rows(),
        table.n_columns(),
        args.input.display()
    );

    let outcome_spec: OutcomeSpec = args.outcome.parse()?;
    let spec = resolve_spec(args, &table, &outcome_spec)?;
    let dataset = discretize(&table, &spec)?;
    log::info!(
        "{} attributes, {} items, {} rows kept",
        dataset.n_attributes(),
        dataset.n_items(),
        dataset.n_rows()
    );

    let outcome: OutcomeVector = outcome_spec.evaluate(&table, dataset.source_rows())?;
    let options = MineOptions {
        max_records: args.max_records,
        threads: args.threads,
        baseline: args.compare.into(),
        outcome_desc: args.outcome.clone(),
    };
    let result = mine(&dataset, &outcome, args.support, &options)?;

    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let document = to_json_result(&result, Some(dataset_hash));

    let (csv_on, json_on, md_on) = match args.format {
        FormatArg::Csv => (true, false, false),
        FormatArg::Json => (false, true, false),
        FormatArg::Md => (false, false, true),
        FormatArg::All => (true, true, true),
    };
    if csv_on {
        let path = args.out.join("itemsets.csv");
        write_csv(BufWriter::new(File::create(&path)?), &document)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if json_on {
        let path = args.out.join("itemsets.json");
        write_json(BufWriter::new(File::create(&path)?), &document)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if md_on {
        let path = args.out.join("top.md");
        let md = top_markdown(&document, args.top, args.sign.map(Into::into));
        fs::write(&path, md).with_context(|| format!("writing {}", path.display()))?;
    }

    if let Some(selection) = &args.shapley {
        write_attributions(args, selection, &result)?;
    }

    let elapsed = started.elapsed().as_secs_f64();
    let global = result
        .global()
        .mean
        .expect("global outcome defined after mining");
    println!(
        "rows: {}  itemsets: {}  elapsed: {elapsed:.2}s  global outcome: {global:.4}",
        result.n_rows(),
        result.n_records(),
    );
    Ok(())
}

fn file_sha256(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(format!("sha256:{}", hex::encode(Sha256::digest(&bytes))))
}

/// The spec file if given, else categorical/quantile defaults. The outcome's
/// source columns never mine unless explicitly allowed: an outcome trivially
/// diverges on attributes derived from itself.
fn resolve_spec(
    args: &RunArgs,
    table: &divminer::table::RawTable,
    outcome: &OutcomeSpec,
) -> Result<DiscretizationSpec> {
    let sources: Vec<String> = outcome
        .source_columns()
        .iter()
        .map(|s| s.to_string())
        .collect();
    match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let mut spec: DiscretizationSpec = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            if !args.allow_outcome_attributes {
                for source in &sources {
                    if spec.columns.remove(source).is_some() {
                        log::warn!(
                            "column {source:?} feeds the outcome; dropped from mining \
                             (keep it with --allow-outcome-attributes)"
                        );
                    }
                }
            }
            if spec.columns.is_empty() {
                bail!("discretization spec has no columns left to mine");
            }
            Ok(spec)
        }
        None => {
            let exclude = if args.allow_outcome_attributes {
                Vec::new()
            } else {
                sources
            };
            Ok(default_spec(table, &exclude))
        }
    }
}

/// Which itemsets to attribute: the report's top K, or one explicit itemset.
enum Selection {
    Top(usize, Option<SignFilter>),
    Explicit(String),
}

fn parse_selection(text: &str) -> Result<Selection> {
    let text = text.trim();
    if text.starts_with('{') {
        return Ok(Selection::Explicit(text.to_owned()));
    }
    let Some(rest) = text.strip_prefix("top") else {
        bail!("--shapley wants \"topK\", \"topK-positive|negative|abs\", or \"{{item, item}}\", got {text:?}");
    };
    let (k_text, sign) = match rest.split_once('-') {
        Some((k, "positive")) | Some((k, "pos")) => (k, Some(SignFilter::Positive)),
        Some((k, "negative")) | Some((k, "neg")) => (k, Some(SignFilter::Negative)),
        Some((k, "abs")) => (k, Some(SignFilter::Absolute)),
        Some((_, other)) => bail!("unknown --shapley sign {other:?}"),
        None => (rest, None),
    };
    let k: usize = k_text
        .parse()
        .map_err(|_| anyhow::anyhow!("bad --shapley count {k_text:?}"))?;
    if k == 0 {
        bail!("--shapley top0 selects nothing");
    }
    Ok(Selection::Top(k, sign))
}

fn write_attributions(args: &RunArgs, selection: &str, result: &MiningResult) -> Result<()> {
    let targets: Vec<Itemset> = match parse_selection(selection)? {
        Selection::Top(k, sign) => {
            let sign = sign
                .or(args.sign.map(Into::into))
                .unwrap_or(SignFilter::Absolute);
            result
                .top_k_records(k, sign)
                .into_iter()
                .map(|r| r.itemset.clone())
                .collect()
        }
        Selection::Explicit(text) => {
            let inner = text
                .strip_prefix('{')
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(|| anyhow::anyhow!("explicit itemset must look like {{item, item}}"))?;
            let labels: Vec<&str> = inner.split(',').map(str::trim).collect();
            vec![result.itemset_from_labels(&labels)?]
        }
    };

    let dir = args.out.join("shapley");
    fs::create_dir_all(&dir)?;
    for (i, itemset) in targets.iter().enumerate() {
        let at = divminer::shapley::shapley(itemset, result)?;
        let json = to_json_attribution(&at, result);
        let stem = format!("{:02}_{}", i + 1, itemset_slug(itemset, result.labels()));
        write_attribution_json(
            BufWriter::new(File::create(dir.join(format!("{stem}.json")))?),
            &json,
        )?;
        fs::write(dir.join(format!("{stem}.svg")), attribution_svg(&json))?;
        log::info!("attributed {}", result.display_itemset(itemset));
    }
    Ok(())
}
