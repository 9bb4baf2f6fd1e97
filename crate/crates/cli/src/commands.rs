use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::json;
use taxosim::stats::{estimate_ic, load_frequencies, Estimator, IcTable, Propagation};
use taxosim::{
    ablate_pair, concept_measure, evaluate_column, evaluate_measure, load_ratings, parameter_sweep,
    parse_taxonomy_with, word_similarity, MeasureConfig, RatingDataset, Taxonomy, TaxonomyOptions,
};

use crate::output;
use crate::{Cli, Command, EstimatorArg, EvalMode, Format, FreqKind, GlobalOpts};

pub const DATA_DIR_ENV: &str = "TAXOSIM_DATA_DIR";

/// `path` itself when it exists or is absolute, else the same relative path
/// under `$TAXOSIM_DATA_DIR` when that exists.
pub fn resolve(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Some(dir) = std::env::var_os(DATA_DIR_ENV) {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let resolved = resolve(path);
    let f = File::open(&resolved).with_context(|| format!("cannot open {}", resolved.display()))?;
    Ok(BufReader::new(f))
}

fn file_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load_taxonomy(opts: &GlobalOpts) -> Result<Taxonomy> {
    let path = opts
        .taxonomy
        .as_ref()
        .ok_or_else(|| anyhow!("--taxonomy is required for this command"))?;
    let options = TaxonomyOptions {
        virtual_root: !opts.no_virtual_root,
        ..Default::default()
    };
    parse_taxonomy_with(open(path)?, &options).with_context(|| format!("{}", path.display()))
}

fn propagation(kind: FreqKind) -> Propagation {
    match kind {
        FreqKind::WordResnik => Propagation::WordResnik,
        FreqKind::WordRichardson => Propagation::WordRichardson,
        FreqKind::Sense => Propagation::Sense,
    }
}

fn estimator(e: EstimatorArg) -> Estimator {
    match e {
        EstimatorArg::Mle => Estimator::Mle,
        EstimatorArg::GoodTuring => Estimator::GoodTuring,
    }
}

/// Information content from exactly one of `--ic-path` or `--freq`.
fn load_ic(opts: &GlobalOpts, t: &Taxonomy) -> Result<IcTable> {
    match (&opts.ic_path, &opts.freq) {
        (Some(_), Some(_)) => bail!("give either --ic-path or --freq, not both"),
        (None, None) => bail!("measure `{}` needs --ic-path or --freq", opts.measure),
        (Some(path), None) => IcTable::load(t, open(path)?, opts.log_base)
            .with_context(|| format!("{}", path.display())),
        (None, Some(path)) => {
            let scheme = propagation(opts.freq_kind);
            let table = load_frequencies(open(path)?, scheme.expected_kind())
                .with_context(|| format!("{}", path.display()))?;
            Ok(estimate_ic(
                t,
                &table,
                scheme,
                estimator(opts.estimator),
                opts.log_base,
            )?)
        }
    }
}

fn ic_if_needed(opts: &GlobalOpts, t: &Taxonomy) -> Result<Option<IcTable>> {
    if opts.measure.needs_ic() {
        load_ic(opts, t).map(Some)
    } else {
        Ok(None)
    }
}

fn pairs(list: &[(String, f64)]) -> BTreeMap<String, f64> {
    list.iter().cloned().collect()
}

pub fn measure_config(opts: &GlobalOpts) -> Result<MeasureConfig> {
    let cfg = MeasureConfig {
        alpha: opts.alpha,
        beta: opts.beta,
        type_factors: pairs(&opts.type_factor),
        sussna_min: pairs(&opts.sussna_min),
        sussna_max: pairs(&opts.sussna_max),
        conversion_c: opts.conversion_c,
        d_max: opts.d_max,
        ..Default::default()
    };
    cfg.validate_allowing_negative_alpha()?;
    Ok(cfg)
}

fn load_dataset(path: &Path, ablate: &Option<(String, String)>) -> Result<RatingDataset> {
    let ds = load_ratings(open(path)?, &file_name(path))
        .with_context(|| format!("{}", path.display()))?;
    match ablate {
        Some((w1, w2)) => Ok(ablate_pair(&ds, w1, w2)?),
        None => Ok(ds),
    }
}

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<()> {
    let opts = &cli.opts;
    if !(opts.log_base.is_finite() && opts.log_base > 1.0) {
        bail!("--log-base must be greater than 1");
    }
    match &cli.command {
        Command::Sim {
            word1,
            word2,
            concepts,
        } => sim(opts, word1, word2, *concepts, out),
        Command::Ic => ic(opts, out),
        Command::Eval {
            ratings,
            mode,
            ablate,
        } => eval(opts, ratings, *mode, ablate, out),
        Command::Sweep {
            ratings,
            alphas,
            betas,
            ablate,
        } => sweep(opts, ratings, alphas, betas, ablate, out),
        Command::Info => info(opts, out),
    }
}

fn sim(opts: &GlobalOpts, w1: &str, w2: &str, concepts: bool, out: &mut impl Write) -> Result<()> {
    let t = load_taxonomy(opts)?;
    let cfg = measure_config(opts)?;
    let ic = ic_if_needed(opts, &t)?;
    let result = if concepts {
        let (c1, c2) = (t.concept(w1)?, t.concept(w2)?);
        let mut r = concept_measure(&t, ic.as_ref(), &cfg, opts.measure, c1, c2)?;
        r.senses = Some((c1, c2));
        r
    } else {
        word_similarity(&t, ic.as_ref(), &cfg, opts.measure, w1, w2)?
    };
    let measure = opts.measure.id();
    match opts.format {
        Format::Tsv => output::measure_tsv(out, &t, measure, w1, w2, &result),
        Format::Json => output::json_line(out, &output::measure_json(&t, measure, w1, w2, &result)),
    }
}

fn ic(opts: &GlobalOpts, out: &mut impl Write) -> Result<()> {
    let t = load_taxonomy(opts)?;
    if opts.ic_path.is_none() && opts.freq.is_none() {
        bail!("`ic` needs --freq (or --ic-path to re-emit a table)");
    }
    let table = load_ic(opts, &t)?;
    match opts.format {
        Format::Tsv => table.write_tsv(&t, out)?,
        Format::Json => {
            let mut ids: Vec<_> = t.concepts().collect();
            ids.sort_by(|a, b| t.id(*a).cmp(t.id(*b)));
            let rows: Vec<_> = ids
                .into_iter()
                .map(|c| json!({"id": t.id(c), "prob": table.prob(c), "ic": table.ic(c)}))
                .collect();
            output::json_line(out, &json!(rows))?;
        }
    }
    Ok(())
}

fn eval(
    opts: &GlobalOpts,
    ratings: &Path,
    mode: EvalMode,
    ablate: &Option<(String, String)>,
    out: &mut impl Write,
) -> Result<()> {
    let ds = load_dataset(ratings, ablate)?;
    let reports = match mode {
        EvalMode::Columns => {
            if ds.columns().is_empty() {
                bail!("{} has no columns to score", ratings.display());
            }
            ds.columns()
                .iter()
                .map(|c| evaluate_column(&ds, c))
                .collect::<taxosim::Result<Vec<_>>>()?
        }
        EvalMode::Measure => {
            let t = load_taxonomy(opts)?;
            let cfg = measure_config(opts)?;
            let ic = ic_if_needed(opts, &t)?;
            vec![evaluate_measure(&t, ic.as_ref(), &cfg, opts.measure, &ds)?]
        }
    };
    for rep in &reports {
        for s in &rep.skipped {
            log::info!(
                "{}: skipped {}/{}: {}",
                rep.target,
                s.word1,
                s.word2,
                s.reason
            );
        }
    }
    match opts.format {
        Format::Tsv => output::reports_tsv(out, &reports),
        Format::Json => output::json_line(out, &serde_json::to_value(&reports)?),
    }
}

fn sweep(
    opts: &GlobalOpts,
    ratings: &Path,
    alphas: &[f64],
    betas: &[f64],
    ablate: &Option<(String, String)>,
    out: &mut impl Write,
) -> Result<()> {
    let ds = load_dataset(ratings, ablate)?;
    let t = load_taxonomy(opts)?;
    let cfg = measure_config(opts)?;
    let ic = load_ic(opts, &t)?;
    let grid = parameter_sweep(&t, &ic, &cfg, &ds, alphas, betas)?;
    match opts.format {
        Format::Tsv => output::grid_tsv(out, &grid),
        Format::Json => output::json_line(out, &serde_json::to_value(&grid)?),
    }
}

fn info(opts: &GlobalOpts, out: &mut impl Write) -> Result<()> {
    let t = load_taxonomy(opts)?;
    let roots: Vec<&str> = t.roots().iter().map(|&c| t.id(c).as_str()).collect();
    let relations: Vec<&str> = t.hierarchy_relations().iter().map(String::as_str).collect();
    let mut fields: Vec<(&str, serde_json::Value)> = vec![
        ("concepts", json!(t.len())),
        (
            "edges",
            json!(t.edges().iter().filter(|e| !e.is_virtual()).count()),
        ),
        ("words", json!(t.words().count())),
        ("roots", json!(roots.join(","))),
        (
            "virtual_root",
            json!(t.virtual_root().map(|c| t.id(c).to_string())),
        ),
        ("max_depth", json!(t.max_depth())),
        ("average_density", json!(t.average_density())),
        ("hierarchy_relations", json!(relations.join(","))),
    ];
    if opts.ic_path.is_some() || opts.freq.is_some() {
        let ic = load_ic(opts, &t)?;
        let infinite = t.concepts().filter(|&c| ic.ic(c).is_infinite()).count();
        fields.push(("infinite_ic", json!(infinite)));
    }
    match opts.format {
        Format::Tsv => {
            for (k, v) in &fields {
                let v = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Null => "-".to_string(),
                    serde_json::Value::Number(n) if n.is_f64() => {
                        output::value(n.as_f64().unwrap())
                    }
                    other => other.to_string(),
                };
                writeln!(out, "{k}\t{v}")?;
            }
            Ok(())
        }
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect();
            output::json_line(out, &serde_json::Value::Object(map))
        }
    }
}
