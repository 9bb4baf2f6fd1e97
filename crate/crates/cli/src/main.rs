use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

/// Semantic similarity over concept taxonomies.
#[derive(Parser, Debug)]
#[command(name = "taxosim", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Taxonomy file. Relative paths missing from the working directory are
    /// looked up in $TAXOSIM_DATA_DIR.
    #[arg(long, global = true)]
    pub taxonomy: Option<PathBuf>,
    /// Frequency file used to estimate information content.
    #[arg(long, global = true)]
    pub freq: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FreqKind::WordResnik)]
    pub freq_kind: FreqKind,
    #[arg(long, global = true, value_enum, default_value_t = EstimatorArg::Mle)]
    pub estimator: EstimatorArg,
    /// Precomputed information content, in the format written by `ic`.
    #[arg(long, global = true)]
    pub ic_path: Option<PathBuf>,
    /// edge, resnik, sussna, jc or jc-simplified.
    #[arg(long, global = true, default_value = "jc")]
    pub measure: taxosim::Measure,
    /// Depth exponent of the combined measure.
    #[arg(
        long,
        global = true,
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub alpha: f64,
    /// Density factor of the combined measure, in [0, 1].
    #[arg(long, global = true, default_value_t = 1.0)]
    pub beta: f64,
    /// Link type factor for a relation, as rel=val. Repeatable.
    #[arg(long = "type-factor", global = true, value_parser = parse_rel_value)]
    pub type_factor: Vec<(String, f64)>,
    /// Lower end of a relation's edge weight range, as rel=val.
    #[arg(long = "sussna-min", global = true, value_parser = parse_rel_value)]
    pub sussna_min: Vec<(String, f64)>,
    /// Upper end of a relation's edge weight range, as rel=val.
    #[arg(long = "sussna-max", global = true, value_parser = parse_rel_value)]
    pub sussna_max: Vec<(String, f64)>,
    /// Maximum depth used by edge counting; the taxonomy's own by default.
    #[arg(long, global = true)]
    pub d_max: Option<usize>,
    /// Constant for turning distances into similarities; 2 * d_max by default.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub conversion_c: Option<f64>,
    #[arg(long, global = true, default_value_t = 2.0)]
    pub log_base: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Keep multiple roots instead of joining them under a virtual root.
    #[arg(long, global = true)]
    pub no_virtual_root: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Similarity or distance between two words.
    Sim {
        word1: String,
        word2: String,
        /// Treat the arguments as concept ids instead of words.
        #[arg(long)]
        concepts: bool,
    },
    /// Probability and information content of every concept.
    Ic,
    /// Correlate ratings with precomputed columns or with a measure.
    Eval {
        ratings: PathBuf,
        #[arg(long, value_enum, default_value_t = EvalMode::Columns)]
        mode: EvalMode,
        /// Drop a pair before scoring, as w1,w2.
        #[arg(long, value_parser = parse_pair)]
        ablate: Option<(String, String)>,
    },
    /// Correlation of the combined measure over an alpha x beta grid.
    Sweep {
        ratings: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
              default_values_t = taxosim::DEFAULT_ALPHAS)]
        alphas: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = taxosim::DEFAULT_BETAS)]
        betas: Vec<f64>,
        /// Drop a pair before scoring, as w1,w2.
        #[arg(long, value_parser = parse_pair)]
        ablate: Option<(String, String)>,
    },
    /// Summary statistics of the taxonomy.
    Info,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FreqKind {
    WordResnik,
    WordRichardson,
    Sense,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EstimatorArg {
    Mle,
    GoodTuring,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Columns,
    Measure,
}

fn parse_rel_value(s: &str) -> Result<(String, f64), String> {
    let (rel, val) = s
        .split_once('=')
        .ok_or_else(|| format!("expected rel=val, got `{s}`"))?;
    let val: f64 = val
        .parse()
        .map_err(|_| format!("invalid number `{val}` in `{s}`"))?;
    if rel.is_empty() {
        return Err(format!("missing relation name in `{s}`"));
    }
    Ok((rel.to_string(), val))
}

fn parse_pair(s: &str) -> Result<(String, String), String> {
    match s.split_once(',') {
        Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains(',') => {
            Ok((a.to_string(), b.to_string()))
        }
        _ => Err(format!("expected w1,w2, got `{s}`")),
    }
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| {
        eprintln!("internal error: {info}");
        std::process::exit(2);
    }));
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let mut out = Vec::new();
    match commands::run(&cli, &mut out) {
        Ok(()) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(&out).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_value_parsing() {
        assert_eq!(parse_rel_value("isa=0.5").unwrap(), ("isa".into(), 0.5));
        assert!(parse_rel_value("isa").is_err());
        assert!(parse_rel_value("=1").is_err());
        assert!(parse_rel_value("isa=x").is_err());
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(
            parse_pair("furnace,stove").unwrap(),
            ("furnace".into(), "stove".into())
        );
        assert!(parse_pair("furnace").is_err());
        assert!(parse_pair("a,b,c").is_err());
        assert!(parse_pair(",b").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_defaults_follow_the_grid() {
        let cli = Cli::try_parse_from(["taxosim", "sweep", "r.tsv"]).unwrap();
        match cli.command {
            Command::Sweep { alphas, betas, .. } => {
                assert_eq!(alphas, taxosim::DEFAULT_ALPHAS);
                assert_eq!(betas, taxosim::DEFAULT_BETAS);
            }
            _ => unreachable!(),
        }
        let cli = Cli::try_parse_from(["taxosim", "sweep", "r.tsv", "--alphas", "-1,0.5"]).unwrap();
        match cli.command {
            Command::Sweep { alphas, .. } => assert_eq!(alphas, [-1.0, 0.5]),
            _ => unreachable!(),
        }
    }
}
