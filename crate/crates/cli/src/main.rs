use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use umr_compare::metrics::{MatcherKind, ScoreOptions};
use umr_compare::SearchConfig;

mod commands;

#[derive(Debug, Parser)]
#[command(
    name = "umr-compare",
    version,
    about = "Compare UMR annotations by word-aligned node matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score predicted files against gold files.
    Compare(PairArgs),
    /// Count word-aligned and unaligned nodes.
    Stats(StatsArgs),
    /// Show the node mapping and unmatched triples.
    Diff(PairArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Matcher {
    Jumatch,
    Smatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Tsv,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Files given as GOLD PRED pairs: gold1 pred1 [gold2 pred2 ...].
    #[arg(required = true, value_name = "FILES")]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "jumatch")]
    matcher: Matcher,
    /// Also score document-level relations.
    #[arg(long)]
    include_doc: bool,
    /// Score only triples whose nodes are all mapped.
    #[arg(long)]
    mapped_only: bool,
    #[arg(long, visible_alias = "format", value_enum, default_value = "text")]
    output_format: OutputFormat,
    /// Seed for the smatch random restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of smatch restarts.
    #[arg(long, default_value_t = 4)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(required = true, value_name = "FILES")]
    files: Vec<PathBuf>,
    #[arg(long, visible_alias = "format", value_enum, default_value = "text")]
    output_format: OutputFormat,
}

impl PairArgs {
    fn pairs(&self) -> Result<Vec<(PathBuf, PathBuf)>, String> {
        if !self.files.len().is_multiple_of(2) {
            return Err(format!(
                "expected GOLD PRED pairs, got {} file(s)",
                self.files.len()
            ));
        }
        Ok(self
            .files
            .chunks(2)
            .map(|c| (c[0].clone(), c[1].clone()))
            .collect())
    }

    fn options(&self) -> ScoreOptions {
        let matcher = match self.matcher {
            Matcher::Jumatch => MatcherKind::Alignment,
            Matcher::Smatch => MatcherKind::HillClimb(SearchConfig {
                restarts: self.restarts,
                seed: self.seed,
                ..SearchConfig::default()
            }),
        };
        ScoreOptions {
            matcher,
            include_doc: self.include_doc,
            mapped_only: self.mapped_only,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compare(a) | Command::Diff(a) => match a.pairs() {
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            Ok(pairs) if matches!(cli.command, Command::Compare(_)) => {
                commands::compare(&pairs, &a.options(), a.output_format)
            }
            Ok(pairs) => commands::diff(&pairs, &a.options(), a.output_format),
        },
        Command::Stats(a) => commands::stats(&a.files, a.output_format),
    };
    match outcome {
        Ok(out) => {
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
