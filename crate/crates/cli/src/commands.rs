use std::fmt::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use umr_compare::metrics::{
    compare_documents, corpus_stats, render_diff, CorpusStats, DiffReport, ScoreOptions,
    ScoreReport, Side, TSV_HEADER,
};
use umr_compare::{read_document, NodeMapping, UmrDocument};

use crate::OutputFormat;

/// What a subcommand prints, plus the warnings destined for stderr.
pub struct Output {
    pub text: String,
    pub warnings: Vec<String>,
}

fn load(path: &Path, warnings: &mut Vec<String>) -> Result<UmrDocument> {
    let (doc, ws) = read_document(path)?;
    warnings.extend(ws.iter().map(|w| format!("{}: {w}", path.display())));
    Ok(doc)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("serializing output")?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct FileComparison {
    gold: PathBuf,
    pred: PathBuf,
    report: ScoreReport,
    mappings: Vec<NodeMapping>,
}

#[derive(Serialize)]
struct CompareOutput {
    files: Vec<FileComparison>,
    aggregate: ScoreReport,
}

pub fn compare(
    pairs: &[(PathBuf, PathBuf)],
    options: &ScoreOptions,
    format: OutputFormat,
) -> Result<Output> {
    let mut warnings = Vec::new();
    let mut files = Vec::with_capacity(pairs.len());
    for (g, p) in pairs {
        let gold = load(g, &mut warnings)?;
        let pred = load(p, &mut warnings)?;
        let c = compare_documents(&gold, &pred, options)
            .with_context(|| format!("comparing {} with {}", g.display(), p.display()))?;
        warnings.extend(c.warnings.iter().map(|w| format!("{}: {w}", p.display())));
        files.push(FileComparison {
            gold: g.clone(),
            pred: p.clone(),
            report: c.report,
            mappings: c.mappings,
        });
    }
    let aggregate = ScoreReport::aggregate(files.iter().map(|f| &f.report));
    let out = CompareOutput { files, aggregate };

    let text = match format {
        OutputFormat::Json => to_json(&out)?,
        OutputFormat::Text => compare_text(&out),
        OutputFormat::Tsv => compare_tsv(&out),
    };
    Ok(Output { text, warnings })
}

fn compare_text(out: &CompareOutput) -> String {
    let mut s = String::new();
    for f in &out.files {
        let _ = writeln!(s, "== {} vs {} ==", f.gold.display(), f.pred.display());
        for (i, m) in f.mappings.iter().enumerate() {
            let _ = writeln!(
                s,
                "sentence {}: {} mapped, unmapped gold ({}): {}, unmapped pred ({}): {}",
                i + 1,
                m.len(),
                m.unmapped_gold.len(),
                list(&m.unmapped_gold),
                m.unmapped_pred.len(),
                list(&m.unmapped_pred),
            );
        }
        s.push_str(&f.report.render_text());
        s.push('\n');
    }
    let _ = writeln!(s, "== aggregate over {} file pair(s) ==", out.files.len());
    s.push_str(&out.aggregate.render_text());
    s
}

fn list(vars: &[String]) -> String {
    if vars.is_empty() {
        "-".to_string()
    } else {
        vars.join(" ")
    }
}

fn compare_tsv(out: &CompareOutput) -> String {
    let mut s = format!("file\tsentence\t{TSV_HEADER}\n");
    for f in &out.files {
        let name = f.gold.display().to_string();
        for (i, r) in f.report.per_sentence.iter().enumerate() {
            let idx = (i + 1).to_string();
            for row in r.tsv_rows(&[&name, &idx]) {
                let _ = writeln!(s, "{row}");
            }
        }
        for row in f.report.tsv_rows(&[&name, "all"]) {
            let _ = writeln!(s, "{row}");
        }
    }
    for row in out.aggregate.tsv_rows(&["*", "all"]) {
        let _ = writeln!(s, "{row}");
    }
    s
}

#[derive(Serialize)]
struct FileStats {
    file: PathBuf,
    #[serde(flatten)]
    stats: CorpusStats,
}

#[derive(Serialize)]
struct StatsOutput {
    files: Vec<FileStats>,
    aggregate: CorpusStats,
}

/// Share of nodes with one decimal, e.g. `72.7%`.
fn share(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

pub fn stats(paths: &[PathBuf], format: OutputFormat) -> Result<Output> {
    let mut warnings = Vec::new();
    let mut files = Vec::with_capacity(paths.len());
    for p in paths {
        let doc = load(p, &mut warnings)?;
        files.push(FileStats {
            file: p.clone(),
            stats: corpus_stats([&doc]),
        });
    }
    let aggregate = files
        .iter()
        .fold(CorpusStats::default(), |acc, f| acc.combine(&f.stats));
    let out = StatsOutput { files, aggregate };

    let row = |name: &str, c: &CorpusStats, sep: &str| {
        [
            name.to_string(),
            c.total_nodes.to_string(),
            c.aligned.to_string(),
            c.unaligned.to_string(),
            share(c.aligned_pct),
            share(c.unaligned_pct),
        ]
        .join(sep)
    };
    let text = match format {
        OutputFormat::Json => to_json(&out)?,
        OutputFormat::Tsv | OutputFormat::Text => {
            let sep = if format == OutputFormat::Tsv {
                "\t"
            } else {
                "  "
            };
            let mut s = [
                "file",
                "nodes",
                "aligned",
                "unaligned",
                "aligned%",
                "unaligned%",
            ]
            .join(sep);
            s.push('\n');
            for f in &out.files {
                let _ = writeln!(s, "{}", row(&f.file.display().to_string(), &f.stats, sep));
            }
            let _ = writeln!(s, "{}", row("total", &out.aggregate, sep));
            s
        }
    };
    Ok(Output { text, warnings })
}

#[derive(Serialize)]
struct FileDiff {
    gold: PathBuf,
    pred: PathBuf,
    sentences: Vec<DiffReport>,
}

pub fn diff(
    pairs: &[(PathBuf, PathBuf)],
    options: &ScoreOptions,
    format: OutputFormat,
) -> Result<Output> {
    let mut warnings = Vec::new();
    let mut files = Vec::with_capacity(pairs.len());
    for (g, p) in pairs {
        let gold = load(g, &mut warnings)?;
        let pred = load(p, &mut warnings)?;
        let c = compare_documents(&gold, &pred, options)
            .with_context(|| format!("comparing {} with {}", g.display(), p.display()))?;
        warnings.extend(c.warnings.iter().map(|w| format!("{}: {w}", p.display())));
        let sentences = gold
            .sentences
            .iter()
            .zip(&pred.sentences)
            .zip(&c.mappings)
            .map(|((gs, ps), m)| render_diff(m, gs, ps))
            .collect();
        files.push(FileDiff {
            gold: g.clone(),
            pred: p.clone(),
            sentences,
        });
    }
    let text = match format {
        OutputFormat::Json => to_json(&files)?,
        OutputFormat::Tsv => diff_tsv(&files),
        OutputFormat::Text => {
            let mut s = String::new();
            for f in &files {
                let _ = writeln!(s, "== {} vs {} ==", f.gold.display(), f.pred.display());
                for d in &f.sentences {
                    s.push_str(&d.render_text());
                }
            }
            s
        }
    };
    Ok(Output { text, warnings })
}

/// One row per mapping line and per unmatched triple.
fn diff_tsv(files: &[FileDiff]) -> String {
    let mut s = String::from("file\tsentence\tkind\tgold\tpred\n");
    for f in files {
        let name = f.gold.display().to_string();
        for d in &f.sentences {
            for l in &d.lines {
                let var = |x: &Option<umr_compare::metrics::NodeLabel>| {
                    x.as_ref().map_or("UNMAPPED".to_string(), |n| n.var.clone())
                };
                let _ = writeln!(
                    s,
                    "{name}\t{}\tpair\t{}\t{}",
                    d.sentence,
                    var(&l.gold),
                    var(&l.pred)
                );
            }
            for m in &d.mismatches {
                let t = format!(
                    "({} :{} {})",
                    m.triple.source,
                    m.triple.label,
                    m.triple.target.text()
                );
                let (g, p) = match m.side {
                    Side::GoldOnly => (t, String::new()),
                    Side::PredOnly => (String::new(), t),
                };
                let _ = writeln!(s, "{name}\t{}\tmismatch\t{g}\t{p}", d.sentence);
            }
        }
    }
    s
}
