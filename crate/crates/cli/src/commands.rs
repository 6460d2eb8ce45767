use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use i3_core::dynamics::DynamicsReport;
use i3_core::ranking::{MatthewSummary, PercentileTable};
use i3_core::{
    compute_beta, curve_points, dynamics_report, generate, matthew_comparison, percentile_table,
    rank, score_all, score_article, solve_beta, Beta, Catalog, CatalogStats, DynamicsError,
    FScore, GeneratorConfig, Ledger, ScoreError, ScoreReport, ScoringOptions,
};
use serde::Serialize;

use crate::format::{fixed6, optional_ratio, sig9};
use crate::{Cli, CliError, Command, GlobalArgs, OutputFormat};

type CmdResult = Result<(), CliError>;

impl From<ScoreError> for CliError {
    fn from(e: ScoreError) -> Self {
        if e.is_resolution() {
            CliError::Resolution(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Score(e) => e.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Input(format!("writing output: {e}"))
}

/// Inputs resolved from the global flags.
struct RunConfig {
    catalog: Catalog,
    ledger: Option<Ledger>,
    options: ScoringOptions,
    format: OutputFormat,
}

fn open(flag: &str, path: Option<&PathBuf>) -> Result<BufReader<File>, CliError> {
    let path = path.ok_or_else(|| CliError::Input(format!("--{flag} is required")))?;
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

impl RunConfig {
    fn load(global: &GlobalArgs, with_ledger: bool) -> Result<Self, CliError> {
        if let Some(x) = global.fallback_if {
            if !(x.is_finite() && x >= 0.0) {
                return Err(CliError::Input(format!(
                    "--fallback-if must be a non-negative number, got {x}"
                )));
            }
        }
        // open everything before parsing anything
        let catalog_file = open("catalog", global.catalog.as_ref())?;
        let ledger_files = if with_ledger {
            Some((
                open("articles", global.articles.as_ref())?,
                open("citations", global.citations.as_ref())?,
            ))
        } else {
            None
        };
        let catalog = Catalog::load(catalog_file).map_err(input)?;
        let ledger = ledger_files
            .map(|(a, c)| Ledger::load(a, c).map_err(input))
            .transpose()?;
        Ok(Self {
            catalog,
            ledger,
            options: ScoringOptions {
                if_mode: global.if_mode.into(),
                fallback_if: global.fallback_if,
            },
            format: global.format,
        })
    }

    fn ledger(&self) -> &Ledger {
        self.ledger.as_ref().expect("loaded with ledger")
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let global = &cli.global;
    match &cli.command {
        Command::Score { ids, all, as_of } => {
            let config = RunConfig::load(global, true)?;
            cmd_score(&config, ids, *all, *as_of, out)
        }
        Command::Rank {
            as_of,
            matthew,
            percentiles,
        } => {
            let config = RunConfig::load(global, true)?;
            cmd_rank(&config, *as_of, *matthew, percentiles.as_deref(), out)
        }
        Command::Dynamics { article_id, years } => {
            let config = RunConfig::load(global, true)?;
            cmd_dynamics(&config, article_id, years, out)
        }
        Command::Calibrate { target, fscore, phi } => {
            cmd_calibrate(global.format, *target, *fscore, *phi, out)
        }
        Command::Curves {
            beta,
            max_f,
            samples,
        } => cmd_curves(global.format, beta, *max_f, *samples, out),
        Command::Gen {
            articles,
            categories,
            seed,
            out: dir,
        } => cmd_gen(*articles, *categories, *seed, dir, out),
        Command::CatalogStats => {
            let config = RunConfig::load(global, false)?;
            cmd_catalog_stats(&config, out)
        }
    }
}

const REPORT_HEADER: [&str; 9] = [
    "article_id",
    "category",
    "phi",
    "beta",
    "f_score",
    "i3",
    "citations",
    "rank_i3",
    "rank_citations",
];

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> CmdResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(input)?;
    writeln!(out).map_err(io_err)
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new().flexible(true).from_writer(out)
}

/// Separates CSV sections with an empty line.
fn blank_line(w: csv::Writer<&mut dyn Write>) -> Result<csv::Writer<&mut dyn Write>, CliError> {
    let out = w.into_inner().map_err(|e| io_err(e.into_error()))?;
    out.write_all(b"\n").map_err(io_err)?;
    Ok(csv_writer(out))
}

fn write_reports_csv(w: &mut csv::Writer<&mut dyn Write>, reports: &[ScoreReport]) -> CmdResult {
    w.write_record(REPORT_HEADER).map_err(input)?;
    for r in reports {
        w.write_record([
            r.article_id.clone(),
            r.category.clone(),
            r.phi.to_string(),
            sig9(r.beta),
            fixed6(r.f_score),
            fixed6(r.i3),
            r.citation_count.to_string(),
            r.rank_i3.to_string(),
            r.rank_citations.to_string(),
        ])
        .map_err(input)?;
    }
    Ok(())
}

fn cmd_score(
    config: &RunConfig,
    ids: &[String],
    all: bool,
    as_of: Option<u32>,
    out: &mut dyn Write,
) -> CmdResult {
    let ledger = config.ledger();
    if !all && ids.is_empty() {
        return Err(CliError::Input("give article ids or --all".into()));
    }
    let scored = if all {
        score_all(ledger, &config.catalog, as_of, config.options)?
    } else {
        let mut seen = std::collections::HashSet::new();
        ids.iter()
            .filter(|id| seen.insert(id.as_str()))
            .map(|id| score_article(ledger, &config.catalog, id, as_of, config.options))
            .collect::<Result<Vec<_>, _>>()?
    };
    let order: Vec<String> = scored.iter().map(|s| s.article_id.clone()).collect();
    let mut by_id: HashMap<String, ScoreReport> = rank(scored)
        .into_iter()
        .map(|r| (r.article_id.clone(), r))
        .collect();
    let reports: Vec<ScoreReport> = order.iter().filter_map(|id| by_id.remove(id)).collect();

    match config.format {
        OutputFormat::Json => write_json(out, &reports),
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            write_reports_csv(&mut w, &reports)?;
            w.flush().map_err(io_err)
        }
    }
}

#[derive(Serialize)]
struct RankWithMatthew<'a> {
    ranking: &'a [ScoreReport],
    matthew: MatthewSummary,
}

fn cmd_rank(
    config: &RunConfig,
    as_of: Option<u32>,
    matthew: bool,
    percentiles: Option<&str>,
    out: &mut dyn Write,
) -> CmdResult {
    let reports = rank(score_all(config.ledger(), &config.catalog, as_of, config.options)?);
    if let Some(category) = percentiles {
        let table = percentile_table(&reports, category).map_err(input)?;
        return write_percentiles(config.format, &table, out);
    }
    let summary = if matthew {
        Some(matthew_comparison(&reports).map_err(input)?)
    } else {
        None
    };

    match config.format {
        OutputFormat::Json => match summary {
            Some(matthew) => write_json(
                out,
                &RankWithMatthew {
                    ranking: &reports,
                    matthew,
                },
            ),
            None => write_json(out, &reports),
        },
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            write_reports_csv(&mut w, &reports)?;
            if let Some(s) = summary {
                w = blank_line(w)?;
                w.write_record(["article_id", "rank_i3", "rank_citations", "shift"])
                    .map_err(input)?;
                for d in &s.displacements {
                    w.write_record([
                        d.article_id.clone(),
                        d.rank_i3.to_string(),
                        d.rank_citations.to_string(),
                        d.shift.to_string(),
                    ])
                    .map_err(input)?;
                }
                w = blank_line(w)?;
                w.write_record(["articles", "promoted", "divergence"]).map_err(input)?;
                w.write_record([
                    s.displacements.len().to_string(),
                    s.promoted.to_string(),
                    s.divergence.to_string(),
                ])
                .map_err(input)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

fn write_percentiles(format: OutputFormat, table: &PercentileTable, out: &mut dyn Write) -> CmdResult {
    match format {
        OutputFormat::Json => write_json(out, table),
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["category", "sample_size", "percentile", "i3"]).map_err(input)?;
            for t in &table.thresholds {
                w.write_record([
                    table.category.clone(),
                    table.sample_size.to_string(),
                    t.percentile.to_string(),
                    fixed6(t.i3),
                ])
                .map_err(input)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

#[derive(Serialize)]
struct DynamicsJson<'a> {
    #[serde(flatten)]
    report: &'a DynamicsReport,
    flagged_years: Vec<u32>,
}

fn cmd_dynamics(config: &RunConfig, article_id: &str, years: &[u32], out: &mut dyn Write) -> CmdResult {
    let report = dynamics_report(config.ledger(), &config.catalog, article_id, years, config.options)?;
    let flagged: Vec<u32> = report
        .series
        .iter()
        .filter(|r| r.exceeds_one())
        .map(|r| r.years)
        .collect();
    if !flagged.is_empty() {
        eprintln!(
            "warning: citation ratio above 1 at years {flagged:?} (impact factors declined since citation)"
        );
    }
    match config.format {
        OutputFormat::Json => write_json(
            out,
            &DynamicsJson {
                report: &report,
                flagged_years: flagged,
            },
        ),
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "article_id",
                "beta",
                "years",
                "f_t",
                "i3_t",
                "cr_simple",
                "cr_integral",
                "exceeds_one",
                "f_full",
                "i3_full",
                "auc_full",
                "derivative_at_full",
            ])
            .map_err(input)?;
            for row in &report.series {
                w.write_record([
                    report.article_id.clone(),
                    sig9(report.beta.value()),
                    row.years.to_string(),
                    fixed6(row.f_t.value()),
                    fixed6(row.i3_t.value()),
                    optional_ratio(row.cr_simple),
                    optional_ratio(row.cr_integral),
                    row.exceeds_one().to_string(),
                    fixed6(report.f_full.value()),
                    fixed6(report.i3_full.value()),
                    fixed6(report.auc_full),
                    sig9(report.derivative_at_full),
                ])
                .map_err(input)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

#[derive(Serialize)]
struct CalibrationJson {
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fscore: Option<f64>,
}

fn cmd_calibrate(
    format: OutputFormat,
    target: Option<f64>,
    fscore: Option<f64>,
    phi: Option<u64>,
    out: &mut dyn Write,
) -> CmdResult {
    let beta: Beta = match (target, fscore, phi) {
        (Some(p), Some(f), None) => solve_beta(p, FScore::new(f).map_err(input)?).map_err(input)?,
        (None, None, Some(n)) => compute_beta(n).map_err(input)?,
        _ => return Err(CliError::Input("use either --target with --fscore, or --phi".into())),
    };
    match format {
        OutputFormat::Json => write_json(
            out,
            &CalibrationJson {
                beta: beta.value(),
                phi,
                target,
                fscore,
            },
        ),
        OutputFormat::Csv => writeln!(out, "{}", sig9(beta.value())).map_err(io_err),
    }
}

#[derive(Serialize)]
struct CurveJson {
    beta: f64,
    points: Vec<(f64, f64)>,
}

fn cmd_curves(format: OutputFormat, betas: &[f64], max_f: f64, samples: usize, out: &mut dyn Write) -> CmdResult {
    let curves = betas
        .iter()
        .map(|&b| {
            let beta = Beta::new(b).map_err(input)?;
            Ok(CurveJson {
                beta: b,
                points: curve_points(beta, max_f, samples).map_err(input)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    match format {
        OutputFormat::Json => write_json(out, &curves),
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            let header: Vec<String> = curves
                .iter()
                .flat_map(|c| {
                    let b = sig9(c.beta);
                    [format!("f_{b}"), format!("i3_{b}")]
                })
                .collect();
            w.write_record(&header).map_err(input)?;
            for i in 0..samples {
                let row: Vec<String> = curves
                    .iter()
                    .flat_map(|c| [fixed6(c.points[i].0), fixed6(c.points[i].1)])
                    .collect();
                w.write_record(&row).map_err(input)?;
            }
            w.flush().map_err(io_err)
        }
    }
}

fn cmd_gen(articles: usize, categories: usize, seed: u64, dir: &Path, out: &mut dyn Write) -> CmdResult {
    let corpus = generate(&GeneratorConfig::new(articles, categories, seed)).map_err(input)?;
    corpus.write_to(dir).map_err(input)?;
    for name in [
        i3_core::synth::CATALOG_FILE,
        i3_core::synth::ARTICLES_FILE,
        i3_core::synth::CITATIONS_FILE,
    ] {
        writeln!(out, "{}", dir.join(name).display()).map_err(io_err)?;
    }
    Ok(())
}

fn cmd_catalog_stats(config: &RunConfig, out: &mut dyn Write) -> CmdResult {
    let stats: CatalogStats = config.catalog.stats().map_err(input)?;
    match config.format {
        OutputFormat::Json => write_json(out, &stats),
        OutputFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["category", "phi", "beta", "mean_if"]).map_err(input)?;
            for c in &stats.categories {
                w.write_record([c.category.clone(), c.phi.to_string(), sig9(c.beta), fixed6(c.mean_if)])
                    .map_err(input)?;
            }
            w = blank_line(w)?;
            w.write_record(["categories", "journals", "mean_phi", "mean_if"]).map_err(input)?;
            w.write_record([
                stats.categories.len().to_string(),
                stats.journal_count.to_string(),
                fixed6(stats.mean_phi),
                fixed6(stats.mean_if),
            ])
            .map_err(input)?;
            w.flush().map_err(io_err)
        }
    }
}
