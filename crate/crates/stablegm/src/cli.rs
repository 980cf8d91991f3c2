//! Command-line front end.
//!
//! Every verb echoes its resolved settings into the header of its output, so a
//! run is reproducible from the output alone. `--threads` only changes how
//! work items are scheduled, never the results.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use stablegm_core::pipelines::{
    bootstrap, crossval_with, normalize_expression, run_benchmark_with, sgex_with, BenchmarkSpec,
};
use stablegm_core::scoring::{lflom_report, s_mdc, s_ols};
use stablegm_core::search::stable_learn_with;
use stablegm_core::{model::symmetrize, ScoreKind, ScoreReport, SearchConfig};

use crate::error::{Error, Result};
use crate::exec::Parallel;
use crate::format::{self, fmt_f64, Header};

#[derive(Debug, Parser)]
#[command(name = "stablegm", version, about = "Alpha-stable graphical models: simulate, learn, score, evaluate")]
struct Cli {
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw samples from a model.
    Sample(SampleArgs),
    /// Estimate alpha, theta and gamma per column with bootstrap spread.
    Estimate(EstimateArgs),
    /// Learn a model from data.
    Learn(LearnArgs),
    /// Score a model against data.
    Score(ScoreArgs),
    /// Simulated structure-recovery benchmark on a fixed topology.
    Benchmark(BenchmarkArgs),
    /// k-fold cross-validation against the independence model.
    Crossval(CrossvalArgs),
    /// Differential dispersion of each held-out group.
    Sgex(SgexArgs),
    /// Median-center log intensities and keep the most variable columns.
    Normalize(NormalizeArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SearchScore {
    Mdc,
    Ols,
}

impl From<SearchScore> for ScoreKind {
    fn from(s: SearchScore) -> Self {
        match s {
            SearchScore::Mdc => ScoreKind::Mdc,
            SearchScore::Ols => ScoreKind::Ols,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ReportScore {
    Mdc,
    Ols,
    Lflom,
}

#[derive(Debug, Args, Serialize)]
struct SearchArgs {
    #[arg(long, value_enum, default_value = "mdc")]
    score: SearchScore,
    #[arg(long, default_value_t = 10)]
    restarts: usize,
    #[arg(long)]
    max_parents: Option<usize>,
    /// Search exponent is alpha_hat / this.
    #[arg(long, default_value_t = 1.01)]
    p_divisor: f64,
    /// Reported gamma uses exponent alpha_hat / this.
    #[arg(long, default_value_t = 10.0)]
    report_divisor: f64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        SearchConfig {
            n_restarts: self.restarts,
            max_parents: self.max_parents,
            irls_p_divisor: self.p_divisor,
            report_p_divisor: self.report_divisor,
            tolerance: self.tolerance,
            seed: self.seed,
            score_kind: self.score.into(),
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct SampleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV (default: stdout).
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EstimateArgs {
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated column names (default: all).
    #[arg(long, value_delimiter = ',')]
    columns: Option<Vec<String>>,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(1..))]
    bootstrap: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Gamma uses exponent alpha_hat / this.
    #[arg(long, default_value_t = 10.0)]
    p_divisor: f64,
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct LearnArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    /// Output model JSON (default: stdout).
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    /// Per-restart scores as TSV.
    #[arg(long)]
    #[serde(skip)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ScoreArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "mdc")]
    kind: ReportScore,
    /// Exponent is the model alpha / this (mdc, lflom).
    #[arg(long, default_value_t = 1.01)]
    p_divisor: f64,
    /// Score mdc/ols on the data as given instead of pairwise differences.
    #[arg(long)]
    raw: bool,
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct BenchmarkArgs {
    /// Edge list, one `parent,child` per line.
    #[arg(long)]
    topology: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.9)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Weights are drawn uniformly from [-rho, rho].
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    replicates: usize,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    /// Summary TSV (default: stdout).
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
    /// Confidence curve as CSV.
    #[arg(long)]
    #[serde(skip)]
    curve: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct CrossvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SgexArgs {
    #[arg(long)]
    data: PathBuf,
    /// One group label per data row.
    #[arg(long)]
    groups: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    search: SearchArgs,
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct NormalizeArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    top_k: usize,
    #[arg(short, long)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the verb and returns the exit
/// status: 0 on success, 1 on runtime errors, 2 on usage errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let exec = Parallel::new(cli.threads)?;
    match cli.command {
        Command::Sample(a) => sample(&a, out),
        Command::Estimate(a) => estimate(&a, &exec, out),
        Command::Learn(a) => learn(&a, &exec, out),
        Command::Score(a) => score(&a, out),
        Command::Benchmark(a) => benchmark(&a, &exec, out),
        Command::Crossval(a) => crossval(&a, &exec, out),
        Command::Sgex(a) => sgex(&a, &exec, out),
        Command::Normalize(a) => normalize(&a, out),
    }
}

fn emit(path: Option<&Path>, contents: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => format::write_file(p, contents),
        None => out
            .write_all(contents.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|source| Error::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn sample(a: &SampleArgs, out: &mut dyn Write) -> Result<()> {
    let model = format::read_model(&a.model)?;
    let data = model.simulate(a.n, a.seed)?;
    let header = Header::from_settings("sample", a);
    emit(a.output.as_deref(), &format::render_data(&data, &header), out)
}

fn estimate(a: &EstimateArgs, exec: &Parallel, out: &mut dyn Write) -> Result<()> {
    let data = format::read_data(&a.data)?;
    let columns: Vec<usize> = match &a.columns {
        Some(names) => names
            .iter()
            .map(|n| data.index_of(n).ok_or_else(|| stablegm_core::Error::MissingVariable(n.clone())))
            .collect::<std::result::Result<_, _>>()?,
        None => (0..data.n_cols()).collect(),
    };
    let mut rows = Vec::with_capacity(columns.len());
    for j in columns {
        let s = bootstrap(data.column(j), a.bootstrap as usize, a.seed, a.p_divisor, exec)?;
        rows.push(vec![
            data.names()[j].clone(),
            fmt_f64(s.point.alpha),
            fmt_f64(s.alpha.0),
            fmt_f64(s.alpha.1),
            fmt_f64(s.point.theta),
            fmt_f64(s.theta.0),
            fmt_f64(s.theta.1),
            fmt_f64(s.point.gamma),
            fmt_f64(s.gamma.0),
            fmt_f64(s.gamma.1),
        ]);
    }
    let cols = [
        "variable",
        "alpha",
        "alpha_boot_mean",
        "alpha_boot_sd",
        "theta",
        "theta_boot_mean",
        "theta_boot_sd",
        "gamma",
        "gamma_boot_mean",
        "gamma_boot_sd",
    ];
    let header = Header::from_settings("estimate", a);
    emit(a.output.as_deref(), &format::render_table(&header, &cols, &rows), out)
}

fn learn(a: &LearnArgs, exec: &Parallel, out: &mut dyn Write) -> Result<()> {
    let data = format::read_data(&a.data)?;
    let config = a.search.config();
    let (model, trace) = stable_learn_with(&data, &config, exec)?;
    let header = Header::from_settings("learn", a);
    let mut provenance = header.to_json();
    provenance["result"] = json!({
        "score": trace.best_score(),
        "alpha_hat": trace.alpha_hat,
        "p_used": trace.p_used,
        "best_restart": trace.best_restart,
        "edges": model.dag.n_edges(),
    });
    if let Some(path) = &a.trace {
        let rows: Vec<Vec<String>> = trace
            .restart_scores
            .iter()
            .enumerate()
            .map(|(r, s)| vec![r.to_string(), fmt_f64(*s), u8::from(r == trace.best_restart).to_string()])
            .collect();
        format::write_file(path, &format::render_table(&header, &["restart", "score", "best"], &rows))?;
    }
    emit(a.output.as_deref(), &format::render_model(&model, Some(provenance)), out)
}

fn score(a: &ScoreArgs, out: &mut dyn Write) -> Result<()> {
    let model = format::read_model(&a.model)?;
    let data = format::read_data(&a.data)?;
    let p = model.alpha / a.p_divisor;
    let report = match a.kind {
        ReportScore::Lflom => lflom_report(&model, &data, p)?,
        kind => {
            let data = if a.raw { data } else { symmetrize(&data)? };
            match kind {
                ReportScore::Mdc => s_mdc(&model, &data, p)?,
                _ => s_ols(&model, &data)?,
            }
        }
    };
    let header = Header::from_settings("score", a);
    emit(a.output.as_deref(), &render_score(&model, &report, &header), out)
}

fn render_score(model: &stablegm_core::SGModel, report: &ScoreReport, header: &Header) -> String {
    let names = model.names();
    let mut rows: Vec<Vec<String>> = report
        .per_family
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let parents: Vec<&str> = model.dag.parents(j).iter().map(|&p| names[p].as_str()).collect();
            vec![
                names[j].clone(),
                parents.join(";"),
                fmt_f64(t.dispersion_term),
                fmt_f64(t.penalty_term),
                fmt_f64(t.value()),
            ]
        })
        .collect();
    rows.push(vec![
        "total".into(),
        String::new(),
        fmt_f64(report.per_family.iter().map(|t| t.dispersion_term).sum()),
        fmt_f64(report.per_family.iter().map(|t| t.penalty_term).sum()),
        fmt_f64(report.total),
    ]);
    let mut text =
        format::render_table(header, &["node", "parents", "dispersion_term", "penalty_term", "family_score"], &rows);
    text.push_str(&format!("# p_used = {}\n# n = {}\n", fmt_f64(report.p_used), report.n));
    text
}

fn benchmark(a: &BenchmarkArgs, exec: &Parallel, out: &mut dyn Write) -> Result<()> {
    let topology = format::read_topology(&a.topology)?;
    let spec = BenchmarkSpec {
        beta: a.beta,
        gamma: a.gamma,
        rho: a.rho,
        n_samples: a.n,
        n_replicates: a.replicates,
        seed: a.search.seed,
        ..BenchmarkSpec::new(topology, a.alpha)
    };
    let report = run_benchmark_with(&spec, &a.search.config(), exec)?;
    let header = Header::from_settings("benchmark", a);

    let at50 = 50;
    let metrics: Vec<(&str, String)> = vec![
        ("score", report.score_kind.to_string()),
        ("replicates", report.n_replicates.to_string()),
        ("true_edges", report.n_true_edges.to_string()),
        ("mean_tp", fmt_f64(report.mean_tp)),
        ("mean_fp", fmt_f64(report.mean_fp)),
        ("mean_skeleton_tp", fmt_f64(report.mean_skeleton_tp)),
        ("tp_at_50", report.tp_at_confidence[at50].to_string()),
        ("fp_at_50", report.fp_at_confidence[at50].to_string()),
        ("skeleton_tp_at_50", report.skeleton_tp_at_confidence[at50].to_string()),
        ("skeleton_fp_at_50", report.skeleton_fp_at_confidence[at50].to_string()),
        ("weight_bias", fmt_f64(report.weight_bias)),
        ("weight_sd", fmt_f64(report.weight_std)),
        ("alpha_mean", fmt_f64(report.alpha_stats.0)),
        ("alpha_sd", fmt_f64(report.alpha_stats.1)),
        ("theta_true", fmt_f64(report.theta_true)),
        ("theta_mean", fmt_f64(report.theta_stats.0)),
        ("theta_sd", fmt_f64(report.theta_stats.1)),
        ("log_gamma_mean", fmt_f64(report.log_gamma_stats.0)),
        ("log_gamma_sd", fmt_f64(report.log_gamma_stats.1)),
        ("log_gamma_symmetrized_mean", fmt_f64(report.log_gamma_symmetrized_stats.0)),
        ("log_gamma_symmetrized_sd", fmt_f64(report.log_gamma_symmetrized_stats.1)),
    ];
    let rows: Vec<Vec<String>> = metrics.into_iter().map(|(k, v)| vec![k.to_string(), v]).collect();
    if let Some(path) = &a.curve {
        let mut text = header.render();
        text.push_str("confidence,tp,fp,skeleton_tp,skeleton_fp\n");
        for t in 0..report.tp_at_confidence.len() {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f64(t as f64 / 100.0),
                report.tp_at_confidence[t],
                report.fp_at_confidence[t],
                report.skeleton_tp_at_confidence[t],
                report.skeleton_fp_at_confidence[t]
            ));
        }
        format::write_file(path, &text)?;
    }
    emit(a.output.as_deref(), &format::render_table(&header, &["metric", "value"], &rows), out)
}

fn crossval(a: &CrossvalArgs, exec: &Parallel, out: &mut dyn Write) -> Result<()> {
    let data = format::read_data(&a.data)?;
    let report = crossval_with(&data, a.folds, &a.search.config(), exec)?;
    let diffs = report.differences();
    let rows: Vec<Vec<String>> = (0..diffs.len())
        .map(|f| {
            vec![
                f.to_string(),
                report.fold_sizes[f].to_string(),
                fmt_f64(report.fold_alpha[f]),
                report.fold_edges[f].to_string(),
                fmt_f64(report.fold_lflom_model[f]),
                fmt_f64(report.fold_lflom_null[f]),
                fmt_f64(diffs[f]),
            ]
        })
        .collect();
    let header = Header::from_settings("crossval", a);
    let mut text = format::render_table(
        &header,
        &["fold", "n_test", "alpha_hat", "edges", "lflom_model", "lflom_null", "difference"],
        &rows,
    );
    let better = diffs.iter().filter(|d| **d < 0.0).count();
    text.push_str(&format!("# folds_model_better = {better}\n"));
    emit(a.output.as_deref(), &text, out)
}

fn sgex(a: &SgexArgs, exec: &Parallel, out: &mut dyn Write) -> Result<()> {
    let data = format::read_data(&a.data)?;
    let labels = format::read_labels(&a.groups)?;
    let de = sgex_with(&data, &labels, &a.search.config(), exec)?;
    let mut cols = vec!["group", "alpha_hat", "p_used"];
    cols.extend(de.variables.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = de
        .groups
        .iter()
        .enumerate()
        .map(|(g, name)| {
            let mut row = vec![name.clone(), fmt_f64(de.alpha[g]), fmt_f64(de.p_used[g])];
            row.extend(de.delta_ld[g].iter().map(|v| fmt_f64(*v)));
            row
        })
        .collect();
    let header = Header::from_settings("sgex", a);
    emit(a.output.as_deref(), &format::render_table(&header, &cols, &rows), out)
}

fn normalize(a: &NormalizeArgs, out: &mut dyn Write) -> Result<()> {
    let data = format::read_data(&a.data)?;
    let normalized = normalize_expression(&data, a.top_k)?;
    let header = Header::from_settings("normalize", a);
    emit(a.output.as_deref(), &format::render_data(&normalized, &header), out)
}
