//! The `pbr` command-line tool.
//!
//! Human-readable tables go to standard output; machine-readable results are
//! written only to the file given by `--out` (`.json` or `.csv`).
//! Exit status: 0 on success, 1 on usage errors, 2 on data errors.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pbr_core::dataio::{self, SynthParams};
use pbr_core::distances::evaluate_slices;
use pbr_core::harness::{self, BenchmarkConfig, GridSpec};
use pbr_core::stats::{self, TestKind, DEFAULT_ALPHAS, DEFAULT_AUDIT_PAIRS};
use pbr_core::svm::{self, ModelDocument, SmoConfig};
use pbr_core::{check_pd, gram, Dataset, FeatureVector, GramMatrix, KernelFamily, KernelSpec, MeasureId};

/// Exit status for successful runs.
pub const EXIT_OK: i32 = 0;
/// Exit status for malformed command lines and inconsistent flags.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for unreadable or invalid data and failed computations.
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pbr",
    version,
    about = "Histogram distances, distance-RBF kernels and SVM benchmarks"
)]
struct Cli {
    /// Number of worker threads (default: one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Distance between two vectors, or between every row of two feature files.
    Dist(DistArgs),
    /// Build a kernel matrix, optionally auditing positive definiteness.
    Gram(GramArgs),
    /// Train a one-vs-rest SVM on a feature file and save the model as JSON.
    SvmTrain(TrainArgs),
    /// Predict classes of a feature file with a saved model.
    SvmPredict(PredictArgs),
    /// Two-sample Kolmogorov-Smirnov test on the two columns of a CSV file.
    Ks(TwoColumnArgs),
    /// Paired Wilcoxon signed-rank test on the two columns of a CSV file.
    Wilcoxon(TwoColumnArgs),
    /// Test whether feature columns share a distribution, over many column pairs.
    Audit(AuditArgs),
    /// Repeated train/test benchmark with cross-validated hyperparameters.
    Bench(BenchArgs),
    /// Distances between the three toy histograms under every measure.
    Toy(OutArgs),
    /// Generate a labelled synthetic histogram dataset.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write machine-readable results to this .json or .csv file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DistArgs {
    #[arg(long, default_value = "pbr")]
    measure: MeasureId,
    /// Use the values as given instead of L1-normalizing them.
    #[arg(long)]
    raw: bool,
    /// Feature file (.csv or .bin) or comma-separated vector.
    a: String,
    /// Feature file (.csv or .bin) or comma-separated vector.
    b: String,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelKind {
    /// exp(-gamma * D) for the distance chosen by --measure.
    Rbf,
    Linear,
    /// (x.y + 1)^degree
    Poly,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[arg(long, value_enum, default_value = "rbf")]
    kernel: KernelKind,
    /// Distance inside the RBF kernel.
    #[arg(long, default_value = "pbr")]
    measure: MeasureId,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Degree of the polynomial kernel (1 to 5).
    #[arg(long, default_value_t = 2)]
    degree: u32,
}

impl KernelArgs {
    fn spec(&self) -> anyhow::Result<KernelSpec> {
        let spec = match self.kernel {
            KernelKind::Rbf => KernelSpec::d_rbf(self.measure, self.gamma),
            KernelKind::Linear => Ok(KernelSpec::linear()),
            KernelKind::Poly => KernelSpec::polynomial(self.degree),
        };
        spec.map_err(|e| usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
struct GramArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Feature file whose rows index the matrix rows.
    input: PathBuf,
    /// Feature file for the matrix columns (default: the input itself).
    #[arg(long)]
    cols: Option<PathBuf>,
    /// Report whether the matrix is positive definite (square matrices only).
    #[arg(long)]
    pd_audit: bool,
    #[arg(long)]
    raw: bool,
    /// Output file: .bin (binary matrix), .json or .csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    /// Stopping tolerance on the maximal KKT violation.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long)]
    raw: bool,
    /// Training feature file.
    train: PathBuf,
    /// Model file (.json).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Model file written by svm-train.
    #[arg(long)]
    model: PathBuf,
    /// The feature file the model was trained on.
    #[arg(long)]
    train: PathBuf,
    /// Feature file to classify; labels, when known, are used to report accuracy.
    test: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct TwoColumnArgs {
    /// CSV with a header and two numeric columns; empty cells are skipped.
    input: PathBuf,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Feature file; each feature column is one sample of its element's distribution.
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_AUDIT_PAIRS)]
    pairs: usize,
    #[arg(long, default_value = "ks")]
    test: TestKind,
    /// Significance level, before Bonferroni correction (repeatable).
    #[arg(long)]
    alpha: Vec<f64>,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Labelled feature file.
    input: PathBuf,
    /// Comma-separated methods: linear, poly, or any distance measure.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "pbr,bd,jd,chi2,hellinger,hi,l1,l2,l1brd"
    )]
    methods: Vec<KernelFamily>,
    /// Method the others are compared with.
    #[arg(long, default_value = "pbr")]
    baseline: String,
    #[arg(long)]
    train_per_class: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long)]
    seed: u64,
    /// Comma-separated log2 C grid (default -2,0,...,16).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    log2_c: Option<Vec<i32>>,
    /// Comma-separated log2 gamma grid (default -4,-2,...,8).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    log2_gamma: Option<Vec<i32>>,
    /// Comma-separated polynomial degrees (default 1,...,5).
    #[arg(long, value_delimiter = ',')]
    degrees: Option<Vec<u32>>,
    #[arg(long)]
    raw: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 32)]
    dims: usize,
    #[arg(long, default_value_t = 60)]
    per_class: usize,
    #[arg(long, default_value_t = 20.0)]
    concentration: f64,
    #[arg(long, default_value_t = 1.0)]
    separation: f64,
    #[arg(long)]
    seed: u64,
    /// Output feature file (.csv or .bin).
    #[arg(long)]
    out: PathBuf,
}

/// A command line that parsed but cannot be acted on.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        pool = pool.num_threads(usize::from(n));
    }
    let result = match pool.build() {
        Ok(pool) => pool.install(|| dispatch(cli.command)),
        Err(e) => Err(anyhow!(e)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}

fn dispatch(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Dist(a) => dist(a),
        Command::Gram(a) => gram_cmd(a),
        Command::SvmTrain(a) => svm_train(a),
        Command::SvmPredict(a) => svm_predict(a),
        Command::Ks(a) => two_sample(a, TestKind::Ks),
        Command::Wilcoxon(a) => two_sample(a, TestKind::Wilcoxon),
        Command::Audit(a) => audit(a),
        Command::Bench(a) => bench(a),
        Command::Toy(a) => toy(a),
        Command::Synth(a) => synth(a),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutFormat {
    Json,
    Csv,
}

fn out_format(path: &Path) -> anyhow::Result<OutFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(OutFormat::Json),
        Some("csv") => Ok(OutFormat::Csv),
        _ => Err(usage(format!("--out must end in .json or .csv: {}", path.display()))),
    }
}

fn checked_out(out: &OutArgs) -> anyhow::Result<Option<(PathBuf, OutFormat)>> {
    out.out
        .as_ref()
        .map(|p| out_format(p).map(|f| (p.clone(), f)))
        .transpose()
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit<T: Serialize>(out: Option<(PathBuf, OutFormat)>, json: &T, csv: impl FnOnce() -> String) -> anyhow::Result<()> {
    match out {
        Some((path, OutFormat::Json)) => write_json(&path, json),
        Some((path, OutFormat::Csv)) => write_text(&path, &csv()),
        None => Ok(()),
    }
}

fn load(path: &Path, raw: bool) -> anyhow::Result<Dataset> {
    let ds = dataio::load_any(path).with_context(|| format!("reading {}", path.display()))?;
    if raw {
        Ok(ds)
    } else {
        Ok(ds.normalized()?)
    }
}

fn parse_vectors(arg: &str, raw: bool) -> anyhow::Result<Vec<FeatureVector>> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(load(path, raw)?.vectors().to_vec());
    }
    let values = arg
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| usage(format!("'{arg}' is neither a file nor a comma-separated vector")))?;
    let v = FeatureVector::new(values)?;
    Ok(vec![if raw { v } else { v.normalize()? }])
}

fn json_number(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize)]
struct DistOutput {
    measure: MeasureId,
    normalized: bool,
    rows: usize,
    cols: usize,
    /// `null` where the distance is undefined (Bhattacharyya on disjoint supports).
    values: Vec<Vec<Option<f64>>>,
}

fn dist(a: DistArgs) -> anyhow::Result<()> {
    let out = checked_out(&a.out)?;
    let xs = parse_vectors(&a.a, a.raw)?;
    let ys = parse_vectors(&a.b, a.raw)?;
    let mut values = Vec::with_capacity(xs.len());
    for (i, x) in xs.iter().enumerate() {
        let row = ys
            .iter()
            .enumerate()
            .map(|(j, y)| {
                evaluate_slices(a.measure, x.values(), y.values()).with_context(|| format!("row {i}, column {j}"))
            })
            .collect::<anyhow::Result<Vec<f64>>>()?;
        values.push(row);
    }
    if values.len() == 1 && values[0].len() == 1 {
        println!("{} = {}", a.measure, values[0][0]);
    } else {
        println!("{} distances ({} x {})", a.measure, xs.len(), ys.len());
        for row in &values {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            println!("{}", cells.join("  "));
        }
    }
    let doc = DistOutput {
        measure: a.measure,
        normalized: !a.raw,
        rows: xs.len(),
        cols: ys.len(),
        values: values
            .iter()
            .map(|r| r.iter().map(|&v| json_number(v)).collect())
            .collect(),
    };
    emit(out, &doc, || matrix_csv(&values))
}

fn matrix_csv(values: &[Vec<f64>]) -> String {
    let mut s = String::new();
    for row in values {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct GramOutput {
    kernel: KernelSpec,
    rows: usize,
    cols: usize,
    values: Vec<Vec<f64>>,
    pd_audit: Option<pbr_core::PdAudit>,
}

fn gram_cmd(a: GramArgs) -> anyhow::Result<()> {
    let spec = a.kernel.spec()?;
    let ext = a.out.extension().and_then(|e| e.to_str()).unwrap_or("");
    if !matches!(ext, "bin" | "json" | "csv") {
        return Err(usage("--out must end in .bin, .json or .csv"));
    }
    if a.pd_audit && a.cols.is_some() {
        return Err(usage("--pd-audit needs a square matrix; drop --cols"));
    }
    let rows = load(&a.input, a.raw)?;
    let g = match &a.cols {
        Some(p) => gram(&spec, &rows, &load(p, a.raw)?)?,
        None => gram(&spec, &rows, &rows)?,
    };
    println!("kernel matrix {} x {}", g.rows(), g.cols());
    let audit = if a.pd_audit {
        let audit = check_pd(&g)?;
        println!(
            "positive definite: {}  (smallest eigenvalue {:.6e})",
            if audit.is_pd { "yes" } else { "no" },
            audit.min_eigenvalue_estimate
        );
        Some(audit)
    } else {
        None
    };
    match ext {
        "bin" => {
            let mut w = std::io::BufWriter::new(fs::File::create(&a.out)?);
            g.write_to(&mut w)?;
            std::io::Write::flush(&mut w)?;
            Ok(())
        }
        "json" => write_json(
            &a.out,
            &GramOutput {
                kernel: spec,
                rows: g.rows(),
                cols: g.cols(),
                values: (0..g.rows()).map(|i| g.row(i).to_vec()).collect(),
                pd_audit: audit,
            },
        ),
        _ => write_text(
            &a.out,
            &matrix_csv(&(0..g.rows()).map(|i| g.row(i).to_vec()).collect::<Vec<_>>()),
        ),
    }
}

fn svm_train(a: TrainArgs) -> anyhow::Result<()> {
    let spec = a.kernel.spec()?;
    if out_format(&a.out)? != OutFormat::Json {
        return Err(usage("models are saved as .json"));
    }
    if !(a.c > 0.0 && a.c.is_finite()) {
        return Err(usage("--C must be positive"));
    }
    if a.tol.is_nan() || a.tol <= 0.0 {
        return Err(usage("--tol must be positive"));
    }
    let ds = load(&a.train, a.raw)?;
    ds.require_classification()?;
    let g = gram(&spec, &ds, &ds)?;
    let ovr = svm::train_ovr(&g, ds.labels(), ds.num_classes(), a.c, &SmoConfig::with_tol(a.tol))?;
    let pred = svm::predict_ovr(&ovr, &g)?;
    let mut doc = ModelDocument::from_model(&ovr, spec, ds.class_names())?;
    doc.normalized = !a.raw;
    println!(
        "trained {} class model(s) on {} samples: {} support vectors, training macro accuracy {:.2}%",
        ds.num_classes(),
        ds.len(),
        svm::count_svs(&ovr),
        harness::macro_accuracy(&pred, ds.labels())?
    );
    if ovr.models.iter().any(|m| !m.converged) {
        eprintln!("warning: iteration budget exhausted before the tolerance was met");
    }
    write_json(&a.out, &doc)
}

#[derive(Serialize)]
struct Prediction {
    index: usize,
    predicted: String,
    label: String,
}

#[derive(Serialize)]
struct PredictOutput {
    predictions: Vec<Prediction>,
    /// Over rows whose label is one of the model's classes.
    macro_accuracy: Option<f64>,
}

fn svm_predict(a: PredictArgs) -> anyhow::Result<()> {
    let out = checked_out(&a.out)?;
    let text = fs::read_to_string(&a.model).with_context(|| format!("reading {}", a.model.display()))?;
    let doc: ModelDocument = serde_json::from_str(&text).context("parsing model")?;
    let model = doc.to_model()?;
    let train = load(&a.train, !doc.normalized)?;
    if train.len() != doc.train_size {
        bail!(
            "model was trained on {} samples, {} has {}",
            doc.train_size,
            a.train.display(),
            train.len()
        );
    }
    let test = load(&a.test, !doc.normalized)?;
    let g = gram(&doc.kernel, &test, &train)?;
    let pred = svm::predict_ovr(&model, &g)?;
    let labels: Vec<&str> = test.labels().iter().map(|&l| test.class_names()[l].as_str()).collect();
    let known: Vec<(usize, usize)> = pred
        .iter()
        .zip(&labels)
        .filter_map(|(&p, l)| doc.class_order.iter().position(|c| c == l).map(|t| (p, t)))
        .collect();
    let accuracy = if known.is_empty() {
        None
    } else {
        let (p, t): (Vec<usize>, Vec<usize>) = known.into_iter().unzip();
        Some(harness::macro_accuracy(&p, &t)?)
    };
    let predictions: Vec<Prediction> = pred
        .iter()
        .zip(&labels)
        .enumerate()
        .map(|(index, (&p, l))| Prediction {
            index,
            predicted: doc.class_order[p].clone(),
            label: l.to_string(),
        })
        .collect();
    println!("predicted {} samples", predictions.len());
    if let Some(acc) = accuracy {
        println!("macro accuracy {acc:.2}%");
    }
    let doc_out = PredictOutput {
        predictions,
        macro_accuracy: accuracy,
    };
    emit(out, &doc_out, || {
        let mut w = csv::Writer::from_writer(Vec::new());
        let _ = w.write_record(["index", "predicted", "label"]);
        for p in &doc_out.predictions {
            let _ = w.write_record([p.index.to_string(), p.predicted.clone(), p.label.clone()]);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    })
}

fn read_two_columns(path: &Path) -> anyhow::Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.with_context(|| format!("line {line}"))?;
        if rec.len() != 2 {
            bail!("line {line}: expected 2 columns, found {}", rec.len());
        }
        for (field, col) in rec.iter().zip([&mut x, &mut y]) {
            let field = field.trim();
            if !field.is_empty() {
                col.push(
                    field
                        .parse::<f64>()
                        .map_err(|_| anyhow!("line {line}: '{field}' is not a number"))?,
                );
            }
        }
    }
    Ok((x, y))
}

#[derive(Serialize)]
struct TestOutput {
    test: TestKind,
    statistic: f64,
    p_value: f64,
    n_effective: usize,
    n_x: usize,
    n_y: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_plus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<bool>,
}

fn two_sample(a: TwoColumnArgs, kind: TestKind) -> anyhow::Result<()> {
    let out = checked_out(&a.out)?;
    let (x, y) = read_two_columns(&a.input)?;
    let doc = match kind {
        TestKind::Ks => {
            let r = stats::ks_two_sample(&x, &y)?;
            TestOutput {
                test: kind,
                statistic: r.statistic,
                p_value: r.p_value,
                n_effective: r.n_effective,
                n_x: x.len(),
                n_y: y.len(),
                w_plus: None,
                w_minus: None,
                exact: None,
            }
        }
        TestKind::Wilcoxon => {
            let o = stats::wilcoxon_signed_rank_detailed(&x, &y)?;
            TestOutput {
                test: kind,
                statistic: o.result.statistic,
                p_value: o.result.p_value,
                n_effective: o.result.n_effective,
                n_x: x.len(),
                n_y: y.len(),
                w_plus: Some(o.w_plus),
                w_minus: Some(o.w_minus),
                exact: Some(o.exact),
            }
        }
    };
    println!(
        "{} test: statistic {}, p-value {:.6e}, n {}",
        kind, doc.statistic, doc.p_value, doc.n_effective
    );
    emit(out, &doc, || {
        format!(
            "test,statistic,p_value,n_effective\n{},{:?},{:?},{}\n",
            kind, doc.statistic, doc.p_value, doc.n_effective
        )
    })
}

fn audit(a: AuditArgs) -> anyhow::Result<()> {
    let out = checked_out(&a.out)?;
    let alphas = if a.alpha.is_empty() {
        DEFAULT_ALPHAS.to_vec()
    } else {
        a.alpha.clone()
    };
    if alphas.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(usage("--alpha must lie in (0, 1)"));
    }
    if a.pairs == 0 {
        return Err(usage("--pairs must be positive"));
    }
    let ds = dataio::load_any(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let rows: Vec<Vec<f64>> = ds.vectors().iter().map(|v| v.values().to_vec()).collect();
    let report = stats::audit_feature_distributions(&rows, a.pairs, &alphas, a.test, a.seed)?;
    println!(
        "{} audit: {} rows, {} columns, {} pairs ({} untestable)",
        report.test, report.num_rows, report.num_columns, report.num_pairs, report.num_errors
    );
    println!("{:>10}  {:>12}", "alpha", "% different");
    for row in &report.percent_significant {
        println!("{:>10}  {:>12.4}", row.alpha, row.percent_significant);
    }
    if let Some(m) = report.median_p {
        println!("median p-value {m:.6e}");
    }
    emit(out, &report, || report.to_csv())
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    report: &'a harness::BenchmarkReport,
    significance: Option<&'a harness::SignificanceMatrix>,
}

fn bench(a: BenchArgs) -> anyhow::Result<()> {
    let out = checked_out(&a.out)?;
    let defaults = GridSpec::default();
    let grid = GridSpec::new(
        a.log2_c.clone().unwrap_or(defaults.log2_c),
        a.log2_gamma.clone().unwrap_or(defaults.log2_gamma),
        a.degrees.clone().unwrap_or(defaults.degrees),
    )
    .map_err(|e| usage(e.to_string()))?;
    let mut methods = a.methods.clone();
    methods.dedup();
    if methods.iter().collect::<std::collections::HashSet<_>>().len() != methods.len() {
        return Err(usage("--methods lists a method twice"));
    }
    let baseline = KernelFamily::parse(&a.baseline).map_err(|e| usage(e.to_string()))?;
    if methods.len() > 1 && !methods.contains(&baseline) {
        return Err(usage(format!("baseline '{}' is not among --methods", a.baseline)));
    }
    if a.folds < 2 || a.repeats == 0 {
        return Err(usage("--folds must be at least 2 and --repeats positive"));
    }
    let ds = dataio::load_any(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let config = BenchmarkConfig {
        train_per_class: a.train_per_class,
        repeats: a.repeats,
        folds: a.folds,
        grid,
        seed: a.seed,
        normalize: !a.raw,
        smo: SmoConfig::default(),
    };
    let report = harness::run_benchmark(&ds, &methods, &config)?;
    let significance = if methods.len() > 1 {
        Some(harness::compare_methods(&report, &baseline.name())?)
    } else {
        None
    };
    println!(
        "{} repeats, {} training samples per class, seed {}",
        report.repeats, report.train_per_class, report.seed
    );
    println!("{:<10} {:>8} {:>7} {:>8}  significance", "method", "mean", "std", "SVs");
    for m in &report.methods {
        let mark = significance
            .as_ref()
            .map(|s| {
                if s.baseline == m.method {
                    "baseline".to_string()
                } else {
                    s.comparisons
                        .iter()
                        .find(|c| c.method == m.method)
                        .map(|c| {
                            let level = match c.significant.as_slice() {
                                [_, true] => "p < 0.005/m",
                                [true, _] => "p < 0.05/m",
                                _ => "n.s.",
                            };
                            format!("{level} ({})", c.direction)
                        })
                        .unwrap_or_default()
                }
            })
            .unwrap_or_default();
        println!(
            "{:<10} {:>8.2} {:>7.2} {:>8.1}  {}",
            m.method, m.mean, m.std, m.sv_mean, mark
        );
    }
    let doc = BenchOutput {
        report: &report,
        significance: significance.as_ref(),
    };
    emit(out, &doc, || report.summary_csv(significance.as_ref()))
}

#[derive(Serialize)]
struct ToyRow {
    measure: MeasureId,
    d_e: f64,
    d_f: f64,
    /// True when (d) is judged closer to (e), its own class.
    closer_to_e: bool,
}

#[derive(Serialize)]
struct ToyOutput {
    d: Vec<f64>,
    e: Vec<f64>,
    f: Vec<f64>,
    rows: Vec<ToyRow>,
}

fn toy(a: OutArgs) -> anyhow::Result<()> {
    let out = checked_out(&a)?;
    let [d, e, f] = dataio::toy_fixture();
    let rows = MeasureId::ALL
        .iter()
        .map(|&m| {
            let d_e = evaluate_slices(m, d.values(), e.values())?;
            let d_f = evaluate_slices(m, d.values(), f.values())?;
            Ok(ToyRow {
                measure: m,
                d_e,
                d_f,
                closer_to_e: d_e < d_f,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    println!("d = {:?}", dataio::TOY_RAW[0]);
    println!("e = {:?}", dataio::TOY_RAW[1]);
    println!("f = {:?}", dataio::TOY_RAW[2]);
    println!("{:<10} {:>12} {:>12}  closer to", "measure", "D(d,e)", "D(d,f)");
    for r in &rows {
        println!(
            "{:<10} {:>12.6} {:>12.6}  {}",
            r.measure.name(),
            r.d_e,
            r.d_f,
            if r.closer_to_e { "e" } else { "f" }
        );
    }
    let doc = ToyOutput {
        d: d.values().to_vec(),
        e: e.values().to_vec(),
        f: f.values().to_vec(),
        rows,
    };
    emit(out, &doc, || {
        let mut s = String::from("measure,d_e,d_f,closer_to_e\n");
        for r in &doc.rows {
            s.push_str(&format!("{},{:?},{:?},{}\n", r.measure, r.d_e, r.d_f, r.closer_to_e));
        }
        s
    })
}

fn synth(a: SynthArgs) -> anyhow::Result<()> {
    let ext = a.out.extension().and_then(|e| e.to_str()).unwrap_or("");
    if !matches!(ext, "csv" | "bin") {
        return Err(usage("--out must end in .csv or .bin"));
    }
    let ds = dataio::synth_dirichlet(&SynthParams {
        classes: a.classes,
        dims: a.dims,
        per_class: a.per_class,
        concentration: a.concentration,
        separation: a.separation,
        seed: a.seed,
    })
    .map_err(|e| usage(e.to_string()))?;
    dataio::save_any(&ds, &a.out)?;
    println!(
        "wrote {} samples ({} classes, {} bins) to {}",
        ds.len(),
        ds.num_classes(),
        ds.dim(),
        a.out.display()
    );
    Ok(())
}

/// Reads a binary kernel matrix written by `pbr gram --out *.bin`.
pub fn read_gram(path: &Path) -> anyhow::Result<GramMatrix> {
    let f = fs::File::open(path)?;
    Ok(GramMatrix::read_from(std::io::BufReader::new(f))?)
}
