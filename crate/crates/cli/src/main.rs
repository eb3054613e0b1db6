//! `successopt` command-line front end.
//!
//! Every command resolves its settings as defaults, then an optional
//! `--config` file, then flags. All inputs are read and validated before
//! any training or search starts. Errors print a single
//! `error[<code>]: <message>` line on stderr and exit nonzero.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use successopt::analysis::{compare_fitness, compare_ranks, dense_rank_descending, AnalysisError, ModelComparison};
use successopt::classifiers::{Model, ModelFile, ModelKind};
use successopt::cost::CostTable;
use successopt::dataset::{generate_synthetic, parse_dataset, CauseCatalog, SurveyDataset, SyntheticDataSpec};
use successopt::ga::{run_ga, GaRunResult};
use successopt::pipeline::{
    optimize_rows_text, run_pipeline, train, OptimizeReport, OptimizeRow, ReportFormat, RunConfig, TrainReport,
    BUNDLED_SURVEY_CSV,
};
use successopt::{Error, Result};

#[derive(Parser)]
#[command(name = "successopt", version, about = "Success-probability classifiers, cost-aware GA search and model comparison")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train classifiers and write `<model>.model.json` plus a training summary.
    Train(CommonArgs),
    /// Run the GA against trained models and write reports and traces.
    Optimize(OptimizeArgs),
    /// Rank and statistically compare two optimized profiles.
    Compare(CompareArgs),
    /// Generate a synthetic survey dataset with planted effects.
    Synth(SynthArgs),
    /// Dense descending ranks of a list of values.
    Rank(RankArgs),
    /// Train, optimize and compare in one go.
    Run(CommonArgs),
    /// Print a cost table as CSV.
    DumpCostTable(DumpArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Survey dataset CSV, or `builtin` for the bundled 500-row survey.
    #[arg(long)]
    data: Option<String>,
    /// Cost table CSV, or `builtin`.
    #[arg(long)]
    cost_table: Option<String>,
    /// Cause catalog (`id,name` lines), or `builtin`.
    #[arg(long)]
    catalog: Option<String>,
    /// Classifier: nbc, lr or both.
    #[arg(long)]
    model: Option<String>,
    /// Laplace smoothing strength for NBC.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    lr_rate: Option<String>,
    #[arg(long)]
    lr_epochs: Option<String>,
    #[arg(long)]
    lr_tol: Option<String>,
    /// L2 penalty for LR (intercept excluded).
    #[arg(long)]
    lr_l2: Option<String>,
    #[arg(long)]
    generations: Option<String>,
    #[arg(long)]
    population: Option<String>,
    #[arg(long)]
    crossover_p: Option<String>,
    #[arg(long)]
    mutation_p: Option<String>,
    #[arg(long)]
    smin: Option<String>,
    #[arg(long)]
    smax: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Report formats, comma separated: json, csv, text.
    #[arg(long)]
    format: Option<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config.apply_config_text(&read(path)?)?;
        }
        let flags = [
            ("data", &self.data),
            ("cost-table", &self.cost_table),
            ("catalog", &self.catalog),
            ("model", &self.model),
            ("alpha", &self.alpha),
            ("lr-rate", &self.lr_rate),
            ("lr-epochs", &self.lr_epochs),
            ("lr-tol", &self.lr_tol),
            ("lr-l2", &self.lr_l2),
            ("generations", &self.generations),
            ("population", &self.population),
            ("crossover-p", &self.crossover_p),
            ("mutation-p", &self.mutation_p),
            ("smin", &self.smin),
            ("smax", &self.smax),
            ("seed", &self.seed),
            ("out", &self.out),
            ("format", &self.format),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.apply_setting(key, v)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Model document to optimize against; defaults to `<out>/<model>.model.json`.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Train from `--data` instead of loading a model file.
    #[arg(long)]
    train_first: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// First input: a run result JSON or a values CSV.
    #[arg(long)]
    a: PathBuf,
    /// Second input, same forms as `--a`.
    #[arg(long)]
    b: PathBuf,
    /// Treat the inputs as ranks rather than best-fitness values.
    #[arg(long)]
    ranks: bool,
    /// Labels for the two inputs.
    #[arg(long, default_value = "GA-NBC,GA-LR")]
    labels: String,
    /// Catalog for headerless values files.
    #[arg(long)]
    catalog: Option<String>,
    /// Also write `compare.<ext>` files into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    rows: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Standard deviation of the latent noise.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    intercept: Option<f64>,
    /// Comma-separated per-cause weights.
    #[arg(long, allow_hyphen_values = true)]
    effects: Option<String>,
    #[arg(long)]
    catalog: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RankArgs {
    /// Comma-separated values.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input")]
    values: Option<String>,
    /// Values file (optional header row of cause ids, then one row of values).
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[arg(long, default_value = "builtin")]
    cost_table: String,
    #[arg(long, default_value = "builtin")]
    catalog: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn load_catalog(spec: &str) -> Result<CauseCatalog> {
    if spec == "builtin" {
        return Ok(CauseCatalog::default());
    }
    Ok(CauseCatalog::parse(&read(Path::new(spec))?)?)
}

fn load_cost_table(spec: &str, catalog: &CauseCatalog) -> Result<CostTable> {
    if spec == "builtin" {
        let builtin = CostTable::builtin();
        if catalog.len() != builtin.n_causes() {
            return Err(Error::Config(format!(
                "the builtin cost table covers {} causes but the catalog has {}",
                builtin.n_causes(),
                catalog.len()
            )));
        }
        let rows = (0..builtin.n_causes()).map(|i| *builtin.row(i)).collect();
        return Ok(CostTable::new(catalog.clone(), rows)?);
    }
    Ok(CostTable::parse(&read(Path::new(spec))?, catalog)?)
}

fn load_dataset(config: &RunConfig, catalog: &CauseCatalog) -> Result<SurveyDataset> {
    let spec = config.data.as_deref().ok_or_else(|| Error::Config("--data is required".into()))?;
    let text = if spec == "builtin" { BUNDLED_SURVEY_CSV.to_string() } else { read(Path::new(spec))? };
    Ok(parse_dataset(&text, catalog)?)
}

fn write_reports(out: &Path, stem: &str, formats: &[ReportFormat], render: impl Fn(ReportFormat) -> String) -> Result<()> {
    for &f in formats {
        write(&out.join(format!("{stem}.{}", f.extension())), &render(f))?;
    }
    Ok(())
}

fn print(text: &str) {
    // a closed stdout pipe is not an error for a batch tool
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn cmd_train(args: &CommonArgs) -> Result<()> {
    let config = args.resolve()?;
    let catalog = load_catalog(&config.catalog)?;
    let data = load_dataset(&config, &catalog)?;
    let out = PathBuf::from(&config.out);
    ensure_dir(&out)?;

    let mut trained = Vec::new();
    for kind in config.model.kinds() {
        trained.push(train(&data, kind, &config)?);
    }
    for (model, _) in &trained {
        let file = ModelFile::new(&catalog, model.clone());
        write(&out.join(format!("{}.model.json", model.kind().as_str())), &file.to_json())?;
    }
    let report = TrainReport {
        config: config.clone(),
        cause_ids: catalog.ids().map(String::from).collect(),
        training: trained.into_iter().map(|(_, s)| s).collect(),
    };
    write_reports(&out, "train.summary", &config.formats, |f| report.render(f))?;
    print(&report.training.iter().map(|t| t.render_text()).collect::<String>());
    Ok(())
}

fn check_model_catalog(file: &ModelFile, table: &CostTable) -> Result<()> {
    if !file.cause_ids.iter().map(String::as_str).eq(table.catalog().ids()) {
        return Err(AnalysisError::CatalogMismatch.into());
    }
    Ok(())
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<()> {
    let config = args.common.resolve()?;
    let catalog = load_catalog(&config.catalog)?;
    let table = load_cost_table(&config.cost_table, &catalog)?;
    let out = PathBuf::from(&config.out);

    let mut models: Vec<Model> = Vec::new();
    if let Some(path) = &args.model_file {
        let file = ModelFile::from_json(&read(path)?)?;
        check_model_catalog(&file, &table)?;
        models.push(file.model);
    } else if args.train_first {
        let data = load_dataset(&config, &catalog)?;
        for kind in config.model.kinds() {
            models.push(train(&data, kind, &config)?.0);
        }
    } else {
        for kind in config.model.kinds() {
            let file = ModelFile::from_json(&read(&out.join(format!("{}.model.json", kind.as_str())))?)?;
            check_model_catalog(&file, &table)?;
            models.push(file.model);
        }
    }
    ensure_dir(&out)?;

    let mut rows = Vec::new();
    for model in &models {
        let kind = model.kind();
        let run = run_ga(&config.ga, model, &table)?;
        let row = OptimizeRow::new(kind, &run);
        let report = OptimizeReport {
            config: config.clone(),
            cause_ids: catalog.ids().map(String::from).collect(),
            runs: vec![row.clone()],
        };
        write_run_files(&out, kind, &run)?;
        write_reports(&out, &format!("optimize.{}.report", kind.as_str()), &config.formats, |f| report.render(f))?;
        rows.push(row);
    }
    let ids: Vec<String> = catalog.ids().map(String::from).collect();
    print(&optimize_rows_text(&rows, &ids));
    Ok(())
}

fn write_run_files(out: &Path, kind: ModelKind, run: &GaRunResult) -> Result<()> {
    write(&out.join(format!("optimize.{}.trace.csv", kind.as_str())), &run.trace_csv())?;
    write(&out.join(format!("{}.result.json", kind.as_str())), &run.to_json())
}

/// Values and optional cause ids read from one comparison input.
struct CompareInput {
    catalog: Option<CauseCatalog>,
    values: Vec<f64>,
}

fn parse_values_text(text: &str) -> Result<(Option<Vec<String>>, Vec<f64>)> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let split = |l: &str| l.split([',', ' ', '\t']).map(str::trim).filter(|c| !c.is_empty()).map(String::from).collect::<Vec<_>>();
    let first = lines.next().ok_or(AnalysisError::Empty)?;
    let mut cells = split(first);
    let mut ids = None;
    if cells.iter().any(|c| c.parse::<f64>().is_err()) {
        ids = Some(cells);
        cells = lines.next().map(split).ok_or(AnalysisError::Empty)?;
    }
    if lines.next().is_some() {
        return Err(Error::Config("values input must hold a single row of values".into()));
    }
    let values = cells
        .iter()
        .map(|c| c.parse::<f64>().map_err(|_| Error::Config(format!("not a number: {c:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if let Some(ids) = &ids {
        if ids.len() != values.len() {
            return Err(AnalysisError::LengthMismatch { a: ids.len(), b: values.len() }.into());
        }
    }
    Ok((ids, values))
}

fn load_compare_input(path: &Path) -> Result<CompareInput> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        let run = GaRunResult::from_json(&text)?;
        let values = run.best.chromosome.genes().iter().map(|&g| g as f64).collect();
        return Ok(CompareInput { catalog: Some(run.catalog), values });
    }
    let (ids, values) = parse_values_text(&text)?;
    let catalog = match ids {
        Some(ids) => {
            let generic = CauseCatalog::generic(ids.len())?;
            if !generic.ids().eq(ids.iter().map(String::as_str)) {
                return Err(AnalysisError::CatalogMismatch.into());
            }
            Some(generic)
        }
        None => None,
    };
    Ok(CompareInput { catalog, values })
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let a = load_compare_input(&args.a)?;
    let b = load_compare_input(&args.b)?;
    let labels: Vec<&str> = args.labels.split(',').map(str::trim).collect();
    let [la, lb] = labels[..] else {
        return Err(Error::Config("--labels takes exactly two comma-separated names".into()));
    };
    let mut formats = RunConfig::default();
    formats.apply_setting("format", &args.format)?;
    let catalog = match (a.catalog, b.catalog) {
        (Some(x), Some(y)) if !x.same_ids(&y) => return Err(AnalysisError::CatalogMismatch.into()),
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => match &args.catalog {
            Some(spec) => load_catalog(spec)?,
            None => CauseCatalog::generic(a.values.len())?,
        },
    };
    if a.values.len() != catalog.len() || b.values.len() != catalog.len() {
        return Err(AnalysisError::CatalogMismatch.into());
    }
    let cmp: ModelComparison = if args.ranks {
        compare_ranks(&catalog, [la, lb], &a.values, &b.values)?
    } else {
        compare_fitness(&catalog, [la, lb], &a.values, &b.values)?
    };
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_reports(out, "compare", &formats.formats, |f| match f {
            ReportFormat::Json => cmp.to_json(),
            ReportFormat::Csv => cmp.to_csv(),
            ReportFormat::Text => cmp.render_text(),
        })?;
    }
    print(&cmp.render_text());
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let catalog = load_catalog(args.catalog.as_deref().unwrap_or("builtin"))?;
    let mut spec = SyntheticDataSpec::planted(catalog, args.rows);
    if let Some(effects) = &args.effects {
        spec.effect_weights = effects
            .split(',')
            .map(|w| w.trim().parse::<f64>().map_err(|_| Error::Config(format!("effects: not a number: {w:?}"))))
            .collect::<Result<_>>()?;
    }
    if let Some(noise) = args.noise {
        spec.noise = noise;
    }
    if let Some(intercept) = args.intercept {
        spec.intercept = intercept;
    }
    let csv = generate_synthetic(&spec, args.seed)?.to_csv();
    match &args.out {
        Some(path) => write(path, &csv),
        None => {
            print(&csv);
            Ok(())
        }
    }
}

fn cmd_rank(args: &RankArgs) -> Result<()> {
    let text = match (&args.values, &args.input) {
        (Some(v), _) => v.clone(),
        (None, Some(path)) => read(path)?,
        (None, None) => return Err(Error::Config("rank needs --values or --input".into())),
    };
    let (ids, values) = parse_values_text(&text)?;
    let ranks = dense_rank_descending(&values)?;
    let mut out = String::new();
    if let Some(ids) = ids {
        out.push_str(&ids.join(","));
        out.push('\n');
    }
    out.push_str(&ranks.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","));
    out.push('\n');
    print(&out);
    Ok(())
}

fn cmd_run(args: &CommonArgs) -> Result<()> {
    let config = args.resolve()?;
    let catalog = load_catalog(&config.catalog)?;
    let table = load_cost_table(&config.cost_table, &catalog)?;
    let data = load_dataset(&config, &catalog)?;
    let out = PathBuf::from(&config.out);
    ensure_dir(&out)?;

    let result = run_pipeline(&data, &table, &config)?;
    for model in &result.models {
        let file = ModelFile::new(&catalog, model.clone());
        write(&out.join(format!("{}.model.json", model.kind().as_str())), &file.to_json())?;
    }
    for (kind, run) in &result.runs {
        write_run_files(&out, *kind, run)?;
    }
    write_reports(&out, "run.report", &config.formats, |f| result.report.render(f))?;
    print(&result.report.render(ReportFormat::Text));
    Ok(())
}

fn cmd_dump_cost_table(args: &DumpArgs) -> Result<()> {
    let catalog = load_catalog(&args.catalog)?;
    let csv = load_cost_table(&args.cost_table, &catalog)?.to_csv();
    match &args.out {
        Some(path) => write(path, &csv),
        None => {
            print(&csv);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {line}");
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Rank(a) => cmd_rank(a),
        Command::Run(a) => cmd_run(a),
        Command::DumpCostTable(a) => cmd_dump_cost_table(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
