//! End-to-end flow: train one or both classifiers, optimize against each,
//! and compare the resulting rankings. Everything here is pure; file access
//! lives in the command-line front end.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{compare_models, ModelComparison};
use crate::classifiers::{train_lr, train_nbc, LrDiagnostics, LrHyperparams, Model, ModelKind};
use crate::cost::CostTable;
use crate::dataset::{parse_dataset, CauseCatalog, SurveyDataset};
use crate::ga::{run_ga, GaParams, GaRunResult};
use crate::{Error, Result};

/// The bundled 500-row, 19-cause synthetic survey with planted monotone effects.
pub const BUNDLED_SURVEY_CSV: &str = include_str!("../fixtures/survey_19.csv");
/// Rows and seed the bundled survey was generated with.
pub const BUNDLED_SURVEY_ROWS: usize = 500;
pub const BUNDLED_SURVEY_SEED: u64 = 1;

pub fn bundled_dataset() -> SurveyDataset {
    parse_dataset(BUNDLED_SURVEY_CSV, &CauseCatalog::default()).expect("bundled survey is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierChoice {
    Nbc,
    Lr,
    Both,
}

impl ClassifierChoice {
    pub fn kinds(self) -> Vec<ModelKind> {
        match self {
            ClassifierChoice::Nbc => vec![ModelKind::Nbc],
            ClassifierChoice::Lr => vec![ModelKind::Lr],
            ClassifierChoice::Both => vec![ModelKind::Nbc, ModelKind::Lr],
        }
    }
}

impl FromStr for ClassifierChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nbc" => Ok(Self::Nbc),
            "lr" => Ok(Self::Lr),
            "both" => Ok(Self::Both),
            other => Err(Error::Config(format!("model must be nbc, lr or both, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Text => "txt",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            other => Err(Error::Config(format!("format must be json, csv or text, got {other:?}"))),
        }
    }
}

/// Effective settings of a run after defaults, config file and flags are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Dataset path, or `builtin` for the bundled survey.
    pub data: Option<String>,
    pub cost_table: String,
    pub catalog: String,
    pub model: ClassifierChoice,
    pub alpha: f64,
    pub lr: LrHyperparams,
    pub ga: GaParams,
    pub out: String,
    pub formats: Vec<ReportFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: None,
            cost_table: "builtin".into(),
            catalog: "builtin".into(),
            model: ClassifierChoice::Both,
            alpha: 1.0,
            lr: LrHyperparams::default(),
            ga: GaParams::default(),
            out: ".".into(),
            formats: vec![ReportFormat::Json],
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys are the long flag names.
    pub fn apply_setting(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "data" => self.data = Some(value.to_string()),
            "cost-table" => self.cost_table = value.to_string(),
            "catalog" => self.catalog = value.to_string(),
            "model" => self.model = value.parse()?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "lr-rate" => self.lr.learning_rate = parse_num(key, value)?,
            "lr-epochs" => self.lr.max_epochs = parse_num(key, value)?,
            "lr-tol" => self.lr.tolerance = parse_num(key, value)?,
            "lr-l2" => self.lr.l2 = parse_num(key, value)?,
            "generations" => self.ga.max_iterations = parse_num(key, value)?,
            "population" => self.ga.population_size = parse_num(key, value)?,
            "crossover-p" => self.ga.crossover_probability = parse_num(key, value)?,
            "mutation-p" => self.ga.mutation_probability = parse_num(key, value)?,
            "smin" => self.ga.s_min = parse_num(key, value)?,
            "smax" => self.ga.s_max = parse_num(key, value)?,
            "seed" => self.ga.seed = parse_num(key, value)?,
            "out" => self.out = value.to_string(),
            "format" => {
                let mut formats = Vec::new();
                for f in value.split(',') {
                    let f: ReportFormat = f.trim().parse()?;
                    if !formats.contains(&f) {
                        formats.push(f);
                    }
                }
                self.formats = formats;
            }
            other => return Err(Error::Config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Reads flat `key = value` lines; `#` starts a comment.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", i + 1)))?;
            self.apply_setting(k, v)?;
        }
        Ok(())
    }

    /// Checks the numeric settings before any input is read.
    pub fn validate(&self) -> Result<()> {
        self.ga.validate()?;
        self.lr.validate()?;
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(crate::classifiers::ModelError::InvalidAlpha(self.alpha).into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub model: ModelKind,
    pub rows: usize,
    pub successes: usize,
    pub failures: usize,
    /// Smoothing strength, NBC only.
    pub alpha: Option<f64>,
    /// Optimizer diagnostics, LR only.
    pub lr_diagnostics: Option<LrDiagnostics>,
}

pub fn train(dataset: &SurveyDataset, kind: ModelKind, config: &RunConfig) -> Result<(Model, TrainingSummary)> {
    let (failures, successes) = dataset.class_counts();
    let mut summary = TrainingSummary {
        model: kind,
        rows: dataset.len(),
        successes,
        failures,
        alpha: None,
        lr_diagnostics: None,
    };
    let model = match kind {
        ModelKind::Nbc => {
            summary.alpha = Some(config.alpha);
            Model::Nbc(train_nbc(dataset, config.alpha)?)
        }
        ModelKind::Lr => {
            let m = train_lr(dataset, &config.lr)?;
            summary.lr_diagnostics = Some(m.diagnostics);
            Model::Lr(m)
        }
    };
    Ok((model, summary))
}

impl TrainingSummary {
    pub fn render_text(&self) -> String {
        let mut s = format!(
            "{}: {} rows ({} successes, {} failures)",
            self.model.display_name(),
            self.rows,
            self.successes,
            self.failures
        );
        if let Some(a) = self.alpha {
            let _ = write!(s, ", alpha = {a}");
        }
        if let Some(d) = &self.lr_diagnostics {
            let _ = write!(
                s,
                ", {} epochs, max |gradient| = {:.3e}, {}",
                d.epochs,
                d.max_abs_gradient,
                if d.converged { "converged" } else { "NOT converged" }
            );
        }
        s.push('\n');
        s
    }
}

/// Report for a train invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub config: RunConfig,
    pub cause_ids: Vec<String>,
    pub training: Vec<TrainingSummary>,
}

impl TrainReport {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            ReportFormat::Csv => {
                let mut out = String::from(
                    "model,rows,successes,failures,alpha,lr_epochs,lr_max_abs_gradient,lr_log_likelihood,lr_converged\n",
                );
                for t in &self.training {
                    let d = t.lr_diagnostics.as_ref();
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},{}",
                        t.model.as_str(),
                        t.rows,
                        t.successes,
                        t.failures,
                        t.alpha.map(|a| a.to_string()).unwrap_or_default(),
                        d.map(|d| d.epochs.to_string()).unwrap_or_default(),
                        d.map(|d| d.max_abs_gradient.to_string()).unwrap_or_default(),
                        d.map(|d| d.log_likelihood.to_string()).unwrap_or_default(),
                        d.map(|d| d.converged.to_string()).unwrap_or_default()
                    );
                }
                out
            }
            ReportFormat::Text => {
                let mut out: String = self.training.iter().map(TrainingSummary::render_text).collect();
                out.push_str("\nEffective configuration\n");
                out.push_str(&self.config.to_json());
                out
            }
        }
    }
}

/// One row of the initial-versus-ending summary for a GA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeRow {
    pub model: ModelKind,
    pub generations: usize,
    pub initial_success_probability: f64,
    pub ending_success_probability: f64,
    pub change_in_probability: f64,
    /// Normalized costs, fractions in [0, 1].
    pub initial_cost: f64,
    pub ending_cost: f64,
    pub change_in_cost: f64,
    pub initial_raw_cost: u32,
    pub ending_raw_cost: u32,
    pub initial_efficacy: f64,
    pub ending_efficacy: f64,
    pub initial_mean_probability: f64,
    pub initial_mean_cost: f64,
    pub final_generation_best_efficacy: f64,
    pub best_fitness: Vec<u8>,
}

impl OptimizeRow {
    pub fn new(model: ModelKind, run: &GaRunResult) -> Self {
        let (init, end) = (&run.initial_best, &run.best);
        Self {
            model,
            generations: run.generations_run,
            initial_success_probability: init.success_probability,
            ending_success_probability: end.success_probability,
            change_in_probability: end.success_probability - init.success_probability,
            initial_cost: init.normalized_cost,
            ending_cost: end.normalized_cost,
            change_in_cost: end.normalized_cost - init.normalized_cost,
            initial_raw_cost: init.raw_cost,
            ending_raw_cost: end.raw_cost,
            initial_efficacy: init.efficacy,
            ending_efficacy: end.efficacy,
            initial_mean_probability: run.initial_mean_probability,
            initial_mean_cost: run.initial_mean_cost,
            final_generation_best_efficacy: run.final_generation_best.efficacy,
            best_fitness: end.chromosome.genes().to_vec(),
        }
    }
}

fn pct(p: f64) -> String {
    format!("{:.2}%", p * 100.0)
}

fn signed_pct(p: f64) -> String {
    format!("{:+.2}%", p * 100.0)
}

const OPTIMIZE_CSV_HEADER: &str = "model,generations,initial_success_probability,initial_success_pct,\
ending_success_probability,ending_success_pct,change_in_probability,change_in_probability_pct,\
initial_cost,ending_cost,change_in_cost,initial_raw_cost,ending_raw_cost,initial_mean_probability,initial_mean_cost";

/// Tabular rendering of optimize rows, one line per model.
pub fn optimize_rows_csv(rows: &[OptimizeRow], cause_ids: &[String]) -> String {
    let mut out = String::from(OPTIMIZE_CSV_HEADER);
    for id in cause_ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{:.3},{:.3},{:.3},{},{},{},{}",
            r.model.as_str(),
            r.generations,
            r.initial_success_probability,
            pct(r.initial_success_probability),
            r.ending_success_probability,
            pct(r.ending_success_probability),
            r.change_in_probability,
            signed_pct(r.change_in_probability),
            r.initial_cost,
            r.ending_cost,
            r.change_in_cost,
            r.initial_raw_cost,
            r.ending_raw_cost,
            r.initial_mean_probability,
            r.initial_mean_cost
        );
        for g in &r.best_fitness {
            let _ = write!(out, ",{g}");
        }
        out.push('\n');
    }
    out
}

/// Aligned text table of initial/ending probability and cost, plus best fitness per cause.
pub fn optimize_rows_text(rows: &[OptimizeRow], cause_ids: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:>11} {:>20} {:>20} {:>12} {:>8} {:>8} {:>8}",
        "Stage", "Generations", "Initial success", "Ending success", "Change", "Init.c", "End.c", "Change"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<20} {:>11} {:>20} {:>20} {:>12} {:>8.3} {:>8.3} {:>+8.3}",
            r.model.display_name(),
            r.generations,
            format!("{} ({:.4})", pct(r.initial_success_probability), r.initial_success_probability),
            format!("{} ({:.4})", pct(r.ending_success_probability), r.ending_success_probability),
            signed_pct(r.change_in_probability),
            r.initial_cost,
            r.ending_cost,
            r.change_in_cost
        );
    }
    out.push_str("\nBest fitness of causes\n");
    let _ = write!(out, "{:<20}", "Model");
    for id in cause_ids {
        let _ = write!(out, " {id:>3}");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{:<20}", r.model.display_name());
        for g in &r.best_fitness {
            let _ = write!(out, " {g:>3}");
        }
        out.push('\n');
    }
    out.push_str("\nCosts are normalized fractions of the table's cost range, not percentages.\n");
    out
}

/// Report for a single optimize invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub config: RunConfig,
    pub cause_ids: Vec<String>,
    pub runs: Vec<OptimizeRow>,
}

impl OptimizeReport {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            ReportFormat::Csv => optimize_rows_csv(&self.runs, &self.cause_ids),
            ReportFormat::Text => {
                let mut out = optimize_rows_text(&self.runs, &self.cause_ids);
                out.push_str("\nEffective configuration\n");
                out.push_str(&self.config.to_json());
                out
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub config: RunConfig,
    pub cause_ids: Vec<String>,
    pub training: Vec<TrainingSummary>,
    pub optimization: Vec<OptimizeRow>,
    pub comparison: Option<ModelComparison>,
    pub comparison_note: Option<String>,
}

impl PipelineReport {
    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            ReportFormat::Csv => optimize_rows_csv(&self.optimization, &self.cause_ids),
            ReportFormat::Text => {
                let mut out = String::from("Training\n");
                for t in &self.training {
                    out.push_str("  ");
                    out.push_str(&t.render_text());
                }
                out.push_str("\nOptimization\n");
                out.push_str(&optimize_rows_text(&self.optimization, &self.cause_ids));
                out.push_str("\nComparison\n");
                match (&self.comparison, &self.comparison_note) {
                    (Some(c), _) => out.push_str(&c.render_text()),
                    (None, Some(note)) => {
                        out.push_str(note);
                        out.push('\n');
                    }
                    (None, None) => {}
                }
                out.push_str("\nEffective configuration\n");
                out.push_str(&self.config.to_json());
                out
            }
        }
    }
}

/// Everything a pipeline run produced.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: PipelineReport,
    pub models: Vec<Model>,
    pub runs: Vec<(ModelKind, GaRunResult)>,
}

/// Trains the selected classifiers, optimizes against each and, when both
/// ran, compares their best-fitness rankings.
pub fn run_pipeline(dataset: &SurveyDataset, table: &CostTable, config: &RunConfig) -> Result<PipelineOutput> {
    config.validate()?;
    if !dataset.catalog().same_ids(table.catalog()) {
        return Err(Error::Config(format!(
            "dataset has {} causes but the cost table has {}",
            dataset.n_causes(),
            table.n_causes()
        )));
    }
    let mut training = Vec::new();
    let mut models = Vec::new();
    let mut runs = Vec::new();
    for kind in config.model.kinds() {
        let (model, summary) = train(dataset, kind, config)?;
        let run = run_ga(&config.ga, &model, table)?;
        training.push(summary);
        models.push(model);
        runs.push((kind, run));
    }
    let (comparison, comparison_note) = match runs.as_slice() {
        [(ModelKind::Nbc, nbc), (ModelKind::Lr, lr)] => (Some(compare_models(nbc, lr)?), None),
        _ => (None, Some("comparison omitted: it needs both an NBC and an LR run (use --model both)".to_string())),
    };
    let report = PipelineReport {
        config: config.clone(),
        cause_ids: table.catalog().ids().map(String::from).collect(),
        training,
        optimization: runs.iter().map(|(k, r)| OptimizeRow::new(*k, r)).collect(),
        comparison,
        comparison_note,
    };
    Ok(PipelineOutput { report, models, runs })
}
