//! Cause catalog, Likert scale, survey datasets and the synthetic generator.
//!
//! A survey dataset is a table of per-cause ratings on a 9-point scale plus a
//! binary project outcome. The on-disk form is comma-separated text:
//!
//! ```text
//! C1,C2,...,Cn,outcome
//! 5,9,...,3,1
//! ```

use std::fmt;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng;
use crate::special::logistic;

pub const SCALE_MIN: u8 = 1;
pub const SCALE_MAX: u8 = 9;
/// Number of points on the rating scale.
pub const SCALE_LEVELS: usize = 9;

const LABELS: [&str; SCALE_LEVELS] = ["EL", "VL", "L", "SL", "N", "SH", "MH", "VH", "EH"];

/// Cause names for the default 19-cause catalog, in `C1..C19` order.
const DEFAULT_CAUSES: [&str; 19] = [
    "Lack of domain specific knowledge",
    "Lack of market interest",
    "Limited academic research",
    "Funding sources",
    "Complex technical requirements",
    "Cross-disciplinary integration difficulties",
    "Rapid pace of innovation",
    "Right tool for right job",
    "Lack of industrial interest",
    "Limited resources",
    "Varying interpretations of agile methodologies",
    "Rapid evolution of quantum technologies",
    "Complexity of quantum computing concepts",
    "Necessity of integration with existing standards",
    "Technological paradigm shift",
    "Transforming process from legacy to quantum software",
    "Gap between research and practice",
    "Emerging working culture",
    "Interdisciplinary collaboration barriers",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DatasetError {
    #[error("scale level {0} out of range [1,9]")]
    LevelOutOfRange(i64),
    #[error("unknown scale label {0:?}")]
    UnknownLabel(String),
    #[error("no rows")]
    NoRows,
    #[error("missing header row")]
    MissingHeader,
    #[error("missing column {column:?}")]
    MissingColumn { column: String },
    #[error("unexpected column {column:?} in header")]
    UnexpectedColumn { column: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowWidth { line: usize, expected: usize, found: usize },
    #[error("line {line}, column {column}: malformed cell {value:?}")]
    MalformedCell { line: usize, column: String, value: String },
    #[error("line {line}, column {column}: scale {value} out of range [1,9]")]
    ScaleOutOfRange { line: usize, column: String, value: i64 },
    #[error("line {line}, column outcome: unknown outcome value {value:?} (expected 0 or 1)")]
    UnknownOutcome { line: usize, value: String },
    #[error("row {row}: expected {expected} scales, found {found}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("row {row}: scale {value} of {cause} out of range [1,9]")]
    RowScale { row: usize, cause: String, value: u8 },
    #[error("catalog is empty")]
    EmptyCatalog,
    #[error("catalog line {line}: expected id {expected:?}, found {found:?}")]
    CatalogId { line: usize, expected: String, found: String },
    #[error("catalog line {line}: expected `id,name`")]
    CatalogMalformed { line: usize },
    #[error("synthetic data needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("synthetic spec has {found} effect weights for {expected} causes")]
    WeightCount { expected: usize, found: usize },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

/// One point of the 9-point rating scale, `EL` (1) through `EH` (9).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct LikertScale(u8);

impl LikertScale {
    pub fn new(level: u8) -> Result<Self, DatasetError> {
        if (SCALE_MIN..=SCALE_MAX).contains(&level) {
            Ok(Self(level))
        } else {
            Err(DatasetError::LevelOutOfRange(level as i64))
        }
    }

    /// Accepts the short codes plus `Neutral` as an alias for `N`.
    pub fn from_label(label: &str) -> Result<Self, DatasetError> {
        let label = label.trim();
        if label.eq_ignore_ascii_case("neutral") {
            return Ok(Self(5));
        }
        LABELS
            .iter()
            .position(|l| *l == label)
            .map(|i| Self(i as u8 + 1))
            .ok_or_else(|| DatasetError::UnknownLabel(label.to_string()))
    }

    pub fn level(self) -> u8 {
        self.0
    }

    pub fn label(self) -> &'static str {
        LABELS[(self.0 - 1) as usize]
    }

    pub fn all() -> impl Iterator<Item = LikertScale> {
        (SCALE_MIN..=SCALE_MAX).map(LikertScale)
    }
}

impl TryFrom<u8> for LikertScale {
    type Error = DatasetError;
    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<LikertScale> for u8 {
    fn from(s: LikertScale) -> u8 {
        s.0
    }
}

impl fmt::Display for LikertScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn scale_label(level: i64) -> Result<&'static str, DatasetError> {
    let level = u8::try_from(level).map_err(|_| DatasetError::LevelOutOfRange(level))?;
    Ok(LikertScale::new(level)?.label())
}

pub fn scale_level(label: &str) -> Result<u8, DatasetError> {
    Ok(LikertScale::from_label(label)?.level())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cause {
    pub id: String,
    pub name: String,
}

/// Ordered list of causes `C1..Cn`; the decision variables of the optimization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseCatalog {
    causes: Vec<Cause>,
}

impl Default for CauseCatalog {
    fn default() -> Self {
        Self::with_names(DEFAULT_CAUSES.iter().map(|s| s.to_string()).collect())
            .expect("default catalog is non-empty")
    }
}

impl CauseCatalog {
    /// Builds a catalog with ids `C1..Cn` for the given names.
    pub fn with_names(names: Vec<String>) -> Result<Self, DatasetError> {
        if names.is_empty() {
            return Err(DatasetError::EmptyCatalog);
        }
        let causes = names
            .into_iter()
            .enumerate()
            .map(|(i, name)| Cause { id: format!("C{}", i + 1), name })
            .collect();
        Ok(Self { causes })
    }

    /// A catalog of `n` causes with placeholder names.
    pub fn generic(n: usize) -> Result<Self, DatasetError> {
        Self::with_names((1..=n).map(|i| format!("Cause {i}")).collect())
    }

    /// Parses `id,name` lines. Ids must run `C1..Cn` in order.
    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut causes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let (id, name) = line
                .split_once(',')
                .ok_or(DatasetError::CatalogMalformed { line: idx + 1 })?;
            let expected = format!("C{}", causes.len() + 1);
            if id.trim() != expected {
                return Err(DatasetError::CatalogId {
                    line: idx + 1,
                    expected,
                    found: id.trim().to_string(),
                });
            }
            causes.push(Cause { id: expected, name: name.trim().to_string() });
        }
        if causes.is_empty() {
            return Err(DatasetError::EmptyCatalog);
        }
        Ok(Self { causes })
    }

    /// Keeps the causes at `indices` (in that order) and renumbers them `C1..Ck`.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, DatasetError> {
        let names = indices
            .iter()
            .map(|&i| {
                self.causes
                    .get(i)
                    .map(|c| c.name.clone())
                    .ok_or_else(|| DatasetError::InvalidSpec(format!("cause index {i} out of range")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_names(names)
    }

    pub fn to_text(&self) -> String {
        self.causes.iter().map(|c| format!("{},{}\n", c.id, c.name)).collect()
    }

    pub fn len(&self) -> usize {
        self.causes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.causes.is_empty()
    }

    pub fn causes(&self) -> &[Cause] {
        &self.causes
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.causes.iter().map(|c| c.id.as_str())
    }

    /// Same ids in the same order; names are descriptive and not compared.
    pub fn same_ids(&self, other: &CauseCatalog) -> bool {
        self.ids().eq(other.ids())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Failure,
    Success,
}

impl Outcome {
    pub fn as_index(self) -> usize {
        match self {
            Outcome::Failure => 0,
            Outcome::Success => 1,
        }
    }

    pub fn from_bool(success: bool) -> Self {
        if success {
            Outcome::Success
        } else {
            Outcome::Failure
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub scales: Vec<u8>,
    pub outcome: Outcome,
}

/// Validated survey responses: every row has one in-range scale per cause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyDataset {
    catalog: CauseCatalog,
    rows: Vec<SurveyRow>,
}

impl SurveyDataset {
    pub fn new(catalog: CauseCatalog, rows: Vec<SurveyRow>) -> Result<Self, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::NoRows);
        }
        let n = catalog.len();
        for (r, row) in rows.iter().enumerate() {
            if row.scales.len() != n {
                return Err(DatasetError::RowLength { row: r, expected: n, found: row.scales.len() });
            }
            for (i, &s) in row.scales.iter().enumerate() {
                if !(SCALE_MIN..=SCALE_MAX).contains(&s) {
                    return Err(DatasetError::RowScale {
                        row: r,
                        cause: catalog.causes[i].id.clone(),
                        value: s,
                    });
                }
            }
        }
        Ok(Self { catalog, rows })
    }

    pub fn catalog(&self) -> &CauseCatalog {
        &self.catalog
    }

    pub fn rows(&self) -> &[SurveyRow] {
        &self.rows
    }

    pub fn n_causes(&self) -> usize {
        self.catalog.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `(failures, successes)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let successes = self.rows.iter().filter(|r| r.outcome == Outcome::Success).count();
        (self.rows.len() - successes, successes)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for id in self.catalog.ids() {
            out.push_str(id);
            out.push(',');
        }
        out.push_str("outcome\n");
        for row in &self.rows {
            for s in &row.scales {
                out.push_str(&s.to_string());
                out.push(',');
            }
            out.push_str(match row.outcome {
                Outcome::Failure => "0\n",
                Outcome::Success => "1\n",
            });
        }
        out
    }
}

/// Parses a comma-separated dataset against `catalog`.
///
/// Columns are matched by header name, so their order is free; every catalog
/// id and `outcome` must appear exactly once. LF and CRLF line endings are
/// accepted and blank lines are skipped. Errors carry the 1-based line number
/// (the header is line 1) and the column name.
pub fn parse_dataset(text: &str, catalog: &CauseCatalog) -> Result<SurveyDataset, DatasetError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines.next().ok_or(DatasetError::MissingHeader)?;
    let header: Vec<&str> = header.split(',').map(str::trim).collect();

    let n = catalog.len();
    // position in file -> Some(cause index) or None for outcome
    let mut slots: Vec<Option<usize>> = Vec::with_capacity(header.len());
    let mut seen = vec![false; n + 1];
    for name in &header {
        let slot = if name.eq_ignore_ascii_case("outcome") {
            n
        } else {
            catalog
                .ids()
                .position(|id| id == *name)
                .ok_or_else(|| DatasetError::UnexpectedColumn { column: name.to_string() })?
        };
        if seen[slot] {
            return Err(DatasetError::UnexpectedColumn { column: name.to_string() });
        }
        seen[slot] = true;
        slots.push((slot < n).then_some(slot));
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let column = if missing == n { "outcome".to_string() } else { catalog.causes[missing].id.clone() };
        return Err(DatasetError::MissingColumn { column });
    }

    let mut rows = Vec::new();
    for (line, body) in lines {
        let cells: Vec<&str> = body.split(',').map(str::trim).collect();
        if cells.len() != header.len() {
            return Err(DatasetError::RowWidth { line, expected: header.len(), found: cells.len() });
        }
        let mut scales = vec![0u8; n];
        let mut outcome = None;
        for (cell, slot) in cells.iter().zip(&slots) {
            match slot {
                Some(i) => {
                    let column = &catalog.causes[*i].id;
                    let value: i64 = cell.parse().map_err(|_| DatasetError::MalformedCell {
                        line,
                        column: column.clone(),
                        value: cell.to_string(),
                    })?;
                    if !(SCALE_MIN as i64..=SCALE_MAX as i64).contains(&value) {
                        return Err(DatasetError::ScaleOutOfRange { line, column: column.clone(), value });
                    }
                    scales[*i] = value as u8;
                }
                None => {
                    outcome = Some(match *cell {
                        "0" => Outcome::Failure,
                        "1" => Outcome::Success,
                        other => {
                            return Err(DatasetError::UnknownOutcome { line, value: other.to_string() })
                        }
                    });
                }
            }
        }
        rows.push(SurveyRow { scales, outcome: outcome.expect("outcome column present") });
    }
    if rows.is_empty() {
        return Err(DatasetError::NoRows);
    }
    SurveyDataset::new(catalog.clone(), rows)
}

/// Parameters for a logistic ground-truth dataset.
///
/// Each row's scales are i.i.d. uniform on `1..=9`; the outcome is a success
/// with probability `logistic(intercept + sum(weights * scales) + noise * z)`,
/// `z` standard normal. This is a test fixture, not a model of real survey data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticDataSpec {
    pub catalog: CauseCatalog,
    pub row_count: usize,
    pub effect_weights: Vec<f64>,
    pub intercept: f64,
    pub noise: f64,
}

impl SyntheticDataSpec {
    /// Default 19-cause catalog with monotone planted effects.
    pub fn planted_default(row_count: usize) -> Self {
        Self::planted(CauseCatalog::default(), row_count)
    }

    /// Monotone planted effects over any catalog.
    ///
    /// Odd-numbered causes raise the odds of success per scale step and
    /// even-numbered causes lower them by the same amount. The step is 0.2
    /// logits for 19 causes and scales inversely with the catalog size, so the
    /// total planted effect does not depend on it. A mid-scale profile sits
    /// 4.5 logits below even odds, so a random profile rarely looks
    /// successful while a targeted one almost always does.
    pub fn planted(catalog: CauseCatalog, row_count: usize) -> Self {
        let step = 0.2 * (19.0 / catalog.len().max(1) as f64);
        let weights: Vec<f64> = (0..catalog.len()).map(|i| if i % 2 == 0 { step } else { -step }).collect();
        let mid: f64 = weights.iter().map(|w| w * 5.0).sum();
        Self {
            catalog,
            row_count,
            effect_weights: weights,
            intercept: -mid - 4.5,
            noise: 0.5,
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if self.row_count < 2 {
            return Err(DatasetError::TooFewRows(self.row_count));
        }
        if self.effect_weights.len() != self.catalog.len() {
            return Err(DatasetError::WeightCount {
                expected: self.catalog.len(),
                found: self.effect_weights.len(),
            });
        }
        if !self.effect_weights.iter().all(|w| w.is_finite()) || !self.intercept.is_finite() {
            return Err(DatasetError::InvalidSpec("weights and intercept must be finite".into()));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(DatasetError::InvalidSpec(format!("noise must be >= 0, got {}", self.noise)));
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SyntheticDataSpec, seed: u64) -> Result<SurveyDataset, DatasetError> {
    spec.validate()?;
    let mut rng = rng::seeded(seed);
    let n = spec.catalog.len();
    let mut rows = Vec::with_capacity(spec.row_count);
    for _ in 0..spec.row_count {
        let scales: Vec<u8> = (0..n).map(|_| rng.random_range(SCALE_MIN..=SCALE_MAX)).collect();
        let mut score = spec.intercept
            + scales.iter().zip(&spec.effect_weights).map(|(&s, w)| w * s as f64).sum::<f64>();
        if spec.noise > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            score += spec.noise * z;
        }
        let success = rng.random::<f64>() < logistic(score);
        rows.push(SurveyRow { scales, outcome: Outcome::from_bool(success) });
    }
    SurveyDataset::new(spec.catalog.clone(), rows)
}
