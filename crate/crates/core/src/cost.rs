//! Per-cause, per-scale remediation costs and the normalized solution cost.
//!
//! Bounds for normalization are derived from the table itself: the minimum
//! total is the sum of each row's smallest entry and the maximum the sum of
//! each row's largest. Rows are not monotone in the scale (C16 costs more at
//! SL than at N), so every column is scanned.

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{CauseCatalog, LikertScale, SCALE_LEVELS, SCALE_MAX, SCALE_MIN};

const HEADER: [&str; SCALE_LEVELS] = ["EL", "VL", "L", "SL", "N", "SH", "MH", "VH", "EH"];

/// Expert cost table, one row per scale level (EL..EH), one column per cause C1..C19.
const DEFAULT_BY_SCALE: [[u32; 19]; SCALE_LEVELS] = [
    [2, 2, 2, 2, 1, 1, 1, 1, 3, 1, 1, 2, 2, 4, 3, 1, 2, 1, 1],
    [3, 2, 2, 2, 2, 2, 1, 1, 3, 2, 2, 3, 3, 3, 3, 1, 2, 4, 2],
    [3, 2, 3, 3, 2, 2, 2, 2, 4, 2, 3, 3, 3, 2, 4, 2, 4, 3, 2],
    [4, 4, 4, 4, 2, 3, 3, 3, 4, 2, 4, 4, 4, 4, 4, 5, 4, 5, 2],
    [5, 5, 4, 4, 4, 4, 5, 4, 5, 5, 5, 5, 5, 4, 5, 4, 5, 5, 4],
    [6, 6, 5, 6, 6, 6, 6, 4, 5, 6, 6, 6, 6, 6, 5, 3, 6, 6, 6],
    [6, 6, 6, 6, 6, 6, 6, 5, 6, 6, 7, 7, 7, 7, 6, 5, 7, 7, 8],
    [7, 7, 7, 7, 7, 7, 6, 6, 7, 6, 7, 8, 8, 7, 7, 6, 7, 8, 7],
    [8, 8, 8, 8, 7, 7, 7, 8, 8, 7, 8, 9, 9, 8, 8, 8, 8, 9, 7],
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("cost table is empty")]
    Empty,
    #[error("cost table header: missing column {column:?}")]
    MissingColumn { column: String },
    #[error("cost table header: unexpected column {column:?}")]
    UnexpectedColumn { column: String },
    #[error("cost table has {found} rows, catalog has {expected} causes")]
    RowCount { expected: usize, found: usize },
    #[error("cost table line {line}: expected {expected} cells, found {found}")]
    RowWidth { line: usize, expected: usize, found: usize },
    #[error("cost table line {line}, column {column}: malformed cell {value:?}")]
    MalformedCell { line: usize, column: String, value: String },
    #[error("cost table line {line}: expected cause {expected:?}, found {found:?}")]
    CauseMismatch { line: usize, expected: String, found: String },
    #[error("degenerate cost table: min total equals max total ({0})")]
    Degenerate(u32),
    #[error("solution has {found} genes, cost table has {expected} causes")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gene {index} has scale {value}, outside [1,9]")]
    ScaleOutOfRange { index: usize, value: u8 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostTable {
    catalog: CauseCatalog,
    costs: Vec<[u32; SCALE_LEVELS]>,
    min_total: u32,
    max_total: u32,
}

impl CostTable {
    /// `costs[i][j]` is the cost of cause `i` at scale `j + 1`.
    pub fn new(catalog: CauseCatalog, costs: Vec<[u32; SCALE_LEVELS]>) -> Result<Self, CostError> {
        if costs.is_empty() {
            return Err(CostError::Empty);
        }
        if costs.len() != catalog.len() {
            return Err(CostError::RowCount { expected: catalog.len(), found: costs.len() });
        }
        let min_total = costs.iter().map(|row| *row.iter().min().unwrap()).sum();
        let max_total = costs.iter().map(|row| *row.iter().max().unwrap()).sum();
        if min_total >= max_total {
            return Err(CostError::Degenerate(min_total));
        }
        Ok(Self { catalog, costs, min_total, max_total })
    }

    /// The built-in 19-cause expert table.
    pub fn builtin() -> Self {
        let costs = (0..19)
            .map(|cause| std::array::from_fn(|scale| DEFAULT_BY_SCALE[scale][cause]))
            .collect();
        Self::new(CauseCatalog::default(), costs).expect("built-in table is valid")
    }

    /// Parses the `cause,EL,VL,L,SL,N,SH,MH,VH,EH` format, rows in catalog order.
    /// `Neutral` is accepted in place of `N`.
    pub fn parse(text: &str, catalog: &CauseCatalog) -> Result<Self, CostError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(CostError::Empty)?;
        let header: Vec<&str> = header.split(',').map(str::trim).collect();

        let expected_header = std::iter::once("cause").chain(HEADER);
        for (i, want) in expected_header.enumerate() {
            match header.get(i) {
                Some(&got) if got == want || (want == "N" && got.eq_ignore_ascii_case("neutral")) => {}
                Some(&got) if header.contains(&want) => {
                    return Err(CostError::UnexpectedColumn { column: got.to_string() })
                }
                _ => return Err(CostError::MissingColumn { column: want.to_string() }),
            }
        }
        if let Some(extra) = header.get(SCALE_LEVELS + 1) {
            return Err(CostError::UnexpectedColumn { column: extra.to_string() });
        }

        let mut costs = Vec::with_capacity(catalog.len());
        for (line, body) in lines {
            let cells: Vec<&str> = body.split(',').map(str::trim).collect();
            if cells.len() != SCALE_LEVELS + 1 {
                return Err(CostError::RowWidth { line, expected: SCALE_LEVELS + 1, found: cells.len() });
            }
            let expected = catalog
                .causes()
                .get(costs.len())
                .ok_or(CostError::RowCount { expected: catalog.len(), found: costs.len() + 1 })?;
            if cells[0] != expected.id {
                return Err(CostError::CauseMismatch {
                    line,
                    expected: expected.id.clone(),
                    found: cells[0].to_string(),
                });
            }
            let mut row = [0u32; SCALE_LEVELS];
            for (j, cell) in cells[1..].iter().enumerate() {
                row[j] = cell.parse().map_err(|_| CostError::MalformedCell {
                    line,
                    column: HEADER[j].to_string(),
                    value: cell.to_string(),
                })?;
            }
            costs.push(row);
        }
        if costs.len() != catalog.len() {
            return Err(CostError::RowCount { expected: catalog.len(), found: costs.len() });
        }
        Self::new(catalog.clone(), costs)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("cause");
        for h in HEADER {
            out.push(',');
            out.push_str(h);
        }
        out.push('\n');
        for (cause, row) in self.catalog.causes().iter().zip(&self.costs) {
            out.push_str(&cause.id);
            for c in row {
                out.push(',');
                out.push_str(&c.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Sub-table over the causes at `indices`, renumbered `C1..Ck`.
    pub fn subset(&self, indices: &[usize]) -> Result<Self, CostError> {
        let catalog = self.catalog.subset(indices).map_err(|_| CostError::RowCount {
            expected: self.catalog.len(),
            found: indices.iter().copied().max().unwrap_or(0) + 1,
        })?;
        let costs = indices.iter().map(|&i| self.costs[i]).collect();
        Self::new(catalog, costs)
    }

    pub fn catalog(&self) -> &CauseCatalog {
        &self.catalog
    }

    pub fn n_causes(&self) -> usize {
        self.costs.len()
    }

    pub fn min_total(&self) -> u32 {
        self.min_total
    }

    pub fn max_total(&self) -> u32 {
        self.max_total
    }

    pub fn row(&self, cause: usize) -> &[u32; SCALE_LEVELS] {
        &self.costs[cause]
    }

    pub fn cost(&self, cause: usize, scale: LikertScale) -> u32 {
        self.costs[cause][(scale.level() - 1) as usize]
    }

    /// Total cost of a solution: the sum of each cause's cost at its scale.
    pub fn cost_of(&self, solution: &[u8]) -> Result<u32, CostError> {
        if solution.len() != self.costs.len() {
            return Err(CostError::DimensionMismatch { expected: self.costs.len(), found: solution.len() });
        }
        solution
            .iter()
            .zip(&self.costs)
            .enumerate()
            .map(|(index, (&s, row))| {
                if (SCALE_MIN..=SCALE_MAX).contains(&s) {
                    Ok(row[(s - 1) as usize])
                } else {
                    Err(CostError::ScaleOutOfRange { index, value: s })
                }
            })
            .sum()
    }

    /// Rescales a total cost onto `[0, 1]` between the table's bounds.
    pub fn normalize(&self, total: u32) -> f64 {
        (total as f64 - self.min_total as f64) / (self.max_total as f64 - self.min_total as f64)
    }

    pub fn normalized_cost(&self, solution: &[u8]) -> Result<f64, CostError> {
        Ok(self.normalize(self.cost_of(solution)?))
    }
}
