//! Ranking of optimized factor profiles and two-model comparison statistics.
//!
//! Ranks are dense and descending: the largest best-fitness value gets rank 1,
//! ties share a rank and the next distinct value gets the next integer.
//! Spearman's rho is the Pearson correlation of average (tie-corrected) ranks.
//! Levene's test uses mean-centred absolute deviations; the t-test pools
//! variances and also reports the Welch row alongside.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::CauseCatalog;
use crate::ga::GaRunResult;
use crate::special::{f_survival, student_t_quantile, student_t_two_tailed};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("empty input")]
    Empty,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("inputs differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("need at least {min} observations, got {n}")]
    TooFew { n: usize, min: usize },
    #[error("zero variance in {which}; correlation is undefined")]
    ZeroVariance { which: &'static str },
    #[error("Levene's test is undefined: both groups have no spread")]
    DegenerateGroups,
    #[error("t statistic is undefined: pooled variance is zero but means differ")]
    UndefinedT,
    #[error("results were produced under different cause catalogs")]
    CatalogMismatch,
}

fn check_finite(v: &[f64]) -> Result<(), AnalysisError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(AnalysisError::NonFinite)
    }
}

/// Dense descending ranks: 1 for the largest value, ties share a rank.
pub fn dense_rank_descending(values: &[f64]) -> Result<Vec<usize>, AnalysisError> {
    if values.is_empty() {
        return Err(AnalysisError::Empty);
    }
    check_finite(values)?;
    let mut distinct = values.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    Ok(values
        .iter()
        .map(|v| distinct.iter().position(|d| d == v).expect("value present") + 1)
        .collect())
}

/// Ascending ranks with ties replaced by the mean of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn mean(v: &[f64]) -> f64 {
    // summing in sorted order makes the mean independent of input order
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.iter().sum::<f64>() / v.len() as f64
}

fn sample_variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Tie-corrected Spearman correlation with a two-tailed t-approximation p-value.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<CorrelationReport, AnalysisError> {
    if a.len() != b.len() {
        return Err(AnalysisError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let n = a.len();
    if n < 3 {
        return Err(AnalysisError::TooFew { n, min: 3 });
    }
    check_finite(a)?;
    check_finite(b)?;
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    let (ma, mb) = (mean(&ra), mean(&rb));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 {
        return Err(AnalysisError::ZeroVariance { which: "first input" });
    }
    if sbb == 0.0 {
        return Err(AnalysisError::ZeroVariance { which: "second input" });
    }
    let rho = (sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p_value = if rho.abs() >= 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        student_t_two_tailed(t, df)
    };
    Ok(CorrelationReport { rho, p_value, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeveneReport {
    pub f: f64,
    pub p_value: f64,
    pub df1: f64,
    pub df2: f64,
}

/// Levene's test for equal variances of two groups (mean-centred).
pub fn levene_test(a: &[f64], b: &[f64]) -> Result<LeveneReport, AnalysisError> {
    for g in [a, b] {
        if g.len() < 2 {
            return Err(AnalysisError::TooFew { n: g.len(), min: 2 });
        }
        check_finite(g)?;
    }
    let deviations = |g: &[f64]| {
        let m = mean(g);
        g.iter().map(|x| (x - m).abs()).collect::<Vec<_>>()
    };
    let (za, zb) = (deviations(a), deviations(b));
    let (ma, mb) = (mean(&za), mean(&zb));
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let total = n1 + n2;

    // for two groups, sum n_i (Zbar_i - Zbar)^2 = n1 n2 / N (Zbar_1 - Zbar_2)^2
    let between = n1 * n2 / total * (ma - mb).powi(2);
    let within: f64 =
        za.iter().map(|z| (z - ma).powi(2)).sum::<f64>() + zb.iter().map(|z| (z - mb).powi(2)).sum::<f64>();
    let df2 = total - 2.0;
    let (f, p_value) = if within == 0.0 {
        if between == 0.0 {
            return Err(AnalysisError::DegenerateGroups);
        }
        (f64::INFINITY, 0.0)
    } else {
        let f = between / (within / df2);
        (f, f_survival(f, 1.0, df2))
    };
    Ok(LeveneReport { f, p_value, df1: 1.0, df2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestRow {
    pub t: f64,
    pub df: f64,
    pub p_two_tailed: f64,
    pub mean_difference: f64,
    pub std_error_difference: f64,
    pub ci95: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestReport {
    /// Absent when both groups have no spread.
    pub levene: Option<LeveneReport>,
    pub equal_variances: TTestRow,
    pub unequal_variances: TTestRow,
}

impl TTestReport {
    pub fn t(&self) -> f64 {
        self.equal_variances.t
    }
}

fn t_row(mean_difference: f64, se: f64, df: f64) -> Result<TTestRow, AnalysisError> {
    let (t, p) = if se == 0.0 {
        if mean_difference != 0.0 {
            return Err(AnalysisError::UndefinedT);
        }
        (0.0, 1.0)
    } else {
        let t = mean_difference / se;
        (t, student_t_two_tailed(t, df))
    };
    let half = student_t_quantile(0.975, df) * se;
    Ok(TTestRow {
        t,
        df,
        p_two_tailed: p,
        mean_difference,
        std_error_difference: se,
        ci95: (mean_difference - half, mean_difference + half),
    })
}

/// Independent-samples t-test of `mean(a) - mean(b)`.
pub fn independent_t_test(a: &[f64], b: &[f64]) -> Result<TTestReport, AnalysisError> {
    for g in [a, b] {
        if g.len() < 2 {
            return Err(AnalysisError::TooFew { n: g.len(), min: 2 });
        }
        check_finite(g)?;
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let (v1, v2) = (sample_variance(a), sample_variance(b));
    let md = mean(a) - mean(b);

    let df = n1 + n2 - 2.0;
    let pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / df;
    let equal_variances = t_row(md, (pooled * (1.0 / n1 + 1.0 / n2)).sqrt(), df)?;

    let (q1, q2) = (v1 / n1, v2 / n2);
    let welch_df = if q1 + q2 == 0.0 {
        df
    } else {
        (q1 + q2).powi(2) / (q1 * q1 / (n1 - 1.0) + q2 * q2 / (n2 - 1.0))
    };
    let unequal_variances = t_row(md, (q1 + q2).sqrt(), welch_df)?;

    let levene = match levene_test(a, b) {
        Ok(l) => Some(l),
        Err(AnalysisError::DegenerateGroups) => None,
        Err(e) => return Err(e),
    };
    Ok(TTestReport { levene, equal_variances, unequal_variances })
}

/// Side-by-side ranking of two optimized profiles with the comparison statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelComparison {
    pub cause_ids: Vec<String>,
    pub labels: [String; 2],
    /// Best-fitness values, absent when the inputs were ranks already.
    pub best_fitness: Option<[Vec<f64>; 2]>,
    pub ranks: [Vec<f64>; 2],
    pub spearman: CorrelationReport,
    pub t_test: TTestReport,
}

/// Compares two rank vectors directly (no re-ranking).
pub fn compare_ranks(
    catalog: &CauseCatalog,
    labels: [&str; 2],
    ranks_a: &[f64],
    ranks_b: &[f64],
) -> Result<ModelComparison, AnalysisError> {
    for r in [ranks_a, ranks_b] {
        if r.len() != catalog.len() {
            return Err(AnalysisError::LengthMismatch { a: catalog.len(), b: r.len() });
        }
    }
    Ok(ModelComparison {
        cause_ids: catalog.ids().map(String::from).collect(),
        labels: labels.map(String::from),
        best_fitness: None,
        ranks: [ranks_a.to_vec(), ranks_b.to_vec()],
        spearman: spearman(ranks_a, ranks_b)?,
        t_test: independent_t_test(ranks_a, ranks_b)?,
    })
}

/// Dense-ranks two best-fitness vectors and compares the ranks.
pub fn compare_fitness(
    catalog: &CauseCatalog,
    labels: [&str; 2],
    fitness_a: &[f64],
    fitness_b: &[f64],
) -> Result<ModelComparison, AnalysisError> {
    let to_f64 = |r: Vec<usize>| r.into_iter().map(|x| x as f64).collect::<Vec<_>>();
    let ra = to_f64(dense_rank_descending(fitness_a)?);
    let rb = to_f64(dense_rank_descending(fitness_b)?);
    let mut cmp = compare_ranks(catalog, labels, &ra, &rb)?;
    cmp.best_fitness = Some([fitness_a.to_vec(), fitness_b.to_vec()]);
    Ok(cmp)
}

/// Compares the best chromosomes of an NBC-driven and an LR-driven run.
pub fn compare_models(result_nbc: &GaRunResult, result_lr: &GaRunResult) -> Result<ModelComparison, AnalysisError> {
    if !result_nbc.catalog.same_ids(&result_lr.catalog) {
        return Err(AnalysisError::CatalogMismatch);
    }
    let genes = |r: &GaRunResult| r.best.chromosome.genes().iter().map(|&g| g as f64).collect::<Vec<_>>();
    compare_fitness(&result_nbc.catalog, ["GA-NBC", "GA-LR"], &genes(result_nbc), &genes(result_lr))
}

fn fmt_num(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else {
        format!("{v:.2}")
    }
}

fn fmt_p(p: f64) -> String {
    if p < 1e-3 {
        format!("{p:.3e}")
    } else {
        format!("{p:.3}")
    }
}

impl ModelComparison {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("comparison serializes") + "\n"
    }

    /// Aligned plain-text rendering: ranking matrix, correlation and t-test tables.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let label_w = self.labels.iter().map(String::len).max().unwrap_or(0).max(5);
        let cell_w = self.cause_ids.iter().map(String::len).max().unwrap_or(2).max(4);

        out.push_str("Best fitness ranking of causes\n");
        let _ = write!(out, "{:<label_w$}  {:<12}", "Model", "Particulars");
        for id in &self.cause_ids {
            let _ = write!(out, " {id:>cell_w$}");
        }
        out.push('\n');
        for (k, label) in self.labels.iter().enumerate() {
            let mut rows: Vec<(&str, &Vec<f64>)> = Vec::new();
            if let Some(fit) = &self.best_fitness {
                rows.push(("Best fitness", &fit[k]));
            }
            rows.push(("Ranks", &self.ranks[k]));
            for (i, (name, values)) in rows.into_iter().enumerate() {
                let shown = if i == 0 { label.as_str() } else { "" };
                let _ = write!(out, "{shown:<label_w$}  {name:<12}");
                for v in values {
                    let _ = write!(out, " {:>cell_w$}", fmt_num(*v));
                }
                out.push('\n');
            }
        }

        let s = &self.spearman;
        out.push_str("\nSpearman rank correlation\n");
        let _ = writeln!(out, "  rho = {:.3}   Sig. (2-tailed) = {}   N = {}", s.rho, fmt_p(s.p_value), s.n);

        out.push_str("\nLevene's test for equality of variances\n");
        match &self.t_test.levene {
            Some(l) => {
                let _ = writeln!(out, "  F = {:.3}   Sig. = {}", l.f, fmt_p(l.p_value));
            }
            None => out.push_str("  undefined (no spread in either group)\n"),
        }

        out.push_str("\nIndependent samples t-test\n");
        let _ = writeln!(
            out,
            "  {:<28} {:>8} {:>8} {:>10} {:>10} {:>10} {:>10} {:>10}",
            "", "t", "df", "Sig.", "Mean diff", "Std. err", "CI lower", "CI upper"
        );
        for (name, row) in [
            ("Equal variances assumed", &self.t_test.equal_variances),
            ("Equal variances not assumed", &self.t_test.unequal_variances),
        ] {
            let _ = writeln!(
                out,
                "  {:<28} {:>8.3} {:>8.3} {:>10} {:>10.5} {:>10.5} {:>10.5} {:>10.5}",
                name,
                row.t,
                row.df,
                fmt_p(row.p_two_tailed),
                row.mean_difference,
                row.std_error_difference,
                row.ci95.0,
                row.ci95.1
            );
        }
        out
    }

    /// One row per cause with values and ranks, then one `statistic,value` block.
    pub fn to_csv(&self) -> String {
        let [a, b] = &self.labels;
        let mut out = format!("cause,{a}_fitness,{b}_fitness,{a}_rank,{b}_rank\n");
        for (i, id) in self.cause_ids.iter().enumerate() {
            let fit = |k: usize| self.best_fitness.as_ref().map(|f| fmt_num(f[k][i])).unwrap_or_default();
            let _ = writeln!(out, "{id},{},{},{},{}", fit(0), fit(1), fmt_num(self.ranks[0][i]), fmt_num(self.ranks[1][i]));
        }
        let t = &self.t_test;
        let mut stats = vec![("spearman_rho", self.spearman.rho), ("spearman_p", self.spearman.p_value)];
        if let Some(l) = &t.levene {
            stats.extend([("levene_f", l.f), ("levene_p", l.p_value)]);
        }
        let rows = [
            ("pooled_t", "pooled_df", "pooled_p", "pooled_mean_difference", "pooled_std_error", "pooled_ci95_lower", "pooled_ci95_upper", &t.equal_variances),
            ("welch_t", "welch_df", "welch_p", "welch_mean_difference", "welch_std_error", "welch_ci95_lower", "welch_ci95_upper", &t.unequal_variances),
        ];
        for (kt, kdf, kp, km, ks, kl, ku, row) in rows {
            stats.extend([
                (kt, row.t),
                (kdf, row.df),
                (kp, row.p_two_tailed),
                (km, row.mean_difference),
                (ks, row.std_error_difference),
                (kl, row.ci95.0),
                (ku, row.ci95.1),
            ]);
        }
        out.push_str("\nstatistic,value\n");
        for (k, v) in stats {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }
}
