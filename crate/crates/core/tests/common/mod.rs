#![allow(dead_code)]

use successopt::classifiers::{train_lr, LrHyperparams, TrainedLr};
use successopt::cost::CostTable;
use successopt::dataset::{generate_synthetic, SurveyDataset, SyntheticDataSpec};

/// Expert cost table as printed: one line per scale, one column per cause.
pub const TABLE_1: &str = "\
Scale	C1	C2	C3	C4	C5	C6	C7	C8	C9	C10	C11	C12	C13	C14	C15	C16	C17	C18	C19
EL	2	2	2	2	1	1	1	1	3	1	1	2	2	4	3	1	2	1	1
VL	3	2	2	2	2	2	1	1	3	2	2	3	3	3	3	1	2	4	2
L	3	2	3	3	2	2	2	2	4	2	3	3	3	2	4	2	4	3	2
SL	4	4	4	4	2	3	3	3	4	2	4	4	4	4	4	5	4	5	2
Neutral	5	5	4	4	4	4	5	4	5	5	5	5	5	4	5	4	5	5	4
SH	6	6	5	6	6	6	6	4	5	6	6	6	6	6	5	3	6	6	6
MH	6	6	6	6	6	6	6	5	6	6	7	7	7	7	6	5	7	7	8
VH	7	7	7	7	7	7	6	6	7	6	7	8	8	7	7	6	7	8	7
EH	8	8	8	8	7	7	7	8	8	7	8	9	9	8	8	8	8	9	7
";

/// Best-fitness rows of the GA-NBC and GA-LR runs.
pub const NBC_BEST_FITNESS: [f64; 19] = [7., 7., 2., 5., 4., 9., 2., 6., 6., 8., 8., 4., 6., 5., 3., 2., 3., 6., 2.];
pub const LR_BEST_FITNESS: [f64; 19] = [8., 7., 2., 5., 4., 7., 2., 6., 6., 8., 8., 3., 5., 5., 4., 1., 4., 7., 2.];

/// Reference rank rows.
pub const NBC_RANKS: [usize; 19] = [3, 3, 8, 5, 6, 1, 8, 4, 4, 2, 2, 6, 4, 5, 7, 8, 7, 4, 8];
pub const LR_RANKS: [usize; 19] = [1, 2, 7, 4, 5, 2, 7, 3, 3, 1, 1, 6, 4, 4, 5, 9, 5, 2, 7];

/// Parses the printed table into `costs[cause][scale - 1]`.
pub fn parse_table_1() -> Vec<[u32; 9]> {
    let lines: Vec<Vec<&str>> = TABLE_1.lines().map(|l| l.split('\t').collect()).collect();
    let n = lines[0].len() - 1;
    let mut costs = vec![[0u32; 9]; n];
    for (scale, line) in lines[1..].iter().enumerate() {
        for (cause, cell) in line[1..].iter().enumerate() {
            costs[cause][scale] = cell.parse().unwrap();
        }
    }
    costs
}

pub fn as_f64(v: &[usize]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// Posterior of success by counting matching rows directly, with the same
/// additive smoothing over nine levels.
pub fn brute_force_nbc(data: &SurveyDataset, alpha: f64, query: &[u8]) -> f64 {
    let mut joint = [0.0f64; 2];
    for (class, slot) in joint.iter_mut().enumerate() {
        let in_class: Vec<_> = data.rows().iter().filter(|r| r.outcome.as_index() == class).collect();
        let mut p = in_class.len() as f64 / data.len() as f64;
        for (i, &v) in query.iter().enumerate() {
            let hits = in_class.iter().filter(|r| r.scales[i] == v).count() as f64;
            p *= (hits + alpha) / (in_class.len() as f64 + 9.0 * alpha);
        }
        *slot = p;
    }
    joint[1] / (joint[0] + joint[1])
}

/// Central finite difference of `f` at `x`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[i] += h;
            down[i] -= h;
            (f(&up) - f(&down)) / (2.0 * h)
        })
        .collect()
}

/// Five causes whose rows cover the non-monotone cases of the table.
pub const FIVE_CAUSES: [usize; 5] = [0, 6, 13, 15, 18];

/// Cost table and LR model for the five-cause desk-scale problem.
pub fn five_cause_problem() -> (CostTable, TrainedLr) {
    let table = CostTable::builtin().subset(&FIVE_CAUSES).unwrap();
    let spec = SyntheticDataSpec::planted(table.catalog().clone(), 500);
    let data = generate_synthetic(&spec, 1).unwrap();
    let model = train_lr(&data, &LrHyperparams::default()).unwrap();
    (table, model)
}
