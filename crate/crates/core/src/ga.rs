//! Genetic algorithm over bounded integer factor profiles.
//!
//! A chromosome holds one scale per cause. Fitness is the efficacy
//! `P(success) - normalized_cost`, which lies in `[-1, 1]`. Each generation:
//!
//! 1. every member is evaluated against the predictor and cost table;
//! 2. `population_size / 2` parent pairs are drawn by roulette wheel on the
//!    shifted weight `efficacy + 1`;
//! 3. each pair is recombined by single-point crossover and each child is
//!    mutated gene by gene;
//! 4. the children replace the whole population.
//!
//! The best chromosome ever evaluated is tracked outside the population and
//! returned as the run's solution. All randomness comes from one seeded
//! generator consumed in a fixed order, so a seed reproduces a run exactly.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{ModelError, SuccessPredictor};
use crate::cost::{CostError, CostTable};
use crate::dataset::{CauseCatalog, SCALE_MAX, SCALE_MIN};
use crate::rng::{self, Rng};

/// Largest state count [`exhaustive_search`] enumerates by default.
pub const DEFAULT_EXHAUSTIVE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("invalid GA parameters: {0}")]
    InvalidParams(String),
    #[error("malformed run result: {0}")]
    MalformedResult(String),
    #[error("predictor expects {predictor} causes but the cost table has {table}")]
    DimensionMismatch { predictor: usize, table: usize },
    #[error("parents differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("internal fault: gene {index} = {value} left the feasible range")]
    Infeasible { index: usize, value: u8 },
    #[error("search space of {states} states exceeds the budget of {budget}")]
    BudgetExceeded { states: String, budget: u64 },
    #[error(transparent)]
    Predictor(#[from] ModelError),
    #[error(transparent)]
    Cost(#[from] CostError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    #[default]
    RouletteWheel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossoverMethod {
    #[default]
    SinglePoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub max_iterations: usize,
    pub population_size: usize,
    pub s_min: u8,
    pub s_max: u8,
    pub crossover_probability: f64,
    pub mutation_probability: f64,
    pub selection: SelectionMethod,
    pub crossover: CrossoverMethod,
    pub seed: u64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            population_size: 50,
            s_min: 1,
            s_max: 9,
            crossover_probability: 0.8,
            mutation_probability: 0.1,
            selection: SelectionMethod::RouletteWheel,
            crossover: CrossoverMethod::SinglePoint,
            seed: 42,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |m: String| Err(GaError::InvalidParams(m));
        if self.population_size < 2 {
            return bad(format!("population size must be >= 2, got {}", self.population_size));
        }
        for (name, p) in [("crossover", self.crossover_probability), ("mutation", self.mutation_probability)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} probability must lie in [0,1], got {p}"));
            }
        }
        if self.s_min > self.s_max {
            return bad(format!("s_min {} exceeds s_max {}", self.s_min, self.s_max));
        }
        if self.s_min < SCALE_MIN || self.s_max > SCALE_MAX {
            return bad(format!("gene bounds [{}, {}] must lie within [1, 9]", self.s_min, self.s_max));
        }
        Ok(())
    }

    fn gene_range(&self) -> std::ops::RangeInclusive<u8> {
        self.s_min..=self.s_max
    }
}

/// Ordered scale values, one per cause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chromosome(Vec<u8>);

impl Chromosome {
    pub fn new(genes: Vec<u8>) -> Self {
        Self(genes)
    }

    pub fn genes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_within(&self, s_min: u8, s_max: u8) -> bool {
        self.0.iter().all(|g| (s_min..=s_max).contains(g))
    }
}

impl From<Vec<u8>> for Chromosome {
    fn from(v: Vec<u8>) -> Self {
        Self(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedChromosome {
    pub chromosome: Chromosome,
    pub success_probability: f64,
    pub raw_cost: u32,
    pub normalized_cost: f64,
    pub efficacy: f64,
}

/// Best-so-far and population statistics for one generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_efficacy: f64,
    pub mean_efficacy: f64,
    pub best_probability: f64,
    pub best_norm_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaRunResult {
    pub catalog: CauseCatalog,
    /// Highest-efficacy chromosome evaluated during the run.
    pub best: EvaluatedChromosome,
    /// Highest-efficacy member of the random initial population.
    pub initial_best: EvaluatedChromosome,
    pub initial_mean_probability: f64,
    pub initial_mean_cost: f64,
    /// Highest-efficacy member of the last generation.
    pub final_generation_best: EvaluatedChromosome,
    /// One record per generation; generation 0 is the initial population.
    pub trace: Vec<GenerationRecord>,
    pub generations_run: usize,
}

impl GaRunResult {
    pub const TRACE_HEADER: &'static str = "generation,best_efficacy,mean_efficacy,best_probability,best_norm_cost";

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run result serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, GaError> {
        serde_json::from_str(text).map_err(|e| GaError::MalformedResult(e.to_string()))
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from(Self::TRACE_HEADER);
        out.push('\n');
        for r in &self.trace {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.generation, r.best_efficacy, r.mean_efficacy, r.best_probability, r.best_norm_cost
            ));
        }
        out
    }
}

/// Computes probability, cost and efficacy `p - norm(C)` for one chromosome.
pub fn evaluate<P: SuccessPredictor + ?Sized>(
    chromosome: &Chromosome,
    predictor: &P,
    table: &CostTable,
) -> Result<EvaluatedChromosome, GaError> {
    if let Some(index) = chromosome.genes().iter().position(|g| !(SCALE_MIN..=SCALE_MAX).contains(g)) {
        return Err(GaError::Infeasible { index, value: chromosome.genes()[index] });
    }
    let p = predictor.predict(chromosome.genes())?;
    let raw_cost = table.cost_of(chromosome.genes())?;
    let normalized_cost = table.normalize(raw_cost);
    Ok(EvaluatedChromosome {
        chromosome: chromosome.clone(),
        success_probability: p,
        raw_cost,
        normalized_cost,
        efficacy: p - normalized_cost,
    })
}

/// `population_size` chromosomes of `n` genes drawn uniformly from `[s_min, s_max]`.
pub fn initialize_population(params: &GaParams, n: usize, rng: &mut Rng) -> Vec<Chromosome> {
    (0..params.population_size)
        .map(|_| Chromosome((0..n).map(|_| rng.random_range(params.gene_range())).collect()))
        .collect()
}

/// Index chosen by roulette wheel on weights `efficacy + 1`.
///
/// Falls back to a uniform draw when every weight is zero.
pub fn roulette_index(population: &[EvaluatedChromosome], rng: &mut Rng) -> usize {
    assert!(!population.is_empty(), "roulette selection from an empty population");
    let weight = |e: &EvaluatedChromosome| (e.efficacy + 1.0).max(0.0);
    let total: f64 = population.iter().map(weight).sum();
    if total <= 0.0 {
        return rng.random_range(0..population.len());
    }
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, e) in population.iter().enumerate() {
        acc += weight(e);
        if acc > target {
            return i;
        }
    }
    // rounding can leave target at the very top of the wheel
    population.iter().rposition(|e| weight(e) > 0.0).unwrap_or(population.len() - 1)
}

pub fn roulette_select<'a>(population: &'a [EvaluatedChromosome], rng: &mut Rng) -> &'a EvaluatedChromosome {
    &population[roulette_index(population, rng)]
}

/// Swaps the gene suffixes of two parents starting at position `cut`.
pub fn crossover_at(a: &Chromosome, b: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    let mut c1 = a.0[..cut].to_vec();
    c1.extend_from_slice(&b.0[cut..]);
    let mut c2 = b.0[..cut].to_vec();
    c2.extend_from_slice(&a.0[cut..]);
    (Chromosome(c1), Chromosome(c2))
}

/// With probability `crossover_probability`, cuts at a uniform point in
/// `[1, n-1]` and swaps suffixes; otherwise returns copies of the parents.
pub fn single_point_crossover(
    a: &Chromosome,
    b: &Chromosome,
    params: &GaParams,
    rng: &mut Rng,
) -> Result<(Chromosome, Chromosome), GaError> {
    if a.len() != b.len() {
        return Err(GaError::LengthMismatch { a: a.len(), b: b.len() });
    }
    if rng.random::<f64>() < params.crossover_probability && a.len() >= 2 {
        let cut = rng.random_range(1..a.len());
        Ok(crossover_at(a, b, cut))
    } else {
        Ok((a.clone(), b.clone()))
    }
}

/// Replaces each gene, with probability `mutation_probability`, by a uniform
/// draw from `[s_min, s_max]`.
pub fn random_mutate(chromosome: &Chromosome, params: &GaParams, rng: &mut Rng) -> Chromosome {
    let genes = chromosome
        .0
        .iter()
        .map(|&g| {
            if rng.random::<f64>() < params.mutation_probability {
                rng.random_range(params.gene_range())
            } else {
                g
            }
        })
        .collect();
    Chromosome(genes)
}

/// Builds the next generation from an evaluated population.
pub fn breed(population: &[EvaluatedChromosome], params: &GaParams, rng: &mut Rng) -> Result<Vec<Chromosome>, GaError> {
    let mut children = Vec::with_capacity(params.population_size);
    for _ in 0..params.population_size / 2 {
        let a = &roulette_select(population, rng).chromosome;
        let b = &roulette_select(population, rng).chromosome;
        let (c1, c2) = single_point_crossover(a, b, params, rng)?;
        children.push(random_mutate(&c1, params, rng));
        children.push(random_mutate(&c2, params, rng));
    }
    if params.population_size % 2 == 1 {
        let extra = roulette_select(population, rng).chromosome.clone();
        children.push(random_mutate(&extra, params, rng));
    }
    Ok(children)
}

fn check_dimensions<P: SuccessPredictor + ?Sized>(predictor: &P, table: &CostTable) -> Result<(), GaError> {
    if predictor.n_causes() != table.n_causes() {
        return Err(GaError::DimensionMismatch { predictor: predictor.n_causes(), table: table.n_causes() });
    }
    Ok(())
}

fn evaluate_all<P: SuccessPredictor + ?Sized>(
    population: &[Chromosome],
    predictor: &P,
    table: &CostTable,
) -> Result<Vec<EvaluatedChromosome>, GaError> {
    population.iter().map(|c| evaluate(c, predictor, table)).collect()
}

/// First member with the highest efficacy.
fn fittest(population: &[EvaluatedChromosome]) -> &EvaluatedChromosome {
    population
        .iter()
        .reduce(|best, e| if e.efficacy > best.efficacy { e } else { best })
        .expect("population is non-empty")
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Runs the full generational loop for `max_iterations` generations.
pub fn run_ga<P: SuccessPredictor + ?Sized>(
    params: &GaParams,
    predictor: &P,
    table: &CostTable,
) -> Result<GaRunResult, GaError> {
    params.validate()?;
    check_dimensions(predictor, table)?;
    let mut rng = rng::seeded(params.seed);

    let population = initialize_population(params, table.n_causes(), &mut rng);
    let mut evaluated = evaluate_all(&population, predictor, table)?;
    let initial_best = fittest(&evaluated).clone();
    let initial_mean_probability = mean(evaluated.iter().map(|e| e.success_probability));
    let initial_mean_cost = mean(evaluated.iter().map(|e| e.normalized_cost));
    let mut best = initial_best.clone();

    let record = |generation: usize, best: &EvaluatedChromosome, pop: &[EvaluatedChromosome]| GenerationRecord {
        generation,
        best_efficacy: best.efficacy,
        mean_efficacy: mean(pop.iter().map(|e| e.efficacy)),
        best_probability: best.success_probability,
        best_norm_cost: best.normalized_cost,
    };
    let mut trace = Vec::with_capacity(params.max_iterations + 1);
    trace.push(record(0, &best, &evaluated));

    for generation in 1..=params.max_iterations {
        let children = breed(&evaluated, params, &mut rng)?;
        evaluated = evaluate_all(&children, predictor, table)?;
        let candidate = fittest(&evaluated);
        if candidate.efficacy > best.efficacy {
            best = candidate.clone();
        }
        trace.push(record(generation, &best, &evaluated));
    }

    Ok(GaRunResult {
        catalog: table.catalog().clone(),
        final_generation_best: fittest(&evaluated).clone(),
        best,
        initial_best,
        initial_mean_probability,
        initial_mean_cost,
        trace,
        generations_run: params.max_iterations,
    })
}

/// Enumerates every chromosome in `[s_min, s_max]^n` and returns the first
/// one with maximal efficacy. Refuses when the space exceeds `budget`.
pub fn exhaustive_search<P: SuccessPredictor + ?Sized>(
    predictor: &P,
    table: &CostTable,
    params: &GaParams,
    budget: u64,
) -> Result<EvaluatedChromosome, GaError> {
    params.validate()?;
    check_dimensions(predictor, table)?;
    let n = table.n_causes();
    let width = (params.s_max - params.s_min + 1) as u64;
    let states = u32::try_from(n).ok().and_then(|n| width.checked_pow(n));
    match states {
        Some(s) if s <= budget => {}
        _ => {
            let states = states.map_or_else(|| format!("{width}^{n}"), |s| s.to_string());
            return Err(GaError::BudgetExceeded { states, budget });
        }
    }

    let mut genes = vec![params.s_min; n];
    let mut best: Option<EvaluatedChromosome> = None;
    loop {
        let e = evaluate(&Chromosome(genes.clone()), predictor, table)?;
        if best.as_ref().is_none_or(|b| e.efficacy > b.efficacy) {
            best = Some(e);
        }
        // odometer increment, last gene fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(best.expect("at least one state"));
            }
            i -= 1;
            if genes[i] < params.s_max {
                genes[i] += 1;
                break;
            }
            genes[i] = params.s_min;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{ConstantPredictor, TrainedLr};

    fn evaluated(efficacy: f64) -> EvaluatedChromosome {
        EvaluatedChromosome {
            chromosome: Chromosome(vec![1]),
            success_probability: 0.0,
            raw_cost: 0,
            normalized_cost: 0.0,
            efficacy,
        }
    }

    #[test]
    fn defaults_match_parameter_table() {
        let p = GaParams::default();
        assert_eq!(p.max_iterations, 100);
        assert_eq!(p.population_size, 50);
        assert_eq!((p.s_min, p.s_max), (1, 9));
        assert_eq!(p.crossover_probability, 0.8);
        assert_eq!(p.mutation_probability, 0.1);
        assert_eq!(p.selection, SelectionMethod::RouletteWheel);
        assert_eq!(p.crossover, CrossoverMethod::SinglePoint);
    }

    #[test]
    fn params_validation() {
        let ok = GaParams::default();
        assert!(ok.validate().is_ok());
        for bad in [
            GaParams { population_size: 1, ..ok.clone() },
            GaParams { crossover_probability: 1.1, ..ok.clone() },
            GaParams { mutation_probability: -0.1, ..ok.clone() },
            GaParams { s_min: 6, s_max: 5, ..ok.clone() },
            GaParams { s_min: 0, ..ok.clone() },
            GaParams { s_max: 10, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(GaError::InvalidParams(_))), "{bad:?}");
        }
    }

    #[test]
    fn efficacy_extremes() {
        let t = CostTable::builtin();
        let cheapest: Vec<u8> = (0..19)
            .map(|i| {
                let row = t.row(i);
                let min = row.iter().min().unwrap();
                row.iter().position(|c| c == min).unwrap() as u8 + 1
            })
            .collect();
        let priciest: Vec<u8> = (0..19)
            .map(|i| {
                let row = t.row(i);
                let max = row.iter().max().unwrap();
                row.iter().position(|c| c == max).unwrap() as u8 + 1
            })
            .collect();
        let one = ConstantPredictor::new(1.0, 19).unwrap();
        let zero = ConstantPredictor::new(0.0, 19).unwrap();
        assert_eq!(evaluate(&Chromosome(cheapest), &one, &t).unwrap().efficacy, 1.0);
        assert_eq!(evaluate(&Chromosome(priciest), &zero, &t).unwrap().efficacy, -1.0);
    }

    #[test]
    fn efficacy_cancels() {
        let t = CostTable::new(CauseCatalog::generic(1).unwrap(), vec![[0, 1, 2, 3, 4, 5, 6, 7, 8]]).unwrap();
        let half = ConstantPredictor::new(0.5, 1).unwrap();
        let e = evaluate(&Chromosome(vec![5]), &half, &t).unwrap();
        assert_eq!(e.normalized_cost, 0.5);
        assert_eq!(e.efficacy, 0.0);
    }

    #[test]
    fn evaluate_rejects_infeasible_gene() {
        let t = CostTable::builtin();
        let p = ConstantPredictor::new(0.5, 19).unwrap();
        let mut genes = vec![3u8; 19];
        genes[2] = 12;
        assert_eq!(evaluate(&Chromosome(genes), &p, &t), Err(GaError::Infeasible { index: 2, value: 12 }));
    }

    #[test]
    fn population_shape_and_bounds() {
        let params = GaParams::default();
        let pop = initialize_population(&params, 19, &mut rng::seeded(1));
        assert_eq!(pop.len(), 50);
        assert!(pop.iter().all(|c| c.len() == 19 && c.is_within(1, 9)));

        let fixed = GaParams { s_min: 5, s_max: 5, ..GaParams::default() };
        assert!(fixed.validate().is_ok());
        let pop = initialize_population(&fixed, 19, &mut rng::seeded(1));
        assert!(pop.iter().all(|c| c.genes().iter().all(|&g| g == 5)));

        let again = initialize_population(&params, 19, &mut rng::seeded(1));
        assert_eq!(initialize_population(&params, 19, &mut rng::seeded(1)), again);
    }

    #[test]
    fn roulette_single_candidate() {
        let pop = [evaluated(-0.3)];
        let mut r = rng::seeded(0);
        for _ in 0..100 {
            assert_eq!(roulette_index(&pop, &mut r), 0);
        }
    }

    #[test]
    fn roulette_zero_weight_never_chosen() {
        for pop in [[evaluated(1.0), evaluated(-1.0)], [evaluated(-1.0), evaluated(1.0)]] {
            let winner = pop.iter().position(|e| e.efficacy == 1.0).unwrap();
            let mut r = rng::seeded(3);
            for _ in 0..10_000 {
                assert_eq!(roulette_index(&pop, &mut r), winner);
            }
        }
    }

    #[test]
    fn roulette_uniform_when_all_weights_zero() {
        let pop = vec![evaluated(-1.0); 4];
        let mut r = rng::seeded(5);
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            counts[roulette_index(&pop, &mut r)] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 / 40_000.0 - 0.25).abs() < 0.02), "{counts:?}");
    }

    #[test]
    fn roulette_equal_efficacies_uniform() {
        let pop = vec![evaluated(0.3); 5];
        let mut r = rng::seeded(9);
        let mut counts = [0usize; 5];
        for _ in 0..100_000 {
            counts[roulette_index(&pop, &mut r)] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 / 100_000.0 - 0.2).abs() < 0.02), "{counts:?}");
    }

    #[test]
    fn crossover_suffix_swap() {
        let a = Chromosome(vec![1, 1, 1, 1]);
        let b = Chromosome(vec![9, 9, 9, 9]);
        let (c1, c2) = crossover_at(&a, &b, 2);
        assert_eq!(c1.genes(), &[1, 1, 9, 9]);
        assert_eq!(c2.genes(), &[9, 9, 1, 1]);
    }

    #[test]
    fn crossover_disabled_copies_parents() {
        let params = GaParams { crossover_probability: 0.0, ..GaParams::default() };
        let a = Chromosome(vec![1, 2, 3]);
        let b = Chromosome(vec![7, 8, 9]);
        let mut r = rng::seeded(0);
        for _ in 0..100 {
            let (c1, c2) = single_point_crossover(&a, &b, &params, &mut r).unwrap();
            assert_eq!((c1, c2), (a.clone(), b.clone()));
        }
    }

    #[test]
    fn crossover_always_cuts_inside() {
        let params = GaParams { crossover_probability: 1.0, ..GaParams::default() };
        let a = Chromosome(vec![1; 5]);
        let b = Chromosome(vec![9; 5]);
        let mut r = rng::seeded(0);
        for _ in 0..1000 {
            let (c1, _) = single_point_crossover(&a, &b, &params, &mut r).unwrap();
            // c1 = 1^k 9^(5-k) with 1 <= k <= 4
            let k = c1.genes().iter().take_while(|&&g| g == 1).count();
            assert!((1..=4).contains(&k));
            assert!(c1.genes()[k..].iter().all(|&g| g == 9));
        }
    }

    #[test]
    fn crossover_length_mismatch() {
        let mut r = rng::seeded(0);
        let err = single_point_crossover(&Chromosome(vec![1]), &Chromosome(vec![1, 2]), &GaParams::default(), &mut r);
        assert_eq!(err, Err(GaError::LengthMismatch { a: 1, b: 2 }));
    }

    #[test]
    fn mutation_disabled_is_identity() {
        let params = GaParams { mutation_probability: 0.0, ..GaParams::default() };
        let c = Chromosome(vec![4, 5, 6]);
        let mut r = rng::seeded(0);
        for _ in 0..100 {
            assert_eq!(random_mutate(&c, &params, &mut r), c);
        }
    }

    #[test]
    fn forced_mutation_is_uniform() {
        let params = GaParams { mutation_probability: 1.0, ..GaParams::default() };
        let c = Chromosome(vec![5]);
        let mut r = rng::seeded(21);
        let mut counts = [0usize; 9];
        for _ in 0..100_000 {
            counts[(random_mutate(&c, &params, &mut r).genes()[0] - 1) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 / 100_000.0 - 1.0 / 9.0).abs() < 0.02);
        }
    }

    #[test]
    fn breed_keeps_population_size() {
        let t = CostTable::builtin();
        let p = ConstantPredictor::new(0.5, 19).unwrap();
        for size in [2, 7, 50] {
            let params = GaParams { population_size: size, ..GaParams::default() };
            let mut r = rng::seeded(4);
            let pop = initialize_population(&params, 19, &mut r);
            let ev = evaluate_all(&pop, &p, &t).unwrap();
            assert_eq!(breed(&ev, &params, &mut r).unwrap().len(), size);
        }
    }

    #[test]
    fn zero_generations_reports_initial_population() {
        let t = CostTable::builtin();
        let p = ConstantPredictor::new(0.5, 19).unwrap();
        let params = GaParams { max_iterations: 0, ..GaParams::default() };
        let r = run_ga(&params, &p, &t).unwrap();
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.generations_run, 0);
        assert_eq!(r.best, r.initial_best);
        assert_eq!(r.final_generation_best, r.initial_best);
    }

    #[test]
    fn run_is_deterministic() {
        let t = CostTable::builtin();
        let lr = TrainedLr::from_coefficients(-5.0, (0..19).map(|i| (i % 3) as f64 * 0.1).collect());
        let params = GaParams { seed: 99, ..GaParams::default() };
        assert_eq!(run_ga(&params, &lr, &t).unwrap(), run_ga(&params, &lr, &t).unwrap());
    }

    #[test]
    fn run_rejects_dimension_mismatch() {
        let t = CostTable::builtin();
        let p = ConstantPredictor::new(0.5, 3).unwrap();
        assert_eq!(
            run_ga(&GaParams::default(), &p, &t).unwrap_err(),
            GaError::DimensionMismatch { predictor: 3, table: 19 }
        );
    }

    #[test]
    fn exhaustive_single_cause_picks_cheapest() {
        let t = CostTable::builtin().subset(&[13]).unwrap(); // C14: minimum at L
        let p = ConstantPredictor::new(0.5, 1).unwrap();
        let best = exhaustive_search(&p, &t, &GaParams::default(), DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        assert_eq!(best.chromosome.genes(), &[3]);
        assert_eq!(best.raw_cost, 2);
    }

    #[test]
    fn exhaustive_two_causes_matches_double_loop() {
        let t = CostTable::builtin().subset(&[5, 15]).unwrap();
        let lr = TrainedLr::from_coefficients(-4.0, vec![0.5, 0.3]);
        let got = exhaustive_search(&lr, &t, &GaParams::default(), DEFAULT_EXHAUSTIVE_BUDGET).unwrap();
        let mut want = (f64::NEG_INFINITY, 0, 0);
        for a in 1..=9u8 {
            for b in 1..=9u8 {
                let z = -4.0 + 0.5 * a as f64 + 0.3 * b as f64;
                let p = 1.0 / (1.0 + (-z).exp());
                let c = t.row(0)[(a - 1) as usize] + t.row(1)[(b - 1) as usize];
                let e = p - (c as f64 - t.min_total() as f64) / (t.max_total() - t.min_total()) as f64;
                if e > want.0 {
                    want = (e, a, b);
                }
            }
        }
        assert_eq!(got.chromosome.genes(), &[want.1, want.2]);
        assert!((got.efficacy - want.0).abs() < 1e-12);
    }

    #[test]
    fn exhaustive_budget_guard() {
        let t = CostTable::builtin();
        let p = ConstantPredictor::new(0.5, 19).unwrap();
        let err = exhaustive_search(&p, &t, &GaParams::default(), DEFAULT_EXHAUSTIVE_BUDGET).unwrap_err();
        assert!(matches!(err, GaError::BudgetExceeded { .. }));
        assert!(err.to_string().contains("1350851717672992089"));
    }

    #[test]
    fn trace_csv_layout() {
        let t = CostTable::builtin();
        let p = ConstantPredictor::new(0.5, 19).unwrap();
        let r = run_ga(&GaParams { max_iterations: 3, ..GaParams::default() }, &p, &t).unwrap();
        let csv = r.trace_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], GaRunResult::TRACE_HEADER);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("0,"));
        assert!(lines[4].starts_with("3,"));
    }
}
