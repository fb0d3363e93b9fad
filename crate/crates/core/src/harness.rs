//! Replicated experiments and the Table-2 / Table-3 report rows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::de::{de_optimize, DeConfig};
use crate::domain::{GenerationCounters, Point, RunResult};
use crate::error::{Result, RmcError};
use crate::objectives::{ObjectiveId, ObjectiveSpec};
use crate::operators::improves;
use crate::optimizer::{rmc_optimize, RmcConfig};

pub const DEFAULT_RMC_REPLICATES: usize = 200;
pub const DEFAULT_DE_REPLICATES: usize = 1000;
/// DE stops once it is this close to the known optimum.
pub const DE_TARGET_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AlgorithmConfig {
    Rmc(RmcConfig),
    De(DeConfig),
}

impl AlgorithmConfig {
    pub fn label(&self) -> &'static str {
        match self {
            AlgorithmConfig::Rmc(_) => "RMCGA",
            AlgorithmConfig::De(_) => "DE(F: RandomValues)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub objective: ObjectiveSpec,
    pub algorithm: AlgorithmConfig,
    pub replicates: usize,
    pub base_seed: u64,
}

impl ExperimentSpec {
    pub fn rmc(id: ObjectiveId) -> Self {
        Self {
            objective: ObjectiveSpec::new(id),
            algorithm: AlgorithmConfig::Rmc(RmcConfig::default()),
            replicates: DEFAULT_RMC_REPLICATES,
            base_seed: 0,
        }
    }

    /// DE with its target set to the known optimum.
    pub fn de(id: ObjectiveId) -> Self {
        let objective = ObjectiveSpec::new(id);
        let mut config = DeConfig::default();
        if let Some(v) = objective.known_best_value {
            config = config.with_target(v, DE_TARGET_TOLERANCE);
        }
        Self {
            objective,
            algorithm: AlgorithmConfig::De(config),
            replicates: DEFAULT_DE_REPLICATES,
            base_seed: 0,
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_base_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(RmcError::Config("replicates must be at least 1".into()));
        }
        match &self.algorithm {
            AlgorithmConfig::Rmc(c) => c.validate(),
            AlgorithmConfig::De(c) => c.validate(self.objective.dimension),
        }
    }

    pub fn seed_for(&self, replicate: usize) -> u64 {
        self.base_seed.wrapping_add(replicate as u64)
    }
}

/// One run with every random choice (search and objective noise) derived from `seed`.
pub fn run_once(spec: &ExperimentSpec, seed: u64) -> Result<RunResult> {
    let objective = spec.objective.evaluator(seed);
    let bounds = &spec.objective.bounds;
    let goal = spec.objective.goal;
    match &spec.algorithm {
        AlgorithmConfig::Rmc(c) => rmc_optimize(objective, bounds, goal, &c.clone().with_seed(seed)),
        AlgorithmConfig::De(c) => de_optimize(objective, bounds, goal, &c.clone().with_seed(seed)),
    }
}

/// Runs `spec.replicates` independent runs with seeds `base_seed + k`.
///
/// Runs execute in parallel; the output is ordered by `k` and identical to a
/// sequential execution. A failing run yields an `Err` entry in its slot.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Result<RunResult>>> {
    spec.validate()?;
    Ok((0..spec.replicates)
        .into_par_iter()
        .map(|k| run_once(spec, spec.seed_for(k)))
        .collect())
}

/// Successful runs only, in replicate order.
pub fn successful(results: &[Result<RunResult>]) -> Vec<RunResult> {
    results.iter().filter_map(|r| r.as_ref().ok().cloned()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub function_id: ObjectiveId,
    /// Smallest mutation step (RMC only).
    pub rms: Option<f64>,
    pub trm: f64,
    pub tc: f64,
    pub best_point: Point,
    pub bp: f64,
    /// Deterministic part of the objective at `best_point` (differs from `bp` only for F4).
    pub bp_noiseless: f64,
    pub sd: f64,
    pub runs: usize,
    /// Counters of the run that produced `best_point`.
    pub best_run: GenerationCounters,
}

/// Population standard deviation.
fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

pub fn summarize_table2(results: &[RunResult], spec: &ExperimentSpec) -> Result<Table2Row> {
    if results.is_empty() {
        return Err(RmcError::Domain("cannot summarize an empty result list".into()));
    }
    let n = results.len() as f64;
    let goal = spec.objective.goal;
    let mut best = &results[0];
    for r in &results[1..] {
        if improves(r.best_fitness, best.best_fitness, goal) {
            best = r;
        }
    }
    let known = spec.objective.known_best_value.unwrap_or(0.0);
    let errors: Vec<f64> = results.iter().map(|r| r.best_fitness - known).collect();
    Ok(Table2Row {
        function_id: spec.objective.id,
        rms: match &spec.algorithm {
            AlgorithmConfig::Rmc(c) => c.alpha_ladder.first().copied(),
            AlgorithmConfig::De(_) => None,
        },
        trm: results.iter().map(|r| r.counters.trm as f64).sum::<f64>() / n,
        tc: results.iter().map(|r| r.counters.tc as f64).sum::<f64>() / n,
        best_point: best.best_point.clone(),
        bp: best.best_fitness,
        bp_noiseless: spec.objective.noiseless(&best.best_point.coords)?,
        sd: std_dev(&errors),
        runs: results.len(),
        best_run: best.counters,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSource {
    Measured,
    LiteratureConstant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table3Row {
    pub algorithm_label: String,
    /// Mean generations on F1..F5.
    pub generations: [f64; 5],
    pub source: RowSource,
}

fn literature_row(label: &str, values: [f64; 5]) -> Table3Row {
    Table3Row {
        algorithm_label: label.to_string(),
        generations: values,
        source: RowSource::LiteratureConstant,
    }
}

pub const RMCGA_LABEL: &str = "RMCGA";
pub const DE_LABEL: &str = "DE(F: RandomValues)";

/// Published average generations; not re-implemented here.
pub fn literature_table3() -> Vec<Table3Row> {
    vec![
        literature_row("PGA(lambda=4)", [1170.0, 1235.0, 3481.0, 3194.0, 1256.0]),
        literature_row("PGA(lambda=8)", [1526.0, 1671.0, 3634.0, 5243.0, 2076.0]),
        literature_row("Grefensstette", [2210.0, 14229.0, 2259.0, 3070.0, 4334.0]),
        literature_row("Eshelman", [1538.0, 9477.0, 1740.0, 4137.0, 3004.0]),
        literature_row(DE_LABEL, [260.0, 670.0, 125.0, 2300.0, 1200.0]),
        literature_row(RMCGA_LABEL, [157.0, 35.0, 5.0, 36.0, 1010.0]),
    ]
}

/// Published per-function TRM / TC pairs for RMC.
pub const LITERATURE_TABLE2_COUNTS: [(ObjectiveId, u64, u64); 5] = [
    (ObjectiveId::F1, 55, 102),
    (ObjectiveId::F2, 15, 20),
    (ObjectiveId::F3, 4, 1),
    (ObjectiveId::F4, 15, 21),
    (ObjectiveId::F5, 340, 670),
];

/// How many times fewer generations RMC needed than the reference.
pub fn compute_png(reference_generations: f64, rmc_generations: f64) -> Result<f64> {
    if !(reference_generations > 0.0 && rmc_generations > 0.0)
        || !reference_generations.is_finite()
        || !rmc_generations.is_finite()
    {
        return Err(RmcError::Domain(format!(
            "generation counts must be positive, got {reference_generations} and {rmc_generations}"
        )));
    }
    Ok(reference_generations / rmc_generations)
}

/// Truncates (not rounds) to three decimals, as the published PNG row does.
pub fn truncate_3(x: f64) -> f64 {
    (x * 1000.0).floor() / 1000.0
}

pub fn png_row(reference: &Table3Row, rmc: &Table3Row) -> Result<[f64; 5]> {
    let mut out = [0.0; 5];
    for (i, v) in out.iter_mut().enumerate() {
        *v = compute_png(reference.generations[i], rmc.generations[i])?;
    }
    Ok(out)
}

pub fn mean_generations(results: &[RunResult]) -> Option<f64> {
    if results.is_empty() {
        return None;
    }
    Some(results.iter().map(|r| r.generations() as f64).sum::<f64>() / results.len() as f64)
}

/// Measures mean generations on F1..F5 for one algorithm.
pub fn measure_table3_row(
    algorithm: &AlgorithmConfig,
    replicates: usize,
    base_seed: u64,
) -> Result<Table3Row> {
    let mut generations = [0.0; 5];
    for (slot, id) in generations.iter_mut().zip(ObjectiveId::DE_JONG) {
        let mut spec = match algorithm {
            AlgorithmConfig::Rmc(_) => ExperimentSpec::rmc(id),
            AlgorithmConfig::De(_) => ExperimentSpec::de(id),
        };
        // keep the per-function DE target, take everything else from the caller
        spec.algorithm = match (algorithm, &spec.algorithm) {
            (AlgorithmConfig::De(user), AlgorithmConfig::De(defaulted)) => {
                let mut c = user.clone();
                if c.target_value.is_none() {
                    c.target_value = defaulted.target_value;
                    c.target_tolerance = defaulted.target_tolerance;
                }
                AlgorithmConfig::De(c)
            }
            _ => algorithm.clone(),
        };
        spec.replicates = replicates;
        spec.base_seed = base_seed;
        let ok = successful(&run_experiment(&spec)?);
        *slot = mean_generations(&ok).ok_or_else(|| {
            RmcError::Initialization(format!("every {} run on {} failed", algorithm.label(), id))
        })?;
    }
    Ok(Table3Row {
        algorithm_label: algorithm.label().to_string(),
        generations,
        source: RowSource::Measured,
    })
}
