//! Domain types shared by the optimizers and the harness.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RmcError};

/// Axis-aligned hyperbox `[lower_i, upper_i]^n`.
///
/// Used both for the feasible region and for the contracting working box
/// that drives crossover geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl SearchBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(RmcError::Domain("search box needs at least one dimension".into()));
        }
        if lower.len() != upper.len() {
            return Err(RmcError::Domain(format!(
                "bound length mismatch: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(RmcError::Domain(format!("non-finite bound on axis {i}")));
            }
            if lo >= hi {
                return Err(RmcError::Domain(format!(
                    "degenerate axis {i}: lower {lo} >= upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// Same `[lower, upper]` interval on every axis.
    pub fn uniform(dimension: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dimension], vec![upper; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn midpoint(&self, axis: usize) -> f64 {
        0.5 * (self.lower[axis] + self.upper[axis])
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.dimension()).map(|i| self.midpoint(i)).collect()
    }

    /// Euclidean length of the main diagonal.
    pub fn diagonal(&self) -> f64 {
        (0..self.dimension())
            .map(|i| self.side(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn volume(&self) -> f64 {
        (0..self.dimension()).map(|i| self.side(i)).product()
    }

    /// Inclusive containment test.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dimension()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *lo <= *v && *v <= *hi)
    }

    pub fn contains_box(&self, other: &SearchBox) -> bool {
        other.dimension() == self.dimension()
            && (0..self.dimension())
                .all(|i| self.lower[i] <= other.lower[i] && other.upper[i] <= self.upper[i])
    }

    /// The corner selected by a sign vector: `+1` picks the upper bound, `-1` the lower.
    pub fn vertex(&self, signs: &SignVector) -> Vec<f64> {
        signs
            .signs()
            .iter()
            .enumerate()
            .map(|(i, &s)| if s > 0 { self.upper[i] } else { self.lower[i] })
            .collect()
    }
}

/// A point in the search space with its objective value cached once computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
    pub fitness: Option<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self {
            coords,
            fitness: None,
        }
    }

    pub fn with_fitness(coords: Vec<f64>, fitness: f64) -> Self {
        Self {
            coords,
            fitness: Some(fitness),
        }
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    /// Evaluates the objective unless a value is already cached.
    pub fn evaluate<F>(&mut self, objective: &mut F) -> f64
    where
        F: FnMut(&[f64]) -> f64,
    {
        match self.fitness {
            Some(v) => v,
            None => {
                let v = objective(&self.coords);
                self.fitness = Some(v);
                v
            }
        }
    }
}

/// A direction in `{+1, -1}^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignVector {
    signs: Vec<i8>,
}

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(RmcError::Domain("sign vector must be non-empty".into()));
        }
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(RmcError::Domain(format!("sign entry {bad} is not +1 or -1")));
        }
        Ok(Self { signs })
    }

    pub fn all_positive(dimension: usize) -> Self {
        Self {
            signs: vec![1; dimension],
        }
    }

    pub fn all_negative(dimension: usize) -> Self {
        Self {
            signs: vec![-1; dimension],
        }
    }

    /// Coordinate `i` is `-1` iff bit `i` of `index` is set.
    pub fn from_index(dimension: usize, index: u64) -> Self {
        let signs = (0..dimension)
            .map(|i| if i < 64 && (index >> i) & 1 == 1 { -1 } else { 1 })
            .collect();
        Self { signs }
    }

    pub(crate) fn from_bits(bits: &[bool]) -> Self {
        Self {
            signs: bits.iter().map(|&b| if b { -1 } else { 1 }).collect(),
        }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn dimension(&self) -> usize {
        self.signs.len()
    }

    pub fn component(&self, i: usize) -> f64 {
        f64::from(self.signs[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Goal {
    Minimize,
    Maximize,
}

/// TRM counts rotational-mutation passes, TC counts crossovers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationCounters {
    pub trm: u64,
    pub tc: u64,
}

impl GenerationCounters {
    pub fn generations(&self) -> u64 {
        self.trm + self.tc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminationReason {
    /// Mutation and redirection both failed and the last candidate fell outside the search space.
    LeftSearchSpace,
    /// Working box diagonal dropped below the configured tolerance.
    BoxCollapsed,
    GenerationCap,
    /// DE only: best fitness reached the configured target.
    TargetReached,
    /// DE only: population fitness spread vanished.
    PopulationConverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    Elitism,
    Mutation,
    Redirect,
    Crossover,
    Generation,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Elitism => "Elitism",
            EventKind::Mutation => "Mutation",
            EventKind::Redirect => "Redirect",
            EventKind::Crossover => "Crossover",
            EventKind::Generation => "Generation",
        }
    }
}

/// Incumbent snapshot taken right after an event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub generation: u64,
    pub event: EventKind,
    pub point: Vec<f64>,
    pub fitness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_point: Point,
    pub best_fitness: f64,
    pub counters: GenerationCounters,
    pub termination_reason: TerminationReason,
    pub evaluations: u64,
    pub trajectory: Vec<TraceEvent>,
    /// Working box before the first crossover and after each one.
    pub boxes: Vec<SearchBox>,
}

impl RunResult {
    pub fn generations(&self) -> u64 {
        self.counters.generations()
    }
}
