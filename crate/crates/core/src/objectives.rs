//! De Jong's test suite (F1-F5), Goldstein-Price, and the cosine bowl
//! `x1^2 + x2^2 - 18 cos x1 - 18 cos x2`, with their boxes and known optima.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{Goal, Point, SearchBox};
use crate::error::{Result, RmcError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveId {
    F1,
    F2,
    F3,
    F4,
    F5,
    GoldsteinPrice,
    ProblemE,
}

impl ObjectiveId {
    pub const ALL: [ObjectiveId; 7] = [
        ObjectiveId::F1,
        ObjectiveId::F2,
        ObjectiveId::F3,
        ObjectiveId::F4,
        ObjectiveId::F5,
        ObjectiveId::GoldsteinPrice,
        ObjectiveId::ProblemE,
    ];

    pub const DE_JONG: [ObjectiveId; 5] = [
        ObjectiveId::F1,
        ObjectiveId::F2,
        ObjectiveId::F3,
        ObjectiveId::F4,
        ObjectiveId::F5,
    ];

    /// Short name used on the command line and in reports.
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveId::F1 => "f1",
            ObjectiveId::F2 => "f2",
            ObjectiveId::F3 => "f3",
            ObjectiveId::F4 => "f4",
            ObjectiveId::F5 => "f5",
            ObjectiveId::GoldsteinPrice => "gp",
            ObjectiveId::ProblemE => "e",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ObjectiveId::F1 => "F1",
            ObjectiveId::F2 => "F2",
            ObjectiveId::F3 => "F3",
            ObjectiveId::F4 => "F4",
            ObjectiveId::F5 => "F5",
            ObjectiveId::GoldsteinPrice => "GP",
            ObjectiveId::ProblemE => "E",
        }
    }
}

impl fmt::Display for ObjectiveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveId {
    type Err = RmcError;

    fn from_str(s: &str) -> Result<Self> {
        ObjectiveId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s) || id.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| RmcError::Domain(format!("unknown function '{s}'")))
    }
}

/// Shekel foxholes centres: column `j` is `(A[j % 5], A[j / 5])`.
pub struct FoxholesMatrix;

impl FoxholesMatrix {
    const LEVELS: [f64; 5] = [-32.0, -16.0, 0.0, 16.0, 32.0];

    pub fn get(row: usize, col: usize) -> f64 {
        match row {
            0 => Self::LEVELS[col % 5],
            1 => Self::LEVELS[col / 5],
            _ => panic!("foxholes matrix has two rows, got row {row}"),
        }
    }

    pub fn rows() -> [[f64; 25]; 2] {
        let mut a = [[0.0; 25]; 2];
        for (r, row) in a.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = Self::get(r, c);
            }
        }
        a
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub id: ObjectiveId,
    pub dimension: usize,
    pub bounds: SearchBox,
    pub goal: Goal,
    pub known_best_point: Option<Point>,
    pub known_best_value: Option<f64>,
    pub stochastic: bool,
    /// Initial population size listed for the De Jong functions.
    pub initial_population: Option<usize>,
}

/// `f5` at the (-32, -32) foxhole, evaluated in extended precision.
pub const F5_VALUE_AT_CORNER_HOLE: f64 = 0.998_003_838_818_648_9;

impl ObjectiveSpec {
    pub fn new(id: ObjectiveId) -> Self {
        let (dimension, limit, best, value, population) = match id {
            ObjectiveId::F1 => (3, 5.12, Some(vec![0.0; 3]), Some(0.0), Some(8)),
            ObjectiveId::F2 => (2, 2.048, Some(vec![1.0, 1.0]), Some(0.0), Some(4)),
            ObjectiveId::F3 => (5, 5.12, Some(vec![-5.12; 5]), Some(0.0), Some(32)),
            ObjectiveId::F4 => (30, 1.28, Some(vec![0.0; 30]), Some(0.0), None),
            ObjectiveId::F5 => (
                2,
                65.536,
                Some(vec![-32.0, -32.0]),
                Some(F5_VALUE_AT_CORNER_HOLE),
                Some(4),
            ),
            ObjectiveId::GoldsteinPrice => (2, 2.0, Some(vec![0.0, -1.0]), Some(3.0), None),
            ObjectiveId::ProblemE => (2, 1.0, Some(vec![0.0, 0.0]), Some(-36.0), None),
        };
        Self {
            id,
            dimension,
            bounds: SearchBox::uniform(dimension, -limit, limit).expect("static bounds are valid"),
            goal: Goal::Minimize,
            known_best_point: best.zip(value).map(|(p, v)| Point::with_fitness(p, v)),
            known_best_value: value,
            stochastic: id == ObjectiveId::F4,
            initial_population: population,
        }
    }

    /// Objective value at `x`. `noise` must be supplied for stochastic objectives.
    pub fn eval(&self, x: &[f64], noise: Option<&mut dyn RngCore>) -> Result<f64> {
        if x.len() != self.dimension {
            return Err(RmcError::Domain(format!(
                "{} expects {} coordinates, got {}",
                self.id,
                self.dimension,
                x.len()
            )));
        }
        Ok(match self.id {
            ObjectiveId::F1 => sphere(x),
            ObjectiveId::F2 => rosenbrock(x),
            ObjectiveId::F3 => step(x),
            ObjectiveId::F4 => {
                let rng = noise.ok_or_else(|| {
                    RmcError::Domain("f4 is stochastic and needs a noise stream".into())
                })?;
                x.iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let g: f64 = rng.sample(StandardNormal);
                        (i + 1) as f64 * v.powi(4) + g
                    })
                    .sum()
            }
            ObjectiveId::F5 => foxholes(x),
            ObjectiveId::GoldsteinPrice => goldstein_price(x),
            ObjectiveId::ProblemE => cosine_bowl(x),
        })
    }

    /// The deterministic part of the objective; for F4 this drops the noise terms.
    pub fn noiseless(&self, x: &[f64]) -> Result<f64> {
        match self.id {
            ObjectiveId::F4 => {
                if x.len() != self.dimension {
                    return Err(RmcError::Domain("dimension mismatch".into()));
                }
                Ok(quartic(x))
            }
            _ => self.eval(x, None),
        }
    }

    /// A closure suitable for the optimizers. Stochastic objectives draw their
    /// noise from a ChaCha stream derived from `noise_seed`.
    pub fn evaluator(&self, noise_seed: u64) -> impl FnMut(&[f64]) -> f64 + '_ {
        let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
        rng.set_stream(NOISE_STREAM);
        move |x: &[f64]| {
            let noise: Option<&mut dyn RngCore> = if self.stochastic { Some(&mut rng) } else { None };
            self.eval(x, noise).unwrap_or(f64::NAN)
        }
    }
}

const NOISE_STREAM: u64 = 7;

pub fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn rosenbrock(x: &[f64]) -> f64 {
    100.0 * (x[0] * x[0] - x[1]).powi(2) + (1.0 - x[0]).powi(2)
}

pub fn step(x: &[f64]) -> f64 {
    30.0 + x.iter().map(|v| v.floor()).sum::<f64>()
}

/// Noise-free part of F4: `sum i * x_i^4`, 1-based `i`.
pub fn quartic(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v.powi(4))
        .sum()
}

pub fn foxholes(x: &[f64]) -> f64 {
    let inner: f64 = (0..25)
        .map(|j| {
            let d0 = x[0] - FoxholesMatrix::get(0, j);
            let d1 = x[1] - FoxholesMatrix::get(1, j);
            1.0 / ((j + 1) as f64 + d0.powi(6) + d1.powi(6))
        })
        .sum();
    1.0 / (0.002 + inner)
}

pub fn goldstein_price(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let a = 1.0
        + (x1 + x2 + 1.0).powi(2)
            * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
    let b = 30.0
        + (2.0 * x1 - 3.0 * x2).powi(2)
            * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2);
    a * b
}

pub fn cosine_bowl(x: &[f64]) -> f64 {
    x[0] * x[0] + x[1] * x[1] - 18.0 * x[0].cos() - 18.0 * x[1].cos()
}

/// Exhaustive search on a `resolution^n` grid including both bounds per axis.
pub fn grid_oracle(spec: &ObjectiveSpec, resolution: usize) -> Result<(Vec<f64>, f64)> {
    if spec.stochastic {
        return Err(RmcError::Unsupported(format!(
            "{} is stochastic; grid search needs a deterministic objective",
            spec.id
        )));
    }
    if spec.dimension > 5 {
        return Err(RmcError::Unsupported(format!(
            "grid search is limited to 5 dimensions, {} has {}",
            spec.id, spec.dimension
        )));
    }
    if resolution < 2 {
        return Err(RmcError::Domain("grid resolution must be at least 2".into()));
    }
    let n = spec.dimension;
    let axes: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (lo, hi) = (spec.bounds.lower()[i], spec.bounds.upper()[i]);
            let last = (resolution - 1) as f64;
            (0..resolution)
                .map(|k| {
                    if k == resolution - 1 {
                        hi
                    } else {
                        lo + (hi - lo) * (k as f64 / last)
                    }
                })
                .collect()
        })
        .collect();

    let mut index = vec![0usize; n];
    let mut point = vec![0.0; n];
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        for i in 0..n {
            point[i] = axes[i][index[i]];
        }
        let value = spec.eval(&point, None)?;
        let better = match &best {
            None => value.is_finite(),
            Some((_, b)) => crate::operators::improves(value, *b, spec.goal),
        };
        if better {
            best = Some((point.clone(), value));
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == n {
                return best.ok_or_else(|| {
                    RmcError::Domain("objective non-finite on the whole grid".into())
                });
            }
            index[axis] += 1;
            if index[axis] < resolution {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: ObjectiveId) -> ObjectiveSpec {
        ObjectiveSpec::new(id)
    }

    #[test]
    fn table_bounds_and_dimensions() {
        let expect = [
            (ObjectiveId::F1, 3, 5.12),
            (ObjectiveId::F2, 2, 2.048),
            (ObjectiveId::F3, 5, 5.12),
            (ObjectiveId::F4, 30, 1.28),
            (ObjectiveId::F5, 2, 65.536),
            (ObjectiveId::GoldsteinPrice, 2, 2.0),
            (ObjectiveId::ProblemE, 2, 1.0),
        ];
        for (id, n, lim) in expect {
            let s = spec(id);
            assert_eq!(s.dimension, n, "{id}");
            assert_eq!(s.bounds, SearchBox::uniform(n, -lim, lim).unwrap(), "{id}");
            assert_eq!(s.goal, Goal::Minimize);
            assert_eq!(s.stochastic, id == ObjectiveId::F4);
        }
        let pops: Vec<_> = ObjectiveId::DE_JONG
            .iter()
            .map(|id| spec(*id).initial_population)
            .collect();
        assert_eq!(pops, vec![Some(8), Some(4), Some(32), None, Some(4)]);
    }

    #[test]
    fn foxholes_matrix_layout() {
        let a = FoxholesMatrix::rows();
        assert_eq!(&a[0][..5], &[-32.0, -16.0, 0.0, 16.0, 32.0]);
        assert_eq!(&a[0][5..10], &[-32.0, -16.0, 0.0, 16.0, 32.0]);
        assert_eq!(&a[1][..5], &[-32.0; 5]);
        assert_eq!(&a[1][20..], &[32.0; 5]);
    }

    #[test]
    fn known_values() {
        assert_eq!(spec(ObjectiveId::F2).eval(&[1.0, 1.0], None).unwrap(), 0.0);
        assert_eq!(spec(ObjectiveId::F3).eval(&[-5.12; 5], None).unwrap(), 0.0);
        assert_eq!(spec(ObjectiveId::GoldsteinPrice).eval(&[0.0, -1.0], None).unwrap(), 3.0);
        assert_eq!(spec(ObjectiveId::F1).eval(&[0.0; 3], None).unwrap(), 0.0);
        assert_eq!(spec(ObjectiveId::ProblemE).eval(&[0.0, 0.0], None).unwrap(), -36.0);
        let f5 = spec(ObjectiveId::F5).eval(&[-32.0, -32.0], None).unwrap();
        assert!((f5 - F5_VALUE_AT_CORNER_HOLE).abs() < 1e-14, "{f5}");
    }

    #[test]
    fn eval_errors() {
        assert!(spec(ObjectiveId::F1).eval(&[0.0; 2], None).is_err());
        assert!(spec(ObjectiveId::F4).eval(&[0.0; 30], None).is_err());
    }

    #[test]
    fn f4_is_reproducible_per_stream() {
        let s = spec(ObjectiveId::F4);
        let x = vec![0.3; 30];
        let mut a = s.evaluator(5);
        let mut b = s.evaluator(5);
        let first: Vec<f64> = (0..4).map(|_| a(&x)).collect();
        let second: Vec<f64> = (0..4).map(|_| b(&x)).collect();
        assert_eq!(first, second);
        assert_ne!(first[0], first[1]);
        assert_eq!(s.noiseless(&x).unwrap(), quartic(&x));
    }

    #[test]
    fn parse_names() {
        assert_eq!("f2".parse::<ObjectiveId>().unwrap(), ObjectiveId::F2);
        assert_eq!("GP".parse::<ObjectiveId>().unwrap(), ObjectiveId::GoldsteinPrice);
        assert_eq!("e".parse::<ObjectiveId>().unwrap(), ObjectiveId::ProblemE);
        assert!("nosuch".parse::<ObjectiveId>().is_err());
    }

    #[test]
    fn grid_oracle_limits() {
        assert!(matches!(grid_oracle(&spec(ObjectiveId::F4), 3), Err(RmcError::Unsupported(_))));
        assert!(grid_oracle(&spec(ObjectiveId::F1), 1).is_err());
        let mut big = spec(ObjectiveId::F1);
        big.dimension = 6;
        big.bounds = SearchBox::uniform(6, -1.0, 1.0).unwrap();
        assert!(matches!(grid_oracle(&big, 3), Err(RmcError::Unsupported(_))));
    }

    #[test]
    fn grid_oracle_finds_sphere_origin() {
        let (p, v) = grid_oracle(&spec(ObjectiveId::F1), 65).unwrap();
        assert_eq!(v, 0.0);
        assert_eq!(p, vec![0.0; 3]);
    }

    #[test]
    fn grid_oracle_goldstein_price() {
        let (p, v) = grid_oracle(&spec(ObjectiveId::GoldsteinPrice), 401).unwrap();
        assert!((p[0] - 0.0).abs() < 1e-12 && (p[1] + 1.0).abs() < 1e-12, "{p:?}");
        assert!((v - 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn grid_oracle_cosine_bowl() {
        let (p, v) = grid_oracle(&spec(ObjectiveId::ProblemE), 201).unwrap();
        assert!(p.iter().all(|c| c.abs() < 1e-12), "{p:?}");
        assert!((v + 36.0).abs() < 1e-12);
    }
}
