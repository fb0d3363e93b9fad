//! The RMC main loop.
//!
//! Start from the best vertex of the search box, walk along a sign-vector
//! direction while the ascending step ladder keeps producing improvements,
//! fall back to a redirected search over all sign directions, then halve the
//! working box toward the incumbent and keep the best of the incumbent and the
//! new edge midpoints. The run stops when a failed search leaves the search
//! space, the working box collapses, or the generation cap is hit.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::domain::{
    EventKind, GenerationCounters, Goal, Point, RunResult, SearchBox, SignVector,
    TerminationReason, TraceEvent,
};
use crate::error::{Result, RmcError};
use crate::operators::{
    best_vertex, crossover_halve, displace, enumerate_sign_vectors, improves, redirect_pass,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmcConfig {
    /// Mutation step lengths, tried in ascending order.
    pub alpha_ladder: Vec<f64>,
    /// Redirect step lengths, tried in ascending order.
    pub beta_ladder: Vec<f64>,
    /// Sign vectors per redirect pass (all `2^n` when that is smaller).
    pub direction_budget: usize,
    /// Vertices evaluated by elitism (all `2^n` when that is smaller).
    pub vertex_budget: usize,
    pub max_generations: u64,
    /// Absolute diagonal below which the working box counts as collapsed;
    /// `None` means `1e-9` times the initial diagonal.
    pub min_box_diameter: Option<f64>,
    pub seed: u64,
    /// Shrink mutation and redirect steps with the working box (factor 2 per crossover).
    pub step_scaling: bool,
    /// Form redirect candidates as `beta * e` instead of `S + beta * e`.
    pub origin_anchored_redirect: bool,
}

pub const DEFAULT_ALPHA_LADDER: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const DEFAULT_BETA_LADDER: [f64; 7] = [0.10, 0.25, 0.40, 0.55, 0.70, 0.85, 1.00];
pub const RELATIVE_BOX_TOLERANCE: f64 = 1e-9;

impl Default for RmcConfig {
    fn default() -> Self {
        Self {
            alpha_ladder: DEFAULT_ALPHA_LADDER.to_vec(),
            beta_ladder: DEFAULT_BETA_LADDER.to_vec(),
            direction_budget: 64,
            vertex_budget: 4096,
            max_generations: 100_000,
            min_box_diameter: None,
            seed: 0,
            step_scaling: true,
            origin_anchored_redirect: false,
        }
    }
}

fn validate_ladder(name: &str, ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(RmcError::Config(format!("{name} must not be empty")));
    }
    if ladder.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(RmcError::Config(format!("{name} entries must be finite and positive")));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(RmcError::Config(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

impl RmcConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_ladder("alpha_ladder", &self.alpha_ladder)?;
        validate_ladder("beta_ladder", &self.beta_ladder)?;
        if self.direction_budget == 0 || self.vertex_budget == 0 {
            return Err(RmcError::Config("budgets must be at least 1".into()));
        }
        if self.max_generations == 0 {
            return Err(RmcError::Config("max_generations must be at least 1".into()));
        }
        if let Some(d) = self.min_box_diameter {
            if !(d.is_finite() && d > 0.0) {
                return Err(RmcError::Config("min_box_diameter must be positive".into()));
            }
        }
        Ok(())
    }
}

/// First direction whose smallest step from `s` stays inside `working`, else
/// the direction toward the centre of `working` if that step fits, else `previous`.
fn pick_direction(
    s: &[f64],
    working: &SearchBox,
    step: f64,
    directions: &[SignVector],
    previous: &SignVector,
) -> SignVector {
    if let Some(d) = directions
        .iter()
        .find(|d| working.contains(&displace(s, d, step)))
    {
        return d.clone();
    }
    let inward = SignVector::new(
        s.iter()
            .enumerate()
            .map(|(i, x)| if working.midpoint(i) >= *x { 1 } else { -1 })
            .collect(),
    )
    .expect("inward direction has only +1/-1 entries");
    if working.contains(&displace(s, &inward, step)) {
        inward
    } else {
        previous.clone()
    }
}

struct Run<'a> {
    config: &'a RmcConfig,
    counters: GenerationCounters,
    trajectory: Vec<TraceEvent>,
    incumbent: Point,
    fitness: f64,
}

impl Run<'_> {
    fn record(&mut self, event: EventKind) {
        self.trajectory.push(TraceEvent {
            generation: self.counters.generations(),
            event,
            point: self.incumbent.coords.clone(),
            fitness: self.fitness,
        });
    }

    fn accept(&mut self, p: Point, event: EventKind) {
        self.fitness = p.fitness.expect("accepted points carry fitness");
        self.incumbent = p;
        self.record(event);
    }

    fn capped(&self) -> bool {
        self.counters.generations() >= self.config.max_generations
    }
}

/// Runs RMC on `objective` over `bounds`.
///
/// The objective is called once per distinct candidate; infeasible candidates
/// are never evaluated. Non-finite objective values never win a comparison.
pub fn rmc_optimize<F>(
    mut objective: F,
    bounds: &SearchBox,
    goal: Goal,
    config: &RmcConfig,
) -> Result<RunResult>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let n = bounds.dimension();
    let evaluations = Cell::new(0u64);
    let mut counted = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        objective(x)
    };

    let directions = enumerate_sign_vectors(n, config.direction_budget, config.seed)?;
    let start = best_vertex(bounds, &mut counted, goal, config.vertex_budget, config.seed)?;
    let min_diameter = config
        .min_box_diameter
        .unwrap_or(RELATIVE_BOX_TOLERANCE * bounds.diagonal());
    let alpha_min = config.alpha_ladder[0];

    let mut run = Run {
        config,
        counters: GenerationCounters::default(),
        trajectory: Vec::new(),
        fitness: start.fitness.expect("best_vertex caches fitness"),
        incumbent: start,
    };
    run.record(EventKind::Elitism);

    let mut working = bounds.clone();
    let mut boxes = vec![working.clone()];
    let mut scale = 1.0;
    let mut direction = pick_direction(
        &run.incumbent.coords,
        &working,
        alpha_min * scale,
        &directions,
        &directions[0],
    );

    let reason = loop {
        if run.capped() {
            break TerminationReason::GenerationCap;
        }

        // Walk along `direction` for as long as the ladder yields an improvement.
        let mut walked = false;
        loop {
            run.counters.trm += 1;
            let mut accepted = None;
            for &alpha in &config.alpha_ladder {
                let coords = displace(&run.incumbent.coords, &direction, alpha * scale);
                if !bounds.contains(&coords) {
                    continue;
                }
                let value = counted(&coords);
                if improves(value, run.fitness, goal) {
                    accepted = Some(Point::with_fitness(coords, value));
                    break;
                }
            }
            match accepted {
                Some(p) => {
                    run.accept(p, EventKind::Mutation);
                    walked = true;
                    if run.capped() {
                        break;
                    }
                }
                None => break,
            }
        }
        if run.capped() {
            break TerminationReason::GenerationCap;
        }

        if !walked {
            run.counters.trm += 1;
            let outcome = redirect_pass(
                &run.incumbent,
                run.fitness,
                bounds,
                &mut counted,
                goal,
                &config.beta_ladder,
                &directions,
                scale,
                config.origin_anchored_redirect,
            );
            match outcome.improved {
                Some((p, e)) => {
                    run.accept(p, EventKind::Redirect);
                    direction = e;
                }
                None => {
                    let left = outcome
                        .last_formed
                        .is_none_or(|last| !bounds.contains(&last));
                    if left {
                        break TerminationReason::LeftSearchSpace;
                    }
                }
            }
            if run.capped() {
                break TerminationReason::GenerationCap;
            }
        }

        let (candidates, halved) = crossover_halve(&run.incumbent, &working, &mut counted, goal)?;
        run.counters.tc += 1;
        let mut best: Option<Point> = None;
        for c in candidates {
            let value = c.fitness.expect("crossover candidates are evaluated");
            let bar = best.as_ref().map_or(run.fitness, |b| b.fitness.unwrap_or(run.fitness));
            if improves(value, bar, goal) {
                best = Some(c);
            }
        }
        match best {
            Some(p) => run.accept(p, EventKind::Crossover),
            None => run.record(EventKind::Crossover),
        }
        working = halved;
        boxes.push(working.clone());
        if config.step_scaling {
            scale *= 0.5;
        }
        direction = pick_direction(
            &run.incumbent.coords,
            &working,
            alpha_min * scale,
            &directions,
            &direction,
        );

        if working.diagonal() < min_diameter {
            break TerminationReason::BoxCollapsed;
        }
    };

    Ok(RunResult {
        best_fitness: run.fitness,
        best_point: run.incumbent,
        counters: run.counters,
        termination_reason: reason,
        evaluations: evaluations.get(),
        trajectory: run.trajectory,
        boxes,
    })
}
