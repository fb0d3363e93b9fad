//! The four search operators: vertex elitism, rotational mutation,
//! redirected mutation and space-halving crossover.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{Goal, Point, SearchBox, SignVector};
use crate::error::{Result, RmcError};
use crate::optimizer::RmcConfig;

const DIRECTION_STREAM: u64 = 0;
const VERTEX_STREAM: u64 = 1;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Strict comparison under `goal`; ties are never better.
pub fn is_better(a: f64, b: f64, goal: Goal) -> Result<bool> {
    if !a.is_finite() || !b.is_finite() {
        return Err(RmcError::Domain(format!(
            "cannot compare non-finite fitness values {a} and {b}"
        )));
    }
    Ok(match goal {
        Goal::Minimize => a < b,
        Goal::Maximize => a > b,
    })
}

/// Like [`is_better`] but a non-finite candidate simply loses.
pub(crate) fn improves(candidate: f64, incumbent: f64, goal: Goal) -> bool {
    is_better(candidate, incumbent, goal).unwrap_or(false)
}

/// `2^n` if it fits in a `u64` and does not exceed `budget`.
fn full_enumeration_size(n: usize, budget: usize) -> Option<u64> {
    if n >= 64 {
        return None;
    }
    let total = 1u64 << n;
    (total <= budget as u64).then_some(total)
}

/// Rejection-samples `amount` distinct uniform sign patterns not in `excluded`.
/// Callers guarantee enough patterns exist (`2^n > budget`).
fn sample_distinct(
    n: usize,
    amount: usize,
    excluded: &[Vec<bool>],
    rng: &mut ChaCha8Rng,
) -> Vec<SignVector> {
    let mut seen: HashSet<Vec<bool>> = excluded.iter().cloned().collect();
    let mut out = Vec::with_capacity(amount);
    while out.len() < amount {
        let bits: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        if seen.insert(bits.clone()) {
            out.push(SignVector::from_bits(&bits));
        }
    }
    out
}

/// Sign vectors in search order.
///
/// When all `2^n` fit in `budget` they come out in bit order: vector `k` has
/// coordinate `i` equal to `-1` iff bit `i` of `k` is set. Otherwise the
/// all-positive vector comes first, followed by `budget - 1` distinct vectors
/// drawn uniformly without replacement.
pub fn enumerate_sign_vectors(n: usize, budget: usize, seed: u64) -> Result<Vec<SignVector>> {
    if n == 0 {
        return Err(RmcError::Domain("dimension must be at least 1".into()));
    }
    if budget == 0 {
        return Err(RmcError::Domain("direction budget must be at least 1".into()));
    }
    if let Some(total) = full_enumeration_size(n, budget) {
        return Ok((0..total).map(|k| SignVector::from_index(n, k)).collect());
    }
    let mut rng = stream_rng(seed, DIRECTION_STREAM);
    let mut out = vec![SignVector::all_positive(n)];
    out.extend(sample_distinct(n, budget - 1, &[vec![false; n]], &mut rng));
    Ok(out)
}

/// Vertices visited by the elitism phase, in evaluation order.
pub(crate) fn vertex_order(n: usize, budget: usize, seed: u64) -> Vec<SignVector> {
    if let Some(total) = full_enumeration_size(n, budget) {
        return (0..total).map(|k| SignVector::from_index(n, k)).collect();
    }
    let mut out = vec![SignVector::all_positive(n)];
    if budget >= 2 {
        out.push(SignVector::all_negative(n));
        let mut rng = stream_rng(seed, VERTEX_STREAM);
        out.extend(sample_distinct(
            n,
            budget - 2,
            &[vec![false; n], vec![true; n]],
            &mut rng,
        ));
    }
    out
}

/// The best corner of `bounds` among the evaluated vertices; earliest wins ties.
pub fn best_vertex<F>(
    bounds: &SearchBox,
    objective: &mut F,
    goal: Goal,
    vertex_budget: usize,
    seed: u64,
) -> Result<Point>
where
    F: FnMut(&[f64]) -> f64,
{
    if vertex_budget == 0 {
        return Err(RmcError::Config("vertex budget must be at least 1".into()));
    }
    let mut best: Option<Point> = None;
    for signs in vertex_order(bounds.dimension(), vertex_budget, seed) {
        let coords = bounds.vertex(&signs);
        let value = objective(&coords);
        if !value.is_finite() {
            continue;
        }
        let replace = match &best {
            None => true,
            Some(b) => improves(value, b.fitness.unwrap_or(f64::NAN), goal),
        };
        if replace {
            best = Some(Point::with_fitness(coords, value));
        }
    }
    best.ok_or_else(|| {
        RmcError::Initialization("objective is non-finite at every evaluated vertex".into())
    })
}

/// `s + alpha * direction`, per-coordinate displacement exactly `alpha`.
pub fn rotational_mutate(s: &Point, direction: &SignVector, alpha: f64) -> Result<Point> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(RmcError::Domain(format!("step length must be positive, got {alpha}")));
    }
    if direction.dimension() != s.dimension() {
        return Err(RmcError::Domain(format!(
            "direction has dimension {} but point has {}",
            direction.dimension(),
            s.dimension()
        )));
    }
    Ok(Point::new(displace(&s.coords, direction, alpha)))
}

pub(crate) fn displace(origin: &[f64], direction: &SignVector, step: f64) -> Vec<f64> {
    origin
        .iter()
        .enumerate()
        .map(|(i, x)| x + step * direction.component(i))
        .collect()
}

pub(crate) struct RedirectOutcome {
    pub improved: Option<(Point, SignVector)>,
    /// Last candidate formed, feasible or not.
    pub last_formed: Option<Vec<f64>>,
}

/// One redirect pass: beta ladder outer, directions inner, first improvement wins.
#[allow(clippy::too_many_arguments)]
pub(crate) fn redirect_pass<F>(
    s: &Point,
    incumbent: f64,
    feasible: &SearchBox,
    objective: &mut F,
    goal: Goal,
    betas: &[f64],
    directions: &[SignVector],
    scale: f64,
    origin_anchored: bool,
) -> RedirectOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let zero = vec![0.0; s.dimension()];
    let anchor = if origin_anchored { &zero } else { &s.coords };
    let mut last_formed = None;
    for &beta in betas {
        for e in directions {
            let coords = displace(anchor, e, beta * scale);
            if !feasible.contains(&coords) {
                last_formed = Some(coords);
                continue;
            }
            let value = objective(&coords);
            if improves(value, incumbent, goal) {
                return RedirectOutcome {
                    improved: Some((Point::with_fitness(coords.clone(), value), e.clone())),
                    last_formed: Some(coords),
                };
            }
            last_formed = Some(coords);
        }
    }
    RedirectOutcome {
        improved: None,
        last_formed,
    }
}

/// Retries the move from `s` over every (beta, direction) pair and returns the
/// first feasible candidate that beats `s`.
pub fn redirect_search<F>(
    s: &Point,
    bounds: &SearchBox,
    objective: &mut F,
    goal: Goal,
    config: &RmcConfig,
) -> Result<Option<Point>>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let incumbent = s
        .fitness
        .ok_or_else(|| RmcError::Domain("redirect_search needs a point with cached fitness".into()))?;
    if s.dimension() != bounds.dimension() {
        return Err(RmcError::Domain("point and box dimensions differ".into()));
    }
    let directions =
        enumerate_sign_vectors(bounds.dimension(), config.direction_budget, config.seed)?;
    let outcome = redirect_pass(
        s,
        incumbent,
        bounds,
        objective,
        goal,
        &config.beta_ladder,
        &directions,
        1.0,
        config.origin_anchored_redirect,
    );
    Ok(outcome.improved.map(|(p, _)| p))
}

/// Corner of `working` nearest to `s`, per coordinate; exact midpoint ties go low.
pub fn nearest_corner(s: &[f64], working: &SearchBox) -> Vec<f64> {
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let (lo, hi) = (working.lower()[i], working.upper()[i]);
            if (x - lo).abs() <= (x - hi).abs() {
                lo
            } else {
                hi
            }
        })
        .collect()
}

/// Halves every side of `working` toward the corner nearest `s`.
///
/// Returns the `n` midpoints of the edges incident to that corner, each
/// evaluated, together with the contracted box.
pub fn crossover_halve<F>(
    s: &Point,
    working: &SearchBox,
    objective: &mut F,
    goal: Goal,
) -> Result<(Vec<Point>, SearchBox)>
where
    F: FnMut(&[f64]) -> f64,
{
    // goal is part of the operator contract; selection happens in the caller.
    let _ = goal;
    let n = working.dimension();
    if s.dimension() != n {
        return Err(RmcError::Domain("point and box dimensions differ".into()));
    }
    let corner = nearest_corner(&s.coords, working);
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 0..n {
        let mid = working.midpoint(i);
        if corner[i] == working.lower()[i] {
            lower.push(working.lower()[i]);
            upper.push(mid);
        } else {
            lower.push(mid);
            upper.push(working.upper()[i]);
        }
    }
    let candidates = (0..n)
        .map(|i| {
            let mut coords = corner.clone();
            coords[i] = working.midpoint(i);
            let mut p = Point::new(coords);
            p.evaluate(objective);
            p
        })
        .collect();
    Ok((candidates, SearchBox::new(lower, upper)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    #[test]
    fn strict_order() {
        assert!(is_better(1.0, 2.0, Goal::Minimize).unwrap());
        assert!(!is_better(2.0, 2.0, Goal::Minimize).unwrap());
        assert!(!is_better(2.0, 2.0, Goal::Maximize).unwrap());
        assert!(is_better(3.0, 2.0, Goal::Maximize).unwrap());
        assert!(is_better(f64::NAN, 1.0, Goal::Minimize).is_err());
        assert!(is_better(1.0, f64::INFINITY, Goal::Minimize).is_err());
    }

    #[test]
    fn full_enumeration_order() {
        let v = enumerate_sign_vectors(1, 4, 0).unwrap();
        assert_eq!(v.iter().map(|s| s.signs().to_vec()).collect::<Vec<_>>(), vec![vec![1], vec![-1]]);
        let v = enumerate_sign_vectors(2, 4, 0).unwrap();
        let got: Vec<Vec<i8>> = v.iter().map(|s| s.signs().to_vec()).collect();
        assert_eq!(got, vec![vec![1, 1], vec![-1, 1], vec![1, -1], vec![-1, -1]]);
    }

    #[test]
    fn sampled_enumeration_is_distinct_and_starts_positive() {
        let v = enumerate_sign_vectors(30, 64, 11).unwrap();
        assert_eq!(v.len(), 64);
        assert_eq!(v[0], SignVector::all_positive(30));
        let unique: HashSet<_> = v.iter().collect();
        assert_eq!(unique.len(), 64);
        assert_eq!(v, enumerate_sign_vectors(30, 64, 11).unwrap());
        assert_ne!(v, enumerate_sign_vectors(30, 64, 12).unwrap());
    }

    #[test]
    fn sampling_works_past_64_bits() {
        let v = enumerate_sign_vectors(80, 16, 3).unwrap();
        assert_eq!(v.len(), 16);
        assert_eq!(v.iter().collect::<HashSet<_>>().len(), 16);
    }

    #[test]
    fn enumeration_rejects_bad_input() {
        assert!(enumerate_sign_vectors(0, 4, 0).is_err());
        assert!(enumerate_sign_vectors(3, 0, 0).is_err());
    }

    #[test]
    fn vertex_sample_keeps_both_extreme_corners() {
        let order = vertex_order(20, 50, 9);
        assert_eq!(order.len(), 50);
        assert_eq!(order[0], SignVector::all_positive(20));
        assert_eq!(order[1], SignVector::all_negative(20));
        assert_eq!(order.iter().collect::<HashSet<_>>().len(), 50);
    }

    #[test]
    fn best_vertex_of_sphere_cube() {
        let b = SearchBox::uniform(3, -5.12, 5.12).unwrap();
        let mut f = sphere;
        let p = best_vertex(&b, &mut f, Goal::Minimize, 4096, 0).unwrap();
        // all eight corners tie; the first one in enumeration order is kept
        assert_eq!(p.coords, vec![5.12, 5.12, 5.12]);
        assert!((p.fitness.unwrap() - 78.6432).abs() < 1e-12);
    }

    #[test]
    fn best_vertex_skips_non_finite() {
        let b = SearchBox::uniform(2, -1.0, 1.0).unwrap();
        let mut f = |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { x[1] };
        let p = best_vertex(&b, &mut f, Goal::Minimize, 16, 0).unwrap();
        assert_eq!(p.coords, vec![-1.0, -1.0]);

        let mut never = |_: &[f64]| f64::INFINITY;
        assert!(matches!(
            best_vertex(&b, &mut never, Goal::Minimize, 16, 0),
            Err(RmcError::Initialization(_))
        ));
    }

    #[test]
    fn best_vertex_maximize() {
        let b = SearchBox::uniform(2, -1.0, 2.0).unwrap();
        let mut f = sphere;
        let p = best_vertex(&b, &mut f, Goal::Maximize, 16, 0).unwrap();
        assert_eq!(p.coords, vec![2.0, 2.0]);
    }

    #[test]
    fn mutation_examples() {
        let dir = |s: Vec<i8>| SignVector::new(s).unwrap();
        let p = rotational_mutate(&Point::new(vec![0.0, 0.0]), &dir(vec![1, 1]), 0.1).unwrap();
        assert_eq!(p.coords, vec![0.1, 0.1]);
        assert!(p.fitness.is_none());
        let p = rotational_mutate(&Point::new(vec![2.0, -2.0]), &dir(vec![-1, 1]), 0.5).unwrap();
        assert_eq!(p.coords, vec![1.5, -1.5]);
        let p = rotational_mutate(&Point::new(vec![1.0; 3]), &dir(vec![-1; 3]), 1.0).unwrap();
        assert_eq!(p.coords, vec![0.0; 3]);
    }

    #[test]
    fn mutation_rejects_bad_input() {
        let d = SignVector::all_positive(2);
        assert!(rotational_mutate(&Point::new(vec![0.0, 0.0]), &d, 0.0).is_err());
        assert!(rotational_mutate(&Point::new(vec![0.0, 0.0]), &d, -0.1).is_err());
        assert!(rotational_mutate(&Point::new(vec![0.0]), &d, 0.1).is_err());
    }

    #[test]
    fn redirect_finds_first_improvement_in_order() {
        let b = SearchBox::uniform(2, -5.12, 5.12).unwrap();
        let s = Point::with_fitness(vec![0.1, 0.1], sphere(&[0.1, 0.1]));
        let mut f = sphere;
        let got = redirect_search(&s, &b, &mut f, Goal::Minimize, &RmcConfig::default())
            .unwrap()
            .unwrap();
        assert_eq!(got.coords, vec![0.0, 0.0]);
        assert_eq!(got.fitness, Some(0.0));
    }

    #[test]
    fn redirect_at_optimum_finds_nothing() {
        let b = SearchBox::uniform(3, -5.12, 5.12).unwrap();
        let s = Point::with_fitness(vec![0.0; 3], 0.0);
        let mut f = sphere;
        assert!(redirect_search(&s, &b, &mut f, Goal::Minimize, &RmcConfig::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn redirect_ignores_infeasible_improvements() {
        // only points beyond x = 1 improve, and the box stops at 1
        let b = SearchBox::uniform(1, 0.0, 1.0).unwrap();
        let s = Point::with_fitness(vec![1.0], -1.0);
        let mut f = |x: &[f64]| -x[0];
        assert!(redirect_search(&s, &b, &mut f, Goal::Minimize, &RmcConfig::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn redirect_requires_cached_fitness() {
        let b = SearchBox::uniform(1, 0.0, 1.0).unwrap();
        let mut f = sphere;
        assert!(redirect_search(&Point::new(vec![0.5]), &b, &mut f, Goal::Minimize, &RmcConfig::default())
            .is_err());
    }

    #[test]
    fn crossover_from_corner() {
        let b = SearchBox::uniform(2, -2.0, 2.0).unwrap();
        let mut f = sphere;
        let (cands, nb) =
            crossover_halve(&Point::new(vec![2.0, -2.0]), &b, &mut f, Goal::Minimize).unwrap();
        let coords: Vec<_> = cands.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0.0, -2.0], vec![2.0, 0.0]]);
        assert!(cands.iter().all(|p| p.fitness == Some(4.0)));
        assert_eq!(nb.lower(), &[0.0, -2.0]);
        assert_eq!(nb.upper(), &[2.0, 0.0]);
    }

    #[test]
    fn crossover_ties_go_to_lower_corner() {
        let b = SearchBox::uniform(2, -1.0, 1.0).unwrap();
        let mut f = sphere;
        let (cands, nb) =
            crossover_halve(&Point::new(vec![0.0, 0.0]), &b, &mut f, Goal::Minimize).unwrap();
        let coords: Vec<_> = cands.iter().map(|p| p.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0.0, -1.0], vec![-1.0, 0.0]]);
        assert_eq!(nb, SearchBox::uniform(2, -1.0, 0.0).unwrap());
    }

    #[test]
    fn crossover_halves_volume() {
        let b = SearchBox::new(vec![-3.0, 0.0, 1.0], vec![5.0, 2.0, 9.0]).unwrap();
        let mut f = sphere;
        let (_, nb) =
            crossover_halve(&Point::new(vec![4.0, 0.2, 3.0]), &b, &mut f, Goal::Minimize).unwrap();
        assert_eq!(nb.volume(), b.volume() / 8.0);
        assert!(b.contains_box(&nb));
        assert_eq!(nb.lower(), &[1.0, 0.0, 1.0]);
        assert_eq!(nb.upper(), &[5.0, 1.0, 5.0]);
    }
}
