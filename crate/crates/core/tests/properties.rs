use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rmc_core::objectives::{
    cosine_bowl, foxholes, goldstein_price, quartic, rosenbrock, sphere, step,
};
use rmc_core::{crossover_halve, rotational_mutate, ObjectiveId, ObjectiveSpec, Point, SearchBox, SignVector};

fn coords(n: usize, limit: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-limit..=limit, n)
}

proptest! {
    #[test]
    fn sphere_is_even_and_nonnegative(x in coords(3, 5.12)) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert_eq!(sphere(&x), sphere(&neg));
        prop_assert!(sphere(&x) >= 0.0);
    }

    #[test]
    fn quartic_is_even_and_nonnegative(x in coords(30, 1.28)) {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert_eq!(quartic(&x), quartic(&neg));
        prop_assert!(quartic(&x) >= 0.0);
    }

    #[test]
    fn cosine_bowl_symmetries(x in coords(2, 1.0)) {
        let v = cosine_bowl(&x);
        prop_assert_eq!(v, cosine_bowl(&[-x[0], x[1]]));
        prop_assert!((v - cosine_bowl(&[x[1], x[0]])).abs() <= 1e-12);
        prop_assert!(v >= -36.0);
    }

    #[test]
    fn lower_bounds_hold(a in coords(2, 2.0), b in coords(2, 2.048), c in coords(2, 65.536)) {
        prop_assert!(goldstein_price(&a) >= 3.0 - 1e-9);
        prop_assert!(rosenbrock(&b) >= 0.0);
        prop_assert!(foxholes(&c) > 0.99);
    }

    #[test]
    fn step_is_constant_on_unit_cells(cell in prop::collection::vec(-5i32..=4, 5), frac in coords(5, 0.999)) {
        let base: Vec<f64> = cell.iter().map(|&k| k as f64).collect();
        let inside: Vec<f64> = base.iter().zip(&frac).map(|(b, f)| b + f.abs()).collect();
        prop_assert_eq!(step(&base), step(&inside));
    }

    #[test]
    fn mutation_is_linear(
        x in coords(4, 3.0),
        bits in 0u64..16,
        alpha in 0.01f64..2.0,
    ) {
        let d = SignVector::from_index(4, bits);
        let p = Point::new(x.clone());
        let once = rotational_mutate(&p, &d, 2.0 * alpha).unwrap();
        let twice = rotational_mutate(&rotational_mutate(&p, &d, alpha).unwrap(), &d, alpha).unwrap();
        for i in 0..4 {
            prop_assert!((once.coords[i] - twice.coords[i]).abs() <= 1e-12 * (1.0 + x[i].abs()));
            prop_assert!((once.coords[i] - x[i] - 2.0 * alpha * d.component(i)).abs() <= 1e-12 * (1.0 + x[i].abs()));
        }
    }

    #[test]
    fn crossover_nests_and_halves(
        lo in coords(3, 10.0),
        width in prop::collection::vec(0.5f64..10.0, 3),
        t in prop::collection::vec(0.0f64..=1.0, 3),
    ) {
        let hi: Vec<f64> = lo.iter().zip(&width).map(|(l, w)| l + w).collect();
        let b = SearchBox::new(lo.clone(), hi.clone()).unwrap();
        let s: Vec<f64> = (0..3).map(|i| lo[i] + t[i] * width[i]).collect();
        let (candidates, halved) = crossover_halve(&Point::new(s.clone()), &b, &mut sphere, rmc_core::Goal::Minimize).unwrap();
        prop_assert!(b.contains_box(&halved));
        prop_assert_eq!(candidates.len(), 3);
        let ratio = halved.volume() / b.volume();
        prop_assert!((ratio - 0.125).abs() <= 1e-12);
        // the kept half contains the incumbent
        prop_assert!(halved.contains(&s));
        for c in &candidates {
            prop_assert!(b.contains(&c.coords));
            prop_assert_eq!(c.fitness, Some(sphere(&c.coords)));
        }
    }
}

#[test]
fn dyadic_halving_is_exact() {
    let b = SearchBox::uniform(2, -4.0, 4.0).unwrap();
    let (_, h) = crossover_halve(&Point::new(vec![-3.0, 1.0]), &b, &mut sphere, rmc_core::Goal::Minimize).unwrap();
    assert_eq!(h.volume() / b.volume(), 0.25);
    assert_eq!(h.lower(), &[-4.0, 0.0]);
    assert_eq!(h.upper(), &[0.0, 4.0]);
}

#[test]
fn f4_noise_has_zero_mean_and_expected_spread() {
    let spec = ObjectiveSpec::new(ObjectiveId::F4);
    let x = vec![0.5; 30];
    let clean = quartic(&x);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws: Vec<f64> = (0..20_000)
        .map(|_| spec.eval(&x, Some(&mut rng)).unwrap() - clean)
        .collect();
    let n = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / n;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    // one unit Gaussian per term: standard deviation sqrt(30)
    assert!(mean.abs() < 4.0 * (30.0f64 / n).sqrt(), "mean {mean}");
    assert!((var - 30.0).abs() < 1.5, "variance {var}");
}

#[test]
fn deterministic_objectives_ignore_noise_argument() {
    let spec = ObjectiveSpec::new(ObjectiveId::F1);
    assert_eq!(spec.eval(&[1.0, 2.0, 3.0], None).unwrap(), 14.0);
    assert!(ObjectiveSpec::new(ObjectiveId::F4).eval(&[0.0; 30], None).is_err());
}
