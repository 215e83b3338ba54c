use interp_lab::rng::{complex_normal_vec, instance_rng, log_uniform};
use interp_lab::spaces::{intersection_norm, k_functional, sum_norm, Certificate};
use interp_lab::{Couple, Exponent, WeightedSpace, C64};
use proptest::prelude::*;
use rand::Rng;

const EXPONENTS: [Exponent; 5] =
    [Exponent::Finite(1.0), Exponent::Finite(1.5), Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity];

fn random_couple<R: Rng>(rng: &mut R, dim: usize) -> Couple {
    let space = |rng: &mut R| {
        let p = EXPONENTS[rng.random_range(0..EXPONENTS.len())];
        let w = (0..dim).map(|_| log_uniform(rng, 0.05, 20.0)).collect();
        WeightedSpace::new(p, w).unwrap()
    };
    let s0 = space(rng);
    let s1 = space(rng);
    Couple::new(s0, s1).unwrap()
}

/// Brute force over the share of x kept in X0: a zooming grid in the first
/// coordinate and a ternary search in the second (the partial minimum of a
/// convex function is convex, so the zoom cannot lose the minimizer). Only real
/// nonnegative x is used, and the shares range over [-1, 2], so the oracle does
/// not rely on the coordinatewise-proportional reduction used by the solver.
fn grid_oracle(couple: &Couple, x: &[f64], t: f64, steps: usize) -> f64 {
    assert_eq!(x.len(), 2);
    let eval = |a: f64, b: f64| {
        let x0 = [C64::new(a * x[0], 0.0), C64::new(b * x[1], 0.0)];
        let x1 = [C64::new((1.0 - a) * x[0], 0.0), C64::new((1.0 - b) * x[1], 0.0)];
        couple.space0().norm(&x0).unwrap() + t * couple.space1().norm(&x1).unwrap()
    };
    let inner = |a: f64| {
        let (mut lo, mut hi) = (-1.0f64, 2.0f64);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if eval(a, m1) <= eval(a, m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        eval(a, 0.5 * (lo + hi))
    };
    let (mut center, mut half) = (0.5, 1.5);
    let mut best = inner(center);
    for _ in 0..25 {
        let c = center;
        for i in 0..=steps {
            let a = c - half + 2.0 * half * i as f64 / steps as f64;
            let v = inner(a);
            if v < best {
                best = v;
                center = a;
            }
        }
        half *= 0.25;
    }
    best
}

#[test]
fn sum_norm_matches_grid_oracle_in_dimension_two() {
    let mut rng = instance_rng(11, 0);
    for _ in 0..60 {
        let couple = random_couple(&mut rng, 2);
        let x = [rng.random_range(0.1..2.0), rng.random_range(0.1..2.0)];
        let t = log_uniform(&mut rng, 0.1, 10.0);
        let oracle = grid_oracle(&couple, &x, t, 40);
        let xc = [C64::new(x[0], 0.0), C64::new(x[1], 0.0)];
        let (v, _) = k_functional(&couple, &xc, t, 1e-7).unwrap();
        assert!(v <= oracle + 1e-9, "solver {v} above oracle {oracle}");
        assert!((oracle - v) / v <= 1e-3, "solver {v} vs oracle {oracle} for {couple:?}");
    }
}

#[test]
fn solver_certifies_random_instances() {
    let mut rng = instance_rng(12, 0);
    for trial in 0..300 {
        let dim = rng.random_range(1..=8);
        let couple = random_couple(&mut rng, dim);
        let x = complex_normal_vec(&mut rng, dim);
        let t = log_uniform(&mut rng, 1e-2, 1e2);
        let (v, d) =
            k_functional(&couple, &x, t, 1e-6).unwrap_or_else(|e| panic!("trial {trial}: {e} on {couple:?}, t={t}"));
        assert!(d.achieved_tol <= 1e-6 || d.certificate == Certificate::GridOracle);
        assert!(d.lower_bound <= v + 1e-12);
        assert!(d.residual <= 1e-12);
        let recomputed = couple.space0().norm(&d.part0).unwrap() + t * couple.space1().norm(&d.part1).unwrap();
        assert!((recomputed - v).abs() <= 1e-9 * v.max(1.0));
    }
}

#[test]
fn inclusions_hold() {
    let mut rng = instance_rng(13, 0);
    for _ in 0..500 {
        let dim = rng.random_range(1..=6);
        let couple = random_couple(&mut rng, dim);
        let x = complex_normal_vec(&mut rng, dim);
        let (s, _) = sum_norm(&couple, &x, 1e-6).unwrap_or_else(|e| panic!("{e}: {couple:?} {x:?}"));
        let n0 = couple.space0().norm(&x).unwrap();
        let n1 = couple.space1().norm(&x).unwrap();
        assert!(s <= n0.min(n1) + 1e-12);
        assert!(s <= intersection_norm(&couple, &x).unwrap() + 1e-12);
    }
}

#[test]
fn k_functional_is_monotone_and_concave_in_t() {
    let mut rng = instance_rng(14, 0);
    let tol = 1e-6;
    for _ in 0..40 {
        let dim = rng.random_range(2..=6);
        let couple = random_couple(&mut rng, dim);
        let x = complex_normal_vec(&mut rng, dim);
        let ts: Vec<f64> = (0..25).map(|i| 0.05 * 1.3f64.powi(i)).collect();
        let ks: Vec<f64> = ts.iter().map(|&t| k_functional(&couple, &x, t, tol).unwrap().0).collect();
        for i in 1..ts.len() {
            assert!(ks[i] >= ks[i - 1] - tol);
        }
        for i in 1..ts.len() - 1 {
            // concavity through the three points (t_{i-1}, t_i, t_{i+1})
            let a = (ts[i + 1] - ts[i]) / (ts[i + 1] - ts[i - 1]);
            let chord = a * ks[i - 1] + (1.0 - a) * ks[i + 1];
            assert!(ks[i] >= chord - 2.0 * tol, "concavity violated at t={}", ts[i]);
        }
    }
}

#[test]
fn zero_vector() {
    let mut rng = instance_rng(15, 0);
    let couple = random_couple(&mut rng, 3);
    let z = vec![C64::new(0.0, 0.0); 3];
    assert_eq!(sum_norm(&couple, &z, 1e-6).unwrap().0, 0.0);
    assert_eq!(k_functional(&couple, &z, 7.0, 1e-6).unwrap().0, 0.0);
    assert_eq!(intersection_norm(&couple, &z).unwrap(), 0.0);
}

fn arb_space(dim: usize) -> impl Strategy<Value = WeightedSpace> {
    (
        prop_oneof![Just(Exponent::Infinity), (1.0f64..6.0).prop_map(Exponent::Finite)],
        proptest::collection::vec(0.01f64..100.0, dim),
    )
        .prop_map(|(p, w)| WeightedSpace::new(p, w).unwrap())
}

fn arb_vec(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| C64::new(a, b)), dim)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn norm_is_homogeneous_and_subadditive(
        (space, x, y) in (1usize..6).prop_flat_map(|d| (arb_space(d), arb_vec(d), arb_vec(d))),
        alpha in (-5.0f64..5.0, -5.0f64..5.0),
    ) {
        let alpha = C64::new(alpha.0, alpha.1);
        let nx = space.norm(&x).unwrap();
        let ny = space.norm(&y).unwrap();
        let sum: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(space.norm(&sum).unwrap() <= (nx + ny) * (1.0 + 1e-12) + 1e-300);
        let scaled: Vec<C64> = x.iter().map(|a| a * alpha).collect();
        let ns = space.norm(&scaled).unwrap();
        prop_assert!((ns - alpha.norm() * nx).abs() <= 1e-12 * ns.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn space_json_round_trips(space in (1usize..5).prop_flat_map(arb_space)) {
        let back: WeightedSpace = serde_json::from_str(&serde_json::to_string(&space).unwrap()).unwrap();
        prop_assert_eq!(back.exponent(), space.exponent());
        prop_assert_eq!(back.weights(), space.weights());
    }
}
