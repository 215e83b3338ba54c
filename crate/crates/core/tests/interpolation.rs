use interp_lab::interpolation::{
    closed_form_norm, duality_lower_bound, interpolated_norm, interpolation_inequality_check, peetre_norm_bracket,
    InterpolationRequest, NormMode, NumericOptions, PeetreRepresentation,
};
use interp_lab::rng::{complex_normal_vec, instance_rng, log_uniform};
use interp_lab::spaces::{intersection_norm, sum_norm};
use interp_lab::{Couple, Exponent, WeightedSpace, C64};
use proptest::prelude::*;
use rand::Rng;

const EXPONENTS: [Exponent; 4] =
    [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(3.0), Exponent::Infinity];

fn random_couple(seed: u64, dim: usize) -> Couple {
    let mut rng = instance_rng(seed, 99);
    let mut space = || {
        let p = EXPONENTS[rng.random_range(0..EXPONENTS.len())];
        WeightedSpace::new(p, (0..dim).map(|_| log_uniform(&mut rng, 0.05, 20.0)).collect()).unwrap()
    };
    let s0 = space();
    Couple::new(s0, space()).unwrap()
}

#[test]
fn endpoints_are_the_endpoint_norms() {
    for seed in 0..50 {
        let couple = random_couple(seed, 3);
        let x = complex_normal_vec(&mut instance_rng(seed, 1), 3);
        for (theta, space) in [(0.0, couple.space0()), (1.0, couple.space1())] {
            let req = InterpolationRequest::new(couple.clone(), theta).unwrap();
            let est = interpolated_norm(&req, &x, NormMode::Closed, &NumericOptions::default()).unwrap();
            assert_eq!(est.lower, space.norm(&x).unwrap());
            assert_eq!(est.upper, est.lower);
        }
    }
}

#[test]
fn peetre_upper_dominates_on_nonnegative_representations() {
    for seed in 0..40 {
        let couple = random_couple(seed, 3);
        let theta = 0.2 + 0.6 * (seed as f64 / 40.0);
        let req = InterpolationRequest::new(couple.clone(), theta).unwrap();
        let mut rng = instance_rng(seed, 2);
        let x: Vec<C64> = (0..3).map(|_| C64::new(rng.random_range(0.1..2.0), 0.0)).collect();
        let rep = PeetreRepresentation::dyadic(&couple, &x, 30).unwrap();
        assert_eq!(rep.reconstruct(), x);
        let (lower, upper) = peetre_norm_bracket(&req, &rep, 64, seed).unwrap();
        assert!((upper - lower).abs() <= 1e-12 * upper);
        assert!(upper >= closed_form_norm(&req, &x).unwrap() * (1.0 - 1e-9));
    }
}

#[test]
fn duality_bound_reaches_the_closed_form() {
    for seed in 0..100 {
        let couple = random_couple(seed, 4);
        let req = InterpolationRequest::new(couple, 0.37).unwrap();
        let x = complex_normal_vec(&mut instance_rng(seed, 3), 4);
        let closed = closed_form_norm(&req, &x).unwrap();
        let lower = duality_lower_bound(&req, &x).unwrap();
        assert!(lower <= closed * (1.0 + 1e-9));
        assert!(lower >= closed * (1.0 - 1e-9), "{lower} vs {closed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn holder_inequality(seed in any::<u64>(), theta in 0.0f64..=1.0, dim in 1usize..5) {
        let req = InterpolationRequest::new(random_couple(seed, dim), theta).unwrap();
        let x = complex_normal_vec(&mut instance_rng(seed, 4), dim);
        prop_assert!(interpolation_inequality_check(&req, &x).unwrap().implied_c <= 1.0 + 1e-9);
    }

    #[test]
    fn between_sum_and_intersection(seed in any::<u64>(), theta in 0.0f64..=1.0, dim in 1usize..4) {
        let couple = random_couple(seed, dim);
        let x = complex_normal_vec(&mut instance_rng(seed, 5), dim);
        let closed = closed_form_norm(&InterpolationRequest::new(couple.clone(), theta).unwrap(), &x).unwrap();
        let cap = intersection_norm(&couple, &x).unwrap();
        let (cup, _) = sum_norm(&couple, &x, 1e-9).unwrap();
        prop_assert!(closed <= cap + 1e-9 * cap);
        prop_assert!(closed >= cup - 1e-6 * cup.max(1.0), "{} < {}", closed, cup);
    }

    #[test]
    fn homogeneous(seed in any::<u64>(), theta in 0.0f64..=1.0, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let couple = random_couple(seed, 3);
        let req = InterpolationRequest::new(couple, theta).unwrap();
        let x = complex_normal_vec(&mut instance_rng(seed, 6), 3);
        let a = C64::new(re, im);
        let ax: Vec<C64> = x.iter().map(|z| z * a).collect();
        let lhs = closed_form_norm(&req, &ax).unwrap();
        let rhs = a.norm() * closed_form_norm(&req, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }
}
