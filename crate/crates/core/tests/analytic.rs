use interp_lab::analytic::{
    family_norm, mho_membership, minimize_family, three_lines_check, BoundaryGrid, LaurentFamily, Verdict,
};
use interp_lab::interpolation::{closed_form_norm, InterpolationRequest};
use interp_lab::rng::{complex_normal_vec, instance_rng, log_uniform};
use interp_lab::{Couple, Exponent, WeightedSpace, C64};
use proptest::prelude::*;
use rand::Rng;

fn l2_couple(w0: Vec<f64>, w1: Vec<f64>) -> Couple {
    let two = Exponent::Finite(2.0);
    Couple::new(WeightedSpace::new(two, w0).unwrap(), WeightedSpace::new(two, w1).unwrap()).unwrap()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn l2_weighted_root_three() {
    // ℓ2(1) and ℓ2(9) at θ = 1/2: scales 1 and 3 → σ = √3
    let couple = l2_couple(vec![1.0], vec![9.0]);
    let fit = minimize_family(&couple, 0.5, &[c(1.0)], 32, &BoundaryGrid::new(256).unwrap(), 300).unwrap();
    let target = 3f64.sqrt();
    assert!(fit.value >= target - 1e-6, "{}", fit.value);
    assert!(fit.value <= target * 1.05, "{}", fit.value);
}

#[test]
fn value_non_increasing_along_doubling_degrees() {
    let mut rng = instance_rng(11, 0);
    for case in 0..3 {
        let dim = 2 + case % 2;
        let couple = l2_couple(
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
        );
        let x = complex_normal_vec(&mut rng, dim);
        let grid = BoundaryGrid::new(128).unwrap();
        let values: Vec<f64> = [2, 4, 8, 16, 32]
            .iter()
            .map(|&m| minimize_family(&couple, 0.4, &x, m, &grid, 150).unwrap().value)
            .collect();
        for w in values.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "{values:?}");
        }
    }
}

#[test]
fn returned_family_never_beats_closed_form() {
    let mut rng = instance_rng(12, 0);
    let grid = BoundaryGrid::new(128).unwrap();
    for _ in 0..6 {
        let dim = rng.random_range(1..=3);
        let couple = l2_couple(
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
        );
        let theta = rng.random_range(0.1..0.9);
        let x = complex_normal_vec(&mut rng, dim);
        let fit = minimize_family(&couple, theta, &x, 8, &grid, 100).unwrap();
        let closed = closed_form_norm(&InterpolationRequest::new(couple.clone(), theta).unwrap(), &x).unwrap();
        let norm = family_norm(&fit.family, &couple, &grid.refined(4)).unwrap();
        assert!(norm >= closed - 1e-6, "{norm} < {closed}");
        let at_theta = fit.family.eval_real(theta);
        for (a, b) in at_theta.iter().zip(&x) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

#[test]
fn equal_spaces_constant_family_three_lines() {
    let couple = l2_couple(vec![1.0, 2.0], vec![1.0, 2.0]);
    let phi = LaurentFamily::constant(&[c(1.0), c(-2.0)]);
    let r = three_lines_check(&phi, &couple, 0.3, &BoundaryGrid::new(16).unwrap()).unwrap();
    assert!((r.implied_c - 1.0).abs() < 1e-12);
    let zero = three_lines_check(&LaurentFamily::zero(2, 2), &couple, 0.3, &BoundaryGrid::new(16).unwrap()).unwrap();
    assert_eq!((zero.left, zero.right, zero.implied_c, zero.anomaly), (0.0, 0.0, 0.0, false));
}

#[test]
fn membership_examples() {
    let couple = l2_couple(vec![1.0, 4.0], vec![0.5, 2.0]);
    let zero = mho_membership(&LaurentFamily::zero(3, 2), &couple, 16, 0).unwrap();
    assert_eq!((zero.lower, zero.upper, zero.verdict), (0.0, 0.0, Verdict::Member));

    let x = [c(0.3), C64::new(0.0, 0.1)];
    let size = couple.space0().norm(&x).unwrap().max(couple.space1().norm(&x).unwrap());
    let half: Vec<C64> = x.iter().map(|z| z * (0.5 / size)).collect();
    let single = mho_membership(&LaurentFamily::constant(&half), &couple, 16, 0).unwrap();
    assert!((single.lower - 0.5).abs() < 1e-12 && (single.upper - 0.5).abs() < 1e-12);
    assert_eq!(single.verdict, Verdict::Member);

    let two =
        LaurentFamily::from_coefficients(1, 2, vec![(-1, vec![c(1.0), c(0.5)]), (1, vec![c(0.2), c(2.0)])]).unwrap();
    let b = mho_membership(&two, &couple, 16, 0).unwrap();
    assert!((b.upper - b.lower).abs() <= 1e-12 * b.upper);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_ordered(seed in any::<u64>(), degree in 0usize..5, dim in 1usize..4) {
        let mut rng = instance_rng(seed, 0);
        let couple = l2_couple(
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
        );
        let phi = LaurentFamily::random(&mut rng, degree, dim);
        let b = mho_membership(&phi, &couple, 32, seed).unwrap();
        prop_assert!(b.lower <= b.upper);
    }

    #[test]
    fn family_norm_dominates_the_value_it_interpolates(seed in any::<u64>(), theta in 0.05f64..0.95) {
        let mut rng = instance_rng(seed, 1);
        let dim = rng.random_range(1..=3);
        let couple = l2_couple(
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
            (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect(),
        );
        let phi = LaurentFamily::random(&mut rng, 4, dim);
        let req = InterpolationRequest::new(couple.clone(), theta).unwrap();
        let closed = closed_form_norm(&req, &phi.eval_real(theta)).unwrap();
        let norm = family_norm(&phi, &couple, &BoundaryGrid::new(512).unwrap()).unwrap();
        prop_assert!(norm >= closed * (1.0 - 1e-3), "{} < {}", norm, closed);
    }
}
