use interp_lab::analytic::{family_norm, BoundaryGrid, LaurentFamily};
use interp_lab::fourier::{
    coefficients, parseval_check, vallee_poussin, vallee_poussin_family, CircleFunction, CoefficientTable,
};
use interp_lab::rng::{complex_normal_vec, instance_rng};
use interp_lab::{Couple, Exponent, WeightedSpace};
use proptest::prelude::*;

fn max_gap(a: &CircleFunction, b: &CircleFunction) -> f64 {
    a.samples()
        .iter()
        .zip(b.samples())
        .flat_map(|(u, v)| u.iter().zip(v).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

#[test]
fn round_trip_across_sizes() {
    for (i, n) in [64usize, 128, 256, 512, 1024].into_iter().enumerate() {
        let mut rng = instance_rng(31, i as u64);
        let f = CircleFunction::random(&mut rng, n, 3, n / 4, 0.95).unwrap();
        let back = coefficients(&f).synthesize();
        assert!(max_gap(&f, &back) <= 1e-12, "N = {n}");
    }
}

#[test]
fn sn_is_a_projection_on_band_limited_data() {
    for i in 0..20u64 {
        let mut rng = instance_rng(32, i);
        let n = 1 + (i as usize % 30);
        let mut table = CoefficientTable::zero(256, 2).unwrap();
        for k in -(n as i64)..=n as i64 {
            table.coefficient_mut(k).unwrap().copy_from_slice(&complex_normal_vec(&mut rng, 2));
        }
        let once = vallee_poussin(&table, n).unwrap();
        assert_eq!(once, table);
        assert_eq!(vallee_poussin(&once, n).unwrap(), once);
        let f = table.synthesize();
        assert!(max_gap(&vallee_poussin(&coefficients(&f), n).unwrap().synthesize(), &f) <= 1e-12);
    }
}

#[test]
fn sn_ratio_is_one_on_low_degree_families() {
    let couple = Couple::new(
        WeightedSpace::new(Exponent::Finite(1.0), vec![1.0, 3.0]).unwrap(),
        WeightedSpace::new(Exponent::Infinity, vec![0.5, 2.0]).unwrap(),
    )
    .unwrap();
    let grid = BoundaryGrid::new(64).unwrap();
    for i in 0..20u64 {
        let phi = LaurentFamily::random(&mut instance_rng(33, i), 4, 2);
        let s = vallee_poussin_family(&phi, 4 + i as usize % 3);
        assert_eq!(family_norm(&s, &couple, &grid).unwrap(), family_norm(&phi, &couple, &grid).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parseval(seed in any::<u64>(), band in 0usize..64, dim in 1usize..5) {
        let mut rng = instance_rng(seed, 0);
        let f = CircleFunction::random(&mut rng, 256, dim, band, 0.97).unwrap();
        let y = complex_normal_vec(&mut rng, dim);
        prop_assert!(parseval_check(&f, &y).unwrap().rel_error <= 1e-8);
    }
}
