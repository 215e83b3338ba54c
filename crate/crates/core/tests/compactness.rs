use interp_lab::compactness::{
    build_net, singular_values, theorem_later_transfer_check, truncation_chain_check, truncation_projection,
    CompactProxy, TransferOptions,
};
use interp_lab::polynomials::{AscentOptions, HomPolynomial, SymMultilinearMap};
use interp_lab::rng::{complex_normal_vec, instance_rng, log_uniform};
use interp_lab::{Couple, Exponent, WeightedSpace, C64};
use rand::Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Recomputes every distance from scratch each round.
fn greedy_oracle(points: &[Vec<C64>], eps: f64, space: &WeightedSpace) -> Vec<usize> {
    let dist = |a: &[C64], b: &[C64]| space.norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()).unwrap();
    let mut centers = vec![0usize];
    loop {
        let mut far = None;
        let mut far_d = eps;
        for (i, p) in points.iter().enumerate() {
            let d = centers.iter().map(|&j| dist(&points[j], p)).fold(f64::INFINITY, f64::min);
            if d > far_d {
                far = Some(i);
                far_d = d;
            }
        }
        match far {
            Some(i) => centers.push(i),
            None => return centers,
        }
    }
}

#[test]
fn net_on_circle_matches_oracle() {
    let space = WeightedSpace::unweighted(Exponent::Finite(2.0), 2).unwrap();
    let mut rng = instance_rng(41, 0);
    let points: Vec<Vec<C64>> = (0..1000)
        .map(|_| {
            let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            vec![c(t.cos()), c(t.sin())]
        })
        .collect();
    let net = build_net(&points, 0.1, &space).unwrap();
    assert_eq!(net.indices, greedy_oracle(&points, 0.1, &space));
    assert!(net.covering_distance <= 0.1);
    assert_eq!(net, build_net(&points, 0.1, &space).unwrap());
}

#[test]
fn truncation_is_idempotent_and_contractive() {
    let exps = [Exponent::Finite(1.0), Exponent::Finite(1.7), Exponent::Finite(2.0), Exponent::Infinity];
    for i in 0..10_000u64 {
        let mut rng = instance_rng(42, i);
        let dim = rng.random_range(1..=6);
        let space =
            WeightedSpace::new(exps[i as usize % 4], (0..dim).map(|_| log_uniform(&mut rng, 0.05, 20.0)).collect())
                .unwrap();
        let pi = truncation_projection(rng.random_range(0..=dim), dim).unwrap();
        let x = complex_normal_vec(&mut rng, dim);
        let once = pi.apply(&x).unwrap();
        assert_eq!(pi.apply(&once).unwrap(), once);
        assert!(space.norm(&once).unwrap() <= space.norm(&x).unwrap());
    }
    assert_eq!(truncation_projection(0, 3).unwrap().apply(&[c(1.0), c(2.0), c(3.0)]).unwrap(), vec![c(0.0); 3]);
}

fn l1_linf_couple(seed: u64, dim: usize) -> Couple {
    let mut rng = instance_rng(seed, 7);
    let mut w = || (0..dim).map(|_| log_uniform(&mut rng, 0.2, 5.0)).collect::<Vec<_>>();
    let a = WeightedSpace::new(Exponent::Finite(1.0), w()).unwrap();
    Couple::new(a, WeightedSpace::new(Exponent::Infinity, w()).unwrap()).unwrap()
}

#[test]
fn chain_holds_and_right_side_decreases() {
    let opts = AscentOptions { starts: 16, iterations: 100 };
    for (i, dim) in [3usize, 4, 5].into_iter().enumerate() {
        let mut rng = instance_rng(43, i as u64);
        let a: Vec<Vec<C64>> = (0..dim).map(|_| complex_normal_vec(&mut rng, dim)).collect();
        let linear = HomPolynomial::from_polar(SymMultilinearMap::linear(&a).unwrap());
        let quad = HomPolynomial::diagonal(2, &complex_normal_vec(&mut rng, dim)).unwrap();
        for base in [linear, quad] {
            let proxy = CompactProxy::geometric(base, 0.3).unwrap();
            let grid: Vec<usize> = (0..=dim).collect();
            let r = truncation_chain_check(
                &proxy,
                &l1_linf_couple(i as u64, dim),
                &l1_linf_couple(99 + i as u64, dim),
                0.5,
                &grid,
                &opts,
                1,
            )
            .unwrap();
            assert_eq!(r.k1, 1.0);
            for row in &r.rows {
                assert!(row.certified);
                assert!(row.holds, "{row:?}");
            }
            for w in r.rows.windows(2) {
                assert!(w[1].rhs <= w[0].rhs * (1.0 + 1e-12));
            }
            let last = r.rows.last().unwrap();
            assert_eq!((last.lhs, last.rhs), (0.0, 0.0));
        }
    }
}

#[test]
fn zero_polynomial_is_covered_by_one_center() {
    let couple = Couple::new(
        WeightedSpace::from_scales(Exponent::Finite(2.0), vec![0.6, 0.8]).unwrap(),
        WeightedSpace::from_scales(Exponent::Finite(1.0), vec![1.0, 2.0]).unwrap(),
    )
    .unwrap();
    let zero = HomPolynomial::from_polar(SymMultilinearMap::zero(2, 2, 2).unwrap());
    let proxy = CompactProxy::geometric(zero, 0.5).unwrap();
    let y = WeightedSpace::unweighted(Exponent::Finite(2.0), 2).unwrap();
    let opts =
        TransferOptions { net_samples: 200, test_samples: 50, constant_samples: 10, ..TransferOptions::default() };
    let r = theorem_later_transfer_check(&proxy, &couple, &y, 0.5, &opts, 3).unwrap();
    assert_eq!(r.net_size, 1);
    assert_eq!(r.inflated.coverage_rate, 1.0);
    assert!(r.x1_dominated);
}

#[test]
fn singular_value_examples() {
    let two = WeightedSpace::unweighted(Exponent::Finite(2.0), 3).unwrap();
    let id = truncation_projection(3, 3).unwrap().matrix();
    assert_eq!(singular_values(&id, &two, &two).unwrap(), vec![1.0; 3]);
    let zero = truncation_projection(0, 3).unwrap().matrix();
    assert_eq!(singular_values(&zero, &two, &two).unwrap(), vec![0.0; 3]);
}
