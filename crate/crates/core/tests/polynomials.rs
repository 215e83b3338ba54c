use interp_lab::polynomials::{
    estimate_op_norm, lemma_expansion_check, polarize_via_formula, random_polynomial, AscentOptions, HomPolynomial,
    SymMultilinearMap,
};
use interp_lab::rng::{complex_normal, complex_normal_vec, instance_rng, log_uniform};
use interp_lab::{Exponent, WeightedSpace, C64};
use proptest::prelude::*;
use rand::Rng;

fn space<R: Rng>(rng: &mut R, p: Exponent, dim: usize) -> WeightedSpace {
    WeightedSpace::new(p, (0..dim).map(|_| log_uniform(rng, 0.2, 5.0)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn homogeneity(seed in any::<u64>(), m in 1usize..6, n in 1usize..5, q in 1usize..4) {
        let p = random_polynomial(seed, 0, m, n, q);
        let mut rng = instance_rng(seed, 1);
        let x = complex_normal_vec(&mut rng, n);
        let a = complex_normal(&mut rng);
        let ax: Vec<C64> = x.iter().map(|z| z * a).collect();
        let lhs = p.evaluate(&ax).unwrap();
        let rhs: Vec<C64> = p.evaluate(&x).unwrap().into_iter().map(|v| v * a.powu(m as u32)).collect();
        let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (u, v) in lhs.iter().zip(&rhs) {
            prop_assert!((u - v).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn polar_formula_matches(seed in any::<u64>(), m in 1usize..6, n in 1usize..5, q in 1usize..5) {
        let p = random_polynomial(seed, 0, m, n, q);
        let mut rng = instance_rng(seed, 2);
        let xs: Vec<Vec<C64>> = (0..m).map(|_| complex_normal_vec(&mut rng, n)).collect();
        let refs: Vec<&[C64]> = xs.iter().map(|v| v.as_slice()).collect();
        let a = polarize_via_formula(&p, &refs).unwrap();
        let b = p.polar().evaluate(&refs).unwrap();
        let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn expansion(seed in any::<u64>(), m in 1usize..7, n in 1usize..5) {
        let mut rng = instance_rng(seed, 3);
        let t = SymMultilinearMap::random(&mut rng, m, n, 2).unwrap();
        let x0 = complex_normal_vec(&mut rng, n);
        let x1 = complex_normal_vec(&mut rng, n);
        prop_assert!(lemma_expansion_check(&t, &x0, &x1).unwrap().rel_error <= 1e-10);
    }
}

#[test]
fn lower_never_exceeds_certified_upper() {
    let exps = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity];
    let opts = AscentOptions { starts: 16, iterations: 100 };
    let mut certified = 0;
    for i in 0..60u64 {
        let mut rng = instance_rng(21, i);
        let m = 1 + (i % 2) as usize;
        let n = rng.random_range(1..=2);
        let q = rng.random_range(1..=3);
        let p = if i % 3 == 0 {
            HomPolynomial::diagonal(m, &complex_normal_vec(&mut rng, n)).unwrap()
        } else {
            HomPolynomial::random(&mut rng, m, n, if i % 3 == 0 { n } else { q }).unwrap()
        };
        let x = space(&mut rng, exps[i as usize % 3], n);
        let y = space(&mut rng, exps[(i / 3) as usize % 3], p.codomain_dim());
        let est = estimate_op_norm(&p, &x, &y, &opts, i).unwrap();
        if est.certification.is_certified() {
            certified += 1;
            assert!(est.lower <= est.upper * (1.0 + 1e-9), "{i}: {} > {}", est.lower, est.upper);
        }
    }
    assert!(certified > 30, "{certified}");
}
