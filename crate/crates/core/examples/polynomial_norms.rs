//! Norms of homogeneous polynomials and their polars between ℓp spaces.

use interp_lab::polynomials::{estimate_op_norm, martin_bound_check, random_polynomial, AscentOptions, HomPolynomial};
use interp_lab::{Exponent, WeightedSpace, C64};

fn main() -> interp_lab::Result<()> {
    let opts = AscentOptions::default();
    let l2 = WeightedSpace::unweighted(Exponent::Finite(2.0), 2)?;
    let l1 = WeightedSpace::unweighted(Exponent::Finite(1.0), 2)?;

    let diag = HomPolynomial::diagonal(3, &[C64::new(2.0, 0.0), C64::new(0.0, 1.0)])?;
    let est = estimate_op_norm(&diag, &l2, &l1, &opts, 0)?;
    println!("diagonal cubic ℓ2→ℓ1: [{:.6}, {:.6}] {:?}", est.lower, est.upper, est.certification);

    for seed in 0..3 {
        let p = random_polynomial(seed, 0, 2, 2, 2);
        let r = martin_bound_check(&p, &l2, &l2, &opts, seed)?;
        println!(
            "quadratic #{seed}: ‖P‖ ∈ [{:.4}, {:.4}] ({:?}), ‖P̃‖ ≥ {:.4}, factor {} → holds {:?}",
            r.poly.lower, r.poly.upper, r.poly.certification, r.polar_lower, r.factor, r.holds
        );
    }
    Ok(())
}
