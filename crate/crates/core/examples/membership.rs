//! Three-circles constants and unconditional-sum brackets for random
//! analytic families, and the dyadic Peetre representation of a vector.

use interp_lab::analytic::{mho_membership, three_lines_check, BoundaryGrid, LaurentFamily};
use interp_lab::interpolation::{peetre_norm_bracket, InterpolationRequest, PeetreRepresentation};
use interp_lab::rng::instance_rng;
use interp_lab::{Couple, Exponent, WeightedSpace, C64};

fn main() -> interp_lab::Result<()> {
    let couple = Couple::new(
        WeightedSpace::new(Exponent::Finite(1.0), vec![1.0, 10.0, 0.1])?,
        WeightedSpace::new(Exponent::Finite(2.0), vec![3.0, 0.2, 1.0])?,
    )?;
    let grid = BoundaryGrid::new(64)?;
    for i in 0..4 {
        let phi = LaurentFamily::random(&mut instance_rng(3, i), 6, 3);
        let tl = three_lines_check(&phi, &couple, 0.5, &grid)?;
        let m = mho_membership(&phi, &couple, 128, i)?;
        println!("family {i}: implied C {:.4}  bracket [{:.4}, {:.4}] {:?}", tl.implied_c, m.lower, m.upper, m.verdict);
    }

    let req = InterpolationRequest::new(couple.clone(), 0.4)?;
    let x = [C64::new(1.0, 0.0), C64::new(0.5, 0.0), C64::new(2.0, 0.0)];
    let rep = PeetreRepresentation::dyadic(&couple, &x, 20)?;
    let (lo, hi) = peetre_norm_bracket(&req, &rep, 64, 0)?;
    let ks: Vec<i64> = rep.terms().iter().map(|t| t.0).collect();
    println!("dyadic indices {ks:?}, norm bracket [{lo:.6}, {hi:.6}]");
    Ok(())
}
