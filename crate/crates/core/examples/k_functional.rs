//! K-functional splits of a vector between ℓ1 and weighted ℓ∞.

use interp_lab::spaces::{k_functional, sum_norm};
use interp_lab::{Couple, Exponent, WeightedSpace, C64};

fn main() -> interp_lab::Result<()> {
    let couple = Couple::new(
        WeightedSpace::unweighted(Exponent::Finite(1.0), 3)?,
        WeightedSpace::new(Exponent::Infinity, vec![1.0, 4.0, 0.25])?,
    )?;
    let x = [C64::new(3.0, 0.0), C64::new(-1.0, 1.0), C64::new(0.0, 2.0)];

    println!("{:>8} {:>12} {:>12} {:>12}", "t", "K(t,x)", "lower", "‖x1‖_1");
    for t in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let (k, d) = k_functional(&couple, &x, t, 1e-9)?;
        let n1 = couple.space1().norm(&d.part1)?;
        println!("{t:>8} {k:>12.6} {:>12.6} {n1:>12.6}", d.lower_bound);
    }
    let (s, _) = sum_norm(&couple, &x, 1e-9)?;
    println!("sum-space norm {s:.6}");
    Ok(())
}
