//! Interpolated norms: closed form, optimized analytic family, and the
//! duality bound, side by side.

use interp_lab::interpolation::{interpolated_norm, InterpolationRequest, NormMode, NumericOptions};
use interp_lab::{Couple, Exponent, WeightedSpace, C64};

fn main() -> interp_lab::Result<()> {
    let two = Exponent::Finite(2.0);
    let couple = Couple::new(WeightedSpace::new(two, vec![1.0, 0.5])?, WeightedSpace::new(two, vec![9.0, 8.0])?)?;
    let x = [C64::new(1.0, 0.0), C64::new(0.0, -2.0)];
    let opts = NumericOptions { degree: 16, samples: 128, budget: 300 };

    for theta in [0.25, 0.5, 0.75] {
        let req = InterpolationRequest::new(couple.clone(), theta)?;
        let closed = interpolated_norm(&req, &x, NormMode::Closed, &opts)?.upper;
        match interpolated_norm(&req, &x, NormMode::Numeric, &opts) {
            Ok(est) => println!(
                "θ={theta:<5} closed {closed:.6}  numeric [{:.6}, {:.6}]  stages {:?}",
                est.lower,
                est.upper,
                est.fit.map(|f| f.stages).unwrap_or_default()
            ),
            Err(e) => println!("θ={theta:<5} closed {closed:.6}  numeric: {e}"),
        }
    }
    Ok(())
}
