//! Fourier coefficients of a vector function on the circle, Parseval, and
//! the de la Vallée Poussin window.

use interp_lab::fourier::{
    coefficients, parseval_check, vallee_poussin, vallee_poussin_weight, CircleFunction, CoefficientTable,
};
use interp_lab::rng::instance_rng;
use interp_lab::C64;

fn main() -> interp_lab::Result<()> {
    let mut rng = instance_rng(5, 0);
    let f = CircleFunction::random(&mut rng, 128, 2, 20, 0.9)?;
    let r = parseval_check(&f, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)])?;
    println!("Parseval: {:.12} vs {:.12} (rel {:.1e})", r.lhs, r.rhs, r.rel_error);

    let n = 8;
    let window: Vec<String> = (0..=2 * n as i64 + 1).map(|k| format!("{:.3}", vallee_poussin_weight(k, n))).collect();
    println!("window N={n}: {}", window.join(" "));

    let support =
        |t: &CoefficientTable| t.iter().filter(|(_, c)| c.iter().any(|z| z.norm() > 1e-14)).map(|(k, _)| k.abs()).max();
    let raw = coefficients(&f);
    let smoothed = vallee_poussin(&raw, n)?;
    println!("highest nonzero |k|: before {:?}, after {:?}", support(&raw), support(&smoothed));
    Ok(())
}
