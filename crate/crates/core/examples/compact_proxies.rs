//! Truncation chain and covering transfer for a decaying quadratic proxy.

use interp_lab::compactness::{theorem_later_transfer_check, truncation_chain_check, CompactProxy, TransferOptions};
use interp_lab::polynomials::{AscentOptions, HomPolynomial};
use interp_lab::rng::{complex_normal_vec, instance_rng};
use interp_lab::{Couple, Exponent, WeightedSpace};

fn main() -> interp_lab::Result<()> {
    let mut rng = instance_rng(8, 0);
    let proxy = CompactProxy::geometric(HomPolynomial::diagonal(2, &complex_normal_vec(&mut rng, 4))?, 0.3)?;
    let ends = |w0: Vec<f64>, w1: Vec<f64>| -> interp_lab::Result<Couple> {
        Couple::new(WeightedSpace::new(Exponent::Finite(1.0), w0)?, WeightedSpace::new(Exponent::Infinity, w1)?)
    };
    let cx = ends(vec![1.0, 2.0, 0.5, 1.0], vec![0.5, 1.0, 1.0, 2.0])?;
    let cy = ends(vec![1.0; 4], vec![1.0; 4])?;
    let chain = truncation_chain_check(&proxy, &cx, &cy, 0.5, &[0, 1, 2, 3, 4], &AscentOptions::default(), 1)?;
    for row in &chain.rows {
        println!("n={} lhs {:.3e} rhs {:.3e} holds {}", row.n, row.lhs, row.rhs, row.holds);
    }

    // X0 = ℓ2(s), X1 = ℓ1(2s): the X1 norm dominates
    let s = vec![0.7, 0.9, 0.8, 0.6];
    let couple = Couple::new(
        WeightedSpace::from_scales(Exponent::Finite(2.0), s.clone())?,
        WeightedSpace::from_scales(Exponent::Finite(1.0), s.iter().map(|v| 2.0 * v).collect())?,
    )?;
    let y = WeightedSpace::unweighted(Exponent::Finite(2.0), 4)?;
    let opts = TransferOptions { net_samples: 5000, test_samples: 200, ..TransferOptions::default() };
    let r = theorem_later_transfer_check(&proxy.scaled(0.1), &couple, &y, 0.5, &opts, 2)?;
    println!(
        "net of {} centers, C′ {:.3}, t {:.1}, coverage {:.1}% (uninflated {:.1}%)",
        r.net_size,
        r.inflated.c_prime,
        r.inflated.t,
        100.0 * r.inflated.coverage_rate,
        100.0 * r.uninflated.coverage_rate
    );
    Ok(())
}
