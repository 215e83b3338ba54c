//! Finite-dimensional stand-ins for compactness: output-decay proxies,
//! coordinate truncations, greedy ε-nets, and the two approximation
//! arguments built on them.

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::interpolation::{lions_peetre_decompose, InterpolationRequest};
use crate::polynomials::{
    binomial, estimate_multilinear_norm, estimate_op_norm, factorial, random_unit_vector, AscentOptions, Certification,
    HomPolynomial, OpNormEstimate,
};
use crate::rng::instance_rng;
use crate::spaces::{Couple, Exponent, WeightedSpace};
use crate::tolerances::OBJECTIVE_TOL;
use crate::C64;

/// `diag(σ) ∘ P` with `σ` nonincreasing and nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactProxy {
    base: HomPolynomial,
    decay: Vec<f64>,
}

impl CompactProxy {
    pub fn new(base: HomPolynomial, decay: Vec<f64>) -> Result<Self> {
        check_dim(base.codomain_dim(), decay.len())?;
        if decay.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || decay.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter {
                name: "decay",
                reason: "must be finite, nonnegative and nonincreasing".into(),
            });
        }
        Ok(CompactProxy { base, decay })
    }

    /// `σ_j = ratio^j`.
    pub fn geometric(base: HomPolynomial, ratio: f64) -> Result<Self> {
        let q = base.codomain_dim();
        Self::new(base, (0..q).map(|j| ratio.powi(j as i32)).collect())
    }

    pub fn base(&self) -> &HomPolynomial {
        &self.base
    }

    pub fn decay(&self) -> &[f64] {
        &self.decay
    }

    /// The proxy as a polynomial.
    pub fn polynomial(&self) -> HomPolynomial {
        HomPolynomial::from_polar(self.base.polar().scale_outputs(&self.decay))
    }

    /// Proxy with every output multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let base = HomPolynomial::from_polar(self.base.polar().scale_outputs(&vec![c; self.decay.len()]));
        CompactProxy { base, decay: self.decay.clone() }
    }
}

/// `π_n`: keep the first `n` coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub n: usize,
    pub dim: usize,
}

pub fn truncation_projection(n: usize, dim: usize) -> Result<Truncation> {
    if n > dim {
        return Err(Error::InvalidParameter { name: "n", reason: format!("{n} exceeds dimension {dim}") });
    }
    Ok(Truncation { n, dim })
}

impl Truncation {
    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.dim, x.len())?;
        Ok(x.iter().enumerate().map(|(i, z)| if i < self.n { *z } else { C64::new(0.0, 0.0) }).collect())
    }

    /// `q × n` identity-prefix matrix.
    pub fn matrix(&self) -> Vec<Vec<C64>> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| C64::new(if i == j && i < self.n { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect()
    }

    /// `P − π_n P`.
    pub fn complement_of(&self, p: &HomPolynomial) -> Result<HomPolynomial> {
        check_dim(self.dim, p.codomain_dim())?;
        let keep: Vec<f64> = (0..self.dim).map(|j| if j < self.n { 0.0 } else { 1.0 }).collect();
        Ok(HomPolynomial::from_polar(p.polar().scale_outputs(&keep)))
    }
}

/// One row of the truncation chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub n: usize,
    /// Lower estimate of `‖P − π_n P‖_θ`.
    pub lhs: f64,
    /// `[(1+K1)‖P‖_1]^θ (m^m/m!) ‖P − π_n P‖_0^{1-θ}` from upper bounds.
    pub rhs: f64,
    pub holds: bool,
    /// Both endpoint norms on the right were certified.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub rows: Vec<ChainRow>,
    /// Basis-projection constant used (coordinate bases: 1).
    pub k1: f64,
    pub p1_norm: OpNormEstimate,
    /// `lhs(n_last)/lhs(n_first)` and the same for `rhs`.
    pub lhs_decay: f64,
    pub rhs_decay: f64,
}

/// Evaluates the chain at each `n` of the grid; `θ`-norms use the
/// closed-form interpolated spaces of both couples.
pub fn truncation_chain_check(
    proxy: &CompactProxy,
    couple_x: &Couple,
    couple_y: &Couple,
    theta: f64,
    n_grid: &[usize],
    opts: &AscentOptions,
    seed: u64,
) -> Result<ChainReport> {
    let p = proxy.polynomial();
    let m = p.degree();
    let k1 = 1.0;
    let x_theta = InterpolationRequest::new(couple_x.clone(), theta)?.closed_form_space();
    let y_theta = InterpolationRequest::new(couple_y.clone(), theta)?.closed_form_space();
    let p1_norm = estimate_op_norm(&p, couple_x.space1(), couple_y.space1(), opts, seed)?;
    let factor = (m as f64).powi(m as i32) / factorial(m);
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(idx, &n)| -> Result<ChainRow> {
            let q = truncation_projection(n, p.codomain_dim())?.complement_of(&p)?;
            let s = seed.wrapping_add(1 + idx as u64);
            let lhs = estimate_op_norm(&q, &x_theta, &y_theta, opts, s)?.lower;
            let q0 = estimate_op_norm(&q, couple_x.space0(), couple_y.space0(), opts, s)?;
            let rhs = ((1.0 + k1) * p1_norm.upper).powf(theta) * factor * q0.upper.powf(1.0 - theta);
            Ok(ChainRow {
                n,
                lhs,
                rhs,
                holds: lhs <= rhs * (1.0 + 1e-9) + 1e-9,
                certified: q0.certification.is_certified() && p1_norm.certification.is_certified(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratio = |f: fn(&ChainRow) -> f64| match (rows.first(), rows.last()) {
        (Some(a), Some(b)) if f(a) > 0.0 => f(b) / f(a),
        _ => 0.0,
    };
    let lhs_decay = ratio(|r| r.lhs);
    let rhs_decay = ratio(|r| r.rhs);
    Ok(ChainReport { rows, k1, p1_norm, lhs_decay, rhs_decay })
}

/// Greedy farthest-point net of a finite sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonNet {
    pub centers: Vec<Vec<C64>>,
    /// Positions of the centers in the sample.
    pub indices: Vec<usize>,
    pub radius: f64,
    pub space: WeightedSpace,
    /// Largest sample-to-net distance (≤ radius).
    pub covering_distance: f64,
}

impl EpsilonNet {
    /// `(index into centers, distance)` of the closest center.
    pub fn nearest(&self, point: &[C64]) -> Result<(usize, f64)> {
        check_dim(self.space.dim(), point.len())?;
        Ok(self
            .centers
            .iter()
            .enumerate()
            .map(|(i, c)| (i, distance(&self.space, c, point)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a }))
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

fn distance(space: &WeightedSpace, a: &[C64], b: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    space.norm_unchecked(&d)
}

/// Starts from the first sample, then repeatedly promotes the sample
/// farthest from the current centers (lowest index on ties) until every
/// sample lies within `ε`.
pub fn build_net(points: &[Vec<C64>], epsilon: f64, space: &WeightedSpace) -> Result<EpsilonNet> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter { name: "epsilon", reason: format!("must be positive, got {epsilon}") });
    }
    for p in points {
        check_dim(space.dim(), p.len())?;
    }
    let mut indices = Vec::new();
    let mut dist = vec![f64::INFINITY; points.len()];
    let mut covering_distance = 0.0;
    if !points.is_empty() {
        let mut next = 0;
        loop {
            indices.push(next);
            let c = &points[next];
            dist.par_iter_mut().zip(points).for_each(|(d, p)| *d = d.min(distance(space, c, p)));
            let (far, far_d) =
                dist.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, d)| if *d > a.1 { (i, *d) } else { a });
            if far_d <= epsilon {
                covering_distance = far_d;
                break;
            }
            next = far;
        }
    }
    Ok(EpsilonNet {
        centers: indices.iter().map(|&i| points[i].clone()).collect(),
        indices,
        radius: epsilon,
        space: space.clone(),
        covering_distance,
    })
}

/// Settings for [`theorem_later_transfer_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferOptions {
    pub epsilon: f64,
    /// Points of `B_{X0}` whose images seed the net.
    pub net_samples: usize,
    /// Test points in `B_{X_θ}`.
    pub test_samples: usize,
    /// Points used to measure the decomposition constant.
    pub constant_samples: usize,
    /// Multiplier on the measured constant.
    pub safety: f64,
}

impl Default for TransferOptions {
    fn default() -> Self {
        TransferOptions { epsilon: 0.1, net_samples: 20_000, test_samples: 500, constant_samples: 100, safety: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRun {
    pub c_prime: f64,
    pub t: f64,
    pub covered: usize,
    pub coverage_rate: f64,
    /// Largest `‖P(x) − nearest center‖_Y` over the test points.
    pub worst_distance: f64,
    /// Test points whose `X1` part exceeded `C′ t^{θ-1}`.
    pub tail_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub net_size: usize,
    pub polar_norm: f64,
    pub polar_certification: Certification,
    /// Sup over samples and `t ∈ [1e-3, 1e3]` of `‖x1‖_1 / (t^{θ-1}‖x‖_θ)`.
    pub measured_c_prime: f64,
    pub inflated: TransferRun,
    pub uninflated: TransferRun,
    /// `‖x‖_0 ≤ ‖x‖_1` on the couple, so decomposed `X0` parts stay in the
    /// unit ball.
    pub x1_dominated: bool,
}

/// Whether `‖·‖_0 ≤ ‖·‖_1` holds on the whole space (entrywise scales and
/// `p1 ≤ p0`).
pub fn is_x1_dominated(couple: &Couple) -> bool {
    let (a, b) = (couple.space0(), couple.space1());
    b.exponent().reciprocal() >= a.exponent().reciprocal() && a.scales().iter().zip(b.scales()).all(|(s0, s1)| s0 <= s1)
}

/// Random point of the unit ball of `x` (direction complex normal, radius
/// `u^{1/(2n)}`).
fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, x: &WeightedSpace) -> Vec<C64> {
    let v = random_unit_vector(rng, x);
    let r = rng.random::<f64>().powf(1.0 / (2.0 * x.dim() as f64));
    v.into_iter().map(|z| z * r).collect()
}

/// Covering transfer from `P(B_{X0})` to `P(B_{X_θ})`.
///
/// An `ε/2`-net of sampled images `P(B_{X0})` is built first. `C′` is
/// measured from K-functional splits over 13 log-spaced `t`, inflated by
/// the safety factor, and `t ≥ 1` is the smallest value with
/// `‖P̃‖ C′ t^{θ-1} Σ_{k=1}^m C(m,k) < ε/2` (`‖P̃‖` a certified or crude
/// upper bound on `X0`). Each test `x` on the unit sphere of `X_θ` is split
/// at `t` and `P(x)` is matched against the net.
pub fn theorem_later_transfer_check(
    proxy: &CompactProxy,
    couple_x: &Couple,
    y: &WeightedSpace,
    theta: f64,
    opts: &TransferOptions,
    seed: u64,
) -> Result<TransferReport> {
    let p = proxy.polynomial();
    let m = p.degree();
    check_dim(couple_x.dim(), p.domain_dim())?;
    check_dim(y.dim(), p.codomain_dim())?;
    let req = InterpolationRequest::new(couple_x.clone(), theta)?;
    let x_theta = req.closed_form_space();
    let x0 = couple_x.space0();

    let images: Vec<Vec<C64>> = (0..opts.net_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(seed, i as u64);
            let x = if i % 2 == 0 { random_unit_vector(&mut rng, x0) } else { random_ball_point(&mut rng, x0) };
            p.evaluate(&x)
        })
        .collect::<Result<_>>()?;
    let mut points = vec![vec![C64::new(0.0, 0.0); y.dim()]];
    points.extend(images);
    let net = build_net(&points, opts.epsilon / 2.0, y)?;

    let polar = estimate_multilinear_norm(p.polar(), &vec![x0; m], y, &AscentOptions::default(), seed ^ 0xa5a5)?;
    let ts: Vec<f64> = (0..13).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect();
    let sample_sphere = |counter_base: u64, count: usize| -> Vec<Vec<C64>> {
        (0..count).map(|i| random_unit_vector(&mut instance_rng(seed ^ counter_base, i as u64), &x_theta)).collect()
    };
    let measure_points = sample_sphere(0x00c0_ffee, opts.constant_samples);
    let measured_c_prime = measure_points
        .par_iter()
        .map(|x| -> Result<f64> {
            let mut best = 0.0f64;
            for &t in &ts {
                best = best.max(lions_peetre_decompose(&req, x, t, OBJECTIVE_TOL)?.constant1);
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let tests = sample_sphere(0x7e57, opts.test_samples);
    let run = |c_prime: f64| -> Result<TransferRun> {
        let tail_sum = (1..=m).map(|k| binomial(m, k)).sum::<f64>();
        let t = if polar.upper * c_prime * tail_sum == 0.0 {
            1.0
        } else {
            // strict inequality: nudge past the root
            (2.0 * polar.upper * c_prime * tail_sum / opts.epsilon).powf(1.0 / (1.0 - theta)).max(1.0) * (1.0 + 1e-9)
        };
        let rows = tests
            .par_iter()
            .map(|x| -> Result<(f64, bool)> {
                let lp = lions_peetre_decompose(&req, x, t, OBJECTIVE_TOL)?;
                let x1_norm = couple_x.space1().norm(&lp.decomposition.part1)?;
                let tail_ok = x1_norm <= c_prime * t.powf(theta - 1.0) * (1.0 + 1e-9);
                let (_, d) = net.nearest(&p.evaluate(x)?)?;
                Ok((d, tail_ok))
            })
            .collect::<Result<Vec<_>>>()?;
        let covered = rows.iter().filter(|r| r.0 <= opts.epsilon).count();
        Ok(TransferRun {
            c_prime,
            t,
            covered,
            coverage_rate: if rows.is_empty() { 1.0 } else { covered as f64 / rows.len() as f64 },
            worst_distance: rows.iter().map(|r| r.0).fold(0.0, f64::max),
            tail_violations: rows.iter().filter(|r| !r.1).count(),
        })
    };
    let inflated = run(opts.safety * measured_c_prime)?;
    let uninflated = run(measured_c_prime)?;
    Ok(TransferReport {
        net_size: net.len(),
        polar_norm: polar.upper,
        polar_certification: polar.certification,
        measured_c_prime,
        inflated,
        uninflated,
        x1_dominated: is_x1_dominated(couple_x),
    })
}

/// Singular values (nonincreasing) of `L: ℓ^2(w) → ℓ^2(w')`, `l[j][i]`.
pub fn singular_values(l: &[Vec<C64>], from: &WeightedSpace, to: &WeightedSpace) -> Result<Vec<f64>> {
    let two = Exponent::Finite(2.0);
    if from.exponent() != two || to.exponent() != two {
        return Err(Error::InvalidParameter {
            name: "exponent",
            reason: "singular values need p = 2 on both sides".into(),
        });
    }
    check_dim(to.dim(), l.len())?;
    for row in l {
        check_dim(from.dim(), row.len())?;
    }
    let (q, n) = (to.dim(), from.dim());
    if q == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let a = DMatrix::from_fn(q, n, |j, i| l[j][i] * (to.scales()[j] / from.scales()[i]));
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}
