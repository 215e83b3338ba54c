//! Analytic families on the annulus `1 ≤ |z| ≤ e`, the norm of `F{X0, X1}`,
//! the min–max optimizer realizing the complex-method norm, and the
//! three-circles and unconditional-sum diagnostics.
//!
//! A family is a vector-valued Laurent polynomial `φ(z) = Σ_{|k|≤M} c_k z^k`.
//! Its boundary values on `|z| = ρ` at the nodes `t_j = 2πj/N` are computed
//! with one inverse DFT per coordinate, which is exact when `N ≥ 2M + 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dft::{bin, Dft};
use crate::error::{check_dim, Error, Result};
use crate::interpolation::{closed_form_norm, InterpolationRequest};
use crate::rng::{complex_normal, instance_rng, random_phase};
use crate::spaces::{Couple, Exponent, WeightedSpace};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `φ(z) = Σ_{k=-M}^{M} c_k z^k` with coefficients in `C^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FamilyRepr", into = "FamilyRepr")]
pub struct LaurentFamily {
    degree: usize,
    dim: usize,
    /// `coeffs[k + M]`.
    coeffs: Vec<Vec<C64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyRepr {
    #[serde(rename = "M")]
    degree: usize,
    coefficients: Vec<(i64, Vec<[f64; 2]>)>,
}

impl TryFrom<FamilyRepr> for LaurentFamily {
    type Error = Error;
    fn try_from(r: FamilyRepr) -> Result<Self> {
        let dim = r.coefficients.first().map(|(_, v)| v.len()).ok_or_else(|| Error::InvalidParameter {
            name: "coefficients",
            reason: "at least one coefficient is needed to fix the dimension".into(),
        })?;
        let coefficients = r
            .coefficients
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().map(|[re, im]| C64::new(re, im)).collect()))
            .collect();
        LaurentFamily::from_coefficients(r.degree, dim, coefficients)
    }
}

impl From<LaurentFamily> for FamilyRepr {
    fn from(f: LaurentFamily) -> Self {
        let m = f.degree as i64;
        FamilyRepr {
            degree: f.degree,
            coefficients: (-m..=m).map(|k| (k, f.coefficient(k).iter().map(|z| [z.re, z.im]).collect())).collect(),
        }
    }
}

impl LaurentFamily {
    pub fn zero(degree: usize, dim: usize) -> Self {
        LaurentFamily { degree, dim, coeffs: vec![vec![ZERO; dim]; 2 * degree + 1] }
    }

    /// The constant family `φ ≡ x`.
    pub fn constant(x: &[C64]) -> Self {
        LaurentFamily { degree: 0, dim: x.len(), coeffs: vec![x.to_vec()] }
    }

    /// `φ(z) = x z^k`.
    pub fn monomial(k: i64, x: &[C64]) -> Self {
        let mut f = Self::zero(k.unsigned_abs() as usize, x.len());
        f.coefficient_mut(k).copy_from_slice(x);
        f
    }

    /// Family from `(k, c_k)` pairs; unlisted coefficients are zero.
    pub fn from_coefficients(degree: usize, dim: usize, coefficients: Vec<(i64, Vec<C64>)>) -> Result<Self> {
        let mut f = Self::zero(degree, dim);
        for (k, c) in coefficients {
            if k.unsigned_abs() as usize > degree {
                return Err(Error::InvalidParameter {
                    name: "coefficients",
                    reason: format!("index {k} exceeds degree {degree}"),
                });
            }
            check_dim(dim, c.len())?;
            f.coefficient_mut(k).copy_from_slice(&c);
        }
        Ok(f)
    }

    /// Random family of the given degree: `c_k` has independent complex
    /// normal entries scaled by `e^{-max(k,0)}`, so both boundary circles see
    /// terms of comparable size.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, dim: usize) -> Self {
        let mut f = Self::zero(degree, dim);
        let m = degree as i64;
        for k in -m..=m {
            let scale = (-(k.max(0) as f64)).exp();
            for c in f.coefficient_mut(k) {
                *c = complex_normal(rng) * scale;
            }
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c_k` (zero for `|k| > M`).
    pub fn coefficient(&self, k: i64) -> &[C64] {
        static EMPTY: [C64; 0] = [];
        if k.unsigned_abs() as usize > self.degree {
            return &EMPTY;
        }
        &self.coeffs[(k + self.degree as i64) as usize]
    }

    pub fn coefficient_mut(&mut self, k: i64) -> &mut [C64] {
        assert!(k.unsigned_abs() as usize <= self.degree, "index {k} beyond degree {}", self.degree);
        &mut self.coeffs[(k + self.degree as i64) as usize]
    }

    /// Nonzero-or-not iterator over `(k, c_k)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &[C64])> {
        let m = self.degree as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - m, c.as_slice()))
    }

    /// The same family viewed at a larger degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        assert!(degree >= self.degree);
        let mut f = Self::zero(degree, self.dim);
        for (k, c) in self.terms() {
            f.coefficient_mut(k).copy_from_slice(c);
        }
        f
    }

    /// `φ(z)` for `1 ≤ |z| ≤ e`.
    pub fn eval(&self, z: C64) -> Result<Vec<C64>> {
        let r = z.norm();
        let slack = 1e-12;
        if !(r >= 1.0 - slack && r <= std::f64::consts::E * (1.0 + slack)) {
            return Err(Error::OutsideAnnulus { re: z.re, im: z.im });
        }
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: C64) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (k, c) in self.terms() {
            let zk = z.powi(k as i32);
            for (o, ci) in out.iter_mut().zip(c) {
                *o += ci * zk;
            }
        }
        out
    }

    /// `φ(e^θ)`.
    pub fn eval_real(&self, theta: f64) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (k, c) in self.terms() {
            let w = (theta * k as f64).exp();
            for (o, ci) in out.iter_mut().zip(c) {
                *o += ci * w;
            }
        }
        out
    }

    /// Values at `e^{ρ + i t_j}` for the grid nodes, `ρ ∈ [0, 1]`;
    /// `out[j]` is the vector at node `j`.
    pub fn boundary_values(&self, grid: &BoundaryGrid, log_radius: f64) -> Result<Vec<Vec<C64>>> {
        grid.check(self.degree)?;
        Ok(boundary_values_with(&Dft::new(grid.samples), self, log_radius))
    }
}

fn boundary_values_with(dft: &Dft, f: &LaurentFamily, log_radius: f64) -> Vec<Vec<C64>> {
    let n = dft.len();
    let mut out = vec![vec![ZERO; f.dim]; n];
    let mut buf = vec![ZERO; n];
    for i in 0..f.dim {
        buf.iter_mut().for_each(|b| *b = ZERO);
        for (k, c) in f.terms() {
            buf[bin(k, n)] += c[i] * (log_radius * k as f64).exp();
        }
        dft.inverse(&mut buf);
        for (o, b) in out.iter_mut().zip(&buf) {
            o[i] = *b;
        }
    }
    out
}

/// Equispaced nodes `t_j = 2πj/N` on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    pub samples: usize,
}

impl BoundaryGrid {
    pub fn new(samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter { name: "samples", reason: "need at least one node".into() });
        }
        Ok(BoundaryGrid { samples })
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.samples).map(|j| std::f64::consts::TAU * j as f64 / self.samples as f64).collect()
    }

    /// Enforces `N ≥ 2M + 1`.
    pub fn check(&self, degree: usize) -> Result<()> {
        let needed = 2 * degree + 1;
        if self.samples < needed {
            return Err(Error::Aliasing { samples: self.samples, degree, needed });
        }
        Ok(())
    }

    pub fn refined(&self, factor: usize) -> Self {
        BoundaryGrid { samples: self.samples * factor }
    }
}

/// `max_j max(‖φ(e^{it_j})‖_0, ‖φ(e^{1+it_j})‖_1)` over the grid nodes.
pub fn family_norm(phi: &LaurentFamily, couple: &Couple, grid: &BoundaryGrid) -> Result<f64> {
    check_dim(couple.dim(), phi.dim())?;
    grid.check(phi.degree())?;
    Ok(grid_norm(&Dft::new(grid.samples), phi, couple))
}

fn grid_norm(dft: &Dft, phi: &LaurentFamily, couple: &Couple) -> f64 {
    let mut best = 0.0f64;
    for j in 0..2 {
        for v in boundary_values_with(dft, phi, j as f64) {
            best = best.max(couple.space(j).norm_unchecked(&v));
        }
    }
    best
}

/// A grid value of the family norm together with its value on a grid
/// refined by `factor`; the difference measures quadrature slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridNorm {
    pub value: f64,
    pub refined: f64,
    pub gap: f64,
}

pub fn family_norm_refined(
    phi: &LaurentFamily,
    couple: &Couple,
    grid: &BoundaryGrid,
    factor: usize,
) -> Result<GridNorm> {
    let value = family_norm(phi, couple, grid)?;
    let refined = family_norm(phi, couple, &grid.refined(factor.max(1)))?;
    Ok(GridNorm { value, refined, gap: (refined - value).abs() })
}

/// Result of [`minimize_family`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFit {
    pub family: LaurentFamily,
    /// `max(grid value, 4×-refined grid value)` of the returned family: an
    /// upper bound on the complex-method norm of `x` up to quadrature slack.
    pub value: f64,
    pub grid_value: f64,
    pub refined_value: f64,
    /// Whether the last stage met the movement tolerance.
    pub converged: bool,
    pub iterations: usize,
    /// Degrees visited by the continuation.
    pub stages: Vec<usize>,
}

/// Refinement factor used for the reported value.
pub const REFINE: usize = 4;
/// Temperature levels of the smoothed max, relative to the starting value.
const TEMPERATURES: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
/// Relative change in the best value over the last level that counts as
/// converged.
const MOVEMENT_TOL: f64 = 1e-4;

/// Searches degree-`M` families with `φ(e^θ) = x` for the smallest family
/// norm. The constraint is kept exactly by eliminating
/// `c_0 = x - Σ_{k≠0} c_k e^{θk}`.
///
/// The degree is raised by doubling (`1, 2, 4, …, M`), each stage warm
/// started from the previous one and given `budget` iterations, so the
/// returned value never increases with `M` on a fixed grid.
pub fn minimize_family(
    couple: &Couple,
    theta: f64,
    x: &[C64],
    degree: usize,
    grid: &BoundaryGrid,
    budget: usize,
) -> Result<FamilyFit> {
    check_dim(couple.dim(), x.len())?;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter { name: "theta", reason: format!("must lie in (0, 1), got {theta}") });
    }
    grid.check(degree)?;
    let dft = Dft::new(grid.samples);
    let fine = Dft::new(grid.samples * REFINE);
    let report = |f: &LaurentFamily| {
        let g = grid_norm(&dft, f, couple);
        let r = grid_norm(&fine, f, couple);
        (g.max(r), g, r)
    };

    let mut family = LaurentFamily::constant(x);
    let (mut value, mut grid_value, mut refined_value) = report(&family);
    let mut stages = Vec::new();
    let mut iterations = 0;
    let mut converged = true;
    if x.iter().all(|z| *z == ZERO) || degree == 0 {
        return Ok(FamilyFit {
            family: family.with_degree(degree),
            value,
            grid_value,
            refined_value,
            converged,
            iterations,
            stages,
        });
    }

    let warm = warm_start(couple, theta, x);
    let mut warm_used = false;
    let mut m = 1;
    loop {
        let m_stage = m.min(degree);
        stages.push(m_stage);
        if !warm_used && warm.degree() <= m_stage {
            warm_used = true;
            let w = warm.with_degree(m_stage);
            let (v, g, r) = report(&w);
            if v < value {
                (family, value, grid_value, refined_value) = (w, v, g, r);
            }
        }
        let problem = FamilyProblem::new(couple, theta, x, m_stage, &dft);
        let start = problem.variables_of(&family.with_degree(m_stage));
        let outcome = problem.descend(start, budget);
        iterations += outcome.iterations;
        let candidate = problem.family(&outcome.best);
        let (v, g, r) = report(&candidate);
        if v < value {
            family = candidate;
            value = v;
            grid_value = g;
            refined_value = r;
        } else {
            family = family.with_degree(m_stage);
        }
        converged = outcome.converged;
        if m_stage == degree {
            break;
        }
        m *= 2;
    }
    Ok(FamilyFit { family, value, grid_value, refined_value, converged, iterations, stages })
}

/// Integer-power rounding of the extremal family of the strip model: each
/// coordinate gets `x_i (z e^{-θ})^{β_i}` with the non-integer `β_i` split
/// linearly between `⌊β_i⌋` and `⌈β_i⌉`.
fn warm_start(couple: &Couple, theta: f64, x: &[C64]) -> LaurentFamily {
    let (x0, x1) = (couple.space0(), couple.space1());
    let p = crate::interpolation::calderon_exponent(theta, x0.exponent(), x1.exponent());
    let power = match p {
        Exponent::Infinity => 0.0,
        Exponent::Finite(p) => p * (x1.exponent().reciprocal() - x0.exponent().reciprocal()),
    };
    let (s0, s1) = (x0.scales(), x1.scales());
    let mut beta: Vec<f64> = (0..x.len())
        .map(|i| {
            let sigma = s0[i].powf(1.0 - theta) * s1[i].powf(theta);
            let a = x[i].norm();
            if a > 0.0 {
                (s0[i] / s1[i]).ln() + power * (sigma * a).ln()
            } else {
                0.0
            }
        })
        .collect();
    let side = |beta: &[f64], j: usize| {
        let moduli: Vec<f64> = (0..x.len()).map(|i| x[i].norm() * ((j as f64 - theta) * beta[i]).exp()).collect();
        couple.space(j).norm_of_moduli(&moduli).unwrap_or(f64::NAN)
    };
    let shift = (side(&beta, 0) / side(&beta, 1)).ln();
    if shift.is_finite() {
        beta.iter_mut().for_each(|b| *b += shift);
    }
    let bound = 64.0;
    let degree = beta.iter().map(|b| b.abs().min(bound).ceil() as usize).max().unwrap_or(0);
    let mut f = LaurentFamily::zero(degree, x.len());
    for (i, b) in beta.iter().enumerate() {
        let b = b.clamp(-bound, bound);
        let lo = b.floor();
        let frac = b - lo;
        for (k, weight) in [(lo as i64, 1.0 - frac), (lo as i64 + 1, frac)] {
            if weight > 0.0 {
                f.coefficient_mut(k)[i] += x[i] * (weight * (-theta * k as f64).exp());
            }
        }
    }
    f
}

struct FamilyProblem<'a> {
    couple: &'a Couple,
    x: &'a [C64],
    degree: usize,
    dft: &'a Dft,
    /// `e^{θk}` for the eliminated constraint.
    anchor: Vec<f64>,
    /// Variable scaling `c_k = σ_k d_k`.
    sigma: Vec<f64>,
    ks: Vec<i64>,
}

struct Descent {
    best: Vec<C64>,
    iterations: usize,
    converged: bool,
}

impl<'a> FamilyProblem<'a> {
    fn new(couple: &'a Couple, theta: f64, x: &'a [C64], degree: usize, dft: &'a Dft) -> Self {
        let m = degree as i64;
        let ks: Vec<i64> = (-m..=m).filter(|k| *k != 0).collect();
        let anchor = ks.iter().map(|&k| (theta * k as f64).exp()).collect();
        let sigma = ks.iter().map(|&k| if k > 0 { (-(k as f64)).exp() } else { 1.0 }).collect();
        FamilyProblem { couple, x, degree, dft, anchor, sigma, ks }
    }

    fn n(&self) -> usize {
        self.x.len()
    }

    fn variables_of(&self, f: &LaurentFamily) -> Vec<C64> {
        let n = self.n();
        let mut d = vec![ZERO; self.ks.len() * n];
        for (idx, &k) in self.ks.iter().enumerate() {
            for i in 0..n {
                d[idx * n + i] = f.coefficient(k)[i] / self.sigma[idx];
            }
        }
        d
    }

    fn family(&self, d: &[C64]) -> LaurentFamily {
        let n = self.n();
        let mut f = LaurentFamily::zero(self.degree, n);
        let mut c0 = self.x.to_vec();
        for (idx, &k) in self.ks.iter().enumerate() {
            let c = f.coefficient_mut(k);
            for i in 0..n {
                c[i] = d[idx * n + i] * self.sigma[idx];
                c0[i] -= c[i] * self.anchor[idx];
            }
        }
        f.coefficient_mut(0).copy_from_slice(&c0);
        f
    }

    /// Smoothed objective (log-sum-exp over the `2N` node norms, each node
    /// norm smoothed at temperature `mu`), the exact grid max, and optionally
    /// the gradient in `d`.
    fn evaluate(&self, d: &[C64], mu: f64, grad: Option<&mut [C64]>) -> (f64, f64) {
        let n = self.n();
        let nn = self.dft.len();
        let f = self.family(d);
        let mut smooth = Vec::with_capacity(2 * nn);
        let mut exact = 0.0f64;
        let mut node_grads: Vec<Vec<C64>> = Vec::with_capacity(2 * nn);
        let values = [boundary_values_with(self.dft, &f, 0.0), boundary_values_with(self.dft, &f, 1.0)];
        for (j, vals) in values.iter().enumerate() {
            let space = self.couple.space(j);
            for v in vals {
                exact = exact.max(space.norm_unchecked(v));
                let mut g = vec![ZERO; n];
                smooth.push(smooth_norm(space, v, mu, &mut g));
                node_grads.push(g);
            }
        }
        let top = smooth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let weights: Vec<f64> = smooth
            .iter()
            .map(|s| {
                let w = ((s - top) / mu).exp();
                z += w;
                w
            })
            .collect();
        let value = top + mu * z.ln();
        if let Some(grad) = grad {
            grad.iter_mut().for_each(|g| *g = ZERO);
            let mut buf = vec![ZERO; nn];
            for i in 0..n {
                let mut total = ZERO;
                for circle in 0..2 {
                    for (j, b) in buf.iter_mut().enumerate() {
                        let node = circle * nn + j;
                        *b = node_grads[node][i] * (weights[node] / z);
                    }
                    total += buf.iter().sum::<C64>();
                    self.dft.forward(&mut buf);
                    for (idx, &k) in self.ks.iter().enumerate() {
                        let rho_k = (circle as f64 * k as f64).exp();
                        grad[idx * n + i] += buf[bin(k, nn)] * rho_k;
                    }
                }
                for idx in 0..self.ks.len() {
                    grad[idx * n + i] = (grad[idx * n + i] - total * self.anchor[idx]) * self.sigma[idx];
                }
            }
        }
        (value, exact)
    }

    /// Accelerated gradient with Armijo backtracking over a decreasing
    /// temperature schedule; keeps the iterate with the best exact grid max.
    fn descend(&self, start: Vec<C64>, budget: usize) -> Descent {
        let len = start.len();
        let (_, f0) = self.evaluate(&start, 1.0, None);
        let mut best = (f0, start.clone());
        let mut iterations = 0;
        let per_level = (budget / TEMPERATURES.len()).max(1);
        let mut converged = false;
        let mut grad = vec![ZERO; len];
        let mut trial = vec![ZERO; len];
        let mut step = 1.0 / f0.max(1e-300);
        for (level, rel) in TEMPERATURES.iter().enumerate() {
            let mu = rel * f0;
            let mut cur = best.1.clone();
            let mut prev = cur.clone();
            let mut y = cur.clone();
            let mut tk = 1.0f64;
            let (mut f_cur, _) = self.evaluate(&cur, mu, None);
            let best_at_level_start = best.0;
            let mut best_at_half = best.0;
            for it in 0..per_level {
                iterations += 1;
                if it == per_level / 2 {
                    best_at_half = best.0;
                }
                let (fy, ey) = self.evaluate(&y, mu, Some(&mut grad));
                if ey < best.0 {
                    best = (ey, y.clone());
                }
                let gnorm2: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
                if gnorm2 == 0.0 {
                    break;
                }
                let mut accepted = None;
                for _ in 0..60 {
                    for ((t, yy), g) in trial.iter_mut().zip(&y).zip(&grad) {
                        *t = yy - g * step;
                    }
                    let (ft, et) = self.evaluate(&trial, mu, None);
                    if et < best.0 {
                        best = (et, trial.clone());
                    }
                    if ft <= fy - 0.5 * step * gnorm2 {
                        accepted = Some(ft);
                        break;
                    }
                    step *= 0.5;
                }
                let Some(ft) = accepted else { break };
                if ft > f_cur {
                    // restart the momentum
                    tk = 1.0;
                    y.clone_from(&cur);
                    continue;
                }
                let tk1 = 0.5 * (1.0 + (1.0 + 4.0 * tk * tk).sqrt());
                let beta = (tk - 1.0) / tk1;
                prev.clone_from(&cur);
                cur.clone_from(&trial);
                f_cur = ft;
                for ((yy, c), p) in y.iter_mut().zip(&cur).zip(&prev) {
                    *yy = c + (c - p) * beta;
                }
                tk = tk1;
                step *= 1.5;
            }
            if level + 1 == TEMPERATURES.len() {
                let drift = (best_at_half - best.0) / best.0.max(1e-300);
                converged = drift <= MOVEMENT_TOL || best_at_level_start - best.0 <= MOVEMENT_TOL * best.0;
            }
        }
        Descent { best: best.1, iterations, converged }
    }
}

/// Smoothed norm of a complex vector: moduli are replaced by
/// `sqrt(|v_i|^2 + η^2)` and `max` by a log-sum-exp at temperature `μ`.
/// `grad` receives the (complex) gradient `∂/∂Re + i ∂/∂Im`.
fn smooth_norm(space: &WeightedSpace, v: &[C64], mu: f64, grad: &mut [C64]) -> f64 {
    let eta = 1e-3 * mu;
    let s = space.scales();
    let m: Vec<f64> = v.iter().map(|z| (z.norm_sqr() + eta * eta).sqrt()).collect();
    match space.exponent() {
        Exponent::Finite(p) => {
            let top = m.iter().zip(s).map(|(a, b)| a * b).fold(0.0, f64::max);
            let val = top * m.iter().zip(s).map(|(a, b)| (a * b / top).powf(p)).sum::<f64>().powf(1.0 / p);
            for i in 0..v.len() {
                let dm = s[i] * (s[i] * m[i] / val).powf(p - 1.0);
                grad[i] = v[i] * (dm / m[i]);
            }
            val
        }
        Exponent::Infinity => {
            let top = m.iter().zip(s).map(|(a, b)| a * b).fold(0.0, f64::max);
            let mut z = 0.0;
            let w: Vec<f64> = m
                .iter()
                .zip(s)
                .map(|(a, b)| {
                    let e = ((a * b - top) / mu).exp();
                    z += e;
                    e
                })
                .collect();
            for i in 0..v.len() {
                grad[i] = v[i] * (w[i] / z * s[i] / m[i]);
            }
            top + mu * z.ln()
        }
    }
}

/// Both sides of the three-circles inequality for a family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeLines {
    /// `‖φ(e^θ)‖_θ`.
    pub left: f64,
    /// `[mean_j ‖φ(e^{it_j})‖_0]^{1-θ} [mean_j ‖φ(e^{1+it_j})‖_1]^θ`.
    pub right: f64,
    /// `left / right` (zero when both vanish).
    pub implied_c: f64,
    /// Nonzero left side with a vanishing right side.
    pub anomaly: bool,
}

/// Compares `‖φ(e^θ)‖_θ` (closed form) with the geometric mean of the
/// boundary averages (trapezoid rule on the grid).
pub fn three_lines_check(phi: &LaurentFamily, couple: &Couple, theta: f64, grid: &BoundaryGrid) -> Result<ThreeLines> {
    check_dim(couple.dim(), phi.dim())?;
    grid.check(phi.degree())?;
    let request = InterpolationRequest::new(couple.clone(), theta)?;
    let left = closed_form_norm(&request, &phi.eval_real(theta))?;
    let dft = Dft::new(grid.samples);
    let mean = |j: usize| {
        let vals = boundary_values_with(&dft, phi, j as f64);
        vals.iter().map(|v| couple.space(j).norm_unchecked(v)).sum::<f64>() / vals.len() as f64
    };
    let right = mean(0).powf(1.0 - theta) * mean(1).powf(theta);
    let (implied_c, anomaly) = if right > 0.0 { (left / right, false) } else { (0.0, left > 0.0) };
    Ok(ThreeLines { left, right, implied_c, anomaly })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    Nonmember,
    Undecided,
}

/// Bracket on `sup_{|λ_k| ≤ 1} max_j ‖Σ_k λ_k e^{jk} c_k‖_{X_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub lower: f64,
    pub upper: f64,
    pub verdict: Verdict,
}

/// Brackets the unconditional sums `Σ_k λ_k e^{jk} c_k`, `|λ_k| ≤ 1`.
///
/// The upper bound replaces every coefficient by its entrywise modulus (valid
/// for lattice norms). The lower bound is the best of `λ ≡ 1`, one
/// coordinate-aligned choice per coordinate, and `phase_samples` draws
/// alternating between `{±1, ±i}` and uniform phases.
pub fn mho_membership(phi: &LaurentFamily, couple: &Couple, phase_samples: usize, seed: u64) -> Result<Membership> {
    check_dim(couple.dim(), phi.dim())?;
    let terms: Vec<(i64, &[C64])> = phi.terms().collect();
    let (lower, upper) = unconditional_bracket(couple, &terms, |j, k| (j as f64 * k as f64).exp(), phase_samples, seed);
    let verdict = if upper < 1.0 {
        Verdict::Member
    } else if lower >= 1.0 {
        Verdict::Nonmember
    } else {
        Verdict::Undecided
    };
    Ok(Membership { lower, upper, verdict })
}

/// `(lower, upper)` for `sup_{|λ_k| ≤ 1} max_j ‖Σ_k λ_k a(j, k) x_k‖_{X_j}`.
pub(crate) fn unconditional_bracket(
    couple: &Couple,
    terms: &[(i64, &[C64])],
    factor: impl Fn(usize, i64) -> f64,
    phase_samples: usize,
    seed: u64,
) -> (f64, f64) {
    let n = couple.dim();
    let mut upper = 0.0f64;
    for j in 0..2 {
        let mut acc = vec![0.0; n];
        for (k, c) in terms {
            let a = factor(j, *k);
            for (s, ci) in acc.iter_mut().zip(*c) {
                *s += ci.norm() * a;
            }
        }
        upper = upper.max(couple.space(j).norm_of_moduli(&acc).unwrap_or(f64::INFINITY));
    }

    let value = |lambda: &[C64]| {
        let mut best = 0.0f64;
        for j in 0..2 {
            let mut acc = vec![ZERO; n];
            for ((k, c), l) in terms.iter().zip(lambda) {
                let a = l * factor(j, *k);
                for (s, ci) in acc.iter_mut().zip(*c) {
                    *s += ci * a;
                }
            }
            best = best.max(couple.space(j).norm_unchecked(&acc));
        }
        best
    };
    let one = C64::new(1.0, 0.0);
    let mut lower = value(&vec![one; terms.len()]);
    for i in 0..n {
        let aligned: Vec<C64> =
            terms.iter().map(|(_, c)| if c[i].norm() > 0.0 { c[i].conj() / c[i].norm() } else { one }).collect();
        lower = lower.max(value(&aligned));
    }
    let mut rng = instance_rng(seed, 0);
    let quarter = [one, -one, C64::new(0.0, 1.0), C64::new(0.0, -1.0)];
    let mut lambda = vec![one; terms.len()];
    for s in 0..phase_samples {
        for l in lambda.iter_mut() {
            *l = if s % 2 == 0 { quarter[rng.random_range(0..4)] } else { random_phase(&mut rng) };
        }
        lower = lower.max(value(&lambda));
    }
    // lower ≤ upper holds mathematically; clamp away rounding
    (lower.min(upper), upper)
}
