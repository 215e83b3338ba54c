//! Vector-valued Fourier analysis on the circle.
//!
//! Coefficients use the `1/(2π)` normalization,
//! `f̂(k) = (1/2π) ∫ e^{-ikt} f(e^{it}) dt`, realized by the trapezoid rule
//! (a DFT scaled by `1/N`). Tables hold the bins `k ∈ [-N/2, N/2)`.

use std::io::{Read, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{family_norm, BoundaryGrid, LaurentFamily};
use crate::dft::{bin, Dft};
use crate::error::{check_dim, Error, Result};
use crate::interpolation::InterpolationRequest;
use crate::polynomials::{estimate_op_norm, AscentOptions, HomPolynomial};
use crate::rng::{complex_normal, instance_rng};
use crate::spaces::{Couple, WeightedSpace};
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Equispaced samples `f(e^{2πij/N})`, `N` a power of two `≥ 8`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleFunction {
    dim: usize,
    samples: Vec<Vec<C64>>,
}

impl CircleFunction {
    pub fn new(samples: Vec<Vec<C64>>) -> Result<Self> {
        let n = samples.len();
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("N must be a power of two ≥ 8, got {n}"),
            });
        }
        let dim = samples[0].len();
        for s in &samples {
            check_dim(dim, s.len())?;
            if s.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::InvalidParameter { name: "samples", reason: "values must be finite".into() });
            }
        }
        Ok(CircleFunction { dim, samples })
    }

    /// Samples of `t ↦ f(e^{it})`.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Vec<C64>) -> Result<Self> {
        Self::new((0..n).map(|j| f(std::f64::consts::TAU * j as f64 / n as f64)).collect())
    }

    /// Boundary trace of a family on `|z| = e^{ρ}`.
    pub fn from_family(phi: &LaurentFamily, n: usize, log_radius: f64) -> Result<Self> {
        Self::new(phi.boundary_values(&BoundaryGrid::new(n)?, log_radius)?)
    }

    /// Random trigonometric polynomial of degree `≤ bandwidth` with
    /// coefficients decaying like `decay^{|k|}`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, bandwidth: usize, decay: f64) -> Result<Self> {
        let mut table = CoefficientTable::zero(n, dim)?;
        let b = bandwidth.min(n / 2 - 1) as i64;
        for k in -b..=b {
            let s = decay.powi(k.unsigned_abs() as i32);
            for c in table.coefficient_mut(k)? {
                *c = complex_normal(rng) * s;
            }
        }
        Ok(table.synthesize())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Vec<C64>] {
        &self.samples
    }

    /// Pointwise image under `P`.
    pub fn map(&self, p: &HomPolynomial) -> Result<CircleFunction> {
        let samples = self.samples.iter().map(|v| p.evaluate(v)).collect::<Result<_>>()?;
        CircleFunction::new(samples)
    }

    /// Little-endian `u64 N`, `u64 dim`, then `N·dim` interleaved `f64`
    /// pairs `(re, im)`, sample-major.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        for s in &self.samples {
            for z in s {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut word = [0u8; 8];
        let mut next = |r: &mut dyn Read| -> Result<[u8; 8]> {
            r.read_exact(&mut word)?;
            Ok(word)
        };
        let n = u64::from_le_bytes(next(&mut r)?) as usize;
        let dim = u64::from_le_bytes(next(&mut r)?) as usize;
        if n > 1 << 26 || dim > 1 << 20 {
            return Err(Error::InvalidParameter {
                name: "header",
                reason: format!("implausible sizes N={n}, dim={dim}"),
            });
        }
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let mut s = Vec::with_capacity(dim);
            for _ in 0..dim {
                let re = f64::from_le_bytes(next(&mut r)?);
                let im = f64::from_le_bytes(next(&mut r)?);
                s.push(C64::new(re, im));
            }
            samples.push(s);
        }
        Self::new(samples)
    }
}

/// `f̂(k)` for `k ∈ [-N/2, N/2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    samples: usize,
    dim: usize,
    /// `coeffs[k + N/2]`.
    coeffs: Vec<Vec<C64>>,
}

impl CoefficientTable {
    pub fn zero(samples: usize, dim: usize) -> Result<Self> {
        if samples < 2 || !samples.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: format!("need an even N ≥ 2, got {samples}"),
            });
        }
        Ok(CoefficientTable { samples, dim, coeffs: vec![vec![ZERO; dim]; samples] })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest `K` with `[-K, K]` inside the table.
    pub fn bandwidth(&self) -> usize {
        self.samples / 2 - 1
    }

    pub fn range(&self) -> std::ops::Range<i64> {
        let h = (self.samples / 2) as i64;
        -h..h
    }

    /// `f̂(k)`; zero outside the table.
    pub fn coefficient(&self, k: i64) -> &[C64] {
        static EMPTY: [C64; 0] = [];
        if self.range().contains(&k) {
            &self.coeffs[(k + (self.samples / 2) as i64) as usize]
        } else {
            &EMPTY
        }
    }

    pub fn coefficient_mut(&mut self, k: i64) -> Result<&mut [C64]> {
        if !self.range().contains(&k) {
            return Err(Error::Bandwidth(format!("index {k} outside [-{0}, {0})", self.samples / 2)));
        }
        let h = (self.samples / 2) as i64;
        Ok(&mut self.coeffs[(k + h) as usize])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &[C64])> {
        let h = (self.samples / 2) as i64;
        self.coeffs.iter().enumerate().map(move |(i, c)| (i as i64 - h, c.as_slice()))
    }

    /// Inverse transform back to samples.
    pub fn synthesize(&self) -> CircleFunction {
        let n = self.samples;
        let dft = Dft::new(n);
        let mut out = vec![vec![ZERO; self.dim]; n];
        let mut buf = vec![ZERO; n];
        for i in 0..self.dim {
            for (k, c) in self.iter() {
                buf[bin(k, n)] = c[i];
            }
            dft.inverse(&mut buf);
            for (o, b) in out.iter_mut().zip(&buf) {
                o[i] = *b;
            }
        }
        CircleFunction { dim: self.dim, samples: out }
    }
}

/// Trapezoid-rule coefficients, one scaled DFT per coordinate.
pub fn coefficients(f: &CircleFunction) -> CoefficientTable {
    let n = f.len();
    let dft = Dft::new(n);
    let mut table = CoefficientTable::zero(n, f.dim).expect("N ≥ 8 and even");
    let mut buf = vec![ZERO; n];
    let scale = 1.0 / n as f64;
    let h = (n / 2) as i64;
    for i in 0..f.dim {
        for (b, s) in buf.iter_mut().zip(&f.samples) {
            *b = s[i];
        }
        dft.forward(&mut buf);
        for k in -h..h {
            table.coeffs[(k + h) as usize][i] = buf[bin(k, n)] * scale;
        }
    }
    table
}

/// `(1/2π) ∫ |y(f)|² dt` against `Σ_k |y(f̂(k))|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParsevalReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(lhs, rhs)`, zero when both vanish.
    pub rel_error: f64,
}

pub fn parseval_check(f: &CircleFunction, functional: &[C64]) -> Result<ParsevalReport> {
    check_dim(f.dim, functional.len())?;
    let pair = |v: &[C64]| -> C64 { v.iter().zip(functional).map(|(a, b)| a * b).sum() };
    let lhs = f.samples.iter().map(|s| pair(s).norm_sqr()).sum::<f64>() / f.len() as f64;
    let rhs = coefficients(f).iter().map(|(_, c)| pair(c).norm_sqr()).sum::<f64>();
    let scale = lhs.max(rhs);
    let rel_error = if scale > 0.0 { (lhs - rhs).abs() / scale } else { 0.0 };
    Ok(ParsevalReport { lhs, rhs, rel_error })
}

/// Trapezoidal window: 1 for `|k| ≤ N`, `2 − |k|/N` for `N < |k| ≤ 2N`,
/// 0 beyond.
pub fn vallee_poussin_weight(k: i64, n: usize) -> f64 {
    let a = k.unsigned_abs() as f64;
    let n = n as f64;
    if a <= n {
        1.0
    } else if a <= 2.0 * n {
        2.0 - a / n
    } else {
        0.0
    }
}

/// `S_N` on a coefficient table; requires `2N` below the table's bandwidth.
pub fn vallee_poussin(table: &CoefficientTable, n: usize) -> Result<CoefficientTable> {
    if n == 0 || 2 * n >= table.samples / 2 {
        return Err(Error::Bandwidth(format!("need 0 < 2N < {}, got N = {n}", table.samples / 2)));
    }
    let mut out = table.clone();
    let h = (table.samples / 2) as i64;
    for (idx, c) in out.coeffs.iter_mut().enumerate() {
        let w = vallee_poussin_weight(idx as i64 - h, n);
        c.iter_mut().for_each(|z| *z *= w);
    }
    Ok(out)
}

/// `S_N` applied to the Laurent coefficients of a family.
pub fn vallee_poussin_family(phi: &LaurentFamily, n: usize) -> LaurentFamily {
    let mut out = phi.clone();
    let m = phi.degree() as i64;
    for k in -m..=m {
        let w = vallee_poussin_weight(k, n);
        out.coefficient_mut(k).iter_mut().for_each(|z| *z *= w);
    }
    out
}

/// Empirical `sup ‖S_N φ‖_F / ‖φ‖_F`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnReport {
    /// `(N, sup over the population)`.
    pub per_n: Vec<(usize, f64)>,
    pub sup_ratio: f64,
    pub population: usize,
    /// Families with zero norm, left out of the ratio.
    pub excluded: usize,
}

pub fn sn_family_bound_report(
    families: &[LaurentFamily],
    couple: &Couple,
    n_range: &[usize],
    grid: &BoundaryGrid,
) -> Result<SnReport> {
    let norms: Vec<f64> = families.par_iter().map(|f| family_norm(f, couple, grid)).collect::<Result<_>>()?;
    let excluded = norms.iter().filter(|v| **v == 0.0).count();
    let mut per_n = Vec::with_capacity(n_range.len());
    for &n in n_range {
        let ratios: Vec<f64> = families
            .par_iter()
            .zip(&norms)
            .filter(|(_, nf)| **nf > 0.0)
            .map(|(f, nf)| family_norm(&vallee_poussin_family(f, n), couple, grid).map(|v| v / nf))
            .collect::<Result<_>>()?;
        per_n.push((n, ratios.into_iter().fold(0.0, f64::max)));
    }
    let sup_ratio = per_n.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(SnReport { per_n, sup_ratio, population: families.len(), excluded })
}

/// `(k, value)` rows.
pub type Series = Vec<(i64, f64)>;

/// Head and tail maxima of a coefficient series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecaySummary {
    /// `max_{|k| ≤ k_max/8}`.
    pub head: f64,
    /// `max_{k_max/2 ≤ |k| ≤ k_max}`.
    pub tail: f64,
    /// `tail / head` (0 when both vanish).
    pub ratio: f64,
}

fn decay_summary(series: &Series, k_max: usize) -> DecaySummary {
    let k_max = k_max as i64;
    let max_over =
        |lo: i64, hi: i64| series.iter().filter(|(k, _)| (lo..=hi).contains(&k.abs())).map(|p| p.1).fold(0.0, f64::max);
    let head = max_over(0, k_max / 8);
    let tail = max_over(k_max / 2, k_max);
    let ratio = if head > 0.0 {
        tail / head
    } else if tail > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    DecaySummary { head, tail, ratio }
}

/// `sup_f ‖(P f)^(k)‖_Y` over a population of circle functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannLebesgueReport {
    pub series: Series,
    pub decay: DecaySummary,
}

pub fn riemann_lebesgue_report(
    p: &HomPolynomial,
    y: &WeightedSpace,
    population: &[CircleFunction],
    k_max: usize,
) -> Result<RiemannLebesgueReport> {
    let mut sup = vec![0.0f64; 2 * k_max + 1];
    for f in population {
        if 2 * k_max >= f.len() {
            return Err(Error::Bandwidth(format!("k_max = {k_max} needs N > {}, got {}", 2 * k_max, f.len())));
        }
        let table = coefficients(&f.map(p)?);
        for (s, k) in sup.iter_mut().zip(-(k_max as i64)..=k_max as i64) {
            *s = s.max(y.norm(table.coefficient(k)).unwrap_or(0.0));
        }
    }
    let series: Series = (-(k_max as i64)..=k_max as i64).zip(sup).collect();
    let decay = decay_summary(&series, k_max);
    Ok(RiemannLebesgueReport { series, decay })
}

/// Coefficient diagnostics of `k ↦ (P∘φ)^(k)` over families in the unit ball
/// of `F{X0, X1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma3Report {
    /// `sup_φ ‖(Pφ)^(k)‖_{Y0}`.
    pub sup_series: Series,
    pub sup_decay: DecaySummary,
    /// `(δ, max_φ #{k : ‖(Pφ)^(k)‖_{Y0} ≥ δ}, budget)`.
    pub counts: Vec<(f64, usize, f64)>,
    pub counts_within_budget: bool,
    /// `sup_φ ‖(Pφ)^(k) e^{kθ}‖_{Yθ}`.
    pub theta_series: Series,
    pub theta_decay: DecaySummary,
    /// Certified `‖P‖_{X0→Y0}` used by the budget.
    pub poly_norm: f64,
    /// `a` with `Σ_k ‖c_k‖²_{Y0} ≤ a² sup_t ‖Pφ(e^{it})‖²_{Y0}`.
    pub parseval_constant: f64,
}

/// Norm-equivalence constants `‖v‖_Y ≤ up · ‖v‖_2` and `‖v‖_2 ≤ down · ‖v‖_Y`.
fn euclidean_constants(y: &WeightedSpace) -> (f64, f64) {
    let d = y.dim() as f64;
    let r = y.exponent().reciprocal();
    let smax = y.scales().iter().copied().fold(0.0, f64::max);
    let smin = y.scales().iter().copied().fold(f64::INFINITY, f64::min);
    let up = smax * d.powf((r - 0.5).max(0.0));
    let down = d.powf((0.5 - r).max(0.0)) / smin;
    (up, down)
}

/// Runs the diagnostics; families are rescaled to unit norm first (grid norm
/// on a 4× refined grid, so the population lies in the unit ball up to
/// quadrature slack). The counting budget is
/// `L(δ) = a² ‖P‖² / δ²`: vector Parseval bounds `Σ_k ‖c_k‖_2²` by
/// `sup_t ‖Pφ‖_2²`, and `‖Pφ(e^{it})‖_{Y0} ≤ ‖P‖` on the unit ball.
#[allow(clippy::too_many_arguments)]
pub fn lemma3_diagnostics(
    p: &HomPolynomial,
    population: &[LaurentFamily],
    couple: &Couple,
    couple_y: &Couple,
    theta: f64,
    deltas: &[f64],
    k_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Lemma3Report> {
    check_dim(couple.dim(), p.domain_dim())?;
    check_dim(couple_y.dim(), p.codomain_dim())?;
    let y0 = couple_y.space0();
    let y_theta = InterpolationRequest::new(couple_y.clone(), theta)?.closed_form_space();
    let grid = BoundaryGrid::new(samples)?;
    let fine = grid.refined(4);
    let m = p.degree();
    let poly = estimate_op_norm(p, couple.space0(), y0, &AscentOptions::default(), seed)?;
    let (up, down) = euclidean_constants(y0);
    let a = up * down;
    let budget = |delta: f64| a * a * poly.upper * poly.upper / (delta * delta);

    struct Row {
        coeffs: Vec<f64>,
        theta: Vec<f64>,
    }
    let rows: Vec<Row> = population
        .par_iter()
        .map(|phi| -> Result<Row> {
            let needed = 2 * m * phi.degree() + 1;
            if samples < needed.max(2 * k_max + 1) {
                return Err(Error::Aliasing { samples, degree: m * phi.degree(), needed: needed.max(2 * k_max + 1) });
            }
            let scale = family_norm(phi, couple, &grid)?.max(family_norm(phi, couple, &fine)?);
            let f = CircleFunction::from_family(phi, samples, 0.0)?;
            let table = coefficients(&f.map(p)?);
            let inv = if scale > 0.0 { 1.0 / scale.powi(m as i32) } else { 0.0 };
            let mut coeffs = Vec::with_capacity(2 * k_max + 1);
            let mut theta_row = Vec::with_capacity(2 * k_max + 1);
            for k in -(k_max as i64)..=k_max as i64 {
                let c = table.coefficient(k);
                coeffs.push(y0.norm_unchecked(c) * inv);
                theta_row.push(y_theta.norm_unchecked(c) * inv * (theta * k as f64).exp());
            }
            Ok(Row { coeffs, theta: theta_row })
        })
        .collect::<Result<_>>()?;

    let ks: Vec<i64> = (-(k_max as i64)..=k_max as i64).collect();
    let sup_of = |pick: &dyn Fn(&Row) -> &Vec<f64>| -> Series {
        ks.iter().enumerate().map(|(i, k)| (*k, rows.iter().map(|r| pick(r)[i]).fold(0.0, f64::max))).collect()
    };
    let sup_series = sup_of(&|r| &r.coeffs);
    let theta_series = sup_of(&|r| &r.theta);
    let counts: Vec<(f64, usize, f64)> = deltas
        .iter()
        .map(|&d| (d, rows.iter().map(|r| r.coeffs.iter().filter(|v| **v >= d).count()).max().unwrap_or(0), budget(d)))
        .collect();
    let counts_within_budget = counts.iter().all(|(_, c, b)| (*c as f64) <= *b);
    Ok(Lemma3Report {
        sup_decay: decay_summary(&sup_series, k_max),
        theta_decay: decay_summary(&theta_series, k_max),
        sup_series,
        counts,
        counts_within_budget,
        theta_series,
        poly_norm: poly.upper,
        parseval_constant: a,
    })
}

/// Family with `c_k ∼ ρ^{|k|}` (complex normal) and the outer circle damped
/// by `e^{-max(k,0)}`: a smooth population for decay diagnostics.
pub fn decaying_family<R: Rng + ?Sized>(rng: &mut R, degree: usize, dim: usize, rho: f64) -> LaurentFamily {
    let mut f = LaurentFamily::zero(degree, dim);
    let m = degree as i64;
    for k in -m..=m {
        let s = rho.powi(k.unsigned_abs() as i32) * (-(k.max(0) as f64)).exp();
        for c in f.coefficient_mut(k) {
            *c = complex_normal(rng) * s;
        }
    }
    f
}

/// Seeded population of random families.
pub fn family_population(seed: u64, size: usize, degree: usize, dim: usize, rho: Option<f64>) -> Vec<LaurentFamily> {
    (0..size)
        .map(|i| {
            let mut rng = instance_rng(seed, i as u64);
            match rho {
                Some(r) => decaying_family(&mut rng, degree, dim, r),
                None => LaurentFamily::random(&mut rng, degree, dim),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_harmonic() {
        let x = vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0)];
        let f = CircleFunction::from_fn(16, |t| x.iter().map(|v| v * C64::from_polar(1.0, 3.0 * t)).collect()).unwrap();
        let table = coefficients(&f);
        for (k, c) in table.iter() {
            for (a, b) in c.iter().zip(&x) {
                let expected = if k == 3 { *b } else { ZERO };
                assert!((a - expected).norm() < 1e-14);
            }
        }
        let r = parseval_check(&f, &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        let yx = (x[0] + C64::new(0.0, 1.0) * x[1]).norm_sqr();
        assert!((r.lhs - yx).abs() < 1e-12 && (r.rhs - yx).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(CircleFunction::new(vec![vec![ZERO]; 12]).is_err());
        assert!(CircleFunction::new(vec![vec![ZERO]; 4]).is_err());
    }

    #[test]
    fn window() {
        assert_eq!(vallee_poussin_weight(6, 4), 0.5);
        assert_eq!(vallee_poussin_weight(-8, 4), 0.0);
        assert_eq!(vallee_poussin_weight(4, 4), 1.0);
        let t = CoefficientTable::zero(16, 1).unwrap();
        assert!(vallee_poussin(&t, 4).is_err());
        assert!(vallee_poussin(&t, 3).is_ok());
    }

    #[test]
    fn binary_round_trip() {
        let mut rng = instance_rng(0, 0);
        let f = CircleFunction::random(&mut rng, 32, 3, 8, 0.8).unwrap();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 32 * 3 * 16);
        assert_eq!(CircleFunction::read_binary(buf.as_slice()).unwrap(), f);
    }
}
