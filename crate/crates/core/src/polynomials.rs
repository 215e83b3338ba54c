//! Symmetric multilinear maps and homogeneous polynomials between weighted
//! sequence spaces.
//!
//! A symmetric `m`-linear map `T: (C^n)^m → C^q` is stored by its values on
//! multisets of size `m` over `{0, …, n-1}` (ranked colexicographically), so
//! symmetry holds by construction:
//! `T(x_1, …, x_m) = Σ_{i_1..i_m} t_{{i_1..i_m}} x_1[i_1] ⋯ x_m[i_m]`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::interpolation::InterpolationRequest;
use crate::rng::{complex_normal, complex_normal_vec, instance_rng};
use crate::spaces::{Couple, Exponent, WeightedSpace};
use crate::tolerances::POLARIZATION_MAX_DEGREE;
use crate::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Multisets of size `m` over `n` symbols in colex order, with their
/// multinomial multiplicities `m! / Π counts!`.
#[derive(Debug, PartialEq)]
struct Layout {
    multisets: Vec<Vec<usize>>,
    multiplicity: Vec<f64>,
}

impl Layout {
    fn new(m: usize, n: usize) -> Self {
        let count = if n == 0 { 0 } else { binomial(n + m - 1, m).round() as usize };
        let mut multisets = vec![Vec::new(); count];
        let mut current = Vec::with_capacity(m);
        fn rec(m: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut [Vec<usize>]) {
            if cur.len() == m {
                out[rank(cur)] = cur.clone();
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(m, n, i, cur, out);
                cur.pop();
            }
        }
        if n > 0 {
            rec(m, n, 0, &mut current, &mut multisets);
        }
        let multiplicity = multisets
            .iter()
            .map(|ms| {
                let mut denom = 1.0;
                let mut run = 1;
                for w in ms.windows(2) {
                    if w[0] == w[1] {
                        run += 1;
                    } else {
                        denom *= factorial(run);
                        run = 1;
                    }
                }
                if !ms.is_empty() {
                    denom *= factorial(run);
                }
                factorial(m) / denom
            })
            .collect();
        Layout { multisets, multiplicity }
    }
}

/// Colex rank of a nondecreasing index sequence (via `b_j = a_j + j`).
fn rank(sorted: &[usize]) -> usize {
    sorted.iter().enumerate().map(|(j, a)| binomial(a + j, j + 1).round() as usize).sum()
}

fn sorted_rank(buf: &mut [usize]) -> usize {
    buf.sort_unstable();
    rank(buf)
}

/// Symmetric `m`-linear map `(C^n)^m → C^q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct SymMultilinearMap {
    degree: usize,
    domain_dim: usize,
    codomain_dim: usize,
    entries: Vec<Vec<C64>>,
    layout: Arc<Layout>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyRepr {
    m: usize,
    n: usize,
    q: usize,
    entries: Vec<(Vec<usize>, Vec<[f64; 2]>)>,
}

impl TryFrom<PolyRepr> for SymMultilinearMap {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        let mut t = SymMultilinearMap::zero(r.m, r.n, r.q)?;
        for (ms, v) in r.entries {
            let v: Vec<C64> = v.into_iter().map(|[re, im]| C64::new(re, im)).collect();
            check_dim(r.q, v.len())?;
            t.entry_mut(&ms)?.copy_from_slice(&v);
        }
        Ok(t)
    }
}

impl From<SymMultilinearMap> for PolyRepr {
    fn from(t: SymMultilinearMap) -> Self {
        PolyRepr {
            m: t.degree,
            n: t.domain_dim,
            q: t.codomain_dim,
            entries: t
                .layout
                .multisets
                .iter()
                .zip(&t.entries)
                .filter(|(_, v)| v.iter().any(|z| *z != ZERO))
                .map(|(ms, v)| (ms.clone(), v.iter().map(|z| [z.re, z.im]).collect()))
                .collect(),
        }
    }
}

impl SymMultilinearMap {
    pub fn zero(degree: usize, domain_dim: usize, codomain_dim: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidParameter { name: "m", reason: "degree must be at least 1".into() });
        }
        let layout = Arc::new(Layout::new(degree, domain_dim));
        let entries = vec![vec![ZERO; codomain_dim]; layout.multisets.len()];
        Ok(SymMultilinearMap { degree, domain_dim, codomain_dim, entries, layout })
    }

    /// Independent complex normal entries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, n: usize, q: usize) -> Result<Self> {
        let mut t = Self::zero(degree, n, q)?;
        for e in &mut t.entries {
            *e = complex_normal_vec(rng, q);
        }
        Ok(t)
    }

    /// The linear map `x ↦ A x` (`a[j][i]`, `q × n`).
    pub fn linear(a: &[Vec<C64>]) -> Result<Self> {
        let q = a.len();
        let n = a.first().map_or(0, Vec::len);
        let mut t = Self::zero(1, n, q)?;
        for (j, row) in a.iter().enumerate() {
            check_dim(n, row.len())?;
            for (i, v) in row.iter().enumerate() {
                t.entries[i][j] = *v;
            }
        }
        Ok(t)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    /// `(multiset, value)` pairs in colex order.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], &[C64])> {
        self.layout.multisets.iter().map(Vec::as_slice).zip(self.entries.iter().map(Vec::as_slice))
    }

    fn index_of(&self, multiset: &[usize]) -> Result<usize> {
        if multiset.len() != self.degree || multiset.iter().any(|&i| i >= self.domain_dim) {
            return Err(Error::InvalidParameter {
                name: "multiset",
                reason: format!("{multiset:?} is not a size-{} multiset over 0..{}", self.degree, self.domain_dim),
            });
        }
        let mut buf = multiset.to_vec();
        Ok(sorted_rank(&mut buf))
    }

    /// The value on a multiset (any order of the indices).
    pub fn entry(&self, multiset: &[usize]) -> Result<&[C64]> {
        let idx = self.index_of(multiset)?;
        Ok(&self.entries[idx])
    }

    pub fn entry_mut(&mut self, multiset: &[usize]) -> Result<&mut [C64]> {
        let idx = self.index_of(multiset)?;
        Ok(&mut self.entries[idx])
    }

    /// Output channels multiplied by `profile` (missing channels by 0).
    pub fn scale_outputs(&self, profile: &[f64]) -> Self {
        let mut t = self.clone();
        for e in &mut t.entries {
            for (j, v) in e.iter_mut().enumerate() {
                *v *= profile.get(j).copied().unwrap_or(0.0);
            }
        }
        t
    }

    /// `T(x_1, …, x_m)`.
    pub fn evaluate(&self, xs: &[&[C64]]) -> Result<Vec<C64>> {
        if xs.len() != self.degree {
            return Err(Error::DimensionMismatch { expected: self.degree, got: xs.len() });
        }
        for x in xs {
            check_dim(self.domain_dim, x.len())?;
        }
        let mut out = vec![ZERO; self.codomain_dim];
        let mut idx = vec![0usize; self.degree];
        let mut buf = vec![0usize; self.degree];
        self.walk(xs, 0, C64::new(1.0, 0.0), &mut idx, &mut buf, &mut |rank, w| {
            for (o, t) in out.iter_mut().zip(&self.entries[rank]) {
                *o += t * w;
            }
        });
        Ok(out)
    }

    /// Enumerates every index tuple with the running product of slot entries.
    fn walk(
        &self,
        xs: &[&[C64]],
        slot: usize,
        prod: C64,
        idx: &mut [usize],
        buf: &mut [usize],
        f: &mut impl FnMut(usize, C64),
    ) {
        if slot == xs.len() {
            buf.copy_from_slice(idx);
            f(sorted_rank(buf), prod);
            return;
        }
        for i in 0..self.domain_dim {
            let v = xs[slot][i];
            if v == ZERO {
                continue;
            }
            idx[slot] = i;
            self.walk(xs, slot + 1, prod * v, idx, buf, f);
        }
    }

    /// The linear map `h ↦ T(x_1, …, x_{m-1}, h)` as a `q × n` matrix.
    pub fn partial(&self, xs: &[&[C64]]) -> Result<Vec<Vec<C64>>> {
        if xs.len() + 1 != self.degree {
            return Err(Error::DimensionMismatch { expected: self.degree - 1, got: xs.len() });
        }
        for x in xs {
            check_dim(self.domain_dim, x.len())?;
        }
        let (n, q) = (self.domain_dim, self.codomain_dim);
        let mut mat = vec![vec![ZERO; n]; q];
        let mut idx = vec![0usize; self.degree];
        let mut buf = vec![0usize; self.degree];
        self.walk_partial(xs, 0, C64::new(1.0, 0.0), &mut idx, &mut buf, &mut mat);
        Ok(mat)
    }

    fn walk_partial(
        &self,
        xs: &[&[C64]],
        slot: usize,
        prod: C64,
        idx: &mut [usize],
        buf: &mut [usize],
        mat: &mut [Vec<C64>],
    ) {
        if slot == xs.len() {
            for i in 0..self.domain_dim {
                idx[slot] = i;
                buf.copy_from_slice(idx);
                let r = sorted_rank(buf);
                for (row, t) in mat.iter_mut().zip(&self.entries[r]) {
                    row[i] += t * prod;
                }
            }
            return;
        }
        for i in 0..self.domain_dim {
            let v = xs[slot][i];
            if v == ZERO {
                continue;
            }
            idx[slot] = i;
            self.walk_partial(xs, slot + 1, prod * v, idx, buf, mat);
        }
    }

    /// Rigorous bound `‖T(x_1..x_m)‖_Y ≤ B Π ‖x_k‖_{X_k}` from
    /// `|x_k[i]| ≤ ‖x_k‖_{X_k} / s_i` and the triangle inequality per entry.
    pub fn crude_bound(&self, xs: &[&WeightedSpace], y: &WeightedSpace) -> f64 {
        let mut acc = vec![0.0; self.codomain_dim];
        let mut idx = vec![0usize; self.degree];
        let mut buf = vec![0usize; self.degree];
        let inv: Vec<Vec<C64>> =
            xs.iter().map(|s| s.scales().iter().map(|v| C64::new(1.0 / v, 0.0)).collect()).collect();
        let inv_refs: Vec<&[C64]> = inv.iter().map(Vec::as_slice).collect();
        self.walk(&inv_refs, 0, C64::new(1.0, 0.0), &mut idx, &mut buf, &mut |rank, w| {
            for (a, t) in acc.iter_mut().zip(&self.entries[rank]) {
                *a += t.norm() * w.re;
            }
        });
        y.norm_of_moduli(&acc).unwrap_or(f64::INFINITY)
    }

    /// `Some(a)` when `T(x_1..x_m)_i = a_i Π_k x_k[i]` (requires `n = q`).
    pub fn diagonal_coefficients(&self) -> Option<Vec<C64>> {
        if self.domain_dim != self.codomain_dim {
            return None;
        }
        let mut a = vec![ZERO; self.domain_dim];
        for (ms, v) in self.entries() {
            let pure = ms.iter().all(|&i| i == ms[0]);
            for (j, z) in v.iter().enumerate() {
                if *z == ZERO {
                    continue;
                }
                if !pure || j != ms[0] {
                    return None;
                }
                a[j] = *z;
            }
        }
        Some(a)
    }
}

/// `P(x) = T(x, …, x)` for a symmetric `T`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomPolynomial {
    polar: SymMultilinearMap,
}

impl HomPolynomial {
    pub fn from_polar(polar: SymMultilinearMap) -> Self {
        HomPolynomial { polar }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, n: usize, q: usize) -> Result<Self> {
        SymMultilinearMap::random(rng, degree, n, q).map(Self::from_polar)
    }

    /// `P(x)_i = a_i x_i^m`.
    pub fn diagonal(degree: usize, a: &[C64]) -> Result<Self> {
        let n = a.len();
        let mut t = SymMultilinearMap::zero(degree, n, n)?;
        for (i, ai) in a.iter().enumerate() {
            t.entry_mut(&vec![i; degree])?[i] = *ai;
        }
        Ok(Self::from_polar(t))
    }

    pub fn polar(&self) -> &SymMultilinearMap {
        &self.polar
    }

    pub fn degree(&self) -> usize {
        self.polar.degree
    }

    pub fn domain_dim(&self) -> usize {
        self.polar.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.polar.codomain_dim
    }

    /// `Σ_α mult(α) t_α x^α` over multisets `α`.
    pub fn evaluate(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.domain_dim(), x.len())?;
        Ok(self.evaluate_unchecked(x))
    }

    fn evaluate_unchecked(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.codomain_dim()];
        let layout = &self.polar.layout;
        for ((ms, mult), t) in layout.multisets.iter().zip(&layout.multiplicity).zip(&self.polar.entries) {
            let mono = ms.iter().fold(C64::new(*mult, 0.0), |acc, &i| acc * x[i]);
            if mono == ZERO {
                continue;
            }
            for (o, ti) in out.iter_mut().zip(t) {
                *o += ti * mono;
            }
        }
        out
    }

    /// `h ↦ m T(x, …, x, h)`, the derivative of `P` at `x`.
    pub fn derivative(&self, x: &[C64]) -> Result<Vec<Vec<C64>>> {
        let xs = vec![x; self.degree() - 1];
        let mut d = self.polar.partial(&xs)?;
        let m = self.degree() as f64;
        d.iter_mut().flatten().for_each(|z| *z *= m);
        Ok(d)
    }
}

/// `T(x_1..x_m)` recovered from `P` alone:
/// `1/(2^m m!) Σ_{ε ∈ {±1}^m} ε_1⋯ε_m P(ε_1 x_1 + ⋯ + ε_m x_m)`.
pub fn polarize_via_formula(p: &HomPolynomial, xs: &[&[C64]]) -> Result<Vec<C64>> {
    let m = p.degree();
    if m > POLARIZATION_MAX_DEGREE {
        return Err(Error::DegreeGuard { degree: m, max: POLARIZATION_MAX_DEGREE });
    }
    if xs.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: xs.len() });
    }
    for x in xs {
        check_dim(p.domain_dim(), x.len())?;
    }
    let n = p.domain_dim();
    let mut out = vec![ZERO; p.codomain_dim()];
    let mut v = vec![ZERO; n];
    for signs in 0u32..(1 << m) {
        v.iter_mut().for_each(|z| *z = ZERO);
        let mut sign = 1.0;
        for (k, x) in xs.iter().enumerate() {
            let e = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
            sign *= e;
            v.iter_mut().zip(*x).for_each(|(a, b)| *a += b * e);
        }
        for (o, z) in out.iter_mut().zip(p.evaluate_unchecked(&v)) {
            *o += z * sign;
        }
    }
    let scale = 1.0 / (2f64.powi(m as i32) * factorial(m));
    out.iter_mut().for_each(|z| *z *= scale);
    Ok(out)
}

/// Discrepancy of
/// `T(s,…,s) = T(x0,…,x0) − Σ_{k=1}^m (−1)^k C(m,k) T(s,…,s, x1,…,x1)`
/// (`s = x0 + x1`, `k` trailing copies of `x1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub abs_error: f64,
    /// `abs_error` over the largest modulus among all evaluated terms.
    pub rel_error: f64,
}

pub fn lemma_expansion_check(t: &SymMultilinearMap, x0: &[C64], x1: &[C64]) -> Result<ExpansionReport> {
    check_dim(t.domain_dim, x0.len())?;
    check_dim(t.domain_dim, x1.len())?;
    let m = t.degree;
    let s: Vec<C64> = x0.iter().zip(x1).map(|(a, b)| a + b).collect();
    let sup = |v: &[C64]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lhs = t.evaluate(&vec![s.as_slice(); m])?;
    let mut rhs = t.evaluate(&vec![x0; m])?;
    let mut scale = sup(&lhs).max(sup(&rhs));
    for k in 1..=m {
        let mut slots = vec![s.as_slice(); m - k];
        slots.extend(std::iter::repeat_n(x1, k));
        let term = t.evaluate(&slots)?;
        let c = -(if k % 2 == 0 { 1.0 } else { -1.0 }) * binomial(m, k);
        scale = scale.max(c.abs() * sup(&term));
        rhs.iter_mut().zip(&term).for_each(|(r, v)| *r += v * c);
    }
    let abs_error = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let rel_error = if scale > 0.0 { abs_error / scale } else { 0.0 };
    Ok(ExpansionReport { abs_error, rel_error })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    /// `upper` is the exact norm.
    Exact,
    /// `upper` is a rigorous bound from branch and bound on the sphere.
    GridCertified,
    /// Only `lower` is meaningful; `upper` is the crude entrywise bound.
    Heuristic,
}

impl Certification {
    pub fn is_certified(self) -> bool {
        self != Certification::Heuristic
    }
}

/// `lower ≤ ‖P‖ ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpNormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub certification: Certification,
    /// Best point found by the ascent, normalized in the domain norm(s).
    pub argmax: Vec<Vec<C64>>,
    /// Every start stopped on stationarity rather than the iteration cap.
    pub converged: bool,
}

/// Multistart ascent settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AscentOptions {
    pub starts: usize,
    pub iterations: usize,
}

impl Default for AscentOptions {
    fn default() -> Self {
        AscentOptions { starts: 64, iterations: 200 }
    }
}

/// Relative gap at which the grid certificate stops refining.
const GRID_REL_GAP: f64 = 1e-4;
const GRID_MAX_CELLS: usize = 400_000;

/// Estimates `‖P‖ = sup{‖P(x)‖_Y : ‖x‖_X ≤ 1}`.
///
/// The lower bound is the best value of a multistart ascent. The upper bound
/// is exact for linear maps with `X = ℓ^1(w)`, `Y = ℓ^∞(w)` or
/// `X = Y`-exponent 2; scalar quadratic forms on `ℓ^2(w)` (Takagi values);
/// diagonal polynomials; and `n = 1`. For `n = 2` a branch and bound over
/// the unit sphere certifies it; otherwise it falls back to the crude
/// entrywise bound and the estimate is labeled heuristic.
pub fn estimate_op_norm(
    p: &HomPolynomial,
    x: &WeightedSpace,
    y: &WeightedSpace,
    opts: &AscentOptions,
    seed: u64,
) -> Result<OpNormEstimate> {
    check_dim(p.domain_dim(), x.dim())?;
    check_dim(p.codomain_dim(), y.dim())?;
    let (lower, point, converged) = polynomial_ascent(p, x, y, opts, seed);
    let (upper, certification) = polynomial_upper(p, x, y, lower);
    Ok(OpNormEstimate { lower: lower.min(upper), upper, certification, argmax: vec![point], converged })
}

fn polynomial_upper(p: &HomPolynomial, x: &WeightedSpace, y: &WeightedSpace, lower: f64) -> (f64, Certification) {
    let t = p.polar();
    let m = p.degree();
    if let Some(v) = exact_multilinear(t, &vec![x; m], y) {
        return (v, Certification::Exact);
    }
    if m == 2 && y.dim() == 1 && x.exponent() == Exponent::Finite(2.0) {
        let s = x.scales();
        let n = x.dim();
        let b = DMatrix::from_fn(n, n, |i, k| t.entry(&[i, k]).expect("in range")[0] / (s[i] * s[k]));
        let sigma = b.singular_values().max();
        return (sigma * y.scales()[0], Certification::Exact);
    }
    if p.domain_dim() == 2 {
        return (grid_certify(p, x, y, lower), Certification::GridCertified);
    }
    (t.crude_bound(&vec![x; m], y), Certification::Heuristic)
}

/// Exact multilinear norms: zero maps, `n = 1`, diagonal maps, and the
/// linear cases `ℓ^1 → Y`, `X → ℓ^∞`, `ℓ^2 → ℓ^2`.
fn exact_multilinear(t: &SymMultilinearMap, xs: &[&WeightedSpace], y: &WeightedSpace) -> Option<f64> {
    let m = t.degree();
    if t.entries.iter().flatten().all(|z| *z == ZERO) {
        return Some(0.0);
    }
    if t.domain_dim == 1 {
        let s: f64 = xs.iter().map(|x| x.scales()[0]).product();
        return Some(y.norm_unchecked(&t.entries[0]) / s);
    }
    if let Some(a) = t.diagonal_coefficients() {
        let c: Vec<f64> = (0..a.len())
            .map(|i| a[i].norm() * y.scales()[i] / xs.iter().map(|x| x.scales()[i]).product::<f64>())
            .collect();
        let r: f64 = xs.iter().map(|x| x.exponent().reciprocal()).sum();
        return Some(diagonal_norm(&c, r, y.exponent()));
    }
    if m != 1 {
        return None;
    }
    let x = xs[0];
    let (n, q) = (t.domain_dim, t.codomain_dim);
    // column i of the matrix is entries[i]
    let col = |i: usize| &t.entries[i];
    if x.exponent() == Exponent::Finite(1.0) {
        return Some((0..n).map(|i| y.norm_unchecked(col(i)) / x.scales()[i]).fold(0.0, f64::max));
    }
    if y.exponent() == Exponent::Infinity {
        return Some(
            (0..q)
                .map(|j| y.scales()[j] * x.dual_norm_of_moduli_unchecked((0..n).map(|i| col(i)[j].norm())))
                .fold(0.0, f64::max),
        );
    }
    if x.exponent() == Exponent::Finite(2.0) && y.exponent() == Exponent::Finite(2.0) {
        let a = DMatrix::from_fn(q, n, |j, i| col(i)[j] * (y.scales()[j] / x.scales()[i]));
        return Some(a.singular_values().max());
    }
    None
}

/// `sup ‖(c_i w_i)‖_q` over `w ≥ 0` in the unit ball of `ℓ^r`, given
/// `1/r = recip_r`; products of unit vectors of `ℓ^{p_k}` fill exactly this
/// ball when `Σ 1/p_k = 1/r`.
fn diagonal_norm(c: &[f64], recip_r: f64, q: Exponent) -> f64 {
    let recip_q = q.reciprocal();
    if recip_r >= recip_q {
        c.iter().copied().fold(0.0, f64::max)
    } else {
        let s = Exponent::from_reciprocal(recip_q - recip_r).expect("in (0, 1]");
        crate::spaces::lp_norm(s, c.iter().copied())
    }
}

fn normalized(x: &WeightedSpace, v: &[C64]) -> Option<Vec<C64>> {
    let nv = x.norm_unchecked(v);
    (nv > 0.0 && nv.is_finite()).then(|| v.iter().map(|z| z / nv).collect())
}

/// `G_i = Σ_j y_j A[j][i]`.
fn pull_back(a: &[Vec<C64>], y: &[C64]) -> Vec<C64> {
    let n = a.first().map_or(0, Vec::len);
    let mut g = vec![ZERO; n];
    for (row, yj) in a.iter().zip(y) {
        g.iter_mut().zip(row).for_each(|(gi, aji)| *gi += aji * yj);
    }
    g
}

/// Ascent on `‖P(x)‖_Y` over the unit sphere: linearize at `x`, move to the
/// point of the unit ball maximizing `Re ⟨y*, DP(x) h⟩` (with `y*` norming
/// `P(x)`), backtracking toward `x` when that does not improve.
fn polynomial_ascent(
    p: &HomPolynomial,
    x: &WeightedSpace,
    y: &WeightedSpace,
    opts: &AscentOptions,
    seed: u64,
) -> (f64, Vec<C64>, bool) {
    let n = p.domain_dim();
    let xd = x.dual();
    let value = |v: &[C64]| y.norm_unchecked(&p.evaluate_unchecked(v));
    let mut starts: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let mut e = vec![ZERO; n];
            e[i] = C64::new(1.0 / x.scales()[i], 0.0);
            e
        })
        .collect();
    starts.extend(normalized(x, &vec![C64::new(1.0, 0.0); n]));
    let results: Vec<(f64, Vec<C64>, bool)> = (0..opts.starts.max(1) + starts.len())
        .into_par_iter()
        .map(|s| {
            let mut cur = if s < starts.len() {
                starts[s].clone()
            } else {
                random_unit_vector(&mut instance_rng(seed, s as u64), x)
            };
            let mut f = value(&cur);
            let mut converged = false;
            for _ in 0..opts.iterations {
                let v = p.evaluate_unchecked(&cur);
                let ystar = y.norming_functional(&v).expect("dims match");
                let g = pull_back(&p.derivative(&cur).expect("dims match"), &ystar);
                let h = xd.norming_functional(&g).expect("dims match");
                let mut improved = false;
                let mut tau = 1.0;
                for _ in 0..8 {
                    let cand: Vec<C64> =
                        if tau == 1.0 { h.clone() } else { cur.iter().zip(&h).map(|(a, b)| a + b * tau).collect() };
                    if let Some(cand) = normalized(x, &cand) {
                        let fc = value(&cand);
                        if fc > f * (1.0 + 1e-15) {
                            cur = cand;
                            f = fc;
                            improved = true;
                            break;
                        }
                    }
                    tau *= 0.5;
                }
                if !improved {
                    converged = true;
                    break;
                }
            }
            (f, cur, converged)
        })
        .collect();
    let converged = results.iter().all(|r| r.2);
    let best = results.into_iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one start");
    (best.0, best.1, converged)
}

/// Alternating ascent for `sup ‖T(x_1..x_m)‖_Y` over products of unit balls;
/// each slot update maximizes the linearization exactly, so values never
/// decrease. `extra` seeds additional starts.
fn multilinear_ascent(
    t: &SymMultilinearMap,
    xs: &[&WeightedSpace],
    y: &WeightedSpace,
    opts: &AscentOptions,
    seed: u64,
    extra: &[Vec<Vec<C64>>],
) -> (f64, Vec<Vec<C64>>, bool) {
    let m = t.degree();
    let duals: Vec<WeightedSpace> = xs.iter().map(|x| x.dual()).collect();
    let value = |v: &[Vec<C64>]| {
        let refs: Vec<&[C64]> = v.iter().map(Vec::as_slice).collect();
        y.norm_unchecked(&t.evaluate(&refs).expect("dims match"))
    };
    let results: Vec<(f64, Vec<Vec<C64>>, bool)> = (0..opts.starts.max(1) + extra.len())
        .into_par_iter()
        .map(|s| {
            let mut cur: Vec<Vec<C64>> = if s < extra.len() {
                extra[s].clone()
            } else {
                let mut rng = instance_rng(seed, s as u64);
                xs.iter().map(|x| random_unit_vector(&mut rng, x)).collect()
            };
            let mut f = value(&cur);
            let mut converged = false;
            for _ in 0..opts.iterations {
                let before = f;
                for k in 0..m {
                    let others: Vec<&[C64]> =
                        cur.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.as_slice()).collect();
                    let a = t.partial(&others).expect("dims match");
                    let mut out = vec![ZERO; t.codomain_dim];
                    for (o, row) in out.iter_mut().zip(&a) {
                        *o = row.iter().zip(&cur[k]).map(|(r, v)| r * v).sum();
                    }
                    let ystar = y.norming_functional(&out).expect("dims match");
                    let g = pull_back(&a, &ystar);
                    let h = duals[k].norming_functional(&g).expect("dims match");
                    if h.iter().any(|z| *z != ZERO) {
                        let old = std::mem::replace(&mut cur[k], h);
                        let fc = value(&cur);
                        if fc >= f {
                            f = fc;
                        } else {
                            cur[k] = old;
                        }
                    }
                }
                if f <= before * (1.0 + 1e-15) {
                    converged = true;
                    break;
                }
            }
            (f, cur, converged)
        })
        .collect();
    let converged = results.iter().all(|r| r.2);
    let best = results.into_iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("at least one start");
    (best.0, best.1, converged)
}

/// Norm of `T: X_1 × ⋯ × X_m → Y`; same certification rules as
/// [`estimate_op_norm`] except that no grid certificate is attempted.
pub fn estimate_multilinear_norm(
    t: &SymMultilinearMap,
    xs: &[&WeightedSpace],
    y: &WeightedSpace,
    opts: &AscentOptions,
    seed: u64,
) -> Result<OpNormEstimate> {
    if xs.len() != t.degree() {
        return Err(Error::DimensionMismatch { expected: t.degree(), got: xs.len() });
    }
    for x in xs {
        check_dim(t.domain_dim(), x.dim())?;
    }
    check_dim(t.codomain_dim(), y.dim())?;
    let (lower, argmax, converged) = multilinear_ascent(t, xs, y, opts, seed, &[]);
    let (upper, certification) = match exact_multilinear(t, xs, y) {
        Some(v) => (v, Certification::Exact),
        None => (t.crude_bound(xs, y), Certification::Heuristic),
    };
    Ok(OpNormEstimate { lower: lower.min(upper), upper, certification, argmax, converged })
}

#[derive(Clone, Copy, Debug, PartialEq, Ord, PartialOrd, Eq)]
struct Cell {
    bound: OrdF64,
    u0: OrdF64,
    u1: OrdF64,
    psi0: OrdF64,
    psi1: OrdF64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Branch and bound for `sup ‖P(x)‖_Y` over the unit sphere of a
/// two-dimensional `X`. Up to a global phase the sphere is
/// `x(u, ψ) = (a(u) e^{iψ}, b(u))`, `(a, b) = (u, 1-u)/‖(u, 1-u)‖_X`, with
/// `a` increasing and `b` decreasing in `u`. On a cell with center `c` and
/// per-coordinate displacement bounds `δ`,
/// `‖P(x)‖ ≤ ‖P(c)‖ + ‖|DP(c)| δ‖_Y + Σ_{k≥2} C(m,k) B d^k`, `d = ‖δ‖_X`.
fn grid_certify(p: &HomPolynomial, x: &WeightedSpace, y: &WeightedSpace, lower: f64) -> f64 {
    let m = p.degree();
    let b_crude = p.polar().crude_bound(&vec![x; m], y);
    let ab = |u: f64| {
        let nrm = x.norm_of_moduli(&[u, 1.0 - u]).expect("dim 2");
        (u / nrm, (1.0 - u) / nrm)
    };
    let point = |u: f64, psi: f64| {
        let (a, b) = ab(u);
        [C64::from_polar(a, psi), C64::new(b, 0.0)]
    };
    let mut best = lower;
    let bound_cell = |u0: f64, u1: f64, psi0: f64, psi1: f64, best: &mut f64| {
        let (uc, pc) = (0.5 * (u0 + u1), 0.5 * (psi0 + psi1));
        let c = point(uc, pc);
        let v = y.norm_unchecked(&p.evaluate_unchecked(&c));
        *best = best.max(v);
        let (ac, bc) = ab(uc);
        let (a0, b0) = ab(u0);
        let (a1, b1) = ab(u1);
        let delta =
            [(a0 - ac).abs().max((a1 - ac).abs()) + ac * 0.5 * (psi1 - psi0), (b0 - bc).abs().max((b1 - bc).abs())];
        let d = x.norm_of_moduli(&delta).expect("dim 2");
        let dp = p.derivative(&c).expect("dims match");
        let first: Vec<f64> = dp.iter().map(|row| row.iter().zip(&delta).map(|(a, dl)| a.norm() * dl).sum()).collect();
        let mut rest = 0.0;
        for k in 2..=m {
            rest += binomial(m, k) * b_crude * d.powi(k as i32);
        }
        v + y.norm_of_moduli(&first).expect("dims match") + rest
    };
    let mut heap = BinaryHeap::new();
    let (nu, npsi) = (16, 64);
    for i in 0..nu {
        for j in 0..npsi {
            let (u0, u1) = (i as f64 / nu as f64, (i + 1) as f64 / nu as f64);
            let (psi0, psi1) =
                (std::f64::consts::TAU * j as f64 / npsi as f64, std::f64::consts::TAU * (j + 1) as f64 / npsi as f64);
            let bound = bound_cell(u0, u1, psi0, psi1, &mut best);
            heap.push(Cell {
                bound: OrdF64(bound),
                u0: OrdF64(u0),
                u1: OrdF64(u1),
                psi0: OrdF64(psi0),
                psi1: OrdF64(psi1),
            });
        }
    }
    let mut evaluated = nu * npsi;
    while let Some(cell) = heap.pop() {
        if cell.bound.0 <= best * (1.0 + GRID_REL_GAP) || evaluated >= GRID_MAX_CELLS {
            return cell.bound.0.max(best);
        }
        let (u0, u1, psi0, psi1) = (cell.u0.0, cell.u1.0, cell.psi0.0, cell.psi1.0);
        let (um, pm) = (0.5 * (u0 + u1), 0.5 * (psi0 + psi1));
        for (a, b) in [(u0, um), (um, u1)] {
            for (c, d) in [(psi0, pm), (pm, psi1)] {
                let bound = bound_cell(a, b, c, d, &mut best);
                heap.push(Cell {
                    bound: OrdF64(bound),
                    u0: OrdF64(a),
                    u1: OrdF64(b),
                    psi0: OrdF64(c),
                    psi1: OrdF64(d),
                });
                evaluated += 1;
            }
        }
    }
    best
}

/// `‖P̃‖ ≤ (m^m/m!) ‖P‖`, checked only against a certified `‖P‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MartinReport {
    pub checkable: bool,
    pub factor: f64,
    pub poly: OpNormEstimate,
    pub polar_lower: f64,
    /// Crude bound on `‖P̃‖`, used for the converse `‖P‖ ≤ ‖P̃‖`.
    pub polar_upper: f64,
    /// `factor · upper(‖P‖) − lower(‖P̃‖)`.
    pub margin: f64,
    pub holds: Option<bool>,
    pub converse_holds: Option<bool>,
}

pub fn martin_bound_check(
    p: &HomPolynomial,
    x: &WeightedSpace,
    y: &WeightedSpace,
    opts: &AscentOptions,
    seed: u64,
) -> Result<MartinReport> {
    let m = p.degree();
    let poly = estimate_op_norm(p, x, y, opts, seed)?;
    let spaces = vec![x; m];
    let diagonal_start = vec![poly.argmax[0].clone(); m];
    let (polar_lower, _, _) = multilinear_ascent(p.polar(), &spaces, y, opts, seed ^ 0x5eed, &[diagonal_start]);
    let polar_upper = match exact_multilinear(p.polar(), &spaces, y) {
        Some(v) => v,
        None => p.polar().crude_bound(&spaces, y),
    };
    let factor = (m as f64).powi(m as i32) / factorial(m);
    let checkable = poly.certification.is_certified();
    let margin = factor * poly.upper - polar_lower;
    Ok(MartinReport {
        checkable,
        factor,
        polar_lower,
        polar_upper,
        margin,
        holds: checkable.then_some(polar_lower <= factor * poly.upper + 1e-9),
        converse_holds: checkable.then_some(poly.lower <= polar_upper * (1.0 + 1e-12) + 1e-12),
        poly,
    })
}

/// `‖T‖_{X_θ → Y_θ} ≤ M_0^{1-θ} M_1^θ` with closed-form interpolated spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultilinearReport {
    pub m0: OpNormEstimate,
    pub m1: OpNormEstimate,
    pub theta_lower: f64,
    pub bound: f64,
    pub holds: bool,
    /// An endpoint norm was not certified; the comparison proves nothing.
    pub heuristic: bool,
}

pub fn multilinear_interpolation_check(
    t: &SymMultilinearMap,
    couples_x: &[Couple],
    couple_y: &Couple,
    theta: f64,
    opts: &AscentOptions,
    seed: u64,
) -> Result<MultilinearReport> {
    let endpoint = |j: usize, s: u64| {
        let xs: Vec<&WeightedSpace> = couples_x.iter().map(|c| c.space(j)).collect();
        estimate_multilinear_norm(t, &xs, couple_y.space(j), opts, s)
    };
    let m0 = endpoint(0, seed)?;
    let m1 = endpoint(1, seed.wrapping_add(1))?;
    let mid: Vec<WeightedSpace> = couples_x
        .iter()
        .map(|c| InterpolationRequest::new(c.clone(), theta).map(|r| r.closed_form_space()))
        .collect::<Result<_>>()?;
    let mid_refs: Vec<&WeightedSpace> = mid.iter().collect();
    let y_theta = InterpolationRequest::new(couple_y.clone(), theta)?.closed_form_space();
    let theta_est = estimate_multilinear_norm(t, &mid_refs, &y_theta, opts, seed.wrapping_add(2))?;
    let bound = m0.upper.powf(1.0 - theta) * m1.upper.powf(theta);
    let holds = theta_est.lower <= bound + 1e-9;
    let heuristic = !(m0.certification.is_certified() && m1.certification.is_certified());
    Ok(MultilinearReport { m0, m1, theta_lower: theta_est.lower, bound, holds, heuristic })
}

/// Per-degree norms `‖P_m‖`, `m = 0..=M_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaylorData {
    pub norms: Vec<f64>,
    pub truncation: usize,
}

impl TaylorData {
    pub fn new(norms: Vec<f64>) -> Result<Self> {
        if let Some(bad) = norms.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParameter {
                name: "norms",
                reason: format!("entries must be finite and nonnegative, got {bad}"),
            });
        }
        let truncation = norms.len().saturating_sub(1);
        Ok(TaylorData { norms, truncation })
    }
}

/// `1 / max_{m ∈ [⌈M/2⌉, M]} norms[m]^{1/m}`; `+∞` when the window vanishes.
pub fn radius_from_norms(data: &TaylorData) -> Result<f64> {
    let mmax = data.truncation;
    if mmax < 8 {
        return Err(Error::InvalidParameter { name: "truncation", reason: format!("need M_max ≥ 8, got {mmax}") });
    }
    let lo = mmax.div_ceil(2);
    if data.norms.len() <= lo {
        return Err(Error::InvalidParameter { name: "norms", reason: "empty tail window".into() });
    }
    let root = (lo..=mmax).map(|m| data.norms[m].powf(1.0 / m as f64)).fold(0.0, f64::max);
    Ok(if root == 0.0 { f64::INFINITY } else { 1.0 / root })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub r0: f64,
    pub r1: f64,
    pub r_theta: f64,
    /// `R_0^{1-θ} R_1^θ / e`.
    pub bound: f64,
    pub holds: bool,
}

pub fn radius_bound_check(d0: &TaylorData, d1: &TaylorData, dt: &TaylorData, theta: f64) -> Result<RadiusReport> {
    let r0 = radius_from_norms(d0)?;
    let r1 = radius_from_norms(d1)?;
    let r_theta = radius_from_norms(dt)?;
    let bound = if r0.is_infinite() || r1.is_infinite() {
        // an infinite factor with a positive exponent, or a vanishing one
        let a = if theta == 1.0 { 1.0 } else { r0.powf(1.0 - theta) };
        let b = if theta == 0.0 { 1.0 } else { r1.powf(theta) };
        a * b / std::f64::consts::E
    } else {
        r0.powf(1.0 - theta) * r1.powf(theta) / std::f64::consts::E
    };
    let holds = r_theta.is_infinite() || r_theta >= bound * (1.0 - 1e-12);
    Ok(RadiusReport { r0, r1, r_theta, bound, holds })
}

/// Exact `‖P‖` for `P(x)_i = a_i x_i^m` between weighted spaces.
pub fn diagonal_polynomial_norm(a: &[C64], degree: usize, x: &WeightedSpace, y: &WeightedSpace) -> Result<f64> {
    check_dim(x.dim(), a.len())?;
    check_dim(y.dim(), a.len())?;
    let c: Vec<f64> = (0..a.len()).map(|i| a[i].norm() * y.scales()[i] / x.scales()[i].powi(degree as i32)).collect();
    Ok(diagonal_norm(&c, degree as f64 * x.exponent().reciprocal(), y.exponent()))
}

/// Random symmetric map with standard complex normal entries; convenience for
/// seeded populations.
pub fn random_polynomial(seed: u64, counter: u64, degree: usize, n: usize, q: usize) -> HomPolynomial {
    let mut rng = instance_rng(seed, counter);
    HomPolynomial::random(&mut rng, degree, n, q).expect("degree ≥ 1")
}

/// A complex normal vector scaled to unit norm in `x`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, x: &WeightedSpace) -> Vec<C64> {
    let v: Vec<C64> = (0..x.dim()).map(|_| complex_normal(rng)).collect();
    let nv = x.norm_unchecked(&v);
    v.into_iter().map(|z| z / nv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn unweighted(p: Exponent, n: usize) -> WeightedSpace {
        WeightedSpace::unweighted(p, n).unwrap()
    }

    #[test]
    fn ranks_are_a_bijection() {
        for (m, n) in [(1, 4), (2, 3), (3, 3), (5, 2), (4, 4)] {
            let layout = Layout::new(m, n);
            assert_eq!(layout.multisets.len(), binomial(n + m - 1, m) as usize);
            for (r, ms) in layout.multisets.iter().enumerate() {
                assert_eq!(ms.len(), m);
                assert_eq!(rank(ms), r);
            }
            let total: f64 = layout.multiplicity.iter().sum();
            assert_eq!(total, (n as f64).powi(m as i32));
        }
    }

    #[test]
    fn quadratic_by_hand() {
        let mut t = SymMultilinearMap::zero(2, 1, 1).unwrap();
        t.entry_mut(&[0, 0]).unwrap()[0] = C64::new(2.0, -1.0);
        let p = HomPolynomial::from_polar(t);
        assert_eq!(p.evaluate(&[c(3.0)]).unwrap()[0], C64::new(18.0, -9.0));
        let mut t = SymMultilinearMap::zero(2, 2, 1).unwrap();
        t.entry_mut(&[1, 0]).unwrap()[0] = c(1.0);
        let p = HomPolynomial::from_polar(t);
        // P(x) = 2 x0 x1
        assert_eq!(p.evaluate(&[c(3.0), c(5.0)]).unwrap()[0], c(30.0));
        assert_eq!(p.polar().evaluate(&[&[c(1.0), c(0.0)], &[c(0.0), c(1.0)]]).unwrap()[0], c(1.0));
    }

    #[test]
    fn two_term_polarization() {
        let mut rng = instance_rng(1, 0);
        let p = HomPolynomial::random(&mut rng, 2, 3, 2).unwrap();
        let x = complex_normal_vec(&mut rng, 3);
        let y = complex_normal_vec(&mut rng, 3);
        let plus: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let minus: Vec<C64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let (pp, pm) = (p.evaluate(&plus).unwrap(), p.evaluate(&minus).unwrap());
        let direct = p.polar().evaluate(&[&x, &y]).unwrap();
        for j in 0..2 {
            assert!(((pp[j] - pm[j]) / 4.0 - direct[j]).norm() < 1e-12);
        }
        assert!(matches!(
            polarize_via_formula(&HomPolynomial::random(&mut rng, 13, 1, 1).unwrap(), &[]),
            Err(Error::DegreeGuard { degree: 13, max: 12 })
        ));
    }

    #[test]
    fn linear_exact_norms() {
        let a = vec![vec![c(1.0), c(-2.0)], vec![C64::new(0.0, 3.0), c(0.5)]];
        let p = HomPolynomial::from_polar(SymMultilinearMap::linear(&a).unwrap());
        let one = unweighted(Exponent::Finite(1.0), 2);
        let inf = unweighted(Exponent::Infinity, 2);
        let est = estimate_op_norm(&p, &one, &one, &AscentOptions::default(), 0).unwrap();
        assert_eq!(est.certification, Certification::Exact);
        assert_eq!(est.upper, 4.0);
        assert!((est.lower - 4.0).abs() < 1e-12);
        let est = estimate_op_norm(&p, &inf, &inf, &AscentOptions::default(), 0).unwrap();
        assert_eq!(est.upper, 3.5);
        assert!((est.lower - 3.5).abs() < 1e-12);
    }

    #[test]
    fn takagi_and_grid_agree() {
        let mut rng = instance_rng(2, 0);
        let two = WeightedSpace::new(Exponent::Finite(2.0), vec![1.0, 3.0]).unwrap();
        let y = unweighted(Exponent::Finite(2.0), 1);
        let p = HomPolynomial::random(&mut rng, 2, 2, 1).unwrap();
        let exact = estimate_op_norm(&p, &two, &y, &AscentOptions::default(), 0).unwrap();
        assert_eq!(exact.certification, Certification::Exact);
        let grid = grid_certify(&p, &two, &y, exact.lower);
        assert!(grid >= exact.upper * (1.0 - 1e-12));
        assert!(grid <= exact.upper * (1.0 + 2.0 * GRID_REL_GAP));
        assert!((exact.lower - exact.upper).abs() < 1e-9 * exact.upper);
    }

    #[test]
    fn diagonal_norms() {
        let a = [c(2.0), c(-1.0)];
        let two = unweighted(Exponent::Finite(2.0), 2);
        let one = unweighted(Exponent::Finite(1.0), 2);
        // ℓ^2 → ℓ^1 quadratic diagonal: w = u^2 fills the ℓ^1 ball, so max |a_i|
        assert_eq!(diagonal_polynomial_norm(&a, 2, &two, &one).unwrap(), 2.0);
        // ℓ^2 → ℓ^2 linear diagonal
        assert_eq!(diagonal_polynomial_norm(&a, 1, &two, &two).unwrap(), 2.0);
        // ℓ^∞ → ℓ^1 linear diagonal: Σ |a_i|
        let inf = unweighted(Exponent::Infinity, 2);
        assert_eq!(diagonal_polynomial_norm(&a, 1, &inf, &one).unwrap(), 3.0);
        let p = HomPolynomial::diagonal(2, &a).unwrap();
        let est = estimate_op_norm(&p, &inf, &one, &AscentOptions::default(), 0).unwrap();
        assert_eq!(est.certification, Certification::Exact);
        assert_eq!(est.upper, 3.0);
        assert!((est.lower - 3.0).abs() < 1e-12);
    }

    #[test]
    fn radii() {
        let geo = TaylorData::new((0..=32).map(|m| 3f64.powi(-m)).collect()).unwrap();
        assert!((radius_from_norms(&geo).unwrap() - 3.0).abs() < 1e-12);
        let poly = TaylorData::new((0..=16).map(|m| if m <= 3 { 1.0 } else { 0.0 }).collect()).unwrap();
        assert_eq!(radius_from_norms(&poly).unwrap(), f64::INFINITY);
        assert!(radius_from_norms(&TaylorData::new(vec![1.0; 5]).unwrap()).is_err());
        let r = radius_bound_check(&poly, &poly, &poly, 0.5).unwrap();
        assert!(r.holds && r.bound.is_infinite());
    }

    #[test]
    fn json_round_trip() {
        let mut rng = instance_rng(3, 0);
        let t = SymMultilinearMap::random(&mut rng, 3, 2, 2).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert!(s.starts_with(r#"{"m":3,"n":2,"q":2,"entries":[[[0,0,0],"#));
        let back: SymMultilinearMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
