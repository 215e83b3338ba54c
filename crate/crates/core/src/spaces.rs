//! Weighted `ℓ^p` spaces on `C^n`, compatible couples, and the norms of
//! `X0 ∩ X1`, `X0 + X1` and the K-functional.
//!
//! The sum norm is an infimum over splittings `x = x0 + x1`. For weighted
//! sequence spaces both norms are lattice norms, so an optimal splitting can be
//! taken coordinatewise proportional to `x`: `x1_i = λ_i x_i` with
//! `λ_i ∈ [0, 1]` (moving `x1_i` towards that segment never increases
//! `|x0_i|` or `|x1_i|`). The solver therefore works on the box `[0,1]^n` and
//! certifies its answer with an explicit dual functional.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::C64;

/// The exponent `p ∈ [1, ∞]`. Infinity is its own variant, never a large `p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidParameter { name: "p", reason: format!("exponent must lie in [1, inf], got {p}") })
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// Inverse of [`Exponent::reciprocal`]; `r` must lie in `[0, 1]`.
    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidParameter {
                name: "1/p",
                reason: format!("reciprocal exponent must lie in [0, 1], got {r}"),
            });
        }
        if r == 0.0 {
            Ok(Exponent::Infinity)
        } else {
            Ok(Exponent::Finite((1.0 / r).max(1.0)))
        }
    }

    /// Hölder conjugate.
    pub fn conjugate(self) -> Self {
        match self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(1.0) => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::finite(p).map_err(serde::de::Error::custom),
            Raw::Str(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(Exponent::Infinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unknown exponent `{s}`"))),
        }
    }
}

/// `C^n` with the norm `(Σ w_i |x_i|^p)^{1/p}` (or `max w_i |x_i|` at `p = ∞`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct WeightedSpace {
    exponent: Exponent,
    weights: Vec<f64>,
    /// Per-coordinate scales `s_i` with `‖x‖ = ‖(s_i x_i)‖_{ℓ^p}`.
    scales: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpaceRepr {
    dim: usize,
    p: Exponent,
    weights: Vec<f64>,
}

impl TryFrom<SpaceRepr> for WeightedSpace {
    type Error = Error;
    fn try_from(r: SpaceRepr) -> Result<Self> {
        check_dim(r.dim, r.weights.len())?;
        WeightedSpace::new(r.p, r.weights)
    }
}

impl From<WeightedSpace> for SpaceRepr {
    fn from(s: WeightedSpace) -> Self {
        SpaceRepr { dim: s.dim(), p: s.exponent, weights: s.weights }
    }
}

impl WeightedSpace {
    pub fn new(exponent: Exponent, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter { name: "dim", reason: "dimension must be >= 1".into() });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "weights",
                reason: format!("weights must be finite and > 0, got {w}"),
            });
        }
        if let Exponent::Finite(p) = exponent {
            Exponent::finite(p)?;
        }
        let scales = weights
            .iter()
            .map(|&w| match exponent {
                Exponent::Finite(p) => w.powf(1.0 / p),
                Exponent::Infinity => w,
            })
            .collect();
        Ok(WeightedSpace { exponent, weights, scales })
    }

    /// Unweighted `ℓ^p` of dimension `dim`.
    pub fn unweighted(exponent: Exponent, dim: usize) -> Result<Self> {
        Self::new(exponent, vec![1.0; dim])
    }

    /// The space whose norm is `‖(s_i x_i)‖_{ℓ^p}` for the given scales.
    ///
    /// Norms only use the scales; the stored weights `s^p` may underflow or
    /// overflow for very large `p`.
    pub fn from_scales(exponent: Exponent, scales: Vec<f64>) -> Result<Self> {
        if scales.is_empty() {
            return Err(Error::InvalidParameter { name: "dim", reason: "dimension must be >= 1".into() });
        }
        if let Some(s) = scales.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "scales",
                reason: format!("scales must be finite and > 0, got {s}"),
            });
        }
        if let Exponent::Finite(p) = exponent {
            Exponent::finite(p)?;
        }
        let weights = scales
            .iter()
            .map(|&s| match exponent {
                Exponent::Finite(p) => s.powf(p),
                Exponent::Infinity => s,
            })
            .collect();
        Ok(WeightedSpace { exponent, weights, scales })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// The dual space under the bilinear pairing `⟨y, x⟩ = Σ y_i x_i`:
    /// `ℓ^{p'}` with scales `1/s_i`.
    pub fn dual(&self) -> WeightedSpace {
        let scales = self.scales.iter().map(|s| 1.0 / s).collect();
        WeightedSpace::from_scales(self.exponent.conjugate(), scales).expect("reciprocal scales are positive")
    }

    pub fn norm(&self, x: &[C64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &[C64]) -> f64 {
        self.lattice_norm(x.iter().map(|z| z.norm()))
    }

    /// Norm of the vector with the given moduli.
    pub fn norm_of_moduli(&self, a: &[f64]) -> Result<f64> {
        check_dim(self.dim(), a.len())?;
        Ok(self.lattice_norm(a.iter().copied()))
    }

    fn lattice_norm(&self, moduli: impl Iterator<Item = f64>) -> f64 {
        let scaled = moduli.zip(&self.scales).map(|(a, s)| a * s);
        lp_norm(self.exponent, scaled)
    }

    /// Norm of `y` as a functional on this space.
    pub fn dual_norm(&self, y: &[C64]) -> Result<f64> {
        check_dim(self.dim(), y.len())?;
        Ok(self.dual_norm_of_moduli_unchecked(y.iter().map(|z| z.norm())))
    }

    pub(crate) fn dual_norm_of_moduli_unchecked(&self, moduli: impl Iterator<Item = f64>) -> f64 {
        let scaled = moduli.zip(&self.scales).map(|(a, s)| a / s);
        lp_norm(self.exponent.conjugate(), scaled)
    }

    /// A functional `y` with `‖y‖_* = 1` and `⟨y, x⟩ = ‖x‖` (`x ≠ 0`).
    pub fn norming_functional(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_dim(self.dim(), x.len())?;
        let nx = self.norm_unchecked(x);
        if nx == 0.0 {
            return Ok(vec![C64::new(0.0, 0.0); x.len()]);
        }
        let phase = |z: C64| if z.norm() > 0.0 { z.conj() / z.norm() } else { C64::new(0.0, 0.0) };
        let y: Vec<C64> = match self.exponent {
            Exponent::Finite(p) => {
                x.iter().zip(&self.scales).map(|(z, s)| phase(*z) * (s * (s * z.norm() / nx).powf(p - 1.0))).collect()
            }
            Exponent::Infinity => {
                let (i, _) = x
                    .iter()
                    .zip(&self.scales)
                    .enumerate()
                    .map(|(i, (z, s))| (i, z.norm() * s))
                    .fold((0, f64::NEG_INFINITY), |acc, v| if v.1 > acc.1 { v } else { acc });
                let mut y = vec![C64::new(0.0, 0.0); x.len()];
                y[i] = phase(x[i]) * self.scales[i];
                y
            }
        };
        Ok(y)
    }
}

/// Plain `ℓ^p` norm of a sequence of nonnegative reals.
pub(crate) fn lp_norm(p: Exponent, a: impl Iterator<Item = f64>) -> f64 {
    match p {
        Exponent::Infinity => a.fold(0.0, f64::max),
        Exponent::Finite(1.0) => a.sum(),
        Exponent::Finite(2.0) => {
            // scaled to avoid overflow
            let v: Vec<f64> = a.collect();
            let m = v.iter().copied().fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
        }
        Exponent::Finite(p) => {
            let v: Vec<f64> = a.collect();
            let m = v.iter().copied().fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            m * v.iter().map(|x| (x / m).powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// An ordered pair of spaces on the same coordinate space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoupleRepr", into = "CoupleRepr")]
pub struct Couple {
    space0: WeightedSpace,
    space1: WeightedSpace,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoupleRepr {
    space0: WeightedSpace,
    space1: WeightedSpace,
}

impl TryFrom<CoupleRepr> for Couple {
    type Error = Error;
    fn try_from(r: CoupleRepr) -> Result<Self> {
        Couple::new(r.space0, r.space1)
    }
}

impl From<Couple> for CoupleRepr {
    fn from(c: Couple) -> Self {
        CoupleRepr { space0: c.space0, space1: c.space1 }
    }
}

impl Couple {
    pub fn new(space0: WeightedSpace, space1: WeightedSpace) -> Result<Self> {
        check_dim(space0.dim(), space1.dim())?;
        Ok(Couple { space0, space1 })
    }

    pub fn dim(&self) -> usize {
        self.space0.dim()
    }

    pub fn space0(&self) -> &WeightedSpace {
        &self.space0
    }

    pub fn space1(&self) -> &WeightedSpace {
        &self.space1
    }

    /// `X_j` for `j ∈ {0, 1}`.
    pub fn space(&self, j: usize) -> &WeightedSpace {
        if j == 0 {
            &self.space0
        } else {
            &self.space1
        }
    }
}

/// `max(‖x‖_0, ‖x‖_1)`.
pub fn intersection_norm(couple: &Couple, x: &[C64]) -> Result<f64> {
    check_dim(couple.dim(), x.len())?;
    Ok(couple.space0.norm_unchecked(x).max(couple.space1.norm_unchecked(x)))
}

/// How a [`Decomposition`] was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Closed form (zero vector, or a single nonzero coordinate).
    Exact,
    /// Upper and lower bound from an explicit dual functional.
    DualityGap,
    /// Agreement with an exhaustive grid search (dimension ≤ 3).
    GridOracle,
}

/// A splitting `x = part0 + part1` with its objective `‖part0‖_0 + t‖part1‖_1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub part0: Vec<C64>,
    pub part1: Vec<C64>,
    pub objective: f64,
    /// Certified lower bound on the infimum.
    pub lower_bound: f64,
    /// `objective - lower_bound` (or the grid disagreement).
    pub achieved_tol: f64,
    /// `max_i |part0_i + part1_i - x_i|`.
    pub residual: f64,
    pub certificate: Certificate,
    pub iterations: usize,
}

/// Norm of `X0 + X1`: `inf { ‖x0‖_0 + ‖x1‖_1 : x = x0 + x1 }`.
pub fn sum_norm(couple: &Couple, x: &[C64], tol: f64) -> Result<(f64, Decomposition)> {
    k_functional(couple, x, 1.0, tol)
}

/// Peetre's K-functional `K(t, x) = inf { ‖x0‖_0 + t‖x1‖_1 : x = x0 + x1 }`.
pub fn k_functional(couple: &Couple, x: &[C64], t: f64, tol: f64) -> Result<(f64, Decomposition)> {
    k_functional_with_budget(couple, x, t, tol, DEFAULT_BUDGET)
}

/// Bisection iterations per outer variable.
const DEFAULT_BUDGET: usize = 200;

/// As [`k_functional`], with an explicit number of bisection iterations per
/// outer variable.
pub fn k_functional_with_budget(
    couple: &Couple,
    x: &[C64],
    t: f64,
    tol: f64,
    budget: usize,
) -> Result<(f64, Decomposition)> {
    check_dim(couple.dim(), x.len())?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter { name: "t", reason: format!("t must be > 0, got {t}") });
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", reason: format!("tol must be > 0, got {tol}") });
    }
    let d = solve_k(couple, x, t, tol, budget)?;
    Ok((d.objective, d))
}

// The solver rests on the variational formula
//     ‖v‖_p = min_{r > 0} [ ‖v‖_p^p / (p r^{p-1}) + (1 - 1/p) r ],
//     ‖v‖_∞ = min { r : |v_i| s_i ≤ r },
// which turns the splitting problem into one that is separable across
// coordinates once the two outer scalars (one per space) are fixed. The
// resulting function of the outer scalars is jointly convex (a partial
// minimum of perspectives), so nested golden-section search finds it.

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Linear,
    Power(f64),
    Cap,
}

/// One side of the splitting problem: the norm `‖(scale_i u_i)‖_p`.
struct Side {
    kind: Kind,
    scales: Vec<f64>,
}

impl Side {
    fn new(space: &WeightedSpace, factor: f64) -> Self {
        let kind = match space.exponent() {
            Exponent::Finite(1.0) => Kind::Linear,
            Exponent::Finite(p) => Kind::Power(p),
            Exponent::Infinity => Kind::Cap,
        };
        Side { kind, scales: space.scales().iter().map(|s| s * factor).collect() }
    }

    fn has_outer(&self) -> bool {
        self.kind != Kind::Linear
    }

    fn norm(&self, u: &[f64]) -> f64 {
        let p = match self.kind {
            Kind::Linear => Exponent::Finite(1.0),
            Kind::Power(p) => Exponent::Finite(p),
            Kind::Cap => Exponent::Infinity,
        };
        lp_norm(p, u.iter().zip(&self.scales).map(|(a, s)| a * s))
    }

    fn cap(&self, i: usize, r: f64) -> f64 {
        match self.kind {
            Kind::Cap => r / self.scales[i],
            Kind::Power(_) if r == 0.0 => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Marginal cost of carrying `u` on this side (`+∞` where it admits no
    /// mass), for the separable form `(s u)^p / (p r^{p-1})`.
    fn deriv(&self, i: usize, u: f64, r: f64) -> f64 {
        let s = self.scales[i];
        match self.kind {
            Kind::Linear => s,
            Kind::Power(_) if r == 0.0 => f64::INFINITY,
            Kind::Power(p) => s * (s * u / r).powf(p - 1.0),
            Kind::Cap => 0.0,
        }
    }
}

struct Split<'a> {
    a: &'a [f64],
    side0: Side,
    side1: Side,
}

impl Split<'_> {
    /// Optimal amount `u` of coordinate `i` carried by side 0, or `None` if
    /// the caps make the coordinate infeasible.
    fn coordinate(&self, i: usize, r0: f64, r1: f64) -> Option<f64> {
        let a = self.a[i];
        let lo = (a - self.side1.cap(i, r1)).max(0.0);
        let hi = a.min(self.side0.cap(i, r0));
        if lo > hi + 1e-12 * a {
            return None;
        }
        // within rounding of an exactly tight pair of caps
        let lo = lo.min(hi);
        let h = |u: f64| self.side0.deriv(i, u, r0) - self.side1.deriv(i, a - u, r1);
        if lo == hi || h(lo) >= 0.0 {
            return Some(lo);
        }
        if h(hi) <= 0.0 {
            return Some(hi);
        }
        let (s0, s1) = (self.side0.scales[i], self.side1.scales[i]);
        let u = match (self.side0.kind, self.side1.kind) {
            (Kind::Power(p), Kind::Power(q)) if p == q => {
                // s0 (s0 u / r0)^{p-1} = s1 (s1 v / r1)^{p-1}
                let rho = ((s1 / s0).powf(p) * (r0 / r1).powf(p - 1.0)).powf(1.0 / (p - 1.0));
                a * rho / (1.0 + rho)
            }
            (Kind::Linear, Kind::Power(q)) => a - r1 / s1 * (s0 / s1).powf(1.0 / (q - 1.0)),
            (Kind::Power(p), Kind::Linear) => r0 / s0 * (s1 / s0).powf(1.0 / (p - 1.0)),
            (Kind::Power(p), Kind::Power(q)) => {
                // safeguarded Newton on c0 u^{p-1} = c1 (a - u)^{q-1}
                let c0 = s0.powf(p) / r0.powf(p - 1.0);
                let c1 = s1.powf(q) / r1.powf(q - 1.0);
                let dh = |u: f64| c0 * (p - 1.0) * u.powf(p - 2.0) + c1 * (q - 1.0) * (a - u).powf(q - 2.0);
                let (mut l, mut r) = (lo, hi);
                let mut u = 0.5 * (l + r);
                for _ in 0..100 {
                    let hu = c0 * u.powf(p - 1.0) - c1 * (a - u).powf(q - 1.0);
                    if hu == 0.0 {
                        break;
                    }
                    if hu < 0.0 {
                        l = u;
                    } else {
                        r = u;
                    }
                    let step = hu / dh(u);
                    let mut next = u - step;
                    if !(next > l && next < r) {
                        next = 0.5 * (l + r);
                    }
                    if (next - u).abs() <= 1e-15 * a || r - l <= 1e-15 * a {
                        u = next;
                        break;
                    }
                    u = next;
                }
                u
            }
            _ => monotone_root(h, lo, hi, 0.0, 200),
        };
        Some(u.clamp(lo, hi))
    }

    fn parts(&self, r0: f64, r1: f64) -> Vec<f64> {
        (0..self.a.len()).map(|i| self.coordinate(i, r0, r1).unwrap_or(self.a[i])).collect()
    }

    /// Derivative of the reduced objective in the outer variable of `side`
    /// (envelope theorem: the inner split is optimal, so only the explicit
    /// dependence on `r` counts).
    fn slope(&self, side: usize, r0: f64, r1: f64) -> f64 {
        let (this, other, r) = if side == 0 { (&self.side0, &self.side1, r0) } else { (&self.side1, &self.side0, r1) };
        let (ro, _) = if side == 0 { (r1, r0) } else { (r0, r1) };
        let mut d = match this.kind {
            Kind::Linear => return 0.0,
            Kind::Power(p) => 1.0 - 1.0 / p,
            Kind::Cap => 1.0,
        };
        for i in 0..self.a.len() {
            let Some(u) = self.coordinate(i, r0, r1) else {
                // infeasible: the caps must grow
                return f64::NEG_INFINITY;
            };
            let (w, wo) = if side == 0 { (u, self.a[i] - u) } else { (self.a[i] - u, u) };
            let s = this.scales[i];
            match this.kind {
                Kind::Power(_) if w == 0.0 => {}
                Kind::Power(_) if r == 0.0 => return f64::NEG_INFINITY,
                Kind::Power(p) => d -= (1.0 - 1.0 / p) * (s * w / r).powf(p),
                Kind::Cap => {
                    if r > 0.0 && w * s >= r * (1.0 - 1e-12) {
                        // multiplier of the active cap: the other side's marginal cost
                        let lambda = other.deriv(i, wo, ro);
                        if lambda.is_finite() {
                            d -= lambda / s;
                        } else {
                            return f64::NEG_INFINITY;
                        }
                    }
                }
                Kind::Linear => unreachable!(),
            }
        }
        d
    }

    /// Smallest feasible `r1` when both sides are caps.
    fn min_cap1(&self, r0: f64) -> f64 {
        (0..self.a.len())
            .map(|i| (self.a[i] - self.side0.cap(i, r0)).max(0.0) * self.side1.scales[i])
            .fold(0.0, f64::max)
    }

    /// Exact objective of the split that gives `u` to side 0.
    fn objective(&self, u: &[f64]) -> f64 {
        let v: Vec<f64> = self.a.iter().zip(u).map(|(a, u)| (a - u).max(0.0)).collect();
        self.side0.norm(u) + self.side1.norm(&v)
    }

    /// Dual functional read off the optimality conditions of the split `u`.
    ///
    /// Returns the determined part and, separately, the largest admissible
    /// multiplier on "breakpoint" coordinates: those sitting exactly at a cap
    /// with nothing on the other side, whose multiplier is only known to lie
    /// between zero and the other side's derivative.
    fn envelope_functional(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.a.len();
        let v: Vec<f64> = self.a.iter().zip(u).map(|(a, u)| (a - u).max(0.0)).collect();
        let r0 = self.side0.norm(u);
        let r1 = self.side1.norm(&v);
        let at_cap = |side: &Side, i: usize, w: f64, r: f64| r == 0.0 || w * side.scales[i] >= r * (1.0 - 1e-9);
        let mut fixed = vec![0.0; n];
        let mut free = vec![0.0; n];
        for i in 0..n {
            // a cap side is free below its cap and closed at it
            let (d0, d1) = match (self.side0.kind, self.side1.kind) {
                (Kind::Cap, _) if at_cap(&self.side0, i, u[i], r0) => {
                    let d1 = self.side1.deriv(i, v[i], r1);
                    if v[i] <= self.a[i] * 1e-12 {
                        // with side 1 empty the cap side's own norming value bounds it
                        free[i] = if d1.is_finite() { d1 } else { self.side0.scales[i] };
                        continue;
                    }
                    (f64::INFINITY, d1)
                }
                (_, Kind::Cap) if at_cap(&self.side1, i, v[i], r1) => {
                    let d0 = self.side0.deriv(i, u[i], r0);
                    if u[i] <= self.a[i] * 1e-12 {
                        free[i] = if d0.is_finite() { d0 } else { self.side1.scales[i] };
                        continue;
                    }
                    (d0, f64::INFINITY)
                }
                (Kind::Cap, _) => (0.0, self.side1.deriv(i, v[i], r1)),
                (_, Kind::Cap) => (self.side0.deriv(i, u[i], r0), 0.0),
                _ => (self.side0.deriv(i, u[i], r0), self.side1.deriv(i, v[i], r1)),
            };
            let y = d0.min(d1);
            fixed[i] = if y.is_finite() { y } else { 0.0 };
        }
        (fixed, free)
    }

    /// Best functional supported on at most two coordinates for the
    /// `ℓ^∞ + ℓ^∞` case, where the dual is a two-constraint linear program.
    fn two_cap_functional(&self) -> Vec<f64> {
        let n = self.a.len();
        let c: Vec<f64> = self.side0.scales.iter().map(|s| 1.0 / s).collect();
        let d: Vec<f64> = self.side1.scales.iter().map(|s| 1.0 / s).collect();
        let mut best = (0.0, vec![0.0; n]);
        let mut consider = |y: Vec<f64>| {
            let v: f64 = y.iter().zip(self.a).map(|(y, a)| y * a).sum();
            if v > best.0 {
                best = (v, y);
            }
        };
        for i in 0..n {
            let mut y = vec![0.0; n];
            y[i] = 1.0 / c[i].max(d[i]);
            consider(y);
            for j in i + 1..n {
                let det = c[i] * d[j] - c[j] * d[i];
                if det.abs() < 1e-300 {
                    continue;
                }
                let yi = (d[j] - c[j]) / det;
                let yj = (c[i] - d[i]) / det;
                if yi >= 0.0 && yj >= 0.0 {
                    let mut y = vec![0.0; n];
                    y[i] = yi;
                    y[j] = yj;
                    consider(y);
                }
            }
        }
        best.1
    }
}

/// Minimizer on `[lo, hi]` of a convex function given its derivative.
fn bisect_min(slope: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: usize) -> f64 {
    // slopes of the reduced objective are dimensionless, of order one
    monotone_root(slope, lo, hi, 1e-14, iters)
}

/// Sign change of a nondecreasing function on `(lo, hi)` (converging to an
/// end point if there is none). Illinois-modified regula falsi, falling back to bisection
/// whenever a bracket value is infinite or the step stalls.
fn monotone_root(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol_f: f64, iters: usize) -> f64 {
    // the end points are never evaluated (one-sided limits there can differ
    // from the values, e.g. an empty side at r = 0)
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f64::NEG_INFINITY, f64::INFINITY);
    let resolution = 4.0 * f64::EPSILON * (hi - lo).abs().max(f64::MIN_POSITIVE);
    let mut side = 0i8;
    for _ in 0..iters {
        if b - a <= resolution {
            break;
        }
        let mid = 0.5 * (a + b);
        let mut m = if fa.is_finite() && fb.is_finite() { a - fa * (b - a) / (fb - fa) } else { mid };
        if !(m > a && m < b) {
            m = mid;
        }
        let fm = f(m);
        if fm.abs() <= tol_f {
            return m;
        }
        if fm < 0.0 {
            a = m;
            fa = fm;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = m;
            fb = fm;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

/// Golden-section minimization of a convex function on `[lo, hi]`; the end
/// points are evaluated too, so boundary minima are found exactly.
fn golden(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut f = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh < best.1 {
        best = (hi, fh);
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if b - a <= f64::EPSILON * b.abs() {
            break;
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

fn solve_k(couple: &Couple, x: &[C64], t: f64, tol: f64, budget: usize) -> Result<Decomposition> {
    let n = x.len();
    let moduli: Vec<f64> = x.iter().map(|z| z.norm()).collect();
    let split = Split { a: &moduli, side0: Side::new(&couple.space0, 1.0), side1: Side::new(&couple.space1, t) };
    let finish = |u: &[f64], lower: f64, certificate, iterations| {
        let part0: Vec<C64> =
            x.iter().zip(u).zip(&moduli).map(|((z, u), a)| if *a > 0.0 { z * (u / a) } else { *z }).collect();
        let part1: Vec<C64> = x.iter().zip(&part0).map(|(z, p)| z - p).collect();
        let objective = couple.space0.norm_unchecked(&part0) + t * couple.space1.norm_unchecked(&part1);
        let residual = part0.iter().zip(&part1).zip(x).map(|((a, b), z)| (a + b - z).norm()).fold(0.0, f64::max);
        let lower = lower.min(objective);
        Decomposition {
            part0,
            part1,
            objective,
            lower_bound: lower,
            achieved_tol: objective - lower,
            residual,
            certificate,
            iterations,
        }
    };
    if moduli.iter().all(|a| *a == 0.0) {
        return Ok(finish(&moduli, 0.0, Certificate::Exact, 0));
    }

    let mut evaluations = 0usize;
    let max0 = split.side0.norm(&moduli);
    let max1 = split.side1.norm(&moduli);
    let u = match (split.side0.has_outer(), split.side1.has_outer()) {
        (false, false) => split.parts(0.0, 0.0),
        (true, false) => {
            let r0 = bisect_min(
                |r| {
                    evaluations += 1;
                    split.slope(0, r, 0.0)
                },
                0.0,
                max0,
                budget,
            );
            split.parts(r0, 0.0)
        }
        (false, true) => {
            let r1 = bisect_min(
                |r| {
                    evaluations += 1;
                    split.slope(1, 0.0, r)
                },
                0.0,
                max1,
                budget,
            );
            split.parts(0.0, r1)
        }
        (true, true) if split.side0.kind == Kind::Cap && split.side1.kind == Kind::Cap => {
            // piecewise linear in r0
            let (r0, _) = golden(
                |r| {
                    evaluations += 1;
                    r + split.min_cap1(r)
                },
                0.0,
                max0,
                budget,
            );
            split.parts(r0, split.min_cap1(r0))
        }
        (true, true) => {
            let mut inner = |r0: f64| {
                bisect_min(
                    |r1| {
                        evaluations += 1;
                        split.slope(1, r0, r1)
                    },
                    0.0,
                    max1,
                    budget,
                )
            };
            let r0 = bisect_min(|r0| split.slope(0, r0, inner(r0)), 0.0, max0, budget);
            let r1 = inner(r0);
            split.parts(r0, r1)
        }
    };
    let objective = split.objective(&u);
    let bound_at = |u: &[f64]| {
        let (fixed, free) = split.envelope_functional(u);
        let bound = |g: f64| {
            let y: Vec<f64> = fixed.iter().zip(&free).map(|(a, b)| a + g * b).collect();
            best_dual_value(couple, &moduli, t, &y)
        };
        if free.iter().all(|f| *f == 0.0) {
            bound(0.0)
        } else {
            // the bound is a ratio of a linear to a convex function of g
            let (g, _) = golden(|g| -bound(g), 0.0, 1.0, budget);
            bound(g)
        }
    };
    let lower = if split.side0.kind == Kind::Cap && split.side1.kind == Kind::Cap {
        best_dual_value(couple, &moduli, t, &split.two_cap_functional())
    } else {
        // Golden search leaves vanishing remainders whose (scale-invariant)
        // gradients say nothing; snapping them to zero recovers the right
        // functional. Every candidate is a valid bound, so keep the best.
        let mut lower = bound_at(&u);
        for eps in [1e-12, 1e-9, 1e-6, 1e-3] {
            let snapped: Vec<f64> = u
                .iter()
                .zip(&moduli)
                .map(|(&u, &a)| {
                    if u <= eps * a {
                        0.0
                    } else if a - u <= eps * a {
                        a
                    } else {
                        u
                    }
                })
                .collect();
            lower = lower.max(bound_at(&snapped));
        }
        lower
    };
    if objective - lower <= tol {
        return Ok(finish(&u, lower, Certificate::DualityGap, evaluations));
    }
    let support: Vec<usize> = (0..n).filter(|&i| moduli[i] > 0.0).collect();
    if support.len() <= 3 {
        let (v, grid_u) = grid_search(&split, &support, &u, tol);
        if (objective - v).abs() <= tol {
            let u = if v < objective { grid_u } else { u };
            return Ok(finish(&u, lower, Certificate::GridOracle, evaluations));
        }
    }
    Err(Error::SolverFailure { solver: "k_functional", best: objective, residual: objective - lower })
}

/// `Σ y_i |x_i| / max(‖y‖_{0*}, ‖y‖_{1*} / t)`: a lower bound on `K(t, x)`
/// for every nonnegative `y` (phases aligned with `x`).
fn best_dual_value(couple: &Couple, moduli: &[f64], t: f64, y: &[f64]) -> f64 {
    let pairing: f64 = y.iter().zip(moduli).map(|(a, b)| a * b).sum();
    let d0 = couple.space0.dual_norm_of_moduli_unchecked(y.iter().copied());
    let d1 = couple.space1.dual_norm_of_moduli_unchecked(y.iter().copied()) / t;
    let d = d0.max(d1);
    if d > 0.0 && d.is_finite() {
        pairing / d
    } else {
        0.0
    }
}

/// Coarse-to-fine exhaustive search over the side-0 share of each coordinate
/// on the support (at most three coordinates).
fn grid_search(split: &Split<'_>, support: &[usize], start: &[f64], tol: f64) -> (f64, Vec<f64>) {
    let k = support.len();
    let mut center: Vec<f64> = start.iter().zip(split.a).map(|(u, a)| if *a > 0.0 { u / a } else { 0.0 }).collect();
    let to_u = |frac: &[f64]| -> Vec<f64> { frac.iter().zip(split.a).map(|(f, a)| f * a).collect() };
    let mut best = split.objective(&to_u(&center));
    let mut half = 0.5;
    let steps = 20usize;
    while half > tol * 1e-3 {
        let mut frac = center.clone();
        let total = (steps + 1).pow(k as u32);
        for idx in 0..total {
            let mut r = idx;
            for &i in support {
                let j = r % (steps + 1);
                r /= steps + 1;
                frac[i] = (center[i] - half + 2.0 * half * j as f64 / steps as f64).clamp(0.0, 1.0);
            }
            let v = split.objective(&to_u(&frac));
            if v < best {
                best = v;
                center.clone_from(&frac);
            }
        }
        half *= 0.25;
    }
    (best, to_u(&center))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn space(p: Exponent, w: &[f64]) -> WeightedSpace {
        WeightedSpace::new(p, w.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_three_four_five() {
        let s = space(Exponent::Finite(2.0), &[1.0, 1.0]);
        assert!((s.norm(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap() - 5.0).abs() < 1e-15);
        assert_eq!(s.norm(&[c(0.0, 0.0); 2]).unwrap(), 0.0);
    }

    #[test]
    fn weighted_l1() {
        let s = space(Exponent::Finite(1.0), &[2.0, 1.0]);
        assert!((s.norm(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = space(Exponent::Infinity, &[1.0, 1.0]);
        assert!(matches!(s.norm(&[c(1.0, 0.0)]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn intersection_of_l1_and_linf() {
        let cp =
            Couple::new(space(Exponent::Finite(1.0), &[1.0, 1.0]), space(Exponent::Infinity, &[1.0, 1.0])).unwrap();
        let v = intersection_norm(&cp, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(v, 2.0);
    }

    #[test]
    fn sum_norm_routes_coordinates() {
        let cp =
            Couple::new(space(Exponent::Finite(1.0), &[1.0, 1.0]), space(Exponent::Finite(1.0), &[10.0, 0.1])).unwrap();
        let x = [c(1.0, 0.0), c(1.0, 0.0)];
        let (v, d) = sum_norm(&cp, &x, 1e-6).unwrap();
        assert!((v - 1.1).abs() < 1e-6, "{v}");
        assert!(d.residual < 1e-15);
        assert!((d.part0[0] - x[0]).norm() < 1e-9 && (d.part1[1] - x[1]).norm() < 1e-9);
        // t = 2: coordinate 2 costs min(1, 0.2)
        let (v2, _) = k_functional(&cp, &x, 2.0, 1e-6).unwrap();
        assert!((v2 - 1.2).abs() < 1e-6, "{v2}");
    }

    #[test]
    fn identical_spaces_give_the_norm() {
        for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(3.5), Exponent::Infinity] {
            let s = space(p, &[1.0, 2.0, 0.5]);
            let cp = Couple::new(s.clone(), s.clone()).unwrap();
            let x = [c(1.0, -1.0), c(0.3, 0.2), c(-2.0, 0.0)];
            let (v, _) = sum_norm(&cp, &x, 1e-7).unwrap();
            assert!((v - s.norm(&x).unwrap()).abs() < 1e-6, "{p}: {v}");
        }
    }

    #[test]
    fn l1_linf_sum_norm_matches_hand_value() {
        // ℓ^1 + ℓ^∞ on R^2, x = (2, 1): best is x1 = (1, 1), x0 = (1, 0): 1 + 1 = 2.
        // Any split costs |x0_1| + |x0_2| + max(|x1_1|, |x1_2|) ≥ 2.
        let cp =
            Couple::new(space(Exponent::Finite(1.0), &[1.0, 1.0]), space(Exponent::Infinity, &[1.0, 1.0])).unwrap();
        let (v, d) = sum_norm(&cp, &[c(2.0, 0.0), c(1.0, 0.0)], 1e-7).unwrap();
        assert!((v - 2.0).abs() < 1e-6, "{v}");
        assert_eq!(d.certificate, Certificate::DualityGap);
    }

    #[test]
    fn dual_norm_pairs_with_norming_functional() {
        for p in [Exponent::Finite(1.0), Exponent::Finite(1.5), Exponent::Finite(2.0), Exponent::Infinity] {
            let s = space(p, &[0.5, 2.0, 3.0]);
            let x = [c(1.0, 2.0), c(-0.5, 0.1), c(0.2, -0.7)];
            let y = s.norming_functional(&x).unwrap();
            let pairing: C64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
            assert!((pairing.re - s.norm(&x).unwrap()).abs() < 1e-12, "{p}");
            assert!(pairing.im.abs() < 1e-12);
            assert!((s.dual_norm(&y).unwrap() - 1.0).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn json_round_trip() {
        let s = space(Exponent::Infinity, &[1.0, 2.5]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"dim":2,"p":"inf","weights":[1.0,2.5]}"#);
        let back: WeightedSpace = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let bad = serde_json::from_str::<WeightedSpace>(r#"{"dim":3,"p":2,"weights":[1,2]}"#);
        assert!(bad.is_err());
        let bad_p = serde_json::from_str::<WeightedSpace>(r#"{"dim":1,"p":0.5,"weights":[1]}"#);
        assert!(bad_p.is_err());
    }
}
