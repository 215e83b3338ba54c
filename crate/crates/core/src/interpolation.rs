//! Interpolated spaces `[X0, X1]_θ` of weighted sequence couples: the closed
//! form, numeric norms through [`minimize_family`], duality lower bounds, the
//! Hölder-type inequality, K-functional decompositions and Peetre-type
//! brackets for explicit representations.

use serde::{Deserialize, Serialize};

use crate::analytic::{minimize_family, unconditional_bracket, BoundaryGrid, FamilyFit};
use crate::error::{check_dim, Error, Result};
use crate::spaces::{k_functional, Couple, Decomposition, Exponent, WeightedSpace};
use crate::C64;

/// Harmonic interpolation of exponents, `1/p = (1-θ)/p0 + θ/p1`.
pub fn calderon_exponent(theta: f64, p0: Exponent, p1: Exponent) -> Exponent {
    let r = (1.0 - theta) * p0.reciprocal() + theta * p1.reciprocal();
    // r is a convex combination of values in [0, 1]
    Exponent::from_reciprocal(r.clamp(0.0, 1.0)).expect("reciprocal in [0, 1]")
}

/// A couple and a parameter `θ ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationRequest {
    pub couple: Couple,
    pub theta: f64,
}

impl InterpolationRequest {
    pub fn new(couple: Couple, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter { name: "theta", reason: format!("must lie in [0, 1], got {theta}") });
        }
        Ok(InterpolationRequest { couple, theta })
    }

    pub fn dim(&self) -> usize {
        self.couple.dim()
    }

    /// The closed-form space `ℓ^p(σ)` with `p` from [`calderon_exponent`] and
    /// scales `σ_i = s0_i^{1-θ} s1_i^θ`, where `s_j` are the endpoint scales
    /// (`w^{1/p}`, or `w` itself at `p = ∞`).
    pub fn closed_form_space(&self) -> WeightedSpace {
        let (x0, x1) = (self.couple.space0(), self.couple.space1());
        match self.theta {
            0.0 => x0.clone(),
            1.0 => x1.clone(),
            t => {
                let p = calderon_exponent(t, x0.exponent(), x1.exponent());
                let scales = x0.scales().iter().zip(x1.scales()).map(|(a, b)| a.powf(1.0 - t) * b.powf(t)).collect();
                WeightedSpace::from_scales(p, scales).expect("positive finite scales")
            }
        }
    }
}

/// `‖x‖_θ` in the closed-form model (exact endpoint norms at `θ ∈ {0, 1}`).
pub fn closed_form_norm(req: &InterpolationRequest, x: &[C64]) -> Result<f64> {
    req.closed_form_space().norm(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMode {
    Closed,
    Numeric,
    Both,
}

/// Discretization used by the numeric mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericOptions {
    pub degree: usize,
    pub samples: usize,
    pub budget: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        NumericOptions { degree: 32, samples: 256, budget: 1000 }
    }
}

/// Bracket `lower ≤ ‖x‖_θ ≤ upper`, plus the cross-check figures when both
/// methods ran.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub closed: Option<f64>,
    pub numeric_lower: Option<f64>,
    pub numeric_upper: Option<f64>,
    /// `(numeric upper − closed) / closed`.
    pub discrepancy: Option<f64>,
    pub fit: Option<FamilyFit>,
}

/// The interpolated norm of `x`.
///
/// * `Closed` — exact, `lower = upper`.
/// * `Numeric` — `upper` from [`minimize_family`], `lower` from
///   [`duality_lower_bound`]; an unconverged optimizer is reported as
///   [`Error::SolverFailure`] carrying its best value.
/// * `Both` — exact bracket from the closed form, numeric figures attached.
pub fn interpolated_norm(
    req: &InterpolationRequest,
    x: &[C64],
    mode: NormMode,
    opts: &NumericOptions,
) -> Result<NormEstimate> {
    check_dim(req.dim(), x.len())?;
    let endpoint = req.theta == 0.0 || req.theta == 1.0;
    let zero = x.iter().all(|z| *z == C64::new(0.0, 0.0));
    let closed = match mode {
        NormMode::Closed | NormMode::Both => Some(closed_form_norm(req, x)?),
        NormMode::Numeric if endpoint || zero => Some(closed_form_norm(req, x)?),
        NormMode::Numeric => None,
    };
    if mode == NormMode::Closed || endpoint || zero {
        let v = closed.expect("computed above");
        return Ok(NormEstimate {
            lower: v,
            upper: v,
            closed,
            numeric_lower: None,
            numeric_upper: None,
            discrepancy: None,
            fit: None,
        });
    }
    let grid = BoundaryGrid::new(opts.samples)?;
    let fit = minimize_family(&req.couple, req.theta, x, opts.degree, &grid, opts.budget)?;
    if !fit.converged {
        return Err(Error::SolverFailure { solver: "minimize_family", best: fit.value, residual: f64::NAN });
    }
    let lower = duality_lower_bound(req, x)?;
    let (lo, hi) = match closed {
        Some(c) => (c, c),
        None => (lower, fit.value),
    };
    Ok(NormEstimate {
        lower: lo,
        upper: hi,
        closed,
        numeric_lower: Some(lower),
        numeric_upper: Some(fit.value),
        discrepancy: closed.map(|c| (fit.value - c) / c),
        fit: Some(fit),
    })
}

/// Lower bound on `‖x‖_θ` from an explicit analytic dual family.
///
/// For `y ∈ C^n` and real shifts `β`, `G_i(w) = y_i e^{β_i (w-θ)}` is
/// bounded and analytic on the strip `0 < Re w < 1` with `G(θ) = y`; pairing
/// it with the lift `φ(e^w)` of any admissible family and applying the three
/// lines theorem gives
/// `|⟨y, x⟩| ≤ ‖φ‖ · A0^{1-θ} A1^θ`, `A_j = ‖(|y_i| e^{(j-θ)β_i})‖_{X_j*}`.
/// The certificate uses `y` norming `x` in the closed-form space and the
/// shifts that balance the two dual norms; the bound is evaluated directly,
/// so it does not rely on the closed form being right.
pub fn duality_lower_bound(req: &InterpolationRequest, x: &[C64]) -> Result<f64> {
    check_dim(req.dim(), x.len())?;
    let theta = req.theta;
    let (x0, x1) = (req.couple.space0(), req.couple.space1());
    if theta == 0.0 || theta == 1.0 {
        return closed_form_norm(req, x);
    }
    let target = req.closed_form_space();
    let mut best = 0.0f64;
    for space in [&target, x0, x1] {
        let y = space.norming_functional(x)?;
        let sigma = target.scales();
        let (q0, q1, q) = (x0.exponent().conjugate(), x1.exponent().conjugate(), target.exponent().conjugate());
        let shift_power = match q {
            Exponent::Infinity => 0.0,
            Exponent::Finite(qq) => qq * (q1.reciprocal() - q0.reciprocal()),
        };
        let beta: Vec<f64> = (0..x.len())
            .map(|i| {
                let u = y[i].norm() / sigma[i];
                let base = (x1.scales()[i] / x0.scales()[i]).ln();
                if u > 0.0 {
                    base + shift_power * u.ln()
                } else {
                    base
                }
            })
            .collect();
        let a = |j: usize| {
            let space = req.couple.space(j);
            let moduli = (0..x.len()).map(|i| y[i].norm() * ((j as f64 - theta) * beta[i]).exp());
            space.dual_norm_of_moduli_unchecked(moduli)
        };
        let pairing: C64 = y.iter().zip(x).map(|(a, b)| a * b).sum();
        let denom = a(0).powf(1.0 - theta) * a(1).powf(theta);
        if denom > 0.0 && denom.is_finite() {
            best = best.max(pairing.norm() / denom);
        }
    }
    Ok(best)
}

/// `‖x‖_θ ≤ C ‖x‖_0^{1-θ} ‖x‖_1^θ`, measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub norm_theta: f64,
    pub bound: f64,
    /// `norm_theta / bound`, zero when both vanish.
    pub implied_c: f64,
}

pub fn interpolation_inequality_check(req: &InterpolationRequest, x: &[C64]) -> Result<InequalityReport> {
    let norm_theta = closed_form_norm(req, x)?;
    let n0 = req.couple.space0().norm(x)?;
    let n1 = req.couple.space1().norm(x)?;
    let bound = n0.powf(1.0 - req.theta) * n1.powf(req.theta);
    let implied_c = if bound > 0.0 { norm_theta / bound } else { 0.0 };
    Ok(InequalityReport { norm_theta, bound, implied_c })
}

/// K-functional split at `t` and the two constants
/// `‖x0‖_0 / (t^θ ‖x‖_θ)`, `‖x1‖_1 / (t^{θ-1} ‖x‖_θ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LionsPeetre {
    pub t: f64,
    pub decomposition: Decomposition,
    pub norm_theta: f64,
    pub constant0: f64,
    pub constant1: f64,
}

pub fn lions_peetre_decompose(req: &InterpolationRequest, x: &[C64], t: f64, tol: f64) -> Result<LionsPeetre> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter { name: "t", reason: format!("must be positive and finite, got {t}") });
    }
    let norm_theta = closed_form_norm(req, x)?;
    let (_, decomposition) = k_functional(&req.couple, x, t, tol)?;
    let (constant0, constant1) = if norm_theta > 0.0 {
        let n0 = req.couple.space0().norm(&decomposition.part0)?;
        let n1 = req.couple.space1().norm(&decomposition.part1)?;
        (n0 / (t.powf(req.theta) * norm_theta), n1 / (t.powf(req.theta - 1.0) * norm_theta))
    } else {
        (0.0, 0.0)
    };
    Ok(LionsPeetre { t, decomposition, norm_theta, constant0, constant1 })
}

/// A finite representation `x = Σ_k x_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RepresentationRepr", into = "RepresentationRepr")]
pub struct PeetreRepresentation {
    dim: usize,
    terms: Vec<(i64, Vec<C64>)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepresentationRepr {
    dim: usize,
    terms: Vec<(i64, Vec<[f64; 2]>)>,
}

impl TryFrom<RepresentationRepr> for PeetreRepresentation {
    type Error = Error;
    fn try_from(r: RepresentationRepr) -> Result<Self> {
        let terms =
            r.terms.into_iter().map(|(k, v)| (k, v.into_iter().map(|[re, im]| C64::new(re, im)).collect())).collect();
        PeetreRepresentation::new(r.dim, terms)
    }
}

impl From<PeetreRepresentation> for RepresentationRepr {
    fn from(p: PeetreRepresentation) -> Self {
        RepresentationRepr {
            dim: p.dim,
            terms: p.terms.into_iter().map(|(k, v)| (k, v.iter().map(|z| [z.re, z.im]).collect())).collect(),
        }
    }
}

impl PeetreRepresentation {
    /// Terms with equal `k` are merged.
    pub fn new(dim: usize, terms: Vec<(i64, Vec<C64>)>) -> Result<Self> {
        let mut merged: Vec<(i64, Vec<C64>)> = Vec::new();
        for (k, v) in terms {
            check_dim(dim, v.len())?;
            match merged.iter_mut().find(|(kk, _)| *kk == k) {
                Some((_, acc)) => acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b),
                None => merged.push((k, v)),
            }
        }
        merged.sort_by_key(|(k, _)| *k);
        Ok(PeetreRepresentation { dim, terms: merged })
    }

    /// The "dyadic-threshold" representation: coordinate `i` of `x` goes to
    /// the term `k_i = round(ln(s0_i / s1_i))` (clamped to `[-K, K]`), the
    /// index that balances `e^{-θk} s0_i` against `e^{(1-θ)k} s1_i`.
    pub fn dyadic(couple: &Couple, x: &[C64], max_index: i64) -> Result<Self> {
        check_dim(couple.dim(), x.len())?;
        let mut terms: Vec<(i64, Vec<C64>)> = Vec::new();
        for (i, xi) in x.iter().enumerate() {
            let k = (couple.space0().scales()[i] / couple.space1().scales()[i]).ln().round() as i64;
            let k = k.clamp(-max_index, max_index);
            let mut v = vec![C64::new(0.0, 0.0); x.len()];
            v[i] = *xi;
            terms.push((k, v));
        }
        Self::new(x.len(), terms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(i64, Vec<C64>)] {
        &self.terms
    }

    /// `Σ_k x_k`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.dim];
        for (_, v) in &self.terms {
            out.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
        out
    }
}

/// `(lower, upper)` for `sup_{|λ_k| ≤ 1} max_j ‖Σ_k λ_k e^{(j-θ)k} x_k‖_{X_j}`
/// for the given representation (no search over representations).
pub fn peetre_norm_bracket(
    req: &InterpolationRequest,
    rep: &PeetreRepresentation,
    phase_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_dim(req.dim(), rep.dim())?;
    let terms: Vec<(i64, &[C64])> = rep.terms.iter().map(|(k, v)| (*k, v.as_slice())).collect();
    let theta = req.theta;
    Ok(unconditional_bracket(&req.couple, &terms, |j, k| ((j as f64 - theta) * k as f64).exp(), phase_samples, seed))
}
