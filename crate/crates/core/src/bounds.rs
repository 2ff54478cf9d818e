//! Ordinary and (Θ,Θ*) frame bounds from a frame operator.
//!
//! The optimal constants are the extremal feasible values of
//! `S − αΘΘ* ⪰ 0` and `βΘ*Θ − S ⪰ 0`. Both are found by bisection on the
//! smallest eigenvalue of the pencil, restricted to the subspace where the
//! problem is non-degenerate, and cross-checked against a closed-form
//! eigenvalue of the compressed problem.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::frame::SignalFamily;
use crate::linalg::{self, CMatrix};
use crate::operator::SpaceOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Slack for PSD flags and bound-validity margins.
    pub psd: f64,
    /// Relative threshold separating kernel from range (`σ ≤ kernel·σ_max`).
    pub kernel: f64,
    /// Relative width at which bisection stops.
    pub bisection: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { psd: 1e-9, kernel: 1e-9, bisection: 1e-13 }
    }
}

impl Tolerances {
    pub fn with_psd(psd: f64) -> Self {
        Self { psd, kernel: psd, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub lower_exists: bool,
    pub upper_exists: bool,
    pub alpha_opt: Option<f64>,
    pub beta_opt: Option<f64>,
    /// Closed-form counterpart of `alpha_opt`.
    pub alpha_oracle: Option<f64>,
    /// Closed-form counterpart of `beta_opt`.
    pub beta_oracle: Option<f64>,
    /// `Θ* = 0` on every direction, so any α works.
    pub alpha_unbounded: bool,
    pub tight: bool,
    /// Eigenvalues of the frame operator, ascending.
    pub spectrum: Vec<f64>,
    /// Singular values of Θ, descending (empty for ordinary bounds).
    pub theta_singular_values: Vec<f64>,
    pub tolerances: Tolerances,
}

impl BoundsReport {
    /// Both bounds exist with a finite positive lower constant.
    pub fn is_frame(&self) -> bool {
        self.lower_exists && self.upper_exists
    }
}

/// Validity of a user-supplied pair against the pencil.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCheck {
    pub alpha: f64,
    pub beta: f64,
    /// `λ_min(S − αΘΘ*)`.
    pub lower_margin: f64,
    /// `λ_min(βΘ*Θ − S)`.
    pub upper_margin: f64,
    pub lower_valid: bool,
    pub upper_valid: bool,
}

impl PairCheck {
    pub fn valid(&self) -> bool {
        self.lower_valid && self.upper_valid
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn diag(values: &[f64]) -> CMatrix {
    let mut m = CMatrix::zeros(values.len(), values.len());
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v);
    }
    m
}

fn tight_flag(alpha: Option<f64>, beta: Option<f64>, tol: f64) -> bool {
    match (alpha, beta) {
        (Some(a), Some(b)) => (a - b).abs() <= tol * b.abs().max(1.0) && b > 0.0,
        _ => false,
    }
}

/// `α = λ_min(S)`, `β = λ_max(S)`; a frame iff `λ_min > kernel·λ_max`.
pub fn ordinary_bounds(s: &CMatrix, tol: Tolerances) -> BoundsReport {
    let spectrum = linalg::eigenvalues(s);
    let lo = spectrum.first().copied().unwrap_or(0.0);
    let hi = spectrum.last().copied().unwrap_or(0.0).max(0.0);
    let lower_exists = hi > 0.0 && lo > tol.kernel * hi;
    let alpha = lower_exists.then_some(lo);
    let beta = Some(hi);
    BoundsReport {
        lower_exists,
        upper_exists: true,
        alpha_opt: alpha,
        beta_opt: beta,
        alpha_oracle: alpha,
        beta_oracle: beta,
        alpha_unbounded: false,
        tight: tight_flag(alpha, beta, tol.psd),
        spectrum,
        theta_singular_values: Vec::new(),
        tolerances: tol,
    }
}

/// Largest `t` in `[lo, hi]` with `feasible(t)`, given `feasible(lo)` and `!feasible(hi)`.
fn bisect_last_feasible(mut lo: f64, mut hi: f64, rel: f64, feasible: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..400 {
        if hi - lo <= rel * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Optimal `(α, β)` for `α‖Θ*f‖² ≤ ⟨Sf, f⟩ ≤ β‖Θf‖²`.
pub fn pencil_bounds(s: &CMatrix, theta: &CMatrix, tol: Tolerances) -> BoundsReport {
    let s = linalg::hermitian_part(s);
    let seig = linalg::hermitian_eigen(&s);
    let smax = seig.values.last().copied().unwrap_or(0.0).max(0.0);
    let svd = linalg::svd(theta);
    let tmax = svd.values.first().copied().unwrap_or(0.0);
    let tthr = tol.kernel * tmax;
    // eigenvalue noise floor of the pencils below
    let noise = 64.0 * f64::EPSILON * (smax + 1.0);

    // upper side: ker Θ ⊆ ker S, then β* on the complement
    let range: Vec<usize> = (0..svd.values.len()).filter(|&k| tmax > 0.0 && svd.values[k] > tthr).collect();
    let kernel: Vec<usize> = (0..svd.values.len()).filter(|k| !range.contains(k)).collect();
    let upper_exists = if kernel.is_empty() {
        true
    } else {
        let k = linalg::select_columns(&svd.v, &kernel);
        linalg::lambda_max(&(k.adjoint() * &s * &k)) <= tol.kernel * smax
    };
    let (beta_opt, beta_oracle) = if !upper_exists {
        (None, None)
    } else if range.is_empty() {
        (Some(0.0), Some(0.0))
    } else {
        let q = linalg::select_columns(&svd.v, &range);
        let sigma: Vec<f64> = range.iter().map(|&k| svd.values[k]).collect();
        let sr = q.adjoint() * &s * &q;
        let d2 = diag(&sigma.iter().map(|v| v * v).collect::<Vec<_>>());
        let dinv = diag(&sigma.iter().map(|v| v.recip()).collect::<Vec<_>>());
        let oracle = linalg::lambda_max(&(&dinv * &sr * &dinv)).max(0.0);
        let top = linalg::lambda_max(&sr).max(0.0);
        let smin_t = sigma.last().copied().unwrap_or(1.0);
        let hi = top / (smin_t * smin_t) * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        let feasible = |b: f64| linalg::lambda_min(&(&d2 * c(b) - &sr)) >= -noise;
        // β* is the first feasible value, i.e. the right end of the infeasible bracket
        let beta = if top <= noise {
            0.0
        } else {
            bisect_last_feasible(0.0, hi, tol.bisection, |b| !feasible(b)).1
        };
        (Some(beta), Some(oracle))
    };

    // lower side: ker S ⊆ ker Θ*, then α* on Ran S
    let r = theta * theta.adjoint();
    let sthr = tol.kernel * smax;
    let null: Vec<usize> = (0..seig.values.len()).filter(|&k| smax <= 0.0 || seig.values[k] <= sthr).collect();
    let live: Vec<usize> = (0..seig.values.len()).filter(|k| !null.contains(k)).collect();
    let lower_exists = if null.is_empty() {
        true
    } else {
        let z = linalg::select_columns(&seig.vectors, &null);
        linalg::lambda_max(&(z.adjoint() * &r * &z)) <= tol.kernel * tmax * tmax
    };
    let mut alpha_unbounded = false;
    let (alpha_opt, alpha_oracle) = if !lower_exists {
        (None, None)
    } else {
        let u = linalg::select_columns(&seig.vectors, &live);
        let lam: Vec<f64> = live.iter().map(|&k| seig.values[k]).collect();
        let rr = u.adjoint() * &r * &u;
        let rtop = linalg::lambda_max(&rr);
        if live.is_empty() || rtop <= tol.kernel * tmax * tmax {
            alpha_unbounded = true;
            (None, None)
        } else {
            let sr = diag(&lam);
            let isqrt = diag(&lam.iter().map(|v| v.sqrt().recip()).collect::<Vec<_>>());
            let oracle = 1.0 / linalg::lambda_max(&(&isqrt * &rr * &isqrt));
            let hi = 2.0 * lam.last().copied().unwrap_or(0.0) / rtop;
            let feasible = |a: f64| linalg::lambda_min(&(&sr - &rr * c(a))) >= -noise;
            let (alpha, _) = bisect_last_feasible(0.0, hi, tol.bisection, feasible);
            (Some(alpha), Some(oracle))
        }
    };

    let lower_exists = lower_exists && (alpha_opt.is_some_and(|a| a > 0.0) || alpha_unbounded);
    BoundsReport {
        lower_exists,
        upper_exists,
        tight: tight_flag(alpha_opt, beta_opt, tol.psd),
        alpha_opt,
        beta_opt,
        alpha_oracle,
        beta_oracle,
        alpha_unbounded,
        spectrum: seig.values,
        theta_singular_values: svd.values,
        tolerances: tol,
    }
}

/// Checks `αΘΘ* ⪯ S ⪯ βΘ*Θ` for a given pair.
pub fn check_pair(s: &CMatrix, theta: &CMatrix, alpha: f64, beta: f64, tol: Tolerances) -> PairCheck {
    let r = theta * theta.adjoint();
    let p = theta.adjoint() * theta;
    let scale = linalg::lambda_max(s).abs().max(alpha.abs() * linalg::lambda_max(&r)).max(beta.abs() * linalg::lambda_max(&p)).max(1.0);
    let lower_margin = linalg::lambda_min(&(s - &r * c(alpha)));
    let upper_margin = linalg::lambda_min(&(&p * c(beta) - s));
    PairCheck {
        alpha,
        beta,
        lower_margin,
        upper_margin,
        lower_valid: lower_margin >= -tol.psd * scale,
        upper_valid: upper_margin >= -tol.psd * scale,
    }
}

/// Ordinary bounds of a family.
pub fn family_ordinary_bounds(family: &SignalFamily, tol: Tolerances) -> BoundsReport {
    ordinary_bounds(&family.frame_operator().to_dense(), tol)
}

/// (Θ,Θ*) bounds of a family.
pub fn family_theta_bounds(family: &SignalFamily, theta: &SpaceOperator, tol: Tolerances) -> Result<BoundsReport> {
    family.space().ensure_same(theta.space())?;
    Ok(pencil_bounds(&family.frame_operator().to_dense(), &theta.to_dense(), tol))
}

/// Outcome of promoting an ordinary frame to a (Θ,Θ*) frame through a bounded-below Θ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Promotion {
    pub gamma: f64,
    pub delta: f64,
    pub theta_norm: f64,
    pub theta_lower_bound: f64,
    pub hypothesis_holds: bool,
    pub predicted_alpha: Option<f64>,
    pub predicted_beta: Option<f64>,
    /// Predicted pair checked against the pencil.
    pub check: Option<PairCheck>,
    /// Predicted α ≤ optimal α and predicted β ≥ optimal β.
    pub consistent_with_optimal: Option<bool>,
}

/// Predicts `(γ/‖Θ*‖², δ/σ_min(Θ)²)` from the ordinary bounds `(γ, δ)`.
pub fn bounded_below_promotion(s: &CMatrix, theta: &CMatrix, tol: Tolerances) -> Promotion {
    let ord = ordinary_bounds(s, tol);
    let sv = linalg::singular_values(theta);
    let tnorm = sv.first().copied().unwrap_or(0.0);
    let tmin = sv.last().copied().unwrap_or(0.0);
    let gamma = ord.alpha_opt.unwrap_or(0.0);
    let delta = ord.beta_opt.unwrap_or(0.0);
    let holds = ord.lower_exists && tmin > tol.kernel * tnorm.max(f64::MIN_POSITIVE) && tnorm > 0.0;
    if !holds {
        return Promotion {
            gamma,
            delta,
            theta_norm: tnorm,
            theta_lower_bound: tmin,
            hypothesis_holds: false,
            predicted_alpha: None,
            predicted_beta: None,
            check: None,
            consistent_with_optimal: None,
        };
    }
    let pa = gamma / (tnorm * tnorm);
    let pb = delta / (tmin * tmin);
    let check = check_pair(s, theta, pa, pb, tol);
    let opt = pencil_bounds(s, theta, tol);
    let slack = tol.psd * pb.max(1.0);
    let consistent = match (opt.alpha_opt, opt.beta_opt) {
        (Some(a), Some(b)) => pa <= a + slack && pb >= b - slack,
        _ => false,
    };
    Promotion {
        gamma,
        delta,
        theta_norm: tnorm,
        theta_lower_bound: tmin,
        hypothesis_holds: true,
        predicted_alpha: Some(pa),
        predicted_beta: Some(pb),
        check: Some(check),
        consistent_with_optimal: Some(consistent),
    }
}
