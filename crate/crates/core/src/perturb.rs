//! Stability of (Θ,Θ*) frames under window perturbations and window sums.

use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundsReport, PairCheck, Tolerances};
use crate::error::{GofError, Result};
use crate::frame::SignalFamily;
use crate::linalg::{self, CMatrix};
use crate::operator::SpaceOperator;
use crate::signal::MatrixSignal;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PertParams {
    pub lambda: f64,
    pub mu: f64,
    pub eta: f64,
}

/// Where the source bounds fed into a prediction came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSource {
    Computed,
    Pinned,
}

/// `(γ, δ)` plus provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SourceBounds {
    pub gamma: f64,
    pub delta: f64,
    pub source: BoundSource,
}

fn source_bounds(report: &BoundsReport, pinned: Option<(f64, f64)>, what: &str) -> Result<SourceBounds> {
    if let Some((gamma, delta)) = pinned {
        return Ok(SourceBounds { gamma, delta, source: BoundSource::Pinned });
    }
    match (report.alpha_opt, report.beta_opt) {
        (Some(gamma), Some(delta)) if report.is_frame() => Ok(SourceBounds { gamma, delta, source: BoundSource::Computed }),
        _ => Err(GofError::HypothesisFailed(format!("{what} is not a (Θ,Θ*)-frame"))),
    }
}

/// `(1/2 − λ)γ − μ − η‖Θ‖²/m²` and `2((1 + λ + μ/γ)δ + η)`; the η-term is dropped when `η = 0`.
pub fn pert_predicted_bounds(p: PertParams, gamma: f64, delta: f64, theta_norm: f64, m_o: f64) -> (f64, f64) {
    let eta_term = if p.eta == 0.0 { 0.0 } else { p.eta * theta_norm * theta_norm / (m_o * m_o) };
    let lower = (0.5 - p.lambda) * gamma - p.mu - eta_term;
    let upper = 2.0 * ((1.0 + p.lambda + p.mu / gamma) * delta + p.eta);
    (lower, upper)
}

/// `(√γ1 − √δ2·‖Θ‖/m)²` and `2(δ1 + δ2)`.
pub fn sum_predicted_bounds(gamma1: f64, delta1: f64, delta2: f64, theta_norm: f64, m_o: f64) -> (f64, f64) {
    let root = gamma1.sqrt() - delta2.sqrt() * theta_norm / m_o;
    (root * root, 2.0 * (delta1 + delta2))
}

/// Predicted pair against the computed optimum of the target system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictionCheck {
    pub lower: f64,
    pub upper: f64,
    pub pair: PairCheck,
    /// `lower ≤ alpha_opt` (up to tolerance).
    pub lower_valid: bool,
    /// `upper ≥ beta_opt` (up to tolerance).
    pub upper_valid: bool,
}

fn predict(target: &BoundsReport, s: &CMatrix, theta: &CMatrix, lower: f64, upper: f64, tol: Tolerances) -> PredictionCheck {
    let pair = bounds::check_pair(s, theta, lower, upper, tol);
    let slack = tol.psd * upper.abs().max(1.0);
    let lower_valid = target.alpha_unbounded || target.alpha_opt.is_some_and(|a| lower <= a + slack);
    let upper_valid = target.beta_opt.is_some_and(|b| upper >= b - slack);
    PredictionCheck { lower, upper, pair, lower_valid, upper_valid }
}

#[derive(Clone, Debug, Serialize)]
pub struct PertCheck {
    pub params: PertParams,
    pub source: SourceBounds,
    pub theta_norm: f64,
    pub m_o: f64,
    /// `Θ*` bounded below.
    pub hypothesis_i: bool,
    /// `((1−2λ)γ − 2μ)/(2η)`, absent when `η = 0`.
    pub ratio: Option<f64>,
    /// `‖Θ‖²/m²`.
    pub ratio_threshold: f64,
    pub hypothesis_ii: bool,
    /// `λ_min(λS + μΘΘ* + ηΘ*Θ − D)` with `D` the difference frame operator.
    pub margin: f64,
    pub hypothesis_iii: bool,
    pub verdict: bool,
    /// Predicted lower bound is positive.
    pub applicable: bool,
    pub prediction: Option<PredictionCheck>,
    pub perturbed_bounds: BoundsReport,
    pub findings: Vec<String>,
}

/// Checks the perturbation hypotheses for `Φ → Φ̃` and the predicted bounds for `Φ̃`.
pub fn check_pert(
    source: &SignalFamily,
    perturbed: &SignalFamily,
    theta: &SpaceOperator,
    params: PertParams,
    pinned: Option<(f64, f64)>,
    tol: Tolerances,
) -> Result<PertCheck> {
    if params.lambda < 0.0 || params.mu < 0.0 || params.eta < 0.0 {
        return Err(GofError::HypothesisFailed("λ, μ, η must be nonnegative".into()));
    }
    source.space().ensure_same(theta.space())?;
    let td = theta.to_dense();
    let s = source.frame_operator().to_dense();
    let src = source_bounds(&bounds::pencil_bounds(&s, &td, tol), pinned, "source system")?;
    let theta_norm = theta.operator_norm();
    let m_o = theta.adjoint().lower_bound_constant();
    let hypothesis_i = m_o > tol.kernel * theta_norm.max(f64::MIN_POSITIVE);
    let ratio_threshold = if hypothesis_i { theta_norm * theta_norm / (m_o * m_o) } else { f64::INFINITY };
    let head = (1.0 - 2.0 * params.lambda) * src.gamma - 2.0 * params.mu;
    let (ratio, hypothesis_ii) = if params.eta == 0.0 {
        (None, head > 0.0)
    } else {
        let r = head / (2.0 * params.eta);
        (Some(r), r > ratio_threshold)
    };

    let diff = source.pairwise(perturbed, -1.0)?;
    let d = diff.frame_operator().to_dense();
    let c = |x: f64| num_complex::Complex64::new(x, 0.0);
    let rhs = &s * c(params.lambda) + &td * td.adjoint() * c(params.mu) + td.adjoint() * &td * c(params.eta);
    let margin = linalg::lambda_min(&(&rhs - &d));
    let scale = linalg::lambda_max(&rhs).abs().max(linalg::lambda_max(&d)).max(1.0);
    let hypothesis_iii = margin >= -tol.psd * scale;

    let sp = perturbed.frame_operator().to_dense();
    let perturbed_bounds = bounds::pencil_bounds(&sp, &td, tol);
    let verdict = hypothesis_i && hypothesis_ii && hypothesis_iii;
    let mut findings = Vec::new();
    let (applicable, prediction) = if hypothesis_i {
        let (lo, hi) = pert_predicted_bounds(params, src.gamma, src.delta, theta_norm, m_o);
        let check = predict(&perturbed_bounds, &sp, &td, lo, hi, tol);
        if verdict && lo > 0.0 {
            if !check.lower_valid {
                findings.push(format!(
                    "predicted lower bound {lo} exceeds the computed optimum {:?}",
                    perturbed_bounds.alpha_opt
                ));
            }
            if !check.upper_valid {
                findings.push(format!(
                    "predicted upper bound {hi} is below the computed optimum {:?}",
                    perturbed_bounds.beta_opt
                ));
            }
        }
        (lo > 0.0, Some(check))
    } else {
        (false, None)
    };
    Ok(PertCheck {
        params,
        source: src,
        theta_norm,
        m_o,
        hypothesis_i,
        ratio,
        ratio_threshold,
        hypothesis_ii,
        margin,
        hypothesis_iii,
        verdict,
        applicable,
        prediction,
        perturbed_bounds,
        findings,
    })
}

/// Both sides of the perturbation inequality evaluated on one signal.
pub fn pert_inequality_sides(
    source: &SignalFamily,
    perturbed: &SignalFamily,
    theta: &SpaceOperator,
    params: PertParams,
    f: &MatrixSignal,
) -> Result<(f64, f64)> {
    let diff = source.pairwise(perturbed, -1.0)?;
    let lhs = diff.frame_sum(f)?;
    let rhs = params.lambda * source.frame_sum(f)?
        + params.mu * theta.adjoint().apply(f)?.norm_sq()
        + params.eta * theta.apply(f)?.norm_sq();
    Ok((lhs, rhs))
}

#[derive(Clone, Debug, Serialize)]
pub struct SumCheck {
    pub phi: SourceBounds,
    pub psi: SourceBounds,
    pub theta_norm: f64,
    pub m_o: f64,
    pub hypothesis_i: bool,
    /// `√(γ1/δ2)`.
    pub condition_value: f64,
    /// `‖Θ‖/m`.
    pub condition_threshold: f64,
    pub verdict: bool,
    pub prediction: Option<PredictionCheck>,
    pub summed_bounds: BoundsReport,
    pub findings: Vec<String>,
}

/// Checks the window-sum theorem for `Φ + Ψ`.
pub fn check_sum(
    phi: &SignalFamily,
    psi: &SignalFamily,
    theta: &SpaceOperator,
    pinned_phi: Option<(f64, f64)>,
    pinned_psi: Option<(f64, f64)>,
    tol: Tolerances,
) -> Result<SumCheck> {
    phi.space().ensure_same(theta.space())?;
    let td = theta.to_dense();
    let phi_b = source_bounds(&bounds::family_theta_bounds(phi, theta, tol)?, pinned_phi, "Φ")?;
    let psi_report = bounds::family_theta_bounds(psi, theta, tol)?;
    let psi_b = match pinned_psi {
        Some(p) => SourceBounds { gamma: p.0, delta: p.1, source: BoundSource::Pinned },
        None => match (psi_report.upper_exists, psi_report.beta_opt) {
            (true, Some(d)) => SourceBounds { gamma: psi_report.alpha_opt.unwrap_or(0.0), delta: d, source: BoundSource::Computed },
            _ => return Err(GofError::HypothesisFailed("Ψ has no (Θ,Θ*) upper bound".into())),
        },
    };
    if !(psi_b.delta > tol.psd) {
        return Err(GofError::HypothesisFailed("Ψ needs a positive upper bound δ2".into()));
    }
    let theta_norm = theta.operator_norm();
    let m_o = theta.adjoint().lower_bound_constant();
    let hypothesis_i = m_o > tol.kernel * theta_norm.max(f64::MIN_POSITIVE);
    let condition_value = (phi_b.gamma / psi_b.delta).sqrt();
    let condition_threshold = if hypothesis_i { theta_norm / m_o } else { f64::INFINITY };
    let verdict = hypothesis_i && condition_value > condition_threshold;
    let summed = phi.pairwise(psi, 1.0)?;
    let ss = summed.frame_operator().to_dense();
    let summed_bounds = bounds::pencil_bounds(&ss, &td, tol);
    let mut findings = Vec::new();
    let prediction = hypothesis_i.then(|| {
        let (lo, hi) = sum_predicted_bounds(phi_b.gamma, phi_b.delta, psi_b.delta, theta_norm, m_o);
        predict(&summed_bounds, &ss, &td, lo, hi, tol)
    });
    if let (true, Some(p)) = (verdict, &prediction) {
        if !p.lower_valid || !p.upper_valid {
            findings.push(format!(
                "predicted interval ({}, {}) does not bracket the computed optimum ({:?}, {:?})",
                p.lower, p.upper, summed_bounds.alpha_opt, summed_bounds.beta_opt
            ));
        }
    }
    Ok(SumCheck {
        phi: phi_b,
        psi: psi_b,
        theta_norm,
        m_o,
        hypothesis_i,
        condition_value,
        condition_threshold,
        verdict,
        prediction,
        summed_bounds,
        findings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formulas() {
        let p = PertParams { lambda: 0.0, mu: 0.2, eta: 0.2 };
        let (lo, hi) = pert_predicted_bounds(p, 2.5, 10.0, 2.0, 1.0);
        assert!((lo - 0.25).abs() < 1e-12 && (hi - 22.0).abs() < 1e-12);
        let zero = PertParams { lambda: 0.0, mu: 0.0, eta: 0.0 };
        assert_eq!(pert_predicted_bounds(zero, 3.0, 5.0, 2.0, 1.0), (1.5, 10.0));
        let (lo, hi) = sum_predicted_bounds(2.5, 10.0, 0.4, 2.0, 1.0);
        assert!((lo - 0.1).abs() < 1e-12 && (hi - 20.8).abs() < 1e-12);
    }
}
