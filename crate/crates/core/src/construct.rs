//! Tight (Θ,Θ*) frames from scalar Parseval systems, operator images of
//! frames, and the synthesis-operator (Ω) characterisation of bounds.

use num_complex::Complex64;
use serde::Serialize;

use crate::bounds::{self, BoundsReport, PairCheck, Tolerances};
use crate::error::{GofError, Result};
use crate::frame::{CoefficientSequence, GaborSystem, SignalFamily};
use crate::group::{FiniteAbelianGroup, MeasurePair, Subgroup};
use crate::linalg::{self, CMatrix};
use crate::operator::{OperatorDiagnostics, SpaceOperator};
use crate::signal::{MatrixSignal, SignalSpace};

/// Critically sampled scalar system `{E_m T_k c·χ_V}` with `k ∈ Λ`, `m ∈ Λ⊥` and
/// `V` a transversal of `Λ`. The scale `c = (w_G |V|)^{-1/2}` makes it an
/// orthonormal basis, hence Parseval. `lattice = None` uses `Λ = G` (a delta window).
pub fn scalar_parseval_system(
    group: &FiniteAbelianGroup,
    measure: MeasurePair,
    lattice: Option<Subgroup>,
) -> Result<GaborSystem> {
    if group.order() < 2 {
        return Err(GofError::InvalidGroup("a Parseval system needs a nontrivial group".into()));
    }
    let space = SignalSpace::new(group.clone(), 1, measure)?;
    let lattice = lattice.unwrap_or_else(|| Subgroup::whole(group));
    if lattice.group() != group {
        return Err(GofError::GroupMismatch("lattice lives on another group".into()));
    }
    let reps: Vec<usize> = lattice.transversal().iter().map(|e| group.index_of(e)).collect();
    let scale = (measure.w_g * reps.len() as f64).sqrt().recip();
    let window = MatrixSignal::from_fn(&space, |x, _, _| {
        if reps.contains(&x) { Complex64::new(scale, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    let dual = lattice.annihilator();
    GaborSystem::standard(&space, vec![window], lattice, dual)
}

/// Windows `sqrt(λ)·φ_l·I_n` over the lattices of a scalar system.
pub fn diagonal_system(lambda: f64, scalar: &GaborSystem, n: usize) -> Result<GaborSystem> {
    if scalar.space().n() != 1 {
        return Err(GofError::ShapeMismatch("source system must be scalar".into()));
    }
    if !(lambda > 0.0) {
        return Err(GofError::HypothesisFailed(format!("tight bound must be positive, got {lambda}")));
    }
    let sp = SignalSpace::new(scalar.space().group().clone(), n, *scalar.space().measure())?;
    let root = lambda.sqrt();
    let windows = scalar
        .windows()
        .iter()
        .map(|phi| {
            MatrixSignal::from_fn(&sp, |x, i, j| {
                if i == j { phi.value(x, 0, 0) * root } else { Complex64::new(0.0, 0.0) }
            })
        })
        .collect();
    GaborSystem::new(&sp, windows, scalar.lattice().clone(), scalar.dual_lattice().clone(), scalar.b().clone(), scalar.c().clone())
}

#[derive(Clone, Debug, Serialize)]
pub struct TightConstruction {
    pub lambda: f64,
    /// Largest deviation of the scalar source from a Parseval frame operator.
    pub source_parseval_defect: f64,
    /// Largest deviation of the diagonal system's frame operator from `λI`.
    pub diagonal_tight_defect: f64,
    pub theta: OperatorDiagnostics,
    pub hypotheses_hold: bool,
    /// (Θ,Θ*) bounds of the diagonal system itself.
    pub diagonal_theta_bounds: BoundsReport,
    /// (Θ,Θ*) bounds of the image family `{Θ g}`.
    pub image_theta_bounds: BoundsReport,
    /// `(λ, λ)` checked against the image family.
    pub lambda_pair: PairCheck,
    #[serde(skip)]
    pub system: GaborSystem,
    #[serde(skip)]
    pub image: SignalFamily,
}

pub fn parseval_defect(system: &GaborSystem) -> f64 {
    let s = system.frame_operator().to_dense();
    let d = s.nrows();
    linalg::max_abs(&(s - CMatrix::identity(d, d)))
}

/// Builds the λ-tight diagonal system and its image under Θ, reporting both.
pub fn tight_theta_frame(
    lambda: f64,
    scalar: &GaborSystem,
    n: usize,
    theta: &SpaceOperator,
    tol: Tolerances,
) -> Result<TightConstruction> {
    let system = diagonal_system(lambda, scalar, n)?;
    system.space().ensure_same(theta.space())?;
    let s = system.frame_operator().to_dense();
    let d = s.nrows();
    let diagonal_tight_defect = linalg::max_abs(&(&s - CMatrix::identity(d, d) * Complex64::new(lambda, 0.0)));
    let diag = theta.diagnostics(tol.psd);
    let theta_dense = theta.to_dense();
    let diagonal_theta_bounds = bounds::pencil_bounds(&s, &theta_dense, tol);
    let image = system.family().image(theta)?;
    let si = image.frame_operator().to_dense();
    let image_theta_bounds = bounds::pencil_bounds(&si, &theta_dense, tol);
    let lambda_pair = bounds::check_pair(&si, &theta_dense, lambda, lambda, tol);
    Ok(TightConstruction {
        lambda,
        source_parseval_defect: parseval_defect(scalar),
        diagonal_tight_defect,
        hypotheses_hold: diag.is_hyponormal && diag.is_mv_adjointable,
        theta: diag,
        diagonal_theta_bounds,
        image_theta_bounds,
        lambda_pair,
        system,
        image,
    })
}

/// Image of a frame `{g}` with ordinary bounds `(γ, δ)` under an adjointable hyponormal Θ.
#[derive(Clone, Debug, Serialize)]
pub struct ImageCheck {
    pub source_bounds: BoundsReport,
    pub theta: OperatorDiagnostics,
    pub hypotheses_hold: bool,
    pub image_bounds: BoundsReport,
    /// Source `(γ, δ)` checked as (Θ,Θ*) bounds of the image.
    pub source_pair: Option<PairCheck>,
}

pub fn image_check(family: &SignalFamily, theta: &SpaceOperator, tol: Tolerances) -> Result<ImageCheck> {
    let source_bounds = bounds::family_ordinary_bounds(family, tol);
    let image = family.image(theta)?;
    let si = image.frame_operator().to_dense();
    let td = theta.to_dense();
    let image_bounds = bounds::pencil_bounds(&si, &td, tol);
    let source_pair = match (source_bounds.alpha_opt, source_bounds.beta_opt) {
        (Some(g), Some(d)) => Some(bounds::check_pair(&si, &td, g, d, tol)),
        _ => None,
    };
    let diag = theta.diagnostics(tol.psd);
    Ok(ImageCheck {
        source_bounds,
        hypotheses_hold: diag.is_hyponormal && diag.is_mv_adjointable,
        theta: diag,
        image_bounds,
        source_pair,
    })
}

/// `{Ξ g}` as a candidate (ΞΘ, (ΞΘ)*)-frame, given that `{g}` is a (Θ,Θ*)-frame.
#[derive(Clone, Debug, Serialize)]
pub struct CompositeImageCheck {
    pub source_theta_bounds: BoundsReport,
    pub xi: OperatorDiagnostics,
    /// `λ_min` of the self-commutator of Ξ compressed to `Ran(Θ)`.
    pub xi_range_commutator_min_eig: f64,
    pub xi_hyponormal_on_range: bool,
    /// `ΘΞ* = Ξ*Θ`.
    pub commutes: bool,
    pub hypotheses_hold: bool,
    pub composite_bounds: BoundsReport,
    pub source_pair: Option<PairCheck>,
}

pub fn composite_image_check(
    family: &SignalFamily,
    theta: &SpaceOperator,
    xi: &SpaceOperator,
    tol: Tolerances,
) -> Result<CompositeImageCheck> {
    let source_theta_bounds = bounds::family_theta_bounds(family, theta, tol)?;
    let xi_diag = xi.diagnostics(tol.psd);
    let range_eig = xi.compressed_self_commutator_min_eig(theta)?;
    let lhs = theta.compose(&xi.adjoint())?;
    let rhs = xi.adjoint().compose(theta)?;
    let commutes = lhs.max_abs_diff(&rhs)? <= tol.psd;
    let composite = xi.compose(theta)?;
    let image = family.image(xi)?;
    let si = image.frame_operator().to_dense();
    let cd = composite.to_dense();
    let composite_bounds = bounds::pencil_bounds(&si, &cd, tol);
    let source_pair = match (source_theta_bounds.alpha_opt, source_theta_bounds.beta_opt) {
        (Some(a), Some(b)) => Some(bounds::check_pair(&si, &cd, a, b, tol)),
        _ => None,
    };
    let on_range = range_eig >= -tol.psd;
    Ok(CompositeImageCheck {
        source_theta_bounds,
        hypotheses_hold: xi_diag.is_mv_adjointable && on_range && commutes,
        xi: xi_diag,
        xi_range_commutator_min_eig: range_eig,
        xi_hyponormal_on_range: on_range,
        commutes,
        composite_bounds,
        source_pair,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    /// `max ‖Ω χ_{j,p,q} − E_pq g_j‖` over the coefficient basis.
    pub basis_defect: f64,
    /// `max ‖Ω(I at j) − g_j‖`.
    pub element_defect: f64,
    pub condition_i: bool,
    /// `max |ΩΩ* − S|` with `S` assembled from the analysis matrix.
    pub frame_operator_defect: f64,
    /// Extremal `α, β` with `αΘΘ* ⪯ ΩΩ* ⪯ βΘ*Θ`.
    pub bounds: BoundsReport,
}

impl OmegaReport {
    pub fn lower_exists(&self) -> bool {
        self.bounds.lower_exists
    }

    pub fn upper_exists(&self) -> bool {
        self.bounds.upper_exists
    }
}

/// Builds Ω column by column from syntheses of the standard coefficient basis.
pub fn omega_characterization(family: &SignalFamily, theta: &SpaceOperator, tol: Tolerances) -> Result<OmegaReport> {
    family.space().ensure_same(theta.space())?;
    let n = family.space().n();
    let omega = family.synthesis_matrix()?;
    let mut basis_defect: f64 = 0.0;
    let mut element_defect: f64 = 0.0;
    for (j, g) in family.elements().iter().enumerate() {
        let gflat = g.flatten();
        let mut sum = crate::linalg::CVector::zeros(gflat.len());
        for p in 0..n {
            for q in 0..n {
                let mut unit = CMatrix::zeros(n, n);
                unit[(p, q)] = Complex64::new(1.0, 0.0);
                let expected = g.left_mul(&unit)?.flatten();
                let col = omega.column((j * n + p) * n + q);
                basis_defect = basis_defect.max(linalg::max_abs_iter((col - &expected).iter()));
                if p == q {
                    sum += col;
                }
            }
        }
        element_defect = element_defect.max(linalg::max_abs_iter((sum - gflat).iter()));
        // the identity coefficient through the synthesis path as well
        let mut coeffs = CoefficientSequence::zeros(n, family.len()).coeffs().to_vec();
        coeffs[j] = CMatrix::identity(n, n);
        let via = family.synthesis(&CoefficientSequence::new(n, coeffs)?)?;
        element_defect = element_defect.max(via.max_abs_diff(g));
    }
    let oo = &omega * omega.adjoint();
    let s = family.frame_operator().to_dense();
    let frame_operator_defect = linalg::max_abs(&(&oo - &s));
    let bounds = bounds::pencil_bounds(&oo, &theta.to_dense(), tol);
    Ok(OmegaReport {
        basis_defect,
        element_defect,
        condition_i: basis_defect <= 1e-12 && element_defect <= 1e-12,
        frame_operator_defect,
        bounds,
    })
}
