//! Matrix-valued Gabor frames on finite abelian groups.
//!
//! Signals are functions `G → C^{n×n}` on `G = Z_{N1} × … × Z_{Nd}`. The crate
//! builds Gabor systems `{E_{Cm} T_{Bk} Φ_l}`, computes ordinary and
//! operator-controlled frame bounds `α‖Θ*f‖² ≤ Σ‖⟨f, g⟩‖² ≤ β‖Θf‖²`, and checks
//! the hypotheses and predictions of the tight-frame and perturbation results.

pub mod bounds;
pub mod construct;
pub mod error;
pub mod frame;
pub mod group;
pub mod linalg;
pub mod operator;
pub mod perturb;
pub mod presets;
pub mod sampling;
pub mod scenario;
pub mod signal;

pub use bounds::{BoundsReport, PairCheck, Tolerances};
pub use error::{GofError, Result};
pub use frame::{CoefficientSequence, GaborSystem, SignalFamily, SystemIndex};
pub use group::{Automorphism, Element, FiniteAbelianGroup, MeasurePair, Subgroup, WeightConvention};
pub use linalg::{CMatrix, CVector};
pub use num_complex::Complex64;
pub use operator::{OperatorDiagnostics, SpaceOperator};
pub use signal::{MatrixSignal, SignalSpace};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
