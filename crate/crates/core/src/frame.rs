//! Matrix-valued Gabor systems and generic finite signal families.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GofError, Result};
use crate::group::{Automorphism, Subgroup};
use crate::linalg::{CMatrix, CVector};
use crate::operator::SpaceOperator;
use crate::signal::{MatrixSignal, SignalSpace};

/// Position of an element inside a Gabor system: window, translation, modulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SystemIndex {
    pub l: usize,
    pub k: usize,
    pub m: usize,
}

/// `{M_j}` indexed like the family that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSequence {
    n: usize,
    coeffs: Vec<CMatrix>,
}

impl CoefficientSequence {
    pub fn new(n: usize, coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.iter().any(|c| c.shape() != (n, n)) {
            return Err(GofError::ShapeMismatch(format!("coefficients must all be {n}x{n}")));
        }
        Ok(Self { n, coeffs })
    }

    pub fn zeros(n: usize, len: usize) -> Self {
        Self { n, coeffs: vec![CMatrix::zeros(n, n); len] }
    }

    /// The standard basis element carrying the matrix unit `E_pq` at position `j`.
    pub fn unit(n: usize, len: usize, j: usize, p: usize, q: usize) -> Self {
        let mut s = Self::zeros(n, len);
        s.coeffs[j][(p, q)] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_squared()).sum()
    }

    /// `Σ_j tr(M_j N_j*)`.
    pub fn inner(&self, other: &CoefficientSequence) -> Result<Complex64> {
        if self.n != other.n || self.len() != other.len() {
            return Err(GofError::ShapeMismatch("coefficient index sets differ".into()));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.dotc(b).conj()).sum())
    }
}

/// A finite family `{g_j}` of matrix signals in one space.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalFamily {
    space: SignalSpace,
    elements: Vec<MatrixSignal>,
}

impl SignalFamily {
    pub fn new(space: &SignalSpace, elements: Vec<MatrixSignal>) -> Result<Self> {
        for e in &elements {
            space.ensure_same(e.space())?;
        }
        Ok(Self { space: space.clone(), elements })
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn elements(&self) -> &[MatrixSignal] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `M_j = ⟨f, g_j⟩`.
    pub fn analysis(&self, f: &MatrixSignal) -> Result<CoefficientSequence> {
        self.space.ensure_same(f.space())?;
        let coeffs = self.elements.iter().map(|g| f.mv_inner(g)).collect::<Result<Vec<_>>>()?;
        CoefficientSequence::new(self.space.n(), coeffs)
    }

    /// `Σ_j M_j g_j`, skipping zero coefficients.
    pub fn synthesis(&self, c: &CoefficientSequence) -> Result<MatrixSignal> {
        if c.n() != self.space.n() || c.len() != self.len() {
            return Err(GofError::ShapeMismatch(format!(
                "expected {} coefficients of size {}",
                self.len(),
                self.space.n()
            )));
        }
        let mut acc = vec![Complex64::new(0.0, 0.0); self.space.dim()];
        for (m, g) in c.coeffs().iter().zip(&self.elements) {
            if m.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                continue;
            }
            g.accumulate_left_mul(m, &mut acc);
        }
        MatrixSignal::from_data(&self.space, acc)
    }

    /// `Σ_j ‖⟨f, g_j⟩‖²_F`.
    pub fn frame_sum(&self, f: &MatrixSignal) -> Result<f64> {
        Ok(self.analysis(f)?.norm_sq())
    }

    /// Flattened analysis matrix: rows `(j, p, q)`, columns `(x, p', r)`,
    /// entry `δ_{pp'} sqrt(w_G) conj(g_j(x)_{qr})`.
    pub fn analysis_matrix(&self) -> CMatrix {
        let n = self.space.n();
        let order = self.space.group().order();
        let s = self.space.measure().w_g.sqrt();
        let mut a = CMatrix::zeros(self.len() * n * n, self.space.dim());
        for (j, g) in self.elements.iter().enumerate() {
            for x in 0..order {
                for q in 0..n {
                    for r in 0..n {
                        let v = g.value(x, q, r).conj() * s;
                        if v == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for p in 0..n {
                            a[((j * n + p) * n + q, (x * n + p) * n + r)] = v;
                        }
                    }
                }
            }
        }
        a
    }

    /// Frame operator `S = A*A`, dense and Hermitian.
    pub fn frame_operator(&self) -> SpaceOperator {
        let a = self.analysis_matrix();
        let s = crate::linalg::hermitian_part(&(a.adjoint() * a));
        SpaceOperator::dense(&self.space, s).expect("frame operator has the space dimension")
    }

    /// `Ω`: columns are flattened syntheses of the standard coefficient basis `χ_{j,p,q}`.
    pub fn synthesis_matrix(&self) -> Result<CMatrix> {
        let n = self.space.n();
        let cols = self.len() * n * n;
        let mut omega = CMatrix::zeros(self.space.dim(), cols);
        for j in 0..self.len() {
            for p in 0..n {
                for q in 0..n {
                    let chi = CoefficientSequence::unit(n, self.len(), j, p, q);
                    let col = self.synthesis(&chi)?.flatten();
                    omega.set_column((j * n + p) * n + q, &col);
                }
            }
        }
        Ok(omega)
    }

    /// `{Θ g_j}`.
    pub fn image(&self, theta: &SpaceOperator) -> Result<SignalFamily> {
        self.space.ensure_same(theta.space())?;
        let elements = self.elements.iter().map(|g| theta.apply(g)).collect::<Result<Vec<_>>>()?;
        SignalFamily::new(&self.space, elements)
    }

    /// `{g_j + h_j}` for families of equal length.
    pub fn pairwise(&self, other: &SignalFamily, sign: f64) -> Result<SignalFamily> {
        if self.len() != other.len() {
            return Err(GofError::ShapeMismatch("families have different lengths".into()));
        }
        let c = Complex64::new(sign, 0.0);
        let elements = self
            .elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.add(&b.scale(c)))
            .collect::<Result<Vec<_>>>()?;
        SignalFamily::new(&self.space, elements)
    }

    /// Flattened elements as columns, used by sampling-based cross-checks.
    pub fn columns(&self) -> Vec<CVector> {
        self.elements.iter().map(|g| g.flatten()).collect()
    }
}

/// `{E_{Cm} T_{Bk} Φ_l}` over windows `Φ_l`, `k ∈ Λ ≤ G`, `m ∈ Λ′ ≤ Ĝ`.
#[derive(Clone, Debug)]
pub struct GaborSystem {
    space: SignalSpace,
    windows: Vec<MatrixSignal>,
    lattice: Subgroup,
    dual_lattice: Subgroup,
    b: Automorphism,
    c: Automorphism,
    indices: Vec<SystemIndex>,
    family: SignalFamily,
}

impl GaborSystem {
    pub fn new(
        space: &SignalSpace,
        windows: Vec<MatrixSignal>,
        lattice: Subgroup,
        dual_lattice: Subgroup,
        b: Automorphism,
        c: Automorphism,
    ) -> Result<Self> {
        let g = space.group();
        for (what, other) in [
            ("lattice", lattice.group()),
            ("dual lattice", dual_lattice.group()),
            ("B", b.group()),
            ("C", c.group()),
        ] {
            if other != g {
                return Err(GofError::GroupMismatch(format!("{what} lives on Z{:?}", other.factors())));
            }
        }
        for w in &windows {
            space.ensure_same(w.space())?;
        }
        let mut indices = Vec::new();
        let mut elements = Vec::new();
        for (l, w) in windows.iter().enumerate() {
            for (k, &lam) in lattice.member_indices().iter().enumerate() {
                let shifted = w.translate_idx(b.apply_idx(lam));
                for (m, &eta) in dual_lattice.member_indices().iter().enumerate() {
                    elements.push(shifted.modulate_idx(c.apply_idx(eta)));
                    indices.push(SystemIndex { l, k, m });
                }
            }
        }
        let family = SignalFamily::new(space, elements)?;
        Ok(Self { space: space.clone(), windows, lattice, dual_lattice, b, c, indices, family })
    }

    /// Identity automorphisms on both sides.
    pub fn standard(space: &SignalSpace, windows: Vec<MatrixSignal>, lattice: Subgroup, dual_lattice: Subgroup) -> Result<Self> {
        let b = Automorphism::identity(space.group());
        let c = b.clone();
        Self::new(space, windows, lattice, dual_lattice, b, c)
    }

    /// Same lattices and automorphisms with new windows.
    pub fn with_windows(&self, windows: Vec<MatrixSignal>) -> Result<Self> {
        Self::new(&self.space, windows, self.lattice.clone(), self.dual_lattice.clone(), self.b.clone(), self.c.clone())
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn windows(&self) -> &[MatrixSignal] {
        &self.windows
    }

    pub fn lattice(&self) -> &Subgroup {
        &self.lattice
    }

    pub fn dual_lattice(&self) -> &Subgroup {
        &self.dual_lattice
    }

    pub fn b(&self) -> &Automorphism {
        &self.b
    }

    pub fn c(&self) -> &Automorphism {
        &self.c
    }

    /// Element labels in `(l, k, m)` lexicographic order.
    pub fn indices(&self) -> &[SystemIndex] {
        &self.indices
    }

    pub fn family(&self) -> &SignalFamily {
        &self.family
    }

    pub fn analysis(&self, f: &MatrixSignal) -> Result<CoefficientSequence> {
        self.family.analysis(f)
    }

    pub fn synthesis(&self, c: &CoefficientSequence) -> Result<MatrixSignal> {
        self.family.synthesis(c)
    }

    pub fn frame_operator(&self) -> SpaceOperator {
        self.family.frame_operator()
    }
}
