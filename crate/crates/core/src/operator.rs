//! Linear operators on `L²(G, C^{n×n})`.
//!
//! An [`SpaceOperator`] is either a pointwise entry map `L` acting on the
//! row-major vectorisation of `f(x)` at every `x`, or a dense matrix on the
//! flattened space. Because flattening scales every coordinate by the same
//! factor `sqrt(w_G)`, the dense matrix is the same in raw and flattened
//! coordinates and the trace-inner-product adjoint is the conjugate transpose.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GofError, Result};
use crate::linalg::{self, CMatrix};
use crate::signal::{MatrixSignal, SignalSpace};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum OperatorRepr {
    /// `n² × n²`, applied to `vec(f(x))` at every point.
    EntryMap(CMatrix),
    /// `|G|n² × |G|n²` on the flattened space.
    Dense(CMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpaceOperator {
    space: SignalSpace,
    repr: OperatorRepr,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorDiagnostics {
    pub operator_norm: f64,
    pub lower_bound: f64,
    pub is_hyponormal: bool,
    pub self_commutator_min_eig: f64,
    pub is_normal: bool,
    pub is_mv_adjointable: bool,
    pub mv_adjoint_defect: f64,
    pub tol: f64,
}

impl SpaceOperator {
    pub fn entry_map(space: &SignalSpace, l: CMatrix) -> Result<Self> {
        let nn = space.n() * space.n();
        if l.shape() != (nn, nn) {
            return Err(GofError::ShapeMismatch(format!("entry map is {:?}, expected ({nn}, {nn})", l.shape())));
        }
        Ok(Self { space: space.clone(), repr: OperatorRepr::EntryMap(l) })
    }

    pub fn dense(space: &SignalSpace, m: CMatrix) -> Result<Self> {
        let d = space.dim();
        if m.shape() != (d, d) {
            return Err(GofError::ShapeMismatch(format!("dense operator is {:?}, expected ({d}, {d})", m.shape())));
        }
        Ok(Self { space: space.clone(), repr: OperatorRepr::Dense(m) })
    }

    /// Entry map induced by a linear map on `n×n` matrices, sampled on matrix units.
    pub fn from_matrix_map(space: &SignalSpace, map: impl Fn(&CMatrix) -> CMatrix) -> Result<Self> {
        let n = space.n();
        let nn = n * n;
        let mut l = CMatrix::zeros(nn, nn);
        for col in 0..nn {
            let mut unit = CMatrix::zeros(n, n);
            unit[(col / n, col % n)] = Complex64::new(1.0, 0.0);
            let img = map(&unit);
            if img.shape() != (n, n) {
                return Err(GofError::ShapeMismatch("matrix map changed the shape".into()));
            }
            for row in 0..nn {
                l[(row, col)] = img[(row / n, row % n)];
            }
        }
        Self::entry_map(space, l)
    }

    /// `f ↦ f A`, the general shape of an operator adjointable for the matrix-valued inner product.
    pub fn right_multiplication(space: &SignalSpace, a: &CMatrix) -> Result<Self> {
        let n = space.n();
        if a.shape() != (n, n) {
            return Err(GofError::ShapeMismatch(format!("right factor is {:?}, expected ({n}, {n})", a.shape())));
        }
        Self::from_matrix_map(space, |m| m * a)
    }

    pub fn identity(space: &SignalSpace) -> Self {
        let nn = space.n() * space.n();
        Self { space: space.clone(), repr: OperatorRepr::EntryMap(CMatrix::identity(nn, nn)) }
    }

    pub fn scalar(space: &SignalSpace, c: Complex64) -> Self {
        let nn = space.n() * space.n();
        Self { space: space.clone(), repr: OperatorRepr::EntryMap(CMatrix::identity(nn, nn) * c) }
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn repr(&self) -> &OperatorRepr {
        &self.repr
    }

    pub fn is_entry_map(&self) -> bool {
        matches!(self.repr, OperatorRepr::EntryMap(_))
    }

    /// Dense matrix on the flattened space.
    pub fn to_dense(&self) -> CMatrix {
        match &self.repr {
            OperatorRepr::EntryMap(l) => linalg::block_diagonal(l, self.space.group().order()),
            OperatorRepr::Dense(m) => m.clone(),
        }
    }

    pub fn to_dense_operator(&self) -> Self {
        Self { space: self.space.clone(), repr: OperatorRepr::Dense(self.to_dense()) }
    }

    pub fn apply(&self, f: &MatrixSignal) -> Result<MatrixSignal> {
        self.space.ensure_same(f.space())?;
        let data = f.data();
        let out: Vec<Complex64> = match &self.repr {
            OperatorRepr::EntryMap(l) => {
                let nn = l.nrows();
                let mut out = Vec::with_capacity(data.len());
                for chunk in data.chunks(nn) {
                    for r in 0..nn {
                        out.push((0..nn).map(|c| l[(r, c)] * chunk[c]).sum());
                    }
                }
                out
            }
            OperatorRepr::Dense(m) => {
                let v = crate::linalg::CVector::from_column_slice(data);
                (m * v).iter().copied().collect()
            }
        };
        MatrixSignal::from_data(&self.space, out)
    }

    pub fn adjoint(&self) -> Self {
        let repr = match &self.repr {
            OperatorRepr::EntryMap(l) => OperatorRepr::EntryMap(l.adjoint()),
            OperatorRepr::Dense(m) => OperatorRepr::Dense(m.adjoint()),
        };
        Self { space: self.space.clone(), repr }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SpaceOperator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        let repr = match (&self.repr, &other.repr) {
            (OperatorRepr::EntryMap(a), OperatorRepr::EntryMap(b)) => OperatorRepr::EntryMap(a * b),
            _ => OperatorRepr::Dense(self.to_dense() * other.to_dense()),
        };
        Ok(Self { space: self.space.clone(), repr })
    }

    pub fn sub(&self, other: &SpaceOperator) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        let repr = match (&self.repr, &other.repr) {
            (OperatorRepr::EntryMap(a), OperatorRepr::EntryMap(b)) => OperatorRepr::EntryMap(a - b),
            _ => OperatorRepr::Dense(self.to_dense() - other.to_dense()),
        };
        Ok(Self { space: self.space.clone(), repr })
    }

    /// Smallest representation for spectral work: the `n²×n²` block suffices for an entry map.
    fn spectral_matrix(&self) -> CMatrix {
        match &self.repr {
            OperatorRepr::EntryMap(l) => l.clone(),
            OperatorRepr::Dense(m) => m.clone(),
        }
    }

    /// Singular values of the flattened operator, descending (distinct values only for entry maps).
    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.spectral_matrix())
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    /// Largest `m` with `‖Θf‖ ≥ m‖f‖`.
    pub fn lower_bound_constant(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }

    /// `λ_min(Θ*Θ − ΘΘ*)`.
    pub fn self_commutator_min_eig(&self) -> f64 {
        let m = self.spectral_matrix();
        linalg::lambda_min(&(m.adjoint() * &m - &m * m.adjoint()))
    }

    pub fn is_hyponormal(&self, tol: f64) -> bool {
        self.self_commutator_min_eig() >= -tol
    }

    /// `‖Θ*Θ − ΘΘ*‖_max ≤ tol`, checked independently of the PSD test.
    pub fn is_normal(&self, tol: f64) -> bool {
        let m = self.spectral_matrix();
        linalg::max_abs(&(m.adjoint() * &m - &m * m.adjoint())) <= tol
    }

    pub fn commutes(&self, other: &SpaceOperator, tol: f64) -> Result<bool> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        Ok(linalg::max_abs(&ab.sub(&ba)?.spectral_matrix()) <= tol)
    }

    /// Largest discrepancy of `⟨Θe_a, e_b⟩ = ⟨e_a, Θ*e_b⟩` over basis pairs, relative to `max|Θ|`.
    ///
    /// For a basis pair `a = (y_a, i_a, j_a)`, `b = (y_b, i_b, j_b)` the left side
    /// only has column `i_b` populated, with entries `Θ[(y_b, p, j_b), a]`, and the
    /// right side only row `i_a`, with entries `Θ[b, (y_a, q, j_a)]` (common factor
    /// `w_G` dropped). An entry map never couples distinct points, so one point suffices.
    pub fn mv_adjoint_defect(&self) -> f64 {
        let n = self.space.n();
        let m = self.spectral_matrix();
        let d = m.nrows();
        let scale = linalg::max_abs(&m).max(f64::MIN_POSITIVE);
        let nn = n * n;
        let split = |k: usize| (k / nn, (k % nn) / n, k % n);
        let mut worst: f64 = 0.0;
        for a in 0..d {
            let (ya, ia, ja) = split(a);
            for b in 0..d {
                let (yb, ib, jb) = split(b);
                for p in 0..n {
                    for q in 0..n {
                        let lhs = if q == ib { m[((yb * n + p) * n + jb, a)] } else { Complex64::new(0.0, 0.0) };
                        let rhs = if p == ia { m[(b, (ya * n + q) * n + ja)] } else { Complex64::new(0.0, 0.0) };
                        worst = worst.max((lhs - rhs).norm());
                    }
                }
            }
        }
        worst / scale
    }

    pub fn is_mv_adjointable(&self, tol: f64) -> bool {
        self.mv_adjoint_defect() <= tol
    }

    pub fn diagnostics(&self, tol: f64) -> OperatorDiagnostics {
        let s = self.singular_values();
        let defect = self.mv_adjoint_defect();
        let comm = self.self_commutator_min_eig();
        OperatorDiagnostics {
            operator_norm: s.first().copied().unwrap_or(0.0),
            lower_bound: s.last().copied().unwrap_or(0.0),
            is_hyponormal: comm >= -tol,
            self_commutator_min_eig: comm,
            is_normal: self.is_normal(tol),
            is_mv_adjointable: defect <= tol,
            mv_adjoint_defect: defect,
            tol,
        }
    }

    /// `λ_min(P(Ξ*Ξ − ΞΞ*)P)` on `Ran(Θ)`, reading "Ξ hyponormal on Ran(Θ)" as a compression.
    pub fn compressed_self_commutator_min_eig(&self, theta: &SpaceOperator) -> Result<f64> {
        self.space.ensure_same(&theta.space)?;
        let xi = self.to_dense();
        let svd = linalg::svd(&theta.to_dense());
        let smax = svd.values.first().copied().unwrap_or(0.0);
        let cols: Vec<usize> = (0..svd.values.len()).filter(|&k| svd.values[k] > DEFAULT_TOL * smax).collect();
        if cols.is_empty() {
            return Ok(0.0);
        }
        let basis = linalg::select_columns(&svd.u, &cols);
        let comm = xi.adjoint() * &xi - &xi * xi.adjoint();
        Ok(linalg::lambda_min(&(basis.adjoint() * comm * &basis)))
    }

    pub fn max_abs_diff(&self, other: &SpaceOperator) -> Result<f64> {
        self.space.ensure_same(&other.space)?;
        Ok(linalg::max_abs(&(self.to_dense() - other.to_dense())))
    }

    /// Little-endian binary layout: `d·d` row-major entries, each `re: f64` followed by `im: f64`.
    pub fn to_dense_bytes(&self) -> Vec<u8> {
        let m = self.to_dense();
        let d = m.nrows();
        let mut out = Vec::with_capacity(16 * d * d);
        for r in 0..d {
            for c in 0..d {
                out.extend_from_slice(&m[(r, c)].re.to_le_bytes());
                out.extend_from_slice(&m[(r, c)].im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_dense_bytes(space: &SignalSpace, bytes: &[u8]) -> Result<Self> {
        let d = space.dim();
        if bytes.len() != 16 * d * d {
            return Err(GofError::ShapeMismatch(format!(
                "dense operator file has {} bytes, expected {} for dimension {d}",
                bytes.len(),
                16 * d * d
            )));
        }
        let read = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
        let m = CMatrix::from_fn(d, d, |r, c| {
            let k = 2 * (r * d + c);
            Complex64::new(read(k), read(k + 1))
        });
        Self::dense(space, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;
    use crate::sampling::Sampler;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn space(order: usize, n: usize) -> SignalSpace {
        SignalSpace::torus_like(FiniteAbelianGroup::cyclic(order).unwrap(), n).unwrap()
    }

    fn pertexa(sp: &SignalSpace) -> SpaceOperator {
        SpaceOperator::from_matrix_map(sp, |f| {
            CMatrix::from_row_slice(2, 2, &[f[(1, 1)] * c(2.0), f[(1, 0)], f[(0, 1)], f[(0, 0)]])
        })
        .unwrap()
    }

    #[test]
    fn pertexa_adjoint_matches_closed_form() {
        let sp = space(6, 2);
        let theta = pertexa(&sp);
        let expected = SpaceOperator::from_matrix_map(&sp, |g| {
            CMatrix::from_row_slice(2, 2, &[g[(1, 1)], g[(1, 0)], g[(0, 1)], g[(0, 0)] * c(2.0)])
        })
        .unwrap();
        assert!(theta.adjoint().max_abs_diff(&expected).unwrap() < 1e-15);
        assert!((theta.operator_norm() - 2.0).abs() < 1e-12);
        assert!((theta.adjoint().lower_bound_constant() - 1.0).abs() < 1e-12);
        assert!((theta.self_commutator_min_eig() + 3.0).abs() < 1e-12);
        assert!(!theta.is_hyponormal(DEFAULT_TOL));
    }

    #[test]
    fn adjoint_against_trace_inner() {
        let sp = space(5, 2);
        let mut s = Sampler::new(1);
        let theta = s.dense_operator(&sp);
        let f = s.signal(&sp);
        let g = s.signal(&sp);
        let lhs = theta.apply(&f).unwrap().trace_inner(&g).unwrap();
        let rhs = f.trace_inner(&theta.adjoint().apply(&g).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn flip_is_unitary_and_not_mv_adjointable() {
        let sp = space(4, 2);
        let flip = SpaceOperator::from_matrix_map(&sp, |f| {
            CMatrix::from_row_slice(2, 2, &[f[(1, 1)], f[(1, 0)], f[(0, 1)], f[(0, 0)]])
        })
        .unwrap();
        let d = flip.diagnostics(DEFAULT_TOL);
        assert!(d.is_hyponormal && d.is_normal);
        assert!((d.operator_norm - 1.0).abs() < 1e-12 && (d.lower_bound - 1.0).abs() < 1e-12);
        assert!(!d.is_mv_adjointable);
    }

    #[test]
    fn selectors_and_right_multiplications() {
        let sp = space(4, 2);
        let theta_o = SpaceOperator::from_matrix_map(&sp, |f| {
            CMatrix::from_row_slice(2, 2, &[c(0.0), f[(0, 1)], c(0.0), f[(1, 1)]])
        })
        .unwrap();
        assert!(theta_o.adjoint().max_abs_diff(&theta_o).unwrap() < 1e-15);
        assert!(theta_o.is_mv_adjointable(DEFAULT_TOL));
        let keep11 = SpaceOperator::from_matrix_map(&sp, |f| {
            CMatrix::from_row_slice(2, 2, &[f[(0, 0)], c(0.0), c(0.0), c(0.0)])
        })
        .unwrap();
        assert!(!keep11.is_mv_adjointable(DEFAULT_TOL));
        assert!(SpaceOperator::identity(&sp).is_mv_adjointable(DEFAULT_TOL));
        let mut s = Sampler::new(4);
        let a = s.matrix(2);
        assert!(SpaceOperator::right_multiplication(&sp, &a).unwrap().is_mv_adjointable(1e-12));
        // left multiplication by a non-scalar matrix is not
        let left = SpaceOperator::from_matrix_map(&sp, |f| &a * f).unwrap();
        assert!(!left.is_mv_adjointable(DEFAULT_TOL));
    }

    #[test]
    fn mv_adjointable_against_signal_oracle() {
        let sp = space(3, 2);
        let mut s = Sampler::new(8);
        let a = s.matrix(2);
        let theta = SpaceOperator::right_multiplication(&sp, &a).unwrap().to_dense_operator();
        let f = s.signal(&sp);
        let g = s.signal(&sp);
        let lhs = theta.apply(&f).unwrap().mv_inner(&g).unwrap();
        let rhs = f.mv_inner(&theta.adjoint().apply(&g).unwrap()).unwrap();
        assert!(linalg::max_abs(&(lhs - rhs)) < 1e-12);
        assert!(theta.is_mv_adjointable(1e-12));
    }

    #[test]
    fn entry_map_and_dense_agree() {
        let sp = space(4, 2);
        let theta = pertexa(&sp);
        let dense = theta.to_dense_operator();
        let a = theta.diagnostics(DEFAULT_TOL);
        let b = dense.diagnostics(DEFAULT_TOL);
        assert!((a.operator_norm - b.operator_norm).abs() < 1e-10);
        assert!((a.lower_bound - b.lower_bound).abs() < 1e-10);
        assert!((a.self_commutator_min_eig - b.self_commutator_min_eig).abs() < 1e-10);
        assert_eq!(a.is_mv_adjointable, b.is_mv_adjointable);
        for k in 0..sp.dim() {
            let e = sp.unit_signal(k);
            assert!(theta.apply(&e).unwrap().max_abs_diff(&dense.apply(&e).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn compose_and_commute() {
        let sp = space(4, 2);
        let theta = pertexa(&sp);
        let id = SpaceOperator::identity(&sp);
        assert_eq!(id.compose(&theta).unwrap(), theta);
        assert!(theta.commutes(&theta, 1e-12).unwrap());
        assert!(!theta.commutes(&theta.adjoint(), DEFAULT_TOL).unwrap());
    }

    #[test]
    fn dense_bytes_roundtrip() {
        let sp = space(3, 2);
        let mut s = Sampler::new(2);
        let theta = s.dense_operator(&sp);
        let back = SpaceOperator::from_dense_bytes(&sp, &theta.to_dense_bytes()).unwrap();
        assert_eq!(back, theta);
        assert!(SpaceOperator::from_dense_bytes(&sp, &[0u8; 15]).is_err());
    }
}
