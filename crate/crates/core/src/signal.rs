//! Matrix-valued signals `f: G → C^{n×n}` with the Frobenius geometry.
//!
//! Samples are stored densely: the entry `(i, j)` of `f(x)` sits at
//! `(x * n + i) * n + j` where `x` is the canonical index of the group element.
//! The flattened form multiplies every sample by `sqrt(w_G)` so that the
//! Euclidean inner product of flattened vectors is the trace inner product.

use num_complex::Complex64;

use crate::error::{GofError, Result};
use crate::group::{Element, FiniteAbelianGroup, MeasurePair};
use crate::linalg::{CMatrix, CVector};

/// `L²(G, C^{n×n})` with a fixed measure.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalSpace {
    group: FiniteAbelianGroup,
    n: usize,
    measure: MeasurePair,
}

impl SignalSpace {
    pub fn new(group: FiniteAbelianGroup, n: usize, measure: MeasurePair) -> Result<Self> {
        if n == 0 {
            return Err(GofError::ShapeMismatch("matrix dimension must be at least 1".into()));
        }
        MeasurePair::new(measure.w_g, measure.w_dual, &group)?;
        Ok(Self { group, n, measure })
    }

    /// Space with the torus-like weights `w_G = 1/|G|`, `w_Ĝ = 1`.
    pub fn torus_like(group: FiniteAbelianGroup, n: usize) -> Result<Self> {
        let m = MeasurePair::torus_like(&group);
        Self::new(group, n, m)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn measure(&self) -> &MeasurePair {
        &self.measure
    }

    /// Real dimension count `|G| n²` of the flattened space.
    pub fn dim(&self) -> usize {
        self.group.order() * self.n * self.n
    }

    pub fn zero(&self) -> MatrixSignal {
        MatrixSignal { space: self.clone(), data: vec![Complex64::new(0.0, 0.0); self.dim()] }
    }

    /// The raw unit signal at flattened position `k` (value 1, not normalised).
    pub fn unit_signal(&self, k: usize) -> MatrixSignal {
        let mut s = self.zero();
        s.data[k] = Complex64::new(1.0, 0.0);
        s
    }

    /// Same space seen from the dual group (weights swapped).
    pub fn dual(&self) -> Self {
        Self { group: self.group.clone(), n: self.n, measure: self.measure.dual() }
    }

    pub(crate) fn ensure_same(&self, other: &SignalSpace) -> Result<()> {
        if self.group != other.group {
            return Err(GofError::GroupMismatch(format!(
                "Z{:?} vs Z{:?}",
                self.group.factors(),
                other.group.factors()
            )));
        }
        if self.n != other.n {
            return Err(GofError::ShapeMismatch(format!("n = {} vs n = {}", self.n, other.n)));
        }
        if self.measure != other.measure {
            return Err(GofError::ShapeMismatch("signals carry different measures".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSignal {
    space: SignalSpace,
    data: Vec<Complex64>,
}

impl MatrixSignal {
    pub fn from_data(space: &SignalSpace, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != space.dim() {
            return Err(GofError::ShapeMismatch(format!(
                "expected {} samples, got {}",
                space.dim(),
                data.len()
            )));
        }
        Ok(Self { space: space.clone(), data })
    }

    /// Builds `f` from `value(x, i, j)` with `x` the canonical element index.
    pub fn from_fn(space: &SignalSpace, mut value: impl FnMut(usize, usize, usize) -> Complex64) -> Self {
        let n = space.n;
        let data = (0..space.group.order())
            .flat_map(|x| (0..n).flat_map(move |i| (0..n).map(move |j| (x, i, j))))
            .map(|(x, i, j)| value(x, i, j))
            .collect();
        Self { space: space.clone(), data }
    }

    /// Assembles a matrix signal from scalar component signals; `None` is the zero atom.
    pub fn from_components(space: &SignalSpace, components: &[Vec<Option<&[Complex64]>>]) -> Result<Self> {
        let n = space.n;
        let order = space.group.order();
        if components.len() != n || components.iter().any(|row| row.len() != n) {
            return Err(GofError::ShapeMismatch(format!("expected {n}x{n} components")));
        }
        for c in components.iter().flatten().flatten() {
            if c.len() != order {
                return Err(GofError::ShapeMismatch(format!(
                    "component has {} samples, group has {order}",
                    c.len()
                )));
            }
        }
        Ok(Self::from_fn(space, |x, i, j| components[i][j].map_or(Complex64::new(0.0, 0.0), |c| c[x])))
    }

    pub fn space(&self) -> &SignalSpace {
        &self.space
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.space.n
    }

    pub fn value(&self, x: usize, i: usize, j: usize) -> Complex64 {
        let n = self.space.n;
        self.data[(x * n + i) * n + j]
    }

    /// `f(x)` as an `n×n` matrix.
    pub fn at(&self, x: usize) -> CMatrix {
        let n = self.space.n;
        CMatrix::from_row_slice(n, n, &self.data[x * n * n..(x + 1) * n * n])
    }

    /// Scalar component `f_{ij}` over the whole group.
    pub fn component(&self, i: usize, j: usize) -> Vec<Complex64> {
        (0..self.space.group.order()).map(|x| self.value(x, i, j)).collect()
    }

    pub fn flatten(&self) -> CVector {
        let s = self.space.measure.w_g.sqrt();
        CVector::from_iterator(self.data.len(), self.data.iter().map(|z| z * s))
    }

    pub fn from_flat(space: &SignalSpace, v: &CVector) -> Result<Self> {
        let s = space.measure.w_g.sqrt().recip();
        Self::from_data(space, v.iter().map(|z| z * s).collect())
    }

    /// `⟨f, g⟩ = w_G Σ_x f(x) g(x)*`.
    pub fn mv_inner(&self, other: &MatrixSignal) -> Result<CMatrix> {
        self.space.ensure_same(&other.space)?;
        let n = self.space.n;
        let w = self.space.measure.w_g;
        let mut out = CMatrix::zeros(n, n);
        for x in 0..self.space.group.order() {
            let base = x * n * n;
            for p in 0..n {
                for q in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in 0..n {
                        acc += self.data[base + p * n + r] * other.data[base + q * n + r].conj();
                    }
                    out[(p, q)] += acc;
                }
            }
        }
        Ok(out * Complex64::new(w, 0.0))
    }

    /// `tr ⟨f, g⟩`, the Hilbert-space inner product.
    pub fn trace_inner(&self, other: &MatrixSignal) -> Result<Complex64> {
        self.space.ensure_same(&other.space)?;
        let w = self.space.measure.w_g;
        let acc: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b.conj()).sum();
        Ok(acc * w)
    }

    pub fn norm_sq(&self) -> f64 {
        self.space.measure.w_g * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `(T_a f)(x) = f(x - a)`.
    pub fn translate(&self, a: &Element) -> Result<Self> {
        self.space.group.check(a)?;
        Ok(self.translate_idx(self.space.group.index_of(a)))
    }

    pub(crate) fn translate_idx(&self, a: usize) -> Self {
        let g = &self.space.group;
        let nn = self.space.n * self.space.n;
        let mut data = Vec::with_capacity(self.data.len());
        for x in 0..g.order() {
            let src = g.sub_idx(x, a) * nn;
            data.extend_from_slice(&self.data[src..src + nn]);
        }
        Self { space: self.space.clone(), data }
    }

    /// `(E_η f)(x) = η(x) f(x)`.
    pub fn modulate(&self, eta: &Element) -> Result<Self> {
        self.space.group.check(eta)?;
        Ok(self.modulate_idx(self.space.group.index_of(eta)))
    }

    pub(crate) fn modulate_idx(&self, eta: usize) -> Self {
        let g = &self.space.group;
        let nn = self.space.n * self.space.n;
        let mut data = self.data.clone();
        for x in 0..g.order() {
            let phase = g.character_idx(eta, x);
            for z in &mut data[x * nn..(x + 1) * nn] {
                *z *= phase;
            }
        }
        Self { space: self.space.clone(), data }
    }

    /// Entrywise Fourier transform; the result lives on `Ĝ` and carries the swapped weights.
    pub fn fourier(&self) -> Result<Self> {
        self.entrywise(|g, m, c| g.fourier(m, c), self.space.dual())
    }

    /// Inverse of [`MatrixSignal::fourier`] for a signal living on `Ĝ`.
    pub fn inverse_fourier(&self) -> Result<Self> {
        // seen from Ĝ, the inverse transform is the forward pairing without conjugation
        self.entrywise(|g, m, c| g.inverse_fourier(&m.dual(), c), self.space.dual())
    }

    fn entrywise(
        &self,
        transform: impl Fn(&FiniteAbelianGroup, &MeasurePair, &[Complex64]) -> Result<Vec<Complex64>>,
        target: SignalSpace,
    ) -> Result<Self> {
        let n = self.space.n;
        let mut out = target.zero();
        for i in 0..n {
            for j in 0..n {
                let t = transform(&self.space.group, &self.space.measure, &self.component(i, j))?;
                for (x, v) in t.into_iter().enumerate() {
                    out.data[(x * n + i) * n + j] = v;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MatrixSignal) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self { space: self.space.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &MatrixSignal) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        Ok(Self { space: self.space.clone(), data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { space: self.space.clone(), data: self.data.iter().map(|z| z * c).collect() }
    }

    /// Pointwise `x ↦ m · f(x)`.
    pub fn left_mul(&self, m: &CMatrix) -> Result<Self> {
        let n = self.space.n;
        if m.shape() != (n, n) {
            return Err(GofError::ShapeMismatch(format!("coefficient is {:?}, expected ({n}, {n})", m.shape())));
        }
        let mut out = self.space.zero();
        self.accumulate_left_mul(m, &mut out.data);
        Ok(out)
    }

    pub(crate) fn accumulate_left_mul(&self, m: &CMatrix, acc: &mut [Complex64]) {
        let n = self.space.n;
        for x in 0..self.space.group.order() {
            let base = x * n * n;
            for p in 0..n {
                for q in 0..n {
                    let c = m[(p, q)];
                    if c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for r in 0..n {
                        acc[base + p * n + r] += c * self.data[base + q * n + r];
                    }
                }
            }
        }
    }

    pub fn max_abs_diff(&self, other: &MatrixSignal) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|z| z.norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    fn space(n_group: usize, n: usize) -> SignalSpace {
        SignalSpace::torus_like(FiniteAbelianGroup::cyclic(n_group).unwrap(), n).unwrap()
    }

    #[test]
    fn mv_inner_single_entry() {
        let sp = space(8, 2);
        let f = MatrixSignal::from_fn(&sp, |x, i, j| {
            if (i, j) == (0, 1) { Complex64::new(x as f64, 1.0) } else { Complex64::new(0.0, 0.0) }
        });
        let m = f.mv_inner(&f).unwrap();
        let expected: f64 = (0..8).map(|x| (x * x + 1) as f64).sum::<f64>() / 8.0;
        assert!((m[(0, 0)].re - expected).abs() < 1e-12);
        assert!(m[(0, 1)].norm() + m[(1, 0)].norm() + m[(1, 1)].norm() < 1e-14);
        assert!(f.mv_inner(&sp.zero()).unwrap().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn conjugate_symmetry_direct_sum() {
        let sp = space(6, 2);
        let mut s = Sampler::new(11);
        let f = s.signal(&sp);
        let g = s.signal(&sp);
        // direct double summation in both orders
        let direct = |a: &MatrixSignal, b: &MatrixSignal| {
            let mut m = CMatrix::zeros(2, 2);
            for x in 0..6 {
                m += a.at(x) * b.at(x).adjoint();
            }
            m / Complex64::new(6.0, 0.0)
        };
        let fg = f.mv_inner(&g).unwrap();
        let gf = g.mv_inner(&f).unwrap();
        assert!(crate::linalg::max_abs(&(&fg - direct(&f, &g))) < 1e-12);
        assert!(crate::linalg::max_abs(&(fg - gf.adjoint())) < 1e-12);
        assert!(crate::linalg::max_abs(&(gf - direct(&g, &f))) < 1e-12);
    }

    #[test]
    fn constant_ones_norm() {
        let sp = space(8, 2);
        let f = MatrixSignal::from_fn(&sp, |_, _, _| Complex64::new(1.0, 0.0));
        assert!((f.norm_sq() - 4.0).abs() < 1e-12);
        let t = f.trace_inner(&f).unwrap();
        assert!((t.re - f.frobenius_norm().powi(2)).abs() < 1e-12 && t.im.abs() < 1e-15);
    }

    #[test]
    fn translate_modulate_identities() {
        let sp = space(6, 2);
        let g = sp.group().clone();
        let mut s = Sampler::new(5);
        let f = s.signal(&sp);
        assert_eq!(f.translate(&g.zero()).unwrap(), f);
        let eta = g.element(&[2]).unwrap();
        let back = f.modulate(&eta).unwrap().modulate(&g.neg(&eta)).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-14);
        let a = g.element(&[4]).unwrap();
        let shifted = f.translate(&a).unwrap();
        // pointwise oracle: (T_a f)(x) = f(x - a)
        for x in g.elements() {
            let src = g.index_of(&g.sub(&x, &a));
            assert!((shifted.at(g.index_of(&x)) - f.at(src)).norm() < 1e-15);
        }
        assert!((shifted.norm_sq() - f.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let a = space(6, 2).zero();
        let b = space(6, 3).zero();
        let c = space(8, 2).zero();
        assert!(matches!(a.mv_inner(&b), Err(GofError::ShapeMismatch(_))));
        assert!(matches!(a.trace_inner(&c), Err(GofError::GroupMismatch(_))));
        assert!(MatrixSignal::from_data(&space(6, 2), vec![Complex64::new(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn flatten_roundtrip_and_trace_inner() {
        let sp = space(6, 2);
        let mut s = Sampler::new(9);
        let f = s.signal(&sp);
        let g = s.signal(&sp);
        let ip = g.flatten().dotc(&f.flatten());
        assert!((ip - f.trace_inner(&g).unwrap()).norm() < 1e-12);
        assert!(MatrixSignal::from_flat(&sp, &f.flatten()).unwrap().max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn fourier_roundtrip_matrix() {
        let sp = space(6, 2);
        let mut s = Sampler::new(3);
        let f = s.signal(&sp);
        let fh = f.fourier().unwrap();
        assert!(fh.inverse_fourier().unwrap().max_abs_diff(&f) < 1e-12);
        assert!((fh.norm_sq() - f.norm_sq()).abs() < 1e-12);
    }
}
