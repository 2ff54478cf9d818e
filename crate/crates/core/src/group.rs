//! Finite abelian groups `Z_{N1} x ... x Z_{Nd}`.
//!
//! A finite abelian group is isomorphic to its dual, so the dual group is
//! represented by the same factor list: the dual element `γ` acts on `x` by
//! `exp(2πi Σ γ_i x_i / N_i)`. Elements are addressed by their index in the
//! canonical (lexicographic, first coordinate most significant) order, which
//! is also the storage order of every signal in this crate.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GofError, Result};

/// Product of cyclic groups. The same value describes `G` and `Ĝ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FiniteAbelianGroup {
    factors: Vec<usize>,
    order: usize,
    /// Least common multiple of the factors; character phases live in `Z_exponent`.
    exponent: usize,
}

impl TryFrom<Vec<usize>> for FiniteAbelianGroup {
    type Error = GofError;

    fn try_from(factors: Vec<usize>) -> Result<Self> {
        FiniteAbelianGroup::new(factors)
    }
}

impl From<FiniteAbelianGroup> for Vec<usize> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.factors
    }
}

/// Coordinates of a group (or dual group) element, each reduced into `[0, N_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element(Vec<usize>);

impl Element {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(GofError::InvalidGroup("at least one cyclic factor is required".into()));
        }
        if let Some(pos) = factors.iter().position(|&n| n == 0) {
            return Err(GofError::InvalidGroup(format!("factor {pos} is zero")));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| GofError::InvalidGroup("group order overflows".into()))?;
        let exponent = factors.iter().fold(1usize, |acc, &n| acc / gcd(acc, n) * n);
        Ok(Self { factors, order, exponent })
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Builds an element from arbitrary integer coordinates, reducing each modulo its factor.
    pub fn element(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.factors.len() {
            return Err(GofError::InvalidElement(format!(
                "expected {} coordinates, got {}",
                self.factors.len(),
                coords.len()
            )));
        }
        Ok(Element(
            coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as usize)
                .collect(),
        ))
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.factors.len()])
    }

    /// Checks that `e` has the right arity and canonical coordinates.
    pub fn check(&self, e: &Element) -> Result<()> {
        if e.0.len() != self.factors.len() || e.0.iter().zip(&self.factors).any(|(&c, &n)| c >= n) {
            return Err(GofError::GroupMismatch(format!(
                "element {:?} does not belong to Z{:?}",
                e.0, self.factors
            )));
        }
        Ok(())
    }

    pub fn index_of(&self, e: &Element) -> usize {
        e.0.iter().zip(&self.factors).fold(0, |acc, (&c, &n)| acc * n + c)
    }

    pub fn element_at(&self, mut index: usize) -> Element {
        let mut coords = vec![0; self.factors.len()];
        for (slot, &n) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = index % n;
            index /= n;
        }
        Element(coords)
    }

    /// All elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    pub fn add(&self, a: &Element, b: &Element) -> Element {
        Element(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &Element) -> Element {
        Element(a.0.iter().zip(&self.factors).map(|(&x, &n)| (n - x) % n).collect())
    }

    pub fn sub(&self, a: &Element, b: &Element) -> Element {
        self.add(a, &self.neg(b))
    }

    pub(crate) fn add_idx(&self, a: usize, b: usize) -> usize {
        self.index_of(&self.add(&self.element_at(a), &self.element_at(b)))
    }

    pub(crate) fn sub_idx(&self, a: usize, b: usize) -> usize {
        self.index_of(&self.sub(&self.element_at(a), &self.element_at(b)))
    }

    /// Phase numerator `p` with `γ(x) = exp(2πi p / exponent)`.
    pub(crate) fn pairing(&self, gamma: &Element, x: &Element) -> usize {
        let l = self.exponent;
        gamma
            .0
            .iter()
            .zip(&x.0)
            .zip(&self.factors)
            .fold(0usize, |acc, ((&g, &v), &n)| (acc + (g * v % n) * (l / n)) % l)
    }

    pub(crate) fn pairing_idx(&self, gamma: usize, x: usize) -> usize {
        self.pairing(&self.element_at(gamma), &self.element_at(x))
    }

    pub(crate) fn root_of_unity(&self, phase: usize) -> Complex64 {
        const AXES: [Complex64; 4] = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        let l = self.exponent;
        let p = phase % l;
        // exact values on the axes keep ±1, ±i free of rounding
        if (4 * p) % l == 0 {
            AXES[4 * p / l]
        } else {
            Complex64::from_polar(1.0, 2.0 * PI * p as f64 / l as f64)
        }
    }

    /// `γ(x) = exp(2πi Σ γ_i x_i / N_i)`.
    pub fn character_value(&self, gamma: &Element, x: &Element) -> Result<Complex64> {
        self.check(gamma)?;
        self.check(x)?;
        Ok(self.root_of_unity(self.pairing(gamma, x)))
    }

    pub(crate) fn character_idx(&self, gamma: usize, x: usize) -> Complex64 {
        self.root_of_unity(self.pairing_idx(gamma, x))
    }

    /// Scalar Fourier transform `f̂(γ) = w_G Σ_x f(x) conj(γ(x))`.
    pub fn fourier(&self, measure: &MeasurePair, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(values, measure.w_g, true)
    }

    /// Inverse transform `f(x) = w_Ĝ Σ_γ f̂(γ) γ(x)`.
    pub fn inverse_fourier(&self, measure: &MeasurePair, values: &[Complex64]) -> Result<Vec<Complex64>> {
        self.transform(values, measure.w_dual, false)
    }

    fn transform(&self, values: &[Complex64], weight: f64, conjugate: bool) -> Result<Vec<Complex64>> {
        if values.len() != self.order {
            return Err(GofError::ShapeMismatch(format!(
                "signal has {} samples, group has {} elements",
                values.len(),
                self.order
            )));
        }
        let l = self.exponent;
        let elems: Vec<Element> = self.elements().collect();
        Ok(elems
            .iter()
            .map(|out| {
                let acc: Complex64 = elems
                    .iter()
                    .zip(values)
                    .map(|(e, &v)| {
                        let p = self.pairing(out, e);
                        let p = if conjugate { (l - p) % l } else { p };
                        v * self.root_of_unity(p)
                    })
                    .sum();
                acc * weight
            })
            .collect())
    }
}

/// Haar weights: every point of `G` carries mass `w_g`, every point of `Ĝ` mass `w_dual`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurePair {
    pub w_g: f64,
    pub w_dual: f64,
}

/// Named weight conventions accepted in scenario files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WeightConvention {
    /// `w_G = 1/|G|`, `w_Ĝ = 1`: the torus normalisation `μ(T) = 1` with counting measure on the dual.
    #[default]
    TorusLike,
    /// `w_G = 1`, `w_Ĝ = 1/|G|`.
    Counting,
    /// `w_G = w_Ĝ = 1/sqrt(|G|)`.
    Symmetric,
}

impl MeasurePair {
    const PLANCHEREL_TOL: f64 = 1e-12;

    pub fn new(w_g: f64, w_dual: f64, group: &FiniteAbelianGroup) -> Result<Self> {
        if !(w_g > 0.0 && w_dual > 0.0 && w_g.is_finite() && w_dual.is_finite()) {
            return Err(GofError::InvalidMeasure(format!("weights must be positive, got ({w_g}, {w_dual})")));
        }
        let prod = w_g * w_dual * group.order() as f64;
        if (prod - 1.0).abs() > Self::PLANCHEREL_TOL {
            return Err(GofError::InvalidMeasure(format!(
                "w_G * w_Ĝ * |G| = {prod}, Plancherel requires 1"
            )));
        }
        Ok(Self { w_g, w_dual })
    }

    pub fn from_convention(convention: WeightConvention, group: &FiniteAbelianGroup) -> Self {
        let n = group.order() as f64;
        match convention {
            WeightConvention::TorusLike => Self { w_g: 1.0 / n, w_dual: 1.0 },
            WeightConvention::Counting => Self { w_g: 1.0, w_dual: 1.0 / n },
            WeightConvention::Symmetric => Self { w_g: n.sqrt().recip(), w_dual: n.sqrt().recip() },
        }
    }

    pub fn torus_like(group: &FiniteAbelianGroup) -> Self {
        Self::from_convention(WeightConvention::TorusLike, group)
    }

    /// The pair seen from the dual side (`Ĝ` as the primal group).
    pub fn dual(&self) -> Self {
        Self { w_g: self.w_dual, w_dual: self.w_g }
    }
}

/// A subgroup stored by its sorted member indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    group: FiniteAbelianGroup,
    members: Vec<usize>,
}

impl Subgroup {
    /// Subgroup generated by `generators`.
    pub fn generated(group: &FiniteAbelianGroup, generators: &[Element]) -> Result<Self> {
        for g in generators {
            group.check(g)?;
        }
        let mut seen = vec![false; group.order()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let gens: Vec<usize> = generators.iter().map(|g| group.index_of(g)).collect();
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = group.add_idx(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        let members = (0..group.order()).filter(|&i| seen[i]).collect();
        Ok(Self { group: group.clone(), members })
    }

    /// Validates an explicit member list.
    pub fn from_members(group: &FiniteAbelianGroup, members: &[Element]) -> Result<Self> {
        let mut idx = Vec::with_capacity(members.len());
        for m in members {
            group.check(m)?;
            idx.push(group.index_of(m));
        }
        idx.sort_unstable();
        idx.dedup();
        let sub = Self { group: group.clone(), members: idx };
        if !sub.contains_idx(0) {
            return Err(GofError::InvalidSubgroup("identity missing".into()));
        }
        for &a in &sub.members {
            for &b in &sub.members {
                if !sub.contains_idx(group.sub_idx(a, b)) {
                    return Err(GofError::InvalidSubgroup(format!(
                        "not closed: {:?} - {:?}",
                        group.element_at(a).coords(),
                        group.element_at(b).coords()
                    )));
                }
            }
        }
        Ok(sub)
    }

    pub fn whole(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), members: (0..group.order()).collect() }
    }

    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), members: vec![0] }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    /// Member indices in canonical order.
    pub fn member_indices(&self) -> &[usize] {
        &self.members
    }

    pub fn members(&self) -> Vec<Element> {
        self.members.iter().map(|&i| self.group.element_at(i)).collect()
    }

    pub(crate) fn contains_idx(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn contains(&self, e: &Element) -> bool {
        self.group.check(e).is_ok() && self.contains_idx(self.group.index_of(e))
    }

    /// `Λ⊥ = {γ ∈ Ĝ : γ(x) = 1 for all x ∈ Λ}`, decided with exact integer phases.
    pub fn annihilator(&self) -> Subgroup {
        let g = &self.group;
        let members = (0..g.order())
            .filter(|&gamma| self.members.iter().all(|&x| g.pairing_idx(gamma, x) == 0))
            .collect();
        Subgroup { group: g.clone(), members }
    }

    /// Coset representatives of this subgroup, the lexicographically smallest one per coset.
    pub fn transversal(&self) -> Vec<Element> {
        let g = &self.group;
        let mut covered = vec![false; g.order()];
        let mut reps = Vec::with_capacity(g.order() / self.order());
        for v in 0..g.order() {
            if covered[v] {
                continue;
            }
            reps.push(g.element_at(v));
            for &h in &self.members {
                covered[g.add_idx(v, h)] = true;
            }
        }
        reps
    }
}

/// A group automorphism `x ↦ A x` given by an integer matrix acting on coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    group: FiniteAbelianGroup,
    matrix: Vec<Vec<i64>>,
    image: Vec<usize>,
}

impl Automorphism {
    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        let d = group.rank();
        let matrix = (0..d).map(|i| (0..d).map(|j| i64::from(i == j)).collect()).collect();
        Self { group: group.clone(), matrix, image: (0..group.order()).collect() }
    }

    /// Multiplication by a unit `u` on a cyclic group.
    pub fn unit(group: &FiniteAbelianGroup, u: i64) -> Result<Self> {
        if group.rank() != 1 {
            return Err(GofError::InvalidAutomorphism(
                "a unit multiplier needs a single cyclic factor; pass a matrix instead".into(),
            ));
        }
        let n = group.factors()[0];
        let r = u.rem_euclid(n as i64) as usize;
        if gcd(r, n) != 1 && n != 1 {
            return Err(GofError::InvalidAutomorphism(format!("gcd({u}, {n}) != 1")));
        }
        Self::from_matrix(group, vec![vec![u]])
    }

    /// Diagonal automorphism with one multiplier per factor.
    pub fn diagonal(group: &FiniteAbelianGroup, units: &[i64]) -> Result<Self> {
        let d = group.rank();
        if units.len() != d {
            return Err(GofError::InvalidAutomorphism(format!("expected {d} multipliers, got {}", units.len())));
        }
        let matrix = (0..d).map(|i| (0..d).map(|j| if i == j { units[i] } else { 0 }).collect()).collect();
        Self::from_matrix(group, matrix)
    }

    pub fn from_matrix(group: &FiniteAbelianGroup, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let d = group.rank();
        if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(GofError::InvalidAutomorphism(format!("matrix must be {d}x{d}")));
        }
        let f = group.factors();
        // A_ij * N_j must vanish mod N_i for the map to be well defined on Z_{N_j}
        for i in 0..d {
            for j in 0..d {
                if (matrix[i][j] as i128 * f[j] as i128).rem_euclid(f[i] as i128) != 0 {
                    return Err(GofError::InvalidAutomorphism(format!(
                        "entry ({i},{j}) = {} is not well defined from Z_{} to Z_{}",
                        matrix[i][j], f[j], f[i]
                    )));
                }
            }
        }
        let image: Vec<usize> = group
            .elements()
            .map(|x| {
                let coords: Vec<i64> = (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| (matrix[i][j] as i128 * x.0[j] as i128).rem_euclid(f[i] as i128))
                            .sum::<i128>()
                            .rem_euclid(f[i] as i128) as i64
                    })
                    .collect();
                group.index_of(&group.element(&coords).expect("arity checked"))
            })
            .collect();
        let mut hit = vec![false; group.order()];
        for &y in &image {
            if std::mem::replace(&mut hit[y], true) {
                return Err(GofError::InvalidAutomorphism("map is not injective".into()));
            }
        }
        Ok(Self { group: group.clone(), matrix, image })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.group.check(x)?;
        Ok(self.group.element_at(self.image[self.group.index_of(x)]))
    }

    pub(crate) fn apply_idx(&self, x: usize) -> usize {
        self.image[x]
    }
}
