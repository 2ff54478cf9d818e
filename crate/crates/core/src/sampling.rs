//! Seeded random signals, operators and (system, Θ) instances for experiments and tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::frame::GaborSystem;
use crate::group::{Automorphism, FiniteAbelianGroup, Subgroup};
use crate::linalg::CMatrix;
use crate::operator::SpaceOperator;
use crate::signal::{MatrixSignal, SignalSpace};

/// Structural flavour of a random instance, chosen to hit every kernel-inclusion outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceKind {
    /// Random windows, invertible entry-map Θ.
    Generic,
    /// Random windows, rank-deficient Θ.
    SingularTheta,
    /// Windows `h·A`, `Θ f = fA` with `A` Hermitian and singular.
    MatchedKernel,
    /// Windows `h·A*`, `Θ f = fA` with `A` singular and not normal.
    SkewKernel,
    /// Too few elements for a frame, invertible Θ.
    DeficientFrame,
}

impl InstanceKind {
    pub const ALL: [InstanceKind; 5] = [
        InstanceKind::Generic,
        InstanceKind::SingularTheta,
        InstanceKind::MatchedKernel,
        InstanceKind::SkewKernel,
        InstanceKind::DeficientFrame,
    ];
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    pub kind: InstanceKind,
    pub system: GaborSystem,
    pub theta: SpaceOperator,
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn real(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard complex Gaussian.
    pub fn complex(&mut self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(self.real() * s, self.real() * s)
    }

    pub fn index(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..bound)
    }

    pub fn matrix(&mut self, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| self.complex())
    }

    pub fn hermitian(&mut self, n: usize) -> CMatrix {
        let m = self.matrix(n);
        crate::linalg::hermitian_part(&m)
    }

    pub fn scalar_signal(&mut self, len: usize) -> Vec<Complex64> {
        (0..len).map(|_| self.complex()).collect()
    }

    pub fn signal(&mut self, space: &SignalSpace) -> MatrixSignal {
        MatrixSignal::from_data(space, self.scalar_signal(space.dim())).expect("sized to the space")
    }

    pub fn entry_map(&mut self, space: &SignalSpace) -> SpaceOperator {
        let nn = space.n() * space.n();
        SpaceOperator::entry_map(space, self.matrix(nn)).expect("sized to the space")
    }

    /// Entry map of the given rank (zeroed singular directions).
    pub fn entry_map_of_rank(&mut self, space: &SignalSpace, rank: usize) -> SpaceOperator {
        let nn = space.n() * space.n();
        let left = CMatrix::from_fn(nn, rank, |_, _| self.complex());
        let right = CMatrix::from_fn(rank, nn, |_, _| self.complex());
        SpaceOperator::entry_map(space, left * right).expect("sized to the space")
    }

    pub fn dense_operator(&mut self, space: &SignalSpace) -> SpaceOperator {
        let d = space.dim();
        let m = CMatrix::from_fn(d, d, |_, _| self.complex());
        SpaceOperator::dense(space, m).expect("sized to the space")
    }

    pub fn phase(&mut self) -> Complex64 {
        let t: f64 = self.rng.random_range(0.0..std::f64::consts::TAU);
        Complex64::from_polar(1.0, t)
    }

    /// Diagonal matrix of random unit-modulus entries.
    pub fn diagonal_unitary(&mut self, n: usize) -> CMatrix {
        let mut d = CMatrix::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = self.phase();
        }
        d
    }

    pub fn subgroup(&mut self, group: &FiniteAbelianGroup) -> Subgroup {
        let gen = group.element_at(self.index(group.order()));
        Subgroup::generated(group, &[gen]).expect("element of the group")
    }

    /// Unit multiplier automorphism on a cyclic group (identity otherwise).
    pub fn automorphism(&mut self, group: &FiniteAbelianGroup) -> Automorphism {
        if group.rank() == 1 {
            let n = group.order() as i64;
            let units: Vec<i64> = (1..n.max(2)).filter(|&u| gcd(u, n) == 1).collect();
            let u = units[self.index(units.len())];
            Automorphism::unit(group, u).expect("unit")
        } else {
            Automorphism::identity(group)
        }
    }

    /// Random `(system, Θ)` pair on a small group with `n = 2`.
    pub fn instance(&mut self, kind: InstanceKind) -> RandomInstance {
        let orders = [3usize, 4, 5, 6];
        let group = FiniteAbelianGroup::cyclic(orders[self.index(orders.len())]).expect("positive order");
        let space = SignalSpace::torus_like(group.clone(), 2).expect("valid space");
        let b = self.automorphism(&group);
        let c = self.automorphism(&group);
        let whole = Subgroup::whole(&group);
        let (windows, lattice, dual, theta) = match kind {
            InstanceKind::Generic => {
                let w = (0..1 + self.index(2)).map(|_| self.signal(&space)).collect();
                let theta = self.entry_map(&space);
                (w, whole.clone(), self.subgroup(&group), theta)
            }
            InstanceKind::SingularTheta => {
                let w = (0..1 + self.index(2)).map(|_| self.signal(&space)).collect();
                let rank = 1 + self.index(3);
                let theta = self.entry_map_of_rank(&space, rank);
                (w, whole.clone(), self.subgroup(&group), theta)
            }
            InstanceKind::MatchedKernel => {
                let v = CMatrix::from_fn(2, 1, |_, _| self.complex());
                let a = &v * v.adjoint();
                let w = self.profiled_windows(&space, &a, 2);
                let theta = SpaceOperator::right_multiplication(&space, &a).expect("2x2");
                (w, whole.clone(), whole.clone(), theta)
            }
            InstanceKind::SkewKernel => {
                let u = CMatrix::from_fn(2, 1, |_, _| self.complex());
                let v = CMatrix::from_fn(2, 1, |_, _| self.complex());
                let a = &u * v.adjoint();
                let w = self.profiled_windows(&space, &a.adjoint(), 2);
                let theta = SpaceOperator::right_multiplication(&space, &a).expect("2x2");
                (w, whole.clone(), whole.clone(), theta)
            }
            InstanceKind::DeficientFrame => {
                let w = vec![self.signal(&space)];
                let theta = self.entry_map(&space);
                (w, Subgroup::trivial(&group), Subgroup::trivial(&group), theta)
            }
        };
        let system = GaborSystem::new(&space, windows, lattice, dual, b, c).expect("consistent instance");
        RandomInstance { kind, system, theta }
    }

    /// Windows `x ↦ h(x)·m` with random scalar profiles `h`.
    fn profiled_windows(&mut self, space: &SignalSpace, m: &CMatrix, count: usize) -> Vec<MatrixSignal> {
        (0..count)
            .map(|_| {
                let h = self.scalar_signal(space.group().order());
                MatrixSignal::from_fn(space, |x, i, j| h[x] * m[(i, j)])
            })
            .collect()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}
