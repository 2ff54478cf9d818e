//! Reference computations written directly from the definitions, sharing no code
//! with the library beyond the plain data types.
#![allow(dead_code)]

use std::f64::consts::PI;

use gof_core::{CMatrix, Complex64, MatrixSignal, SignalFamily, SignalSpace};

/// Samples of a matrix signal on a cyclic group: `samples[x]` is the `n×n` value at `x`.
pub type Samples = Vec<CMatrix>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn cis(num: i64, den: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * num as f64 / den as f64)
}

/// `scale · w_dual · Σ_{γ ∈ set} e^{2πiγx/N}`, the window with Fourier transform `scale·1_set`.
pub fn fourier_indicator(order: usize, set: &[usize], scale: f64, w_dual: f64) -> Vec<Complex64> {
    (0..order)
        .map(|x| set.iter().map(|&g| cis((g * x) as i64, order as i64)).sum::<Complex64>() * (scale * w_dual))
        .collect()
}

/// Places scalar profiles into an `n×n` pattern (`None` = zero entry).
pub fn matrix_window(order: usize, pattern: &[Vec<Option<&[Complex64]>>]) -> Samples {
    let n = pattern.len();
    (0..order)
        .map(|x| CMatrix::from_fn(n, n, |i, j| pattern[i][j].map_or(c(0.0), |h| h[x])))
        .collect()
}

/// `{E_m T_k Φ_l}` on `Z_N` for `k ∈ lattice`, `m ∈ dual`, ordered `(l, k, m)`.
pub fn gabor_family(order: usize, windows: &[Samples], lattice: &[usize], dual: &[usize]) -> Vec<Samples> {
    let mut out = Vec::new();
    for w in windows {
        for &k in lattice {
            for &m in dual {
                out.push((0..order).map(|x| w[(x + order - k) % order].clone() * cis((m * x) as i64, order as i64)).collect());
            }
        }
    }
    out
}

pub fn multiples(step: usize, order: usize) -> Vec<usize> {
    (0..order).step_by(step).collect()
}

pub fn to_signal(space: &SignalSpace, s: &Samples) -> MatrixSignal {
    MatrixSignal::from_fn(space, |x, i, j| s[x][(i, j)])
}

pub fn to_samples(f: &MatrixSignal) -> Samples {
    let order = f.space().group().order();
    (0..order).map(|x| f.at(x)).collect()
}

pub fn family_samples(family: &SignalFamily) -> Vec<Samples> {
    family.elements().iter().map(to_samples).collect()
}

/// `w Σ_x f(x) g(x)*`.
pub fn mv_inner(w: f64, f: &Samples, g: &Samples) -> CMatrix {
    let n = f[0].nrows();
    let mut acc = CMatrix::zeros(n, n);
    for (a, b) in f.iter().zip(g) {
        acc += a * b.adjoint();
    }
    acc * c(w)
}

pub fn norm_sq(w: f64, f: &Samples) -> f64 {
    w * f.iter().map(|m| m.norm_squared()).sum::<f64>()
}

/// `Σ_g ‖⟨f, g⟩‖²_F`.
pub fn frame_sum(w: f64, family: &[Samples], f: &Samples) -> f64 {
    family.iter().map(|g| mv_inner(w, f, g).norm_squared()).sum()
}

/// Frame operator in the coordinates `v[(x·n + p)·n + r] = √w f(x)_{pr}`, summed element by element.
pub fn frame_operator(w: f64, n: usize, family: &[Samples]) -> CMatrix {
    let order = family.first().map_or(0, |g| g.len());
    let d = order * n * n;
    let mut s = CMatrix::zeros(d, d);
    for g in family {
        for p in 0..n {
            for q in 0..n {
                // ⟨f, g⟩_{pq} = a* v with a[(x,p,r)] = √w g(x)_{qr}
                let mut a = nalgebra::DVector::<Complex64>::zeros(d);
                for (x, gx) in g.iter().enumerate() {
                    for r in 0..n {
                        a[(x * n + p) * n + r] = gx[(q, r)] * w.sqrt();
                    }
                }
                s += &a * a.adjoint();
            }
        }
    }
    s
}

pub fn family_frame_operator(family: &SignalFamily) -> CMatrix {
    let sp = family.space();
    frame_operator(sp.measure().w_g, sp.n(), &family_samples(family))
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix, ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * c(0.5);
    let e = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let vals = order.iter().map(|&k| e.eigenvalues[k]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), order.len(), |i, j| e.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

pub fn lambda_min(m: &CMatrix) -> f64 {
    eigh(m).0.first().copied().unwrap_or(0.0)
}

pub fn lambda_max(m: &CMatrix) -> f64 {
    eigh(m).0.last().copied().unwrap_or(0.0)
}

/// Orthonormal basis of `ker m` (singular values below `rel·σ_max`), from a full SVD.
pub fn kernel(m: &CMatrix, rel: f64) -> CMatrix {
    let d = m.ncols();
    // pad to square so that `v_t` spans the whole domain
    let mut sq = CMatrix::zeros(d.max(m.nrows()), d);
    sq.rows_mut(0, m.nrows()).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cols: Vec<usize> = (0..d).filter(|&k| top == 0.0 || svd.singular_values[k] <= rel * top).collect();
    CMatrix::from_fn(d, cols.len(), |i, j| vt[(cols[j], i)].conj())
}

/// `ker a ⊆ ker b`, checked as `‖b P_{ker a}‖ ≤ rel·‖b‖`.
pub fn kernel_included(a: &CMatrix, b: &CMatrix, rel: f64) -> bool {
    let k = kernel(a, rel);
    if k.ncols() == 0 {
        return true;
    }
    let norm = |m: &CMatrix| m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max);
    norm(&(b * &k)) <= rel * norm(b).max(f64::MIN_POSITIVE)
}

/// Moore-Penrose pseudo-inverse of a Hermitian PSD matrix raised to `power`.
pub fn psd_pseudo_power(m: &CMatrix, power: f64, rel: f64) -> CMatrix {
    let (vals, vecs) = eigh(m);
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for (k, &v) in vals.iter().enumerate() {
        if v > rel * top && v > 0.0 {
            let col = vecs.column(k);
            out += col * col.adjoint() * c(v.powf(power));
        }
    }
    out
}

/// Optimal `β` for `S ⪯ βΘ*Θ` through the pseudo-inverse of `Θ`: `λ_max(Θ⁺* S Θ⁺)`.
pub fn beta_via_pinv(s: &CMatrix, theta: &CMatrix) -> f64 {
    let pinv = theta.clone().pseudo_inverse(1e-12 * max_abs(theta).max(1.0)).expect("svd converges");
    lambda_max(&(pinv.adjoint() * s * pinv))
}

/// Optimal `α` for `αΘΘ* ⪯ S` through `S^{+1/2}`: `1/λ_max(S^{+1/2} ΘΘ* S^{+1/2})`.
pub fn alpha_via_sqrt(s: &CMatrix, theta: &CMatrix) -> f64 {
    let h = psd_pseudo_power(s, -0.5, 1e-9);
    1.0 / lambda_max(&(&h * theta * theta.adjoint() * &h))
}
