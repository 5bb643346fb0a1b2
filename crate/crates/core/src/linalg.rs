//! Dense complex matrix helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> Mat {
    Mat::zeros(r, c)
}

/// Kronecker product with `a` as the major index.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Mat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x == ZERO {
                continue;
            }
            for p in 0..br {
                for q in 0..bc {
                    out[(i * br + p, j * bc + q)] = x * b[(p, q)];
                }
            }
        }
    }
    out
}

/// Thin SVD: left singular vectors when requested, singular values descending.
fn svd(a: &Mat, want_u: bool) -> (Option<Mat>, Vec<f64>) {
    let (r, c) = a.shape();
    let f = faer::Mat::<C64>::from_fn(r, c, |i, j| a[(i, j)]);
    let k = r.min(c);
    if !want_u {
        let s = f.singular_values().expect("svd converges");
        return (None, s);
    }
    let d = f.thin_svd().expect("svd converges");
    let u = Mat::from_fn(r, k, |i, j| d.U()[(i, j)]);
    let s = (0..k).map(|i| d.S()[i].re).collect();
    (Some(u), s)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s = svd(a, false).1;
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s.truncate(a.nrows().min(a.ncols()));
    s
}

/// Operator 2-norm; zero for empty matrices.
pub fn norm2(a: &Mat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.iter().all(|x| *x == ZERO) {
        return 0.0;
    }
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Singular values at or below this are treated as rounding noise whatever the scale.
pub const NOISE_FLOOR: f64 = 1e-12;

/// Orthonormal basis of the column span, rank by `σ > tol·σ_max·max(rows, cols)`
/// (never below [`NOISE_FLOOR`]).
pub fn orth(a: &Mat, tol: f64) -> Mat {
    orth_with(a, |smax, r, c| (tol * smax * (r.max(c) as f64)).max(NOISE_FLOOR))
}

/// Orthonormal basis of the column span keeping singular values above `thr`.
pub fn orth_abs(a: &Mat, thr: f64) -> Mat {
    orth_with(a, |_, _, _| thr)
}

fn orth_with(a: &Mat, threshold: impl Fn(f64, usize, usize) -> f64) -> Mat {
    let (r, cdim) = a.shape();
    if r == 0 || cdim == 0 || a.iter().all(|x| *x == ZERO) {
        return Mat::zeros(r, 0);
    }
    let (u, s) = svd(a, true);
    let u = u.expect("left singular vectors");
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let thr = threshold(smax, r, cdim);
    let mut idx: Vec<usize> = (0..s.len()).filter(|&i| s[i] > thr).collect();
    idx.sort_by(|&x, &y| s[y].partial_cmp(&s[x]).unwrap());
    let mut out = Mat::zeros(r, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the span of an orthonormal `q`.
pub fn orth_complement(q: &Mat, tol: f64) -> Mat {
    let n = q.nrows();
    if q.ncols() == 0 {
        return identity(n);
    }
    let p = identity(n) - q * q.adjoint();
    orth(&p, tol)
}

pub fn hcat(a: &Mat, b: &Mat) -> Mat {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = Mat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Diagonal 0/1 matrix selecting the given indices.
pub fn selector(dim: usize, keep: impl Fn(usize) -> bool) -> Mat {
    let mut m = Mat::zeros(dim, dim);
    for i in 0..dim {
        if keep(i) {
            m[(i, i)] = ONE;
        }
    }
    m
}

pub fn from_real(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Mat {
    Mat::from_fn(rows, cols, |i, j| c(f(i, j), 0.0))
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}
