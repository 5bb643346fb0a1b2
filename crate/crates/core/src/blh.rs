//! Inner factorization of submodules of `F²_n ⊗ C^k`, Fourier analysis of
//! multi-analytic operators, and the commutant model.
//!
//! Coefficient tables are keyed by the index `β` of `Θ = Σ R^β ⊗ θ_β`; the
//! coefficient read at `e_α` from the vacuum column is `θ_{α^t}`.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{complex_rows, right_tuple, word_matrix, OperatorMatrix, TruncatedFock};
use crate::linalg::{hcat, identity, kron, norm2, orth_abs, Mat};
use crate::modana::{wandering_subspace, TupleSystem, ASSERT_TOL};
use crate::subspace::{distance, intersect, Subspace};
use crate::words::{enumerate_words, flip, Word};

#[derive(Clone, Debug)]
pub struct MultiAnalytic {
    pub n: usize,
    pub d: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub max_degree: usize,
    pub coeffs: BTreeMap<Word, Mat>,
    pub matrix: OperatorMatrix,
}

impl MultiAnalytic {
    /// `θ_β`, zero when absent.
    pub fn coefficient(&self, beta: &Word) -> Mat {
        self.coeffs.get(beta).cloned().unwrap_or_else(|| Mat::zeros(self.target_dim, self.source_dim))
    }

    /// The coefficient read at `e_α`, namely `θ_{α^t}`.
    pub fn read_at(&self, alpha: &Word) -> Mat {
        self.coefficient(&flip(alpha))
    }

    /// Largest `|β|` whose coefficient exceeds `tol` in norm.
    pub fn support_degree(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|(_, m)| norm2(m) > tol).map(|(w, _)| w.len()).max().unwrap_or(0)
    }
}

impl Serialize for MultiAnalytic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            word: &'a Word,
            matrix: Vec<Vec<[f64; 2]>>,
        }
        let table: Vec<Entry> = self
            .coeffs
            .iter()
            .filter(|(_, m)| m.iter().any(|x| x.norm() > 0.0))
            .map(|(w, m)| Entry { word: w, matrix: complex_rows(m) })
            .collect();
        let mut st = s.serialize_struct("MultiAnalytic", 5)?;
        st.serialize_field("alphabet", &self.n)?;
        st.serialize_field("source_dim", &self.source_dim)?;
        st.serialize_field("target_dim", &self.target_dim)?;
        st.serialize_field("max_degree", &self.max_degree)?;
        st.serialize_field("coefficients", &table)?;
        st.end()
    }
}

/// `Σ_β R^β ⊗ θ_β` on `F²_{n,d} ⊗ C^src → F²_{n,d} ⊗ C^tgt`.
pub fn synthesize(space: &TruncatedFock, coeffs: BTreeMap<Word, Mat>, source_dim: usize, target_dim: usize) -> MultiAnalytic {
    let rt = right_tuple(space);
    let dim = space.dim();
    let mut m = Mat::zeros(dim * target_dim, dim * source_dim);
    let mut max_degree = 0;
    for (beta, theta) in &coeffs {
        if beta.len() > space.d {
            continue;
        }
        max_degree = max_degree.max(beta.len());
        let rb = word_matrix(&rt, beta).unwrap();
        m += kron(&rb, theta);
    }
    let matrix = OperatorMatrix::between(
        m,
        space.desc().with_coeff(source_dim),
        space.desc().with_coeff(target_dim),
    );
    MultiAnalytic { n: space.n, d: space.d, source_dim, target_dim, max_degree, coeffs, matrix }
}

/// Span of the standard basis vectors selected by `keep`.
pub fn coordinate_subspace(dim: usize, keep: impl Fn(usize) -> bool) -> Subspace {
    let idx: Vec<usize> = (0..dim).filter(|&i| keep(i)).collect();
    Subspace::from_frame(Mat::from_fn(dim, idx.len(), |i, j| {
        if i == idx[j] {
            crate::linalg::ONE
        } else {
            crate::linalg::ZERO
        }
    }))
}

/// Columns of the domain whose Fock word has length ≤ w.
pub fn window_columns(space: &TruncatedFock, k: usize, w: usize) -> Vec<usize> {
    (0..space.dim() * k).filter(|c| space.degree_of(c / k) <= w).collect()
}

pub fn select_columns(m: &Mat, cols: &[usize]) -> Mat {
    Mat::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// `max_i ‖((S_i⊗I)Θ − Θ(S_i⊗I))‖` on domain degrees ≤ d−1.
pub fn intertwining_residual(theta: &Mat, space: &TruncatedFock, e_dim: usize, estar_dim: usize) -> f64 {
    let src = TupleSystem::shift(space, e_dim);
    let tgt = TupleSystem::shift(space, estar_dim);
    let cols = window_columns(space, e_dim, space.d.saturating_sub(1));
    src.ops
        .iter()
        .zip(&tgt.ops)
        .map(|(a, b)| norm2(&select_columns(&(&b.entries * theta - theta * &a.entries), &cols)))
        .fold(0.0, f64::max)
}

/// Reads `θ_{α^t}` off the vacuum column block at `e_α` for `|α| ≤ max_deg`.
pub fn fourier_coefficients(
    theta: &Mat,
    space: &TruncatedFock,
    e_dim: usize,
    estar_dim: usize,
    max_deg: usize,
) -> Result<BTreeMap<Word, Mat>> {
    let dim = space.dim();
    if theta.nrows() != dim * estar_dim || theta.ncols() != dim * e_dim {
        return Err(Error::DimensionMismatch { expected: dim * e_dim, found: theta.ncols() });
    }
    let residual = intertwining_residual(theta, space, e_dim, estar_dim);
    if residual > ASSERT_TOL {
        return Err(Error::NotModuleMap { residual });
    }
    let mut out = BTreeMap::new();
    for alpha in enumerate_words(space.n, max_deg.min(space.d)) {
        let block = theta.view((alpha.index() * estar_dim, 0), (estar_dim, e_dim)).into_owned();
        out.insert(flip(&alpha), block);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BLHFactorization {
    #[serde(rename = "Theta")]
    pub theta: MultiAnalytic,
    #[serde(rename = "E")]
    pub e: Subspace,
    pub e_dim: usize,
    pub coeff_dim: usize,
    /// Largest Fock degree carried by a vector of E.
    pub e_degree: usize,
    /// Domain window `|α| ≤ window` on which Θ is isometric.
    pub window: usize,
    pub graded: bool,
    /// Grading key of each column of the E frame.
    #[serde(skip)]
    pub col_keys: Vec<Vec<usize>>,
    pub inner_residual: f64,
    pub range_distance: f64,
    pub full_range_distance: f64,
}

/// Splits `E` into homogeneous pieces for the grading `keys[ambient index]`.
/// Returns the frame and each column's key, or `None` when `E` is not graded.
pub fn graded_frame(e: &Subspace, keys: &[Vec<usize>]) -> Option<(Mat, Vec<Vec<usize>>)> {
    let mut distinct: Vec<Vec<usize>> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    let mut frame = Mat::zeros(e.ambient_dim, 0);
    let mut col_keys = Vec::new();
    for key in &distinct {
        let sel = crate::linalg::selector(e.ambient_dim, |i| &keys[i] == key);
        let piece = orth_abs(&(&sel * &e.frame), 1e-8);
        for _ in 0..piece.ncols() {
            col_keys.push(key.clone());
        }
        frame = hcat(&frame, &piece);
    }
    if frame.ncols() != e.dim() {
        return None;
    }
    let candidate = Subspace::from_frame(frame.clone());
    match distance(&candidate, e) {
        Ok(d) if d < ASSERT_TOL => Some((frame, col_keys)),
        _ => None,
    }
}

/// Largest first-key value carrying non-negligible mass in the frame.
fn support_degree(frame: &Mat, keys: &[Vec<usize>], factor: usize) -> usize {
    let mut best = 0;
    for i in 0..frame.nrows() {
        if frame.row(i).iter().any(|x| x.norm() > 1e-9) {
            best = best.max(keys[i][factor]);
        }
    }
    best
}

pub(crate) struct GradedWandering {
    pub frame: Mat,
    pub col_keys: Vec<Vec<usize>>,
    pub graded: bool,
}

pub(crate) fn graded_wandering(e: &Subspace, keys: &[Vec<usize>]) -> GradedWandering {
    match graded_frame(e, keys) {
        Some((frame, col_keys)) => GradedWandering { frame, col_keys, graded: true },
        None => {
            let top: Vec<usize> = (0..keys[0].len()).map(|f| support_degree(&e.frame, keys, f)).collect();
            GradedWandering { frame: e.frame.clone(), col_keys: vec![top; e.dim()], graded: false }
        }
    }
}

/// Θ with columns `(S^α ⊗ I) η_c` for every `|α| ≤ d`.
pub(crate) fn theta_matrix(sys: &TupleSystem, d: usize, e_frame: &Mat) -> Mat {
    let mut theta = Mat::zeros(sys.dim(), 0);
    for xa in sys.word_matrices(d) {
        theta = hcat(&theta, &(xa * e_frame));
    }
    theta
}

pub fn blh_factorize(m: &Subspace, coeff_dim: usize, space: &TruncatedFock) -> Result<BLHFactorization> {
    let keys: Vec<Vec<usize>> = (0..m.ambient_dim).map(|i| vec![space.degree_of(i / coeff_dim)]).collect();
    factorize_with_grading(m, coeff_dim, space, &keys)
}

pub fn factorize_with_grading(
    m: &Subspace,
    coeff_dim: usize,
    space: &TruncatedFock,
    keys: &[Vec<usize>],
) -> Result<BLHFactorization> {
    if m.ambient_dim != space.dim() * coeff_dim {
        return Err(Error::DimensionMismatch { expected: space.dim() * coeff_dim, found: m.ambient_dim });
    }
    let sys = TupleSystem::shift(space, coeff_dim);
    let analysis = wandering_subspace(m, &sys)?;
    let gw = graded_wandering(&analysis.e, keys);
    let e_dim = gw.frame.ncols();
    let e_degree = gw.col_keys.iter().map(|k| k[0]).max().unwrap_or(0);
    let window = space.d.saturating_sub(e_degree);
    let theta = theta_matrix(&sys, space.d, &gw.frame);

    let cols = window_columns(space, e_dim, window);
    let tw = select_columns(&theta, &cols);
    let inner_residual = norm2(&(tw.adjoint() * &tw - identity(cols.len())));

    let range = Subspace::span(&theta, m.tol);
    let full_range_distance = distance(&range, m)?;
    let out_window = coordinate_subspace(m.ambient_dim, |i| keys[i][0] <= window);
    let range_distance = distance(&intersect(&range, &out_window)?, &intersect(m, &out_window)?)?;

    let coeffs = fourier_coefficients(&theta, space, e_dim, coeff_dim, space.d)?;
    let mut ma = synthesize(space, coeffs, e_dim, coeff_dim);
    ma.matrix = OperatorMatrix {
        entries: theta,
        domain: space.desc().with_coeff(e_dim),
        codomain: space.desc().with_coeff(coeff_dim),
        valid_degree: window,
        degree_shift: 0,
    };
    Ok(BLHFactorization {
        theta: ma,
        e: Subspace::from_frame(gw.frame),
        e_dim,
        coeff_dim,
        e_degree,
        window,
        graded: gw.graded,
        col_keys: gw.col_keys,
        inner_residual,
        range_distance,
        full_range_distance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Uniqueness {
    #[serde(serialize_with = "ser_mat")]
    pub tau: Mat,
    pub residual: f64,
    pub unitarity_residual: f64,
    pub coanalytic_residual: f64,
}

fn ser_mat<S: Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    complex_rows(m).serialize(s)
}

/// Finds `τ` with `Θ_2 = Θ_1 (I ⊗ τ)` on the common window.
pub fn uniqueness_unitary(f1: &BLHFactorization, f2: &BLHFactorization, space: &TruncatedFock) -> Result<Uniqueness> {
    let t1 = &f1.theta.matrix.entries;
    let t2 = &f2.theta.matrix.entries;
    let r1 = Subspace::span(t1, 1e-10);
    let r2 = Subspace::span(t2, 1e-10);
    let dist = distance(&r1, &r2)?;
    if dist > ASSERT_TOL {
        return Err(Error::RangesDiffer { distance: dist });
    }
    let (e1, e2) = (f1.e_dim, f2.e_dim);
    let k = t1.adjoint() * t2;
    let tau = k.view((0, 0), (e1, e2)).into_owned();
    if e1 != e2 {
        return Err(Error::NotUnitary { residual: 1.0 });
    }
    let unitarity_residual =
        norm2(&(tau.adjoint() * &tau - identity(e1))).max(norm2(&(&tau * tau.adjoint() - identity(e1))));
    if unitarity_residual > ASSERT_TOL {
        return Err(Error::NotUnitary { residual: unitarity_residual });
    }
    let w = f1.window.min(f2.window);
    let cols = window_columns(space, e2, w);
    let diff = t2 - t1 * kron(&identity(space.dim()), &tau);
    let residual = norm2(&select_columns(&diff, &cols));
    // nonconstant coefficients of K read from its vacuum column on the window
    let vac_col = k.view((0, 0), (k.nrows(), e2)).into_owned();
    let rows: Vec<usize> = (e1..space.dim() * e1).filter(|r| space.degree_of(r / e1) <= w).collect();
    let coanalytic_residual = norm2(&Mat::from_fn(rows.len(), e2, |i, j| vac_col[(rows[i], j)]));
    Ok(Uniqueness { tau, residual, unitarity_residual, coanalytic_residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutantRepresentation {
    #[serde(rename = "Phi")]
    pub phi: MultiAnalytic,
    pub commutation_residual: f64,
    pub model_residual: f64,
}

/// Model of an operator `C` commuting with `X|_M`: `φ_{α^t} = P_E V^{α*} C|_E`.
pub fn commutant_represent(
    c: &Mat,
    m: &Subspace,
    sys: &TupleSystem,
    target_degree: usize,
) -> Result<CommutantRepresentation> {
    let f = &m.frame;
    let cm = f.adjoint() * c * f;
    let v = sys.restrict(m);
    let commutation_residual = v
        .ops
        .iter()
        .map(|vi| norm2(&(&cm * &vi.entries - &vi.entries * &cm)))
        .fold(0.0, f64::max);
    if commutation_residual > ASSERT_TOL {
        return Err(Error::NotInCommutant { residual: commutation_residual });
    }
    let lv = crate::modana::canonical_unitary(m, sys, target_degree)?;
    let e_m = f.adjoint() * &lv.wandering.frame;
    let ed = e_m.ncols();
    let mut coeffs = BTreeMap::new();
    let words = enumerate_words(v.len(), target_degree);
    for (alpha, va) in words.iter().zip(v.word_matrices(target_degree)) {
        coeffs.insert(flip(alpha), e_m.adjoint() * va.adjoint() * &cm * &e_m);
    }
    let model_space = TruncatedFock::new(v.len(), target_degree);
    let phi = synthesize(&model_space, coeffs, ed, ed);
    let l = &lv.matrix.entries;
    let lcl = l * &cm * l.adjoint();
    let s = phi.support_degree(1e-12);
    let cols = window_columns(&model_space, ed, target_degree.saturating_sub(s));
    let model_residual = norm2(&select_columns(&(lcl - &phi.matrix.entries), &cols));
    Ok(CommutantRepresentation { phi, commutation_residual, model_residual })
}
