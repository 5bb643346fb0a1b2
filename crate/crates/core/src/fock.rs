//! Truncated Fock spaces, creation operators and Fock n-modules.
//!
//! `S_i` annihilates the top degree, so every adjoint is exact and only
//! degree-raising identities need a window.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, max_abs, norm2, Mat, Vector, ONE, ZERO};
use crate::words::{enumerate_words, flip, word_count, Word};

/// Shape of a space: tensor factors `(n_i, d_i)` followed by a flat coefficient space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceDesc {
    pub factors: Vec<(usize, usize)>,
    pub coeff_dim: usize,
}

impl SpaceDesc {
    pub fn fock(n: usize, d: usize) -> Self {
        SpaceDesc { factors: vec![(n, d)], coeff_dim: 1 }
    }

    pub fn flat(k: usize) -> Self {
        SpaceDesc { factors: Vec::new(), coeff_dim: k }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|&(n, d)| word_count(n, d)).product::<usize>() * self.coeff_dim
    }

    pub fn max_degree(&self) -> usize {
        self.factors.iter().map(|f| f.1).max().unwrap_or(0)
    }

    pub fn with_coeff(&self, k: usize) -> Self {
        SpaceDesc { factors: self.factors.clone(), coeff_dim: self.coeff_dim * k }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFock {
    pub n: usize,
    pub d: usize,
    pub basis: Vec<Word>,
}

impl TruncatedFock {
    pub fn new(n: usize, d: usize) -> Self {
        TruncatedFock { n, d, basis: enumerate_words(n, d) }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn desc(&self) -> SpaceDesc {
        SpaceDesc::fock(self.n, self.d)
    }

    pub fn degree_of(&self, index: usize) -> usize {
        self.basis[index].len()
    }

    pub fn vacuum(&self) -> Vector {
        basis_vector(self.dim(), 0)
    }

    pub fn basis_vector(&self, w: &Word) -> Vector {
        basis_vector(self.dim(), w.index())
    }

    pub fn word(&self, letters: &[usize]) -> Result<Word> {
        Word::new(letters.to_vec(), self.n)
    }

    /// Diagonal projection onto degrees in `lo..=hi`.
    pub fn degree_projection(&self, lo: usize, hi: usize) -> Mat {
        crate::linalg::selector(self.dim(), |i| {
            let m = self.degree_of(i);
            m >= lo && m <= hi
        })
    }
}

pub fn basis_vector(dim: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(dim);
    v[i] = ONE;
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: Mat,
    pub domain: SpaceDesc,
    pub codomain: SpaceDesc,
    pub valid_degree: usize,
    /// Degree raised by the operator (negative for adjoints of creations).
    pub degree_shift: i64,
}

impl OperatorMatrix {
    /// Square operator with no truncation effect.
    pub fn exact(entries: Mat, space: SpaceDesc) -> Self {
        let d = space.max_degree();
        OperatorMatrix { entries, domain: space.clone(), codomain: space, valid_degree: d, degree_shift: 0 }
    }

    pub fn between(entries: Mat, domain: SpaceDesc, codomain: SpaceDesc) -> Self {
        let d = domain.max_degree().min(codomain.max_degree());
        OperatorMatrix { entries, domain, codomain, valid_degree: d, degree_shift: 0 }
    }

    pub fn identity(space: SpaceDesc) -> Self {
        let n = space.dim();
        OperatorMatrix::exact(identity(n), space)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if self.entries.ncols() != other.entries.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.entries.ncols(),
                found: other.entries.nrows(),
            });
        }
        let cap = self.codomain.max_degree().min(other.domain.max_degree()) as i64;
        let v = (other.valid_degree as i64)
            .min(self.valid_degree as i64 - other.degree_shift)
            .min(cap)
            .max(0);
        Ok(OperatorMatrix {
            entries: &self.entries * &other.entries,
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            valid_degree: v as usize,
            degree_shift: self.degree_shift + other.degree_shift,
        })
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        let d = self.domain.max_degree().min(self.codomain.max_degree());
        OperatorMatrix {
            entries: self.entries.adjoint(),
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            valid_degree: d,
            degree_shift: -self.degree_shift,
        }
    }

    /// `self ⊗ I_k` on the coefficient side.
    pub fn tensor_identity(&self, k: usize) -> OperatorMatrix {
        OperatorMatrix {
            entries: kron(&self.entries, &identity(k)),
            domain: self.domain.with_coeff(k),
            codomain: self.codomain.with_coeff(k),
            valid_degree: self.valid_degree,
            degree_shift: self.degree_shift,
        }
    }
}

impl Serialize for OperatorMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OperatorMatrix", 6)?;
        st.serialize_field("rows", &self.entries.nrows())?;
        st.serialize_field("cols", &self.entries.ncols())?;
        st.serialize_field("domain", &self.domain)?;
        st.serialize_field("codomain", &self.codomain)?;
        st.serialize_field("valid_degree", &self.valid_degree)?;
        st.serialize_field("entries", &complex_rows(&self.entries))?;
        st.end()
    }
}

/// Row-major `[re, im]` pairs.
pub fn complex_rows(m: &Mat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn check_generator(space: &TruncatedFock, i: usize) -> Result<()> {
    if i == 0 || i > space.n {
        return Err(Error::IndexOutOfRange { index: i, n: space.n });
    }
    Ok(())
}

fn creation(space: &TruncatedFock, i: usize, left: bool) -> Result<OperatorMatrix> {
    check_generator(space, i)?;
    let dim = space.dim();
    let mut m = Mat::zeros(dim, dim);
    let g = Word::letter(i, space.n)?;
    for (col, w) in space.basis.iter().enumerate() {
        if w.len() < space.d {
            let target = if left { g.concat(w) } else { w.concat(&g) };
            m[(target.index(), col)] = ONE;
        }
    }
    Ok(OperatorMatrix {
        entries: m,
        domain: space.desc(),
        codomain: space.desc(),
        valid_degree: space.d.saturating_sub(1),
        degree_shift: 1,
    })
}

/// `S_i e_α = e_{g_i α}`, zero on the top degree.
pub fn left_creation(space: &TruncatedFock, i: usize) -> Result<OperatorMatrix> {
    creation(space, i, true)
}

/// `R_i e_α = e_{α g_i}`, zero on the top degree.
pub fn right_creation(space: &TruncatedFock, i: usize) -> Result<OperatorMatrix> {
    creation(space, i, false)
}

pub fn left_tuple(space: &TruncatedFock) -> Vec<OperatorMatrix> {
    (1..=space.n).map(|i| left_creation(space, i).unwrap()).collect()
}

pub fn right_tuple(space: &TruncatedFock) -> Vec<OperatorMatrix> {
    (1..=space.n).map(|i| right_creation(space, i).unwrap()).collect()
}

/// `U_t e_α = e_{α^t}`.
pub fn flip_unitary(space: &TruncatedFock) -> OperatorMatrix {
    let dim = space.dim();
    let mut m = Mat::zeros(dim, dim);
    for (col, w) in space.basis.iter().enumerate() {
        m[(flip(w).index(), col)] = ONE;
    }
    OperatorMatrix::exact(m, space.desc())
}

/// `I − Σ (S_i⊗I)(S_i⊗I)*`.
pub fn vacuum_defect(space: &TruncatedFock, coeff_dim: usize) -> OperatorMatrix {
    let dim = space.dim();
    let mut acc = identity(dim);
    for s in left_tuple(space) {
        acc -= &s.entries * s.entries.adjoint();
    }
    OperatorMatrix::exact(kron(&acc, &identity(coeff_dim)), space.desc().with_coeff(coeff_dim))
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraResiduals {
    /// `max ‖S_i*S_j − δ_ij I‖` on degrees ≤ d − 1.
    pub adjoint: f64,
    /// `max |Σ S_i S_i* + P_vac − I|`, zero when exact.
    pub projection: f64,
    /// `max ‖R^α − U_t S^α U_t‖` over `|α| ≤ max_word` on the window.
    pub flip: f64,
}

pub fn algebra_residuals(space: &TruncatedFock, max_word: usize) -> AlgebraResiduals {
    let s = left_tuple(space);
    let r = right_tuple(space);
    let low = space.degree_projection(0, space.d.saturating_sub(1));
    let mut adjoint: f64 = 0.0;
    for (i, si) in s.iter().enumerate() {
        for (j, sj) in s.iter().enumerate() {
            let target = if i == j { low.clone() } else { Mat::zeros(space.dim(), space.dim()) };
            adjoint = adjoint.max(norm2(&(si.entries.adjoint() * &sj.entries * &low - target)));
        }
    }
    let mut acc = space.degree_projection(0, 0);
    for si in &s {
        acc += &si.entries * si.entries.adjoint();
    }
    let projection = max_abs(&(acc - identity(space.dim())));
    let u = flip_unitary(space).entries;
    let mut flip_res: f64 = 0.0;
    for w in enumerate_words(space.n, max_word.min(space.d)) {
        let window = space.degree_projection(0, space.d - w.len());
        let diff = (word_matrix(&r, &w).unwrap() - &u * word_matrix(&s, &w).unwrap() * &u) * window;
        flip_res = flip_res.max(norm2(&diff));
    }
    AlgebraResiduals { adjoint, projection, flip: flip_res }
}

/// `X^α = X_{i_1} ⋯ X_{i_m}` as a matrix.
pub fn word_matrix(ops: &[OperatorMatrix], w: &Word) -> Result<Mat> {
    let dim = ops.first().map(|o| o.dim()).unwrap_or(0);
    let mut acc = identity(dim);
    for &l in w.letters().iter().rev() {
        let op = ops.get(l - 1).ok_or(Error::IndexOutOfRange { index: l, n: ops.len() })?;
        acc = &op.entries * acc;
    }
    Ok(acc)
}

/// `X^α v`, applying the last letter first.
pub fn word_apply(ops: &[OperatorMatrix], w: &Word, v: &Vector) -> Result<Vector> {
    let mut out = v.clone();
    for &l in w.letters().iter().rev() {
        let op = ops.get(l - 1).ok_or(Error::IndexOutOfRange { index: l, n: ops.len() })?;
        if op.entries.ncols() != out.len() {
            return Err(Error::DimensionMismatch { expected: op.entries.ncols(), found: out.len() });
        }
        out = &op.entries * out;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockNModule {
    pub factors: Vec<TruncatedFock>,
}

impl FockNModule {
    pub fn new(shape: &[(usize, usize)]) -> Self {
        assert!(!shape.is_empty(), "at least one factor");
        FockNModule { factors: shape.iter().map(|&(n, d)| TruncatedFock::new(n, d)).collect() }
    }

    pub fn k(&self) -> usize {
        self.factors.len()
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.dim()).product()
    }

    pub fn desc(&self) -> SpaceDesc {
        SpaceDesc { factors: self.factors.iter().map(|f| (f.n, f.d)).collect(), coeff_dim: 1 }
    }

    /// Dimension of the tensor of the factors after the first.
    pub fn rest_dim(&self) -> usize {
        self.factors[1..].iter().map(|f| f.dim()).product()
    }

    /// Per-factor word lengths of a basis index.
    pub fn multidegree(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.k()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            out[i] = f.degree_of(index % f.dim());
            index /= f.dim();
        }
        out
    }

    pub fn basis_index(&self, words: &[Word]) -> usize {
        words.iter().zip(&self.factors).fold(0, |acc, (w, f)| acc * f.dim() + w.index())
    }

    /// Reorders factors; returns the permuted module and the basis permutation matrix
    /// `P` with `P e_{(α_1..α_k)} = e_{(α_{π(1)}..α_{π(k)})}`.
    pub fn permuted(&self, perm: &[usize]) -> Result<(FockNModule, Mat)> {
        let k = self.k();
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::Invalid(format!("bad factor permutation {perm:?}")));
            }
            seen[p] = true;
        }
        if perm.len() != k {
            return Err(Error::Invalid(format!("bad factor permutation {perm:?}")));
        }
        let target = FockNModule { factors: perm.iter().map(|&p| self.factors[p].clone()).collect() };
        let dim = self.dim();
        let mut m = Mat::zeros(dim, dim);
        for idx in 0..dim {
            let mut rem = idx;
            let mut parts = vec![0; k];
            for i in (0..k).rev() {
                parts[i] = rem % self.factors[i].dim();
                rem /= self.factors[i].dim();
            }
            let new = perm.iter().zip(&target.factors).fold(0, |acc, (&p, f)| acc * f.dim() + parts[p]);
            m[(new, idx)] = ONE;
        }
        Ok((target, m))
    }

    fn embed(&self, i: usize, local: &Mat) -> Mat {
        let mut acc = identity(1);
        for (p, f) in self.factors.iter().enumerate() {
            let piece = if p == i { local.clone() } else { identity(f.dim()) };
            acc = kron(&acc, &piece);
        }
        acc
    }

    fn bold(&self, i: usize, j: usize, left: bool) -> Result<OperatorMatrix> {
        if i == 0 || i > self.k() {
            return Err(Error::IndexOutOfRange { index: i, n: self.k() });
        }
        let f = &self.factors[i - 1];
        let local = if left { left_creation(f, j)? } else { right_creation(f, j)? };
        Ok(OperatorMatrix {
            entries: self.embed(i - 1, &local.entries),
            domain: self.desc(),
            codomain: self.desc(),
            valid_degree: local.valid_degree,
            degree_shift: 1,
        })
    }

    /// Operator on factor `i` (1-based) embedded with identities elsewhere.
    pub fn embed_local(&self, i: usize, local: &Mat) -> Mat {
        self.embed(i - 1, local)
    }

    /// Whether a basis index has every factor degree within the given bounds.
    pub fn degree_selector(&self, bound: impl Fn(usize, usize) -> bool) -> Mat {
        crate::linalg::selector(self.dim(), |idx| {
            self.multidegree(idx).iter().enumerate().all(|(i, &m)| bound(i, m))
        })
    }

    pub fn vacuum(&self) -> Vector {
        basis_vector(self.dim(), 0)
    }
}

/// `S_ij`: `S_j` on factor `i`, identity elsewhere (both 1-based).
pub fn bold_creation(module: &FockNModule, i: usize, j: usize) -> Result<OperatorMatrix> {
    module.bold(i, j, true)
}

/// `R_ij`: `R_j` on factor `i`, identity elsewhere.
pub fn bold_right_creation(module: &FockNModule, i: usize, j: usize) -> Result<OperatorMatrix> {
    module.bold(i, j, false)
}

/// All bold creations, ordered by factor then generator.
pub fn bold_tuple(module: &FockNModule) -> Vec<OperatorMatrix> {
    let mut out = Vec::new();
    for (i, f) in module.factors.iter().enumerate() {
        for j in 1..=f.n {
            out.push(bold_creation(module, i + 1, j).unwrap());
        }
    }
    out
}

pub fn is_zero(m: &Mat) -> bool {
    m.iter().all(|x| *x == ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    #[test]
    fn creation_on_vacuum() {
        let f = TruncatedFock::new(2, 3);
        let s1 = left_creation(&f, 1).unwrap();
        let r1 = right_creation(&f, 1).unwrap();
        let e1 = f.basis_vector(&f.word(&[1]).unwrap());
        assert_eq!(&s1.entries * f.vacuum(), e1);
        assert_eq!(&r1.entries * f.vacuum(), e1);
    }

    #[test]
    fn top_degree_annihilated() {
        let f = TruncatedFock::new(2, 3);
        let s1 = left_creation(&f, 1).unwrap();
        let top = f.basis_vector(&f.word(&[2, 1, 2]).unwrap());
        assert!((&s1.entries * top).iter().all(|x| *x == ZERO));
        assert_eq!(s1.valid_degree, 2);
    }

    #[test]
    fn index_out_of_range() {
        let f = TruncatedFock::new(2, 3);
        assert!(left_creation(&f, 3).is_err());
        assert!(left_creation(&f, 0).is_err());
    }

    #[test]
    fn flip_examples() {
        let f = TruncatedFock::new(2, 3);
        let u = flip_unitary(&f);
        let a = f.basis_vector(&f.word(&[1, 2]).unwrap());
        let b = f.basis_vector(&f.word(&[2, 1]).unwrap());
        assert_eq!(&u.entries * a, b);
        assert_eq!(&u.entries * &u.entries, identity(f.dim()));
    }

    #[test]
    fn vacuum_defect_is_vacuum_projection() {
        let f = TruncatedFock::new(2, 3);
        let p = vacuum_defect(&f, 1).entries;
        let mut expected = Mat::zeros(f.dim(), f.dim());
        expected[(0, 0)] = ONE;
        assert_eq!(p, expected);
        let p3 = vacuum_defect(&f, 3).entries;
        assert_eq!(p3.trace().re, 3.0);
        assert!(norm2(&(&p3 * &p3 - &p3)) < 1e-12);
    }

    #[test]
    fn word_apply_order() {
        let f = TruncatedFock::new(2, 3);
        let ops = left_tuple(&f);
        let w = f.word(&[1, 2]).unwrap();
        let out = word_apply(&ops, &w, &f.vacuum()).unwrap();
        assert_eq!(out, f.basis_vector(&w));
        assert_eq!(word_apply(&ops, &Word::empty(2), &f.vacuum()).unwrap(), f.vacuum());
        let m = word_matrix(&ops, &w).unwrap();
        let adj = &ops[1].entries.adjoint() * &ops[0].entries.adjoint();
        assert_eq!(m.adjoint(), adj);
    }

    #[test]
    fn bold_single_factor_is_left_creation() {
        let module = FockNModule::new(&[(2, 3)]);
        let f = TruncatedFock::new(2, 3);
        assert_eq!(bold_creation(&module, 1, 2).unwrap().entries, left_creation(&f, 2).unwrap().entries);
    }

    #[test]
    fn bold_commute_and_doubly_commute() {
        let module = FockNModule::new(&[(2, 2), (1, 3)]);
        let a = bold_creation(&module, 1, 2).unwrap().entries;
        let b = bold_creation(&module, 2, 1).unwrap().entries;
        assert!(norm2(&(&a * &b - &b * &a)) < 1e-12);
        assert!(norm2(&(a.adjoint() * &b - &b * a.adjoint())) < 1e-12);
    }

    #[test]
    fn compose_tracks_window() {
        let f = TruncatedFock::new(2, 4);
        let s = left_creation(&f, 1).unwrap();
        let ss = s.compose(&s).unwrap();
        assert_eq!(ss.valid_degree, 2);
        assert_eq!(ss.degree_shift, 2);
        let sa = s.adjoint().compose(&s).unwrap();
        assert_eq!(sa.valid_degree, 3);
    }

    #[test]
    fn multidegree_roundtrip() {
        let module = FockNModule::new(&[(2, 2), (1, 3)]);
        let w1 = Word::new(vec![2, 1], 2).unwrap();
        let w2 = Word::new(vec![1], 1).unwrap();
        let idx = module.basis_index(&[w1, w2]);
        assert_eq!(module.multidegree(idx), vec![2, 1]);
    }
}
