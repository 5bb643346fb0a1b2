//! Submodule analysis for operator tuples: generation, wandering subspaces,
//! purity profiles and the canonical module unitary.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{left_tuple, OperatorMatrix, SpaceDesc, TruncatedFock};
use crate::linalg::{hcat, identity, kron, norm2, orth, orth_complement, Mat, Vector};
use crate::subspace::{complement_within, sum_all, Subspace, DEFAULT_TOL};
use crate::words::{enumerate_words, Word};

/// Tolerance used when asserting that a computed identity holds.
pub const ASSERT_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct TupleSystem {
    pub ops: Vec<OperatorMatrix>,
    pub space: SpaceDesc,
}

impl TupleSystem {
    pub fn new(ops: Vec<OperatorMatrix>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::Invalid("empty tuple".into()))?;
        let dim = first.dim();
        for op in &ops {
            if op.entries.nrows() != dim || op.entries.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: op.entries.ncols() });
            }
        }
        let space = first.domain.clone();
        Ok(TupleSystem { ops, space })
    }

    pub fn from_mats(mats: Vec<Mat>, space: SpaceDesc) -> Result<Self> {
        let ops = mats.into_iter().map(|m| OperatorMatrix::exact(m, space.clone())).collect();
        TupleSystem::new(ops)
    }

    /// `(S_1⊗I_k, …, S_n⊗I_k)` on `F²_{n,d} ⊗ C^k`.
    pub fn shift(space: &TruncatedFock, k: usize) -> Self {
        TupleSystem::new(left_tuple(space).iter().map(|s| s.tensor_identity(k)).collect()).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn mats(&self) -> Vec<&Mat> {
        self.ops.iter().map(|o| &o.entries).collect()
    }

    /// The restricted tuple `P_M X_i|_M` in the coordinates of M's frame.
    pub fn restrict(&self, m: &Subspace) -> TupleSystem {
        let f = &m.frame;
        let mats = self.ops.iter().map(|o| f.adjoint() * &o.entries * f).collect();
        TupleSystem::from_mats(mats, SpaceDesc::flat(m.dim())).unwrap_or_else(|_| TupleSystem {
            ops: Vec::new(),
            space: SpaceDesc::flat(0),
        })
    }

    /// `X^α` for every word of length ≤ t, in graded-lex order.
    pub fn word_matrices(&self, t: usize) -> Vec<Mat> {
        let n = self.len();
        let words = enumerate_words(n, t);
        let mut out: Vec<Mat> = Vec::with_capacity(words.len());
        for w in &words {
            if w.is_empty() {
                out.push(identity(self.dim()));
            } else {
                let rest = Word::new(w.letters()[1..].to_vec(), n).unwrap();
                let m = &self.ops[w.letters()[0] - 1].entries * &out[rest.index()];
                out.push(m);
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SubmoduleAnalysis {
    pub m: Subspace,
    pub e: Subspace,
    pub residual: f64,
}

/// Smallest subspace containing the generators and invariant under every `X_i`.
pub fn generate_submodule(sys: &TupleSystem, generators: &[Vector]) -> Subspace {
    let dim = sys.dim();
    if generators.is_empty() {
        return Subspace::zero(dim);
    }
    let mut frame = orth(&Mat::from_columns(generators), DEFAULT_TOL);
    loop {
        let mut stacked = frame.clone();
        for op in &sys.ops {
            stacked = hcat(&stacked, &(&op.entries * &frame));
        }
        let next = orth(&stacked, DEFAULT_TOL);
        if next.ncols() == frame.ncols() {
            return Subspace::from_frame(next);
        }
        frame = next;
    }
}

/// `max_i ‖(I − P_M) X_i P_M‖`.
pub fn invariance_residual(m: &Subspace, mats: &[&Mat]) -> f64 {
    let f = &m.frame;
    mats.iter()
        .map(|x| {
            let xf = *x * f;
            norm2(&(&xf - f * (f.adjoint() * &xf)))
        })
        .fold(0.0, f64::max)
}

pub fn is_submodule(m: &Subspace, sys: &TupleSystem) -> (bool, f64) {
    let r = invariance_residual(m, &sys.mats());
    (r < ASSERT_TOL, r)
}

/// `E = M ⊖ Σ X_i M`.
pub fn wandering_subspace(m: &Subspace, sys: &TupleSystem) -> Result<SubmoduleAnalysis> {
    let (ok, residual) = is_submodule(m, sys);
    if !ok {
        return Err(Error::NotInvariant { residual });
    }
    let images: Vec<Subspace> =
        sys.ops.iter().map(|o| Subspace::span(&(&o.entries * &m.frame), m.tol)).collect();
    let range = sum_all(&images, m.ambient_dim, m.tol);
    let e = complement_within(m, &range)?;
    Ok(SubmoduleAnalysis { m: m.clone(), e, residual })
}

/// `⋂ ker (X_i|_M)*`, computed independently of [`wandering_subspace`].
pub fn wandering_by_kernels(m: &Subspace, sys: &TupleSystem) -> Subspace {
    let r = sys.restrict(m);
    if m.dim() == 0 {
        return Subspace::zero(m.ambient_dim);
    }
    // the kernel of the stacked adjoints is the complement of the span of the V_i columns
    let mut cols = Mat::zeros(m.dim(), 0);
    for op in &r.ops {
        cols = hcat(&cols, &op.entries);
    }
    let row_space = orth(&cols, m.tol);
    let kernel = orth_complement(&row_space, m.tol);
    Subspace::from_frame(&m.frame * kernel)
}

/// Entry m is `‖Σ_{|α|=m} X^α X^{α*}‖`.
pub fn purity_profile(sys: &TupleSystem, m_max: usize) -> Vec<f64> {
    let mut q = identity(sys.dim());
    let mut out = vec![norm2(&q)];
    for _ in 0..m_max {
        let mut next = Mat::zeros(sys.dim(), sys.dim());
        for op in &sys.ops {
            next += &op.entries * &q * op.entries.adjoint();
        }
        q = next;
        out.push(norm2(&q));
    }
    out
}

/// `L_V : M → F²_{n,t} ⊗ E`.
#[derive(Clone, Debug, Serialize)]
pub struct CanonicalUnitary {
    pub matrix: OperatorMatrix,
    pub wandering: Subspace,
    pub target_degree: usize,
    pub isometry_residual: f64,
}

pub fn default_target_degree(d: usize, max_generator_degree: usize) -> usize {
    d.saturating_sub(max_generator_degree)
}

pub fn canonical_unitary(m: &Subspace, sys: &TupleSystem, target_degree: usize) -> Result<CanonicalUnitary> {
    let analysis = wandering_subspace(m, sys)?;
    let e = analysis.e;
    let words = sys.word_matrices(target_degree);
    let (ed, md) = (e.dim(), m.dim());
    let mut l = Mat::zeros(words.len() * ed, md);
    for (a, xa) in words.iter().enumerate() {
        let block = e.frame.adjoint() * xa.adjoint() * &m.frame;
        l.view_mut((a * ed, 0), (ed, md)).copy_from(&block);
    }
    // isometry on span{V^α E : |α| ≤ t}
    let mut gen = Mat::zeros(m.ambient_dim, 0);
    for xa in &words {
        gen = hcat(&gen, &(xa * &e.frame));
    }
    let q = orth(&gen, m.tol);
    let coords = m.frame.adjoint() * &q;
    let lq = &l * &coords;
    let isometry_residual = norm2(&(lq.adjoint() * &lq - identity(q.ncols())));
    if isometry_residual > ASSERT_TOL {
        return Err(Error::NotIsometric { residual: isometry_residual });
    }
    let n = sys.len();
    let matrix = OperatorMatrix::between(
        l,
        SpaceDesc::flat(md),
        SpaceDesc { factors: vec![(n, target_degree)], coeff_dim: ed },
    );
    Ok(CanonicalUnitary { matrix, wandering: e, target_degree, isometry_residual })
}

/// If M reduces `S ⊗ I_k`, returns `K` with `M = F² ⊗ K`.
pub fn is_reducing_constant(m: &Subspace, space: &TruncatedFock, k: usize) -> Option<Subspace> {
    if m.dim() == 0 {
        return Some(Subspace::zero(k));
    }
    let sys = TupleSystem::shift(space, k);
    let mats = sys.mats();
    let adjoints: Vec<Mat> = mats.iter().map(|x| x.adjoint()).collect();
    let adj_refs: Vec<&Mat> = adjoints.iter().collect();
    let r = invariance_residual(m, &mats).max(invariance_residual(m, &adj_refs));
    if r > ASSERT_TOL {
        return None;
    }
    let p = m.projector();
    let vac = p.view((0, 0), (k, k)).into_owned();
    let kk = Subspace::span(&vac, m.tol);
    let lifted = Subspace::from_frame(kron(&identity(space.dim()), &kk.frame));
    match crate::subspace::distance(&lifted, m) {
        Ok(dist) if dist < ASSERT_TOL => Some(kk),
        _ => None,
    }
}
