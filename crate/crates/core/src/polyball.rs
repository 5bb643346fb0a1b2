//! Joint invariant subspaces of Fock n-modules, classified over the first factor.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::blh::{factorize_with_grading, select_columns, synthesize, uniqueness_unitary, BLHFactorization, MultiAnalytic, Uniqueness};
use crate::error::{Error, Result};
use crate::fock::{bold_creation, bold_tuple, left_tuple, word_matrix, FockNModule};
use crate::linalg::{identity, kron, norm2, Mat};
use crate::modana::{invariance_residual, ASSERT_TOL};
use crate::subspace::Subspace;
use crate::words::{enumerate_words, flip};

#[derive(Clone, Debug, Serialize)]
pub struct PolyballClassification {
    pub shape: Vec<(usize, usize)>,
    pub blh: BLHFactorization,
    /// `Φ_ij` keyed by `(i, j)`, both 1-based, `i ≥ 2`.
    #[serde(serialize_with = "ser_phi")]
    pub phi: BTreeMap<(usize, usize), MultiAnalytic>,
    pub invariance_residual: f64,
    pub intertwining_residual: f64,
    pub two_path_residual: f64,
}

fn ser_phi<S: serde::Serializer>(
    phi: &BTreeMap<(usize, usize), MultiAnalytic>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Entry<'a> {
        i: usize,
        j: usize,
        phi: &'a MultiAnalytic,
    }
    let v: Vec<Entry> = phi.iter().map(|(&(i, j), p)| Entry { i, j, phi: p }).collect();
    v.serialize(s)
}

impl PolyballClassification {
    fn module(&self) -> FockNModule {
        FockNModule::new(&self.shape)
    }

    /// Domain columns `(α, c)` with `|α| ≤ window − raise1` and factor `i` of `η_c`
    /// at most `d_i − 1` when `i` is given.
    pub fn window_columns(&self, raise1: usize, factor: Option<usize>) -> Vec<usize> {
        let f1 = self.module().factors[0].clone();
        let e = self.blh.e_dim;
        let Some(w) = self.blh.window.checked_sub(raise1) else {
            return Vec::new();
        };
        (0..f1.dim() * e)
            .filter(|&col| {
                let (a, c) = (col / e, col % e);
                let ok_factor = match factor {
                    Some(i) => self.blh.col_keys[c][i - 1] < self.shape[i - 1].1,
                    None => true,
                };
                f1.degree_of(a) <= w && ok_factor
            })
            .collect()
    }

    /// Rotates the wandering frame by a unitary `u` that preserves its grading.
    pub fn rotated(&self, u: &Mat) -> PolyballClassification {
        let d1 = self.shape[0].1;
        let f1 = self.module().factors[0].clone();
        let lift = kron(&identity(f1.dim()), u);
        let mut out = self.clone();
        out.blh.theta.matrix.entries = &self.blh.theta.matrix.entries * &lift;
        out.blh.e = Subspace::from_frame(&self.blh.e.frame * u);
        for m in out.blh.theta.coeffs.values_mut() {
            *m = &*m * u;
        }
        for (key, p) in &self.phi {
            let coeffs = p.coeffs.iter().map(|(w, m)| (w.clone(), u.adjoint() * m * u)).collect();
            let mut np = synthesize(&f1, coeffs, p.source_dim, p.target_dim);
            np.max_degree = d1.min(np.max_degree);
            out.phi.insert(*key, np);
        }
        out
    }
}

pub fn polyball_classify(m: &Subspace, module: &FockNModule) -> Result<PolyballClassification> {
    if m.ambient_dim != module.dim() {
        return Err(Error::DimensionMismatch { expected: module.dim(), found: m.ambient_dim });
    }
    let bold = bold_tuple(module);
    let mats: Vec<&Mat> = bold.iter().map(|o| &o.entries).collect();
    let inv = invariance_residual(m, &mats);
    if inv > ASSERT_TOL {
        return Err(Error::NotInvariant { residual: inv });
    }
    let f1 = module.factors[0].clone();
    let k_rest = module.rest_dim();
    let keys: Vec<Vec<usize>> = (0..module.dim()).map(|i| module.multidegree(i)).collect();
    let blh = factorize_with_grading(m, k_rest, &f1, &keys)?;
    let e = &blh.e.frame;

    let lt = left_tuple(&f1);
    let first: Vec<_> = (1..=f1.n).map(|j| bold_creation(module, 1, j).unwrap()).collect();
    let mut phi = BTreeMap::new();
    let mut two_path: f64 = 0.0;
    for i in 2..=module.k() {
        for j in 1..=module.factors[i - 1].n {
            let sij = bold_creation(module, i, j)?.entries;
            let sij_e = &sij * e;
            let mut coeffs = BTreeMap::new();
            for alpha in enumerate_words(f1.n, f1.d) {
                let local = word_matrix(&lt, &alpha)?;
                let path_a = e.adjoint() * kron(&local.adjoint(), &identity(k_rest)) * &sij_e;
                let path_b = e.adjoint() * word_matrix(&first, &alpha)?.adjoint() * &sij_e;
                two_path = two_path.max(norm2(&(&path_a - &path_b)));
                coeffs.insert(flip(&alpha), path_a);
            }
            phi.insert((i, j), synthesize(&f1, coeffs, blh.e_dim, blh.e_dim));
        }
    }
    let mut cls = PolyballClassification {
        shape: module.factors.iter().map(|f| (f.n, f.d)).collect(),
        blh,
        phi,
        invariance_residual: inv,
        intertwining_residual: 0.0,
        two_path_residual: two_path,
    };
    cls.intertwining_residual = intertwining_check(&cls)?;
    Ok(cls)
}

/// `max ‖(S_ij Θ − Θ Φ_ij) P_win‖`.
pub fn intertwining_check(cls: &PolyballClassification) -> Result<f64> {
    let module = cls.module();
    let theta = &cls.blh.theta.matrix.entries;
    let mut r: f64 = 0.0;
    for (&(i, j), p) in &cls.phi {
        let sij = bold_creation(&module, i, j)?.entries;
        let cols = cls.window_columns(0, Some(i));
        let diff = &sij * theta - theta * &p.matrix.entries;
        r = r.max(norm2(&select_columns(&diff, &cols)));
    }
    Ok(r)
}

/// For each factor `i ≥ 2`: `max_{p,q} ‖Φ_ip* Φ_iq − δ_pq I‖` on the window.
pub fn phi_row_isometry_check(cls: &PolyballClassification) -> BTreeMap<usize, f64> {
    let mut out = BTreeMap::new();
    for i in 2..=cls.shape.len() {
        let cols = cls.window_columns(0, Some(i));
        let mut worst: f64 = 0.0;
        for p in 1..=cls.shape[i - 1].0 {
            for q in 1..=cls.shape[i - 1].0 {
                let a = &cls.phi[&(i, p)].matrix.entries;
                let b = &cls.phi[&(i, q)].matrix.entries;
                let mut g = a.adjoint() * b;
                if p == q {
                    g -= identity(g.nrows());
                }
                let sub = Mat::from_fn(cols.len(), cols.len(), |x, y| g[(cols[x], cols[y])]);
                worst = worst.max(norm2(&sub));
            }
        }
        out.insert(i, worst);
    }
    out
}

/// Compares `L X|_M L*` with the model tuple `(S ⊗ I_E, Φ_ij)` entrywise on the window.
pub fn joint_equivalence_check(m: &Subspace, cls: &PolyballClassification) -> Result<f64> {
    let module = cls.module();
    let f1 = module.factors[0].clone();
    let theta = &cls.blh.theta.matrix.entries;
    let l = theta.adjoint() * &m.frame;
    let p_m = &m.frame;
    let mut r: f64 = 0.0;
    let rows = cls.window_columns(0, None);
    let block = |m: &Mat, cols: &[usize]| Mat::from_fn(rows.len(), cols.len(), |a, b| m[(rows[a], cols[b])]);
    let cols1 = cls.window_columns(1, None);
    for (j, s) in left_tuple(&f1).iter().enumerate() {
        let x = bold_creation(&module, 1, j + 1)?.entries;
        let v = p_m.adjoint() * &x * p_m;
        let lvl = &l * v * l.adjoint();
        let model = kron(&s.entries, &identity(cls.blh.e_dim));
        r = r.max(norm2(&block(&(lvl - model), &cols1)));
    }
    for (&(i, j), p) in &cls.phi {
        let x = bold_creation(&module, i, j)?.entries;
        let v = p_m.adjoint() * &x * p_m;
        let lvl = &l * v * l.adjoint();
        let cols = cls.window_columns(0, Some(i));
        r = r.max(norm2(&block(&(lvl - &p.matrix.entries), &cols)));
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct PolyballUniqueness {
    pub blh: Uniqueness,
    pub phi_residual: f64,
}

/// `τ` with `Θ_2 = Θ_1 (I ⊗ τ)`, and the residual of `(I ⊗ τ) Φ²_ij = Φ¹_ij (I ⊗ τ)`.
pub fn polyball_uniqueness(c1: &PolyballClassification, c2: &PolyballClassification) -> Result<PolyballUniqueness> {
    let f1 = c1.module().factors[0].clone();
    let u = uniqueness_unitary(&c1.blh, &c2.blh, &f1)?;
    let lift = kron(&identity(f1.dim()), &u.tau);
    let mut r: f64 = 0.0;
    for (key, p1) in &c1.phi {
        let p2 = &c2.phi[key];
        let cols = c2.window_columns(0, Some(key.0));
        let diff = &lift * &p2.matrix.entries - &p1.matrix.entries * &lift;
        r = r.max(norm2(&select_columns(&diff, &cols)));
    }
    Ok(PolyballUniqueness { blh: u, phi_residual: r })
}
