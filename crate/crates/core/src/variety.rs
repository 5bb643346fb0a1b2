//! Constrained Fock modules: ideal-generated submodules, their quotients, the
//! compressed tuples, and the constrained factorization with its Drury-Arveson
//! specialization.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::blh::{blh_factorize, select_columns};
use crate::error::{Error, Result};
use crate::fock::{bold_creation, complex_rows, left_tuple, right_tuple, word_matrix, FockNModule, SpaceDesc, TruncatedFock};
use crate::linalg::{c, hcat, identity, kron, norm2, Mat, Vector, C64, ONE};
use crate::modana::{generate_submodule, invariance_residual, wandering_subspace, TupleSystem, ASSERT_TOL};
use crate::subspace::{complement_within, distance, sum, Subspace, DEFAULT_TOL, EQUAL_TOL};
use crate::words::{enumerate_words, flip, multinomial_count, symmetrize, Word};

/// Noncommutative polynomial `Σ c_w Z^w`.
#[derive(Clone, Debug, PartialEq)]
pub struct NCPolynomial {
    pub n: usize,
    pub terms: BTreeMap<Word, C64>,
}

impl NCPolynomial {
    pub fn new(n: usize) -> Self {
        NCPolynomial { n, terms: BTreeMap::new() }
    }

    /// Adds `coeff · Z^w`.
    pub fn term(mut self, letters: &[usize], coeff: C64) -> Result<Self> {
        let w = Word::new(letters.to_vec(), self.n)?;
        *self.terms.entry(w).or_insert(c(0.0, 0.0)) += coeff;
        Ok(self)
    }

    /// `Z_p Z_q − Z_q Z_p`.
    pub fn commutator(n: usize, p: usize, q: usize) -> Result<Self> {
        NCPolynomial::new(n).term(&[p, q], ONE)?.term(&[q, p], -ONE)
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().filter(|(_, v)| v.norm() > 0.0).map(|(w, _)| w.len()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|v| v.norm() == 0.0)
    }

    /// `p(X) = Σ c_w X^w` with `X^w = X_{w_1} ⋯ X_{w_k}`.
    pub fn eval(&self, mats: &[Mat]) -> Result<Mat> {
        let dim = mats.first().map(|m| m.nrows()).ok_or_else(|| Error::Invalid("empty tuple".into()))?;
        if mats.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: mats.len() });
        }
        let mut out = Mat::zeros(dim, dim);
        for (w, v) in &self.terms {
            let mut xw = identity(dim);
            for &l in w.letters() {
                xw *= &mats[l - 1];
            }
            out += xw * *v;
        }
        Ok(out)
    }

    /// Coefficient vector of `p(S) · vacuum` in the truncated Fock space.
    pub fn vector(&self, space: &TruncatedFock) -> Vector {
        let mut v = Vector::zeros(space.dim());
        for (w, val) in &self.terms {
            if w.len() <= space.d {
                v[w.index()] += *val;
            }
        }
        v
    }
}

impl Serialize for NCPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            word: &'a Word,
            re: f64,
            im: f64,
        }
        let v: Vec<Term> = self.terms.iter().map(|(w, x)| Term { word: w, re: x.re, im: x.im }).collect();
        v.serialize(s)
    }
}

/// All commutators `Z_p Z_q − Z_q Z_p`, `p < q`.
pub fn commutator_ideal(n: usize) -> Vec<NCPolynomial> {
    let mut out = Vec::new();
    for p in 1..=n {
        for q in p + 1..=n {
            out.push(NCPolynomial::commutator(n, p, q).unwrap());
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ConstrainedModule {
    pub space: TruncatedFock,
    pub ideal_gens: Vec<NCPolynomial>,
    pub mj: Subspace,
    pub nj: Subspace,
    /// `P_N S_i P_N` in ambient coordinates.
    pub b: TupleSystem,
    /// `P_N R_i P_N` in ambient coordinates.
    pub w: TupleSystem,
    /// Whether `M_J` coincides with the commutator-ideal submodule.
    pub drury_arveson: bool,
}

impl Serialize for ConstrainedModule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct View<'a> {
            n: usize,
            d: usize,
            ideal_gens: &'a [NCPolynomial],
            dim_mj: usize,
            dim_nj: usize,
            drury_arveson: bool,
        }
        View {
            n: self.space.n,
            d: self.space.d,
            ideal_gens: &self.ideal_gens,
            dim_mj: self.mj.dim(),
            dim_nj: self.nj.dim(),
            drury_arveson: self.drury_arveson,
        }
        .serialize(s)
    }
}

/// `span{ e_γ p e_β : |γ| + deg p + |β| ≤ d }`.
fn ideal_submodule(space: &TruncatedFock, gens: &[NCPolynomial]) -> Subspace {
    let mut cols = Mat::zeros(space.dim(), 0);
    for p in gens {
        let dp = p.degree();
        if dp > space.d {
            continue;
        }
        for gamma in enumerate_words(space.n, space.d - dp) {
            for beta in enumerate_words(space.n, space.d - dp - gamma.len()) {
                let mut v = Vector::zeros(space.dim());
                for (w, val) in &p.terms {
                    v[gamma.concat(w).concat(&beta).index()] += *val;
                }
                cols = hcat(&cols, &Mat::from_columns(&[v]));
            }
        }
    }
    Subspace::span(&cols, DEFAULT_TOL)
}

pub fn build_constrained(space: &TruncatedFock, ideal_gens: &[NCPolynomial]) -> Result<ConstrainedModule> {
    for p in ideal_gens {
        if p.n != space.n {
            return Err(Error::BadLetter { letter: p.n, n: space.n });
        }
        if p.is_zero() {
            return Err(Error::Invalid("zero ideal generator".into()));
        }
        if p.degree() > space.d {
            return Err(Error::Invalid(format!("generator degree {} exceeds truncation {}", p.degree(), space.d)));
        }
    }
    let mj = ideal_submodule(space, ideal_gens);
    let nj = mj.complement();
    if nj.dim() == 0 {
        return Err(Error::DegenerateIdeal);
    }
    let pn = nj.projector();
    let b = left_tuple(space).iter().map(|s| &pn * &s.entries * &pn).collect();
    let w = right_tuple(space).iter().map(|r| &pn * &r.entries * &pn).collect();
    let comm = ideal_submodule(space, &commutator_ideal(space.n));
    let drury_arveson = distance(&comm, &mj)? < EQUAL_TOL;
    Ok(ConstrainedModule {
        space: space.clone(),
        ideal_gens: ideal_gens.to_vec(),
        mj,
        nj,
        b: TupleSystem::from_mats(b, space.desc())?,
        w: TupleSystem::from_mats(w, space.desc())?,
        drury_arveson,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetricResiduals {
    /// `max_i ‖B_i − P_N W_i P_N‖`.
    pub left_right: f64,
    /// Distance of `N_J` from the range of the symmetrizer.
    pub symmetrizer_distance: f64,
    /// `max_{i,j} ‖[B_i, B_j]‖` on degrees ≤ d − 2.
    pub commutator: f64,
}

/// Span of the class indicators `Σ_{σ(w) = m} e_w`, one per multi-index `m`.
pub fn symmetrizer_range(space: &TruncatedFock) -> Subspace {
    let mut classes: BTreeMap<Vec<usize>, Vector> = BTreeMap::new();
    for w in &space.basis {
        let key = symmetrize(w).0;
        let mut key_with_len = vec![w.len()];
        key_with_len.extend(key);
        classes.entry(key_with_len).or_insert_with(|| Vector::zeros(space.dim()))[w.index()] = ONE;
    }
    let cols: Vec<Vector> = classes.into_values().collect();
    Subspace::span(&Mat::from_columns(&cols), DEFAULT_TOL)
}

pub fn symmetric_check(cm: &ConstrainedModule) -> Result<SymmetricResiduals> {
    if !cm.drury_arveson {
        return Err(Error::Inapplicable("ideal is not the commutator ideal".into()));
    }
    let left_right = cm.b.mats().iter().zip(cm.w.mats()).map(|(b, w)| norm2(&(*b - w))).fold(0.0, f64::max);
    let symmetrizer_distance = distance(&cm.nj, &symmetrizer_range(&cm.space))?;
    let cols: Vec<usize> = (0..cm.space.dim()).filter(|&i| cm.space.degree_of(i) + 2 <= cm.space.d).collect();
    let mut commutator: f64 = 0.0;
    for bi in cm.b.mats() {
        for bj in cm.b.mats() {
            commutator = commutator.max(norm2(&select_columns(&(bi * bj - bj * bi), &cols)));
        }
    }
    Ok(SymmetricResiduals { left_right, symmetrizer_distance, commutator })
}

/// The constrained tensor `N_{J_1} ⊗ E*` in the coordinates of `F²_{n_1} ⊗ C^{dim E*}`.
#[derive(Clone, Debug)]
pub struct ConstrainedTensor {
    pub modules: Vec<ConstrainedModule>,
    pub module: FockNModule,
    pub estar_dim: usize,
    /// `I ⊗ F_{E*}` from coordinates into the full tensor.
    pub embedding: Mat,
    /// `P_{N_{J_1}} ⊗ I`.
    pub pn: Mat,
    /// `B_{1m} = P_{N_1} S_m P_{N_1} ⊗ I`.
    pub first: Vec<Mat>,
    /// `B_ij = P_{N_1} ⊗ F_{E*}^* S_ij F_{E*}` for `i ≥ 2`.
    pub rest: BTreeMap<(usize, usize), Mat>,
}

impl ConstrainedTensor {
    pub fn new(modules: &[ConstrainedModule]) -> Result<Self> {
        if modules.is_empty() {
            return Err(Error::Invalid("no constrained factors".into()));
        }
        let shape: Vec<(usize, usize)> = modules.iter().map(|m| (m.space.n, m.space.d)).collect();
        let module = FockNModule::new(&shape);
        let mut fstar = identity(1);
        for m in &modules[1..] {
            fstar = kron(&fstar, &m.nj.frame);
        }
        let estar_dim = fstar.ncols();
        let f1 = &modules[0].space;
        let embedding = kron(&identity(f1.dim()), &fstar);
        let pn1 = modules[0].nj.projector();
        let pn = kron(&pn1, &identity(estar_dim));
        let first = modules[0].b.mats().iter().map(|b| kron(b, &identity(estar_dim))).collect();
        let mut rest = BTreeMap::new();
        if modules.len() > 1 {
            let rest_module = FockNModule::new(&shape[1..]);
            for i in 2..=modules.len() {
                for j in 1..=shape[i - 1].0 {
                    let s = bold_creation(&rest_module, i - 1, j)?.entries;
                    rest.insert((i, j), kron(&pn1, &(fstar.adjoint() * s * &fstar)));
                }
            }
        }
        Ok(ConstrainedTensor { modules: modules.to_vec(), module, estar_dim, embedding, pn, first, rest })
    }

    pub fn first_space(&self) -> &TruncatedFock {
        &self.modules[0].space
    }

    pub fn coord_dim(&self) -> usize {
        self.first_space().dim() * self.estar_dim
    }

    /// Every `B` operator, first factor then `(i, j)` order.
    pub fn all_ops(&self) -> Vec<&Mat> {
        self.first.iter().chain(self.rest.values()).collect()
    }

    pub fn tuple(&self) -> TupleSystem {
        let mats = self.all_ops().into_iter().cloned().collect();
        TupleSystem::from_mats(mats, SpaceDesc::flat(self.coord_dim())).unwrap()
    }

    /// Moves an ambient subspace of `N_{J_1} ⊗ E*` into coordinates.
    pub fn to_coords(&self, m: &Subspace) -> Result<Subspace> {
        if m.ambient_dim != self.module.dim() {
            return Err(Error::DimensionMismatch { expected: self.module.dim(), found: m.ambient_dim });
        }
        let coords = self.embedding.adjoint() * &m.frame;
        let back = &self.embedding * &coords;
        let outside = norm2(&(&back - &m.frame));
        let leak = norm2(&((identity(self.coord_dim()) - &self.pn) * &coords));
        if outside.max(leak) > ASSERT_TOL {
            return Err(Error::Invalid(format!("subspace leaves N_J ⊗ E* by {:.3e}", outside.max(leak))));
        }
        Ok(Subspace { frame: coords, ambient_dim: self.coord_dim(), tol: m.tol })
    }

    pub fn from_coords(&self, m: &Subspace) -> Subspace {
        Subspace { frame: &self.embedding * &m.frame, ambient_dim: self.module.dim(), tol: m.tol }
    }

    /// Submodule of `N_{J_1} ⊗ E*` generated by ambient vectors, in coordinates.
    pub fn generate(&self, generators: &[Vector]) -> Subspace {
        let gens: Vec<Vector> = generators.iter().map(|g| &self.pn * (self.embedding.adjoint() * g)).collect();
        generate_submodule(&self.tuple(), &gens)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstrainedClassification {
    pub shape: Vec<(usize, usize)>,
    pub estar_dim: usize,
    pub e_tilde_dim: usize,
    pub e_dim: usize,
    pub w_dim: usize,
    pub window: usize,
    #[serde(rename = "E")]
    pub e: Subspace,
    #[serde(rename = "E_tilde")]
    pub e_tilde: Subspace,
    #[serde(rename = "W_split")]
    pub w_split: Subspace,
    #[serde(rename = "Theta", serialize_with = "ser_mat")]
    pub theta: Mat,
    #[serde(rename = "Phi", serialize_with = "ser_phi")]
    pub phi: BTreeMap<(usize, usize), BTreeMap<Word, Mat>>,
    pub invariance_residual: f64,
    /// `max_{v ∈ E, ‖v‖=1} ‖P_{M_J ⊗ E*} v‖`.
    pub containment_residual: f64,
    /// `‖P_w(ΘΘ* − P_M)P_w‖` on the factor-one window.
    pub partial_isometry_residual: f64,
    /// Same check for `P_{N ⊗ E*} Θ̃` over the whole fiber `Ẽ`.
    pub full_fiber_residual: f64,
    pub intertwining_residual: f64,
    #[serde(skip)]
    pub m: Subspace,
    #[serde(skip)]
    pub tensor: Option<ConstrainedTensor>,
}

fn ser_mat<S: Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    complex_rows(m).serialize(s)
}

fn ser_phi<S: Serializer>(
    phi: &BTreeMap<(usize, usize), BTreeMap<Word, Mat>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Coef<'a> {
        word: &'a Word,
        matrix: Vec<Vec<[f64; 2]>>,
    }
    #[derive(Serialize)]
    struct Entry<'a> {
        i: usize,
        j: usize,
        coefficients: Vec<Coef<'a>>,
    }
    let v: Vec<Entry> = phi
        .iter()
        .map(|(&(i, j), t)| Entry {
            i,
            j,
            coefficients: t
                .iter()
                .filter(|(_, m)| m.iter().any(|x| x.norm() > 0.0))
                .map(|(w, m)| Coef { word: w, matrix: complex_rows(m) })
                .collect(),
        })
        .collect();
    v.serialize(s)
}

impl ConstrainedClassification {
    fn tensor(&self) -> &ConstrainedTensor {
        self.tensor.as_ref().expect("classification carries its tensor")
    }

    /// Domain columns of `F²_{n_1} ⊗ E` with factor-one degree ≤ window.
    pub fn window_columns(&self) -> Vec<usize> {
        let f1 = self.tensor().first_space();
        (0..f1.dim() * self.e_dim).filter(|c| f1.degree_of(c / self.e_dim) <= self.window).collect()
    }

    /// `Σ_β R^β ⊗ φ_β` compressed to `N_{J_1} ⊗ E`.
    pub fn phi_matrix(&self, key: (usize, usize)) -> Result<Mat> {
        let table = self.phi.get(&key).ok_or(Error::IndexOutOfRange { index: key.1, n: key.0 })?;
        let f1 = self.tensor().first_space();
        let rt = right_tuple(f1);
        let mut m = Mat::zeros(f1.dim() * self.e_dim, f1.dim() * self.e_dim);
        for (beta, coef) in table {
            m += kron(&word_matrix(&rt, beta)?, coef);
        }
        let p = kron(&self.tensor().modules[0].nj.projector(), &identity(self.e_dim));
        Ok(&p * m * &p)
    }
}

fn degree_window(f1: &TruncatedFock, k: usize, w: usize) -> Vec<usize> {
    (0..f1.dim() * k).filter(|c| f1.degree_of(c / k) <= w).collect()
}

fn windowed(m: &Mat, rows: &[usize]) -> Mat {
    Mat::from_fn(rows.len(), rows.len(), |i, j| m[(rows[i], rows[j])])
}

/// Classifies a `B`-invariant `M ⊆ N_{J_1} ⊗ E*` given in full tensor coordinates.
pub fn constrained_classify(m: &Subspace, modules: &[ConstrainedModule]) -> Result<ConstrainedClassification> {
    let t = ConstrainedTensor::new(modules)?;
    let mc = t.to_coords(m)?;
    let inv = invariance_residual(&mc, &t.all_ops());
    if inv > ASSERT_TOL {
        return Err(Error::NotInvariant { residual: inv });
    }
    let f1 = t.first_space().clone();
    let k = t.estar_dim;
    let mj_star = Subspace::from_frame(kron(&modules[0].mj.frame, &identity(k)));
    let m_aug = sum(&mj_star, &mc)?;
    let tilde = blh_factorize(&m_aug, k, &f1)?;
    let sys = TupleSystem::shift(&f1, k);
    let w_split = if mj_star.dim() == 0 { Subspace::zero(mj_star.ambient_dim) } else { wandering_subspace(&mj_star, &sys)?.e };
    let e = complement_within(&tilde.e, &w_split)?;
    let e_dim = e.dim();
    let e_degree = (0..e.ambient_dim)
        .filter(|&r| e.frame.row(r).iter().any(|x| x.norm() > 1e-9))
        .map(|r| f1.degree_of(r / k))
        .max()
        .unwrap_or(0);
    let window = f1.d - e_degree;

    let containment_residual = norm2(&(mj_star.projector() * &e.frame));
    let u = tilde.e.frame.adjoint() * &e.frame;
    let theta_tilde = &tilde.theta.matrix.entries;
    let pn1e = kron(&modules[0].nj.projector(), &identity(e_dim));
    let theta = &t.pn * theta_tilde * kron(&identity(f1.dim()), &u) * &pn1e;

    let rows = degree_window(&f1, k, window);
    let pm = mc.projector();
    let partial_isometry_residual = norm2(&windowed(&(&theta * theta.adjoint() - &pm), &rows));
    let full = &t.pn * theta_tilde;
    let full_fiber_residual = norm2(&windowed(&(&full * full.adjoint() - &pm), &rows));

    let mut cls = ConstrainedClassification {
        shape: modules.iter().map(|m| (m.space.n, m.space.d)).collect(),
        estar_dim: k,
        e_tilde_dim: tilde.e_dim,
        e_dim,
        w_dim: w_split.dim(),
        window,
        e: e.clone(),
        e_tilde: tilde.e.clone(),
        w_split,
        theta,
        phi: BTreeMap::new(),
        invariance_residual: inv,
        containment_residual,
        partial_isometry_residual,
        full_fiber_residual,
        intertwining_residual: 0.0,
        m: mc,
        tensor: Some(t.clone()),
    };
    for &key in t.rest.keys() {
        let table = constrained_fourier(&cls, key, f1.d)?;
        cls.phi.insert(key, table);
    }
    let cols = cls.window_columns();
    let mut r: f64 = 0.0;
    for (key, b) in &t.rest {
        let phi = cls.phi_matrix(*key)?;
        let diff = b * &cls.theta - &cls.theta * phi;
        r = r.max(norm2(&select_columns(&diff, &cols)));
    }
    cls.intertwining_residual = r;
    Ok(cls)
}

/// `φ_{ij,α^t} = P_E (B^α)^* B_ij|_E` for `|α| ≤ max_deg`, keyed by `α^t`.
pub fn constrained_fourier(
    cls: &ConstrainedClassification,
    key: (usize, usize),
    max_deg: usize,
) -> Result<BTreeMap<Word, Mat>> {
    let t = cls.tensor();
    let bij = t.rest.get(&key).ok_or(Error::IndexOutOfRange { index: key.1, n: key.0 })?;
    let fe = &cls.e.frame;
    let target = bij * fe;
    let f1 = t.first_space();
    let first = TupleSystem::from_mats(t.first.clone(), SpaceDesc::flat(t.coord_dim()))?;
    let deg = max_deg.min(f1.d);
    let mut out = BTreeMap::new();
    for (alpha, ba) in enumerate_words(f1.n, deg).iter().zip(first.word_matrices(deg)) {
        out.insert(flip(alpha), fe.adjoint() * ba.adjoint() * &target);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplierEval {
    pub z: Vec<[f64; 2]>,
    #[serde(serialize_with = "ser_mat")]
    pub resolvent: Mat,
    #[serde(serialize_with = "ser_mat")]
    pub series: Mat,
    pub difference: f64,
    pub tail_bound: f64,
    pub series_degree: usize,
}

/// `Φ_ij(z) = P_E (I − Σ z_m B_{1m}^*)^{-1} B_ij|_E` and its power series to degree `window`.
pub fn da_multiplier_eval(cls: &ConstrainedClassification, key: (usize, usize), z: &[C64]) -> Result<MultiplierEval> {
    let t = cls.tensor();
    if !t.modules[0].drury_arveson {
        return Err(Error::Inapplicable("first factor is not a Drury-Arveson module".into()));
    }
    let f1 = t.first_space();
    if z.len() != f1.n {
        return Err(Error::DimensionMismatch { expected: f1.n, found: z.len() });
    }
    let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if norm >= 1.0 {
        return Err(Error::OutsideBall { norm });
    }
    let bij = t.rest.get(&key).ok_or(Error::IndexOutOfRange { index: key.1, n: key.0 })?;
    let fe = &cls.e.frame;
    let mut a = identity(t.coord_dim());
    for (zm, b) in z.iter().zip(&t.first) {
        a -= b.adjoint() * *zm;
    }
    let rhs = bij * fe;
    let x = a.lu().solve(&rhs).ok_or_else(|| Error::Invalid("singular resolvent".into()))?;
    let resolvent = fe.adjoint() * x;

    let table = constrained_fourier(cls, key, cls.window)?;
    let mut series = Mat::zeros(cls.e_dim, cls.e_dim);
    for (beta, coef) in &table {
        if !beta.letters().windows(2).all(|p| p[0] <= p[1]) {
            continue;
        }
        let mi = symmetrize(beta);
        let weight = multinomial_count(&mi)? as f64;
        let mono: C64 = beta.letters().iter().map(|&l| z[l - 1]).product();
        series += coef * (mono * weight);
    }
    let difference = norm2(&(&resolvent - &series));
    let tail_bound = norm.powi(cls.window as i32 + 1) / (1.0 - norm);
    Ok(MultiplierEval {
        z: z.iter().map(|x| [x.re, x.im]).collect(),
        resolvent,
        series,
        difference,
        tail_bound,
        series_degree: cls.window,
    })
}

/// Whole constrained space `N_{J_1} ⊗ E*` in full tensor coordinates.
pub fn whole_constrained(modules: &[ConstrainedModule]) -> Result<Subspace> {
    let t = ConstrainedTensor::new(modules)?;
    let frame = kron(&modules[0].nj.frame, &identity(t.estar_dim));
    Ok(t.from_coords(&Subspace::from_frame(frame)))
}

