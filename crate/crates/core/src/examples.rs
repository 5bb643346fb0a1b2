//! Worked instances: the dimension-gap inner operator, seeded random
//! submodules, and the named fixture catalogue.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::blh::{blh_factorize, intertwining_residual, synthesize, BLHFactorization, MultiAnalytic};
use crate::error::{Error, Result};
use crate::fock::{bold_tuple, FockNModule, TruncatedFock};
use crate::linalg::{identity, max_abs, norm2, Mat, Vector};
use crate::modana::{generate_submodule, TupleSystem};
use crate::random::{self, Rng64};
use crate::subspace::Subspace;
use crate::variety::{build_constrained, commutator_ideal, ConstrainedModule, ConstrainedTensor, NCPolynomial};
use crate::words::Word;

#[derive(Clone, Debug, Serialize)]
pub struct DimGapInstance {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    /// `θ_i` as exact 0/1 matrices, `m × mn`.
    pub theta_exact: Vec<Vec<Vec<u8>>>,
    #[serde(skip)]
    pub theta: Vec<Mat>,
    #[serde(rename = "Theta")]
    pub big_theta: MultiAnalytic,
    pub dim_e: usize,
    pub dim_estar: usize,
    /// `max |Σ θ_i*θ_i − I|` entrywise.
    pub sum_residual: f64,
    pub isometry_residual: f64,
    pub module_residual: f64,
    /// Fiber dimension of a factorization of `range Θ`.
    pub range_fiber_dim: usize,
}

/// `θ_i(e_{pq}) = f_q` when `p = i`, with `e_{pq}` at index `(p−1)m + (q−1)`.
pub fn dim_gap_example(m: usize, n: usize, d: usize) -> Result<DimGapInstance> {
    if n < 2 || m < 1 {
        return Err(Error::Invalid(format!("need n ≥ 2 and m ≥ 1, got m={m}, n={n}")));
    }
    if d < 1 {
        return Err(Error::Invalid("truncation degree must be at least 1".into()));
    }
    let mn = m * n;
    let theta_exact: Vec<Vec<Vec<u8>>> = (1..=n)
        .map(|i| {
            let mut t = vec![vec![0u8; mn]; m];
            for q in 1..=m {
                t[q - 1][(i - 1) * m + (q - 1)] = 1;
            }
            t
        })
        .collect();
    let theta: Vec<Mat> = theta_exact
        .iter()
        .map(|t| crate::linalg::from_real(m, mn, |r, c| t[r][c] as f64))
        .collect();
    let sum = theta.iter().fold(Mat::zeros(mn, mn), |acc, t| acc + t.adjoint() * t);
    let sum_residual = max_abs(&(sum - identity(mn)));

    let space = TruncatedFock::new(n, d);
    let coeffs: BTreeMap<Word, Mat> =
        theta.iter().enumerate().map(|(i, t)| (Word::letter(i + 1, n).unwrap(), t.clone())).collect();
    let big_theta = synthesize(&space, coeffs, mn, m);
    let th = &big_theta.matrix.entries;
    let cols: Vec<usize> = (0..space.dim() * mn).filter(|c| space.degree_of(c / mn) < d).collect();
    let tw = crate::blh::select_columns(th, &cols);
    let isometry_residual = norm2(&(tw.adjoint() * &tw - identity(cols.len())));
    let module_residual = intertwining_residual(th, &space, mn, m);
    let range = Subspace::span(th, 1e-10);
    let fact = blh_factorize(&range, m, &space)?;
    Ok(DimGapInstance {
        m,
        n,
        d,
        theta_exact,
        theta,
        big_theta,
        dim_e: mn,
        dim_estar: m,
        sum_residual,
        isometry_residual,
        module_residual,
        range_fiber_dim: fact.e_dim,
    })
}

/// Random vector supported on basis indices whose grading key equals `key`.
pub fn homogeneous_vector(rng: &mut Rng64, keys: &[Vec<usize>], key: &[usize]) -> Vector {
    Vector::from_fn(keys.len(), |i, _| if keys[i] == key { random::complex(rng) } else { crate::linalg::ZERO })
}

/// Keys `[Fock degree]` for `F²_{n,d} ⊗ C^k`.
pub fn flat_keys(space: &TruncatedFock, k: usize) -> Vec<Vec<usize>> {
    (0..space.dim() * k).map(|i| vec![space.degree_of(i / k)]).collect()
}

pub fn module_keys(module: &FockNModule) -> Vec<Vec<usize>> {
    (0..module.dim()).map(|i| module.multidegree(i)).collect()
}

/// Submodule of `F²_{n,d} ⊗ C^k` generated by `count` homogeneous vectors of
/// random degree in `{0, …, max_deg}`.
pub fn random_flat_submodule(seed: u64, space: &TruncatedFock, k: usize, count: usize, max_deg: usize) -> Subspace {
    let mut rng = random::rng(seed);
    let keys = flat_keys(space, k);
    let gens: Vec<Vector> =
        (0..count)
            .map(|_| {
                let deg = rng.gen_range(0..=max_deg);
                homogeneous_vector(&mut rng, &keys, &[deg])
            })
            .collect();
    generate_submodule(&TupleSystem::shift(space, k), &gens)
}

/// Joint submodule generated by homogeneous vectors with each factor degree in `{0, …, max_deg}`.
pub fn random_module_submodule(seed: u64, module: &FockNModule, count: usize, max_deg: usize) -> Subspace {
    let mut rng = random::rng(seed);
    let keys = module_keys(module);
    let gens: Vec<Vector> = (0..count)
        .map(|_| {
            let key: Vec<usize> = (0..module.k()).map(|_| rng.gen_range(0..=max_deg)).collect();
            homogeneous_vector(&mut rng, &keys, &key)
        })
        .collect();
    let sys = TupleSystem::new(bold_tuple(module)).unwrap();
    generate_submodule(&sys, &gens)
}

/// Drury-Arveson factors with commutator ideals for each `(n_i, d_i)`.
pub fn da_modules(shape: &[(usize, usize)]) -> Result<Vec<ConstrainedModule>> {
    shape.iter().map(|&(n, d)| build_constrained(&TruncatedFock::new(n, d), &commutator_ideal(n))).collect()
}

/// Constrained submodule generated by projected homogeneous vectors, in full tensor coordinates.
pub fn random_constrained_submodule(seed: u64, modules: &[ConstrainedModule], count: usize, max_deg: usize) -> Result<Subspace> {
    let t = ConstrainedTensor::new(modules)?;
    let mut rng = random::rng(seed);
    let keys = module_keys(&t.module);
    let mut gens = Vec::new();
    while gens.len() < count {
        let key: Vec<usize> = (0..t.module.k()).map(|_| rng.gen_range(0..=max_deg)).collect();
        let v = homogeneous_vector(&mut rng, &keys, &key);
        let projected = &t.pn * (t.embedding.adjoint() * &v);
        if projected.norm() > 1e-6 {
            gens.push(&t.embedding * projected);
        }
    }
    Ok(t.from_coords(&t.generate(&gens)))
}

/// Symmetrized `e_{g_i}` placed in the first factor, vacuum elsewhere.
pub fn symmetric_letter_generator(modules: &[ConstrainedModule], letters: &[usize]) -> Result<Vector> {
    let t = ConstrainedTensor::new(modules)?;
    let f1 = t.first_space();
    let p = NCPolynomial::new(f1.n).term(letters, crate::linalg::ONE)?;
    let v1 = modules[0].nj.projector() * p.vector(f1);
    let mut rest = Vector::zeros(1);
    rest[0] = crate::linalg::ONE;
    for m in &modules[1..] {
        rest = rest.kronecker(&m.space.vacuum());
    }
    Ok(v1.kronecker(&rest))
}

/// For homogeneous generators of a common degree `g`, returns `M` and the right
/// action `W_i(S^β η) = S^{β g_i} η` (`η` in the span of the generators) as
/// ambient matrices vanishing on `M^⊥`.
pub fn right_action_on_generated(space: &TruncatedFock, k: usize, generators: &[Vector]) -> Result<(Subspace, Vec<Mat>)> {
    let keys = flat_keys(space, k);
    let mut degree = None;
    for g in generators {
        let support: Vec<usize> = (0..g.len()).filter(|&i| g[i].norm() > 1e-14).map(|i| keys[i][0]).collect();
        let first = *support.first().ok_or_else(|| Error::Invalid("zero generator".into()))?;
        if support.iter().any(|&s| s != first) || degree.is_some_and(|d| d != first) {
            return Err(Error::Invalid("generators must share one homogeneous degree".into()));
        }
        degree = Some(first);
    }
    let g = degree.ok_or_else(|| Error::Invalid("no generators".into()))?;
    let e = crate::subspace::orthonormalize(generators, space.dim() * k, 1e-10);
    let sys = TupleSystem::shift(space, k);
    let w = space.d.saturating_sub(g);
    let words = crate::words::enumerate_words(space.n, w);
    let blocks: Vec<Mat> = sys.word_matrices(w).iter().map(|x| x * &e.frame).collect();
    let mut cols = Mat::zeros(space.dim() * k, 0);
    for b in &blocks {
        cols = crate::linalg::hcat(&cols, b);
    }
    let m = Subspace::from_frame(cols);
    let mut action = Vec::new();
    for i in 1..=space.n {
        let gi = Word::letter(i, space.n)?;
        let mut wi = Mat::zeros(space.dim() * k, space.dim() * k);
        for (beta, b) in words.iter().zip(&blocks) {
            if beta.len() < w {
                wi += &blocks[beta.concat(&gi).index()] * b.adjoint();
            }
        }
        action.push(wi);
    }
    Ok((m, action))
}

#[derive(Clone, Debug)]
pub enum FixtureKind {
    Flat { space: TruncatedFock, coeff_dim: usize, m: Subspace },
    Module { module: FockNModule, m: Subspace },
    Constrained { modules: Vec<ConstrainedModule>, m: Subspace },
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub kind: FixtureKind,
}

fn basis_generated(module: &FockNModule, words: &[&[&[usize]]]) -> Subspace {
    let gens: Vec<Vector> = words
        .iter()
        .map(|ws| {
            let w: Vec<Word> =
                ws.iter().zip(&module.factors).map(|(l, f)| Word::new(l.to_vec(), f.n).unwrap()).collect();
            crate::fock::basis_vector(module.dim(), module.basis_index(&w))
        })
        .collect();
    generate_submodule(&TupleSystem::new(bold_tuple(module)).unwrap(), &gens)
}

/// Deterministic fixture catalogue.
pub fn fixture_suite() -> Vec<Fixture> {
    let f = TruncatedFock::new(2, 3);
    let single = {
        let module = FockNModule::new(&[(2, 3)]);
        basis_generated(&module, &[&[&[1]]])
    };
    let bidisc = FockNModule::new(&[(1, 3), (1, 3)]);
    let poly = FockNModule::new(&[(2, 3), (1, 3)]);
    let da = da_modules(&[(2, 3), (1, 3)]).unwrap();
    let da_single = {
        let g = symmetric_letter_generator(&da, &[1]).unwrap();
        let t = ConstrainedTensor::new(&da).unwrap();
        t.from_coords(&t.generate(&[g]))
    };
    vec![
        Fixture { name: "whole-space", kind: FixtureKind::Flat { space: f.clone(), coeff_dim: 2, m: Subspace::full(f.dim() * 2) } },
        Fixture { name: "single-generator", kind: FixtureKind::Flat { space: f.clone(), coeff_dim: 1, m: single } },
        Fixture { name: "two-generator", kind: FixtureKind::Flat { space: f.clone(), coeff_dim: 2, m: random_flat_submodule(7, &f, 2, 2, 1) } },
        Fixture {
            name: "bidisc-surrogate",
            kind: FixtureKind::Module { m: basis_generated(&bidisc, &[&[&[1], &[]], &[&[], &[1]]]), module: bidisc },
        },
        Fixture { name: "polyball-whole", kind: FixtureKind::Module { m: Subspace::full(poly.dim()), module: poly.clone() } },
        Fixture { name: "polyball-single", kind: FixtureKind::Module { m: basis_generated(&poly, &[&[&[1], &[]]]), module: poly } },
        Fixture { name: "da-whole", kind: FixtureKind::Constrained { m: crate::variety::whole_constrained(&da).unwrap(), modules: da.clone() } },
        Fixture { name: "da-single", kind: FixtureKind::Constrained { modules: da, m: da_single } },
    ]
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixture_suite().into_iter().find(|f| f.name == name)
}

/// Factorization for flat fixtures; `None` for the other kinds.
pub fn factorize_fixture(f: &Fixture) -> Option<Result<BLHFactorization>> {
    match &f.kind {
        FixtureKind::Flat { space, coeff_dim, m } => Some(blh_factorize(m, *coeff_dim, space)),
        _ => None,
    }
}
