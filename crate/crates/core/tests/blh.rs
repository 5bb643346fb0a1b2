use std::collections::BTreeMap;

use fockmod::blh::*;
use fockmod::examples::{flat_keys, homogeneous_vector, random_flat_submodule, right_action_on_generated};
use fockmod::fock::{basis_vector, right_tuple, word_matrix};
use fockmod::linalg::{c, identity, kron, norm2, Mat};
use fockmod::modana::*;
use fockmod::random;
use fockmod::subspace::{distance, Subspace};
use fockmod::variety::NCPolynomial;
use fockmod::words::{enumerate_words, Word};
use fockmod::{Error, TruncatedFock, Vector};
use proptest::prelude::*;

fn gen_by_words(space: &TruncatedFock, words: &[&[usize]]) -> Subspace {
    let gens: Vec<Vector> = words
        .iter()
        .map(|w| space.basis_vector(&Word::new(w.to_vec(), space.n).unwrap()))
        .collect();
    generate_submodule(&TupleSystem::shift(space, 1), &gens)
}

#[test]
fn whole_space_gives_constant_unitary() {
    let space = TruncatedFock::new(2, 3);
    let k = 2;
    let f = blh_factorize(&Subspace::full(space.dim() * k), k, &space).unwrap();
    assert_eq!(f.e_dim, k);
    let th = &f.theta.matrix.entries;
    assert!(norm2(&(th.adjoint() * th - identity(th.ncols()))) < 1e-12);
    assert!(norm2(&(th * th.adjoint() - identity(th.nrows()))) < 1e-12);
    let e = f.theta.coefficient(&Word::empty(2));
    assert!(norm2(&(e.adjoint() * &e - identity(k))) < 1e-12);
    for (w, m) in &f.theta.coeffs {
        if !w.is_empty() {
            assert!(norm2(m) < 1e-12);
        }
    }
}

#[test]
fn single_letter_generator() {
    let space = TruncatedFock::new(2, 3);
    let m = gen_by_words(&space, &[&[1]]);
    let f = blh_factorize(&m, 1, &space).unwrap();
    assert_eq!(f.e_dim, 1);
    let g1 = Word::letter(1, 2).unwrap();
    // Θ(1 ⊗ η) = η, so θ_{g1} is the coordinate of η at e_{g1}
    let eta = f.e.frame[(g1.index(), 0)];
    assert!((eta.norm() - 1.0).abs() < 1e-12);
    for (w, coef) in &f.theta.coeffs {
        let expect = if *w == g1 { eta } else { c(0.0, 0.0) };
        assert!((coef[(0, 0)] - expect).norm() < 1e-12, "{w}");
    }
}

#[test]
fn two_letter_generators_match_kernel_route() {
    let space = TruncatedFock::new(2, 3);
    let m = gen_by_words(&space, &[&[1], &[2]]);
    let f = blh_factorize(&m, 1, &space).unwrap();
    assert_eq!(f.e_dim, 2);
    let kernels = wandering_by_kernels(&m, &TupleSystem::shift(&space, 1));
    assert!(distance(&f.e, &kernels).unwrap() < 1e-8);
}

#[test]
fn non_submodule_rejected() {
    let space = TruncatedFock::new(2, 2);
    let m = Subspace::span(&Mat::from_columns(&[basis_vector(space.dim(), 0)]), 1e-10);
    assert!(matches!(blh_factorize(&m, 1, &space), Err(Error::NotInvariant { .. })));
}

#[test]
fn fourier_of_identity_and_right_shift() {
    let space = TruncatedFock::new(2, 3);
    let k = 2;
    let id = identity(space.dim() * k);
    let coeffs = fourier_coefficients(&id, &space, k, k, 3).unwrap();
    for (w, m) in &coeffs {
        let expect = if w.is_empty() { identity(k) } else { Mat::zeros(k, k) };
        assert!(norm2(&(m - expect)) < 1e-15);
    }
    let a = Mat::from_fn(3, 2, |i, j| c(i as f64 + 1.0, j as f64 - 0.5));
    let r1 = &right_tuple(&space)[0].entries;
    let theta = kron(r1, &a);
    let coeffs = fourier_coefficients(&theta, &space, 2, 3, 3).unwrap();
    let g1 = Word::letter(1, 2).unwrap();
    for (w, m) in &coeffs {
        let expect = if *w == g1 { a.clone() } else { Mat::zeros(3, 2) };
        assert!(norm2(&(m - expect)) < 1e-15, "{w}");
    }
}

#[test]
fn fourier_rejects_non_module_map() {
    let space = TruncatedFock::new(2, 2);
    let mut rng = random::rng(3);
    let junk = random::matrix(&mut rng, space.dim(), space.dim());
    assert!(matches!(fourier_coefficients(&junk, &space, 1, 1, 2), Err(Error::NotModuleMap { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn synthesis_analysis_round_trip(seed in any::<u64>(), e in 1usize..3, es in 1usize..3) {
        let space = TruncatedFock::new(2, 3);
        let mut rng = random::rng(seed);
        let coeffs: BTreeMap<Word, Mat> =
            enumerate_words(2, 2).into_iter().map(|w| (w, random::matrix(&mut rng, es, e))).collect();
        let ma = synthesize(&space, coeffs.clone(), e, es);
        let back = fourier_coefficients(&ma.matrix.entries, &space, e, es, 2).unwrap();
        for (w, m) in &coeffs {
            prop_assert!(norm2(&(m - &back[w])) < 1e-12);
        }
    }

    #[test]
    fn inner_and_range_on_window(seed in 0u64..1000, count in 1usize..3) {
        let space = TruncatedFock::new(2, 3);
        let m = random_flat_submodule(seed, &space, 2, count, 1);
        let f = blh_factorize(&m, 2, &space).unwrap();
        prop_assert!(f.inner_residual <= 1e-8);
        prop_assert!(f.range_distance <= 1e-8);
        prop_assert!(intertwining_residual(&f.theta.matrix.entries, &space, f.e_dim, 2) <= 1e-8);
    }
}

#[test]
fn constant_projection_has_constant_coefficients() {
    let space = TruncatedFock::new(2, 3);
    let mut rng = random::rng(11);
    let q = fockmod::linalg::orth(&random::matrix(&mut rng, 3, 2), 1e-10);
    let p = kron(&identity(space.dim()), &(&q * q.adjoint()));
    let coeffs = fourier_coefficients(&p, &space, 3, 3, 3).unwrap();
    for (w, m) in &coeffs {
        if !w.is_empty() {
            assert!(norm2(m) < 1e-14);
        }
    }
    let m = Subspace::span(&p, 1e-10);
    let k = is_reducing_constant(&m, &space, 3).expect("reducing");
    assert!(distance(&k, &Subspace::from_frame(q)).unwrap() < 1e-10);
}

#[test]
fn commutant_identity_and_single_variable_shift() {
    let space = TruncatedFock::new(1, 4);
    let sys = TupleSystem::shift(&space, 1);
    let m = gen_by_words(&space, &[&[1]]);
    let dm = m.ambient_dim;
    let rep = commutant_represent(&identity(dm), &m, &sys, 3).unwrap();
    for (w, coef) in &rep.phi.coeffs {
        let expect = if w.is_empty() { 1.0 } else { 0.0 };
        assert!((coef[(0, 0)] - c(expect, 0.0)).norm() < 1e-12);
    }
    let v1 = m.projector() * &sys.ops[0].entries * m.projector();
    let rep = commutant_represent(&v1, &m, &sys, 3).unwrap();
    let g1 = Word::letter(1, 1).unwrap();
    for (w, coef) in &rep.phi.coeffs {
        let expect = if *w == g1 { 1.0 } else { 0.0 };
        assert!((coef[(0, 0)] - c(expect, 0.0)).norm() < 1e-12, "{w}");
    }
    assert!(rep.model_residual < 1e-10);
}

#[test]
fn commutant_rejects_non_commuting() {
    let space = TruncatedFock::new(2, 3);
    let sys = TupleSystem::shift(&space, 1);
    let m = Subspace::full(space.dim());
    let s1 = sys.ops[0].entries.clone();
    assert!(matches!(commutant_represent(&s1, &m, &sys, 3), Err(Error::NotInCommutant { .. })));
}

#[test]
fn commutant_right_action_polynomial() {
    let space = TruncatedFock::new(2, 4);
    let k = 2;
    let keys = flat_keys(&space, k);
    let mut rng = random::rng(5);
    let gens = vec![homogeneous_vector(&mut rng, &keys, &[1])];
    let (m, w) = right_action_on_generated(&space, k, &gens).unwrap();
    let sys = TupleSystem::shift(&space, k);
    let mut p = NCPolynomial::new(2);
    for word in enumerate_words(2, 2) {
        p = p.term(word.letters(), random::complex(&mut rng)).unwrap();
    }
    let cmat = p.eval(&w).unwrap();
    let rep = commutant_represent(&cmat, &m, &sys, 3).unwrap();
    for (word, coef) in &p.terms {
        assert!((rep.phi.coefficient(word)[(0, 0)] - coef).norm() < 1e-10, "{word}");
    }
    for (word, coef) in &rep.phi.coeffs {
        if !p.terms.contains_key(word) {
            assert!(norm2(coef) < 1e-10);
        }
    }
}

#[test]
fn uniqueness_examples() {
    let space = TruncatedFock::new(2, 4);
    let k = 2;
    let m = random_flat_submodule(21, &space, k, 2, 1);
    let f1 = blh_factorize(&m, k, &space).unwrap();
    let same = uniqueness_unitary(&f1, &f1, &space).unwrap();
    assert!(norm2(&(same.tau - identity(f1.e_dim))) < 1e-10);

    let mut rng = random::rng(8);
    let u = random::unitary(&mut rng, f1.e_dim);
    let mut f2 = f1.clone();
    f2.theta.matrix.entries = &f1.theta.matrix.entries * kron(&identity(space.dim()), &u);
    let rot = uniqueness_unitary(&f1, &f2, &space).unwrap();
    assert!(norm2(&(rot.tau - &u)) < 1e-10);
    assert!(rot.residual < 1e-10);
}

#[test]
fn uniqueness_across_generator_order() {
    let space = TruncatedFock::new(2, 4);
    let k = 2;
    let keys = flat_keys(&space, k);
    let mut rng = random::rng(31);
    let gens = vec![homogeneous_vector(&mut rng, &keys, &[0]), homogeneous_vector(&mut rng, &keys, &[1])];
    let sys = TupleSystem::shift(&space, k);
    let m1 = generate_submodule(&sys, &gens);
    let rev: Vec<Vector> = gens.iter().rev().cloned().collect();
    let m2 = generate_submodule(&sys, &rev);
    let f1 = blh_factorize(&m1, k, &space).unwrap();
    let f2 = blh_factorize(&m2, k, &space).unwrap();
    let u = uniqueness_unitary(&f1, &f2, &space).unwrap();
    assert!(u.residual < 1e-8);
    assert!(u.unitarity_residual < 1e-8);
    assert!(u.coanalytic_residual < 1e-8);
}

#[test]
fn uniqueness_rejects_different_ranges() {
    let space = TruncatedFock::new(2, 3);
    let a = blh_factorize(&gen_by_words(&space, &[&[1]]), 1, &space).unwrap();
    let b = blh_factorize(&gen_by_words(&space, &[&[2]]), 1, &space).unwrap();
    assert!(matches!(uniqueness_unitary(&a, &b, &space), Err(Error::RangesDiffer { .. })));
}

#[test]
fn coefficient_table_keyed_by_flipped_read() {
    let space = TruncatedFock::new(2, 3);
    let rt = right_tuple(&space);
    let w = Word::new(vec![1, 2], 2).unwrap();
    let theta = word_matrix(&rt, &w).unwrap();
    let coeffs = fourier_coefficients(&theta, &space, 1, 1, 3).unwrap();
    assert!((coeffs[&w][(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    let ma = synthesize(&space, coeffs, 1, 1);
    assert!((ma.read_at(&fockmod::words::flip(&w))[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
}
