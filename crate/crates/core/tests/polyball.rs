use fockmod::blh::select_columns;
use fockmod::examples::random_module_submodule;
use fockmod::fock::{bold_creation, bold_tuple, basis_vector};
use fockmod::linalg::{identity, norm2, Mat};
use fockmod::modana::{generate_submodule, purity_profile, wandering_by_kernels, TupleSystem};
use fockmod::polyball::*;
use fockmod::random;
use fockmod::subspace::{distance, Subspace};
use fockmod::words::Word;
use fockmod::{Error, FockNModule, SpaceDesc};

fn generated(module: &FockNModule, tuples: &[&[&[usize]]]) -> Subspace {
    let gens: Vec<_> = tuples
        .iter()
        .map(|ws| {
            let w: Vec<Word> =
                ws.iter().zip(&module.factors).map(|(l, f)| Word::new(l.to_vec(), f.n).unwrap()).collect();
            basis_vector(module.dim(), module.basis_index(&w))
        })
        .collect();
    generate_submodule(&TupleSystem::new(bold_tuple(module)).unwrap(), &gens)
}

fn first_factor_system(module: &FockNModule) -> TupleSystem {
    let ops = (1..=module.factors[0].n).map(|j| bold_creation(module, 1, j).unwrap()).collect();
    TupleSystem::new(ops).unwrap()
}

#[test]
fn whole_space_is_identity_with_constant_phi() {
    let module = FockNModule::new(&[(2, 2), (1, 3)]);
    let m = Subspace::full(module.dim());
    let c = polyball_classify(&m, &module).unwrap();
    let rest = module.rest_dim();
    assert_eq!(c.blh.e_dim, rest);
    let th = &c.blh.theta.matrix.entries;
    assert!(norm2(&(th.adjoint() * th - identity(th.ncols()))) < 1e-12);
    let e = &c.blh.e.frame;
    for ((i, j), phi) in &c.phi {
        let sij = bold_creation(&module, *i, *j).unwrap().entries;
        let constant = e.adjoint() * sij * e;
        for (w, coef) in &phi.coeffs {
            let expect = if w.is_empty() { constant.clone() } else { Mat::zeros(rest, rest) };
            assert!(norm2(&(coef - expect)) < 1e-12);
        }
    }
    assert!(phi_row_isometry_check(&c).values().all(|&r| r < 1e-12));
    assert!(joint_equivalence_check(&m, &c).unwrap() < 1e-12);
}

#[test]
fn bidisc_surrogate() {
    let module = FockNModule::new(&[(1, 3), (1, 3)]);
    let m = generated(&module, &[&[&[1], &[]], &[&[], &[1]]]);
    let c = polyball_classify(&m, &module).unwrap();
    let kernels = wandering_by_kernels(&m, &first_factor_system(&module));
    assert_eq!(c.blh.e_dim, kernels.dim());
    // z1 ⊗ 1 and 1 ⊗ z2^b for 1 ≤ b ≤ 3
    assert_eq!(c.blh.e_dim, 4);
    assert!(distance(&c.blh.e, &kernels).unwrap() < 1e-8);
    assert!(c.intertwining_residual < 1e-8);
    assert!(joint_equivalence_check(&m, &c).unwrap() < 1e-8);
}

#[test]
fn single_generator_first_factor() {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    let m = generated(&module, &[&[&[1], &[]]]);
    let c = polyball_classify(&m, &module).unwrap();
    for (w, coef) in &c.blh.theta.coeffs {
        if w.len() != 1 || w.letters()[0] != 1 {
            assert!(norm2(coef) < 1e-12, "{w}");
        }
    }
    let e = &c.blh.e.frame;
    for ((i, j), phi) in &c.phi {
        let constant = e.adjoint() * bold_creation(&module, *i, *j).unwrap().entries * e;
        for (w, coef) in &phi.coeffs {
            if w.is_empty() {
                assert!(norm2(&(coef - &constant)) < 1e-12);
            } else {
                assert!(norm2(coef) < 1e-12);
            }
        }
    }
    assert!(c.intertwining_residual < 1e-8);
    assert!(joint_equivalence_check(&m, &c).unwrap() < 1e-8);
}

#[test]
fn random_submodules_satisfy_identities() {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    for seed in 0..6 {
        let m = random_module_submodule(seed, &module, 2, 1);
        let c = polyball_classify(&m, &module).unwrap();
        assert!(c.blh.inner_residual < 1e-8);
        assert!(c.intertwining_residual < 1e-8);
        assert!(c.two_path_residual < 1e-12);
        assert!(phi_row_isometry_check(&c).values().all(|&r| r < 1e-8));
        assert!(joint_equivalence_check(&m, &c).unwrap() < 1e-8);
    }
}

#[test]
fn single_factor_row_check_is_empty() {
    let module = FockNModule::new(&[(2, 3)]);
    let m = generated(&module, &[&[&[2]]]);
    let c = polyball_classify(&m, &module).unwrap();
    assert!(c.phi.is_empty());
    assert!(phi_row_isometry_check(&c).is_empty());
}

#[test]
fn non_invariant_rejected() {
    let module = FockNModule::new(&[(1, 2), (1, 2)]);
    let v = basis_vector(module.dim(), 0);
    let m = Subspace::span(&Mat::from_columns(&[v]), 1e-10);
    assert!(matches!(polyball_classify(&m, &module), Err(Error::NotInvariant { .. })));
}

#[test]
fn phi_is_pure_and_isometric_on_window() {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    let m = random_module_submodule(4, &module, 2, 1);
    let c = polyball_classify(&m, &module).unwrap();
    let dmax = module.factors.iter().map(|f| f.d).max().unwrap();
    for ((i, _), phi) in &c.phi {
        let p = &phi.matrix.entries;
        let cols = c.window_columns(0, Some(*i));
        let pw = select_columns(p, &cols);
        assert!(norm2(&(pw.adjoint() * &pw - identity(cols.len()))) < 1e-8);
        let sys = TupleSystem::from_mats(vec![p.clone()], SpaceDesc::flat(p.nrows())).unwrap();
        let profile = purity_profile(&sys, dmax + 2);
        assert!(profile.iter().all(|&x| x <= 1.0 + 1e-10));
        assert!(profile[dmax + 1..].iter().all(|&x| x < 1e-10));
    }
}

#[test]
fn direct_route_for_polydisc_surrogate() {
    let module = FockNModule::new(&[(1, 3), (1, 3)]);
    let m = random_module_submodule(9, &module, 2, 1);
    let c = polyball_classify(&m, &module).unwrap();
    let th = &c.blh.theta.matrix.entries;
    let s21 = bold_creation(&module, 2, 1).unwrap().entries;
    let direct = th.adjoint() * s21 * th;
    let cols = c.window_columns(0, Some(2));
    let diff = direct - &c.phi[&(2, 1)].matrix.entries;
    let sub = Mat::from_fn(cols.len(), cols.len(), |a, b| diff[(cols[a], cols[b])]);
    assert!(norm2(&sub) < 1e-8);
}

#[test]
fn uniqueness_cases() {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    let m = random_module_submodule(2, &module, 2, 1);
    let c1 = polyball_classify(&m, &module).unwrap();
    let same = polyball_uniqueness(&c1, &c1).unwrap();
    assert!(norm2(&(same.blh.tau.clone() - identity(c1.blh.e_dim))) < 1e-10);
    assert!(same.phi_residual < 1e-10);

    // unitary acting within each grading block
    let keys = &c1.blh.col_keys;
    let mut rng = random::rng(17);
    let e = c1.blh.e_dim;
    let mut u = Mat::zeros(e, e);
    let mut distinct = keys.clone();
    distinct.dedup();
    for key in &distinct {
        let idx: Vec<usize> = (0..e).filter(|&i| &keys[i] == key).collect();
        let block = random::unitary(&mut rng, idx.len());
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                u[(ia, ib)] = block[(a, b)];
            }
        }
    }
    let c2 = c1.rotated(&u);
    let rot = polyball_uniqueness(&c1, &c2).unwrap();
    assert!(norm2(&(rot.blh.tau.clone() - &u)) < 1e-10);
    assert!(rot.phi_residual < 1e-10);
}

#[test]
fn uniqueness_across_recomputation() {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    let m = random_module_submodule(12, &module, 2, 1);
    let shuffled = {
        let mut rng = random::rng(3);
        let u = random::unitary(&mut rng, m.dim());
        Subspace::from_frame(&m.frame * u)
    };
    let c1 = polyball_classify(&m, &module).unwrap();
    let c2 = polyball_classify(&shuffled, &module).unwrap();
    let u = polyball_uniqueness(&c1, &c2).unwrap();
    assert!(u.blh.residual < 1e-8);
    assert!(u.phi_residual < 1e-8);
}

#[test]
fn classify_over_another_factor() {
    let module = FockNModule::new(&[(1, 3), (2, 2)]);
    let m = random_module_submodule(5, &module, 2, 1);
    let (swapped, p) = module.permuted(&[1, 0]).unwrap();
    let ms = Subspace::from_frame(&p * &m.frame);
    let c = polyball_classify(&ms, &swapped).unwrap();
    assert!(c.intertwining_residual < 1e-8);
}

#[test]
fn mixed_multidegree_generator_shrinks_window() {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    let m = {
        let w = |a: Vec<usize>, b: Vec<usize>| {
            basis_vector(module.dim(), module.basis_index(&[Word::new(a, 2).unwrap(), Word::new(b, 1).unwrap()]))
        };
        let g = w(vec![], vec![1]) + w(vec![2], vec![]) * fockmod::linalg::c(0.3, 0.0);
        generate_submodule(&TupleSystem::new(bold_tuple(&module)).unwrap(), &[w(vec![1], vec![]), g])
    };
    let c = polyball_classify(&m, &module).unwrap();
    assert!(!c.blh.graded);
    assert_eq!(c.blh.window, 0);
    assert!(c.window_columns(1, None).is_empty());
    assert!(c.blh.inner_residual < 1e-8);
    assert!(c.intertwining_residual < 1e-8);
    assert!(joint_equivalence_check(&m, &c).unwrap() < 1e-8);
}
