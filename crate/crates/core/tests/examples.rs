use fockmod::examples::*;
use fockmod::linalg::{identity, norm2, Mat};
use fockmod::modana::{wandering_subspace, TupleSystem};
use fockmod::subspace::{distance, Subspace};
use fockmod::TruncatedFock;

#[test]
fn smallest_gap() {
    let g = dim_gap_example(1, 2, 3).unwrap();
    assert_eq!((g.dim_e, g.dim_estar), (2, 1));
    assert_eq!(g.theta_exact, vec![vec![vec![1, 0]], vec![vec![0, 1]]]);
    assert_eq!(g.sum_residual, 0.0);
    assert_eq!(g.isometry_residual, 0.0);
    assert!(g.module_residual < 1e-15);
    assert_eq!(g.range_fiber_dim, 2);

    let space = TruncatedFock::new(2, 3);
    let range = Subspace::span(&g.big_theta.matrix.entries, 1e-10);
    let w = wandering_subspace(&range, &TupleSystem::shift(&space, 1)).unwrap();
    assert_eq!(w.e.dim(), 2);
    assert!(w.e.dim() > g.dim_estar);
}

#[test]
fn three_letters_two_outputs() {
    let g = dim_gap_example(2, 3, 2).unwrap();
    assert_eq!((g.dim_e, g.dim_estar), (6, 2));
    assert_eq!(g.sum_residual, 0.0);
    // θ_i picks the i-th block of m coordinates
    for (i, t) in g.theta_exact.iter().enumerate() {
        for (r, row) in t.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                assert_eq!(x, u8::from(c == i * 2 + r));
            }
        }
    }
}

#[test]
fn gap_invariants_over_small_shapes() {
    for m in 1..=4 {
        for n in 2..=4 {
            if m * n > 12 {
                continue;
            }
            let g = dim_gap_example(m, n, 2).unwrap();
            assert_eq!(g.dim_e, m * n);
            assert!(g.dim_e > g.dim_estar);
            assert_eq!(g.sum_residual, 0.0);
            assert!(g.isometry_residual < 1e-14);
            assert!(g.module_residual < 1e-14);
            assert_eq!(g.range_fiber_dim, m * n);
            let sum = g.theta.iter().fold(Mat::zeros(m * n, m * n), |acc, t| acc + t.adjoint() * t);
            assert!(norm2(&(sum - identity(m * n))) == 0.0);
        }
    }
}

#[test]
fn gap_needs_two_letters() {
    assert!(dim_gap_example(1, 1, 3).is_err());
    assert!(dim_gap_example(0, 2, 3).is_err());
}

#[test]
fn fixtures_are_deterministic() {
    let names: Vec<&str> = fixture_suite().iter().map(|f| f.name).collect();
    assert_eq!(
        names,
        ["whole-space", "single-generator", "two-generator", "bidisc-surrogate", "polyball-whole", "polyball-single", "da-whole", "da-single"]
    );
    for (a, b) in fixture_suite().iter().zip(fixture_suite()) {
        let (ma, mb) = match (&a.kind, &b.kind) {
            (FixtureKind::Flat { m: x, .. }, FixtureKind::Flat { m: y, .. })
            | (FixtureKind::Module { m: x, .. }, FixtureKind::Module { m: y, .. })
            | (FixtureKind::Constrained { m: x, .. }, FixtureKind::Constrained { m: y, .. }) => (x.clone(), y.clone()),
            _ => panic!("kind changed for {}", a.name),
        };
        assert_eq!(ma.frame, mb.frame, "{}", a.name);
        assert!(distance(&ma, &mb).unwrap() < 1e-12);
    }
    assert!(fixture("nope").is_none());
    let flat = fixture("two-generator").unwrap();
    let f = factorize_fixture(&flat).unwrap().unwrap();
    assert!(f.inner_residual < 1e-8);
    assert!(factorize_fixture(&fixture("da-whole").unwrap()).is_none());
}

#[test]
fn random_submodules_are_seeded() {
    let space = TruncatedFock::new(2, 3);
    let a = random_flat_submodule(3, &space, 2, 2, 1);
    let b = random_flat_submodule(3, &space, 2, 2, 1);
    assert_eq!(a.frame, b.frame);
    let c = random_flat_submodule(4, &space, 2, 2, 1);
    assert!(distance(&a, &c).unwrap() > 1e-6 || a.dim() != c.dim());
}
