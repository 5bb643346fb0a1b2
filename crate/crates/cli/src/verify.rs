//! Verification suites over the fixture catalogue and seeded random instances.

use fockmod::blh::{blh_factorize, commutant_represent, intertwining_residual, uniqueness_unitary};
use fockmod::examples::{
    da_modules, dim_gap_example, fixture_suite, flat_keys, homogeneous_vector, random_constrained_submodule,
    random_flat_submodule, random_module_submodule, right_action_on_generated, DimGapInstance, Fixture, FixtureKind,
};
use fockmod::fock::algebra_residuals;
use fockmod::modana::{purity_profile, TupleSystem};
use fockmod::polyball::{joint_equivalence_check, phi_row_isometry_check, polyball_classify, PolyballClassification};
use fockmod::random;
use fockmod::variety::{
    build_constrained, commutator_ideal, constrained_classify, da_multiplier_eval, symmetric_check,
    ConstrainedClassification,
};
use fockmod::words::enumerate_words;
use fockmod::{FockNModule, Subspace, TruncatedFock};
use serde_json::json;

use crate::commands::Ctx;
use crate::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Core,
    Variety,
    All,
}

fn core<T>(r: fockmod::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn polyball_checks(r: &mut Report, prefix: &str, m: &Subspace, cls: &PolyballClassification) -> Result<(), String> {
    r.check(format!("{prefix}invariance"), cls.invariance_residual);
    r.check(format!("{prefix}S_ij Θ = Θ Φ_ij"), cls.intertwining_residual);
    r.check_tol(format!("{prefix}two-path coefficients"), cls.two_path_residual, 1e-12);
    r.check(format!("{prefix}Θ inner on window"), cls.blh.inner_residual);
    for (i, res) in phi_row_isometry_check(cls) {
        r.check(format!("{prefix}Φ_{i}· row isometry"), res);
    }
    r.check(format!("{prefix}joint equivalence"), core(joint_equivalence_check(m, cls))?);
    Ok(())
}

pub fn constrained_checks(r: &mut Report, prefix: &str, cls: &ConstrainedClassification, partial_isometry: bool) {
    r.check(format!("{prefix}invariance"), cls.invariance_residual);
    r.check(format!("{prefix}E ⊆ N_J ⊗ E* containment"), cls.containment_residual);
    if partial_isometry {
        r.check(format!("{prefix}ΘΘ* = P_M on window"), cls.partial_isometry_residual);
    }
    r.check(format!("{prefix}P_N Θ̃ fiber covers M"), cls.full_fiber_residual);
    r.check(format!("{prefix}B_ij Θ = Θ Φ_ij"), cls.intertwining_residual);
}

pub fn dim_gap_checks(r: &mut Report, prefix: &str, inst: &DimGapInstance) {
    r.check_tol(format!("{prefix}Σ θ_i*θ_i = I"), inst.sum_residual, 0.0);
    r.check_tol(format!("{prefix}Θ*Θ = I on window"), inst.isometry_residual, 1e-12);
    r.check(format!("{prefix}module map"), inst.module_residual);
    r.check_eq(format!("{prefix}range fiber = mn"), inst.range_fiber_dim, inst.m * inst.n);
    r.check_tol(format!("{prefix}dim E > dim E*"), if inst.dim_e > inst.dim_estar { 0.0 } else { 1.0 }, 0.0);
}

pub fn fixture_checks(r: &mut Report, f: &Fixture, partial_isometry: bool) -> Result<(), String> {
    let prefix = format!("{}: ", f.name);
    match &f.kind {
        FixtureKind::Flat { space, coeff_dim, m } => {
            let fact = core(blh_factorize(m, *coeff_dim, space))?;
            r.check(format!("{prefix}Θ inner on window"), fact.inner_residual);
            r.check(format!("{prefix}range distance"), fact.range_distance);
            r.check(format!("{prefix}module map"), intertwining_residual(&fact.theta.matrix.entries, space, fact.e_dim, *coeff_dim));
        }
        FixtureKind::Module { module, m } => {
            let cls = core(polyball_classify(m, module))?;
            polyball_checks(r, &prefix, m, &cls)?;
        }
        FixtureKind::Constrained { modules, m } => {
            let cls = core(constrained_classify(m, modules))?;
            constrained_checks(r, &prefix, &cls, partial_isometry);
            let mut rng = random::rng(r.provenance.seed);
            for i in 0..3 {
                let z = random::ball_point(&mut rng, modules[0].space.n, 0.6);
                let ev = core(da_multiplier_eval(&cls, (2, 1), &z))?;
                r.check_tol(format!("{prefix}multiplier point {i}"), (ev.difference - ev.tail_bound).max(0.0), 1e-9);
            }
        }
    }
    Ok(())
}

/// Largest coefficient error recovering a random degree-≤2 polynomial in the right action.
fn commutant_error(seed: u64) -> Result<f64, String> {
    let space = TruncatedFock::new(2, 4);
    let k = 2;
    let mut rng = random::rng(seed);
    let gens = vec![homogeneous_vector(&mut rng, &flat_keys(&space, k), &[1])];
    let (m, w) = core(right_action_on_generated(&space, k, &gens))?;
    let mut p = fockmod::variety::NCPolynomial::new(2);
    for word in enumerate_words(2, 2) {
        p = core(p.term(word.letters(), random::complex(&mut rng)))?;
    }
    let rep = core(commutant_represent(&core(p.eval(&w))?, &m, &TupleSystem::shift(&space, k), 3))?;
    let mut err: f64 = 0.0;
    for (word, coef) in &rep.phi.coeffs {
        let expect = p.terms.get(word).copied().unwrap_or_default();
        err = err.max((coef[(0, 0)] - expect).norm());
    }
    Ok(err)
}

fn core_suite(r: &mut Report, seed: u64) -> Result<(), String> {
    for n in 1..=3 {
        for d in 2..=4 {
            let a = algebra_residuals(&TruncatedFock::new(n, d), 2);
            r.check_tol(format!("algebra n={n} d={d}: adjoint"), a.adjoint, 1e-12);
            r.check_tol(format!("algebra n={n} d={d}: projection"), a.projection, 0.0);
            r.check_tol(format!("algebra n={n} d={d}: flip"), a.flip, 1e-12);
        }
    }
    for f in fixture_suite() {
        fixture_checks(r, &f, false)?;
    }
    let space = TruncatedFock::new(2, 4);
    for i in 0..5 {
        let s = seed.wrapping_add(i);
        let m = random_flat_submodule(s, &space, 2, 2, 1);
        let f1 = core(blh_factorize(&m, 2, &space))?;
        r.check(format!("random flat {i}: Θ inner"), f1.inner_residual);
        r.check(format!("random flat {i}: range distance"), f1.range_distance);
        let u = random::unitary(&mut random::rng(s ^ 0x5eed), m.dim());
        let f2 = core(blh_factorize(&Subspace::from_frame(&m.frame * u), 2, &space))?;
        r.check(format!("random flat {i}: uniqueness"), core(uniqueness_unitary(&f1, &f2, &space))?.residual);
    }
    for i in 0..3 {
        r.check_tol(format!("commutant polynomial {i}"), commutant_error(seed.wrapping_add(100 + i))?, 1e-10);
    }
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    for i in 0..3 {
        let m = random_module_submodule(seed.wrapping_add(200 + i), &module, 2, 1);
        let cls = core(polyball_classify(&m, &module))?;
        polyball_checks(r, &format!("random polyball {i}: "), &m, &cls)?;
    }
    for (m, n) in [(1, 2), (2, 2), (2, 3)] {
        let inst = core(dim_gap_example(m, n, 3))?;
        dim_gap_checks(r, &format!("dim-gap m={m} n={n}: "), &inst);
    }
    let shift = TruncatedFock::new(2, 3);
    let profile = purity_profile(&TupleSystem::shift(&shift, 1), 5);
    r.check("shift purity ones through d", profile[..=3].iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max));
    r.check("shift purity zero after d", profile[4..].iter().copied().fold(0.0, f64::max));
    Ok(())
}

fn variety_suite(r: &mut Report, seed: u64) -> Result<(), String> {
    let cm = core(build_constrained(&TruncatedFock::new(2, 3), &commutator_ideal(2)))?;
    r.check_eq("commutator quotient n=2 d=3 dimension", cm.nj.dim(), 10);
    let s = core(symmetric_check(&cm))?;
    r.check_tol("N_J vs symmetrizer range", s.symmetrizer_distance, 1e-10);
    r.check_tol("B_i commute", s.commutator, 1e-10);
    r.check("B_i = P_N W_i P_N", s.left_right);
    for f in fixture_suite().iter().filter(|f| matches!(f.kind, FixtureKind::Constrained { .. })) {
        fixture_checks(r, f, true)?;
    }
    let da = core(da_modules(&[(2, 3), (1, 3)]))?;
    for i in 0..3 {
        let m = core(random_constrained_submodule(seed.wrapping_add(300 + i), &da, 2, 1))?;
        let cls = core(constrained_classify(&m, &da))?;
        constrained_checks(r, &format!("random DA {i}: "), &cls, true);
    }
    Ok(())
}

pub fn run(suite: Suite, ctx: &Ctx) -> Result<Report, String> {
    let name = format!("{suite:?}").to_lowercase();
    let mut r = Report::new("verify", format!("verify suite={name}").as_bytes(), ctx.seed, ctx.tol);
    if matches!(suite, Suite::Core | Suite::All) {
        core_suite(&mut r, ctx.seed)?;
    }
    if matches!(suite, Suite::Variety | Suite::All) {
        variety_suite(&mut r, ctx.seed)?;
    }
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    r.dim("checks", r.checks.len());
    r.dim("failed", failed);
    r.set_result(&json!({ "suite": name }));
    Ok(r)
}
