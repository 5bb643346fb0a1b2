use fockmod::blh::{blh_factorize, intertwining_residual, uniqueness_unitary};
use fockmod::examples::{dim_gap_example, fixture};
use fockmod::fock::{algebra_residuals, bold_tuple};
use fockmod::linalg::c;
use fockmod::modana::{generate_submodule, invariance_residual, purity_profile, wandering_subspace, TupleSystem};
use fockmod::polyball::polyball_classify;
use fockmod::random;
use fockmod::variety::{
    constrained_classify, da_multiplier_eval, symmetric_check, whole_constrained, ConstrainedTensor,
};
use fockmod::words::word_count;
use fockmod::{Subspace, TruncatedFock, C64};
use serde_json::json;

use crate::problem::ProblemSpec;
use crate::report::Report;
use crate::verify;

/// Global options shared by every command.
pub struct Ctx {
    pub tol: f64,
    pub seed: u64,
}

/// Command failure that maps to exit code 2.
pub type CmdResult = Result<Report, String>;

fn core<T>(r: fockmod::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn tol_for(spec: &ProblemSpec, ctx: &Ctx) -> f64 {
    spec.tolerance.unwrap_or(ctx.tol)
}

fn seed_for(spec: &ProblemSpec, ctx: &Ctx) -> u64 {
    spec.seed.unwrap_or(ctx.seed)
}

fn module_system(spec: &ProblemSpec) -> TupleSystem {
    let k = spec.coeff_dim;
    TupleSystem::new(bold_tuple(&spec.module()).iter().map(|o| o.tensor_identity(k)).collect()).expect("bold tuple")
}

fn generated(spec: &ProblemSpec, sys: &TupleSystem) -> Result<Subspace, String> {
    if spec.generators.is_empty() {
        return Err("spec has no generators".into());
    }
    Ok(generate_submodule(sys, &spec.generator_vectors()))
}

pub fn fock_info(n: usize, d: usize, ctx: &Ctx) -> CmdResult {
    if n == 0 {
        return Err("n must be positive".into());
    }
    let space = TruncatedFock::new(n, d);
    let mut r = Report::new("fock-info", format!("fock-info n={n} d={d}").as_bytes(), ctx.seed, ctx.tol);
    r.dim("F", space.dim());
    let per_degree: Vec<usize> = (0..=d).map(|m| word_count(n, m) - if m == 0 { 0 } else { word_count(n, m - 1) }).collect();
    r.check_eq("dim = geometric sum", space.dim(), (0..=d).map(|m| n.pow(m as u32)).sum());
    let alg = algebra_residuals(&space, 2);
    r.check("S_i*S_j = δ_ij I on window", alg.adjoint);
    r.check_tol("Σ S_i S_i* + P_vac = I", alg.projection, 0.0);
    r.check("R^α = U_t S^α U_t, |α| ≤ 2", alg.flip);
    let profile = purity_profile(&TupleSystem::shift(&space, 1), d + 1);
    r.check("purity profile ones through d", profile[..=d].iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max));
    r.check("purity profile zero after d", profile[d + 1]);
    r.set_result(&json!({ "n": n, "d": d, "words_per_degree": per_degree, "purity_profile": profile }));
    Ok(r)
}

pub fn submodule(spec: &ProblemSpec, bytes: &[u8], ctx: &Ctx) -> CmdResult {
    let mut r = Report::new("submodule", bytes, seed_for(spec, ctx), tol_for(spec, ctx));
    let sys = module_system(spec);
    let m = generated(spec, &sys)?;
    let analysis = core(wandering_subspace(&m, &sys))?;
    r.dim("ambient", sys.dim());
    r.dim("M", m.dim());
    r.dim("E", analysis.e.dim());
    r.check("invariance", invariance_residual(&m, &sys.mats()));
    r.check("wandering orthogonality", analysis.residual);
    let dmax = *spec.d.iter().max().unwrap();
    let depth: usize = spec.d.iter().sum();
    let profile = purity_profile(&sys.restrict(&m), depth + 1);
    r.check("restricted purity profile ≤ 1", profile.iter().map(|x| x - 1.0).fold(0.0, f64::max));
    r.check("restricted purity profile vanishes", profile[depth + 1]);
    r.set_result(&json!({ "purity_profile": profile, "max_degree": dmax, "E": analysis.e }));
    Ok(r)
}

pub fn blh(spec: &ProblemSpec, bytes: &[u8], ctx: &Ctx) -> CmdResult {
    let mut r = Report::new("blh", bytes, seed_for(spec, ctx), tol_for(spec, ctx));
    let space = spec.space()?;
    let k = spec.coeff_dim;
    let sys = TupleSystem::shift(&space, k);
    let m = generated(spec, &sys)?;
    let f = core(blh_factorize(&m, k, &space))?;
    r.dim("M", m.dim());
    r.dim("E", f.e_dim);
    r.dim("Estar", k);
    r.dim("window", f.window);
    r.check("inner on window", f.inner_residual);
    r.check("range distance on window", f.range_distance);
    r.check("module map", intertwining_residual(&f.theta.matrix.entries, &space, f.e_dim, k));
    let mut rev = spec.generator_vectors();
    rev.reverse();
    let f2 = core(blh_factorize(&generate_submodule(&sys, &rev), k, &space))?;
    let u = core(uniqueness_unitary(&f, &f2, &space))?;
    r.check("uniqueness against reversed generators", u.residual);
    r.set_result(&json!({ "factorization": f, "uniqueness": u }));
    Ok(r)
}

pub fn polyball(spec: &ProblemSpec, bytes: &[u8], permute: Option<&[usize]>, ctx: &Ctx) -> CmdResult {
    let mut r = Report::new("polyball", bytes, seed_for(spec, ctx), tol_for(spec, ctx));
    if spec.coeff_dim != 1 {
        return Err("polyball needs coeff_dim = 1".into());
    }
    let mut module = spec.module();
    let mut m = generated(spec, &module_system(spec))?;
    if let Some(p) = permute {
        if p.iter().any(|&x| x == 0) {
            return Err("permutation is 1-based".into());
        }
        let zero_based: Vec<usize> = p.iter().map(|x| x - 1).collect();
        let (pm, mat) = core(module.permuted(&zero_based))?;
        m = Subspace::from_frame(&mat * &m.frame);
        module = pm;
    }
    let cls = core(polyball_classify(&m, &module))?;
    verify::polyball_checks(&mut r, "", &m, &cls)?;
    r.dim("M", m.dim());
    r.dim("E", cls.blh.e_dim);
    r.set_result(&cls);
    Ok(r)
}

pub fn variety(spec: &ProblemSpec, bytes: &[u8], ctx: &Ctx) -> CmdResult {
    let mut r = Report::new("variety", bytes, seed_for(spec, ctx), tol_for(spec, ctx));
    let modules = spec.constrained_modules()?;
    for (i, cm) in modules.iter().enumerate() {
        r.dim(&format!("N_J[{}]", i + 1), cm.nj.dim());
        r.dim(&format!("M_J[{}]", i + 1), cm.mj.dim());
        if cm.drury_arveson {
            let s = core(symmetric_check(cm))?;
            r.check(format!("factor {} B_i = P_N W_i P_N", i + 1), s.left_right);
            r.check(format!("factor {} N_J vs symmetrizer range", i + 1), s.symmetrizer_distance);
            r.check(format!("factor {} B_i commute", i + 1), s.commutator);
        }
    }
    let cls = if spec.generators.is_empty() {
        None
    } else {
        if spec.coeff_dim != 1 {
            return Err("constrained submodules need coeff_dim = 1".into());
        }
        let t = core(ConstrainedTensor::new(&modules))?;
        let m = t.from_coords(&t.generate(&spec.generator_vectors()));
        let cls = core(constrained_classify(&m, &modules))?;
        verify::constrained_checks(&mut r, "", &cls, true);
        r.dim("M", m.dim());
        r.dim("E", cls.e_dim);
        r.dim("Estar", cls.estar_dim);
        Some(cls)
    };
    r.set_result(&json!({ "modules": modules, "classification": cls }));
    Ok(r)
}

pub fn da_multiplier(
    spec: &ProblemSpec,
    bytes: &[u8],
    key: Option<(usize, usize)>,
    points: Option<Vec<Vec<C64>>>,
    ctx: &Ctx,
) -> CmdResult {
    let seed = seed_for(spec, ctx);
    let mut r = Report::new("da-multiplier", bytes, seed, tol_for(spec, ctx));
    if spec.coeff_dim != 1 {
        return Err("constrained submodules need coeff_dim = 1".into());
    }
    let modules = spec.constrained_modules()?;
    if modules.len() < 2 {
        return Err("multiplier needs at least two factors".into());
    }
    let t = core(ConstrainedTensor::new(&modules))?;
    let m = if spec.generators.is_empty() {
        core(whole_constrained(&modules))?
    } else {
        t.from_coords(&t.generate(&spec.generator_vectors()))
    };
    let cls = core(constrained_classify(&m, &modules))?;
    let key = key.or(spec.key).unwrap_or((2, 1));
    let n1 = modules[0].space.n;
    let points = match points {
        Some(p) => p,
        None if !spec.points.is_empty() => {
            spec.points.iter().map(|p| p.iter().map(|z| c(z[0], z[1])).collect()).collect()
        }
        None => {
            let mut rng = random::rng(seed);
            (0..5).map(|_| random::ball_point(&mut rng, n1, 0.6)).collect()
        }
    };
    let mut evals = Vec::new();
    for (i, z) in points.iter().enumerate() {
        let ev = core(da_multiplier_eval(&cls, key, z))?;
        r.check_tol(format!("series vs resolvent at point {i}"), (ev.difference - ev.tail_bound).max(0.0), 1e-9);
        evals.push(ev);
    }
    r.dim("E", cls.e_dim);
    r.dim("series_degree", cls.window);
    r.set_result(&json!({ "key": [key.0, key.1], "evaluations": evals }));
    Ok(r)
}

pub fn dim_gap(m: usize, n: usize, d: usize, ctx: &Ctx) -> CmdResult {
    let mut r = Report::new("example dim-gap", format!("dim-gap m={m} n={n} d={d}").as_bytes(), ctx.seed, ctx.tol);
    let inst = core(dim_gap_example(m, n, d))?;
    verify::dim_gap_checks(&mut r, "", &inst);
    r.dim("E", inst.dim_e);
    r.dim("Estar", inst.dim_estar);
    r.set_result(&inst);
    Ok(r)
}

pub fn fixture_report(name: &str, ctx: &Ctx) -> CmdResult {
    let f = fixture(name).ok_or_else(|| format!("unknown fixture {name:?}"))?;
    let mut r = Report::new("example fixture", format!("fixture {name}").as_bytes(), ctx.seed, ctx.tol);
    verify::fixture_checks(&mut r, &f, true)?;
    r.set_result(&json!({ "fixture": name }));
    Ok(r)
}
