//! Fixed instances shared by the benchmarks.

use fockmod::examples::{da_modules, random_constrained_submodule, random_flat_submodule, random_module_submodule};
use fockmod::variety::ConstrainedModule;
use fockmod::{FockNModule, Subspace, TruncatedFock};

pub fn flat_instance(n: usize, d: usize, k: usize) -> (TruncatedFock, Subspace) {
    let space = TruncatedFock::new(n, d);
    let m = random_flat_submodule(1, &space, k, 2, 1);
    (space, m)
}

pub fn polyball_instance() -> (FockNModule, Subspace) {
    let module = FockNModule::new(&[(2, 3), (1, 3)]);
    let m = random_module_submodule(1, &module, 2, 1);
    (module, m)
}

pub fn constrained_instance() -> (Vec<ConstrainedModule>, Subspace) {
    let da = da_modules(&[(2, 3), (1, 3)]).unwrap();
    let m = random_constrained_submodule(0, &da, 2, 1).unwrap();
    (da, m)
}
