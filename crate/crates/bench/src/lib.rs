//! Fixtures shared by the benchmarks: spectrahedra and fixed objective
//! directions, so every run times the same problems.

use coatom_core::search::{random_direction, trial_rng};
use coatom_core::{LmiSpectrahedron, Model};

pub fn qubit_c3() -> LmiSpectrahedron {
    LmiSpectrahedron::from_local_space(&Model::C3Qubit.basis()).expect("c3 qubit space")
}

pub fn bit_c3() -> LmiSpectrahedron {
    LmiSpectrahedron::from_local_space(&Model::C3Bit.basis()).expect("c3 bit space")
}

/// `n` unit directions in R^m from stream `trial` of seed 0.
pub fn directions(m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..n as u64)
        .map(|k| random_direction(m, &mut trial_rng(0, k)))
        .collect()
}
