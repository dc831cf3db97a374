//! Random matrix ensembles used by property checks and the sampler.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::herm::{HermitianMatrix, C64};

pub fn gaussian_vector<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    (0..m).map(|_| StandardNormal.sample(rng)).collect()
}

/// GUE-like hermitian matrix: (G + G*) / 2 with iid complex Gaussian G.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let g: Vec<C64> = (0..dim * dim)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            data[i * dim + j] = (g[i * dim + j] + g[j * dim + i].conj()) * 0.5;
        }
    }
    HermitianMatrix::new(dim, data).expect("symmetrized by construction")
}

/// Real symmetric counterpart of [`random_hermitian`].
pub fn random_real_symmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let g = gaussian_vector(dim * dim, rng);
    let data: Vec<f64> = (0..dim * dim)
        .map(|k| {
            let (i, j) = (k / dim, k % dim);
            0.5 * (g[i * dim + j] + g[j * dim + i])
        })
        .collect();
    HermitianMatrix::from_real(dim, &data).expect("symmetric by construction")
}

/// Density matrix G G* / Tr(G G*) from the Ginibre ensemble (full rank a.s.).
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let g: Vec<C64> = (0..dim * dim)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                acc += g[i * dim + k] * g[j * dim + k].conj();
            }
            data[i * dim + j] = acc;
        }
    }
    let m = HermitianMatrix::new(dim, data).expect("G G* is hermitian");
    let tr = m.trace();
    m.scale(1.0 / tr)
}

/// Haar-random pure state |psi><psi|.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianMatrix {
    let v: Vec<C64> = (0..dim)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = crate::herm::vec_norm(&v);
    let v: Vec<C64> = v.into_iter().map(|z| z / norm).collect();
    HermitianMatrix::outer(&v)
}
