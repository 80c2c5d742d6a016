use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::Dataset;

pub fn gaussian_design(n: usize, p: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng))
}

pub fn random_dataset(n: usize, p: usize, seed: u64) -> Dataset {
    let x = gaussian_design(n, p, seed);
    let y: DVector<f64> = gaussian_design(n, 1, seed ^ 0xABCD).column(0).into_owned();
    Dataset::new(x, y).unwrap()
}

/// Design with `n⁻¹X'X = I`.
pub fn orthonormal_dataset(n: usize, p: usize, seed: u64) -> Dataset {
    let q = gaussian_design(n, p, seed).qr().q();
    let x = q * (n as f64).sqrt();
    let y = gaussian_design(n, 1, seed ^ 0x1234).column(0).into_owned() * 2.0;
    Dataset::new(x, y).unwrap()
}
