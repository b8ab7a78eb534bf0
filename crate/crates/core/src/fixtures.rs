//! Standard models used by the tests, the benches and the CLI fixtures.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::{ComponentSpec, Model, ModelFile};

type C64 = Complex64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn unit(n: usize, i: usize, e: u32) -> Vec<u32> {
    let mut v = vec![0; n];
    v[i] = e;
    v
}

/// `Re w = |z|^2`.
pub fn sphere_file() -> ModelFile {
    ModelFile::new(1, vec![ComponentSpec::new(2, &[(vec![1], vec![1], re(1.0))])])
}

pub fn sphere() -> Model {
    Model::from_file(&sphere_file()).expect("valid fixture")
}

/// `Re w = |z|^4 + 2t Re(z^3 conj z)`.
pub fn quartic_file(t: f64) -> ModelFile {
    ModelFile::new(
        1,
        vec![ComponentSpec::new(
            4,
            &[(vec![2], vec![2], re(1.0)), (vec![3], vec![1], re(t))],
        )],
    )
}

pub fn quartic(t: f64) -> Model {
    Model::from_file(&quartic_file(t)).expect("valid fixture")
}

fn power_sum(n: usize, degree: u32) -> ComponentSpec {
    let h = degree / 2;
    let terms: Vec<_> = (0..n)
        .map(|i| (unit(n, i, h), unit(n, i, h), re(1.0)))
        .collect();
    ComponentSpec::new(degree, &terms)
}

/// `P_l = |z_1|^{D_l} + |z_2|^{D_l}` in `C^4` (even degrees).
pub fn example3_file(d1: u32, d2: u32) -> ModelFile {
    ModelFile::new(2, vec![power_sum(2, d1), power_sum(2, d2)])
}

pub fn example3(d1: u32, d2: u32) -> Model {
    Model::from_file(&example3_file(d1, d2)).expect("valid fixture")
}

/// Decoupled model `P_1(z_1) = |z_1|^2`, `P_2(z_2) = |z_2|^4 + 0.4 Re(z_2^3 conj z_2)`.
pub fn decoupled_file() -> ModelFile {
    ModelFile::new(
        2,
        vec![
            ComponentSpec::new(2, &[(vec![1, 0], vec![1, 0], re(1.0))]),
            ComponentSpec::new(
                4,
                &[
                    (vec![0, 2], vec![0, 2], re(1.0)),
                    (vec![0, 3], vec![0, 1], re(0.2)),
                ],
            ),
        ],
    )
}

pub fn decoupled() -> Model {
    Model::from_file(&decoupled_file()).expect("valid fixture")
}

/// Quadric `P_l = conj(z)^T A_l z` for Hermitian `A_l`.
pub fn quadric_file(matrices: &[DMatrix<C64>]) -> ModelFile {
    let n = matrices[0].nrows();
    let comps = matrices
        .iter()
        .map(|a| {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in i..n {
                    // alpha_{IJ} with I = e_j, J = e_i multiplies z_j conj(z_i)
                    if a[(i, j)] != C64::new(0.0, 0.0) {
                        terms.push((unit(n, j, 1), unit(n, i, 1), a[(i, j)]));
                    }
                }
            }
            if terms.is_empty() {
                ComponentSpec::zero()
            } else {
                ComponentSpec::new(2, &terms)
            }
        })
        .collect();
    ModelFile::new(n, comps)
}

pub fn quadric(matrices: &[DMatrix<C64>]) -> Model {
    Model::from_file(&quadric_file(matrices)).expect("valid fixture")
}

/// Random Hermitian matrices with Gaussian entries, seeded.
pub fn random_hermitian(n: usize, count: usize, seed: u64) -> Vec<DMatrix<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = DMatrix::from_fn(n, n, |_, _| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            m = (&m + m.adjoint()) * re(0.5);
            m
        })
        .collect()
}
