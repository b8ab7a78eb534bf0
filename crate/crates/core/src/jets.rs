//! Jets at `zeta = 1` and the jet-injectivity test on the kernel.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discs::Lift;
use crate::error::{Error, Result};
use crate::linalg::spectrum_of;
use crate::linearization::{partial_indices, KernelReport, LinearizedOperator, MIN_GAP, NULLITY_REL_TOL};

type C64 = Complex64;

/// Palindromic tolerance for kernel `g~` components.
pub const PALINDROME_TOL: f64 = 1e-10;

/// Taylor coefficients `f^{(k)}(1) / k!`, `k <= order`, of every slot of a lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetVector {
    pub order: usize,
    /// `values[slot][k]`, slots in `(w, z, z~, w~)` order.
    #[serde(with = "jet_serde")]
    pub values: Vec<Vec<C64>>,
}

mod jet_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<Vec<[f64; 2]>> = v
            .iter()
            .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
            .collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Complex64>>, D::Error> {
        let pairs = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|row| row.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
            .collect())
    }
}

impl JetVector {
    pub fn of(lift: &Lift, order: usize) -> Self {
        JetVector {
            order,
            values: lift.slots().iter().map(|c| c.taylor_at_one(order)).collect(),
        }
    }

    /// Only the base disc `(g, h)`.
    pub fn base_part(&self, d: usize, n: usize) -> Vec<Vec<C64>> {
        self.values[..d + n].to_vec()
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.values
            .iter()
            .flatten()
            .flat_map(|c| [c.re, c.im])
            .collect()
    }
}

/// `max(2 k0, largest partial index)`.
pub fn jet_order(op: &LinearizedOperator) -> Result<usize> {
    let pi = partial_indices(op)?;
    let kmax = pi.indices.iter().copied().max().unwrap_or(0);
    Ok((2 * op.model.k0() as i32).max(kmax).max(0) as usize)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JetReport {
    pub order: usize,
    pub rank: usize,
    pub expected: usize,
    pub gap: f64,
    pub singular_values: Vec<f64>,
    pub injective: bool,
    /// Worst deviation from `a_{2k0-l} = conj(a_l)` over kernel `g~` components.
    pub palindrome_error: f64,
    pub palindromic: bool,
}

/// Deviation of `g~` from a degree `<= 2k0` polynomial with `a_{2k0-l} = conj(a_l)`.
pub fn palindrome_error(lift: &Lift, k0: u32) -> f64 {
    let top = 2 * k0 as i32;
    lift.g_tilde
        .iter()
        .map(|c| {
            let p = c.to_laurent();
            let mut err = 0.0f64;
            for (k, a) in p.terms() {
                if k < 0 || k > top {
                    err = err.max(a.norm());
                } else {
                    err = err.max((p.coeff(top - k) - a.conj()).norm());
                }
            }
            err
        })
        .fold(0.0, f64::max)
}

/// Rank of the real matrix of lift jets of the kernel basis.
pub fn jet_injectivity(kernel: &KernelReport, k0: u32, order: usize) -> Result<JetReport> {
    let cols: Vec<Vec<f64>> = kernel
        .basis
        .iter()
        .map(|l| JetVector::of(l, order).to_real())
        .collect();
    let m = cols.len();
    let palindrome = kernel
        .basis
        .iter()
        .map(|l| palindrome_error(l, k0))
        .fold(0.0, f64::max);
    if m == 0 {
        return Ok(JetReport {
            order,
            rank: 0,
            expected: 0,
            gap: f64::INFINITY,
            singular_values: Vec::new(),
            injective: true,
            palindrome_error: palindrome,
            palindromic: true,
        });
    }
    let mat = DMatrix::from_fn(cols[0].len(), m, |r, c| cols[c][r]);
    let spec = spectrum_of(&mat, NULLITY_REL_TOL);
    if spec.gap < MIN_GAP {
        return Err(Error::Inconclusive(format!(
            "jet matrix at order {order} has no singular-value gap (ratio {:.3e}): {:?}",
            spec.gap, spec.singular_values
        )));
    }
    Ok(JetReport {
        order,
        rank: spec.rank,
        expected: m,
        gap: spec.gap,
        injective: spec.rank == m,
        singular_values: spec.singular_values,
        palindrome_error: palindrome,
        palindromic: palindrome <= PALINDROME_TOL,
    })
}

/// Jet ranks for `order = 0..=max_order`.
pub fn rank_profile(kernel: &KernelReport, k0: u32, max_order: usize) -> Result<Vec<usize>> {
    (0..=max_order)
        .map(|o| jet_injectivity(kernel, k0, o).map(|r| r.rank))
        .collect()
}
