//! The linearized boundary operator `f -> 2 Re(conj(G) f)` at the initial
//! lift, its kernel, the reduced symbol and its partial indices.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admissibility::{build_qs, check_admissible, index_report, CandidatePair};
use crate::circlefun::{argument_principle, fourier_coefficients, BoundaryGrid, LaurentMatrix, LaurentPoly};
use crate::discs::{initial_lift, ConstrainedDisc, Lift};
use crate::error::{Error, Result};
use crate::linalg::{null_space, spectrum_of};
use crate::model::{LiftedDefiningSystem, Model};
use crate::polyring::BiPoly;

type C64 = Complex64;

/// Relative singular-value threshold for nullity decisions.
pub const NULLITY_REL_TOL: f64 = 1e-8;
/// Required ratio between the smallest kept and largest discarded value.
pub const MIN_GAP: f64 = 1e4;
const FD_TOL: f64 = 1e-6;
const SYMBOL_MAX_COND: f64 = 1e12;
const SYMBOL_GRID: usize = 4096;

/// `G(zeta)` at the initial lift together with the domain description.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    pub model: Model,
    pub pair: CandidatePair,
    pub lift: Lift,
    /// `(2n + 2d)` square, columns in `(w, z, z~, w~)` order, rows in the
    /// residual order of the lifted system.
    pub g: LaurentMatrix,
    pub pinned: bool,
}

impl LinearizedOperator {
    pub fn size(&self) -> usize {
        2 * self.model.n() + 2 * self.model.d()
    }

    pub fn pinned(mut self, pinned: bool) -> Self {
        self.pinned = pinned;
        self
    }

    /// Vanishing orders of the domain, in slot order.
    pub fn orders(&self) -> Vec<u32> {
        let (n, d) = (self.model.n(), self.model.d());
        let mut o = vec![1; d + n];
        o.extend(std::iter::repeat_n(self.model.d1() - 1, n));
        o.extend(std::iter::repeat_n(u32::from(self.pinned), d));
        o
    }

    /// `2 Re(conj(G(zeta)) f(zeta))` for a lift `f`.
    pub fn apply(&self, f: &Lift, zeta: C64) -> Vec<f64> {
        let gz = self.g.eval(zeta);
        let vals: Vec<C64> = f.slots().iter().map(|c| c.eval(zeta)).collect();
        (0..self.size())
            .map(|r| {
                2.0 * (0..self.size())
                    .map(|k| gz[(r, k)].conj() * vals[k])
                    .sum::<C64>()
                    .re
            })
            .collect()
    }
}

fn ray(p: &BiPoly, v: &[C64]) -> Result<LaurentPoly> {
    if p.is_zero() {
        Ok(LaurentPoly::zero())
    } else {
        p.restrict_to_ray(v)
    }
}

/// Closed-form `G` at the initial lift, checked against finite differences
/// of the lifted residuals.
pub fn assemble_g(model: &Model, pair: &CandidatePair) -> Result<LinearizedOperator> {
    let lift = initial_lift(model, pair)?;
    let (n, d) = (model.n(), model.d());
    let k0 = model.k0() as i32;
    let size = 2 * n + 2 * d;
    let (cw, cz, czt, cwt) = (0, d, d + n, d + 2 * n);
    let i = C64::i();
    let v = &pair.v;
    let mut g = LaurentMatrix::zeros(size, size);
    for (l, p) in model.components().iter().enumerate() {
        g.set(l, cw + l, LaurentPoly::constant(C64::new(0.5, 0.0)));
        for col in 0..n {
            g.set(l, cz + col, -&ray(&p.poly().diff_zbar(col), v)?);
        }
        g.set(d + 2 * n + l, cwt + l, LaurentPoly::monomial(k0, -i));
    }
    for j in 0..n {
        let (re_row, im_row) = (d + 2 * j, d + 2 * j + 1);
        for col in 0..n {
            let mut hol = LaurentPoly::zero();
            let mut anti = LaurentPoly::zero();
            for (l, p) in model.components().iter().enumerate() {
                let c = C64::new(pair.c[l], 0.0);
                hol = &hol + &ray(&p.poly().diff_z(j).diff_zbar(col), v)?.scale(c);
                anti = &anti + &ray(&p.poly().diff_zbar(j).diff_zbar(col), v)?.scale(c);
            }
            let (hol, anti) = (hol.shift(k0), anti.shift(-k0));
            g.set(re_row, cz + col, &hol + &anti);
            g.set(im_row, cz + col, (&hol - &anti).scale(i));
        }
        g.set(re_row, czt + j, LaurentPoly::constant(C64::new(1.0, 0.0)));
        g.set(im_row, czt + j, LaurentPoly::constant(-i));
        for (l, p) in model.components().iter().enumerate() {
            let pzb = ray(&p.poly().diff_zbar(j), v)?.scale(C64::new(2.0, 0.0));
            g.set(re_row, cwt + l, pzb.clone());
            g.set(im_row, cwt + l, pzb.scale(-i));
        }
    }
    let op = LinearizedOperator {
        model: model.clone(),
        pair: pair.clone(),
        lift,
        g,
        pinned: false,
    };
    let err = finite_difference_mismatch(&op, 16)?;
    if err > FD_TOL {
        return Err(Error::Consistency(format!(
            "closed-form G differs from finite differences by {err:.3e}"
        )));
    }
    Ok(op)
}

/// As [`assemble_g`] but for a lifted system; perturbed systems are refused.
pub fn assemble_g_for(sys: &LiftedDefiningSystem, pair: &CandidatePair) -> Result<LinearizedOperator> {
    if sys.is_perturbed() {
        return Err(Error::ModelOnly);
    }
    assemble_g(sys.base_model(), pair)
}

/// Max relative deviation between `G` and `(d/dRe + i d/dIm)/2` of the lifted
/// residuals at `points` boundary samples of the initial lift.
pub fn finite_difference_mismatch(op: &LinearizedOperator, points: usize) -> Result<f64> {
    let sys = LiftedDefiningSystem::model(&op.model);
    let (n, d) = (op.model.n(), op.model.d());
    let size = op.size();
    let mut worst = 0.0f64;
    for s in 0..points {
        let zeta = C64::from_polar(1.0, 0.3 + 2.0 * std::f64::consts::PI * s as f64 / points as f64);
        let base = op.lift.point_at(zeta);
        let gz = op.g.eval(zeta);
        let scale = 1.0 + gz.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for k in 0..size {
            let mut deriv = [vec![0.0; size], vec![0.0; size]];
            for (part, dir) in [C64::new(1.0, 0.0), C64::i()].into_iter().enumerate() {
                let h = 1e-6;
                let eval = |sgn: f64| {
                    let mut p = base.clone();
                    let slot = if k < d {
                        &mut p.w[k]
                    } else if k < d + n {
                        &mut p.z[k - d]
                    } else if k < d + 2 * n {
                        &mut p.zt[k - d - n]
                    } else {
                        &mut p.wt[k - d - 2 * n]
                    };
                    *slot += dir * (sgn * h);
                    sys.lifted_residuals(zeta, &p)
                };
                let (plus, minus) = (eval(1.0)?, eval(-1.0)?);
                for r in 0..size {
                    deriv[part][r] = (plus[r] - minus[r]) / (2.0 * h);
                }
            }
            for r in 0..size {
                let fd = C64::new(deriv[0][r], deriv[1][r]) * 0.5;
                worst = worst.max((fd - gz[(r, k)]).norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// `G` with its `z`-columns divided by `(1 - conj zeta)^{D1-2}`.
pub fn reduced_g(op: &LinearizedOperator) -> Result<LaurentMatrix> {
    let (n, d) = (op.model.n(), op.model.d());
    let p = op.model.d1() - 2;
    let size = op.size();
    let mut out = op.g.clone();
    if p == 0 {
        return Ok(out);
    }
    // (1 - conj zeta)^p = (-1)^p zeta^-p (1 - zeta)^p on the circle
    let sign = C64::new(if p % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    for k in d..d + n {
        for r in 0..size {
            let e = op.g.get(r, k);
            let Some(lo) = e.lo() else { continue };
            let (q, rem) = e.shift(-lo).div_one_minus_zeta_pow(p)?;
            if rem > 1e-12 * (1.0 + e.max_abs_coeff()) {
                return Err(Error::Consistency(format!(
                    "G entry ({r}, {k}) is not divisible by (1 - conj zeta)^{p} (remainder {rem:.3e})"
                )));
            }
            out.set(r, k, q.shift(lo + p as i32).scale(sign));
        }
    }
    Ok(out)
}

/// Winding of `det(-conj(G~)^-1 G~)` for the reduced `G~` of [`reduced_g`];
/// equals `ind + 2 d k0` for admissible pairs.
pub fn maslov_index(op: &LinearizedOperator) -> Result<i32> {
    let g = reduced_g(op)?;
    argument_principle(
        |z| {
            let det = g.eval(z).determinant();
            det / det.conj()
        },
        2 * g.bandwidth() as usize * op.size(),
    )
}

/// Real matrix of `f -> 2 Re(conj(G) f)` from core coefficients (degree `n_trunc`)
/// to `samples` boundary points, scaled by `1/sqrt(samples)`.
pub fn operator_matrix(op: &LinearizedOperator, n_trunc: usize, samples: usize) -> DMatrix<f64> {
    let size = op.size();
    let orders = op.orders();
    let cols = 2 * size * (n_trunc + 1);
    let grid = BoundaryGrid::new(samples);
    let scale = 1.0 / (samples as f64).sqrt();
    let blocks: Vec<DMatrix<f64>> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let zeta = grid.point(s);
            let gz = op.g.eval(zeta);
            let mut block = DMatrix::zeros(size, cols);
            for (k, &m) in orders.iter().enumerate() {
                let base = (C64::new(1.0, 0.0) - zeta).powu(m);
                let mut phi = base;
                for j in 0..=n_trunc {
                    let col = 2 * (k * (n_trunc + 1) + j);
                    for r in 0..size {
                        let t = gz[(r, k)].conj() * phi;
                        block[(r, col)] = 2.0 * t.re * scale;
                        block[(r, col + 1)] = -2.0 * t.im * scale;
                    }
                    phi *= zeta;
                }
            }
            block
        })
        .collect();
    let mut out = DMatrix::zeros(size * samples, cols);
    for (s, b) in blocks.iter().enumerate() {
        out.view_mut((s * size, 0), (size, cols)).copy_from(b);
    }
    out
}

/// Boundary sample count used for a truncation degree.
pub fn sample_count(op: &LinearizedOperator, n_trunc: usize) -> usize {
    let bw = op.g.bandwidth() as usize + op.orders().into_iter().max().unwrap_or(0) as usize;
    4 * (n_trunc + bw)
}

/// Lift from a real coefficient vector in the layout of [`operator_matrix`].
pub fn lift_from_coefficients(op: &LinearizedOperator, x: &[f64], n_trunc: usize) -> Lift {
    let slots = op
        .orders()
        .into_iter()
        .enumerate()
        .map(|(k, m)| {
            let core = (0..=n_trunc)
                .map(|j| {
                    let c = 2 * (k * (n_trunc + 1) + j);
                    C64::new(x[c], x[c + 1])
                })
                .collect();
            ConstrainedDisc::new(m, core)
        })
        .collect();
    Lift::from_slots(op.model.n(), op.model.d(), slots)
}

/// Max over a boundary grid of `|2 Re(conj(G) f)|`.
pub fn linearized_residual(op: &LinearizedOperator, f: &Lift, grid: BoundaryGrid) -> f64 {
    (0..grid.len())
        .into_par_iter()
        .map(|s| {
            op.apply(f, grid.point(s))
                .into_iter()
                .map(f64::abs)
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelReport {
    pub nullity: usize,
    /// `m` from the dimension formula (minus `d` when pinned).
    pub expected: i32,
    pub matches: bool,
    pub pinned: bool,
    pub truncations: Vec<usize>,
    pub nullities: Vec<usize>,
    pub gaps: Vec<f64>,
    pub smallest_kept: f64,
    pub largest_discarded: f64,
    pub max_linearized_residual: f64,
    pub basis: Vec<Lift>,
}

/// Kernel of the truncated operator at `n_trunc`, `n_trunc + 4`, `n_trunc + 8`.
pub fn kernel(op: &LinearizedOperator, n_trunc: usize) -> Result<KernelReport> {
    let idx = index_report(&op.model, &op.pair)?;
    let expected = if op.pinned {
        idx.pinned_dimension
    } else {
        idx.dimension
    };
    let truncations = vec![n_trunc, n_trunc + 4, n_trunc + 8];
    let mut nullities = Vec::new();
    let mut gaps = Vec::new();
    let mut first = None;
    for &nt in &truncations {
        let a = operator_matrix(op, nt, sample_count(op, nt));
        if first.is_none() {
            let (spec, basis) = null_space(&a, NULLITY_REL_TOL);
            nullities.push(spec.nullity());
            gaps.push(spec.gap);
            first = Some((spec, basis));
        } else {
            let spec = spectrum_of(&a, NULLITY_REL_TOL);
            nullities.push(spec.nullity());
            gaps.push(spec.gap);
        }
    }
    let (spec, basis) = first.expect("at least one truncation");
    if nullities.iter().any(|&k| k != nullities[0]) || gaps.iter().any(|&g| g < MIN_GAP) {
        return Err(Error::Inconclusive(format!(
            "kernel nullity not stable: truncations {truncations:?}, nullities {nullities:?}, gaps {gaps:?}"
        )));
    }
    let lifts: Vec<Lift> = (0..basis.ncols())
        .map(|k| {
            let col: Vec<f64> = basis.column(k).iter().copied().collect();
            lift_from_coefficients(op, &col, n_trunc)
        })
        .collect();
    let fine = BoundaryGrid::new(4 * sample_count(op, n_trunc));
    let max_res = lifts
        .iter()
        .map(|l| linearized_residual(op, l, fine))
        .fold(0.0, f64::max);
    Ok(KernelReport {
        nullity: nullities[0],
        expected,
        matches: nullities[0] as i32 == expected,
        pinned: op.pinned,
        truncations,
        nullities,
        gaps,
        smallest_kept: spec.smallest_kept(),
        largest_discarded: spec.largest_discarded(),
        max_linearized_residual: max_res,
        basis: lifts,
    })
}

// ---------------------------------------------------------------- partial indices

/// `G~_2(zeta)` in the permuted order `(z~_1, z_1, ..., z~_n, z_n)`.
fn reduced_block(q: &DMatrix<C64>, s: &DMatrix<C64>) -> DMatrix<C64> {
    let n = q.nrows();
    let i = C64::i();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(2 * j, 2 * j)] = C64::new(1.0, 0.0);
        m[(2 * j + 1, 2 * j)] = -i;
        for col in 0..n {
            m[(2 * j, 2 * col + 1)] = q[(j, col)] + s[(j, col)];
            m[(2 * j + 1, 2 * col + 1)] = i * (q[(j, col)] - s[(j, col)]);
        }
    }
    m
}

/// Samples of `-conj(G~_2)^-1 G~_2` on `grid`, checking
/// `det G~_2 = (2i)^n det Q` at every sample.
pub fn reduced_symbol(op: &LinearizedOperator, grid: BoundaryGrid) -> Result<Vec<DMatrix<C64>>> {
    let rep = check_admissible(&op.model, &op.pair)?;
    if !rep.admissible {
        let theta = rep.argmin_theta;
        let index = ((theta / (2.0 * std::f64::consts::PI)) * grid.len() as f64).round() as usize
            % grid.len();
        let z = grid.point(index);
        return Err(Error::SingularSymbol {
            index,
            re: z.re,
            im: z.im,
            cond: f64::INFINITY,
        });
    }
    let (q, s) = build_qs(&op.model, &op.pair)?;
    let n = op.model.n() as i32;
    let two_i_n = (C64::i() * 2.0).powi(n);
    (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let z = grid.point(k);
            let (qz, sz) = (q.eval(z), s.eval(z));
            let g2 = reduced_block(&qz, &sz);
            let det_g2 = g2.determinant();
            let det_q = qz.determinant() * two_i_n;
            if (det_g2 - det_q).norm() > 1e-10 * det_q.norm().max(1e-300) {
                return Err(Error::Consistency(format!(
                    "det G~2 = {det_g2} but (2i)^n det Q = {det_q} at sample {k}"
                )));
            }
            let sv = g2.clone().singular_values();
            let cond = sv.max() / sv.min();
            if !cond.is_finite() || cond > SYMBOL_MAX_COND {
                return Err(Error::SingularSymbol {
                    index: k,
                    re: z.re,
                    im: z.im,
                    cond,
                });
            }
            let inv = g2.map(|c| c.conj()).try_inverse().ok_or(Error::SingularSymbol {
                index: k,
                re: z.re,
                im: z.im,
                cond,
            })?;
            Ok(-(inv * g2))
        })
        .collect()
}

/// Which side of zero the finite-section nullity counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// nullity at shift `s` is `sum_j max(-kappa_j - s, 0)`
    Negative,
    /// nullity at shift `s` is `sum_j max(kappa_j - s, 0)`
    Positive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialIndices {
    /// Ascending.
    pub indices: Vec<i32>,
    pub sum: i32,
    /// `ind(-conj(Q^-1) Q)` for comparison.
    pub expected_sum: Option<i32>,
    pub sum_matches: bool,
    /// `min kappa >= D1 - 1`.
    pub lower_bound: Option<i32>,
    pub bound_holds: bool,
    pub orientation: Orientation,
    pub bandwidth: usize,
    pub section_length: usize,
    /// `(shift, nullity)` pairs of the profile.
    pub profile: Vec<(i32, usize)>,
}

/// Fourier coefficients `C_k` (`|k| <= B`) of the transposed symbol.
fn symbol_coefficients(samples: &[DMatrix<C64>]) -> (Vec<DMatrix<C64>>, usize) {
    let len = samples.len();
    let q = samples[0].nrows();
    let mut per_entry = vec![vec![C64::new(0.0, 0.0); len]; q * q];
    for i in 0..q {
        for j in 0..q {
            // transpose: entry (i, j) of A^T is A[(j, i)]
            let vals: Vec<C64> = samples.iter().map(|m| m[(j, i)]).collect();
            per_entry[i * q + j] = fourier_coefficients(&vals);
        }
    }
    let max = per_entry
        .iter()
        .flat_map(|v| v.iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let mut band = 0usize;
    for k in 1..len / 2 {
        let big = per_entry
            .iter()
            .any(|v| v[k].norm() > 1e-15 * max || v[len - k].norm() > 1e-15 * max);
        if big {
            band = k;
        }
    }
    let band = band.min(len / 4);
    let coefs = (-(band as i64)..=band as i64)
        .map(|k| {
            let idx = k.rem_euclid(len as i64) as usize;
            DMatrix::from_fn(q, q, |i, j| per_entry[i * q + j][idx])
        })
        .collect();
    (coefs, band)
}

/// Nullity of the rectangular finite section of `T(zeta^s X)` with domain
/// degree `< len`.
fn section_nullity(coefs: &[DMatrix<C64>], band: usize, s: i32, len: usize) -> (usize, f64) {
    let q = coefs[0].nrows();
    let rows_blocks = (len as i64 + band as i64 + s as i64).max(len as i64) as usize;
    let mut t = DMatrix::zeros(q * rows_blocks, q * len);
    for j in 0..len {
        for p in 0..rows_blocks {
            let k = p as i64 - j as i64 - s as i64;
            if k.unsigned_abs() as usize > band {
                continue;
            }
            let c = &coefs[(k + band as i64) as usize];
            t.view_mut((p * q, j * q), (q, q)).copy_from(c);
        }
    }
    let spec = spectrum_of(&t, NULLITY_REL_TOL);
    (spec.nullity(), spec.gap)
}

struct Profile {
    values: Vec<i32>,
    profile: Vec<(i32, usize)>,
    band: usize,
    len: usize,
}

fn shift_profile(samples: &[DMatrix<C64>], window: i32) -> Result<Profile> {
    let q = samples[0].nrows();
    let (coefs, band) = symbol_coefficients(samples);
    let run = |len: usize| -> Vec<(i32, usize)> {
        (-(window + 1)..=window + 1)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|s| (s, section_nullity(&coefs, band, s, len).0))
            .collect()
    };
    let len = 2 * window as usize + 40;
    let profile = run(len);
    let check = run(len + 8);
    if profile != check {
        return Err(Error::Inconclusive(format!(
            "shift profile changes with the section length: {profile:?} vs {check:?}"
        )));
    }
    let f: Vec<i64> = profile.iter().map(|&(_, k)| k as i64).collect();
    let mut values = Vec::new();
    for idx in 1..f.len() - 1 {
        let mult = f[idx - 1] - 2 * f[idx] + f[idx + 1];
        if mult < 0 {
            return Err(Error::Inconclusive(format!(
                "negative multiplicity in shift profile {profile:?}"
            )));
        }
        for _ in 0..mult {
            values.push(profile[idx].0);
        }
    }
    if values.len() != q || *f.last().unwrap() != 0 && *f.first().unwrap() != 0 {
        return Err(Error::Inconclusive(format!(
            "shift profile {profile:?} resolves {} of {q} indices",
            values.len()
        )));
    }
    Ok(Profile {
        values,
        profile,
        band,
        len,
    })
}

fn sample_symbol(f: impl Fn(C64) -> DMatrix<C64> + Sync, n: usize) -> Vec<DMatrix<C64>> {
    let grid = BoundaryGrid::new(n);
    (0..n).into_par_iter().map(|k| f(grid.point(k))).collect()
}

/// Orientation fixed once against `diag(zeta^2, zeta^-1)`.
pub fn calibration() -> Result<Orientation> {
    static CAL: OnceLock<std::result::Result<Orientation, String>> = OnceLock::new();
    CAL.get_or_init(|| {
        let samples = sample_symbol(
            |z| {
                let mut m = DMatrix::zeros(2, 2);
                m[(0, 0)] = z * z;
                m[(1, 1)] = z.inv();
                m
            },
            256,
        );
        let prof = shift_profile(&samples, 4).map_err(|e| e.to_string())?;
        let mut neg: Vec<i32> = prof.values.iter().map(|s| -s).collect();
        let mut pos = prof.values.clone();
        neg.sort();
        pos.sort();
        if neg == [-1, 2] {
            Ok(Orientation::Negative)
        } else if pos == [-1, 2] {
            Ok(Orientation::Positive)
        } else {
            Err(format!("calibration recovered {neg:?}"))
        }
    })
    .clone()
    .map_err(Error::Inconclusive)
}

/// Partial indices of a symbol sampled on a uniform grid, in the
/// convention `A = B+ diag(zeta^kappa) B-`.
fn partial_indices_of_samples(samples: &[DMatrix<C64>], window: i32) -> Result<(Vec<i32>, Orientation, Profile)> {
    let orientation = calibration()?;
    let prof = shift_profile(samples, window)?;
    let mut idx: Vec<i32> = match orientation {
        Orientation::Negative => prof.values.iter().map(|s| -s).collect(),
        Orientation::Positive => prof.values.clone(),
    };
    idx.sort();
    Ok((idx, orientation, prof))
}

/// Partial indices of `-conj(G~_2)^-1 G~_2` via finite-section shift profiles.
pub fn partial_indices(op: &LinearizedOperator) -> Result<PartialIndices> {
    let samples = reduced_symbol(op, BoundaryGrid::new(SYMBOL_GRID))?;
    let ind = index_report(&op.model, &op.pair)?.ind;
    let k0 = op.model.k0() as i32;
    let window = ind.abs().max(2 * (k0 + op.model.dd() as i32)) + 2;
    let (indices, orientation, prof) = partial_indices_of_samples(&samples, window)?;
    let sum = indices.iter().sum();
    let lower = op.model.d1() as i32 - 1;
    Ok(PartialIndices {
        sum,
        expected_sum: Some(ind),
        sum_matches: sum == ind,
        lower_bound: Some(lower),
        bound_holds: indices.iter().all(|&k| k >= lower),
        orientation,
        bandwidth: prof.band,
        section_length: prof.len,
        profile: prof.profile,
        indices,
    })
}

/// Partial indices of an arbitrary sampled symbol (no model context).
pub fn partial_indices_of(f: impl Fn(C64) -> DMatrix<C64> + Sync, window: i32) -> Result<PartialIndices> {
    let samples = sample_symbol(f, SYMBOL_GRID);
    let (indices, orientation, prof) = partial_indices_of_samples(&samples, window)?;
    Ok(PartialIndices {
        sum: indices.iter().sum(),
        expected_sum: None,
        sum_matches: true,
        lower_bound: None,
        bound_holds: true,
        orientation,
        bandwidth: prof.band,
        section_length: prof.len,
        profile: prof.profile,
        indices,
    })
}
