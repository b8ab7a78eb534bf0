//! The symbols `Q(zeta)`, `S(zeta)`, the admissibility verdict, the index
//! invariants and a seeded search for admissible pairs.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circlefun::{
    argument_principle, circle_distance, winding_number, BoundaryGrid, LaurentMatrix,
    LaurentPoly,
};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::polyring::BiPoly;

type C64 = Complex64;

const DIVISION_TOL: f64 = 1e-12;

/// Real weights `c` and a nonzero direction `V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub c: Vec<f64>,
    #[serde(rename = "V", with = "complex_pairs")]
    pub v: Vec<C64>,
}

pub(crate) mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|c| [c.re, c.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

impl CandidatePair {
    pub fn new(c: Vec<f64>, v: Vec<C64>) -> Self {
        CandidatePair { c, v }
    }

    /// `c = (1, 0, ..., 0)` and `V = (1, ..., 1)`.
    pub fn standard(model: &Model) -> Self {
        let mut c = vec![0.0; model.d()];
        c[0] = 1.0;
        CandidatePair {
            c,
            v: vec![C64::new(1.0, 0.0); model.n()],
        }
    }

    pub fn check(&self, model: &Model) -> Result<()> {
        if self.c.len() != model.d() {
            return Err(Error::DimensionMismatch {
                expected: model.d(),
                got: self.c.len(),
            });
        }
        if self.v.len() != model.n() {
            return Err(Error::DimensionMismatch {
                expected: model.n(),
                got: self.v.len(),
            });
        }
        if self.v.iter().all(|x| x.norm() == 0.0) {
            return Err(Error::InvalidInput("V must be nonzero".into()));
        }
        Ok(())
    }
}

fn v_power(v: &[C64], i: &[u32], j: &[u32]) -> C64 {
    let mut w = C64::new(1.0, 0.0);
    for (k, &e) in i.iter().enumerate() {
        w *= v[k].powu(e);
    }
    for (k, &e) in j.iter().enumerate() {
        w *= v[k].conj().powu(e);
    }
    w
}

fn sign(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Closed form of `Q` (holomorphic) or `S` (antiholomorphic) entries.
fn closed_form(model: &Model, pair: &CandidatePair, derivs: &[BiPoly], holo: bool) -> LaurentPoly {
    let d1 = model.d1() as i64;
    let k0 = model.k0() as i64;
    let mut acc = LaurentPoly::zero();
    for (l, p) in model.components().iter().enumerate() {
        let Some(dl) = p.degree() else { continue };
        let c = pair.c[l];
        if c == 0.0 {
            continue;
        }
        let tail = if holo {
            LaurentPoly::one_minus_zeta_pow(dl - model.d1())
        } else {
            LaurentPoly::one_minus_zeta_bar_pow(dl - model.d1())
        };
        let mut inner = Vec::new();
        for (i, j, a) in derivs[l].terms() {
            let (ni, nj) = (i.degree() as i64, j.degree() as i64);
            let w = a * v_power(&pair.v, &i.0, &j.0) * c;
            if holo {
                inner.push(((k0 - nj + d1 - 2) as i32, w * sign(nj - d1)));
            } else {
                inner.push(((ni - k0) as i32, w * sign(ni)));
            }
        }
        acc = &acc + &(&LaurentPoly::from_terms(inner) * &tail);
    }
    acc
}

/// Route through the ray restriction and exact division by `(1 - conj zeta)^{D1-2}`.
fn by_division(
    model: &Model,
    pair: &CandidatePair,
    derivs: &[BiPoly],
    prefactor_exp: i32,
) -> Result<LaurentPoly> {
    let mut u = LaurentPoly::zero();
    for (l, d) in derivs.iter().enumerate() {
        if pair.c[l] == 0.0 || d.is_zero() {
            continue;
        }
        u = &u + &d.restrict_to_ray(&pair.v)?.scale(C64::new(pair.c[l], 0.0));
    }
    let u = u.shift(prefactor_exp);
    // (1 - conj zeta)^m = (-1)^m zeta^-m (1 - zeta)^m on the circle
    let m = model.d1() - 2;
    let num = u.shift(m as i32).scale(C64::new(sign(m as i64), 0.0));
    // zeta^a is coprime to (1 - zeta): normalize to a holomorphic numerator
    let lo = num.lo().unwrap_or(0).min(0);
    let (q, rem) = num.shift(-lo).div_one_minus_zeta_pow(m)?;
    let q = q.shift(lo);
    if rem > DIVISION_TOL * (1.0 + num.max_abs_coeff()) {
        return Err(Error::Consistency(format!(
            "division by (1 - conj zeta)^{m} leaves remainder {rem:.3e}"
        )));
    }
    Ok(q)
}

/// `Q` and `S` for a pair, in closed form, cross-checked against the direct
/// expansion.
pub fn build_qs(model: &Model, pair: &CandidatePair) -> Result<(LaurentMatrix, LaurentMatrix)> {
    pair.check(model)?;
    let n = model.n();
    let k0 = model.k0() as i32;
    let mut q = LaurentMatrix::zeros(n, n);
    let mut s = LaurentMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let pzz: Vec<BiPoly> = model
                .components()
                .iter()
                .map(|p| p.poly().diff_z(i).diff_zbar(j))
                .collect();
            let pbb: Vec<BiPoly> = model
                .components()
                .iter()
                .map(|p| p.poly().diff_zbar(i).diff_zbar(j))
                .collect();
            let qij = closed_form(model, pair, &pzz, true);
            let sij = closed_form(model, pair, &pbb, false);
            for (closed, direct, what) in [
                (&qij, by_division(model, pair, &pzz, k0)?, "Q"),
                (&sij, by_division(model, pair, &pbb, -k0)?, "S"),
            ] {
                let diff = (closed - &direct).max_abs_coeff();
                if diff > DIVISION_TOL * (1.0 + closed.max_abs_coeff()) {
                    return Err(Error::Consistency(format!(
                        "{what}[{i},{j}] closed form differs from the ray expansion by {diff:.3e}"
                    )));
                }
            }
            q.set(i, j, qij.chop(0.0));
            s.set(i, j, sij.chop(0.0));
        }
    }
    Ok((q, s))
}

/// Structural diagnostics of one `(i, j)` entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDiagnostic {
    pub i: usize,
    pub j: usize,
    pub q_lowest: Option<i32>,
    pub q_degree: Option<i32>,
    /// Divisible by `zeta^{D1-1}`.
    pub q_divisible: bool,
    /// Degree at most `2 k0 + 1`.
    pub q_degree_ok: bool,
    pub s_antiholomorphic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub pair: CandidatePair,
    #[serde(rename = "Q")]
    pub q: LaurentMatrix,
    #[serde(rename = "S")]
    pub s: LaurentMatrix,
    #[serde(rename = "detQ")]
    pub det_q: LaurentPoly,
    pub admissible: bool,
    pub identically_singular: bool,
    pub min_modulus: f64,
    pub max_modulus: f64,
    pub argmin_theta: f64,
    /// `None` when det Q has no roots off the origin.
    pub nearest_root_distance: Option<f64>,
    pub nearest_root: Option<(f64, f64)>,
    pub entries: Vec<EntryDiagnostic>,
}

impl AdmissibilityReport {
    /// Nearest-root distance with "no roots" mapped to infinity.
    pub fn score(&self) -> f64 {
        if !self.admissible {
            return 0.0;
        }
        self.nearest_root_distance.unwrap_or(f64::INFINITY)
    }
}

pub fn check_admissible(model: &Model, pair: &CandidatePair) -> Result<AdmissibilityReport> {
    let (q, s) = build_qs(model, pair)?;
    let n = model.n();
    let d1 = model.d1() as i32;
    let k0 = model.k0() as i32;
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let qe = q.get(i, j);
            let se = s.get(i, j);
            entries.push(EntryDiagnostic {
                i,
                j,
                q_lowest: qe.lo(),
                q_degree: qe.hi(),
                q_divisible: qe.lo().is_none_or(|lo| lo >= d1 - 1),
                q_degree_ok: qe.hi().is_none_or(|hi| hi <= 2 * k0 + 1),
                s_antiholomorphic: se.hi().is_none_or(|hi| hi <= 0),
            });
        }
    }
    let det_q = q.det();
    let (admissible, singular, dist) = match circle_distance(&det_q) {
        Ok(dist) => (dist.is_invertible(), false, Some(dist)),
        Err(Error::Degenerate) => (false, true, None),
        Err(e) => return Err(e),
    };
    Ok(AdmissibilityReport {
        pair: pair.clone(),
        q,
        s,
        det_q,
        admissible,
        identically_singular: singular,
        min_modulus: dist.as_ref().map_or(0.0, |d| d.min_modulus),
        max_modulus: dist.as_ref().map_or(0.0, |d| d.max_modulus),
        argmin_theta: dist.as_ref().map_or(0.0, |d| d.argmin_theta),
        nearest_root_distance: dist
            .as_ref()
            .map(|d| d.nearest_root_distance)
            .filter(|x| x.is_finite())
            .or(if singular { Some(0.0) } else { None }),
        nearest_root: dist.and_then(|d| d.nearest_root),
        entries,
    })
}

/// Index invariants of an admissible pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub winding_det_q: i32,
    /// `ind(-conj(Q^-1) Q) = 2 wind(det Q)`.
    pub ind: i32,
    /// The same integer under the name used in the kernel computation.
    pub ind_q: i32,
    /// Argument-principle value of `ind`, computed from samples.
    pub ind_argument_principle: i32,
    /// Maslov index `ind + 2 d k0`.
    pub maslov: i32,
    /// `ind + d (2 k0 + 1) - 2 n (D1 - 2)`.
    pub dimension: i32,
    pub pinned_dimension: i32,
}

pub fn index_report(model: &Model, pair: &CandidatePair) -> Result<IndexReport> {
    let rep = check_admissible(model, pair)?;
    if !rep.admissible {
        return Err(Error::NotAdmissible(format!(
            "det Q vanishes near the circle (nearest root distance {:?}, min modulus {:.3e})",
            rep.nearest_root_distance, rep.min_modulus
        )));
    }
    let wind = winding_number(&rep.det_q)?;
    let ind = 2 * wind;
    let det = rep.det_q.clone();
    let det_conj = det.conj_on_circle();
    let sgn = sign(model.n() as i64);
    let ap = argument_principle(
        |z| det.eval(z) / det_conj.eval(z) * sgn,
        2 * det.bandwidth() as usize + 1,
    )?;
    if ap != ind {
        return Err(Error::Consistency(format!(
            "2 wind(det Q) = {ind} but the argument principle gives {ap}"
        )));
    }
    let (n, d) = (model.n() as i32, model.d() as i32);
    let (k0, d1) = (model.k0() as i32, model.d1() as i32);
    let dimension = ind + d * (2 * k0 + 1) - 2 * n * (d1 - 2);
    Ok(IndexReport {
        winding_det_q: wind,
        ind,
        ind_q: ind,
        ind_argument_principle: ap,
        maslov: ind + 2 * d * k0,
        dimension,
        pinned_dimension: dimension - d,
    })
}

/// A scored candidate from [`search_pairs`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub pair: CandidatePair,
    /// Nearest-root distance of det Q to the circle (0 when not admissible).
    pub score: f64,
    pub admissible: bool,
    pub polished: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub seed: u64,
    pub budget: usize,
    pub ranking: Vec<ScoredPair>,
    pub any_admissible: bool,
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize, d: usize) -> CandidatePair {
    loop {
        let c: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let nc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nc > 1e-12 && nv > 1e-12 {
            return CandidatePair {
                c: c.iter().map(|x| x / nc).collect(),
                v: v.iter().map(|x| x / nv).collect(),
            };
        }
    }
}

/// Seeded random pairs: `c` uniform on the sphere of `R^d`, `V` uniform on
/// the sphere of `C^n`.
pub fn sample_pairs(model: &Model, count: usize, seed: u64) -> Vec<CandidatePair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_pair(&mut rng, model.n(), model.d()))
        .collect()
}

/// Score used for ranking; capped so that "no roots" compares finitely.
fn pair_score(model: &Model, pair: &CandidatePair) -> (f64, bool) {
    match check_admissible(model, pair) {
        Ok(r) => (r.score().min(1e6), r.admissible),
        Err(_) => (0.0, false),
    }
}

fn polish(model: &Model, start: &CandidatePair, score: f64) -> (CandidatePair, f64) {
    let (n, d) = (model.n(), model.d());
    let mut best = start.clone();
    let mut best_score = score;
    let mut step = 0.1;
    for _ in 0..6 {
        for coord in 0..d + 2 * n {
            for dir in [1.0, -1.0] {
                let mut cand = best.clone();
                if coord < d {
                    cand.c[coord] += dir * step;
                } else {
                    let k = (coord - d) / 2;
                    let delta = if (coord - d) % 2 == 0 {
                        C64::new(dir * step, 0.0)
                    } else {
                        C64::new(0.0, dir * step)
                    };
                    cand.v[k] += delta;
                }
                if cand.check(model).is_err() || cand.c.iter().all(|x| *x == 0.0) {
                    continue;
                }
                let (s, _) = pair_score(model, &cand);
                if s > best_score {
                    best = cand;
                    best_score = s;
                }
            }
        }
        step /= 2.0;
    }
    (best, best_score)
}

/// Ranks `budget` seeded pairs by nearest-root distance of det Q; the best
/// `polish_top` are refined by coordinate ascent.
pub fn search_pairs(model: &Model, budget: usize, seed: u64, polish_top: usize) -> SearchReport {
    let pairs = sample_pairs(model, budget, seed);
    let mut scored: Vec<ScoredPair> = pairs
        .into_par_iter()
        .map(|pair| {
            let (score, admissible) = pair_score(model, &pair);
            ScoredPair {
                pair,
                score,
                admissible,
                polished: false,
            }
        })
        .collect();
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    let top = polish_top.min(scored.len());
    let polished: Vec<ScoredPair> = scored[..top]
        .par_iter()
        .map(|sp| {
            let (pair, score) = polish(model, &sp.pair, sp.score);
            let admissible = pair_score(model, &pair).1;
            ScoredPair {
                pair,
                score,
                admissible,
                polished: true,
            }
        })
        .collect();
    scored.splice(..top, polished);
    scored.sort_by(|a, b| b.score.total_cmp(&a.score));
    SearchReport {
        seed,
        budget,
        any_admissible: scored.iter().any(|s| s.admissible),
        ranking: scored,
    }
}

/// CSV of `theta, |det Q(e^{i theta})|` with six significant digits.
pub fn det_q_plot_csv(det_q: &LaurentPoly, samples: usize) -> String {
    let grid = BoundaryGrid::new(samples);
    let mut out = String::from("theta,abs_detQ\n");
    for j in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / samples as f64;
        let v = det_q.eval(grid.point(j)).norm();
        let _ = writeln!(out, "{},{}", sig6(theta), sig6(v));
    }
    out
}

fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    if (-4..=6).contains(&mag) {
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}
