//! Finite Laurent series and matrix-valued functions on the unit circle.
//!
//! Everything here works with finite bandwidth: a [`LaurentPoly`] is a sparse
//! map from integer exponents to complex coefficients, evaluated on
//! `|zeta| = 1` where `conj(zeta) = 1/zeta`. Winding numbers are integers
//! obtained from polynomial root counts and are cross-checked against a
//! discrete argument-principle sum.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C64 = Complex64;

/// A root counts as lying on the circle when it is this close to it.
pub const ROOT_DISTANCE_TOL: f64 = 1e-8;
/// Sampled modulus floor relative to the maximum modulus.
pub const MIN_MODULUS_REL_TOL: f64 = 1e-10;
/// Default boundary grid size.
pub const DEFAULT_GRID: usize = 4096;

// Roots closer than this are merged before measuring their distance to the
// circle; the centroid of a cluster is far better conditioned than its members.
const ROOT_CLUSTER_RADIUS: f64 = 1e-5;

/// Finite Laurent series `sum_k c_k zeta^k`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "LaurentRepr", into = "LaurentRepr")]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, C64>,
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    terms: Vec<(i32, f64, f64)>,
}

impl From<LaurentRepr> for LaurentPoly {
    fn from(r: LaurentRepr) -> Self {
        LaurentPoly::from_terms(r.terms.into_iter().map(|(k, re, im)| (k, C64::new(re, im))))
    }
}

impl From<LaurentPoly> for LaurentRepr {
    fn from(p: LaurentPoly) -> Self {
        LaurentRepr {
            terms: p.coeffs.iter().map(|(&k, c)| (k, c.re, c.im)).collect(),
        }
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(exp: i32, c: C64) -> Self {
        Self::from_terms([(exp, c)])
    }

    /// Builds a series, summing repeated exponents and dropping exact zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, C64)>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in terms {
            *coeffs.entry(k).or_insert(C64::new(0.0, 0.0)) += c;
        }
        coeffs.retain(|_, c| *c != C64::new(0.0, 0.0));
        LaurentPoly { coeffs }
    }

    /// Holomorphic polynomial from ascending coefficients `a_0, a_1, ...`.
    pub fn from_poly(coeffs: &[C64]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(k, &c)| (k as i32, c)))
    }

    /// `(1 - zeta)^m`.
    pub fn one_minus_zeta_pow(m: u32) -> Self {
        Self::from_terms((0..=m).map(|p| {
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            (p as i32, C64::new(sign * binomial(m, p), 0.0))
        }))
    }

    /// `(1 - conj(zeta))^m = (1 - zeta^{-1})^m` on the circle.
    pub fn one_minus_zeta_bar_pow(m: u32) -> Self {
        Self::one_minus_zeta_pow(m).conj_on_circle()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn lo(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn hi(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Largest `|k|` over stored exponents.
    pub fn bandwidth(&self) -> u32 {
        self.coeffs.keys().map(|k| k.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn coeff(&self, k: i32) -> C64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        if self.coeffs.is_empty() {
            return C64::new(0.0, 0.0);
        }
        // Horner on the polynomial part, then rescale by zeta^lo.
        let lo = self.lo().unwrap();
        let hi = self.hi().unwrap();
        let mut acc = C64::new(0.0, 0.0);
        for k in (lo..=hi).rev() {
            acc = acc * zeta + self.coeff(k);
        }
        acc * zeta.powi(lo)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * s)))
    }

    /// Multiplication by `zeta^k`.
    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    /// The function `zeta -> conj(f(zeta))` on the circle: exponent `m -> -m`
    /// with conjugated coefficients.
    pub fn conj_on_circle(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(&e, &c)| (-e, c.conj())).collect(),
        }
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        LaurentPoly {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(&k, &c)| (k, c))
                .collect(),
        }
    }

    pub fn is_holomorphic(&self) -> bool {
        self.lo().is_none_or(|lo| lo >= 0)
    }

    /// Divides a holomorphic polynomial by `(1 - zeta)^m`.
    ///
    /// Returns the quotient and the largest remainder coefficient modulus; the
    /// caller decides whether the remainder is acceptable.
    pub fn div_one_minus_zeta_pow(&self, m: u32) -> Result<(LaurentPoly, f64)> {
        if !self.is_holomorphic() {
            return Err(Error::InvalidInput(
                "division by (1 - zeta)^m needs a holomorphic polynomial".into(),
            ));
        }
        let mut coeffs: Vec<C64> = match self.hi() {
            Some(hi) => (0..=hi).map(|k| self.coeff(k)).collect(),
            None => return Ok((LaurentPoly::zero(), 0.0)),
        };
        let mut remainder = 0.0f64;
        for _ in 0..m {
            // p(zeta) = (1 - zeta) q(zeta) + r  <=>  p = -(zeta - 1) q + r
            if coeffs.is_empty() {
                break;
            }
            let deg = coeffs.len() - 1;
            let mut q = vec![C64::new(0.0, 0.0); deg.max(1)];
            // synthetic division by (zeta - 1)
            let mut carry = C64::new(0.0, 0.0);
            for k in (0..=deg).rev() {
                let v = coeffs[k] + carry;
                if k == 0 {
                    remainder = remainder.max(v.norm());
                } else {
                    q[k - 1] = v;
                    carry = v;
                }
            }
            coeffs = q.into_iter().map(|c| -c).collect();
        }
        Ok((LaurentPoly::from_poly(&coeffs), remainder))
    }

    /// Samples on an `n`-point grid `zeta_j = exp(2 pi i j / n)`.
    pub fn sample(&self, grid: &BoundaryGrid) -> Vec<C64> {
        grid.points().map(|z| self.eval(z)).collect()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::from_terms(self.terms().chain(rhs.terms().map(|(k, c)| (k, -c))))
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out: BTreeMap<i32, C64> = BTreeMap::new();
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                *out.entry(a + b).or_default() += ca * cb;
            }
        }
        LaurentPoly::from_terms(out)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Dense matrix of Laurent series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl LaurentMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            entries: vec![LaurentPoly::zero(); rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: LaurentPoly) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn eval(&self, zeta: C64) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(zeta))
    }

    pub fn bandwidth(&self) -> u32 {
        self.entries.iter().map(|e| e.bandwidth()).max().unwrap_or(0)
    }

    /// Exact determinant by cofactor expansion (square matrices of modest size).
    pub fn det(&self) -> LaurentPoly {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let idx: Vec<usize> = (0..self.cols).collect();
        self.det_minor(0, &idx)
    }

    fn det_minor(&self, row: usize, cols: &[usize]) -> LaurentPoly {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = LaurentPoly::zero();
        for (pos, &c) in cols.iter().enumerate() {
            let entry = self.get(row, c);
            if entry.is_zero() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = self.det_minor(row + 1, &rest);
            let term = entry * &minor;
            acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        acc
    }
}

/// Uniform grid `zeta_j = exp(2 pi i j / n)` on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    n: usize,
}

impl BoundaryGrid {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "empty boundary grid");
        BoundaryGrid { n }
    }

    /// Smallest power-of-two grid (at least [`DEFAULT_GRID`]) resolving the
    /// given Laurent bandwidth without aliasing.
    pub fn for_bandwidth(bandwidth: u32) -> Self {
        let need = 2 * bandwidth as usize + 1;
        let mut n = DEFAULT_GRID;
        while n <= need {
            n *= 2;
        }
        BoundaryGrid { n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn point(&self, j: usize) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * j as f64 / self.n as f64)
    }

    pub fn points(&self) -> impl Iterator<Item = C64> + '_ {
        (0..self.n).map(|j| self.point(j))
    }
}

/// Result of [`circle_distance`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleDistance {
    pub min_modulus: f64,
    pub max_modulus: f64,
    /// Location of the sampled minimum, as an angle in radians.
    pub argmin_theta: f64,
    /// `min | |r| - 1 |` over roots `r` (root clusters merged); infinite when
    /// the function has no roots in the punctured plane or at the origin.
    pub nearest_root_distance: f64,
    pub nearest_root: Option<(f64, f64)>,
}

impl CircleDistance {
    /// Invertibility on the circle under the toolkit tolerances.
    pub fn is_invertible(&self) -> bool {
        self.nearest_root_distance > ROOT_DISTANCE_TOL
            && self.min_modulus > MIN_MODULUS_REL_TOL * self.max_modulus
    }
}

/// Roots of `sum_k a_k x^k` from the eigenvalues of the companion matrix.
///
/// Leading zero coefficients are ignored; each root gets two Newton polishing
/// steps which are kept only when they reduce the residual.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let mut deg = coeffs.len();
    while deg > 0 && coeffs[deg - 1] == C64::new(0.0, 0.0) {
        deg -= 1;
    }
    if deg <= 1 {
        return Vec::new();
    }
    let deg = deg - 1;
    let lead = coeffs[deg];
    let mut comp = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let eig = comp
        .clone()
        .schur()
        .eigenvalues()
        .expect("complex Schur form is triangular");
    let p = &coeffs[..=deg];
    eig.iter()
        .map(|&r0| {
            let mut r = r0;
            for _ in 0..2 {
                let (v, dv) = horner_with_derivative(p, r);
                if dv.norm() == 0.0 {
                    break;
                }
                let cand = r - v / dv;
                if horner_with_derivative(p, cand).0.norm() < v.norm() {
                    r = cand;
                } else {
                    break;
                }
            }
            r
        })
        .collect()
}

fn horner_with_derivative(p: &[C64], x: C64) -> (C64, C64) {
    let mut v = C64::new(0.0, 0.0);
    let mut dv = C64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * x + v;
        v = v * x + c;
    }
    (v, dv)
}

/// Nonzero roots of `zeta^{-lo} f` as a polynomial, plus the origin with
/// multiplicity `lo` when `lo > 0`.
pub fn laurent_roots(f: &LaurentPoly) -> Vec<C64> {
    let (lo, hi) = match (f.lo(), f.hi()) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => return Vec::new(),
    };
    let coeffs: Vec<C64> = (lo..=hi).map(|k| f.coeff(k)).collect();
    let mut roots = poly_roots(&coeffs);
    for _ in 0..lo.max(0) {
        roots.push(C64::new(0.0, 0.0));
    }
    roots
}

fn cluster_centroids(roots: &[C64]) -> Vec<C64> {
    let mut remaining: Vec<C64> = roots.to_vec();
    let mut out = Vec::new();
    while let Some(seed) = remaining.pop() {
        let mut members = vec![seed];
        let mut changed = true;
        while changed {
            changed = false;
            let mut i = 0;
            while i < remaining.len() {
                let r = remaining[i];
                if members
                    .iter()
                    .any(|m| (m - r).norm() <= ROOT_CLUSTER_RADIUS * m.norm().max(1.0))
                {
                    members.push(remaining.swap_remove(i));
                    changed = true;
                } else {
                    i += 1;
                }
            }
        }
        let n = members.len() as f64;
        out.push(members.iter().sum::<C64>() / n);
    }
    out
}

/// Minimum modulus on the circle and distance of the nearest root to it.
pub fn circle_distance(f: &LaurentPoly) -> Result<CircleDistance> {
    if f.is_zero() {
        return Err(Error::Degenerate);
    }
    let grid = BoundaryGrid::for_bandwidth(8 * f.bandwidth());
    let mut min_mod = f64::INFINITY;
    let mut max_mod = 0.0f64;
    let mut argmin = 0usize;
    for (j, z) in grid.points().enumerate() {
        let v = f.eval(z).norm();
        if v < min_mod {
            min_mod = v;
            argmin = j;
        }
        max_mod = max_mod.max(v);
    }
    // Local refinement around the sampled minimum.
    let mut theta = 2.0 * PI * argmin as f64 / grid.len() as f64;
    let mut half_width = 2.0 * PI / grid.len() as f64;
    for _ in 0..3 {
        let steps = 64;
        for s in 0..=steps {
            let t = theta - half_width + 2.0 * half_width * s as f64 / steps as f64;
            let v = f.eval(C64::from_polar(1.0, t)).norm();
            if v < min_mod {
                min_mod = v;
                theta = t;
            }
        }
        half_width /= 16.0;
    }
    let centroids = cluster_centroids(&laurent_roots(f));
    let nearest = centroids
        .iter()
        .map(|r| ((r.norm() - 1.0).abs(), *r))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    Ok(CircleDistance {
        min_modulus: min_mod,
        max_modulus: max_mod,
        argmin_theta: theta.rem_euclid(2.0 * PI),
        nearest_root_distance: nearest.map_or(f64::INFINITY, |(d, _)| d),
        nearest_root: nearest.map(|(_, r)| (r.re, r.im)),
    })
}

/// Winding number of `zeta -> f(zeta)` around the origin.
///
/// Counted as the number of roots of `zeta^{-lo} f` inside the unit disc plus
/// `lo`, then checked against the discrete argument principle.
pub fn winding_number(f: &LaurentPoly) -> Result<i32> {
    let dist = circle_distance(f)?;
    if !dist.is_invertible() {
        let roots = laurent_roots(f)
            .into_iter()
            .filter(|r| (r.norm() - 1.0).abs() < 1e-3)
            .map(|r| (r.re, r.im))
            .collect();
        return Err(Error::ZeroOnCircle {
            distance: dist.nearest_root_distance.min(dist.min_modulus),
            roots,
        });
    }
    let lo = f.lo().unwrap();
    let inside = laurent_roots(f)
        .iter()
        .filter(|r| r.norm() < 1.0)
        .count() as i32;
    // the origin roots were appended for lo > 0; they are inside the disc
    let w = inside + lo.min(0);
    let check = argument_principle(|z| f.eval(z), (f.bandwidth() as usize).max(1))?;
    if check != w {
        return Err(Error::Consistency(format!(
            "root-count winding {w} disagrees with argument principle {check}"
        )));
    }
    Ok(w)
}

/// Discrete argument-principle winding of a nonvanishing function on the
/// circle. The grid is doubled until every phase step is below `pi/2`.
pub fn argument_principle(f: impl Fn(C64) -> C64, bandwidth_hint: usize) -> Result<i32> {
    let mut n = DEFAULT_GRID.max((8 * bandwidth_hint).next_power_of_two());
    loop {
        let grid = BoundaryGrid::new(n);
        let vals: Vec<C64> = grid.points().map(&f).collect();
        if vals.iter().any(|v| v.norm() == 0.0 || !v.is_finite()) {
            return Err(Error::ZeroOnCircle { distance: 0.0, roots: vec![] });
        }
        let mut total = 0.0;
        let mut coarse = false;
        for j in 0..n {
            let step = (vals[(j + 1) % n] / vals[j]).arg();
            if step.abs() > PI / 2.0 {
                coarse = true;
                break;
            }
            total += step;
        }
        if !coarse {
            return Ok((total / (2.0 * PI)).round() as i32);
        }
        if n >= 1 << 22 {
            return Err(Error::Inconclusive(
                "argument principle did not resolve the phase".into(),
            ));
        }
        n *= 2;
    }
}

/// Analytic completion `g = b_0 + 2 sum_{m>=1} b_m zeta^m + i tau` of a real
/// trigonometric polynomial `u`, so that `Re g = u` on the circle.
///
/// With `tau = None` the constant is pinned by `g(1) = 0`, which requires
/// `u(1) = 0`.
pub fn conjugate_function(u: &LaurentPoly, tau: Option<f64>) -> Result<LaurentPoly> {
    let scale = 1.0 + u.max_abs_coeff();
    let asym = u
        .terms()
        .map(|(k, c)| (c - u.coeff(-k).conj()).norm())
        .fold(0.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(Error::NotReal(asym));
    }
    let mut terms: Vec<(i32, C64)> = vec![(0, C64::new(u.coeff(0).re, 0.0))];
    terms.extend(u.terms().filter(|(k, _)| *k > 0).map(|(k, c)| (k, 2.0 * c)));
    let g = LaurentPoly::from_terms(terms);
    let tau = match tau {
        Some(t) => t,
        None => {
            let at_one = g.eval(C64::new(1.0, 0.0));
            if at_one.re.abs() > 1e-12 * scale {
                return Err(Error::NormalizationImpossible(at_one.re));
            }
            -at_one.im
        }
    };
    Ok(&g + &LaurentPoly::constant(C64::new(0.0, tau)))
}

/// Discrete Fourier coefficients of boundary samples, indexed as returned by
/// the FFT and normalized by the grid size: entry `k` is frequency `k` for
/// `k < n/2` and `k - n` otherwise.
pub fn fourier_coefficients(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(n).process(&mut buf);
    let inv = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= inv);
    buf
}

/// Frequency of FFT bin `k` on an `n`-point grid; the Nyquist bin counts as
/// negative.
pub fn bin_frequency(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) && !(n % 2 == 0 && k == n / 2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// l2 norm of the strictly negative Fourier modes of boundary samples.
pub fn negative_energy(samples: &[C64]) -> f64 {
    let n = samples.len();
    fourier_coefficients(samples)
        .iter()
        .enumerate()
        .filter(|(k, _)| bin_frequency(*k, n) < 0)
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn winding_of_monomial() {
        assert_eq!(winding_number(&LaurentPoly::monomial(3, c(1.0))).unwrap(), 3);
        assert_eq!(winding_number(&LaurentPoly::monomial(-2, c(5.0))).unwrap(), -2);
    }

    #[test]
    fn winding_with_one_root_inside() {
        // zeta^3 (1 - 4 zeta + zeta^2): roots 2 +- sqrt 3, one inside
        let f = LaurentPoly::from_terms([(3, c(1.0)), (4, c(-4.0)), (5, c(1.0))]);
        assert_eq!(winding_number(&f).unwrap(), 4);
        let ap = argument_principle(|z| f.eval(z), 5).unwrap();
        assert_eq!(ap, 4);
    }

    #[test]
    fn winding_rejects_zero_on_circle() {
        let f = LaurentPoly::from_terms([(0, c(2.0)), (1, c(-1.0)), (-1, c(-1.0))]);
        match winding_number(&f) {
            Err(Error::ZeroOnCircle { roots, .. }) => assert!(!roots.is_empty()),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn circle_distance_examples() {
        let d = circle_distance(&LaurentPoly::monomial(1, c(1.0))).unwrap();
        assert!((d.min_modulus - 1.0).abs() < 1e-14);
        assert!((d.nearest_root_distance - 1.0).abs() < 1e-14);

        let t = 2.0 / 3.0;
        let f = LaurentPoly::from_terms([(0, c(3.0 * t)), (1, c(-4.0)), (2, c(3.0 * t))]);
        let d = circle_distance(&f).unwrap();
        assert!(d.nearest_root_distance <= 1e-8, "{d:?}");
        assert!(!d.is_invertible());

        let f = LaurentPoly::from_terms([(0, c(1.0)), (1, c(-4.0)), (2, c(1.0))]);
        let d = circle_distance(&f).unwrap();
        let expected = 1.0 - (2.0 - 3f64.sqrt());
        assert!((d.nearest_root_distance - expected).abs() < 1e-12);
    }

    #[test]
    fn circle_distance_of_zero_is_degenerate() {
        assert!(matches!(circle_distance(&LaurentPoly::zero()), Err(Error::Degenerate)));
    }

    #[test]
    fn conjugate_function_examples() {
        assert!(conjugate_function(&LaurentPoly::zero(), None).unwrap().is_zero());
        let u = LaurentPoly::from_terms([(0, c(2.0)), (1, c(-1.0)), (-1, c(-1.0))]);
        let g = conjugate_function(&u, None).unwrap();
        assert_eq!(g, LaurentPoly::from_terms([(0, c(2.0)), (1, c(-2.0))]));
        for j in 0..16 {
            let z = C64::from_polar(1.0, j as f64);
            assert!((g.eval(z).re - u.eval(z).re).abs() < 1e-12);
        }
        let cos = LaurentPoly::from_terms([(1, c(0.5)), (-1, c(0.5))]);
        assert!(matches!(
            conjugate_function(&cos, None),
            Err(Error::NormalizationImpossible(_))
        ));
        // explicit constant is allowed outside the normalized space
        let g = conjugate_function(&cos, Some(0.25)).unwrap();
        assert_eq!(g, LaurentPoly::from_terms([(1, c(1.0)), (0, C64::new(0.0, 0.25))]));
    }

    #[test]
    fn conjugate_function_rejects_complex_input() {
        let u = LaurentPoly::monomial(1, c(1.0));
        assert!(matches!(conjugate_function(&u, None), Err(Error::NotReal(_))));
    }

    #[test]
    fn negative_energy_examples() {
        let grid = BoundaryGrid::new(64);
        let f = LaurentPoly::monomial(2, c(1.0)).sample(&grid);
        assert!(negative_energy(&f) < 1e-14);
        let f = LaurentPoly::monomial(-1, c(1.0)).sample(&grid);
        assert!((negative_energy(&f) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn division_by_one_minus_zeta() {
        let q = LaurentPoly::from_poly(&[c(1.0), c(2.0), C64::new(0.5, -1.0)]);
        let p = &q * &LaurentPoly::one_minus_zeta_pow(3);
        let (back, rem) = p.div_one_minus_zeta_pow(3).unwrap();
        assert!(rem < 1e-14);
        assert!((&back - &q).max_abs_coeff() < 1e-13);
        let (_, rem) = LaurentPoly::constant(c(1.0)).div_one_minus_zeta_pow(1).unwrap();
        assert!((rem - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laurent_determinant() {
        let mut m = LaurentMatrix::zeros(2, 2);
        m.set(0, 0, LaurentPoly::monomial(1, c(1.0)));
        m.set(0, 1, LaurentPoly::constant(c(2.0)));
        m.set(1, 0, LaurentPoly::constant(c(3.0)));
        m.set(1, 1, LaurentPoly::monomial(-1, c(1.0)));
        assert_eq!(m.det(), LaurentPoly::constant(c(-5.0)));
    }
}
