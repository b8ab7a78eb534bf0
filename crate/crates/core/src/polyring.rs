//! Sparse bigraded polynomials `P(z, conj z)` on `C^n`.
//!
//! [`BiPoly`] is the general container (used for Wirtinger derivatives);
//! [`HermitianPoly`] adds the homogeneity, Hermitian symmetry and weight
//! constraints a model component must satisfy.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circlefun::{binomial, LaurentPoly};
use crate::error::{Error, Result};
use crate::wirtinger::Scalar;

type C64 = Complex64;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn decrement(&self, i: usize) -> Option<(u32, MultiIndex)> {
        let e = self.0[i];
        if e == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some((e, MultiIndex(v)))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Which Wirtinger derivative to take (indices are 0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wirtinger {
    Z(usize),
    ZBar(usize),
    ZZBar(usize, usize),
    ZBarZBar(usize, usize),
}

/// Sparse polynomial `sum alpha_{IJ} z^I conj(z)^J`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    n: usize,
    terms: BTreeMap<(MultiIndex, MultiIndex), C64>,
}

impl BiPoly {
    pub fn zero(n: usize) -> Self {
        BiPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (MultiIndex, MultiIndex, C64)>,
    ) -> Result<Self> {
        let mut p = BiPoly::zero(n);
        for (i, j, c) in terms {
            if i.len() != n || j.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: i.len().max(j.len()),
                });
            }
            *p.terms.entry((i, j)).or_default() += c;
        }
        p.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &MultiIndex, C64)> {
        self.terms.iter().map(|((i, j), &c)| (i, j, c))
    }

    pub fn coeff(&self, i: &MultiIndex, j: &MultiIndex) -> C64 {
        self.terms
            .get(&(i.clone(), j.clone()))
            .copied()
            .unwrap_or_default()
    }

    /// Largest total degree `|I| + |J|` among the terms.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(i, j)| i.degree() + j.degree())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.len(),
            });
        }
        let zb: Vec<C64> = z.iter().map(|c| c.conj()).collect();
        Ok(self.eval_scalar(z, &zb))
    }

    /// Evaluation with the conjugate variables supplied separately, so that
    /// dual numbers can carry derivatives through.
    pub fn eval_scalar<T: Scalar>(&self, z: &[T], zb: &[T]) -> T {
        let mut acc = T::real(0.0);
        for ((i, j), &c) in &self.terms {
            let mut m = T::constant(c);
            for (k, &e) in i.0.iter().enumerate() {
                if e > 0 {
                    m = m * z[k].powi(e);
                }
            }
            for (k, &e) in j.0.iter().enumerate() {
                if e > 0 {
                    m = m * zb[k].powi(e);
                }
            }
            acc = acc + m;
        }
        acc
    }

    pub fn diff_z(&self, i: usize) -> BiPoly {
        let terms = self.terms().filter_map(|(a, b, c)| {
            a.decrement(i)
                .map(|(e, a2)| (a2, b.clone(), c * e as f64))
        });
        BiPoly::from_terms(self.n, terms).expect("same dimension")
    }

    pub fn diff_zbar(&self, i: usize) -> BiPoly {
        let terms = self.terms().filter_map(|(a, b, c)| {
            b.decrement(i)
                .map(|(e, b2)| (a.clone(), b2, c * e as f64))
        });
        BiPoly::from_terms(self.n, terms).expect("same dimension")
    }

    pub fn wirtinger(&self, kind: Wirtinger) -> Result<BiPoly> {
        let check = |i: usize| {
            if i >= self.n {
                Err(Error::InvalidInput(format!(
                    "variable index {i} out of range for n = {}",
                    self.n
                )))
            } else {
                Ok(())
            }
        };
        Ok(match kind {
            Wirtinger::Z(i) => {
                check(i)?;
                self.diff_z(i)
            }
            Wirtinger::ZBar(i) => {
                check(i)?;
                self.diff_zbar(i)
            }
            Wirtinger::ZZBar(i, j) => {
                check(i)?;
                check(j)?;
                self.diff_z(i).diff_zbar(j)
            }
            Wirtinger::ZBarZBar(i, j) => {
                check(i)?;
                check(j)?;
                self.diff_zbar(i).diff_zbar(j)
            }
        })
    }

    /// Exact Laurent expansion of `q((1 - zeta) V, (1 - conj zeta) conj V)` on
    /// the unit circle, using `conj(zeta) = 1/zeta`.
    pub fn restrict_to_ray(&self, v: &[C64]) -> Result<LaurentPoly> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        if v.iter().all(|c| c.norm() == 0.0) {
            return Err(Error::InvalidInput("ray direction V must be nonzero".into()));
        }
        // group by (|I|, |J|): each group expands to (1 - zeta)^a (1 - 1/zeta)^b
        let mut groups: BTreeMap<(u32, u32), C64> = BTreeMap::new();
        for (i, j, c) in self.terms() {
            let mut w = c;
            for (k, &e) in i.0.iter().enumerate() {
                w *= v[k].powu(e);
            }
            for (k, &e) in j.0.iter().enumerate() {
                w *= v[k].conj().powu(e);
            }
            *groups.entry((i.degree(), j.degree())).or_default() += w;
        }
        let mut out = Vec::new();
        for ((a, b), w) in groups {
            for p in 0..=a {
                let sp = if p % 2 == 0 { 1.0 } else { -1.0 } * binomial(a, p);
                for q in 0..=b {
                    let sq = if q % 2 == 0 { 1.0 } else { -1.0 } * binomial(b, q);
                    out.push((p as i32 - q as i32, w * (sp * sq)));
                }
            }
        }
        Ok(LaurentPoly::from_terms(out))
    }
}

/// How Hermitian symmetry is established when building a [`HermitianPoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// Each listed `(I, J, alpha)` also defines `alpha_{JI} = conj(alpha)`;
    /// a mirror that is listed explicitly must agree.
    Mirror,
    /// The term list must already be Hermitian symmetric.
    Validate,
}

/// Degree `D` and weight `k` of a nonzero component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grading {
    pub degree: u32,
    pub weight: u32,
}

/// A real homogeneous polynomial `P(z, conj z)` of degree `D` with Hermitian
/// coefficients, or the distinguished zero component.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianPoly {
    grading: Option<Grading>,
    poly: BiPoly,
}

impl HermitianPoly {
    pub fn zero(n: usize) -> Self {
        HermitianPoly {
            grading: None,
            poly: BiPoly::zero(n),
        }
    }

    /// Builds and validates a nonzero component of degree `degree`.
    ///
    /// The weight `k` is the smallest value in `[D/2, D-1]` admitting a
    /// witness term with `|J| = k`; `weight_override` pins it instead and must
    /// itself be valid.
    pub fn new(
        n: usize,
        degree: u32,
        terms: impl IntoIterator<Item = (MultiIndex, MultiIndex, C64)>,
        weight_override: Option<u32>,
        symmetry: Symmetry,
    ) -> Result<Self> {
        let (poly, mut problems) = symmetrize(n, terms, symmetry)?;
        let (weight, more) = grading_problems(&poly, degree, weight_override);
        problems.extend(more);
        if !problems.is_empty() {
            return Err(Error::InvalidModel(problems.join("; ")));
        }
        Ok(HermitianPoly {
            grading: Some(Grading {
                degree,
                weight: weight.expect("no problems implies a weight"),
            }),
            poly,
        })
    }

    pub fn n(&self) -> usize {
        self.poly.n
    }

    pub fn is_zero(&self) -> bool {
        self.grading.is_none()
    }

    pub fn grading(&self) -> Option<Grading> {
        self.grading
    }

    pub fn degree(&self) -> Option<u32> {
        self.grading.map(|g| g.degree)
    }

    pub fn weight(&self) -> Option<u32> {
        self.grading.map(|g| g.weight)
    }

    pub fn poly(&self) -> &BiPoly {
        &self.poly
    }

    pub fn eval(&self, z: &[C64]) -> Result<C64> {
        self.poly.eval(z)
    }

    pub fn wirtinger(&self, kind: Wirtinger) -> Result<BiPoly> {
        self.poly.wirtinger(kind)
    }

    pub fn restrict_to_ray(&self, v: &[C64]) -> Result<LaurentPoly> {
        self.poly.restrict_to_ray(v)
    }
}

/// Applies the symmetry rule; returns the polynomial and any violations.
pub(crate) fn symmetrize(
    n: usize,
    terms: impl IntoIterator<Item = (MultiIndex, MultiIndex, C64)>,
    symmetry: Symmetry,
) -> Result<(BiPoly, Vec<String>)> {
    let listed = BiPoly::from_terms(n, terms)?;
    let scale = 1.0 + listed.terms().map(|(_, _, c)| c.norm()).fold(0.0, f64::max);
    let tol = SYMMETRY_TOL * scale;
    let mut problems = Vec::new();
    let mut out = listed.terms.clone();
    for ((i, j), c) in &listed.terms {
        if i == j {
            if c.im.abs() > tol {
                problems.push(format!("diagonal coefficient at I = J = {i} is not real: {c}"));
            }
            continue;
        }
        match listed.terms.get(&(j.clone(), i.clone())) {
            Some(m) => {
                if (m - c.conj()).norm() > tol {
                    problems.push(format!(
                        "alpha[{i},{j}] = {c} is not the conjugate of alpha[{j},{i}] = {m}"
                    ));
                }
            }
            None => match symmetry {
                Symmetry::Mirror => {
                    out.insert((j.clone(), i.clone()), c.conj());
                }
                Symmetry::Validate => {
                    problems.push(format!("missing mirror term for (I, J) = ({i}, {j})"));
                }
            },
        }
    }
    Ok((BiPoly { n, terms: out }, problems))
}

/// Checks homogeneity and the weight window; returns the chosen weight.
pub(crate) fn grading_problems(
    poly: &BiPoly,
    degree: u32,
    weight_override: Option<u32>,
) -> (Option<u32>, Vec<String>) {
    let mut problems = Vec::new();
    if poly.is_zero() {
        problems.push("nonzero component has no terms (mark it zero instead)".into());
        return (None, problems);
    }
    if degree < 2 {
        problems.push(format!("degree D = {degree} must be at least 2"));
        return (None, problems);
    }
    for (i, j, _) in poly.terms() {
        if i.degree() + j.degree() != degree {
            problems.push(format!(
                "term (I, J) = ({i}, {j}) has |I| + |J| = {} != D = {degree}",
                i.degree() + j.degree()
            ));
        }
    }
    if !problems.is_empty() {
        return (None, problems);
    }
    let valid = |k: u32| {
        let in_range = poly
            .terms()
            .all(|(i, _, _)| degree - k <= i.degree() && i.degree() <= k);
        let witness = poly.terms().any(|(_, j, _)| j.degree() == k);
        in_range && witness
    };
    let window = degree.div_ceil(2)..=degree - 1;
    match weight_override {
        Some(k) => {
            if !window.contains(&k) {
                problems.push(format!("weight k = {k} outside [D/2, D-1] for D = {degree}"));
            } else if !valid(k) {
                problems.push(format!(
                    "weight k = {k} violates D - k <= |I| <= k or has no |J| = k witness"
                ));
            } else {
                return (Some(k), problems);
            }
            (None, problems)
        }
        None => match window.clone().find(|&k| valid(k)) {
            Some(k) => (Some(k), problems),
            None => {
                for (i, j, _) in poly.terms() {
                    if i.degree() == 0 || j.degree() == 0 {
                        problems.push(format!(
                            "pluriharmonic term (I, J) = ({i}, {j}) violates D - k <= |I| <= k for every k in [D/2, D-1]"
                        ));
                    }
                }
                if problems.is_empty() {
                    problems.push("no admissible weight k in [D/2, D-1]".into());
                }
                (None, problems)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex(v.to_vec())
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    pub(crate) fn quartic(t: f64) -> HermitianPoly {
        HermitianPoly::new(
            1,
            4,
            [
                (mi(&[2]), mi(&[2]), c(1.0)),
                (mi(&[3]), mi(&[1]), c(t)),
            ],
            None,
            Symmetry::Mirror,
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = HermitianPoly::new(1, 2, [(mi(&[1]), mi(&[1]), c(1.0))], None, Symmetry::Mirror)
            .unwrap();
        assert_eq!(p.eval(&[c(2.0)]).unwrap(), c(4.0));
        let q = quartic(1.0 / 3.0);
        assert!((q.eval(&[c(1.0)]).unwrap() - c(1.0 + 2.0 / 3.0)).norm() < 1e-15);
        assert_eq!(HermitianPoly::zero(3).eval(&[c(1.0); 3]).unwrap(), c(0.0));
        assert!(matches!(q.eval(&[c(1.0), c(2.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn weights_of_examples() {
        assert_eq!(quartic(0.3).weight(), Some(3));
        let sphere =
            HermitianPoly::new(1, 2, [(mi(&[1]), mi(&[1]), c(1.0))], None, Symmetry::Mirror)
                .unwrap();
        assert_eq!(sphere.weight(), Some(1));
        let err = HermitianPoly::new(1, 2, [(mi(&[2]), mi(&[0]), c(1.0))], None, Symmetry::Mirror)
            .unwrap_err();
        assert!(err.to_string().contains("pluriharmonic"), "{err}");
    }

    #[test]
    fn weight_override_must_be_valid() {
        let terms = [(mi(&[2]), mi(&[2]), c(1.0)), (mi(&[3]), mi(&[1]), c(0.2))];
        assert!(HermitianPoly::new(1, 4, terms.clone(), Some(2), Symmetry::Mirror).is_err());
        assert!(HermitianPoly::new(1, 4, terms, Some(3), Symmetry::Mirror).is_ok());
    }

    #[test]
    fn validate_mode_requires_mirrors() {
        let terms = [(mi(&[3]), mi(&[1]), c(0.2)), (mi(&[2]), mi(&[2]), c(1.0))];
        assert!(HermitianPoly::new(1, 4, terms.clone(), None, Symmetry::Validate).is_err());
        let full = [
            (mi(&[3]), mi(&[1]), C64::new(0.2, 0.1)),
            (mi(&[1]), mi(&[3]), C64::new(0.2, -0.1)),
            (mi(&[2]), mi(&[2]), c(1.0)),
        ];
        assert!(HermitianPoly::new(1, 4, full, None, Symmetry::Validate).is_ok());
        let bad = [
            (mi(&[3]), mi(&[1]), C64::new(0.2, 0.1)),
            (mi(&[1]), mi(&[3]), C64::new(0.2, 0.1)),
            (mi(&[2]), mi(&[2]), c(1.0)),
        ];
        assert!(HermitianPoly::new(1, 4, bad, None, Symmetry::Mirror).is_err());
    }

    #[test]
    fn wirtinger_examples() {
        let sphere =
            HermitianPoly::new(1, 2, [(mi(&[1]), mi(&[1]), c(1.0))], None, Symmetry::Mirror)
                .unwrap();
        let d = sphere.wirtinger(Wirtinger::ZZBar(0, 0)).unwrap();
        assert_eq!(d.coeff(&mi(&[0]), &mi(&[0])), c(1.0));
        let t = 0.25;
        let d = quartic(t).wirtinger(Wirtinger::ZZBar(0, 0)).unwrap();
        assert_eq!(d.coeff(&mi(&[1]), &mi(&[1])), c(4.0));
        assert_eq!(d.coeff(&mi(&[2]), &mi(&[0])), c(3.0 * t));
        assert_eq!(d.coeff(&mi(&[0]), &mi(&[2])), c(3.0 * t));
        let p = BiPoly::from_terms(1, [(mi(&[2]), mi(&[2]), c(1.0))]).unwrap();
        let d = p.wirtinger(Wirtinger::ZBarZBar(0, 0)).unwrap();
        assert_eq!(d.terms().count(), 1);
        assert_eq!(d.coeff(&mi(&[2]), &mi(&[0])), c(2.0));
        assert!(HermitianPoly::zero(2).wirtinger(Wirtinger::Z(1)).unwrap().is_zero());
        assert!(p.wirtinger(Wirtinger::Z(3)).is_err());
    }

    #[test]
    fn restrict_examples() {
        let one = BiPoly::from_terms(1, [(mi(&[0]), mi(&[0]), c(1.0))]).unwrap();
        assert_eq!(one.restrict_to_ray(&[c(3.0)]).unwrap(), LaurentPoly::constant(c(1.0)));
        let zz = BiPoly::from_terms(1, [(mi(&[1]), mi(&[1]), c(1.0))]).unwrap();
        assert_eq!(
            zz.restrict_to_ray(&[c(1.0)]).unwrap(),
            LaurentPoly::from_terms([(0, c(2.0)), (1, c(-1.0)), (-1, c(-1.0))])
        );
        let q = BiPoly::from_terms(
            1,
            [
                (mi(&[1]), mi(&[1]), c(4.0)),
                (mi(&[2]), mi(&[0]), c(1.0)),
                (mi(&[0]), mi(&[2]), c(1.0)),
            ],
        )
        .unwrap();
        let expected = LaurentPoly::from_terms([
            (0, c(10.0)),
            (1, c(-6.0)),
            (-1, c(-6.0)),
            (2, c(1.0)),
            (-2, c(1.0)),
        ]);
        let got = q.restrict_to_ray(&[c(1.0)]).unwrap();
        assert!((&got - &expected).max_abs_coeff() < 1e-14);
        // pointwise oracle at 16 roots of unity
        for j in 0..16 {
            let zeta = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 16.0);
            let direct = q.eval(&[c(1.0) - zeta]).unwrap();
            assert!((got.eval(zeta) - direct).norm() < 1e-12);
        }
        assert!(q.restrict_to_ray(&[c(0.0)]).is_err());
    }
}
