//! Models `Re w = P(z, conj z)`, allowable perturbations and the lifted
//! defining system of the fibration of conormal lines.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::{self, BiPoly, HermitianPoly, MultiIndex, Symmetry};
use crate::wirtinger::Scalar;

type C64 = Complex64;

pub const FORMAT_VERSION: u32 = 1;
/// Maximal total degree of a perturbation coefficient polynomial.
pub const MAX_COEFF_DEGREE: u32 = 6;
const ELIMINATION_MAX_COND: f64 = 1e12;

// ---------------------------------------------------------------- files

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    #[serde(rename = "I")]
    pub i: Vec<u32>,
    #[serde(rename = "J")]
    pub j: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpec {
    #[serde(default)]
    pub zero: bool,
    #[serde(rename = "D", default)]
    pub degree: u32,
    #[serde(rename = "k", default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<u32>,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

impl ComponentSpec {
    pub fn zero() -> Self {
        ComponentSpec {
            zero: true,
            degree: 0,
            weight: None,
            terms: Vec::new(),
        }
    }

    /// Nonzero component; each `(I, J, alpha)` is mirrored on load.
    pub fn new(degree: u32, terms: &[(Vec<u32>, Vec<u32>, C64)]) -> Self {
        ComponentSpec {
            zero: false,
            degree,
            weight: None,
            terms: terms
                .iter()
                .map(|(i, j, c)| TermSpec {
                    i: i.clone(),
                    j: j.clone(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

/// On-disk model description (`"format": 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: u32,
    pub n: usize,
    pub d: usize,
    pub components: Vec<ComponentSpec>,
}

impl ModelFile {
    pub fn new(n: usize, components: Vec<ComponentSpec>) -> Self {
        ModelFile {
            format: FORMAT_VERSION,
            n,
            d: components.len(),
            components,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

// ---------------------------------------------------------------- model

/// Outcome of [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub n: usize,
    pub d: usize,
    #[serde(rename = "D1")]
    pub d1: Option<u32>,
    #[serde(rename = "Dd")]
    pub dd: Option<u32>,
    pub k0: Option<u32>,
    /// Per component: degree and chosen weight (`None` for ZERO).
    pub degrees: Vec<Option<u32>>,
    pub weights: Vec<Option<u32>>,
    pub problems: Vec<String>,
}

/// Checks every component invariant and the model invariants.
pub fn validate(file: &ModelFile) -> ValidationReport {
    let mut problems = Vec::new();
    if file.format != FORMAT_VERSION {
        problems.push(format!("unsupported format {} (expected {FORMAT_VERSION})", file.format));
    }
    if file.n == 0 || file.d == 0 {
        problems.push("n and d must be positive".into());
    }
    if file.components.len() != file.d {
        problems.push(format!(
            "d = {} but {} components listed",
            file.d,
            file.components.len()
        ));
    }
    let mut degrees = Vec::new();
    let mut weights = Vec::new();
    for (l, comp) in file.components.iter().enumerate() {
        let tag = format!("component {}", l + 1);
        if comp.zero {
            if !comp.terms.is_empty() {
                problems.push(format!("{tag}: marked zero but has terms"));
            }
            degrees.push(None);
            weights.push(None);
            continue;
        }
        match build_component(file.n, comp) {
            Ok((poly, mut local)) => {
                let (weight, more) = polyring::grading_problems(&poly, comp.degree, comp.weight);
                local.extend(more);
                problems.extend(local.into_iter().map(|p| format!("{tag}: {p}")));
                degrees.push(Some(comp.degree));
                weights.push(weight);
            }
            Err(e) => {
                problems.push(format!("{tag}: {e}"));
                degrees.push(None);
                weights.push(None);
            }
        }
    }
    if !file.components.is_empty() && file.components.iter().all(|c| c.zero) {
        problems.push("all components are ZERO; at least one must be nonzero".into());
    }
    let d1 = degrees.iter().flatten().min().copied();
    let dd = degrees.iter().flatten().max().copied();
    let k0 = weights.iter().flatten().max().copied();
    ValidationReport {
        valid: problems.is_empty(),
        n: file.n,
        d: file.d,
        d1,
        dd,
        k0,
        degrees,
        weights,
        problems,
    }
}

fn build_component(n: usize, comp: &ComponentSpec) -> Result<(BiPoly, Vec<String>)> {
    let terms = comp
        .terms
        .iter()
        .map(|t| (MultiIndex(t.i.clone()), MultiIndex(t.j.clone()), C64::new(t.re, t.im)));
    polyring::symmetrize(n, terms, Symmetry::Mirror)
}

/// A validated model `M_H`.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    n: usize,
    components: Vec<HermitianPoly>,
    d1: u32,
    dd: u32,
    k0: u32,
}

impl Model {
    pub fn new(n: usize, components: Vec<HermitianPoly>) -> Result<Self> {
        if n == 0 || components.is_empty() {
            return Err(Error::InvalidModel("n and d must be positive".into()));
        }
        if let Some(c) = components.iter().find(|c| c.n() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.n(),
            });
        }
        let gradings: Vec<_> = components.iter().filter_map(|c| c.grading()).collect();
        if gradings.is_empty() {
            return Err(Error::InvalidModel(
                "all components are ZERO; at least one must be nonzero".into(),
            ));
        }
        Ok(Model {
            n,
            d1: gradings.iter().map(|g| g.degree).min().unwrap(),
            dd: gradings.iter().map(|g| g.degree).max().unwrap(),
            k0: gradings.iter().map(|g| g.weight).max().unwrap(),
            components,
        })
    }

    pub fn from_file(file: &ModelFile) -> Result<Self> {
        let report = validate(file);
        if !report.valid {
            return Err(Error::InvalidModel(report.problems.join("; ")));
        }
        let comps = file
            .components
            .iter()
            .map(|c| {
                if c.zero {
                    Ok(HermitianPoly::zero(file.n))
                } else {
                    let terms = c.terms.iter().map(|t| {
                        (MultiIndex(t.i.clone()), MultiIndex(t.j.clone()), C64::new(t.re, t.im))
                    });
                    HermitianPoly::new(file.n, c.degree, terms, c.weight, Symmetry::Mirror)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Model::new(file.n, comps)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Model::from_file(&ModelFile::load(path)?)
    }

    /// Full (mirrored) term list; loading it back reproduces the model.
    pub fn to_file(&self) -> ModelFile {
        let comps = self
            .components
            .iter()
            .map(|c| match c.grading() {
                None => ComponentSpec::zero(),
                Some(g) => ComponentSpec {
                    zero: false,
                    degree: g.degree,
                    weight: Some(g.weight),
                    terms: c
                        .poly()
                        .terms()
                        .map(|(i, j, a)| TermSpec {
                            i: i.0.clone(),
                            j: j.0.clone(),
                            re: a.re,
                            im: a.im,
                        })
                        .collect(),
                },
            })
            .collect();
        ModelFile::new(self.n, comps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HermitianPoly] {
        &self.components
    }

    /// Minimal degree over nonzero components.
    pub fn d1(&self) -> u32 {
        self.d1
    }

    /// Maximal degree over nonzero components.
    pub fn dd(&self) -> u32 {
        self.dd
    }

    pub fn k0(&self) -> u32 {
        self.k0
    }

    pub fn report(&self) -> ValidationReport {
        ValidationReport {
            valid: true,
            n: self.n,
            d: self.d(),
            d1: Some(self.d1),
            dd: Some(self.dd),
            k0: Some(self.k0),
            degrees: self.components.iter().map(|c| c.degree()).collect(),
            weights: self.components.iter().map(|c| c.weight()).collect(),
            problems: Vec::new(),
        }
    }
}

// ---------------------------------------------------------------- perturbations

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffMonomial {
    /// Powers of `z`.
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    /// Powers of `conj z`.
    #[serde(rename = "B")]
    pub b: Vec<u32>,
    /// Powers of `Im w`.
    #[serde(rename = "T", default)]
    pub t: Vec<u32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// One summand `z^I conj(z)^J (Im w)^S r(z, Im w)` of a perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationTerm {
    #[serde(rename = "I")]
    pub i: Vec<u32>,
    #[serde(rename = "J")]
    pub j: Vec<u32>,
    #[serde(rename = "S", default)]
    pub s: Vec<u32>,
    pub coeff: Vec<CoeffMonomial>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerturbationComponent {
    #[serde(default)]
    pub terms: Vec<PerturbationTerm>,
}

/// An allowable perturbation `theta`, scaled by `epsilon` (`"format": 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub format: u32,
    pub epsilon: f64,
    pub components: Vec<PerturbationComponent>,
}

impl Perturbation {
    pub fn new(epsilon: f64, components: Vec<PerturbationComponent>) -> Self {
        Perturbation {
            format: FORMAT_VERSION,
            epsilon,
            components,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Perturbation {
            epsilon,
            ..self.clone()
        }
    }

    /// Max modulus of the expanded monomial coefficients (diagnostic norm).
    pub fn x_norm(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| &c.terms)
            .flat_map(|t| &t.coeff)
            .map(|m| C64::new(m.re, m.im).norm())
            .fold(0.0, f64::max)
            * self.epsilon.abs()
    }
}

fn check_len(v: &[u32], len: usize, what: &str, out: &mut Vec<String>) -> bool {
    if v.len() != len {
        out.push(format!("{what} has length {} (expected {len})", v.len()));
        false
    } else {
        true
    }
}

/// Shape check of a single term against the two sums of the allowable form.
fn term_problems(t: &PerturbationTerm, n: usize, d: usize, degree: u32) -> Vec<String> {
    let mut out = Vec::new();
    let s_vec = if t.s.is_empty() { vec![0; d] } else { t.s.clone() };
    let ok = check_len(&t.i, n, "I", &mut out)
        & check_len(&t.j, n, "J", &mut out)
        & check_len(&s_vec, d, "S", &mut out);
    for m in &t.coeff {
        let t_vec = if m.t.is_empty() { vec![0; d] } else { m.t.clone() };
        let ok_m = check_len(&m.a, n, "A", &mut out)
            & check_len(&m.b, n, "B", &mut out)
            & check_len(&t_vec, d, "T", &mut out);
        if ok_m {
            let deg: u32 = m.a.iter().chain(&m.b).chain(&t_vec).sum();
            if deg > MAX_COEFF_DEGREE {
                out.push(format!(
                    "coefficient monomial of degree {deg} exceeds {MAX_COEFF_DEGREE}"
                ));
            }
        }
    }
    if !ok {
        return out;
    }
    let ij: u32 = t.i.iter().chain(&t.j).sum();
    let s: u32 = s_vec.iter().sum();
    if s == 0 {
        if ij != degree + 1 {
            out.push(format!(
                "term I={:?} J={:?} without Im w factor needs |I|+|J| = D+1 = {} (got {ij})",
                t.i,
                t.j,
                degree + 1
            ));
        }
        if t.coeff.iter().any(|m| m.t.iter().any(|&e| e > 0)) {
            out.push(format!(
                "term I={:?} J={:?} without Im w factor must have a coefficient depending on z only",
                t.i, t.j
            ));
        }
    } else if s > degree {
        out.push(format!("|S| = {s} exceeds D = {degree}"));
    } else if ij + s != degree {
        out.push(format!(
            "term I={:?} J={:?} S={:?} needs |I|+|J| = D-|S| = {} (got {ij})",
            t.i,
            t.j,
            s_vec,
            degree - s
        ));
    }
    out
}

/// Expanded real polynomial in `(z, conj z, Im w)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ThetaPoly {
    terms: BTreeMap<(Vec<u32>, Vec<u32>, Vec<u32>), C64>,
}

impl ThetaPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Vec<u32>, &Vec<u32>, C64)> {
        self.terms.iter().map(|((a, b, t), &c)| (a, b, t, c))
    }

    fn push(&mut self, key: (Vec<u32>, Vec<u32>, Vec<u32>), c: C64) {
        *self.terms.entry(key).or_default() += c;
    }

    fn prune(mut self) -> Self {
        self.terms.retain(|_, c| *c != C64::new(0.0, 0.0));
        self
    }

    fn derivative(&self, slot: usize, i: usize) -> ThetaPoly {
        let mut out = ThetaPoly::default();
        for ((a, b, t), &c) in &self.terms {
            let mut key = (a.clone(), b.clone(), t.clone());
            let v = match slot {
                0 => &mut key.0,
                1 => &mut key.1,
                _ => &mut key.2,
            };
            let e = v[i];
            if e == 0 {
                continue;
            }
            v[i] -= 1;
            out.push(key, c * e as f64);
        }
        out.prune()
    }

    pub fn diff_z(&self, i: usize) -> ThetaPoly {
        self.derivative(0, i)
    }

    pub fn diff_zbar(&self, i: usize) -> ThetaPoly {
        self.derivative(1, i)
    }

    pub fn diff_y(&self, i: usize) -> ThetaPoly {
        self.derivative(2, i)
    }

    pub fn depends_on_y(&self) -> bool {
        self.terms.keys().any(|(_, _, t)| t.iter().any(|&e| e > 0))
    }

    pub fn eval_scalar<T: Scalar>(&self, z: &[T], zb: &[T], y: &[T]) -> T {
        let mut acc = T::real(0.0);
        for ((a, b, t), &c) in &self.terms {
            let mut m = T::constant(c);
            for (k, &e) in a.iter().enumerate() {
                if e > 0 {
                    m = m * z[k].powi(e);
                }
            }
            for (k, &e) in b.iter().enumerate() {
                if e > 0 {
                    m = m * zb[k].powi(e);
                }
            }
            for (k, &e) in t.iter().enumerate() {
                if e > 0 {
                    m = m * y[k].powi(e);
                }
            }
            acc = acc + m;
        }
        acc
    }
}

/// Validates `theta` against the model and expands it into real polynomials,
/// one per component, scaled by epsilon.
pub fn expand_perturbation(model: &Model, theta: &Perturbation) -> Result<Vec<ThetaPoly>> {
    let (n, d) = (model.n(), model.d());
    let mut problems = Vec::new();
    if theta.format != FORMAT_VERSION {
        problems.push(format!("unsupported format {}", theta.format));
    }
    if !theta.epsilon.is_finite() {
        problems.push("epsilon must be finite".into());
    }
    if theta.components.len() != d {
        problems.push(format!(
            "{} perturbation components for d = {d}",
            theta.components.len()
        ));
    }
    if !problems.is_empty() {
        return Err(Error::InvalidPerturbation(problems.join("; ")));
    }
    let mut out = Vec::with_capacity(d);
    for (l, (comp, p)) in theta.components.iter().zip(model.components()).enumerate() {
        let tag = format!("component {}", l + 1);
        let degree = match p.degree() {
            Some(dg) => dg,
            None if comp.terms.is_empty() => {
                out.push(ThetaPoly::default());
                continue;
            }
            None => {
                problems.push(format!("{tag}: perturbing a ZERO component is not supported"));
                out.push(ThetaPoly::default());
                continue;
            }
        };
        let mut listed = ThetaPoly::default();
        for t in &comp.terms {
            let local = term_problems(t, n, d, degree);
            if !local.is_empty() {
                problems.extend(local.into_iter().map(|p| format!("{tag}: {p}")));
                continue;
            }
            let s = if t.s.is_empty() { vec![0; d] } else { t.s.clone() };
            for m in &t.coeff {
                let tt = if m.t.is_empty() { vec![0; d] } else { m.t.clone() };
                let key = (
                    t.i.iter().zip(&m.a).map(|(x, y)| x + y).collect(),
                    t.j.iter().zip(&m.b).map(|(x, y)| x + y).collect(),
                    s.iter().zip(&tt).map(|(x, y)| x + y).collect(),
                );
                listed.push(key, C64::new(m.re, m.im) * theta.epsilon);
            }
        }
        let listed = listed.prune();
        let scale = 1.0 + listed.terms().map(|t| t.3.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale;
        let mut full = listed.clone();
        for ((a, b, t), &c) in &listed.terms {
            if a == b {
                if c.im.abs() > tol {
                    problems.push(format!("{tag}: coefficient of the self-conjugate monomial z^{a:?} zbar^{b:?} is not real"));
                }
                continue;
            }
            let mirror = (b.clone(), a.clone(), t.clone());
            match listed.terms.get(&mirror) {
                Some(m) if (m - c.conj()).norm() > tol => problems.push(format!(
                    "{tag}: explicit mirror of z^{a:?} zbar^{b:?} is not the conjugate coefficient"
                )),
                Some(_) => {}
                None => full.push(mirror, c.conj()),
            }
        }
        out.push(full);
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidPerturbation(problems.join("; ")))
    }
}

// ---------------------------------------------------------------- lifted system

/// A point `(z, w, z~, w~)` of the cotangent bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftPoint {
    pub z: Vec<C64>,
    pub w: Vec<C64>,
    pub zt: Vec<C64>,
    pub wt: Vec<C64>,
}

#[derive(Clone, Debug)]
struct ThetaData {
    theta: Vec<ThetaPoly>,
    dz: Vec<Vec<ThetaPoly>>,
    dy: Vec<Vec<ThetaPoly>>,
    y_dependent: bool,
}

/// Intermediate quantities of the lifted system at one point.
pub struct Conormal<T> {
    /// `r_l` (real-valued).
    pub r: Vec<T>,
    /// Multipliers `c_l(zeta)` recovered from `w~`.
    pub c: Vec<T>,
    /// `zeta^k0 sum_l c_l dr_l/dz_j`.
    pub dz: Vec<T>,
}

/// The `2n + 2d` real equations of the fibration at `zeta`.
///
/// Residual order: `r_1..r_d`, then for each `j` the pair
/// `(X_j + conj X_j, i X_j - i conj X_j)` with
/// `X_j = z~_j - zeta^k0 sum_l c_l dr_l/dz_j`, then `-Im c_l` for each `l`.
#[derive(Clone, Debug)]
pub struct LiftedDefiningSystem {
    model: Model,
    pz: Vec<Vec<BiPoly>>,
    theta: Option<ThetaData>,
}

impl LiftedDefiningSystem {
    pub fn model(model: &Model) -> Self {
        let pz = model
            .components()
            .iter()
            .map(|p| (0..model.n()).map(|j| p.poly().diff_z(j)).collect())
            .collect();
        LiftedDefiningSystem {
            model: model.clone(),
            pz,
            theta: None,
        }
    }

    pub fn base_model(&self) -> &Model {
        &self.model
    }

    pub fn is_perturbed(&self) -> bool {
        self.theta.is_some()
    }

    pub fn n(&self) -> usize {
        self.model.n()
    }

    pub fn d(&self) -> usize {
        self.model.d()
    }

    pub fn k0(&self) -> u32 {
        self.model.k0()
    }

    /// Number of real equations, `2n + 2d`.
    pub fn size(&self) -> usize {
        2 * self.n() + 2 * self.d()
    }

    /// Generic evaluation shared by plain and dual arithmetic.
    pub fn conormal<T: Scalar>(
        &self,
        zeta: C64,
        z: &[T],
        w: &[T],
        wt: &[T],
    ) -> Result<Conormal<T>> {
        let (n, d) = (self.n(), self.d());
        let k0 = self.k0() as i32;
        let zb: Vec<T> = z.iter().map(|x| x.conj()).collect();
        let y: Vec<T> = w.iter().map(|x| x.im_part()).collect();
        let zk = zeta.powi(k0);
        let zmk = zeta.powi(-k0);
        let mut r = Vec::with_capacity(d);
        for l in 0..d {
            let p = self.model.components()[l].poly().eval_scalar(z, &zb);
            let mut v = w[l].re_part() - p;
            if let Some(th) = &self.theta {
                v = v + th.theta[l].eval_scalar(z, &zb, &y);
            }
            r.push(v.re_part());
        }
        // c^T W = zeta^-k0 w~^T, W_{lj} = 1/2 delta_{lj} - (i/2) dtheta_l/dy_j
        let c: Vec<T> = match &self.theta {
            Some(th) if th.y_dependent => {
                let mut wmat: Vec<Vec<T>> = vec![vec![T::real(0.0); d]; d];
                for (l, row) in wmat.iter_mut().enumerate() {
                    for (j, e) in row.iter_mut().enumerate() {
                        let dy = th.dy[l][j].eval_scalar(z, &zb, &y);
                        let mut v = dy.scale(C64::new(0.0, -0.5));
                        if l == j {
                            v = v + T::real(0.5);
                        }
                        *e = v;
                    }
                }
                let rhs: Vec<T> = wt.iter().map(|x| x.scale(zmk)).collect();
                // transpose: sum_l W_{lj} c_l = rhs_j
                let wt_mat: Vec<Vec<T>> = (0..d)
                    .map(|j| (0..d).map(|l| wmat[l][j].clone()).collect())
                    .collect();
                solve_small(wt_mat, rhs)?
            }
            _ => wt.iter().map(|x| x.scale(zmk * 2.0)).collect(),
        };
        let mut dz = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = T::real(0.0);
            for l in 0..d {
                let mut e = -self.pz[l][j].eval_scalar(z, &zb);
                if let Some(th) = &self.theta {
                    e = e + th.dz[l][j].eval_scalar(z, &zb, &y);
                }
                acc = acc + c[l].clone() * e;
            }
            dz.push(acc.scale(zk));
        }
        Ok(Conormal { r, c, dz })
    }

    /// Generic residual vector of length `2n + 2d`.
    pub fn residuals_generic<T: Scalar>(
        &self,
        zeta: C64,
        z: &[T],
        w: &[T],
        zt: &[T],
        wt: &[T],
    ) -> Result<Vec<T>> {
        let cn = self.conormal(zeta, z, w, wt)?;
        let mut out = cn.r;
        for (j, dzj) in cn.dz.into_iter().enumerate() {
            let x = zt[j].clone() - dzj;
            let xb = x.conj();
            out.push((x.clone() + xb.clone()).re_part());
            out.push((x.scale(C64::i()) - xb.scale(C64::i())).re_part());
        }
        for cl in cn.c {
            out.push(-cl.im_part().re_part());
        }
        Ok(out)
    }

    pub fn lifted_residuals(&self, zeta: C64, point: &LiftPoint) -> Result<Vec<f64>> {
        let (n, d) = (self.n(), self.d());
        for (v, len) in [(&point.z, n), (&point.w, d), (&point.zt, n), (&point.wt, d)] {
            if v.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: v.len(),
                });
            }
        }
        if (zeta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("|zeta| = {} is not 1", zeta.norm())));
        }
        let res = self.residuals_generic(zeta, &point.z, &point.w, &point.zt, &point.wt)?;
        Ok(res.into_iter().map(|c| c.re).collect())
    }

    /// The `w`-elimination matrix at a point; errors if it is singular.
    pub fn elimination_matrix(&self, z: &[C64], w: &[C64]) -> Result<DMatrix<C64>> {
        let d = self.d();
        let mut m = DMatrix::from_diagonal_element(d, d, C64::new(0.5, 0.0));
        if let Some(th) = &self.theta {
            let zb: Vec<C64> = z.iter().map(|x| x.conj()).collect();
            let y: Vec<C64> = w.iter().map(|x| C64::new(x.im, 0.0)).collect();
            for l in 0..d {
                for j in 0..d {
                    m[(l, j)] += th.dy[l][j].eval_scalar(z, &zb, &y) * C64::new(0.0, -0.5);
                }
            }
        }
        let sv = m.clone().singular_values();
        let cond = sv.max() / sv.min();
        if !cond.is_finite() || cond > ELIMINATION_MAX_COND {
            return Err(Error::SingularElimination(cond));
        }
        Ok(m)
    }

    /// `sum_l c_l dr_l(0)` as a vector in `C^{n+d}` (z-part then w-part).
    pub fn conormal_at_origin(&self, c: &[C64]) -> Vec<C64> {
        let (n, d) = (self.n(), self.d());
        let zero_z = vec![C64::new(0.0, 0.0); n];
        let zero_w = vec![C64::new(0.0, 0.0); d];
        let wmat = self
            .elimination_matrix(&zero_z, &zero_w)
            .unwrap_or_else(|_| DMatrix::from_diagonal_element(d, d, C64::new(0.5, 0.0)));
        let mut out = vec![C64::new(0.0, 0.0); n + d];
        for l in 0..d {
            for j in 0..n {
                let mut e = -self.pz[l][j].eval_scalar(&zero_z, &zero_z);
                if let Some(th) = &self.theta {
                    e += th.dz[l][j].eval_scalar(&zero_z, &zero_z, &zero_w);
                }
                out[j] += c[l] * e;
            }
            for j in 0..d {
                out[n + j] += c[l] * wmat[(l, j)];
            }
        }
        out
    }
}

/// Builds the lifted system of `r = rho + theta`.
pub fn perturb(model: &Model, theta: &Perturbation) -> Result<LiftedDefiningSystem> {
    let polys = expand_perturbation(model, theta)?;
    let (n, d) = (model.n(), model.d());
    let mut sys = LiftedDefiningSystem::model(model);
    let data = ThetaData {
        dz: polys
            .iter()
            .map(|p| (0..n).map(|j| p.diff_z(j)).collect())
            .collect(),
        dy: polys
            .iter()
            .map(|p| (0..d).map(|j| p.diff_y(j)).collect())
            .collect(),
        y_dependent: polys.iter().any(|p| p.depends_on_y()),
        theta: polys,
    };
    sys.theta = Some(data);
    Ok(sys)
}

/// Gaussian elimination with partial pivoting on the values.
fn solve_small<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Result<Vec<T>> {
    let d = b.len();
    let values = DMatrix::from_fn(d, d, |i, j| a[i][j].value());
    let sv = values.singular_values();
    let cond = sv.max() / sv.min();
    if !cond.is_finite() || cond > ELIMINATION_MAX_COND {
        return Err(Error::SingularElimination(cond));
    }
    for col in 0..d {
        let piv = (col..d)
            .max_by(|&i, &j| a[i][col].value().norm().total_cmp(&a[j][col].value().norm()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..d {
            let f = a[row][col].clone() / a[col][col].clone();
            for k in col..d {
                let v = a[row][k].clone() - f.clone() * a[col][k].clone();
                a[row][k] = v;
            }
            let v = b[row].clone() - f * b[col].clone();
            b[row] = v;
        }
    }
    let mut x = vec![T::real(0.0); d];
    for row in (0..d).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..d {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok(x)
}
