//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::Command;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use stadisc_core::admissibility::{build_qs, check_admissible, index_report, sample_pairs};
use stadisc_core::discs::{initial_lift, verify_stationary};
use stadisc_core::fixtures;
use stadisc_core::jets::{jet_injectivity, jet_order};
use stadisc_core::linearization::{assemble_g, kernel, partial_indices, partial_indices_of};
use stadisc_core::model::{perturb, CoeffMonomial, PerturbationComponent, PerturbationTerm};
use stadisc_core::solver::{axis_grid, family_chart, solve};
use stadisc_core::{BoundaryGrid, CandidatePair, LaurentPoly, LiftedDefiningSystem, Model, Perturbation, SolveConfig};

type C64 = Complex64;
type Outcome = Result<String, String>;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn pair(c: &[f64], v: &[f64]) -> CandidatePair {
    CandidatePair::new(c.to_vec(), v.iter().map(|&x| re(x)).collect())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn c1_threshold() -> Outcome {
    let start = Instant::now();
    let p = pair(&[1.0], &[1.0]);
    for t in [0.1, 0.3, 0.5, 0.65] {
        let rep = check_admissible(&fixtures::quartic(t), &p).map_err(err)?;
        ensure(rep.admissible, || format!("t = {t} should be admissible"))?;
    }
    for t in [2.0 / 3.0, 0.7, 1.0] {
        let rep = check_admissible(&fixtures::quartic(t), &p).map_err(err)?;
        ensure(!rep.admissible, || format!("t = {t} should not be admissible"))?;
    }
    let crit = check_admissible(&fixtures::quartic(2.0 / 3.0), &p).map_err(err)?;
    let dist = crit.nearest_root_distance.unwrap_or(f64::INFINITY);
    ensure(dist <= 1e-8, || format!("nearest root distance {dist:e} at t = 2/3"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 1.0, || format!("took {secs:.2}s"))?;
    Ok(format!("7 verdicts, root distance {dist:.1e} at t=2/3, {secs:.3}s"))
}

fn c2_printed_q() -> Outcome {
    let (d1, d2) = (4u32, 6u32);
    let model = fixtures::example3(d1, d2);
    let k0 = model.k0() as i32;
    let mut worst = 0.0f64;
    for c in [[1.0, 0.0], [0.0, 1.0], [0.7, -1.3]] {
        let p = pair(&c, &[1.0, 1.0]);
        let (q, _) = build_qs(&model, &p).map_err(err)?;
        let term = |cl: f64, d: u32| {
            let h = (d / 2) as i32;
            let sign = if (h - 1) % 2 == 0 { 1.0 } else { -1.0 };
            LaurentPoly::monomial(k0 + h - 1, re(cl * (h * h) as f64 * sign))
        };
        let second = &LaurentPoly::one_minus_zeta_bar_pow(d2 - d1) * &term(c[1], d2);
        let display = &term(c[0], d1) + &second;
        for (i, j) in [(0, 0), (1, 1)] {
            worst = worst.max((q.get(i, j) - &display).max_abs_coeff());
        }
        worst = worst.max(q.get(0, 1).max_abs_coeff()).max(q.get(1, 0).max_abs_coeff());
    }
    ensure(worst <= 1e-12, || format!("max coefficient deviation {worst:e}"))?;
    let good = check_admissible(&model, &pair(&[1.0, 0.0], &[1.0, 1.0])).map_err(err)?;
    ensure(good.admissible, || "(1,0) should be admissible".into())?;
    let bad = check_admissible(&model, &pair(&[0.0, 1.0], &[1.0, 1.0])).map_err(err)?;
    let at_one = bad.det_q.eval(re(1.0)).norm();
    ensure(!bad.admissible && at_one <= 1e-12, || format!("(0,1): admissible={}, |det Q(1)|={at_one:e}", bad.admissible))?;
    Ok(format!("Q11=Q22 to {worst:.1e}; (1,0) admissible, (0,1) singular at 1"))
}

fn c3_decoupled() -> Outcome {
    let model = fixtures::decoupled();
    let pairs = sample_pairs(&model, 200, 2024);
    let mut worst = 0.0f64;
    for p in &pairs {
        let (q, _) = build_qs(&model, p).map_err(err)?;
        worst = worst.max(q.eval(re(1.0)).determinant().norm());
    }
    ensure(pairs.len() == 200 && worst <= 1e-10, || format!("max |det Q(1)| = {worst:e}"))?;
    Ok(format!("200 pairs, max |det Q(1)| = {worst:.1e}"))
}

fn c4_quadrics() -> Outcome {
    let mut checked = 0;
    for n in 1..=3usize {
        for seed in 0..8u64 {
            let d = 1 + (seed as usize % 3);
            let a = fixtures::random_hermitian(n, d, 1000 * n as u64 + seed);
            let model = fixtures::quadric(&a);
            let c: Vec<f64> = (0..d).map(|l| [1.0, -0.6, 0.35][l]).collect();
            let combo = a
                .iter()
                .zip(&c)
                .fold(DMatrix::<C64>::zeros(n, n), |acc, (m, &cl)| acc + m * re(cl));
            if combo.determinant().norm() < 1e-3 {
                continue;
            }
            let v: Vec<C64> = (0..n).map(|j| C64::new(1.0 - 0.2 * j as f64, 0.3 * j as f64)).collect();
            let p = CandidatePair::new(c, v);
            let (_, s) = build_qs(&model, &p).map_err(err)?;
            for i in 0..n {
                for j in 0..n {
                    ensure(s.get(i, j).is_zero(), || format!("S nonzero for n={n} seed={seed}"))?;
                }
            }
            let ind = index_report(&model, &p).map_err(err)?.ind;
            ensure(ind == 2 * n as i32, || format!("ind = {ind} for n = {n}, seed {seed}"))?;
            checked += 1;
        }
    }
    ensure(checked >= 12, || format!("only {checked} invertible quadrics"))?;
    Ok(format!("{checked} quadrics with ind = 2n and S = 0"))
}

fn dimension_fixtures() -> Vec<(&'static str, Model, CandidatePair, i32)> {
    vec![
        ("sphere", fixtures::sphere(), pair(&[1.0], &[1.0]), 5),
        ("quartic t=1/3", fixtures::quartic(1.0 / 3.0), pair(&[1.0], &[1.0]), 11),
        ("quadric n=2", fixtures::quadric(&fixtures::random_hermitian(2, 1, 7)), pair(&[1.0], &[1.0, 0.5]), 7),
    ]
}

fn c5_dimension() -> Outcome {
    let mut notes = Vec::new();
    for (name, model, p, m) in dimension_fixtures() {
        let start = Instant::now();
        let idx = index_report(&model, &p).map_err(err)?;
        ensure(idx.dimension == m, || format!("{name}: formula gives {}", idx.dimension))?;
        let op = assemble_g(&model, &p).map_err(err)?;
        for pinned in [false, true] {
            let k = kernel(&op.clone().pinned(pinned), 24).map_err(|e| format!("{name}: {e}"))?;
            let want = if pinned { m - model.d() as i32 } else { m };
            ensure(k.truncations == [24, 28, 32], || "truncations".into())?;
            ensure(k.nullities.iter().all(|&x| x as i32 == want), || {
                format!("{name} pinned={pinned}: nullities {:?}, want {want}", k.nullities)
            })?;
            ensure(k.gaps.iter().all(|&g| g >= 1e4), || format!("{name}: gaps {:?}", k.gaps))?;
        }
        let secs = start.elapsed().as_secs_f64();
        ensure(secs < 30.0, || format!("{name}: {secs:.1}s"))?;
        notes.push(format!("{name} m={m}"));
    }
    Ok(notes.join(", "))
}

fn c6_partial_indices() -> Outcome {
    let mut cases = dimension_fixtures()
        .into_iter()
        .map(|(name, m, p, _)| (name.to_string(), m, p))
        .collect::<Vec<_>>();
    for t in [0.1, 0.3, 0.5] {
        cases.push((format!("quartic t={t}"), fixtures::quartic(t), pair(&[1.0], &[1.0])));
    }
    cases.push(("power sums 4,6".into(), fixtures::example3(4, 6), pair(&[1.0, 0.0], &[1.0, 1.0])));
    let mut notes = Vec::new();
    for (name, model, p) in cases {
        let op = assemble_g(&model, &p).map_err(err)?;
        let pi = partial_indices(&op).map_err(|e| format!("{name}: {e}"))?;
        ensure(pi.sum_matches && pi.bound_holds, || format!("{name}: {:?} (ind {:?})", pi.indices, pi.expected_sum))?;
        notes.push(format!("{name} {:?}", pi.indices));
    }
    for exps in [vec![2, -1], vec![3, -2], vec![0, 0], vec![1, 4, -1]] {
        let q = exps.len();
        let e = exps.clone();
        let pi = partial_indices_of(
            move |z| DMatrix::from_fn(q, q, |i, j| if i == j { z.powi(e[i]) } else { re(0.0) }),
            6,
        )
        .map_err(err)?;
        let mut want = exps.clone();
        want.sort();
        ensure(pi.indices == want, || format!("diag {exps:?} gave {:?}", pi.indices))?;
    }
    Ok(format!("{}; 4 calibration symbols exact", notes.join(", ")))
}

fn c7_stationarity() -> Outcome {
    let cases: Vec<(Model, CandidatePair)> = vec![
        (fixtures::sphere(), pair(&[1.0], &[1.0])),
        (fixtures::sphere(), CandidatePair::new(vec![-2.0], vec![C64::new(0.3, -0.8)])),
        (fixtures::quartic(1.0 / 3.0), pair(&[1.0], &[1.0])),
        (fixtures::quartic(0.7), pair(&[1.0], &[1.0])),
        (fixtures::quartic(1.0), pair(&[1.0], &[1.0])),
        (fixtures::example3(4, 6), pair(&[1.0, 0.0], &[1.0, 1.0])),
        (fixtures::example3(4, 6), pair(&[0.0, 1.0], &[1.0, 1.0])),
        (fixtures::decoupled(), pair(&[0.4, -1.3], &[0.7, 0.2])),
        (fixtures::quadric(&fixtures::random_hermitian(2, 1, 7)), pair(&[1.0], &[1.0, 0.5])),
    ];
    let (mut res, mut neg) = (0.0f64, 0.0f64);
    for (model, p) in &cases {
        let f0 = initial_lift(model, p).map_err(err)?;
        let rep = verify_stationary(&LiftedDefiningSystem::model(model), &f0, BoundaryGrid::new(4096), 1e-10).map_err(err)?;
        res = res.max(rep.max_residual);
        neg = neg.max(rep.negative_energy);
    }
    ensure(res <= 1e-10 && neg <= 1e-10, || format!("residual {res:e}, negative energy {neg:e}"))?;
    Ok(format!("{} lifts, residual {res:.1e}, negative energy {neg:.1e}", cases.len()))
}

fn sphere_perturbation(eps: f64) -> Perturbation {
    Perturbation::new(
        eps,
        vec![PerturbationComponent {
            terms: vec![PerturbationTerm {
                i: vec![2],
                j: vec![1],
                s: vec![0],
                coeff: vec![CoeffMonomial {
                    a: vec![1],
                    b: vec![0],
                    t: vec![0],
                    re: 1.0,
                    im: 0.0,
                }],
            }],
        }],
    )
}

fn c8_newton() -> Outcome {
    let model = fixtures::sphere();
    let p = pair(&[1.0], &[1.0]);
    let f0 = initial_lift(&model, &p).map_err(err)?;
    let cfg = SolveConfig::default();
    let eps = [1e-2, 1e-3, 1e-4];
    let mut dist = Vec::new();
    let mut first = None;
    for &e in &eps {
        let sys = perturb(&model, &sphere_perturbation(e)).map_err(err)?;
        let rep = solve(&sys, &f0, &cfg).map_err(err)?;
        ensure(rep.check_residual <= 1e-10, || format!("eps {e}: residual {:e}", rep.check_residual))?;
        if first.is_none() {
            ensure(rep.iterations <= 6, || format!("{} iterations", rep.iterations))?;
            first = Some((rep.iterations, rep.check_residual, sys, rep.lift));
        }
        dist.push(rep.distance);
    }
    let slopes: Vec<f64> = (0..2)
        .map(|w| (dist[w].ln() - dist[w + 1].ln()) / (eps[w].ln() - eps[w + 1].ln()))
        .collect();
    ensure(slopes.iter().all(|s| (s - 1.0).abs() <= 0.1), || format!("slopes {slopes:?}"))?;
    let (iters, resid, sys, base) = first.expect("first solve");
    let op = assemble_g(&model, &p).map_err(err)?;
    let k = kernel(&op, cfg.truncation).map_err(err)?;
    let fam = family_chart(&sys, &base, &k.basis, &axis_grid(k.nullity, 0.02), &cfg, 1e-9).map_err(err)?;
    let solved = fam.points.len() - 1;
    ensure(solved == 2 * k.nullity && fam.all_stationary() && fam.min_pairwise_distance > 0.0, || {
        format!("chart: {solved} points, stationary={}, min distance {:e}", fam.all_stationary(), fam.min_pairwise_distance)
    })?;
    Ok(format!(
        "{iters} iterations to {resid:.1e}; slopes {:.3}, {:.3}; {solved} distinct stationary chart points (m={})",
        slopes[0], slopes[1], k.nullity
    ))
}

fn c9_jets() -> Outcome {
    let mut notes = Vec::new();
    for (name, model, p, m) in [
        ("sphere", fixtures::sphere(), pair(&[1.0], &[1.0]), 5usize),
        ("quartic t=1/3", fixtures::quartic(1.0 / 3.0), pair(&[1.0], &[1.0]), 11),
    ] {
        let op = assemble_g(&model, &p).map_err(err)?;
        let ell = jet_order(&op).map_err(err)?;
        let k = kernel(&op, 24).map_err(err)?;
        let full = jet_injectivity(&k, model.k0(), ell).map_err(err)?;
        ensure(full.rank == m, || format!("{name}: rank {} at order {ell}", full.rank))?;
        ensure(full.palindromic, || format!("{name}: palindrome error {:e}", full.palindrome_error))?;
        let low = jet_injectivity(&k, model.k0(), 0).map_err(err)?;
        ensure(low.rank < m, || format!("{name}: rank {} at order 0", low.rank))?;
        notes.push(format!("{name} rank {m} at order {ell}, {} at 0", low.rank));
    }
    Ok(notes.join("; "))
}

fn payload(args: &[&str]) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_stadisc"))
        .args(args)
        .output()
        .map_err(err)?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    Ok(v["payload"].clone())
}

fn c10_determinism() -> Outcome {
    let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/");
    let decoupled = format!("{root}decoupled.json");
    let sphere = format!("{root}sphere.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["admissible", &decoupled, "--search", "--budget", "64", "--seed", "11"],
        vec!["kernel", &sphere],
        vec!["indices", &sphere],
    ];
    for args in &runs {
        let (a, b) = (payload(args)?, payload(args)?);
        ensure(a == b && !a.is_null(), || format!("{args:?} differs between runs"))?;
    }
    Ok(format!("{} commands, identical payloads", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("admissibility threshold", c1_threshold),
        ("printed Q formula", c2_printed_q),
        ("decoupled non-admissibility", c3_decoupled),
        ("quadric index", c4_quadrics),
        ("dimension formula vs SVD", c5_dimension),
        ("partial-index bound", c6_partial_indices),
        ("initial-lift stationarity", c7_stationarity),
        ("Newton solver", c8_newton),
        ("jet injectivity", c9_jets),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.2}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
