//! Regenerates the JSON fixtures under `fixtures/`.
//!
//! cargo run -p stadisc-core --example write_fixtures -- fixtures

use stadisc_core::fixtures;
use stadisc_core::model::{CoeffMonomial, PerturbationComponent, PerturbationTerm};
use stadisc_core::Perturbation;

fn term(i: u32, j: u32) -> PerturbationTerm {
    PerturbationTerm {
        i: vec![i],
        j: vec![j],
        s: vec![0],
        coeff: vec![CoeffMonomial {
            a: vec![1],
            b: vec![0],
            t: vec![0],
            re: 1.0,
            im: 0.0,
        }],
    }
}

fn main() -> stadisc_core::Result<()> {
    let dir = std::path::PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    fixtures::sphere_file().save(dir.join("sphere.json"))?;
    for (name, t) in [("0.1", 0.1), ("0.3", 0.3), ("0.5", 0.5), ("0.65", 0.65), ("0.7", 0.7), ("1.0", 1.0)] {
        fixtures::quartic_file(t).save(dir.join(format!("quartic_t{name}.json")))?;
    }
    fixtures::quartic_file(1.0 / 3.0).save(dir.join("quartic_t1over3.json"))?;
    fixtures::quartic_file(2.0 / 3.0).save(dir.join("quartic_t2over3.json"))?;
    fixtures::example3_file(4, 6).save(dir.join("power_sums_4_6.json"))?;
    fixtures::decoupled_file().save(dir.join("decoupled.json"))?;
    fixtures::quadric_file(&fixtures::random_hermitian(2, 1, 7)).save(dir.join("quadric_n2.json"))?;
    // z^3 conj(z) + z conj(z)^3 on the sphere, z^4 conj(z) + mirror on the quartic
    let sphere_pert = Perturbation::new(0.01, vec![PerturbationComponent { terms: vec![term(2, 1)] }]);
    sphere_pert.save(dir.join("sphere_perturbation.json"))?;
    let quartic_pert = Perturbation::new(1e-3, vec![PerturbationComponent { terms: vec![term(3, 2)] }]);
    quartic_pert.save(dir.join("quartic_perturbation.json"))?;
    Ok(())
}
