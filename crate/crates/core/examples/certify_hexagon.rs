//! Refutes the hexagon branch by branch and solves the simplex and square.

use toric_ke::certifier::{certify, replay_polytope_certificate, CertificationResult, CertifyOptions};
use toric_ke::polytope::catalog_polytope;
use toric_ke::rational::format;

fn main() -> toric_ke::Result<()> {
    let opts = CertifyOptions::default();
    let hexagon = catalog_polytope("alz2d")?;
    let report = certify(&hexagon, &opts)?;
    println!("alz2d: {:?}", report.verdict);
    for b in &report.branches {
        if let CertificationResult::Refuted { certificate } = &b.result {
            println!("  sigma {}: refuted in {} steps", format(&b.sigma), certificate.steps.len());
        }
    }
    if let Some(cert) = &report.certificate {
        println!("  certificate replays: {}", replay_polytope_certificate(&hexagon, cert)?);
    }
    for name in ["simplex(2,1)", "square", "scale(simplex(2,1),2)"] {
        let report = certify(&catalog_polytope(name)?, &opts)?;
        match report.solution() {
            Some(s) => {
                let a: Vec<String> = s.assignment.iter().map(|(k, v)| format!("{k} = {}", format(v))).collect();
                println!("{name}: solved, lambda {} [{}]", format(&s.lambda), a.join(", "));
            }
            None => println!("{name}: {:?}", report.verdict),
        }
    }
    Ok(())
}
