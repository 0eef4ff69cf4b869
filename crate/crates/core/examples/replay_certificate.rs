//! Serializes a refutation to JSON, replays it, and shows that a tampered
//! copy is rejected.

use toric_ke::certifier::{certify, replay_polytope_certificate, CertifyOptions, PolytopeCertificate};
use toric_ke::polytope::catalog_polytope;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hexagon = catalog_polytope("alz2d")?;
    let report = certify(&hexagon, &CertifyOptions::default())?;
    let cert = report.certificate.expect("the hexagon is refuted");
    let text = serde_json::to_string(&cert)?;
    println!("certificate: {} bytes, {} branches", text.len(), cert.branches.len());
    let parsed: PolytopeCertificate = serde_json::from_str(&text)?;
    println!("replay of parsed copy: {}", replay_polytope_certificate(&hexagon, &parsed)?);
    let mut truncated = parsed.clone();
    truncated.branches.pop();
    println!("replay without the last branch: {}", replay_polytope_certificate(&hexagon, &truncated)?);
    Ok(())
}
