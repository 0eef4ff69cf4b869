//! Vertices, lattice points, smoothness, and normalization of catalog polytopes.

use toric_ke::polytope::catalog_polytope;
use toric_ke::rational::format;

fn main() -> toric_ke::Result<()> {
    for name in ["alz2d", "alz3d", "alz4d_a", "alz4d_b", "alz4d_c", "simplex(2,1)*simplex(1,1)"] {
        let p = catalog_polytope(name)?;
        let (delzant, witness) = p.is_delzant();
        let points = p.lattice_points()?.len();
        println!(
            "{name}: dim {}, {} facets, {} vertices, {points} lattice points, delzant {delzant}",
            p.dim(),
            p.halfspaces().len(),
            p.vertices().len()
        );
        if !delzant {
            println!("  {witness}");
            continue;
        }
        let (q, map) = p.normalized()?;
        let v: Vec<Vec<String>> = q.vertices().iter().map(|v| v.iter().map(format).collect()).collect();
        println!("  normalized (map determinant {}): first vertices {:?}", map.determinant(), &v[..v.len().min(3)]);
    }
    Ok(())
}
