//! Moment images on a logarithmic grid stay inside the polytope and reach
//! every vertex.

use toric_ke::kernel::{fubini_study_kernel, product_kernel};
use toric_ke::moment::convexity_check;
use toric_ke::polytope::{catalog_polytope, simplex, unit_square};

fn main() -> toric_ke::Result<()> {
    let cases = [
        ("1 + x + y", fubini_study_kernel(2, 1), simplex(2, 1)),
        ("(1 + x)(1 + y)", product_kernel(&fubini_study_kernel(1, 1), &fubini_study_kernel(1, 1)), unit_square()),
        ("(1 + (x + y)/2)^2", fubini_study_kernel(2, 2), catalog_polytope("simplex(2,2)")?),
    ];
    for (name, k, p) in cases {
        let r = convexity_check(&k, &p, 32)?;
        println!(
            "{name}: {} samples, all inside {}, max vertex distance {:.2e}",
            r.samples, r.all_inside, r.max_vertex_distance
        );
    }
    Ok(())
}
