//! Einstein normalizations and embedding dimensions for the products of
//! projective spaces in dimensions 2 to 4, at global multiples 1 and 2.

use toric_ke::catalog::verify_catalog;
use toric_ke::rational::format;

fn main() -> toric_ke::Result<()> {
    for q in [1, 2] {
        println!("q = {q}");
        for row in verify_catalog(None, q)? {
            let printed = match &row.printed {
                Some(p) if row.discrepancy => format!("  (classification lists {p:?})"),
                _ => String::new(),
            };
            println!(
                "  {:<18} c = {:?}  lambda = {}  identity = {}  positive = {}  N = {}{}",
                row.manifold,
                row.c,
                row.lambda.as_ref().map_or("-".into(), format),
                row.residual_zero,
                row.positivity,
                row.embedding_dim,
                printed
            );
        }
    }
    Ok(())
}
