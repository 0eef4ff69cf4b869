//! Veronese and Segre embedding dimensions and the Veronese pullback identity.

use toric_ke::catalog::{embedding_data, veronese_pullback_check, ProductSpec};
use toric_ke::rational::int;

fn main() -> toric_ke::Result<()> {
    for (n, c) in [(1, 1), (2, 2), (3, 1)] {
        let spec = ProductSpec::new(&[(n, int(c))], 1);
        let data = embedding_data(&spec)?;
        println!("CP{n} with multiple {c}: CP^{}", data.target_dim);
    }
    let segre = ProductSpec::new(&[(1, int(1)), (1, int(1))], 1);
    println!("CP1 x CP1: CP^{}", embedding_data(&segre)?.target_dim);
    let all = (1..=3).all(|n| (1..=4).all(|c| veronese_pullback_check(n, c)));
    println!("Veronese pullback identity for n <= 3, c <= 4: {all}");
    Ok(())
}
