//! The Monge-Ampère identity `det B(K) = K^sigma` for Fubini-Study multiples
//! and a Segre product, with the Einstein constant of each.

use toric_ke::kernel::{fubini_study_kernel, product_kernel};
use toric_ke::ma::{einstein_constant, residual};
use toric_ke::rational::{format, int};

fn main() -> toric_ke::Result<()> {
    for n in 1..=4 {
        let k = fubini_study_kernel(n, 1);
        let zero = residual(&k, n as u32 - 1)?.is_zero();
        let lambda = einstein_constant(n, &int(n as i64 - 1));
        println!("CP{n}: residual zero {zero}, lambda {}", format(&lambda));
    }
    let doubled = fubini_study_kernel(1, 2);
    println!("(1 + x/2)^2: residual zero {}, lambda 2", residual(&doubled, 1)?.is_zero());
    let segre = product_kernel(&fubini_study_kernel(1, 1), &fubini_study_kernel(1, 1));
    println!("(1 + x)(1 + y): {segre}, residual zero {}, lambda 4", residual(&segre, 2)?.is_zero());
    Ok(())
}
