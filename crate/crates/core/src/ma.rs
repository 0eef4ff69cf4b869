//! The complex Monge-Ampère side: the conjugated metric matrix `B` with
//! `det B = K^(2n) det g`, and the Einstein identity `det B = K^sigma`.
//!
//! All polynomials here are flat: the first `n` variables are the `x_i`,
//! the rest are the kernel's unknowns.

use std::collections::HashMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg;
use crate::poly::Poly;
use crate::Rational;

/// Largest dimension accepted by the cofactor expansion.
pub const MAX_DET_DIM: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HessianMatrix {
    n: usize,
    entries: Vec<Vec<Poly>>,
}

impl HessianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.entries
    }

    /// Exact determinant by cofactor expansion along rows, memoizing minors
    /// by the set of columns already used.
    pub fn determinant(&self) -> Result<Poly> {
        if self.n > MAX_DET_DIM {
            return Err(Error::DimensionTooLarge {
                n: self.n,
                max: MAX_DET_DIM,
            });
        }
        let nvars = self.entries.first().map_or(0, |r| r[0].nvars());
        let mut memo: HashMap<u32, Poly> = HashMap::new();
        Ok(self.minor(0, nvars, &mut memo))
    }

    fn minor(&self, used: u32, nvars: usize, memo: &mut HashMap<u32, Poly>) -> Poly {
        let row = used.count_ones() as usize;
        if row == self.n {
            return Poly::one(nvars);
        }
        if let Some(p) = memo.get(&used) {
            return p.clone();
        }
        let mut acc = Poly::zero(nvars);
        let mut free_before = 0;
        for col in 0..self.n {
            if used & (1 << col) != 0 {
                continue;
            }
            let e = &self.entries[row][col];
            if !e.is_zero() {
                let sub = self.minor(used | (1 << col), nvars, memo);
                let term = e * &sub;
                acc = if free_before % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            free_before += 1;
        }
        memo.insert(used, acc.clone());
        acc
    }
}

/// `B_ij = d_ij K K_i + x_i (K K_ij - K_i K_j)` for a flat kernel polynomial
/// whose first `n` variables are the `x_i`.
pub fn hessian_of_poly(n: usize, k: &Poly) -> HessianMatrix {
    let first: Vec<Poly> = (0..n).map(|i| k.derivative(i)).collect();
    let nv = k.nvars();
    let mut entries = vec![vec![Poly::zero(nv); n]; n];
    for i in 0..n {
        let xi = Poly::var(nv, i);
        for j in 0..n {
            let kij = first[i].derivative(j);
            let inner = &(k * &kij) - &(&first[i] * &first[j]);
            let mut e = &xi * &inner;
            if i == j {
                e = &e + &(k * &first[i]);
            }
            entries[i][j] = e;
        }
    }
    HessianMatrix { n, entries }
}

pub fn hessian(k: &Kernel) -> HessianMatrix {
    hessian_of_poly(k.n(), &k.to_poly())
}

pub fn det_b_of_poly(n: usize, k: &Poly) -> Result<Poly> {
    if n > MAX_DET_DIM {
        return Err(Error::DimensionTooLarge {
            n,
            max: MAX_DET_DIM,
        });
    }
    hessian_of_poly(n, k).determinant()
}

pub fn det_b(k: &Kernel) -> Result<Poly> {
    det_b_of_poly(k.n(), &k.to_poly())
}

/// `det B(K) - K^sigma`.
pub fn residual(k: &Kernel, sigma: u32) -> Result<Poly> {
    let flat = k.to_poly();
    let d = det_b_of_poly(k.n(), &flat)?;
    Ok(&d - &flat.pow(sigma))
}

/// `det B(L^p) = p^n L^(2n(p-1)) det B(L)`, which avoids expanding `L^p`
/// inside the determinant.
pub fn det_b_of_power(n: usize, root: &Poly, p: u32) -> Result<Poly> {
    let base = det_b_of_poly(n, root)?;
    let scale = Rational::from_integer(num_bigint::BigInt::from(p).pow(n as u32));
    Ok(&root.pow(2 * n as u32 * (p - 1)) * &base.scale(&scale))
}

/// Einstein constant `2(2n - sigma)` paired with exponent `sigma`.
pub fn einstein_constant(n: usize, sigma: &Rational) -> Rational {
    (Rational::from_integer((2 * n).into()) - sigma) * Rational::from_integer(2.into())
}

/// Exponent `sigma = 2n - lambda/2` paired with Einstein constant `lambda`.
pub fn sigma_for_lambda(n: usize, lambda: &Rational) -> Rational {
    Rational::from_integer((2 * n).into()) - lambda / Rational::from_integer(2.into())
}

/// Whether `det B(K) = K^sigma` for a nonnegative rational `sigma = a/d`,
/// tested as `det B(K)^d = K^a`.
pub fn identity_holds(k: &Kernel, sigma: &Rational) -> Result<bool> {
    let bad = || Error::Invalid(format!("exponent {sigma} must be a nonnegative rational"));
    let a = sigma.numer().to_u32().ok_or_else(bad)?;
    let d = sigma.denom().to_u32().ok_or_else(bad)?;
    let flat = k.numeric_poly()?;
    let det = det_b_of_poly(k.n(), &flat)?;
    Ok(det.pow(d) == flat.pow(a))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MAIdentity {
    pub kernel: Kernel,
    pub sigma: u32,
    pub residual: Poly,
    pub lambda: Rational,
}

impl MAIdentity {
    pub fn new(kernel: Kernel, sigma: u32) -> Result<Self> {
        let residual = residual(&kernel, sigma)?;
        let lambda = einstein_constant(kernel.n(), &Rational::from_integer(sigma.into()));
        Ok(MAIdentity {
            kernel,
            sigma,
            residual,
            lambda,
        })
    }

    pub fn holds(&self) -> bool {
        self.residual.is_zero()
    }
}

/// Positive definiteness of the symmetric matrix `diag(1/x) B` (congruent to
/// the metric) at each sample, by exact leading principal minors.
pub fn metric_positivity_sample(k: &Kernel, points: &[Vec<Rational>]) -> Result<bool> {
    let flat = k.numeric_poly()?;
    let n = k.n();
    for x in points {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_positive()) {
            return Err(Error::NonPositiveSamplePoint);
        }
    }
    let grads: Vec<Poly> = (0..n).map(|i| flat.derivative(i)).collect();
    for x in points {
        // B_ij(x) / x_i from pointwise values of K and its derivatives
        let k = flat.eval(x);
        let ki: Vec<Rational> = grads.iter().map(|g| g.eval(x)).collect();
        let m: linalg::Matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let kij = grads[i].derivative(j).eval(x);
                        let mut v = &k * &kij - &ki[i] * &ki[j];
                        if i == j {
                            v += &k * &ki[i] / &x[i];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        for size in 1..=n {
            let lead: linalg::Matrix = m[..size].iter().map(|r| r[..size].to_vec()).collect();
            if !linalg::det(&lead).is_positive() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether `B(0)` is the identity matrix.
pub fn is_identity_at_origin(b: &HessianMatrix) -> bool {
    let origin = vec![Rational::zero(); b.entries.first().map_or(0, |r| r[0].nvars())];
    (0..b.n).all(|i| {
        (0..b.n).all(|j| {
            let v = b.entry(i, j).eval(&origin);
            if i == j {
                v.is_one()
            } else {
                v.is_zero()
            }
        })
    })
}
