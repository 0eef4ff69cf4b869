//! Products of projective spaces with multiples of the Fubini-Study metric:
//! Einstein normalization, embedding dimensions, and Veronese pullbacks.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{rat, rat_opt};
use crate::kernel::{constant_kernel, fubini_study_kernel, Kernel};
use crate::ma;
use crate::poly::{Monomial, Poly};
use crate::rational::{int, ratio};
use crate::Rational;

/// Default search bound for Einstein normalization.
pub const DEFAULT_C_MAX: u32 = 6;

/// Multiples beyond these sizes are verified through the power identity
/// instead of a direct expansion of `det B(K_q)`.
pub const DIRECT_MAX_DIM: usize = 3;
pub const DIRECT_MAX_TERMS: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub n: usize,
    #[serde(with = "rat")]
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub factors: Vec<Factor>,
    pub q: u32,
}

impl ProductSpec {
    pub fn new(factors: &[(usize, Rational)], q: u32) -> Self {
        ProductSpec {
            factors: factors
                .iter()
                .map(|(n, c)| Factor { n: *n, c: c.clone() })
                .collect(),
            q,
        }
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.n).sum()
    }

    /// `q c_i` for every factor; each must be a positive integer.
    pub fn integer_multiples(&self) -> Result<Vec<u32>> {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let m = &f.c * int(self.q as i64);
                if !m.is_integer() || !m.is_positive() {
                    return Err(Error::NonIntegralMultiple(i));
                }
                m.to_integer().to_u32().ok_or(Error::NonIntegralMultiple(i))
            })
            .collect()
    }

    /// `prod_i (1 + (sum of block i)/(q c_i))^(q c_i)`.
    pub fn kernel(&self) -> Result<Kernel> {
        let mults = self.integer_multiples()?;
        Ok(self
            .factors
            .iter()
            .zip(mults)
            .fold(constant_kernel(), |k, (f, m)| k.product(&fubini_study_kernel(f.n, m))))
    }
}

fn binomial(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `N = prod binom(n_i + q c_i, q c_i) - 1`.
pub fn embedding_dimension(spec: &ProductSpec) -> Result<BigUint> {
    let mults = spec.integer_multiples()?;
    let prod = spec
        .factors
        .iter()
        .zip(mults)
        .fold(BigUint::one(), |acc, (f, m)| acc * binomial(f.n as u64 + m as u64, m as u64));
    Ok(prod - BigUint::one())
}

/// Target dimension, Veronese degrees, and squared map coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingData {
    pub target_dim: BigUint,
    pub degrees: Vec<u32>,
    /// Per factor: `(alpha, multinomial(degree; alpha))` over `|alpha| <= degree`.
    pub squared_coefficients: Vec<Vec<(Vec<u32>, BigUint)>>,
}

fn exponents_up_to(n: usize, c: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..=c {
        for mut rest in exponents_up_to(n - 1, c - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(k: u32) -> BigUint {
    (1..=k as u64).fold(BigUint::one(), |a, i| a * BigUint::from(i))
}

/// `c! / (alpha_1! ... alpha_n! (c - |alpha|)!)`.
fn multinomial(c: u32, alpha: &[u32]) -> BigUint {
    let rest = c - alpha.iter().sum::<u32>();
    let den = alpha.iter().fold(factorial(rest), |a, &e| a * factorial(e));
    factorial(c) / den
}

pub fn embedding_data(spec: &ProductSpec) -> Result<EmbeddingData> {
    let degrees = spec.integer_multiples()?;
    let squared_coefficients = spec
        .factors
        .iter()
        .zip(&degrees)
        .map(|(f, &c)| {
            exponents_up_to(f.n, c)
                .into_iter()
                .map(|a| {
                    let m = multinomial(c, &a);
                    (a, m)
                })
                .collect()
        })
        .collect();
    Ok(EmbeddingData {
        target_dim: embedding_dimension(spec)?,
        degrees,
        squared_coefficients,
    })
}

/// Whether the degree-`c` monomial map with squared coefficients
/// `multinomial(c; alpha)` pulls `1 + sum |w|^2` back to `(1 + sum x)^c`.
pub fn veronese_pullback_check(n: usize, c: u32) -> bool {
    let pulled = Poly::from_terms(
        n,
        exponents_up_to(n, c).into_iter().map(|a| {
            let coeff = Rational::from_integer(multinomial(c, &a).into());
            (Monomial::from_exponents(a), coeff)
        }),
    );
    let mut base = Poly::one(n);
    for i in 0..n {
        base = &base + &Poly::var(n, i);
    }
    pulled == base.pow(c)
}

/// `prod (1 + s_i/c_i)^(c_i)` and its derivatives at `x`, factor by factor.
fn numeric_b_det(dims: &[usize], c: &[u32], x: &[f64]) -> (f64, f64) {
    let n: usize = dims.iter().sum();
    let mut block = Vec::with_capacity(n);
    let mut vals = Vec::new();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    let mut off = 0;
    for (b, (&ni, &ci)) in dims.iter().zip(c).enumerate() {
        let s: f64 = x[off..off + ni].iter().sum();
        let base = 1.0 + s / ci as f64;
        vals.push(base.powi(ci as i32));
        d1.push(base.powi(ci as i32 - 1));
        d2.push((ci as f64 - 1.0) / ci as f64 * base.powi(ci as i32 - 2));
        block.extend(std::iter::repeat_n(b, ni));
        off += ni;
    }
    let k: f64 = vals.iter().product();
    let ki = |i: usize| k * d1[block[i]] / vals[block[i]];
    let kij = |i: usize, j: usize| {
        let (bi, bj) = (block[i], block[j]);
        if bi == bj {
            k * d2[bi] / vals[bi]
        } else {
            k * d1[bi] * d1[bj] / (vals[bi] * vals[bj])
        }
    };
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = x[i] * (k * kij(i, j) - ki(i) * ki(j));
            if i == j {
                m[i][j] += k * ki(i);
            }
        }
    }
    (det_f64(m), k)
}

fn det_f64(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for k in col..n {
                m[r][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Exponent suggested by floating-point evaluation, if consistent across a
/// few sample points and admissible.
fn numeric_sigma(dims: &[usize], c: &[u32]) -> Option<Rational> {
    let n: usize = dims.iter().sum();
    let samples: Vec<Vec<f64>> = [0.37, 1.9, 5.3]
        .iter()
        .map(|&t| (0..n).map(|i| t * (1.0 + 0.13 * i as f64)).collect())
        .collect();
    let ratios: Vec<f64> = samples
        .iter()
        .map(|x| {
            let (d, k) = numeric_b_det(dims, c, x);
            d.ln() / k.ln()
        })
        .collect();
    let s = ratios[0];
    if ratios.iter().any(|r| (r - s).abs() > 1e-8 * (1.0 + s.abs())) {
        return None;
    }
    let sigma = crate::rational::reconstruct(s, 1000)?;
    (sigma >= Rational::zero() && sigma < int(2 * n as i64)).then_some(sigma)
}

/// `P(x / q)`.
fn rescale(p: &Poly, q: u32) -> Poly {
    Poly::from_terms(
        p.nvars(),
        p.terms().iter().map(|(m, c)| {
            let d = Rational::from_integer(num_bigint::BigInt::from(q).pow(m.degree()));
            (m.clone(), c / d)
        }),
    )
}

/// Verified Einstein normalization and how it compares with the printed table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub dims: Vec<usize>,
    pub c: Vec<u32>,
    #[serde(with = "rat")]
    pub sigma: Rational,
    #[serde(with = "rat")]
    pub lambda: Rational,
    /// Multiples listed for this product in the classification, if any.
    pub printed: Option<Vec<u32>>,
    /// True when a printed value exists and differs from `c`.
    pub discrepancy: bool,
}

fn base_spec(dims: &[usize], c: &[u32]) -> ProductSpec {
    ProductSpec::new(
        &dims.iter().zip(c).map(|(&n, &ci)| (n, int(ci as i64))).collect::<Vec<_>>(),
        1,
    )
}

/// Exact Einstein identity for `q` times the given multiples.
pub fn verify_product(dims: &[usize], c: &[u32], q: u32) -> Result<Option<Rational>> {
    let Some(sigma1) = numeric_sigma(dims, c) else {
        return Ok(None);
    };
    if !ma::identity_holds(&base_spec(dims, c).kernel()?, &sigma1)? {
        return Ok(None);
    }
    verify_multiple(dims, c, &sigma1, q)
}

/// Identity for `q` times multiples already known to satisfy it with
/// exponent `sigma1`.
fn verify_multiple(dims: &[usize], c: &[u32], sigma1: &Rational, q: u32) -> Result<Option<Rational>> {
    if q == 1 {
        return Ok(Some(sigma1.clone()));
    }
    let base = base_spec(dims, c);
    let k1 = base.kernel()?;
    let n = base.dim();
    let two_n = int(2 * n as i64);
    let sigma_q = &two_n - (&two_n - sigma1) / int(q as i64);
    let scaled = ProductSpec { q, ..base.clone() };
    let kq = scaled.kernel()?;
    if n <= DIRECT_MAX_DIM && kq.terms().len() <= DIRECT_MAX_TERMS {
        return Ok(ma::identity_holds(&kq, &sigma_q)?.then_some(sigma_q));
    }
    // K_q = L^q with L(x) = K_1(x/q). By det B(L^q) = q^n L^(2n(q-1)) det B(L),
    // the identity for K_q at sigma_q is equivalent to q^n det B(L) = L^sigma_1.
    let l = rescale(&k1.numeric_poly()?, q);
    if Kernel::from_poly(n, Vec::new(), &l.pow(q))? != kq {
        return Ok(None);
    }
    let scale = Rational::from_integer(num_bigint::BigInt::from(q).pow(n as u32));
    let lhs = ma::det_b_of_poly(n, &l)?.scale(&scale);
    let a = sigma1.numer().to_u32().ok_or_else(|| Error::Invalid("exponent".into()))?;
    let d = sigma1.denom().to_u32().ok_or_else(|| Error::Invalid("exponent".into()))?;
    Ok((lhs.pow(d) == l.pow(a)).then_some(sigma_q))
}

/// Multiples printed in the classification for products of dimension <= 4,
/// keyed by factor dimensions in the printed order.
pub fn printed_multiples(dims: &[usize]) -> Option<Vec<u32>> {
    let table: &[(&[usize], &[u32])] = &[
        (&[2], &[1]),
        (&[1, 1], &[1, 1]),
        (&[3], &[1]),
        (&[2, 1], &[2, 3]),
        (&[1, 1, 1], &[1, 1, 1]),
        (&[4], &[1]),
        (&[3, 1], &[1, 2]),
        (&[2, 2], &[1, 1]),
        (&[2, 1, 1], &[2, 3, 3]),
        (&[1, 1, 1, 1], &[1, 1, 1, 1]),
    ];
    table
        .iter()
        .find(|(d, _)| *d == dims)
        .map(|(_, c)| c.to_vec())
}

fn vectors(k: usize, c_max: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in vectors(k - 1, c_max) {
        for v in 1..=c_max {
            let mut r = rest.clone();
            r.push(v);
            out.push(r);
        }
    }
    out
}

/// The primitive positive multiples `c_i <= c_max` making the product
/// Einstein, found by search and verified exactly.
pub fn einstein_normalization(dims: &[usize], c_max: u32) -> Result<Normalization> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Invalid("factor dimensions must be positive".into()));
    }
    let n: usize = dims.iter().sum();
    for c in vectors(dims.len(), c_max) {
        let g = c.iter().fold(0u32, |g, &v| g.gcd(&v));
        if g != 1 {
            continue;
        }
        if let Some(sigma) = verify_product(dims, &c, 1)? {
            let lambda = ma::einstein_constant(n, &sigma);
            let printed = printed_multiples(dims);
            let discrepancy = printed.as_ref().is_some_and(|p| *p != c);
            return Ok(Normalization {
                dims: dims.to_vec(),
                c,
                sigma,
                lambda,
                printed,
                discrepancy,
            });
        }
    }
    Err(Error::NotFound(c_max))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub dims: Vec<usize>,
}

/// Products of projective spaces in the classification, dimensions 2 to 4.
pub fn product_manifolds() -> Vec<CatalogEntry> {
    let lists: &[&[usize]] = &[
        &[2],
        &[1, 1],
        &[3],
        &[2, 1],
        &[1, 1, 1],
        &[4],
        &[3, 1],
        &[2, 2],
        &[2, 1, 1],
        &[1, 1, 1, 1],
    ];
    lists
        .iter()
        .map(|d| CatalogEntry {
            name: d.iter().map(|n| format!("CP{n}")).collect::<Vec<_>>().join("xCP").replace("xCPCP", "xCP"),
            dims: d.to_vec(),
        })
        .collect()
}

/// One row of `verify-catalog`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRow {
    pub manifold: String,
    pub dims: Vec<usize>,
    pub q: u32,
    /// Primitive multiples `c_i`; the metric is `q` times these.
    pub c: Vec<u32>,
    #[serde(with = "rat_opt")]
    pub sigma: Option<Rational>,
    #[serde(with = "rat_opt")]
    pub lambda: Option<Rational>,
    pub residual_zero: bool,
    pub positivity: bool,
    pub embedding_dim: String,
    pub printed: Option<Vec<u32>>,
    pub discrepancy: bool,
}

fn positivity_grid(n: usize) -> Vec<Vec<Rational>> {
    [ratio(1, 10), ratio(1, 2), int(1), int(2), int(10)]
        .into_iter()
        .map(|t| (0..n).map(|i| &t * ratio(i as i64 + 2, 2)).collect())
        .collect()
}

pub fn verify_catalog(dim: Option<usize>, q: u32) -> Result<Vec<CatalogRow>> {
    let entries: Vec<CatalogEntry> = product_manifolds()
        .into_iter()
        .filter(|e| dim.is_none_or(|d| e.dims.iter().sum::<usize>() == d))
        .collect();
    use rayon::prelude::*;
    entries
        .par_iter()
        .map(|e| {
            let norm = einstein_normalization(&e.dims, DEFAULT_C_MAX)?;
            let sigma = verify_multiple(&e.dims, &norm.c, &norm.sigma, q)?;
            let n: usize = e.dims.iter().sum();
            let lambda = sigma.as_ref().map(|s| ma::einstein_constant(n, s));
            let spec = ProductSpec::new(
                &e.dims.iter().zip(&norm.c).map(|(&d, &c)| (d, int(c as i64))).collect::<Vec<_>>(),
                q,
            );
            let kernel = spec.kernel()?;
            let positivity = ma::metric_positivity_sample(&kernel, &positivity_grid(n))?;
            Ok(CatalogRow {
                manifold: e.name.clone(),
                dims: e.dims.clone(),
                q,
                c: norm.c.clone(),
                residual_zero: sigma.is_some(),
                lambda,
                sigma,
                positivity,
                embedding_dim: embedding_dimension(&spec)?.to_string(),
                printed: norm.printed.clone(),
                discrepancy: norm.discrepancy,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_dimensions() {
        let one = |n, c| ProductSpec::new(&[(n, int(c))], 1);
        assert_eq!(embedding_dimension(&one(2, 2)).unwrap(), BigUint::from(5u32));
        assert_eq!(embedding_dimension(&one(1, 1)).unwrap(), BigUint::from(1u32));
        assert_eq!(embedding_dimension(&one(3, 1)).unwrap(), BigUint::from(3u32));
        let segre = ProductSpec::new(&[(1, int(1)), (1, int(1))], 1);
        assert_eq!(embedding_dimension(&segre).unwrap(), BigUint::from(3u32));
        let half = ProductSpec::new(&[(1, ratio(1, 2))], 1);
        assert_eq!(embedding_dimension(&half).unwrap_err(), Error::NonIntegralMultiple(0));
        let doubled = ProductSpec { q: 2, ..half };
        assert_eq!(embedding_dimension(&doubled).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn embedding_data_matches_formula() {
        let spec = ProductSpec::new(&[(2, int(2)), (1, int(1))], 1);
        let data = embedding_data(&spec).unwrap();
        let count: usize = data.squared_coefficients.iter().map(|f| f.len()).product();
        assert_eq!(BigUint::from(count - 1), data.target_dim);
        assert_eq!(data.degrees, vec![2, 1]);
    }

    #[test]
    fn veronese() {
        for n in 1..=3 {
            for c in 1..=4 {
                assert!(veronese_pullback_check(n, c));
            }
        }
    }

    #[test]
    fn small_normalizations() {
        let n = einstein_normalization(&[1, 1], 6).unwrap();
        assert_eq!(n.c, vec![1, 1]);
        assert_eq!(n.lambda, int(4));
        assert!(!n.discrepancy);
        let n = einstein_normalization(&[2], 6).unwrap();
        assert_eq!(n.c, vec![1]);
        assert_eq!(n.lambda, int(6));
    }

    #[test]
    fn mixed_product_flags_printed_value() {
        let n = einstein_normalization(&[2, 1], 6).unwrap();
        assert_eq!(n.c, vec![3, 2]);
        assert_eq!(n.printed, Some(vec![2, 3]));
        assert!(n.discrepancy);
        // the printed multiples do not satisfy the identity
        assert_eq!(verify_product(&[2, 1], &[2, 3], 1).unwrap(), None);
    }

    #[test]
    fn non_einstein_products_fail() {
        assert_eq!(verify_product(&[1, 1], &[1, 2], 1).unwrap(), None);
        assert_eq!(verify_product(&[2, 1], &[1, 1], 1).unwrap(), None);
    }

    #[test]
    fn doubled_multiples() {
        // (1 + x/2)^2: lambda halves
        let s = verify_product(&[1], &[1], 2).unwrap().unwrap();
        assert_eq!(ma::einstein_constant(1, &s), int(2));
        let s = verify_product(&[2], &[1], 2).unwrap().unwrap();
        assert_eq!(ma::einstein_constant(2, &s), int(3));
    }

    #[test]
    fn names() {
        let names: Vec<String> = product_manifolds().into_iter().map(|e| e.name).collect();
        assert_eq!(names[0], "CP2");
        assert_eq!(names[3], "CP2xCP1");
        assert_eq!(names[9], "CP1xCP1xCP1xCP1");
    }
}
