//! Moment map `mu_k(x) = x_k dK/dx_k / K` and sampled convexity checks.
//!
//! With this normalization the closure of the image is the Newton polytope
//! of `K`.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::rat_vec;
use crate::kernel::Kernel;
use crate::polytope::Polytope;
use crate::rational::{self, int};
use crate::Rational;

/// Exponent range of the logarithmic sampling grid: coordinates are `2^e`.
pub const GRID_EXPONENT_RANGE: (i32, i32) = (-20, 20);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentSample {
    #[serde(with = "rat_vec")]
    pub x: Vec<Rational>,
    #[serde(with = "rat_vec")]
    pub mu: Vec<Rational>,
}

fn check_kernel(k: &Kernel) -> Result<()> {
    for c in k.numeric_coefficients()?.values() {
        if !c.is_positive() {
            return Err(Error::Invalid("moment map needs positive kernel coefficients".into()));
        }
    }
    Ok(())
}

fn image(k: &Kernel, x: &[Rational]) -> Result<Vec<Rational>> {
    if x.len() != k.n() {
        return Err(Error::DimensionMismatch {
            expected: k.n(),
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_positive()) {
        return Err(Error::NonPositiveInput);
    }
    // x_k dK/dx_k = sum over terms of m_k a_m x^m
    let mut total = Rational::zero();
    let mut weighted = vec![Rational::zero(); k.n()];
    for (m, c) in k.numeric_coefficients()? {
        let mut v = c;
        for (xi, &e) in x.iter().zip(&m) {
            v *= num_traits::pow::pow(xi.clone(), e as usize);
        }
        for (w, &e) in weighted.iter_mut().zip(&m) {
            if e > 0 {
                *w += &v * int(e as i64);
            }
        }
        total += v;
    }
    Ok(weighted.into_iter().map(|w| w / &total).collect())
}

/// Exact image of `x` under the moment map.
pub fn moment_map(k: &Kernel, x: &[Rational]) -> Result<Vec<Rational>> {
    check_kernel(k)?;
    image(k, x)
}

/// Grid exponents: `g` integers spread evenly over the exponent range,
/// endpoints included.
pub fn grid_exponents(g: usize) -> Vec<i32> {
    let (lo, hi) = GRID_EXPONENT_RANGE;
    match g {
        0 => vec![],
        1 => vec![0],
        _ => {
            let mut out: Vec<i32> = (0..g)
                .map(|j| {
                    let t = j as f64 / (g - 1) as f64;
                    (lo as f64 + t * (hi - lo) as f64).round() as i32
                })
                .collect();
            out.dedup();
            out
        }
    }
}

fn pow2(e: i32) -> Rational {
    let v = Rational::from_integer(num_bigint::BigInt::from(1) << e.unsigned_abs());
    if e >= 0 {
        v
    } else {
        v.recip()
    }
}

/// The logarithmic product grid with `g` points per axis.
pub fn log_grid(n: usize, g: usize) -> Vec<Vec<Rational>> {
    let axis: Vec<Rational> = grid_exponents(g).into_iter().map(pow2).collect();
    let mut points = vec![vec![]];
    for _ in 0..n {
        points = points
            .into_iter()
            .flat_map(|p: Vec<Rational>| {
                axis.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(v.clone());
                    q
                })
            })
            .collect();
    }
    points
}

/// Samples of the moment map on the logarithmic grid.
pub fn sample(k: &Kernel, g: usize) -> Result<Vec<MomentSample>> {
    check_kernel(k)?;
    log_grid(k.n(), g)
        .into_par_iter()
        .map(|x| {
            let mu = image(k, &x)?;
            Ok(MomentSample { x, mu })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub samples: usize,
    /// Every sampled image lies in the polytope.
    pub all_inside: bool,
    /// Samples whose image falls outside the polytope.
    pub outside: Vec<MomentSample>,
    /// Per vertex, the Euclidean distance to the nearest sampled image.
    pub vertex_distances: Vec<f64>,
    pub max_vertex_distance: f64,
}

fn distance(a: &[Rational], b: &[Rational]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(u, v)| {
            let d = rational::to_f64(&(u - v));
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Samples on a `g`-per-axis log grid, tests exact membership in `p`, and
/// measures how closely the samples approach each vertex.
pub fn convexity_check(k: &Kernel, p: &Polytope, g: usize) -> Result<ConvexityReport> {
    if k.n() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: k.n(),
        });
    }
    let mut support = k.support();
    support.sort();
    let mut points = p.lattice_points()?;
    points.sort();
    if support != points {
        return Err(Error::SupportMismatch);
    }
    let samples = sample(k, g)?;
    let outside: Vec<MomentSample> = samples
        .iter()
        .filter(|s| !p.contains(&s.mu))
        .cloned()
        .collect();
    let vertex_distances: Vec<f64> = p
        .vertices()
        .iter()
        .map(|v| {
            samples
                .iter()
                .map(|s| distance(v, &s.mu))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let max_vertex_distance = vertex_distances.iter().copied().fold(0.0, f64::max);
    Ok(ConvexityReport {
        samples: samples.len(),
        all_inside: outside.is_empty(),
        outside,
        vertex_distances,
        max_vertex_distance,
    })
}

/// Moment images along the diagonal ray `x = t (1, ..., 1)`.
pub fn diagonal_ray(k: &Kernel, ts: &[Rational]) -> Result<Vec<MomentSample>> {
    ts.iter()
        .map(|t| {
            let x = vec![t.clone(); k.n()];
            let mu = moment_map(k, &x)?;
            Ok(MomentSample { x, mu })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{fubini_study_kernel, kernel_from_polytope};
    use crate::polytope::{catalog_polytope, simplex, unit_square};
    use crate::rational::ratio;

    #[test]
    fn segment_values() {
        let k = fubini_study_kernel(1, 1);
        assert_eq!(moment_map(&k, &[int(1)]).unwrap(), vec![ratio(1, 2)]);
        let big = int(1_000_000);
        let mu = moment_map(&k, &[big.clone()]).unwrap();
        assert_eq!(mu[0], &big / (&big + int(1)));
        assert!(rational::to_f64(&(int(1) - &mu[0])) < 1e-6);
        assert_eq!(moment_map(&k, &[int(0)]).unwrap_err(), Error::NonPositiveInput);
    }

    #[test]
    fn small_inputs_approach_origin() {
        let k = fubini_study_kernel(2, 1);
        let mu = moment_map(&k, &[pow2(-20), pow2(-20)]).unwrap();
        assert!(mu.iter().all(|m| rational::to_f64(m) < 1e-5));
    }

    #[test]
    fn simplex_and_square() {
        let k = fubini_study_kernel(2, 1);
        let r = convexity_check(&k, &simplex(2, 1), 32).unwrap();
        assert_eq!(r.samples, 1024);
        assert!(r.all_inside);
        assert!(r.max_vertex_distance < 1e-2);
        let k = kernel_from_polytope(&unit_square()).unwrap();
        let k = k.substitute(&crate::kernel::uniform_assignment(&k, int(1))).unwrap();
        let r = convexity_check(&k, &unit_square(), 10).unwrap();
        assert!(r.all_inside && r.max_vertex_distance < 1e-2);
    }

    #[test]
    fn support_mismatch() {
        let k = fubini_study_kernel(1, 1);
        let p = catalog_polytope("simplex(1,2)").unwrap();
        assert_eq!(convexity_check(&k, &p, 5).unwrap_err(), Error::SupportMismatch);
    }

    #[test]
    fn diagonal_ray_moves_to_far_face() {
        let k = fubini_study_kernel(2, 2);
        let ts = [int(100), int(10_000), int(1_000_000)];
        let ray = diagonal_ray(&k, &ts).unwrap();
        // far face of 2 * simplex is mu_1 + mu_2 = 2
        let gaps: Vec<Rational> = ray
            .iter()
            .map(|s| int(2) - s.mu.iter().sum::<Rational>())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps.iter().all(|g| g.is_positive()));
    }

    #[test]
    fn grid_is_dedup_and_spans_range() {
        let e = grid_exponents(5);
        assert_eq!(e, vec![-20, -10, 0, 10, 20]);
        assert_eq!(grid_exponents(100).len(), 41);
    }
}
