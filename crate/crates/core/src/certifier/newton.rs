//! Floating-point multi-start Levenberg-Marquardt. Floats only propose
//! candidates; callers re-verify them exactly.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::poly::Poly;
use crate::rational;
use crate::Rational;

/// Polynomial over the live unknowns, in dense local indexing.
struct Compact {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Compact {
    fn new(p: &Poly, local: &BTreeMap<usize, usize>) -> Self {
        let scale = p
            .terms()
            .iter()
            .map(|(_, c)| rational::to_f64(c).abs())
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let exps = (0..m.nvars())
                    .filter(|&i| m.get(i) > 0)
                    .map(|i| (local[&i], m.get(i) as i32))
                    .collect();
                (rational::to_f64(c) / scale, exps)
            })
            .collect();
        Compact { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| c * e.iter().map(|&(i, k)| x[i].powi(k)).product::<f64>())
            .sum()
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, e) in &self.terms {
            for (a, &(i, k)) in e.iter().enumerate() {
                let mut t = c * k as f64 * x[i].powi(k - 1);
                for (b, &(j, kj)) in e.iter().enumerate() {
                    if a != b {
                        t *= x[j].powi(kj);
                    }
                }
                out[i] += t;
            }
        }
    }
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn levenberg_marquardt(eqs: &[Compact], mut x: Vec<f64>, iterations: usize) -> Option<Vec<f64>> {
    let n = x.len();
    let residuals = |x: &[f64]| -> Vec<f64> { eqs.iter().map(|e| e.eval(x)).collect() };
    let mut r = residuals(&x);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut mu = 1e-3;
    let mut grad = vec![0.0; n];
    for _ in 0..iterations {
        if !cost.is_finite() {
            return None;
        }
        if norm_inf(&r) < 1e-14 {
            break;
        }
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for (e, ri) in eqs.iter().zip(&r) {
            e.gradient(&x, &mut grad);
            for a in 0..n {
                if grad[a] == 0.0 {
                    continue;
                }
                jtr[a] += grad[a] * ri;
                for b in 0..n {
                    jtj[a][b] += grad[a] * grad[b];
                }
            }
        }
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for (a, row) in m.iter_mut().enumerate() {
                row[a] += mu * (1.0 + jtj[a][a]);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = solve_dense(m, rhs) else {
                mu *= 10.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let rt = residuals(&trial);
            let ct: f64 = rt.iter().map(|v| v * v).sum();
            if ct.is_finite() && ct < cost {
                x = trial;
                r = rt;
                cost = ct;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (norm_inf(&r) < 1e-9).then_some(x)
}

pub struct NewtonConfig {
    pub starts: usize,
    pub iterations: usize,
    pub max_denominator: u64,
    pub seed: u64,
}

/// Candidate rational assignments for `vars`, tried in start order; returns
/// the first accepted by `accept` together with its start index.
pub fn multistart<F>(
    equations: &[Poly],
    vars: &[usize],
    positive: &BTreeSet<usize>,
    cfg: &NewtonConfig,
    accept: F,
) -> Option<(usize, BTreeMap<usize, Rational>)>
where
    F: Fn(&BTreeMap<usize, Rational>) -> bool + Sync,
{
    let local: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let eqs: Vec<Compact> = equations
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| Compact::new(e, &local))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<Vec<f64>> = (0..cfg.starts)
        .map(|_| {
            vars.iter()
                .map(|v| {
                    if positive.contains(v) {
                        10f64.powf(rng.gen_range(-3.0..1.0))
                    } else {
                        rng.gen_range(-2.0..2.0)
                    }
                })
                .collect()
        })
        .collect();
    starts.into_par_iter().enumerate().find_map_first(|(idx, x0)| {
        let x = levenberg_marquardt(&eqs, x0, cfg.iterations)?;
        let mut cand = BTreeMap::new();
        for (k, v) in vars.iter().enumerate() {
            cand.insert(*v, rational::reconstruct(x[k], cfg.max_denominator)?);
        }
        accept(&cand).then_some((idx, cand))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn finds_rational_root() {
        // a^2 - 1/9 = 0, a*b - 1/27 = 0 with a, b > 0
        let a = Poly::var(2, 0);
        let b = Poly::var(2, 1);
        let eqs = vec![
            &a.pow(2) - &Poly::constant(2, ratio(1, 9)),
            &(&a * &b) - &Poly::constant(2, ratio(1, 27)),
        ];
        let cfg = NewtonConfig {
            starts: 50,
            iterations: 200,
            max_denominator: 1_000_000,
            seed: 7,
        };
        let pos: BTreeSet<usize> = [0, 1].into();
        let accept = |c: &BTreeMap<usize, Rational>| {
            let subs: Vec<_> = c.iter().map(|(k, v)| (*k, v.clone())).collect();
            c.values().all(|v| v > &int(0)) && eqs.iter().all(|e| e.substitute_values(&subs).is_zero())
        };
        let (_, sol) = multistart(&eqs, &[0, 1], &pos, &cfg, accept).unwrap();
        assert_eq!(sol[&0], ratio(1, 3));
        assert_eq!(sol[&1], ratio(1, 9));
        // deterministic in the seed
        let again = multistart(&eqs, &[0, 1], &pos, &cfg, accept).unwrap();
        assert_eq!(again.1, sol);
    }

    #[test]
    fn irrational_root_is_rejected() {
        let a = Poly::var(1, 0);
        let eqs = vec![&a.pow(2) - &Poly::constant(1, int(2))];
        let cfg = NewtonConfig {
            starts: 20,
            iterations: 100,
            max_denominator: 1_000_000,
            seed: 1,
        };
        let accept = |c: &BTreeMap<usize, Rational>| {
            let subs: Vec<_> = c.iter().map(|(k, v)| (*k, v.clone())).collect();
            eqs[0].substitute_values(&subs).is_zero()
        };
        assert!(multistart(&eqs, &[0], &[0].into(), &cfg, accept).is_none());
    }
}
