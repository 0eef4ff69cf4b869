//! Exact stages: linear propagation, elimination over monomials, univariate
//! gcds, and small combination search. Each emits certificate steps.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use num_traits::{One, Zero};

use super::certificate::{Multiplier, Step};
use super::system::{self, State};
use crate::poly::{Monomial, Poly};
use crate::rational::{int, ratio};
use crate::Rational;

/// Equations considered by the pair/triple combination search.
pub const COMBINATION_EQUATIONS: usize = 12;

/// Largest elimination matrix (rows times columns) attempted.
pub const ELIMINATION_CELLS: usize = 4_000_000;

fn combination_factors() -> Vec<Rational> {
    let base = [int(1), int(2), int(3), ratio(1, 2), ratio(1, 3)];
    base.iter().cloned().chain(base.iter().map(|v| -v)).collect()
}

pub enum Progress {
    /// The last pushed step concludes a refutation.
    Refuted,
    /// Nothing applies any more.
    Stuck,
    /// Deadline passed.
    OutOfTime,
}

pub struct Engine {
    pub nvars: usize,
    pub state: State,
    pub steps: Vec<Step>,
    pub deadline: Option<Instant>,
}

impl Engine {
    pub fn new(nvars: usize, state: State, deadline: Option<Instant>) -> Self {
        Engine {
            nvars,
            state,
            steps: Vec::new(),
            deadline,
        }
    }

    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() > d)
    }

    fn unit(&self, equation: usize) -> Vec<Multiplier> {
        vec![Multiplier {
            equation,
            factor: Poly::one(self.nvars),
        }]
    }

    /// A single equation or constraint that is already contradictory.
    pub fn immediate_contradiction(&self) -> Option<Step> {
        let positive = self.state.positive_vars();
        for (i, e) in self.state.equations.iter().enumerate() {
            if system::is_sign_definite(e, &positive) {
                return Some(Step::PositivityContradiction { terms: self.unit(i) });
            }
        }
        for (i, c) in self.state.constraints.iter().enumerate() {
            if system::is_nonpositive(c, &positive) {
                return Some(Step::ConstraintViolated { constraint: i });
            }
        }
        None
    }

    /// First equation (by index) with an unknown of degree one and constant
    /// coefficient; the smallest such unknown is eliminated.
    fn propagate_once(&mut self) -> bool {
        for (i, e) in self.state.equations.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            for var in e.variables() {
                if let Some(expr) = system::solve_linear(e, var) {
                    self.state.substitute(var, &expr);
                    self.steps.push(Step::SubstituteLinear {
                        equation: i,
                        unknown: var,
                        expression: expr,
                    });
                    return true;
                }
            }
        }
        false
    }

    /// Runs the exact stages to a fixpoint.
    pub fn run(&mut self) -> Progress {
        loop {
            if let Some(step) = self.immediate_contradiction() {
                self.steps.push(step);
                return Progress::Refuted;
            }
            if self.out_of_time() {
                return Progress::OutOfTime;
            }
            if self.propagate_once() {
                continue;
            }
            let derived = self
                .eliminate()
                .or_else(|| self.univariate_gcd())
                .or_else(|| self.small_combinations());
            match derived {
                Some(step) => {
                    let terminal = step.is_terminal();
                    if let Step::Combine { terms } = &step {
                        let pairs: Vec<(usize, Poly)> =
                            terms.iter().map(|m| (m.equation, m.factor.clone())).collect();
                        let c = system::combine(&self.state.equations, self.nvars, &pairs)
                            .expect("valid combination");
                        self.state.equations.push(c);
                    }
                    self.steps.push(step);
                    if terminal {
                        return Progress::Refuted;
                    }
                }
                None => return Progress::Stuck,
            }
        }
    }

    /// Gauss-Jordan elimination of the equations viewed as vectors over
    /// unknown-monomials, highest degree first. Yields a derived linear
    /// equation or a contradictory combination.
    fn eliminate(&self) -> Option<Step> {
        let rows: Vec<usize> = (0..self.state.equations.len())
            .filter(|&i| !self.state.equations[i].is_zero())
            .collect();
        if rows.len() < 2 {
            return None;
        }
        let mut cols: BTreeSet<Monomial> = BTreeSet::new();
        for &i in &rows {
            cols.extend(self.state.equations[i].terms().iter().map(|(m, _)| m.clone()));
        }
        if rows.len() * cols.len() > ELIMINATION_CELLS {
            return None;
        }
        let mut order: Vec<Monomial> = cols.into_iter().collect();
        order.sort_by(|a, b| b.deglex_cmp(a));
        let index: BTreeMap<&Monomial, usize> = order.iter().enumerate().map(|(k, m)| (m, k)).collect();

        // sparse rows: column -> value, plus the combination producing them
        let mut mat: Vec<BTreeMap<usize, Rational>> = rows
            .iter()
            .map(|&i| {
                self.state.equations[i]
                    .terms()
                    .iter()
                    .map(|(m, c)| (index[m], c.clone()))
                    .collect()
            })
            .collect();
        let mut track: Vec<BTreeMap<usize, Rational>> =
            rows.iter().map(|&i| [(i, Rational::one())].into()).collect();

        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..order.len() {
            if self.out_of_time() {
                return None;
            }
            let Some(r) = (pivot_row..mat.len()).find(|&r| mat[r].contains_key(&col)) else {
                continue;
            };
            mat.swap(pivot_row, r);
            track.swap(pivot_row, r);
            let inv = Rational::one() / &mat[pivot_row][&col];
            scale_row(&mut mat[pivot_row], &inv);
            scale_row(&mut track[pivot_row], &inv);
            let (prow, ptrack) = (mat[pivot_row].clone(), track[pivot_row].clone());
            for r in 0..mat.len() {
                if r == pivot_row {
                    continue;
                }
                if let Some(f) = mat[r].get(&col).cloned() {
                    axpy(&mut mat[r], &prow, &f);
                    axpy(&mut track[r], &ptrack, &f);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }

        let positive = self.state.positive_vars();
        let to_terms = |t: &BTreeMap<usize, Rational>| -> Vec<Multiplier> {
            t.iter()
                .map(|(&eq, c)| Multiplier {
                    equation: eq,
                    factor: Poly::constant(self.nvars, c.clone()),
                })
                .collect()
        };
        let as_poly = |row: &BTreeMap<usize, Rational>| -> Poly {
            Poly::from_terms(self.nvars, row.iter().map(|(&k, c)| (order[k].clone(), c.clone())))
        };
        for r in 0..pivot_row {
            let p = as_poly(&mat[r]);
            if system::is_sign_definite(&p, &positive) {
                return Some(Step::PositivityContradiction {
                    terms: to_terms(&track[r]),
                });
            }
        }
        for r in 0..pivot_row {
            if order[pivots[r]].degree() == 1 {
                let p = as_poly(&mat[r]);
                let already = self.state.equations.iter().any(|e| *e == p || *e == -&p);
                if !already {
                    return Some(Step::Combine {
                        terms: to_terms(&track[r]),
                    });
                }
            }
        }
        None
    }

    /// Euclid with cofactors over the equations in a single unknown.
    fn univariate_gcd(&self) -> Option<Step> {
        let mut by_var: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, e) in self.state.equations.iter().enumerate() {
            let vars = e.variables();
            if vars.len() == 1 {
                by_var.entry(vars[0]).or_default().push(i);
            }
        }
        let positive = self.state.positive_vars();
        for (_, idx) in by_var {
            if idx.len() < 2 {
                continue;
            }
            // (polynomial, cofactors by equation)
            let cof = |i: usize| -> BTreeMap<usize, Poly> { [(i, Poly::one(self.nvars))].into() };
            let mut g = (self.state.equations[idx[0]].clone(), cof(idx[0]));
            for &j in &idx[1..] {
                let mut other = (self.state.equations[j].clone(), cof(j));
                while !other.0.is_zero() {
                    let (q, r) = g.0.div_rem(&other.0);
                    let mut rc = g.1.clone();
                    for (eq, f) in &other.1 {
                        let entry = rc.entry(*eq).or_insert_with(|| Poly::zero(self.nvars));
                        *entry = &*entry - &(&q * f);
                    }
                    rc.retain(|_, f| !f.is_zero());
                    g = std::mem::replace(&mut other, (r, rc));
                }
                if self.out_of_time() {
                    return None;
                }
            }
            let terms: Vec<Multiplier> = g
                .1
                .into_iter()
                .map(|(equation, factor)| Multiplier { equation, factor })
                .collect();
            if system::is_sign_definite(&g.0, &positive) {
                return Some(Step::PositivityContradiction { terms });
            }
            let deg = g.0.total_degree().unwrap_or(0);
            let known = self.state.equations.iter().any(|e| e.total_degree() == Some(deg) && {
                let lc = &e.leading().unwrap().1 / &g.0.leading().unwrap().1;
                *e == g.0.scale(&lc)
            });
            if deg == 1 && !known {
                return Some(Step::Combine { terms });
            }
        }
        None
    }

    /// `E_i + f E_j (+ f' E_k)` with small constant factors.
    fn small_combinations(&self) -> Option<Step> {
        let live: Vec<usize> = (0..self.state.equations.len())
            .filter(|&i| !self.state.equations[i].is_zero())
            .take(COMBINATION_EQUATIONS)
            .collect();
        let positive = self.state.positive_vars();
        let factors = combination_factors();
        let eq = |i: usize| &self.state.equations[i];
        let mk = |parts: &[(usize, &Rational)]| -> Vec<Multiplier> {
            parts
                .iter()
                .map(|(i, f)| Multiplier {
                    equation: *i,
                    factor: Poly::constant(self.nvars, (*f).clone()),
                })
                .collect()
        };
        let one = Rational::one();
        for (a, &i) in live.iter().enumerate() {
            for (b, &j) in live.iter().enumerate().skip(a + 1) {
                for f in &factors {
                    let pair = eq(i) + &eq(j).scale(f);
                    if system::is_sign_definite(&pair, &positive) {
                        return Some(Step::PositivityContradiction {
                            terms: mk(&[(i, &one), (j, f)]),
                        });
                    }
                    for &k in live.iter().skip(b + 1) {
                        for g in &factors {
                            let triple = &pair + &eq(k).scale(g);
                            if system::is_sign_definite(&triple, &positive) {
                                return Some(Step::PositivityContradiction {
                                    terms: mk(&[(i, &one), (j, f), (k, g)]),
                                });
                            }
                        }
                    }
                }
                if self.out_of_time() {
                    return None;
                }
            }
        }
        None
    }
}

fn scale_row(row: &mut BTreeMap<usize, Rational>, f: &Rational) {
    for v in row.values_mut() {
        *v *= f;
    }
}

/// `row -= f * pivot`.
fn axpy(row: &mut BTreeMap<usize, Rational>, pivot: &BTreeMap<usize, Rational>, f: &Rational) {
    for (k, v) in pivot {
        let e = row.entry(*k).or_insert_with(Rational::zero);
        *e -= f * v;
        if e.is_zero() {
            row.remove(k);
        }
    }
}

/// Rebuilds values for eliminated unknowns, last elimination first.
pub fn back_substitute(
    eliminated: &[(usize, Poly)],
    nvars: usize,
    mut values: BTreeMap<usize, Rational>,
) -> Option<BTreeMap<usize, Rational>> {
    for (var, expr) in eliminated.iter().rev() {
        let subs: Vec<(usize, Rational)> = values.iter().map(|(k, v)| (*k, v.clone())).collect();
        let v = expr.substitute_values(&subs);
        let c = v.as_constant()?;
        values.insert(*var, c);
    }
    (values.len() == nvars || nvars == 0).then_some(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::certificate::{replay_certificate, Certificate};
    use crate::certifier::system::{Equation, PolySystem, SystemKind};

    fn sys(nvars: usize, eqs: Vec<Poly>) -> PolySystem {
        PolySystem {
            n: 1,
            unknowns: (0..nvars).map(|i| format!("u{i}")).collect(),
            equations: eqs
                .into_iter()
                .enumerate()
                .map(|(i, expr)| Equation {
                    monomial: vec![i as u32 + 1],
                    expr,
                })
                .collect(),
            constraints: (0..nvars).map(|i| Poly::var(nvars, i)).collect(),
            sigma: int(0),
            lambda: int(4),
            kind: SystemKind::Direct,
        }
    }

    fn run(s: &PolySystem) -> (Progress, Engine) {
        let mut e = Engine::new(s.nvars(), s.initial_state(), None);
        let p = e.run();
        (p, e)
    }

    #[test]
    fn plus_minus_one() {
        // {a - 1 = 0, a + 1 = 0}
        let a = Poly::var(1, 0);
        let one = Poly::one(1);
        let s = sys(1, vec![&a - &one, &a + &one]);
        let (p, e) = run(&s);
        assert!(matches!(p, Progress::Refuted));
        let cert = Certificate { steps: e.steps };
        assert!(replay_certificate(&s, &cert).unwrap());
    }

    #[test]
    fn propagation_reaches_solution() {
        // a - 2 = 0, b - a*a/4 = 0
        let a = Poly::var(2, 0);
        let b = Poly::var(2, 1);
        let s = sys(
            2,
            vec![&a - &Poly::constant(2, int(2)), &b - &a.pow(2).scale(&ratio(1, 4))],
        );
        let (p, e) = run(&s);
        assert!(matches!(p, Progress::Stuck));
        assert!(e.state.all_equations_zero());
        let vals = back_substitute(&e.state.eliminated, 2, BTreeMap::new()).unwrap();
        assert_eq!(vals[&0], int(2));
        assert_eq!(vals[&1], int(1));
    }

    #[test]
    fn elimination_finds_hidden_linear_relation() {
        // a^2 + ab + b - 3 = 0, a^2 + ab - b + 1 = 0: the difference gives b = 2
        let a = Poly::var(2, 0);
        let b = Poly::var(2, 1);
        let c = |v| Poly::constant(2, int(v));
        let head = &a.pow(2) + &(&a * &b);
        let s = sys(2, vec![&(&head + &b) - &c(3), &(&head - &b) + &c(1)]);
        let (p, e) = run(&s);
        assert!(matches!(p, Progress::Stuck));
        assert!(e.steps.iter().any(|s| matches!(s, Step::Combine { .. })));
        assert_eq!(e.state.eliminated[0], (1, c(2)));
        // a^2 + 2a - 1 remains for the numeric stage
        assert_eq!(e.state.live_vars(), [0].into());
    }

    #[test]
    fn univariate_gcd_refutes() {
        // (a-1)(a-2) = 0 and (a-3)a^2 ... no common root
        let a = Poly::var(1, 0);
        let c = |v| Poly::constant(1, int(v));
        let e1 = &(&a - &c(1)) * &(&a - &c(2));
        let e2 = &(&a - &c(3)) * &(&a - &c(4));
        let e3 = &(&(&a - &c(3)) * &(&a - &c(1))) * &a;
        let s = sys(1, vec![e1, e2, e3]);
        let (p, e) = run(&s);
        assert!(matches!(p, Progress::Refuted));
        let cert = Certificate { steps: e.steps };
        assert!(replay_certificate(&s, &cert).unwrap());
    }

    #[test]
    fn tampered_certificate_fails() {
        let a = Poly::var(1, 0);
        let one = Poly::one(1);
        let s = sys(1, vec![&a - &one, &a - &Poly::constant(1, int(2))]);
        let (_, e) = run(&s);
        let mut steps = e.steps;
        assert!(replay_certificate(&s, &Certificate { steps: steps.clone() }).unwrap());
        let mut wrong_index = steps.clone();
        match wrong_index.last_mut() {
            Some(Step::PositivityContradiction { terms }) => terms[0].equation = 0,
            other => panic!("unexpected final step {other:?}"),
        }
        assert!(!replay_certificate(&s, &Certificate { steps: wrong_index }).unwrap());
        match steps.first_mut() {
            Some(Step::SubstituteLinear { expression, .. }) => *expression = &*expression + &one,
            other => panic!("unexpected first step {other:?}"),
        }
        assert!(!replay_certificate(&s, &Certificate { steps }).unwrap());
        assert!(!replay_certificate(&s, &Certificate::default()).unwrap());
    }
}
