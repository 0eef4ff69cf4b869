use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::io::rat;
use crate::poly::Poly;
use crate::Rational;

/// How the equations were produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemKind {
    /// Coefficients of `det B(K) - K^sigma` for the full kernel.
    Direct,
    /// Coefficients of `p^n det B(L) - L^t` for a root `L` with `K = L^p`.
    PerfectPower { p: u32, t: u32 },
}

/// Coefficient of one x-monomial; it must vanish.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub monomial: Vec<u32>,
    pub expr: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySystem {
    pub n: usize,
    pub unknowns: Vec<String>,
    /// Sorted degree-lexicographically by x-monomial.
    pub equations: Vec<Equation>,
    /// Each must be strictly positive.
    pub constraints: Vec<Poly>,
    #[serde(with = "rat")]
    pub sigma: Rational,
    #[serde(with = "rat")]
    pub lambda: Rational,
    pub kind: SystemKind,
}

impl PolySystem {
    pub fn nvars(&self) -> usize {
        self.unknowns.len()
    }

    pub fn initial_state(&self) -> State {
        State {
            equations: self.equations.iter().map(|e| e.expr.clone()).collect(),
            constraints: self.constraints.clone(),
            eliminated: Vec::new(),
        }
    }
}

/// Working copy of a system while steps are applied. Equation indices are
/// stable: derived equations are appended.
#[derive(Clone, Debug)]
pub struct State {
    pub equations: Vec<Poly>,
    pub constraints: Vec<Poly>,
    /// `(unknown, expression)` in elimination order.
    pub eliminated: Vec<(usize, Poly)>,
}

impl State {
    /// Replaces `var` everywhere by `value`.
    pub fn substitute(&mut self, var: usize, value: &Poly) {
        for e in self.equations.iter_mut().chain(self.constraints.iter_mut()) {
            if e.degree_in(var) > 0 {
                *e = e.substitute(var, value);
            }
        }
        self.eliminated.push((var, value.clone()));
    }

    /// Unknowns known to be positive: some constraint is `c u^k` with `c > 0` and `k` odd.
    pub fn positive_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            if c.len() != 1 {
                continue;
            }
            let (m, v) = &c.terms()[0];
            if !v.is_positive() {
                continue;
            }
            let vars: Vec<usize> = (0..m.nvars()).filter(|&i| m.get(i) > 0).collect();
            if vars.len() == 1 && m.get(vars[0]) % 2 == 1 {
                out.insert(vars[0]);
            }
        }
        out
    }

    pub fn live_vars(&self) -> BTreeSet<usize> {
        self.equations
            .iter()
            .chain(self.constraints.iter())
            .flat_map(|e| e.variables())
            .collect()
    }

    pub fn all_equations_zero(&self) -> bool {
        self.equations.iter().all(|e| e.is_zero())
    }
}

/// Linear combination `sum factor_i * E_i`.
pub fn combine(equations: &[Poly], nvars: usize, terms: &[(usize, Poly)]) -> Option<Poly> {
    let mut acc = Poly::zero(nvars);
    for (i, f) in terms {
        let e = equations.get(*i)?;
        if f.nvars() != nvars {
            return None;
        }
        acc = &acc + &(f * e);
    }
    Some(acc)
}

/// Whether `p` cannot vanish when the `positive` unknowns are `> 0` and the
/// rest are real: every term has the same sign and is nonnegative on that
/// domain, and at least one term involves only positive unknowns.
pub fn is_sign_definite(p: &Poly, positive: &BTreeSet<usize>) -> bool {
    if p.is_zero() {
        return false;
    }
    let same_sign = p.all_coeffs_nonneg() || p.all_coeffs_nonpos();
    if !same_sign {
        return false;
    }
    let mut strict = false;
    for (m, _) in p.terms() {
        let mut only_positive = true;
        for i in 0..m.nvars() {
            let e = m.get(i);
            if e == 0 || positive.contains(&i) {
                continue;
            }
            if e % 2 == 1 {
                return false;
            }
            only_positive = false;
        }
        strict |= only_positive;
    }
    strict
}

/// Whether `p > 0` is impossible on the domain: every term is `<= 0` there.
pub fn is_nonpositive(p: &Poly, positive: &BTreeSet<usize>) -> bool {
    if p.is_zero() {
        return true;
    }
    if !p.all_coeffs_nonpos() {
        return false;
    }
    p.terms().iter().all(|(m, _)| {
        (0..m.nvars()).all(|i| m.get(i) == 0 || positive.contains(&i) || m.get(i) % 2 == 0)
    })
}

/// `equation = c * var + rest` with `c` a nonzero constant and `rest` free of
/// `var`; returns `-rest / c`.
pub fn solve_linear(equation: &Poly, var: usize) -> Option<Poly> {
    if equation.degree_in(var) != 1 {
        return None;
    }
    let parts = equation.coefficients_in(var);
    let c = parts[1].as_constant()?;
    if c.is_zero() {
        return None;
    }
    Some(parts[0].scale(&(-Rational::from_integer(1.into()) / c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn v(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn sign_definiteness() {
        let pos: BTreeSet<usize> = [0, 1].into();
        assert!(is_sign_definite(&(&v(0) + &v(1)), &pos));
        assert!(is_sign_definite(&Poly::constant(3, int(-2)), &pos));
        assert!(!is_sign_definite(&(&v(0) - &v(1)), &pos));
        // odd power of a sign-free unknown
        assert!(!is_sign_definite(&(&v(0) + &v(2)), &pos));
        // even power alone may vanish
        assert!(!is_sign_definite(&v(2).pow(2), &pos));
        assert!(is_sign_definite(&(&v(2).pow(2) + &v(0)), &pos));
        assert!(!is_sign_definite(&Poly::zero(3), &pos));
    }

    #[test]
    fn nonpositive_constraints() {
        let pos: BTreeSet<usize> = [0].into();
        assert!(is_nonpositive(&Poly::zero(3), &pos));
        assert!(is_nonpositive(&-&v(0), &pos));
        assert!(!is_nonpositive(&-&v(1), &pos));
        assert!(is_nonpositive(&-&v(1).pow(2), &pos));
        assert!(!is_nonpositive(&Poly::one(3), &pos));
    }

    #[test]
    fn linear_solve() {
        // 2a + b*c - 4 = 0  =>  a = 2 - bc/2
        let e = &(&v(0).scale(&int(2)) + &(&v(1) * &v(2))) - &Poly::constant(3, int(4));
        let sol = solve_linear(&e, 0).unwrap();
        assert_eq!(sol, &Poly::constant(3, int(2)) - &(&v(1) * &v(2)).scale(&crate::rational::ratio(1, 2)));
        // coefficient of b is c, not constant
        assert!(solve_linear(&e, 1).is_none());
    }

    #[test]
    fn positive_vars_from_constraints() {
        let mut st = State {
            equations: vec![],
            constraints: vec![v(0), v(1).scale(&int(3)), v(2).pow(2)],
            eliminated: vec![],
        };
        assert_eq!(st.positive_vars(), [0, 1].into());
        st.substitute(0, &(&v(1) + &Poly::one(3)));
        assert_eq!(st.positive_vars(), [1].into());
    }
}
