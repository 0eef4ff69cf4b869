//! Sparse multivariate polynomials over the rationals.
//!
//! A [`Poly`] lives in a ring with a fixed number of variables; terms are
//! kept sorted by lexicographic exponent order with no zero coefficients, so
//! structural equality is polynomial equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::Rational;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(SmallVec<[u16; 16]>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(SmallVec::from_elem(0, nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = Self::one(nvars);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents<I: IntoIterator<Item = u32>>(exps: I) -> Self {
        Monomial(
            exps.into_iter()
                .map(|e| u16::try_from(e).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn to_u32(&self) -> Vec<u32> {
        self.0.iter().map(|&e| e as u32).collect()
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i] as u32
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
                .collect(),
        )
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }

    fn with(&self, i: usize, e: u16) -> Monomial {
        let mut m = self.clone();
        m.0[i] = e;
        m
    }

    /// Graded lexicographic comparison.
    pub fn deglex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, Rational)>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(Monomial::one(nvars), c)],
        }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        Poly {
            nvars,
            terms: vec![(Monomial::var(nvars, i), Rational::one())],
        }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let nvars = m.nvars();
        if c.is_zero() {
            return Self::zero(nvars);
        }
        Poly {
            nvars,
            terms: vec![(m, c)],
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(nvars: usize, terms: I) -> Self {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        Poly {
            nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Numerators over the least common denominator, in term order.
    fn integer_form(&self) -> (Vec<BigInt>, BigInt) {
        let den = self
            .terms
            .iter()
            .fold(BigInt::one(), |d, (_, c)| if c.denom().is_one() { d } else { d.lcm(c.denom()) });
        let nums = self
            .terms
            .iter()
            .map(|(_, c)| {
                if den.is_one() {
                    c.numer().clone()
                } else {
                    c.numer() * (&den / c.denom())
                }
            })
            .collect();
        (nums, den)
    }

    fn from_map(nvars: usize, acc: HashMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly { nvars, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// The value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        match self.terms.binary_search_by(|t| t.0.cmp(m)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.get(var)).max().unwrap_or(0)
    }

    /// Indices of the variables that actually occur.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.iter().any(|(m, _)| m.get(i) > 0))
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        // multiplying by a monomial preserves lex order
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.mul(mono), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.get(var);
            (e > 0).then(|| (m.with(var, (e - 1) as u16), c * Rational::from_integer(e.into())))
        });
        // lowering one exponent keeps the order
        Poly {
            nvars: self.nvars,
            terms: terms.collect(),
        }
    }

    /// Replaces variable `var` by `value` (a polynomial in the same ring).
    pub fn substitute(&self, var: usize, value: &Poly) -> Poly {
        assert_eq!(value.nvars, self.nvars);
        if self.degree_in(var) == 0 {
            return self.clone();
        }
        let mut by_exp: BTreeMap<u32, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            by_exp
                .entry(m.get(var))
                .or_default()
                .push((m.with(var, 0), c.clone()));
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::new();
        let mut power = Poly::one(self.nvars);
        let mut current = 0;
        for (e, terms) in by_exp {
            while current < e {
                power = &power * value;
                current += 1;
            }
            let rest = Poly::from_terms(self.nvars, terms);
            for (m1, c1) in &rest.terms {
                for (m2, c2) in &power.terms {
                    *acc.entry(m1.mul(m2)).or_insert_with(Rational::zero) += c1 * c2;
                }
            }
        }
        Poly::from_map(self.nvars, acc)
    }

    /// Substitutes constants for a set of variables (the variables stay in the ring).
    pub fn substitute_values(&self, values: &[(usize, Rational)]) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut m = m.clone();
            let mut c = c.clone();
            for (i, v) in values {
                let e = m.get(*i);
                if e > 0 {
                    c *= num_traits::pow(v.clone(), e as usize);
                    m = m.with(*i, 0);
                }
            }
            (m, c)
        });
        Poly::from_terms(self.nvars, terms)
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = crate::rational::to_f64(c);
                for (i, &e) in m.exponents().iter().enumerate() {
                    if e > 0 {
                        t *= point[i].powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Groups terms by the exponents of the first `lead` variables. Each group
    /// is a polynomial in the remaining `nvars - lead` variables.
    pub fn split_leading(&self, lead: usize) -> BTreeMap<Monomial, Poly> {
        let rest = self.nvars - lead;
        let mut groups: BTreeMap<Monomial, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let head = Monomial(m.0[..lead].iter().copied().collect());
            let tail = Monomial(m.0[lead..].iter().copied().collect());
            groups.entry(head).or_default().push((tail, c.clone()));
        }
        groups
            .into_iter()
            .map(|(h, ts)| (h, Poly::from_terms(rest, ts)))
            .collect()
    }

    /// Re-embeds into a ring with `nvars` variables; variable `i` becomes `map[i]`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut e: SmallVec<[u16; 16]> = SmallVec::from_elem(0, nvars);
            for (i, &x) in m.exponents().iter().enumerate() {
                e[map[i]] += x;
            }
            (Monomial(e), c.clone())
        });
        Poly::from_terms(nvars, terms)
    }

    /// True if every coefficient is `>= 0`.
    pub fn all_coeffs_nonneg(&self) -> bool {
        self.terms.iter().all(|(_, c)| !c.is_negative())
    }

    pub fn all_coeffs_nonpos(&self) -> bool {
        self.terms.iter().all(|(_, c)| !c.is_positive())
    }

    /// Leading term under lex order.
    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.last()
    }

    /// Multivariate division by a single divisor under lex order.
    /// Returns `(q, r)` with `self = q * divisor + r` and no term of `r`
    /// divisible by the leading monomial of `divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let (lm, lc) = divisor.leading().cloned().expect("nonzero");
        let mut q = Poly::zero(self.nvars);
        let mut r = Poly::zero(self.nvars);
        let mut p = self.clone();
        while let Some((m, c)) = p.leading().cloned() {
            if let Some(quot) = m.div(&lm) {
                let factor = &c / &lc;
                q = &q + &Poly::monomial(quot.clone(), factor.clone());
                p = &p - &divisor.mul_monomial(&quot, &factor);
            } else {
                r = &r + &Poly::monomial(m.clone(), c.clone());
                p.terms.pop();
            }
        }
        (q, r)
    }

    /// Coefficients of `var^0, var^1, ...` as polynomials free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let d = self.degree_in(var) as usize;
        let mut out = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            out[m.get(var) as usize].push((m.with(var, 0), c.clone()));
        }
        out.into_iter()
            .map(|ts| Poly::from_terms(self.nvars, ts))
            .collect()
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        let mut terms = Vec::with_capacity(self.terms.len() + rhs.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < rhs.terms.len() {
            match self.terms[i].0.cmp(&rhs.terms[j].0) {
                Ordering::Less => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    terms.push(rhs.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &rhs.terms[j].1;
                    if !c.is_zero() {
                        terms.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&rhs.terms[j..]);
        Poly {
            nvars: self.nvars,
            terms,
        }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.nvars);
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return rhs.mul_monomial(m, c);
        }
        if rhs.terms.len() == 1 {
            let (m, c) = &rhs.terms[0];
            return self.mul_monomial(m, c);
        }
        // integer numerators over a common denominator avoid a gcd per product
        let (ln, ld) = self.integer_form();
        let (rn, rd) = rhs.integer_form();
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len().max(rhs.terms.len()) * 4);
        for (m1, c1) in self.terms.iter().zip(&ln) {
            for (m2, c2) in rhs.terms.iter().zip(&rn) {
                let m = m1.0.mul(&m2.0);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let den = ld * rd;
        let mut terms: Vec<(Monomial, Rational)> = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Rational::new(c, den.clone())))
            .collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly {
            nvars: self.nvars,
            terms,
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly { (&self).$f(&rhs) }
        }
        impl<'a> $tr<&'a Poly> for Poly {
            type Output = Poly;
            fn $f(self, rhs: &'a Poly) -> Poly { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.poly.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let mut factors = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                let name = self.names.get(i).cloned().unwrap_or_else(|| format!("v{i}"));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", crate::rational::format(&a))?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", crate::rational::format(&a), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        write!(f, "{}", self.display_with(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use proptest::prelude::*;

    fn x(i: usize) -> Poly {
        Poly::var(3, i)
    }

    fn c(v: i64) -> Poly {
        Poly::constant(3, int(v))
    }

    #[test]
    fn basic_arithmetic() {
        let p = &(&x(0) + &c(1)) * &(&x(0) - &c(1));
        assert_eq!(p, &x(0).pow(2) - &c(1));
        assert!((&p - &p).is_zero());
        assert_eq!(p.degree_in(0), 2);
        assert_eq!(p.constant_term(), int(-1));
        assert_eq!(p.derivative(0), x(0).scale(&int(2)));
    }

    #[test]
    fn substitution() {
        // (x0 + x1)^2 with x1 := 1 - x0 gives 1
        let p = (&x(0) + &x(1)).pow(2);
        let q = p.substitute(1, &(&c(1) - &x(0)));
        assert_eq!(q, c(1));
        let v = p.substitute_values(&[(0, ratio(1, 2)), (1, ratio(1, 2))]);
        assert_eq!(v.as_constant(), Some(int(1)));
    }

    #[test]
    fn division_exact_and_remainder() {
        let a = &(&x(0) * &x(1)) + &c(3);
        let b = &x(0) + &x(2);
        let (q, r) = (&a * &b).div_rem(&b);
        assert_eq!(q, a);
        assert!(r.is_zero());
        let (q, r) = (&x(0).pow(2) + &c(1)).div_rem(&(&x(0) - &c(1)));
        assert_eq!(&(&q * &(&x(0) - &c(1))) + &r, &x(0).pow(2) + &c(1));
        assert_eq!(r, c(2));
    }

    #[test]
    fn split_groups_by_leading_vars() {
        let p = &(&x(0) * &x(2)) + &(&x(0) + &x(2));
        let g = p.split_leading(1);
        assert_eq!(g.len(), 2);
        let one = Monomial::from_exponents([1]);
        assert_eq!(g[&one], &Poly::var(2, 1) + &Poly::one(2));
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..3, 0u32..3, 0u32..2), -5i64..6, 1i64..4), 0..6).prop_map(
            |ts| {
                Poly::from_terms(
                    3,
                    ts.into_iter()
                        .map(|((a, b, c), p, q)| (Monomial::from_exponents([a, b, c]), ratio(p, q))),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&(&a + &b) - &b - a.clone()).is_zero());
        }

        #[test]
        fn exact_division_leaves_no_remainder(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            let (q, r) = (&a * &b).div_rem(&b);
            prop_assert!(r.is_zero());
            prop_assert_eq!(q, a);
        }

        #[test]
        fn evaluation_is_a_homomorphism(a in arb_poly(), b in arb_poly(), p in prop::array::uniform3(-3i64..4)) {
            let pt: Vec<Rational> = p.iter().map(|&v| ratio(v, 2)).collect();
            prop_assert_eq!((&a * &b).eval(&pt), a.eval(&pt) * b.eval(&pt));
            prop_assert_eq!((&a + &b).eval(&pt), a.eval(&pt) + b.eval(&pt));
        }
    }
}
