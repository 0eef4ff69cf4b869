//! Kernel polynomials `K(x)` in `x_i = |z_i|^2`, the argument of the
//! logarithm in a rotation-invariant diastasis `Phi = log K`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Poly};
use crate::polytope::Polytope;
use crate::Rational;

pub type LatticePoint = Vec<u32>;

/// Element of the coefficient ring: a polynomial over the rationals in the
/// kernel's unknowns (variable `j` is `unknowns[j]`).
pub type CoefficientExpr = Poly;

/// Canonical name of the unknown coefficient of `x^m`.
pub fn unknown_name(m: &[u32]) -> String {
    let parts: Vec<String> = m.iter().map(|e| e.to_string()).collect();
    format!("a_{}", parts.join("_"))
}

fn parse_unknown_name(name: &str) -> Option<Vec<u32>> {
    name.strip_prefix("a_")?
        .split('_')
        .map(|p| p.parse().ok())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    n: usize,
    unknowns: Vec<String>,
    terms: BTreeMap<LatticePoint, CoefficientExpr>,
}

impl Kernel {
    /// Builds a kernel; zero coefficients are dropped. Every coefficient must
    /// live in the ring of `unknowns`.
    pub fn new(
        n: usize,
        unknowns: Vec<String>,
        terms: impl IntoIterator<Item = (LatticePoint, CoefficientExpr)>,
    ) -> Result<Self> {
        let k = unknowns.len();
        let mut map: BTreeMap<LatticePoint, CoefficientExpr> = BTreeMap::new();
        for (m, c) in terms {
            if m.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: m.len(),
                });
            }
            if c.nvars() != k {
                return Err(Error::Invalid("coefficient ring mismatch".into()));
            }
            let entry = map.entry(m).or_insert_with(|| Poly::zero(k));
            *entry = &*entry + &c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(Kernel {
            n,
            unknowns,
            terms: map,
        })
    }

    /// Numeric kernel from `(exponent, coefficient)` pairs.
    pub fn numeric(n: usize, terms: impl IntoIterator<Item = (LatticePoint, Rational)>) -> Result<Self> {
        Self::new(
            n,
            Vec::new(),
            terms.into_iter().map(|(m, c)| (m, Poly::constant(0, c))),
        )
    }

    /// Reads a polynomial in `n + unknowns.len()` variables, the first `n`
    /// being the `x_i`.
    pub fn from_poly(n: usize, unknowns: Vec<String>, poly: &Poly) -> Result<Self> {
        if poly.nvars() != n + unknowns.len() {
            return Err(Error::Invalid("polynomial ring mismatch".into()));
        }
        let groups = poly.split_leading(n);
        Self::new(n, unknowns, groups.into_iter().map(|(m, c)| (m.to_u32(), c)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn terms(&self) -> &BTreeMap<LatticePoint, CoefficientExpr> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[u32]) -> CoefficientExpr {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.unknowns.len()))
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.terms.keys().cloned().collect()
    }

    pub fn is_numeric(&self) -> bool {
        self.terms.values().all(|c| c.is_constant())
    }

    /// Flattened polynomial in `x_1..x_n, a_1..a_k`.
    pub fn to_poly(&self) -> Poly {
        let k = self.unknowns.len();
        let nv = self.n + k;
        let terms = self.terms.iter().flat_map(|(m, c)| {
            c.terms().iter().map(move |(am, v)| {
                let exps = m.iter().copied().chain(am.to_u32());
                (Monomial::from_exponents(exps), v.clone())
            })
        });
        Poly::from_terms(nv, terms.collect::<Vec<_>>())
    }

    /// The kernel as a polynomial in `x` alone; fails if unknowns remain.
    pub fn numeric_poly(&self) -> Result<Poly> {
        if !self.is_numeric() {
            return Err(Error::SymbolicKernel);
        }
        Ok(Poly::from_terms(
            self.n,
            self.terms
                .iter()
                .map(|(m, c)| (Monomial::from_exponents(m.iter().copied()), c.constant_term())),
        ))
    }

    pub fn numeric_coefficients(&self) -> Result<BTreeMap<LatticePoint, Rational>> {
        if !self.is_numeric() {
            return Err(Error::SymbolicKernel);
        }
        Ok(self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c.constant_term()))
            .collect())
    }

    /// Replaces every unknown by a rational value.
    pub fn substitute(&self, assignment: &BTreeMap<String, Rational>) -> Result<Kernel> {
        let mut values = Vec::with_capacity(self.unknowns.len());
        for (j, name) in self.unknowns.iter().enumerate() {
            let v = assignment
                .get(name)
                .ok_or_else(|| Error::MissingAssignment(name.clone()))?;
            values.push((j, v.clone()));
        }
        Kernel::numeric(
            self.n,
            self.terms
                .iter()
                .map(|(m, c)| (m.clone(), c.substitute_values(&values).constant_term())),
        )
    }

    /// Constant term 1 and every linear coefficient 1.
    pub fn is_bochner_normalized(&self) -> bool {
        let k = self.unknowns.len();
        if self.coefficient(&vec![0; self.n]) != Poly::one(k) {
            return false;
        }
        (0..self.n).all(|i| {
            let mut e = vec![0; self.n];
            e[i] = 1;
            self.coefficient(&e) == Poly::one(k)
        })
    }

    /// Kernel on disjoint variable blocks: `K1(x) K2(y)`. Unknowns keep their
    /// exponent-vector names, padded into the product lattice.
    pub fn product(&self, other: &Kernel) -> Kernel {
        let n = self.n + other.n;
        let rename = |name: &str, left: bool, own: usize| -> String {
            match parse_unknown_name(name) {
                Some(m) if m.len() == own => {
                    let mut full = vec![0; n];
                    let off = if left { 0 } else { self.n };
                    full[off..off + own].copy_from_slice(&m);
                    unknown_name(&full)
                }
                _ => format!("{}{}", if left { "l." } else { "r." }, name),
            }
        };
        let mut unknowns: Vec<String> = self.unknowns.iter().map(|u| rename(u, true, self.n)).collect();
        unknowns.extend(other.unknowns.iter().map(|u| rename(u, false, other.n)));
        let k = unknowns.len();
        let k1 = self.unknowns.len();
        let left_map: Vec<usize> = (0..k1).collect();
        let right_map: Vec<usize> = (k1..k).collect();
        let mut terms = Vec::new();
        for (m1, c1) in &self.terms {
            let c1 = c1.embed(k, &left_map);
            for (m2, c2) in &other.terms {
                let c2 = c2.embed(k, &right_map);
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                terms.push((m, &c1 * &c2));
            }
        }
        Kernel::new(n, unknowns, terms).expect("product of valid kernels")
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// `K(x)` at a rational point (numeric kernels only).
    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        Ok(self.numeric_poly()?.eval(x))
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<String> = (1..=self.n).map(|i| format!("x{i}")).collect();
        names.extend(self.unknowns.iter().cloned());
        write!(f, "{}", self.to_poly().display_with(&names))
    }
}

/// One term per lattice point: coefficient 1 on the origin and unit vectors,
/// a fresh unknown `a_m` everywhere else.
pub fn kernel_from_polytope(p: &Polytope) -> Result<Kernel> {
    let points = p.lattice_points()?;
    let n = p.dim();
    let origin = vec![0; n];
    let units: Vec<LatticePoint> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    for required in std::iter::once(&origin).chain(units.iter()) {
        if !points.contains(required) {
            return Err(Error::MissingOriginVertex(required.clone()));
        }
    }
    let unknowns: Vec<String> = points
        .iter()
        .filter(|m| **m != origin && !units.contains(m))
        .map(|m| unknown_name(m))
        .collect();
    let k = unknowns.len();
    let mut next = 0;
    let terms = points.into_iter().map(|m| {
        let c = if m == origin || units.contains(&m) {
            Poly::one(k)
        } else {
            next += 1;
            Poly::var(k, next - 1)
        };
        (m, c)
    });
    Kernel::new(n, unknowns.clone(), terms.collect::<Vec<_>>())
}

/// `(1 + (x_1 + ... + x_n)/c)^c`: the multiple `c g_FS` in Bochner coordinates.
pub fn fubini_study_kernel(n: usize, c: u32) -> Kernel {
    assert!(c >= 1, "multiple must be positive");
    let inv = Rational::new(1.into(), c.into());
    let mut base = Poly::one(n);
    for i in 0..n {
        base = &base + &Poly::var(n, i).scale(&inv);
    }
    let expanded = base.pow(c);
    Kernel::from_poly(n, Vec::new(), &expanded).expect("numeric kernel")
}

pub fn product_kernel(k1: &Kernel, k2: &Kernel) -> Kernel {
    k1.product(k2)
}

/// Whether `log K` has no constant term and linear part exactly `sum x_i`.
pub fn bochner_check(k: &Kernel) -> Result<bool> {
    if !k.is_numeric() {
        return Err(Error::SymbolicKernel);
    }
    Ok(k.is_bochner_normalized())
}

/// Kernel with a single constant term; the unit of `product_kernel`.
pub fn constant_kernel() -> Kernel {
    Kernel::numeric(0, [(vec![], Rational::one())]).unwrap()
}

/// Assignment setting every unknown of `k` to `v`.
pub fn uniform_assignment(k: &Kernel, v: Rational) -> BTreeMap<String, Rational> {
    k.unknowns().iter().map(|u| (u.clone(), v.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{catalog_polytope, simplex, unit_square};
    use crate::rational::{int, ratio};

    fn num(n: usize, terms: &[(&[u32], Rational)]) -> Kernel {
        Kernel::numeric(n, terms.iter().map(|(m, c)| (m.to_vec(), c.clone()))).unwrap()
    }

    #[test]
    fn square_kernel_has_one_unknown() {
        let k = kernel_from_polytope(&unit_square()).unwrap();
        assert_eq!(k.unknowns(), &["a_1_1".to_string()]);
        assert_eq!(k.terms().len(), 4);
        assert!(k.is_bochner_normalized());
    }

    #[test]
    fn hexagon_kernel_unknowns() {
        let k = kernel_from_polytope(&catalog_polytope("alz2d").unwrap()).unwrap();
        assert_eq!(k.terms().len(), 7);
        assert_eq!(k.unknowns(), &["a_1_1", "a_1_2", "a_2_1", "a_2_2"]);
    }

    #[test]
    fn simplex_kernel_is_numeric() {
        let k = kernel_from_polytope(&simplex(2, 1)).unwrap();
        assert!(k.unknowns().is_empty());
        assert_eq!(k, num(2, &[(&[0, 0], int(1)), (&[1, 0], int(1)), (&[0, 1], int(1))]));
    }

    #[test]
    fn missing_unit_vector() {
        let shifted = crate::polytope::Polytope::new(
            1,
            vec![
                crate::polytope::HalfSpace::from_ints(&[-1], int(-1)).unwrap(),
                crate::polytope::HalfSpace::from_ints(&[1], int(3)).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            kernel_from_polytope(&shifted).unwrap_err(),
            Error::MissingOriginVertex(vec![0])
        );
    }

    #[test]
    fn fubini_study_expansions() {
        assert_eq!(fubini_study_kernel(1, 1), num(1, &[(&[0], int(1)), (&[1], int(1))]));
        assert_eq!(
            fubini_study_kernel(1, 2),
            num(1, &[(&[0], int(1)), (&[1], int(1)), (&[2], ratio(1, 4))])
        );
        assert_eq!(
            fubini_study_kernel(2, 2),
            num(
                2,
                &[
                    (&[0, 0], int(1)),
                    (&[1, 0], int(1)),
                    (&[0, 1], int(1)),
                    (&[2, 0], ratio(1, 4)),
                    (&[1, 1], ratio(1, 2)),
                    (&[0, 2], ratio(1, 4)),
                ]
            )
        );
    }

    #[test]
    fn fubini_study_newton_polytope_is_scaled_simplex() {
        for n in 1..=3 {
            for c in 1..=3 {
                let k = fubini_study_kernel(n, c);
                let pts = simplex(n, 1).scale(c).unwrap().lattice_points().unwrap();
                assert_eq!(k.support(), pts);
                assert!(bochner_check(&k).unwrap());
            }
        }
    }

    #[test]
    fn products() {
        let x = fubini_study_kernel(1, 1);
        let sq = x.product(&x);
        assert_eq!(
            sq,
            num(2, &[(&[0, 0], int(1)), (&[1, 0], int(1)), (&[0, 1], int(1)), (&[1, 1], int(1))])
        );
        let p = fubini_study_kernel(1, 2).product(&x);
        assert_eq!(p.terms().len(), 6);
        assert!(p.is_bochner_normalized());
        assert_eq!(x.product(&constant_kernel()), x);
        assert_eq!(constant_kernel().product(&x), x);
    }

    #[test]
    fn product_commutes_with_substitution() {
        let k1 = kernel_from_polytope(&unit_square()).unwrap();
        let k2 = kernel_from_polytope(&simplex(1, 2)).unwrap();
        let prod = k1.product(&k2);
        assert_eq!(prod.unknowns(), &["a_1_1_0", "a_0_0_2"]);
        let a1: BTreeMap<_, _> = [("a_1_1".to_string(), ratio(3, 2))].into();
        let a2: BTreeMap<_, _> = [("a_2".to_string(), ratio(1, 4))].into();
        let joint: BTreeMap<_, _> =
            [("a_1_1_0".to_string(), ratio(3, 2)), ("a_0_0_2".to_string(), ratio(1, 4))].into();
        assert_eq!(
            prod.substitute(&joint).unwrap(),
            k1.substitute(&a1).unwrap().product(&k2.substitute(&a2).unwrap())
        );
    }

    #[test]
    fn bochner_checks() {
        assert!(bochner_check(&fubini_study_kernel(1, 2)).unwrap());
        assert!(!bochner_check(&num(1, &[(&[0], int(1)), (&[1], int(2))])).unwrap());
        assert!(bochner_check(&fubini_study_kernel(1, 1).product(&fubini_study_kernel(1, 1))).unwrap());
        let sym = kernel_from_polytope(&unit_square()).unwrap();
        assert_eq!(bochner_check(&sym).unwrap_err(), Error::SymbolicKernel);
    }

    #[test]
    fn substitution() {
        let k = kernel_from_polytope(&unit_square()).unwrap();
        let one = uniform_assignment(&k, int(1));
        let x = fubini_study_kernel(1, 1);
        assert_eq!(k.substitute(&one).unwrap(), x.product(&x));
        assert_eq!(
            k.substitute(&BTreeMap::new()).unwrap_err(),
            Error::MissingAssignment("a_1_1".into())
        );
        // all-zero assignment drops the interior terms; support no longer matches
        let hex = kernel_from_polytope(&catalog_polytope("alz2d").unwrap()).unwrap();
        let zero = hex.substitute(&uniform_assignment(&hex, int(0))).unwrap();
        assert_eq!(zero.terms().len(), 3);
        assert_ne!(zero.support(), catalog_polytope("alz2d").unwrap().lattice_points().unwrap());
        let line = kernel_from_polytope(&simplex(1, 2)).unwrap();
        let quarter: BTreeMap<_, _> = [("a_2".to_string(), ratio(1, 4))].into();
        assert_eq!(line.substitute(&quarter).unwrap(), fubini_study_kernel(1, 2));
    }
}
