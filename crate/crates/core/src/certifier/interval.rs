//! Exact rational interval enclosures, coefficient bounds, and the box
//! subdivision used to exclude every real solution of a bounded system.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::io::rat;
use crate::poly::Poly;
use crate::rational;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn pow(&self, k: u32) -> Interval {
        if k == 0 {
            return Interval::point(Rational::one());
        }
        let a = num_traits::pow(self.lo.clone(), k as usize);
        let b = num_traits::pow(self.hi.clone(), k as usize);
        if k % 2 == 1 || !self.lo.is_negative() {
            Interval { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            Interval { lo: b, hi: a }
        } else {
            Interval {
                lo: Rational::zero(),
                hi: a.max(b),
            }
        }
    }
}

/// Enclosure of `p` over the box; unknowns absent from `bx` must not occur.
pub fn enclose(p: &Poly, bx: &BTreeMap<usize, Interval>) -> Option<Interval> {
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (m, c) in p.terms() {
        let mut acc = Interval::point(Rational::one());
        for i in 0..m.nvars() {
            let e = m.get(i);
            if e > 0 {
                acc = acc.mul(&bx.get(&i)?.pow(e));
            }
        }
        let (a, b) = (c * &acc.lo, c * &acc.hi);
        if c.is_negative() {
            lo += b;
            hi += a;
        } else {
            lo += a;
            hi += b;
        }
    }
    Some(Interval { lo, hi })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Source {
    Equation(usize),
    Constraint(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarBound {
    pub var: usize,
    #[serde(with = "rat")]
    pub lower: Rational,
    #[serde(with = "rat")]
    pub upper: Rational,
    pub source: Source,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum BoxTree {
    Leaf {
        witness: Source,
    },
    Split {
        var: usize,
        #[serde(with = "rat")]
        at: Rational,
        below: Box<BoxTree>,
        above: Box<BoxTree>,
    },
}

impl BoxTree {
    pub fn leaves(&self) -> usize {
        match self {
            BoxTree::Leaf { .. } => 1,
            BoxTree::Split { below, above, .. } => below.leaves() + above.leaves(),
        }
    }
}

fn nonneg_on_domain(q: &Poly, positive: &BTreeSet<usize>) -> bool {
    q.terms().iter().all(|(m, c)| {
        !c.is_negative() && (0..m.nvars()).all(|i| m.get(i) % 2 == 0 || positive.contains(&i))
    })
}

/// Splits `p` as `Q - c` with `Q` nonnegative on the domain, no constant
/// term, and `c > 0`.
fn as_bounded_form(p: &Poly, positive: &BTreeSet<usize>) -> Option<(Poly, Rational)> {
    let c = -p.constant_term();
    if !c.is_positive() {
        return None;
    }
    let q = p + &Poly::constant(p.nvars(), c.clone());
    nonneg_on_domain(&q, positive).then_some((q, c))
}

/// Forms that must equal or stay below a positive constant: `E` and `-E` for
/// an equation, `-P` for a constraint `P > 0`.
fn candidate_forms(
    source: Source,
    equations: &[Poly],
    constraints: &[Poly],
) -> Option<Vec<Poly>> {
    Some(match source {
        Source::Equation(i) => {
            let e = equations.get(i)?;
            vec![e.clone(), -e]
        }
        Source::Constraint(i) => {
            let c: &Poly = constraints.get(i)?;
            vec![-c]
        }
    })
}

/// Pure powers `q u^d` in `q` that bound `|u|` on the domain.
fn pure_powers(q: &Poly, var: usize, positive: &BTreeSet<usize>) -> Vec<(u32, Rational)> {
    q.terms()
        .iter()
        .filter_map(|(m, c)| {
            let d = m.get(var);
            let pure = d > 0 && m.degree() == d;
            let usable = positive.contains(&var) || d % 2 == 0;
            (pure && usable && c.is_positive()).then(|| (d, c.clone()))
        })
        .collect()
}

/// Whether `b` is a valid bound for `|var|` derived from `source`.
pub fn check_bound(
    var: usize,
    b: &Rational,
    source: Source,
    equations: &[Poly],
    constraints: &[Poly],
    positive: &BTreeSet<usize>,
) -> bool {
    if b.is_negative() {
        return false;
    }
    let Some(forms) = candidate_forms(source, equations, constraints) else {
        return false;
    };
    forms.iter().any(|p| {
        as_bounded_form(p, positive).is_some_and(|(q, c)| {
            pure_powers(&q, var, positive)
                .iter()
                .any(|(d, coeff)| coeff * num_traits::pow(b.clone(), *d as usize) >= c)
        })
    })
}

/// Small rational `b >= 0` with `q b^d >= c`.
fn root_bound(d: u32, q: &Rational, c: &Rational) -> Rational {
    let ok = |b: &Rational| q * num_traits::pow(b.clone(), d as usize) >= *c;
    let ratio = c / q;
    let guess = rational::to_f64(&ratio).powf(1.0 / d as f64) * (1.0 + 1e-9) + 1e-12;
    if let Some(b) = rational::reconstruct(guess, 1 << 20) {
        if !b.is_negative() && ok(&b) {
            return b;
        }
    }
    let one = Rational::one();
    if ratio > one {
        ratio
    } else {
        one
    }
}

/// Best bound on `|var|` over all sources, with the first source attaining it.
pub fn derive_bound(
    var: usize,
    equations: &[Poly],
    constraints: &[Poly],
    positive: &BTreeSet<usize>,
) -> Option<(Rational, Source)> {
    let sources = (0..equations.len())
        .map(Source::Equation)
        .chain((0..constraints.len()).map(Source::Constraint));
    let mut best: Option<(Rational, Source)> = None;
    for s in sources {
        let forms = candidate_forms(s, equations, constraints)?;
        for p in forms {
            let Some((q, c)) = as_bounded_form(&p, positive) else {
                continue;
            };
            for (d, coeff) in pure_powers(&q, var, positive) {
                let b = root_bound(d, &coeff, &c);
                if best.as_ref().is_none_or(|(cur, _)| b < *cur) {
                    best = Some((b, s));
                }
            }
        }
    }
    best
}

/// Whether `source` alone shows the box contains no solution.
pub fn excludes(
    source: Source,
    bx: &BTreeMap<usize, Interval>,
    equations: &[Poly],
    constraints: &[Poly],
) -> bool {
    match source {
        Source::Equation(i) => equations
            .get(i)
            .and_then(|e| enclose(e, bx))
            .is_some_and(|iv| iv.lo.is_positive() || iv.hi.is_negative()),
        Source::Constraint(i) => constraints
            .get(i)
            .and_then(|c| enclose(c, bx))
            .is_some_and(|iv| !iv.hi.is_positive()),
    }
}

pub enum SearchOutcome {
    Excluded(BoxTree),
    /// Boxes that could not be excluded, or the step budget ran out.
    Survivors { boxes: usize, reason: String },
}

pub struct Search<'a> {
    pub equations: &'a [Poly],
    pub constraints: &'a [Poly],
    pub min_width: Rational,
    pub max_boxes: usize,
    pub deadline: Option<std::time::Instant>,
}

impl Search<'_> {
    pub fn run(&self, root: BTreeMap<usize, Interval>) -> SearchOutcome {
        let mut visited = 0usize;
        match self.split(&root, &mut visited) {
            Ok(t) => SearchOutcome::Excluded(t),
            Err(reason) => SearchOutcome::Survivors {
                boxes: visited,
                reason,
            },
        }
    }

    fn witness(&self, bx: &BTreeMap<usize, Interval>) -> Option<Source> {
        (0..self.equations.len())
            .map(Source::Equation)
            .chain((0..self.constraints.len()).map(Source::Constraint))
            .find(|s| excludes(*s, bx, self.equations, self.constraints))
    }

    fn split(&self, bx: &BTreeMap<usize, Interval>, visited: &mut usize) -> Result<BoxTree, String> {
        *visited += 1;
        if *visited > self.max_boxes {
            return Err(format!("box budget of {} exhausted", self.max_boxes));
        }
        if self.deadline.is_some_and(|d| std::time::Instant::now() > d) {
            return Err("time budget exhausted".into());
        }
        if let Some(w) = self.witness(bx) {
            return Ok(BoxTree::Leaf { witness: w });
        }
        // widest coordinate, ties to the smallest index
        let (var, iv) = bx
            .iter()
            .fold(None::<(usize, &Interval)>, |best, (v, iv)| match best {
                Some((_, b)) if b.width() >= iv.width() => best,
                _ => Some((*v, iv)),
            })
            .ok_or_else(|| "no variables left to split".to_string())?;
        if iv.width() < self.min_width {
            return Err("box below minimum width survived".into());
        }
        let at = (&iv.lo + &iv.hi) / Rational::from_integer(2.into());
        let mut below = bx.clone();
        below.insert(var, Interval::new(iv.lo.clone(), at.clone()));
        let mut above = bx.clone();
        above.insert(var, Interval::new(at.clone(), iv.hi.clone()));
        let b = self.split(&below, visited)?;
        let a = self.split(&above, visited)?;
        Ok(BoxTree::Split {
            var,
            at,
            below: Box::new(b),
            above: Box::new(a),
        })
    }
}

/// Replays a subdivision tree over `bx`.
pub fn check_tree(
    tree: &BoxTree,
    bx: &BTreeMap<usize, Interval>,
    equations: &[Poly],
    constraints: &[Poly],
) -> bool {
    match tree {
        BoxTree::Leaf { witness } => excludes(*witness, bx, equations, constraints),
        BoxTree::Split {
            var,
            at,
            below,
            above,
        } => {
            let Some(iv) = bx.get(var) else {
                return false;
            };
            if !(iv.lo < *at && *at < iv.hi) {
                return false;
            }
            let mut lo_box = bx.clone();
            lo_box.insert(*var, Interval::new(iv.lo.clone(), at.clone()));
            let mut hi_box = bx.clone();
            hi_box.insert(*var, Interval::new(at.clone(), iv.hi.clone()));
            check_tree(below, &lo_box, equations, constraints)
                && check_tree(above, &hi_box, equations, constraints)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(int(a), int(b))
    }

    #[test]
    fn interval_powers() {
        assert_eq!(iv(-2, 3).pow(2), iv(0, 9));
        assert_eq!(iv(-2, 3).pow(3), iv(-8, 27));
        assert_eq!(iv(-3, -1).pow(2), iv(1, 9));
        assert_eq!(iv(1, 2).mul(&iv(-1, 3)), iv(-2, 6));
    }

    #[test]
    fn enclosure_contains_values() {
        // p = a^2 - 2ab + 3 on [0,1] x [1,2]
        let a = Poly::var(2, 0);
        let b = Poly::var(2, 1);
        let p = &(&a.pow(2) - &(&a * &b).scale(&int(2))) + &Poly::constant(2, int(3));
        let bx: BTreeMap<usize, Interval> = [(0, iv(0, 1)), (1, iv(1, 2))].into();
        let e = enclose(&p, &bx).unwrap();
        assert_eq!(e, iv(-1, 4));
        assert!(enclose(&p, &[(0, iv(0, 1))].into()).is_none());
    }

    #[test]
    fn bound_from_equation() {
        // 4u^2 + uv - 9 = 0 with u, v > 0 gives u <= 3/2
        let u = Poly::var(2, 0);
        let v = Poly::var(2, 1);
        let e = &(&u.pow(2).scale(&int(4)) + &(&u * &v)) - &Poly::constant(2, int(9));
        let pos: BTreeSet<usize> = [0, 1].into();
        let eqs = vec![e];
        let (b, s) = derive_bound(0, &eqs, &[], &pos).unwrap();
        assert_eq!(s, Source::Equation(0));
        assert!(b >= ratio(3, 2) && b < ratio(151, 100));
        assert!(check_bound(0, &b, s, &eqs, &[], &pos));
        assert!(!check_bound(0, &int(1), s, &eqs, &[], &pos));
        // v appears only in a mixed term
        assert!(derive_bound(1, &eqs, &[], &pos).is_none());
    }

    #[test]
    fn exclusion_search() {
        // u^2 - 2 = 0 and u = 3/2 has no common root: constraint 3/2 - u > 0 cuts it
        let u = Poly::var(1, 0);
        let eqs = vec![&u.pow(2) - &Poly::constant(1, int(2))];
        let cons = vec![u.clone(), &Poly::constant(1, ratio(13, 10)) - &u];
        let search = Search {
            equations: &eqs,
            constraints: &cons,
            min_width: ratio(1, 1000),
            max_boxes: 1000,
            deadline: None,
        };
        let root: BTreeMap<usize, Interval> = [(0, iv(0, 2))].into();
        match search.run(root.clone()) {
            SearchOutcome::Excluded(tree) => {
                assert!(check_tree(&tree, &root, &eqs, &cons));
                let bad = BoxTree::Leaf {
                    witness: Source::Equation(0),
                };
                assert!(!check_tree(&bad, &root, &eqs, &cons));
            }
            SearchOutcome::Survivors { reason, .. } => panic!("{reason}"),
        }
        // with the cut removed, sqrt(2) survives
        let cons = vec![u.clone()];
        let search = Search {
            equations: &eqs,
            constraints: &cons,
            min_width: ratio(1, 1000),
            max_boxes: 10_000,
            deadline: None,
        };
        assert!(matches!(search.run(root), SearchOutcome::Survivors { .. }));
    }
}
