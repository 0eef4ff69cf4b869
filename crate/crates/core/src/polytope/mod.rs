//! Exact H-representation polytopes: vertex enumeration, the Delzant
//! (smoothness) check, lattice points, and normalization to the origin.

mod catalog;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::Rational;

pub use catalog::{catalog_polytope, simplex, unit_square};

/// `{x : normal . x <= offset}` with a primitive integer normal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfSpace {
    normal: Vec<BigInt>,
    offset: Rational,
}

impl HalfSpace {
    /// Builds a half-space from an arbitrary rational normal, rescaling so the
    /// normal is primitive.
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Result<Self> {
        if normal.iter().all(|c| c.is_zero()) {
            return Err(Error::Invalid("half-space normal must be nonzero".into()));
        }
        let l = normal
            .iter()
            .chain(std::iter::once(&offset))
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = normal.iter().map(|x| (x * &l).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let scale = Rational::new(l, g.clone());
        Ok(HalfSpace {
            normal: ints.into_iter().map(|x| x / &g).collect(),
            offset: offset * scale,
        })
    }

    pub fn from_ints(normal: &[i64], offset: Rational) -> Result<Self> {
        Self::new(
            normal.iter().map(|&v| Rational::from_integer(v.into())).collect(),
            offset,
        )
    }

    pub fn normal(&self) -> &[BigInt] {
        &self.normal
    }

    pub fn offset(&self) -> &Rational {
        &self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    fn normal_rational(&self) -> Vec<Rational> {
        self.normal
            .iter()
            .map(|x| Rational::from_integer(x.clone()))
            .collect()
    }

    /// `normal . x`
    pub fn apply(&self, x: &[Rational]) -> Rational {
        self.normal
            .iter()
            .zip(x)
            .map(|(a, b)| b * Rational::from_integer(a.clone()))
            .sum()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.apply(x) <= self.offset
    }

    pub fn is_tight(&self, x: &[Rational]) -> bool {
        self.apply(x) == self.offset
    }
}

impl fmt::Display for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n: Vec<String> = self.normal.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}].x <= {}", n.join(", "), crate::rational::format(&self.offset))
    }
}

/// A bounded, full-dimensional polytope with its exact vertex set.
///
/// The half-spaces are stored deduplicated and sorted, so two polytopes
/// compare equal exactly when their facet lists agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<Vec<Rational>>,
}

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        for h in &halfspaces {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.dim(),
                });
            }
        }
        let halfspaces: Vec<HalfSpace> = halfspaces
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let vertices = enumerate_vertices(dim, &halfspaces)?;
        Ok(Polytope {
            dim,
            halfspaces,
            vertices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x))
    }

    pub fn active(&self, x: &[Rational]) -> Vec<usize> {
        (0..self.halfspaces.len())
            .filter(|&i| self.halfspaces[i].is_tight(x))
            .collect()
    }

    pub fn is_vertex(&self, x: &[Rational]) -> bool {
        self.vertices.iter().any(|v| v.as_slice() == x)
    }

    /// Lattice points, sorted lexicographically. Requires the polytope to
    /// sit in the nonnegative orthant.
    pub fn lattice_points(&self) -> Result<Vec<Vec<u32>>> {
        if self
            .vertices
            .iter()
            .any(|v| v.iter().any(|c| c.is_negative()))
        {
            return Err(Error::NotNormalized);
        }
        let hi: Vec<u32> = (0..self.dim)
            .map(|i| {
                self.vertices
                    .iter()
                    .map(|v| crate::rational::floor(&v[i]))
                    .max()
                    .and_then(|m| m.to_u32())
                    .unwrap_or(0)
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.dim];
        loop {
            let pt: Vec<Rational> = cur.iter().map(|&c| Rational::from_integer(c.into())).collect();
            if self.contains(&pt) {
                out.push(cur.clone());
            }
            // odometer with the last coordinate fastest gives lex order
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    for c in cur.iter_mut().skip(i + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }

    /// Smoothness check at every vertex.
    pub fn is_delzant(&self) -> (bool, DelzantWitness) {
        let mut cones = Vec::new();
        for v in &self.vertices {
            match self.vertex_cone(v) {
                Ok(cone) => cones.push(cone),
                Err(failure) => return (false, DelzantWitness::Failure(failure)),
            }
        }
        (true, DelzantWitness::Smooth(cones))
    }

    fn vertex_cone(&self, v: &[Rational]) -> std::result::Result<VertexCone, VertexFailure> {
        let active = self.active(v);
        let fail = |reason: FailureReason, edges: Vec<Vec<BigInt>>, det: Option<BigInt>| VertexFailure {
            vertex: v.to_vec(),
            reason,
            edges,
            determinant: det,
        };
        if !linalg::is_integral(v) {
            return Err(fail(FailureReason::NonIntegralVertex, vec![], None));
        }
        if active.len() != self.dim {
            return Err(fail(
                FailureReason::NotSimple {
                    facets: active.len(),
                },
                vec![],
                None,
            ));
        }
        let edges = self.edge_directions(&active);
        let det = edge_determinant(&edges);
        if !det.abs().is_one() {
            return Err(fail(FailureReason::NotUnimodular, edges, Some(det)));
        }
        Ok(VertexCone {
            vertex: v.to_vec(),
            facets: active,
            edges,
            determinant: det,
        })
    }

    /// Primitive edge directions at a simple vertex with the given active
    /// facets; edge `j` leaves facet `j` and stays on the others.
    fn edge_directions(&self, active: &[usize]) -> Vec<Vec<BigInt>> {
        let nf: Matrix = active
            .iter()
            .map(|&i| self.halfspaces[i].normal_rational())
            .collect();
        let inv = linalg::inverse(&nf).expect("simple vertex has independent facets");
        (0..self.dim)
            .map(|j| {
                let col: Vec<Rational> = inv.iter().map(|row| -row[j].clone()).collect();
                linalg::primitive_direction(&col)
            })
            .collect()
    }

    /// Moves `vertex` to the origin with its edges on the coordinate axes.
    pub fn normalize_to_origin(&self, vertex: &[Rational]) -> Result<(Polytope, UnimodularMap)> {
        if !self.is_vertex(vertex) {
            return Err(Error::NotAVertex(vertex.to_vec()));
        }
        let (ok, witness) = self.is_delzant();
        if !ok {
            return Err(Error::NotDelzant(witness.to_string()));
        }
        let cone = self.vertex_cone(vertex).expect("Delzant vertex");
        // E has the edge directions as columns; the map is y = E^{-1}(x - v)
        let e: Vec<Vec<BigInt>> = (0..self.dim)
            .map(|i| cone.edges.iter().map(|col| col[i].clone()).collect())
            .collect();
        let e_rat = linalg::to_rational_matrix(&e);
        let a = linalg::inverse(&e_rat).expect("unimodular");
        let a_int: Vec<Vec<BigInt>> = a
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| {
                let n = h.normal_rational();
                let new_normal: Vec<Rational> =
                    (0..self.dim).map(|j| (0..self.dim).map(|i| &n[i] * &e_rat[i][j]).sum()).collect();
                HalfSpace::new(new_normal, &h.offset - h.apply(vertex))
            })
            .collect::<Result<Vec<_>>>()?;
        let image = Polytope::new(self.dim, halfspaces)?;
        Ok((
            image,
            UnimodularMap {
                matrix: a_int,
                translation: vertex.to_vec(),
            },
        ))
    }

    /// Normalizes at the lexicographically smallest vertex unless the polytope
    /// already has its origin vertex on the coordinate axes.
    pub fn normalized(&self) -> Result<(Polytope, UnimodularMap)> {
        let origin = vec![Rational::zero(); self.dim];
        if self.is_vertex(&origin) {
            if let Ok(cone) = self.vertex_cone(&origin) {
                let axes: BTreeSet<Vec<BigInt>> = UnimodularMap::identity(self.dim).matrix.into_iter().collect();
                if cone.edges.iter().cloned().collect::<BTreeSet<_>>() == axes {
                    return Ok((self.clone(), UnimodularMap::identity(self.dim)));
                }
            }
        }
        self.normalize_to_origin(&self.vertices[0].clone())
    }

    pub fn product(&self, other: &Polytope) -> Result<Polytope> {
        let n = self.dim + other.dim;
        let mut hs = Vec::new();
        for h in &self.halfspaces {
            let mut normal = h.normal_rational();
            normal.resize(n, Rational::zero());
            hs.push(HalfSpace::new(normal, h.offset.clone())?);
        }
        for h in &other.halfspaces {
            let mut normal = vec![Rational::zero(); self.dim];
            normal.extend(h.normal_rational());
            hs.push(HalfSpace::new(normal, h.offset.clone())?);
        }
        let p = Polytope::new(n, hs)?;
        debug_assert!(
            !(self.is_delzant().0 && other.is_delzant().0) || p.is_delzant().0,
            "product of Delzant polytopes must be Delzant"
        );
        Ok(p)
    }

    pub fn scale(&self, k: u32) -> Result<Polytope> {
        if k == 0 {
            return Err(Error::Invalid("scale factor must be positive".into()));
        }
        let k = Rational::from_integer(k.into());
        let hs = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace {
                normal: h.normal.clone(),
                offset: &h.offset * &k,
            })
            .collect();
        let p = Polytope::new(self.dim, hs)?;
        debug_assert!(!self.is_delzant().0 || p.is_delzant().0);
        Ok(p)
    }

    /// Every `k >= 2` for which `self / k` still has integer vertices.
    pub fn lattice_divisors(&self) -> Vec<u32> {
        let g = self
            .vertices
            .iter()
            .flatten()
            .fold(BigInt::zero(), |acc, x| acc.gcd(&x.to_integer()));
        let g = g.to_u32().unwrap_or(0);
        (2..=g).filter(|d| g % d == 0).collect()
    }

    /// Shrinks by an integer factor; the caller guarantees divisibility.
    pub fn shrink(&self, k: u32) -> Result<Polytope> {
        let k = Rational::from_integer(k.into());
        let hs = self
            .halfspaces
            .iter()
            .map(|h| HalfSpace {
                normal: h.normal.clone(),
                offset: &h.offset / &k,
            })
            .collect();
        Polytope::new(self.dim, hs)
    }
}

impl fmt::Display for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dim {} with {} facets", self.dim, self.halfspaces.len())?;
        for h in &self.halfspaces {
            writeln!(f, "  {h}")?;
        }
        Ok(())
    }
}

fn edge_determinant(edges: &[Vec<BigInt>]) -> BigInt {
    let n = edges.len();
    let m: Matrix = (0..n)
        .map(|i| edges.iter().map(|c| Rational::from_integer(c[i].clone())).collect())
        .collect();
    linalg::det(&m).to_integer()
}

/// `y = matrix . (x - translation)` with `|det matrix| = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularMap {
    pub matrix: Vec<Vec<BigInt>>,
    pub translation: Vec<Rational>,
}

impl UnimodularMap {
    pub fn identity(n: usize) -> Self {
        UnimodularMap {
            matrix: (0..n)
                .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
                .collect(),
            translation: vec![Rational::zero(); n],
        }
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let shifted: Vec<Rational> = x.iter().zip(&self.translation).map(|(a, b)| a - b).collect();
        linalg::mat_vec(&linalg::to_rational_matrix(&self.matrix), &shifted)
    }

    pub fn determinant(&self) -> BigInt {
        linalg::det(&linalg::to_rational_matrix(&self.matrix)).to_integer()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCone {
    pub vertex: Vec<Rational>,
    pub facets: Vec<usize>,
    /// Primitive edge directions (the columns of the edge matrix).
    pub edges: Vec<Vec<BigInt>>,
    pub determinant: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureReason {
    NonIntegralVertex,
    NotSimple { facets: usize },
    NotUnimodular,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexFailure {
    pub vertex: Vec<Rational>,
    pub reason: FailureReason,
    pub edges: Vec<Vec<BigInt>>,
    pub determinant: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DelzantWitness {
    /// Edge cones at every vertex, each unimodular.
    Smooth(Vec<VertexCone>),
    Failure(VertexFailure),
}

impl fmt::Display for DelzantWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pt = |v: &[Rational]| -> String {
            let s: Vec<String> = v.iter().map(crate::rational::format).collect();
            format!("({})", s.join(", "))
        };
        match self {
            DelzantWitness::Smooth(cones) => write!(f, "smooth at all {} vertices", cones.len()),
            DelzantWitness::Failure(v) => match &v.reason {
                FailureReason::NonIntegralVertex => write!(f, "vertex {} is not integral", pt(&v.vertex)),
                FailureReason::NotSimple { facets } => {
                    write!(f, "vertex {} lies on {facets} facets", pt(&v.vertex))
                }
                FailureReason::NotUnimodular => write!(
                    f,
                    "edge matrix at vertex {} has determinant {}",
                    pt(&v.vertex),
                    v.determinant.clone().unwrap_or_default()
                ),
            },
        }
    }
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Exhaustive vertex enumeration by solving every n-subset of facet equalities.
fn enumerate_vertices(dim: usize, hs: &[HalfSpace]) -> Result<Vec<Vec<Rational>>> {
    let normals: Matrix = hs.iter().map(|h| h.normal_rational()).collect();
    if hs.len() < dim || linalg::rank(&normals) < dim {
        return Err(Error::UnboundedPolytope);
    }
    if has_recession_direction(dim, &normals) {
        return Err(Error::UnboundedPolytope);
    }
    let mut found = BTreeSet::new();
    for subset in combinations(hs.len(), dim) {
        let a: Matrix = subset.iter().map(|&i| normals[i].clone()).collect();
        let b: Vec<Rational> = subset.iter().map(|&i| hs[i].offset.clone()).collect();
        if let Some(x) = linalg::solve(&a, &b) {
            if hs.iter().all(|h| h.contains(&x)) {
                found.insert(x);
            }
        }
    }
    let vertices: Vec<Vec<Rational>> = found.into_iter().collect();
    if vertices.is_empty() {
        return Err(Error::DegeneratePolytope);
    }
    let diffs: Matrix = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    if diffs.is_empty() || linalg::rank(&diffs) < dim {
        return Err(Error::DegeneratePolytope);
    }
    Ok(vertices)
}

/// True if some nonzero `d` has `N d <= 0`. With rank(N) = n the recession
/// cone is pointed, so it is nonzero iff it has an extreme ray, and every
/// extreme ray is cut out by n-1 independent rows.
fn has_recession_direction(dim: usize, normals: &Matrix) -> bool {
    for subset in combinations(normals.len(), dim - 1) {
        let rows: Matrix = subset.iter().map(|&i| normals[i].clone()).collect();
        let Some(d) = null_direction(dim, &rows) else {
            continue;
        };
        for sign in [1, -1] {
            let s = Rational::from_integer(sign.into());
            let dd: Vec<Rational> = d.iter().map(|x| x * &s).collect();
            if normals.iter().all(|n| !linalg::dot(n, &dd).is_positive()) {
                return true;
            }
        }
    }
    false
}

/// Generalized cross product of n-1 rows; `None` if they are dependent.
fn null_direction(dim: usize, rows: &Matrix) -> Option<Vec<Rational>> {
    if dim == 1 {
        return Some(vec![Rational::one()]);
    }
    let d: Vec<Rational> = (0..dim)
        .map(|j| {
            let minor: Matrix = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let m = linalg::det(&minor);
            if j % 2 == 0 {
                m
            } else {
                -m
            }
        })
        .collect();
    (!d.iter().all(|x| x.is_zero())).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    fn hexagon() -> Polytope {
        catalog_polytope("alz2d").unwrap()
    }

    #[test]
    fn square_vertices() {
        let sq = unit_square();
        assert_eq!(
            sq.vertices(),
            &[pt(&[0, 0]), pt(&[0, 1]), pt(&[1, 0]), pt(&[1, 1])]
        );
    }

    #[test]
    fn hexagon_vertices_match_pairwise_intersection() {
        // every pair of facet lines, kept when feasible
        let h = hexagon();
        let hs = h.halfspaces();
        let mut brute = BTreeSet::new();
        for i in 0..hs.len() {
            for j in i + 1..hs.len() {
                let a = vec![hs[i].normal_rational(), hs[j].normal_rational()];
                if let Some(x) = linalg::solve(&a, &[hs[i].offset.clone(), hs[j].offset.clone()]) {
                    if hs.iter().all(|h| h.contains(&x)) {
                        brute.insert(x);
                    }
                }
            }
        }
        let expected: BTreeSet<_> = [[0, 0], [1, 0], [2, 1], [2, 2], [1, 2], [0, 1]]
            .iter()
            .map(|v| pt(v))
            .collect();
        assert_eq!(brute, expected);
        assert_eq!(h.vertices().iter().cloned().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn unbounded_and_degenerate() {
        let half = vec![HalfSpace::from_ints(&[-1], int(0)).unwrap()];
        assert_eq!(Polytope::new(1, half).unwrap_err(), Error::UnboundedPolytope);
        let quadrant = vec![
            HalfSpace::from_ints(&[-1, 0], int(0)).unwrap(),
            HalfSpace::from_ints(&[0, -1], int(0)).unwrap(),
        ];
        assert_eq!(Polytope::new(2, quadrant).unwrap_err(), Error::UnboundedPolytope);
        let segment = vec![
            HalfSpace::from_ints(&[-1, 0], int(0)).unwrap(),
            HalfSpace::from_ints(&[1, 0], int(1)).unwrap(),
            HalfSpace::from_ints(&[0, -1], int(0)).unwrap(),
            HalfSpace::from_ints(&[0, 1], int(0)).unwrap(),
        ];
        assert_eq!(Polytope::new(2, segment).unwrap_err(), Error::DegeneratePolytope);
        let empty = vec![
            HalfSpace::from_ints(&[-1], int(0)).unwrap(),
            HalfSpace::from_ints(&[1], int(-1)).unwrap(),
        ];
        assert_eq!(Polytope::new(1, empty).unwrap_err(), Error::DegeneratePolytope);
    }

    #[test]
    fn normal_is_made_primitive() {
        let h = HalfSpace::from_ints(&[2, 4], int(6)).unwrap();
        assert_eq!(h.normal(), &[BigInt::from(1), BigInt::from(2)]);
        assert_eq!(h.offset(), &int(3));
    }

    #[test]
    fn thin_simplex_is_not_delzant() {
        let p = Polytope::new(
            2,
            vec![
                HalfSpace::from_ints(&[-1, 0], int(0)).unwrap(),
                HalfSpace::from_ints(&[0, -1], int(0)).unwrap(),
                HalfSpace::from_ints(&[1, 2], int(2)).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(p.vertices(), &[pt(&[0, 0]), pt(&[0, 1]), pt(&[2, 0])]);
        let (ok, w) = p.is_delzant();
        assert!(!ok);
        match w {
            DelzantWitness::Failure(f) => {
                assert_eq!(f.vertex, pt(&[0, 1]));
                assert_eq!(f.reason, FailureReason::NotUnimodular);
                assert_eq!(f.determinant.unwrap().abs(), BigInt::from(2));
            }
            _ => panic!("expected failure"),
        }
    }

    #[test]
    fn non_simple_vertex_rejected() {
        // x + y <= 2 is tight only at (1,1), which then lies on three facets
        let mut hs = unit_square().halfspaces().to_vec();
        hs.push(HalfSpace::from_ints(&[1, 1], int(2)).unwrap());
        let p = Polytope::new(2, hs).unwrap();
        let (ok, w) = p.is_delzant();
        assert!(!ok);
        match w {
            DelzantWitness::Failure(f) => {
                assert_eq!(f.vertex, pt(&[1, 1]));
                assert_eq!(f.reason, FailureReason::NotSimple { facets: 3 });
            }
            _ => panic!("expected failure"),
        }
    }

    #[test]
    fn lattice_points_brute_force() {
        let h = hexagon();
        let pts = h.lattice_points().unwrap();
        assert_eq!(
            pts,
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]
        );
        assert_eq!(simplex(2, 2).lattice_points().unwrap().len(), 6);
        assert_eq!(unit_square().lattice_points().unwrap().len(), 4);
        let shifted = Polytope::new(
            1,
            vec![
                HalfSpace::from_ints(&[-1], int(1)).unwrap(),
                HalfSpace::from_ints(&[1], int(1)).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(shifted.lattice_points().unwrap_err(), Error::NotNormalized);
    }

    #[test]
    fn normalize_hexagon_at_far_vertex() {
        let h = hexagon();
        let (img, map) = h.normalize_to_origin(&pt(&[2, 2])).unwrap();
        assert!(map.determinant().abs().is_one());
        assert!(img.is_vertex(&pt(&[0, 0])));
        assert_eq!(img.vertices().len(), 6);
        assert_eq!(img.lattice_points().unwrap().len(), 7);
        assert!(img.is_delzant().0);
        for v in h.vertices() {
            assert!(img.is_vertex(&map.apply(v)));
        }
        assert!(img.lattice_points().unwrap().contains(&vec![1, 0]));
        assert!(img.lattice_points().unwrap().contains(&vec![0, 1]));
    }

    #[test]
    fn normalize_errors_and_identity() {
        let s = simplex(2, 1);
        let (img, map) = s.normalize_to_origin(&pt(&[0, 0])).unwrap();
        assert_eq!(map, UnimodularMap::identity(2));
        assert_eq!(img, s);
        assert!(matches!(s.normalize_to_origin(&pt(&[1, 1])), Err(Error::NotAVertex(_))));
        let sq = unit_square();
        let (img, map) = sq.normalize_to_origin(&pt(&[1, 1])).unwrap();
        assert_eq!(img, sq);
        assert!(map.determinant().abs().is_one());
    }

    #[test]
    fn product_and_scale() {
        let seg = simplex(1, 1);
        assert_eq!(seg.product(&seg).unwrap(), unit_square());
        assert_eq!(simplex(2, 1).scale(2).unwrap(), simplex(2, 2));
        let h3 = hexagon().scale(3).unwrap();
        let expected: BTreeSet<_> = hexagon()
            .vertices()
            .iter()
            .map(|v| v.iter().map(|x| x * int(3)).collect::<Vec<_>>())
            .collect();
        assert_eq!(h3.vertices().iter().cloned().collect::<BTreeSet<_>>(), expected);
        assert_eq!(h3.lattice_divisors(), vec![3]);
        assert_eq!(h3.shrink(3).unwrap(), hexagon());
    }
}
