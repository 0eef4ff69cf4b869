//! JSON formats. Rationals are always written as `"p/q"` strings so that
//! persisted artifacts stay exact.

use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::poly::{Monomial, Poly};
use crate::polytope::{HalfSpace, Polytope};
use crate::rational::{self, Rational};

pub mod rat {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        rational::parse(&s).map_err(D::Error::custom)
    }
}

pub mod rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(rational::format).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter()
            .map(|s| rational::parse(s).map_err(D::Error::custom))
            .collect()
    }
}

pub mod rat_map {
    use super::*;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let strs: BTreeMap<&String, String> = m.iter().map(|(k, v)| (k, rational::format(v))).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BTreeMap<String, Rational>, D::Error> {
        let strs = BTreeMap::<String, String>::deserialize(d)?;
        strs.into_iter()
            .map(|(k, v)| rational::parse(&v).map(|r| (k, r)).map_err(D::Error::custom))
            .collect()
    }
}

pub mod rat_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        r.as_ref().map(rational::format).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| rational::parse(&s).map_err(D::Error::custom))
            .transpose()
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTerm {
    m: Vec<u32>,
    #[serde(with = "rat")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<PolyTerm>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            nvars: self.nvars(),
            terms: self
                .terms()
                .iter()
                .map(|(m, c)| PolyTerm {
                    m: m.to_u32(),
                    c: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        if repr.terms.iter().any(|t| t.m.len() != repr.nvars) {
            return Err(D::Error::custom("monomial arity does not match nvars"));
        }
        Ok(Poly::from_terms(
            repr.nvars,
            repr.terms
                .into_iter()
                .map(|t| (Monomial::from_exponents(t.m), t.c)),
        ))
    }
}

#[derive(Serialize, Deserialize)]
struct HalfSpaceRepr {
    normal: Vec<String>,
    #[serde(with = "rat")]
    offset: Rational,
}

/// Polytope JSON: `{"dim": n, "halfspaces": [{"normal": [..], "offset": "p/q"}]}`,
/// each halfspace meaning `normal . x <= offset`.
#[derive(Serialize, Deserialize)]
struct PolytopeRepr {
    dim: usize,
    halfspaces: Vec<HalfSpaceRepr>,
}

pub fn polytope_to_json(p: &Polytope) -> serde_json::Value {
    let repr = PolytopeRepr {
        dim: p.dim(),
        halfspaces: p
            .halfspaces()
            .iter()
            .map(|h| HalfSpaceRepr {
                normal: h.normal().iter().map(|v| v.to_string()).collect(),
                offset: h.offset().clone(),
            })
            .collect(),
    };
    serde_json::to_value(repr).expect("polytope serializes")
}

pub fn polytope_from_json(v: &serde_json::Value) -> Result<Polytope> {
    let repr: PolytopeRepr =
        serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("polytope JSON: {e}")))?;
    let mut hs = Vec::with_capacity(repr.halfspaces.len());
    for h in repr.halfspaces {
        let normal = h
            .normal
            .iter()
            .map(|s| rational::parse(s))
            .collect::<Result<Vec<_>>>()?;
        if normal.len() != repr.dim {
            return Err(Error::DimensionMismatch {
                expected: repr.dim,
                got: normal.len(),
            });
        }
        hs.push(HalfSpace::new(normal, h.offset)?);
    }
    Polytope::new(repr.dim, hs)
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Number(String),
    Symbolic { poly: Poly },
}

#[derive(Serialize, Deserialize)]
struct KernelTerm {
    m: Vec<u32>,
    coeff: CoeffRepr,
}

/// Kernel JSON: `{"n": n, "unknowns": [..], "terms": [{"m": [..], "coeff": "p/q" | {"poly": ..}}]}`.
/// `unknowns` may be omitted for numeric kernels.
#[derive(Serialize, Deserialize)]
struct KernelRepr {
    n: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    unknowns: Vec<String>,
    terms: Vec<KernelTerm>,
}

pub fn kernel_to_json(k: &Kernel) -> serde_json::Value {
    let terms = k
        .terms()
        .iter()
        .map(|(m, c)| KernelTerm {
            m: m.clone(),
            coeff: match c.as_constant() {
                Some(v) if k.unknowns().is_empty() => CoeffRepr::Number(rational::format(&v)),
                _ => CoeffRepr::Symbolic { poly: c.clone() },
            },
        })
        .collect();
    serde_json::to_value(KernelRepr {
        n: k.n(),
        unknowns: k.unknowns().to_vec(),
        terms,
    })
    .expect("kernel serializes")
}

pub fn kernel_from_json(v: &serde_json::Value) -> Result<Kernel> {
    let repr: KernelRepr =
        serde_json::from_value(v.clone()).map_err(|e| Error::Invalid(format!("kernel JSON: {e}")))?;
    let k = repr.unknowns.len();
    let mut terms = Vec::with_capacity(repr.terms.len());
    for t in repr.terms {
        let c = match t.coeff {
            CoeffRepr::Number(s) => Poly::constant(k, rational::parse(&s)?),
            CoeffRepr::Symbolic { poly } => poly,
        };
        terms.push((t.m, c));
    }
    Kernel::new(repr.n, repr.unknowns, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{fubini_study_kernel, kernel_from_polytope};
    use crate::polytope::catalog_polytope;
    use crate::rational::ratio;

    #[test]
    fn poly_round_trip() {
        let p = &Poly::var(2, 0).scale(&ratio(-3, 4)) + &Poly::one(2);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Poly>(&s).unwrap(), p);
        let z = Poly::zero(3);
        assert_eq!(serde_json::from_str::<Poly>(&serde_json::to_string(&z).unwrap()).unwrap(), z);
    }

    #[test]
    fn polytope_round_trip() {
        for name in ["alz2d", "alz3d", "simplex(3,2)", "square*simplex(1,1)"] {
            let p = catalog_polytope(name).unwrap();
            assert_eq!(polytope_from_json(&polytope_to_json(&p)).unwrap(), p);
        }
    }

    #[test]
    fn kernel_round_trip() {
        let numeric = fubini_study_kernel(2, 2);
        let v = kernel_to_json(&numeric);
        assert_eq!(v["terms"][1]["coeff"], serde_json::json!("1"));
        assert_eq!(kernel_from_json(&v).unwrap(), numeric);
        let sym = kernel_from_polytope(&catalog_polytope("alz2d").unwrap()).unwrap();
        assert_eq!(kernel_from_json(&kernel_to_json(&sym)).unwrap(), sym);
    }

    #[test]
    fn kernel_from_plain_json() {
        let v = serde_json::json!({"n": 1, "terms": [{"m": [0], "coeff": "1"}, {"m": [1], "coeff": "1/2"}]});
        let k = kernel_from_json(&v).unwrap();
        assert_eq!(k.coefficient(&[1]).as_constant(), Some(ratio(1, 2)));
        assert!(kernel_from_json(&serde_json::json!({"n": 1})).is_err());
    }
}
