//! Named polytopes: standard simplices and the five dimension 2-4
//! Kähler-Einstein Fano candidates, plus products and homotheties of them.
//!
//! Grammar: `expr := factor ('*' factor)*`,
//! `factor := simplex(n,c) | square | alz2d | alz3d | alz4d_a | alz4d_b | alz4d_c
//!          | scale(expr,k) | (expr)`.

use crate::error::{Error, Result};
use crate::rational::int;

use super::{HalfSpace, Polytope};

/// `{x >= 0, x_1 + ... + x_n <= c}`
pub fn simplex(n: usize, c: u32) -> Polytope {
    let mut hs = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut normal = vec![0; n];
        normal[i] = -1;
        hs.push(HalfSpace::from_ints(&normal, int(0)).unwrap());
    }
    hs.push(HalfSpace::from_ints(&vec![1; n], int(c as i64)).unwrap());
    Polytope::new(n, hs).expect("simplex is a valid polytope")
}

pub fn unit_square() -> Polytope {
    simplex(1, 1).product(&simplex(1, 1)).unwrap()
}

fn from_rows(dim: usize, rows: &[(&[i64], i64)]) -> Polytope {
    let hs = rows
        .iter()
        .map(|(n, b)| HalfSpace::from_ints(n, int(*b)).unwrap())
        .collect();
    Polytope::new(dim, hs).expect("catalog polytope is valid")
}

fn alz2d() -> Polytope {
    // 0 <= x,y <= 2, -1 <= x - y <= 1
    from_rows(
        2,
        &[
            (&[-1, 0], 0),
            (&[0, -1], 0),
            (&[1, 0], 2),
            (&[0, 1], 2),
            (&[1, -1], 1),
            (&[-1, 1], 1),
        ],
    )
}

fn alz3d() -> Polytope {
    // x,y >= 0, 0 <= z <= 2, x + z <= 3, y - z <= 1
    from_rows(
        3,
        &[
            (&[-1, 0, 0], 0),
            (&[0, -1, 0], 0),
            (&[0, 0, -1], 0),
            (&[0, 0, 1], 2),
            (&[1, 0, 1], 3),
            (&[0, 1, -1], 1),
        ],
    )
}

fn alz4d_a() -> Polytope {
    // 0 <= x,y,z,w <= 2, -1 <= x + y - z - w <= 1
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for i in 0..4 {
        let mut lo = vec![0; 4];
        lo[i] = -1;
        let mut hi = vec![0; 4];
        hi[i] = 1;
        rows.push((lo, 0));
        rows.push((hi, 2));
    }
    rows.push((vec![1, 1, -1, -1], 1));
    rows.push((vec![-1, -1, 1, 1], 1));
    let rows: Vec<(&[i64], i64)> = rows.iter().map(|(n, b)| (n.as_slice(), *b)).collect();
    from_rows(4, &rows)
}

fn alz4d_b() -> Polytope {
    // x,y >= 0, 0 <= z,w <= 2, -1 <= z - w <= 1, x - z <= 1, y + z <= 3
    from_rows(
        4,
        &[
            (&[-1, 0, 0, 0], 0),
            (&[0, -1, 0, 0], 0),
            (&[0, 0, -1, 0], 0),
            (&[0, 0, 1, 0], 2),
            (&[0, 0, 0, -1], 0),
            (&[0, 0, 0, 1], 2),
            (&[0, 0, 1, -1], 1),
            (&[0, 0, -1, 1], 1),
            (&[1, 0, -1, 0], 1),
            (&[0, 1, 1, 0], 3),
        ],
    )
}

fn alz4d_c() -> Polytope {
    // x,y,z,w >= 0, x - z <= 1, y - w <= 1, z + w <= 3, x + y <= 1, z + w - x - y <= 1
    from_rows(
        4,
        &[
            (&[-1, 0, 0, 0], 0),
            (&[0, -1, 0, 0], 0),
            (&[0, 0, -1, 0], 0),
            (&[0, 0, 0, -1], 0),
            (&[1, 0, -1, 0], 1),
            (&[0, 1, 0, -1], 1),
            (&[0, 0, 1, 1], 3),
            (&[1, 1, 0, 0], 1),
            (&[-1, -1, 1, 1], 1),
        ],
    )
}

/// Looks up a named polytope (see the module docs for the grammar).
pub fn catalog_polytope(name: &str) -> Result<Polytope> {
    let mut parser = Parser {
        src: name,
        pos: 0,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != name.len() {
        return Err(Error::UnknownCatalogName(name.to_string()));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self) -> Error {
        Error::UnknownCatalogName(self.src.to_string())
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn number(&mut self) -> Result<u32> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let v = rest[..len].parse().map_err(|_| self.err())?;
        self.pos += len;
        Ok(v)
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn expr(&mut self) -> Result<Polytope> {
        let mut p = self.factor()?;
        while self.eat("*") {
            let q = self.factor()?;
            p = p.product(&q)?;
        }
        Ok(p)
    }

    fn factor(&mut self) -> Result<Polytope> {
        if self.eat("(") {
            let p = self.expr()?;
            self.expect(")")?;
            return Ok(p);
        }
        match self.ident() {
            "simplex" => {
                self.expect("(")?;
                let n = self.number()?;
                self.expect(",")?;
                let c = self.number()?;
                self.expect(")")?;
                if n == 0 || c == 0 {
                    return Err(self.err());
                }
                Ok(simplex(n as usize, c))
            }
            "scale" => {
                self.expect("(")?;
                let p = self.expr()?;
                self.expect(",")?;
                let k = self.number()?;
                self.expect(")")?;
                p.scale(k).map_err(|_| self.err())
            }
            "square" => Ok(unit_square()),
            "alz2d" => Ok(alz2d()),
            "alz3d" => Ok(alz3d()),
            "alz4d_a" => Ok(alz4d_a()),
            "alz4d_b" => Ok(alz4d_b()),
            "alz4d_c" => Ok(alz4d_c()),
            _ => Err(self.err()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_names() {
        assert_eq!(catalog_polytope("simplex(3,1)").unwrap().vertices().len(), 4);
        assert_eq!(
            catalog_polytope("simplex(1,1) * simplex(1,1)").unwrap(),
            unit_square()
        );
        assert_eq!(catalog_polytope("scale(simplex(2,1),2)").unwrap(), simplex(2, 2));
        assert_eq!(catalog_polytope("alz2d").unwrap().halfspaces().len(), 6);
        assert_eq!(catalog_polytope("(alz2d)*simplex(1,1)").unwrap().dim(), 3);
        for bad in ["nope", "simplex(2)", "alz2d*", "simplex(0,1)", "alz2dx"] {
            assert!(matches!(catalog_polytope(bad), Err(Error::UnknownCatalogName(_))), "{bad}");
        }
    }

    #[test]
    fn alz3d_halfspaces_match_transcription() {
        let p = catalog_polytope("alz3d").unwrap();
        let x = |v: [i64; 3]| v.iter().map(|&c| int(c)).collect::<Vec<_>>();
        assert!(p.contains(&x([3, 0, 0])));
        assert!(p.contains(&x([1, 3, 2])));
        assert!(!p.contains(&x([2, 0, 2])));
        assert!(!p.contains(&x([0, 2, 0])));
    }
}
