//! Sparse polynomials in the matrix coordinates `x_{i,j}` and one extra
//! variable `a` standing for a multiple of the identity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::diagram::Coord;
use crate::linalg::Fp;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    /// Sorted by coordinate; exponents are positive.
    pub vars: Vec<(Coord, u32)>,
    pub a_exp: u32,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|&(_, e)| e).sum()
    }

    pub fn from_coords(coords: &[Coord], a_exp: u32) -> Monomial {
        let mut counts: BTreeMap<Coord, u32> = BTreeMap::new();
        for &c in coords {
            *counts.entry(c).or_default() += 1;
        }
        Monomial {
            vars: counts.into_iter().collect(),
            a_exp,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl SparsePoly {
    pub fn new() -> SparsePoly {
        SparsePoly::default()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigInt> {
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

    /// Terms with `a^k`, with `a` removed.
    pub fn a_coefficient(&self, k: u32) -> SparsePoly {
        let mut out = SparsePoly::new();
        for (m, c) in &self.terms {
            if m.a_exp == k {
                out.add_term(
                    Monomial {
                        vars: m.vars.clone(),
                        a_exp: 0,
                    },
                    c.clone(),
                );
            }
        }
        out
    }

    pub fn min_a_exp(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.a_exp).min()
    }

    /// The single term `±x` when the polynomial is one coordinate up to sign.
    pub fn as_signed_coordinate(&self) -> Option<(Coord, i8)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if m.a_exp != 0 || m.vars.len() != 1 || m.vars[0].1 != 1 {
            return None;
        }
        let sign = if c.is_one() {
            1
        } else if (-c).is_one() {
            -1
        } else {
            return None;
        };
        Some((m.vars[0].0, sign))
    }

    pub fn eval_mod_p(&self, f: Fp, x: impl Fn(Coord) -> u64, a: u64) -> u64 {
        let mut acc = 0;
        for (m, c) in &self.terms {
            let mut t = f.from_bigint(c);
            t = f.mul(t, f.pow(a, m.a_exp as u64));
            for &(v, e) in &m.vars {
                t = f.mul(t, f.pow(x(v), e as u64));
            }
            acc = f.add(acc, t);
        }
        acc
    }

    /// `[{coeff, vars: [[i, j, exp], ...], a_exp}, ...]` in term order.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    let coeff = match c.to_i64() {
                        Some(v) => serde_json::json!(v),
                        None => serde_json::json!(c.to_string()),
                    };
                    serde_json::json!({
                        "coeff": coeff,
                        "vars": m.vars.iter().map(|&((i, j), e)| [i as u64, j as u64, e as u64]).collect::<Vec<_>>(),
                        "a_exp": m.a_exp,
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if m.a_exp > 0 {
                factors.push(if m.a_exp == 1 {
                    "a".into()
                } else {
                    format!("a^{}", m.a_exp)
                });
            }
            for &((i, j), e) in &m.vars {
                factors.push(if e == 1 {
                    format!("x{i},{j}")
                } else {
                    format!("x{i},{j}^{e}")
                });
            }
            if factors.is_empty() || !mag.is_one() {
                factors.insert(0, mag.to_string());
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_and_display() {
        let mut p = SparsePoly::new();
        p.add_term(Monomial::from_coords(&[(1, 3), (2, 4)], 0), BigInt::from(1));
        p.add_term(
            Monomial::from_coords(&[(1, 4), (2, 3)], 0),
            BigInt::from(-1),
        );
        assert_eq!(p.to_string(), "x1,3*x2,4 - x1,4*x2,3");
        p.add_term(
            Monomial::from_coords(&[(2, 4), (1, 3)], 0),
            BigInt::from(-1),
        );
        assert_eq!(p.len(), 1);
        assert_eq!(p.to_string(), "-x1,4*x2,3");
        assert_eq!(p.as_signed_coordinate(), None);
    }

    #[test]
    fn a_extraction() {
        let mut p = SparsePoly::new();
        p.add_term(Monomial::from_coords(&[(1, 2)], 2), BigInt::from(-1));
        p.add_term(Monomial::from_coords(&[(1, 3), (1, 3)], 0), BigInt::from(4));
        assert_eq!(p.min_a_exp(), Some(0));
        let lead = p.a_coefficient(2);
        assert_eq!(lead.as_signed_coordinate(), Some(((1, 2), -1)));
        let json = p.to_json();
        assert_eq!(json[1]["vars"][0], serde_json::json!([1, 3, 2]));
        let f = Fp::default_prime();
        assert_eq!(p.eval_mod_p(f, |_| 2, 3), f.from_i64(-18 + 16));
    }
}
