use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite Abelian group presented as `Z_{q_1} x ... x Z_{q_k}`.
///
/// Factor order is significant: `Z2xZ3` and `Z3xZ2` are different specs, and
/// neither is identified with `Z6`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Vec<u32>,
    order: u64,
}

/// An element of a [`GroupSpec`] as a vector of reduced residues, one per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElem(pub Vec<u32>);

impl GroupSpec {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        let text = factors
            .iter()
            .map(|q| format!("Z{q}"))
            .collect::<Vec<_>>()
            .join("x");
        if factors.is_empty() {
            return Err(Error::GroupSyntax {
                input: text,
                reason: "empty spec".into(),
            });
        }
        let mut order: u64 = 1;
        for &q in &factors {
            if q < 2 {
                return Err(Error::GroupSyntax {
                    input: text,
                    reason: format!("factor Z{q} is trivial; every factor must be at least 2"),
                });
            }
            order = order.checked_mul(q as u64).ok_or_else(|| Error::GroupSyntax {
                input: text.clone(),
                reason: "group order overflows".into(),
            })?;
        }
        Ok(GroupSpec { factors, order })
    }

    pub fn cyclic(q: u32) -> Result<Self> {
        Self::new(vec![q])
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn zero(&self) -> GroupElem {
        GroupElem(vec![0; self.factors.len()])
    }

    pub fn contains(&self, a: &GroupElem) -> bool {
        a.0.len() == self.factors.len() && a.0.iter().zip(&self.factors).all(|(r, q)| r < q)
    }

    fn check(&self, a: &GroupElem) -> Result<()> {
        if self.contains(a) {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!(
                "element {:?} does not belong to {self}",
                a.0
            )))
        }
    }

    pub fn add(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(GroupElem(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), q)| (x + y) % q)
                .collect(),
        ))
    }

    pub fn neg(&self, a: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        Ok(GroupElem(
            a.0.iter()
                .zip(&self.factors)
                .map(|(x, q)| (q - x) % q)
                .collect(),
        ))
    }

    /// Mixed-radix index of `a`, first factor most significant. Index order
    /// coincides with lexicographic order on residue vectors.
    pub fn index_of(&self, a: &GroupElem) -> Result<usize> {
        self.check(a)?;
        Ok(a.0
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (r, q)| acc * *q as usize + *r as usize))
    }

    pub fn elem_at(&self, mut index: usize) -> Result<GroupElem> {
        if index as u64 >= self.order {
            return Err(Error::invalid(format!(
                "element index {index} out of range for {self}"
            )));
        }
        let mut residues = vec![0; self.factors.len()];
        for (slot, q) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = (index % *q as usize) as u32;
            index /= *q as usize;
        }
        Ok(GroupElem(residues))
    }

    /// Least prime dividing the group order.
    pub fn smallest_prime_divisor(&self) -> u64 {
        smallest_prime_divisor(self.order)
    }
}

pub(crate) fn smallest_prime_divisor(n: u64) -> u64 {
    debug_assert!(n >= 2);
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

pub(crate) fn is_prime(n: u64) -> bool {
    n >= 2 && smallest_prime_divisor(n) == n
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "Z{q}")?;
        }
        Ok(())
    }
}

/// Grammar: `Group := "Z" int ("x" "Z" int)*`.
impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let syntax = |reason: &str| Error::GroupSyntax {
            input: text.to_string(),
            reason: reason.to_string(),
        };
        if text.is_empty() {
            return Err(syntax("empty spec"));
        }
        let mut factors = Vec::new();
        for part in text.split('x') {
            let digits = part
                .strip_prefix('Z')
                .ok_or_else(|| syntax("each factor must have the form Z<int>"))?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(syntax("factor order must be a decimal integer"));
            }
            let q: u32 = digits
                .parse()
                .map_err(|_| syntax("factor order out of range"))?;
            factors.push(q);
        }
        GroupSpec::new(factors).map_err(|e| match e {
            Error::GroupSyntax { reason, .. } => syntax(&reason),
            other => other,
        })
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        let z2 = "Z2".parse::<GroupSpec>().unwrap();
        assert_eq!(z2.factors(), &[2]);
        assert_eq!(z2.order(), 2);
        let g = "Z2xZ4".parse::<GroupSpec>().unwrap();
        assert_eq!(g.factors(), &[2, 4]);
        assert_eq!(g.order(), 8);
        assert_eq!(g.to_string(), "Z2xZ4");
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["", "Z1", "Z0", "Z", "Z2x", "xZ2", "Z2*Z3", "z2", "Z2xZ1", "Z+3", " Z2"] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad:?} should be rejected");
        }
        assert!(matches!(
            "Z1".parse::<GroupSpec>(),
            Err(Error::GroupSyntax { .. })
        ));
    }

    #[test]
    fn residue_arithmetic() {
        let g: GroupSpec = "Z2xZ4".parse().unwrap();
        let s = g.add(&GroupElem(vec![1, 3]), &GroupElem(vec![1, 2])).unwrap();
        assert_eq!(s, GroupElem(vec![0, 1]));
        let z5 = GroupSpec::cyclic(5).unwrap();
        assert_eq!(z5.neg(&GroupElem(vec![2])).unwrap(), GroupElem(vec![3]));
        assert_eq!(z5.neg(&z5.zero()).unwrap(), z5.zero());
        assert!(g.add(&GroupElem(vec![2, 0]), &g.zero()).is_err());
        assert!(g.add(&GroupElem(vec![1]), &g.zero()).is_err());
    }

    #[test]
    fn index_codec_is_lexicographic() {
        let g: GroupSpec = "Z3xZ2xZ2".parse().unwrap();
        let mut prev: Option<GroupElem> = None;
        for i in 0..g.order() as usize {
            let e = g.elem_at(i).unwrap();
            assert_eq!(g.index_of(&e).unwrap(), i);
            if let Some(p) = prev {
                assert!(p < e);
            }
            prev = Some(e);
        }
        assert!(g.elem_at(12).is_err());
    }

    #[test]
    fn prime_divisors() {
        let spd = |s: &str| s.parse::<GroupSpec>().unwrap().smallest_prime_divisor();
        assert_eq!(spd("Z8"), 2);
        assert_eq!(spd("Z15"), 3);
        assert_eq!(spd("Z7"), 7);
        assert_eq!(spd("Z3xZ5"), 3);
    }
}
