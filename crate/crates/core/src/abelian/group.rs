use std::fmt;
use std::sync::Arc;

use super::spec::{GroupElem, GroupSpec};
use crate::error::{Error, Result};

/// Largest group order for which a dense Cayley table is built.
pub const MAX_TABLE_ORDER: usize = 1024;

/// Dense index of an element inside a [`Group`]. Index 0 is always the identity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(u16);

impl Elem {
    pub const ZERO: Elem = Elem(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> Elem {
        debug_assert!(i < MAX_TABLE_ORDER);
        Elem(i as u16)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A finite Abelian group given by its addition table.
///
/// Groups built from a [`GroupSpec`] index their elements by the spec's
/// mixed-radix codec, so index order is lexicographic order on residues.
/// Subgroups and quotients are re-expressed as tables of their own; their
/// elements carry the names of the ambient elements they stand for.
#[derive(Clone, PartialEq, Eq)]
pub struct Group {
    order: usize,
    add: Vec<u16>,
    neg: Vec<u16>,
    names: Vec<String>,
    spec: Option<GroupSpec>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spec {
            Some(spec) => write!(f, "Group({spec})"),
            None => write!(f, "Group(order {}, {:?})", self.order, self.names),
        }
    }
}

impl Group {
    pub fn from_spec(spec: &GroupSpec) -> Result<Arc<Group>> {
        let order = spec.order() as usize;
        if order > MAX_TABLE_ORDER {
            return Err(Error::Budget(format!(
                "{spec} has order {order}; tables are limited to {MAX_TABLE_ORDER}"
            )));
        }
        let elems: Vec<GroupElem> = (0..order)
            .map(|i| spec.elem_at(i))
            .collect::<Result<_>>()?;
        let mut add = vec![0u16; order * order];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate().skip(i) {
                let s = spec.index_of(&spec.add(a, b)?)? as u16;
                add[i * order + j] = s;
                add[j * order + i] = s;
            }
        }
        let neg = elems
            .iter()
            .map(|a| Ok(spec.index_of(&spec.neg(a)?)? as u16))
            .collect::<Result<_>>()?;
        let names = elems.iter().map(residue_name).collect();
        Ok(Arc::new(Group {
            order,
            add,
            neg,
            names,
            spec: Some(spec.clone()),
        }))
    }

    pub fn cyclic(q: u32) -> Result<Arc<Group>> {
        Group::from_spec(&GroupSpec::cyclic(q)?)
    }

    /// Builds a group from an addition table, checking the Abelian group axioms.
    /// Element 0 must be the identity.
    pub(crate) fn from_table(order: usize, add: Vec<u16>, names: Vec<String>) -> Result<Group> {
        if order == 0 || order > MAX_TABLE_ORDER || add.len() != order * order {
            return Err(Error::internal("malformed group table"));
        }
        let at = |a: usize, b: usize| add[a * order + b] as usize;
        let mut neg = vec![u16::MAX; order];
        for a in 0..order {
            if at(0, a) != a {
                return Err(Error::internal("element 0 is not the identity"));
            }
            for b in 0..order {
                if at(a, b) >= order || at(a, b) != at(b, a) {
                    return Err(Error::internal("table is not commutative"));
                }
                if at(a, b) == 0 {
                    neg[a] = b as u16;
                }
            }
            if neg[a] == u16::MAX {
                return Err(Error::internal("element without inverse"));
            }
        }
        Ok(Group {
            order,
            add,
            neg,
            names,
            spec: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> Elem {
        Elem::ZERO
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.index() * self.order + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    /// `k·a`.
    pub fn times(&self, k: usize, a: Elem) -> Elem {
        (0..k).fold(Elem::ZERO, |acc, _| self.add(acc, a))
    }

    pub fn sum<I: IntoIterator<Item = Elem>>(&self, items: I) -> Elem {
        items.into_iter().fold(Elem::ZERO, |acc, x| self.add(acc, x))
    }

    pub fn element_order(&self, a: Elem) -> usize {
        let mut k = 1;
        let mut x = a;
        while !x.is_zero() {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem::from_index)
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.index() < self.order
    }

    /// The presenting spec, when this group is a spec group.
    pub fn spec(&self) -> Option<&GroupSpec> {
        self.spec.as_ref()
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a.index()]
    }

    pub fn residues(&self, a: Elem) -> Option<GroupElem> {
        self.spec.as_ref().and_then(|s| s.elem_at(a.index()).ok())
    }

    pub fn elem_of(&self, a: &GroupElem) -> Result<Elem> {
        let spec = self
            .spec
            .as_ref()
            .ok_or_else(|| Error::SpecMismatch("group has no residue presentation".into()))?;
        Ok(Elem::from_index(spec.index_of(a)?))
    }

    pub fn is_prime_order(&self) -> bool {
        super::spec::is_prime(self.order as u64)
    }

    /// Human-readable description: the spec string, or the order for derived groups.
    pub fn describe(&self) -> String {
        match &self.spec {
            Some(s) => s.to_string(),
            None => format!("<group of order {}>", self.order),
        }
    }
}

fn residue_name(a: &GroupElem) -> String {
    if a.0.len() == 1 {
        a.0[0].to_string()
    } else {
        let parts: Vec<String> = a.0.iter().map(|r| r.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in ["Z2", "Z5", "Z6", "Z2xZ4", "Z3xZ3", "Z2xZ2xZ3"] {
            let g = Group::from_spec(&spec.parse().unwrap()).unwrap();
            let pick = |rng: &mut ChaCha8Rng| Elem::from_index(rng.gen_range(0..g.order()));
            for _ in 0..1000 {
                let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
                assert_eq!(g.add(g.add(a, b), c), g.add(a, g.add(b, c)));
                assert_eq!(g.add(a, b), g.add(b, a));
                assert_eq!(g.add(a, g.zero()), a);
                assert_eq!(g.add(a, g.neg(a)), g.zero());
            }
        }
    }

    #[test]
    fn table_matches_residues() {
        let spec: GroupSpec = "Z2xZ4".parse().unwrap();
        let g = Group::from_spec(&spec).unwrap();
        let a = g.elem_of(&GroupElem(vec![1, 3])).unwrap();
        let b = g.elem_of(&GroupElem(vec![1, 2])).unwrap();
        assert_eq!(g.residues(g.add(a, b)).unwrap(), GroupElem(vec![0, 1]));
        assert_eq!(g.name(a), "(1,3)");
        assert_eq!(g.element_order(a), 4);
        assert_eq!(g.times(4, a), g.zero());
    }

    #[test]
    fn rejects_huge_tables() {
        assert!(matches!(Group::cyclic(5000), Err(Error::Budget(_))));
    }
}
