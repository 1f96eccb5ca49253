use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use super::group::{Elem, Group};
use crate::error::{Error, Result};

/// Default order bound for [`enumerate_subgroups`].
pub const SUBGROUP_ENUMERATION_BOUND: usize = 512;

/// A subgroup of `group`, stored as its sorted element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    group: Arc<Group>,
    elements: Vec<Elem>,
    member: Vec<bool>,
}

impl Subgroup {
    /// Validates closure under addition and negation.
    pub fn from_elements(group: &Arc<Group>, elems: impl IntoIterator<Item = Elem>) -> Result<Self> {
        let mut member = vec![false; group.order()];
        for e in elems {
            if !group.contains(e) {
                return Err(Error::invalid(format!("{e} is not an element of the group")));
            }
            member[e.index()] = true;
        }
        if !member[0] {
            return Err(Error::invalid("subset does not contain zero"));
        }
        let elements: Vec<Elem> = group.elements().filter(|e| member[e.index()]).collect();
        for &a in &elements {
            if !member[group.neg(a).index()] {
                return Err(Error::invalid("subset is not closed under negation"));
            }
            for &b in &elements {
                if !member[group.add(a, b).index()] {
                    return Err(Error::invalid("subset is not closed under addition"));
                }
            }
        }
        Ok(Subgroup {
            group: group.clone(),
            elements,
            member,
        })
    }

    fn from_member_unchecked(group: &Arc<Group>, member: Vec<bool>) -> Self {
        let elements = group.elements().filter(|e| member[e.index()]).collect();
        Subgroup {
            group: group.clone(),
            elements,
            member,
        }
    }

    pub fn trivial(group: &Arc<Group>) -> Self {
        let mut member = vec![false; group.order()];
        member[0] = true;
        Self::from_member_unchecked(group, member)
    }

    pub fn whole(group: &Arc<Group>) -> Self {
        Self::from_member_unchecked(group, vec![true; group.order()])
    }

    /// Smallest subgroup containing every element of `gens`.
    pub fn generated_by(group: &Arc<Group>, gens: impl IntoIterator<Item = Elem>) -> Self {
        let gens: Vec<Elem> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        let mut member = vec![false; group.order()];
        member[0] = true;
        // In a finite group, closing {0} under "add a generator" yields <gens>.
        let mut stack = vec![Elem::ZERO];
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let y = group.add(x, g);
                if !member[y.index()] {
                    member[y.index()] = true;
                    stack.push(y);
                }
            }
        }
        Self::from_member_unchecked(group, member)
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, a: Elem) -> bool {
        self.member.get(a.index()).copied().unwrap_or(false)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.order() == self.group.order()
    }

    pub fn is_subset_of(&self, set: &[bool]) -> bool {
        self.elements.iter().all(|e| set[e.index()])
    }

    /// Re-expresses the subgroup as a group in its own right. Element `i` of
    /// the returned group is `self.elements()[i]`.
    pub fn as_group(&self) -> Arc<Group> {
        let k = self.order();
        let mut pos = vec![u16::MAX; self.group.order()];
        for (i, e) in self.elements.iter().enumerate() {
            pos[e.index()] = i as u16;
        }
        let mut add = vec![0u16; k * k];
        for (i, &a) in self.elements.iter().enumerate() {
            for (j, &b) in self.elements.iter().enumerate() {
                add[i * k + j] = pos[self.group.add(a, b).index()];
            }
        }
        let names = self
            .elements
            .iter()
            .map(|&e| self.group.name(e).to_string())
            .collect();
        Arc::new(Group::from_table(k, add, names).expect("subgroup table is a group"))
    }
}

/// `<a> = {0, a, 2a, ...}`.
pub fn cyclic_subgroup(group: &Arc<Group>, a: Elem) -> Subgroup {
    let mut member = vec![false; group.order()];
    let mut x = Elem::ZERO;
    while !member[x.index()] {
        member[x.index()] = true;
        x = group.add(x, a);
    }
    Subgroup::from_member_unchecked(group, member)
}

/// All subgroups of `group`, sorted by order and then by element list.
///
/// Every subgroup is reached from `{0}` by adjoining one generator at a time,
/// so a closure search over the lattice visits each of them exactly once.
pub fn enumerate_subgroups(group: &Arc<Group>) -> Result<Vec<Subgroup>> {
    enumerate_subgroups_bounded(group, SUBGROUP_ENUMERATION_BOUND)
}

pub fn enumerate_subgroups_bounded(group: &Arc<Group>, bound: usize) -> Result<Vec<Subgroup>> {
    if group.order() > bound {
        return Err(Error::Budget(format!(
            "subgroup enumeration limited to order {bound}, got {}",
            group.order()
        )));
    }
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut found = Vec::new();
    let mut queue = VecDeque::new();
    let trivial = Subgroup::trivial(group);
    seen.insert(trivial.member.clone());
    queue.push_back(trivial);
    while let Some(h) = queue.pop_front() {
        for g in group.elements() {
            if h.contains(g) {
                continue;
            }
            let bigger = Subgroup::generated_by(group, h.elements.iter().copied().chain([g]));
            if seen.insert(bigger.member.clone()) {
                queue.push_back(bigger);
            }
        }
        found.push(h);
    }
    found.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Ok(found)
}

/// The canonical projection `A -> A/B` with an explicit coset table.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    kernel: Subgroup,
    coset_of: Vec<u16>,
    cosets: Vec<Vec<Elem>>,
    quotient: Arc<Group>,
}

impl QuotientMap {
    /// Builds `A/B`. Cosets are numbered by their least element, which is
    /// also the canonical representative, so coset 0 is `B` itself.
    pub fn new(kernel: &Subgroup) -> Self {
        let group = kernel.group();
        let mut coset_of = vec![u16::MAX; group.order()];
        let mut cosets: Vec<Vec<Elem>> = Vec::new();
        for a in group.elements() {
            if coset_of[a.index()] != u16::MAX {
                continue;
            }
            let id = cosets.len() as u16;
            let mut members: Vec<Elem> = kernel.elements().iter().map(|&b| group.add(a, b)).collect();
            members.sort();
            for m in &members {
                coset_of[m.index()] = id;
            }
            cosets.push(members);
        }
        let k = cosets.len();
        let mut add = vec![0u16; k * k];
        for i in 0..k {
            for j in 0..k {
                let s = group.add(cosets[i][0], cosets[j][0]);
                add[i * k + j] = coset_of[s.index()];
            }
        }
        let names = cosets
            .iter()
            .map(|c| format!("[{}]", group.name(c[0])))
            .collect();
        let quotient = Arc::new(Group::from_table(k, add, names).expect("quotient table is a group"));
        QuotientMap {
            kernel: kernel.clone(),
            coset_of,
            cosets,
            quotient,
        }
    }

    /// Like [`QuotientMap::new`] but rejects `B = A`.
    pub fn proper(kernel: &Subgroup) -> Result<Self> {
        if kernel.is_whole() {
            return Err(Error::invalid(
                "quotient by the whole group is trivial; a proper subgroup is required",
            ));
        }
        Ok(Self::new(kernel))
    }

    pub fn ambient(&self) -> &Arc<Group> {
        self.kernel.group()
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn quotient(&self) -> &Arc<Group> {
        &self.quotient
    }

    pub fn cosets(&self) -> &[Vec<Elem>] {
        &self.cosets
    }

    pub fn project(&self, a: Elem) -> Elem {
        Elem::from_index(self.coset_of[a.index()] as usize)
    }

    /// Canonical (least) representative of coset `h`.
    pub fn representative(&self, h: Elem) -> Elem {
        self.cosets[h.index()][0]
    }

    /// Pre-image of a subgroup of the quotient.
    pub fn preimage(&self, sub: &Subgroup) -> Result<Subgroup> {
        if !Arc::ptr_eq(sub.group(), &self.quotient) && **sub.group() != *self.quotient {
            return Err(Error::SpecMismatch("subgroup is not a subgroup of this quotient".into()));
        }
        let member = self
            .ambient()
            .elements()
            .map(|a| sub.contains(self.project(a)))
            .collect();
        Ok(Subgroup::from_member_unchecked(self.ambient(), member))
    }
}
