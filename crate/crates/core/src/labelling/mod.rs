//! Arc labellings of the complete digraph, switchings and their canonical
//! forms, B-factor quotient labellings and explicit constructions.

mod io;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::{Elem, Group, GroupSpec, QuotientMap, Subgroup};
use crate::error::{Error, Result};

pub use io::{EdgeLabellingFile, LabellingFile};

/// A total map from ordered vertex pairs `(u, v)`, `u != v`, of `K_n` to group elements.
///
/// Stored as a dense `n x n` table; diagonal entries are unused and held at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcLabelling {
    n: usize,
    group: Arc<Group>,
    table: Vec<Elem>,
}

/// `S_{c,v}`: add `c` to every arc leaving `v`, subtract it from every arc entering `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Switching {
    pub vertex: usize,
    pub value: Elem,
}

impl Switching {
    pub fn new(vertex: usize, value: Elem) -> Self {
        Switching { vertex, value }
    }
}

impl ArcLabelling {
    pub fn from_fn(group: &Arc<Group>, n: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("a labelling needs at least 2 vertices, got {n}")));
        }
        let mut table = vec![Elem::ZERO; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let e = f(u, v);
                    if !group.contains(e) {
                        return Err(Error::SpecMismatch(format!("label {e} of arc ({u},{v}) is outside the group")));
                    }
                    table[u * n + v] = e;
                }
            }
        }
        Ok(ArcLabelling {
            n,
            group: group.clone(),
            table,
        })
    }

    pub fn constant(group: &Arc<Group>, n: usize, value: Elem) -> Result<Self> {
        Self::from_fn(group, n, |_, _| value)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    #[inline]
    pub fn label(&self, u: usize, v: usize) -> Elem {
        debug_assert!(u != v && u < self.n && v < self.n);
        self.table[u * self.n + v]
    }

    /// Returns a copy with arc `(u, v)` relabelled.
    pub fn with_label(&self, u: usize, v: usize, value: Elem) -> Result<Self> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::invalid(format!("self-loop ({u},{u})")));
        }
        if !self.group.contains(value) {
            return Err(Error::SpecMismatch(format!("label {value} is outside the group")));
        }
        let mut out = self.clone();
        out.table[u * self.n + v] = value;
        Ok(out)
    }

    /// All arcs `(u, v, label)` in lexicographic order of `(u, v)`.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize, Elem)> + '_ {
        (0..self.n).flat_map(move |u| {
            (0..self.n)
                .filter(move |&v| v != u)
                .map(move |v| (u, v, self.label(u, v)))
        })
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::invalid(format!("vertex {v} out of range for K_{}", self.n)))
        }
    }

    /// Label sum along consecutive vertices of `walk`.
    pub fn walk_sum(&self, walk: &[usize]) -> Elem {
        self.group
            .sum(walk.windows(2).map(|w| self.label(w[0], w[1])))
    }

    pub fn apply_switching(&self, s: &Switching) -> Result<Self> {
        let mut out = self.clone();
        out.switch_in_place(s)?;
        Ok(out)
    }

    /// Applies the switchings left to right.
    pub fn apply_switchings<'a>(&self, seq: impl IntoIterator<Item = &'a Switching>) -> Result<Self> {
        let mut out = self.clone();
        for s in seq {
            out.switch_in_place(s)?;
        }
        Ok(out)
    }

    pub(crate) fn switch_in_place(&mut self, s: &Switching) -> Result<()> {
        self.check_vertex(s.vertex)?;
        if !self.group.contains(s.value) {
            return Err(Error::SpecMismatch(format!("switching value {} is outside the group", s.value)));
        }
        if s.value.is_zero() {
            return Ok(());
        }
        let (n, v, c) = (self.n, s.vertex, s.value);
        let minus_c = self.group.neg(c);
        for x in 0..n {
            if x != v {
                self.table[v * n + x] = self.group.add(self.table[v * n + x], c);
                self.table[x * n + v] = self.group.add(self.table[x * n + v], minus_c);
            }
        }
        Ok(())
    }

    /// Canonical representative of the switching class: every arc out of
    /// vertex 0 is zero. Switches by `w(0, v)` at each `v >= 1`, ascending.
    pub fn canonicalize(&self) -> (Self, Vec<Switching>) {
        let seq: Vec<Switching> = (1..self.n)
            .map(|v| Switching::new(v, self.label(0, v)))
            .collect();
        let mut out = self.clone();
        for s in &seq {
            out.switch_in_place(s).expect("vertices in range");
        }
        (out, seq)
    }

    pub fn is_canonical(&self) -> bool {
        (1..self.n).all(|v| self.label(0, v).is_zero())
    }

    pub fn is_switching_equivalent(&self, other: &Self) -> bool {
        self.n == other.n
            && self.group == other.group
            && self.canonicalize().0.table == other.canonicalize().0.table
    }

    /// Induced labelling on `vertices`, re-indexed `0..k` in the given order.
    pub fn restrict(&self, vertices: &[usize]) -> Result<Self> {
        self.check_subset(vertices)?;
        Self::from_fn(&self.group, vertices.len(), |i, j| {
            self.label(vertices[i], vertices[j])
        })
    }

    /// Induced labelling on `vertices` re-expressed over `b` as a group of its
    /// own. Fails unless every arc inside `vertices` is labelled from `b`.
    pub fn restrict_to_subgroup(&self, vertices: &[usize], b: &Subgroup) -> Result<Self> {
        self.check_subset(vertices)?;
        if **b.group() != *self.group {
            return Err(Error::SpecMismatch("subgroup belongs to a different group".into()));
        }
        let bg = b.as_group();
        let mut pos = vec![None; self.group.order()];
        for (i, e) in b.elements().iter().enumerate() {
            pos[e.index()] = Some(Elem::from_index(i));
        }
        let mut bad = None;
        let out = Self::from_fn(&bg, vertices.len(), |i, j| {
            let e = self.label(vertices[i], vertices[j]);
            pos[e.index()].unwrap_or_else(|| {
                bad = Some((vertices[i], vertices[j]));
                Elem::ZERO
            })
        })?;
        match bad {
            Some((u, v)) => Err(Error::invalid(format!(
                "arc ({u},{v}) is not labelled from the subgroup"
            ))),
            None => Ok(out),
        }
    }

    fn check_subset(&self, vertices: &[usize]) -> Result<()> {
        if vertices.len() < 2 {
            return Err(Error::invalid("vertex subset must have at least 2 vertices"));
        }
        let mut seen = vec![false; self.n];
        for &v in vertices {
            self.check_vertex(v)?;
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!("vertex {v} repeated in subset")));
            }
        }
        Ok(())
    }

    /// The B-factor of this labelling restricted to `vertices`: each arc is
    /// mapped to its coset in `A/B`.
    pub fn b_factor(&self, vertices: &[usize], b: &Subgroup) -> Result<BFactor> {
        self.check_subset(vertices)?;
        if **b.group() != *self.group {
            return Err(Error::SpecMismatch("subgroup belongs to a different group".into()));
        }
        let quotient = QuotientMap::new(b);
        let labelling = Self::from_fn(quotient.quotient(), vertices.len(), |i, j| {
            quotient.project(self.label(vertices[i], vertices[j]))
        })?;
        Ok(BFactor {
            labelling,
            quotient,
            vertices: vertices.to_vec(),
        })
    }
}

/// A quotient labelling together with the data needed to lift results back.
#[derive(Clone, Debug)]
pub struct BFactor {
    pub labelling: ArcLabelling,
    pub quotient: QuotientMap,
    /// `vertices[i]` is the original index of quotient-labelling vertex `i`.
    pub vertices: Vec<usize>,
}

/// A labelling of the unordered pairs of `K_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabelling {
    n: usize,
    group: Arc<Group>,
    table: Vec<Elem>,
}

impl EdgeLabelling {
    pub fn from_fn(group: &Arc<Group>, n: usize, mut f: impl FnMut(usize, usize) -> Elem) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("a labelling needs at least 2 vertices, got {n}")));
        }
        let mut table = vec![Elem::ZERO; n * n];
        for u in 0..n {
            for v in u + 1..n {
                let e = f(u, v);
                if !group.contains(e) {
                    return Err(Error::SpecMismatch(format!("label {e} of edge {{{u},{v}}} is outside the group")));
                }
                table[u * n + v] = e;
                table[v * n + u] = e;
            }
        }
        Ok(EdgeLabelling {
            n,
            group: group.clone(),
            table,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn label(&self, u: usize, v: usize) -> Elem {
        debug_assert!(u != v);
        self.table[u * self.n + v]
    }

    /// Both orientations of every edge carry the edge's label.
    pub fn lift(&self) -> ArcLabelling {
        ArcLabelling {
            n: self.n,
            group: self.group.clone(),
            table: self.table.clone(),
        }
    }
}

pub fn lift_undirected(e: &EdgeLabelling) -> ArcLabelling {
    e.lift()
}

/// The zero-sum-free construction on `K_q` over `Z_q`: arc `(i, j)` gets 1 if
/// `i < j` and 0 otherwise.
pub fn lower_bound_labelling(q: u32) -> Result<ArcLabelling> {
    if q < 2 {
        return Err(Error::invalid(format!("q must be at least 2, got {q}")));
    }
    let group = Group::from_spec(&GroupSpec::cyclic(q)?)?;
    ArcLabelling::from_fn(&group, q as usize, |i, j| {
        if i < j {
            Elem::from_index(1)
        } else {
            Elem::ZERO
        }
    })
}

/// Uniform independent labels from a ChaCha8 stream seeded with `seed`.
pub fn random_labelling(group: &Arc<Group>, n: usize, seed: u64) -> Result<ArcLabelling> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = group.order();
    ArcLabelling::from_fn(group, n, |_, _| Elem::from_index(rng.gen_range(0..order)))
}

pub fn random_edge_labelling(group: &Arc<Group>, n: usize, seed: u64) -> Result<EdgeLabelling> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = group.order();
    EdgeLabelling::from_fn(group, n, |_, _| Elem::from_index(rng.gen_range(0..order)))
}
