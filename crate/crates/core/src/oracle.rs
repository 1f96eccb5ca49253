//! Brute-force ground truth: simple directed cycles and paths of `K_n`,
//! zero-sum-freeness, path-sum sets and witness verification.
//!
//! Everything here is exponential in `n`. Enumeration is refused above
//! [`HARD_VERTEX_LIMIT`] vertices and logged above [`SOFT_VERTEX_LIMIT`].

use std::collections::{BTreeSet, HashSet};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::abelian::{Elem, GroupElem};
use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;

pub const SOFT_VERTEX_LIMIT: usize = 9;
pub const HARD_VERTEX_LIMIT: usize = 12;

/// A simple directed path with its label sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiPath {
    pub vertices: Vec<usize>,
    pub sum: Elem,
}

impl DiPath {
    /// Number of arcs.
    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("non-empty path")
    }
}

/// A simple directed cycle; the closing arc runs from the last vertex back to
/// the first. Stored in canonical rotation (least vertex first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiCycle {
    vertices: Vec<usize>,
    pub sum: Elem,
}

impl DiCycle {
    pub fn new(mut vertices: Vec<usize>, sum: Elem) -> Self {
        if let Some(pos) = vertices.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i) {
            vertices.rotate_left(pos);
        }
        DiCycle { vertices, sum }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Number of arcs (equal to the number of vertices).
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The cycle's arcs in order, including the closing arc.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.vertices.len();
        (0..k).map(move |i| (self.vertices[i], self.vertices[(i + 1) % k]))
    }
}

pub(crate) fn check_budget(n: usize) -> Result<()> {
    if n > HARD_VERTEX_LIMIT {
        return Err(Error::Budget(format!(
            "exhaustive enumeration is limited to n <= {HARD_VERTEX_LIMIT}, got n = {n}"
        )));
    }
    if n > SOFT_VERTEX_LIMIT {
        log::warn!("exhaustive enumeration on K_{n} may take a while");
    }
    Ok(())
}

/// Visits every simple directed cycle of `K_n` with at least `min_len` arcs,
/// once each, in canonical rotation and DFS order.
pub fn for_each_cycle(n: usize, min_len: usize, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) {
    fn go(
        n: usize,
        min_len: usize,
        path: &mut Vec<usize>,
        used: &mut [bool],
        visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if path.len() >= min_len.max(2) {
            visit(path)?;
        }
        let s = path[0];
        for next in s + 1..n {
            if !used[next] {
                used[next] = true;
                path.push(next);
                let flow = go(n, min_len, path, used, visit);
                path.pop();
                used[next] = false;
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
    let mut used = vec![false; n];
    for s in 0..n {
        used[s] = true;
        let mut path = vec![s];
        let flow = go(n, min_len, &mut path, &mut used, &mut visit);
        used[s] = false;
        if flow.is_break() {
            return;
        }
    }
}

pub fn count_cycles(n: usize, min_len: usize) -> u64 {
    let mut count = 0;
    for_each_cycle(n, min_len, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

/// First zero-sum simple directed cycle with at least `min_len` arcs in
/// canonical DFS order, or `None` if the labelling has none.
///
/// The DFS memoizes exhausted `(visited set, vertex, partial sum)` states per
/// start vertex; this prunes without changing which witness is found first.
pub fn find_zero_sum_cycle_exhaustive(w: &ArcLabelling, min_len: usize) -> Result<Option<DiCycle>> {
    let n = w.n();
    check_budget(n)?;
    let g = w.group();
    let min_len = min_len.max(2);

    struct Search<'a> {
        w: &'a ArcLabelling,
        min_len: usize,
        dead: HashSet<u64>,
        path: Vec<usize>,
    }

    impl Search<'_> {
        fn key(&self, mask: u32, v: usize, sum: Elem) -> u64 {
            (mask as u64) | ((v as u64) << 16) | ((sum.index() as u64) << 24)
        }

        fn dfs(&mut self, mask: u32, v: usize, sum: Elem) -> bool {
            let s = self.path[0];
            let g = self.w.group();
            if self.path.len() >= self.min_len && g.add(sum, self.w.label(v, s)).is_zero() {
                return true;
            }
            let key = self.key(mask, v, sum);
            if self.dead.contains(&key) {
                return false;
            }
            for next in s + 1..self.w.n() {
                if mask >> next & 1 == 0 {
                    self.path.push(next);
                    if self.dfs(mask | 1 << next, next, g.add(sum, self.w.label(v, next))) {
                        return true;
                    }
                    self.path.pop();
                }
            }
            self.dead.insert(key);
            false
        }
    }

    for s in 0..n {
        let mut search = Search {
            w,
            min_len,
            dead: HashSet::new(),
            path: vec![s],
        };
        if search.dfs(1 << s, s, g.zero()) {
            return Ok(Some(DiCycle::new(search.path, g.zero())));
        }
    }
    Ok(None)
}

pub fn is_zero_sum_free(w: &ArcLabelling, min_len: usize) -> Result<bool> {
    Ok(find_zero_sum_cycle_exhaustive(w, min_len)?.is_none())
}

fn check_endpoints(w: &ArcLabelling, u: usize, v: usize) -> Result<()> {
    if u >= w.n() || v >= w.n() {
        return Err(Error::invalid(format!("endpoints ({u},{v}) out of range")));
    }
    if u == v {
        return Err(Error::invalid("path endpoints must differ"));
    }
    Ok(())
}

/// Sums of all simple directed `u -> v` paths with at least `min_len` arcs.
pub fn path_sum_set(w: &ArcLabelling, u: usize, v: usize, min_len: usize) -> Result<BTreeSet<Elem>> {
    check_endpoints(w, u, v)?;
    check_budget(w.n())?;
    let g = w.group();
    let mut sums = BTreeSet::new();
    let mut seen: HashSet<(u32, usize, Elem)> = HashSet::new();
    let mut stack = vec![(1u32 << u, u, g.zero())];
    while let Some((mask, x, sum)) = stack.pop() {
        if !seen.insert((mask, x, sum)) {
            continue;
        }
        for y in 0..w.n() {
            if mask >> y & 1 == 1 {
                continue;
            }
            let s = g.add(sum, w.label(x, y));
            if y == v {
                if mask.count_ones() as usize >= min_len {
                    sums.insert(s);
                }
            } else {
                stack.push((mask | 1 << y, y, s));
            }
        }
    }
    Ok(sums)
}

/// Whether every group element is a `u -> v` path sum.
pub fn is_complete_at(w: &ArcLabelling, u: usize, v: usize, min_len: usize) -> Result<bool> {
    Ok(path_sum_set(w, u, v, min_len)?.len() == w.group().order())
}

/// First simple `u -> v` path (DFS order) with at least `min_len` arcs and sum `target`.
pub fn find_path_with_sum(
    w: &ArcLabelling,
    u: usize,
    v: usize,
    target: Elem,
    min_len: usize,
) -> Result<Option<DiPath>> {
    check_endpoints(w, u, v)?;
    check_budget(w.n())?;

    fn dfs(
        w: &ArcLabelling,
        v: usize,
        target: Elem,
        min_len: usize,
        path: &mut Vec<usize>,
        mask: u32,
        sum: Elem,
        dead: &mut HashSet<(u32, usize, Elem)>,
    ) -> bool {
        let g = w.group();
        let x = *path.last().expect("non-empty");
        if dead.contains(&(mask, x, sum)) {
            return false;
        }
        for y in 0..w.n() {
            if mask >> y & 1 == 1 {
                continue;
            }
            let s = g.add(sum, w.label(x, y));
            path.push(y);
            if y == v {
                if path.len() > min_len && s == target {
                    return true;
                }
            } else if dfs(w, v, target, min_len, path, mask | 1 << y, s, dead) {
                return true;
            }
            path.pop();
        }
        dead.insert((mask, x, sum));
        false
    }

    let mut path = vec![u];
    let mut dead = HashSet::new();
    if dfs(w, v, target, min_len, &mut path, 1 << u, w.group().zero(), &mut dead) {
        Ok(Some(DiPath { vertices: path, sum: target }))
    } else {
        Ok(None)
    }
}

fn check_simple(w: &ArcLabelling, vertices: &[usize], min_vertices: usize) -> Result<()> {
    if vertices.len() < min_vertices {
        return Err(Error::invalid(format!(
            "need at least {min_vertices} vertices, got {}",
            vertices.len()
        )));
    }
    let mut seen = vec![false; w.n()];
    for &v in vertices {
        if v >= w.n() {
            return Err(Error::invalid(format!("vertex {v} out of range for K_{}", w.n())));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::invalid(format!("vertex {v} repeated")));
        }
    }
    Ok(())
}

/// Label sum of a cycle, recomputed from the labelling. Rejects malformed cycles.
pub fn verify_cycle(w: &ArcLabelling, vertices: &[usize]) -> Result<Elem> {
    check_simple(w, vertices, 2)?;
    let g = w.group();
    let k = vertices.len();
    Ok(g.sum((0..k).map(|i| w.label(vertices[i], vertices[(i + 1) % k]))))
}

/// Label sum of a simple path, recomputed from the labelling.
pub fn verify_path(w: &ArcLabelling, vertices: &[usize]) -> Result<Elem> {
    check_simple(w, vertices, 2)?;
    Ok(w.walk_sum(vertices))
}

/// On-disk witness: `{"kind":"cycle"|"path","vertices":[...],"sum":[residues]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessFile {
    pub kind: WitnessKind,
    pub vertices: Vec<usize>,
    pub sum: GroupElem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessKind {
    Cycle,
    Path,
}

impl WitnessFile {
    pub fn cycle(w: &ArcLabelling, c: &DiCycle) -> Result<Self> {
        Ok(WitnessFile {
            kind: WitnessKind::Cycle,
            vertices: c.vertices().to_vec(),
            sum: residues(w, c.sum)?,
        })
    }

    pub fn path(w: &ArcLabelling, p: &DiPath) -> Result<Self> {
        Ok(WitnessFile {
            kind: WitnessKind::Path,
            vertices: p.vertices.clone(),
            sum: residues(w, p.sum)?,
        })
    }

    /// Recomputes the sum against `w` and checks it matches the recorded one.
    pub fn verify(&self, w: &ArcLabelling) -> Result<Elem> {
        let sum = match self.kind {
            WitnessKind::Cycle => verify_cycle(w, &self.vertices)?,
            WitnessKind::Path => verify_path(w, &self.vertices)?,
        };
        if w.group().elem_of(&self.sum)? != sum {
            return Err(Error::invalid("recorded witness sum does not match the labelling"));
        }
        Ok(sum)
    }
}

fn residues(w: &ArcLabelling, e: Elem) -> Result<GroupElem> {
    w.group()
        .residues(e)
        .ok_or_else(|| Error::invalid("witness sums can only be serialized over a group spec"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::Group;
    use crate::labelling::{lower_bound_labelling, random_edge_labelling, random_labelling, Switching};
    use std::sync::Arc;

    fn group(s: &str) -> Arc<Group> {
        Group::from_spec(&s.parse().unwrap()).unwrap()
    }

    fn e(i: usize) -> Elem {
        Elem::from_index(i)
    }

    /// All simple cycles by plain enumeration, for cross-checking the memoized search.
    fn all_cycle_sums(w: &ArcLabelling, min_len: usize) -> Vec<(Vec<usize>, Elem)> {
        let mut out = Vec::new();
        for_each_cycle(w.n(), min_len, |c| {
            out.push((c.to_vec(), verify_cycle(w, c).unwrap()));
            ControlFlow::Continue(())
        });
        out
    }

    fn falling(n: u64, k: u64) -> u64 {
        (0..k).map(|i| n - i).product()
    }

    #[test]
    fn cycle_counts_match_closed_form() {
        for n in 2..=7u64 {
            // sum_k C(n,k)(k-1)! = sum_k n!/((n-k)! k)
            let expected: u64 = (2..=n).map(|k| falling(n, k) / k).sum();
            assert_eq!(count_cycles(n as usize, 2), expected, "n = {n}");
        }
        assert_eq!(count_cycles(7, 2), 2365);
        assert_eq!(count_cycles(4, 3), 8 + 6);
    }

    #[test]
    fn lower_bound_is_zero_sum_free() {
        for q in 2..=8 {
            let w = lower_bound_labelling(q).unwrap();
            assert!(is_zero_sum_free(&w, 2).unwrap(), "q = {q}");
        }
        let w = lower_bound_labelling(3).unwrap();
        let sums: Vec<usize> = all_cycle_sums(&w, 2).iter().map(|(_, s)| s.index()).collect();
        assert_eq!(sums.len(), 5);
        assert!(sums.iter().all(|s| *s == 1 || *s == 2));
    }

    #[test]
    fn all_zero_digon() {
        let w = ArcLabelling::constant(&group("Z3"), 2, Elem::ZERO).unwrap();
        let c = find_zero_sum_cycle_exhaustive(&w, 2).unwrap().unwrap();
        assert_eq!(c.vertices(), &[0, 1]);
    }

    #[test]
    fn negated_digon_is_found() {
        let g = group("Z5");
        let w = random_labelling(&g, 5, 3).unwrap();
        let w = w.with_label(2, 4, g.neg(w.label(4, 2))).unwrap();
        assert!(!is_zero_sum_free(&w, 2).unwrap());
    }

    #[test]
    fn z2_triangle_fixture() {
        // every arc labelled 1 over Z2: digons sum to 0
        let w = ArcLabelling::constant(&group("Z2"), 3, e(1)).unwrap();
        let cycles = all_cycle_sums(&w, 2);
        let brute = cycles.iter().any(|(_, s)| s.is_zero());
        assert_eq!(is_zero_sum_free(&w, 2).unwrap(), !brute);
        assert!(brute);
        // the two triangles sum to 1
        assert!(is_zero_sum_free(&w, 3).unwrap());
    }

    #[test]
    fn memoized_search_matches_enumeration() {
        for spec in ["Z2", "Z3", "Z4", "Z2xZ2", "Z5"] {
            let g = group(spec);
            for seed in 0..60 {
                let n = 2 + (seed as usize % 5);
                let w = random_labelling(&g, n, seed).unwrap();
                for min_len in [2, 3] {
                    let first = all_cycle_sums(&w, min_len)
                        .into_iter()
                        .find(|(_, s)| s.is_zero())
                        .map(|(c, _)| c);
                    let found = find_zero_sum_cycle_exhaustive(&w, min_len).unwrap();
                    assert_eq!(found.map(|c| c.vertices().to_vec()), first);
                }
            }
        }
    }

    #[test]
    fn undirected_lift_min_len() {
        let g = group("Z2");
        for seed in 0..20 {
            let w = random_edge_labelling(&g, 5, seed).unwrap().lift();
            let c = find_zero_sum_cycle_exhaustive(&w, 2).unwrap().unwrap();
            assert_eq!(c.len(), 2);
            let long = find_zero_sum_cycle_exhaustive(&w, 3).unwrap();
            let brute = all_cycle_sums(&w, 3).into_iter().find(|(_, s)| s.is_zero());
            assert_eq!(long.map(|c| c.vertices().to_vec()), brute.map(|b| b.0));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let w = ArcLabelling::constant(&group("Z2"), 13, e(1)).unwrap();
        assert!(matches!(find_zero_sum_cycle_exhaustive(&w, 2), Err(Error::Budget(_))));
        assert!(matches!(path_sum_set(&w, 0, 1, 1), Err(Error::Budget(_))));
    }

    #[test]
    fn path_sums_small_cases() {
        let g = group("Z7");
        let w = random_labelling(&g, 2, 8).unwrap();
        assert_eq!(path_sum_set(&w, 0, 1, 1).unwrap(), [w.label(0, 1)].into());
        let w = ArcLabelling::constant(&group("Z2"), 2, Elem::ZERO).unwrap();
        assert!(!is_complete_at(&w, 0, 1, 1).unwrap());
        assert!(path_sum_set(&w, 1, 1, 1).is_err());
    }

    #[test]
    fn triangle_chain_fixture() {
        // x0 = 0, y0 = 1, x1 = 2; spine arc zero, detour sums to a = 3 in Z5
        let g = group("Z5");
        let w = ArcLabelling::from_fn(&g, 3, |u, v| match (u, v) {
            (0, 2) => e(0),
            (0, 1) => e(1),
            (1, 2) => e(2),
            _ => e(4),
        })
        .unwrap();
        let within: BTreeSet<Elem> = path_sum_set(&w, 0, 2, 1).unwrap();
        assert_eq!(within, [e(0), e(3)].into());
    }

    #[test]
    fn path_sets_translate_under_switching() {
        let g = group("Z6");
        for seed in 0..30 {
            let w = random_labelling(&g, 5, seed).unwrap();
            let before = path_sum_set(&w, 0, 1, 1).unwrap();
            let c = e(1 + seed as usize % 5);
            for (z, shift) in [(0, c), (1, g.neg(c)), (3, Elem::ZERO)] {
                let after = path_sum_set(&w.apply_switching(&Switching::new(z, c)).unwrap(), 0, 1, 1).unwrap();
                let moved: BTreeSet<Elem> = before.iter().map(|&s| g.add(s, shift)).collect();
                assert_eq!(after, moved);
            }
        }
    }

    #[test]
    fn path_search_agrees_with_sets() {
        let g = group("Z2xZ3");
        for seed in 0..20 {
            let w = random_labelling(&g, 5, seed).unwrap();
            let set = path_sum_set(&w, 1, 3, 2).unwrap();
            for a in g.elements() {
                let p = find_path_with_sum(&w, 1, 3, a, 2).unwrap();
                assert_eq!(p.is_some(), set.contains(&a));
                if let Some(p) = p {
                    assert!(p.len() >= 2);
                    assert_eq!(verify_path(&w, &p.vertices).unwrap(), a);
                }
            }
        }
    }

    #[test]
    fn verify_cycle_cases() {
        let g = group("Z5");
        let w = random_labelling(&g, 4, 4).unwrap();
        assert_eq!(verify_cycle(&w, &[1, 3]).unwrap(), g.add(w.label(1, 3), w.label(3, 1)));
        let s = verify_cycle(&w, &[0, 2, 3, 1]).unwrap();
        assert_eq!(verify_cycle(&w, &[2, 3, 1, 0]).unwrap(), s);
        assert_eq!(verify_cycle(&w, &[1, 0, 2, 3]).unwrap(), s);
        assert!(verify_cycle(&w, &[1]).is_err());
        assert!(verify_cycle(&w, &[1, 2, 1]).is_err());
        assert!(verify_cycle(&w, &[1, 7]).is_err());

        // closing a path P_a from u to v with the arc (v,u), a = -w(v,u)
        let (u, v) = (0, 2);
        let target = g.neg(w.label(v, u));
        let p = find_path_with_sum(&w, u, v, target, 1).unwrap();
        if let Some(p) = p {
            assert!(verify_cycle(&w, &p.vertices).unwrap().is_zero());
        }
    }

    #[test]
    fn witness_file_round_trip() {
        let w = ArcLabelling::constant(&group("Z2xZ2"), 3, Elem::ZERO).unwrap();
        let c = find_zero_sum_cycle_exhaustive(&w, 3).unwrap().unwrap();
        let file = WitnessFile::cycle(&w, &c).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(text, r#"{"kind":"cycle","vertices":[0,1,2],"sum":[0,0]}"#);
        let back: WitnessFile = serde_json::from_str(&text).unwrap();
        assert!(back.verify(&w).unwrap().is_zero());
    }
}
