use crate::abelian::{Elem, Subgroup};
use crate::error::{Error, Result};
use crate::labelling::{ArcLabelling, Switching};

use super::SegmentChain;

/// A chain of triangles `x_0, y_0, x_1, ..., y_{i-1}, x_i` with zero spine
/// arcs under `base`; segment `j` offers the detour `x_j -> y_j -> x_{j+1}`.
#[derive(Clone, Debug)]
pub struct TriangleChain {
    pub spine: Vec<usize>,
    pub detours: Vec<usize>,
    pub sums: Vec<Elem>,
    /// Switchings taking the input labelling to `base`.
    pub switchings: Vec<Switching>,
    pub base: ArcLabelling,
}

impl SegmentChain for TriangleChain {
    fn spine(&self) -> &[usize] {
        &self.spine
    }

    fn base(&self) -> &ArcLabelling {
        &self.base
    }

    fn detours(&self, j: usize) -> Vec<(Vec<usize>, Elem)> {
        vec![(vec![self.spine[j], self.detours[j], self.spine[j + 1]], self.sums[j])]
    }
}

/// Every arc inside `vertices` is labelled from `subgroup` under `labelling`.
#[derive(Clone, Debug)]
pub struct Concentration {
    pub vertices: Vec<usize>,
    pub subgroup: Subgroup,
    pub labelling: ArcLabelling,
    /// Switchings taking the input labelling to `labelling`.
    pub switchings: Vec<Switching>,
}

#[derive(Clone, Debug)]
pub enum ChainOutcome {
    /// Every group element is an `u -> v` path sum inside the chain.
    Complete { chain: TriangleChain, u: usize, v: usize },
    SubgroupConcentration(Concentration),
    Stalled(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainOptions {
    /// Keep extending until the chain has at least this many segments, so that
    /// every chain path has at least this many arcs.
    pub min_segments: usize,
    pub max_segments: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            min_segments: 1,
            max_segments: usize::MAX,
        }
    }
}

/// Grows a chain of triangles from vertex 0.
///
/// Each step zeroes the arcs from the last spine vertex into the unused pool,
/// then appends the first pool arc `(y, x)` (in lexicographic order) whose label
/// enlarges the set of reachable sums. When no pool arc does, every pool label
/// stabilizes that set, so the subgroup they generate lies inside it and is
/// proper; the pool is reported as concentrated on that subgroup.
pub fn build_triangle_chain(w: &ArcLabelling, opts: ChainOptions) -> Result<ChainOutcome> {
    let g = w.group().clone();
    let n = w.n();
    let mut base = w.clone();
    let mut switchings = Vec::new();
    let mut spine = vec![0usize];
    let mut detours = Vec::new();
    let mut sums = Vec::new();
    let mut pool: Vec<usize> = (1..n).collect();
    let mut reach = vec![false; g.order()];
    reach[0] = true;
    let mut reach_size = 1;

    loop {
        let segments = sums.len();
        if reach_size == g.order() && segments >= opts.min_segments {
            let (u, v) = (spine[0], *spine.last().expect("non-empty"));
            let chain = TriangleChain {
                spine,
                detours,
                sums,
                switchings,
                base,
            };
            return Ok(ChainOutcome::Complete { chain, u, v });
        }
        if segments >= opts.max_segments {
            return Ok(ChainOutcome::Stalled(format!(
                "segment budget {} reached with {reach_size} of {} sums",
                opts.max_segments,
                g.order()
            )));
        }
        let x = *spine.last().expect("non-empty");
        for &y in &pool {
            let c = base.label(x, y);
            if !c.is_zero() {
                let s = Switching::new(y, c);
                base.switch_in_place(&s)?;
                switchings.push(s);
            }
        }
        if pool.len() < 2 {
            return Ok(ChainOutcome::Stalled(format!(
                "vertex pool exhausted after {segments} segments with {reach_size} of {} sums",
                g.order()
            )));
        }
        let grows = |a: Elem| {
            reach_size == g.order()
                || (0..g.order()).any(|i| reach[i] && !reach[g.add(Elem::from_index(i), a).index()])
        };
        let found = pool
            .iter()
            .flat_map(|&y| pool.iter().filter(move |&&t| t != y).map(move |&t| (y, t)))
            .find(|&(y, t)| grows(base.label(y, t)));
        match found {
            Some((y, t)) => {
                let a = base.label(y, t);
                let before: Vec<usize> = (0..g.order()).filter(|&i| reach[i]).collect();
                for i in before {
                    reach[g.add(Elem::from_index(i), a).index()] = true;
                }
                reach_size = reach.iter().filter(|r| **r).count();
                pool.retain(|&p| p != y && p != t);
                spine.push(t);
                detours.push(y);
                sums.push(g.add(base.label(x, y), a));
            }
            None => {
                let labels = pool
                    .iter()
                    .flat_map(|&y| pool.iter().filter(move |&&t| t != y).map(move |&t| (y, t)))
                    .map(|(y, t)| base.label(y, t));
                let subgroup = Subgroup::generated_by(&g, labels);
                if subgroup.is_whole() || !subgroup.is_subset_of(&reach) {
                    return Err(Error::internal("pool labels escape the reachable sums"));
                }
                return Ok(ChainOutcome::SubgroupConcentration(Concentration {
                    vertices: pool,
                    subgroup,
                    labelling: base,
                    switchings,
                }));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::Group;
    use crate::chains::{chain_path_for_target, reachable_sums};
    use crate::labelling::{lower_bound_labelling, random_labelling};
    use crate::oracle::verify_path;
    use std::collections::BTreeSet;
    use std::sync::Arc;

    fn group(s: &str) -> Arc<Group> {
        Group::from_spec(&s.parse().unwrap()).unwrap()
    }

    /// Re-derives every invariant of a completed chain from scratch.
    fn check_chain(w: &ArcLabelling, chain: &TriangleChain) {
        assert_eq!(w.apply_switchings(&chain.switchings).unwrap(), chain.base);
        let mut all: Vec<usize> = chain.spine.iter().chain(&chain.detours).copied().collect();
        let k = all.len();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), k);
        assert_eq!(k, 2 * chain.sums.len() + 1);
        let g = w.group();
        for j in 0..chain.sums.len() {
            let (x0, y, x1) = (chain.spine[j], chain.detours[j], chain.spine[j + 1]);
            assert!(chain.base.label(x0, x1).is_zero());
            assert_eq!(g.add(chain.base.label(x0, y), chain.base.label(y, x1)), chain.sums[j]);
        }
        // subset sums by brute force over J
        let m = chain.sums.len();
        let subset_sums: BTreeSet<Elem> = (0..1u32 << m)
            .map(|mask| g.sum((0..m).filter(|j| mask >> j & 1 == 1).map(|j| chain.sums[j])))
            .collect();
        assert_eq!(subset_sums, reachable_sums(chain));
        assert!(subset_sums.len() >= (m + 1).min(g.order()));
    }

    #[test]
    fn all_zero_concentrates_on_trivial_subgroup() {
        for spec in ["Z2", "Z3", "Z2xZ2"] {
            let g = group(spec);
            let w = ArcLabelling::constant(&g, 6, Elem::ZERO).unwrap();
            match build_triangle_chain(&w, ChainOptions::default()).unwrap() {
                ChainOutcome::SubgroupConcentration(c) => {
                    assert!(c.subgroup.is_trivial());
                    assert_eq!(c.vertices, vec![1, 2, 3, 4, 5]);
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn z2_single_triangle() {
        let g = group("Z2");
        let w = ArcLabelling::from_fn(&g, 3, |u, v| Elem::from_index(usize::from((u, v) == (1, 2)))).unwrap();
        match build_triangle_chain(&w, ChainOptions::default()).unwrap() {
            ChainOutcome::Complete { chain, u, v } => {
                assert_eq!((u, v), (0, 2));
                assert_eq!(chain.detours, vec![1]);
                assert_eq!(chain.sums, vec![Elem::from_index(1)]);
                check_chain(&w, &chain);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lower_bound_labellings_terminate() {
        for q in 2..=8 {
            let w = lower_bound_labelling(q).unwrap();
            let out = build_triangle_chain(&w, ChainOptions::default()).unwrap();
            match &out {
                ChainOutcome::Complete { chain, .. } => {
                    assert!(chain.sums.len() < q as usize);
                    check_chain(&w, chain);
                }
                ChainOutcome::SubgroupConcentration(c) => {
                    assert!(!c.subgroup.is_whole());
                }
                ChainOutcome::Stalled(_) => {}
            }
        }
    }

    #[test]
    fn concentration_holds_on_pool() {
        let g = group("Z4");
        let two = Elem::from_index(2);
        for seed in 0..20 {
            let base = random_labelling(&g, 24, seed).unwrap();
            let w = ArcLabelling::from_fn(&g, 24, |u, v| {
                if base.label(u, v).index() % 2 == 0 {
                    Elem::ZERO
                } else {
                    two
                }
            })
            .unwrap();
            match build_triangle_chain(&w, ChainOptions::default()).unwrap() {
                ChainOutcome::SubgroupConcentration(c) => {
                    assert!(c.vertices.len() + 4 * 4 >= 24);
                    for &x in &c.vertices {
                        for &y in &c.vertices {
                            if x != y {
                                assert!(c.subgroup.contains(c.labelling.label(x, y)));
                            }
                        }
                    }
                    assert_eq!(w.apply_switchings(&c.switchings).unwrap(), c.labelling);
                }
                ChainOutcome::Complete { .. } => panic!("labels in {{0,2}} cannot complete Z4"),
                ChainOutcome::Stalled(_) => {}
            }
        }
    }

    #[test]
    fn random_chains_are_sound() {
        for spec in ["Z2", "Z3", "Z5", "Z2xZ2", "Z6"] {
            let g = group(spec);
            for seed in 0..40 {
                let n = 8 * g.order();
                let w = random_labelling(&g, n, seed).unwrap();
                for min_segments in [1, 2] {
                    let opts = ChainOptions {
                        min_segments,
                        ..ChainOptions::default()
                    };
                    if let ChainOutcome::Complete { chain, u, v } = build_triangle_chain(&w, opts).unwrap() {
                        check_chain(&w, &chain);
                        assert!(chain.sums.len() >= min_segments);
                        for a in g.elements() {
                            let p = chain_path_for_target(&chain, a).unwrap();
                            assert_eq!((p.start(), p.end()), (u, v));
                            assert!(p.len() >= min_segments);
                            assert_eq!(verify_path(&chain.base, &p.vertices).unwrap(), a);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn stalls_on_tiny_inputs() {
        let w = lower_bound_labelling(2).unwrap();
        let out = build_triangle_chain(&w, ChainOptions::default()).unwrap();
        assert!(matches!(out, ChainOutcome::Stalled(_)));
        let g = group("Z5");
        let w = random_labelling(&g, 20, 1).unwrap();
        let opts = ChainOptions {
            min_segments: 1,
            max_segments: 1,
        };
        assert!(matches!(
            build_triangle_chain(&w, opts).unwrap(),
            ChainOutcome::Stalled(_)
        ));
    }
}
