//! Certificates for A-completeness: the K₃ extraction lemma, chains of
//! triangles and chains of K₄'s, target-path selection, and sumset utilities.

mod certificate;
mod k3;
mod k4;
pub mod lemma;
mod sumset;
mod triangle;

use std::collections::BTreeSet;

pub use certificate::{verify_certificate, ChainCertificate, ChainKind};
pub use k3::{k3_extract, k3_extract_on, K3Extraction};
pub use k4::{build_k4_chain, k4_vertex_requirement, K4Chain, K4Outcome, K4Segment};
pub use sumset::{cauchy_davenport_holds, sumset};
pub use triangle::{build_triangle_chain, ChainOptions, ChainOutcome, Concentration, TriangleChain};

use crate::abelian::Elem;
use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;
use crate::oracle::DiPath;

/// A chain of segments joined along a spine `x_0 .. x_i` whose spine arcs are
/// zero under [`SegmentChain::base`]. Each segment offers the direct arc plus
/// one or more detour paths.
pub trait SegmentChain {
    fn spine(&self) -> &[usize];

    /// The switched labelling the chain is certified against.
    fn base(&self) -> &ArcLabelling;

    /// Detour paths of segment `j` as full vertex sequences `x_j .. x_{j+1}`
    /// with their sums. The direct arc is implicit.
    fn detours(&self, j: usize) -> Vec<(Vec<usize>, Elem)>;

    fn segments(&self) -> usize {
        self.spine().len() - 1
    }

    fn start(&self) -> usize {
        self.spine()[0]
    }

    fn end(&self) -> usize {
        *self.spine().last().expect("non-empty spine")
    }
}

/// Every `x_0 -> x_i` path sum realizable inside the chain.
pub fn reachable_sums(chain: &impl SegmentChain) -> BTreeSet<Elem> {
    let g = chain.base().group();
    let mut reach = vec![false; g.order()];
    reach[0] = true;
    for j in 0..chain.segments() {
        let offsets: Vec<Elem> = chain.detours(j).into_iter().map(|(_, s)| s).collect();
        reach = step(g, &reach, &offsets).0;
    }
    (0..g.order()).filter(|&i| reach[i]).map(Elem::from_index).collect()
}

/// One segment of the reachability DP. Returns the new set and, per element,
/// which option produced it first (0 = direct arc, k = detour k-1).
fn step(g: &crate::abelian::Group, reach: &[bool], offsets: &[Elem]) -> (Vec<bool>, Vec<usize>) {
    let mut next = reach.to_vec();
    let mut choice = vec![0usize; g.order()];
    for (k, &d) in offsets.iter().enumerate() {
        for (i, _) in reach.iter().enumerate().filter(|(_, r)| **r) {
            let t = g.add(Elem::from_index(i), d).index();
            if !next[t] {
                next[t] = true;
                choice[t] = k + 1;
            }
        }
    }
    (next, choice)
}

/// A simple `x_0 -> x_i` path through the chain whose sum under the chain's
/// base labelling is `target`. Direct arcs are preferred over detours.
pub fn chain_path_for_target(chain: &impl SegmentChain, target: Elem) -> Result<DiPath> {
    let g = chain.base().group();
    if !g.contains(target) {
        return Err(Error::SpecMismatch(format!("target {target} outside the group")));
    }
    let k = chain.segments();
    let options: Vec<Vec<(Vec<usize>, Elem)>> = (0..k).map(|j| chain.detours(j)).collect();
    let mut layers = vec![{
        let mut r = vec![false; g.order()];
        r[0] = true;
        r
    }];
    let mut choices = Vec::with_capacity(k);
    for opts in &options {
        let offsets: Vec<Elem> = opts.iter().map(|(_, s)| *s).collect();
        let (next, choice) = step(g, layers.last().expect("non-empty"), &offsets);
        layers.push(next);
        choices.push(choice);
    }
    if !layers[k][target.index()] {
        return Err(Error::invalid(format!("target {} is not reachable through the chain", g.name(target))));
    }
    // walk back through the layers, picking for each segment the option that
    // led to the current residual
    let mut picks = vec![0usize; k];
    let mut residual = target;
    for j in (0..k).rev() {
        let pick = if layers[j][residual.index()] {
            0
        } else {
            choices[j][residual.index()]
        };
        if pick > 0 {
            residual = g.sub(residual, options[j][pick - 1].1);
        }
        picks[j] = pick;
    }
    debug_assert!(residual.is_zero());
    let spine = chain.spine();
    let mut vertices = vec![spine[0]];
    for (j, &pick) in picks.iter().enumerate() {
        if pick == 0 {
            vertices.push(spine[j + 1]);
        } else {
            vertices.extend_from_slice(&options[j][pick - 1].0[1..]);
        }
    }
    let sum = chain.base().walk_sum(&vertices);
    if sum != target {
        return Err(Error::internal("chain path sum differs from its target"));
    }
    Ok(DiPath { vertices, sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::Group;
    use crate::oracle::{path_sum_set, verify_path};
    use std::sync::Arc;

    /// A hand-built chain over an arbitrary labelling, for exercising the DP.
    struct Fixed {
        spine: Vec<usize>,
        detours: Vec<Vec<Vec<usize>>>,
        base: ArcLabelling,
    }

    impl SegmentChain for Fixed {
        fn spine(&self) -> &[usize] {
            &self.spine
        }
        fn base(&self) -> &ArcLabelling {
            &self.base
        }
        fn detours(&self, j: usize) -> Vec<(Vec<usize>, Elem)> {
            self.detours[j]
                .iter()
                .map(|p| (p.clone(), self.base.walk_sum(p)))
                .collect()
        }
    }

    fn z(q: u32) -> Arc<Group> {
        Group::cyclic(q).unwrap()
    }

    #[test]
    fn zero_target_takes_the_spine() {
        let base = ArcLabelling::from_fn(&z(5), 5, |u, v| {
            if v == u + 2 && u % 2 == 0 {
                Elem::ZERO
            } else {
                Elem::from_index(1 + (u + v) % 4)
            }
        })
        .unwrap();
        let chain = Fixed {
            spine: vec![0, 2, 4],
            detours: vec![vec![vec![0, 1, 2]], vec![vec![2, 3, 4]]],
            base,
        };
        let p = chain_path_for_target(&chain, Elem::ZERO).unwrap();
        assert_eq!(p.vertices, vec![0, 2, 4]);
        let reach = reachable_sums(&chain);
        for a in reach.clone() {
            let p = chain_path_for_target(&chain, a).unwrap();
            assert_eq!(verify_path(&chain.base, &p.vertices).unwrap(), a);
            assert_eq!((p.start(), p.end()), (0, 4));
        }
        // the chain's sums are a subset of all 0 -> 4 path sums
        assert!(reach.is_subset(&path_sum_set(&chain.base, 0, 4, 1).unwrap()));
        let missing = z(5).elements().find(|a| !reach.contains(a));
        if let Some(a) = missing {
            assert!(chain_path_for_target(&chain, a).is_err());
        }
    }
}
