use crate::abelian::Elem;
use crate::error::{Error, Result};
use crate::labelling::{ArcLabelling, Switching};
use crate::oracle::{DiCycle, DiPath};

use super::k3::{k3_extract_on, zero_sum_cycle_in_triple};
use super::SegmentChain;

/// One K₄ segment: two detour paths from the previous spine vertex to the
/// next, through the segment's two extra vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K4Segment {
    pub extra: [usize; 2],
    pub paths: [DiPath; 2],
}

/// A chain of K₄'s over `Z_p` with zero spine arcs under `base`.
#[derive(Clone, Debug)]
pub struct K4Chain {
    pub spine: Vec<usize>,
    pub segments: Vec<K4Segment>,
    /// Switchings taking the input labelling to `base`.
    pub switchings: Vec<Switching>,
    pub base: ArcLabelling,
}

impl SegmentChain for K4Chain {
    fn spine(&self) -> &[usize] {
        &self.spine
    }

    fn base(&self) -> &ArcLabelling {
        &self.base
    }

    fn detours(&self, j: usize) -> Vec<(Vec<usize>, Elem)> {
        self.segments[j]
            .paths
            .iter()
            .map(|p| (p.vertices.clone(), p.sum))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub enum K4Outcome {
    Chain(K4Chain),
    /// A sampled triangle already carried a zero-sum cycle.
    EarlyWitness(DiCycle),
}

/// `(3p - 1) / 2`: the spine origin plus three vertices per segment.
pub fn k4_vertex_requirement(p: usize) -> usize {
    3 * (p - 1) / 2 + 1
}

/// Builds `(p - 1) / 2` K₄ segments from vertex 0, each on the first three
/// unused vertices after zeroing the arcs into them from the last spine vertex.
pub fn build_k4_chain(w: &ArcLabelling) -> Result<K4Outcome> {
    let g = w.group().clone();
    let p = g.order();
    if !g.is_prime_order() || p < 3 {
        return Err(Error::invalid(format!(
            "K4 chains need a group of odd prime order, got {}",
            g.describe()
        )));
    }
    let need = k4_vertex_requirement(p);
    if w.n() < need {
        return Err(Error::invalid(format!(
            "K4 chain over Z{p} needs {need} vertices, got {}",
            w.n()
        )));
    }
    let mut base = w.clone();
    let mut switchings = Vec::new();
    let mut spine = vec![0usize];
    let mut segments = Vec::new();
    let mut pool: Vec<usize> = (1..w.n()).collect();

    for _ in 0..(p - 1) / 2 {
        let x = *spine.last().expect("non-empty");
        for &y in &pool {
            let c = base.label(x, y);
            if !c.is_zero() {
                let s = Switching::new(y, c);
                base.switch_in_place(&s)?;
                switchings.push(s);
            }
        }
        let triple = [pool[0], pool[1], pool[2]];
        if let Some(cycle) = zero_sum_cycle_in_triple(&base, triple) {
            return Ok(K4Outcome::EarlyWitness(DiCycle::new(cycle, g.zero())));
        }
        let k3 = k3_extract_on(&base, triple)?;
        let next = k3.vertex;
        let paths = [&k3.p1, &k3.p2].map(|q| {
            let mut vertices = vec![x];
            vertices.extend_from_slice(&q.vertices);
            DiPath {
                sum: base.walk_sum(&vertices),
                vertices,
            }
        });
        let mut extra = triple.iter().copied().filter(|&v| v != next);
        let extra = [extra.next().expect("two extras"), extra.next().expect("two extras")];
        pool.drain(..3);
        spine.push(next);
        segments.push(K4Segment { extra, paths });
    }
    Ok(K4Outcome::Chain(K4Chain {
        spine,
        segments,
        switchings,
        base,
    }))
}
