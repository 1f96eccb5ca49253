//! The completeness-or-concentration dichotomy, built by growing a chain of
//! triangles and recursing into quotient labellings whenever the reachable
//! sums swallow a non-trivial subgroup.

use crate::abelian::{cyclic_subgroup, Elem, QuotientMap, Subgroup};
use crate::error::{Error, Result};
use crate::labelling::{ArcLabelling, Switching};

use super::{chain_path_for_target, TriangleChain};

/// Outcome of [`dichotomy`]; both variants are stated for the labelling
/// obtained by applying `switchings` to the input.
#[derive(Clone, Debug)]
pub enum Dichotomy {
    /// Every arc inside `vertices` is labelled from the proper subgroup.
    Concentrated {
        vertices: Vec<usize>,
        subgroup: Subgroup,
        switchings: Vec<Switching>,
    },
    /// `paths[a]` is a simple `u -> v` path with sum `a`, for every element `a`.
    Complete {
        u: usize,
        v: usize,
        paths: Vec<Vec<usize>>,
        switchings: Vec<Switching>,
    },
}

impl Dichotomy {
    pub fn switchings(&self) -> &[Switching] {
        match self {
            Dichotomy::Concentrated { switchings, .. } | Dichotomy::Complete { switchings, .. } => switchings,
        }
    }
}

/// Runs the dichotomy on `w`. In the complete case every returned path has at
/// least `min_path_len` arcs; lengths 1 and 2 are supported.
pub fn dichotomy(w: &ArcLabelling, min_path_len: usize) -> Result<Dichotomy> {
    let g = w.group().clone();
    if min_path_len > 2 {
        return Err(Error::invalid("paths of length above 2 cannot be required"));
    }
    if g.order() < 2 {
        return Err(Error::invalid("the dichotomy needs a non-trivial group"));
    }
    let mut chain = TriangleChain {
        spine: vec![0],
        detours: Vec::new(),
        sums: Vec::new(),
        switchings: Vec::new(),
        base: w.clone(),
    };
    let mut pool: Vec<usize> = (1..w.n()).collect();
    let mut reach = vec![false; g.order()];
    reach[0] = true;

    loop {
        let full = reach.iter().all(|r| *r);
        if full && chain.sums.len() >= min_path_len {
            let paths = g
                .elements()
                .map(|a| Ok(chain_path_for_target(&chain, a)?.vertices))
                .collect::<Result<_>>()?;
            return Ok(Dichotomy::Complete {
                u: chain.spine[0],
                v: *chain.spine.last().expect("non-empty"),
                paths,
                switchings: chain.switchings,
            });
        }

        let x = *chain.spine.last().expect("non-empty");
        for &y in &pool {
            let c = chain.base.label(x, y);
            if !c.is_zero() {
                let s = Switching::new(y, c);
                chain.base.switch_in_place(&s)?;
                chain.switchings.push(s);
            }
        }
        if pool.len() < 2 {
            return Ok(Dichotomy::Concentrated {
                vertices: pool,
                subgroup: Subgroup::trivial(&g),
                switchings: chain.switchings,
            });
        }

        let contained = g
            .elements()
            .skip(1)
            .map(|a| cyclic_subgroup(&g, a))
            .find(|b| b.is_subset_of(&reach));
        let b = match contained {
            Some(b) if !full => b,
            _ => {
                // extend the chain along the first suitable pool arc
                let arcs = pool
                    .iter()
                    .flat_map(|&y| pool.iter().filter(move |&&t| t != y).map(move |&t| (y, t)));
                let pick = if full {
                    arcs.clone().next()
                } else {
                    arcs.clone().find(|&(y, t)| !chain.base.label(y, t).is_zero())
                };
                let Some((y, t)) = pick else {
                    return Ok(Dichotomy::Concentrated {
                        vertices: pool,
                        subgroup: Subgroup::trivial(&g),
                        switchings: chain.switchings,
                    });
                };
                let a = chain.base.label(y, t);
                let before: Vec<usize> = (0..g.order()).filter(|&i| reach[i]).collect();
                let grew = before
                    .iter()
                    .any(|&i| !reach[g.add(Elem::from_index(i), a).index()]);
                if !grew && !full {
                    return Err(Error::internal("extension did not enlarge the reachable sums"));
                }
                for i in before {
                    reach[g.add(Elem::from_index(i), a).index()] = true;
                }
                pool.retain(|&p| p != y && p != t);
                chain.spine.push(t);
                chain.detours.push(y);
                chain.sums.push(g.add(chain.base.label(x, y), a));
                continue;
            }
        };

        let factor = chain.base.b_factor(&pool, &b)?;
        let quotient = &factor.quotient;
        match dichotomy(&factor.labelling, 1)? {
            Dichotomy::Concentrated {
                vertices,
                subgroup,
                switchings,
            } => {
                let lifted = lift_switchings(quotient, &pool, &switchings);
                let mut base = chain.base.clone();
                for s in &lifted {
                    base.switch_in_place(s)?;
                }
                let vertices: Vec<usize> = vertices.iter().map(|&i| pool[i]).collect();
                let subgroup = quotient.preimage(&subgroup)?;
                let inside = vertices
                    .iter()
                    .all(|&p| vertices.iter().all(|&q| p == q || subgroup.contains(base.label(p, q))));
                if !inside || subgroup.is_whole() {
                    return Err(Error::internal("lifted concentration does not hold"));
                }
                let mut all = chain.switchings;
                all.extend(lifted);
                return Ok(Dichotomy::Concentrated {
                    vertices,
                    subgroup,
                    switchings: all,
                });
            }
            Dichotomy::Complete { v, paths, .. } => {
                // the quotient paths cover every coset under the unswitched
                // factor as well; glue each onto a chain prefix cancelling the
                // B-part of its sum
                let v = pool[v];
                let lifted: Vec<(Vec<usize>, Elem)> = paths
                    .iter()
                    .map(|p| {
                        let p: Vec<usize> = p.iter().map(|&i| pool[i]).collect();
                        let s = chain.base.walk_sum(&p);
                        (p, s)
                    })
                    .collect();
                let mut out = Vec::with_capacity(g.order());
                for a in g.elements() {
                    let (p, s) = lifted
                        .iter()
                        .find(|(_, s)| b.contains(g.sub(*s, a)))
                        .ok_or_else(|| Error::internal("quotient paths miss a coset"))?;
                    let prefix = chain_path_for_target(&chain, g.sub(a, *s))?;
                    let mut path = prefix.vertices;
                    path.extend_from_slice(p);
                    if chain.base.walk_sum(&path) != a {
                        return Err(Error::internal("glued path has the wrong sum"));
                    }
                    out.push(path);
                }
                return Ok(Dichotomy::Complete {
                    u: chain.spine[0],
                    v,
                    paths: out,
                    switchings: chain.switchings,
                });
            }
        }
    }
}

/// Lifts quotient switchings on the pool to ambient switchings on the full
/// vertex set via coset representatives.
fn lift_switchings(quotient: &QuotientMap, pool: &[usize], switchings: &[Switching]) -> Vec<Switching> {
    switchings
        .iter()
        .map(|s| Switching::new(pool[s.vertex], quotient.representative(s.value)))
        .collect()
}
