//! Constructive zero-sum cycle finders: the recursive general solver built on
//! triangle chains, the prime-order solver built on K₄ chains, and the
//! undirected wrapper.

use serde::{Deserialize, Serialize};

use crate::abelian::{Elem, GroupElem};
use crate::chains::lemma::{dichotomy, Dichotomy};
use crate::chains::{
    build_k4_chain, build_triangle_chain, chain_path_for_target, k4_vertex_requirement, ChainOptions, ChainOutcome,
    K4Outcome, SegmentChain,
};
use crate::error::{Error, Result};
use crate::labelling::{ArcLabelling, EdgeLabelling, Switching};
use crate::oracle::{find_zero_sum_cycle_exhaustive, verify_cycle, DiCycle, WitnessFile, HARD_VERTEX_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GeneralRecursive,
    PrimeChain,
    ExhaustiveFallback,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::GeneralRecursive => "general-recursive",
            Method::PrimeChain => "prime-chain",
            Method::ExhaustiveFallback => "exhaustive-fallback",
        }
    }
}

/// How the general solver obtains its completeness-or-concentration split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Grow triangle chains greedily and recurse into the subgroup generated by
    /// the leftover pool labels.
    #[default]
    Greedy,
    /// Follow the dichotomy through quotient labellings before recursing.
    Quotient,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Minimum witness length in arcs.
    pub min_len: usize,
    pub strategy: Strategy,
    /// Run the exhaustive search when the construction stalls on a small input.
    pub fallback: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            min_len: 2,
            strategy: Strategy::Greedy,
            fallback: true,
        }
    }
}

/// One descent into a concentrated vertex set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub vertices: usize,
    pub group_order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    /// Verified zero-sum against the input labelling.
    pub witness: DiCycle,
    pub method: Method,
    pub trace: Vec<TraceStep>,
    /// Every switching the construction applied, in input vertex and element
    /// terms.
    pub switchings: Vec<Switching>,
}

/// Serialized form of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub method: Method,
    pub witness: WitnessFile,
    pub trace: Vec<(usize, usize)>,
    pub switchings: Vec<(usize, GroupElem)>,
}

impl SolveReport {
    pub fn to_file(&self, w: &ArcLabelling) -> Result<ReportFile> {
        let g = w.group();
        let switchings = self
            .switchings
            .iter()
            .map(|s| {
                g.residues(s.value)
                    .map(|r| (s.vertex, r))
                    .ok_or_else(|| Error::invalid("reports can only be written over a group spec"))
            })
            .collect::<Result<_>>()?;
        Ok(ReportFile {
            method: self.method,
            witness: WitnessFile::cycle(w, &self.witness)?,
            trace: self.trace.iter().map(|t| (t.vertices, t.group_order)).collect(),
            switchings,
        })
    }
}

/// A labelling of a vertex subset over a subgroup, with maps back to the input.
struct Level {
    w: ArcLabelling,
    vertices: Vec<usize>,
    embed: Vec<Elem>,
}

enum Found {
    Cycle { vertices: Vec<usize>, exhaustive: bool },
    Stalled(String),
}

struct Run {
    opts: SolveOptions,
    trace: Vec<TraceStep>,
    switchings: Vec<Switching>,
}

impl Run {
    fn record(&mut self, level: &Level, seq: &[Switching]) {
        self.switchings.extend(
            seq.iter()
                .map(|s| Switching::new(level.vertices[s.vertex], level.embed[s.value.index()])),
        );
    }

    fn descend(&mut self, level: Level) -> Result<Found> {
        let (switched, outcome) = match self.opts.strategy {
            Strategy::Greedy => self.greedy_step(&level)?,
            Strategy::Quotient => self.quotient_step(&level)?,
        };
        let local = match outcome {
            Step::Cycle(c) => Found::Cycle {
                vertices: c,
                exhaustive: false,
            },
            Step::Concentrated(vertices, subgroup) if subgroup.is_trivial() => {
                if vertices.len() >= self.opts.min_len {
                    Found::Cycle {
                        vertices: vertices[..self.opts.min_len].to_vec(),
                        exhaustive: false,
                    }
                } else {
                    Found::Stalled(format!("trivial concentration on only {} vertices", vertices.len()))
                }
            }
            Step::Concentrated(vertices, subgroup) => {
                let (n, order) = (level.w.n(), level.w.group().order());
                if vertices.len() + 4 * order < n || 2 * subgroup.order() > order {
                    return Err(Error::internal(format!(
                        "concentration on {} of {n} vertices over a subgroup of order {} in {order}",
                        vertices.len(),
                        subgroup.order()
                    )));
                }
                self.trace.push(TraceStep {
                    vertices: vertices.len(),
                    group_order: subgroup.order(),
                });
                let next = Level {
                    w: switched.restrict_to_subgroup(&vertices, &subgroup)?,
                    embed: subgroup.elements().iter().map(|e| level.embed[e.index()]).collect(),
                    vertices: vertices.iter().map(|&v| level.vertices[v]).collect(),
                };
                return self.descend(next);
            }
            Step::Stalled(why) => {
                if self.opts.fallback && level.w.n() <= HARD_VERTEX_LIMIT {
                    match find_zero_sum_cycle_exhaustive(&level.w, self.opts.min_len)? {
                        Some(c) => Found::Cycle {
                            vertices: c.vertices().to_vec(),
                            exhaustive: true,
                        },
                        None => Found::Stalled(why),
                    }
                } else {
                    Found::Stalled(why)
                }
            }
        };
        Ok(match local {
            Found::Cycle { vertices, exhaustive } => {
                if !level.w.walk_sum(&closed(&vertices)).is_zero() {
                    return Err(Error::internal("constructed cycle is not zero-sum"));
                }
                Found::Cycle {
                    vertices: vertices.iter().map(|&v| level.vertices[v]).collect(),
                    exhaustive,
                }
            }
            stalled => stalled,
        })
    }

    fn greedy_step(&mut self, level: &Level) -> Result<(ArcLabelling, Step)> {
        let opts = ChainOptions {
            min_segments: self.opts.min_len - 1,
            ..ChainOptions::default()
        };
        Ok(match build_triangle_chain(&level.w, opts)? {
            ChainOutcome::Complete { chain, u, v } => {
                self.record(level, &chain.switchings);
                let target = chain.base.group().neg(chain.base.label(v, u));
                let path = chain_path_for_target(&chain, target)?;
                (chain.base, Step::Cycle(path.vertices))
            }
            ChainOutcome::SubgroupConcentration(c) => {
                self.record(level, &c.switchings);
                (c.labelling, Step::Concentrated(c.vertices, c.subgroup))
            }
            ChainOutcome::Stalled(why) => (level.w.clone(), Step::Stalled(why)),
        })
    }

    fn quotient_step(&mut self, level: &Level) -> Result<(ArcLabelling, Step)> {
        if self.opts.min_len > 3 {
            return Err(Error::invalid("the quotient strategy supports minimum lengths up to 3"));
        }
        let d = dichotomy(&level.w, self.opts.min_len - 1)?;
        self.record(level, d.switchings());
        let switched = level.w.apply_switchings(d.switchings())?;
        let step = match d {
            Dichotomy::Complete { u, v, paths, .. } => {
                let target = switched.group().neg(switched.label(v, u));
                Step::Cycle(paths[target.index()].clone())
            }
            Dichotomy::Concentrated { vertices, subgroup, .. } => {
                if vertices.len() < 2 {
                    Step::Stalled(format!("concentration on only {} vertices", vertices.len()))
                } else {
                    Step::Concentrated(vertices, subgroup)
                }
            }
        };
        Ok((switched, step))
    }
}

enum Step {
    Cycle(Vec<usize>),
    Concentrated(Vec<usize>, crate::abelian::Subgroup),
    Stalled(String),
}

fn closed(cycle: &[usize]) -> Vec<usize> {
    let mut walk = cycle.to_vec();
    walk.push(cycle[0]);
    walk
}

fn finish(w: &ArcLabelling, vertices: Vec<usize>, method: Method, trace: Vec<TraceStep>, switchings: Vec<Switching>) -> Result<SolveReport> {
    let sum = verify_cycle(w, &vertices)?;
    if !sum.is_zero() {
        return Err(Error::internal("witness does not verify against the input labelling"));
    }
    Ok(SolveReport {
        witness: DiCycle::new(vertices, sum),
        method,
        trace,
        switchings,
    })
}

/// Exhaustive search on the input, used when a construction cannot finish.
fn fallback(w: &ArcLabelling, opts: &SolveOptions, why: &str, guarantee: usize) -> Result<SolveReport> {
    let n = w.n();
    if n >= guarantee {
        return Err(Error::internal(format!("construction stalled above its guarantee: {why}")));
    }
    if !opts.fallback || n > HARD_VERTEX_LIMIT {
        return Err(Error::Inconclusive(format!(
            "construction stalled ({why}) on K_{n}, below the guarantee of {guarantee} vertices"
        )));
    }
    match find_zero_sum_cycle_exhaustive(w, opts.min_len)? {
        Some(c) => finish(w, c.vertices().to_vec(), Method::ExhaustiveFallback, Vec::new(), Vec::new()),
        None => Err(Error::ZeroSumFree(format!(
            "no zero-sum cycle of length >= {} on K_{n}, verified exhaustively",
            opts.min_len
        ))),
    }
}

pub fn solve_general(w: &ArcLabelling) -> Result<SolveReport> {
    solve_general_with(w, SolveOptions::default())
}

/// Finds a zero-sum cycle by the chain-or-concentration recursion. Success is
/// guaranteed from `8|A|` vertices on; smaller inputs are attempted anyway.
pub fn solve_general_with(w: &ArcLabelling, opts: SolveOptions) -> Result<SolveReport> {
    if opts.min_len < 2 {
        return Err(Error::invalid("cycles have at least 2 arcs"));
    }
    let g = w.group();
    let mut run = Run {
        opts,
        trace: Vec::new(),
        switchings: Vec::new(),
    };
    let top = Level {
        w: w.clone(),
        vertices: (0..w.n()).collect(),
        embed: g.elements().collect(),
    };
    match run.descend(top)? {
        Found::Cycle { vertices, exhaustive } => {
            let method = if exhaustive {
                Method::ExhaustiveFallback
            } else {
                Method::GeneralRecursive
            };
            finish(w, vertices, method, run.trace, run.switchings)
        }
        Found::Stalled(why) => fallback(w, &opts, &why, 8 * g.order()),
    }
}

/// Finds a zero-sum cycle over `Z_p` with a chain of K₄'s. Success is
/// guaranteed from `(3p - 1) / 2` vertices on.
pub fn solve_prime(w: &ArcLabelling) -> Result<SolveReport> {
    let g = w.group();
    let p = g.order();
    if !g.is_prime_order() || p < 3 {
        return Err(Error::invalid(format!(
            "the prime solver needs a group of odd prime order, got {}",
            g.describe()
        )));
    }
    let need = k4_vertex_requirement(p);
    if w.n() < need {
        let why = format!("a K4 chain over Z{p} needs {need} vertices");
        return fallback(w, &SolveOptions::default(), &why, need);
    }
    match build_k4_chain(w)? {
        K4Outcome::EarlyWitness(c) => finish(w, c.vertices().to_vec(), Method::PrimeChain, Vec::new(), Vec::new()),
        K4Outcome::Chain(chain) => {
            let (u, v) = (chain.start(), chain.end());
            let target = g.neg(chain.base.label(v, u));
            let path = chain_path_for_target(&chain, target)?;
            finish(w, path.vertices, Method::PrimeChain, Vec::new(), chain.switchings)
        }
    }
}

/// Zero-sum cycle with at least 3 edges under a symmetric labelling.
pub fn solve_undirected(e: &EdgeLabelling) -> Result<SolveReport> {
    solve_general_with(
        &e.lift(),
        SolveOptions {
            min_len: 3,
            ..SolveOptions::default()
        },
    )
}
