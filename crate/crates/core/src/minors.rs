//! Cycles of length divisible by `q` from an explicit complete-graph minor model.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{Elem, Group};
use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;
use crate::solver::{solve_general, solve_prime, Method};

/// A simple undirected graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl HostGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) leaves the {n}-vertex host")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            if !adj[u].insert(v) {
                return Err(Error::invalid(format!("edge ({u},{v}) listed twice")));
            }
            adj[v].insert(u);
        }
        Ok(HostGraph { adj })
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj.get(u).is_some_and(|a| a.contains(&v))
    }

    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[u].iter().copied()
    }

    /// Each edge once, as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|u| self.adj[u].range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    fn induced_edges(&self, set: &BTreeSet<usize>) -> usize {
        set.iter().map(|&u| self.adj[u].iter().filter(|v| set.contains(v)).count()).sum::<usize>() / 2
    }

    /// Vertices of `set` reachable from `from` inside `G[set]`, with BFS parents.
    fn bfs(&self, set: &BTreeSet<usize>, from: usize) -> Vec<(usize, Option<usize>)> {
        let mut seen = vec![(from, None)];
        let mut visited: BTreeSet<usize> = [from].into();
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if set.contains(&v) && visited.insert(v) {
                    seen.push((v, Some(u)));
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    fn is_connected_on(&self, set: &BTreeSet<usize>) -> bool {
        match set.first() {
            None => true,
            Some(&s) => self.bfs(set, s).len() == set.len(),
        }
    }

    /// Shortest path from `from` to `to` inside `G[set]`.
    fn path_within(&self, set: &BTreeSet<usize>, from: usize, to: usize) -> Option<Vec<usize>> {
        let order = self.bfs(set, from);
        let parent = |x: usize| order.iter().find(|(v, _)| *v == x).map(|(_, p)| *p);
        parent(to)?;
        let mut path = vec![to];
        let mut cur = to;
        while let Some(Some(p)) = parent(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Supernodes `X_i^+` and `X_i^-` of one index `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupernodePair {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorModel {
    pub pairs: Vec<SupernodePair>,
}

impl MinorModel {
    pub fn m(&self) -> usize {
        self.pairs.len()
    }

    fn plus(&self, i: usize) -> BTreeSet<usize> {
        self.pairs[i].plus.iter().copied().collect()
    }

    fn minus(&self, i: usize) -> BTreeSet<usize> {
        self.pairs[i].minus.iter().copied().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

/// A failed condition of a minor model.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("X_{pair}^{side} is empty")]
    Empty { pair: usize, side: Side },
    #[error("vertex {vertex} is not a host vertex")]
    OutOfRange { vertex: usize },
    #[error("vertex {vertex} lies in more than one supernode")]
    Overlap { vertex: usize },
    #[error("{count} host edges join X_{pair}^+ and X_{pair}^-; exactly one is required")]
    ContactEdges { pair: usize, count: usize },
    #[error("G[X_{plus}^+ u X_{minus}^-] is not a tree: {reason}")]
    NotATree { plus: usize, minus: usize, reason: String },
    /// Reported but not disqualifying.
    #[error("X_{pair}^{side} does not induce a connected subgraph (advisory)")]
    DisconnectedSupernode { pair: usize, side: Side },
}

impl Violation {
    pub fn is_advisory(&self) -> bool {
        matches!(self, Violation::DisconnectedSupernode { .. })
    }
}

/// Every violated condition of `model` in `g`, advisory ones included.
pub fn validate_minor_model(g: &HostGraph, model: &MinorModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut owner = vec![false; g.n()];
    let mut structural = false;
    for (i, pair) in model.pairs.iter().enumerate() {
        for (side, set) in [(Side::Plus, &pair.plus), (Side::Minus, &pair.minus)] {
            if set.is_empty() {
                out.push(Violation::Empty { pair: i, side });
                structural = true;
            }
            for &v in set {
                if v >= g.n() {
                    out.push(Violation::OutOfRange { vertex: v });
                    structural = true;
                } else if std::mem::replace(&mut owner[v], true) {
                    out.push(Violation::Overlap { vertex: v });
                    structural = true;
                }
            }
        }
    }
    if structural {
        return out;
    }
    for i in 0..model.m() {
        let (plus, minus) = (model.plus(i), model.minus(i));
        let count = plus.iter().map(|&u| minus.iter().filter(|&&v| g.has_edge(u, v)).count()).sum();
        if count != 1 {
            out.push(Violation::ContactEdges { pair: i, count });
        }
        for (side, set) in [(Side::Plus, &plus), (Side::Minus, &minus)] {
            if !g.is_connected_on(set) {
                out.push(Violation::DisconnectedSupernode { pair: i, side });
            }
        }
    }
    for i in 0..model.m() {
        for j in 0..model.m() {
            if i == j {
                continue;
            }
            let union: BTreeSet<usize> = model.plus(i).union(&model.minus(j)).copied().collect();
            let edges = g.induced_edges(&union);
            let reason = if !g.is_connected_on(&union) {
                Some("disconnected".to_string())
            } else if edges + 1 != union.len() {
                Some(format!("{edges} edges on {} vertices", union.len()))
            } else {
                None
            };
            if let Some(reason) = reason {
                out.push(Violation::NotATree { plus: i, minus: j, reason });
            }
        }
    }
    out
}

fn require_valid(g: &HostGraph, model: &MinorModel) -> Result<()> {
    let hard: Vec<String> = validate_minor_model(g, model)
        .iter()
        .filter(|v| !v.is_advisory())
        .map(ToString::to_string)
        .collect();
    if hard.is_empty() {
        Ok(())
    } else {
        Err(Error::invalid(format!("invalid minor model: {}", hard.join("; "))))
    }
}

/// Endpoints `(x_i^+, x_i^-)` of the unique contact edge of index `i`.
fn contact(g: &HostGraph, model: &MinorModel, i: usize) -> (usize, usize) {
    let minus = model.minus(i);
    model.pairs[i]
        .plus
        .iter()
        .find_map(|&u| minus.iter().find(|&&v| g.has_edge(u, v)).map(|&v| (u, v)))
        .expect("validated model has a contact edge")
}

/// Host path `x_i^+ ~> x_j^-` inside the tree `G[X_i^+ u X_j^-]`.
fn tree_path(g: &HostGraph, model: &MinorModel, i: usize, j: usize) -> Vec<usize> {
    let union: BTreeSet<usize> = model.plus(i).union(&model.minus(j)).copied().collect();
    g.path_within(&union, contact(g, model, i).0, contact(g, model, j).1)
        .expect("validated union is connected")
}

/// `w(i, j) = 1 + |x_i^+ ~> x_j^-|` modulo `q`, on `K_m`.
pub fn auxiliary_labelling(g: &HostGraph, model: &MinorModel, q: u32) -> Result<ArcLabelling> {
    if q < 2 {
        return Err(Error::invalid("q must be at least 2"));
    }
    require_valid(g, model)?;
    let zq = Group::cyclic(q)?;
    let m = model.m();
    let mut labels = vec![Elem::ZERO; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let edges = tree_path(g, model, i, j).len() - 1;
                labels[i * m + j] = Elem::from_index((1 + edges) % q as usize);
            }
        }
    }
    ArcLabelling::from_fn(&zq, m, |i, j| labels[i * m + j])
}

/// A host cycle of length divisible by `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostCycle {
    pub cycle: Vec<usize>,
    pub length: usize,
    pub q: u32,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub host_cycle: HostCycle,
    /// Zero-sum cycle of the auxiliary labelling, as indices `0..m`.
    pub auxiliary_cycle: Vec<usize>,
    pub method: Method,
}

/// Finds a zero-sum cycle of the auxiliary labelling and expands it: each arc
/// `(i, j)` becomes the tree path `x_i^+ ~> x_j^-` followed by the contact edge
/// `x_j^- x_j^+`. Fails with [`Error::ZeroSumFree`] when the auxiliary
/// labelling has no zero-sum cycle.
pub fn extract_divisible_cycle(g: &HostGraph, model: &MinorModel, q: u32) -> Result<Extraction> {
    let w = auxiliary_labelling(g, model, q)?;
    let report = if w.group().is_prime_order() && q > 2 {
        solve_prime(&w)?
    } else {
        solve_general(&w)?
    };
    let aux = report.witness.vertices().to_vec();
    // consecutive tree paths meet along the contact edge x_j^- x_j^+
    let cycle: Vec<usize> = (0..aux.len())
        .flat_map(|k| tree_path(g, model, aux[k], aux[(k + 1) % aux.len()]))
        .collect();
    verify_host_cycle(g, &cycle, q)?;
    let length = cycle.len();
    Ok(Extraction {
        host_cycle: HostCycle { cycle, length, q },
        auxiliary_cycle: aux,
        method: report.method,
    })
}

/// Checks that `cycle` is a simple cycle of `g` whose length is divisible by `q`.
pub fn verify_host_cycle(g: &HostGraph, cycle: &[usize], q: u32) -> Result<()> {
    let len = cycle.len();
    if len < 3 {
        return Err(Error::internal(format!("host cycle of length {len}")));
    }
    let distinct: BTreeSet<usize> = cycle.iter().copied().collect();
    if distinct.len() != len {
        return Err(Error::internal("host cycle repeats a vertex"));
    }
    for k in 0..len {
        let (u, v) = (cycle[k], cycle[(k + 1) % len]);
        if !g.has_edge(u, v) {
            return Err(Error::internal(format!("host cycle uses non-edge ({u},{v})")));
        }
    }
    if len % q as usize != 0 {
        return Err(Error::internal(format!("host cycle length {len} is not divisible by {q}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelShape {
    /// Every supernode is one vertex.
    Singletons,
    /// Supernodes are random trees of up to `max_size` vertices.
    Trees { max_size: usize },
}

/// A seeded random valid model with `m` pairs, with noise edges between
/// supernodes of the same sign, and shuffled vertex names.
pub fn random_minor_model(m: usize, shape: ModelShape, seed: u64) -> Result<(HostGraph, MinorModel)> {
    if m == 0 {
        return Err(Error::invalid("a minor model needs at least one pair"));
    }
    let max_size = match shape {
        ModelShape::Singletons => 1,
        ModelShape::Trees { max_size } if max_size >= 1 => max_size,
        ModelShape::Trees { .. } => return Err(Error::invalid("supernode size must be at least 1")),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = 0usize;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // sets[2i] = X_i^+, sets[2i+1] = X_i^-
    let mut sets: Vec<Vec<usize>> = Vec::with_capacity(2 * m);
    for _ in 0..2 * m {
        let size = rng.gen_range(1..=max_size);
        let set: Vec<usize> = (next..next + size).collect();
        next += size;
        for k in 1..size {
            edges.push((set[rng.gen_range(0..k)], set[k]));
        }
        sets.push(set);
    }
    let pick = |rng: &mut ChaCha8Rng, s: &Vec<usize>| s[rng.gen_range(0..s.len())];
    for i in 0..m {
        for j in 0..m {
            let (a, b) = (pick(&mut rng, &sets[2 * i]), pick(&mut rng, &sets[2 * j + 1]));
            edges.push((a, b));
        }
    }
    for a in 0..2 * m {
        for b in (a + 2..2 * m).step_by(2) {
            if rng.gen_bool(0.3) {
                let (x, y) = (pick(&mut rng, &sets[a]), pick(&mut rng, &sets[b]));
                edges.push((x, y));
            }
        }
    }
    let mut perm: Vec<usize> = (0..next).collect();
    perm.shuffle(&mut rng);
    let edges: Vec<(usize, usize)> = edges.into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    let rename = |s: &Vec<usize>| {
        let mut r: Vec<usize> = s.iter().map(|&v| perm[v]).collect();
        r.sort_unstable();
        r
    };
    let pairs = (0..m)
        .map(|i| SupernodePair {
            plus: rename(&sets[2 * i]),
            minus: rename(&sets[2 * i + 1]),
        })
        .collect();
    Ok((HostGraph::new(next, &edges)?, MinorModel { pairs }))
}

/// Model file: `{"host": {"n", "edges"}, "pairs": [{"plus", "minus"}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub host: HostFile,
    pub pairs: Vec<SupernodePair>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostFile {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl ModelFile {
    pub fn new(g: &HostGraph, model: &MinorModel) -> Self {
        ModelFile {
            host: HostFile {
                n: g.n(),
                edges: g.edges(),
            },
            pairs: model.pairs.clone(),
        }
    }

    pub fn parse(&self) -> Result<(HostGraph, MinorModel)> {
        Ok((
            HostGraph::new(self.host.n, &self.host.edges)?,
            MinorModel {
                pairs: self.pairs.clone(),
            },
        ))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("minor model file: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::internal(e.to_string()))
    }
}
