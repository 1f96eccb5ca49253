use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{Elem, Group};
use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;
use crate::oracle::for_each_cycle;

/// Largest group order the packed search supports (labels fit a `u64` mask).
pub const MAX_SEARCH_ORDER: usize = 64;
/// Largest vertex count the search accepts.
pub const MAX_SEARCH_N: usize = 9;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000_000;

/// Free-arc prefixes are split off until at least this many exist.
const SPLIT_TARGET: usize = 256;
const FLUSH_EVERY: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Worker threads; 0 picks the machine default.
    pub threads: usize,
    pub node_budget: u64,
    /// Only search labellings whose return column `w(1,0), w(2,0), ...` is
    /// non-decreasing.
    pub symmetry_breaking: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            threads: 0,
            node_budget: DEFAULT_NODE_BUDGET,
            symmetry_breaking: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub prune_digon: u64,
    pub prune_cycle: u64,
    pub prune_symmetry: u64,
}

impl SearchStats {
    pub fn absorb(&mut self, other: &SearchStats) {
        self.nodes += other.nodes;
        self.prune_digon += other.prune_digon;
        self.prune_cycle += other.prune_cycle;
        self.prune_symmetry += other.prune_symmetry;
    }
}

/// Arc order of the search and of the CNF encoding: vertices are added one at a
/// time, and vertex `k` brings `(0,k), (k,0), (1,k), (k,1), ..., (k-1,k), (k,k-1)`.
pub fn arc_order(n: usize) -> Vec<(usize, usize)> {
    let mut arcs = Vec::with_capacity(n * n.saturating_sub(1));
    for k in 1..n {
        for j in 0..k {
            arcs.push((j, k));
            arcs.push((k, j));
        }
    }
    arcs
}

struct Closer {
    others: Vec<u8>,
    digon: bool,
}

/// Precomputed tables for one `(group, n)` search.
pub(crate) struct Plan {
    n: usize,
    order: usize,
    add: Vec<u8>,
    neg: Vec<u8>,
    free: Vec<(usize, usize)>,
    closers: Vec<Vec<Closer>>,
    /// For a free arc `(k,0)` with `k >= 2`, the free index of `(k-1,0)`.
    sym_prev: Vec<Option<usize>>,
    group: Arc<Group>,
}

impl Plan {
    pub(crate) fn new(group: &Arc<Group>, n: usize) -> Result<Plan> {
        let order = group.order();
        if order > MAX_SEARCH_ORDER {
            return Err(Error::Budget(format!(
                "exhaustive search supports groups of order <= {MAX_SEARCH_ORDER}"
            )));
        }
        if !(2..=MAX_SEARCH_N).contains(&n) {
            return Err(Error::Budget(format!("exhaustive search supports 2 <= n <= {MAX_SEARCH_N}, got {n}")));
        }
        let mut add = vec![0u8; order * order];
        for a in group.elements() {
            for b in group.elements() {
                add[a.index() * order + b.index()] = group.add(a, b).index() as u8;
            }
        }
        let neg = group.elements().map(|a| group.neg(a).index() as u8).collect();
        let free: Vec<(usize, usize)> = arc_order(n).into_iter().filter(|&(u, _)| u != 0).collect();
        let mut index = vec![None; n * n];
        for (t, &(u, v)) in free.iter().enumerate() {
            index[u * n + v] = Some(t);
        }
        let mut closers: Vec<Vec<Closer>> = (0..free.len()).map(|_| Vec::new()).collect();
        for_each_cycle(n, 2, |cyc| {
            let k = cyc.len();
            let mut ids: Vec<usize> = (0..k)
                .filter_map(|i| index[cyc[i] * n + cyc[(i + 1) % k]])
                .collect();
            ids.sort_unstable();
            let last = ids.pop().expect("every cycle re-enters vertex 0 or avoids it");
            closers[last].push(Closer {
                others: ids.into_iter().map(|t| t as u8).collect(),
                digon: k == 2,
            });
            std::ops::ControlFlow::Continue(())
        });
        // digons first so that digon prunes are attributed before longer cycles
        for list in &mut closers {
            list.sort_by_key(|c| (!c.digon, c.others.len()));
        }
        let sym_prev = free
            .iter()
            .map(|&(u, v)| if v == 0 && u >= 2 { index[(u - 1) * n] } else { None })
            .collect();
        Ok(Plan {
            n,
            order,
            add,
            neg,
            free,
            closers,
            sym_prev,
            group: group.clone(),
        })
    }

    #[cfg(test)]
    pub(crate) fn free_arcs(&self) -> usize {
        self.free.len()
    }

    fn to_labelling(&self, assign: &[u8]) -> ArcLabelling {
        let mut table = vec![Elem::ZERO; self.n * self.n];
        for (t, &(u, v)) in self.free.iter().enumerate() {
            table[u * self.n + v] = Elem::from_index(assign[t] as usize);
        }
        ArcLabelling::from_fn(&self.group, self.n, |u, v| table[u * self.n + v]).expect("valid size")
    }

    /// Masks of labels for arc `t` that would close a zero-sum cycle, split by
    /// digon and longer cycle.
    #[inline]
    fn forbidden(&self, t: usize, assign: &[u8]) -> (u64, u64) {
        let (mut digon, mut cycle) = (0u64, 0u64);
        for c in &self.closers[t] {
            let mut s = 0u8;
            for &o in &c.others {
                s = self.add[s as usize * self.order + assign[o as usize] as usize];
            }
            let bit = 1u64 << self.neg[s as usize];
            if c.digon {
                digon |= bit;
            } else {
                cycle |= bit;
            }
        }
        (digon, cycle & !digon)
    }
}

struct Shared {
    budget: u64,
    nodes: AtomicU64,
    exceeded: AtomicBool,
    /// Lowest prefix index that found a witness.
    best: AtomicUsize,
}

struct Worker<'a> {
    plan: &'a Plan,
    shared: &'a Shared,
    symmetry: bool,
    assign: Vec<u8>,
    stats: SearchStats,
    unflushed: u64,
    id: usize,
    aborted: bool,
}

enum Mode {
    First,
    Count(u64),
}

impl Worker<'_> {
    fn tick(&mut self) -> bool {
        self.stats.nodes += 1;
        self.unflushed += 1;
        if self.unflushed >= FLUSH_EVERY {
            let total = self.shared.nodes.fetch_add(self.unflushed, Ordering::Relaxed) + self.unflushed;
            self.unflushed = 0;
            if total > self.shared.budget {
                self.shared.exceeded.store(true, Ordering::Relaxed);
            }
            if self.shared.exceeded.load(Ordering::Relaxed) || self.shared.best.load(Ordering::Relaxed) < self.id {
                self.aborted = true;
            }
        }
        !self.aborted
    }

    fn allowed(&mut self, t: usize) -> u64 {
        let (digon, cycle) = self.plan.forbidden(t, &self.assign);
        let full = if self.plan.order == 64 {
            u64::MAX
        } else {
            (1u64 << self.plan.order) - 1
        };
        let mut ok = full & !digon & !cycle;
        self.stats.prune_digon += u64::from(digon.count_ones());
        self.stats.prune_cycle += u64::from(cycle.count_ones());
        if self.symmetry {
            if let Some(p) = self.plan.sym_prev[t] {
                let floor = self.assign[p];
                let below = ok & ((1u64 << floor) - 1);
                self.stats.prune_symmetry += u64::from(below.count_ones());
                ok &= !below;
            }
        }
        ok
    }

    /// Depth-first search from arc `t`. Returns true when a (first) witness is
    /// found; in counting mode always explores everything.
    fn dfs(&mut self, t: usize, mode: &mut Mode) -> bool {
        if t == self.plan.free.len() {
            return match mode {
                Mode::First => true,
                Mode::Count(c) => {
                    *c += 1;
                    false
                }
            };
        }
        let mut ok = self.allowed(t);
        while ok != 0 {
            let x = ok.trailing_zeros() as u8;
            ok &= ok - 1;
            if !self.tick() {
                return false;
            }
            self.assign[t] = x;
            if self.dfs(t + 1, mode) {
                return true;
            }
            if self.aborted {
                return false;
            }
        }
        false
    }

    fn flush(&mut self) {
        self.shared.nodes.fetch_add(self.unflushed, Ordering::Relaxed);
        self.unflushed = 0;
    }
}

/// Pruned prefixes of the first `depth` free arcs in DFS order.
fn prefixes(plan: &Plan, shared: &Shared, symmetry: bool) -> (Vec<Vec<u8>>, SearchStats) {
    let mut worker = Worker {
        plan,
        shared,
        symmetry,
        assign: vec![0; plan.free.len()],
        stats: SearchStats::default(),
        unflushed: 0,
        id: 0,
        aborted: false,
    };
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    while layer.len() < SPLIT_TARGET && !layer.is_empty() && layer[0].len() < plan.free.len() {
        let t = layer[0].len();
        let mut next = Vec::new();
        for prefix in &layer {
            worker.assign[..t].copy_from_slice(prefix);
            let mut ok = worker.allowed(t);
            while ok != 0 {
                let x = ok.trailing_zeros() as u8;
                ok &= ok - 1;
                worker.stats.nodes += 1;
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        layer = next;
    }
    worker.flush();
    (layer, worker.stats)
}

pub(crate) struct Outcome {
    pub witness: Option<ArcLabelling>,
    pub count: u64,
    pub stats: SearchStats,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::internal(format!("thread pool: {e}")))
}

/// Runs the canonical search. In counting mode every zero-sum-free canonical
/// labelling is counted; otherwise the DFS-first one is returned.
pub(crate) fn run(plan: &Plan, opts: &SearchOptions, count: bool) -> Result<Outcome> {
    let shared = Shared {
        budget: opts.node_budget,
        nodes: AtomicU64::new(0),
        exceeded: AtomicBool::new(false),
        best: AtomicUsize::new(usize::MAX),
    };
    let (prefixes, mut stats) = prefixes(plan, &shared, opts.symmetry_breaking);
    let results: Vec<(Option<Vec<u8>>, u64, SearchStats, bool)> = pool(opts.threads)?.install(|| {
        prefixes
            .par_iter()
            .enumerate()
            .map(|(id, prefix)| {
                if !count && shared.best.load(Ordering::Relaxed) < id {
                    return (None, 0, SearchStats::default(), true);
                }
                let mut worker = Worker {
                    plan,
                    shared: &shared,
                    symmetry: opts.symmetry_breaking,
                    assign: vec![0; plan.free.len()],
                    stats: SearchStats::default(),
                    unflushed: 0,
                    id: if count { 0 } else { id },
                    aborted: false,
                };
                worker.assign[..prefix.len()].copy_from_slice(prefix);
                let mut mode = if count { Mode::Count(0) } else { Mode::First };
                let found = worker.dfs(prefix.len(), &mut mode);
                worker.flush();
                if found {
                    shared.best.fetch_min(id, Ordering::Relaxed);
                }
                let n = match mode {
                    Mode::Count(c) => c,
                    Mode::First => 0,
                };
                (found.then(|| worker.assign.clone()), n, worker.stats, worker.aborted)
            })
            .collect()
    });
    if results.iter().map(|r| r.2.nodes).sum::<u64>() + stats.nodes > opts.node_budget {
        shared.exceeded.store(true, Ordering::Relaxed);
    }
    if shared.exceeded.load(Ordering::Relaxed) {
        return Err(Error::Budget(format!(
            "search exceeded the node budget of {} (try sat-export)",
            opts.node_budget
        )));
    }
    let winner = results.iter().position(|r| r.0.is_some());
    let last = winner.unwrap_or(results.len().saturating_sub(1));
    let mut total = 0;
    for r in results.iter().take(last + 1) {
        if r.3 {
            return Err(Error::internal("a branch before the winner was cancelled"));
        }
        stats.absorb(&r.2);
        total += r.1;
    }
    Ok(Outcome {
        witness: winner.map(|i| plan.to_labelling(results[i].0.as_deref().expect("winner"))),
        count: total,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_order_is_vertex_incremental() {
        assert_eq!(arc_order(3), vec![(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]);
        assert_eq!(arc_order(6).len(), 30);
    }

    #[test]
    fn every_cycle_has_a_closing_arc() {
        let g = Group::cyclic(2).unwrap();
        for n in 2..=6 {
            let plan = Plan::new(&g, n).unwrap();
            let total: usize = plan.closers.iter().map(|c| c.len()).sum();
            assert_eq!(total as u64, crate::oracle::count_cycles(n, 2));
            assert_eq!(plan.free_arcs(), (n - 1) * (n - 1));
        }
    }

    #[test]
    fn pruned_subtrees_hold_no_solutions() {
        use crate::oracle::is_zero_sum_free;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 100 {
            let g = Group::cyclic(rng.gen_range(2..=3)).unwrap();
            let plan = Plan::new(&g, 4).unwrap();
            let shared = Shared {
                budget: u64::MAX,
                nodes: AtomicU64::new(0),
                exceeded: AtomicBool::new(false),
                best: AtomicUsize::new(usize::MAX),
            };
            let mut worker = Worker {
                plan: &plan,
                shared: &shared,
                symmetry: false,
                assign: vec![0; plan.free_arcs()],
                stats: SearchStats::default(),
                unflushed: 0,
                id: 0,
                aborted: false,
            };
            // walk a random unpruned prefix, then look at the pruned labels of the next arc
            let depth = rng.gen_range(3..plan.free_arcs());
            let mut alive = true;
            for t in 0..depth {
                let ok = worker.allowed(t);
                if ok == 0 {
                    alive = false;
                    break;
                }
                let choices: Vec<u8> = (0..64).filter(|b| ok >> b & 1 == 1).collect();
                worker.assign[t] = choices[rng.gen_range(0..choices.len())];
            }
            let full = (1u64 << g.order()) - 1;
            let pruned = full & !worker.allowed(depth);
            if !alive || pruned == 0 {
                continue;
            }
            let x = pruned.trailing_zeros() as u8;
            worker.assign[depth] = x;
            let rest = plan.free_arcs() - depth - 1;
            let q = g.order();
            for code in 0..q.pow(rest as u32) {
                let mut assign = worker.assign.clone();
                for k in 0..rest {
                    assign[depth + 1 + k] = (code / q.pow(k as u32) % q) as u8;
                }
                assert!(!is_zero_sum_free(&plan.to_labelling(&assign), 2).unwrap());
            }
            checked += 1;
        }
    }
}
