//! Exact values of `n(A)` by exhaustive search over canonical labellings, and
//! a CNF encoding of the same question.

mod dpll;
mod sat;
mod search;

use std::sync::Arc;
use std::time::{Duration, Instant};

pub use dpll::{solve_cnf, SatOutcome};
pub use sat::{parse_model, sat_export, sat_import_verify, Annotation, CnfInstance, SatOptions, MAX_SAT_N};
pub use search::{arc_order, SearchOptions, SearchStats, DEFAULT_NODE_BUDGET, MAX_SEARCH_N, MAX_SEARCH_ORDER};

use crate::abelian::{Group, GroupSpec};
use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;
use crate::oracle::is_zero_sum_free;

/// Outcome of [`compute_n_a`].
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub group: GroupSpec,
    pub n_a: usize,
    /// Zero-sum-free labelling of `K_{n(A)-1}`.
    pub witness: ArcLabelling,
    /// Summed over every `n` searched.
    pub stats: SearchStats,
    /// Per searched `n`: whether a zero-sum-free labelling exists, and the stats.
    pub per_n: Vec<(usize, bool, SearchStats)>,
    pub wall_time: Duration,
}

/// A zero-sum-free labelling of `K_n` in first-row-zero form, or `None` if
/// every labelling of `K_n` carries a zero-sum cycle.
pub fn exists_zero_sum_free(group: &Arc<Group>, n: usize, opts: &SearchOptions) -> Result<Option<ArcLabelling>> {
    Ok(exists_with_stats(group, n, opts)?.0)
}

pub fn exists_with_stats(
    group: &Arc<Group>,
    n: usize,
    opts: &SearchOptions,
) -> Result<(Option<ArcLabelling>, SearchStats)> {
    let plan = search::Plan::new(group, n)?;
    let out = search::run(&plan, opts, false)?;
    if let Some(w) = &out.witness {
        if !w.is_canonical() || !is_zero_sum_free(w, 2)? {
            return Err(Error::internal("search returned a labelling that is not zero-sum-free"));
        }
    }
    Ok((out.witness, out.stats))
}

/// Number of zero-sum-free labellings of `K_n` in first-row-zero form.
pub fn count_canonical_zero_sum_free(group: &Arc<Group>, n: usize, opts: &SearchOptions) -> Result<u64> {
    let plan = search::Plan::new(group, n)?;
    Ok(search::run(&plan, opts, true)?.count)
}

/// The least `n <= n_max` admitting no zero-sum-free labelling of `K_n`.
pub fn compute_n_a(spec: &GroupSpec, n_max: usize, opts: &SearchOptions) -> Result<SearchResult> {
    if n_max < 2 {
        return Err(Error::invalid("max n must be at least 2"));
    }
    let start = Instant::now();
    let group = Group::from_spec(spec)?;
    let mut stats = SearchStats::default();
    let mut per_n = Vec::new();
    let mut witness = None;
    for n in 2..=n_max {
        let (found, s) = exists_with_stats(&group, n, opts)?;
        log::info!("{spec}: K_{n} {} ({} nodes)", if found.is_some() { "has a zero-sum-free labelling" } else { "has none" }, s.nodes);
        stats.absorb(&s);
        per_n.push((n, found.is_some(), s));
        match found {
            Some(w) => witness = Some(w),
            None => {
                let witness = witness.ok_or_else(|| Error::internal("K_2 always has a zero-sum-free labelling"))?;
                return Ok(SearchResult {
                    group: spec.clone(),
                    n_a: n,
                    witness,
                    stats,
                    per_n,
                    wall_time: start.elapsed(),
                });
            }
        }
    }
    Err(Error::Budget(format!(
        "n({spec}) > {n_max}: K_{n_max} still has a zero-sum-free labelling"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ops::ControlFlow;

    fn group(s: &str) -> Arc<Group> {
        Group::from_spec(&s.parse().unwrap()).unwrap()
    }

    fn opts() -> SearchOptions {
        SearchOptions {
            threads: 2,
            ..SearchOptions::default()
        }
    }

    /// Counts zero-sum-free labellings among all `|A|^(n(n-1))` tables.
    fn brute_count(g: &Arc<Group>, n: usize) -> u64 {
        let arcs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))
            .collect();
        let q = g.order();
        let total = q.pow(arcs.len() as u32);
        let mut count = 0;
        for code in 0..total {
            let w = ArcLabelling::from_fn(g, n, |u, v| {
                let k = arcs.iter().position(|&a| a == (u, v)).unwrap();
                crate::abelian::Elem::from_index(code / q.pow(k as u32) % q)
            })
            .unwrap();
            let mut zero = false;
            crate::oracle::for_each_cycle(n, 2, |c| {
                if crate::oracle::verify_cycle(&w, c).unwrap().is_zero() {
                    zero = true;
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            });
            count += u64::from(!zero);
        }
        count
    }

    #[test]
    fn canonical_counts_match_full_enumeration() {
        for (spec, n) in [("Z2", 2), ("Z2", 3), ("Z3", 2), ("Z3", 3)] {
            let g = group(spec);
            let full = brute_count(&g, n);
            let canonical = count_canonical_zero_sum_free(&g, n, &opts()).unwrap();
            assert_eq!(full, canonical * (g.order() as u64).pow(n as u32 - 1), "{spec}, n = {n}");
        }
    }

    #[test]
    fn small_existence_cases() {
        let z2 = group("Z2");
        let w = exists_zero_sum_free(&z2, 2, &opts()).unwrap().unwrap();
        assert_eq!((w.label(0, 1).index(), w.label(1, 0).index()), (0, 1));
        assert!(exists_zero_sum_free(&z2, 3, &opts()).unwrap().is_none());
        assert!(exists_zero_sum_free(&group("Z3"), 3, &opts()).unwrap().is_some());
    }

    #[test]
    fn small_values() {
        for (spec, expected) in [("Z2", 3), ("Z3", 4)] {
            let r = compute_n_a(&spec.parse().unwrap(), 6, &opts()).unwrap();
            assert_eq!(r.n_a, expected);
            assert_eq!(r.witness.n(), expected - 1);
        }
        assert!(matches!(
            compute_n_a(&"Z3".parse().unwrap(), 3, &opts()),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn witness_and_stats_are_thread_independent() {
        let g = group("Z5");
        let base = exists_with_stats(&g, 5, &SearchOptions { threads: 1, ..opts() }).unwrap();
        for threads in [2, 4] {
            let other = exists_with_stats(&g, 5, &SearchOptions { threads, ..opts() }).unwrap();
            assert_eq!(other, base);
        }
    }

    #[test]
    fn symmetry_breaking_keeps_existence() {
        for (spec, n) in [("Z2", 3), ("Z3", 3), ("Z3", 4), ("Z4", 4), ("Z2xZ2", 4)] {
            let g = group(spec);
            let plain = exists_zero_sum_free(&g, n, &opts()).unwrap().is_some();
            let sym = SearchOptions {
                symmetry_breaking: true,
                ..opts()
            };
            assert_eq!(exists_zero_sum_free(&g, n, &sym).unwrap().is_some(), plain);
        }
    }

    #[test]
    fn monotone_in_n() {
        for spec in ["Z2", "Z3", "Z4", "Z2xZ2"] {
            let g = group(spec);
            let mut absent = false;
            for n in 2..=5 {
                let found = exists_zero_sum_free(&g, n, &opts()).unwrap().is_some();
                assert!(!(absent && found), "{spec}, n = {n}");
                absent |= !found;
            }
        }
    }

    #[test]
    fn node_budget_is_enforced() {
        let g = group("Z4");
        let tight = SearchOptions {
            node_budget: 1000,
            ..opts()
        };
        assert!(matches!(exists_zero_sum_free(&g, 5, &tight), Err(Error::Budget(_))));
    }
}
