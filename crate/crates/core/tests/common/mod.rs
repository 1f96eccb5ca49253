//! Brute-force references written independently of the library's oracle.

#![allow(dead_code)]

use std::collections::BTreeSet;

use zerosum::abelian::Elem;
use zerosum::labelling::ArcLabelling;

/// Label sum around `cycle`, or `None` if it is not a simple cycle of length >= 2.
pub fn cycle_sum(w: &ArcLabelling, cycle: &[usize]) -> Option<Elem> {
    let distinct: BTreeSet<usize> = cycle.iter().copied().collect();
    if cycle.len() < 2 || distinct.len() != cycle.len() || cycle.iter().any(|&v| v >= w.n()) {
        return None;
    }
    let g = w.group();
    Some(g.sum((0..cycle.len()).map(|i| w.label(cycle[i], cycle[(i + 1) % cycle.len()]))))
}

/// Label sum along a simple path, or `None` if it is not one.
pub fn path_sum(w: &ArcLabelling, path: &[usize]) -> Option<Elem> {
    let distinct: BTreeSet<usize> = path.iter().copied().collect();
    if path.len() < 2 || distinct.len() != path.len() || path.iter().any(|&v| v >= w.n()) {
        return None;
    }
    Some(w.group().sum(path.windows(2).map(|p| w.label(p[0], p[1]))))
}

/// Every simple cycle with at least `min_len` arcs, each listed once with its
/// smallest vertex first.
pub fn all_cycles(n: usize, min_len: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, min_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let start = path[0];
        if path.len() >= min_len.max(2) {
            out.push(path.clone());
        }
        for v in start + 1..n {
            if !path.contains(&v) {
                path.push(v);
                extend(n, min_len, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..n {
        extend(n, min_len, &mut vec![s], &mut out);
    }
    out
}

pub fn has_zero_sum_cycle(w: &ArcLabelling, min_len: usize) -> bool {
    all_cycles(w.n(), min_len)
        .iter()
        .any(|c| cycle_sum(w, c).expect("simple").is_zero())
}

/// Sums of all simple `u -> v` paths with at least `min_len` arcs.
pub fn path_sums(w: &ArcLabelling, u: usize, v: usize, min_len: usize) -> BTreeSet<Elem> {
    fn walk(w: &ArcLabelling, v: usize, min_len: usize, path: &mut Vec<usize>, out: &mut BTreeSet<Elem>) {
        let last = *path.last().unwrap();
        if last == v {
            if path.len() > min_len {
                out.insert(path_sum(w, path).unwrap());
            }
            return;
        }
        for x in 0..w.n() {
            if !path.contains(&x) {
                path.push(x);
                walk(w, v, min_len, path, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(w, v, min_len, &mut vec![u], &mut out);
    out
}
