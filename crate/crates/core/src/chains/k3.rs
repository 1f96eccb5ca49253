use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;
use crate::oracle::DiPath;

/// A vertex `v` of a zero-sum-free triangle and two non-trivial paths ending
/// at `v` whose sums, together with 0, are pairwise distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K3Extraction {
    pub vertex: usize,
    pub p1: DiPath,
    pub p2: DiPath,
}

/// First zero-sum cycle inside the triangle: digons, then both orientations.
pub(super) fn zero_sum_cycle_in_triple(w: &ArcLabelling, [a, b, c]: [usize; 3]) -> Option<Vec<usize>> {
    let candidates = [vec![a, b], vec![a, c], vec![b, c], vec![a, b, c], vec![a, c, b]];
    candidates.into_iter().find(|cyc| {
        let mut closed = cyc.clone();
        closed.push(cyc[0]);
        w.walk_sum(&closed).is_zero()
    })
}

/// [`k3_extract_on`] for a labelling of `K_3` itself.
pub fn k3_extract(w: &ArcLabelling) -> Result<K3Extraction> {
    if w.n() != 3 {
        return Err(Error::invalid(format!("expected a labelling of K_3, got K_{}", w.n())));
    }
    k3_extract_on(w, [0, 1, 2])
}

/// Runs the case analysis on the triangle spanned by `triple`. The group must
/// have odd prime order and the triangle must carry no zero-sum cycle.
pub fn k3_extract_on(w: &ArcLabelling, triple: [usize; 3]) -> Result<K3Extraction> {
    let g = w.group();
    if !g.is_prime_order() || g.order() < 3 {
        return Err(Error::invalid(format!(
            "K_3 extraction needs a group of odd prime order, got {}",
            g.describe()
        )));
    }
    let [a, b, c] = triple;
    if a.max(b).max(c) >= w.n() || a == b || b == c || a == c {
        return Err(Error::invalid(format!("{triple:?} is not a triple of distinct vertices")));
    }
    if zero_sum_cycle_in_triple(w, triple).is_some() {
        return Err(Error::invalid(format!("triangle {triple:?} carries a zero-sum cycle")));
    }

    let orders = [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]];
    let [v1, v2, v3] = orders
        .into_iter()
        .find(|&[x, y, z]| {
            !w.label(x, y).is_zero() && !w.label(x, z).is_zero() && !w.label(y, z).is_zero()
        })
        .ok_or_else(|| Error::internal("zero-sum-free triangle without an acyclic ordering"))?;

    let path = |vs: &[usize]| DiPath {
        vertices: vs.to_vec(),
        sum: w.walk_sum(vs),
    };
    let x = w.label(v2, v3);
    let y = g.add(w.label(v1, v2), x);
    let (vertex, p1, p2) = if y != g.zero() && y != x {
        (v3, path(&[v2, v3]), path(&[v1, v2, v3]))
    } else if w.label(v1, v3) != x {
        (v3, path(&[v1, v3]), path(&[v2, v3]))
    } else if !w.label(v3, v2).is_zero() {
        (v2, path(&[v1, v2]), path(&[v3, v2]))
    } else {
        (v2, path(&[v1, v3, v2]), path(&[v1, v2]))
    };
    if p1.sum.is_zero() || p2.sum.is_zero() || p1.sum == p2.sum {
        return Err(Error::internal("K_3 extraction produced coinciding sums"));
    }
    Ok(K3Extraction { vertex, p1, p2 })
}
