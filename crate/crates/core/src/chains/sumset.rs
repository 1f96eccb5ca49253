use std::collections::BTreeSet;

use crate::abelian::{Elem, Group};
use crate::error::{Error, Result};

/// `S + T = { s + t }`.
pub fn sumset(g: &Group, s: &BTreeSet<Elem>, t: &BTreeSet<Elem>) -> BTreeSet<Elem> {
    s.iter().flat_map(|&a| t.iter().map(move |&b| g.add(a, b))).collect()
}

/// Checks `|S + T| >= min(p, |S| + |T| - 1)` in `Z_p`.
pub fn cauchy_davenport_holds(g: &Group, s: &BTreeSet<Elem>, t: &BTreeSet<Elem>) -> Result<bool> {
    if !g.is_prime_order() {
        return Err(Error::invalid(format!("{} does not have prime order", g.describe())));
    }
    if s.is_empty() || t.is_empty() {
        return Err(Error::invalid("sumset operands must be non-empty"));
    }
    let bound = g.order().min(s.len() + t.len() - 1);
    Ok(sumset(g, s, t).len() >= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(v: &[usize]) -> BTreeSet<Elem> {
        v.iter().map(|&i| Elem::from_index(i)).collect()
    }

    #[test]
    fn small_cases() {
        let z3 = Group::cyclic(3).unwrap();
        assert_eq!(sumset(&z3, &set(&[0, 1]), &set(&[0, 1])), set(&[0, 1, 2]));
        assert!(cauchy_davenport_holds(&z3, &set(&[0, 1]), &set(&[0, 1])).unwrap());

        let z7 = Group::cyclic(7).unwrap();
        let all: BTreeSet<Elem> = z7.elements().collect();
        assert_eq!(sumset(&z7, &all, &set(&[3])), all);
        assert!(cauchy_davenport_holds(&z7, &set(&[]), &all).is_err());
        let z6 = Group::cyclic(6).unwrap();
        assert!(cauchy_davenport_holds(&z6, &set(&[0]), &set(&[0])).is_err());
        // the bound fails for composite order: {0,3} + {0,3} in Z6
        assert_eq!(sumset(&z6, &set(&[0, 3]), &set(&[0, 3])).len(), 2);
    }

    #[test]
    fn random_pairs_in_z13() {
        let g = Group::cyclic(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..1000 {
            let mut draw = || -> BTreeSet<Elem> {
                let k = rng.gen_range(1..=13);
                (0..k).map(|_| Elem::from_index(rng.gen_range(0..13))).collect()
            };
            let (s, t) = (draw(), draw());
            assert!(cauchy_davenport_holds(&g, &s, &t).unwrap());
        }
    }
}
