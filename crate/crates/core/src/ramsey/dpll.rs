//! A small DPLL solver: two watched literals, unit propagation, chronological
//! backtracking, lowest-index decisions tried false first.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatOutcome {
    /// One literal per variable, in variable order.
    Sat(Vec<i32>),
    Unsat,
}

#[derive(Clone, Copy)]
struct Frame {
    trail_len: usize,
    lit: i32,
    flipped: bool,
}

struct Solver {
    clauses: Vec<Vec<i32>>,
    /// Clause indices watching each literal, by [`code`].
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    trail: Vec<i32>,
    head: usize,
}

fn code(lit: i32) -> usize {
    2 * lit.unsigned_abs() as usize + usize::from(lit < 0)
}

impl Solver {
    fn lit_value(&self, lit: i32) -> i8 {
        let v = self.value[lit.unsigned_abs() as usize];
        if lit > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, lit: i32) {
        self.value[lit.unsigned_abs() as usize] = if lit > 0 { 1 } else { -1 };
        self.trail.push(lit);
    }

    /// False on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = -self.trail[self.head];
            self.head += 1;
            let mut list = std::mem::take(&mut self.watches[code(falsified)]);
            let mut i = 0;
            let mut ok = true;
            while i < list.len() {
                let ci = list[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_value = {
                    let v = self.value[other.unsigned_abs() as usize];
                    if other > 0 {
                        v
                    } else {
                        -v
                    }
                };
                if other_value == 1 {
                    i += 1;
                    continue;
                }
                let replacement = (2..clause.len()).find(|&k| {
                    let l = clause[k];
                    let v = self.value[l.unsigned_abs() as usize];
                    (if l > 0 { v } else { -v }) != -1
                });
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let new = clause[1];
                    self.watches[code(new)].push(ci);
                    list.swap_remove(i);
                    continue;
                }
                if other_value == -1 {
                    ok = false;
                    break;
                }
                self.assign(other);
                i += 1;
            }
            let slot = &mut self.watches[code(falsified)];
            list.append(slot);
            *slot = list;
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo(&mut self, len: usize) {
        for lit in self.trail.drain(len..) {
            self.value[lit.unsigned_abs() as usize] = 0;
        }
        self.head = len;
    }
}

/// Decides a CNF over variables `1..=num_vars`. Fails with a budget error after
/// `max_conflicts` conflicts.
pub fn solve_cnf(num_vars: usize, clauses: &[Vec<i32>], max_conflicts: u64) -> Result<SatOutcome> {
    let mut solver = Solver {
        clauses: Vec::new(),
        watches: vec![Vec::new(); 2 * num_vars + 2],
        value: vec![0; num_vars + 1],
        trail: Vec::new(),
        head: 0,
    };
    let mut units = Vec::new();
    for clause in clauses {
        let mut c: Vec<i32> = Vec::with_capacity(clause.len());
        let mut tautology = false;
        for &lit in clause {
            if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                return Err(Error::invalid(format!("literal {lit} outside 1..={num_vars}")));
            }
            if c.contains(&-lit) {
                tautology = true;
            }
            if !c.contains(&lit) {
                c.push(lit);
            }
        }
        match c.len() {
            _ if tautology => {}
            0 => return Ok(SatOutcome::Unsat),
            1 => units.push(c[0]),
            _ => {
                let ci = solver.clauses.len();
                solver.watches[code(c[0])].push(ci);
                solver.watches[code(c[1])].push(ci);
                solver.clauses.push(c);
            }
        }
    }
    for lit in units {
        match solver.lit_value(lit) {
            -1 => return Ok(SatOutcome::Unsat),
            0 => solver.assign(lit),
            _ => {}
        }
    }

    let mut frames: Vec<Frame> = Vec::new();
    let mut conflicts = 0u64;
    let mut next_var = 1;
    loop {
        if solver.propagate() {
            while next_var <= num_vars && solver.value[next_var] != 0 {
                next_var += 1;
            }
            if next_var > num_vars {
                let model = (1..=num_vars as i32)
                    .map(|v| if solver.value[v as usize] > 0 { v } else { -v })
                    .collect();
                return Ok(SatOutcome::Sat(model));
            }
            let lit = -(next_var as i32);
            frames.push(Frame {
                trail_len: solver.trail.len(),
                lit,
                flipped: false,
            });
            solver.assign(lit);
            continue;
        }
        conflicts += 1;
        if conflicts > max_conflicts {
            return Err(Error::Budget(format!("DPLL gave up after {max_conflicts} conflicts")));
        }
        loop {
            let Some(frame) = frames.last_mut() else {
                return Ok(SatOutcome::Unsat);
            };
            if frame.flipped {
                frames.pop();
                continue;
            }
            frame.flipped = true;
            let (len, lit) = (frame.trail_len, -frame.lit);
            solver.undo(len);
            solver.assign(lit);
            next_var = next_var.min(lit.unsigned_abs() as usize);
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn satisfies(model: &[i32], clauses: &[Vec<i32>]) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|&l| model[l.unsigned_abs() as usize - 1] == l))
    }

    fn brute_sat(num_vars: usize, clauses: &[Vec<i32>]) -> bool {
        (0..1u32 << num_vars).any(|mask| {
            let model: Vec<i32> = (1..=num_vars as i32)
                .map(|v| if mask >> (v - 1) & 1 == 1 { v } else { -v })
                .collect();
            satisfies(&model, clauses)
        })
    }

    #[test]
    fn tiny_cases() {
        assert_eq!(solve_cnf(1, &[vec![1], vec![-1]], 100).unwrap(), SatOutcome::Unsat);
        assert_eq!(solve_cnf(2, &[vec![1, 2]], 100).unwrap(), SatOutcome::Sat(vec![-1, 2]));
        assert_eq!(solve_cnf(1, &[vec![]], 100).unwrap(), SatOutcome::Unsat);
        assert_eq!(solve_cnf(1, &[vec![1, -1]], 100).unwrap(), SatOutcome::Sat(vec![-1]));
        assert!(solve_cnf(1, &[vec![2]], 100).is_err());
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 4 pigeons, 3 holes; var 3*p + h + 1
        let var = |p: i32, h: i32| 3 * p + h + 1;
        let mut clauses = Vec::new();
        for p in 0..4 {
            clauses.push((0..3).map(|h| var(p, h)).collect());
        }
        for h in 0..3 {
            for a in 0..4 {
                for b in a + 1..4 {
                    clauses.push(vec![-var(a, h), -var(b, h)]);
                }
            }
        }
        assert_eq!(solve_cnf(12, &clauses, 1 << 20).unwrap(), SatOutcome::Unsat);
        assert!(matches!(solve_cnf(12, &clauses, 3), Err(Error::Budget(_))));
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(
            clauses in prop::collection::vec(
                prop::collection::vec((1i32..=8, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v }), 1..4),
                0..40,
            )
        ) {
            let out = solve_cnf(8, &clauses, u64::MAX).unwrap();
            match out {
                SatOutcome::Sat(model) => prop_assert!(satisfies(&model, &clauses)),
                SatOutcome::Unsat => prop_assert!(!brute_sat(8, &clauses)),
            }
        }
    }
}
