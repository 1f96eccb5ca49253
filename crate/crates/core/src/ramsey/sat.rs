use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::abelian::{Elem, Group, GroupSpec};
use crate::error::{Error, Result};
use crate::labelling::ArcLabelling;
use crate::oracle::{for_each_cycle, is_zero_sum_free};

use super::search::arc_order;

/// Largest `n` for which every cycle of `K_n` is written into the instance.
pub const MAX_SAT_N: usize = 7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SatOptions {
    /// Require `w(1,0) <= w(2,0) <= ... <= w(n-1,0)` in element index order.
    pub symmetry_breaking: bool,
}

/// Meaning of a CNF variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Annotation {
    /// Arc `(u, v)` carries `label`.
    Arc { u: usize, v: usize, label: Elem },
    /// The first `pos` arcs of cycle `cycle` sum to `partial`.
    Partial { cycle: usize, pos: usize, partial: Elem },
}

/// A CNF whose models are exactly the zero-sum-free first-row-zero labellings
/// of `K_n`, up to the values of the auxiliary partial-sum variables.
#[derive(Clone, Debug)]
pub struct CnfInstance {
    pub group: Arc<Group>,
    pub n: usize,
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
    /// Indexed by variable minus one.
    pub annotations: Vec<Annotation>,
    pub cycles: usize,
}

/// Arc variables come first: `1 + arc_index * |A| + label`, with arcs in
/// [`arc_order`].
fn arc_var(order: usize, arc_index: usize, label: Elem) -> i32 {
    (1 + arc_index * order + label.index()) as i32
}

fn arc_index(u: usize, v: usize) -> usize {
    let k = u.max(v);
    let j = u.min(v);
    k * (k - 1) + 2 * j + usize::from(u > v)
}

fn residues(g: &Group, a: Elem) -> String {
    match g.residues(a) {
        Some(r) => r.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        None => a.index().to_string(),
    }
}

pub fn sat_export(spec: &GroupSpec, n: usize, opts: SatOptions) -> Result<CnfInstance> {
    if n < 2 {
        return Err(Error::invalid("n must be at least 2"));
    }
    if n > MAX_SAT_N {
        return Err(Error::Budget(format!("CNF export enumerates every cycle and supports n <= {MAX_SAT_N}")));
    }
    let g = Group::from_spec(spec)?;
    let q = g.order();
    let arcs = arc_order(n);
    let mut annotations: Vec<Annotation> = Vec::new();
    for &(u, v) in &arcs {
        for label in g.elements() {
            annotations.push(Annotation::Arc { u, v, label });
        }
    }
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    for t in 0..arcs.len() {
        clauses.push(g.elements().map(|a| arc_var(q, t, a)).collect());
        for a in 0..q {
            for b in a + 1..q {
                clauses.push(vec![
                    -arc_var(q, t, Elem::from_index(a)),
                    -arc_var(q, t, Elem::from_index(b)),
                ]);
            }
        }
    }
    for v in 1..n {
        clauses.push(vec![arc_var(q, arc_index(0, v), Elem::ZERO)]);
    }
    if opts.symmetry_breaking {
        for k in 2..n {
            let (cur, prev) = (arc_index(k, 0), arc_index(k - 1, 0));
            for a in 0..q {
                for b in a + 1..q {
                    clauses.push(vec![
                        -arc_var(q, cur, Elem::from_index(a)),
                        -arc_var(q, prev, Elem::from_index(b)),
                    ]);
                }
            }
        }
    }

    let mut cycle_id = 0;
    for_each_cycle(n, 2, |cyc| {
        let len = cyc.len();
        let ids: Vec<usize> = (0..len).map(|i| arc_index(cyc[i], cyc[(i + 1) % len])).collect();
        // s[k-1][e] says the first k arcs sum to e
        let mut layers: Vec<i32> = Vec::with_capacity(len - 1);
        for pos in 1..len {
            layers.push(annotations.len() as i32 + 1);
            for partial in g.elements() {
                annotations.push(Annotation::Partial {
                    cycle: cycle_id,
                    pos,
                    partial,
                });
            }
        }
        let s = |pos: usize, e: Elem| layers[pos - 1] + e.index() as i32;
        for e in g.elements() {
            clauses.push(vec![-arc_var(q, ids[0], e), s(1, e)]);
        }
        for pos in 2..len {
            for e in g.elements() {
                for f in g.elements() {
                    clauses.push(vec![-s(pos - 1, e), -arc_var(q, ids[pos - 1], f), s(pos, g.add(e, f))]);
                }
            }
        }
        for e in g.elements() {
            clauses.push(vec![-s(len - 1, e), -arc_var(q, ids[len - 1], g.neg(e))]);
        }
        cycle_id += 1;
        ControlFlow::Continue(())
    });

    Ok(CnfInstance {
        group: g,
        n,
        num_vars: annotations.len(),
        clauses,
        annotations,
        cycles: cycle_id,
    })
}

impl CnfInstance {
    /// Variable of "arc `(u, v)` carries `label`".
    pub fn arc_var(&self, u: usize, v: usize, label: Elem) -> i32 {
        arc_var(self.group.order(), arc_index(u, v), label)
    }

    pub fn to_dimacs(&self) -> String {
        let g = &self.group;
        let mut out = String::new();
        for (i, a) in self.annotations.iter().enumerate() {
            let var = i + 1;
            let _ = match a {
                Annotation::Arc { u, v, label } => {
                    writeln!(out, "c x {var} arc {u} {v} label {}", residues(g, *label))
                }
                Annotation::Partial { cycle, pos, partial } => {
                    writeln!(out, "c s {var} cycle {cycle} pos {pos} partial {}", residues(g, *partial))
                }
            };
        }
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Reads the literals of DIMACS-style `v` lines. A trailing `0` ends the model.
/// Other lines (`s SATISFIABLE`, comments) are skipped.
pub fn parse_model(text: &str) -> Result<Vec<i32>> {
    let mut lits = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        let Some(rest) = line.strip_prefix("v") else { continue };
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            continue;
        }
        for tok in rest.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| Error::invalid(format!("bad literal {tok:?} in model")))?;
            if lit == 0 {
                return Ok(lits);
            }
            lits.push(lit);
        }
    }
    if lits.is_empty() {
        return Err(Error::invalid("model has no `v` lines"));
    }
    Ok(lits)
}

/// Decodes the arc variables of a model and confirms with the oracle that the
/// resulting labelling is zero-sum-free.
pub fn sat_import_verify(model: &[i32], spec: &GroupSpec, n: usize) -> Result<ArcLabelling> {
    if !(2..=MAX_SAT_N).contains(&n) {
        return Err(Error::invalid(format!("n must lie in 2..={MAX_SAT_N}")));
    }
    let g = Group::from_spec(spec)?;
    let q = g.order();
    let arcs = arc_order(n);
    let mut value = vec![None; arcs.len() * q];
    for &lit in model {
        let var = lit.unsigned_abs() as usize;
        if var == 0 {
            continue;
        }
        if var <= value.len() {
            let slot = &mut value[var - 1];
            if slot.is_some_and(|b| b != (lit > 0)) {
                return Err(Error::invalid(format!("variable {var} assigned both ways")));
            }
            *slot = Some(lit > 0);
        }
    }
    let mut labels = vec![Elem::ZERO; n * n];
    for (t, &(u, v)) in arcs.iter().enumerate() {
        let block = &value[t * q..(t + 1) * q];
        if block.iter().any(Option::is_none) {
            return Err(Error::invalid(format!("model leaves arc ({u},{v}) unassigned")));
        }
        let on: Vec<usize> = (0..q).filter(|&e| block[e] == Some(true)).collect();
        if on.len() != 1 {
            return Err(Error::invalid(format!(
                "arc ({u},{v}) has {} labels set; expected exactly one",
                on.len()
            )));
        }
        labels[u * n + v] = Elem::from_index(on[0]);
    }
    let w = ArcLabelling::from_fn(&g, n, |u, v| labels[u * n + v])?;
    if !is_zero_sum_free(&w, 2)? {
        return Err(Error::internal("decoded labelling has a zero-sum cycle"));
    }
    Ok(w)
}
