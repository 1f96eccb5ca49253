use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::abelian::{Elem, GroupElem};
use crate::error::{Error, Result};
use crate::labelling::{ArcLabelling, Switching};

use super::{K4Chain, SegmentChain, TriangleChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Triangle,
    K4,
}

/// Replayable chain certificate.
///
/// `detours` holds the interior vertices of every detour path, segment by
/// segment (one per segment for triangles, two for K₄'s); `sums` runs parallel
/// to it. `switchings` take the certified labelling to the chain's base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainCertificate {
    pub kind: ChainKind,
    pub spine: Vec<usize>,
    pub detours: Vec<Vec<usize>>,
    pub sums: Vec<GroupElem>,
    pub switchings: Vec<(usize, GroupElem)>,
}

fn residues(w: &ArcLabelling, e: Elem) -> Result<GroupElem> {
    w.group()
        .residues(e)
        .ok_or_else(|| Error::invalid("certificates can only be written over a group spec"))
}

impl ChainCertificate {
    fn from_chain(kind: ChainKind, chain: &impl SegmentChain, switchings: &[Switching]) -> Result<Self> {
        let w = chain.base();
        let mut detours = Vec::new();
        let mut sums = Vec::new();
        for j in 0..chain.segments() {
            for (path, sum) in chain.detours(j) {
                detours.push(path[1..path.len() - 1].to_vec());
                sums.push(residues(w, sum)?);
            }
        }
        let switchings = switchings
            .iter()
            .map(|s| Ok((s.vertex, residues(w, s.value)?)))
            .collect::<Result<_>>()?;
        Ok(ChainCertificate {
            kind,
            spine: chain.spine().to_vec(),
            detours,
            sums,
            switchings,
        })
    }

    pub fn from_triangle_chain(chain: &TriangleChain) -> Result<Self> {
        Self::from_chain(ChainKind::Triangle, chain, &chain.switchings)
    }

    pub fn from_k4_chain(chain: &K4Chain) -> Result<Self> {
        Self::from_chain(ChainKind::K4, chain, &chain.switchings)
    }
}

/// Replays a certificate against `w` and returns the set of path sums the chain
/// realizes under the switched labelling.
pub fn verify_certificate(w: &ArcLabelling, cert: &ChainCertificate) -> Result<BTreeSet<Elem>> {
    let g = w.group();
    let switchings = cert
        .switchings
        .iter()
        .map(|(v, c)| Ok(Switching::new(*v, g.elem_of(c)?)))
        .collect::<Result<Vec<_>>>()?;
    let base = w.apply_switchings(&switchings)?;

    let per_segment = match cert.kind {
        ChainKind::Triangle => 1,
        ChainKind::K4 => 2,
    };
    if cert.spine.is_empty() {
        return Err(Error::invalid("empty spine"));
    }
    let segments = cert.spine.len() - 1;
    if cert.detours.len() != segments * per_segment || cert.sums.len() != cert.detours.len() {
        return Err(Error::invalid("detour and sum counts do not match the spine"));
    }

    let mut used = vec![false; w.n()];
    let mut claim = |v: usize| -> Result<()> {
        if v >= w.n() {
            return Err(Error::invalid(format!("vertex {v} out of range")));
        }
        if std::mem::replace(&mut used[v], true) {
            return Err(Error::invalid(format!("vertex {v} used twice")));
        }
        Ok(())
    };
    for &x in &cert.spine {
        claim(x)?;
    }

    let mut reach = vec![false; g.order()];
    reach[0] = true;
    for j in 0..segments {
        let (a, b) = (cert.spine[j], cert.spine[j + 1]);
        if !base.label(a, b).is_zero() {
            return Err(Error::invalid(format!("spine arc ({a},{b}) is not zero")));
        }
        let mut extras: Vec<usize> = Vec::new();
        let mut options = Vec::new();
        for k in j * per_segment..(j + 1) * per_segment {
            let interior = &cert.detours[k];
            if interior.is_empty() || interior.len() > per_segment {
                return Err(Error::invalid(format!("detour {k} has {} interior vertices", interior.len())));
            }
            let mut path = vec![a];
            path.extend_from_slice(interior);
            path.push(b);
            for &v in interior {
                if v >= w.n() {
                    return Err(Error::invalid(format!("vertex {v} out of range")));
                }
                if interior.iter().filter(|&&u| u == v).count() > 1 {
                    return Err(Error::invalid(format!("detour {k} repeats vertex {v}")));
                }
                if !extras.contains(&v) {
                    extras.push(v);
                }
            }
            let sum = base.walk_sum(&path);
            if sum != g.elem_of(&cert.sums[k])? {
                return Err(Error::invalid(format!("detour {k} does not sum to its recorded value")));
            }
            options.push(sum);
        }
        if extras.len() > per_segment {
            return Err(Error::invalid(format!("segment {j} uses too many extra vertices")));
        }
        for v in extras {
            claim(v)?;
        }
        let distinct: BTreeSet<Elem> = options.iter().copied().chain([g.zero()]).collect();
        if distinct.len() != per_segment + 1 {
            return Err(Error::invalid(format!("segment {j} has coinciding detour sums")));
        }
        let before = reach.clone();
        for (i, _) in before.iter().enumerate().filter(|(_, r)| **r) {
            for &d in &options {
                reach[g.add(Elem::from_index(i), d).index()] = true;
            }
        }
    }
    Ok((0..g.order()).filter(|&i| reach[i]).map(Elem::from_index).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::Group;
    use crate::chains::{build_k4_chain, build_triangle_chain, reachable_sums, ChainOptions, ChainOutcome, K4Outcome};
    use crate::labelling::random_labelling;

    #[test]
    fn triangle_certificate_round_trip() {
        let g = Group::from_spec(&"Z2xZ3".parse().unwrap()).unwrap();
        let w = random_labelling(&g, 48, 5).unwrap();
        let ChainOutcome::Complete { chain, .. } = build_triangle_chain(&w, ChainOptions::default()).unwrap() else {
            panic!("expected a complete chain");
        };
        let cert = ChainCertificate::from_triangle_chain(&chain).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.starts_with(r#"{"kind":"triangle","spine":[0,"#));
        let back: ChainCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(verify_certificate(&w, &back).unwrap(), reachable_sums(&chain));

        let mut tampered = back.clone();
        tampered.sums[0] = GroupElem(vec![1, 1]);
        if tampered != back {
            assert!(verify_certificate(&w, &tampered).is_err());
        }
        let mut tampered = back.clone();
        tampered.switchings.clear();
        if !back.switchings.is_empty() {
            assert!(verify_certificate(&w, &tampered).is_err());
        }
    }

    #[test]
    fn k4_certificate_round_trip() {
        let g = Group::cyclic(7).unwrap();
        for seed in 0..30 {
            let w = random_labelling(&g, 10, seed).unwrap();
            if let K4Outcome::Chain(chain) = build_k4_chain(&w).unwrap() {
                let cert = ChainCertificate::from_k4_chain(&chain).unwrap();
                assert_eq!(cert.detours.len(), 6);
                assert_eq!(verify_certificate(&w, &cert).unwrap().len(), 7);
                let mut tampered = cert.clone();
                tampered.detours[0] = vec![chain.spine[2]];
                assert!(verify_certificate(&w, &tampered).is_err());
            }
        }
    }
}
