use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{ArcLabelling, EdgeLabelling};
use crate::abelian::{Elem, Group, GroupElem, GroupSpec};
use crate::error::{Error, Result};

/// On-disk arc labelling: one `[u, v, residues]` entry per ordered pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabellingFile {
    pub group: GroupSpec,
    pub n: usize,
    pub arcs: Vec<(usize, usize, GroupElem)>,
}

/// On-disk edge labelling: one `[u, v, residues]` entry per pair, `u < v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeLabellingFile {
    pub group: GroupSpec,
    pub n: usize,
    pub edges: Vec<(usize, usize, GroupElem)>,
}

fn spec_of(group: &Group) -> Result<&GroupSpec> {
    group
        .spec()
        .ok_or_else(|| Error::invalid("only labellings over a group spec can be serialized"))
}

fn elem(group: &Group, residues: &GroupElem, u: usize, v: usize) -> Result<Elem> {
    group
        .elem_of(residues)
        .map_err(|_| Error::invalid(format!("label {:?} of ({u},{v}) is not a reduced element of the group", residues.0)))
}

impl LabellingFile {
    pub fn from_labelling(w: &ArcLabelling) -> Result<Self> {
        let spec = spec_of(w.group())?;
        let arcs = w
            .arcs()
            .map(|(u, v, x)| (u, v, spec.elem_at(x.index()).expect("in range")))
            .collect();
        Ok(LabellingFile {
            group: spec.clone(),
            n: w.n(),
            arcs,
        })
    }

    pub fn to_labelling(&self) -> Result<ArcLabelling> {
        let n = self.n;
        if n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {n}")));
        }
        let group = Group::from_spec(&self.group)?;
        let mut table: Vec<Option<Elem>> = vec![None; n * n];
        for (u, v, residues) in &self.arcs {
            let (u, v) = (*u, *v);
            if u >= n || v >= n {
                return Err(Error::invalid(format!("arc ({u},{v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop ({u},{u})")));
            }
            let x = elem(&group, residues, u, v)?;
            if table[u * n + v].replace(x).is_some() {
                return Err(Error::invalid(format!("duplicate arc ({u},{v})")));
            }
        }
        let mut missing = None;
        let w = ArcLabelling::from_fn(&group, n, |u, v| {
            table[u * n + v].unwrap_or_else(|| {
                missing.get_or_insert((u, v));
                Elem::ZERO
            })
        })?;
        match missing {
            Some((u, v)) => Err(Error::invalid(format!("missing arc ({u},{v})"))),
            None => Ok(w),
        }
    }
}

impl EdgeLabellingFile {
    pub fn from_labelling(e: &EdgeLabelling) -> Result<Self> {
        let spec = spec_of(e.group())?;
        let n = e.n();
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .map(|(u, v)| (u, v, spec.elem_at(e.label(u, v).index()).expect("in range")))
            .collect();
        Ok(EdgeLabellingFile {
            group: spec.clone(),
            n,
            edges,
        })
    }

    pub fn to_labelling(&self) -> Result<EdgeLabelling> {
        let n = self.n;
        if n < 2 {
            return Err(Error::invalid(format!("n must be at least 2, got {n}")));
        }
        let group: Arc<Group> = Group::from_spec(&self.group)?;
        let mut table: Vec<Option<Elem>> = vec![None; n * n];
        for (u, v, residues) in &self.edges {
            let (u, v) = (*u, *v);
            if u >= v || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) must satisfy u < v < n")));
            }
            let x = elem(&group, residues, u, v)?;
            if table[u * n + v].replace(x).is_some() {
                return Err(Error::invalid(format!("duplicate edge ({u},{v})")));
            }
        }
        let mut missing = None;
        let e = EdgeLabelling::from_fn(&group, n, |u, v| {
            table[u * n + v].unwrap_or_else(|| {
                missing.get_or_insert((u, v));
                Elem::ZERO
            })
        })?;
        match missing {
            Some((u, v)) => Err(Error::invalid(format!("missing edge ({u},{v})"))),
            None => Ok(e),
        }
    }
}

impl ArcLabelling {
    pub fn to_json(&self) -> Result<String> {
        let file = LabellingFile::from_labelling(self)?;
        Ok(serde_json::to_string(&file).expect("serializable"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LabellingFile =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("labelling file: {e}")))?;
        file.to_labelling()
    }
}

impl EdgeLabelling {
    pub fn to_json(&self) -> Result<String> {
        let file = EdgeLabellingFile::from_labelling(self)?;
        Ok(serde_json::to_string(&file).expect("serializable"))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EdgeLabellingFile =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("edge labelling file: {e}")))?;
        file.to_labelling()
    }
}
