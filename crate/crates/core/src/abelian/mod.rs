//! Finite Abelian groups as direct products of cyclic groups, with subgroup
//! enumeration and quotient construction.

mod group;
mod spec;
mod subgroup;

pub use group::{Elem, Group, MAX_TABLE_ORDER};
pub use spec::{GroupElem, GroupSpec};
pub use subgroup::{
    cyclic_subgroup, enumerate_subgroups, enumerate_subgroups_bounded, QuotientMap, Subgroup,
    SUBGROUP_ENUMERATION_BOUND,
};

