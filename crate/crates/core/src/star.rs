//! Star-closure and everything built on it.
//!
//! The star-closure of a cover adds every finer reading, where "finer" means
//! a non-empty subset of an existing pre-image: the closure is the downward
//! closure of the pre-image collection. If a different notion of finer
//! reading is wanted, [`star_closure_with`] is the only function to change.
//!
//! Two covers are star-equivalent when their closures coincide. Each class
//! has a unique fewest-pre-image member, the antichain of inclusion-maximal
//! pre-images, used as the class representative.

use std::collections::BTreeSet;

use crate::cover::{Cover, FeatureSet, FeatureUniverse, Preimage};
use crate::enumerate::{self, Order};
use crate::error::{Error, Result};
use crate::order;

/// Default cap on the largest pre-image a closure may expand (2^20 subsets).
pub const MAX_CLOSURE_PREIMAGE: usize = 20;

/// Default cap on `|closure| − |representative|` for class enumeration.
pub const MAX_CLASS_FREEDOM: usize = 20;

/// Default cap on universe size for [`partition_slice`].
pub const MAX_SLICE_FEATURES: usize = 6;

/// A star-equivalence class, identified by its representative and the
/// closure every member shares.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarClass {
    pub representative: Cover,
    pub closure: Cover,
}

impl StarClass {
    pub fn of(c: &Cover) -> Result<Self> {
        Ok(StarClass {
            representative: canonical_rep(c),
            closure: star_closure(c)?,
        })
    }

    /// Closure pre-images the representative lacks; members are the
    /// representative plus any subset of these.
    pub fn freedom(&self) -> usize {
        self.closure.len() - self.representative.len()
    }

    /// Number of covers in the class, when it fits in a `u64`.
    pub fn size(&self) -> Option<u64> {
        1u64.checked_shl(self.freedom() as u32)
    }
}

pub fn star_closure(v: &Cover) -> Result<Cover> {
    star_closure_with(v, MAX_CLOSURE_PREIMAGE)
}

/// Downward closure; refuses pre-images larger than `max_preimage`.
pub fn star_closure_with(v: &Cover, max_preimage: usize) -> Result<Cover> {
    let widest = v.sets().map(FeatureSet::len).max().unwrap_or(0);
    if widest > max_preimage {
        return Err(Error::LimitExceeded {
            what: "star-closure pre-image size",
            size: widest,
            limit: max_preimage,
        });
    }
    let mut closed: BTreeSet<FeatureSet> = BTreeSet::new();
    for s in v.sets() {
        if closed.contains(&s) {
            continue;
        }
        closed.extend(s.nonempty_subsets());
    }
    // Keep the labels of pre-images that were already present.
    let labelled = v.preimages().iter().cloned();
    let added = closed
        .into_iter()
        .filter(|s| !v.contains_set(*s))
        .map(Preimage::new);
    Ok(Cover::from_preimages(v.universe(), labelled.chain(added)).expect("closure covers"))
}

pub fn star_equivalent(a: &Cover, b: &Cover) -> Result<bool> {
    a.check_same(b)?;
    Ok(star_closure(a)? == star_closure(b)?)
}

/// The inclusion-maximal pre-images of `c`.
pub fn canonical_rep(c: &Cover) -> Cover {
    let sets: Vec<FeatureSet> = c.sets().collect();
    let maximal = c
        .preimages()
        .iter()
        .filter(|p| {
            !sets
                .iter()
                .any(|&t| t != p.members && p.members.is_subset(t))
        })
        .cloned();
    Cover::from_preimages(c.universe(), maximal).expect("maximal pre-images cover")
}

pub fn class_members(c: &Cover) -> Result<Vec<Cover>> {
    class_members_with(c, MAX_CLASS_FREEDOM)
}

/// Every cover star-equivalent to `c`, in canonical order. The class has
/// `2^(|closure| − |representative|)` members; `max_freedom` caps that
/// exponent.
pub fn class_members_with(c: &Cover, max_freedom: usize) -> Result<Vec<Cover>> {
    let rep = canonical_rep(c);
    let closure = star_closure(c)?;
    let optional: Vec<Preimage> = closure
        .preimages()
        .iter()
        .filter(|p| !rep.contains_set(p.members))
        .cloned()
        .collect();
    if optional.len() > max_freedom {
        return Err(Error::LimitExceeded {
            what: "star class size exponent",
            size: optional.len(),
            limit: max_freedom,
        });
    }
    let mut out = Vec::with_capacity(1 << optional.len());
    for pick in 0u64..(1u64 << optional.len()) {
        let extra = optional
            .iter()
            .enumerate()
            .filter(|(i, _)| pick & (1 << i) != 0)
            .map(|(_, p)| p.clone());
        let member = Cover::from_preimages(c.universe(), rep.preimages().iter().cloned().chain(extra))
            .expect("representative already covers");
        out.push(member);
    }
    out.sort();
    Ok(out)
}

/// `true` iff `a`'s closure is a sub-collection of `b`'s.
pub fn star_subsumes(a: &Cover, b: &Cover) -> Result<bool> {
    a.check_same(b)?;
    order::subsumes(&star_closure(a)?, &star_closure(b)?)
}

/// The combined ordering: `a ⊆ b`, or the two are subsumption-incomparable
/// and `a`'s closure is contained in `b`'s.
///
/// Reflexive, but in general neither antisymmetric nor transitive.
/// Distinct covers with equal closures that are incomparable, such as
/// `{1,2}|{1}` and `{1,2}|{2}`, precede each other; and
/// `{1}|{2}|{1,2,3} ⊴ {3}|{1,2,3} ⊴ {1}|{1,2,3}` while the outer pair is
/// ordered the other way by subsumption. On partitions, and on star-class
/// representatives, it is a partial order.
pub fn proceeds(a: &Cover, b: &Cover) -> Result<bool> {
    if order::subsumes(a, b)? {
        return Ok(true);
    }
    if order::subsumes(b, a)? {
        return Ok(false);
    }
    star_subsumes(a, b)
}

/// Class of the meet. Well defined on classes since the closure of a union
/// is the union of the closures.
pub fn quotient_meet(a: &Cover, b: &Cover) -> Result<StarClass> {
    StarClass::of(&order::meet(a, b)?)
}

pub fn is_partition(c: &Cover) -> bool {
    let mut seen = FeatureSet::EMPTY;
    for s in c.sets() {
        if seen.intersects(s) {
            return false;
        }
        seen = seen.union(s);
    }
    true
}

/// `true` iff every block of `p` lies inside some block of `q`.
pub fn refines(p: &Cover, q: &Cover) -> Result<bool> {
    p.check_same(q)?;
    for c in [p, q] {
        if !is_partition(c) {
            return Err(Error::NotPartition(c.canonical_string()));
        }
    }
    Ok(p.sets().all(|b| q.sets().any(|block| b.is_subset(block))))
}

/// The partitions of a universe as a diagram under [`proceeds`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSlice {
    pub nodes: Vec<Cover>,
    /// `(upper, lower)` index pairs into `nodes`: the transitive reduction.
    pub edges: Vec<(usize, usize)>,
}

pub fn partition_slice(universe: &FeatureUniverse) -> Result<PartitionSlice> {
    partition_slice_with(universe, MAX_SLICE_FEATURES)
}

pub fn partition_slice_with(universe: &FeatureUniverse, max_n: usize) -> Result<PartitionSlice> {
    if universe.len() > max_n {
        return Err(Error::LimitExceeded {
            what: "partition slice universe size",
            size: universe.len(),
            limit: max_n,
        });
    }
    let nodes = enumerate::all_partitions(universe)?;
    let diagram = enumerate::hasse_edges(&nodes, Order::Proceeds)?;
    Ok(PartitionSlice {
        nodes: diagram.nodes,
        edges: diagram.edges,
    })
}
