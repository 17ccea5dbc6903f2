//! The subsumption order on covers and its semilattice operations.
//!
//! Cover `a` subsumes `b` when `a`'s pre-images are a sub-collection of
//! `b`'s. In diagram orientation `a` sits above `b`; union of collections is
//! the meet and a join exists only when the intersection still covers.

use crate::cover::{Cover, FeatureSet, RelationTag};
use crate::error::{Error, Result};

/// Materialized u-inflation refuses covers with more pre-images than this.
pub const MAX_INFLATION_PREIMAGES: usize = 20;

fn is_subcollection(a: &Cover, b: &Cover) -> bool {
    // Both sides are sorted canonically, so a merge walk suffices.
    let mut rest = b.sets();
    a.sets().all(|s| rest.any(|t| t == s))
}

/// `true` iff every pre-image of `a` is a pre-image of `b`.
pub fn subsumes(a: &Cover, b: &Cover) -> Result<bool> {
    a.check_same(b)?;
    Ok(a.len() <= b.len() && is_subcollection(a, b))
}

pub fn compare(a: &Cover, b: &Cover) -> Result<RelationTag> {
    let ab = subsumes(a, b)?;
    let ba = subsumes(b, a)?;
    Ok(match (ab, ba) {
        (true, true) => RelationTag::Equal,
        (true, false) => RelationTag::FirstSubsumesSecond,
        (false, true) => RelationTag::SecondSubsumesFirst,
        (false, false) => RelationTag::Incomparable,
    })
}

/// Greatest lower bound: the union of both pre-image collections.
pub fn meet(a: &Cover, b: &Cover) -> Result<Cover> {
    a.check_same(b)?;
    Ok(Cover::from_preimages(
        a.universe(),
        a.preimages().iter().chain(b.preimages()).cloned(),
    )
    .expect("union of covers covers"))
}

/// Least upper bound, when the shared pre-images still cover the universe.
pub fn join(a: &Cover, b: &Cover) -> Result<Option<Cover>> {
    a.check_same(b)?;
    let shared = a
        .preimages()
        .iter()
        .filter(|p| b.contains_set(p.members))
        .cloned()
        .collect::<Vec<_>>();
    Ok(Cover::from_preimages(a.universe(), shared).ok())
}

/// The members of `covers` that are not a proper sub-collection of another
/// member, in canonical order. Duplicates collapse.
pub fn upper_covers(covers: &[Cover]) -> Result<Vec<Cover>> {
    if let Some(first) = covers.first() {
        for c in covers {
            first.check_same(c)?;
        }
    }
    let mut sorted: Vec<&Cover> = covers.iter().collect();
    sorted.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    sorted.dedup_by(|a, b| a == b);
    // A proper super-collection has strictly more pre-images, so each
    // candidate only needs checking against the maxima already found.
    let mut maxima: Vec<&Cover> = Vec::new();
    for c in sorted {
        if !maxima
            .iter()
            .any(|m| m.len() > c.len() && is_subcollection(c, m))
        {
            maxima.push(c);
        }
    }
    let mut out: Vec<Cover> = maxima.into_iter().cloned().collect();
    out.sort();
    Ok(out)
}

/// Every valid cover whose pre-images form a sub-collection of `c`'s,
/// including `c` itself, in canonical order.
pub fn u_inflation(c: &Cover) -> Result<Vec<Cover>> {
    if c.len() > MAX_INFLATION_PREIMAGES {
        return Err(Error::LimitExceeded {
            what: "u-inflation pre-image count",
            size: c.len(),
            limit: MAX_INFLATION_PREIMAGES,
        });
    }
    let mut out: Vec<Cover> = UInflation::new(c).collect();
    out.sort();
    Ok(out)
}

/// Lazy u-inflation for covers too large to materialize.
///
/// Yields sub-collections in order of their selection bitmask, not canonical
/// order.
pub struct UInflation<'a> {
    cover: &'a Cover,
    next: u64,
    end: u64,
}

impl<'a> UInflation<'a> {
    /// Panics when `c` has 64 or more pre-images.
    pub fn new(c: &'a Cover) -> Self {
        assert!(c.len() < 64, "u-inflation selector is a 64-bit mask");
        UInflation {
            cover: c,
            next: 1,
            end: 1u64 << c.len(),
        }
    }
}

impl Iterator for UInflation<'_> {
    type Item = Cover;

    fn next(&mut self) -> Option<Cover> {
        let full = self.cover.universe().full();
        while self.next < self.end {
            let pick = self.next;
            self.next += 1;
            let covered = self
                .cover
                .sets()
                .enumerate()
                .filter(|(i, _)| pick & (1 << i) != 0)
                .fold(FeatureSet::EMPTY, |acc, (_, s)| acc.union(s));
            if covered == full {
                let chosen = self
                    .cover
                    .preimages()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| pick & (1 << i) != 0)
                    .map(|(_, p)| p.clone());
                return Some(
                    Cover::from_preimages(self.cover.universe(), chosen)
                        .expect("selection covers"),
                );
            }
        }
        None
    }
}
