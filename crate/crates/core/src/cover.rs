//! Feature universes, pre-images, covers and sensor maps.
//!
//! A sensor is modelled by the collection of its reading pre-images: for every
//! reading, the set of world features under which that reading can occur. A
//! collection qualifies as a sensor when its pre-images are non-empty and
//! together cover every feature.
//!
//! Feature subsets are stored as bitmasks over the universe's fixed label
//! order, which caps universes at [`MAX_FEATURES`] features.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest universe a [`FeatureSet`] bitmask can index.
pub const MAX_FEATURES: usize = 64;

/// A subset of the universe's features, as a bitmask over feature indices.
///
/// The ordering is the canonical one used throughout the crate: smaller sets
/// first, then lexicographic by sorted feature indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FeatureSet(u64);

impl FeatureSet {
    pub const EMPTY: FeatureSet = FeatureSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        FeatureSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        assert!(index < MAX_FEATURES, "feature index out of range");
        FeatureSet(1 << index)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_FEATURES, "universe too large");
        if n == MAX_FEATURES {
            FeatureSet(u64::MAX)
        } else {
            FeatureSet((1u64 << n) - 1)
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        index < MAX_FEATURES && self.0 & (1 << index) != 0
    }

    pub fn is_subset(self, other: FeatureSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: FeatureSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn union(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 | other.0)
    }

    pub fn intersection(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & other.0)
    }

    pub fn difference(self, other: FeatureSet) -> Self {
        FeatureSet(self.0 & !other.0)
    }

    pub fn insert(&mut self, index: usize) {
        *self = self.union(FeatureSet::singleton(index));
    }

    /// Feature indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Every non-empty subset of `self`, including `self`.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = FeatureSet> {
        let whole = self.0;
        let mut next = Some(whole);
        std::iter::from_fn(move || {
            let current = next?;
            if current == 0 {
                return None;
            }
            next = Some((current - 1) & whole);
            Some(FeatureSet(current))
        })
    }
}

impl Ord for FeatureSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            // Equal sizes: the set holding the lowest differing index sorts first.
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for FeatureSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for FeatureSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = FeatureSet::EMPTY;
        for i in iter {
            set.insert(i);
        }
        set
    }
}

#[derive(Debug)]
struct UniverseInner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// The finite, ordered set of world features. Cheap to clone.
#[derive(Clone)]
pub struct FeatureUniverse(Arc<UniverseInner>);

impl FeatureUniverse {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        if labels.len() > MAX_FEATURES {
            return Err(Error::UniverseTooLarge {
                size: labels.len(),
                max: MAX_FEATURES,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(FeatureUniverse(Arc::new(UniverseInner { labels, index })))
    }

    /// Universe labelled `"1"` through `"n"`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.0.labels[index]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.0
            .index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownFeature(label.to_string()))
    }

    pub fn full(&self) -> FeatureSet {
        FeatureSet::full(self.len())
    }

    pub fn set_of<I, S>(&self, labels: I) -> Result<FeatureSet>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        labels
            .into_iter()
            .map(|l| self.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(|ix| ix.into_iter().collect())
    }

    pub fn labels_of(&self, set: FeatureSet) -> Vec<&str> {
        set.iter().map(|i| self.label(i)).collect()
    }

    /// `{a,b,c}` in feature order.
    pub fn format_set(&self, set: FeatureSet) -> String {
        format!("{{{}}}", self.labels_of(set).join(","))
    }

    pub(crate) fn check_same(&self, other: &FeatureUniverse) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::UniverseMismatch)
        }
    }
}

impl PartialEq for FeatureUniverse {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for FeatureUniverse {}

impl Hash for FeatureUniverse {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.labels.hash(state);
    }
}

impl PartialOrd for FeatureUniverse {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FeatureUniverse {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            Ordering::Equal
        } else {
            self.0.labels.cmp(&other.0.labels)
        }
    }
}

impl fmt::Debug for FeatureUniverse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("FeatureUniverse").field(&self.0.labels).finish()
    }
}

/// One sensor reading's pre-image. The label is an annotation only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimage {
    pub members: FeatureSet,
    pub label: Option<String>,
}

impl Preimage {
    pub fn new(members: FeatureSet) -> Self {
        Preimage {
            members,
            label: None,
        }
    }

    pub fn labelled(members: FeatureSet, label: impl Into<String>) -> Self {
        Preimage {
            members,
            label: Some(label.into()),
        }
    }
}

/// Separator used when pre-images sharing a member set are merged.
const LABEL_JOIN: &str = "/";

/// An abstract sensor: a collection of distinct non-empty pre-images whose
/// union is the whole universe, held in canonical order.
///
/// Equality, ordering and hashing look at the member sets only; labels are
/// carried along but never distinguish two covers.
#[derive(Clone)]
pub struct Cover {
    universe: FeatureUniverse,
    preimages: Vec<Preimage>,
}

impl Cover {
    /// Builds a cover from collections of feature labels.
    pub fn new<I, J, S>(universe: &FeatureUniverse, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = J>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let sets = sets
            .into_iter()
            .map(|s| universe.set_of(s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sets(universe, sets)
    }

    pub fn from_sets<I>(universe: &FeatureUniverse, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = FeatureSet>,
    {
        Self::from_preimages(universe, sets.into_iter().map(Preimage::new))
    }

    /// Validates, merges duplicate member sets (joining their labels) and
    /// sorts into canonical order.
    pub fn from_preimages<I>(universe: &FeatureUniverse, preimages: I) -> Result<Self>
    where
        I: IntoIterator<Item = Preimage>,
    {
        let full = universe.full();
        let mut merged: BTreeMap<FeatureSet, Option<String>> = BTreeMap::new();
        for p in preimages {
            if p.members.is_empty() {
                return Err(Error::EmptyPreimage);
            }
            if !p.members.is_subset(full) {
                return Err(Error::UnknownFeature(format!(
                    "index {}",
                    p.members.difference(full).iter().next().unwrap_or_default()
                )));
            }
            let slot = merged.entry(p.members).or_insert(None);
            if let Some(label) = p.label {
                match slot {
                    Some(existing) => {
                        if !existing.split(LABEL_JOIN).any(|l| l == label) {
                            existing.push_str(LABEL_JOIN);
                            existing.push_str(&label);
                        }
                    }
                    None => *slot = Some(label),
                }
            }
        }
        let covered = merged
            .keys()
            .fold(FeatureSet::EMPTY, |acc, s| acc.union(*s));
        if covered != full {
            let missing = universe
                .labels_of(full.difference(covered))
                .into_iter()
                .map(str::to_string)
                .collect();
            return Err(Error::Uncovered(missing));
        }
        Ok(Cover {
            universe: universe.clone(),
            preimages: merged
                .into_iter()
                .map(|(members, label)| Preimage { members, label })
                .collect(),
        })
    }

    pub fn universe(&self) -> &FeatureUniverse {
        &self.universe
    }

    pub fn preimages(&self) -> &[Preimage] {
        &self.preimages
    }

    /// Member sets in canonical order.
    pub fn sets(&self) -> impl ExactSizeIterator<Item = FeatureSet> + '_ {
        self.preimages.iter().map(|p| p.members)
    }

    pub fn len(&self) -> usize {
        self.preimages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preimages.is_empty()
    }

    pub fn contains_set(&self, set: FeatureSet) -> bool {
        self.preimages
            .binary_search_by(|p| p.members.cmp(&set))
            .is_ok()
    }

    /// Re-canonicalizes the cover. Covers are always canonical, so this is a
    /// copy; it exists so callers can state the idempotence law.
    pub fn canonical(&self) -> Cover {
        Cover::from_preimages(&self.universe, self.preimages.iter().cloned())
            .expect("a valid cover stays valid")
    }

    /// `{1,2}|{2,3}`: pre-images in canonical order separated by `|`.
    pub fn canonical_string(&self) -> String {
        self.sets()
            .map(|s| self.universe.format_set(s))
            .collect::<Vec<_>>()
            .join("|")
    }

    pub(crate) fn check_same(&self, other: &Cover) -> Result<()> {
        self.universe.check_same(&other.universe)
    }
}

impl PartialEq for Cover {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.sets().eq(other.sets())
    }
}

impl Eq for Cover {}

impl Hash for Cover {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.universe.hash(state);
        for s in self.sets() {
            s.hash(state);
        }
    }
}

/// Covers order by universe, then pre-image count, then lexicographically
/// over their canonical pre-image sequences.
impl Ord for Cover {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe
            .cmp(&other.universe)
            .then_with(|| self.len().cmp(&other.len()))
            .then_with(|| self.sets().cmp(other.sets()))
    }
}

impl PartialOrd for Cover {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

impl fmt::Debug for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cover({})", self.canonical_string())
    }
}

/// A set-valued map from world features to sensor readings, stored reading
/// by reading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensorMap {
    universe: FeatureUniverse,
    readings: Vec<(String, FeatureSet)>,
}

impl SensorMap {
    /// `readings` pairs each reading label with the features at which it can
    /// be produced.
    pub fn new<I, J, S, L>(universe: &FeatureUniverse, readings: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, J)>,
        L: Into<String>,
        J: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<(String, FeatureSet)> = Vec::new();
        for (label, features) in readings {
            let label = label.into();
            if out.iter().any(|(l, _)| *l == label) {
                return Err(Error::InvalidSensorMap(format!(
                    "reading `{label}` listed twice"
                )));
            }
            let set = universe.set_of(features)?;
            if set.is_empty() {
                return Err(Error::InvalidSensorMap(format!(
                    "reading `{label}` occurs at no feature"
                )));
            }
            out.push((label, set));
        }
        let seen = out.iter().fold(FeatureSet::EMPTY, |acc, (_, s)| acc.union(*s));
        let silent = universe.full().difference(seen);
        if !silent.is_empty() {
            return Err(Error::InvalidSensorMap(format!(
                "no reading at {}",
                universe.labels_of(silent).join(", ")
            )));
        }
        Ok(SensorMap {
            universe: universe.clone(),
            readings: out,
        })
    }

    /// Builds the map feature by feature: `f(feature index)` lists the
    /// readings that feature can produce.
    pub fn from_feature_fn<F, R>(universe: &FeatureUniverse, mut f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Vec<R>,
        R: Into<String>,
    {
        let mut by_reading: Vec<(String, Vec<String>)> = Vec::new();
        for i in 0..universe.len() {
            for r in f(i) {
                let r = r.into();
                let feature = universe.label(i).to_string();
                match by_reading.iter_mut().find(|(l, _)| *l == r) {
                    Some((_, features)) => features.push(feature),
                    None => by_reading.push((r, vec![feature])),
                }
            }
        }
        Self::new(universe, by_reading)
    }

    pub fn universe(&self) -> &FeatureUniverse {
        &self.universe
    }

    pub fn readings(&self) -> &[(String, FeatureSet)] {
        &self.readings
    }

    /// The cover formed by the reading pre-images.
    pub fn invert(&self) -> Cover {
        Cover::from_preimages(
            &self.universe,
            self.readings
                .iter()
                .map(|(l, s)| Preimage::labelled(*s, l.clone())),
        )
        .expect("sensor map invariants guarantee a cover")
    }
}

/// How two covers over the same universe relate under subsumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelationTag {
    Equal,
    FirstSubsumesSecond,
    SecondSubsumesFirst,
    Incomparable,
}

impl RelationTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationTag::Equal => "equal",
            RelationTag::FirstSubsumesSecond => "first-subsumes-second",
            RelationTag::SecondSubsumesFirst => "second-subsumes-first",
            RelationTag::Incomparable => "incomparable",
        }
    }
}

impl fmt::Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u3() -> FeatureUniverse {
        FeatureUniverse::numbered(3).unwrap()
    }

    #[test]
    fn universe_construction() {
        assert_eq!(u3().len(), 3);
        assert_eq!(FeatureUniverse::new(["x"]).unwrap().len(), 1);
        assert_eq!(
            FeatureUniverse::new(["a", "a"]).unwrap_err(),
            Error::DuplicateLabel("a".into())
        );
        assert_eq!(
            FeatureUniverse::new(Vec::<String>::new()).unwrap_err(),
            Error::EmptyUniverse
        );
        assert_eq!(FeatureUniverse::new(["a", ""]).unwrap_err(), Error::EmptyLabel);
        assert!(matches!(
            FeatureUniverse::numbered(65),
            Err(Error::UniverseTooLarge { size: 65, .. })
        ));
    }

    #[test]
    fn gps_cover_is_valid() {
        let c = Cover::new(&u3(), [vec!["1", "2"], vec!["1", "2", "3"], vec!["2", "3"]]).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.canonical_string(), "{1,2}|{2,3}|{1,2,3}");
    }

    #[test]
    fn uncovered_feature_is_named() {
        let err = Cover::new(&u3(), [vec!["1"], vec!["2"]]).unwrap_err();
        assert_eq!(err, Error::Uncovered(vec!["3".into()]));
        assert_eq!(err.to_string(), "features not covered: 3");
    }

    #[test]
    fn duplicate_sets_merge() {
        let u = FeatureUniverse::numbered(2).unwrap();
        let c = Cover::new(&u, [vec!["1", "2"], vec!["2", "1"]]).unwrap();
        assert_eq!(c.len(), 1);
    }

    #[test]
    fn constructor_errors() {
        let u = u3();
        assert_eq!(
            Cover::new(&u, [vec!["1", "2", "3"], vec![]]).unwrap_err(),
            Error::EmptyPreimage
        );
        assert_eq!(
            Cover::new(&u, [vec!["1", "2", "9"]]).unwrap_err(),
            Error::UnknownFeature("9".into())
        );
    }

    #[test]
    fn canonical_set_order() {
        let mut sets: Vec<FeatureSet> = FeatureSet::full(3).nonempty_subsets().collect();
        sets.sort();
        let u = u3();
        let shown: Vec<String> = sets.iter().map(|s| u.format_set(*s)).collect();
        assert_eq!(
            shown,
            ["{1}", "{2}", "{3}", "{1,2}", "{1,3}", "{2,3}", "{1,2,3}"]
        );
    }

    #[test]
    fn labels_do_not_affect_equality() {
        let u = u3();
        let a = Cover::from_preimages(&u, [Preimage::labelled(u.full(), "x")]).unwrap();
        let b = Cover::from_sets(&u, [u.full()]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.preimages()[0].label.as_deref(), Some("x"));
    }

    #[test]
    fn invert_gps_map() {
        let u = u3();
        // Reading v is possible at positions within distance one of v.
        let map = SensorMap::from_feature_fn(&u, |i| {
            let pos = i as i64 + 1;
            (1..=3i64)
                .filter(|v| (v - pos).abs() <= 1)
                .map(|v| v.to_string())
                .collect()
        })
        .unwrap();
        let cover = map.invert();
        assert_eq!(cover.canonical_string(), "{1,2}|{2,3}|{1,2,3}");
        let labels: Vec<_> = cover.preimages().iter().map(|p| p.label.as_deref().unwrap()).collect();
        assert_eq!(labels, ["1", "3", "2"]);
    }

    #[test]
    fn invert_identity_and_constant_maps() {
        let u = u3();
        let id = SensorMap::new(&u, [("a", ["1"]), ("b", ["2"]), ("c", ["3"])]).unwrap();
        assert_eq!(id.invert().canonical_string(), "{1}|{2}|{3}");
        let constant = SensorMap::new(&u, [("r", ["1", "2", "3"])]).unwrap();
        assert_eq!(constant.invert().canonical_string(), "{1,2,3}");
    }

    #[test]
    fn invert_merges_duplicate_preimages() {
        let u = FeatureUniverse::numbered(2).unwrap();
        let m = SensorMap::new(&u, [("lo", vec!["1", "2"]), ("hi", vec!["2", "1"])]).unwrap();
        let c = m.invert();
        assert_eq!(c.len(), 1);
        assert_eq!(c.preimages()[0].label.as_deref(), Some("lo/hi"));
    }

    #[test]
    fn sensor_map_errors() {
        let u = u3();
        assert!(matches!(
            SensorMap::new(&u, [("a", vec!["1", "2"])]),
            Err(Error::InvalidSensorMap(_))
        ));
        assert!(matches!(
            SensorMap::new(&u, [("a", vec!["1", "2", "3"]), ("b", vec![])]),
            Err(Error::InvalidSensorMap(_))
        ));
    }

    #[test]
    fn subset_iteration() {
        let s = FeatureSet::from_bits(0b1011);
        let subs: Vec<_> = s.nonempty_subsets().collect();
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|x| x.is_subset(s) && !x.is_empty()));
        assert_eq!(FeatureSet::EMPTY.nonempty_subsets().count(), 0);
        assert_eq!(s.iter().collect::<Vec<_>>(), [0, 1, 3]);
    }
}
