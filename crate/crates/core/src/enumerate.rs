//! Exhaustive generation of covers, star classes and partitions over small
//! universes, and Hasse diagrams for the three cover orders.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::cover::{Cover, FeatureSet, FeatureUniverse};
use crate::error::{Error, Result};
use crate::order;
use crate::star::{self, StarClass};

/// Default universe bound for materializing every cover.
pub const MAX_COVER_FEATURES: usize = 4;

/// Largest universe [`CoverStream`] can walk (its candidate pool is the
/// `2^n − 1` non-empty subsets).
pub const MAX_STREAM_FEATURES: usize = 6;

/// Default universe bound for partition enumeration.
pub const MAX_PARTITION_FEATURES: usize = 8;

/// [`hasse_edges`] builds an item-by-item relation matrix; this caps it.
pub const MAX_HASSE_ITEMS: usize = 4096;

fn check_bound(universe: &FeatureUniverse, limit: usize, what: &'static str) -> Result<()> {
    if universe.len() > limit {
        Err(Error::LimitExceeded {
            what,
            size: universe.len(),
            limit,
        })
    } else {
        Ok(())
    }
}

/// Every cover of `universe` in canonical order (n ≤ 4).
pub fn all_covers(universe: &FeatureUniverse) -> Result<Vec<Cover>> {
    all_covers_with(universe, MAX_COVER_FEATURES)
}

pub fn all_covers_with(universe: &FeatureUniverse, max_n: usize) -> Result<Vec<Cover>> {
    check_bound(universe, max_n, "cover enumeration universe size")?;
    Ok(CoverStream::new(universe)?.collect())
}

/// Streams every cover of a universe in canonical order without
/// materializing the whole family.
///
/// Candidate families are walked as k-combinations of the canonically sorted
/// non-empty subsets, for k = 1, 2, …; lexicographic combination order then
/// coincides with canonical cover order.
pub struct CoverStream {
    universe: FeatureUniverse,
    pool: Vec<FeatureSet>,
    combo: Vec<usize>,
    started: bool,
}

impl CoverStream {
    pub fn new(universe: &FeatureUniverse) -> Result<Self> {
        check_bound(universe, MAX_STREAM_FEATURES, "cover stream universe size")?;
        let mut pool: Vec<FeatureSet> = universe.full().nonempty_subsets().collect();
        pool.sort();
        Ok(CoverStream {
            universe: universe.clone(),
            pool,
            combo: vec![0],
            started: false,
        })
    }

    fn advance(&mut self) -> bool {
        let m = self.pool.len();
        let k = self.combo.len();
        // Rightmost position that can still move.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if self.combo[i] < m - k + i {
                self.combo[i] += 1;
                for j in i + 1..k {
                    self.combo[j] = self.combo[j - 1] + 1;
                }
                return true;
            }
        }
        if k == m {
            return false;
        }
        self.combo = (0..=k).collect();
        true
    }
}

impl Iterator for CoverStream {
    type Item = Cover;

    fn next(&mut self) -> Option<Cover> {
        let full = self.universe.full();
        loop {
            if self.started {
                if !self.advance() {
                    return None;
                }
            } else {
                self.started = true;
            }
            let covered = self
                .combo
                .iter()
                .fold(FeatureSet::EMPTY, |acc, &i| acc.union(self.pool[i]));
            if covered == full {
                let sets = self.combo.iter().map(|&i| self.pool[i]);
                return Some(Cover::from_sets(&self.universe, sets).expect("candidate covers"));
            }
        }
    }
}

/// One [`StarClass`] per star-equivalence class, ordered by representative.
pub fn all_classes(universe: &FeatureUniverse) -> Result<Vec<StarClass>> {
    check_bound(universe, MAX_COVER_FEATURES, "class enumeration universe size")?;
    let mut by_closure: BTreeMap<Cover, Cover> = BTreeMap::new();
    for c in CoverStream::new(universe)? {
        let closure = star::star_closure(&c)?;
        by_closure
            .entry(closure)
            .or_insert_with(|| star::canonical_rep(&c));
    }
    let mut classes: Vec<StarClass> = by_closure
        .into_iter()
        .map(|(closure, representative)| StarClass {
            representative,
            closure,
        })
        .collect();
    classes.sort();
    Ok(classes)
}

/// Every partition of `universe` (n ≤ 8), in canonical order.
pub fn all_partitions(universe: &FeatureUniverse) -> Result<Vec<Cover>> {
    check_bound(universe, MAX_PARTITION_FEATURES, "partition enumeration universe size")?;
    let n = universe.len();
    // Restricted growth strings: block[i] ≤ 1 + max(block[..i]).
    let mut out = Vec::new();
    let mut block = vec![0usize; n];
    loop {
        let blocks = block.iter().copied().max().unwrap_or(0) + 1;
        let mut sets = vec![FeatureSet::EMPTY; blocks];
        for (i, &b) in block.iter().enumerate() {
            sets[b].insert(i);
        }
        out.push(Cover::from_sets(universe, sets).expect("partition covers"));

        let mut i = n;
        loop {
            if i <= 1 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            let prefix_max = block[..i].iter().copied().max().unwrap_or(0);
            if block[i] <= prefix_max {
                block[i] += 1;
                for b in &mut block[i + 1..] {
                    *b = 0;
                }
                break;
            }
        }
    }
}

/// The three orders a Hasse diagram can be drawn for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Subsumption,
    StarSubsumption,
    Proceeds,
}

impl Order {
    /// `a` precedes `b`, meaning `a` is drawn above `b`.
    pub fn holds(self, a: &Cover, b: &Cover) -> Result<bool> {
        match self {
            Order::Subsumption => order::subsumes(a, b),
            Order::StarSubsumption => star::star_subsumes(a, b),
            Order::Proceeds => star::proceeds(a, b),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Order::Subsumption => "subsumption",
            Order::StarSubsumption => "star",
            Order::Proceeds => "proceeds",
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "subsumption" => Ok(Order::Subsumption),
            "star" | "star-subsumption" => Ok(Order::StarSubsumption),
            "proceeds" => Ok(Order::Proceeds),
            other => Err(format!("unknown order `{other}`")),
        }
    }
}

/// A transitive reduction over a set of covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    /// Deduplicated items, upper levels first, canonical order within a level.
    pub nodes: Vec<Cover>,
    /// `(upper, lower)` index pairs, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl Diagram {
    pub fn edge_covers(&self) -> impl Iterator<Item = (&Cover, &Cover)> {
        self.edges.iter().map(|&(a, b)| (&self.nodes[a], &self.nodes[b]))
    }
}

struct BitRows {
    words: usize,
    rows: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitRows {
            words,
            rows: vec![0; n * words],
        }
    }

    fn set(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] & (1 << (j % 64)) != 0
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
        row.iter().enumerate().flat_map(|(w, &bits)| {
            FeatureSet::from_bits(bits).iter().map(move |b| w * 64 + b)
        })
    }
}

/// Transitive reduction of `order` restricted to `items`.
///
/// An edge `(a, b)` means `a` is immediately above `b`. Items on which the
/// order is not antisymmetric or not transitive are rejected with a witness.
pub fn hasse_edges(items: &[Cover], order: Order) -> Result<Diagram> {
    let mut nodes: Vec<Cover> = items.to_vec();
    nodes.sort();
    nodes.dedup();
    if let Some(first) = nodes.first() {
        for c in &nodes {
            first.check_same(c)?;
        }
    }
    let m = nodes.len();
    if m > MAX_HASSE_ITEMS {
        return Err(Error::LimitExceeded {
            what: "Hasse diagram item count",
            size: m,
            limit: MAX_HASSE_ITEMS,
        });
    }
    let closures = match order {
        Order::Subsumption => Vec::new(),
        _ => nodes
            .iter()
            .map(star::star_closure)
            .collect::<Result<Vec<_>>>()?,
    };
    let relates = |i: usize, j: usize| -> bool {
        let (a, b) = (&nodes[i], &nodes[j]);
        let plain = |x: &Cover, y: &Cover| order::subsumes(x, y).expect("same universe");
        match order {
            Order::Subsumption => plain(a, b),
            Order::StarSubsumption => plain(&closures[i], &closures[j]),
            Order::Proceeds => {
                plain(a, b) || (!plain(b, a) && plain(&closures[i], &closures[j]))
            }
        }
    };
    let mut strictly_above = BitRows::new(m);
    for i in 0..m {
        for j in 0..m {
            if i != j && relates(i, j) {
                strictly_above.set(i, j);
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            if strictly_above.get(i, j) && strictly_above.get(j, i) {
                return Err(Error::NotAntisymmetric(
                    nodes[i].canonical_string(),
                    nodes[j].canonical_string(),
                ));
            }
        }
    }

    for i in 0..m {
        let row = strictly_above.row(i);
        for k in BitRows::ones(row) {
            let stray = strictly_above.row(k).iter().zip(row).enumerate().find_map(|(w, (&below, &mine))| {
                let missing = below & !mine;
                (missing != 0).then(|| w * 64 + missing.trailing_zeros() as usize)
            });
            if let Some(j) = stray {
                return Err(Error::NotTransitive(
                    nodes[i].canonical_string(),
                    nodes[k].canonical_string(),
                    nodes[j].canonical_string(),
                ));
            }
        }
    }

    // Immediate successors: those not reachable through another successor.
    let mut immediate: Vec<Vec<usize>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = strictly_above.row(i).to_vec();
        for k in BitRows::ones(strictly_above.row(i)).collect::<Vec<_>>() {
            for (w, bits) in row.iter_mut().zip(strictly_above.row(k)) {
                *w &= !bits;
            }
        }
        immediate.push(BitRows::ones(&row).collect());
    }

    // Level = longest chain from a top element. Elements with fewer strict
    // predecessors come first in any linear extension.
    let mut preds = vec![0usize; m];
    for i in 0..m {
        for j in BitRows::ones(strictly_above.row(i)) {
            preds[j] += 1;
        }
    }
    let mut topo: Vec<usize> = (0..m).collect();
    topo.sort_by_key(|&i| preds[i]);
    let mut level = vec![0usize; m];
    for &i in &topo {
        for &j in &immediate[i] {
            level[j] = level[j].max(level[i] + 1);
        }
    }

    let mut order_ix: Vec<usize> = (0..m).collect();
    order_ix.sort_by(|&a, &b| level[a].cmp(&level[b]).then_with(|| nodes[a].cmp(&nodes[b])));
    let mut position = vec![0usize; m];
    for (pos, &i) in order_ix.iter().enumerate() {
        position[i] = pos;
    }
    let mut edges: Vec<(usize, usize)> = immediate
        .iter()
        .enumerate()
        .flat_map(|(i, succ)| succ.iter().map(move |&j| (i, j)))
        .map(|(i, j)| (position[i], position[j]))
        .collect();
    edges.sort();
    let nodes = order_ix.into_iter().map(|i| nodes[i].clone()).collect();
    Ok(Diagram { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: usize) -> FeatureUniverse {
        FeatureUniverse::numbered(n).unwrap()
    }

    fn cov(u: &FeatureUniverse, sets: &[&[&str]]) -> Cover {
        Cover::new(u, sets.iter().map(|s| s.iter().copied())).unwrap()
    }

    #[test]
    fn cover_counts() {
        assert_eq!(all_covers(&u(1)).unwrap().len(), 1);
        assert_eq!(all_covers(&u(2)).unwrap().len(), 5);
        assert_eq!(all_covers(&u(3)).unwrap().len(), 109);
        assert_eq!(all_covers(&u(1)).unwrap()[0].canonical_string(), "{1}");
    }

    #[test]
    fn stream_is_sorted_and_unique() {
        let covers = all_covers(&u(3)).unwrap();
        assert!(covers.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cover_bound() {
        assert!(matches!(all_covers(&u(5)), Err(Error::LimitExceeded { .. })));
        assert!(CoverStream::new(&u(5)).unwrap().next().is_some());
        assert!(CoverStream::new(&u(7)).is_err());
    }

    #[test]
    fn class_counts() {
        let c2 = all_classes(&u(2)).unwrap();
        let reps: Vec<String> = c2.iter().map(|c| c.representative.canonical_string()).collect();
        assert_eq!(reps, ["{1,2}", "{1}|{2}"]);
        let c3 = all_classes(&u(3)).unwrap();
        assert_eq!(c3.len(), 9);
        assert_eq!(c3.iter().map(|c| c.size().unwrap()).sum::<u64>(), 109);
    }

    #[test]
    fn partition_counts() {
        assert_eq!(all_partitions(&u(1)).unwrap().len(), 1);
        let p3 = all_partitions(&u(3)).unwrap();
        assert_eq!(p3.len(), 5);
        assert!(p3.iter().all(star::is_partition));
        assert_eq!(all_partitions(&u(5)).unwrap().len(), 52);
        assert!(all_partitions(&u(9)).is_err());
    }

    #[test]
    fn three_element_chain() {
        let u3 = u(3);
        let items = [
            cov(&u3, &[&["1", "2", "3"]]),
            cov(&u3, &[&["1"], &["1", "2", "3"]]),
            cov(&u3, &[&["1"], &["2"], &["1", "2", "3"]]),
        ];
        let d = hasse_edges(&items, Order::Subsumption).unwrap();
        assert_eq!(d.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(d.nodes[0], items[0]);
    }

    #[test]
    fn single_item_has_no_edges() {
        let u3 = u(3);
        let d = hasse_edges(&[cov(&u3, &[&["1", "2", "3"]])], Order::Proceeds).unwrap();
        assert!(d.edges.is_empty());
        assert_eq!(d.nodes.len(), 1);
    }

    #[test]
    fn proceeds_rejects_non_antisymmetric_items() {
        let u2 = u(2);
        let a = cov(&u2, &[&["1", "2"], &["1"]]);
        let b = cov(&u2, &[&["1", "2"], &["2"]]);
        let err = hasse_edges(&[a, b], Order::Proceeds).unwrap_err();
        assert_eq!(
            err,
            Error::NotAntisymmetric("{1}|{1,2}".into(), "{2}|{1,2}".into())
        );
    }

    #[test]
    fn proceeds_non_transitive_triple_is_rejected() {
        let u3 = u(3);
        let items = [
            cov(&u3, &[&["1"], &["2"], &["1", "2", "3"]]),
            cov(&u3, &[&["3"], &["1", "2", "3"]]),
            cov(&u3, &[&["1"], &["1", "2", "3"]]),
        ];
        // The first two have equal closures, so the pair check fires first.
        assert!(matches!(
            hasse_edges(&items, Order::Proceeds),
            Err(Error::NotAntisymmetric(..))
        ));
        assert!(hasse_edges(&items, Order::Subsumption).is_ok());
    }

    #[test]
    fn partitions_under_subsumption_are_flat() {
        let p = all_partitions(&u(3)).unwrap();
        assert!(hasse_edges(&p, Order::Subsumption).unwrap().edges.is_empty());
    }

    #[test]
    fn order_names_parse() {
        for o in [Order::Subsumption, Order::StarSubsumption, Order::Proceeds] {
            assert_eq!(o.as_str().parse::<Order>().unwrap(), o);
        }
        assert!("lattice".parse::<Order>().is_err());
    }
}
