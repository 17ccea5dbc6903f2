#![allow(dead_code)]

use cover_lattice::{Cover, FeatureSet, FeatureUniverse, PlanningProblem};

pub fn u(n: usize) -> FeatureUniverse {
    FeatureUniverse::numbered(n).unwrap()
}

pub fn cov(u: &FeatureUniverse, sets: &[&[&str]]) -> Cover {
    Cover::new(u, sets.iter().map(|s| s.iter().copied())).unwrap()
}

/// States 1..3, one action moving right and saturating at 3; goal {3}.
pub fn right_march() -> PlanningProblem {
    let u = u(3);
    PlanningProblem::new(
        &u,
        ["right"],
        [("1", "right", vec!["2"]), ("2", "right", vec!["3"]), ("3", "right", vec!["3"])],
        ["1", "2", "3"],
        ["3"],
    )
    .unwrap()
}

/// Two junctions (1 and 3) needing opposite turns to reach 2; 4 is an
/// absorbing dead end.
pub fn junction() -> PlanningProblem {
    let u = u(4);
    PlanningProblem::new(
        &u,
        ["left", "right"],
        [
            ("1", "left", vec!["2"]),
            ("2", "left", vec!["2"]),
            ("3", "left", vec!["4"]),
            ("4", "left", vec!["4"]),
            ("1", "right", vec!["4"]),
            ("2", "right", vec!["2"]),
            ("3", "right", vec!["2"]),
            ("4", "right", vec!["4"]),
        ],
        ["1", "3"],
        ["2"],
    )
    .unwrap()
}

/// Off-by-one GPS on three positions.
pub fn gps_readings() -> Vec<(String, Vec<String>)> {
    (1..=3i64)
        .map(|v| {
            let at = (1..=3i64).filter(|p| (p - v).abs() <= 1).map(|p| p.to_string()).collect();
            (v.to_string(), at)
        })
        .collect()
}

/// Every family of non-empty subsets of `{0..n-1}` that covers, found by
/// scanning all 2^(2^n − 1) selector masks.
pub fn brute_force_covers(n: usize) -> Vec<Vec<FeatureSet>> {
    let subsets: Vec<FeatureSet> = (1u64..(1 << n)).map(FeatureSet::from_bits).collect();
    let full = (1u64 << n) - 1;
    let mut out = Vec::new();
    for pick in 1u64..(1u64 << subsets.len()) {
        let chosen: Vec<FeatureSet> = subsets
            .iter()
            .enumerate()
            .filter(|(i, _)| pick & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();
        let union = chosen.iter().fold(0u64, |acc, s| acc | s.bits());
        if union == full {
            out.push(chosen);
        }
    }
    out
}

/// Σₖ (−1)^k C(n,k) 2^(2^(n−k) − 1).
pub fn inclusion_exclusion(n: u32) -> i128 {
    let mut total = 0i128;
    let mut binom = 1i128;
    for k in 0..=n {
        let term = binom * (1i128 << ((1u32 << (n - k)) - 1));
        total += if k % 2 == 0 { term } else { -term };
        binom = binom * (n - k) as i128 / (k + 1) as i128;
    }
    total
}

/// Bell numbers from the Bell triangle.
pub fn bell(n: usize) -> u64 {
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Downward closure computed by scanning every mask of the universe.
pub fn brute_closure(c: &Cover) -> Vec<FeatureSet> {
    let n = c.universe().len();
    let mut out: Vec<FeatureSet> = (1u64..(1 << n))
        .map(FeatureSet::from_bits)
        .filter(|m| c.sets().any(|p| m.is_subset(p)))
        .collect();
    out.sort();
    out
}

/// Depth-first AND-OR search over beliefs with a path-based cycle check.
pub fn and_or_solvable(p: &PlanningProblem, c: &Cover) -> bool {
    fn or_node(p: &PlanningProblem, c: &Cover, b: FeatureSet, path: &mut Vec<FeatureSet>) -> bool {
        if b.is_subset(p.goal()) {
            return true;
        }
        if path.contains(&b) {
            return false;
        }
        path.push(b);
        let ok = c.sets().filter(|r| r.intersects(b)).all(|r| {
            let q = b.intersection(r);
            (0..p.actions().len()).any(|a| {
                let next = q
                    .iter()
                    .fold(FeatureSet::EMPTY, |acc, s| acc.union(p.successors(s, a)));
                or_node(p, c, next, path)
            })
        });
        path.pop();
        ok
    }
    or_node(p, c, p.initial().states(), &mut Vec::new())
}

/// Sub-collection test written directly from the definition.
pub fn subcollection(a: &Cover, b: &Cover) -> bool {
    a.sets().all(|s| b.sets().any(|t| t == s))
}
