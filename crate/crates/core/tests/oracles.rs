//! Library results checked against independent brute-force computations.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use cover_lattice::enumerate::{all_classes, all_covers, all_partitions, hasse_edges};
use cover_lattice::planner::{self, random_problem};
use cover_lattice::{order, star, Cover, Order};

#[test]
fn cover_counts_match_formula_and_brute_force() {
    for n in 1..=4usize {
        let got = all_covers(&u(n)).unwrap().len() as i128;
        assert_eq!(got, inclusion_exclusion(n as u32), "n = {n}");
    }
    for n in 1..=3usize {
        let universe = u(n);
        let brute: BTreeSet<Cover> = brute_force_covers(n)
            .into_iter()
            .map(|sets| Cover::from_sets(&universe, sets).unwrap())
            .collect();
        let listed: BTreeSet<Cover> = all_covers(&universe).unwrap().into_iter().collect();
        assert_eq!(listed, brute, "n = {n}");
    }
}

#[test]
fn make_cover_accepts_exactly_the_covering_families() {
    for n in 1..=3usize {
        let universe = u(n);
        let full = universe.full();
        let subsets: Vec<_> = full.nonempty_subsets().collect();
        for pick in 0u64..(1 << subsets.len()) {
            let chosen: Vec<_> = subsets
                .iter()
                .enumerate()
                .filter(|(i, _)| pick & (1 << i) != 0)
                .map(|(_, s)| *s)
                .collect();
            let covers = chosen.iter().fold(cover_lattice::FeatureSet::EMPTY, |a, s| a.union(*s)) == full;
            assert_eq!(Cover::from_sets(&universe, chosen).is_ok(), covers);
        }
    }
}

#[test]
fn star_closure_matches_mask_scan() {
    for c in all_covers(&u(3)).unwrap() {
        let closed: Vec<_> = star::star_closure(&c).unwrap().sets().collect();
        assert_eq!(closed, brute_closure(&c), "{c}");
    }
    let u4 = u(4);
    let c = cov(&u4, &[&["1", "2"], &["2", "3"], &["4"]]);
    assert_eq!(star::star_closure(&c).unwrap().sets().collect::<Vec<_>>(), brute_closure(&c));
}

#[test]
fn class_grouping_matches_brute_force() {
    for (n, expected) in [(2usize, 2usize), (3, 9)] {
        let universe = u(n);
        let mut groups: BTreeMap<Vec<_>, Vec<Cover>> = BTreeMap::new();
        for c in all_covers(&universe).unwrap() {
            groups.entry(brute_closure(&c)).or_default().push(c);
        }
        assert_eq!(groups.len(), expected);
        let classes = all_classes(&universe).unwrap();
        assert_eq!(classes.len(), expected);
        for class in &classes {
            let members = &groups[&brute_closure(&class.representative)];
            assert_eq!(members.len() as u64, class.size().unwrap());
            let mut listed = star::class_members(&class.representative).unwrap();
            listed.sort();
            let mut grouped = members.clone();
            grouped.sort();
            assert_eq!(listed, grouped);
        }
    }
}

#[test]
fn class_members_for_pair_universe() {
    let u2 = u(2);
    let members = star::class_members(&cov(&u2, &[&["1", "2"]])).unwrap();
    let brute: Vec<Cover> = all_covers(&u2)
        .unwrap()
        .into_iter()
        .filter(|c| star::star_equivalent(c, &cov(&u2, &[&["1", "2"]])).unwrap())
        .collect();
    assert_eq!(members, brute);
    assert_eq!(members.len(), 4);
}

#[test]
fn partition_counts_follow_bell_numbers() {
    for n in 1..=7usize {
        assert_eq!(all_partitions(&u(n)).unwrap().len() as u64, bell(n), "n = {n}");
    }
}

#[test]
fn partitions_are_exactly_the_disjoint_covers() {
    for n in 1..=4usize {
        let brute: Vec<Cover> = all_covers(&u(n))
            .unwrap()
            .into_iter()
            .filter(|c| {
                c.sets().enumerate().all(|(i, a)| c.sets().skip(i + 1).all(|b| !a.intersects(b)))
            })
            .collect();
        assert_eq!(all_partitions(&u(n)).unwrap(), brute);
    }
}

fn reachable(edges: &[(usize, usize)], m: usize) -> Vec<BTreeSet<usize>> {
    let mut out = vec![BTreeSet::new(); m];
    for start in 0..m {
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(a, b) in edges {
                if a == x && out[start].insert(b) {
                    stack.push(b);
                }
            }
        }
    }
    out
}

#[test]
fn hasse_reachability_is_the_order() {
    let covers = all_covers(&u(3)).unwrap();
    for order in [Order::Subsumption] {
        let d = hasse_edges(&covers, order).unwrap();
        let reach = reachable(&d.edges, d.nodes.len());
        for (i, a) in d.nodes.iter().enumerate() {
            for (j, b) in d.nodes.iter().enumerate() {
                if i != j {
                    assert_eq!(reach[i].contains(&j), order.holds(a, b).unwrap(), "{a} vs {b}");
                }
            }
        }
    }
    // Star-subsumption and proceeds are antisymmetric on representatives.
    let reps: Vec<Cover> = all_classes(&u(3)).unwrap().into_iter().map(|c| c.representative).collect();
    for order in [Order::StarSubsumption, Order::Proceeds] {
        let d = hasse_edges(&reps, order).unwrap();
        let reach = reachable(&d.edges, d.nodes.len());
        for (i, a) in d.nodes.iter().enumerate() {
            for (j, b) in d.nodes.iter().enumerate() {
                if i != j {
                    assert_eq!(reach[i].contains(&j), order.holds(a, b).unwrap());
                }
            }
        }
    }
}

/// Transitive reduction of refinement, straight from the definition.
fn refinement_reduction(parts: &[Cover]) -> BTreeSet<(Cover, Cover)> {
    let r = |p: &Cover, q: &Cover| star::refines(p, q).unwrap();
    let mut out = BTreeSet::new();
    for p in parts {
        for q in parts {
            if p != q
                && r(p, q)
                && !parts.iter().any(|m| m != p && m != q && r(p, m) && r(m, q))
            {
                out.insert((p.clone(), q.clone()));
            }
        }
    }
    out
}

#[test]
fn partition_slice_is_the_refinement_diagram() {
    for n in 1..=4usize {
        let slice = star::partition_slice(&u(n)).unwrap();
        let edges: BTreeSet<(Cover, Cover)> = slice
            .edges
            .iter()
            .map(|&(a, b)| (slice.nodes[a].clone(), slice.nodes[b].clone()))
            .collect();
        assert_eq!(edges, refinement_reduction(&slice.nodes), "n = {n}");
    }
}

#[test]
fn solvable_agrees_with_and_or_search() {
    let mut problems = vec![right_march()];
    for seed in 0..30 {
        for n in 1..=3 {
            problems.push(random_problem(n, 2, seed).unwrap());
        }
    }
    let mut mixed = 0;
    for p in &problems {
        let covers = all_covers(p.universe()).unwrap();
        let mut seen = BTreeSet::new();
        for c in &covers {
            let fast = planner::solvable(p, c).unwrap();
            assert_eq!(fast, and_or_solvable(p, c), "{c}");
            seen.insert(fast);
        }
        if seen.len() == 2 {
            mixed += 1;
        }
    }
    // The random family must actually discriminate between covers.
    assert!(mixed >= 5, "only {mixed} problems split the covers");
}

#[test]
fn junction_world_against_and_or_search() {
    let p = junction();
    for c in all_covers(p.universe()).unwrap() {
        assert_eq!(planner::solvable(&p, &c).unwrap(), and_or_solvable(&p, &c), "{c}");
    }
}

#[test]
fn extracted_policies_verify_exactly_when_solvable() {
    for seed in 0..20 {
        let p = random_problem(3, 2, seed).unwrap();
        for c in all_covers(p.universe()).unwrap() {
            match planner::extract_policy(&p, &c) {
                Ok(pol) => {
                    assert!(planner::solvable(&p, &c).unwrap());
                    assert!(planner::verify_policy(&p, &c, &pol), "seed {seed}, {c}");
                }
                Err(_) => assert!(!planner::solvable(&p, &c).unwrap()),
            }
        }
    }
}

#[test]
fn policy_ranks_strictly_decrease() {
    for seed in 0..20 {
        let p = random_problem(3, 2, seed).unwrap();
        for c in all_covers(p.universe()).unwrap() {
            let Ok(pol) = planner::extract_policy(&p, &c) else { continue };
            for (q, action) in &pol.action_of {
                let a = p.action_index(action).unwrap();
                let next = p.post(*q, a);
                if p.in_goal(next) {
                    continue;
                }
                for (_, q2) in planner::sensed(&c, next) {
                    assert!(pol.rank_of[&q2] < pol.rank_of[q], "seed {seed}, {c}");
                }
            }
        }
    }
}

fn brute_maximal(p: &cover_lattice::PlanningProblem) -> Vec<Cover> {
    let solvable: Vec<Cover> = all_covers(p.universe())
        .unwrap()
        .into_iter()
        .filter(|c| and_or_solvable(p, c))
        .collect();
    solvable
        .iter()
        .filter(|c| !solvable.iter().any(|d| d != *c && subcollection(c, d)))
        .cloned()
        .collect()
}

#[test]
fn maximal_solvable_covers_match_brute_force() {
    for seed in 0..10 {
        let p = random_problem(3, 2, seed).unwrap();
        assert_eq!(planner::maximal_solvable_covers(&p).unwrap(), brute_maximal(&p), "seed {seed}");
    }
}

#[test]
fn junction_search_against_exhaustive_filter() {
    let p = junction();
    let found = planner::maximal_solvable_covers(&p).unwrap();
    assert!(!found.is_empty());
    let solvable: Vec<Cover> = all_covers(p.universe())
        .unwrap()
        .into_iter()
        .filter(|c| and_or_solvable(&p, c))
        .collect();
    for m in &found {
        assert!(and_or_solvable(&p, m));
        // No solvable cover strictly contains a member.
        assert!(!solvable.iter().any(|d| d.len() > m.len() && subcollection(m, d)));
    }
    for c in &solvable {
        assert!(found.iter().any(|m| subcollection(c, m)), "{c} not below any maximum");
    }
    for (i, a) in found.iter().enumerate() {
        for b in &found[i + 1..] {
            assert!(!subcollection(a, b) && !subcollection(b, a));
        }
    }
    // A reading {1,3} cannot be disambiguated at the initial belief.
    let bad = p.universe().set_of(["1", "3"]).unwrap();
    assert!(found.iter().all(|m| !m.contains_set(bad)));
}

#[test]
fn upper_covers_of_everything_is_the_full_family() {
    let covers = all_covers(&u(3)).unwrap();
    let top = order::upper_covers(&covers).unwrap();
    assert_eq!(top.len(), 1);
    assert_eq!(top[0].len(), 7);
}
