//! Worst-case belief-space planning under a sensor cover.
//!
//! Execution repeats three steps: if the belief lies inside the goal, stop;
//! otherwise receive a reading and intersect the belief with its pre-image;
//! then act, replacing the belief with the union of the action's successors.
//! The adversary picks the reading among those whose pre-image meets the
//! belief, and nondeterministic outcomes are folded into the next belief.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{Cover, FeatureSet, FeatureUniverse};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::order;

/// Beliefs are indexed by bitmask, so the fixpoint holds `2^n` entries.
pub const MAX_PLANNING_STATES: usize = 16;

/// Default universe bound for [`maximal_solvable_covers`].
pub const MAX_SEARCH_STATES: usize = enumerate::MAX_COVER_FEATURES;

/// A non-empty set of states consistent with the robot's history.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Belief(FeatureSet);

impl Belief {
    pub fn new(states: FeatureSet) -> Option<Self> {
        (!states.is_empty()).then_some(Belief(states))
    }

    pub fn states(self) -> FeatureSet {
        self.0
    }
}

impl fmt::Debug for Belief {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Belief({:?})", self.0)
    }
}

/// States, nondeterministic actions, an initial belief and a goal region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanningProblem {
    universe: FeatureUniverse,
    /// Sorted by label; ties in policy extraction follow this order.
    actions: Vec<String>,
    /// `successors[state][action]`.
    successors: Vec<Vec<FeatureSet>>,
    initial: Belief,
    goal: FeatureSet,
}

impl PlanningProblem {
    /// Builds a problem from labelled transitions `(state, action, successors)`.
    /// Every state/action pair must appear exactly once.
    pub fn new<A, T, S, Succ, X, I, G>(
        universe: &FeatureUniverse,
        actions: A,
        transitions: T,
        initial: I,
        goal: G,
    ) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        T: IntoIterator<Item = (S, S, Succ)>,
        S: AsRef<str>,
        Succ: IntoIterator<Item = X>,
        X: AsRef<str>,
        I: IntoIterator<Item = X>,
        G: IntoIterator<Item = X>,
    {
        let mut actions: Vec<String> = actions.into_iter().map(Into::into).collect();
        let declared = actions.len();
        actions.sort();
        actions.dedup();
        if actions.len() != declared {
            return Err(Error::InvalidProblem("duplicate action label".into()));
        }
        if let Some(a) = actions.iter().find(|a| a.is_empty()) {
            return Err(Error::InvalidProblem(format!("empty action label `{a}`")));
        }
        let mut table: Vec<Vec<Option<FeatureSet>>> = vec![vec![None; actions.len()]; universe.len()];
        for (state, action, succ) in transitions {
            let s = universe.index_of(state.as_ref())?;
            let a = actions
                .binary_search_by(|x| x.as_str().cmp(action.as_ref()))
                .map_err(|_| Error::InvalidProblem(format!("unknown action `{}`", action.as_ref())))?;
            let slot = &mut table[s][a];
            if slot.is_some() {
                return Err(Error::InvalidProblem(format!(
                    "transition ({}, {}) given twice",
                    state.as_ref(),
                    action.as_ref()
                )));
            }
            *slot = Some(universe.set_of(succ)?);
        }
        let mut successors = Vec::with_capacity(universe.len());
        for (s, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (a, entry) in row.into_iter().enumerate() {
                out.push(entry.ok_or_else(|| {
                    Error::InvalidProblem(format!(
                        "transition ({}, {}) missing",
                        universe.label(s),
                        actions[a]
                    ))
                })?);
            }
            successors.push(out);
        }
        let initial = universe.set_of(initial)?;
        let goal = universe.set_of(goal)?;
        Self::from_sets(universe, actions, successors, initial, goal)
    }

    /// Index-level constructor. `actions` must already be sorted and
    /// distinct, with `successors[state][action]` aligned to it.
    pub fn from_sets(
        universe: &FeatureUniverse,
        actions: Vec<String>,
        successors: Vec<Vec<FeatureSet>>,
        initial: FeatureSet,
        goal: FeatureSet,
    ) -> Result<Self> {
        let full = universe.full();
        if !actions.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidProblem("actions must be sorted and distinct".into()));
        }
        if successors.len() != universe.len() {
            return Err(Error::InvalidProblem("transition table size mismatch".into()));
        }
        for (s, row) in successors.iter().enumerate() {
            if row.len() != actions.len() {
                return Err(Error::InvalidProblem("transition table size mismatch".into()));
            }
            for (a, succ) in row.iter().enumerate() {
                if succ.is_empty() || !succ.is_subset(full) {
                    return Err(Error::InvalidProblem(format!(
                        "transition ({}, {}) must lead to a non-empty set of states",
                        universe.label(s),
                        actions[a]
                    )));
                }
            }
        }
        if goal.is_empty() || !goal.is_subset(full) {
            return Err(Error::InvalidProblem("goal must be a non-empty set of states".into()));
        }
        let initial = Belief::new(initial)
            .filter(|b| b.states().is_subset(full))
            .ok_or_else(|| Error::InvalidProblem("initial belief must be a non-empty set of states".into()))?;
        Ok(PlanningProblem {
            universe: universe.clone(),
            actions,
            successors,
            initial,
            goal,
        })
    }

    pub fn universe(&self) -> &FeatureUniverse {
        &self.universe
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_index(&self, label: &str) -> Option<usize> {
        self.actions.binary_search_by(|a| a.as_str().cmp(label)).ok()
    }

    pub fn successors(&self, state: usize, action: usize) -> FeatureSet {
        self.successors[state][action]
    }

    pub fn initial(&self) -> Belief {
        self.initial
    }

    pub fn goal(&self) -> FeatureSet {
        self.goal
    }

    pub fn in_goal(&self, b: Belief) -> bool {
        b.states().is_subset(self.goal)
    }

    /// Belief after acting: the union of every member's successors.
    pub fn post(&self, b: Belief, action: usize) -> Belief {
        let next = b
            .states()
            .iter()
            .fold(FeatureSet::EMPTY, |acc, s| acc.union(self.successors[s][action]));
        Belief(next)
    }
}

/// Post-sensing beliefs `b ∩ r` for every reading `r` consistent with `b`.
pub fn sensed(c: &Cover, b: Belief) -> impl Iterator<Item = (usize, Belief)> + '_ {
    c.sets()
        .enumerate()
        .filter_map(move |(i, r)| Belief::new(b.states().intersection(r)).map(|q| (i, q)))
}

/// The least fixpoint of goal-attaining beliefs, with the stage at which
/// each belief entered it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinningRegion {
    universe: FeatureUniverse,
    /// Indexed by belief bitmask; `None` for losing beliefs and for index 0.
    ranks: Vec<Option<u32>>,
}

impl WinningRegion {
    pub fn contains(&self, b: Belief) -> bool {
        self.rank(b).is_some()
    }

    /// Worst-case number of sense-act rounds needed from `b`.
    pub fn rank(&self, b: Belief) -> Option<u32> {
        self.ranks.get(b.states().bits() as usize).copied().flatten()
    }

    /// Winning beliefs in canonical order.
    pub fn beliefs(&self) -> Vec<Belief> {
        let mut out: Vec<Belief> = self
            .ranks
            .iter()
            .enumerate()
            .filter(|(_, r)| r.is_some())
            .map(|(bits, _)| Belief(FeatureSet::from_bits(bits as u64)))
            .collect();
        out.sort();
        out
    }

    pub fn len(&self) -> usize {
        self.ranks.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn universe(&self) -> &FeatureUniverse {
        &self.universe
    }
}

fn check_inputs(p: &PlanningProblem, c: &Cover) -> Result<()> {
    p.universe.check_same(c.universe())?;
    if p.universe.len() > MAX_PLANNING_STATES {
        return Err(Error::LimitExceeded {
            what: "planning state count",
            size: p.universe.len(),
            limit: MAX_PLANNING_STATES,
        });
    }
    Ok(())
}

pub fn winning_beliefs(p: &PlanningProblem, c: &Cover) -> Result<WinningRegion> {
    check_inputs(p, c)?;
    let count = 1usize << p.universe.len();
    let mut ranks: Vec<Option<u32>> = vec![None; count];
    for (bits, rank) in ranks.iter_mut().enumerate().skip(1) {
        if FeatureSet::from_bits(bits as u64).is_subset(p.goal) {
            *rank = Some(0);
        }
    }
    let mut stage = 0u32;
    loop {
        let entering: Vec<usize> = (1..count)
            .filter(|&bits| ranks[bits].is_none())
            .filter(|&bits| {
                let b = Belief(FeatureSet::from_bits(bits as u64));
                sensed(c, b).all(|(_, q)| {
                    (0..p.actions.len())
                        .any(|a| ranks[p.post(q, a).states().bits() as usize].is_some())
                })
            })
            .collect();
        if entering.is_empty() {
            break;
        }
        stage += 1;
        for bits in entering {
            ranks[bits] = Some(stage);
        }
    }
    Ok(WinningRegion {
        universe: p.universe.clone(),
        ranks,
    })
}

pub fn solvable(p: &PlanningProblem, c: &Cover) -> Result<bool> {
    Ok(winning_beliefs(p, c)?.contains(p.initial))
}

/// A belief-indexed plan with a rank certificate.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Policy {
    /// Action taken at each post-sensing belief.
    pub action_of: BTreeMap<Belief, String>,
    /// Worst-case rounds remaining at each post-sensing belief, counting the
    /// action about to be taken. Strictly decreases along every branch.
    pub rank_of: BTreeMap<Belief, u32>,
    /// Rank of the initial belief; 0 when it already lies in the goal.
    pub initial_rank: u32,
}

impl Policy {
    pub fn is_empty(&self) -> bool {
        self.action_of.is_empty()
    }
}

/// Extracts a policy covering every belief reachable from the initial one.
/// At each post-sensing belief the action whose successor belief has the
/// smallest rank is chosen, first label winning ties.
pub fn extract_policy(p: &PlanningProblem, c: &Cover) -> Result<Policy> {
    let region = winning_beliefs(p, c)?;
    let initial_rank = region.rank(p.initial).ok_or(Error::Unsolvable)?;
    let mut policy = Policy {
        initial_rank,
        ..Policy::default()
    };
    let mut queue = VecDeque::from([p.initial]);
    let mut seen = BTreeSet::from([p.initial]);
    while let Some(b) = queue.pop_front() {
        if p.in_goal(b) {
            continue;
        }
        for (_, q) in sensed(c, b) {
            if policy.action_of.contains_key(&q) {
                continue;
            }
            let (action, rank) = (0..p.actions.len())
                .filter_map(|a| region.rank(p.post(q, a)).map(|r| (a, r)))
                .min_by_key(|&(a, r)| (r, a))
                .expect("winning belief has a safe action after every reading");
            policy.action_of.insert(q, p.actions[action].clone());
            policy.rank_of.insert(q, rank + 1);
            let next = p.post(q, action);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    Ok(policy)
}

/// One sense-act round on a failing branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub belief: Belief,
    pub reading: FeatureSet,
    pub sensed: Belief,
    pub action: Option<String>,
    pub next: Option<Belief>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The policy has no entry for a reachable post-sensing belief.
    MissingAction(Belief),
    /// The policy names an action the problem does not have.
    UnknownAction(String),
    /// The adversary can return to this belief forever.
    Cycle(Belief),
}

/// A branch on which a policy fails to reach the goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub steps: Vec<TraceStep>,
    pub failure: Failure,
}

impl Counterexample {
    /// Human-readable trace, one line per round.
    pub fn render(&self, universe: &FeatureUniverse) -> String {
        let show = |b: Belief| universe.format_set(b.states());
        let mut out = String::new();
        for step in &self.steps {
            out.push_str(&format!(
                "{} --reading {}--> {}",
                show(step.belief),
                universe.format_set(step.reading),
                show(step.sensed)
            ));
            if let (Some(a), Some(n)) = (&step.action, step.next) {
                out.push_str(&format!(" --{a}--> {}", show(n)));
            }
            out.push('\n');
        }
        out.push_str(&match &self.failure {
            Failure::MissingAction(b) => format!("no action for belief {}", show(*b)),
            Failure::UnknownAction(a) => format!("unknown action `{a}`"),
            Failure::Cycle(b) => format!("belief {} repeats; the goal is never guaranteed", show(*b)),
        });
        out
    }
}

/// Exhaustive adversarial check of `pol`, independent of the fixpoint.
pub fn verify_policy(p: &PlanningProblem, c: &Cover, pol: &Policy) -> bool {
    verify_policy_trace(p, c, pol).is_ok()
}

/// Like [`verify_policy`], returning the failing branch on rejection.
///
/// The policy is memoryless, so it succeeds exactly when the graph of
/// pre-sensing beliefs reachable from the initial belief is acyclic and
/// every leaf lies inside the goal.
pub fn verify_policy_trace(
    p: &PlanningProblem,
    c: &Cover,
    pol: &Policy,
) -> std::result::Result<(), Counterexample> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        Open,
        Done,
    }
    if p.universe.check_same(c.universe()).is_err() || p.universe.len() > MAX_PLANNING_STATES {
        return Err(Counterexample {
            steps: Vec::new(),
            failure: Failure::MissingAction(p.initial),
        });
    }
    let mut mark = vec![Mark::Fresh; 1usize << p.universe.len()];
    let idx = |b: Belief| b.states().bits() as usize;
    let readings: Vec<FeatureSet> = c.sets().collect();

    struct Frame {
        belief: Belief,
        next_reading: usize,
        step: Option<TraceStep>,
    }
    let trace = |frames: &[Frame], last: TraceStep| -> Vec<TraceStep> {
        frames
            .iter()
            .filter_map(|f| f.step.clone())
            .chain(std::iter::once(last))
            .collect()
    };

    if p.in_goal(p.initial) {
        return Ok(());
    }
    mark[idx(p.initial)] = Mark::Open;
    let mut frames = vec![Frame {
        belief: p.initial,
        next_reading: 0,
        step: None,
    }];
    while let Some(top) = frames.last_mut() {
        let b = top.belief;
        let found = (top.next_reading..readings.len())
            .find(|&i| readings[i].intersects(b.states()));
        let Some(i) = found else {
            mark[idx(b)] = Mark::Done;
            frames.pop();
            if let Some(parent) = frames.last_mut() {
                parent.step = None;
            }
            continue;
        };
        top.next_reading = i + 1;
        let q = Belief(b.states().intersection(readings[i]));
        let mut step = TraceStep {
            belief: b,
            reading: readings[i],
            sensed: q,
            action: None,
            next: None,
        };
        let Some(label) = pol.action_of.get(&q) else {
            return Err(Counterexample {
                steps: trace(&frames[..frames.len() - 1], step),
                failure: Failure::MissingAction(q),
            });
        };
        step.action = Some(label.clone());
        let Some(a) = p.action_index(label) else {
            return Err(Counterexample {
                steps: trace(&frames[..frames.len() - 1], step),
                failure: Failure::UnknownAction(label.clone()),
            });
        };
        let next = p.post(q, a);
        step.next = Some(next);
        if p.in_goal(next) {
            continue;
        }
        match mark[idx(next)] {
            Mark::Done => continue,
            Mark::Open => {
                return Err(Counterexample {
                    steps: trace(&frames[..frames.len() - 1], step),
                    failure: Failure::Cycle(next),
                });
            }
            Mark::Fresh => {
                mark[idx(next)] = Mark::Open;
                frames.last_mut().expect("non-empty").step = Some(step);
                frames.push(Frame {
                    belief: next,
                    next_reading: 0,
                    step: None,
                });
            }
        }
    }
    Ok(())
}

/// The ⊆-maximal solvable covers. Every solvable cover is a sub-collection
/// of one of them.
pub fn maximal_solvable_covers(p: &PlanningProblem) -> Result<Vec<Cover>> {
    maximal_solvable_covers_with(p, MAX_SEARCH_STATES)
}

pub fn maximal_solvable_covers_with(p: &PlanningProblem, max_n: usize) -> Result<Vec<Cover>> {
    let solvable_covers = enumerate::all_covers_with(&p.universe, max_n)?
        .into_iter()
        .filter_map(|c| match solvable(p, &c) {
            Ok(true) => Some(Ok(c)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<Vec<_>>>()?;
    order::upper_covers(&solvable_covers)
}

/// A seeded random problem over states `"1"..="n"` with actions
/// `"a0".."a{k-1}"`. Successor sets hold one state, or two with probability
/// 0.4; the initial belief has at least two states when `n > 1`.
pub fn random_problem(n: usize, actions: usize, seed: u64) -> Result<PlanningProblem> {
    let universe = FeatureUniverse::numbered(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<String> = (0..actions).map(|a| format!("a{a}")).collect();
    let random_subset = |rng: &mut ChaCha8Rng, max_size: usize| {
        let size = rng.gen_range(1..=max_size.min(n));
        let mut set = FeatureSet::EMPTY;
        while set.len() < size {
            set.insert(rng.gen_range(0..n));
        }
        set
    };
    let successors = (0..n)
        .map(|_| {
            (0..actions)
                .map(|_| {
                    let width = if rng.gen_bool(0.6) { 1 } else { 2 };
                    random_subset(&mut rng, width)
                })
                .collect()
        })
        .collect();
    let goal = random_subset(&mut rng, 1);
    // Start from at least two states when possible so sensing can matter.
    let mut initial = random_subset(&mut rng, n);
    while n > 1 && initial.len() < 2 {
        initial.insert(rng.gen_range(0..n));
    }
    PlanningProblem::from_sets(&universe, labels, successors, initial, goal)
}
