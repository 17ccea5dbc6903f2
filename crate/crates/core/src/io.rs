//! JSON documents and DOT export.
//!
//! Document shapes, distinguished by their keys:
//!
//! ```text
//! universe     {"universe": ["1","2","3"]}
//! cover        {"universe": [...], "cover": [["1","2"], ["2","3"]], "labels": [...]?}
//! cover set    {"universe": [...], "covers": [[["1","2","3"]], ...]}
//! sensor map   {"universe": [...], "readings": {"r1": ["1","2"], ...}}
//! problem      {"states": [...], "actions": [...],
//!               "transition": {"state": {"action": [successors]}},
//!               "initial": [...], "goal": [...]}
//! stipulation  {"sensitive": [...], "max_resolution": 2?}
//! ```
//!
//! Serialization is canonical: covers are written in canonical pre-image
//! order with members in universe order, so parse → serialize → parse is the
//! identity on serialized text.

use serde_json::{json, Map, Value};

use crate::cover::{Cover, FeatureSet, FeatureUniverse, Preimage, SensorMap};
use crate::enumerate::Diagram;
use crate::error::{Error, Result};
use crate::planner::{PlanningProblem, Policy};
use crate::star::StarClass;
use crate::stipulation::{ComplianceReport, Stipulation};

/// A stipulation as written on disk; it is resolved against a universe once
/// the cover it applies to is known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StipulationDoc {
    pub sensitive: Vec<String>,
    pub max_resolution: Option<usize>,
}

impl StipulationDoc {
    pub fn resolve(&self, universe: &FeatureUniverse) -> Result<Stipulation> {
        Stipulation::new(universe, &self.sensitive, self.max_resolution)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Universe(FeatureUniverse),
    Cover(Cover),
    CoverSet(FeatureUniverse, Vec<Cover>),
    SensorMap(SensorMap),
    Problem(PlanningProblem),
    Stipulation(StipulationDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Universe(_) => "universe",
            Document::Cover(_) => "cover",
            Document::CoverSet(..) => "cover set",
            Document::SensorMap(_) => "sensor map",
            Document::Problem(_) => "problem",
            Document::Stipulation(_) => "stipulation",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Document::Universe(u) => universe_to_json(u),
            Document::Cover(c) => cover_to_json(c),
            Document::CoverSet(u, cs) => covers_to_json(u, cs),
            Document::SensorMap(m) => sensor_map_to_json(m),
            Document::Problem(p) => problem_to_json(p),
            Document::Stipulation(s) => {
                let mut obj = Map::new();
                obj.insert("sensitive".into(), json!(s.sensitive));
                if let Some(k) = s.max_resolution {
                    obj.insert("max_resolution".into(), json!(k));
                }
                Value::Object(obj)
            }
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::schema("$", format!("invalid JSON: {e}")))?;
    document_from_value(&value)
}

pub fn document_from_value(value: &Value) -> Result<Document> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::schema("$", "expected an object"))?;
    let has = |k: &str| obj.contains_key(k);
    if has("states") {
        only_keys(obj, &["states", "actions", "transition", "initial", "goal"])?;
        return parse_problem(obj).map(Document::Problem);
    }
    if has("sensitive") {
        only_keys(obj, &["sensitive", "max_resolution"])?;
        let sensitive = strings(field(obj, "sensitive")?, "$.sensitive")?;
        let max_resolution = match obj.get("max_resolution") {
            None | Some(Value::Null) => None,
            Some(v) => Some(
                v.as_u64()
                    .ok_or_else(|| Error::schema("$.max_resolution", "expected a non-negative integer"))?
                    as usize,
            ),
        };
        return Ok(Document::Stipulation(StipulationDoc {
            sensitive,
            max_resolution,
        }));
    }
    let universe = parse_universe(field(obj, "universe")?)?;
    if has("readings") {
        only_keys(obj, &["universe", "readings"])?;
        let readings = field(obj, "readings")?
            .as_object()
            .ok_or_else(|| Error::schema("$.readings", "expected an object"))?;
        let mut pairs = Vec::with_capacity(readings.len());
        for (label, features) in readings {
            pairs.push((label.clone(), strings(features, &format!("$.readings.{label}"))?));
        }
        return SensorMap::new(&universe, pairs).map(Document::SensorMap);
    }
    if has("covers") {
        only_keys(obj, &["universe", "covers"])?;
        let list = field(obj, "covers")?
            .as_array()
            .ok_or_else(|| Error::schema("$.covers", "expected an array"))?;
        let covers = list
            .iter()
            .enumerate()
            .map(|(i, v)| parse_cover_sets(&universe, v, None, &format!("$.covers[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Document::CoverSet(universe, covers));
    }
    if has("cover") {
        only_keys(obj, &["universe", "cover", "labels"])?;
        let cover = parse_cover_sets(&universe, field(obj, "cover")?, obj.get("labels"), "$.cover")?;
        return Ok(Document::Cover(cover));
    }
    only_keys(obj, &["universe"])?;
    Ok(Document::Universe(universe))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::schema("$", format!("missing field `{key}`")))
}

fn only_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::schema(format!("$.{k}"), "unexpected field")),
        None => Ok(()),
    }
}

fn strings(value: &Value, path: &str) -> Result<Vec<String>> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of strings"))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::schema(format!("{path}[{i}]"), "expected a string"))
        })
        .collect()
}

fn parse_universe(value: &Value) -> Result<FeatureUniverse> {
    FeatureUniverse::new(strings(value, "$.universe")?)
}

fn parse_cover_sets(
    universe: &FeatureUniverse,
    value: &Value,
    labels: Option<&Value>,
    path: &str,
) -> Result<Cover> {
    let arr = value
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of pre-images"))?;
    let labels: Vec<Option<String>> = match labels {
        None => vec![None; arr.len()],
        Some(v) => {
            let ls = v
                .as_array()
                .ok_or_else(|| Error::schema("$.labels", "expected an array"))?;
            if ls.len() != arr.len() {
                return Err(Error::schema("$.labels", "must have one entry per pre-image"));
            }
            ls.iter()
                .enumerate()
                .map(|(i, l)| match l {
                    Value::Null => Ok(None),
                    Value::String(s) => Ok(Some(s.clone())),
                    _ => Err(Error::schema(format!("$.labels[{i}]"), "expected a string or null")),
                })
                .collect::<Result<_>>()?
        }
    };
    let mut preimages = Vec::with_capacity(arr.len());
    for (i, (set, label)) in arr.iter().zip(labels).enumerate() {
        let members = universe.set_of(strings(set, &format!("{path}[{i}]"))?)?;
        preimages.push(Preimage { members, label });
    }
    Cover::from_preimages(universe, preimages)
}

fn parse_problem(obj: &Map<String, Value>) -> Result<PlanningProblem> {
    let states = FeatureUniverse::new(strings(field(obj, "states")?, "$.states")?)?;
    let actions = strings(field(obj, "actions")?, "$.actions")?;
    let transition = field(obj, "transition")?
        .as_object()
        .ok_or_else(|| Error::schema("$.transition", "expected an object"))?;
    let mut rows = Vec::new();
    for (state, by_action) in transition {
        let by_action = by_action
            .as_object()
            .ok_or_else(|| Error::schema(format!("$.transition.{state}"), "expected an object"))?;
        for (action, succ) in by_action {
            let succ = strings(succ, &format!("$.transition.{state}.{action}"))?;
            rows.push((state.clone(), action.clone(), succ));
        }
    }
    let initial = strings(field(obj, "initial")?, "$.initial")?;
    let goal = strings(field(obj, "goal")?, "$.goal")?;
    PlanningProblem::new(&states, actions, rows, initial, goal)
}

fn set_json(universe: &FeatureUniverse, set: FeatureSet) -> Value {
    json!(universe.labels_of(set))
}

fn cover_sets_json(c: &Cover) -> Value {
    Value::Array(c.sets().map(|s| set_json(c.universe(), s)).collect())
}

pub fn universe_to_json(u: &FeatureUniverse) -> Value {
    json!({ "universe": u.labels() })
}

pub fn cover_to_json(c: &Cover) -> Value {
    let mut obj = Map::new();
    obj.insert("universe".into(), json!(c.universe().labels()));
    obj.insert("cover".into(), cover_sets_json(c));
    if c.preimages().iter().any(|p| p.label.is_some()) {
        obj.insert(
            "labels".into(),
            Value::Array(c.preimages().iter().map(|p| json!(p.label)).collect()),
        );
    }
    Value::Object(obj)
}

pub fn covers_to_json(u: &FeatureUniverse, covers: &[Cover]) -> Value {
    json!({
        "universe": u.labels(),
        "covers": covers.iter().map(cover_sets_json).collect::<Vec<_>>(),
    })
}

pub fn sensor_map_to_json(m: &SensorMap) -> Value {
    let readings: Map<String, Value> = m
        .readings()
        .iter()
        .map(|(l, s)| (l.clone(), set_json(m.universe(), *s)))
        .collect();
    json!({ "universe": m.universe().labels(), "readings": readings })
}

pub fn problem_to_json(p: &PlanningProblem) -> Value {
    let u = p.universe();
    let mut transition = Map::new();
    for s in 0..u.len() {
        let row: Map<String, Value> = p
            .actions()
            .iter()
            .enumerate()
            .map(|(a, label)| (label.clone(), set_json(u, p.successors(s, a))))
            .collect();
        transition.insert(u.label(s).to_string(), Value::Object(row));
    }
    json!({
        "states": u.labels(),
        "actions": p.actions(),
        "transition": transition,
        "initial": set_json(u, p.initial().states()),
        "goal": set_json(u, p.goal()),
    })
}

pub fn class_to_json(class: &StarClass) -> Value {
    json!({
        "universe": class.representative.universe().labels(),
        "representative": cover_sets_json(&class.representative),
        "closure": cover_sets_json(&class.closure),
        "size": class.size(),
    })
}

pub fn classes_to_json(u: &FeatureUniverse, classes: &[StarClass]) -> Value {
    json!({
        "universe": u.labels(),
        "classes": classes.iter().map(|c| json!({
            "representative": cover_sets_json(&c.representative),
            "closure": cover_sets_json(&c.closure),
        })).collect::<Vec<_>>(),
    })
}

pub fn policy_to_json(p: &PlanningProblem, policy: &Policy) -> Value {
    let u = p.universe();
    json!({
        "initial_rank": policy.initial_rank,
        "policy": policy.action_of.iter().map(|(b, a)| json!({
            "belief": set_json(u, b.states()),
            "action": a,
            "rank": policy.rank_of.get(b),
        })).collect::<Vec<_>>(),
    })
}

pub fn report_to_json(report: &ComplianceReport, universe: &FeatureUniverse) -> Value {
    json!({
        "universe": universe.labels(),
        "compliant": report.compliant.iter().map(cover_sets_json).collect::<Vec<_>>(),
        "non_compliant": report.non_compliant.iter().map(cover_sets_json).collect::<Vec<_>>(),
        "witness": report.witness.as_ref().map(|(ok, bad)| json!({
            "compliant": cover_sets_json(ok),
            "non_compliant": cover_sets_json(bad),
        })),
    })
}

pub fn diagram_to_json(d: &Diagram, universe: &FeatureUniverse) -> Value {
    json!({
        "universe": universe.labels(),
        "nodes": d.nodes.iter().map(cover_sets_json).collect::<Vec<_>>(),
        "edges": d.edges.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

fn dot_id(c: &Cover) -> String {
    let raw = c.canonical_string();
    format!("\"{}\"", raw.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph for a diagram: nodes in diagram order (upper levels first),
/// then edges pointing from upper to lower.
pub fn export_dot(d: &Diagram) -> String {
    let mut out = String::from("digraph hasse {\n");
    for n in &d.nodes {
        out.push_str(&format!("  {};\n", dot_id(n)));
    }
    for (a, b) in d.edge_covers() {
        out.push_str(&format!("  {} -> {};\n", dot_id(a), dot_id(b)));
    }
    out.push_str("}\n");
    out
}
