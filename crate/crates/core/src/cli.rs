//! Command-line front end. [`run_cli`] is the whole program minus process
//! plumbing, so tests can drive it in-process.
//!
//! Exit status: 0 on success, 1 on a domain outcome or error (unsolvable
//! problem, stipulation violated, limit exceeded, universe mismatch), 2 on
//! usage, I/O or document errors.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cover::{Cover, FeatureUniverse};
use crate::enumerate::{self, Diagram, Order};
use crate::error::Error;
use crate::io::{self, Document};
use crate::order;
use crate::planner::{self, PlanningProblem};
use crate::star::{self, StarClass};
use crate::stipulation;

/// Environment variable that raises or lowers the enumeration bound.
pub const MAX_N_ENV: &str = "COVER_LATTICE_MAX_N";

#[derive(Debug, Parser)]
#[command(name = "cover-lattice", version, about = "Abstract sensors as covers: orders, star-closure and planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Input document; repeat for commands taking several.
    #[arg(long = "input", global = true)]
    inputs: Vec<PathBuf>,

    /// Order used by `hasse`.
    #[arg(long, global = true, value_enum, default_value = "subsumption")]
    order: OrderArg,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Universe size `1..=n` for enumeration commands without an input, and
    /// state count for generated problems.
    #[arg(long = "max-n", global = true)]
    max_n: Option<usize>,

    /// Generate a random problem instead of reading one (`solve`, `policy`,
    /// `search-sensors`).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
enum Command {
    /// Parse and validate documents, re-emitting them canonically.
    Validate,
    /// Turn a sensor map into its pre-image cover.
    Invert,
    /// Relate two covers under subsumption.
    Compare,
    Meet,
    Join,
    /// Star-closure of a cover.
    Star,
    /// Star class (representative and closure) of a cover.
    Class,
    /// Every member of a cover's star class.
    Members,
    /// Whether the first cover precedes the second in the combined order.
    Proceeds,
    /// All covers of a universe.
    Enumerate,
    /// All star classes of a universe.
    Classes,
    /// All partitions of a universe; `--format dot` draws the slice.
    Partitions,
    /// Hasse diagram of a cover set (default: every cover of the universe).
    Hasse,
    /// Is the goal attainable under the cover?
    Solve,
    /// Extract and verify a policy.
    Policy,
    /// Maximal covers under which the problem is solvable.
    SearchSensors,
    /// Check a cover against a stipulation.
    Stipulation,
    /// Split a cover's star class by stipulation compliance.
    ClassReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OrderArg {
    Subsumption,
    Star,
    Proceeds,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::Subsumption => Order::Subsumption,
            OrderArg::Star => Order::StarSubsumption,
            OrderArg::Proceeds => Order::Proceeds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Domain(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Schema { .. } => Failure::Usage(e.to_string()),
            other => Failure::Domain(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Output plus whether the answer counts as a domain failure (exit 1).
struct Answer {
    text: String,
    negative: bool,
}

impl Answer {
    fn ok(text: String) -> Self {
        Answer {
            text,
            negative: false,
        }
    }
}

/// Runs the CLI on `argv` (including the program name).
pub fn run_cli<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let status = if e.use_stderr() { 2 } else { 0 };
            return if status == 0 {
                Outcome { status, stdout: text, stderr: String::new() }
            } else {
                Outcome { status, stdout: String::new(), stderr: text }
            };
        }
    };
    let result = execute(&cli).and_then(|answer| {
        if let Some(path) = &cli.out {
            fs::write(path, &answer.text)
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
            Ok(Answer {
                text: String::new(),
                negative: answer.negative,
            })
        } else {
            Ok(answer)
        }
    });
    match result {
        Ok(answer) => Outcome {
            status: if answer.negative { 1 } else { 0 },
            stdout: answer.text,
            stderr: String::new(),
        },
        Err(Failure::Domain(msg)) => Outcome {
            status: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Usage(msg)) => Outcome {
            status: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

struct Inputs {
    docs: Vec<(PathBuf, Document)>,
}

impl Inputs {
    fn load(paths: &[PathBuf]) -> CliResult<Self> {
        let mut docs = Vec::with_capacity(paths.len());
        for path in paths {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            let doc = io::parse_document(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            docs.push((path.clone(), doc));
        }
        Ok(Inputs { docs })
    }

    fn covers(&self) -> Vec<&Cover> {
        self.docs
            .iter()
            .filter_map(|(_, d)| match d {
                Document::Cover(c) => Some(c),
                _ => None,
            })
            .collect()
    }

    fn cover(&self) -> CliResult<&Cover> {
        self.covers()
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Usage("expected a cover document (--input)".into()))
    }

    fn cover_pair(&self) -> CliResult<(&Cover, &Cover)> {
        match self.covers().as_slice() {
            [a, b] => Ok((a, b)),
            found => Err(Failure::Usage(format!(
                "expected exactly two cover documents, got {}",
                found.len()
            ))),
        }
    }

    fn problem(&self) -> Option<&PlanningProblem> {
        self.docs.iter().find_map(|(_, d)| match d {
            Document::Problem(p) => Some(p),
            _ => None,
        })
    }

    fn stipulation(&self) -> CliResult<&io::StipulationDoc> {
        self.docs
            .iter()
            .find_map(|(_, d)| match d {
                Document::Stipulation(s) => Some(s),
                _ => None,
            })
            .ok_or_else(|| Failure::Usage("expected a stipulation document (--input)".into()))
    }

    fn universe(&self) -> Option<FeatureUniverse> {
        self.docs.iter().find_map(|(_, d)| match d {
            Document::Universe(u) => Some(u.clone()),
            Document::Cover(c) => Some(c.universe().clone()),
            Document::CoverSet(u, _) => Some(u.clone()),
            Document::SensorMap(m) => Some(m.universe().clone()),
            Document::Problem(p) => Some(p.universe().clone()),
            Document::Stipulation(_) => None,
        })
    }
}

fn enumeration_bound(default: usize) -> CliResult<usize> {
    match std::env::var(MAX_N_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{MAX_N_ENV} must be a non-negative integer"))),
        Err(_) => Ok(default),
    }
}

fn format_or(cli: &Cli, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Failure::Usage(format!(
            "format `{}` is not supported by this command",
            f.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
        )))
    }
}

fn json_text(value: serde_json::Value) -> String {
    io::to_text(&value)
}

fn cover_output(c: &Cover, fmt: Format) -> String {
    match fmt {
        Format::Json => json_text(io::cover_to_json(c)),
        _ => format!("{}\n", c.canonical_string()),
    }
}

fn lines<'a>(covers: impl IntoIterator<Item = &'a Cover>) -> String {
    covers
        .into_iter()
        .map(|c| format!("{}\n", c.canonical_string()))
        .collect()
}

fn target_universe(cli: &Cli, inputs: &Inputs) -> CliResult<FeatureUniverse> {
    if let Some(u) = inputs.universe() {
        return Ok(u);
    }
    let n = cli
        .max_n
        .ok_or_else(|| Failure::Usage("give a universe with --input or a size with --max-n".into()))?;
    Ok(FeatureUniverse::numbered(n)?)
}

fn problem(cli: &Cli, inputs: &Inputs) -> CliResult<PlanningProblem> {
    if let Some(p) = inputs.problem() {
        return Ok(p.clone());
    }
    match cli.seed {
        Some(seed) => Ok(planner::random_problem(cli.max_n.unwrap_or(3), 2, seed)?),
        None => Err(Failure::Usage("expected a problem document (--input) or --seed".into())),
    }
}

fn render_diagram(d: &Diagram, universe: &FeatureUniverse, fmt: Format) -> String {
    match fmt {
        Format::Dot => io::export_dot(d),
        Format::Json => json_text(io::diagram_to_json(d, universe)),
        Format::Text => {
            let mut out = lines(&d.nodes);
            for (a, b) in d.edge_covers() {
                out.push_str(&format!("{a} -> {b}\n"));
            }
            out
        }
    }
}

fn execute(cli: &Cli) -> CliResult<Answer> {
    use Format::{Dot, Json, Text};
    let inputs = Inputs::load(&cli.inputs)?;
    let answer = match cli.command {
        Command::Validate => {
            if inputs.docs.is_empty() {
                return Err(Failure::Usage("nothing to validate (--input)".into()));
            }
            let fmt = format_or(cli, Text, &[Json, Text])?;
            let mut out = String::new();
            for (path, doc) in &inputs.docs {
                match fmt {
                    Json => out.push_str(&json_text(doc.to_json())),
                    _ => out.push_str(&format!("{}: valid {}\n", path.display(), doc.kind())),
                }
            }
            Answer::ok(out)
        }
        Command::Invert => {
            let fmt = format_or(cli, Json, &[Json, Text])?;
            let map = inputs
                .docs
                .iter()
                .find_map(|(_, d)| match d {
                    Document::SensorMap(m) => Some(m),
                    _ => None,
                })
                .ok_or_else(|| Failure::Usage("expected a sensor map document (--input)".into()))?;
            Answer::ok(cover_output(&map.invert(), fmt))
        }
        Command::Compare => {
            let (a, b) = inputs.cover_pair()?;
            let tag = order::compare(a, b)?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(serde_json::json!({ "relation": tag.as_str() }))),
                _ => Answer::ok(format!("{tag}\n")),
            }
        }
        Command::Meet => {
            let (a, b) = inputs.cover_pair()?;
            Answer::ok(cover_output(&order::meet(a, b)?, format_or(cli, Json, &[Json, Text])?))
        }
        Command::Join => {
            let (a, b) = inputs.cover_pair()?;
            let fmt = format_or(cli, Json, &[Json, Text])?;
            match order::join(a, b)? {
                Some(j) => Answer::ok(cover_output(&j, fmt)),
                None if fmt == Json => Answer::ok(json_text(serde_json::json!({
                    "universe": a.universe().labels(),
                    "cover": null,
                }))),
                None => Answer::ok("absent\n".into()),
            }
        }
        Command::Star => {
            let c = inputs.cover()?;
            Answer::ok(cover_output(&star::star_closure(c)?, format_or(cli, Json, &[Json, Text])?))
        }
        Command::Class => {
            let class = StarClass::of(inputs.cover()?)?;
            match format_or(cli, Json, &[Json, Text])? {
                Json => Answer::ok(json_text(io::class_to_json(&class))),
                _ => Answer::ok(format!(
                    "representative {}\nclosure {}\n",
                    class.representative, class.closure
                )),
            }
        }
        Command::Members => {
            let c = inputs.cover()?;
            let members = star::class_members(c)?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(io::covers_to_json(c.universe(), &members))),
                _ => Answer::ok(lines(&members)),
            }
        }
        Command::Proceeds => {
            let (a, b) = inputs.cover_pair()?;
            let holds = star::proceeds(a, b)?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(serde_json::json!({ "proceeds": holds }))),
                _ => Answer::ok(format!("{holds}\n")),
            }
        }
        Command::Enumerate => {
            let u = target_universe(cli, &inputs)?;
            let covers = enumerate::all_covers_with(&u, enumeration_bound(enumerate::MAX_COVER_FEATURES)?)?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(io::covers_to_json(&u, &covers))),
                _ => Answer::ok(format!("{}\n", covers.len())),
            }
        }
        Command::Classes => {
            let u = target_universe(cli, &inputs)?;
            let bound = enumeration_bound(enumerate::MAX_COVER_FEATURES)?;
            if u.len() > bound {
                return Err(Error::LimitExceeded {
                    what: "class enumeration universe size",
                    size: u.len(),
                    limit: bound,
                }
                .into());
            }
            let classes = enumerate::all_classes(&u)?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(io::classes_to_json(&u, &classes))),
                _ => Answer::ok(format!("{}\n", classes.len())),
            }
        }
        Command::Partitions => {
            let u = target_universe(cli, &inputs)?;
            match format_or(cli, Text, &[Json, Text, Dot])? {
                Dot => Answer::ok(io::export_dot(&slice_diagram(&u)?)),
                Json => Answer::ok(json_text(io::covers_to_json(&u, &enumerate::all_partitions(&u)?))),
                Text => Answer::ok(format!("{}\n", enumerate::all_partitions(&u)?.len())),
            }
        }
        Command::Hasse => {
            let fmt = format_or(cli, Dot, &[Json, Text, Dot])?;
            let (u, items) = hasse_items(cli, &inputs)?;
            let d = enumerate::hasse_edges(&items, cli.order.into())?;
            Answer::ok(render_diagram(&d, &u, fmt))
        }
        Command::Solve => {
            let p = problem(cli, &inputs)?;
            let c = inputs.cover()?;
            let ok = planner::solvable(&p, c)?;
            let word = if ok { "solvable" } else { "unsolvable" };
            let text = match format_or(cli, Text, &[Json, Text])? {
                Json => json_text(serde_json::json!({ "solvable": ok })),
                _ => format!("{word}\n"),
            };
            Answer { text, negative: !ok }
        }
        Command::Policy => {
            let p = problem(cli, &inputs)?;
            let c = inputs.cover()?;
            let policy = planner::extract_policy(&p, c)?;
            if let Err(cex) = planner::verify_policy_trace(&p, c, &policy) {
                return Err(Failure::Domain(format!(
                    "extracted policy failed verification:\n{}",
                    cex.render(p.universe())
                )));
            }
            match format_or(cli, Json, &[Json, Text])? {
                Json => Answer::ok(json_text(io::policy_to_json(&p, &policy))),
                _ => {
                    let u = p.universe();
                    let mut out = format!("initial rank {}\n", policy.initial_rank);
                    for (b, a) in &policy.action_of {
                        out.push_str(&format!(
                            "{} -> {a} (rank {})\n",
                            u.format_set(b.states()),
                            policy.rank_of[b]
                        ));
                    }
                    Answer::ok(out)
                }
            }
        }
        Command::SearchSensors => {
            let p = problem(cli, &inputs)?;
            let found = planner::maximal_solvable_covers_with(
                &p,
                enumeration_bound(planner::MAX_SEARCH_STATES)?,
            )?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(io::covers_to_json(p.universe(), &found))),
                _ => Answer::ok(lines(&found)),
            }
        }
        Command::Stipulation => {
            let c = inputs.cover()?;
            let s = inputs.stipulation()?.resolve(c.universe())?;
            let ok = stipulation::complies(c, &s)?;
            let text = match format_or(cli, Text, &[Json, Text])? {
                Json => json_text(serde_json::json!({ "complies": ok })),
                _ => format!("{}\n", if ok { "complies" } else { "violates" }),
            };
            Answer { text, negative: !ok }
        }
        Command::ClassReport => {
            let c = inputs.cover()?;
            let s = inputs.stipulation()?.resolve(c.universe())?;
            let report = stipulation::class_compliance_report(c, &s)?;
            match format_or(cli, Text, &[Json, Text])? {
                Json => Answer::ok(json_text(io::report_to_json(&report, c.universe()))),
                _ => {
                    let mut out = format!(
                        "compliant {}\nnon-compliant {}\n",
                        report.compliant.len(),
                        report.non_compliant.len()
                    );
                    if let Some((ok, bad)) = &report.witness {
                        out.push_str(&format!("witness {ok} complies, {bad} violates\n"));
                    }
                    Answer::ok(out)
                }
            }
        }
    };
    Ok(answer)
}

fn slice_diagram(u: &FeatureUniverse) -> CliResult<Diagram> {
    let slice = star::partition_slice(u)?;
    Ok(Diagram {
        nodes: slice.nodes,
        edges: slice.edges,
    })
}

fn hasse_items(cli: &Cli, inputs: &Inputs) -> CliResult<(FeatureUniverse, Vec<Cover>)> {
    let mut items: Vec<Cover> = inputs.covers().into_iter().cloned().collect();
    for (_, d) in &inputs.docs {
        if let Document::CoverSet(_, cs) = d {
            items.extend(cs.iter().cloned());
        }
    }
    let u = target_universe(cli, inputs)?;
    if items.is_empty() {
        items = enumerate::all_covers_with(&u, enumeration_bound(enumerate::MAX_COVER_FEATURES)?)?;
    }
    Ok((u, items))
}
