//! `dpo`: load rewriting systems, objects and derivations from JSON files,
//! rewrite, and run the independence and equivalence analyses.
//!
//! Reports go to stdout as JSON; summaries and errors go to stderr.
//! Exit codes: 0 ok, 1 input error, 2 domain error, 3 negative result.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dpo_core::equivalence::{
    apply_switch_at, canonical_sequence, check_consistent_permutation, check_root_preserving,
    check_well_switching_on, consistency_probe, default_bound, derivation_colimit,
    switch_equivalent, Permutation,
};
use dpo_core::fixtures;
use dpo_core::format::{self, Codec, InstanceKind};
use dpo_core::independence::{independence_pairs, strong_witness, switch};
use dpo_core::poset::PosetCat;
use dpo_core::presheaf::PresheafCat;
use dpo_core::rewriting::{abstraction_equivalent, Derivation, MatchSelector, RewritingSystem};
use dpo_core::{Category, Error, ErrorClass};

#[derive(Parser)]
#[command(name = "dpo", version, about = "Double-pushout rewriting and switch-equivalence analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one rule at one match and print the direct derivation.
    Apply {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rule: String,
        #[arg(long = "match", default_value_t = 0)]
        match_index: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Apply a sequence of rules; `--rule` and `--match` pair up in order.
    Derive {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long = "rule", required = true)]
        rules: Vec<String>,
        #[arg(long = "match")]
        matches: Vec<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// List the matches of a rule into an object.
    Matches {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rule: String,
        /// Keep only matches satisfying the gluing conditions.
        #[arg(long)]
        applicable: bool,
    },
    /// Run an analysis on a derivation file.
    Analyze {
        #[arg(value_enum)]
        analysis: Analysis,
        #[arg(long)]
        derivation: PathBuf,
        #[arg(long)]
        position: Option<usize>,
        #[arg(long)]
        pair: Option<usize>,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        bound: Option<usize>,
        /// Comma-separated images for `consistent-permutation`.
        #[arg(long)]
        permutation: Option<String>,
    },
    /// Print a built-in system or derivation.
    Fixture {
        #[arg(value_enum)]
        name: Fixture,
    },
    /// Re-emit an object or derivation file, as JSON or DOT.
    Render {
        #[arg(long, conflicts_with = "derivation", required_unless_present = "derivation")]
        graph: Option<PathBuf>,
        #[arg(long)]
        derivation: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Independence,
    Strong,
    Switch,
    Equivalent,
    Abstraction,
    Canonical,
    WellSwitching,
    RootPreserving,
    Colimit,
    ConsistencyProbe,
    ConsistentPermutation,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    CoffeeSystem,
    CoffeeG0,
    Coffee,
    CoffeeIndependent,
    MergeSystem,
    DerD,
    DerE,
    DerDPrime,
    DisjSystem,
    DerF,
    DerFPrime,
    DerFSecond,
    DisjointThree,
    PosetSystem,
    Poset,
}

/// Outcome of a command: a JSON report plus whether the result is negative.
struct Report {
    out: Output,
    summary: String,
    negative: bool,
}

enum Output {
    Json(Value),
    Text(String),
}

impl Report {
    fn ok(v: Value, summary: impl Into<String>) -> Self {
        Report {
            out: Output::Json(v),
            summary: summary.into(),
            negative: false,
        }
    }

    fn verdict(v: Value, summary: impl Into<String>, positive: bool) -> Self {
        Report {
            out: Output::Json(v),
            summary: summary.into(),
            negative: !positive,
        }
    }
}

type Res<T> = std::result::Result<T, Error>;

fn read_json(path: &Path) -> Res<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    format::parse(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Instance-specific output: DOT rendering.
trait Render: Codec {
    fn object_dot(&self, o: &Self::Object) -> String;
    fn derivation_dot(&self, d: &Derivation<Self>) -> String;
}

impl Render for PresheafCat {
    fn object_dot(&self, o: &Self::Object) -> String {
        format::presheaf_dot(o, "object")
    }

    fn derivation_dot(&self, d: &Derivation<Self>) -> String {
        format::derivation_dot(self, d)
    }
}

impl Render for PosetCat {
    fn object_dot(&self, o: &String) -> String {
        format!("digraph object {{\n  \"{o}\";\n}}\n")
    }

    fn derivation_dot(&self, d: &Derivation<Self>) -> String {
        let mut out = String::from("digraph derivation {\n");
        let objects = d.objects(self);
        for w in objects.windows(2) {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", w[0], w[1]));
        }
        if objects.len() == 1 {
            out.push_str(&format!("  \"{}\";\n", objects[0]));
        }
        out.push_str("}\n");
        out
    }
}

fn load_system<C: Codec>(path: &Path) -> Res<RewritingSystem<C>> {
    format::system_from_json(&read_json(path)?)
}

fn load_object<C: Codec>(cat: &C, path: &Path) -> Res<C::Object> {
    format::object_from_file_json(cat, &read_json(path)?)
}

fn derivation_output<C: Render>(sys: &RewritingSystem<C>, d: &Derivation<C>, fmt: OutputFormat) -> Output {
    match fmt {
        OutputFormat::Json => Output::Json(format::derivation_json(sys, d)),
        OutputFormat::Dot => Output::Text(sys.category().derivation_dot(d)),
    }
}

fn run_derive<C: Render>(
    system: &Path,
    graph: &Path,
    plan: &[(String, usize)],
    fmt: OutputFormat,
) -> Res<Report> {
    let sys = load_system::<C>(system)?;
    let g0 = load_object(sys.category(), graph)?;
    let plan: Vec<(&str, MatchSelector<C::Morphism>)> = plan
        .iter()
        .map(|(r, i)| (r.as_str(), MatchSelector::Index(*i)))
        .collect();
    let d = sys.derive(&g0, &plan)?;
    let cat = sys.category();
    let summary = format!(
        "derived {} step(s): {} ⇒ {}",
        d.len(),
        cat.describe_object(d.start()),
        cat.describe_object(d.end(cat))
    );
    Ok(Report {
        out: derivation_output(&sys, &d, fmt),
        summary,
        negative: false,
    })
}

fn run_matches<C: Codec>(system: &Path, graph: &Path, rule: &str, applicable: bool) -> Res<Report> {
    let sys = load_system::<C>(system)?;
    let cat = sys.category();
    let g = load_object(cat, graph)?;
    let r = sys.rule(rule)?;
    let ms = sys.find_matches(r, &g, applicable);
    let list: Vec<Value> = ms.iter().map(|m| cat.morphism_json(m)).collect();
    Ok(Report::ok(
        json!({ "rule": rule, "matches": list }),
        format!("{} match(es) of `{rule}`", ms.len()),
    ))
}

struct AnalyzeArgs<'a> {
    analysis: Analysis,
    derivation: &'a Path,
    position: Option<usize>,
    pair: Option<usize>,
    target: Option<&'a Path>,
    bound: Option<usize>,
    permutation: Option<&'a str>,
}

fn positions<C: Category>(d: &Derivation<C>, only: Option<usize>) -> Res<Vec<usize>> {
    let last = d.len().saturating_sub(1);
    match only {
        Some(p) if p >= last => Err(Error::InvalidDerivation(format!(
            "position {p} has no successor step in a derivation of length {}",
            d.len()
        ))),
        Some(p) => Ok(vec![p]),
        None => Ok((0..last).collect()),
    }
}

fn load_target<C: Codec>(sys: &RewritingSystem<C>, target: Option<&Path>) -> Res<Derivation<C>> {
    let path = target.ok_or_else(|| Error::Format("this analysis needs --target".into()))?;
    format::derivation_in_system(sys, &read_json(path)?)
}

fn run_analyze<C: Codec>(a: &AnalyzeArgs<'_>) -> Res<Report> {
    let v = read_json(a.derivation)?;
    let (sys, d) = format::derivation_from_json::<C>(&v)?;
    let cat = sys.category();
    match a.analysis {
        Analysis::Independence => {
            let mut rows = Vec::new();
            let mut notes = Vec::new();
            for i in positions(&d, a.position)? {
                let pairs = independence_pairs(cat, d.step(i), d.step(i + 1));
                notes.push(format!("{i}:{}", pairs.len()));
                rows.push(json!({
                    "position": i,
                    "count": pairs.len(),
                    "pairs": pairs.iter().map(|p| format::pair_json(cat, p)).collect::<Vec<_>>(),
                }));
            }
            Ok(Report::ok(
                json!({ "positions": rows }),
                format!("independence pairs per position: {}", notes.join(" ")),
            ))
        }
        Analysis::Strong => {
            let mut rows = Vec::new();
            let mut all = true;
            for i in positions(&d, a.position)? {
                let (s0, s1) = (d.step(i), d.step(i + 1));
                for (k, p) in independence_pairs(cat, s0, s1).iter().enumerate() {
                    if a.pair.is_some_and(|want| want != k) {
                        continue;
                    }
                    let w = strong_witness(cat, s0, s1, p)?;
                    all &= w.is_strong();
                    rows.push(json!({ "position": i, "pair": k, "witness": format::witness_json(cat, &w) }));
                }
            }
            let summary = if all { "every pair is strong" } else { "some pair is not strong" };
            Ok(Report::verdict(json!({ "strong": all, "pairs": rows }), summary, all))
        }
        Analysis::Switch => {
            let i = a
                .position
                .ok_or_else(|| Error::Format("switch needs --position".into()))?;
            positions(&d, Some(i))?;
            let (s0, s1) = (d.step(i), d.step(i + 1));
            let pairs = independence_pairs(cat, s0, s1);
            if pairs.is_empty() {
                return Err(Error::NotIndependent(i, i + 1));
            }
            let k = match (a.pair, pairs.len()) {
                (Some(k), _) => k,
                (None, 1) => 0,
                (None, n) => {
                    return Err(Error::PairInvalid(format!(
                        "{n} independence pairs at position {i}; choose one with --pair"
                    )))
                }
            };
            let pair = pairs
                .get(k)
                .ok_or_else(|| Error::PairInvalid(format!("pair {k} of {} at position {i}", pairs.len())))?;
            let result = switch(cat, s0, s1, pair)?;
            let switched = apply_switch_at(cat, &d, i, pair)?;
            let mut out = format::derivation_json(&sys, &switched);
            let mut witness = format::switch_result_json(&sys, &result);
            if let Some(w) = witness.as_object_mut() {
                w.remove("derivation");
                w.insert("position".into(), json!(i));
                w.insert("pair_index".into(), json!(k));
            }
            out["switch"] = witness;
            Ok(Report::ok(
                out,
                format!("switched steps {i}, {} along pair {k}: {}", i + 1, switched.rule_names().join(", ")),
            ))
        }
        Analysis::Equivalent => {
            let e = load_target(&sys, a.target)?;
            let bound = a.bound.unwrap_or_else(|| default_bound(d.len()));
            match switch_equivalent(cat, &d, &e, bound) {
                Some(seq) => Ok(Report::ok(
                    format::sequence_json(&sys, &seq),
                    format!("switch equivalent via positions {:?}", seq.positions()),
                )),
                None => Err(Error::NotEquivalent(format!("no switching sequence of length ≤ {bound}"))),
            }
        }
        Analysis::Abstraction => {
            let e = load_target(&sys, a.target)?;
            match abstraction_equivalent(cat, &d, &e) {
                Some(fam) => Ok(Report::ok(
                    json!({
                        "objects": fam.objects.iter().map(|f| cat.morphism_json(f)).collect::<Vec<_>>(),
                        "contexts": fam.contexts.iter().map(|f| cat.morphism_json(f)).collect::<Vec<_>>(),
                    }),
                    "abstraction equivalent",
                )),
                None => Err(Error::NotEquivalent("no abstraction equivalence family".into())),
            }
        }
        Analysis::Canonical => {
            let e = load_target(&sys, a.target)?;
            let bound = a.bound.unwrap_or_else(|| default_bound(d.len()));
            let seq = canonical_sequence(cat, &d, &e, bound)?;
            Ok(Report::ok(
                format::sequence_json(&sys, &seq),
                format!("canonical sequence {:?}", seq.positions()),
            ))
        }
        Analysis::WellSwitching => {
            let report = check_well_switching_on(cat, &d);
            let ok = report.all_ok();
            let v = serde_json::to_value(&report).map_err(|e| Error::Format(e.to_string()))?;
            let summary = report
                .positions
                .iter()
                .map(|p| format!("{}:{:?}", p.position, p.verdict))
                .collect::<Vec<_>>()
                .join(" ");
            Ok(Report::verdict(v, format!("well-switching: {summary}"), ok))
        }
        Analysis::RootPreserving => {
            let report = check_root_preserving(&sys)?;
            let ok = report.root_preserving;
            let v = serde_json::to_value(&report).map_err(|e| Error::Format(e.to_string()))?;
            let summary = if ok { "system is root-preserving" } else { "system is not root-preserving" };
            Ok(Report::verdict(v, summary, ok))
        }
        Analysis::Colimit => {
            let c = derivation_colimit(cat, &d)?;
            Ok(Report::ok(
                json!({
                    "apex": cat.object_json(&c.apex),
                    "injections": c.injections.iter().map(|f| cat.morphism_json(f)).collect::<Vec<_>>(),
                }),
                format!("colimit: {}", cat.describe_object(&c.apex)),
            ))
        }
        Analysis::ConsistencyProbe => {
            let ok = consistency_probe(cat, &d)?;
            let summary = if ok {
                "both switching orders agree"
            } else {
                "switching orders disagree"
            };
            Ok(Report::verdict(json!({ "consistent": ok }), summary, ok))
        }
        Analysis::ConsistentPermutation => {
            let e = load_target(&sys, a.target)?;
            let sigma = match a.permutation {
                Some(text) => {
                    let images = text
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|e| Error::Format(format!("--permutation: {e}")))?;
                    Permutation::new(images)?
                }
                None => Permutation::identity(d.len()),
            };
            match check_consistent_permutation(cat, &d, &e, &sigma)? {
                Some(xi) => Ok(Report::ok(
                    json!({ "permutation": sigma, "iso": cat.morphism_json(&xi) }),
                    "mediating isomorphism found",
                )),
                None => Err(Error::NotEquivalent("no mediating isomorphism".into())),
            }
        }
    }
}

fn run_render<C: Render>(graph: Option<&Path>, derivation: Option<&Path>, fmt: OutputFormat) -> Res<Report> {
    if let Some(path) = derivation {
        let (sys, d) = format::derivation_from_json::<C>(&read_json(path)?)?;
        return Ok(Report {
            out: derivation_output(&sys, &d, fmt),
            summary: format!("derivation of length {}", d.len()),
            negative: false,
        });
    }
    let path = graph.expect("clap requires --graph or --derivation");
    let v = read_json(path)?;
    let cat = C::instance_from_json(&v)?;
    let o = format::object_from_file_json(&cat, &v)?;
    let out = match fmt {
        OutputFormat::Json => Output::Json(format::object_file_json(&cat, &o)),
        OutputFormat::Dot => Output::Text(cat.object_dot(&o)),
    };
    Ok(Report {
        out,
        summary: cat.describe_object(&o),
        negative: false,
    })
}

fn fixture(name: Fixture) -> Res<Value> {
    use fixtures::*;
    let dump = |sys: &RewritingSystem<PresheafCat>, d: Derivation<PresheafCat>| format::derivation_json(sys, &d);
    Ok(match name {
        Fixture::CoffeeSystem => format::system_json(&coffee_system()?),
        Fixture::CoffeeG0 => {
            let sys = coffee_system()?;
            format::object_file_json(sys.category(), &coffee_g0(&sys)?)
        }
        Fixture::Coffee => {
            let sys = coffee_system()?;
            dump(&sys, coffee_derivation(&sys)?)
        }
        Fixture::CoffeeIndependent => {
            let sys = coffee_system()?;
            dump(&sys, coffee_independent(&sys)?)
        }
        Fixture::MergeSystem => format::system_json(&merge_system()?),
        Fixture::DerD => {
            let sys = merge_system()?;
            dump(&sys, der_d(&sys)?)
        }
        Fixture::DerE => {
            let sys = merge_system()?;
            dump(&sys, der_e(&sys)?)
        }
        Fixture::DerDPrime => {
            let sys = merge_system()?;
            dump(&sys, der_d_prime(&sys)?)
        }
        Fixture::DisjSystem => format::system_json(&disj_system()?),
        Fixture::DerF => {
            let sys = disj_system()?;
            dump(&sys, der_f(&sys)?)
        }
        Fixture::DerFPrime => {
            let sys = disj_system()?;
            dump(&sys, der_f_prime(&sys)?)
        }
        Fixture::DerFSecond => {
            let sys = disj_system()?;
            dump(&sys, der_f_second(&sys)?)
        }
        Fixture::DisjointThree => {
            let sys = merge_system()?;
            dump(&sys, disjoint_three(&sys)?)
        }
        Fixture::PosetSystem => format::system_json(&poset_system()?),
        Fixture::Poset => {
            let sys = poset_system()?;
            format::derivation_json(&sys, &poset_derivation(&sys)?)
        }
    })
}

/// Dispatch on the instance named by the file at `path` (a system file or a
/// derivation file whose `system` key names it).
fn kind_of(path: &Path) -> Res<InstanceKind> {
    let v = read_json(path)?;
    format::instance_kind(v.get("system").unwrap_or(&v))
}

macro_rules! dispatch {
    ($path:expr, $f:ident ::<_>($($arg:expr),*)) => {
        match kind_of($path)? {
            InstanceKind::Presheaf => $f::<PresheafCat>($($arg),*),
            InstanceKind::Poset => $f::<PosetCat>($($arg),*),
        }
    };
}

fn run(cli: Cli) -> Res<Report> {
    match cli.command {
        Command::Apply {
            system,
            graph,
            rule,
            match_index,
            format,
        } => {
            let plan = [(rule, match_index)];
            dispatch!(&system, run_derive::<_>(&system, &graph, &plan, format))
        }
        Command::Derive {
            system,
            graph,
            rules,
            matches,
            format,
        } => {
            if matches.len() > rules.len() {
                return Err(Error::Format("more --match values than --rule values".into()));
            }
            let plan: Vec<(String, usize)> = rules
                .into_iter()
                .enumerate()
                .map(|(i, r)| (r, matches.get(i).copied().unwrap_or(0)))
                .collect();
            dispatch!(&system, run_derive::<_>(&system, &graph, &plan, format))
        }
        Command::Matches {
            system,
            graph,
            rule,
            applicable,
        } => dispatch!(&system, run_matches::<_>(&system, &graph, &rule, applicable)),
        Command::Analyze {
            analysis,
            derivation,
            position,
            pair,
            target,
            bound,
            permutation,
        } => {
            let args = AnalyzeArgs {
                analysis,
                derivation: &derivation,
                position,
                pair,
                target: target.as_deref(),
                bound,
                permutation: permutation.as_deref(),
            };
            dispatch!(&derivation, run_analyze::<_>(&args))
        }
        Command::Fixture { name } => Ok(Report::ok(fixture(name)?, "fixture")),
        Command::Render {
            graph,
            derivation,
            format,
        } => {
            let path = derivation.as_deref().or(graph.as_deref()).expect("clap enforces one");
            dispatch!(path, run_render::<_>(graph.as_deref(), derivation.as_deref(), format))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            match report.out {
                Output::Json(v) => print!("{}", format::to_pretty(&v)),
                Output::Text(t) => print!("{t}"),
            }
            eprintln!("{}", report.summary);
            ExitCode::from(if report.negative { 3 } else { 0 })
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(match e.class() {
                ErrorClass::Input => 1,
                ErrorClass::Domain => 2,
                ErrorClass::Negative => 3,
            })
        }
    }
}
