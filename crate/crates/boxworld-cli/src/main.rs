//! Command-line front end for the boxworld library.
//!
//! Each subcommand loads a system description (and, where it needs one, a
//! state, table, or map file), runs the corresponding computation, and
//! prints a report as text, JSON, or CSV.  The same inputs always produce
//! byte-identical output: collections are emitted in a fixed order and
//! JSON objects render with sorted keys.
//!
//! Exit codes: 0 for success, including verification verdicts that report
//! an expected exception; 1 when a verification fails, a membership check
//! finds a violation, or an oracle cross-check disagrees; 2 for usage,
//! input, and bound errors.  With `-o json`, errors go to stderr as a
//! single JSON object.
//!
//! The engine is single-threaded; `BOXWORLD_THREADS` is validated and any
//! positive cap is honoured as given.

use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use boxworld::bell;
use boxworld::io;
use boxworld::linalg::Matrix;
use boxworld::rational::Rational;
use boxworld::search::{search_reversible_group, PruningMode, SearchOptions, SearchStats};
use boxworld::states::{state_from_table, state_violation, StateViolation};
use boxworld::theory::{SiteSpec, SystemSpec};
use boxworld::transforms::{
    generate_group, trivial_generators, GroupProvenance, LinearMap, TransformGroup,
};
use boxworld::verify::{verify_theorem1, verify_theorem2, VerdictStatus};
use boxworld::vertices::{enumerate_vertices, enumerate_vertices_oracle, VertexEnumOptions};
use boxworld::{Error, Result};

#[derive(Parser)]
#[command(
    name = "boxworld",
    version,
    about = "Exact-arithmetic reports on boxworld systems: state polytopes, \
             reversible dynamics, Bell correlations"
)]
struct Cli {
    /// System description file (JSON: {"sites":[{"outcomes":[...]},...]})
    #[arg(short = 's', long = "system", global = true, value_name = "FILE")]
    system: Option<PathBuf>,

    /// Input file — a state, table, or map, depending on the command
    #[arg(short = 'i', long = "input", global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Report format
    #[arg(
        short = 'o',
        long = "output-format",
        global = true,
        value_enum,
        default_value_t = OutputFormat::Text,
        value_name = "FORMAT"
    )]
    output_format: OutputFormat,

    /// Largest polytope affine dimension the vertex enumeration accepts
    #[arg(long = "bound-dim", global = true, value_name = "N")]
    bound_dim: Option<NonZeroUsize>,

    /// Largest extremal-effect count the group search accepts
    #[arg(long = "bound-effects", global = true, value_name = "N")]
    bound_effects: Option<NonZeroUsize>,

    /// Re-run with a brute-force cross-check where one is defined
    #[arg(long, global = true)]
    oracle: bool,

    /// Print only the headline line of text reports
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report dimensions, effect counts, and per-site Gram tables
    Spec,
    /// Enumerate the state polytope's vertices with classifications
    Vertices,
    /// Compute the group of reversible allowed transformations
    Group {
        #[command(flatten)]
        route: GroupRoute,
    },
    /// Verify a structural claim about the reversible dynamics
    Verify {
        /// Claim to check
        #[arg(value_enum)]
        claim: Claim,
        #[command(flatten)]
        route: GroupRoute,
    },
    /// Evaluate the CHSH correlators of a two-gbit state
    Chsh,
    /// Test an input against the state space, with witnesses on failure
    Check {
        /// What the input file holds
        #[arg(value_enum)]
        kind: CheckKind,
    },
}

/// How to obtain the transformation group.
#[derive(Args)]
struct GroupRoute {
    /// Generate the group of site permutations and local relabellings
    #[arg(long, conflicts_with = "search")]
    generate: bool,
    /// Search exhaustively for every reversible allowed map
    #[arg(long)]
    search: bool,
}

impl GroupRoute {
    fn explicit(&self) -> bool {
        self.generate || self.search
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Claim {
    #[value(name = "theorem1")]
    Theorem1,
    #[value(name = "theorem2")]
    Theorem2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    State,
    Table,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            report_error(cli.output_format, &err);
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    check_thread_cap()?;
    if cli.output_format == OutputFormat::Csv && !matches!(cli.command, Command::Vertices) {
        return Err(Error::Format(
            "csv output is only defined for the vertices command".into(),
        ));
    }
    match &cli.command {
        Command::Spec => cmd_spec(cli),
        Command::Vertices => cmd_vertices(cli),
        Command::Group { route } => cmd_group(cli, route),
        Command::Verify { claim, route } => match claim {
            Claim::Theorem1 => cmd_theorem1(cli, route),
            Claim::Theorem2 => cmd_theorem2(cli, route),
        },
        Command::Chsh => cmd_chsh(cli),
        Command::Check { kind } => cmd_check(cli, *kind),
    }
}

/// The engine runs on one thread, so any positive cap is honoured; a
/// malformed value is still rejected rather than silently ignored.
fn check_thread_cap() -> Result<()> {
    match std::env::var("BOXWORLD_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(Error::Format(format!(
                "BOXWORLD_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(std::env::VarError::NotUnicode(_)) => Err(Error::Format(
            "BOXWORLD_THREADS must be a positive integer".into(),
        )),
    }
}

fn report_error(format: OutputFormat, err: &Error) {
    if format == OutputFormat::Json {
        let mut obj = Map::new();
        obj.insert("message".into(), Value::String(err.to_string()));
        if let Error::Json { line, column, .. } = err {
            obj.insert("line".into(), json!(line));
            obj.insert("column".into(), json!(column));
        }
        eprintln!("{}", json!({ "error": Value::Object(obj) }));
    } else {
        eprintln!("error: {err}");
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))
}

fn load_system(cli: &Cli) -> Result<SystemSpec> {
    let path = cli
        .system
        .as_ref()
        .ok_or_else(|| Error::Format("this command requires --system <FILE>".into()))?;
    io::parse_system_spec(&read_file(path)?)
}

fn load_input(cli: &Cli, what: &str) -> Result<Vec<u8>> {
    let path = cli
        .input
        .as_ref()
        .ok_or_else(|| Error::Format(format!("this command requires --input <FILE> ({what})")))?;
    read_file(path)
}

fn search_options(cli: &Cli) -> SearchOptions {
    let mut opts = SearchOptions::default();
    if let Some(bound) = cli.bound_effects {
        opts.max_effects = bound.get();
    }
    opts
}

fn enum_options(cli: &Cli) -> VertexEnumOptions {
    let mut opts = VertexEnumOptions::default();
    if let Some(bound) = cli.bound_dim {
        opts.max_affine_dim = bound.get();
    }
    opts
}

/// Advisory for `--oracle` on commands without a brute-force counterpart.
fn oracle_note(cli: &Cli, what: &str) {
    if cli.oracle && !cli.quiet {
        eprintln!("note: no brute-force cross-check is defined for {what}; proceeding without one");
    }
}

fn print_json(value: Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(&value).expect("report serialization cannot fail")
    );
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn exit_from(failed: bool) -> ExitCode {
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn classification(pure_product: bool) -> &'static str {
    if pure_product {
        "pure-product"
    } else {
        "non-local"
    }
}

fn provenance_name(p: GroupProvenance) -> &'static str {
    match p {
        GroupProvenance::Generated => "generated",
        GroupProvenance::Searched => "searched",
    }
}

fn pruning_name(mode: PruningMode) -> &'static str {
    match mode {
        PruningMode::Gram => "gram",
        PruningMode::Blocks => "blocks",
        PruningMode::Disabled => "disabled",
    }
}

fn rational_strings<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Vec<String> {
    it.into_iter().map(Rational::to_string).collect()
}

fn values_line(values: &[String]) -> String {
    format!("[{}]", values.join(", "))
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    m.row_iter().map(rational_strings).collect()
}

fn map_value(map: &LinearMap) -> Value {
    json!({ "basis": io::MAP_BASIS, "matrix": matrix_rows(map.matrix()) })
}

fn stats_value(stats: &SearchStats) -> Value {
    json!({
        "nodes_explored": stats.nodes_explored,
        "pruned_branches": stats.pruned_branches,
        "candidates_verified": stats.candidates_verified,
        "pruning_mode": pruning_name(stats.pruning_mode),
    })
}

fn report_object(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(obj) => obj,
        _ => unreachable!("reports serialize to objects"),
    }
}

fn cmd_spec(cli: &Cli) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    oracle_note(cli, "spec");
    if cli.output_format == OutputFormat::Json {
        let sites: Vec<Value> = sys
            .sites()
            .iter()
            .map(|site| {
                let gram = site.gram_table();
                json!({
                    "outcomes": site.outcome_counts(),
                    "local_dim": site.local_dim(),
                    "local_effect_count": site.local_effect_count(),
                    "gram_labels": gram
                        .labels()
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>(),
                    "gram": matrix_rows(gram.matrix()),
                })
            })
            .collect();
        print_json(json!({
            "system": sys.describe(),
            "dim": sys.dim(),
            "affine_dim": sys.affine_dim(),
            "identity_index": sys.identity_index(),
            "extremal_effect_count": sys.extremal_effect_count(),
            "table_entry_count": sys.table_entry_count(),
            "sites": sites,
        }));
    } else {
        println!(
            "system {}: dim {} (affine {}), {} extremal effects, {} table entries",
            sys.describe(),
            sys.dim(),
            sys.affine_dim(),
            sys.extremal_effect_count(),
            sys.table_entry_count()
        );
        if !cli.quiet {
            println!("identity index: {}", sys.identity_index());
            for (i, site) in sys.sites().iter().enumerate() {
                println!(
                    "site {i}: outcomes {:?}, local dim {}, {} local effects",
                    site.outcome_counts(),
                    site.local_dim(),
                    site.local_effect_count()
                );
                print_gram(site);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_gram(site: &SiteSpec) {
    let gram = site.gram_table();
    let labels: Vec<String> = gram.labels().iter().map(ToString::to_string).collect();
    let cells = matrix_rows(gram.matrix());
    let mut width = labels.iter().map(String::len).max().unwrap_or(0);
    for row in &cells {
        for cell in row {
            width = width.max(cell.len());
        }
    }
    let mut header = format!("  {:>width$}", "");
    for label in &labels {
        header.push(' ');
        header.push_str(&format!("{label:>width$}"));
    }
    println!("{header}");
    for (label, row) in labels.iter().zip(&cells) {
        let mut line = format!("  {label:>width$}");
        for cell in row {
            line.push(' ');
            line.push_str(&format!("{cell:>width$}"));
        }
        println!("{line}");
    }
}

fn cmd_vertices(cli: &Cli) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    let rep = enumerate_vertices(&sys, &enum_options(cli))?;
    let oracle = if cli.oracle {
        let oracle_rep = enumerate_vertices_oracle(&sys)?;
        Some((rep == oracle_rep, oracle_rep.len()))
    } else {
        None
    };
    let agreed = oracle.is_none_or(|(agrees, _)| agrees);

    match cli.output_format {
        OutputFormat::Csv => {
            let mut header = String::from("index,classification");
            for i in 0..sys.dim() {
                header.push_str(&format!(",v{i}"));
            }
            println!("{header}");
            for (i, vertex) in rep.vertices().iter().enumerate() {
                let mut line = format!("{i},{}", classification(vertex.pure_product));
                for value in vertex.state.values().iter() {
                    line.push_str(&format!(",{value}"));
                }
                println!("{line}");
            }
        }
        OutputFormat::Json => {
            let vertices: Vec<Value> = rep
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, vertex)| {
                    json!({
                        "index": i,
                        "classification": classification(vertex.pure_product),
                        "values": rational_strings(vertex.state.values().iter()),
                    })
                })
                .collect();
            let mut obj = report_object(json!({
                "system": sys.describe(),
                "vertex_count": rep.len(),
                "pure_product_count": rep.pure_product_count(),
                "nonlocal_count": rep.nonlocal_count(),
                "vertices": vertices,
            }));
            if let Some((agrees, count)) = oracle {
                obj.insert(
                    "oracle".into(),
                    json!({ "agrees": agrees, "vertex_count": count }),
                );
            }
            print_json(Value::Object(obj));
        }
        OutputFormat::Text => {
            println!(
                "vertices: {} ({} pure-product, {} non-local)",
                rep.len(),
                rep.pure_product_count(),
                rep.nonlocal_count()
            );
            if !cli.quiet {
                for (i, vertex) in rep.vertices().iter().enumerate() {
                    println!(
                        "  {i:>3}  {:<12}  {}",
                        classification(vertex.pure_product),
                        values_line(&rational_strings(vertex.state.values().iter()))
                    );
                }
            }
            if let Some((agrees, count)) = oracle {
                if agrees {
                    println!("oracle: agrees (subset enumeration, {count} vertices)");
                } else {
                    println!("oracle: DISAGREES (subset enumeration found {count} vertices)");
                }
            }
        }
    }
    Ok(exit_from(!agreed))
}

fn build_group(
    cli: &Cli,
    sys: &SystemSpec,
    route: &GroupRoute,
) -> Result<(TransformGroup, Option<SearchStats>)> {
    if route.search {
        let result = search_reversible_group(sys, &search_options(cli))?;
        Ok((result.group, Some(result.stats)))
    } else {
        Ok((generate_group(sys, &trivial_generators(sys)?)?, None))
    }
}

fn cmd_group(cli: &Cli, route: &GroupRoute) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    let (group, stats) = build_group(cli, &sys, route)?;
    let oracle = if cli.oracle {
        if route.search {
            let unpruned = search_reversible_group(
                &sys,
                &SearchOptions {
                    use_pruning: false,
                    ..search_options(cli)
                },
            )?;
            Some((group.setwise_eq(&unpruned.group), unpruned.group.order()))
        } else {
            oracle_note(cli, "group --generate");
            None
        }
    } else {
        None
    };
    let agreed = oracle.is_none_or(|(agrees, _)| agrees);

    if cli.output_format == OutputFormat::Json {
        let mut obj = report_object(json!({
            "system": sys.describe(),
            "order": group.order(),
            "provenance": provenance_name(group.provenance()),
            "generator_count": group.generators().len(),
            "elements": group.iter().map(map_value).collect::<Vec<_>>(),
        }));
        if let Some(stats) = &stats {
            obj.insert("stats".into(), stats_value(stats));
        }
        if let Some((agrees, order)) = oracle {
            obj.insert("oracle".into(), json!({ "agrees": agrees, "order": order }));
        }
        print_json(Value::Object(obj));
    } else {
        println!(
            "group: order {} ({})",
            group.order(),
            provenance_name(group.provenance())
        );
        if !cli.quiet {
            println!("system: {}", sys.describe());
            println!("generators: {}", group.generators().len());
            if let Some(stats) = &stats {
                println!(
                    "search: {} nodes explored, {} branches pruned, {} candidates verified ({} pruning)",
                    stats.nodes_explored,
                    stats.pruned_branches,
                    stats.candidates_verified,
                    pruning_name(stats.pruning_mode)
                );
            }
            println!("elements: {} (emitted with -o json)", group.order());
        }
        if let Some((agrees, order)) = oracle {
            if agrees {
                println!("oracle: agrees (unpruned search, order {order})");
            } else {
                println!("oracle: DISAGREES (unpruned search found order {order})");
            }
        }
    }
    Ok(exit_from(!agreed))
}

fn cmd_theorem1(cli: &Cli, route: &GroupRoute) -> Result<ExitCode> {
    if route.explicit() {
        return Err(Error::Format(
            "--generate and --search select theorem2's group; theorem1 always runs both routes"
                .into(),
        ));
    }
    let sys = load_system(cli)?;
    let opts = search_options(cli);
    let report = verify_theorem1(&sys, &opts)?;
    let oracle = if cli.oracle {
        let pruned = search_reversible_group(&sys, &opts)?;
        let unpruned = search_reversible_group(
            &sys,
            &SearchOptions {
                use_pruning: false,
                ..opts.clone()
            },
        )?;
        Some((
            pruned.group.setwise_eq(&unpruned.group),
            pruned.group.order(),
            unpruned.group.order(),
        ))
    } else {
        None
    };
    let agreed = oracle.is_none_or(|(agrees, _, _)| agrees);

    if cli.output_format == OutputFormat::Json {
        let mut obj =
            report_object(serde_json::to_value(&report).expect("report serialization cannot fail"));
        if let Some((agrees, pruned, unpruned)) = oracle {
            obj.insert(
                "oracle".into(),
                json!({ "agrees": agrees, "pruned_order": pruned, "unpruned_order": unpruned }),
            );
        }
        print_json(Value::Object(obj));
    } else {
        println!("theorem1: {}", report.status);
        if !cli.quiet {
            println!("system: {}", report.system);
            println!("in scope: {}", yes_no(report.in_scope));
            println!("searched order: {}", report.searched_order);
            println!("generated order: {}", report.generated_order);
            println!("setwise equal: {}", yes_no(report.setwise_equal));
            println!("contains generated: {}", yes_no(report.contains_generated));
            println!(
                "factored: {} of {} searched elements",
                report.factored_elements,
                report.factored_elements + report.unfactored_elements
            );
            for note in &report.notes {
                println!("note: {note}");
            }
        }
        if let Some((agrees, _, unpruned)) = oracle {
            if agrees {
                println!("oracle: agrees (unpruned search, order {unpruned})");
            } else {
                println!("oracle: DISAGREES (unpruned search found order {unpruned})");
            }
        }
    }
    Ok(exit_from(report.status == VerdictStatus::Fail || !agreed))
}

fn cmd_theorem2(cli: &Cli, route: &GroupRoute) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    let (group, _) = build_group(cli, &sys, route)?;
    let report = verify_theorem2(&sys, &group)?;
    oracle_note(cli, "verify theorem2 (the check is already exhaustive)");

    if cli.output_format == OutputFormat::Json {
        let mut obj =
            report_object(serde_json::to_value(&report).expect("report serialization cannot fail"));
        obj.insert(
            "group_provenance".into(),
            json!(provenance_name(group.provenance())),
        );
        print_json(Value::Object(obj));
    } else {
        println!("theorem2: {}", report.status);
        if !cli.quiet {
            println!("system: {}", report.system);
            println!(
                "group: order {} ({})",
                report.group_order,
                provenance_name(group.provenance())
            );
            println!(
                "vertices: {} ({} pure-product, {} non-local)",
                report.vertex_count, report.pure_product_count, report.nonlocal_count
            );
            println!(
                "pure-product closed: {}",
                yes_no(report.pure_product_closed)
            );
            println!("non-local closed: {}", yes_no(report.nonlocal_closed));
            for failure in &report.failures {
                println!("failure: {failure}");
            }
        }
    }
    Ok(exit_from(report.status == VerdictStatus::Fail))
}

fn cmd_chsh(cli: &Cli) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    let state = io::parse_state_vector(&load_input(cli, "a state file")?)?;
    let settings = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)];
    let mut correlators = Vec::with_capacity(settings.len());
    for (first, second) in settings {
        correlators.push((
            first,
            second,
            bell::correlator(&sys, &state, first, second)?,
        ));
    }
    let value = bell::chsh_value(&sys, &state)?;
    if let Some(violation) = state_violation(&sys, &state)? {
        if !cli.quiet {
            eprintln!("note: the input is not a valid state ({violation})");
        }
    }
    let oracle = if cli.oracle {
        let functional_value = bell::chsh_functional(&sys)?.evaluate(&sys, &state)?;
        Some((functional_value == value, functional_value))
    } else {
        None
    };
    let agreed = oracle.as_ref().is_none_or(|(agrees, _)| *agrees);

    if cli.output_format == OutputFormat::Json {
        let entries: Vec<Value> = correlators
            .iter()
            .map(|(first, second, value)| {
                json!({ "settings": [first, second], "value": value.to_string() })
            })
            .collect();
        let mut obj = report_object(json!({
            "system": sys.describe(),
            "correlators": entries,
            "chsh": value.to_string(),
        }));
        if let Some((agrees, functional_value)) = &oracle {
            obj.insert(
                "oracle".into(),
                json!({ "agrees": agrees, "value": functional_value.to_string() }),
            );
        }
        print_json(Value::Object(obj));
    } else {
        println!("CHSH = {value}");
        if !cli.quiet {
            for (first, second, value) in &correlators {
                println!("E({first},{second}) = {value}");
            }
        }
        if let Some((agrees, functional_value)) = &oracle {
            if *agrees {
                println!("oracle: agrees (functional evaluation, {functional_value})");
            } else {
                println!("oracle: DISAGREES (functional evaluation gave {functional_value})");
            }
        }
    }
    Ok(exit_from(!agreed))
}

fn cmd_check(cli: &Cli, kind: CheckKind) -> Result<ExitCode> {
    match kind {
        CheckKind::State => cmd_check_state(cli),
        CheckKind::Table => cmd_check_table(cli),
    }
}

fn cmd_check_state(cli: &Cli) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    let state = io::parse_state_vector(&load_input(cli, "a state file")?)?;
    oracle_note(cli, "check state");
    let violation = state_violation(&sys, &state)?;

    if cli.output_format == OutputFormat::Json {
        let mut obj = report_object(json!({
            "kind": "state",
            "system": sys.describe(),
            "ok": violation.is_none(),
        }));
        if let Some(violation) = &violation {
            obj.insert("violation".into(), state_violation_value(violation));
        }
        print_json(Value::Object(obj));
    } else {
        match &violation {
            None => println!("state: ok"),
            Some(violation) => println!("state: INVALID — {violation}"),
        }
    }
    Ok(exit_from(violation.is_some()))
}

fn state_violation_value(violation: &StateViolation) -> Value {
    match violation {
        StateViolation::Negative { label, value } => json!({
            "kind": "negative-effect",
            "effect": label.to_string(),
            "value": value.to_string(),
        }),
        StateViolation::Unnormalized { value } => json!({
            "kind": "unnormalized",
            "value": value.to_string(),
        }),
    }
}

fn cmd_check_table(cli: &Cli) -> Result<ExitCode> {
    let sys = load_system(cli)?;
    let table = io::parse_probability_table(&load_input(cli, "a table file")?, &sys)?;
    oracle_note(cli, "check table");

    if let Some((settings, total)) = table.normalization_violation(&sys)? {
        if cli.output_format == OutputFormat::Json {
            print_json(json!({
                "kind": "table",
                "system": sys.describe(),
                "ok": false,
                "violation": {
                    "kind": "not-normalized",
                    "settings": settings,
                    "total": total.to_string(),
                },
            }));
        } else {
            println!("table: NOT NORMALIZED — settings {settings:?} sum to {total}");
        }
        return Ok(exit_from(true));
    }
    if let Some(witness) = table.signalling_witness(&sys)? {
        if cli.output_format == OutputFormat::Json {
            print_json(json!({
                "kind": "table",
                "system": sys.describe(),
                "ok": false,
                "violation": {
                    "kind": "signalling",
                    "site": witness.site,
                    "settings": witness.settings,
                    "alt_setting": witness.alt_setting,
                    "context_outcomes": witness.context_outcomes,
                    "lhs": witness.lhs.to_string(),
                    "rhs": witness.rhs.to_string(),
                },
            }));
        } else {
            println!(
                "table: SIGNALLING — site {} marginal for settings {:?} changes when its setting moves to {} (context outcomes {:?}: {} vs {})",
                witness.site,
                witness.settings,
                witness.alt_setting,
                witness.context_outcomes,
                witness.lhs,
                witness.rhs
            );
        }
        return Ok(exit_from(true));
    }

    let state = state_from_table(&sys, &table)?;
    if cli.output_format == OutputFormat::Json {
        print_json(json!({
            "kind": "table",
            "system": sys.describe(),
            "ok": true,
            "state": rational_strings(state.values().iter()),
        }));
    } else {
        println!("table: ok (normalized, non-signalling)");
        if !cli.quiet {
            println!(
                "state: {}",
                values_line(&rational_strings(state.values().iter()))
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
