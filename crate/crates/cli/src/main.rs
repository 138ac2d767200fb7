//! Command-line front end: reads and writes the versioned JSON documents of
//! `stable_lattice::io`, runs one pipeline stage per subcommand and prints a
//! machine-readable run report.
//!
//! Exit codes: 0 success, 2 validation failure (including unreadable input),
//! 3 search bound exceeded, 4 invariant breach or failed verification.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use stable_lattice::antimatroid::{
    compute_path_poset, family_from_path_poset, min_cost_stable, reduce_to_matching,
    transfer_costs, validate_antimatroid, PairCosts, Sense,
};
use stable_lattice::augment::{synthesize_from_lattice, verify_extension, Check};
use stable_lattice::io::{self, AntimatroidInput, Costs};
use stable_lattice::market::{enumerate_stable, stable_lattice, DEFAULT_NODE_BOUND};
use stable_lattice::order::{check_order_isomorphism, find_order_isomorphism, hasse_dot, Poset};
use stable_lattice::realize::{extract_rotations, RealizedBase};
use stable_lattice::selftest::{self, SuiteConfig};
use stable_lattice::{Error, ErrorClass};

/// Agents allowed per `|X|⁴` lattice elements in a synthesized market.
const AGENT_BUDGET_FACTOR: f64 = 8.0;

#[derive(Parser)]
#[command(name = "stable-lattice", version, about = "Realize finite lattices as stable-matching lattices")]
struct Cli {
    /// Maximum number of search nodes explored by stable-matching enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_NODE_BOUND)]
    bound_nodes: u64,
    /// Maximum number of lattice, poset or ground-set elements accepted.
    #[arg(long, global = true, default_value_t = 63)]
    bound_elements: usize,
    /// Seed for generated random fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write the run report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a market whose stable-matching lattice is isomorphic to a lattice.
    Synthesize {
        lattice: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a market's stable matchings form a lattice isomorphic to a given one.
    Verify { market: PathBuf, lattice: PathBuf },
    /// List all stable matchings of a market.
    Enumerate {
        market: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the rotation poset of a one-to-one market.
    Rotations {
        market: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the Hasse diagram of the rotation order here.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Reduce a minimum-cost antimatroid problem to a minimum-cost stable matching problem.
    Reduce {
        antimatroid: PathBuf,
        costs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Pre-scale ground costs so that every pair cost is an integer.
        #[arg(long)]
        integer: bool,
    },
    /// Find an optimal stable matching under pair or ground costs.
    Solve {
        bundle: PathBuf,
        /// Cost file; optional for reduction bundles, which carry their own pair costs.
        costs: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SenseArg::Min)]
        sense: SenseArg,
    },
    /// Render a lattice, poset, rotation poset or antimatroid path poset as DOT.
    ExportDot {
        input: PathBuf,
        /// Write DOT here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the fixture acceptance suite.
    Selftest {
        /// Use fewer random instances.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SenseArg {
    Min,
    Max,
}

impl From<SenseArg> for Sense {
    fn from(s: SenseArg) -> Sense {
        match s {
            SenseArg::Min => Sense::Min,
            SenseArg::Max => Sense::Max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Outcome {
    Ok,
    ValidationFailure,
    BoundExceeded,
    InvariantBreach,
}

impl Outcome {
    fn exit_code(self) -> u8 {
        match self {
            Outcome::Ok => 0,
            Outcome::ValidationFailure => 2,
            Outcome::BoundExceeded => 3,
            Outcome::InvariantBreach => 4,
        }
    }
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

/// Machine-readable summary of one command.
#[derive(Serialize)]
struct RunReport {
    v: u64,
    command: String,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    outcome: Outcome,
    exit_code: u8,
    elapsed_ms: u128,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug)]
enum Failure {
    Io(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn outcome(&self) -> Outcome {
        match self {
            Failure::Io(_) => Outcome::ValidationFailure,
            Failure::Lib(e) => match e.class() {
                ErrorClass::Validation => Outcome::ValidationFailure,
                ErrorClass::Bound => Outcome::BoundExceeded,
                ErrorClass::Invariant => Outcome::InvariantBreach,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) => m.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

/// Per-run context: bounds plus the inputs read and outputs written.
struct Run {
    node_bound: u64,
    element_bound: usize,
    seed: u64,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    checks: Vec<Check>,
    /// DOT text to print instead of the report.
    raw_output: Option<String>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|_| Failure::Io(format!("{} is not UTF-8", path.display())))
    }

    fn write(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    fn check(&mut self, name: &str, failure: Option<String>) {
        self.checks.push(Check::new(name, failure));
    }

    fn element_limit(&self, n: usize) -> Result<(), Failure> {
        if n > self.element_bound {
            return Err(Error::EnumerationBoundExceeded {
                size: n,
                bound: self.element_bound,
            }
            .into());
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut run = Run {
        node_bound: cli.bound_nodes,
        element_bound: cli.bound_elements,
        seed: cli.seed,
        inputs: Vec::new(),
        outputs: Vec::new(),
        checks: Vec::new(),
        raw_output: None,
    };
    let name = match &cli.command {
        Command::Synthesize { .. } => "synthesize",
        Command::Verify { .. } => "verify",
        Command::Enumerate { .. } => "enumerate",
        Command::Rotations { .. } => "rotations",
        Command::Reduce { .. } => "reduce",
        Command::Solve { .. } => "solve",
        Command::ExportDot { .. } => "export-dot",
        Command::Selftest { .. } => "selftest",
    };
    let result = dispatch(&cli.command, &mut run);
    let (outcome, result, error) = match result {
        Ok(v) if run.checks.iter().all(|c| c.passed) => (Outcome::Ok, v, None),
        Ok(v) => (Outcome::InvariantBreach, v, Some("verification failed".to_string())),
        Err(f) => (f.outcome(), Value::Null, Some(f.message())),
    };
    let report = RunReport {
        v: io::SCHEMA_VERSION,
        command: name.to_string(),
        inputs: run.inputs,
        outputs: run.outputs,
        outcome,
        exit_code: outcome.exit_code(),
        elapsed_ms: started.elapsed().as_millis(),
        checks: run.checks,
        result,
        error,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = &cli.report {
        if let Err(e) = fs::write(path, &text) {
            eprintln!("cannot write report {}: {e}", path.display());
        }
    }
    match run.raw_output {
        Some(dot) if outcome == Outcome::Ok => print!("{dot}"),
        _ => print!("{text}"),
    }
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code())
}

fn dispatch(cmd: &Command, run: &mut Run) -> Result<Value, Failure> {
    match cmd {
        Command::Synthesize { lattice, out } => cmd_synthesize(run, lattice, out),
        Command::Verify { market, lattice } => cmd_verify(run, market, lattice),
        Command::Enumerate { market, out } => cmd_enumerate(run, market, out.as_deref()),
        Command::Rotations { market, out, dot } => cmd_rotations(run, market, out.as_deref(), dot.as_deref()),
        Command::Reduce {
            antimatroid,
            costs,
            out,
            integer,
        } => cmd_reduce(run, antimatroid, costs, out, *integer),
        Command::Solve { bundle, costs, sense } => cmd_solve(run, bundle, costs.as_deref(), (*sense).into()),
        Command::ExportDot { input, out } => cmd_export_dot(run, input, out.as_deref()),
        Command::Selftest { quick } => cmd_selftest(run, *quick),
    }
}

fn pairs_json(mu: &stable_lattice::market::Matching) -> Value {
    serde_json::to_value(&mu.pairs).expect("pairs serialize")
}

fn cmd_synthesize(run: &mut Run, lattice: &Path, out: &Path) -> Result<Value, Failure> {
    let l = io::read_lattice(&run.read(lattice)?)?;
    run.element_limit(l.len())?;
    let s = synthesize_from_lattice(&l, run.node_bound)?;
    let ids = s.element_ids();
    run.check(
        "order_isomorphism",
        check_order_isomorphism(&ids, l.poset(), s.stable.lattice.poset())
            .err()
            .map(|e| e.to_string()),
    );
    let report = verify_extension(&s.extension.base, &s.extension, &s.constraints, run.node_bound)?;
    run.checks.extend(report.checks.iter().cloned());
    let agents = s.extension.market.agent_count();
    let budget = AGENT_BUDGET_FACTOR * (l.len() as f64).powi(4);
    run.check(
        "agent_budget",
        (agents as f64 > budget).then(|| format!("{agents} agents exceed {budget}")),
    );
    run.write(out, &io::write_synthesis(&l, &s)?)?;
    let iso: BTreeMap<&String, Value> = s.iso.iter().map(|(x, mu)| (x, pairs_json(mu))).collect();
    Ok(json!({
        "elements": l.len(),
        "agents": agents,
        "firms": s.extension.market.firms.len(),
        "workers": s.extension.market.workers.len(),
        "constraints": s.constraints.len(),
        "stable_matchings": s.stable.matchings.len(),
        "iso": iso,
    }))
}

fn cmd_verify(run: &mut Run, market: &Path, lattice: &Path) -> Result<Value, Failure> {
    let market_text = run.read(market)?;
    let m = io::read_market(&market_text)?;
    let l = io::read_lattice(&run.read(lattice)?)?;
    run.element_limit(l.len())?;
    let sl = stable_lattice(&m, run.node_bound)?;
    run.check(
        "same_size",
        (sl.matchings.len() != l.len())
            .then(|| format!("{} stable matchings, {} lattice elements", sl.matchings.len(), l.len())),
    );
    // Prefer the table recorded in a synthesis bundle; otherwise search.
    let recorded = io::read_synthesis(&market_text).ok().map(|doc| {
        doc.iso
            .iter()
            .filter_map(|(x, mu)| sl.index_of(mu).map(|i| (x.clone(), sl.id(i))))
            .collect::<BTreeMap<String, String>>()
    });
    let (source, map) = match recorded {
        Some(map) => ("bundle", Some(map)),
        None => ("search", find_order_isomorphism(l.poset(), sl.lattice.poset())),
    };
    let failure = match &map {
        Some(map) => check_order_isomorphism(map, l.poset(), sl.lattice.poset())
            .err()
            .map(|e| e.to_string()),
        None => Some("no order-isomorphism exists".to_string()),
    };
    run.check("order_isomorphism", failure);
    let iso: Option<BTreeMap<&String, Value>> = map.as_ref().map(|map| {
        map.iter()
            .filter_map(|(x, id)| {
                let i = sl.lattice.poset().index_of(id)?;
                Some((x, pairs_json(&sl.matchings[i])))
            })
            .collect()
    });
    Ok(json!({
        "stable_matchings": sl.matchings.len(),
        "elements": l.len(),
        "iso_source": source,
        "iso": iso,
    }))
}

fn cmd_enumerate(run: &mut Run, market: &Path, out: Option<&Path>) -> Result<Value, Failure> {
    let m = io::read_market(&run.read(market)?)?;
    let all = enumerate_stable(&m, run.node_bound)?;
    if let Some(out) = out {
        run.write(out, &io::write_matchings(&all)?)?;
    }
    Ok(json!({
        "count": all.len(),
        "matchings": all.iter().map(pairs_json).collect::<Vec<_>>(),
    }))
}

fn cmd_rotations(run: &mut Run, market: &Path, out: Option<&Path>, dot: Option<&Path>) -> Result<Value, Failure> {
    let m = io::read_market(&run.read(market)?)?;
    let rp = extract_rotations(&m, run.node_bound)?;
    if let Some(out) = out {
        run.write(out, &io::write_rotations(&rp)?)?;
    }
    if let Some(dot) = dot {
        run.write(dot, &hasse_dot(&rp.poset, "rotations"))?;
    }
    Ok(serde_json::to_value(io::RotationsDoc::from_poset(&rp)).expect("rotations serialize"))
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple of the lost-pair counts of the base rotations.
fn integer_scale(base: &RealizedBase) -> i64 {
    base.rotation_poset
        .rotations
        .values()
        .map(|r| r.minus.len().max(1) as i64)
        .fold(1, |acc, k| acc / gcd(acc, k) * k)
}

fn cmd_reduce(run: &mut Run, antimatroid: &Path, costs: &Path, out: &Path, integer: bool) -> Result<Value, Failure> {
    let input = io::read_antimatroid(&run.read(antimatroid)?)?;
    let Costs::Ground(mut c) = io::read_costs(&run.read(costs)?)? else {
        return Err(Error::Schema("reduce needs ground costs".into()).into());
    };
    let (fam, pp) = match input {
        AntimatroidInput::Family(fam) => {
            run.element_limit(fam.ground.len())?;
            validate_antimatroid(&fam)?;
            let pp = compute_path_poset(&fam)?;
            (fam, pp)
        }
        AntimatroidInput::Paths(pp) => {
            run.element_limit(pp.ground.len())?;
            let fam = family_from_path_poset(&pp)?;
            validate_antimatroid(&fam)?;
            let derived = compute_path_poset(&fam)?;
            let mut given = pp.paths.clone();
            given.sort();
            given.dedup();
            let mut got = derived.paths.clone();
            got.sort();
            run.check(
                "paths_consistent",
                (given != got).then(|| "the listed paths are not exactly the paths of the antimatroid they generate".into()),
            );
            (fam, derived)
        }
    };
    let mut reduction = reduce_to_matching(&pp, &c)?;
    let mut scale = 1;
    if integer {
        scale = integer_scale(&reduction.extension.base);
        c = c.into_iter().map(|(x, v)| (x, v * scale)).collect();
        reduction.pair_costs = transfer_costs(&reduction.extension.base, &c)?;
        run.check(
            "integer_pair_costs",
            reduction
                .pair_costs
                .iter()
                .find(|(_, r)| !r.is_integer())
                .map(|(p, r)| format!("pair {p:?} costs {r}")),
        );
    }
    let stable = enumerate_stable(reduction.market(), run.node_bound)?;
    run.check(
        "stable_count_matches_feasible",
        (stable.len() != fam.feasible.len())
            .then(|| format!("{} stable matchings, {} feasible sets", stable.len(), fam.feasible.len())),
    );
    run.write(out, &io::write_reduction(&reduction, &c)?)?;
    Ok(json!({
        "ground": pp.ground.len(),
        "paths": pp.paths.len(),
        "constraints": reduction.constraints.len(),
        "agents": reduction.market().agent_count(),
        "stable_matchings": stable.len(),
        "cost_scale": scale,
    }))
}

fn cmd_solve(run: &mut Run, bundle: &Path, costs: Option<&Path>, sense: Sense) -> Result<Value, Failure> {
    let text = run.read(bundle)?;
    let market = io::read_market(&text)?;
    let reduction = io::read_reduction(&text).ok();
    let base: Option<RealizedBase> = match &reduction {
        Some(r) => Some(r.extension.base.clone()),
        None => io::read_extension(&text)
            .map(|em| em.base)
            .or_else(|_| io::read_realized_base(&text))
            .ok(),
    };
    let pair_costs: PairCosts = match costs {
        Some(path) => match io::read_costs(&run.read(path)?)? {
            Costs::Pairs(p) => p,
            Costs::Ground(g) => {
                let base = base.as_ref().ok_or_else(|| {
                    Error::Schema("ground costs need a bundle with a realized base".into())
                })?;
                transfer_costs(base, &g)?
            }
        },
        None => match &reduction {
            Some(r) => r.pair_costs.clone(),
            None => return Err(Error::Schema("a cost file is required for this bundle".into()).into()),
        },
    };
    let (mu, value) = min_cost_stable(&market, &pair_costs, sense, run.node_bound)?;
    let mut result = json!({
        "sense": match sense { Sense::Min => "min", Sense::Max => "max" },
        "value": io::rational_json(&value),
        "matching": pairs_json(&mu),
    });
    if let Some(r) = &reduction {
        let set = r.recover(&mu)?;
        result["recovered"] = serde_json::to_value(&set).expect("set serializes");
    }
    Ok(result)
}

/// Containment order on the paths of an antimatroid; ids are `endpoint:{members}`.
fn path_order(pp: &stable_lattice::antimatroid::PathPoset) -> Result<Poset, Failure> {
    let ids: Vec<String> = pp
        .paths
        .iter()
        .map(|p| {
            let members: Vec<&str> = p.set.iter().map(String::as_str).collect();
            format!("{}:{{{}}}", p.endpoint, members.join(","))
        })
        .collect();
    let mut pairs = Vec::new();
    for (i, a) in pp.paths.iter().enumerate() {
        for (j, b) in pp.paths.iter().enumerate() {
            if i != j && a.set.is_subset(&b.set) {
                pairs.push((ids[i].clone(), ids[j].clone()));
            }
        }
    }
    Ok(Poset::from_pairs(&ids, &pairs)?)
}

fn cmd_export_dot(run: &mut Run, input: &Path, out: Option<&Path>) -> Result<Value, Failure> {
    let text = run.read(input)?;
    let doc = io::parse_document(&text)?;
    let (name, poset) = match io::kind_of(&doc) {
        Some("rotations") => ("rotations", io::read_rotations(&text)?.poset),
        Some("realized_base") => ("rotations", io::read_realized_base(&text)?.rotation_poset.poset),
        Some("antimatroid") => {
            let pp = match io::read_antimatroid(&text)? {
                AntimatroidInput::Family(fam) => {
                    validate_antimatroid(&fam)?;
                    compute_path_poset(&fam)?
                }
                AntimatroidInput::Paths(pp) => pp,
            };
            ("paths", path_order(&pp)?)
        }
        Some("synthesis") => {
            let s = io::read_synthesis(&text)?;
            ("lattice", s.lattice.poset()?)
        }
        _ => {
            let order: io::OrderDoc = serde_json::from_str(&text).map_err(Error::from)?;
            ("lattice", order.poset()?)
        }
    };
    run.element_limit(poset.len())?;
    let dot = hasse_dot(&poset, name);
    match out {
        Some(out) => run.write(out, &dot)?,
        None => run.raw_output = Some(dot),
    }
    Ok(json!({ "elements": poset.len(), "covers": poset.cover_ids().len() }))
}

fn cmd_selftest(run: &mut Run, quick: bool) -> Result<Value, Failure> {
    let mut cfg = SuiteConfig {
        node_bound: run.node_bound,
        element_bound: run.element_bound,
        seed: run.seed,
        ..SuiteConfig::default()
    };
    if quick {
        cfg.random_lattices = 5;
        cfg.random_antimatroids = 10;
        cfg.random_graphs = 3;
    }
    let results = selftest::run(&cfg);
    for r in &results {
        let failure = (!r.passed).then(|| r.detail.clone());
        run.check(&format!("criterion_{}", r.id), failure);
    }
    Ok(serde_json::to_value(&results).expect("results serialize"))
}
