//! Command-line front end: `run`, `explore`, `check`, `hb`, `bisim`
//! and `laws`. Exit codes: 0 ok, 1 property violated or verdict
//! mismatch, 2 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use tx10_explore::hb::sem_name;
use tx10_explore::{
    all_laws, check_hbi, check_invariants, explore, happens_before, law_by_name, report_header,
    weak_bisim, BisimOptions, BisimVerdict, Check, ExploreError, ExploreOptions, HbiVerdict,
    LawChecker, Lts,
};
use tx10_heap::GlobalHeap;
use tx10_sem::{
    label_text, run_trace, Config, FailurePolicy, Injection, RunError, RunOptions, Scheduler,
    Semantics, Trace,
};
use tx10_syntax::{parse_program, parse_runtime, Place, Stmt, StmtKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "tx10",
    about = "Executable semantics for TX10 and Resilient TX10"
)]
struct Cli {
    /// One JSON record per line instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one trace to termination.
    Run {
        file: PathBuf,
        #[command(flatten)]
        world: World,
        #[arg(long, value_enum, default_value_t = Policy::Deterministic)]
        policy: Policy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Build the bounded transition system and print its summary.
    Explore {
        file: PathBuf,
        #[command(flatten)]
        world: World,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Check invariants on the explored transition system.
    Check {
        file: PathBuf,
        #[command(flatten)]
        world: World,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        /// Comma-separated check names, or `all`.
        #[arg(long, value_delimiter = ',', required = true)]
        props: Vec<String>,
    },
    /// Happens-before relation; `--compare` checks it is the same with failures.
    Hb {
        file: PathBuf,
        #[command(flatten)]
        world: World,
        #[arg(long, default_value_t = 60)]
        depth: usize,
        #[arg(long)]
        compare: bool,
    },
    /// Bounded weak bisimulation of two statements over empty heaps.
    Bisim {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, value_enum, default_value_t = Sem::Tx10)]
        semantics: Sem,
        #[arg(long, default_value_t = 3)]
        places: u32,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// The algebraic law suite.
    Laws {
        #[arg(long, value_enum)]
        semantics: Option<Sem>,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Only these laws (comma-separated names).
        #[arg(long, value_delimiter = ',')]
        law: Vec<String>,
    },
}

#[derive(Args, Debug, Clone)]
struct World {
    /// Semantics; resilient is implied by any failure option.
    #[arg(long, value_enum)]
    semantics: Option<Sem>,
    #[arg(long, default_value_t = 3)]
    places: u32,
    /// Failures allowed at any step (resilient).
    #[arg(long)]
    max_failures: Option<usize>,
    /// Places that may fail; default all but 0.
    #[arg(long, value_delimiter = ',')]
    fail_places: Vec<Place>,
    /// Scheduled failures as STEP:PLACE, comma-separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_fail_at)]
    fail_at: Vec<(usize, Place)>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Sem {
    Tx10,
    Resilient,
}

impl From<Sem> for Semantics {
    fn from(s: Sem) -> Semantics {
        match s {
            Sem::Tx10 => Semantics::Tx10,
            Sem::Resilient => Semantics::Resilient,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Policy {
    Deterministic,
    Random,
}

fn parse_fail_at(s: &str) -> Result<(usize, Place), String> {
    let (a, b) = s.split_once(':').ok_or("expected STEP:PLACE")?;
    let step = a.parse().map_err(|_| format!("bad step `{a}`"))?;
    let place = b.parse().map_err(|_| format!("bad place `{b}`"))?;
    Ok((step, place))
}

/// A usage or input error; reported with exit code 2.
#[derive(Debug)]
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Usage {
        Usage(e.to_string())
    }
}

impl World {
    fn validate(&self) -> Result<(), Usage> {
        if self.places == 0 {
            return Err(Usage("--places must be at least 1".into()));
        }
        for &p in self
            .fail_places
            .iter()
            .chain(self.fail_at.iter().map(|e| &e.1))
        {
            if p == 0 || p >= self.places {
                return Err(Usage(format!(
                    "place {p} cannot fail (valid: 1..{})",
                    self.places
                )));
            }
        }
        if self.semantics == Some(Sem::Tx10) && self.policy().max_failures > 0 {
            return Err(Usage("failure options need --semantics resilient".into()));
        }
        Ok(())
    }

    fn policy(&self) -> FailurePolicy {
        if !self.fail_at.is_empty() {
            return FailurePolicy::schedule(self.fail_at.clone());
        }
        let n = self.max_failures.unwrap_or(0);
        if self.fail_places.is_empty() {
            FailurePolicy::anytime(n, self.places)
        } else {
            FailurePolicy::new(
                n,
                self.fail_places.iter().copied(),
                Injection::BeforeEveryStep,
            )
        }
    }

    fn sem(&self) -> Semantics {
        match self.semantics {
            Some(s) => s.into(),
            None if self.policy().max_failures > 0 => Semantics::Resilient,
            None => Semantics::Tx10,
        }
    }

    fn explore_options(&self, depth: usize) -> ExploreOptions {
        match self.sem() {
            Semantics::Tx10 => ExploreOptions::tx10(depth),
            Semantics::Resilient => ExploreOptions::resilient(self.policy(), depth),
        }
    }

    fn heap(&self) -> GlobalHeap {
        GlobalHeap::empty(self.places)
    }
}

struct Out<'a> {
    w: &'a mut dyn Write,
    json: bool,
}

impl Out<'_> {
    fn line(&mut self, s: &str) {
        let _ = writeln!(self.w, "{s}");
    }

    /// A record: the text line, or the JSON object, depending on mode.
    fn record(&mut self, text: &str, value: serde_json::Value) {
        if self.json {
            self.line(&value.to_string());
        } else {
            self.line(text);
        }
    }
}

/// Every place id a statement mentions.
fn places_in(s: &Stmt) -> Vec<Place> {
    let mut out = Vec::new();
    s.walk(&mut |t| match &t.kind {
        StmtKind::At(q, ..) | StmtKind::AtSimple(q, _) | StmtKind::DynAt(q, _) => out.push(*q),
        _ => {}
    });
    out.extend(
        s.values()
            .into_iter()
            .filter_map(|v| v.named_oid())
            .map(|o| o.place),
    );
    out
}

fn check_places(s: &Stmt, places: u32, file: &Path) -> Result<(), Usage> {
    match places_in(s).into_iter().find(|&q| q >= places) {
        Some(q) => Err(Usage(format!(
            "{}: place {q} out of range (--places {places})",
            file.display()
        ))),
        None => Ok(()),
    }
}

fn read(file: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(file).map_err(|e| Usage(format!("{}: {e}", file.display())))
}

fn load_program(file: &Path, places: u32) -> Result<Stmt, Usage> {
    let p = parse_program(&read(file)?).map_err(|e| Usage(format!("{}: {e}", file.display())))?;
    check_places(&p, places, file)?;
    Ok(p)
}

/// A statement that may use runtime forms, judged as it stands.
fn load_runtime(file: &Path, places: u32) -> Result<Stmt, Usage> {
    let s = parse_runtime(&read(file)?).map_err(|e| Usage(format!("{}: {e}", file.display())))?;
    check_places(&s, places, file)?;
    Ok(s)
}

/// Parse `args` (program name first) and run; output goes to `out`,
/// diagnostics to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut o = Out {
        w: out,
        json: cli.json,
    };
    match dispatch(cli.cmd, &mut o) {
        Ok(code) => code,
        Err(Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Cmd, o: &mut Out) -> Result<i32, Usage> {
    match cmd {
        Cmd::Run {
            file,
            world,
            policy,
            seed,
            max_steps,
        } => {
            world.validate()?;
            let p = load_program(&file, world.places)?;
            let mut opts = match world.sem() {
                Semantics::Tx10 => RunOptions::tx10(max_steps),
                Semantics::Resilient => RunOptions::resilient(world.policy(), max_steps),
            };
            if policy == Policy::Random {
                opts = opts.with_scheduler(Scheduler::Random(seed));
            }
            Ok(cmd_run(&p, &world.heap(), &opts, o))
        }
        Cmd::Explore { file, world, depth } => {
            world.validate()?;
            let p = load_program(&file, world.places)?;
            let lts = explore_or_report(&p, &world, depth, o)?;
            Ok(cmd_explore(&lts, o))
        }
        Cmd::Check {
            file,
            world,
            depth,
            props,
        } => {
            world.validate()?;
            let checks = parse_checks(&props)?;
            let p = load_program(&file, world.places)?;
            let lts = explore_or_report(&p, &world, depth, o)?;
            Ok(cmd_check(&lts, &checks, o))
        }
        Cmd::Hb {
            file,
            world,
            depth,
            compare,
        } => {
            world.validate()?;
            let p = load_program(&file, world.places)?;
            cmd_hb(&p, &world, depth, compare, o)
        }
        Cmd::Bisim {
            file1,
            file2,
            semantics,
            places,
            depth,
        } => {
            if places == 0 {
                return Err(Usage("--places must be at least 1".into()));
            }
            let s1 = load_runtime(&file1, places)?;
            let s2 = load_runtime(&file2, places)?;
            cmd_bisim(&s1, &s2, semantics.into(), places, depth, o)
        }
        Cmd::Laws {
            semantics,
            depth,
            law,
        } => cmd_laws(semantics.map(Into::into), depth, &law, o),
    }
}

fn parse_checks(props: &[String]) -> Result<Vec<Check>, Usage> {
    if props.iter().any(|p| p == "all") {
        return Ok(Check::ALL.to_vec());
    }
    props
        .iter()
        .map(|p| {
            Check::from_name(p).ok_or_else(|| {
                let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
                Usage(format!("unknown check `{p}` (known: {})", names.join(", ")))
            })
        })
        .collect()
}

fn cmd_run(p: &Stmt, g0: &GlobalHeap, opts: &RunOptions, o: &mut Out) -> i32 {
    let (trace, status, code) = match run_trace(p, g0, opts) {
        Ok(t) => (t, "done", EXIT_OK),
        Err(RunError::StepLimit(t)) => (t, "step-limit", EXIT_VIOLATION),
        Err(RunError::Stuck(t)) => (t, "stuck", EXIT_VIOLATION),
        Err(RunError::Fault { trace, fault }) => {
            o.line(&format!("engine fault: {fault}"));
            (trace, "fault", EXIT_VIOLATION)
        }
    };
    print_trace(&trace, o);
    let label = trace
        .final_label()
        .map_or_else(|| "none".to_string(), label_text);
    let heap = trace.final_heap().digest();
    o.record(
        &format!(
            "result={status} steps={} label={label} heap={heap}",
            trace.steps.len()
        ),
        json!({"result": status, "steps": trace.steps.len(), "label": label, "heap": heap}),
    );
    code
}

fn print_trace(t: &Trace, o: &mut Out) {
    let text = if o.json {
        t.to_json_lines()
    } else {
        t.to_text()
    };
    for l in text.lines() {
        o.line(l);
    }
}

fn explore_or_report(p: &Stmt, world: &World, depth: usize, o: &mut Out) -> Result<Lts, Usage> {
    match explore(p, &world.heap(), &world.explore_options(depth)) {
        Ok(l) => Ok(l),
        Err(ExploreError::NodeBudgetExceeded { budget, partial }) => {
            o.record(
                &format!("warning node budget {budget} exceeded; partial system"),
                json!({"warning": "node-budget", "budget": budget}),
            );
            Ok(*partial)
        }
        Err(e) => Err(Usage(e.to_string())),
    }
}

fn stats_record(lts: &Lts, o: &mut Out) {
    let s = lts.stats();
    let sem = sem_name(lts.sem);
    let bounded = if lts.bound_hit { "yes" } else { "no" };
    o.record(
        &format!("lts sem={sem} nodes={} edges={} depth={} bounded={bounded}", s.nodes, s.edges, s.depth),
        json!({"lts": sem, "nodes": s.nodes, "edges": s.edges, "depth": s.depth, "bounded": lts.bound_hit}),
    );
}

fn cmd_explore(lts: &Lts, o: &mut Out) -> i32 {
    stats_record(lts, o);
    // terminal configurations, once per label reaching them
    let finals: std::collections::BTreeSet<(usize, String)> = lts
        .edges
        .iter()
        .filter(|e| lts.nodes[e.to].is_done())
        .map(|e| (e.to, label_text(e.transition.label)))
        .collect();
    for (node, label) in finals {
        let heap = lts.nodes[node].heap().digest();
        o.record(
            &format!("final node={node} label={label} heap={heap}"),
            json!({"final": node, "label": label, "heap": heap}),
        );
    }
    let stuck = lts
        .nodes
        .iter()
        .enumerate()
        .filter(|(i, k)| !k.is_done() && lts.expanded[*i] && lts.out[*i].is_empty())
        .count();
    if stuck > 0 {
        o.record(&format!("stuck nodes={stuck}"), json!({"stuck": stuck}));
        return EXIT_VIOLATION;
    }
    EXIT_OK
}

fn cmd_check(lts: &Lts, checks: &[Check], o: &mut Out) -> i32 {
    stats_record(lts, o);
    let report = check_invariants(lts, checks);
    if o.json {
        for r in &report.results {
            let v = r.violation.as_ref();
            o.line(
                &json!({
                    "check": r.check.name(),
                    "verdict": if r.passed() { "pass" } else { "fail" },
                    "checked": r.checked,
                    "bounded": report.bounded_only,
                    "node": v.map(|v| v.node),
                    "message": v.map(|v| v.message.clone()),
                    "path": v.map(|v| v.path.clone()),
                })
                .to_string(),
            );
        }
    } else {
        for l in report.lines(lts) {
            o.line(&l);
        }
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    }
}

fn label_legend(p: &Stmt, o: &mut Out) {
    p.walk(&mut |s| {
        let text = tx10_syntax::stmt_to_string(s);
        o.record(
            &format!("label {} = {text}", s.label),
            json!({"label": s.label.to_string(), "stmt": text}),
        );
    });
}

fn cmd_hb(p: &Stmt, world: &World, depth: usize, compare: bool, o: &mut Out) -> Result<i32, Usage> {
    label_legend(p, o);
    if !compare {
        let r = happens_before(p, &world.heap(), &world.explore_options(depth))?;
        for (a, b) in &r.pairs {
            o.record(
                &format!("hb {a} < {b}"),
                json!({"hb": [a.to_string(), b.to_string()]}),
            );
        }
        if r.bounded_only {
            o.record("warning bounded exploration", json!({"warning": "bounded"}));
        }
        return Ok(EXIT_OK);
    }
    // without explicit failure options, compare against two failures
    let fp = if world.max_failures.is_none() && world.fail_at.is_empty() {
        World {
            max_failures: Some(2),
            ..world.clone()
        }
        .policy()
    } else {
        world.policy()
    };
    let v = check_hbi(p, world.places, &fp, depth)?;
    if o.json {
        let rec = match &v {
            HbiVerdict::Equal(r) => json!({
                "hbi": "equal",
                "pairs": r.pairs.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect::<Vec<_>>(),
                "bounded": r.bounded_only,
            }),
            HbiVerdict::Differ {
                pair,
                holds_in,
                trace,
                bounded_only,
            } => json!({
                "hbi": "differ",
                "pair": [pair.0.to_string(), pair.1.to_string()],
                "holds_in": sem_name(*holds_in),
                "trace": trace,
                "bounded": bounded_only,
            }),
        };
        o.line(&rec.to_string());
    } else {
        for l in v.lines() {
            o.line(&l);
        }
    }
    Ok(if v.is_equal() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_bisim(
    s1: &Stmt,
    s2: &Stmt,
    sem: Semantics,
    places: u32,
    depth: usize,
    o: &mut Out,
) -> Result<i32, Usage> {
    let g = GlobalHeap::empty(places);
    let k1 = Config::Running(s1.clone(), g.clone());
    let k2 = Config::Running(s2.clone(), g);
    let v = weak_bisim(&k1, &k2, &BisimOptions::new(sem, places, depth))?;
    let lines = match &v {
        BisimVerdict::Distinguished { witness, .. } => witness.lines(),
        _ => Vec::new(),
    };
    o.record(
        &format!("bisim sem={} depth={depth} verdict={v}", sem_name(sem)),
        json!({"bisim": sem_name(sem), "depth": depth, "verdict": v.to_string(), "witness": lines}),
    );
    if !o.json {
        for l in &lines {
            o.line(&format!("  {l}"));
        }
    }
    Ok(if v.is_bisimilar() {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}

fn cmd_laws(
    sem: Option<Semantics>,
    depth: usize,
    names: &[String],
    o: &mut Out,
) -> Result<i32, Usage> {
    let laws = if names.is_empty() {
        all_laws()
            .into_iter()
            .filter(|l| sem.is_none_or(|s| l.sem == s))
            .collect()
    } else {
        names
            .iter()
            .map(|n| law_by_name(n).ok_or_else(|| Usage(format!("unknown law `{n}`"))))
            .collect::<Result<Vec<_>, _>>()?
    };
    let header = report_header(depth);
    o.record(&header, json!({"header": header}));
    let mut checker = LawChecker::new(depth);
    let mut mismatches = 0;
    for law in &laws {
        let r = checker.law(law)?;
        if !r.passed() {
            mismatches += 1;
        }
        let witness = r.witness().map(|(_, w)| w.lines()).unwrap_or_default();
        if o.json {
            let inst = r
                .witness()
                .map(|(i, _)| [i.lhs.to_string(), i.rhs.to_string()]);
            o.line(
                &json!({
                    "law": law.name,
                    "sem": sem_name(law.sem),
                    "side": law.side,
                    "expect": law.expect.name(),
                    "verdict": r.verdict().name(),
                    "status": if r.passed() { "ok" } else { "mismatch" },
                    "instances": r.outcomes.len(),
                    "distinguished": r.distinguished().count(),
                    "depth": depth,
                    "instance": inst,
                    "witness": witness,
                })
                .to_string(),
            );
        } else {
            o.line(&r.line());
            for l in &witness {
                o.line(&format!("  {l}"));
            }
        }
    }
    o.record(
        &format!("summary laws={} mismatches={mismatches}", laws.len()),
        json!({"summary": laws.len(), "mismatches": mismatches}),
    );
    Ok(if mismatches == 0 {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    })
}
