//! `diamfam`: build, compress, classify and search diameter-bounded set
//! families from the command line.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or a counterexample was
//! found, 2 a search hit its time limit before exhausting, 64 usage error,
//! 65 malformed input file, 74 I/O failure.

use std::fs;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use diamfam::io::{parse_any, to_json, to_json_value, to_text};
use diamfam::search::{
    enumerate_maximum_families, max_diameter_family, verify_lemma, LemmaId, LemmaKind, SearchConfig, Target,
};
use diamfam::{
    bound_ladder, classify_extremal_in, BigInt, compress_to_complex, down_shift, evaluate, BoundId, Error, Mode, SetFamily,
    Template, TemplateArgs, TemplateKind,
};
use serde_json::{json, Value};

const EXIT_FAIL: u8 = 1;
const EXIT_NOT_EXHAUSTED: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;
const EXIT_IO: u8 = 74;

#[derive(Parser, Debug)]
#[command(name = "diamfam", version, about = "Diameter-bounded set families: constructions, compression, classification, search")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for every randomized check.
    #[arg(long, global = true, env = "DIAMFAM_SEED", default_value_t = 20_241_016)]
    seed: u64,

    /// Emit the JSON report; with a path, write it there instead of stdout.
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    json: Option<Option<PathBuf>>,

    /// Output format when --json is absent. `auto` picks text on a
    /// terminal and JSON otherwise.
    #[arg(long, global = true, value_enum, env = "DIAMFAM_FORMAT", default_value_t = Format::Auto)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Auto,
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a template instance.
    Construct(ConstructArgs),
    /// Summarize a family file.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Down-shift at one coordinate, or compress all the way to a complex.
    Compress {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        coordinate: Option<usize>,
        /// Write the shift trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the resulting family here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Place a family at level 1, 2 or 3 for diameter s.
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        s: u32,
        /// `theorem` (translate only) or `permute`.
        #[arg(long, env = "DIAMFAM_MODE", default_value = "theorem")]
        mode: Mode,
    },
    /// Evaluate a bound, or the three-level ladder.
    Bound {
        #[arg(long, required_unless_present = "ladder")]
        id: Option<BoundId>,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        /// Print KLEITMAN, FRANKL_DIAM and SECOND_STAB at (n, s).
        #[arg(long, conflicts_with = "id")]
        ladder: bool,
        /// Ladder as CSV instead of a table.
        #[arg(long, requires = "ladder")]
        csv: bool,
    },
    /// Exhaustive maximum-family search.
    Search(SearchArgs),
    /// Brute-force check of a cross-intersecting lemma.
    VerifyLemma {
        #[arg(long)]
        id: LemmaKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
    },
    /// Run a named suite and print a pass/fail table.
    Report {
        #[arg(long, value_parser = ["acceptance"])]
        suite: String,
        /// Run only these criterion ids.
        #[arg(long, value_delimiter = ',')]
        criterion: Vec<String>,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    kind: TemplateKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<usize>,
    /// `D` for H and Q, `R` for R, the block for HM.
    #[arg(long, alias = "D", alias = "R", value_delimiter = ',')]
    set: Option<Vec<usize>>,
    #[arg(long)]
    y: Option<usize>,
    /// Pair, triple, center or `j,y,x0,x1`, depending on the kind.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
    /// Write the family JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    s: u32,
    #[arg(long, default_value_t = 1)]
    level: u8,
    /// Collect every maximum family up to isometry.
    #[arg(long)]
    enumerate: bool,
    /// Seconds; the search stops with exhausted = false when exceeded.
    #[arg(long, env = "DIAMFAM_TIME_LIMIT")]
    time_limit: Option<f64>,
    /// Search all of 2^[n] instead of fixing the empty set as a member.
    #[arg(long)]
    no_fix_origin: bool,
    /// Only look for a family larger than this.
    #[arg(long, conflicts_with_all = ["size", "enumerate"])]
    upper_bound: Option<usize>,
    /// Enumerate admissible families of exactly this size.
    #[arg(long, conflicts_with = "enumerate")]
    size: Option<usize>,
}

/// Result of one subcommand before rendering.
struct Outcome {
    results: Value,
    text: String,
    exhausted: Option<bool>,
    code: u8,
}

impl Outcome {
    fn ok(results: Value, text: String) -> Self {
        Outcome { results, text, exhausted: None, code: 0 }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let start = Instant::now();
    match dispatch(&cli) {
        Ok(out) => match emit(&cli, &argv, out, start) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_IO)
            }
        },
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_IO;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) => EXIT_DATA,
        _ => EXIT_USAGE,
    }
}

fn emit(cli: &Cli, argv: &[String], out: Outcome, start: Instant) -> anyhow::Result<u8> {
    let json_wanted = match (&cli.global.json, cli.global.format) {
        (Some(_), _) | (None, Format::Json) => true,
        (None, Format::Text) => false,
        (None, Format::Auto) => !std::io::stdout().is_terminal(),
    };
    let report = json!({
        "command": argv.iter().skip(1).cloned().collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": { "seed": cli.global.seed },
        "results": out.results,
        "exhausted": out.exhausted,
        "exit_code": out.code,
        "wall_time_ms": start.elapsed().as_millis() as u64,
    });
    let rendered = serde_json::to_string_pretty(&report)? + "\n";
    let mut stdout = std::io::stdout().lock();
    match &cli.global.json {
        Some(Some(path)) => {
            write_file(path, &rendered)?;
            stdout.write_all(out.text.as_bytes())?;
        }
        _ if json_wanted => stdout.write_all(rendered.as_bytes())?,
        _ => stdout.write_all(out.text.as_bytes())?,
    }
    Ok(out.code)
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn read_family(path: &Path) -> anyhow::Result<SetFamily> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_any(&src)?)
}

fn dispatch(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Construct(a) => construct(a),
        Command::Inspect { input } => inspect(input),
        Command::Compress { input, coordinate, trace, out } => compress(input, *coordinate, trace.as_deref(), out.as_deref()),
        Command::Classify { input, s, mode } => classify(input, *s, *mode),
        Command::Bound { id, n, s, k, ladder, csv } => {
            if *ladder {
                let s = s.ok_or_else(|| usage("--ladder needs --s"))?;
                bound_ladder_cmd(*n, s, *csv)
            } else {
                let id = id.ok_or_else(|| usage("--id is required"))?;
                let p = if id.takes_k() { k.or(*s) } else { s.or(*k) }
                    .ok_or_else(|| usage(format!("{id} needs --{}", id.param_name())))?;
                bound(id, *n, p)
            }
        }
        Command::Search(a) => search(a),
        Command::VerifyLemma { id, n, k, t, l } => lemma(*id, *n, *k, *t, *l, cli.global.seed),
        Command::Report { suite: _, criterion } => report(criterion, cli.global.seed),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Error::Parameter(msg.into()))
}

fn construct(a: &ConstructArgs) -> anyhow::Result<Outcome> {
    let n = diamfam::GroundSize::new(a.n)?;
    let s = a.s.or(a.kind.fixed_s());
    let args = TemplateArgs { s, k: a.k, m: a.m, set: a.set.clone(), y: a.y, points: a.points.clone() };
    let t = Template::from_args(a.kind, n, &args)?;
    let fam = t.build()?;
    let meta = json!({
        "template": t.to_string(),
        "kind": a.kind.name(),
        "params": t.params_json(),
        "expected_size": t.expected_size()?.to_string(),
        "diameter": fam.diameter(),
    });
    if let Some(path) = &a.out {
        write_file(path, &(to_json(&fam, Some(meta.clone())) + "\n"))?;
    }
    let text = format!("# {t}, {} members, diameter {}\n{}", fam.len(), fam.diameter(), to_text(&fam));
    Ok(Outcome::ok(to_json_value(&fam, Some(meta)), text))
}

fn inspect(input: &Path) -> anyhow::Result<Outcome> {
    let f = read_family(input)?;
    let mut by_size = vec![0usize; f.n().get() + 1];
    for m in &f {
        by_size[m.len() as usize] += 1;
    }
    let results = json!({
        "n": f.n().get(),
        "size": f.len(),
        "diameter": f.diameter(),
        "max_union": f.max_union(),
        "is_complex": f.is_complex(),
        "members_by_size": by_size,
    });
    let text = format!(
        "n = {}\nsize = {}\ndiameter = {}\nmax union = {}\ncomplex = {}\nmembers by size = {:?}\n",
        f.n(),
        f.len(),
        f.diameter(),
        f.max_union(),
        f.is_complex(),
        by_size
    );
    Ok(Outcome::ok(results, text))
}

fn compress(input: &Path, coordinate: Option<usize>, trace: Option<&Path>, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let f = read_family(input)?;
    let (g, steps, fixpoint) = match coordinate {
        Some(j) => {
            let g = down_shift(&f, j)?;
            let moved = f.iter().filter(|m| !g.contains(**m)).count();
            let fixpoint = g.is_complex();
            (g, vec![(j, moved)], fixpoint)
        }
        None => {
            let (g, t) = compress_to_complex(&f);
            (g, t.steps, t.fixpoint)
        }
    };
    let trace_json = json!({
        "steps": steps.iter().map(|(j, moved)| json!({"coordinate": j, "moved": moved})).collect::<Vec<_>>(),
        "fixpoint": fixpoint,
    });
    if let Some(p) = trace {
        write_file(p, &(serde_json::to_string_pretty(&trace_json)? + "\n"))?;
    }
    if let Some(p) = out {
        write_file(p, &(to_json(&g, None) + "\n"))?;
    }
    let results = json!({
        "family": to_json_value(&g, None),
        "trace": trace_json,
        "size": g.len(),
        "diameter": g.diameter(),
        "is_complex": g.is_complex(),
    });
    let text = format!("# {} shifts, complex = {}\n{}", steps.len(), g.is_complex(), to_text(&g));
    Ok(Outcome::ok(results, text))
}

fn classify(input: &Path, s: u32, mode: Mode) -> anyhow::Result<Outcome> {
    let f = read_family(input)?;
    let r = classify_extremal_in(&f, s, mode)?;
    let label = r.label.template().map(|t| t.to_string()).unwrap_or_else(|| "none".into());
    let mut text = format!("level {}\nlabel {}\n", r.level, label);
    if let Some(kind) = r.label.kind() {
        text.push_str(&format!("kind {}\n", kind.name()));
    }
    if let (Some(b), Some(w)) = (&r.second_stab, r.within_second_stab) {
        text.push_str(&format!("SECOND_STAB = {}, within = {w}\n", b.value));
    }
    Ok(Outcome::ok(r.to_json(), text))
}

fn bound(id: BoundId, n: u64, p: u64) -> anyhow::Result<Outcome> {
    let v = evaluate::<BigInt>(id, n, p);
    let results = json!({
        "id": id.name(),
        "n": n,
        id.param_name(): p,
        "value": v.value.to_string(),
        "in_validity_window": v.in_validity_window,
        "parts": v.parts.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
    });
    let mut text = format!("{}\n", v.value);
    if !v.in_validity_window {
        text.push_str("# outside the validity window\n");
    }
    Ok(Outcome::ok(results, text))
}

fn bound_ladder_cmd(n: u64, s: u64, csv: bool) -> anyhow::Result<Outcome> {
    let l = bound_ladder::<BigInt>(n, s)?;
    let rows: Vec<Value> = l
        .rungs
        .iter()
        .map(|r| json!({"id": r.id.name(), "value": r.value.to_string(), "in_validity_window": r.in_validity_window}))
        .collect();
    let mut text = String::new();
    if csv {
        text.push_str("id,n,s,value,in_window\n");
        for r in &l.rungs {
            text.push_str(&format!("{},{n},{s},{},{}\n", r.id.name(), r.value, r.in_validity_window));
        }
    } else {
        text.push_str(&format!("{:<12} {:>24}  window\n", "bound", "value"));
        for r in &l.rungs {
            text.push_str(&format!("{:<12} {:>24}  {}\n", r.id.name(), r.value, r.in_validity_window));
        }
        text.push_str(&format!("strictly decreasing: {}\n", l.strictly_decreasing));
    }
    let results = json!({"n": n, "s": s, "rungs": rows, "strictly_decreasing": l.strictly_decreasing});
    Ok(Outcome::ok(results, text))
}

/// The bound a level-`level` maximum must respect, when one applies.
fn level_bound(n: usize, s: u32, level: u8) -> Option<(BoundId, BigInt)> {
    let id = match level {
        1 => BoundId::Kleitman,
        2 => BoundId::FranklDiam,
        3 if s >= 3 => BoundId::SecondStab,
        _ => return None,
    };
    let v = evaluate::<BigInt>(id, n as u64, s as u64);
    v.in_validity_window.then_some((id, v.value))
}

fn search(a: &SearchArgs) -> anyhow::Result<Outcome> {
    let target = match (a.upper_bound, a.size) {
        (Some(b), _) => Target::ProveUpperBound(b),
        (None, Some(m)) => Target::EnumerateSize(m),
        _ => Target::FindMax,
    };
    let limit = match a.time_limit {
        Some(t) if !(t.is_finite() && t > 0.0) => return Err(usage("--time-limit must be a positive number of seconds")),
        t => t.map(Duration::from_secs_f64),
    };
    let mut cfg = SearchConfig::new(a.n, a.s, a.level)?
        .with_target(target)
        .with_fix_origin(!a.no_fix_origin)
        .with_time_limit(limit);
    cfg.enumerate = a.enumerate;
    let (outcome, labels) = if a.enumerate {
        let e = enumerate_maximum_families(&cfg)?;
        (e.outcome, Some(e.labels))
    } else {
        (max_diameter_family(&cfg)?, None)
    };
    let witnesses: Vec<Value> = outcome
        .witnesses
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut v = to_json_value(w, None);
            if let Some(ls) = &labels {
                v["labels"] = json!(ls[i].iter().map(|t| t.to_string()).collect::<Vec<_>>());
            }
            v
        })
        .collect();
    let bound = level_bound(a.n, a.s, a.level);
    let violated = match (&bound, &target) {
        (Some((_, b)), Target::FindMax) => BigInt::from(outcome.max_size) > *b,
        _ => false,
    } || outcome.bound_holds == Some(false);
    let results = json!({
        "n": a.n,
        "s": a.s,
        "level": a.level,
        "exclusions": cfg.exclusions.iter().map(|k| k.name()).collect::<Vec<_>>(),
        "target": target,
        "fix_origin": cfg.fix_origin,
        "max_size": outcome.max_size,
        "bound": bound.as_ref().map(|(id, v)| json!({"id": id.name(), "value": v.to_string()})),
        "bound_holds": outcome.bound_holds,
        "nodes_explored": outcome.nodes_explored,
        "witness_count": outcome.witnesses.len(),
        "witnesses": witnesses,
    });
    let mut text = format!(
        "n = {}, s = {}, level {}: max size {} ({} form(s)), exhausted = {}, nodes = {}\n",
        a.n,
        a.s,
        a.level,
        outcome.max_size,
        outcome.witnesses.len(),
        outcome.exhausted,
        outcome.nodes_explored
    );
    if let Some((id, v)) = &bound {
        text.push_str(&format!("{} = {v}\n", id.name()));
    }
    if let Some(h) = outcome.bound_holds {
        text.push_str(&format!("bound holds: {h}\n"));
    }
    if let Some(ls) = &labels {
        for (i, l) in ls.iter().enumerate() {
            let names: Vec<String> = l.iter().map(|t| t.to_string()).collect();
            text.push_str(&format!("form {}: {}\n", i + 1, if names.is_empty() { "unnamed".into() } else { names.join(", ") }));
        }
    }
    let code = if violated {
        EXIT_FAIL
    } else if !outcome.exhausted {
        EXIT_NOT_EXHAUSTED
    } else {
        0
    };
    Ok(Outcome { results, text, exhausted: Some(outcome.exhausted), code })
}

fn lemma(kind: LemmaKind, n: usize, k: Option<usize>, t: Option<usize>, l: Option<usize>, seed: u64) -> anyhow::Result<Outcome> {
    let id = LemmaId::new(kind, n, k, t, l)?;
    let r = verify_lemma(&id, seed)?;
    let checks: Vec<Value> = r
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "bound": c.bound.to_string(),
                "strict": c.strict,
                "optimum": c.optimum,
                "pass": c.pass,
                "witness": c.witness.as_ref().map(|(f, g)| json!([to_json_value(f, None), to_json_value(g, None)])),
            })
        })
        .collect();
    let results = json!({
        "lemma": id.to_string(),
        "seed": seed,
        "explored": r.explored,
        "pass": r.pass,
        "checks": checks,
        "counterexample": r.counterexample.as_ref().map(|(f, g)| json!([to_json_value(f, None), to_json_value(g, None)])),
    });
    let mut text = format!("{id}: {} ({} explored)\n", if r.pass { "PASS" } else { "FAIL" }, r.explored);
    for c in &r.checks {
        let op = if c.strict { "<" } else { "<=" };
        let opt = c.optimum.map(|o| o.to_string()).unwrap_or_else(|| "-".into());
        text.push_str(&format!("  {}: optimum {opt} {op} {}  {}\n", c.name, c.bound, if c.pass { "ok" } else { "VIOLATED" }));
    }
    Ok(Outcome { results, text, exhausted: Some(true), code: if r.pass { 0 } else { EXIT_FAIL } })
}

fn report(only: &[String], seed: u64) -> anyhow::Result<Outcome> {
    use diamfam::suite::{run_criterion, CRITERIA};
    let known: Vec<&str> = CRITERIA.iter().map(|c| c.0).collect();
    if let Some(bad) = only.iter().find(|c| !known.contains(&c.as_str())) {
        return Err(usage(format!("unknown criterion {bad:?}; known: {}", known.join(", "))));
    }
    let mut rows = Vec::new();
    let mut text = String::new();
    for (i, (id, _, _)) in CRITERIA.iter().enumerate() {
        if !only.is_empty() && !only.iter().any(|c| c == id) {
            continue;
        }
        let r = run_criterion(i, seed);
        text.push_str(&r.line());
        text.push('\n');
        rows.push(r);
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    text.push_str(&format!("{} passed, {failed} failed\n", rows.len() - failed));
    let results = json!({
        "suite": "acceptance",
        "seed": seed,
        "criteria": rows.iter().map(|r| json!({"id": r.id, "title": r.title, "pass": r.pass, "detail": r.detail})).collect::<Vec<_>>(),
        "passed": rows.len() - failed,
        "failed": failed,
    });
    Ok(Outcome { results, text, exhausted: None, code: if failed == 0 { 0 } else { EXIT_FAIL } })
}
