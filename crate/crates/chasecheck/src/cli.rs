//! Command-line surface: check, taxonomy, chase, query, translate, stats,
//! and corpus over directories of rule files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::chase::{self, ChaseConfig};
use crate::check::{self, CheckFlags, CheckRequest, EqualityMode, Mode, Notion, Outcome, Verdict};
use crate::error::{Error, Result};
use crate::query::{self, Answers, QueryEquality};
use crate::rule::RuleSet;
use crate::store::FactStore;
use crate::text;
use crate::transform::{self, TopMode};

pub const EXIT_ACYCLIC: i32 = 0;
pub const EXIT_NOT_ACYCLIC: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(
    name = "chasecheck",
    version,
    about = "Skolem-chase termination analysis and materialisation for existential rules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide one acyclicity notion for a rule file
    Check(CheckArgs),
    /// Run every notion and cross-check the containment lattice
    Taxonomy(TaxonomyArgs),
    /// Materialise the chase and print the resulting facts
    Chase(ChaseArgs),
    /// Answer a conjunctive query over the materialisation
    Query(QueryArgs),
    /// Translate a DL axiom file into rules
    Translate(TranslateArgs),
    /// Report depth and materialisation-size metrics
    Stats(StatsArgs),
    /// Analyse every rule and axiom file in a directory
    Corpus(CorpusArgs),
}

#[derive(Args, Clone)]
struct CommonChase {
    /// Stop after this many facts
    #[arg(long)]
    max_facts: Option<usize>,
    /// Stop at this term nesting depth
    #[arg(long)]
    max_depth: Option<u32>,
    /// Wall-clock limit in seconds
    #[arg(long)]
    timeout: Option<u64>,
    /// Print one line per rule firing
    #[arg(long)]
    trace: bool,
}

impl CommonChase {
    fn config(&self) -> ChaseConfig {
        let mut cfg = ChaseConfig::default();
        if self.max_facts.is_some() {
            cfg.max_facts = self.max_facts;
        }
        if self.max_depth.is_some() {
            cfg.max_depth = self.max_depth;
        }
        if let Some(secs) = self.timeout {
            cfg.time_limit = Some(Duration::from_secs(secs));
        }
        cfg.trace = self.trace;
        cfg
    }
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Equality handling: none, axiomatize, sing-union, sing-some, sing-all
    #[arg(long, default_value = "none")]
    equality: String,
    /// Truth-predicate augmentation: minimal or full
    #[arg(long, default_value = "minimal")]
    top: String,
    /// Strict ranking condition (quantify over every body variable)
    #[arg(long)]
    ar_strict: bool,
    /// Critical instance over every rule, not only user rules
    #[arg(long)]
    literal_critical: bool,
    /// Include equality facts in the critical instance
    #[arg(long)]
    critical_equality: bool,
    /// Drop the productivity condition from rule dependencies
    #[arg(long)]
    weak_deps: bool,
    /// Check model-faithful acyclicity via the alarm fact, not term shapes
    #[arg(long)]
    mfa_via_c: bool,
    /// Include wall-clock timings in reports (breaks byte-stability)
    #[arg(long)]
    timings: bool,
}

impl CommonFlags {
    fn equality(&self) -> Result<EqualityMode> {
        self.equality.parse()
    }

    fn flags(&self) -> Result<CheckFlags> {
        let top_mode = match self.top.as_str() {
            "minimal" => TopMode::Minimal,
            "full" => TopMode::Full,
            other => {
                return Err(Error::Inapplicable(format!(
                    "unknown top mode '{other}' (use minimal or full)"
                )))
            }
        };
        Ok(CheckFlags {
            top_mode,
            ar_strict: self.ar_strict,
            literal_critical: self.literal_critical,
            critical_equality: self.critical_equality,
            weak_deps: self.weak_deps,
            mfa_via_c: self.mfa_via_c,
            ..CheckFlags::default()
        })
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Rule file (.rules) or DL axiom file (.dlx)
    file: PathBuf,
    /// Acyclicity notion: wa, ja, swa, agrd, fd, ar, ga, msa, mfa
    #[arg(long, default_value = "mfa")]
    notion: String,
    /// Apply the per-component dependency combinator
    #[arg(long)]
    dep: bool,
    /// Check w.r.t. this fact file instead of the critical instance
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Emit the machine-readable report
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args)]
struct TaxonomyArgs {
    file: PathBuf,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args)]
struct ChaseArgs {
    rules: PathBuf,
    /// Fact file; the critical instance is used when omitted
    facts: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args)]
struct QueryArgs {
    rules: PathBuf,
    facts: PathBuf,
    query: PathBuf,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args)]
struct TranslateArgs {
    dlx: PathBuf,
    /// Write the rules here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Chain into an acyclicity check of the translation
    #[arg(long)]
    check: bool,
    #[arg(long, default_value = "mfa")]
    notion: String,
    #[arg(long)]
    dep: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args)]
struct StatsArgs {
    rules: PathBuf,
    facts: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

#[derive(Args)]
struct CorpusArgs {
    dir: PathBuf,
    /// Collect per-file errors instead of stopping
    #[arg(long)]
    keep_going: bool,
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    chase: CommonChase,
    #[command(flatten)]
    flags: CommonFlags,
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("chasecheck: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::ReservedIdentifier { .. }
        | Error::ArityConflict { .. }
        | Error::NonGround(_)
        | Error::Io { .. } => EXIT_PARSE,
        Error::ChaseLimit(_) | Error::BoundExceeded(_) => EXIT_UNKNOWN,
        Error::Internal(_) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Load rules from a `.rules` file, or translate a `.dlx` file on the fly.
fn load_rules(path: &Path) -> Result<RuleSet> {
    let textual = read(path)?;
    let name = path.display().to_string();
    if path.extension().and_then(|e| e.to_str()) == Some("dlx") {
        let axioms = text::parse_dl_axioms(&textual, &name)?;
        transform::dl_translate(&axioms)
    } else {
        text::parse_rules(&textual, &name)
    }
}

fn load_facts(path: &Path, rs: &RuleSet) -> Result<FactStore> {
    let textual = read(path)?;
    let store = text::parse_facts(&textual, &path.display().to_string())?;
    text::check_compatible(rs, &store)?;
    Ok(store)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Taxonomy(args) => cmd_taxonomy(args),
        Command::Chase(args) => cmd_chase(args),
        Command::Query(args) => cmd_query(args),
        Command::Translate(args) => cmd_translate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Corpus(args) => cmd_corpus(args),
    }
}

fn print_verdict(v: &Verdict, json: bool, timings: bool) {
    if json {
        println!("{}", text::report_value(v, timings));
        return;
    }
    let notion = if v.dep {
        format!("{}+dep", v.notion)
    } else {
        v.notion.to_string()
    };
    println!(
        "notion: {notion} ({}, equality={})",
        v.mode,
        v.equality.as_str()
    );
    println!("verdict: {}", v.outcome.as_str());
    if let Some(w) = &v.witness {
        println!("witness: {w}");
    }
    if let Some(facts) = v.stats.facts {
        println!(
            "stats: facts={facts} terms={} depth={} steps={}",
            v.stats.terms.unwrap_or(0),
            v.stats.depth.unwrap_or(0),
            v.stats.steps.unwrap_or(0)
        );
    }
}

fn outcome_exit(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Acyclic => EXIT_ACYCLIC,
        Outcome::NotAcyclic => EXIT_NOT_ACYCLIC,
        Outcome::Unknown => EXIT_UNKNOWN,
    }
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let rs = load_rules(&args.file)?;
    let notion: Notion = args.notion.parse()?;
    let mode = match &args.instance {
        None => Mode::Universal,
        Some(path) => Mode::Instance(load_facts(path, &rs)?),
    };
    let req = CheckRequest {
        notion,
        dep: args.dep,
        mode,
        equality: args.flags.equality()?,
        chase: args.chase.config(),
        flags: args.flags.flags()?,
    };
    let verdict = check::check(&req, &rs)?;
    print_verdict(&verdict, args.json, args.flags.timings);
    Ok(outcome_exit(verdict.outcome))
}

fn cmd_taxonomy(args: TaxonomyArgs) -> Result<i32> {
    let rs = load_rules(&args.file)?;
    let tax = check::taxonomy(
        &rs,
        args.flags.equality()?,
        &args.chase.config(),
        &args.flags.flags()?,
    )?;
    if args.json {
        let mut map = serde_json::Map::new();
        for (name, v) in &tax.verdicts {
            map.insert(name.clone(), text::report_value(v, args.flags.timings));
        }
        println!(
            "{}",
            json!({"verdicts": serde_json::Value::Object(map), "violations": tax.violations})
        );
    } else {
        for (name, v) in &tax.verdicts {
            let witness = v
                .witness
                .as_ref()
                .map(|w| format!("  ({w})"))
                .unwrap_or_default();
            println!("{name:<9} {}{}", v.outcome.as_str(), witness);
        }
        for violation in &tax.violations {
            println!("LATTICE VIOLATION: {violation}");
        }
    }
    if !tax.violations.is_empty() {
        return Err(Error::Internal(format!(
            "containment violated: {}",
            tax.violations.join("; ")
        )));
    }
    Ok(EXIT_ACYCLIC)
}

/// Shared pipeline for chase-producing commands: resolve equality, make
/// rules safe, skolemise.
fn prepare_for_chase(rs: &RuleSet, flags: &CheckFlags) -> Result<RuleSet> {
    let rs1 = transform::eliminate_body_equality(rs)?;
    let resolved = if rs1.contains_equality() {
        let axioms = transform::equality_axioms(&rs1)?;
        let mut rules = rs1.rules.clone();
        rules.extend(axioms.rules);
        transform::demote_equality(
            &RuleSet {
                rules,
                seeds: rs1.seeds.clone(),
            }
            .standardize_apart(),
        )
    } else {
        rs1
    };
    let topped = transform::augment_top(&resolved, flags.top_mode)?;
    let (sk, _) = transform::skolemise(&topped)?;
    Ok(sk)
}

fn cmd_chase(args: ChaseArgs) -> Result<i32> {
    let rs = load_rules(&args.rules)?;
    let flags = args.flags.flags()?;
    let start = match &args.facts {
        Some(path) => load_facts(path, &rs)?,
        None => transform::critical_instance(
            &rs,
            transform::CriticalOptions {
                literal: flags.literal_critical,
                include_equality: flags.critical_equality,
            },
        )?,
    };
    let sk = prepare_for_chase(&rs, &flags)?;
    let outcome = chase::chase(&sk, &start, &args.chase.config())?;
    if args.chase.trace {
        for entry in &outcome.trace {
            println!("{entry}");
        }
    }
    if args.json {
        println!(
            "{}",
            json!({
                "status": format!("{:?}", outcome.status),
                "facts": outcome.store.sorted_strings(),
                "stats": {
                    "facts": outcome.stats.facts,
                    "steps": outcome.stats.steps,
                    "depth": outcome.stats.max_term_depth,
                },
            })
        );
    } else {
        for line in outcome.store.sorted_strings() {
            println!("{line} .");
        }
        println!(
            "% status={:?} facts={} steps={} depth={}",
            outcome.status, outcome.stats.facts, outcome.stats.steps, outcome.stats.max_term_depth
        );
    }
    Ok(match outcome.status {
        chase::ChaseStatus::Fixpoint => EXIT_ACYCLIC,
        chase::ChaseStatus::CyclicTerm { .. } => EXIT_NOT_ACYCLIC,
        _ => EXIT_UNKNOWN,
    })
}

fn cmd_query(args: QueryArgs) -> Result<i32> {
    let rs = load_rules(&args.rules)?;
    let store = load_facts(&args.facts, &rs)?;
    let q = text::parse_query(&read(&args.query)?, &args.query.display().to_string())?;
    let equality = match args.flags.equality()? {
        EqualityMode::None => QueryEquality::None,
        EqualityMode::Axiomatize => QueryEquality::Axiomatize,
        _ => QueryEquality::SingulariseDefault,
    };
    let answers = query::answer(&rs, &store, &q, &equality, &args.chase.config())?;
    match &answers {
        Answers::All => {
            if args.json {
                println!("{}", json!({"inconsistent": true, "answers": "all"}));
            } else {
                println!("inconsistent: every substitution is an answer");
            }
        }
        Answers::Rows(rows) => {
            if args.json {
                let rendered: Vec<serde_json::Value> = rows
                    .iter()
                    .map(|r| {
                        let obj: serde_json::Map<String, serde_json::Value> = r
                            .iter()
                            .map(|(k, v)| (k.clone(), json!(v.to_string())))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect();
                println!(
                    "{}",
                    json!({"boolean": q.is_boolean(), "holds": answers.holds(), "answers": rendered})
                );
            } else if q.is_boolean() {
                println!("{}", if answers.holds() { "true" } else { "false" });
            } else if rows.is_empty() {
                println!("no answers");
            } else {
                for r in rows {
                    let line: Vec<String> = r.iter().map(|(k, v)| format!("?{k} = {v}")).collect();
                    println!("{}", line.join(", "));
                }
            }
        }
    }
    Ok(EXIT_ACYCLIC)
}

fn cmd_translate(args: TranslateArgs) -> Result<i32> {
    let textual = read(&args.dlx)?;
    let axioms = text::parse_dl_axioms(&textual, &args.dlx.display().to_string())?;
    let rs = transform::dl_translate(&axioms)?;
    let rendered = rs.to_string();
    match &args.output {
        Some(path) => std::fs::write(path, &rendered).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{rendered}"),
    }
    if args.check {
        let req = CheckRequest {
            notion: args.notion.parse()?,
            dep: args.dep,
            mode: Mode::Universal,
            equality: args.flags.equality()?,
            chase: args.chase.config(),
            flags: args.flags.flags()?,
        };
        let verdict = check::check(&req, &rs)?;
        print_verdict(&verdict, args.json, args.flags.timings);
        return Ok(outcome_exit(verdict.outcome));
    }
    Ok(EXIT_ACYCLIC)
}

fn cmd_stats(args: StatsArgs) -> Result<i32> {
    let rs = load_rules(&args.rules)?;
    let flags = args.flags.flags()?;
    let start = match &args.facts {
        Some(path) => load_facts(path, &rs)?,
        None => transform::critical_instance(
            &rs,
            transform::CriticalOptions {
                literal: flags.literal_critical,
                include_equality: flags.critical_equality,
            },
        )?,
    };
    let sk = prepare_for_chase(&rs, &flags)?;
    let outcome = chase::chase(&sk, &start, &args.chase.config())?;
    if !outcome.status.is_fixpoint() {
        return Err(Error::ChaseLimit(format!("{:?}", outcome.status)));
    }
    let depth = chase::ontology_depth(&outcome)?;
    let metrics = chase::materialisation_metrics(&start, &outcome)?;
    if args.json {
        println!(
            "{}",
            json!({
                "depth": depth,
                "generatedSize": metrics.generated_size.to_f64(),
                "materialisationSize": metrics.materialisation_size.to_f64(),
                "stats": {
                    "facts": outcome.stats.facts,
                    "steps": outcome.stats.steps,
                },
            })
        );
    } else {
        println!("depth: {depth}");
        println!(
            "generatedSize: {} ({:.3})",
            metrics.generated_size,
            metrics.generated_size.to_f64()
        );
        println!(
            "materialisationSize: {} ({:.3})",
            metrics.materialisation_size,
            metrics.materialisation_size.to_f64()
        );
    }
    Ok(EXIT_ACYCLIC)
}

fn depth_bucket(depth: u32) -> &'static str {
    match depth {
        0..=4 => "<5",
        5..=9 => "5-9",
        10..=19 => "10-19",
        20..=49 => "20-49",
        50..=70 => "50-70",
        _ => ">70",
    }
}

fn grules_bucket(count: usize) -> &'static str {
    match count {
        0..=99 => "<100",
        100..=999 => "100-1K",
        1000..=4999 => "1K-5K",
        5000..=11999 => "5K-12K",
        _ => ">=12K",
    }
}

struct CorpusRow {
    file: String,
    g_rules: usize,
    verdicts: BTreeMap<String, Outcome>,
    depth: Option<u32>,
    generated: Option<f64>,
    materialisation: Option<f64>,
    error: Option<String>,
}

fn corpus_file(
    path: &Path,
    equality: EqualityMode,
    cfg: &ChaseConfig,
    flags: &CheckFlags,
) -> Result<CorpusRow> {
    let rs = load_rules(path)?;
    let equality = if rs.contains_equality() && equality == EqualityMode::None {
        EqualityMode::SingUnion
    } else {
        equality
    };
    let tax = check::taxonomy(&rs, equality, cfg, flags)?;
    if !tax.violations.is_empty() {
        return Err(Error::Internal(format!(
            "containment violated on {}: {}",
            path.display(),
            tax.violations.join("; ")
        )));
    }
    let verdicts: BTreeMap<String, Outcome> = tax
        .verdicts
        .iter()
        .map(|(k, v)| (k.clone(), v.outcome))
        .collect();
    // depth and sizes come from a real materialisation when MFA holds
    let (mut depth, mut generated, mut materialisation) = (None, None, None);
    if verdicts.get("mfa") == Some(&Outcome::Acyclic) {
        let start = transform::critical_instance(
            &rs,
            transform::CriticalOptions {
                literal: flags.literal_critical,
                include_equality: flags.critical_equality,
            },
        )?;
        if !start.is_empty() {
            let sk = prepare_for_chase(&rs, flags)?;
            let outcome = chase::chase(&sk, &start, cfg)?;
            if outcome.status.is_fixpoint() {
                depth = Some(outcome.store.max_depth());
                if let Ok(m) = chase::materialisation_metrics(&start, &outcome) {
                    generated = Some(m.generated_size.to_f64());
                    materialisation = Some(m.materialisation_size.to_f64());
                }
            }
        }
    }
    Ok(CorpusRow {
        file: path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string()),
        g_rules: rs.generating_rule_count(),
        verdicts,
        depth,
        generated,
        materialisation,
        error: None,
    })
}

fn cmd_corpus(args: CorpusArgs) -> Result<i32> {
    let equality = args.flags.equality()?;
    let cfg = args.chase.config();
    let flags = args.flags.flags()?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .map_err(|source| Error::Io {
            path: args.dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("rules") | Some("dlx")
            )
        })
        .collect();
    files.sort();

    let threads: usize = std::env::var("CHASECHECK_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;

    use rayon::prelude::*;
    let rows: Vec<CorpusRow> = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                corpus_file(path, equality, &cfg, &flags).unwrap_or_else(|e| CorpusRow {
                    file: path
                        .file_name()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string()),
                    g_rules: 0,
                    verdicts: BTreeMap::new(),
                    depth: None,
                    generated: None,
                    materialisation: None,
                    error: Some(e.to_string()),
                })
            })
            .collect()
    });

    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 && !args.keep_going {
        for r in rows.iter().filter(|r| r.error.is_some()) {
            eprintln!("{}: {}", r.file, r.error.as_ref().unwrap());
        }
        return Err(Error::Inapplicable(format!(
            "{failed} file(s) failed; pass --keep-going to continue"
        )));
    }

    // aggregates in the spirit of the usual corpus tables
    let mut by_grules: BTreeMap<&'static str, BTreeMap<String, usize>> = BTreeMap::new();
    let mut by_depth: BTreeMap<&'static str, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.error.is_none()) {
        let bucket = by_grules.entry(grules_bucket(r.g_rules)).or_default();
        *bucket.entry("total".into()).or_default() += 1;
        for key in ["msa", "ja", "wa", "mfa"] {
            if r.verdicts.get(key).copied() == Some(Outcome::Acyclic) {
                *bucket.entry(key.to_owned()).or_default() += 1;
            }
        }
        if let (Some(d), Some(g), Some(m)) = (r.depth, r.generated, r.materialisation) {
            by_depth.entry(depth_bucket(d)).or_default().push((g, m));
        }
    }

    if args.json {
        let files_json: Vec<serde_json::Value> = rows
            .iter()
            .map(|r| {
                let verdicts: serde_json::Map<String, serde_json::Value> = r
                    .verdicts
                    .iter()
                    .map(|(k, v)| (k.clone(), json!(v.as_str())))
                    .collect();
                json!({
                    "file": r.file,
                    "gRules": r.g_rules,
                    "verdicts": serde_json::Value::Object(verdicts),
                    "depth": r.depth,
                    "generatedSize": r.generated,
                    "materialisationSize": r.materialisation,
                    "error": r.error,
                })
            })
            .collect();
        let grules_json: serde_json::Map<String, serde_json::Value> = by_grules
            .iter()
            .map(|(k, counts)| ((*k).to_owned(), json!(counts)))
            .collect();
        let depth_json: serde_json::Map<String, serde_json::Value> = by_depth
            .iter()
            .map(|(k, sizes)| {
                let avg_g = sizes.iter().map(|(g, _)| g).sum::<f64>() / sizes.len() as f64;
                let avg_m = sizes.iter().map(|(_, m)| m).sum::<f64>() / sizes.len() as f64;
                let max_g = sizes.iter().map(|(g, _)| *g).fold(0.0, f64::max);
                let max_m = sizes.iter().map(|(_, m)| *m).fold(0.0, f64::max);
                (
                    (*k).to_owned(),
                    json!({"count": sizes.len(), "avgGenerated": avg_g, "maxGenerated": max_g,
                           "avgMaterialisation": avg_m, "maxMaterialisation": max_m}),
                )
            })
            .collect();
        println!(
            "{}",
            json!({
                "files": files_json,
                "byGeneratingRules": serde_json::Value::Object(grules_json),
                "byDepth": serde_json::Value::Object(depth_json),
                "errors": failed,
            })
        );
    } else {
        for r in &rows {
            match &r.error {
                Some(e) => println!("{:<30} ERROR {e}", r.file),
                None => {
                    let line: Vec<String> = r
                        .verdicts
                        .iter()
                        .filter(|(k, _)| !k.contains("+dep"))
                        .map(|(k, v)| {
                            format!(
                                "{k}={}",
                                match v {
                                    Outcome::Acyclic => "yes",
                                    Outcome::NotAcyclic => "no",
                                    Outcome::Unknown => "?",
                                }
                            )
                        })
                        .collect();
                    println!("{:<30} g-rules={:<4} {}", r.file, r.g_rules, line.join(" "));
                }
            }
        }
        println!("-- by generating rules --");
        for (bucket, counts) in &by_grules {
            let rendered: Vec<String> = counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
            println!("{bucket:<8} {}", rendered.join(" "));
        }
        if !by_depth.is_empty() {
            println!("-- by depth --");
            for (bucket, sizes) in &by_depth {
                let avg_m = sizes.iter().map(|(_, m)| m).sum::<f64>() / sizes.len() as f64;
                println!(
                    "{bucket:<8} count={} avgMaterialisation={avg_m:.2}",
                    sizes.len()
                );
            }
        }
    }
    Ok(EXIT_ACYCLIC)
}
