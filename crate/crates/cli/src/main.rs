//! `ration`: allocate, check, generate and verify rationing instances.
//!
//! Exit codes: 0 success, 1 an axiom fails, 2 invalid input, 3 a rule
//! precondition does not hold.

mod documents;
mod verify;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rationing::axioms::{
    check_manipulation_axioms, check_matching, Axiom, AxiomError, AxiomReport,
};
use rationing::generate::{generate, GenParams};
use rationing::model::{InstanceDocument, KindDocument, SplitDocument};
use rationing::rules::{deferred_acceptance, rr_all, RrTrace};
use rationing::{Instance, Matching, Rule, RuleError, UnreservedSplit};

use documents::{parse_preferences, report_json, report_table, MatchingDocument};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Precondition(String),
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
        }
    }
}

impl From<RuleError> for Failure {
    fn from(e: RuleError) -> Self {
        match e {
            RuleError::Precondition(_) => Failure::Precondition(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<AxiomError> for Failure {
    fn from(e: AxiomError) -> Self {
        match e {
            AxiomError::Rule(r) => r.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ration",
    version,
    about = "Priority-respecting rationing solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an allocation rule on an instance.
    Allocate(AllocateArgs),
    /// Check axioms for a given matching or a rule's output.
    Check(CheckArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Check the characterization and the axioms on random instances.
    Verify(verify::VerifyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    Rr,
    Srr,
    Mg,
    Oaa,
    Da,
    Soft,
}

impl RuleArg {
    fn name(self) -> &'static str {
        match self {
            RuleArg::Rr => "rr",
            RuleArg::Srr => "srr",
            RuleArg::Mg => "mg",
            RuleArg::Oaa => "oaa",
            RuleArg::Da => "da",
            RuleArg::Soft => "soft",
        }
    }

    fn rule(self) -> Option<Rule> {
        Some(match self {
            RuleArg::Rr => Rule::Rr,
            RuleArg::Srr => Rule::Srr,
            RuleArg::Mg => Rule::MinimumGuarantees,
            RuleArg::Oaa => Rule::OverAndAbove,
            RuleArg::Soft => Rule::SoftReserves,
            RuleArg::Da => return None,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Args)]
struct RuleInput {
    /// Unreserved units handed out first and last, as `q1,q2`.
    #[arg(long, value_parser = parse_split)]
    split: Option<UnreservedSplit>,
    /// Preferences for `da`: an object from agent name to category names.
    #[arg(long)]
    prefs: Option<PathBuf>,
}

#[derive(Args)]
struct AllocateArgs {
    #[arg(long, value_enum)]
    rule: RuleArg,
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    input: RuleInput,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Matching document, or `-` for standard input.
    #[arg(long, conflicts_with = "rule", required_unless_present = "rule")]
    matching: Option<String>,
    /// Check the output of this rule instead.
    #[arg(long, value_enum)]
    rule: Option<RuleArg>,
    #[command(flatten)]
    input: RuleInput,
    /// Comma-separated axiom names, or `all`.
    #[arg(long, default_value = "all")]
    axioms: String,
    /// Single-category demotions tried per agent besides hiding.
    #[arg(long, default_value_t = 8)]
    manipulation_budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    categories: usize,
    #[arg(long, default_value_t = 2)]
    max_quota: usize,
    #[arg(long, default_value_t = 0.5)]
    eligibility_density: f64,
    #[arg(long, default_value_t = 0.0)]
    tie_prob: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Quota of an unreserved category.
    #[arg(long)]
    unreserved: Option<usize>,
    /// At most one preferential category per agent, ranked by the baseline.
    #[arg(long)]
    consistent: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_split(s: &str) -> Result<UnreservedSplit, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| "expected `q1,q2`".to_string())?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok(UnreservedSplit::new(num(a)?, num(b)?))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_instance(path: &Path) -> Result<(InstanceDocument, Instance), Failure> {
    let text = read_text(path)?;
    let doc: InstanceDocument = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let inst = doc
        .resolve()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    Ok((doc, inst))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::input(e.to_string()))
        }
    }
}

/// Whether the document fixes which unreserved units come first.
fn has_layout(doc: &InstanceDocument) -> bool {
    doc.unreserved_split.is_some()
        || doc.categories.iter().any(|c| {
            matches!(
                c.kind,
                KindDocument::UnreservedFirst | KindDocument::UnreservedLast
            )
        })
}

struct Allocation {
    instance: Instance,
    matching: Matching,
    split: Option<UnreservedSplit>,
    trace: Option<RrTrace>,
}

fn allocate(
    rule: RuleArg,
    doc: &InstanceDocument,
    inst: Instance,
    input: &RuleInput,
) -> Result<Allocation, Failure> {
    let needs_split = matches!(rule, RuleArg::Srr | RuleArg::Soft);
    let inst = match input.split {
        Some(split) if needs_split && inst.has_unreserved() && inst.unreserved_split() == split => {
            inst
        }
        Some(split) if needs_split => inst
            .with_unreserved_split(split)
            .map_err(|e| Failure::input(e.to_string()))?,
        Some(_) => return Err(Failure::input("--split only applies to srr and soft")),
        None if needs_split && inst.has_unreserved() && !has_layout(doc) => {
            return Err(Failure::input(format!(
                "{} needs --split or an unreserved_split in the instance",
                rule.name()
            )))
        }
        None => inst,
    };
    let split = needs_split.then(|| inst.unreserved_split());
    let (matching, trace) = match rule {
        RuleArg::Rr => {
            let (m, t) = rr_all(&inst);
            (m, Some(t))
        }
        RuleArg::Da => {
            let path = input
                .prefs
                .as_deref()
                .ok_or_else(|| Failure::input("da needs --prefs"))?;
            let prefs = parse_preferences(&inst, &read_text(path)?)?;
            (deferred_acceptance(&inst, &prefs)?, None)
        }
        other => (other.rule().expect("rule").apply(&inst)?, None),
    };
    Ok(Allocation {
        instance: inst,
        matching,
        split,
        trace,
    })
}

fn cmd_allocate(args: &AllocateArgs) -> Result<u8, Failure> {
    let (doc, inst) = read_instance(&args.instance)?;
    let a = allocate(args.rule, &doc, inst, &args.input)?;
    let out = MatchingDocument::new(
        &a.instance,
        &a.matching,
        Some(args.rule.name()),
        a.split.map(SplitDocument::from),
        a.trace.as_ref(),
    );
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&out).expect("serializable") + "\n",
        Format::Table => out.table(),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn parse_axioms(list: &str) -> Result<(Vec<Axiom>, bool), Failure> {
    if list == "all" {
        return Ok((Axiom::ALL.to_vec(), false));
    }
    let axioms = list
        .split(',')
        .map(|s| s.trim().parse::<Axiom>().map_err(Failure::input))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((axioms, true))
}

fn cmd_check(args: &CheckArgs) -> Result<u8, Failure> {
    let (doc, inst) = read_instance(&args.instance)?;
    let (axioms, explicit) = parse_axioms(&args.axioms)?;

    let (inst, matching, rule) = if let Some(rule) = args.rule {
        let a = allocate(rule, &doc, inst, &args.input)?;
        (a.instance, a.matching, rule.rule())
    } else {
        let source = args.matching.as_deref().expect("clap requires one");
        let text = if source == "-" {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::input(e.to_string()))?;
            s
        } else {
            read_text(Path::new(source))?
        };
        let mdoc: MatchingDocument =
            serde_json::from_str(&text).map_err(|e| Failure::input(format!("matching: {e}")))?;
        let split = args.input.split.or(mdoc.unreserved_split.map(Into::into));
        let inst = match split {
            Some(s) if !(inst.has_unreserved() && inst.unreserved_split() == s) => inst
                .with_unreserved_split(s)
                .map_err(|e| Failure::input(e.to_string()))?,
            _ => inst,
        };
        let m = mdoc.resolve(&inst)?;
        (inst, m, None)
    };

    let mut reports: Vec<AxiomReport> = check_matching(&inst, &matching, &axioms);
    let wants_manipulation = axioms.iter().any(|a| a.needs_rule());
    let harness_rule = rule.filter(|r| matches!(r, Rule::Rr | Rule::Srr | Rule::SoftReserves));
    match harness_rule {
        Some(r) if wants_manipulation => {
            let (sp, wnb) = check_manipulation_axioms(r, &inst, args.manipulation_budget)?;
            reports.extend(
                [sp, wnb]
                    .into_iter()
                    .filter(|rep| axioms.contains(&rep.axiom)),
            );
        }
        None if wants_manipulation && explicit => {
            return Err(Failure::input(
                "strategyproofness and weak-nonbossiness need --rule rr, srr or soft",
            ))
        }
        _ => {}
    }
    reports.sort_by_key(|r| r.axiom);

    let all_hold = reports.iter().all(|r| r.holds);
    let text = match args.format {
        Format::Json => {
            let v = serde_json::json!({
                "holds": all_hold,
                "reports": reports.iter().map(|r| report_json(&inst, r)).collect::<Vec<_>>(),
            });
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        Format::Table => reports.iter().map(|r| report_table(&inst, r)).collect(),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(if all_hold { 0 } else { 1 })
}

fn cmd_gen(args: &GenArgs) -> Result<u8, Failure> {
    let params = GenParams {
        agents: args.agents,
        categories: args.categories,
        max_quota: args.max_quota,
        density: args.eligibility_density,
        tie_prob: args.tie_prob,
        seed: args.seed,
        unreserved: args.unreserved,
        consistent: args.consistent,
    };
    let inst = generate(&params).map_err(|e| Failure::input(e.to_string()))?;
    let mut doc = InstanceDocument::from_instance(&inst);
    // a lone late pool reads back the same as a plain unreserved category
    for c in &mut doc.categories {
        if c.kind == KindDocument::UnreservedLast {
            c.kind = KindDocument::Unreserved;
        }
    }
    emit(args.out.as_deref(), &(doc.to_json() + "\n"))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Allocate(a) => cmd_allocate(a),
        Command::Check(a) => cmd_check(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Verify(a) => verify::cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let (Failure::Input(msg) | Failure::Precondition(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
