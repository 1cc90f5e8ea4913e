use std::collections::BTreeSet;

use clap::Args;
use rationing::axioms::{
    check_eligibility, check_manipulation_axioms, check_max_beneficiary, check_max_size,
    check_order_preservation, check_respect_priorities, AxiomReport,
};
use rationing::generate::{generate, GenParams};
use rationing::oracle::{verify_characterization, verify_characterization_with, OracleError};
use rationing::rules::{rr_all, srr_with_split};
use rationing::{AgentId, Instance, Rule, UnreservedSplit};
use rayon::prelude::*;
use serde_json::json;

use crate::{emit, Failure, Format};

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    /// Instances cycle through 1..=max-agents agents.
    #[arg(long, default_value_t = 5)]
    max_agents: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Categories cycle through 1..=categories.
    #[arg(long, default_value_t = 3)]
    categories: usize,
    #[arg(long, default_value_t = 2)]
    max_quota: usize,
    /// Fixed density; by default instances cycle through 0.3, 0.6, 0.9.
    #[arg(long)]
    eligibility_density: Option<f64>,
    /// Fixed tie probability; by default instances cycle through 0 and 0.3.
    #[arg(long)]
    tie_prob: Option<f64>,
    /// Unreserved units for the srr checks.
    #[arg(long, default_value_t = 2)]
    unreserved: usize,
    #[arg(long, default_value_t = 4)]
    manipulation_budget: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Drop the lowest rejected agent of every ordering before comparing.
    #[arg(long, hide = true)]
    inject_skip_rejection: bool,
}

enum Verdict {
    Pass,
    Fail(String),
    Skip(String),
}

fn params(args: &VerifyArgs, k: usize) -> GenParams {
    GenParams {
        agents: 1 + k % args.max_agents.max(1),
        categories: 1 + (k / args.max_agents.max(1)) % args.categories.max(1),
        max_quota: args.max_quota,
        density: args.eligibility_density.unwrap_or([0.3, 0.6, 0.9][k % 3]),
        tie_prob: args.tie_prob.unwrap_or([0.0, 0.3][(k / 3) % 2]),
        seed: args.seed.wrapping_add(k as u64),
        unreserved: None,
        consistent: false,
    }
}

fn require(r: &AxiomReport, inst: &Instance, what: &str) -> Result<(), String> {
    if r.holds {
        return Ok(());
    }
    let w: Vec<String> = r.witnesses.iter().map(|w| w.describe(inst)).collect();
    Err(format!("{what}: {} fails ({})", r.axiom, w.join("; ")))
}

fn skip_lowest_rejection(inst: &Instance) -> BTreeSet<AgentId> {
    let mut r = rr_all(inst).1.rejected;
    if let Some(&a) = inst.baseline().iter().rev().find(|a| r.contains(a)) {
        r.remove(&a);
    }
    r
}

fn check_one(args: &VerifyArgs, k: usize) -> Verdict {
    let p = params(args, k);
    let inst = match generate(&p) {
        Ok(i) => i,
        Err(e) => return Verdict::Fail(format!("generation failed: {e}")),
    };
    let report = if args.inject_skip_rejection {
        verify_characterization_with(&inst, skip_lowest_rejection)
    } else {
        verify_characterization(&inst)
    };
    let report = match report {
        Ok(r) => r,
        Err(e @ OracleError::BoundExceeded { .. }) => return Verdict::Skip(e.to_string()),
    };
    if !report.holds {
        let show = |ms: Vec<&rationing::Matching>| {
            ms.iter()
                .map(|m| m.describe(&inst))
                .collect::<Vec<_>>()
                .join(" ")
        };
        return Verdict::Fail(format!(
            "characterization: rr only [{}], axioms only [{}]",
            show(report.rr_only()),
            show(report.axiom_only())
        ));
    }
    match axioms(args, k, &p, &inst) {
        Ok(()) => Verdict::Pass,
        Err(msg) => Verdict::Fail(msg),
    }
}

fn axioms(args: &VerifyArgs, k: usize, p: &GenParams, inst: &Instance) -> Result<(), String> {
    let (m, _) = rr_all(inst);
    require(&check_eligibility(inst, &m), inst, "rr")?;
    require(&check_respect_priorities(inst, &m), inst, "rr")?;
    require(
        &check_max_size(inst, &m).map_err(|e| e.to_string())?,
        inst,
        "rr",
    )?;
    let (sp, wnb) = check_manipulation_axioms(Rule::Rr, inst, args.manipulation_budget)
        .map_err(|e| e.to_string())?;
    require(&sp, inst, "rr")?;
    require(&wnb, inst, "rr")?;

    let q = args.unreserved;
    let split = match k % 3 {
        0 => UnreservedSplit::new(0, q),
        1 => UnreservedSplit::new(q, 0),
        _ => UnreservedSplit::new(q / 2, q - q / 2),
    };
    let with_pool = generate(&GenParams {
        unreserved: Some(q),
        ..p.clone()
    })
    .map_err(|e| e.to_string())?;
    let (inst, m) = srr_with_split(&with_pool, split).map_err(|e| e.to_string())?;
    let what = format!("srr {},{}", split.first, split.last);
    require(&check_eligibility(&inst, &m), &inst, &what)?;
    require(&check_max_beneficiary(&inst, &m), &inst, &what)?;
    require(&check_respect_priorities(&inst, &m), &inst, &what)?;
    require(&check_order_preservation(&inst, &m), &inst, &what)?;
    let (sp, wnb) = check_manipulation_axioms(Rule::Srr, &inst, args.manipulation_budget)
        .map_err(|e| e.to_string())?;
    require(&sp, &inst, &what)?;
    require(&wnb, &inst, &what)?;
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    if args.max_agents == 0 && args.count > 0 {
        return Err(Failure::input("--max-agents must be positive"));
    }
    for (name, v) in [
        ("eligibility-density", args.eligibility_density),
        ("tie-prob", args.tie_prob),
    ] {
        if v.is_some_and(|v| !(0.0..=1.0).contains(&v)) {
            return Err(Failure::input(format!("--{name} must lie in [0, 1]")));
        }
    }
    let verdicts: Vec<Verdict> = (0..args.count)
        .into_par_iter()
        .map(|k| check_one(args, k))
        .collect();

    let passed = verdicts
        .iter()
        .filter(|v| matches!(v, Verdict::Pass))
        .count();
    let skipped: Vec<(usize, &String)> = verdicts
        .iter()
        .enumerate()
        .filter_map(|(k, v)| match v {
            Verdict::Skip(msg) => Some((k, msg)),
            _ => None,
        })
        .collect();
    let failures: Vec<(usize, &String)> = verdicts
        .iter()
        .enumerate()
        .filter_map(|(k, v)| match v {
            Verdict::Fail(msg) => Some((k, msg)),
            _ => None,
        })
        .collect();
    for (k, msg) in &skipped {
        eprintln!("warning: instance {k} skipped: {msg}");
    }

    let seed_of = |k: usize| args.seed.wrapping_add(k as u64);
    let text = match args.format {
        Format::Json => {
            let first = failures
                .first()
                .map(|(k, msg)| json!({"instance": k, "seed": seed_of(*k), "message": msg}));
            let v = json!({
                "count": args.count,
                "passed": passed,
                "failed": failures.len(),
                "skipped": skipped.len(),
                "first_failure": first,
            });
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        Format::Table => {
            let mut s = format!(
                "{passed}/{} passed, {} failed, {} skipped\n",
                args.count,
                failures.len(),
                skipped.len()
            );
            if let Some((k, msg)) = failures.first() {
                s.push_str(&format!(
                    "first discrepancy: instance {k} (seed {}): {msg}\n",
                    seed_of(*k)
                ));
            }
            s
        }
    };
    emit(None, &text)?;
    Ok(if failures.is_empty() { 0 } else { 1 })
}
