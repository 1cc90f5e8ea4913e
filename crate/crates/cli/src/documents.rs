//! Matching, preference and report documents. Agents and categories appear
//! by name.

use std::collections::HashMap;

use rationing::axioms::AxiomReport;
use rationing::model::SplitDocument;
use rationing::rules::RrTrace;
use rationing::{CategoryId, Instance, Matching};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::Failure;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDocument {
    pub agent: String,
    pub category: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UtilizationDocument {
    pub category: String,
    pub quota: usize,
    pub used: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecisionDocument {
    pub agent: String,
    pub rejected: bool,
    pub ms: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDocument {
    /// In scan order.
    pub rejected: Vec<String>,
    pub decisions: Vec<DecisionDocument>,
    pub ms_total: usize,
}

/// Output of `allocate`, accepted unchanged by `check --matching`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    pub pairs: Vec<PairDocument>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub utilization: Vec<UtilizationDocument>,
    /// The unreserved split the category names refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unreserved_split: Option<SplitDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceDocument>,
}

impl MatchingDocument {
    pub fn new(
        inst: &Instance,
        m: &Matching,
        rule: Option<&str>,
        split: Option<SplitDocument>,
        trace: Option<&RrTrace>,
    ) -> Self {
        let pairs = m
            .pairs()
            .map(|(a, c)| PairDocument {
                agent: inst.agent_name(a).to_string(),
                category: inst.category(c).name.clone(),
            })
            .collect();
        let utilization = inst
            .category_ids()
            .map(|c| UtilizationDocument {
                category: inst.category(c).name.clone(),
                quota: inst.quota(c),
                used: m.load(c),
            })
            .collect();
        let trace = trace.map(|t| TraceDocument {
            rejected: t
                .decisions
                .iter()
                .filter(|d| d.rejected)
                .map(|d| inst.agent_name(d.agent).to_string())
                .collect(),
            decisions: t
                .decisions
                .iter()
                .map(|d| DecisionDocument {
                    agent: inst.agent_name(d.agent).to_string(),
                    rejected: d.rejected,
                    ms: d.ms,
                })
                .collect(),
            ms_total: t.ms_total,
        });
        Self {
            rule: rule.map(str::to_string),
            pairs,
            utilization,
            unreserved_split: split,
            trace,
        }
    }

    /// Resolves names against `inst` and checks quotas.
    pub fn resolve(&self, inst: &Instance) -> Result<Matching, Failure> {
        let mut m = Matching::new();
        for p in &self.pairs {
            let a = inst
                .agent_by_name(&p.agent)
                .ok_or_else(|| Failure::input(format!("unknown agent `{}`", p.agent)))?;
            let c = inst
                .category_by_name(&p.category)
                .ok_or_else(|| Failure::input(format!("unknown category `{}`", p.category)))?;
            if m.is_matched(a) {
                return Err(Failure::input(format!(
                    "agent `{}` is matched twice",
                    p.agent
                )));
            }
            m.assign(a, c);
        }
        m.validate(inst)
            .map_err(|e| Failure::input(e.to_string()))?;
        Ok(m)
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        if let Some(rule) = &self.rule {
            out.push_str(&format!("rule {rule}\n"));
        }
        if let Some(s) = &self.unreserved_split {
            out.push_str(&format!("unreserved split {},{}\n", s.first, s.last));
        }
        out.push_str("agent\tcategory\n");
        for p in &self.pairs {
            out.push_str(&format!("{}\t{}\n", p.agent, p.category));
        }
        out.push_str("category\tused/quota\n");
        for u in &self.utilization {
            out.push_str(&format!("{}\t{}/{}\n", u.category, u.used, u.quota));
        }
        if let Some(t) = &self.trace {
            out.push_str(&format!("maximum size {}\n", t.ms_total));
            for d in &t.decisions {
                let verdict = if d.rejected { "reject" } else { "accept" };
                out.push_str(&format!("{verdict} {}\tms {}\n", d.agent, d.ms));
            }
        }
        out
    }
}

/// Agent name to the category names it lists, best first. Agents left out
/// list nothing.
pub fn parse_preferences(inst: &Instance, text: &str) -> Result<Vec<Vec<CategoryId>>, Failure> {
    let raw: HashMap<String, Vec<String>> =
        serde_json::from_str(text).map_err(|e| Failure::input(format!("preferences: {e}")))?;
    let mut prefs = vec![Vec::new(); inst.num_agents()];
    for (agent, list) in raw {
        let a = inst
            .agent_by_name(&agent)
            .ok_or_else(|| Failure::input(format!("unknown agent `{agent}`")))?;
        prefs[a.0] = list
            .iter()
            .map(|c| {
                inst.category_by_name(c)
                    .ok_or_else(|| Failure::input(format!("unknown category `{c}`")))
            })
            .collect::<Result<_, _>>()?;
    }
    Ok(prefs)
}

const AGENT_FIELDS: [&str; 6] = ["agent", "envier", "envied", "higher", "lower", "affected"];
const CATEGORY_FIELDS: [&str; 3] = ["category", "higher_category", "lower_category"];

/// A report with ids in the witnesses replaced by names.
pub fn report_json(inst: &Instance, r: &AxiomReport) -> Value {
    let witnesses: Vec<Value> = r
        .witnesses
        .iter()
        .map(|w| {
            let mut v = serde_json::to_value(w).expect("witnesses serialize");
            if let Value::Object(map) = &mut v {
                for (key, value) in map.iter_mut() {
                    let Some(id) = value.as_u64() else { continue };
                    let id = id as usize;
                    if AGENT_FIELDS.contains(&key.as_str()) {
                        *value = json!(inst.agent_names()[id]);
                    } else if CATEGORY_FIELDS.contains(&key.as_str()) {
                        *value = json!(inst.categories()[id].name);
                    }
                }
                map.insert("description".into(), json!(w.describe(inst)));
            }
            v
        })
        .collect();
    let mut v = json!({
        "axiom": r.axiom.name(),
        "holds": r.holds,
        "total": r.total,
        "witnesses": witnesses,
    });
    if let Some(t) = r.tested {
        v["tested"] = json!(t);
    }
    if let Some(s) = r.skipped {
        v["skipped"] = json!(s);
    }
    v
}

pub fn report_table(inst: &Instance, r: &AxiomReport) -> String {
    let mut line = format!(
        "{:<20}{}",
        r.axiom.name(),
        if r.holds { "holds" } else { "FAILS" }
    );
    if let (Some(t), Some(s)) = (r.tested, r.skipped) {
        line.push_str(&format!("  ({t} manipulations tested, {s} skipped)"));
    }
    if r.total > 0 {
        line.push_str(&format!("  {} violations", r.total));
    }
    line.push('\n');
    for w in &r.witnesses {
        line.push_str(&format!("    {}\n", w.describe(inst)));
    }
    line
}
