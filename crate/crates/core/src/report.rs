//! Card reports and CI gate decisions.
//!
//! A [`CardReport`] bundles every module score for one card together with
//! the provenance needed to reproduce it. It renders as plain text, Markdown
//! or versioned JSON. All three are byte-stable for identical inputs apart
//! from the `generated_at` line.
//!
//! Gate exit statuses:
//!
//! | status | meaning |
//! |---|---|
//! | 0 | every gated module sufficient (vacuous modules allowed by policy) |
//! | 1 | at least one gated module insufficient |
//! | 2 | usage, parse or configuration error (raised by the CLI) |
//! | 3 | no insufficient modules, but vacuous ones under the strict policy |

use std::fmt::Write as _;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::card::CardDocument;
use crate::corpus::CorpusStats;
use crate::scoring::{score_card, ModuleScore, ScoreError, Verdict};
use crate::taxonomy::{Taxonomy, TaxonomyError};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Fill-first items listed per insufficient module in text and Markdown.
pub const FILL_FIRST_PREVIEW: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overall {
    pub pass: bool,
    pub insufficient_modules: Vec<String>,
    pub vacuous_modules: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardReport {
    pub schema_version: u32,
    pub project_id: String,
    pub task_family: Option<String>,
    pub taxonomy_version: String,
    pub stats_fingerprint: String,
    pub n_projects: u64,
    pub module_scores: Vec<ModuleScore>,
    pub overall: Overall,
    pub warnings: Vec<String>,
    pub generated_at: String,
    /// Scenario label that set the module order, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
}

impl CardReport {
    pub fn build(
        card: &CardDocument,
        stats: &CorpusStats,
        taxonomy: &Taxonomy,
        generated_at: DateTime<Utc>,
    ) -> Result<Self, ScoreError> {
        let module_scores = score_card(card, stats, taxonomy)?;
        let with_verdict = |v: Verdict| {
            module_scores
                .iter()
                .filter(|s| s.verdict == v)
                .map(|s| s.module_id.clone())
                .collect::<Vec<_>>()
        };
        let insufficient_modules = with_verdict(Verdict::Insufficient);
        let vacuous_modules = with_verdict(Verdict::VacuouslySufficient);

        let mut warnings = card.warnings.clone();
        if !card.unknown_fields.is_empty() {
            warnings.push(format!("unrecognized fields: {}", card.unknown_fields.join(", ")));
        }
        if stats.is_degenerate() {
            warnings.push("corpus documents no parameters; every baseline is zero".to_string());
        }
        Ok(CardReport {
            schema_version: REPORT_SCHEMA_VERSION,
            project_id: card.project_id.clone(),
            task_family: card.task_family.clone(),
            taxonomy_version: taxonomy.version.clone(),
            stats_fingerprint: stats.fingerprint(),
            n_projects: stats.n_projects,
            overall: Overall {
                pass: insufficient_modules.is_empty(),
                insufficient_modules,
                vacuous_modules,
            },
            module_scores,
            warnings,
            generated_at: generated_at.to_rfc3339_opts(SecondsFormat::Secs, true),
            scenario: None,
        })
    }

    /// Moves the scenario's modules to the front in listed order. The rest
    /// keep taxonomy order. Scores and the overall verdict are untouched.
    pub fn apply_scenario(&mut self, label: &str, taxonomy: &Taxonomy) -> Result<(), TaxonomyError> {
        let priority = taxonomy.scenario(label)?;
        let rank = |id: &str| priority.iter().position(|p| p == id).unwrap_or(priority.len());
        self.module_scores.sort_by_key(|s| rank(&s.module_id));
        self.scenario = Some(crate::taxonomy::fold_name(label));
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
    Markdown,
}

pub fn render_report(report: &CardReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Json => render_json(report),
        ReportFormat::Markdown => render_markdown(report),
    }
}

/// Parses the JSON rendering back into a report.
pub fn parse_report(source: &str) -> Result<CardReport, serde_json::Error> {
    serde_json::from_str(source)
}

fn short_fingerprint(report: &CardReport) -> &str {
    &report.stats_fingerprint[..report.stats_fingerprint.len().min(12)]
}

fn summary_line(report: &CardReport) -> String {
    let mut line = if report.overall.pass {
        "PASS".to_string()
    } else {
        format!(
            "FAIL ({} insufficient: {})",
            report.overall.insufficient_modules.len(),
            report.overall.insufficient_modules.join(", ")
        )
    };
    if !report.overall.vacuous_modules.is_empty() {
        let _ = write!(
            line,
            "; {} vacuous: {}",
            report.overall.vacuous_modules.len(),
            report.overall.vacuous_modules.join(", ")
        );
    }
    line
}

/// One table row, e.g. `0.260 / 0.384  INSUFFICIENT  shortfall 0.124`.
pub fn score_line(score: &ModuleScore) -> String {
    format!(
        "{:.3} / {:.3}  {:<12}  shortfall {:.3}",
        score.cumulative_prior,
        score.baseline,
        score.verdict.label(),
        score.shortfall
    )
}

fn render_text(report: &CardReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "project: {}", report.project_id);
    if let Some(task) = &report.task_family {
        let _ = writeln!(out, "task family: {task}");
    }
    if let Some(scenario) = &report.scenario {
        let _ = writeln!(out, "scenario: {scenario}");
    }
    let _ = writeln!(
        out,
        "taxonomy {}  stats {} (N={})",
        report.taxonomy_version,
        short_fingerprint(report),
        report.n_projects
    );
    let _ = writeln!(out, "generated_at: {}", report.generated_at);
    out.push('\n');
    let _ = writeln!(out, "{:<26}cumulative / baseline", "module");
    for score in &report.module_scores {
        let _ = writeln!(out, "{:<26}{}", score.module_id, score_line(score).trim_end());
    }

    let insufficient: Vec<_> = report
        .module_scores
        .iter()
        .filter(|s| s.verdict == Verdict::Insufficient)
        .collect();
    if !insufficient.is_empty() {
        out.push_str("\nfill first:\n");
        for score in insufficient {
            let _ = writeln!(out, "  {}", score.module_id);
            for (idx, missing) in score.missing.iter().take(FILL_FIRST_PREVIEW).enumerate() {
                let _ = writeln!(
                    out,
                    "    {}. {:<28}s={:.3}",
                    idx + 1,
                    missing.parameter_id,
                    missing.prior
                );
            }
        }
    }
    for warning in &report.warnings {
        let _ = writeln!(out, "warning: {warning}");
    }
    let _ = writeln!(out, "\nresult: {}", summary_line(report));
    out
}

fn render_json(report: &CardReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialize");
    text.push('\n');
    text
}

fn render_markdown(report: &CardReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Documentation sufficiency: {}\n", report.project_id);
    out.push_str("| Field | Value |\n|---|---|\n");
    if let Some(task) = &report.task_family {
        let _ = writeln!(out, "| Task family | {task} |");
    }
    if let Some(scenario) = &report.scenario {
        let _ = writeln!(out, "| Scenario | {scenario} |");
    }
    let _ = writeln!(out, "| Taxonomy | {} |", report.taxonomy_version);
    let _ = writeln!(
        out,
        "| Stats | `{}` (N={}) |",
        short_fingerprint(report),
        report.n_projects
    );
    let _ = writeln!(out, "| Generated | {} |", report.generated_at);
    let _ = writeln!(out, "| Result | {} |\n", summary_line(report));

    out.push_str("## Modules\n\n");
    out.push_str("| Module | Cumulative | Baseline | Verdict | Shortfall |\n|---|---:|---:|---|---:|\n");
    for s in &report.module_scores {
        let _ = writeln!(
            out,
            "| {} | {:.3} | {:.3} | {} | {:.3} |",
            s.module_id,
            s.cumulative_prior,
            s.baseline,
            s.verdict.label(),
            s.shortfall
        );
    }
    let insufficient: Vec<_> = report
        .module_scores
        .iter()
        .filter(|s| s.verdict == Verdict::Insufficient)
        .collect();
    if !insufficient.is_empty() {
        out.push_str("\n## Fill first\n");
        for s in insufficient {
            let _ = writeln!(
                out,
                "\n### {}\n\n| # | Parameter | Prior |\n|---:|---|---:|",
                s.module_id
            );
            for (idx, m) in s.missing.iter().take(FILL_FIRST_PREVIEW).enumerate() {
                let _ = writeln!(out, "| {} | {} | {:.3} |", idx + 1, m.parameter_id, m.prior);
            }
        }
    }
    if !report.warnings.is_empty() {
        out.push_str("\n## Warnings\n\n");
        for w in &report.warnings {
            let _ = writeln!(out, "- {w}");
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VacuousPolicy {
    /// Vacuous modules fail the gate with status 3.
    Strict,
    AllowVacuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GatePolicy {
    pub vacuous: VacuousPolicy,
    /// Restrict the gate to these modules; `None` gates every module.
    pub modules: Option<Vec<String>>,
}

impl Default for GatePolicy {
    fn default() -> Self {
        GatePolicy {
            vacuous: VacuousPolicy::Strict,
            modules: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GateOutcome {
    Pass,
    VacuousUnderStrict,
    Fail,
}

impl GateOutcome {
    pub fn exit_code(self) -> u8 {
        match self {
            GateOutcome::Pass => 0,
            GateOutcome::Fail => 1,
            GateOutcome::VacuousUnderStrict => 3,
        }
    }
}

pub fn gate_decision(report: &CardReport, policy: &GatePolicy) -> GateOutcome {
    let gated = report
        .module_scores
        .iter()
        .filter(|s| policy.modules.as_ref().is_none_or(|allow| allow.contains(&s.module_id)));
    let mut outcome = GateOutcome::Pass;
    for score in gated {
        match score.verdict {
            Verdict::Insufficient => return GateOutcome::Fail,
            Verdict::VacuouslySufficient if policy.vacuous == VacuousPolicy::Strict => {
                outcome = GateOutcome::VacuousUnderStrict;
            }
            _ => {}
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::MissingParameter;

    fn score(module: &str, verdict: Verdict) -> ModuleScore {
        let (cumulative_prior, baseline, shortfall) = match verdict {
            Verdict::Sufficient => (0.5, 0.4, 0.0),
            Verdict::Insufficient => (0.26, 0.384, 0.124),
            Verdict::VacuouslySufficient => (0.0, 0.0, 0.0),
        };
        ModuleScore {
            module_id: module.into(),
            cumulative_prior,
            baseline,
            verdict,
            shortfall,
            missing: vec![MissingParameter {
                parameter_id: format!("{module}_next"),
                prior: 0.08,
            }],
        }
    }

    fn report(verdicts: &[(&str, Verdict)]) -> CardReport {
        let module_scores: Vec<_> = verdicts.iter().map(|(m, v)| score(m, *v)).collect();
        let pick = |want: Verdict| {
            verdicts
                .iter()
                .filter(|(_, v)| *v == want)
                .map(|(m, _)| m.to_string())
                .collect::<Vec<_>>()
        };
        CardReport {
            schema_version: REPORT_SCHEMA_VERSION,
            project_id: "demo".into(),
            task_family: Some("chatbot".into()),
            taxonomy_version: "0.1.0".into(),
            stats_fingerprint: "ab".repeat(32),
            n_projects: 240,
            overall: Overall {
                pass: pick(Verdict::Insufficient).is_empty(),
                insufficient_modules: pick(Verdict::Insufficient),
                vacuous_modules: pick(Verdict::VacuouslySufficient),
            },
            module_scores,
            warnings: vec![],
            generated_at: "2025-07-12T00:00:00Z".into(),
            scenario: None,
        }
    }

    #[test]
    fn worked_example_line() {
        assert_eq!(
            score_line(&score("data", Verdict::Insufficient)),
            "0.260 / 0.384  INSUFFICIENT  shortfall 0.124"
        );
        let text = render_report(&report(&[("data", Verdict::Insufficient)]), ReportFormat::Text);
        assert!(text.contains("data                      0.260 / 0.384  INSUFFICIENT  shortfall 0.124\n"));
        assert!(text.contains("    1. data_next"));
        assert!(text.ends_with("result: FAIL (1 insufficient: data)\n"));
    }

    #[test]
    fn json_round_trip_is_field_exact() {
        let r = report(&[
            ("a", Verdict::Sufficient),
            ("b", Verdict::Insufficient),
            ("c", Verdict::VacuouslySufficient),
        ]);
        assert_eq!(parse_report(&render_report(&r, ReportFormat::Json)).unwrap(), r);
    }

    #[test]
    fn markdown_has_module_table() {
        let md = render_report(&report(&[("data", Verdict::Insufficient)]), ReportFormat::Markdown);
        assert!(md.contains("| data | 0.260 | 0.384 | INSUFFICIENT | 0.124 |"));
        assert!(md.contains("### data"));
    }

    #[test]
    fn gate_policy_matrix() {
        use Verdict::*;
        let strict = GatePolicy::default();
        let lenient = GatePolicy {
            vacuous: VacuousPolicy::AllowVacuous,
            modules: None,
        };
        let only = |ids: &[&str], vacuous| GatePolicy {
            vacuous,
            modules: Some(ids.iter().map(|s| s.to_string()).collect()),
        };
        let all_ok = report(&[("a", Sufficient), ("b", Sufficient)]);
        let one_bad = report(&[("a", Sufficient), ("b", Insufficient)]);
        let vacuous = report(&[("a", Sufficient), ("feedback", VacuouslySufficient)]);
        let both = report(&[("b", Insufficient), ("feedback", VacuouslySufficient)]);

        let cases = [
            (&all_ok, strict.clone(), 0),
            (&all_ok, lenient.clone(), 0),
            (&one_bad, strict.clone(), 1),
            (&one_bad, lenient.clone(), 1),
            (&one_bad, only(&["b"], VacuousPolicy::Strict), 1),
            (&one_bad, only(&["a"], VacuousPolicy::Strict), 0),
            (&vacuous, strict.clone(), 3),
            (&vacuous, lenient.clone(), 0),
            (&vacuous, only(&["a"], VacuousPolicy::Strict), 0),
            (&both, strict.clone(), 1),
            (&both, lenient.clone(), 1),
            (&both, only(&["feedback"], VacuousPolicy::Strict), 3),
        ];
        for (idx, (r, policy, expected)) in cases.into_iter().enumerate() {
            assert_eq!(gate_decision(r, &policy).exit_code(), expected, "case {idx}");
        }
    }

    #[test]
    fn scenario_reorders_without_rescoring() {
        let tax = Taxonomy::default_taxonomy();
        let ids: Vec<&str> = tax.module_ids().collect();
        let mut r = report(&ids.iter().map(|m| (*m, Verdict::Sufficient)).collect::<Vec<_>>());
        let before = r.clone();
        r.apply_scenario("Integration", &tax).unwrap();
        let order: Vec<_> = r.module_scores.iter().map(|s| s.module_id.as_str()).collect();
        assert_eq!(&order[..3], ["model_use", "model_details", "performance_limitations"]);
        let rest: Vec<_> = ids.iter().filter(|m| !order[..3].contains(m)).copied().collect();
        assert_eq!(&order[3..], rest.as_slice());
        assert_eq!(r.overall, before.overall);
        assert!(render_report(&r, ReportFormat::Text).contains("scenario: integration\n"));
        assert!(render_report(&r, ReportFormat::Markdown).contains("| Scenario | integration |"));
        assert_eq!(parse_report(&render_report(&r, ReportFormat::Json)).unwrap(), r);
        assert!(!render_report(&before, ReportFormat::Json).contains("scenario"));
        assert!(r.clone().apply_scenario("auditing", &tax).is_err());
    }
}
