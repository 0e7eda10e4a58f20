//! Module baselines, sufficiency verdicts and fill-first plans.
//!
//! Each module gets a threshold
//!
//! ```text
//! baseline(M) = (O_M / O_All + A_M / A_All) * S_M / 2
//! ```
//!
//! where `O_M` is the module's documented-occurrence count across the corpus,
//! `A_M` its parameter count and `S_M` the sum of its parameter priors. A card's
//! module is sufficient when the priors of its documented parameters add up to
//! at least the baseline. Placeholders never count.
//!
//! Priors share the denominator `N`, so a card's cumulative prior is computed
//! as `(sum of f_i) / N` from integer counts. This keeps a fully documented
//! module exactly equal to `S_M` and makes every comparison monotone.

use std::cmp::Reverse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::card::CardDocument;
use crate::corpus::CorpusStats;
use crate::taxonomy::{Taxonomy, TaxonomyError};

/// Slack applied when comparing a cumulative prior against its baseline.
pub const SUFFICIENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScoreError {
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("{what} uses taxonomy {found}, but taxonomy {expected} is loaded")]
    VersionMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },
}

impl From<TaxonomyError> for ScoreError {
    fn from(err: TaxonomyError) -> Self {
        match err {
            TaxonomyError::UnknownModule(id) => ScoreError::UnknownModule(id),
            other => unreachable!("taxonomy lookups only fail on unknown modules: {other}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Sufficient,
    Insufficient,
    /// The baseline is zero because the corpus never documents the module.
    VacuouslySufficient,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Sufficient => "SUFFICIENT",
            Verdict::Insufficient => "INSUFFICIENT",
            Verdict::VacuouslySufficient => "VACUOUS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleBaseline {
    pub module_id: String,
    pub s_total: f64,
    pub observed_share: f64,
    pub capacity_share: f64,
    pub baseline: f64,
    /// Set when the corpus documents nothing at all.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissingParameter {
    pub parameter_id: String,
    pub prior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleScore {
    pub module_id: String,
    pub cumulative_prior: f64,
    pub baseline: f64,
    pub verdict: Verdict,
    pub shortfall: f64,
    /// Parameters not documented in the card, highest prior first.
    pub missing: Vec<MissingParameter>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillStep {
    pub parameter_id: String,
    pub prior: f64,
    /// Module cumulative prior once this and every earlier step is filled.
    pub cumulative_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FillPlan {
    pub module_id: String,
    pub baseline: f64,
    pub starting_prior: f64,
    pub steps: Vec<FillStep>,
    /// Number of leading steps needed to reach the baseline; `Some(0)` when
    /// it is already met and `None` when even filling everything falls short.
    pub reaches_baseline_at: Option<usize>,
}

/// `(observed_share + capacity_share) * S_M / 2`.
pub fn baseline_from_shares(s_total: f64, observed_share: f64, capacity_share: f64) -> f64 {
    (observed_share + capacity_share) * (s_total / 2.0)
}

/// Whether `cumulative` meets `baseline` within [`SUFFICIENCY_TOLERANCE`].
pub fn meets_baseline(cumulative: f64, baseline: f64) -> bool {
    cumulative >= baseline - SUFFICIENCY_TOLERANCE
}

/// Verdict and shortfall for a cumulative prior against a baseline.
pub fn judge(cumulative: f64, baseline: f64) -> (Verdict, f64) {
    if baseline == 0.0 {
        (Verdict::VacuouslySufficient, 0.0)
    } else if meets_baseline(cumulative, baseline) {
        (Verdict::Sufficient, 0.0)
    } else {
        (Verdict::Insufficient, baseline - cumulative)
    }
}

pub fn module_baseline(stats: &CorpusStats, module_id: &str) -> Result<ModuleBaseline, ScoreError> {
    let module = stats
        .module(module_id)
        .ok_or_else(|| ScoreError::UnknownModule(module_id.to_string()))?;
    let observed_share = stats.observed_share(module);
    let capacity_share = stats.capacity_share(module);
    let baseline = if stats.is_degenerate() {
        0.0
    } else {
        baseline_from_shares(module.s_total, observed_share, capacity_share)
    };
    Ok(ModuleBaseline {
        module_id: module_id.to_string(),
        s_total: module.s_total,
        observed_share,
        capacity_share,
        baseline,
        degenerate: stats.is_degenerate(),
    })
}

fn check_versions(card: &CardDocument, stats: &CorpusStats, taxonomy: &Taxonomy) -> Result<(), ScoreError> {
    if stats.taxonomy_version != taxonomy.version {
        return Err(ScoreError::VersionMismatch {
            what: "stats",
            expected: taxonomy.version.clone(),
            found: stats.taxonomy_version.clone(),
        });
    }
    if card.taxonomy_version != taxonomy.version {
        return Err(ScoreError::VersionMismatch {
            what: "card",
            expected: taxonomy.version.clone(),
            found: card.taxonomy_version.clone(),
        });
    }
    Ok(())
}

/// Documented frequency mass and the remaining parameters (highest first).
fn split_module(
    card: &CardDocument,
    module_id: &str,
    stats: &CorpusStats,
    taxonomy: &Taxonomy,
) -> Result<(u64, Vec<(String, u64)>), ScoreError> {
    let params = taxonomy.module_parameters(module_id)?;
    let mut documented = 0u64;
    let mut missing = Vec::new();
    for param in params {
        let f = stats.frequency(&param.id).unwrap_or(0);
        if card.is_documented(&param.id) {
            documented += f;
        } else {
            missing.push((param.id.clone(), f));
        }
    }
    missing.sort_by(|a, b| (Reverse(a.1), &a.0).cmp(&(Reverse(b.1), &b.0)));
    Ok((documented, missing))
}

pub fn score_module(
    card: &CardDocument,
    module_id: &str,
    stats: &CorpusStats,
    taxonomy: &Taxonomy,
) -> Result<ModuleScore, ScoreError> {
    check_versions(card, stats, taxonomy)?;
    let baseline = module_baseline(stats, module_id)?.baseline;
    let (documented, missing) = split_module(card, module_id, stats, taxonomy)?;
    let n = stats.n_projects as f64;
    let cumulative_prior = documented as f64 / n;
    let (verdict, shortfall) = judge(cumulative_prior, baseline);
    Ok(ModuleScore {
        module_id: module_id.to_string(),
        cumulative_prior,
        baseline,
        verdict,
        shortfall,
        missing: missing
            .into_iter()
            .map(|(parameter_id, f)| MissingParameter {
                parameter_id,
                prior: f as f64 / n,
            })
            .collect(),
    })
}

/// Greedy plan: fill missing parameters in descending prior, ties by id.
///
/// Taking the highest priors first maximizes the mass added by any number of
/// fills, so the first prefix that reaches the baseline is the smallest set
/// of fills that can.
pub fn fill_first(
    card: &CardDocument,
    module_id: &str,
    stats: &CorpusStats,
    taxonomy: &Taxonomy,
) -> Result<FillPlan, ScoreError> {
    check_versions(card, stats, taxonomy)?;
    let baseline = module_baseline(stats, module_id)?.baseline;
    let (documented, missing) = split_module(card, module_id, stats, taxonomy)?;
    let n = stats.n_projects as f64;
    let starting_prior = documented as f64 / n;

    let mut reaches_baseline_at = (judge(starting_prior, baseline).0 != Verdict::Insufficient).then_some(0);
    let mut mass = documented;
    let mut steps = Vec::with_capacity(missing.len());
    for (idx, (parameter_id, f)) in missing.into_iter().enumerate() {
        mass += f;
        let cumulative_after = mass as f64 / n;
        if reaches_baseline_at.is_none() && meets_baseline(cumulative_after, baseline) {
            reaches_baseline_at = Some(idx + 1);
        }
        steps.push(FillStep {
            parameter_id,
            prior: f as f64 / n,
            cumulative_after,
        });
    }
    Ok(FillPlan {
        module_id: module_id.to_string(),
        baseline,
        starting_prior,
        steps,
        reaches_baseline_at,
    })
}

/// Scores every module in taxonomy order.
pub fn score_card(
    card: &CardDocument,
    stats: &CorpusStats,
    taxonomy: &Taxonomy,
) -> Result<Vec<ModuleScore>, ScoreError> {
    taxonomy
        .modules
        .iter()
        .map(|m| score_module(card, &m.id, stats, taxonomy))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::card::{CardParser, EntryStatus, FieldEntry};
    use crate::test_support::toy_taxonomy;

    fn stats_for(taxonomy: &Taxonomy, n: u64, freq: &[(&str, u64)]) -> CorpusStats {
        let freq: BTreeMap<String, u64> = freq.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        CorpusStats::from_counts(taxonomy, n, freq)
    }

    fn card_with(taxonomy: &Taxonomy, documented: &[&str]) -> CardDocument {
        let mut card = CardParser::new(taxonomy).parse("project_id = \"t\"\n").unwrap();
        for id in documented {
            card.entries.insert(
                id.to_string(),
                FieldEntry {
                    parameter_id: id.to_string(),
                    content: "documented content".into(),
                    evidence_links: vec![],
                    status: EntryStatus::Documented,
                },
            );
        }
        card
    }

    #[test]
    fn worked_example_baseline() {
        let b = baseline_from_shares(2.4, 0.18, 0.14);
        assert!((b - 0.384).abs() < 1e-12);
    }

    #[test]
    fn worked_example_verdicts() {
        let baseline = baseline_from_shares(2.4, 0.18, 0.14);
        let (verdict, shortfall) = judge(0.12 + 0.09 + 0.05, baseline);
        assert_eq!(verdict, Verdict::Insufficient);
        assert!((shortfall - 0.124).abs() < 1e-9);
        let (verdict, shortfall) = judge(0.12 + 0.09 + 0.05 + 0.08 + 0.06, baseline);
        assert_eq!(verdict, Verdict::Sufficient);
        assert_eq!(shortfall, 0.0);
    }

    #[test]
    fn equality_at_the_boundary_is_sufficient() {
        assert_eq!(judge(0.5, 0.5).0, Verdict::Sufficient);
        assert_eq!(judge(0.5 - 1e-10, 0.5).0, Verdict::Sufficient);
        assert_eq!(judge(0.5 - 1e-8, 0.5).0, Verdict::Insufficient);
        assert_eq!(judge(0.0, 0.0), (Verdict::VacuouslySufficient, 0.0));
    }

    #[test]
    fn rational_oracle_for_two_module_corpus() {
        // m0 = {a, b}, m1 = {c, d, e}; N = 7
        let tax = toy_taxonomy(&[&["a", "b"], &["c", "d", "e"]]);
        let stats = stats_for(
            &tax,
            7,
            &[("a", 5), ("b", 3), ("c", 1), ("d", 6), ("e", 2), ("pad2", 4)],
        );
        // O_All = 8 + 9 + 4 = 21, A_All = 2 + 3 + 6 = 11
        // m0: (8/21 + 2/11) * (8/7) / 2 = 520/1617
        // m1: (9/21 + 3/11) * (9/7) / 2 = 729/1617
        let b0 = module_baseline(&stats, "m0").unwrap();
        let b1 = module_baseline(&stats, "m1").unwrap();
        assert!((b0.baseline - 520.0 / 1617.0).abs() < 1e-12);
        assert!((b1.baseline - 729.0 / 1617.0).abs() < 1e-12);
        // m3 has no documented parameters
        let b3 = module_baseline(&stats, "m3").unwrap();
        assert_eq!(b3.baseline, 0.0);
        assert!(!b3.degenerate);
        assert!(matches!(
            module_baseline(&stats, "zz"),
            Err(ScoreError::UnknownModule(_))
        ));
    }

    #[test]
    fn degenerate_corpus_zeroes_every_baseline() {
        let tax = toy_taxonomy(&[&["a"]]);
        let stats = stats_for(&tax, 3, &[]);
        for m in tax.module_ids() {
            let b = module_baseline(&stats, m).unwrap();
            assert_eq!(b.baseline, 0.0);
            assert!(b.degenerate);
        }
    }

    #[test]
    fn score_and_plan_order_missing_by_prior_then_id() {
        let tax = toy_taxonomy(&[&["a", "b", "c", "d"]]);
        let stats = stats_for(&tax, 10, &[("a", 9), ("b", 4), ("c", 4), ("d", 6)]);
        let card = card_with(&tax, &["a"]);
        let score = score_module(&card, "m0", &stats, &tax).unwrap();
        assert_eq!(score.cumulative_prior, 0.9);
        let order: Vec<_> = score.missing.iter().map(|m| m.parameter_id.as_str()).collect();
        assert_eq!(order, ["d", "b", "c"]);
        let plan = fill_first(&card, "m0", &stats, &tax).unwrap();
        let order: Vec<_> = plan.steps.iter().map(|s| s.parameter_id.as_str()).collect();
        assert_eq!(order, ["d", "b", "c"]);
        assert!(plan
            .steps
            .windows(2)
            .all(|w| w[0].cumulative_after <= w[1].cumulative_after));
        assert_eq!(plan.steps.last().unwrap().cumulative_after, 2.3);
    }

    #[test]
    fn empty_card_is_insufficient_wherever_baseline_is_positive() {
        let tax = toy_taxonomy(&[&["a", "b"], &["c"]]);
        let stats = stats_for(&tax, 4, &[("a", 2), ("b", 1)]);
        let scores = score_card(&card_with(&tax, &[]), &stats, &tax).unwrap();
        assert_eq!(scores.len(), 8);
        for s in &scores {
            assert_eq!(s.cumulative_prior, 0.0);
            if s.baseline > 0.0 {
                assert_eq!(s.verdict, Verdict::Insufficient);
                assert_eq!(s.shortfall, s.baseline);
            } else {
                assert_eq!(s.verdict, Verdict::VacuouslySufficient);
            }
        }
    }

    #[test]
    fn already_met_plan_starts_at_zero() {
        let tax = toy_taxonomy(&[&["a", "b"]]);
        let stats = stats_for(&tax, 4, &[("a", 4), ("b", 1)]);
        let plan = fill_first(&card_with(&tax, &["a"]), "m0", &stats, &tax).unwrap();
        assert_eq!(plan.reaches_baseline_at, Some(0));
    }

    #[test]
    fn version_mismatch_is_reported() {
        let tax = toy_taxonomy(&[&["a"]]);
        let mut stats = stats_for(&tax, 1, &[("a", 1)]);
        let card = card_with(&tax, &[]);
        stats.taxonomy_version = "9.9.9".into();
        assert!(matches!(
            score_module(&card, "m0", &stats, &tax),
            Err(ScoreError::VersionMismatch { what: "stats", .. })
        ));
        let stats = stats_for(&tax, 1, &[("a", 1)]);
        let mut card = card;
        card.taxonomy_version = "0.0.1".into();
        assert!(matches!(
            score_card(&card, &stats, &tax),
            Err(ScoreError::VersionMismatch { what: "card", .. })
        ));
    }
}
