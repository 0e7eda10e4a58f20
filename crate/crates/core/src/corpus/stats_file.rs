//! JSON persistence for [`CorpusStats`].
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "taxonomy_version": "0.1.0",
//!   "generated_at": "2025-07-12T00:00:00Z",
//!   "n_projects": 240,
//!   "freq": { "model_name": 231, "license": 198 }
//! }
//! ```
//!
//! `freq` is written for every parameter in taxonomy order; on load, missing
//! parameters count as zero. Counts are integers.

use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::{CorpusError, CorpusStats};
use crate::location::Location;
use crate::taxonomy::Taxonomy;

pub const STATS_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct StatsOut<'a> {
    schema_version: u32,
    taxonomy_version: &'a str,
    generated_at: String,
    n_projects: u64,
    freq: serde_json::Map<String, serde_json::Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StatsIn {
    schema_version: u32,
    taxonomy_version: String,
    #[allow(dead_code)]
    generated_at: Option<String>,
    n_projects: u64,
    freq: BTreeMap<String, u64>,
}

/// Serializes stats; parameters are listed in taxonomy order.
pub fn save_stats(stats: &CorpusStats, taxonomy: &Taxonomy, generated_at: DateTime<Utc>) -> String {
    let mut freq = serde_json::Map::new();
    for param in taxonomy.parameters() {
        if let Some(count) = stats.frequency(&param.id) {
            freq.insert(param.id.clone(), count.into());
        }
    }
    // anything not in the taxonomy (should not happen) keeps sorted order
    for (id, count) in &stats.freq {
        if !freq.contains_key(id) {
            freq.insert(id.clone(), (*count).into());
        }
    }
    let out = StatsOut {
        schema_version: STATS_SCHEMA_VERSION,
        taxonomy_version: &stats.taxonomy_version,
        generated_at: generated_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        n_projects: stats.n_projects,
        freq,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("stats serialize");
    text.push('\n');
    text
}

pub fn load_stats(source: &str, taxonomy: &Taxonomy) -> Result<CorpusStats, CorpusError> {
    let raw: StatsIn = serde_json::from_str(source).map_err(|e| CorpusError::Schema {
        message: e.to_string(),
        location: (e.line() > 0).then_some(Location {
            line: e.line(),
            column: e.column(),
        }),
    })?;
    let schema = |message: String| CorpusError::Schema {
        message,
        location: None,
    };
    if raw.schema_version != STATS_SCHEMA_VERSION {
        return Err(schema(format!(
            "unsupported schema_version {} (expected {STATS_SCHEMA_VERSION})",
            raw.schema_version
        )));
    }
    if raw.taxonomy_version != taxonomy.version {
        return Err(CorpusError::VersionMismatch {
            expected: taxonomy.version.clone(),
            found: raw.taxonomy_version,
        });
    }
    if raw.n_projects == 0 {
        return Err(schema("n_projects must be positive".into()));
    }
    for (id, &count) in &raw.freq {
        if !taxonomy.contains_parameter(id) {
            return Err(schema(format!("freq lists unknown parameter `{id}`")));
        }
        if count > raw.n_projects {
            return Err(schema(format!(
                "freq[{id}] = {count} exceeds n_projects = {}",
                raw.n_projects
            )));
        }
    }
    Ok(CorpusStats::from_counts(taxonomy, raw.n_projects, raw.freq))
}
