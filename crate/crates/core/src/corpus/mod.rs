//! Corpus frequencies, parameter priors and module aggregates.
//!
//! A parameter's prior is the share of corpus projects that document it.
//! Counts are kept as integers; every ratio is derived on demand so that
//! persisted statistics are exact.

mod ingest;
mod stats_file;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::card::{CardDocument, CardError};
use crate::location::{suffix, Location};
use crate::taxonomy::Taxonomy;

pub use ingest::{discover, ingest, parse_manifest, CorpusEntry, IngestedCard};
pub use stats_file::{load_stats, save_stats, STATS_SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus contains no projects")]
    EmptyCorpus,
    #[error("project `{0}` appears more than once")]
    DuplicateProject(String),
    #[error("project `{project}` references unknown parameter `{parameter}`")]
    UnknownParameter { project: String, parameter: String },
    #[error("stats schema error{}: {message}", suffix(.location))]
    Schema {
        message: String,
        location: Option<Location>,
    },
    #[error("stats were built against taxonomy {found}, but taxonomy {expected} is loaded")]
    VersionMismatch { expected: String, found: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Card {
        path: String,
        #[source]
        source: CardError,
    },
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

/// One project's contribution to corpus statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub project_id: String,
    pub task_family: Option<String>,
    pub documented: BTreeSet<String>,
}

impl CorpusRecord {
    pub fn from_card(card: &CardDocument) -> Self {
        CorpusRecord {
            project_id: card.project_id.clone(),
            task_family: card.task_family.clone(),
            documented: card.documented_set(),
        }
    }
}

/// Per-module totals: observed occurrences, capacity and attainable prior.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleAggregate {
    pub module_id: String,
    /// Sum of parameter frequencies in the module.
    pub observed: u64,
    /// Number of parameters in the module.
    pub capacity: usize,
    /// Sum of parameter priors in the module, `observed / n_projects`.
    pub s_total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    pub taxonomy_version: String,
    pub n_projects: u64,
    /// Projects documenting each parameter, for every taxonomy leaf.
    pub freq: BTreeMap<String, u64>,
    pub modules: Vec<ModuleAggregate>,
    pub observed_all: u64,
    pub capacity_all: usize,
}

impl CorpusStats {
    /// Assembles stats from raw counts, deriving every aggregate.
    ///
    /// `freq` may omit parameters; they count as zero.
    pub(crate) fn from_counts(taxonomy: &Taxonomy, n_projects: u64, mut freq: BTreeMap<String, u64>) -> Self {
        let mut modules = Vec::with_capacity(taxonomy.modules.len());
        for module in &taxonomy.modules {
            let params = taxonomy.module_parameters(&module.id).expect("module from taxonomy");
            let observed: u64 = params.iter().map(|p| *freq.entry(p.id.clone()).or_insert(0)).sum();
            modules.push(ModuleAggregate {
                module_id: module.id.clone(),
                observed,
                capacity: params.len(),
                s_total: observed as f64 / n_projects as f64,
            });
        }
        CorpusStats {
            taxonomy_version: taxonomy.version.clone(),
            n_projects,
            observed_all: modules.iter().map(|m| m.observed).sum(),
            capacity_all: modules.iter().map(|m| m.capacity).sum(),
            freq,
            modules,
        }
    }

    pub fn frequency(&self, parameter_id: &str) -> Option<u64> {
        self.freq.get(parameter_id).copied()
    }

    pub fn module(&self, module_id: &str) -> Option<&ModuleAggregate> {
        self.modules.iter().find(|m| m.module_id == module_id)
    }

    /// `O_M / O_All`; zero when nothing in the corpus is documented.
    pub fn observed_share(&self, module: &ModuleAggregate) -> f64 {
        if self.observed_all == 0 {
            0.0
        } else {
            module.observed as f64 / self.observed_all as f64
        }
    }

    /// `A_M / A_All`.
    pub fn capacity_share(&self, module: &ModuleAggregate) -> f64 {
        module.capacity as f64 / self.capacity_all as f64
    }

    /// True when no project documents any parameter.
    pub fn is_degenerate(&self) -> bool {
        self.observed_all == 0
    }

    /// Content hash over version and counts, independent of timestamps.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.taxonomy_version.as_bytes());
        hasher.update([0]);
        hasher.update(self.n_projects.to_le_bytes());
        for (id, count) in &self.freq {
            hasher.update(id.as_bytes());
            hasher.update([0]);
            hasher.update(count.to_le_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

/// Counts, per parameter, how many records document it.
pub fn compute_stats(records: &[CorpusRecord], taxonomy: &Taxonomy) -> Result<CorpusStats, CorpusError> {
    if records.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut seen = HashSet::with_capacity(records.len());
    let mut freq: BTreeMap<String, u64> = taxonomy.parameters().iter().map(|p| (p.id.clone(), 0)).collect();
    for record in records {
        if !seen.insert(record.project_id.as_str()) {
            return Err(CorpusError::DuplicateProject(record.project_id.clone()));
        }
        for id in &record.documented {
            let count = freq.get_mut(id).ok_or_else(|| CorpusError::UnknownParameter {
                project: record.project_id.clone(),
                parameter: id.clone(),
            })?;
            *count += 1;
        }
    }
    Ok(CorpusStats::from_counts(taxonomy, records.len() as u64, freq))
}

/// `f_i / N` for one parameter.
pub fn parameter_prior(stats: &CorpusStats, parameter_id: &str) -> Result<f64, CorpusError> {
    let f = stats
        .frequency(parameter_id)
        .ok_or_else(|| CorpusError::UnknownParameter {
            project: String::new(),
            parameter: parameter_id.to_string(),
        })?;
    Ok(f as f64 / stats.n_projects as f64)
}
