//! Task-family by module coverage.
//!
//! For a task family `t` and module `M`, coverage is the fraction of `M`'s
//! parameters documented by at least one of the family's projects:
//! `|P_t ∩ P_M| / |P_M|`, with `P_t` the union of the projects' documented
//! sets. A per-project mean of the same ratio is kept alongside.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::CorpusRecord;
use crate::taxonomy::{Taxonomy, TaxonomyError};

/// Row label for records without a task family.
pub const UNLABELED_TASK: &str = "unlabeled";

pub const MATRIX_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagnosticsError {
    #[error("module `{0}` has no parameters")]
    EmptyModule(String),
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageMatrix {
    pub schema_version: u32,
    pub task_families: Vec<String>,
    pub modules: Vec<String>,
    /// Union coverage, one row per task family.
    pub values: Vec<Vec<f64>>,
    /// Mean of per-project coverage.
    pub mean_values: Vec<Vec<f64>>,
    /// Projects in the family that document at least one parameter of the module.
    pub support: Vec<Vec<usize>>,
    /// Projects per task family.
    pub projects: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Union,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

fn module_set<'t>(taxonomy: &'t Taxonomy, module_id: &str) -> Result<BTreeSet<&'t str>, DiagnosticsError> {
    let params = taxonomy.module_parameters(module_id)?;
    if params.is_empty() {
        return Err(DiagnosticsError::EmptyModule(module_id.to_string()));
    }
    Ok(params.iter().map(|p| p.id.as_str()).collect())
}

/// Union coverage of one module by a group of records.
pub fn coverage_cell<'r, I>(records: I, module_id: &str, taxonomy: &Taxonomy) -> Result<f64, DiagnosticsError>
where
    I: IntoIterator<Item = &'r CorpusRecord>,
{
    let module = module_set(taxonomy, module_id)?;
    let covered: BTreeSet<&str> = records
        .into_iter()
        .flat_map(|r| r.documented.iter())
        .map(String::as_str)
        .filter(|id| module.contains(id))
        .collect();
    Ok(covered.len() as f64 / module.len() as f64)
}

pub fn coverage_matrix(records: &[CorpusRecord], taxonomy: &Taxonomy) -> Result<CoverageMatrix, DiagnosticsError> {
    let mut by_task: BTreeMap<&str, Vec<&CorpusRecord>> = BTreeMap::new();
    for record in records {
        let task = record.task_family.as_deref().unwrap_or(UNLABELED_TASK);
        by_task.entry(task).or_default().push(record);
    }

    let module_sets = taxonomy
        .modules
        .iter()
        .map(|m| module_set(taxonomy, &m.id))
        .collect::<Result<Vec<_>, _>>()?;

    let mut matrix = CoverageMatrix {
        schema_version: MATRIX_SCHEMA_VERSION,
        task_families: Vec::with_capacity(by_task.len()),
        modules: taxonomy.modules.iter().map(|m| m.id.clone()).collect(),
        values: Vec::with_capacity(by_task.len()),
        mean_values: Vec::with_capacity(by_task.len()),
        support: Vec::with_capacity(by_task.len()),
        projects: Vec::with_capacity(by_task.len()),
    };
    for (task, group) in by_task {
        let mut values = Vec::with_capacity(module_sets.len());
        let mut means = Vec::with_capacity(module_sets.len());
        let mut support = Vec::with_capacity(module_sets.len());
        for (module, set) in matrix.modules.iter().zip(&module_sets) {
            values.push(coverage_cell(group.iter().copied(), module, taxonomy)?);
            let per_project: Vec<usize> = group
                .iter()
                .map(|r| r.documented.iter().filter(|id| set.contains(id.as_str())).count())
                .collect();
            // One division over the integer total keeps the mean independent of record order.
            let documented: usize = per_project.iter().sum();
            means.push(documented as f64 / (set.len() * group.len()) as f64);
            support.push(per_project.iter().filter(|&&c| c > 0).count());
        }
        matrix.task_families.push(task.to_string());
        matrix.values.push(values);
        matrix.mean_values.push(means);
        matrix.support.push(support);
        matrix.projects.push(group.len());
    }
    Ok(matrix)
}

/// CSV with header `task,<module ids…>` and ratios to four decimals.
pub fn export_csv(matrix: &CoverageMatrix, aggregate: Aggregate) -> String {
    let grid = match aggregate {
        Aggregate::Union => &matrix.values,
        Aggregate::Mean => &matrix.mean_values,
    };
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let header = std::iter::once("task").chain(matrix.modules.iter().map(String::as_str));
    writer.write_record(header).expect("write to memory");
    for (task, row) in matrix.task_families.iter().zip(grid) {
        let mut record = vec![task.clone()];
        record.extend(row.iter().map(|v| format!("{v:.4}")));
        writer.write_record(&record).expect("write to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn export_json(matrix: &CoverageMatrix) -> String {
    let mut text = serde_json::to_string_pretty(matrix).expect("matrix serialize");
    text.push('\n');
    text
}

pub fn export_matrix(matrix: &CoverageMatrix, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Csv => export_csv(matrix, Aggregate::Union),
        MatrixFormat::Json => export_json(matrix),
    }
}

/// Modules whose coverage is below `threshold` for a row, lowest first.
pub fn gap_report(matrix: &CoverageMatrix, threshold: f64) -> String {
    let mut out = String::new();
    for (task, row) in matrix.task_families.iter().zip(&matrix.values) {
        let mut gaps: Vec<(&String, f64)> = matrix
            .modules
            .iter()
            .zip(row.iter().copied())
            .filter(|(_, v)| *v < threshold)
            .collect();
        gaps.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        if gaps.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{task}:");
        for (module, value) in gaps {
            let _ = writeln!(out, "  {module:<26}{value:.4}");
        }
    }
    out
}
