//! Builders for randomized taxonomies, corpora and cards.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;

use cardgauge_core::{CorpusRecord, Taxonomy};

pub const MODULES: usize = 8;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn leaf_id(module: usize, leaf: usize) -> String {
    format!("m{module}_p{leaf:02}")
}

/// Eight modules `m0..m7`; module `i` gets `leaves[i]` flat leaves.
pub fn taxonomy_source(leaves: &[usize]) -> String {
    assert_eq!(leaves.len(), MODULES);
    let mut out = String::from("version = \"1.0.0\"\n");
    for (m, &count) in leaves.iter().enumerate() {
        let _ = write!(out, "\n[[modules]]\nid = \"m{m}\"\nname = \"Module {m}\"\n");
        for p in 0..count {
            let _ = write!(
                out,
                "\n[[modules.children]]\nid = \"{}\"\nname = \"Parameter {m}.{p}\"\n",
                leaf_id(m, p)
            );
        }
    }
    out
}

pub fn taxonomy(leaves: &[usize]) -> Taxonomy {
    Taxonomy::load(&taxonomy_source(leaves)).expect("generated taxonomy is valid")
}

/// All leaf ids of a generated taxonomy, in taxonomy order.
pub fn all_leaves(leaves: &[usize]) -> Vec<String> {
    leaves
        .iter()
        .enumerate()
        .flat_map(|(m, &count)| (0..count).map(move |p| leaf_id(m, p)))
        .collect()
}

/// Records documenting the flagged leaves; `mask[i][j]` covers leaf `j` of the flattened list.
pub fn records(leaves: &[usize], masks: &[Vec<bool>], tasks: Option<&[usize]>) -> Vec<CorpusRecord> {
    let ids = all_leaves(leaves);
    masks
        .iter()
        .enumerate()
        .map(|(i, mask)| CorpusRecord {
            project_id: format!("project-{i}"),
            task_family: tasks.map(|t| format!("task-{}", t[i])),
            documented: ids
                .iter()
                .zip(mask)
                .filter(|(_, &on)| on)
                .map(|(id, _)| id.clone())
                .collect::<BTreeSet<_>>(),
        })
        .collect()
}

/// Stats file text with the given per-leaf counts.
pub fn stats_json(version: &str, n_projects: u64, freq: &[(String, u64)]) -> String {
    let freq: serde_json::Map<String, serde_json::Value> = freq
        .iter()
        .map(|(id, f)| (id.clone(), serde_json::Value::from(*f)))
        .collect();
    serde_json::json!({
        "schema_version": 1,
        "taxonomy_version": version,
        "generated_at": "2024-01-01T00:00:00Z",
        "n_projects": n_projects,
        "freq": freq,
    })
    .to_string()
}

/// Canonical card documenting exactly the listed parameters.
pub fn card_source(project_id: &str, documented: &[String]) -> String {
    let mut by_module: Vec<Vec<&str>> = vec![Vec::new(); MODULES];
    for id in documented {
        let module: usize = id[1..id.find('_').unwrap()].parse().unwrap();
        by_module[module].push(id);
    }
    let mut out = format!("project_id = \"{project_id}\"\n");
    for (m, ids) in by_module.iter().enumerate() {
        if ids.is_empty() {
            continue;
        }
        let _ = writeln!(out, "\n[m{m}]");
        for id in ids {
            let _ = writeln!(out, "{id} = \"Documented with substantive detail.\"");
        }
    }
    out
}
