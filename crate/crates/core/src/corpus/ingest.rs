//! Loading a corpus of cards from disk.
//!
//! A corpus is either a directory, searched recursively for `*.toml`, `*.md`
//! and `*.markdown` cards, or a manifest file listing one card per line:
//!
//! ```text
//! # path[,task_family]
//! cards/acme.toml,chatbot
//! cards/orca.md
//! ```
//!
//! Manifest paths are relative to the manifest's directory. A task family in
//! the manifest overrides the one declared in the card. Cards without a
//! `project_id` are named after their file stem.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::CorpusError;
use crate::card::{CardDocument, CardParser};

const CARD_EXTENSIONS: [&str; 3] = ["toml", "md", "markdown"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry {
    pub path: PathBuf,
    pub task_family: Option<String>,
}

#[derive(Debug, Clone)]
pub struct IngestedCard {
    pub entry: CorpusEntry,
    pub card: CardDocument,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Lists the cards of a corpus directory or manifest, in sorted order.
pub fn discover(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let meta = fs::metadata(path).map_err(io_err(path))?;
    if meta.is_dir() {
        let mut files = Vec::new();
        collect_cards(path, &mut files)?;
        files.sort();
        Ok(files
            .into_iter()
            .map(|path| CorpusEntry {
                path,
                task_family: None,
            })
            .collect())
    } else {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        parse_manifest(&text, base)
    }
}

fn collect_cards(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), CorpusError> {
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let path = entry.path();
        let file_type = entry.file_type().map_err(io_err(&path))?;
        if file_type.is_dir() {
            collect_cards(&path, out)?;
        } else if path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| CARD_EXTENSIONS.contains(&e))
        {
            out.push(path);
        }
    }
    Ok(())
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (path, task) = match line.split_once(',') {
            Some((p, t)) => (p.trim(), Some(t.trim())),
            None => (line, None),
        };
        if path.is_empty() {
            return Err(CorpusError::Manifest {
                line: idx + 1,
                message: "missing path".into(),
            });
        }
        entries.push(CorpusEntry {
            path: base.join(path),
            task_family: task.filter(|t| !t.is_empty()).map(str::to_string),
        });
    }
    Ok(entries)
}

/// Reads and parses every card concurrently; output keeps input order.
pub fn ingest(entries: &[CorpusEntry], parser: &CardParser<'_>) -> Result<Vec<IngestedCard>, CorpusError> {
    entries
        .par_iter()
        .map(|entry| {
            let text = fs::read_to_string(&entry.path).map_err(io_err(&entry.path))?;
            let mut card = parser.parse(&text).map_err(|source| CorpusError::Card {
                path: entry.path.display().to_string(),
                source,
            })?;
            if card.project_id.is_empty() {
                card.project_id = entry
                    .path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
            }
            if entry.task_family.is_some() {
                card.task_family = entry.task_family.clone();
            }
            Ok(IngestedCard {
                entry: entry.clone(),
                card,
            })
        })
        .collect()
}
