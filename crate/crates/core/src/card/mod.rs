//! Model cards resolved against a taxonomy.
//!
//! Two input formats are accepted:
//!
//! * the canonical TOML format, with module-scoped tables of fields (see
//!   [`canonical`]), and
//! * a narrative Markdown format whose `## ` headings name modules and whose
//!   `**field**: value` lines name parameters (see [`narrative`]).
//!
//! A document is treated as narrative when any line begins with `## `;
//! otherwise it is parsed as canonical TOML.

pub mod canonical;
mod evidence;
pub mod narrative;
mod template;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::location::{suffix, Location};
use crate::taxonomy::{Resolution, Taxonomy};

pub use evidence::{EvidenceError, EvidenceKind, EvidenceLink, MIN_HASH_LEN};
pub use template::emit_template;

/// Placeholder tokens recognized when no custom list is supplied.
pub const DEFAULT_PLACEHOLDER_TOKENS: [&str; 9] = ["", "tbd", "todo", "n/a", "na", "tba", "-", "?", "coming soon"];

/// Content shorter than this many non-whitespace characters is a placeholder.
pub const DEFAULT_MIN_CHARS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryStatus {
    Documented,
    Placeholder,
    Absent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldEntry {
    pub parameter_id: String,
    pub content: String,
    pub evidence_links: Vec<EvidenceLink>,
    pub status: EntryStatus,
}

/// One project's documentation, keyed by canonical parameter id.
///
/// Only parameters that appeared in the source have entries; everything else
/// is [`EntryStatus::Absent`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardDocument {
    pub project_id: String,
    pub task_family: Option<String>,
    pub card_version: Option<String>,
    /// Version of the taxonomy the card was resolved against.
    pub taxonomy_version: String,
    pub entries: BTreeMap<String, FieldEntry>,
    pub unknown_fields: Vec<String>,
    pub warnings: Vec<String>,
}

impl CardDocument {
    pub fn status(&self, parameter_id: &str) -> EntryStatus {
        self.entries.get(parameter_id).map_or(EntryStatus::Absent, |e| e.status)
    }

    pub fn is_documented(&self, parameter_id: &str) -> bool {
        self.status(parameter_id) == EntryStatus::Documented
    }

    pub fn documented_set(&self) -> BTreeSet<String> {
        self.entries
            .values()
            .filter(|e| e.status == EntryStatus::Documented)
            .map(|e| e.parameter_id.clone())
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CardError {
    #[error("card parse error{}: {message}", suffix(.location))]
    Parse {
        message: String,
        location: Option<Location>,
    },
    #[error("card document is empty")]
    EmptyDocument,
}

impl CardError {
    pub(crate) fn at(message: impl Into<String>, location: Option<Location>) -> Self {
        CardError::Parse {
            message: message.into(),
            location,
        }
    }
}

/// Rules deciding whether present content counts as documented.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceholderPolicy {
    tokens: BTreeSet<String>,
    min_chars: usize,
}

impl Default for PlaceholderPolicy {
    fn default() -> Self {
        Self::new(DEFAULT_PLACEHOLDER_TOKENS, DEFAULT_MIN_CHARS)
    }
}

impl PlaceholderPolicy {
    pub fn new<I, S>(tokens: I, min_chars: usize) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        PlaceholderPolicy {
            tokens: tokens.into_iter().map(|t| t.as_ref().trim().to_lowercase()).collect(),
            min_chars,
        }
    }

    /// Reads one token per line; blank lines and `#` comments are skipped.
    pub fn from_token_list(source: &str) -> Self {
        let tokens = source
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        Self::new(tokens, DEFAULT_MIN_CHARS)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    pub fn is_placeholder_text(&self, content: &str) -> bool {
        let trimmed = content.trim();
        trimmed.is_empty()
            || self.tokens.contains(&trimmed.to_lowercase())
            || trimmed.chars().filter(|c| !c.is_whitespace()).count() < self.min_chars
    }

    /// Status of a field that is present in the source.
    ///
    /// Any evidence link makes the field documented regardless of its text.
    pub fn classify(&self, content: &str, evidence_links: &[EvidenceLink]) -> EntryStatus {
        if !evidence_links.is_empty() || !self.is_placeholder_text(content) {
            EntryStatus::Documented
        } else {
            EntryStatus::Placeholder
        }
    }
}

/// [`PlaceholderPolicy::classify`] under the default policy.
pub fn classify_entry(content: &str, evidence_links: &[EvidenceLink]) -> EntryStatus {
    PlaceholderPolicy::default().classify(content, evidence_links)
}

/// Parses a card in either supported format.
pub fn parse_card(source: &str, taxonomy: &Taxonomy) -> Result<CardDocument, CardError> {
    CardParser::new(taxonomy).parse(source)
}

/// Card parser bound to a taxonomy and placeholder policy.
pub struct CardParser<'a> {
    taxonomy: &'a Taxonomy,
    policy: PlaceholderPolicy,
}

impl<'a> CardParser<'a> {
    pub fn new(taxonomy: &'a Taxonomy) -> Self {
        CardParser {
            taxonomy,
            policy: PlaceholderPolicy::default(),
        }
    }

    pub fn with_policy(mut self, policy: PlaceholderPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn parse(&self, source: &str) -> Result<CardDocument, CardError> {
        let has_content = source
            .lines()
            .map(str::trim)
            .any(|l| !l.is_empty() && (!l.starts_with('#') || l.starts_with("## ")));
        if !has_content {
            return Err(CardError::EmptyDocument);
        }
        let mut builder = CardBuilder::new(self.taxonomy, &self.policy);
        if is_narrative(source) {
            narrative::parse_into(source, &mut builder)?;
        } else {
            canonical::parse_into(source, &mut builder)?;
        }
        Ok(builder.finish())
    }
}

fn is_narrative(source: &str) -> bool {
    source.lines().any(|l| l.starts_with("## "))
}

/// Accumulates resolved fields while a parser walks a document.
pub(crate) struct CardBuilder<'a> {
    taxonomy: &'a Taxonomy,
    policy: &'a PlaceholderPolicy,
    doc: CardDocument,
}

impl<'a> CardBuilder<'a> {
    fn new(taxonomy: &'a Taxonomy, policy: &'a PlaceholderPolicy) -> Self {
        CardBuilder {
            taxonomy,
            policy,
            doc: CardDocument {
                project_id: String::new(),
                task_family: None,
                card_version: None,
                taxonomy_version: taxonomy.version.clone(),
                entries: BTreeMap::new(),
                unknown_fields: Vec::new(),
                warnings: Vec::new(),
            },
        }
    }

    pub(crate) fn taxonomy(&self) -> &Taxonomy {
        self.taxonomy
    }

    pub(crate) fn set_reserved(&mut self, key: &str, value: String) {
        let value = value.trim().to_string();
        match key {
            "project_id" => self.doc.project_id = value,
            "task_family" => self.doc.task_family = (!value.is_empty()).then_some(value),
            "card_version" => self.doc.card_version = (!value.is_empty()).then_some(value),
            _ => unreachable!("not a reserved key: {key}"),
        }
    }

    /// Resolves `raw_name` and records its content under every target.
    pub(crate) fn add_field(
        &mut self,
        module_id: &str,
        raw_name: &str,
        content: String,
        evidence_links: Vec<EvidenceLink>,
    ) {
        let targets = match self.taxonomy.resolve_field(raw_name) {
            Resolution::Atomic(id) => vec![id],
            Resolution::Compound(ids) => ids,
            Resolution::Irrelevant => return,
            Resolution::Unknown => {
                self.doc.unknown_fields.push(raw_name.to_string());
                return;
            }
        };
        let status = self.policy.classify(&content, &evidence_links);
        for id in targets {
            let owner = &self.taxonomy.parameter(&id).expect("resolved ids exist").module_id;
            if owner != module_id {
                self.doc.warnings.push(format!(
                    "field `{raw_name}` belongs to module `{owner}` but appears under `{module_id}`"
                ));
            }
            let entry = FieldEntry {
                parameter_id: id.clone(),
                content: content.clone(),
                evidence_links: evidence_links.clone(),
                status,
            };
            if self.doc.entries.insert(id.clone(), entry).is_some() {
                self.doc.warnings.push(format!(
                    "parameter `{id}` given more than once; last occurrence (`{raw_name}`) wins"
                ));
            }
        }
    }

    fn finish(self) -> CardDocument {
        self.doc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link(s: &str) -> EvidenceLink {
        s.parse().unwrap()
    }

    #[test]
    fn placeholder_tokens_and_short_text() {
        for text in [
            "TODO",
            "tbd",
            " N/A ",
            "na",
            "TBA",
            "-",
            "?",
            "Coming Soon",
            "",
            "  ",
            "ok",
        ] {
            assert_eq!(classify_entry(text, &[]), EntryStatus::Placeholder, "{text:?}");
        }
        assert_eq!(
            classify_entry("Trained on 1.2T tokens of filtered web text.", &[]),
            EntryStatus::Documented
        );
        assert_eq!(classify_entry("MIT", &[]), EntryStatus::Documented);
    }

    #[test]
    fn evidence_overrides_placeholder_text() {
        assert_eq!(classify_entry("", &[link("hash:9f2a1c4")]), EntryStatus::Documented);
        assert_eq!(
            classify_entry("TODO", &[link("url:https://example.org")]),
            EntryStatus::Documented
        );
    }

    #[test]
    fn custom_token_list_replaces_defaults() {
        let policy = PlaceholderPolicy::from_token_list("# site tokens\nwip\n\nLorem ipsum\n");
        assert_eq!(policy.classify("WIP", &[]), EntryStatus::Placeholder);
        assert_eq!(policy.classify("lorem ipsum", &[]), EntryStatus::Placeholder);
        assert_eq!(policy.classify("todo", &[]), EntryStatus::Documented);
        assert_eq!(policy.classify("ab", &[]), EntryStatus::Placeholder);
    }

    #[test]
    fn format_detection() {
        assert!(is_narrative("# Title\n\n## Data\n**datasets**: C4\n"));
        assert!(!is_narrative("# comment\n[data]\ndatasets = \"C4\"\n"));
    }

    #[test]
    fn blank_or_comment_only_documents_are_empty() {
        let tax = Taxonomy::default_taxonomy();
        assert_eq!(parse_card("", &tax), Err(CardError::EmptyDocument));
        assert_eq!(
            parse_card("  \n# only a comment\n", &tax),
            Err(CardError::EmptyDocument)
        );
    }
}
