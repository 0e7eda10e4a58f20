//! Narrative Markdown card format.
//!
//! ```markdown
//! # Acme Chat 7B
//!
//! **project_id**: acme-chat-7b
//! **task_family**: chatbot
//!
//! ## Model Details
//!
//! **model_title**: Acme Chat 7B
//! **license**: Apache-2.0
//! - evidence: url:https://example.org/LICENSE
//!
//! ## Performance & Limitations
//!
//! ### Evaluation
//! **benchmark_results**: MMLU 61.2 (5-shot).
//! Further lines up to the next field or heading are appended.
//! ```
//!
//! Rules:
//! * `## ` headings select a module by id or display name.
//! * `### ` and deeper headings are ignored.
//! * `**name**: value` starts a field, optionally prefixed by `- `. Before the
//!   first module heading only `project_id`, `task_family` and `card_version`
//!   are allowed.
//! * `- evidence: kind:value` lines attach evidence to the current field.
//! * Other non-blank lines continue the current field; prose before the first
//!   field of a section is ignored. Fenced code blocks are kept verbatim.

use super::{CardBuilder, CardError, EvidenceLink};
use crate::location::Location;
use crate::taxonomy::{fold_name, RESERVED_CARD_KEYS};

struct OpenField {
    module_id: String,
    name: String,
    lines: Vec<String>,
    evidence: Vec<EvidenceLink>,
}

pub(crate) fn parse_into(source: &str, builder: &mut CardBuilder<'_>) -> Result<(), CardError> {
    let mut module: Option<String> = None;
    let mut field: Option<OpenField> = None;
    let mut in_fence = false;

    let flush = |field: &mut Option<OpenField>, builder: &mut CardBuilder<'_>| {
        if let Some(f) = field.take() {
            let content = f.lines.join("\n").trim().to_string();
            builder.add_field(&f.module_id, &f.name, content, f.evidence);
        }
    };

    for (idx, raw_line) in source.lines().enumerate() {
        let at = || {
            Some(Location {
                line: idx + 1,
                column: 1,
            })
        };
        let line = raw_line.trim_end();

        if line.trim_start().starts_with("```") {
            in_fence = !in_fence;
            if let Some(f) = field.as_mut() {
                f.lines.push(line.to_string());
            }
            continue;
        }
        if in_fence {
            if let Some(f) = field.as_mut() {
                f.lines.push(line.to_string());
            }
            continue;
        }

        if let Some(heading) = line.strip_prefix("## ") {
            flush(&mut field, builder);
            let found = builder
                .taxonomy()
                .find_module(heading.trim())
                .ok_or_else(|| CardError::at(format!("heading `{}` does not name a module", heading.trim()), at()))?;
            module = Some(found.id.clone());
            continue;
        }
        if line.starts_with('#') {
            // title or sub-heading
            flush(&mut field, builder);
            continue;
        }

        let trimmed = line.trim();
        if let Some(spec) = evidence_line(trimmed) {
            let Some(f) = field.as_mut() else {
                return Err(CardError::at("evidence line outside a field", at()));
            };
            let link = spec
                .parse::<EvidenceLink>()
                .map_err(|e| CardError::at(e.to_string(), at()))?;
            f.evidence.push(link);
            continue;
        }
        if let Some((name, value)) = field_line(trimmed) {
            flush(&mut field, builder);
            let folded = fold_name(name);
            if let Some(key) = RESERVED_CARD_KEYS.iter().find(|k| **k == folded) {
                builder.set_reserved(key, value.to_string());
                continue;
            }
            let Some(module_id) = module.clone() else {
                return Err(CardError::at(
                    format!("field `{name}` appears before any module heading"),
                    at(),
                ));
            };
            field = Some(OpenField {
                module_id,
                name: name.to_string(),
                lines: vec![value.to_string()],
                evidence: Vec::new(),
            });
            continue;
        }
        if trimmed.is_empty() || is_html_comment(trimmed) {
            continue;
        }
        if let Some(f) = field.as_mut() {
            f.lines.push(trimmed.to_string());
        }
    }
    if in_fence {
        return Err(CardError::at(
            "unterminated code fence",
            Some(Location {
                line: source.lines().count(),
                column: 1,
            }),
        ));
    }
    flush(&mut field, builder);
    Ok(())
}

fn field_line(line: &str) -> Option<(&str, &str)> {
    let line = line.strip_prefix("- ").unwrap_or(line);
    let rest = line.strip_prefix("**")?;
    let (name, after) = rest.split_once("**")?;
    let value = after.trim_start().strip_prefix(':')?;
    if name.trim().is_empty() {
        return None;
    }
    Some((name.trim(), value.trim()))
}

fn evidence_line(line: &str) -> Option<&str> {
    let rest = line.strip_prefix("- ").or_else(|| line.strip_prefix("* "))?;
    rest.trim_start().strip_prefix("evidence:").map(str::trim)
}

fn is_html_comment(line: &str) -> bool {
    line.starts_with("<!--") && line.ends_with("-->")
}
