//! Canonical TOML card format.
//!
//! ```toml
//! project_id = "acme-chat-7b"
//! task_family = "chatbot"
//! card_version = "3"
//!
//! [model_details]
//! model_title = "Acme Chat 7B"            # aliases resolve to `model_name`
//! license = "Apache-2.0"
//!
//! [performance_limitations.benchmark_results]
//! text = "MMLU 61.2 (5-shot)"
//! evidence = [{ kind = "url", value = "https://example.org/evals/run-42" }]
//! ```
//!
//! Every top-level table names a module (by id or display name). Keys inside
//! it are parameter ids, aliases, compound names or irrelevant fields. A value
//! is either plain content (strings, numbers, dates, booleans or arrays of
//! those) or a table with optional `text` and `evidence` keys.

use toml::{Table, Value};

use super::{CardBuilder, CardError, EvidenceLink};
use crate::location::Location;
use crate::taxonomy::RESERVED_CARD_KEYS;

pub(crate) fn parse_into(source: &str, builder: &mut CardBuilder<'_>) -> Result<(), CardError> {
    let table: Table = source
        .parse()
        .map_err(|e: toml::de::Error| CardError::at(e.message().to_string(), Location::of_toml_error(source, &e)))?;

    for (key, value) in &table {
        if RESERVED_CARD_KEYS.contains(&key.as_str()) {
            let text = scalar_text(value)
                .ok_or_else(|| CardError::at(format!("`{key}` must be a string"), locate_key(source, key)))?;
            builder.set_reserved(key, text);
            continue;
        }
        let Some(module) = builder.taxonomy().find_module(key) else {
            return Err(CardError::at(
                format!("`{key}` is neither a reserved key nor a module"),
                locate_key(source, key),
            ));
        };
        let module_id = module.id.clone();
        let Value::Table(fields) = value else {
            return Err(CardError::at(
                format!("module section `{key}` must be a table"),
                locate_key(source, key),
            ));
        };
        for (field, value) in fields {
            let (content, evidence) = field_value(value).map_err(|message| {
                CardError::at(format!("field `{key}.{field}`: {message}"), locate_key(source, field))
            })?;
            builder.add_field(&module_id, field, content, evidence);
        }
    }
    Ok(())
}

fn scalar_text(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Integer(i) => Some(i.to_string()),
        Value::Float(f) => Some(f.to_string()),
        Value::Boolean(b) => Some(b.to_string()),
        Value::Datetime(d) => Some(d.to_string()),
        Value::Array(_) | Value::Table(_) => None,
    }
}

fn field_value(value: &Value) -> Result<(String, Vec<EvidenceLink>), String> {
    match value {
        Value::Array(items) => {
            let parts = items
                .iter()
                .map(scalar_text)
                .collect::<Option<Vec<_>>>()
                .ok_or("arrays may only hold plain values")?;
            Ok((parts.join("; "), Vec::new()))
        }
        Value::Table(table) => {
            let mut text = String::new();
            let mut evidence = Vec::new();
            for (key, value) in table {
                match key.as_str() {
                    "text" => {
                        text = scalar_text(value).ok_or("`text` must be a string")?;
                    }
                    "evidence" => evidence = evidence_list(value)?,
                    other => return Err(format!("unexpected key `{other}`")),
                }
            }
            Ok((text, evidence))
        }
        scalar => Ok((scalar_text(scalar).expect("scalar"), Vec::new())),
    }
}

fn evidence_list(value: &Value) -> Result<Vec<EvidenceLink>, String> {
    let Value::Array(items) = value else {
        return Err("`evidence` must be an array".into());
    };
    items
        .iter()
        .map(|item| match item {
            Value::Table(t) => {
                let get = |k: &str| {
                    t.get(k)
                        .and_then(Value::as_str)
                        .ok_or_else(|| format!("evidence entries need a string `{k}`"))
                };
                if let Some(extra) = t.keys().find(|k| *k != "kind" && *k != "value") {
                    return Err(format!("unexpected evidence key `{extra}`"));
                }
                let kind = get("kind")?.parse().map_err(|e| format!("{e}"))?;
                EvidenceLink::new(kind, get("value")?).map_err(|e| e.to_string())
            }
            Value::String(s) => s.parse().map_err(|e| format!("{e}")),
            _ => Err("evidence entries must be tables or `kind:value` strings".into()),
        })
        .collect()
}

/// Best-effort position of the first line defining `key`.
fn locate_key(source: &str, key: &str) -> Option<Location> {
    let mut offset = 0;
    for line in source.split_inclusive('\n') {
        let trimmed = line.trim_start();
        let indent = line.len() - trimmed.len();
        let body = trimmed
            .trim_start_matches('[')
            .trim_start_matches('"')
            .trim_start_matches('\'');
        if let Some(rest) = body.strip_prefix(key) {
            let next = rest.trim_start_matches(['"', '\'']).trim_start();
            if next.starts_with('=') || next.starts_with('.') || next.starts_with(']') {
                return Some(Location::from_offset(source, offset + indent));
            }
        }
        offset += line.len();
    }
    None
}
