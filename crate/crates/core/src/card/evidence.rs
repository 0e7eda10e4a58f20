use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum hex digits for a `hash` evidence link (short git SHA length).
pub const MIN_HASH_LEN: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    Url,
    FilePath,
    Hash,
    Doi,
}

impl EvidenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EvidenceKind::Url => "url",
            EvidenceKind::FilePath => "file_path",
            EvidenceKind::Hash => "hash",
            EvidenceKind::Doi => "doi",
        }
    }
}

impl fmt::Display for EvidenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvidenceKind {
    type Err = EvidenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "url" => Ok(EvidenceKind::Url),
            "file_path" => Ok(EvidenceKind::FilePath),
            "hash" => Ok(EvidenceKind::Hash),
            "doi" => Ok(EvidenceKind::Doi),
            other => Err(EvidenceError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvidenceError {
    #[error("unknown evidence kind `{0}` (expected url, file_path, hash or doi)")]
    UnknownKind(String),
    #[error("empty {0} evidence value")]
    Empty(EvidenceKind),
    #[error("invalid {kind} evidence `{value}`: {reason}")]
    Invalid {
        kind: EvidenceKind,
        value: String,
        reason: String,
    },
}

/// A machine-checkable pointer backing a field's content.
///
/// Only syntax is validated; links are never dereferenced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EvidenceLink {
    pub kind: EvidenceKind,
    pub value: String,
}

impl EvidenceLink {
    pub fn new(kind: EvidenceKind, value: impl Into<String>) -> Result<Self, EvidenceError> {
        let value = value.into().trim().to_string();
        if value.is_empty() {
            return Err(EvidenceError::Empty(kind));
        }
        let invalid = |reason: &str| EvidenceError::Invalid {
            kind,
            value: value.clone(),
            reason: reason.to_string(),
        };
        match kind {
            EvidenceKind::Url => {
                url::Url::parse(&value).map_err(|e| invalid(&e.to_string()))?;
            }
            EvidenceKind::FilePath => {
                if value.chars().any(|c| c == '\0' || c == '\n' || c == '\r') {
                    return Err(invalid("path contains control characters"));
                }
            }
            EvidenceKind::Hash => {
                if !value.chars().all(|c| c.is_ascii_hexdigit()) {
                    return Err(invalid("not hexadecimal"));
                }
                if value.len() < MIN_HASH_LEN {
                    return Err(invalid("shorter than 7 hex digits"));
                }
            }
            EvidenceKind::Doi => {
                let valid = value
                    .strip_prefix("10.")
                    .and_then(|rest| rest.split_once('/'))
                    .is_some_and(|(registrant, suffix)| {
                        !registrant.is_empty()
                            && registrant.chars().all(|c| c.is_ascii_digit() || c == '.')
                            && !suffix.trim().is_empty()
                    });
                if !valid {
                    return Err(invalid("expected `10.<registrant>/<suffix>`"));
                }
            }
        }
        Ok(EvidenceLink { kind, value })
    }
}

impl FromStr for EvidenceLink {
    type Err = EvidenceError;

    /// Parses the compact `kind:value` form, e.g. `hash:9f2a1c4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| EvidenceError::UnknownKind(s.trim().to_string()))?;
        EvidenceLink::new(kind.parse()?, value)
    }
}

impl fmt::Display for EvidenceLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind, self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_form_parses_each_kind() {
        let hash: EvidenceLink = "hash:9f2a1c4".parse().unwrap();
        assert_eq!(hash.kind, EvidenceKind::Hash);
        assert_eq!(hash.value, "9f2a1c4");
        let url: EvidenceLink = "url:https://example.org/eval.py".parse().unwrap();
        assert_eq!(url.value, "https://example.org/eval.py");
        assert!("doi:10.1145/3287560.3287596".parse::<EvidenceLink>().is_ok());
        assert!("file_path:configs/train.yaml".parse::<EvidenceLink>().is_ok());
        assert_eq!(hash.to_string(), "hash:9f2a1c4");
    }

    #[test]
    fn syntax_violations_are_rejected() {
        assert!(matches!(
            EvidenceLink::new(EvidenceKind::Hash, "9f2a1c"),
            Err(EvidenceError::Invalid { .. })
        ));
        assert!(EvidenceLink::new(EvidenceKind::Hash, "zzzzzzzz").is_err());
        assert!(EvidenceLink::new(EvidenceKind::Url, "not a url").is_err());
        assert!(EvidenceLink::new(EvidenceKind::Doi, "11.1/x").is_err());
        assert!(EvidenceLink::new(EvidenceKind::Doi, "10.1234/").is_err());
        assert_eq!(
            EvidenceLink::new(EvidenceKind::FilePath, "  "),
            Err(EvidenceError::Empty(EvidenceKind::FilePath))
        );
        assert!(matches!(
            "sha:abcdef12".parse::<EvidenceLink>(),
            Err(EvidenceError::UnknownKind(k)) if k == "sha"
        ));
    }
}
