//! Byte-offset to line/column conversion for diagnostics.

use std::fmt;

/// One-based line and column inside a source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl Location {
    pub fn from_offset(source: &str, offset: usize) -> Self {
        let offset = offset.min(source.len());
        let before = &source.as_bytes()[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&before[line_start..]).chars().count() + 1;
        Location { line, column }
    }

    pub(crate) fn of_toml_error(source: &str, err: &toml::de::Error) -> Option<Self> {
        err.span().map(|span| Self::from_offset(source, span.start))
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Renders an optional location as a `" at L:C"` suffix.
pub(crate) fn suffix(location: &Option<Location>) -> String {
    match location {
        Some(loc) => format!(" at {loc}"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_map_to_one_based_positions() {
        let src = "ab\ncde\n\nf";
        assert_eq!(Location::from_offset(src, 0), Location { line: 1, column: 1 });
        assert_eq!(Location::from_offset(src, 4), Location { line: 2, column: 2 });
        assert_eq!(Location::from_offset(src, 8), Location { line: 4, column: 1 });
        assert_eq!(Location::from_offset(src, 1000), Location { line: 4, column: 2 });
    }
}
