//! Interval-length files: one decimal per line, or a JSON array of numbers.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LengthsError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("entry {index}: {message}")]
    Entry { index: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("no interval lengths found")]
    Empty,
    #[error("failed to read lengths: {0}")]
    Io(#[from] std::io::Error),
}

fn check_value(value: f64) -> Result<f64, String> {
    if !value.is_finite() {
        Err(format!("length {value} is not finite"))
    } else if value <= 0.0 {
        Err(format!("length {value} must be positive"))
    } else {
        Ok(value)
    }
}

/// Parses interval lengths. Input whose first non-whitespace byte is `[` is
/// read as a JSON array; anything else as text with one number per line,
/// where blank lines and lines starting with `#` are skipped.
pub fn read_lengths(source: &str) -> Result<Vec<f64>, LengthsError> {
    let lengths = if source.trim_start().starts_with('[') {
        parse_json(source)?
    } else {
        parse_text(source)?
    };
    if lengths.is_empty() {
        return Err(LengthsError::Empty);
    }
    Ok(lengths)
}

fn parse_text(source: &str) -> Result<Vec<f64>, LengthsError> {
    let mut out = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let value: f64 = text.parse().map_err(|_| LengthsError::Line {
            line,
            message: format!("`{text}` is not a number"),
        })?;
        let value = check_value(value).map_err(|message| LengthsError::Line { line, message })?;
        out.push(value);
    }
    Ok(out)
}

fn parse_json(source: &str) -> Result<Vec<f64>, LengthsError> {
    let values: Vec<serde_json::Value> = serde_json::from_str(source)?;
    values
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let value = v.as_f64().ok_or_else(|| LengthsError::Entry {
                index,
                message: format!("`{v}` is not a number"),
            })?;
            check_value(value).map_err(|message| LengthsError::Entry { index, message })
        })
        .collect()
}

/// Reads lengths from a file, or from standard input when `path` is `-`.
pub fn read_lengths_from(path: &Path) -> Result<Vec<f64>, LengthsError> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)?;
    }
    read_lengths(&text)
}

pub fn lengths_to_text(lengths: &[f64]) -> String {
    let mut out = String::new();
    for v in lengths {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn lengths_to_json(lengths: &[f64]) -> String {
    serde_json::to_string(lengths).expect("finite lengths serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_lines() {
        assert_eq!(read_lengths("1\n2\n").unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            read_lengths("# header\n\n 0.25 \n#x\n3\n").unwrap(),
            vec![0.25, 3.0]
        );
    }

    #[test]
    fn json_array() {
        assert_eq!(read_lengths("[0.5, 0.5]").unwrap(), vec![0.5, 0.5]);
        assert_eq!(read_lengths("  \n[1]").unwrap(), vec![1.0]);
    }

    #[test]
    fn negative_entry_names_line() {
        let err = read_lengths("1\n-2\n").unwrap_err();
        assert!(matches!(err, LengthsError::Line { line: 2, .. }));
        assert!(err.to_string().starts_with("line 2:"), "{err}");
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            read_lengths("1\nabc\n"),
            Err(LengthsError::Line { line: 2, .. })
        ));
        assert!(matches!(
            read_lengths("0\n"),
            Err(LengthsError::Line { line: 1, .. })
        ));
        assert!(matches!(
            read_lengths("inf\n"),
            Err(LengthsError::Line { line: 1, .. })
        ));
        assert!(matches!(
            read_lengths("[1, \"x\"]"),
            Err(LengthsError::Entry { index: 1, .. })
        ));
        assert!(matches!(
            read_lengths("[1, 0]"),
            Err(LengthsError::Entry { index: 1, .. })
        ));
        assert!(matches!(read_lengths("[1, 2"), Err(LengthsError::Json(_))));
        assert!(matches!(
            read_lengths("# nothing\n"),
            Err(LengthsError::Empty)
        ));
        assert!(matches!(read_lengths("[]"), Err(LengthsError::Empty)));
    }

    proptest! {
        #[test]
        fn round_trip(lengths in proptest::collection::vec(1e-300f64..1e300, 1..40)) {
            prop_assert_eq!(read_lengths(&lengths_to_text(&lengths)).unwrap(), lengths.clone());
            prop_assert_eq!(read_lengths(&lengths_to_json(&lengths)).unwrap(), lengths);
        }
    }
}
