//! Row-ordering and column-ordering instance files.
//!
//! Both formats are whitespace-separated token streams with 1-based indices;
//! line breaks carry no meaning. OR-Library `scp*` files are row-ordered and
//! the `rail*` files are column-ordered.
//!
//! ```text
//! Row ordering:     M N  c_1 .. c_N  then per row:    |row| i_1 .. i_|row|
//! Column ordering:  M N  then per column:  c_i |col| k_1 .. k_|col|
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::instance::{InstanceError, ScpInstance};

/// Tokens per output line when emitting.
pub const TOKENS_PER_LINE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    #[serde(rename = "row")]
    RowOrdering,
    #[serde(rename = "col")]
    ColumnOrdering,
}

impl FormatKind {
    pub fn name(self) -> &'static str {
        match self {
            FormatKind::RowOrdering => "row",
            FormatKind::ColumnOrdering => "col",
        }
    }
}

impl FromStr for FormatKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "row" | "rows" => Ok(FormatKind::RowOrdering),
            "col" | "cols" | "column" => Ok(FormatKind::ColumnOrdering),
            other => Err(format!("unknown format '{other}', expected 'row' or 'col'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("input ended early while reading {expected}")]
    Truncated { expected: &'static str },
    #[error("token {position} ('{token}') is not a valid {expected}")]
    BadToken {
        position: usize,
        token: String,
        expected: &'static str,
    },
    #[error("token {position}: index {value} outside 1..={max}")]
    BadIndex {
        position: usize,
        value: usize,
        max: usize,
    },
    #[error("unexpected trailing data at token {position}")]
    TrailingGarbage { position: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("input is neither row-ordered ({row}) nor column-ordered ({col})")]
    UnrecognizedFormat {
        row: Box<ParseError>,
        col: Box<ParseError>,
    },
}

struct Tokens<'a> {
    iter: std::slice::Split<'a, u8, fn(&u8) -> bool>,
    position: usize,
}

impl<'a> Tokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self {
            iter: bytes.split(u8::is_ascii_whitespace as fn(&u8) -> bool),
            position: 0,
        }
    }

    fn next_raw(&mut self) -> Option<&'a [u8]> {
        for tok in self.iter.by_ref() {
            if !tok.is_empty() {
                self.position += 1;
                return Some(tok);
            }
        }
        None
    }

    fn next<T: FromStr>(&mut self, expected: &'static str) -> Result<T, ParseError> {
        let raw = self.next_raw().ok_or(ParseError::Truncated { expected })?;
        std::str::from_utf8(raw)
            .ok()
            .and_then(|s| s.parse::<T>().ok())
            .ok_or_else(|| ParseError::BadToken {
                position: self.position,
                token: String::from_utf8_lossy(raw).into_owned(),
                expected,
            })
    }

    fn index(&mut self, max: usize, expected: &'static str) -> Result<usize, ParseError> {
        let value: usize = self.next(expected)?;
        if value == 0 || value > max {
            return Err(ParseError::BadIndex {
                position: self.position,
                value,
                max,
            });
        }
        Ok(value - 1)
    }

    fn finish(mut self) -> Result<(), ParseError> {
        match self.next_raw() {
            Some(_) => Err(ParseError::TrailingGarbage {
                position: self.position,
            }),
            None => Ok(()),
        }
    }
}

pub fn parse(bytes: &[u8], kind: FormatKind) -> Result<ScpInstance, ParseError> {
    let mut tokens = Tokens::new(bytes);
    let n_rows: usize = tokens.next("row count")?;
    let n_cols: usize = tokens.next("column count")?;
    let mut entries = Vec::new();
    let mut costs = Vec::new();

    match kind {
        FormatKind::RowOrdering => {
            for _ in 0..n_cols {
                costs.push(tokens.next::<f64>("cost")?);
            }
            for k in 0..n_rows {
                let len: usize = tokens.next("row length")?;
                for _ in 0..len {
                    let i = tokens.index(n_cols, "column index")?;
                    entries.push((k, i));
                }
            }
        }
        FormatKind::ColumnOrdering => {
            for i in 0..n_cols {
                costs.push(tokens.next::<f64>("cost")?);
                let len: usize = tokens.next("column length")?;
                for _ in 0..len {
                    let k = tokens.index(n_rows, "row index")?;
                    entries.push((k, i));
                }
            }
        }
    }
    tokens.finish()?;

    // With fewer entries than rows some row is necessarily empty; report it
    // without allocating per-row storage for an absurd declared row count.
    if n_rows > entries.len() && n_cols > 0 {
        let mut seen = vec![false; entries.len() + 1];
        for &(k, _) in &entries {
            if k < seen.len() {
                seen[k] = true;
            }
        }
        let k = seen.iter().position(|s| !s).unwrap_or(entries.len());
        return Err(InstanceError::UnsatisfiableRow(k).into());
    }
    Ok(ScpInstance::new(n_rows, n_cols, costs, entries)?)
}

/// Outcome of format auto-detection.
#[derive(Debug, Clone)]
pub struct Detected {
    pub kind: FormatKind,
    pub instance: ScpInstance,
    /// Both formats parsed cleanly; row ordering was preferred.
    pub ambiguous: bool,
}

/// Parses with row ordering first, then column ordering.
pub fn parse_auto(bytes: &[u8]) -> Result<Detected, ParseError> {
    let row = parse(bytes, FormatKind::RowOrdering);
    let col = parse(bytes, FormatKind::ColumnOrdering);
    match (row, col) {
        (Ok(instance), col) => Ok(Detected {
            kind: FormatKind::RowOrdering,
            instance,
            ambiguous: col.is_ok(),
        }),
        (Err(_), Ok(instance)) => Ok(Detected {
            kind: FormatKind::ColumnOrdering,
            instance,
            ambiguous: false,
        }),
        (Err(row), Err(col)) => Err(ParseError::UnrecognizedFormat {
            row: Box::new(row),
            col: Box::new(col),
        }),
    }
}

pub fn detect_format(bytes: &[u8]) -> Result<FormatKind, ParseError> {
    parse_auto(bytes).map(|d| d.kind)
}

/// Parses with an explicit kind, or auto-detects when `kind` is `None`.
pub fn parse_with(bytes: &[u8], kind: Option<FormatKind>) -> Result<Detected, ParseError> {
    match kind {
        Some(kind) => parse(bytes, kind).map(|instance| Detected {
            kind,
            instance,
            ambiguous: false,
        }),
        None => parse_auto(bytes),
    }
}

struct LineWriter {
    out: String,
    on_line: usize,
}

impl LineWriter {
    fn push(&mut self, token: impl std::fmt::Display) {
        if self.on_line == TOKENS_PER_LINE {
            self.out.push('\n');
            self.on_line = 0;
        }
        if self.on_line > 0 {
            self.out.push(' ');
        }
        write!(self.out, "{token}").expect("writing to a String");
        self.on_line += 1;
    }

    fn newline(&mut self) {
        if self.on_line > 0 {
            self.out.push('\n');
            self.on_line = 0;
        }
    }
}

/// Writes an instance in the given format, at most twelve tokens per line.
pub fn emit(instance: &ScpInstance, kind: FormatKind) -> String {
    let mut w = LineWriter {
        out: String::new(),
        on_line: 0,
    };
    w.push(instance.n_rows());
    w.push(instance.n_cols());
    w.newline();
    match kind {
        FormatKind::RowOrdering => {
            for c in instance.costs() {
                w.push(c);
            }
            w.newline();
            for row in instance.rows() {
                w.push(row.len());
                for i in row {
                    w.push(i + 1);
                }
                w.newline();
            }
        }
        FormatKind::ColumnOrdering => {
            for (col, c) in instance.cols().iter().zip(instance.costs()) {
                w.push(c);
                w.push(col.len());
                for k in col {
                    w.push(k + 1);
                }
                w.newline();
            }
        }
    }
    w.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::example_instance;

    const ROW_LISTING: &str = "4 5\n1 2 3 4 5\n3 1 3 5\n2 2 4\n3 1 2 5\n3 3 4 5\n";
    const COL_LISTING: &str = "4 5\n1 2 1 3\n2 2 2 3\n3 2 1 4\n4 2 2 4\n5 3 1 3 4\n";

    fn tokens(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn listings_parse_to_example() {
        let row = parse(ROW_LISTING.as_bytes(), FormatKind::RowOrdering).unwrap();
        let col = parse(COL_LISTING.as_bytes(), FormatKind::ColumnOrdering).unwrap();
        assert_eq!(row, example_instance());
        assert_eq!(col, row);
    }

    #[test]
    fn emit_matches_listings() {
        let inst = example_instance();
        assert_eq!(emit(&inst, FormatKind::RowOrdering), ROW_LISTING);
        assert_eq!(
            tokens(&emit(&inst, FormatKind::ColumnOrdering)),
            tokens(COL_LISTING)
        );
    }

    #[test]
    fn minimal_instance() {
        let inst = parse(b"1 1 5 1 1", FormatKind::RowOrdering).unwrap();
        assert_eq!(inst.n_rows(), 1);
        assert_eq!(inst.costs(), &[5.0]);
        assert_eq!(inst.row(0), &[0]);
    }

    #[test]
    fn line_breaks_are_irrelevant() {
        let squashed = ROW_LISTING.replace('\n', " \t ");
        assert_eq!(
            parse(squashed.as_bytes(), FormatKind::RowOrdering).unwrap(),
            example_instance()
        );
    }

    #[test]
    fn real_costs_accepted() {
        let inst = parse(b"1 2 0.5 2e0 2 1 2", FormatKind::RowOrdering).unwrap();
        assert_eq!(inst.costs(), &[0.5, 2.0]);
    }

    #[test]
    fn error_cases() {
        let trunc = parse(b"4 5 1 2 3 4 5 3 1 3", FormatKind::RowOrdering).unwrap_err();
        assert!(matches!(trunc, ParseError::Truncated { .. }));

        let bad = parse(b"1 1 x 1 1", FormatKind::RowOrdering).unwrap_err();
        assert!(matches!(bad, ParseError::BadToken { position: 3, .. }));

        let idx = parse(b"1 1 5 1 2", FormatKind::RowOrdering).unwrap_err();
        assert!(matches!(idx, ParseError::BadIndex { value: 2, max: 1, .. }));
        let zero = parse(b"1 1 5 1 0", FormatKind::RowOrdering).unwrap_err();
        assert!(matches!(zero, ParseError::BadIndex { value: 0, .. }));

        let trailing = parse(b"1 1 5 1 1 7", FormatKind::RowOrdering).unwrap_err();
        assert_eq!(trailing, ParseError::TrailingGarbage { position: 6 });

        let empty_row = parse(b"2 1 5 1 1 0", FormatKind::RowOrdering).unwrap_err();
        assert_eq!(
            empty_row,
            ParseError::Instance(InstanceError::UnsatisfiableRow(1))
        );
    }

    #[test]
    fn huge_declared_row_count_is_rejected_cheaply() {
        let err = parse(b"99999999999 1 1 1 1", FormatKind::ColumnOrdering).unwrap_err();
        assert_eq!(err, ParseError::Instance(InstanceError::UnsatisfiableRow(1)));
    }

    #[test]
    fn detection() {
        assert_eq!(
            detect_format(ROW_LISTING.as_bytes()).unwrap(),
            FormatKind::RowOrdering
        );
        // The column listing of the example also reads as a (different)
        // row-ordered instance, so detection prefers row ordering.
        let d = parse_auto(COL_LISTING.as_bytes()).unwrap();
        assert_eq!(d.kind, FormatKind::RowOrdering);
        assert!(d.ambiguous);
        // Cost 7 would be read as a column index out of range under row ordering.
        assert_eq!(
            detect_format(b"1 2 5 1 1 7 1 1").unwrap(),
            FormatKind::ColumnOrdering
        );
        assert!(matches!(
            detect_format(b""),
            Err(ParseError::UnrecognizedFormat { .. })
        ));
        // "1 1 5 1 1" reads as both formats.
        let d = parse_auto(b"1 1 5 1 1").unwrap();
        assert_eq!(d.kind, FormatKind::RowOrdering);
        assert!(d.ambiguous);
    }

    #[test]
    fn long_rows_wrap() {
        let n = 30;
        let inst = ScpInstance::new(1, n, vec![1.0; n], (0..n).map(|i| (0, i))).unwrap();
        let text = emit(&inst, FormatKind::RowOrdering);
        assert!(text.lines().all(|l| l.split(' ').count() <= TOKENS_PER_LINE));
        assert_eq!(parse(text.as_bytes(), FormatKind::RowOrdering).unwrap(), inst);
    }
}
