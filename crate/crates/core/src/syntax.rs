//! Shared error type and helpers for the line-oriented text formats.

use thiserror::Error;

use crate::matrix::Mat;
use crate::rat::Rat;

/// A syntax or validation error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

/// One significant line of input: comment-stripped, with its 1-based number.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub raw: &'a str,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    /// 1-based column of `part`, which must be a subslice of this line.
    pub fn column_of(&self, part: &str) -> usize {
        let base = self.raw.as_ptr() as usize;
        let at = part.as_ptr() as usize;
        if at >= base && at <= base + self.raw.len() {
            at - base + 1
        } else {
            1
        }
    }

    pub fn error(&self, part: &str, message: impl Into<String>) -> ParseError {
        ParseError::new(self.number, self.column_of(part), message)
    }

    pub fn error_start(&self, message: impl Into<String>) -> ParseError {
        let first = self.raw.len() - self.raw.trim_start().len();
        ParseError::new(self.number, first + 1, message)
    }
}

/// Splits text into lines, dropping `#` comments and blank lines. A `#` only
/// starts a comment at the beginning of a line or after whitespace, so that
/// marked symbols such as `f#` survive.
pub(crate) fn significant_lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let cut = comment_start(raw).unwrap_or(raw.len());
            let text = raw[..cut].trim_end();
            (!text.trim().is_empty()).then_some(Line {
                number: i + 1,
                raw,
                text,
            })
        })
        .collect()
}

fn comment_start(raw: &str) -> Option<usize> {
    let bytes = raw.as_bytes();
    bytes
        .iter()
        .enumerate()
        .find(|&(i, &b)| b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()))
        .map(|(i, _)| i)
}

pub(crate) fn parse_rat(line: &Line<'_>, tok: &str) -> Result<Rat, ParseError> {
    tok.parse::<Rat>()
        .map_err(|_| line.error(tok, format!("expected a number, found `{tok}`")))
}

pub(crate) fn parse_usize(line: &Line<'_>, tok: &str) -> Result<usize, ParseError> {
    tok.parse::<usize>()
        .map_err(|_| line.error(tok, format!("expected a natural number, found `{tok}`")))
}

pub(crate) fn parse_matrix(line: &Line<'_>, lit: &str) -> Result<Mat, ParseError> {
    Mat::parse_literal(lit)
        .map_err(|e| ParseError::new(line.number, line.column_of(lit) + e.offset, e.message))
}
