//! Reader and writer for the OR-Library `bqp` text format.
//!
//! ```text
//! <instance count>
//! <n> <m>          one header per instance
//! <i> <j> <value>  m records, 1-based indices
//! ```
//!
//! Instances in this format are maximization problems, so coefficients are
//! negated on ingest and the result carries [`Sense::MaximizeNegated`].
//! Records with `i > j` fold onto `(j, i)` and repeated records accumulate.
//! Tokens may be split across lines arbitrarily.

use std::fmt::Write as _;
use std::path::Path;

use super::{Qubo, QuboBuilder, Sense};

#[derive(Debug, thiserror::Error)]
pub enum OrlibError {
    #[error("line {line}: malformed header: {detail}")]
    MalformedHeader { line: usize, detail: String },
    #[error("line {line}: invalid {what} {token:?}")]
    InvalidToken {
        line: usize,
        what: &'static str,
        token: String,
    },
    #[error("line {line}: index {index} out of range for instance {instance} with {n} variables")]
    IndexOutOfRange {
        line: usize,
        instance: usize,
        index: i64,
        n: usize,
    },
    #[error("line {line}: instance {instance} declares {expected} records, found {found}")]
    MissingRecords {
        line: usize,
        instance: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .flat_map(|(no, line)| line.split_whitespace().map(move |t| (no + 1, t)));
        Self {
            inner: Box::new(inner),
            last_line: 0,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.inner.next();
        if let Some((line, _)) = item {
            self.last_line = line;
        }
        item
    }
}

fn header_usize(tokens: &mut Tokens<'_>, what: &str) -> Result<usize, OrlibError> {
    let (line, tok) = tokens.next().ok_or_else(|| OrlibError::MalformedHeader {
        line: tokens.last_line,
        detail: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| OrlibError::MalformedHeader {
        line,
        detail: format!("{what} {tok:?} is not a nonnegative integer"),
    })
}

/// Parses every instance declared in `text`.
pub fn parse_orlib(text: &str) -> Result<Vec<Qubo>, OrlibError> {
    let mut tokens = Tokens::new(text);
    let count = header_usize(&mut tokens, "instance count")?;
    let mut out = Vec::with_capacity(count);
    for instance in 0..count {
        let n = header_usize(&mut tokens, "variable count")?;
        let m = header_usize(&mut tokens, "record count")?;
        let mut b = QuboBuilder::new(n);
        b.sense(Sense::MaximizeNegated);
        for found in 0..m {
            let mut field = |what: &'static str| {
                tokens
                    .next()
                    .ok_or(OrlibError::MissingRecords {
                        line: tokens.last_line,
                        instance,
                        expected: m,
                        found,
                    })
                    .map(|(line, tok)| (line, tok, what))
            };
            let fi = field("row index")?;
            let fj = field("column index")?;
            let fv = field("value")?;
            let index =
                |(line, tok, what): (usize, &str, &'static str)| -> Result<usize, OrlibError> {
                    let raw: i64 = tok.parse().map_err(|_| OrlibError::InvalidToken {
                        line,
                        what,
                        token: tok.to_string(),
                    })?;
                    if raw < 1 || raw as u64 > n as u64 {
                        return Err(OrlibError::IndexOutOfRange {
                            line,
                            instance,
                            index: raw,
                            n,
                        });
                    }
                    Ok(raw as usize - 1)
                };
            let i = index(fi)?;
            let j = index(fj)?;
            let (vline, vtok, what) = fv;
            let v: f64 = vtok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| OrlibError::InvalidToken {
                    line: vline,
                    what,
                    token: vtok.to_string(),
                })?;
            b.add(i, j, -v).expect("indices checked above");
        }
        out.push(b.build());
    }
    Ok(out)
}

pub fn read_orlib_file(path: impl AsRef<Path>) -> Result<Vec<Qubo>, OrlibError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| OrlibError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_orlib(&text)
}

/// Writes problems in the same format, such that `parse_orlib` of the output
/// reproduces the internal coefficients. Offsets are not representable and
/// are dropped.
pub fn write_orlib(problems: &[Qubo]) -> String {
    let mut out = String::new();
    writeln!(out, "{}", problems.len()).unwrap();
    for q in problems {
        let terms: Vec<_> = q.terms().collect();
        writeln!(out, "{} {}", q.n(), terms.len()).unwrap();
        for (i, j, v) in terms {
            // parse_orlib negates every record
            writeln!(out, "{} {} {}", i + 1, j + 1, -v).unwrap();
        }
    }
    out
}
