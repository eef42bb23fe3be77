//! Plain-text polytope lists.
//!
//! Each record is a header line `id dim nvertices` followed by one line of
//! integer coordinates per vertex. Blank lines separate records and `#` starts
//! a comment.

use std::fmt::Write as _;

use thiserror::Error;

use super::{LatticePoint, LatticePolytope, PolytopeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: record ended after {found} of {expected} vertices")]
    Truncated {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("polytope {id}: {source}")]
    Invalid {
        id: u32,
        #[source]
        source: PolytopeError,
    },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn numbers(line: usize, text: &str) -> Result<Vec<i64>, ParseError> {
    text.split_whitespace()
        .map(|tok| tok.parse::<i64>().map_err(|_| syntax(line, format!("`{tok}` is not an integer"))))
        .collect()
}

struct Pending {
    id: u32,
    dim: usize,
    expected: usize,
    header_line: usize,
    points: Vec<LatticePoint>,
}

impl Pending {
    fn finish(self, line: usize) -> Result<LatticePolytope, ParseError> {
        if self.points.len() != self.expected {
            return Err(ParseError::Truncated {
                line,
                expected: self.expected,
                found: self.points.len(),
            });
        }
        LatticePolytope::new(self.dim, self.points)
            .map(|p| p.with_id(self.id))
            .map_err(|source| ParseError::Invalid { id: self.id, source })
    }
}

pub fn parse_polytopes(text: &str) -> Result<Vec<LatticePolytope>, ParseError> {
    let mut out = Vec::new();
    let mut pending: Option<Pending> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            if raw.trim().is_empty() {
                if let Some(rec) = pending.take() {
                    out.push(rec.finish(line)?);
                }
            }
            continue;
        }
        let nums = numbers(line, content)?;
        match pending.as_mut() {
            Some(rec) if rec.points.len() < rec.expected => {
                if nums.len() != rec.dim {
                    return Err(syntax(line, format!("expected {} coordinates, found {}", rec.dim, nums.len())));
                }
                rec.points.push(LatticePoint(nums));
            }
            Some(rec) => {
                return Err(syntax(
                    line,
                    format!("record starting at line {} has more than {} vertices", rec.header_line, rec.expected),
                ));
            }
            None => {
                let [id, dim, n] = nums[..] else {
                    return Err(syntax(line, "expected a header `id dim nvertices`"));
                };
                let (Ok(id), Ok(dim), Ok(expected)) = (u32::try_from(id), usize::try_from(dim), usize::try_from(n)) else {
                    return Err(syntax(line, "header fields must be nonnegative"));
                };
                pending = Some(Pending {
                    id,
                    dim,
                    expected,
                    header_line: line,
                    points: Vec::with_capacity(expected),
                });
            }
        }
    }
    if let Some(rec) = pending.take() {
        out.push(rec.finish(text.lines().count())?);
    }
    Ok(out)
}

/// Inverse of [`parse_polytopes`]; polytopes without an id are numbered by position.
pub fn format_polytopes(polytopes: &[LatticePolytope]) -> String {
    let mut s = String::new();
    for (i, p) in polytopes.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let id = p.id().unwrap_or(i as u32);
        let _ = writeln!(s, "{id} {} {}", p.dim(), p.num_vertices());
        for v in p.vertices() {
            let coords: Vec<String> = v.coords().iter().map(i64::to_string).collect();
            let _ = writeln!(s, "{}", coords.join(" "));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# comment\n7 2 3\n1 0\n0 1\n-1 -1\n\n9 2 4\n1 0  # trailing\n0 1\n-1 0\n0 -1\n";
        let ps = parse_polytopes(text).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps[0].id(), Some(7));
        assert_eq!(ps[1].num_vertices(), 4);
        let again = parse_polytopes(&format_polytopes(&ps)).unwrap();
        assert_eq!(again, ps);
        assert_eq!(again[1].id(), Some(9));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_polytopes("1 2 3\n1 0\n0 x\n"),
            Err(ParseError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_polytopes("1 2 3\n1 0\n0 1\n\n"),
            Err(ParseError::Truncated { expected: 3, found: 2, .. })
        ));
        assert!(matches!(
            parse_polytopes("4 2 3\n1 0\n2 0\n3 0\n"),
            Err(ParseError::Invalid { id: 4, source: PolytopeError::Degenerate })
        ));
        assert!(matches!(parse_polytopes("1 2\n"), Err(ParseError::Syntax { line: 1, .. })));
    }
}
