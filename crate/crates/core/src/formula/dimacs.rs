use std::fmt::Write as _;

use super::{BeliefBase, Clause, KnowledgeBase, Lit, Query, WeightedClause, Weight};
use crate::error::{ParseError, ParseErrorKind};

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn is_comment(line: &str) -> bool {
    line.is_empty() || line.starts_with('c')
}

/// Reads one zero-terminated clause from `tokens`.
fn read_clause<'a>(
    tokens: impl Iterator<Item = &'a str>,
    line_no: usize,
    num_vars: Option<u32>,
) -> Result<Clause, ParseError> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for tok in tokens {
        if terminated {
            // Only one clause per line.
            return Err(err(line_no, ParseErrorKind::BadLiteral(tok.to_string())));
        }
        let v: i64 = tok.parse().map_err(|_| err(line_no, ParseErrorKind::BadLiteral(tok.to_string())))?;
        if v == 0 {
            terminated = true;
            continue;
        }
        let limit = num_vars.map_or(i32::MAX as i64, i64::from);
        if v.abs() > limit {
            return Err(err(
                line_no,
                ParseErrorKind::LiteralOutOfRange { lit: v, num_vars: num_vars.unwrap_or(i32::MAX as u32) },
            ));
        }
        lits.push(Lit::from_dimacs(v as i32).expect("nonzero"));
    }
    if !terminated {
        return Err(err(line_no, ParseErrorKind::MissingTerminator));
    }
    Clause::new(lits).map_err(|_| err(line_no, ParseErrorKind::Tautology))
}

fn parse_header(line: &str, line_no: usize) -> Result<(u32, usize), ParseError> {
    let bad = || err(line_no, ParseErrorKind::BadHeader(line.to_string()));
    let mut it = line.split_whitespace();
    if it.next() != Some("p") || it.next() != Some("cnf") {
        return Err(bad());
    }
    let vars = it.next().and_then(|t| t.parse::<u32>().ok()).filter(|&v| v <= i32::MAX as u32).ok_or_else(bad)?;
    let clauses = it.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(bad)?;
    if it.next().is_some() {
        return Err(bad());
    }
    Ok((vars, clauses))
}

fn lines(text: &[u8]) -> Vec<(usize, String)> {
    String::from_utf8_lossy(text).lines().enumerate().map(|(i, l)| (i + 1, l.trim().to_string())).collect()
}

/// Parses DIMACS CNF. Each clause must sit on its own line and end in `0`.
pub fn parse_cnf(text: &[u8]) -> Result<KnowledgeBase, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut last_line = 0;
    for (no, line) in lines(text) {
        last_line = no;
        if is_comment(&line) {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(no, ParseErrorKind::DuplicateHeader));
            }
            header = Some(parse_header(&line, no)?);
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(err(no, ParseErrorKind::MissingHeader));
        };
        clauses.push(read_clause(line.split_whitespace(), no, Some(vars))?);
    }
    let Some((num_vars, declared)) = header else {
        return Err(err(last_line.max(1), ParseErrorKind::MissingHeader));
    };
    if declared != clauses.len() {
        return Err(err(last_line.max(1), ParseErrorKind::ClauseCount { declared, found: clauses.len() }));
    }
    Ok(KnowledgeBase { num_vars, clauses })
}

/// Parses 2022-style WCNF: `h` or a positive decimal weight, then a clause.
pub fn parse_wcnf(text: &[u8]) -> Result<BeliefBase, ParseError> {
    let mut entries = Vec::new();
    for (no, line) in lines(text) {
        if is_comment(&line) {
            continue;
        }
        let mut it = line.split_whitespace();
        let head = it.next().expect("non-empty line");
        let weight = if head == "h" {
            Weight::Hard
        } else {
            let w: f64 = head.parse().map_err(|_| err(no, ParseErrorKind::BadWeight(head.to_string())))?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(err(no, ParseErrorKind::NonPositiveWeight(head.to_string())));
            }
            Weight::Soft(w)
        };
        let clause = read_clause(it, no, None)?;
        entries.push(WeightedClause { clause, weight });
    }
    Ok(BeliefBase::new(0, entries))
}

/// Parses a query: clause lines read as a conjunction. A `p cnf` header is
/// tolerated and bounds the literals.
pub fn parse_query(text: &[u8]) -> Result<Query, ParseError> {
    let mut clauses = Vec::new();
    let mut num_vars = None;
    let mut last_line = 1;
    for (no, line) in lines(text) {
        last_line = no;
        if is_comment(&line) {
            continue;
        }
        if line.starts_with('p') {
            num_vars = Some(parse_header(&line, no)?.0);
            continue;
        }
        clauses.push(read_clause(line.split_whitespace(), no, num_vars)?);
    }
    if clauses.is_empty() {
        return Err(err(last_line, ParseErrorKind::EmptyQuery));
    }
    Ok(Query { clauses })
}

fn push_clause(out: &mut String, c: &Clause) {
    for l in c.lits() {
        write!(out, "{l} ").unwrap();
    }
    out.push_str("0\n");
}

pub fn write_cnf(kb: &KnowledgeBase) -> Vec<u8> {
    let mut out = format!("p cnf {} {}\n", kb.num_vars, kb.clauses.len());
    for c in &kb.clauses {
        push_clause(&mut out, c);
    }
    out.into_bytes()
}

/// Weights use the shortest decimal that reads back to the same `f64`.
pub fn write_wcnf(base: &BeliefBase) -> Vec<u8> {
    let mut out = String::new();
    for e in &base.entries {
        match e.weight {
            Weight::Hard => out.push_str("h "),
            Weight::Soft(w) => write!(out, "{w} ").unwrap(),
        }
        push_clause(&mut out, &e.clause);
    }
    out.into_bytes()
}

pub fn write_query(q: &Query) -> Vec<u8> {
    let mut out = String::new();
    for c in &q.clauses {
        push_clause(&mut out, c);
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnf_basic() {
        let kb = parse_cnf(b"p cnf 2 1\n1 -2 0\n").unwrap();
        assert_eq!(kb.num_vars(), 2);
        assert_eq!(kb.clauses()[0].to_dimacs(), vec![1, -2]);

        let kb = parse_cnf(b"c hi\np cnf 3 2\n1 2 0\n-2 3 0\n").unwrap();
        assert_eq!(kb.len(), 2);
        assert_eq!(kb.num_vars(), 3);
    }

    #[test]
    fn cnf_errors() {
        let e = parse_cnf(b"p cnf 1 1\n1 -1 0\n").unwrap_err();
        assert_eq!(e, ParseError { line: 2, kind: ParseErrorKind::Tautology });
        assert!(matches!(parse_cnf(b"p cnf 1 1\n2 0\n").unwrap_err().kind, ParseErrorKind::LiteralOutOfRange { .. }));
        assert!(matches!(parse_cnf(b"p cnf 2 1\n1 2\n").unwrap_err().kind, ParseErrorKind::MissingTerminator));
        assert!(matches!(parse_cnf(b"p cnf x 1\n").unwrap_err().kind, ParseErrorKind::BadHeader(_)));
        assert!(matches!(parse_cnf(b"1 0\n").unwrap_err().kind, ParseErrorKind::MissingHeader));
        assert!(matches!(parse_cnf(b"p cnf 2 2\n1 0\n").unwrap_err().kind, ParseErrorKind::ClauseCount { .. }));
    }

    #[test]
    fn wcnf_basic() {
        let base = parse_wcnf(b"1 1 0\n2 -1 2 0\n").unwrap();
        assert_eq!(base.len(), 2);
        assert_eq!(base.entries()[0].weight, Weight::Soft(1.0));
        assert_eq!(base.entries()[1].weight, Weight::Soft(2.0));
        assert_eq!(base.entries()[1].clause.to_dimacs(), vec![-1, 2]);
        assert_eq!(base.num_vars(), 2);

        let base = parse_wcnf(b"h 1 0\n").unwrap();
        assert_eq!(base.entries()[0].weight, Weight::Hard);
    }

    #[test]
    fn wcnf_errors() {
        assert!(matches!(parse_wcnf(b"-3 1 0\n").unwrap_err().kind, ParseErrorKind::NonPositiveWeight(_)));
        assert!(matches!(parse_wcnf(b"0 1 0\n").unwrap_err().kind, ParseErrorKind::NonPositiveWeight(_)));
        assert!(matches!(parse_wcnf(b"x 1 0\n").unwrap_err().kind, ParseErrorKind::BadWeight(_)));
        assert!(matches!(parse_wcnf(b"inf 1 0\n").unwrap_err().kind, ParseErrorKind::NonPositiveWeight(_)));
        assert!(matches!(parse_wcnf(b"1 1 a 0\n").unwrap_err().kind, ParseErrorKind::BadLiteral(_)));
    }

    #[test]
    fn writers() {
        assert_eq!(write_cnf(&KnowledgeBase::default()), b"p cnf 0 0\n");
        let base = parse_wcnf(b"1 1 0\n2 -1 2 0\nh 3 0\n0.125 -3 0\n").unwrap();
        let text = String::from_utf8(write_wcnf(&base)).unwrap();
        assert_eq!(text, "1 1 0\n2 -1 2 0\nh 3 0\n0.125 -3 0\n");
        assert_eq!(parse_wcnf(text.as_bytes()).unwrap(), base);
    }

    #[test]
    fn query_file() {
        let q = parse_query(b"1 0\n-2 3 0\n").unwrap();
        assert_eq!(q.clauses().len(), 2);
        assert!(matches!(parse_query(b"c nothing\n").unwrap_err().kind, ParseErrorKind::EmptyQuery));
        assert_eq!(parse_query(&write_query(&q)).unwrap(), q);
    }
}
