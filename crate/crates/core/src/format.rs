//! Poset file formats.
//!
//! Text: first non-comment line is `n`; each further line `u v` means `u < v`
//! (0-indexed). `#` starts a comment. JSON: `{"n": 3, "relations": [[0, 1]]}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::set::MAX_ELEMENTS;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct PosetJson {
    pub n: usize,
    pub relations: Vec<(usize, usize)>,
}

impl From<&Poset> for PosetJson {
    fn from(p: &Poset) -> Self {
        PosetJson { n: p.n(), relations: p.cover_relations() }
    }
}

/// Parse either format, sniffing JSON by a leading `{`.
pub fn parse_poset(input: &str) -> Result<Poset> {
    if input.trim_start().starts_with('{') {
        parse_json(input)
    } else {
        parse_text(input)
    }
}

pub fn parse_json(input: &str) -> Result<Poset> {
    let doc: PosetJson = serde_json::from_str(input).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    build(doc.n, doc.relations.iter().map(|&r| (r, 1)).collect())
}

pub fn parse_text(input: &str) -> Result<Poset> {
    let mut n: Option<usize> = None;
    let mut pairs = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match n {
            None => {
                if fields.len() != 1 {
                    return Err(err(format!("expected element count, found `{line}`")));
                }
                let v: usize = fields[0].parse().map_err(|_| err(format!("invalid element count `{}`", fields[0])))?;
                if v > MAX_ELEMENTS {
                    return Err(err(format!("element count {v} exceeds {MAX_ELEMENTS}")));
                }
                n = Some(v);
            }
            Some(n) => {
                if fields.len() != 2 {
                    return Err(err(format!("expected `u v`, found `{line}`")));
                }
                let parse = |s: &str| -> Result<usize> {
                    let v: usize = s.parse().map_err(|_| err(format!("invalid element `{s}`")))?;
                    if v >= n {
                        return Err(err(format!("element {v} out of range 0..{n}")));
                    }
                    Ok(v)
                };
                let u = parse(fields[0])?;
                let v = parse(fields[1])?;
                pairs.push(((u, v), line_no));
            }
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, message: "missing element count".into() })?;
    build(n, pairs)
}

/// Builds the poset, attributing a cycle to the first line that closes one.
fn build(n: usize, pairs: Vec<((usize, usize), usize)>) -> Result<Poset> {
    if n > MAX_ELEMENTS {
        return Err(Error::Parse { line: 1, message: format!("element count {n} exceeds {MAX_ELEMENTS}") });
    }
    // reach[x] = everything >= x reachable so far (reflexive).
    let mut reach: Vec<u64> = (0..n).map(|x| 1u64 << x).collect();
    for &((u, v), line) in &pairs {
        if u >= n || v >= n {
            return Err(Error::Parse { line, message: format!("element out of range 0..{n}") });
        }
        if reach[v] >> u & 1 == 1 {
            return Err(Error::Parse {
                line,
                message: format!("relation {u} < {v} closes a cycle"),
            });
        }
        let add = reach[v];
        for r in reach.iter_mut() {
            if *r >> u & 1 == 1 {
                *r |= add;
            }
        }
    }
    let rel: Vec<(usize, usize)> = pairs.into_iter().map(|(r, _)| r).collect();
    Poset::from_cover_relations(n, &rel)
}

/// Text form: `n` then one cover relation per line.
pub fn to_text(p: &Poset) -> String {
    let mut s = format!("{}\n", p.n());
    for (u, v) in p.cover_relations() {
        s.push_str(&format!("{u} {v}\n"));
    }
    s
}

pub fn to_json(p: &Poset) -> String {
    serde_json::to_string(&PosetJson::from(p)).expect("poset JSON")
}
