use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct Document {
    pub docno: String,
    pub text: String,
}

impl Document {
    pub fn new(docno: impl Into<String>, text: impl Into<String>) -> Self {
        Document {
            docno: docno.into(),
            text: text.into(),
        }
    }
}

pub fn read_corpus(path: &Path) -> Result<Vec<Document>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&text)
}

/// Parses either TREC SGML (`<DOC><DOCNO>..</DOCNO>..</DOC>`) or JSON lines
/// with `docno` and `text` fields; the first non-blank character decides.
/// Docnos must be unique.
pub fn parse_corpus(text: &str) -> Result<Vec<Document>> {
    let docs = match text.trim_start().chars().next() {
        None => Vec::new(),
        Some('<') => parse_trec(text)?,
        Some('{') => parse_jsonl(text)?,
        Some(c) => return Err(Error::parse(1, format!("unrecognized corpus format (starts with {c:?})"))),
    };
    let mut seen = HashSet::new();
    for d in &docs {
        if d.docno.is_empty() {
            return Err(Error::Invalid("empty docno".into()));
        }
        if !seen.insert(d.docno.as_str()) {
            return Err(Error::DuplicateDocno(d.docno.clone()));
        }
    }
    Ok(docs)
}

fn parse_jsonl(text: &str) -> Result<Vec<Document>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str::<Document>(l).map_err(|e| Error::parse(i + 1, e.to_string())))
        .collect()
}

fn line_of(text: &str, byte: usize) -> usize {
    text[..byte].bytes().filter(|&b| b == b'\n').count() + 1
}

fn parse_trec(text: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut pos = 0;
    while let Some(off) = text[pos..].find("<DOC>") {
        let start = pos + off + "<DOC>".len();
        let end = text[start..]
            .find("</DOC>")
            .map(|e| start + e)
            .ok_or_else(|| Error::parse(line_of(text, start), "unterminated <DOC>"))?;
        let body = &text[start..end];
        let (docno, rest) = extract_docno(body).ok_or_else(|| Error::parse(line_of(text, start), "missing <DOCNO>"))?;
        docs.push(Document::new(docno, strip_tags(&rest)));
        pos = end + "</DOC>".len();
    }
    Ok(docs)
}

fn extract_docno(body: &str) -> Option<(String, String)> {
    let open = body.find("<DOCNO>")?;
    let inner = open + "<DOCNO>".len();
    let close = inner + body[inner..].find("</DOCNO>")?;
    let docno = body[inner..close].trim().to_owned();
    let rest = format!("{} {}", &body[..open], &body[close + "</DOCNO>".len()..]);
    Some((docno, rest))
}

fn strip_tags(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_tag = false;
    for c in s.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                out.push(' ');
            }
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}
