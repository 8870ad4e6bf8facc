use std::path::Path;

use super::TopicId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub id: TopicId,
    pub title: String,
    pub description: Option<String>,
}

/// Which topic fields make up the query text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueryField {
    #[default]
    Title,
    TitleDescription,
}

impl Topic {
    pub fn query_text(&self, field: QueryField) -> String {
        match (field, &self.description) {
            (QueryField::TitleDescription, Some(desc)) => format!("{} {desc}", self.title),
            _ => self.title.clone(),
        }
    }
}

pub fn read_topics(path: &Path) -> Result<Vec<Topic>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_topics(&text)
}

/// Parses TREC topic files (`<top><num>..<title>..`) or `id<TAB>query` lines.
/// The result is sorted by topic id.
pub fn parse_topics(text: &str) -> Result<Vec<Topic>> {
    let mut topics = if text.contains("<top>") {
        parse_trec(text)?
    } else {
        parse_tsv(text)?
    };
    topics.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = topics.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::Invalid(format!("duplicate topic {}", w[0].id)));
    }
    Ok(topics)
}

fn parse_tsv(text: &str) -> Result<Vec<Topic>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let (id, query) = l
                .split_once('\t')
                .ok_or_else(|| Error::parse(i + 1, "expected topic_id<TAB>query"))?;
            Ok(Topic {
                id: TopicId::new(id.trim()),
                title: query.trim().to_owned(),
                description: None,
            })
        })
        .collect()
}

/// Text after `tag` up to the next `<`, with an optional label such as
/// `Number:` removed.
fn field<'a>(block: &'a str, tag: &str, label: &str) -> Option<&'a str> {
    let start = block.find(tag)? + tag.len();
    let rest = &block[start..];
    let end = rest.find('<').unwrap_or(rest.len());
    let value = rest[..end].trim();
    Some(value.strip_prefix(label).unwrap_or(value).trim())
}

fn parse_trec(text: &str) -> Result<Vec<Topic>> {
    let mut topics = Vec::new();
    let mut pos = 0;
    while let Some(off) = text[pos..].find("<top>") {
        let start = pos + off;
        let end = text[start..].find("</top>").map_or(text.len(), |e| start + e);
        let block = &text[start..end];
        let line = text[..start].lines().count() + 1;
        let id = field(block, "<num>", "Number:").ok_or_else(|| Error::parse(line, "topic without <num>"))?;
        let title = field(block, "<title>", "Topic:").ok_or_else(|| Error::parse(line, "topic without <title>"))?;
        let description = field(block, "<desc>", "Description:").map(|d| d.split_whitespace().collect::<Vec<_>>().join(" "));
        topics.push(Topic {
            id: TopicId::new(id),
            title: title.split_whitespace().collect::<Vec<_>>().join(" "),
            description,
        });
        pos = end;
    }
    Ok(topics)
}
