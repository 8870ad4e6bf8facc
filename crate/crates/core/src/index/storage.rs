//! Plain-text on-disk layout:
//!
//! ```text
//! <dir>/manifest                 format, document count, variant list
//! <dir>/<variant>/stats          key=value: N, total_terms, avdl, ...
//! <dir>/<variant>/docs.tsv       docno<TAB>length, one line per ordinal
//! <dir>/<variant>/postings.tsv   term<TAB>df<TAB>cf<TAB>doc:tf,doc:tf,...
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{IndexSet, IndexVariant, InvertedIndex, Posting};
use crate::error::{Error, Result};

const FORMAT: &str = "lextune-index-1";

pub fn save_index_set(set: &IndexSet, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let n_docs = set.iter().next().map_or(0, InvertedIndex::n_docs);
    let variants: Vec<_> = set.iter().map(|i| i.variant().dir_name()).collect();
    let manifest = format!("format={FORMAT}\ndocuments={n_docs}\nvariants={}\n", variants.join(","));
    write(&dir.join("manifest"), &manifest)?;
    for index in set.iter() {
        save_index(index, &dir.join(index.variant().dir_name()))?;
    }
    Ok(())
}

pub fn load_index_set(dir: &Path) -> Result<IndexSet> {
    let manifest = parse_kv(&dir.join("manifest"))?;
    check_format(&dir.join("manifest"), &manifest)?;
    let names = manifest
        .get("variants")
        .ok_or_else(|| Error::Invalid(format!("{}: missing variants", dir.display())))?;
    let indexes = names
        .split(',')
        .map(|name| {
            let variant = IndexVariant::from_dir_name(name)
                .ok_or_else(|| Error::Invalid(format!("unknown index variant {name:?}")))?;
            load_index(&dir.join(name), variant)
        })
        .collect::<Result<Vec<_>>>()?;
    IndexSet::from_indexes(indexes)
}

fn save_index(index: &InvertedIndex, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let v = index.variant();
    let stats = format!(
        "format={FORMAT}\nstopper={}\nstemmer={}\nN={}\ntotal_terms={}\navdl={}\nvocabulary={}\n",
        v.stopper,
        v.stemmer,
        index.n_docs(),
        index.total_terms(),
        index.avdl(),
        index.vocabulary_size()
    );
    write(&dir.join("stats"), &stats)?;

    let mut docs = String::new();
    for (docno, len) in index.docnos().iter().zip(index.doc_lengths()) {
        let _ = writeln!(docs, "{docno}\t{len}");
    }
    write(&dir.join("docs.tsv"), &docs)?;

    let mut postings = String::new();
    for (id, term) in index.terms().iter().enumerate() {
        let plist = index.postings_by_id(id as u32);
        let _ = write!(postings, "{term}\t{}\t{}\t", plist.len(), index.cf_by_id(id as u32));
        for (i, p) in plist.iter().enumerate() {
            let sep = if i == 0 { "" } else { "," };
            let _ = write!(postings, "{sep}{}:{}", p.doc, p.tf);
        }
        postings.push('\n');
    }
    write(&dir.join("postings.tsv"), &postings)
}

fn load_index(dir: &Path, variant: IndexVariant) -> Result<InvertedIndex> {
    let stats_path = dir.join("stats");
    let stats = parse_kv(&stats_path)?;
    check_format(&stats_path, &stats)?;
    let stat = |key: &str| -> Result<u64> {
        stats
            .get(key)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Invalid(format!("{}: missing or bad {key}", stats_path.display())))
    };
    let n_docs = stat("N")? as usize;
    let total_terms = stat("total_terms")?;

    let docs_path = dir.join("docs.tsv");
    let mut docnos = Vec::with_capacity(n_docs);
    let mut doc_lengths = Vec::with_capacity(n_docs);
    for (i, line) in read(&docs_path)?.lines().enumerate() {
        let bad = || corrupt(&docs_path, i + 1, "expected docno<TAB>length");
        let (docno, len) = line.split_once('\t').ok_or_else(bad)?;
        docnos.push(docno.to_owned());
        doc_lengths.push(len.parse::<u32>().map_err(|_| bad())?);
    }

    let postings_path = dir.join("postings.tsv");
    let mut terms = Vec::new();
    let mut postings = Vec::new();
    for (i, line) in read(&postings_path)?.lines().enumerate() {
        let bad = |why: &str| corrupt(&postings_path, i + 1, why);
        let fields: Vec<&str> = line.split('\t').collect();
        let [term, df, cf, list] = fields[..] else {
            return Err(bad("expected 4 fields"));
        };
        let plist = list
            .split(',')
            .map(|p| {
                let (d, tf) = p.split_once(':')?;
                Some(Posting {
                    doc: d.parse().ok()?,
                    tf: tf.parse().ok()?,
                })
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("malformed posting"))?;
        if df.parse::<usize>().ok() != Some(plist.len()) {
            return Err(bad("df disagrees with postings"));
        }
        if cf.parse::<u64>().ok() != Some(plist.iter().map(|p| u64::from(p.tf)).sum()) {
            return Err(bad("cf disagrees with postings"));
        }
        if plist.windows(2).any(|w| w[0].doc >= w[1].doc) || plist.iter().any(|p| p.doc as usize >= docnos.len()) {
            return Err(bad("postings out of order or out of range"));
        }
        if terms.last().is_some_and(|t: &String| t.as_str() >= term) {
            return Err(bad("terms not sorted"));
        }
        terms.push(term.to_owned());
        postings.push(plist);
    }

    let index = InvertedIndex::from_parts(variant, terms, postings, doc_lengths, docnos);
    if index.n_docs() != n_docs || index.total_terms() != total_terms {
        return Err(Error::Invalid(format!("{}: stats disagree with data files", stats_path.display())));
    }
    Ok(index)
}

fn corrupt(path: &Path, line: usize, why: &str) -> Error {
    Error::Invalid(format!("{}:{line}: {why}", path.display()))
}

fn check_format(path: &Path, kv: &BTreeMap<String, String>) -> Result<()> {
    match kv.get("format").map(String::as_str) {
        Some(FORMAT) => Ok(()),
        other => Err(Error::Invalid(format!(
            "{}: unsupported index format {other:?}",
            path.display()
        ))),
    }
}

fn parse_kv(path: &Path) -> Result<BTreeMap<String, String>> {
    Ok(read(path)?
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_owned(), v.trim().to_owned()))
        .collect())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
