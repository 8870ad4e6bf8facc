//! TREC run and qrels files.
//!
//! Runs are `topic Q0 docno rank score tag`, qrels are
//! `topic iteration docno grade`, both whitespace separated.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use super::{Qrels, RunFile};
use crate::error::{Error, Result};
use crate::retrieval::{Ranking, ScoredDoc, TopicId};
use crate::scalar::Scalar;

/// Formats like C's `%.6g`.
pub fn format_score(x: f64) -> String {
    format_g(x, 6)
}

fn format_g(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = precision.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn read_run<F: Scalar>(path: &Path) -> Result<RunFile<F>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_run(&text)
}

pub fn read_qrels(path: &Path) -> Result<Qrels> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_qrels(&text)
}

struct RunLine<'a> {
    line: usize,
    docno: &'a str,
    rank: u64,
    score: f64,
}

/// Parses a run. Within a topic, lines are ordered by their rank field and
/// scores must not increase with rank; the result is then put in canonical
/// order (score descending, docno ascending). The tag is taken from the
/// first line.
pub fn parse_run<F: Scalar>(text: &str) -> Result<RunFile<F>> {
    let mut tag: Option<String> = None;
    let mut topics: BTreeMap<TopicId, Vec<RunLine>> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let [topic, _q0, docno, rank, score, run_tag] = fields[..] else {
            return Err(Error::parse(
                line,
                format!("expected 6 fields (topic Q0 docno rank score tag), found {}", fields.len()),
            ));
        };
        let rank = rank
            .parse()
            .map_err(|_| Error::parse(line, format!("bad rank {rank:?}")))?;
        let score: f64 = score
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::parse(line, format!("bad score {score:?}")))?;
        tag.get_or_insert_with(|| run_tag.to_owned());
        topics.entry(TopicId::new(topic)).or_default().push(RunLine {
            line,
            docno,
            rank,
            score,
        });
    }

    let mut rankings = BTreeMap::new();
    for (topic, mut lines) in topics {
        lines.sort_by_key(|l| l.rank);
        let mut seen = HashSet::new();
        for (k, l) in lines.iter().enumerate() {
            if !seen.insert(l.docno) {
                return Err(Error::parse(l.line, format!("duplicate docno {} in topic {topic}", l.docno)));
            }
            if k > 0 && l.score > lines[k - 1].score {
                return Err(Error::Monotonicity {
                    line: l.line,
                    topic: topic.to_string(),
                });
            }
        }
        let entries: Vec<_> = lines
            .iter()
            .map(|l| ScoredDoc {
                docno: l.docno.to_owned(),
                score: F::lit(l.score),
            })
            .collect();
        let depth = entries.len();
        rankings.insert(topic.clone(), Ranking::from_scored(topic, entries, depth));
    }
    Ok(RunFile {
        tag: tag.unwrap_or_default(),
        rankings,
    })
}

/// Renders a run with ranks recomputed from order and scores in `%.6g`.
pub fn write_run<F: Scalar>(run: &RunFile<F>) -> String {
    let mut out = String::new();
    for (topic, ranking) in &run.rankings {
        for (k, e) in ranking.entries.iter().enumerate() {
            let _ = writeln!(
                out,
                "{topic} Q0 {} {} {} {}",
                e.docno,
                k + 1,
                format_score(e.score.as_f64()),
                run.tag
            );
        }
    }
    out
}

pub fn parse_qrels(text: &str) -> Result<Qrels> {
    let mut judgments: BTreeMap<TopicId, BTreeMap<String, i32>> = BTreeMap::new();
    let mut first_line: HashMap<(TopicId, String), usize> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let [topic, _iter, docno, grade] = fields[..] else {
            return Err(Error::parse(
                line,
                format!("expected 4 fields (topic iteration docno grade), found {}", fields.len()),
            ));
        };
        let grade: i32 = grade
            .parse()
            .map_err(|_| Error::parse(line, format!("bad grade {grade:?}")))?;
        let topic = TopicId::new(topic);
        if let Some(prev) = first_line.insert((topic.clone(), docno.to_owned()), line) {
            return Err(Error::parse(
                line,
                format!("duplicate judgment for ({topic}, {docno}), first at line {prev}"),
            ));
        }
        judgments.entry(topic).or_default().insert(docno.to_owned(), grade);
    }
    Ok(Qrels::new(judgments))
}

/// Renders qrels by topic, then docno.
pub fn write_qrels(qrels: &Qrels) -> String {
    let mut out = String::new();
    for (topic, docs) in qrels.judgments() {
        for (docno, grade) in docs {
            let _ = writeln!(out, "{topic} 0 {docno} {grade}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_c() {
        let cases = [
            (2.5, "2.5"),
            (0.0, "0"),
            (1.0, "1"),
            (-0.451985, "-0.451985"),
            (-0.45198512374, "-0.451985"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.0001234567, "0.000123457"),
            (0.00001234567, "1.23457e-05"),
            (100.0, "100"),
            (999999.5, "1e+06"),
            (-3.0e-10, "-3e-10"),
        ];
        for (x, s) in cases {
            assert_eq!(format_score(x), s, "{x}");
        }
    }

    #[test]
    fn run_line_round_trips() {
        let text = "301 Q0 NYT1 1 2.5 boir\n";
        let run: RunFile<f64> = parse_run(text).unwrap();
        assert_eq!(write_run(&run), text);
    }

    #[test]
    fn five_fields_is_a_parse_error() {
        let err = parse_run::<f64>("301 Q0 NYT1 1 2.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn ties_reordered_by_docno_on_write() {
        let run: RunFile<f64> = parse_run("1 Q0 B 1 3.0 t\n1 Q0 A 2 3.0 t\n").unwrap();
        assert_eq!(write_run(&run), "1 Q0 A 1 3 t\n1 Q0 B 2 3 t\n");
    }

    #[test]
    fn increasing_scores_rejected() {
        let err = parse_run::<f64>("1 Q0 A 1 1.0 t\n1 Q0 B 2 2.0 t\n").unwrap_err();
        assert!(matches!(err, Error::Monotonicity { line: 2, .. }));
    }

    #[test]
    fn line_order_within_topic_is_irrelevant() {
        let a: RunFile<f64> = parse_run("1 Q0 A 1 3 t\n1 Q0 B 2 2 t\n2 Q0 C 1 1 t\n").unwrap();
        let b: RunFile<f64> = parse_run("2 Q0 C 1 1 t\n1 Q0 B 2 2 t\n1 Q0 A 1 3 t\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn qrels_round_trip_and_duplicates() {
        let text = "301 0 a 1\n301 0 b 0\n302 0 c 2\n";
        let q = parse_qrels(text).unwrap();
        assert_eq!(write_qrels(&q), text);
        assert!(matches!(parse_qrels("1 0 a 1\n1 0 a 2\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_qrels("1 0 a\n"), Err(Error::Parse { line: 1, .. })));
    }
}
