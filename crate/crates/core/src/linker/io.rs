use std::fmt::Write as _;
use std::path::Path;

use super::MentionContext;
use crate::error::{Error, Result};
use crate::fsutil::{data_lines, read_text};

fn check_field(field: &str, what: &str) -> Result<()> {
    if field.contains(['\t', '\n', '\r']) {
        return Err(Error::Config(format!("{what} `{field}` contains a tab or newline")));
    }
    Ok(())
}

/// `mention_id<TAB>surface<TAB>left tokens<TAB>right tokens`, tokens
/// separated by single spaces.
pub fn write_mentions(mentions: &[MentionContext]) -> Result<String> {
    let mut out = String::from("# mention_id\tsurface\tleft_context\tright_context\n");
    for m in mentions {
        check_field(&m.id, "mention id")?;
        check_field(&m.surface, "surface")?;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            m.id,
            m.surface,
            m.left_tokens.join(" "),
            m.right_tokens.join(" ")
        );
    }
    Ok(out)
}

pub(crate) fn split_tokens(field: &str) -> Vec<String> {
    field.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect()
}

/// Parses the four leading mention columns of a record.
pub(crate) fn mention_from_fields(fields: &[&str], origin: &str, line: usize) -> Result<MentionContext> {
    if fields.len() < 4 {
        return Err(Error::parse(
            origin,
            line,
            format!("expected at least 4 fields, found {}", fields.len()),
        ));
    }
    if fields[0].is_empty() {
        return Err(Error::parse(origin, line, "empty mention id"));
    }
    Ok(MentionContext::new(
        fields[0],
        fields[1],
        split_tokens(fields[2]),
        split_tokens(fields[3]),
    ))
}

pub fn parse_mentions(text: &str, origin: &str) -> Result<Vec<MentionContext>> {
    let mut seen = std::collections::HashSet::new();
    data_lines(text)
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(
                    origin,
                    n,
                    format!("expected 4 fields, found {}", fields.len()),
                ));
            }
            let m = mention_from_fields(&fields, origin, n)?;
            if !seen.insert(m.id.clone()) {
                return Err(Error::parse(origin, n, format!("duplicate mention id `{}`", m.id)));
            }
            Ok(m)
        })
        .collect()
}

pub fn read_mentions(path: &Path) -> Result<Vec<MentionContext>> {
    parse_mentions(&read_text(path)?, &path.display().to_string())
}

/// One ranked candidate of one mention. `d_w` is the ranking key (lower is
/// better); the component distances are absent for methods that have none.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub mention_id: String,
    pub entity_id: String,
    pub d_syx: Option<f64>,
    pub d_smc: Option<f64>,
    pub d_w: f64,
    pub rank: usize,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Writes predictions preceded by `# key=value` header lines.
pub fn write_predictions(preds: &[Prediction], header: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str("# mention_id\tentity_id\td_syx\td_smc\td_w\trank\n");
    for p in preds {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            p.mention_id,
            p.entity_id,
            opt(p.d_syx),
            opt(p.d_smc),
            p.d_w,
            p.rank
        );
    }
    out
}

/// Parses predictions and their `# key=value` header entries.
pub fn parse_predictions(text: &str, origin: &str) -> Result<(Vec<Prediction>, Vec<(String, String)>)> {
    let header = text
        .lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let num = |s: &str, n: usize| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::parse(origin, n, format!("bad number `{s}`")))
    };
    let preds = data_lines(text)
        .map(|(n, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 6 {
                return Err(Error::parse(origin, n, format!("expected 6 fields, found {}", f.len())));
            }
            let maybe = |s: &str| -> Result<Option<f64>> {
                if s == "-" {
                    Ok(None)
                } else {
                    num(s, n).map(Some)
                }
            };
            Ok(Prediction {
                mention_id: f[0].to_string(),
                entity_id: f[1].to_string(),
                d_syx: maybe(f[2])?,
                d_smc: maybe(f[3])?,
                d_w: num(f[4], n)?,
                rank: f[5]
                    .parse()
                    .map_err(|_| Error::parse(origin, n, format!("bad rank `{}`", f[5])))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((preds, header))
}

pub fn read_predictions(path: &Path) -> Result<(Vec<Prediction>, Vec<(String, String)>)> {
    parse_predictions(&read_text(path)?, &path.display().to_string())
}
