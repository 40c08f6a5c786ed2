//! Standoff annotation files.
//!
//! One document per file: a `#doc <id>` header line, then one
//! tab-separated line per annotation:
//!
//! ```text
//! #doc ex_pcargument
//! Claim <TAB> 102 <TAB> 136 <TAB> kind=CibVc;indicator=doctors reported
//! ```
//!
//! Offsets count Unicode scalar values. The document text is stored
//! alongside as `<id>.txt`. Feature values escape `\`, `;`, `=`, tab and
//! newline.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::text::{Annotation, Document, Span};

#[derive(Debug, Error)]
pub enum StandoffError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("missing text file for {0}")]
    MissingText(String),
}

/// A document read back from standoff storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandoffDoc {
    pub id: String,
    pub text: String,
    pub annotations: Vec<Annotation>,
}

impl StandoffDoc {
    pub fn annotations_of<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a Annotation> {
        self.annotations.iter().filter(move |a| a.ty == ty)
    }
}

/// Serialise a document's annotations, optionally restricted to some
/// types. Lines are sorted by (start, end, type, features) so output is
/// deterministic regardless of annotation insertion order.
pub fn standoff_string(doc: &Document, types: Option<&[&str]>) -> String {
    let mut lines: Vec<(Span, &str, String)> = doc
        .annotations()
        .iter()
        .filter(|a| types.is_none_or(|ts| ts.contains(&a.ty.as_str())))
        .map(|a| (a.span, a.ty.as_str(), features_string(&a.features)))
        .collect();
    lines.sort();
    let mut out = format!("#doc {}\n", doc.id);
    for (span, ty, features) in lines {
        out.push_str(&format!("{ty}\t{}\t{}\t{features}\n", span.start, span.end));
    }
    out
}

fn features_string(features: &BTreeMap<String, String>) -> String {
    features
        .iter()
        .map(|(k, v)| format!("{}={}", escape(k), escape(v)))
        .collect::<Vec<_>>()
        .join(";")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            ';' => out.push_str("\\;"),
            '=' => out.push_str("\\="),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Split at unescaped separators, keeping escape sequences intact.
fn split_preserving(s: &str, sep: char) -> Vec<String> {
    let mut parts = vec![String::new()];
    let mut escaped = false;
    for c in s.chars() {
        if escaped {
            parts.last_mut().unwrap().push(c);
            escaped = false;
        } else if c == '\\' {
            parts.last_mut().unwrap().push(c);
            escaped = true;
        } else if c == sep {
            parts.push(String::new());
        } else {
            parts.last_mut().unwrap().push(c);
        }
    }
    parts
}

fn unescape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut escaped = false;
    for c in s.chars() {
        if escaped {
            out.push(match c {
                't' => '\t',
                'n' => '\n',
                other => other,
            });
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else {
            out.push(c);
        }
    }
    out
}

/// Parse one standoff file given its document text.
pub fn parse_standoff(
    content: &str,
    text: &str,
    path: &str,
) -> Result<StandoffDoc, StandoffError> {
    let parse_err = |line: usize, reason: String| StandoffError::Parse {
        path: path.to_string(),
        line,
        reason,
    };
    let mut lines = content.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty standoff file".to_string()))?;
    let id = header
        .strip_prefix("#doc ")
        .ok_or_else(|| parse_err(1, format!("expected `#doc <id>`, found {header:?}")))?
        .trim()
        .to_string();

    let char_len = text.chars().count();
    let mut annotations = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() < 3 {
            return Err(parse_err(
                lineno,
                format!("expected TYPE\\tstart\\tend, found {line:?}"),
            ));
        }
        let ty = fields[0].to_string();
        let start: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad start offset {:?}", fields[1])))?;
        let end: usize = fields[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad end offset {:?}", fields[2])))?;
        if start > end || end > char_len {
            return Err(parse_err(
                lineno,
                format!("span [{start}, {end}) out of bounds for text of length {char_len}"),
            ));
        }
        let mut features = BTreeMap::new();
        if let Some(raw) = fields.get(3) {
            if !raw.is_empty() {
                for pair in split_preserving(raw, ';') {
                    let kv = split_preserving(&pair, '=');
                    if kv.len() != 2 {
                        return Err(parse_err(lineno, format!("bad feature pair {pair:?}")));
                    }
                    features.insert(unescape(&kv[0]), unescape(&kv[1]));
                }
            }
        }
        annotations.push(Annotation {
            id: annotations.len() as u32,
            ty,
            span: Span::new(start, end),
            features,
        });
    }
    Ok(StandoffDoc {
        id,
        text: text.to_string(),
        annotations,
    })
}

/// Load every `<id>.ann` / `<id>.txt` pair from a directory, sorted by id.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<StandoffDoc>, StandoffError> {
    let read_dir = std::fs::read_dir(dir).map_err(|source| StandoffError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut ann_paths: Vec<std::path::PathBuf> = read_dir
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "ann"))
        .collect();
    ann_paths.sort();

    let mut docs = Vec::new();
    for ann_path in ann_paths {
        let txt_path = ann_path.with_extension("txt");
        if !txt_path.exists() {
            return Err(StandoffError::MissingText(ann_path.display().to_string()));
        }
        let text = read(&txt_path)?;
        let content = read(&ann_path)?;
        docs.push(parse_standoff(
            &content,
            &text,
            &ann_path.display().to_string(),
        )?);
    }
    Ok(docs)
}

fn read(path: &Path) -> Result<String, StandoffError> {
    std::fs::read_to_string(path).map_err(|source| StandoffError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Write a file atomically: write a sibling temp file, then rename.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let tmp = path.with_extension(match path.extension() {
        Some(ext) => format!("{}.tmp", ext.to_string_lossy()),
        None => "tmp".to_string(),
    });
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}
