//! Gazetteer: load term lists bound to majorTypes and annotate every
//! occurrence in a document as a `Lookup` annotation, then promote
//! Lookups to typed annotations.
//!
//! A `.def` file binds list files to types, one binding per line:
//!
//! ```text
//! cancerRelatedWords.lst:CancerRelatedWords
//! peopleInvolved.lst:PeopleInvolved:Person
//! ```
//!
//! List files are UTF-8 with one multiword term per line and `#` comments.
//! Matching is case-insensitive at token level: each term is tokenised
//! with the same tokenizer as the documents, and the longest match wins.
//! Matching scans left to right independently per majorType, consuming
//! matched tokens, so no two Lookups of one majorType overlap while
//! overlapping matches of different majorTypes are all kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::text::{list_lines, tokenize, Document, Span};

#[derive(Debug, Error)]
pub enum GazetteerError {
    #[error("gazetteer file not found: {0}")]
    MissingFile(String),
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed def line {line} in {path}: {reason}")]
    MalformedDef {
        path: String,
        line: usize,
        reason: String,
    },
}

/// One term bound to a majorType (and optional minorType).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GazetteerEntry {
    /// Lowercase token sequence of the term.
    pub term: Vec<String>,
    pub major_type: String,
    pub minor_type: Option<String>,
}

#[derive(Debug, Default)]
struct TrieNode {
    children: HashMap<String, TrieNode>,
    /// majorType -> minorType for terms ending at this node.
    payloads: BTreeMap<String, Option<String>>,
}

/// Token-level trie over lowercase multiword terms, for longest-match
/// lookup. Immutable after load; shareable across parallel annotators.
#[derive(Debug, Default)]
pub struct Gazetteer {
    root: TrieNode,
    major_types: BTreeSet<String>,
    entry_count: usize,
}

impl Gazetteer {
    /// Load a gazetteer from a `.def` file.
    ///
    /// Every referenced `.lst` must exist. A term bound twice to the same
    /// majorType keeps the last binding (logged), it is not an error.
    pub fn load(def_path: &Path) -> Result<Gazetteer, GazetteerError> {
        if !def_path.exists() {
            return Err(GazetteerError::MissingFile(def_path.display().to_string()));
        }
        let def_text = read(def_path)?;
        let base = def_path.parent().unwrap_or_else(|| Path::new("."));

        let mut gazetteer = Gazetteer::default();
        for (lineno, line) in def_text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(':');
            let file = parts.next().unwrap_or_default().trim();
            let major = parts.next().map(str::trim);
            let minor = parts.next().map(|s| s.trim().to_string());
            let major = match major {
                Some(m) if !m.is_empty() && !file.is_empty() => m.to_string(),
                _ => {
                    return Err(GazetteerError::MalformedDef {
                        path: def_path.display().to_string(),
                        line: lineno + 1,
                        reason: "expected `file.lst:MajorType[:MinorType]`".to_string(),
                    })
                }
            };
            let list_path: PathBuf = base.join(file);
            if !list_path.exists() {
                return Err(GazetteerError::MissingFile(list_path.display().to_string()));
            }
            let list_text = read(&list_path)?;
            for term_line in list_lines(&list_text) {
                gazetteer.insert(term_line, &major, minor.clone());
            }
        }
        Ok(gazetteer)
    }

    /// Build a gazetteer directly from (term line, majorType) pairs.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str)>) -> Gazetteer {
        let mut gazetteer = Gazetteer::default();
        for (term, major) in entries {
            gazetteer.insert(term, major, None);
        }
        gazetteer
    }

    fn insert(&mut self, term_line: &str, major: &str, minor: Option<String>) {
        let term: Vec<String> = tokenize(term_line, &[])
            .iter()
            .map(|t| t.lower())
            .collect();
        if term.is_empty() {
            return;
        }
        let mut node = &mut self.root;
        for tok in &term {
            node = node.children.entry(tok.clone()).or_default();
        }
        if let Some(previous) = node.payloads.insert(major.to_string(), minor) {
            log::debug!(
                "duplicate gazetteer entry {term:?} for majorType {major}; \
                 replacing previous minorType {previous:?}"
            );
        } else {
            self.entry_count += 1;
        }
        self.major_types.insert(major.to_string());
    }

    pub fn len(&self) -> usize {
        self.entry_count
    }

    pub fn is_empty(&self) -> bool {
        self.entry_count == 0
    }

    pub fn major_types(&self) -> impl Iterator<Item = &str> {
        self.major_types.iter().map(String::as_str)
    }

    /// Longest match of the given majorType starting at token `start`.
    /// Returns the number of tokens matched and the minorType.
    fn longest_match(
        &self,
        lowered: &[String],
        start: usize,
        major: &str,
    ) -> Option<(usize, Option<String>)> {
        let mut node = &self.root;
        let mut best = None;
        for (depth, tok) in lowered[start..].iter().enumerate() {
            match node.children.get(tok) {
                Some(child) => node = child,
                None => break,
            }
            if let Some(minor) = node.payloads.get(major) {
                best = Some((depth + 1, minor.clone()));
            }
        }
        best
    }
}

/// Annotate every gazetteer match in the document as a `Lookup`
/// annotation carrying `majorType` (and `minorType` when present).
///
/// Idempotent: running it twice adds no new annotations.
pub fn annotate_lookups(doc: &mut Document, gazetteer: &Gazetteer) {
    let lowered: Vec<String> = doc.tokens.iter().map(|t| t.lower()).collect();
    let mut matches: Vec<(Span, String, Option<String>)> = Vec::new();

    for major in gazetteer.major_types() {
        let mut pos = 0;
        while pos < lowered.len() {
            match gazetteer.longest_match(&lowered, pos, major) {
                Some((ntokens, minor)) => {
                    let span = Span::new(
                        doc.tokens[pos].span.start,
                        doc.tokens[pos + ntokens - 1].span.end,
                    );
                    matches.push((span, major.to_string(), minor));
                    pos += ntokens;
                }
                None => pos += 1,
            }
        }
    }

    matches.sort();
    for (span, major, minor) in matches {
        let mut features = BTreeMap::new();
        features.insert("majorType".to_string(), major);
        if let Some(minor) = minor {
            features.insert("minorType".to_string(), minor);
        }
        doc.add_annotation("Lookup", span, features);
    }
}

/// Give each `Lookup` a sibling annotation typed after its majorType,
/// over the same span. Lookups are retained.
pub fn promote_lookups(doc: &mut Document) {
    let promotions: Vec<(String, Span, Option<String>)> = doc
        .annotations_of("Lookup")
        .filter_map(|a| {
            a.feature("majorType").map(|major| {
                (
                    major.to_string(),
                    a.span,
                    a.feature("minorType").map(String::from),
                )
            })
        })
        .collect();
    for (ty, span, minor) in promotions {
        let mut features = BTreeMap::new();
        if let Some(minor) = minor {
            features.insert("minorType".to_string(), minor);
        }
        doc.add_annotation(ty, span, features);
    }
}

fn read(path: &Path) -> Result<String, GazetteerError> {
    std::fs::read_to_string(path).map_err(|source| GazetteerError::Io {
        path: path.display().to_string(),
        source,
    })
}
