//! Core document representation: Unicode text, character-offset spans,
//! tokens, sentences, and standoff annotations.
//!
//! Offsets count Unicode scalar values, not bytes, so spans stay portable
//! across implementations. A [`Document`] keeps a char-to-byte table so
//! slicing by span is cheap.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;

use thiserror::Error;

/// A half-open character-offset range into a document's text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    /// Inclusive start, counted in Unicode scalar values.
    pub start: usize,
    /// Exclusive end.
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end, "span start {start} > end {end}");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    /// True if `other` lies entirely within `self`.
    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn contains_offset(&self, offset: usize) -> bool {
        self.start <= offset && offset < self.end
    }

    /// True if the two spans share at least one character.
    pub fn overlaps(&self, other: Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Number,
    Punct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PosTag {
    Verb,
    Noun,
    Conj,
    Other,
}

/// A single token with its surface form copied out of the document text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub span: Span,
    pub surface: String,
    pub kind: TokenKind,
    pub pos: Option<PosTag>,
}

impl Token {
    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// A sentence with its token range and the span of its final terminator.
///
/// `terminal` is the span of the sentence-final `.`, `?` or `!`; for an
/// unpunctuated sentence it is the empty span at the sentence end. In both
/// cases `terminal.end == span.end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub span: Span,
    pub token_range: Range<usize>,
    pub terminal: Span,
}

/// A typed standoff annotation over a span, with a feature map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub id: u32,
    pub ty: String,
    pub span: Span,
    pub features: BTreeMap<String, String>,
}

impl Annotation {
    pub fn feature(&self, name: &str) -> Option<&str> {
        self.features.get(name).map(String::as_str)
    }
}

/// A document: text plus tokens, sentences, and annotations.
///
/// All span offsets are validated against the text on construction and on
/// every `add_annotation`. Documents are plain values; the pipeline never
/// shares mutable state between them, so they can be processed in parallel.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: String,
    text: String,
    /// char index -> byte index, length `char_len + 1`.
    char_to_byte: Vec<usize>,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Sentence>,
    annotations: Vec<Annotation>,
    next_ann_id: u32,
}

impl Document {
    /// Build a document: split sentences, tokenize, and assign each
    /// sentence its token range.
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Document {
        let text = text.into();
        let mut char_to_byte: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        char_to_byte.push(text.len());

        let mut sentences = split_sentences(&text);
        let tokens = tokenize(&text, &sentences);

        // Token ranges: tokens are sorted and each lies in exactly one sentence.
        let mut tok_idx = 0;
        for sentence in &mut sentences {
            let range_start = tok_idx;
            while tok_idx < tokens.len() && sentence.span.contains(tokens[tok_idx].span) {
                tok_idx += 1;
            }
            sentence.token_range = range_start..tok_idx;
        }
        debug_assert_eq!(tok_idx, tokens.len(), "tokens not covered by sentences");

        Document {
            id: id.into(),
            text,
            char_to_byte,
            tokens,
            sentences,
            annotations: Vec::new(),
            next_ann_id: 0,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Document length in Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.char_to_byte.len() - 1
    }

    /// The text covered by `span`.
    pub fn slice(&self, span: Span) -> &str {
        &self.text[self.char_to_byte[span.start]..self.char_to_byte[span.end]]
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn annotations_of<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a Annotation> {
        self.annotations.iter().filter(move |a| a.ty == ty)
    }

    /// Add an annotation, deduplicating on (type, span, features).
    ///
    /// Returns the id of the new annotation, or `None` when an identical
    /// one already exists. Dedup keeps repeated pipeline stages idempotent.
    pub fn add_annotation(
        &mut self,
        ty: impl Into<String>,
        span: Span,
        features: BTreeMap<String, String>,
    ) -> Option<u32> {
        let ty = ty.into();
        assert!(!ty.is_empty(), "annotation type must be nonempty");
        assert!(
            span.end <= self.char_len(),
            "annotation span {span} out of bounds for document {} (len {})",
            self.id,
            self.char_len()
        );
        if self
            .annotations
            .iter()
            .any(|a| a.ty == ty && a.span == span && a.features == features)
        {
            return None;
        }
        let id = self.next_ann_id;
        self.next_ann_id += 1;
        self.annotations.push(Annotation {
            id,
            ty,
            span,
            features,
        });
        Some(id)
    }

    /// Index of the sentence containing the given token index.
    pub fn sentence_of_token(&self, token_idx: usize) -> Option<usize> {
        self.sentences
            .iter()
            .position(|s| s.token_range.contains(&token_idx))
    }

    /// Tokens of one sentence.
    pub fn sentence_tokens(&self, sentence_idx: usize) -> &[Token] {
        let range = self.sentences[sentence_idx].token_range.clone();
        &self.tokens[range]
    }

    /// Index of the token starting at the given char offset, if any.
    pub fn token_starting_at(&self, offset: usize) -> Option<usize> {
        self.tokens
            .binary_search_by_key(&offset, |t| t.span.start)
            .ok()
    }
}

// ---------------------------------------------------------------------------
// Sentence splitting
// ---------------------------------------------------------------------------

/// Abbreviations that block a sentence split on their final period.
const ABBREVIATIONS: &[&str] = &["e.g.", "i.e.", "et al.", "dr.", "vs."];

const TERMINATORS: [char; 3] = ['.', '?', '!'];

/// Split text into sentences covering all non-whitespace characters.
///
/// A run of `.`, `?`, `!` ends a sentence when followed by whitespace or the
/// end of text; a lone period is suppressed after a known abbreviation. A
/// final unpunctuated stretch becomes a sentence with an empty terminal at
/// its end.
pub fn split_sentences(text: &str) -> Vec<Sentence> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut sentences = Vec::new();
    let mut i = 0;

    while i < n {
        // Skip inter-sentence whitespace.
        while i < n && chars[i].is_whitespace() {
            i += 1;
        }
        if i >= n {
            break;
        }
        let start = i;
        let mut end = None; // (sentence end, terminal span)
        while i < n {
            let c = chars[i];
            if TERMINATORS.contains(&c) {
                // Gather the full terminator run.
                let run_start = i;
                let mut j = i;
                while j < n && TERMINATORS.contains(&chars[j]) {
                    j += 1;
                }
                let followed_ok = j >= n || chars[j].is_whitespace();
                let single_period = j - run_start == 1 && c == '.';
                if followed_ok && !(single_period && is_abbreviation_end(&chars, i)) {
                    end = Some((j, Span::new(j - 1, j)));
                    i = j;
                    break;
                }
                i = j;
            } else {
                i += 1;
            }
        }
        let (sent_end, terminal) = end.unwrap_or_else(|| {
            // Unpunctuated tail: trim trailing whitespace, empty terminal.
            let mut e = i;
            while e > start && chars[e - 1].is_whitespace() {
                e -= 1;
            }
            (e, Span::new(e, e))
        });
        sentences.push(Sentence {
            span: Span::new(start, sent_end),
            token_range: 0..0,
            terminal,
        });
    }
    sentences
}

/// True if the period at char index `dot` closes one of the known
/// abbreviations.
fn is_abbreviation_end(chars: &[char], dot: usize) -> bool {
    for abbrev in ABBREVIATIONS {
        let alen = abbrev.chars().count();
        if dot + 1 < alen {
            continue;
        }
        let from = dot + 1 - alen;
        let matches = chars[from..=dot]
            .iter()
            .zip(abbrev.chars())
            .all(|(c, a)| c.to_lowercase().eq(a.to_lowercase()));
        if !matches {
            continue;
        }
        // Must not sit inside a longer word ("badr." is not "dr.").
        if from == 0 || !chars[from - 1].is_alphanumeric() {
            return true;
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Tokenisation
// ---------------------------------------------------------------------------

/// Tokenize text into Word/Number/Punct tokens.
///
/// Maximal runs of letters and digits form one token (letters and digits
/// fuse, so "HER2" stays whole); an apostrophe between letters stays inside
/// the word ("women's"); every other non-whitespace character is its own
/// Punct token, so hyphenated words split at the hyphen.
pub fn tokenize(text: &str, _sentences: &[Sentence]) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut tokens = Vec::new();
    let mut i = 0;

    while i < n {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphanumeric() {
            let start = i;
            let mut has_alpha = c.is_alphabetic();
            i += 1;
            while i < n {
                let c = chars[i];
                if c.is_alphanumeric() {
                    has_alpha |= c.is_alphabetic();
                    i += 1;
                } else if is_apostrophe(c)
                    && i + 1 < n
                    && chars[i - 1].is_alphabetic()
                    && chars[i + 1].is_alphabetic()
                {
                    i += 1;
                } else {
                    break;
                }
            }
            let span = Span::new(start, i);
            let surface: String = chars[start..i].iter().collect();
            let kind = if has_alpha || surface.chars().any(is_apostrophe) {
                TokenKind::Word
            } else {
                TokenKind::Number
            };
            tokens.push(Token {
                span,
                surface,
                kind,
                pos: None,
            });
        } else {
            tokens.push(Token {
                span: Span::new(i, i + 1),
                surface: c.to_string(),
                kind: TokenKind::Punct,
                pos: None,
            });
            i += 1;
        }
    }
    tokens
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

// ---------------------------------------------------------------------------
// Part-of-speech tagging
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("lexicon file not found: {0}")]
    MissingFile(String),
    #[error("failed to read lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Closed verb lexicon plus coordinating-conjunction list for the tagger.
///
/// Both load from `.lst` files: UTF-8, one lowercase lemma per line, `#`
/// comments ignored.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    verbs: std::collections::HashSet<String>,
    conjunctions: std::collections::HashSet<String>,
}

impl Lexicon {
    pub fn new(
        verbs: impl IntoIterator<Item = String>,
        conjunctions: impl IntoIterator<Item = String>,
    ) -> Lexicon {
        Lexicon {
            verbs: verbs.into_iter().collect(),
            conjunctions: conjunctions.into_iter().collect(),
        }
    }

    pub fn load(verbs_path: &Path, conjunctions_path: &Path) -> Result<Lexicon, LexiconError> {
        Ok(Lexicon {
            verbs: read_lst(verbs_path)?,
            conjunctions: read_lst(conjunctions_path)?,
        })
    }

    pub fn is_conjunction(&self, lower: &str) -> bool {
        self.conjunctions.contains(lower)
    }

    /// True if the lowercase surface, or one of its stripped lemma
    /// candidates, is a known verb.
    pub fn is_verb(&self, lower: &str) -> bool {
        lemma_candidates(lower)
            .iter()
            .any(|c| self.verbs.contains(c.as_str()))
    }
}

fn read_lst(path: &Path) -> Result<std::collections::HashSet<String>, LexiconError> {
    if !path.exists() {
        return Err(LexiconError::MissingFile(path.display().to_string()));
    }
    let content = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(list_lines(&content).map(|l| l.to_lowercase()).collect())
}

/// Non-comment, non-blank lines of a `.lst` file.
pub fn list_lines(content: &str) -> impl Iterator<Item = &str> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// Lemma candidates for a lowercase surface form: the surface itself plus
/// forms with -s/-es/-ies, -ed/-ied, -ing stripped, undoing final-e drop
/// and consonant doubling.
pub fn lemma_candidates(lower: &str) -> Vec<String> {
    let mut out = vec![lower.to_string()];
    if !lower.is_ascii() {
        return out;
    }
    let n = lower.len();
    if n > 4 && lower.ends_with("ies") {
        out.push(format!("{}y", &lower[..n - 3]));
    }
    if n > 4 && lower.ends_with("ied") {
        out.push(format!("{}y", &lower[..n - 3]));
    }
    if n > 3 && lower.ends_with("es") {
        out.push(lower[..n - 2].to_string());
    }
    if n > 2 && lower.ends_with('s') {
        out.push(lower[..n - 1].to_string());
    }
    if n > 3 && lower.ends_with("ed") {
        let base = &lower[..n - 2];
        out.push(base.to_string());
        out.push(format!("{base}e"));
        if let Some(undoubled) = undouble(base) {
            out.push(undoubled);
        }
    }
    if n > 4 && lower.ends_with("ing") {
        let base = &lower[..n - 3];
        out.push(base.to_string());
        out.push(format!("{base}e"));
        if let Some(undoubled) = undouble(base) {
            out.push(undoubled);
        }
    }
    out
}

fn undouble(base: &str) -> Option<String> {
    let bytes = base.as_bytes();
    let n = bytes.len();
    if n >= 2 && bytes[n - 1] == bytes[n - 2] && !b"aeiou".contains(&bytes[n - 1]) {
        Some(base[..n - 1].to_string())
    } else {
        None
    }
}

/// Fill the `pos` field of every token.
///
/// Word tokens: conjunction list -> Conj, verb lexicon (after suffix
/// stripping) -> Verb, otherwise Noun. Number and Punct tokens get Other.
pub fn pos_tag(tokens: &mut [Token], lexicon: &Lexicon) {
    for token in tokens.iter_mut() {
        token.pos = Some(match token.kind {
            TokenKind::Word => {
                let lower = token.lower();
                if lexicon.is_conjunction(&lower) {
                    PosTag::Conj
                } else if lexicon.is_verb(&lower) {
                    PosTag::Verb
                } else {
                    PosTag::Noun
                }
            }
            TokenKind::Number | TokenKind::Punct => PosTag::Other,
        });
    }
}
