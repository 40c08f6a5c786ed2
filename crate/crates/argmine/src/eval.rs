//! Span-level evaluation of predicted annotations against gold:
//! precision, recall and F1 with strict (exact span) or lenient
//! (any overlap) alignment.

use std::fmt::Write as _;

use thiserror::Error;

use crate::standoff::StandoffDoc;
use crate::text::Span;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("document texts differ for {0}")]
    DocumentMismatch(String),
    #[error("missing document: {0}")]
    MissingDocument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    #[default]
    Strict,
    Lenient,
}

impl MatchMode {
    fn matches(&self, pred: Span, gold: Span) -> bool {
        match self {
            MatchMode::Strict => pred == gold,
            MatchMode::Lenient => pred.overlaps(gold),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl Counts {
    pub fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

/// Greedy one-to-one alignment in document order: each prediction takes
/// the earliest unmatched gold span it matches.
pub fn align_spans(pred: &[Span], gold: &[Span], mode: MatchMode) -> Counts {
    let mut pred = pred.to_vec();
    let mut gold = gold.to_vec();
    pred.sort();
    gold.sort();

    let mut gold_used = vec![false; gold.len()];
    let mut tp = 0;
    for p in &pred {
        let hit = gold
            .iter()
            .enumerate()
            .position(|(idx, g)| !gold_used[idx] && mode.matches(*p, *g));
        if let Some(idx) = hit {
            gold_used[idx] = true;
            tp += 1;
        }
    }
    Counts {
        tp,
        fp: pred.len() - tp,
        fn_: gold.len() - tp,
    }
}

/// Align annotations of one type between two versions of a document.
pub fn align_annotations(
    pred: &StandoffDoc,
    gold: &StandoffDoc,
    ty: &str,
    mode: MatchMode,
) -> Result<Counts, EvalError> {
    if pred.text != gold.text {
        return Err(EvalError::DocumentMismatch(gold.id.clone()));
    }
    let pred_spans: Vec<Span> = pred.annotations_of(ty).map(|a| a.span).collect();
    let gold_spans: Vec<Span> = gold.annotations_of(ty).map(|a| a.span).collect();
    Ok(align_spans(&pred_spans, &gold_spans, mode))
}

/// Precision, recall and F1 from raw counts.
///
/// Zero-denominator conventions: with no predictions, precision is 1 if
/// nothing was missed and 0 otherwise; symmetrically for recall; F1 is 0
/// when P + R is 0.
pub fn prf_scores(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 {
        if fn_ == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        if fp == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// The annotation types scored by corpus evaluation.
pub const EVAL_TYPES: [&str; 2] = ["Claim", "Premise"];

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub ty: String,
    pub doc: String,
    pub counts: Counts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-document rows for each annotation type plus micro-averaged totals.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn totals(&self, ty: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.ty == ty && r.doc == "TOTAL")
    }

    /// Aligned text table, one block per annotation type.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for ty in EVAL_TYPES {
            writeln!(out, "{ty}").unwrap();
            writeln!(
                out,
                "{:<24} {:>4} {:>4} {:>4} {:>10} {:>8} {:>8}",
                "doc", "tp", "fp", "fn", "precision", "recall", "f1"
            )
            .unwrap();
            for row in self.rows.iter().filter(|r| r.ty == ty) {
                writeln!(
                    out,
                    "{:<24} {:>4} {:>4} {:>4} {:>10.4} {:>8.4} {:>8.4}",
                    row.doc, row.counts.tp, row.counts.fp, row.counts.fn_,
                    row.precision, row.recall, row.f1
                )
                .unwrap();
            }
            writeln!(out).unwrap();
        }
        out
    }

    /// Comma-separated copy of the same rows.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("type,doc,tp,fp,fn,precision,recall,f1\n");
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{:.6},{:.6},{:.6}",
                row.ty, row.doc, row.counts.tp, row.counts.fp, row.counts.fn_,
                row.precision, row.recall, row.f1
            )
            .unwrap();
        }
        out
    }
}

fn row(ty: &str, doc: &str, counts: Counts) -> EvalRow {
    let (precision, recall, f1) = prf_scores(counts.tp, counts.fp, counts.fn_);
    EvalRow {
        ty: ty.to_string(),
        doc: doc.to_string(),
        counts,
        precision,
        recall,
        f1,
    }
}

/// Score a predicted corpus against gold. Document ids must align; the
/// gold corpus drives the document list.
pub fn evaluate_corpus(
    pred: &[StandoffDoc],
    gold: &[StandoffDoc],
    mode: MatchMode,
) -> Result<EvalReport, EvalError> {
    for p in pred {
        if !gold.iter().any(|g| g.id == p.id) {
            return Err(EvalError::MissingDocument(p.id.clone()));
        }
    }
    let mut rows = Vec::new();
    for ty in EVAL_TYPES {
        let mut total = Counts::default();
        for gold_doc in gold {
            let pred_doc = pred
                .iter()
                .find(|p| p.id == gold_doc.id)
                .ok_or_else(|| EvalError::MissingDocument(gold_doc.id.clone()))?;
            let counts = align_annotations(pred_doc, gold_doc, ty, mode)?;
            total.add(counts);
            rows.push(row(ty, &gold_doc.id, counts));
        }
        rows.push(row(ty, "TOTAL", total));
    }
    Ok(EvalReport { rows })
}
