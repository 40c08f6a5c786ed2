//! Per-sentence claim/premise extraction and argument assembly.
//!
//! Each sentence is mined around its first free coordinating conjunction
//! (CC) and the first ClaimMacro/PremiseMacro:
//!
//! * CC present, claim macro at or before the CC: the claim runs from the
//!   macro to the CC; a premise macro after the CC yields a premise from
//!   just past the CC to the end of the macro's clause.
//! * CC present, claim macro after the CC: the claim runs from just past
//!   the CC to the end of the claim macro's clause; a premise macro
//!   before the CC yields a premise from the macro to the CC.
//! * CC present but no claim macro: nothing in strict mode; in extended
//!   mode a premise macro still yields a premise to the terminal.
//! * No CC: with both macros the sentence splits at the later macro's
//!   start; with one macro the span runs from the macro to the terminal.
//!
//! "End of a macro's clause" is the next free CC, semicolon, or the
//! sentence terminal. Spans are token-aligned with leading and trailing
//! punctuation trimmed. Tokens covered by a macro annotation never count
//! as CCs — the indicator reading of "so" and "for" wins.
//!
//! Premises then attach to the nearest claim within a sentence window
//! (same sentence, then preceding, then following). A claim with at
//! least one premise becomes an argument; its order class is PC when the
//! premises come first, CP when they follow within the same sentence,
//! and ClaimPremise when a trailing premise sits in a later sentence led
//! by its indicator.

use std::fmt;

use crate::kb::Assertion;
use crate::pattern::{MacroKind, CLAIM_MACRO, PREMISE_MACRO};
use crate::text::{Document, PosTag, Span, TokenKind};

/// Algorithm behaviour for the CC-present/no-claim-macro case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MineMode {
    /// Faithful to the branch structure: the case yields nothing.
    Strict,
    /// Falls through to the premise-only rule.
    #[default]
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderClass {
    Pc,
    Cp,
    ClaimPremise,
}

impl OrderClass {
    pub fn concept_name(&self) -> &'static str {
        match self {
            OrderClass::Pc => "PCArgument",
            OrderClass::Cp => "CPArgument",
            OrderClass::ClaimPremise => "ClaimPremiseArgument",
        }
    }
}

impl fmt::Display for OrderClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderClass::Pc => "PC",
            OrderClass::Cp => "CP",
            OrderClass::ClaimPremise => "ClaimPremise",
        };
        f.write_str(s)
    }
}

/// The macro occurrence that licensed a claim or premise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroRef {
    pub kind: MacroKind,
    pub span: Span,
    pub indicator_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim {
    pub span: Span,
    pub text: String,
    pub indicator: MacroRef,
    pub sentence: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Premise {
    pub span: Span,
    pub text: String,
    pub indicator: MacroRef,
    pub sentence: usize,
}

/// One assembled argument: exactly one claim, one or more premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub claim: Claim,
    pub premises: Vec<Premise>,
    pub order_class: OrderClass,
}

/// Mine one sentence. Requires macro annotations and POS tags.
pub fn mine_sentence(
    doc: &Document,
    sentence_idx: usize,
    mode: MineMode,
) -> (Option<Claim>, Option<Premise>) {
    let sentence = &doc.sentences[sentence_idx];
    let claim_macro = first_macro(doc, sentence_idx, CLAIM_MACRO);
    let premise_macro = first_macro(doc, sentence_idx, PREMISE_MACRO);
    let pct = sentence.terminal.start;

    let mut claim_span: Option<(Span, &MacroRef)> = None;
    let mut premise_span: Option<(Span, &MacroRef)> = None;

    match free_cc(doc, sentence_idx) {
        Some(cc_token) => {
            let cc = doc.tokens[cc_token].span;
            match &claim_macro {
                Some(cm) if cm.span.start <= cc.start => {
                    claim_span = words(doc, sentence_idx, cm.span.start, cc.start)
                        .map(|s| (s, cm));
                    if let Some(pm) = premise_macro
                        .as_ref()
                        .filter(|pm| pm.span.start > cc.start)
                    {
                        let end = clause_end(doc, sentence_idx, pm.span.end);
                        premise_span =
                            words(doc, sentence_idx, cc.end, end).map(|s| (s, pm));
                    }
                }
                Some(cm) => {
                    let end = clause_end(doc, sentence_idx, cm.span.end);
                    claim_span = words(doc, sentence_idx, cc.end, end).map(|s| (s, cm));
                    if let Some(pm) = premise_macro
                        .as_ref()
                        .filter(|pm| pm.span.start < cc.start)
                    {
                        premise_span =
                            words(doc, sentence_idx, pm.span.start, cc.start).map(|s| (s, pm));
                    }
                }
                None => {
                    if mode == MineMode::Extended {
                        if let Some(pm) = &premise_macro {
                            premise_span =
                                words(doc, sentence_idx, pm.span.start, pct).map(|s| (s, pm));
                        }
                    }
                }
            }
        }
        None => match (&claim_macro, &premise_macro) {
            (Some(cm), Some(pm)) if cm.span.start < pm.span.start => {
                claim_span = words(doc, sentence_idx, cm.span.start, pm.span.start)
                    .map(|s| (s, cm));
                premise_span = words(doc, sentence_idx, pm.span.start, pct).map(|s| (s, pm));
            }
            (Some(cm), Some(pm)) if pm.span.start < cm.span.start => {
                premise_span =
                    words(doc, sentence_idx, pm.span.start, cm.span.start).map(|s| (s, pm));
                claim_span = words(doc, sentence_idx, cm.span.start, pct).map(|s| (s, cm));
            }
            (Some(cm), Some(_)) => {
                // Coincident starts cannot both hold; the claim wins.
                log::debug!(
                    "claim and premise macros start together in {} sentence {sentence_idx}",
                    doc.id
                );
                claim_span = words(doc, sentence_idx, cm.span.start, pct).map(|s| (s, cm));
            }
            (Some(cm), None) => {
                claim_span = words(doc, sentence_idx, cm.span.start, pct).map(|s| (s, cm));
            }
            (None, Some(pm)) => {
                premise_span = words(doc, sentence_idx, pm.span.start, pct).map(|s| (s, pm));
            }
            (None, None) => {}
        },
    }

    let claim = claim_span.map(|(span, m)| Claim {
        span,
        text: doc.slice(span).to_string(),
        indicator: m.clone(),
        sentence: sentence_idx,
    });
    let premise = premise_span.map(|(span, m)| Premise {
        span,
        text: doc.slice(span).to_string(),
        indicator: m.clone(),
        sentence: sentence_idx,
    });
    (claim, premise)
}

/// Mine every sentence of the document.
pub fn mine_document(doc: &Document, mode: MineMode) -> (Vec<Claim>, Vec<Premise>) {
    let mut claims = Vec::new();
    let mut premises = Vec::new();
    for idx in 0..doc.sentences.len() {
        let (claim, premise) = mine_sentence(doc, idx, mode);
        claims.extend(claim);
        premises.extend(premise);
    }
    (claims, premises)
}

/// First macro annotation of the given type in the sentence, by start
/// offset (longest wins a tie).
fn first_macro(doc: &Document, sentence_idx: usize, ty: &str) -> Option<MacroRef> {
    let span = doc.sentences[sentence_idx].span;
    doc.annotations_of(ty)
        .filter(|a| span.contains(a.span))
        .min_by_key(|a| (a.span.start, std::cmp::Reverse(a.span.end)))
        .map(|a| MacroRef {
            kind: MacroKind::from_feature(a.feature("kind").unwrap_or(""), ty == CLAIM_MACRO)
                .unwrap_or(if ty == CLAIM_MACRO {
                    MacroKind::Ci
                } else {
                    MacroKind::Pi
                }),
            span: a.span,
            indicator_text: a
                .feature("indicatorText")
                .map(String::from)
                .unwrap_or_else(|| doc.slice(a.span).to_string()),
        })
}

/// Token index of the sentence's first coordinating conjunction not
/// covered by any macro annotation.
fn free_cc(doc: &Document, sentence_idx: usize) -> Option<usize> {
    let range = doc.sentences[sentence_idx].token_range.clone();
    let macro_spans: Vec<Span> = doc
        .annotations()
        .iter()
        .filter(|a| a.ty == CLAIM_MACRO || a.ty == PREMISE_MACRO)
        .map(|a| a.span)
        .collect();
    range.clone().find(|&idx| {
        let token = &doc.tokens[idx];
        token.pos == Some(PosTag::Conj)
            && !macro_spans.iter().any(|m| m.contains_offset(token.span.start))
    })
}

/// End of the clause containing a macro that ends at `macro_end`: the
/// next free CC, semicolon, or the sentence terminal.
fn clause_end(doc: &Document, sentence_idx: usize, macro_end: usize) -> usize {
    let sentence = &doc.sentences[sentence_idx];
    let free = free_cc(doc, sentence_idx);
    for idx in sentence.token_range.clone() {
        let token = &doc.tokens[idx];
        if token.span.start < macro_end {
            continue;
        }
        let is_cc = Some(idx) == free
            || (token.pos == Some(PosTag::Conj) && free_cc_at(doc, idx));
        if is_cc || token.surface == ";" {
            return token.span.start;
        }
    }
    sentence.terminal.start
}

fn free_cc_at(doc: &Document, idx: usize) -> bool {
    let start = doc.tokens[idx].span.start;
    !doc.annotations()
        .iter()
        .any(|a| (a.ty == CLAIM_MACRO || a.ty == PREMISE_MACRO) && a.span.contains_offset(start))
}

/// The token span between two character offsets, trimmed of leading and
/// trailing punctuation. Offsets may arrive in either order.
fn words(doc: &Document, sentence_idx: usize, a: usize, b: usize) -> Option<Span> {
    let (from, to) = if a <= b { (a, b) } else { (b, a) };
    let range = doc.sentences[sentence_idx].token_range.clone();
    let tokens: Vec<&crate::text::Token> = doc.tokens[range]
        .iter()
        .filter(|t| t.span.start >= from && t.span.end <= to)
        .collect();
    let first = tokens.iter().position(|t| t.kind != TokenKind::Punct)?;
    let last = tokens.iter().rposition(|t| t.kind != TokenKind::Punct)?;
    Some(Span::new(tokens[first].span.start, tokens[last].span.end))
}

/// Attach premises to the nearest claim within `window` sentences and
/// build arguments. Unattached premises and premise-less claims are
/// dropped (logged).
pub fn assemble_arguments(
    doc: &Document,
    claims: &[Claim],
    premises: &[Premise],
    window: usize,
) -> Vec<Argument> {
    let mut attached: Vec<Vec<Premise>> = vec![Vec::new(); claims.len()];
    for premise in premises {
        let best = claims
            .iter()
            .enumerate()
            .filter_map(|(idx, claim)| {
                let distance = claim.sentence.abs_diff(premise.sentence);
                if distance > window {
                    return None;
                }
                // Same sentence first, then preceding, then following.
                let direction = if claim.sentence == premise.sentence {
                    0
                } else if claim.sentence < premise.sentence {
                    1
                } else {
                    2
                };
                Some((direction, distance, idx))
            })
            .min();
        match best {
            Some((_, _, idx)) => attached[idx].push(premise.clone()),
            None => log::debug!(
                "premise at {} in {} has no claim within {window} sentences; dropped",
                premise.span,
                doc.id
            ),
        }
    }

    let mut arguments = Vec::new();
    for (claim, premises) in claims.iter().zip(attached) {
        if premises.is_empty() {
            log::debug!(
                "claim at {} in {} has no premise; no argument emitted",
                claim.span,
                doc.id
            );
            continue;
        }
        let order_class = classify_order(claim, &premises, &doc.id);
        arguments.push(Argument {
            claim: claim.clone(),
            premises,
            order_class,
        });
    }
    arguments
}

fn classify_order(claim: &Claim, premises: &[Premise], doc_id: &str) -> OrderClass {
    let before = premises.iter().filter(|p| p.span.start < claim.span.start).count();
    let after = premises.len() - before;
    if before > 0 && after > 0 {
        log::debug!(
            "argument at {} in {doc_id} has premises on both sides; classifying PC",
            claim.span
        );
    }
    if before > 0 {
        return OrderClass::Pc;
    }
    let cross_sentence = premises.iter().any(|p| p.sentence != claim.sentence);
    if !cross_sentence {
        return OrderClass::Cp;
    }
    let indicator_led = premises
        .iter()
        .filter(|p| p.sentence != claim.sentence)
        .all(|p| p.indicator.span.start <= p.span.start);
    if indicator_led {
        OrderClass::ClaimPremise
    } else {
        OrderClass::Cp
    }
}

/// Serialise arguments into ABox assertions.
///
/// Individuals are named `<doc>_argN` / `<doc>_cN` (same N) and
/// `<doc>_pN` with a per-document premise counter. Claim and premise
/// texts and indicator texts become literals on the data roles; `before`
/// edges connect every pair of claim/premise constituents in document
/// order.
pub fn arguments_to_assertions(doc_id: &str, arguments: &[Argument]) -> Vec<Assertion> {
    let mut out = Vec::new();
    let mut premise_counter = 0;
    for (idx, argument) in arguments.iter().enumerate() {
        let n = idx + 1;
        let arg = format!("{doc_id}_arg{n}");
        let claim = format!("{doc_id}_c{n}");
        out.push(Assertion::concept(&arg, argument.order_class.concept_name()));
        out.push(Assertion::concept(&claim, "Claim"));
        out.push(Assertion::role(&arg, &claim, "hasClaim"));
        out.push(Assertion::literal_role(&claim, &argument.claim.text, "hasText"));
        out.push(Assertion::literal_role(
            &claim,
            &argument.claim.indicator.indicator_text,
            "hasClaimIndicator",
        ));

        let mut constituents: Vec<(String, Span)> =
            vec![(claim.clone(), argument.claim.span)];
        for premise in &argument.premises {
            premise_counter += 1;
            let p = format!("{doc_id}_p{premise_counter}");
            out.push(Assertion::concept(&p, "Premise"));
            out.push(Assertion::role(&arg, &p, "hasPremise"));
            out.push(Assertion::literal_role(&p, &premise.text, "hasText"));
            out.push(Assertion::literal_role(
                &p,
                &premise.indicator.indicator_text,
                "hasPremiseIndicator",
            ));
            constituents.push((p, premise.span));
        }

        constituents.sort_by_key(|(_, span)| *span);
        for i in 0..constituents.len() {
            for j in i + 1..constituents.len() {
                out.push(Assertion::role(
                    &constituents[i].0,
                    &constituents[j].0,
                    "before",
                ));
            }
        }
    }
    out
}
