//! Phase execution: longest-match scanning over annotations.
//!
//! Within each sentence the engine scans token positions left to right.
//! At each position every rule is tried; the longest total match wins,
//! ties go to the higher priority rule, then to source order. The matched
//! region is consumed, so annotations emitted by one phase never overlap.

use std::collections::BTreeMap;

use crate::text::{Annotation, Document, Span};

use super::{FeatureValue, NodeKind, PatternNode, Phase, Quantifier, Rule};

/// An annotation computed by a phase but not yet added to a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PendingAnnotation {
    pub ty: String,
    pub span: Span,
    pub features: BTreeMap<String, String>,
}

/// Run a phase over the document and add the resulting annotations.
pub fn run_phase(doc: &mut Document, phase: &Phase) {
    let pending = run_phase_filtered(doc, phase, |_| true);
    for p in pending {
        doc.add_annotation(p.ty, p.span, p.features);
    }
}

/// Run a phase, seeing only annotations accepted by `visible`, and return
/// the annotations it would create.
pub fn run_phase_filtered(
    doc: &Document,
    phase: &Phase,
    visible: impl Fn(&Annotation) -> bool,
) -> Vec<PendingAnnotation> {
    let matcher = Matcher::new(doc, phase, &visible);
    let mut out = Vec::new();

    for sentence in &doc.sentences {
        let range = sentence.token_range.clone();
        let mut pos = range.start;
        while pos < range.end {
            // (end, priority, rule index) — longest match, then priority,
            // then source order.
            let mut best: Option<(usize, i32, usize, Vec<Binding>)> = None;
            for (rule_idx, rule) in phase.rules.iter().enumerate() {
                if let Some((end, bindings)) = matcher.match_rule(rule, pos, range.end) {
                    let better = match &best {
                        None => true,
                        Some((bend, bprio, bidx, _)) => {
                            (end, rule.priority, std::cmp::Reverse(rule_idx))
                                > (*bend, *bprio, std::cmp::Reverse(*bidx))
                        }
                    };
                    if better {
                        best = Some((end, rule.priority, rule_idx, bindings));
                    }
                }
            }
            match best {
                Some((end, _, rule_idx, bindings)) => {
                    fire_rhs(doc, &phase.rules[rule_idx], &bindings, &mut out);
                    debug_assert!(end > pos);
                    pos = end;
                }
                None => pos += 1,
            }
        }
    }
    out
}

/// A bound label with the token range it covers.
type Binding = (String, usize, usize);

struct Matcher<'a> {
    doc: &'a Document,
    phase: &'a Phase,
    /// token index -> annotations starting at that token.
    anns_at: Vec<Vec<&'a Annotation>>,
}

#[derive(Debug, Clone)]
struct MState {
    /// Next token position.
    pos: usize,
    /// Whether any element has matched yet (gaps only open afterwards).
    matched_any: bool,
    bindings: Vec<Binding>,
    /// Token index of the first element matched in the current frame.
    first: Option<usize>,
}

impl<'a> Matcher<'a> {
    fn new(doc: &'a Document, phase: &'a Phase, visible: &impl Fn(&Annotation) -> bool) -> Self {
        let mut anns_at: Vec<Vec<&Annotation>> = vec![Vec::new(); doc.tokens.len()];
        for ann in doc.annotations() {
            let type_ok = match &phase.input {
                Some(input) => input.iter().any(|t| t == &ann.ty),
                None => true,
            };
            if !type_ok || !visible(ann) {
                continue;
            }
            if let Some(idx) = doc.token_starting_at(ann.span.start) {
                anns_at[idx].push(ann);
            }
        }
        // Longest candidates first keeps enumeration deterministic and
        // favours maximal matches.
        for anns in &mut anns_at {
            anns.sort_by_key(|a| (std::cmp::Reverse(a.span.end), a.id));
        }
        Matcher {
            doc,
            phase,
            anns_at,
        }
    }

    /// Match `rule` anchored at token `pos`; return the end position of the
    /// longest match and its bindings.
    fn match_rule(&self, rule: &Rule, pos: usize, limit: usize) -> Option<(usize, Vec<Binding>)> {
        let start = MState {
            pos,
            matched_any: false,
            bindings: Vec::new(),
            first: None,
        };
        let results = self.match_seq(&rule.lhs, start, limit);
        results
            .into_iter()
            .filter(|m| m.first == Some(pos) && m.pos > pos)
            .max_by_key(|m| m.pos)
            .map(|m| (m.pos, m.bindings))
    }

    fn match_seq(&self, nodes: &[PatternNode], state: MState, limit: usize) -> Vec<MState> {
        let mut states = vec![state];
        for node in nodes {
            let mut next = Vec::new();
            for s in states {
                next.extend(self.match_node(node, s, limit));
            }
            states = next;
            if states.is_empty() {
                break;
            }
        }
        states
    }

    fn match_node(&self, node: &PatternNode, state: MState, limit: usize) -> Vec<MState> {
        let mut results = Vec::new();
        match node.quantifier {
            Quantifier::One => {
                for (m, first) in self.match_once(&node.kind, state.clone(), limit) {
                    results.push(self.bind(node, m, first, state.pos));
                }
            }
            Quantifier::Optional => {
                results.push(state.clone());
                for (m, first) in self.match_once(&node.kind, state.clone(), limit) {
                    results.push(self.bind(node, m, first, state.pos));
                }
            }
            Quantifier::Star | Quantifier::Plus => {
                if node.quantifier == Quantifier::Star {
                    results.push(state.clone());
                }
                let mut frontier: Vec<(MState, Option<usize>)> = self
                    .match_once(&node.kind, state.clone(), limit)
                    .into_iter()
                    .collect();
                while !frontier.is_empty() {
                    let mut next_frontier = Vec::new();
                    for (m, first) in frontier {
                        results.push(self.bind_rep(node, m.clone(), first));
                        for (m2, _) in self.match_once(&node.kind, m.clone(), limit) {
                            if m2.pos > m.pos {
                                next_frontier.push((m2, first));
                            }
                        }
                    }
                    frontier = next_frontier;
                }
            }
        }
        results
    }

    /// Record the binding for a node matched exactly once.
    fn bind(&self, node: &PatternNode, mut m: MState, first: Option<usize>, _entry: usize) -> MState {
        if let (Some(label), Some(first_tok)) = (&node.binding, first) {
            m.bindings.push((label.clone(), first_tok, m.pos));
        }
        m
    }

    /// Record the binding for a repeated node: span from the first
    /// repetition's first element to the current end.
    fn bind_rep(&self, node: &PatternNode, mut m: MState, first: Option<usize>) -> MState {
        if let (Some(label), Some(first_tok)) = (&node.binding, first) {
            m.bindings.retain(|(l, _, _)| l != label);
            m.bindings.push((label.clone(), first_tok, m.pos));
        }
        m
    }

    /// Match one occurrence of a node kind; each result carries the token
    /// index of the first element it matched.
    fn match_once(
        &self,
        kind: &NodeKind,
        state: MState,
        limit: usize,
    ) -> Vec<(MState, Option<usize>)> {
        match kind {
            NodeKind::Element(element) => {
                let mut results = Vec::new();
                let max_gap = if state.matched_any {
                    self.phase.max_gap
                } else {
                    0
                };
                for gap in 0..=max_gap {
                    let q = state.pos + gap;
                    if q >= limit {
                        break;
                    }
                    for candidate in &self.anns_at[q] {
                        if candidate.ty != element.constraints[0].ty
                            || !features_match(candidate, &element.constraints[0].features)
                        {
                            continue;
                        }
                        // Remaining constraints must also hold at q.
                        let others_ok = element.constraints[1..].iter().all(|c| {
                            self.anns_at[q]
                                .iter()
                                .any(|a| a.ty == c.ty && features_match(a, &c.features))
                        });
                        if !others_ok {
                            continue;
                        }
                        let end_tok = self.consumed_until(q, candidate.span.end);
                        if end_tok > limit {
                            continue;
                        }
                        let mut m = state.clone();
                        m.pos = end_tok;
                        m.matched_any = true;
                        if m.first.is_none() {
                            m.first = Some(q);
                        }
                        results.push((m, Some(q)));
                    }
                }
                results
            }
            NodeKind::Sequence(children) => {
                // A fresh frame tracks its own first element; splice it back
                // into the parent afterwards.
                let entry_first = state.first;
                let framed = MState {
                    first: None,
                    ..state
                };
                self.match_seq(children, framed, limit)
                    .into_iter()
                    .map(|mut m| {
                        let frame_first = m.first;
                        m.first = entry_first.or(frame_first);
                        (m, frame_first)
                    })
                    .collect()
            }
        }
    }

    /// First token position at or after `start_tok` not covered by an
    /// annotation ending at `span_end`.
    fn consumed_until(&self, start_tok: usize, span_end: usize) -> usize {
        let mut idx = start_tok;
        while idx < self.doc.tokens.len() && self.doc.tokens[idx].span.end <= span_end {
            idx += 1;
        }
        idx.max(start_tok + 1)
    }
}

fn features_match(ann: &Annotation, tests: &[(String, String)]) -> bool {
    tests
        .iter()
        .all(|(name, value)| ann.feature(name) == Some(value.as_str()))
}

fn fire_rhs(doc: &Document, rule: &Rule, bindings: &[Binding], out: &mut Vec<PendingAnnotation>) {
    for action in &rule.rhs {
        let Some((_, start_tok, end_tok)) = bindings.iter().find(|(l, _, _)| l == &action.label)
        else {
            log::debug!(
                "rule {}: label :{} not bound in this match, skipping action",
                rule.name,
                action.label
            );
            continue;
        };
        let span = Span::new(
            doc.tokens[*start_tok].span.start,
            doc.tokens[*end_tok - 1].span.end,
        );
        let mut features = BTreeMap::new();
        for (name, value) in &action.features {
            match value {
                FeatureValue::Literal(s) => {
                    features.insert(name.clone(), s.clone());
                }
                FeatureValue::BindingText(label) => {
                    if let Some((_, s, e)) = bindings.iter().find(|(l, _, _)| l == label) {
                        let text_span =
                            Span::new(doc.tokens[*s].span.start, doc.tokens[*e - 1].span.end);
                        features.insert(name.clone(), doc.slice(text_span).to_string());
                    }
                }
            }
        }
        out.push(PendingAnnotation {
            ty: action.new_type.clone(),
            span,
            features,
        });
    }
}
