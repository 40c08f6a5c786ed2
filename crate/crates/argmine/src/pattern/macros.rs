//! Built-in macro-indicator schemas.
//!
//! Claim-side templates: a bare claim indicator (Ci); indicator before
//! people (CibPe); indicator, people, claim verb (CibPebVc); indicator
//! before claim verb (CibVc, which also covers the people-before-claim-verb
//! reading of that template); elements-of-cancer before cancer words with
//! an optional claim verb (ElOfCnbCw); qualifier, people, claim verb
//! (QbPebVc).
//!
//! Premise-side templates: bare premise indicator (Pi); indicator before
//! people (PibPe); indicator, people, premise verb (PibPebVp); indicator
//! before premise verb (PibVp); elements-of-cancer before cancer words
//! with a required premise verb (ElOfCnbCw); affected domain before
//! premise verb (DbVp).
//!
//! Two cross-cutting decisions live here rather than in the rules:
//!
//! * A verb annotation is invisible to macro matching when a
//!   ClaimIndicator or PremiseIndicator annotation starts at the same
//!   offset — the indicator reading wins ("according" inside
//!   "according to" is an indicator, not the verb of a preceding macro).
//! * ElOfCnbCw appears in both template sets. When both sides match from
//!   the same start, a following premise verb decides for PremiseMacro;
//!   no verb decides for ClaimMacro; a verb in both verb lists is logged
//!   and decided for ClaimMacro.

use crate::text::{Annotation, Document};

use super::engine::{run_phase_filtered, PendingAnnotation};
use super::{parse_rules, Phase, CLAIM_MACRO, PREMISE_MACRO};

/// The built-in schemas in the rule DSL, as printed by `dump-rules`.
pub const BUILTIN_RULES: &str = r#"Phase: ClaimMacros
Input: ClaimIndicator PeopleInvolved VerbRelatedToClaim Qualifier ElementsOfCancer CancerRelatedWords
Gap: 3

Rule: CibPebVc
Priority: 60
(({ClaimIndicator}):ci ({PeopleInvolved}) ({VerbRelatedToClaim})):m -->
    :m.ClaimMacro = {kind="CibPebVc", indicatorText=:ci.text}

Rule: QbPebVc
Priority: 50
(({Qualifier}) ({PeopleInvolved}) ({VerbRelatedToClaim})):m -->
    :m.ClaimMacro = {kind="QbPebVc", indicatorText=:m.text}

Rule: CibPe
Priority: 40
(({ClaimIndicator}):ci ({PeopleInvolved})):m -->
    :m.ClaimMacro = {kind="CibPe", indicatorText=:ci.text}

Rule: CibVc
Priority: 30
(({ClaimIndicator}):ci ({VerbRelatedToClaim})):m -->
    :m.ClaimMacro = {kind="CibVc", indicatorText=:ci.text}

Rule: PebVc
Priority: 25
(({PeopleInvolved}) ({VerbRelatedToClaim})):m -->
    :m.ClaimMacro = {kind="CibVc", indicatorText=:m.text}

Rule: ElOfCnbCw
Priority: 20
(({ElementsOfCancer}) ({CancerRelatedWords}) ({VerbRelatedToClaim})?):m -->
    :m.ClaimMacro = {kind="ElOfCnbCw", indicatorText=:m.text}

Rule: Ci
Priority: 10
(({ClaimIndicator}):ci):m -->
    :m.ClaimMacro = {kind="Ci", indicatorText=:ci.text}

Phase: PremiseMacros
Input: PremiseIndicator PeopleInvolved VerbRelatedToPremise ElementsOfCancer CancerRelatedWords DomainsAffected
Gap: 3

Rule: PibPebVp
Priority: 60
(({PremiseIndicator}):pi ({PeopleInvolved}) ({VerbRelatedToPremise})):m -->
    :m.PremiseMacro = {kind="PibPebVp", indicatorText=:pi.text}

Rule: PibPe
Priority: 40
(({PremiseIndicator}):pi ({PeopleInvolved})):m -->
    :m.PremiseMacro = {kind="PibPe", indicatorText=:pi.text}

Rule: PibVp
Priority: 30
(({PremiseIndicator}):pi ({VerbRelatedToPremise})):m -->
    :m.PremiseMacro = {kind="PibVp", indicatorText=:pi.text}

Rule: ElOfCnbCw
Priority: 20
(({ElementsOfCancer}) ({CancerRelatedWords}) ({VerbRelatedToPremise})):m -->
    :m.PremiseMacro = {kind="ElOfCnbCw", indicatorText=:m.text}

Rule: DbVp
Priority: 15
(({DomainsAffected}) ({VerbRelatedToPremise})):m -->
    :m.PremiseMacro = {kind="DbVp", indicatorText=:m.text}

Rule: Pi
Priority: 10
(({PremiseIndicator}):pi):m -->
    :m.PremiseMacro = {kind="Pi", indicatorText=:pi.text}
"#;

/// The two built-in phases (claim, premise) with the configured
/// inter-element gap.
pub fn builtin_phases(macro_gap: usize) -> (Phase, Phase) {
    let mut phases = parse_rules(BUILTIN_RULES).expect("built-in rules must parse");
    assert_eq!(phases.len(), 2, "built-in rules must define two phases");
    for phase in &mut phases {
        phase.max_gap = macro_gap;
    }
    let premise = phases.pop().unwrap();
    let claim = phases.pop().unwrap();
    (claim, premise)
}

/// Claim-side macro annotations for a document whose gazetteer promotion
/// and POS tagging are done. ElOfCnbCw reconciliation against the premise
/// side is applied.
pub fn match_claim_macros(doc: &Document, macro_gap: usize) -> Vec<PendingAnnotation> {
    matched_macros(doc, macro_gap)
        .into_iter()
        .filter(|m| m.ty == CLAIM_MACRO)
        .collect()
}

/// Premise-side macro annotations, reconciled like [`match_claim_macros`].
pub fn match_premise_macros(doc: &Document, macro_gap: usize) -> Vec<PendingAnnotation> {
    matched_macros(doc, macro_gap)
        .into_iter()
        .filter(|m| m.ty == PREMISE_MACRO)
        .collect()
}

/// Run both built-in phases and add the reconciled macro annotations.
pub fn annotate_macros(doc: &mut Document, claim_phase: &Phase, premise_phase: &Phase) {
    let pending = run_macro_phases(doc, claim_phase, premise_phase);
    for p in pending {
        doc.add_annotation(p.ty, p.span, p.features);
    }
}

fn matched_macros(doc: &Document, macro_gap: usize) -> Vec<PendingAnnotation> {
    let (claim_phase, premise_phase) = builtin_phases(macro_gap);
    run_macro_phases(doc, &claim_phase, &premise_phase)
}

fn run_macro_phases(
    doc: &Document,
    claim_phase: &Phase,
    premise_phase: &Phase,
) -> Vec<PendingAnnotation> {
    // Indicator starts mask co-located verb annotations.
    let indicator_starts: Vec<usize> = doc
        .annotations()
        .iter()
        .filter(|a| a.ty == "ClaimIndicator" || a.ty == "PremiseIndicator")
        .map(|a| a.span.start)
        .collect();
    let visible = |a: &Annotation| {
        if a.ty == "VerbRelatedToClaim" || a.ty == "VerbRelatedToPremise" {
            !indicator_starts.contains(&a.span.start)
        } else {
            true
        }
    };

    let claims = run_phase_filtered(doc, claim_phase, visible);
    let premises = run_phase_filtered(doc, premise_phase, visible);
    reconcile_elofcnbcw(doc, claims, premises)
}

/// Resolve claim/premise ElOfCnbCw matches that start at the same offset.
fn reconcile_elofcnbcw(
    doc: &Document,
    claims: Vec<PendingAnnotation>,
    premises: Vec<PendingAnnotation>,
) -> Vec<PendingAnnotation> {
    let is_elof = |p: &PendingAnnotation| p.features.get("kind").map(String::as_str) == Some("ElOfCnbCw");

    let mut drop_claims = Vec::new();
    let mut drop_premises = Vec::new();
    for (ci, claim) in claims.iter().enumerate() {
        if !is_elof(claim) {
            continue;
        }
        for (pi, premise) in premises.iter().enumerate() {
            if !is_elof(premise) || premise.span.start != claim.span.start {
                continue;
            }
            if premise.span.end > claim.span.end {
                // Premise verb extends past the claim match.
                drop_claims.push(ci);
            } else {
                log::debug!(
                    "ambiguous ElOfCnbCw at {} in {}: verb is in both verb lists, keeping claim",
                    claim.span,
                    doc.id
                );
                drop_premises.push(pi);
            }
        }
    }

    let mut out: Vec<PendingAnnotation> = claims
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !drop_claims.contains(i))
        .map(|(_, p)| p)
        .collect();
    out.extend(
        premises
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop_premises.contains(i))
            .map(|(_, p)| p),
    );
    out.sort_by_key(|p| (p.span, p.ty.clone()));
    out
}
