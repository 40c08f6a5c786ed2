//! Cascaded annotation-pattern engine: a small rule DSL over annotations
//! plus the built-in macro-indicator schemas that emit `ClaimMacro` and
//! `PremiseMacro` annotations.
//!
//! A rule file holds phases of pattern/action rules:
//!
//! ```text
//! Phase: ClaimMacros
//! Input: ClaimIndicator PeopleInvolved
//! Gap: 3
//!
//! Rule: CibPe
//! Priority: 40
//! (({ClaimIndicator}):ci ({PeopleInvolved})):m -->
//!     :m.ClaimMacro = {kind="CibPe", indicatorText=:ci.text}
//! ```
//!
//! The left-hand side is a sequence of elements `{Type}` or
//! `{Type.feature=="value"}`, grouped with parentheses, quantified with
//! `?`, `*`, `+`, and bound with `:label`. The right-hand side creates
//! annotations over bound spans. Matching is longest-match with priority
//! tie-break, scanning left to right within one sentence; matched regions
//! are consumed. `Gap:` sets how many non-matching tokens may sit between
//! consecutive elements (default 0).

pub mod dsl;
pub mod engine;
pub mod macros;

pub use dsl::{parse_rules, print_phases, DslError};
pub use engine::run_phase;
pub use macros::{builtin_phases, match_claim_macros, match_premise_macros};

use std::fmt;

/// How often a pattern node may repeat.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    One,
    Optional,
    Star,
    Plus,
}

/// An annotation test: type name plus feature equality constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub ty: String,
    pub features: Vec<(String, String)>,
}

/// One matchable element: all constraints must hold for annotations
/// starting at the current position; the first constraint determines the
/// consumed span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternElement {
    pub constraints: Vec<Constraint>,
}

/// A node of a rule's left-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternNode {
    pub kind: NodeKind,
    pub quantifier: Quantifier,
    pub binding: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Element(PatternElement),
    Sequence(Vec<PatternNode>),
}

/// A feature value on the right-hand side: literal text or the document
/// text covered by a bound label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureValue {
    Literal(String),
    BindingText(String),
}

/// One annotation-creation action: `:label.NewType = {feat=..., ...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhsAction {
    pub label: String,
    pub new_type: String,
    pub features: Vec<(String, FeatureValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub priority: i32,
    pub lhs: Vec<PatternNode>,
    pub rhs: Vec<RhsAction>,
}

/// One cascade phase: rules plus matching configuration.
///
/// Control is fixed to longest-match with priority tie-break.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    pub name: String,
    /// Annotation types visible to matching; `None` means all.
    pub input: Option<Vec<String>>,
    /// Maximum non-matching tokens between consecutive elements.
    pub max_gap: usize,
    pub rules: Vec<Rule>,
}

/// The macro-indicator schema that produced a ClaimMacro/PremiseMacro.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MacroKind {
    Ci,
    Pi,
    CibPe,
    CibPebVc,
    CibVc,
    ElOfCnbCwClaim,
    QbPebVc,
    PibPe,
    PibPebVp,
    PibVp,
    ElOfCnbCwPremise,
    DbVp,
}

impl MacroKind {
    /// The `kind` feature value carried on the emitted annotation. The two
    /// ElOfCnbCw variants share a feature value; the annotation type
    /// (ClaimMacro vs PremiseMacro) disambiguates.
    pub fn feature_value(&self) -> &'static str {
        match self {
            MacroKind::Ci => "Ci",
            MacroKind::Pi => "Pi",
            MacroKind::CibPe => "CibPe",
            MacroKind::CibPebVc => "CibPebVc",
            MacroKind::CibVc => "CibVc",
            MacroKind::ElOfCnbCwClaim | MacroKind::ElOfCnbCwPremise => "ElOfCnbCw",
            MacroKind::QbPebVc => "QbPebVc",
            MacroKind::PibPe => "PibPe",
            MacroKind::PibPebVp => "PibPebVp",
            MacroKind::PibVp => "PibVp",
            MacroKind::DbVp => "DbVp",
        }
    }

    /// Resolve a `kind` feature back to the enum, given the annotation
    /// type it was found on.
    pub fn from_feature(value: &str, on_claim_macro: bool) -> Option<MacroKind> {
        Some(match (value, on_claim_macro) {
            ("Ci", _) => MacroKind::Ci,
            ("Pi", _) => MacroKind::Pi,
            ("CibPe", _) => MacroKind::CibPe,
            ("CibPebVc", _) => MacroKind::CibPebVc,
            ("CibVc", _) => MacroKind::CibVc,
            ("ElOfCnbCw", true) => MacroKind::ElOfCnbCwClaim,
            ("ElOfCnbCw", false) => MacroKind::ElOfCnbCwPremise,
            ("QbPebVc", _) => MacroKind::QbPebVc,
            ("PibPe", _) => MacroKind::PibPe,
            ("PibPebVp", _) => MacroKind::PibPebVp,
            ("PibVp", _) => MacroKind::PibVp,
            ("DbVp", _) => MacroKind::DbVp,
            _ => return None,
        })
    }
}

impl fmt::Display for MacroKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.feature_value())
    }
}

/// Annotation type emitted for claim-side macros.
pub const CLAIM_MACRO: &str = "ClaimMacro";
/// Annotation type emitted for premise-side macros.
pub const PREMISE_MACRO: &str = "PremiseMacro";
