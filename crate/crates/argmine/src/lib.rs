//! Rule-based argumentation mining for medical text.
//!
//! The pipeline runs in stages over plain-text documents:
//!
//! 1. [`text`] — sentence splitting, tokenisation, and lexicon-based
//!    part-of-speech tagging with character-offset spans.
//! 2. [`gazetteer`] — list-based term lookup producing `Lookup`
//!    annotations, promoted to typed annotations (`CancerRelatedWords`,
//!    `PeopleInvolved`, ...).
//! 3. [`pattern`] — a cascaded annotation-pattern engine with a small
//!    rule DSL; built-in macro-indicator schemas emit `ClaimMacro` and
//!    `PremiseMacro` annotations.
//! 4. [`miner`] — per-sentence claim/premise extraction pivoting on
//!    coordinating conjunctions and macro offsets, assembled into typed
//!    arguments.
//! 5. [`kb`] — a forward-chaining knowledge base holding the mined
//!    arguments as ABox assertions, with materialisation and
//!    defined-concept classification.
//! 6. [`eval`] — precision/recall/F1 scoring of predicted spans against
//!    gold standoff annotations.
//!
//! The `argmine` binary wires these together; [`pipeline`] holds the
//! shared configuration and orchestration used by both the binary and
//! the integration tests.

pub mod eval;
pub mod gazetteer;
pub mod kb;
pub mod miner;
pub mod pattern;
pub mod pipeline;
pub mod standoff;
pub mod text;
