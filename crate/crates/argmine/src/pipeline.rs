//! Pipeline configuration and orchestration shared by the CLI and the
//! integration tests.
//!
//! The verb lexicon (`verbs.lst`) and conjunction list
//! (`conjunctions.lst`) for the POS tagger are loaded from the directory
//! of the gazetteer `.def` file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::gazetteer::{annotate_lookups, promote_lookups, Gazetteer, GazetteerError};
use crate::kb::Assertion;
use crate::miner::{
    arguments_to_assertions, assemble_arguments, mine_document, Argument, Claim, MineMode, Premise,
};
use crate::pattern::macros::{annotate_macros, builtin_phases};
use crate::pattern::{parse_rules, run_phase, DslError, Phase};
use crate::text::{pos_tag, Document, Lexicon, LexiconError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Gazetteer(#[from] GazetteerError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error("rule file {path}: {source}")]
    Rules { path: String, source: DslError },
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// All knobs of the annotation and mining pipeline.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub gazetteer_def: PathBuf,
    pub rule_files: Vec<PathBuf>,
    pub macro_gap: usize,
    pub window: usize,
    pub mode: MineMode,
}

impl PipelineConfig {
    pub fn new(gazetteer_def: impl Into<PathBuf>) -> PipelineConfig {
        PipelineConfig {
            gazetteer_def: gazetteer_def.into(),
            rule_files: Vec::new(),
            macro_gap: 3,
            window: 2,
            mode: MineMode::Extended,
        }
    }
}

/// Mining output for one document.
#[derive(Debug, Clone)]
pub struct MineResult {
    pub document: Document,
    pub claims: Vec<Claim>,
    pub premises: Vec<Premise>,
    pub arguments: Vec<Argument>,
    pub assertions: Vec<Assertion>,
}

/// Loaded, immutable pipeline state. Safe to share across threads for
/// document-parallel processing.
#[derive(Debug)]
pub struct Pipeline {
    config: PipelineConfig,
    gazetteer: Gazetteer,
    lexicon: Lexicon,
    claim_phase: Phase,
    premise_phase: Phase,
    extra_phases: Vec<Phase>,
}

impl Pipeline {
    pub fn from_config(config: PipelineConfig) -> Result<Pipeline, PipelineError> {
        let gazetteer = Gazetteer::load(&config.gazetteer_def)?;
        let lexicon_dir = config
            .gazetteer_def
            .parent()
            .unwrap_or_else(|| Path::new("."));
        let lexicon = Lexicon::load(
            &lexicon_dir.join("verbs.lst"),
            &lexicon_dir.join("conjunctions.lst"),
        )?;
        let (claim_phase, premise_phase) = builtin_phases(config.macro_gap);
        let mut extra_phases = Vec::new();
        for path in &config.rule_files {
            let source = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let phases = parse_rules(&source).map_err(|source| PipelineError::Rules {
                path: path.display().to_string(),
                source,
            })?;
            extra_phases.extend(phases);
        }
        Ok(Pipeline {
            config,
            gazetteer,
            lexicon,
            claim_phase,
            premise_phase,
            extra_phases,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    /// Tokenise, tag, annotate lookups, promote, and run the macro and
    /// user phases.
    pub fn annotate(&self, id: &str, text: &str) -> Document {
        let mut doc = Document::from_text(id, text);
        pos_tag(&mut doc.tokens, &self.lexicon);
        annotate_lookups(&mut doc, &self.gazetteer);
        promote_lookups(&mut doc);
        annotate_macros(&mut doc, &self.claim_phase, &self.premise_phase);
        for phase in &self.extra_phases {
            run_phase(&mut doc, phase);
        }
        doc
    }

    /// Annotate and mine one document, adding Claim/Premise standoff
    /// annotations and serialising the arguments to ABox assertions.
    pub fn mine(&self, id: &str, text: &str) -> MineResult {
        let mut doc = self.annotate(id, text);
        let (claims, premises) = mine_document(&doc, self.config.mode);
        for claim in &claims {
            let mut features = BTreeMap::new();
            features.insert("kind".to_string(), claim.indicator.kind.to_string());
            features.insert("indicator".to_string(), claim.indicator.indicator_text.clone());
            doc.add_annotation("Claim", claim.span, features);
        }
        for premise in &premises {
            let mut features = BTreeMap::new();
            features.insert("kind".to_string(), premise.indicator.kind.to_string());
            features.insert(
                "indicator".to_string(),
                premise.indicator.indicator_text.clone(),
            );
            doc.add_annotation("Premise", premise.span, features);
        }
        let arguments = assemble_arguments(&doc, &claims, &premises, self.config.window);
        let assertions = arguments_to_assertions(id, &arguments);
        MineResult {
            document: doc,
            claims,
            premises,
            arguments,
            assertions,
        }
    }
}
