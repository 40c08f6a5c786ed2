//! A forward-chaining knowledge base for a small description-logic
//! fragment: atomic subsumption, role domain/range, transitive and
//! inverse roles, subroles, and defined concepts built from existential
//! and exactly-one restrictions.
//!
//! The built-in TBox covers the argumentation domain (arguments, claims,
//! premises, indicators, `before`/`after` ordering) and the cancer domain
//! (diseases, symptoms, treatments, affected domains). Materialisation
//! computes the fixpoint of the inference rules over the ABox; defined
//! concepts are classified afterwards against the closure.
//!
//! Negation, disjunction, and value restriction exist in richer logics
//! but carry no inference rules here; using them in a definition is a
//! load-time error. Quoted string literals are second class: they live on
//! the designated data roles only and never enter concept membership or
//! transitivity.

pub mod text_format;

pub use text_format::{export_abox, load_abox, parse_abox, parse_tbox};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KbError {
    #[error("malformed assertion: {0}")]
    MalformedAssertion(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid definition for {concept}: {reason}")]
    InvalidDefinition { concept: String, reason: String },
}

/// Roles whose objects are quoted text literals rather than individuals.
pub const DATA_ROLES: &[&str] = &[
    "hasText",
    "hasIndicator",
    "hasClaimIndicator",
    "hasPremiseIndicator",
];

pub fn is_data_role(role: &str) -> bool {
    DATA_ROLES.contains(&role)
}

/// A concept expression usable on the right-hand side of a definition.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConceptExpr {
    Atomic(String),
    /// ∃ role . filler
    Existential(String, Box<ConceptExpr>),
    /// (=1) role . filler, read closed-world over known fillers.
    ExactlyOne(String, Box<ConceptExpr>),
    /// Recognised but carries no inference rules.
    Negation(Box<ConceptExpr>),
    /// Recognised but carries no inference rules.
    Disjunction(Vec<ConceptExpr>),
    /// Recognised but carries no inference rules.
    ValueRestriction(String, Box<ConceptExpr>),
}

impl ConceptExpr {
    pub fn atomic(name: &str) -> ConceptExpr {
        ConceptExpr::Atomic(name.to_string())
    }

    pub fn exists(role: &str, filler: ConceptExpr) -> ConceptExpr {
        ConceptExpr::Existential(role.to_string(), Box::new(filler))
    }

    pub fn exactly_one(role: &str, filler: ConceptExpr) -> ConceptExpr {
        ConceptExpr::ExactlyOne(role.to_string(), Box::new(filler))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum TBoxAxiom {
    /// C ⊑ D between atomic concepts.
    AtomicSubsumption { sub: String, sup: String },
    Domain { role: String, concept: String },
    Range { role: String, concept: String },
    Transitive { role: String },
    /// r and s are inverse roles (applied in both directions).
    Inverse { role: String, inverse: String },
    SubRole { sub: String, sup: String },
    /// C ≡ conjunction of restrictions.
    Definition {
        concept: String,
        conjuncts: Vec<ConceptExpr>,
    },
}

/// The object of a role assertion: an individual or a text literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Obj {
    Individual(String),
    Literal(String),
}

impl Obj {
    pub fn as_individual(&self) -> Option<&str> {
        match self {
            Obj::Individual(name) => Some(name),
            Obj::Literal(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    Concept {
        individual: String,
        concept: String,
    },
    Role {
        subject: String,
        object: Obj,
        role: String,
    },
}

impl Assertion {
    pub fn concept(individual: &str, concept: &str) -> Assertion {
        Assertion::Concept {
            individual: individual.to_string(),
            concept: concept.to_string(),
        }
    }

    pub fn role(subject: &str, object: &str, role: &str) -> Assertion {
        Assertion::Role {
            subject: subject.to_string(),
            object: Obj::Individual(object.to_string()),
            role: role.to_string(),
        }
    }

    pub fn literal_role(subject: &str, literal: &str, role: &str) -> Assertion {
        Assertion::Role {
            subject: subject.to_string(),
            object: Obj::Literal(literal.to_string()),
            role: role.to_string(),
        }
    }
}

/// The built-in TBox: argumentation model plus cancer domain.
pub fn builtin_tbox() -> Vec<TBoxAxiom> {
    use ConceptExpr as E;
    let sub = |sub: &str, sup: &str| TBoxAxiom::AtomicSubsumption {
        sub: sub.to_string(),
        sup: sup.to_string(),
    };
    let domain = |role: &str, concept: &str| TBoxAxiom::Domain {
        role: role.to_string(),
        concept: concept.to_string(),
    };
    let range = |role: &str, concept: &str| TBoxAxiom::Range {
        role: role.to_string(),
        concept: concept.to_string(),
    };
    let transitive = |role: &str| TBoxAxiom::Transitive {
        role: role.to_string(),
    };
    let subrole = |s: &str, sup: &str| TBoxAxiom::SubRole {
        sub: s.to_string(),
        sup: sup.to_string(),
    };

    vec![
        // Argumentation domain.
        sub("ClinicalArgument", "Argument"),
        domain("supports", "Argument"),
        range("supports", "Argument"),
        transitive("supports"),
        domain("attacks", "Argument"),
        range("attacks", "Argument"),
        // Cancer domain.
        sub("Cancer", "Disease"),
        sub("BreastCancer", "Cancer"),
        range("manifestedSymptom", "Symptom"),
        range("appliedTreatment", "Treatment"),
        range("affectedDomain", "Domain"),
        range("impliedPerson", "Person"),
        range("haveCharacteristic", "Characteristic"),
        domain("haveQuantifier", "People"),
        range("haveQuantifier", "Quantifier"),
        // Indicator taxonomy.
        sub("PremiseIndicator", "Indicator"),
        sub("ClaimIndicator", "Indicator"),
        sub("MacroIndicator", "Indicator"),
        sub("VerbRelatedToClaim", "MacroIndicator"),
        sub("VerbRelatedToPremise", "MacroIndicator"),
        range("hasIndicator", "Indicator"),
        subrole("hasPremiseIndicator", "hasIndicator"),
        subrole("hasClaimIndicator", "hasIndicator"),
        // Argument structure.
        TBoxAxiom::Definition {
            concept: "Argument".to_string(),
            conjuncts: vec![
                E::exists("hasPremise", E::atomic("Premise")),
                E::exactly_one("hasClaim", E::atomic("Claim")),
            ],
        },
        TBoxAxiom::Definition {
            concept: "Claim".to_string(),
            conjuncts: vec![
                E::exists("hasText", E::atomic("String")),
                E::exists("hasIndicator", E::atomic("ClaimIndicator")),
            ],
        },
        TBoxAxiom::Definition {
            concept: "Premise".to_string(),
            conjuncts: vec![
                E::exists("hasText", E::atomic("String")),
                E::exists("hasIndicator", E::atomic("PremiseIndicator")),
            ],
        },
        // Order-based argument classes.
        TBoxAxiom::Definition {
            concept: "PCArgument".to_string(),
            conjuncts: vec![E::exists(
                "hasPremise",
                E::exists("before", E::atomic("Claim")),
            )],
        },
        TBoxAxiom::Definition {
            concept: "CPArgument".to_string(),
            conjuncts: vec![E::exists(
                "hasPremise",
                E::exists("after", E::atomic("Claim")),
            )],
        },
        sub("PCArgument", "Argument"),
        sub("CPArgument", "Argument"),
        sub("ClaimPremiseArgument", "Argument"),
        // Sentence ordering roles.
        TBoxAxiom::Inverse {
            role: "before".to_string(),
            inverse: "after".to_string(),
        },
        transitive("before"),
        transitive("after"),
        domain("before", "Sentence"),
        range("before", "Sentence"),
    ]
}

/// TBox axioms plus an ABox with its materialised closure.
///
/// Asserted and derived facts are tracked separately so exports can
/// distinguish them. Single writer while asserting and materialising;
/// once `closed`, queries are read-only.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    tbox: Vec<TBoxAxiom>,
    asserted: BTreeSet<Assertion>,
    derived: BTreeSet<Assertion>,
    closed: bool,
}

impl KnowledgeBase {
    /// An empty ABox over the built-in TBox.
    pub fn with_builtin_tbox() -> KnowledgeBase {
        KnowledgeBase::new(builtin_tbox()).expect("built-in TBox is valid")
    }

    pub fn new(tbox: Vec<TBoxAxiom>) -> Result<KnowledgeBase, KbError> {
        validate_tbox(&tbox)?;
        Ok(KnowledgeBase {
            tbox,
            asserted: BTreeSet::new(),
            derived: BTreeSet::new(),
            closed: false,
        })
    }

    pub fn tbox(&self) -> &[TBoxAxiom] {
        &self.tbox
    }

    pub fn add_tbox_axioms(&mut self, axioms: Vec<TBoxAxiom>) -> Result<(), KbError> {
        let mut tbox = self.tbox.clone();
        tbox.extend(axioms);
        validate_tbox(&tbox)?;
        self.tbox = tbox;
        self.closed = false;
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Asserted facts only.
    pub fn asserted(&self) -> impl Iterator<Item = &Assertion> {
        self.asserted.iter()
    }

    /// Derived facts only.
    pub fn derived(&self) -> impl Iterator<Item = &Assertion> {
        self.derived.iter()
    }

    /// Asserted plus derived facts.
    pub fn abox(&self) -> impl Iterator<Item = &Assertion> {
        self.asserted.iter().chain(self.derived.iter())
    }

    pub fn contains(&self, assertion: &Assertion) -> bool {
        self.asserted.contains(assertion) || self.derived.contains(assertion)
    }

    /// Add one assertion; duplicates are a no-op (set semantics).
    pub fn assert_fact(&mut self, assertion: Assertion) -> Result<(), KbError> {
        match &assertion {
            Assertion::Concept {
                individual,
                concept,
            } => {
                if individual.is_empty() || concept.is_empty() {
                    return Err(KbError::MalformedAssertion(
                        "empty individual or concept name".to_string(),
                    ));
                }
            }
            Assertion::Role {
                subject,
                object,
                role,
            } => {
                if subject.is_empty() || role.is_empty() {
                    return Err(KbError::MalformedAssertion(
                        "empty subject or role name".to_string(),
                    ));
                }
                match object {
                    Obj::Literal(_) if !is_data_role(role) => {
                        return Err(KbError::MalformedAssertion(format!(
                            "literal object on non-data role {role}"
                        )));
                    }
                    Obj::Literal(_) => {}
                    Obj::Individual(name) => {
                        if name.is_empty() {
                            return Err(KbError::MalformedAssertion(
                                "empty object name".to_string(),
                            ));
                        }
                        if is_data_role(role) {
                            return Err(KbError::MalformedAssertion(format!(
                                "data role {role} requires a quoted literal object"
                            )));
                        }
                    }
                }
            }
        }
        if !self.derived.contains(&assertion) && self.asserted.insert(assertion) {
            self.closed = false;
        }
        Ok(())
    }

    /// All individuals named anywhere in the ABox.
    pub fn individuals(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for a in self.abox() {
            match a {
                Assertion::Concept { individual, .. } => {
                    out.insert(individual.as_str());
                }
                Assertion::Role {
                    subject, object, ..
                } => {
                    out.insert(subject.as_str());
                    if let Obj::Individual(name) = object {
                        out.insert(name.as_str());
                    }
                }
            }
        }
        out
    }

    /// Compute the fixpoint of the inference rules, filling `derived`.
    ///
    /// Terminates because no rule invents individuals: the closure is
    /// bounded by names × names × roles. Idempotent and monotone.
    pub fn materialize(&mut self) {
        loop {
            let mut fresh: Vec<Assertion> = Vec::new();
            {
                let known: Vec<&Assertion> = self.abox().collect();
                let mut add = |a: Assertion, known: &[&Assertion]| {
                    if !known.iter().any(|k| **k == a) && !fresh.contains(&a) {
                        fresh.push(a);
                    }
                };
                for axiom in &self.tbox {
                    match axiom {
                        TBoxAxiom::AtomicSubsumption { sub, sup } => {
                            for a in &known {
                                if let Assertion::Concept {
                                    individual,
                                    concept,
                                } = a
                                {
                                    if concept == sub {
                                        add(Assertion::concept(individual, sup), &known);
                                    }
                                }
                            }
                        }
                        TBoxAxiom::SubRole { sub, sup } => {
                            for a in &known {
                                if let Assertion::Role {
                                    subject,
                                    object,
                                    role,
                                } = a
                                {
                                    if role == sub {
                                        add(
                                            Assertion::Role {
                                                subject: subject.clone(),
                                                object: object.clone(),
                                                role: sup.clone(),
                                            },
                                            &known,
                                        );
                                    }
                                }
                            }
                        }
                        TBoxAxiom::Domain { role, concept } => {
                            for a in &known {
                                if let Assertion::Role { subject, role: r, .. } = a {
                                    if r == role {
                                        add(Assertion::concept(subject, concept), &known);
                                    }
                                }
                            }
                        }
                        TBoxAxiom::Range { role, concept } => {
                            for a in &known {
                                if let Assertion::Role {
                                    object: Obj::Individual(obj),
                                    role: r,
                                    ..
                                } = a
                                {
                                    if r == role {
                                        add(Assertion::concept(obj, concept), &known);
                                    }
                                }
                            }
                        }
                        TBoxAxiom::Transitive { role } => {
                            for a in &known {
                                let Assertion::Role {
                                    subject: x,
                                    object: Obj::Individual(y),
                                    role: r,
                                } = a
                                else {
                                    continue;
                                };
                                if r != role {
                                    continue;
                                }
                                for b in &known {
                                    let Assertion::Role {
                                        subject: y2,
                                        object: Obj::Individual(z),
                                        role: r2,
                                    } = b
                                    else {
                                        continue;
                                    };
                                    if r2 == role && y2 == y {
                                        add(Assertion::role(x, z, role), &known);
                                    }
                                }
                            }
                        }
                        TBoxAxiom::Inverse { role, inverse } => {
                            for a in &known {
                                let Assertion::Role {
                                    subject,
                                    object: Obj::Individual(obj),
                                    role: r,
                                } = a
                                else {
                                    continue;
                                };
                                if r == role {
                                    add(Assertion::role(obj, subject, inverse), &known);
                                } else if r == inverse {
                                    add(Assertion::role(obj, subject, role), &known);
                                }
                            }
                        }
                        TBoxAxiom::Definition { .. } => {}
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            self.derived.extend(fresh);
        }
        self.closed = true;
    }

    /// Classify individuals against the defined concepts, to a fixpoint
    /// interleaved with materialisation.
    pub fn classify_individuals(&mut self) {
        if !self.closed {
            self.materialize();
        }
        loop {
            let mut fresh: Vec<Assertion> = Vec::new();
            for axiom in &self.tbox {
                let TBoxAxiom::Definition { concept, conjuncts } = axiom else {
                    continue;
                };
                for individual in self.individuals() {
                    let membership = Assertion::concept(individual, concept);
                    if self.contains(&membership) || fresh.contains(&membership) {
                        continue;
                    }
                    if conjuncts.iter().all(|c| self.satisfies(individual, c)) {
                        fresh.push(membership);
                    }
                }
            }
            if fresh.is_empty() {
                break;
            }
            self.derived.extend(fresh);
            self.materialize();
        }
    }

    fn satisfies(&self, individual: &str, expr: &ConceptExpr) -> bool {
        match expr {
            ConceptExpr::Atomic(concept) => {
                self.contains(&Assertion::concept(individual, concept))
            }
            ConceptExpr::Existential(role, filler) => self
                .role_fillers(individual, role)
                .any(|obj| self.obj_satisfies(obj, filler)),
            ConceptExpr::ExactlyOne(role, filler) => {
                let fillers: Vec<&Obj> = self.role_fillers(individual, role).collect();
                let distinct: BTreeSet<&Obj> = fillers.iter().copied().collect();
                distinct.len() == 1 && self.obj_satisfies(fillers[0], filler)
            }
            // No inference rules for these constructors.
            ConceptExpr::Negation(_)
            | ConceptExpr::Disjunction(_)
            | ConceptExpr::ValueRestriction(_, _) => false,
        }
    }

    fn obj_satisfies(&self, obj: &Obj, expr: &ConceptExpr) -> bool {
        match obj {
            // Literals are instances of the String datatype and nothing else.
            Obj::Literal(_) => matches!(expr, ConceptExpr::Atomic(c) if c == "String"),
            Obj::Individual(name) => self.satisfies(name, expr),
        }
    }

    fn role_fillers<'a>(&'a self, subject: &'a str, role: &'a str) -> impl Iterator<Item = &'a Obj> {
        self.abox().filter_map(move |a| match a {
            Assertion::Role {
                subject: s,
                object,
                role: r,
            } if s == subject && r == role => Some(object),
            _ => None,
        })
    }

    /// Concept and role names known to the TBox or mentioned in the ABox.
    pub fn vocabulary(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut concepts = BTreeSet::new();
        let mut roles = BTreeSet::new();
        concepts.insert("String".to_string());
        for axiom in &self.tbox {
            match axiom {
                TBoxAxiom::AtomicSubsumption { sub, sup } => {
                    concepts.insert(sub.clone());
                    concepts.insert(sup.clone());
                }
                TBoxAxiom::Domain { role, concept } | TBoxAxiom::Range { role, concept } => {
                    roles.insert(role.clone());
                    concepts.insert(concept.clone());
                }
                TBoxAxiom::Transitive { role } => {
                    roles.insert(role.clone());
                }
                TBoxAxiom::Inverse { role, inverse } => {
                    roles.insert(role.clone());
                    roles.insert(inverse.clone());
                }
                TBoxAxiom::SubRole { sub, sup } => {
                    roles.insert(sub.clone());
                    roles.insert(sup.clone());
                }
                TBoxAxiom::Definition { concept, conjuncts } => {
                    concepts.insert(concept.clone());
                    for c in conjuncts {
                        collect_expr_names(c, &mut concepts, &mut roles);
                    }
                }
            }
        }
        for a in self.abox() {
            match a {
                Assertion::Concept { concept, .. } => {
                    concepts.insert(concept.clone());
                }
                Assertion::Role { role, .. } => {
                    roles.insert(role.clone());
                }
            }
        }
        (concepts, roles)
    }

    /// All individuals that are instances of `concept` in the closure.
    pub fn query_concept_instances(&self, concept: &str) -> Result<BTreeSet<String>, KbError> {
        let (concepts, _) = self.vocabulary();
        if !concepts.contains(concept) {
            return Err(KbError::UnknownName(concept.to_string()));
        }
        Ok(self
            .abox()
            .filter_map(|a| match a {
                Assertion::Concept {
                    individual,
                    concept: c,
                } if c == concept => Some(individual.clone()),
                _ => None,
            })
            .collect())
    }

    /// All (subject, object) pairs of `role` in the closure, optionally
    /// restricted to one subject.
    pub fn query_role(
        &self,
        role: &str,
        subject: Option<&str>,
    ) -> Result<BTreeSet<(String, Obj)>, KbError> {
        let (_, roles) = self.vocabulary();
        if !roles.contains(role) {
            return Err(KbError::UnknownName(role.to_string()));
        }
        Ok(self
            .abox()
            .filter_map(|a| match a {
                Assertion::Role {
                    subject: s,
                    object,
                    role: r,
                } if r == role && subject.is_none_or(|want| want == s) => {
                    Some((s.clone(), object.clone()))
                }
                _ => None,
            })
            .collect())
    }
}

fn collect_expr_names(
    expr: &ConceptExpr,
    concepts: &mut BTreeSet<String>,
    roles: &mut BTreeSet<String>,
) {
    match expr {
        ConceptExpr::Atomic(c) => {
            concepts.insert(c.clone());
        }
        ConceptExpr::Existential(r, f)
        | ConceptExpr::ExactlyOne(r, f)
        | ConceptExpr::ValueRestriction(r, f) => {
            roles.insert(r.clone());
            collect_expr_names(f, concepts, roles);
        }
        ConceptExpr::Negation(f) => collect_expr_names(f, concepts, roles),
        ConceptExpr::Disjunction(fs) => {
            for f in fs {
                collect_expr_names(f, concepts, roles);
            }
        }
    }
}

fn validate_tbox(tbox: &[TBoxAxiom]) -> Result<(), KbError> {
    // Definitions may not use the unsupported constructors and may not
    // depend on each other cyclically.
    let mut defined: BTreeMap<&str, &Vec<ConceptExpr>> = BTreeMap::new();
    for axiom in tbox {
        if let TBoxAxiom::Definition { concept, conjuncts } = axiom {
            for expr in conjuncts {
                check_supported(concept, expr)?;
            }
            defined.insert(concept, conjuncts);
        }
    }
    for start in defined.keys() {
        let mut stack = vec![*start];
        let mut seen = BTreeSet::new();
        while let Some(current) = stack.pop() {
            let Some(conjuncts) = defined.get(current) else {
                continue;
            };
            let mut mentioned = BTreeSet::new();
            let mut roles = BTreeSet::new();
            for expr in *conjuncts {
                collect_expr_names(expr, &mut mentioned, &mut roles);
            }
            for name in mentioned {
                if name == *start {
                    return Err(KbError::InvalidDefinition {
                        concept: start.to_string(),
                        reason: "definition cycle".to_string(),
                    });
                }
                if seen.insert(name.clone()) {
                    if let Some((k, _)) = defined.get_key_value(name.as_str()) {
                        stack.push(k);
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_supported(concept: &str, expr: &ConceptExpr) -> Result<(), KbError> {
    match expr {
        ConceptExpr::Atomic(_) => Ok(()),
        ConceptExpr::Existential(_, f) | ConceptExpr::ExactlyOne(_, f) => {
            check_supported(concept, f)
        }
        ConceptExpr::Negation(_) => Err(KbError::InvalidDefinition {
            concept: concept.to_string(),
            reason: "negation carries no inference rules".to_string(),
        }),
        ConceptExpr::Disjunction(_) => Err(KbError::InvalidDefinition {
            concept: concept.to_string(),
            reason: "disjunction carries no inference rules".to_string(),
        }),
        ConceptExpr::ValueRestriction(_, _) => Err(KbError::InvalidDefinition {
            concept: concept.to_string(),
            reason: "value restriction carries no inference rules".to_string(),
        }),
    }
}
