//! Acceptance suite: one test per release criterion, each printing a
//! pass line (visible with `cargo test -- --nocapture`).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use argmine::eval::{evaluate_corpus, prf_scores, MatchMode};
use argmine::kb::{
    builtin_tbox, export_abox, parse_abox, Assertion, KnowledgeBase, Obj, TBoxAxiom,
};
use argmine::miner::{mine_sentence, MineMode};
use argmine::pipeline::{Pipeline, PipelineConfig};
use argmine::standoff::load_corpus_dir;
use argmine::text::{Document, PosTag, Span, TokenKind};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn pipeline() -> Pipeline {
    Pipeline::from_config(PipelineConfig::new(data_dir().join("lists/argmine.def")))
        .expect("bundled pipeline loads")
}

fn corpus_docs() -> Vec<(String, String)> {
    let dir = data_dir().join("corpus");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_stem().unwrap().to_string_lossy().to_string();
            (id, std::fs::read_to_string(&p).unwrap())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Criterion 1: extraction on the bundled example corpus
// ---------------------------------------------------------------------------

#[derive(Debug, Default, PartialEq, Eq)]
struct Expected {
    claims: BTreeSet<(usize, usize, String)>,
    premises: BTreeSet<(usize, usize, String)>,
    class: Option<String>,
}

fn load_fixtures() -> BTreeMap<String, Expected> {
    let path = data_dir().join("expected/mining_expected.tsv");
    let content = std::fs::read_to_string(&path).unwrap();
    let mut out: BTreeMap<String, Expected> = BTreeMap::new();
    for line in content.lines() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let entry = out.entry(fields[0].to_string()).or_default();
        match fields[1] {
            "class" => entry.class = Some(fields[2].to_string()),
            kind @ ("claim" | "premise") => {
                let start: usize = fields[2].parse().unwrap();
                let end: usize = fields[3].parse().unwrap();
                let record = (start, end, fields[4].to_string());
                if kind == "claim" {
                    entry.claims.insert(record);
                } else {
                    entry.premises.insert(record);
                }
            }
            other => panic!("unknown fixture field {other}"),
        }
    }
    out
}

/// The fixture offsets were derived by hand; the text column lets us
/// catch transcription slips before using them as gold.
fn validate_fixture_offsets() {
    let path = data_dir().join("expected/mining_expected.tsv");
    let content = std::fs::read_to_string(&path).unwrap();
    let texts: BTreeMap<String, String> = corpus_docs().into_iter().collect();
    for line in content.lines() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields[1] == "class" {
            continue;
        }
        let doc = Document::from_text(fields[0], texts[fields[0]].clone());
        let span = Span::new(fields[2].parse().unwrap(), fields[3].parse().unwrap());
        assert_eq!(
            doc.slice(span),
            fields[5],
            "fixture offsets disagree with covered text for {} {}",
            fields[0],
            fields[1],
        );
    }
}

#[test]
fn criterion_1_example_corpus_extraction() {
    let started = Instant::now();
    validate_fixture_offsets();

    let pipeline = pipeline();
    let fixtures = load_fixtures();
    let docs = corpus_docs();
    assert_eq!(docs.len(), fixtures.len(), "every corpus doc has fixtures");

    for (id, text) in &docs {
        let expected = &fixtures[id];
        let result = pipeline.mine(id, text);

        let claims: BTreeSet<(usize, usize, String)> = result
            .claims
            .iter()
            .map(|c| (c.span.start, c.span.end, c.indicator.kind.to_string()))
            .collect();
        let premises: BTreeSet<(usize, usize, String)> = result
            .premises
            .iter()
            .map(|p| (p.span.start, p.span.end, p.indicator.kind.to_string()))
            .collect();
        assert_eq!(claims, expected.claims, "claims of {id}");
        assert_eq!(premises, expected.premises, "premises of {id}");

        let classes: Vec<String> = result
            .arguments
            .iter()
            .map(|a| a.order_class.to_string())
            .collect();
        match &expected.class {
            Some(class) => assert_eq!(classes, vec![class.clone()], "class of {id}"),
            None => assert!(classes.is_empty(), "{id} should form no argument: {classes:?}"),
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "criterion 1 took {elapsed:?}");
    println!("criterion 1 (example-corpus extraction, {} docs): pass in {elapsed:?}", docs.len());
}

// ---------------------------------------------------------------------------
// Criterion 2: mine_sentence against a literal branch-transcription oracle
// ---------------------------------------------------------------------------

/// Independent transcription of the per-sentence mining branches, with
/// its own helpers for span building.
fn oracle_mine(doc: &Document, sidx: usize, strict: bool) -> (Option<Span>, Option<Span>) {
    let sent = &doc.sentences[sidx];
    let pct = sent.terminal.start;
    let cm = oracle_first_macro(doc, sidx, "ClaimMacro");
    let pm = oracle_first_macro(doc, sidx, "PremiseMacro");
    let cc = oracle_first_cc(doc, sidx);

    let mut claim = None;
    let mut premise = None;
    if let Some(cc) = cc {
        if let Some(cm) = cm {
            if cm.start <= cc.start {
                claim = oracle_words(doc, sidx, cm.start, cc.start);
                if let Some(pm) = pm.filter(|p| p.start > cc.start) {
                    let end = oracle_clause_end(doc, sidx, pm.end);
                    premise = oracle_words(doc, sidx, cc.end, end);
                }
            } else {
                let end = oracle_clause_end(doc, sidx, cm.end);
                claim = oracle_words(doc, sidx, cc.end, end);
                if let Some(pm) = pm.filter(|p| p.start < cc.start) {
                    premise = oracle_words(doc, sidx, pm.start, cc.start);
                }
            }
        } else if !strict {
            if let Some(pm) = pm {
                premise = oracle_words(doc, sidx, pm.start, pct);
            }
        }
    } else {
        match (cm, pm) {
            (Some(c), Some(p)) if c.start < p.start => {
                claim = oracle_words(doc, sidx, c.start, p.start);
                premise = oracle_words(doc, sidx, p.start, pct);
            }
            (Some(c), Some(p)) if p.start < c.start => {
                premise = oracle_words(doc, sidx, p.start, c.start);
                claim = oracle_words(doc, sidx, c.start, pct);
            }
            (Some(c), Some(_)) | (Some(c), None) => {
                claim = oracle_words(doc, sidx, c.start, pct);
            }
            (None, Some(p)) => {
                premise = oracle_words(doc, sidx, p.start, pct);
            }
            (None, None) => {}
        }
    }
    (claim, premise)
}

fn oracle_first_macro(doc: &Document, sidx: usize, ty: &str) -> Option<Span> {
    let sentence = doc.sentences[sidx].span;
    let mut best: Option<Span> = None;
    for ann in doc.annotations() {
        if ann.ty != ty || !sentence.contains(ann.span) {
            continue;
        }
        best = Some(match best {
            None => ann.span,
            Some(b) if (ann.span.start, usize::MAX - ann.span.end) < (b.start, usize::MAX - b.end) => {
                ann.span
            }
            Some(b) => b,
        });
    }
    best
}

fn oracle_is_macro_covered(doc: &Document, offset: usize) -> bool {
    doc.annotations().iter().any(|a| {
        (a.ty == "ClaimMacro" || a.ty == "PremiseMacro")
            && a.span.start <= offset
            && offset < a.span.end
    })
}

fn oracle_first_cc(doc: &Document, sidx: usize) -> Option<Span> {
    for idx in doc.sentences[sidx].token_range.clone() {
        let token = &doc.tokens[idx];
        if token.pos == Some(PosTag::Conj) && !oracle_is_macro_covered(doc, token.span.start) {
            return Some(token.span);
        }
    }
    None
}

fn oracle_clause_end(doc: &Document, sidx: usize, macro_end: usize) -> usize {
    for idx in doc.sentences[sidx].token_range.clone() {
        let token = &doc.tokens[idx];
        if token.span.start < macro_end {
            continue;
        }
        let free_cc =
            token.pos == Some(PosTag::Conj) && !oracle_is_macro_covered(doc, token.span.start);
        if free_cc || token.surface == ";" {
            return token.span.start;
        }
    }
    doc.sentences[sidx].terminal.start
}

fn oracle_words(doc: &Document, sidx: usize, a: usize, b: usize) -> Option<Span> {
    let (lo, hi) = (a.min(b), a.max(b));
    let mut covered: Vec<Span> = Vec::new();
    for idx in doc.sentences[sidx].token_range.clone() {
        let token = &doc.tokens[idx];
        if token.span.start >= lo && token.span.end <= hi && token.kind != TokenKind::Punct {
            covered.push(token.span);
        }
    }
    match (covered.first(), covered.last()) {
        (Some(first), Some(last)) => Some(Span::new(first.start, last.end)),
        _ => None,
    }
}

#[test]
fn criterion_2_algorithm_oracle_equivalence() {
    let started = Instant::now();
    let pipeline = pipeline();
    let mut rng = ChaCha8Rng::seed_from_u64(20240817);

    let claim_indicators = ["therefore", "we can conclude that", "so", "thus"];
    let premise_indicators = ["since", "because", "in particular", "as shown by"];
    let people = ["doctors", "woman", "survivors", "key informants", "patients"];
    let claim_verbs = ["reported", "identified", "provides", "highlighted"];
    let premise_verbs = ["noted", "observed", "received"];
    let elements = ["risk", "factors"];
    let cancer_words = ["breast cancer", "cancer"];
    let domains = ["family history", "spirituality"];
    let qualifiers = ["many", "some"];
    let ccs = ["and", "but", "or", "nor", "yet"];
    let fillers = ["alpha", "beta", "gamma", "delta", "omega", "sigma"];

    let mut sentences_checked = 0;
    for case in 0..500 {
        let segments = rng.gen_range(3..=12);
        let mut words: Vec<&str> = Vec::new();
        for _ in 0..segments {
            let pool: &[&str] = match rng.gen_range(0..11) {
                0 => &claim_indicators,
                1 => &premise_indicators,
                2 => &people,
                3 => &claim_verbs,
                4 => &premise_verbs,
                5 => &elements,
                6 => &cancer_words,
                7 => &domains,
                8 => &qualifiers,
                9 => &ccs,
                _ => &fillers,
            };
            words.push(pool[rng.gen_range(0..pool.len())]);
        }
        let text = format!("{}.", words.join(" "));
        let doc = pipeline.annotate(&format!("gen{case}"), &text);
        assert_eq!(doc.sentences.len(), 1, "generator sentence split: {text}");

        for (mode, strict) in [(MineMode::Strict, true), (MineMode::Extended, false)] {
            let (claim, premise) = mine_sentence(&doc, 0, mode);
            let (oracle_claim, oracle_premise) = oracle_mine(&doc, 0, strict);
            assert_eq!(
                claim.as_ref().map(|c| c.span),
                oracle_claim,
                "claim mismatch ({mode:?}) on: {text}"
            );
            assert_eq!(
                premise.as_ref().map(|p| p.span),
                oracle_premise,
                "premise mismatch ({mode:?}) on: {text}"
            );
        }
        sentences_checked += 1;
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "criterion 2 took {elapsed:?}");
    println!("criterion 2 (mining oracle equivalence, {sentences_checked} sentences x 2 modes): pass in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// Criterion 3: materialisation against a naive fixpoint oracle
// ---------------------------------------------------------------------------

/// Naive closure: iterate every rule over every fact combination until
/// nothing new appears. One flat set, no asserted/derived split.
fn naive_closure(tbox: &[TBoxAxiom], asserted: &[Assertion]) -> BTreeSet<Assertion> {
    let mut facts: BTreeSet<Assertion> = asserted.iter().cloned().collect();
    loop {
        let mut fresh: Vec<Assertion> = Vec::new();
        let snapshot: Vec<Assertion> = facts.iter().cloned().collect();
        for axiom in tbox {
            for fact in &snapshot {
                match (axiom, fact) {
                    (
                        TBoxAxiom::AtomicSubsumption { sub, sup },
                        Assertion::Concept {
                            individual,
                            concept,
                        },
                    ) if concept == sub => {
                        fresh.push(Assertion::concept(individual, sup));
                    }
                    (
                        TBoxAxiom::SubRole { sub, sup },
                        Assertion::Role {
                            subject,
                            object,
                            role,
                        },
                    ) if role == sub => {
                        fresh.push(Assertion::Role {
                            subject: subject.clone(),
                            object: object.clone(),
                            role: sup.clone(),
                        });
                    }
                    (
                        TBoxAxiom::Domain { role, concept },
                        Assertion::Role {
                            subject, role: r, ..
                        },
                    ) if r == role => {
                        fresh.push(Assertion::concept(subject, concept));
                    }
                    (
                        TBoxAxiom::Range { role, concept },
                        Assertion::Role {
                            object: Obj::Individual(obj),
                            role: r,
                            ..
                        },
                    ) if r == role => {
                        fresh.push(Assertion::concept(obj, concept));
                    }
                    (
                        TBoxAxiom::Transitive { role },
                        Assertion::Role {
                            subject,
                            object: Obj::Individual(mid),
                            role: r,
                        },
                    ) if r == role => {
                        for other in &snapshot {
                            if let Assertion::Role {
                                subject: s2,
                                object: Obj::Individual(obj2),
                                role: r2,
                            } = other
                            {
                                if r2 == role && s2 == mid {
                                    fresh.push(Assertion::role(subject, obj2, role));
                                }
                            }
                        }
                    }
                    (
                        TBoxAxiom::Inverse { role, inverse },
                        Assertion::Role {
                            subject,
                            object: Obj::Individual(obj),
                            role: r,
                        },
                    ) => {
                        if r == role {
                            fresh.push(Assertion::role(obj, subject, inverse));
                        } else if r == inverse {
                            fresh.push(Assertion::role(obj, subject, role));
                        }
                    }
                    _ => {}
                }
            }
        }
        let before = facts.len();
        facts.extend(fresh);
        if facts.len() == before {
            return facts;
        }
    }
}

fn random_kb(rng: &mut ChaCha8Rng) -> Vec<Assertion> {
    let concepts = [
        "Argument", "ClinicalArgument", "BreastCancer", "Cancer", "Claim", "Premise",
        "Sentence", "PCArgument", "CPArgument", "Person", "Treatment",
    ];
    let object_roles = [
        "supports", "attacks", "before", "after", "hasClaim", "hasPremise",
        "manifestedSymptom", "appliedTreatment", "affectedDomain", "impliedPerson",
        "haveQuantifier",
    ];
    let data_roles = ["hasText", "hasIndicator", "hasClaimIndicator", "hasPremiseIndicator"];
    let literals = ["In particular", "therefore", "some text"];

    let n_individuals = rng.gen_range(2..=12);
    let individuals: Vec<String> = (0..n_individuals).map(|i| format!("i{i}")).collect();
    let n_assertions = rng.gen_range(1..=40);
    let mut out = Vec::new();
    for _ in 0..n_assertions {
        if rng.gen_bool(0.4) {
            out.push(Assertion::concept(
                &individuals[rng.gen_range(0..individuals.len())],
                concepts[rng.gen_range(0..concepts.len())],
            ));
        } else if rng.gen_bool(0.15) {
            out.push(Assertion::literal_role(
                &individuals[rng.gen_range(0..individuals.len())],
                literals[rng.gen_range(0..literals.len())],
                data_roles[rng.gen_range(0..data_roles.len())],
            ));
        } else {
            out.push(Assertion::role(
                &individuals[rng.gen_range(0..individuals.len())],
                &individuals[rng.gen_range(0..individuals.len())],
                object_roles[rng.gen_range(0..object_roles.len())],
            ));
        }
    }
    out
}

#[test]
fn criterion_3_kb_closure_oracle() {
    let started = Instant::now();
    let tbox = builtin_tbox();
    let mut rng = ChaCha8Rng::seed_from_u64(7031);

    for case in 0..1000 {
        let asserted = random_kb(&mut rng);
        let mut kb = KnowledgeBase::with_builtin_tbox();
        for a in &asserted {
            kb.assert_fact(a.clone()).unwrap();
        }
        kb.materialize();
        let closure: BTreeSet<Assertion> = kb.abox().cloned().collect();
        let expected = naive_closure(&tbox, &asserted);
        assert_eq!(closure, expected, "closure mismatch in case {case}");

        // Idempotence.
        kb.materialize();
        let again: BTreeSet<Assertion> = kb.abox().cloned().collect();
        assert_eq!(closure, again, "materialize not idempotent in case {case}");

        // Monotonicity: one more assertion never removes derived facts.
        if case % 10 == 0 {
            let extra = Assertion::role("i0", "i1", "before");
            kb.assert_fact(extra).unwrap();
            kb.materialize();
            let grown: BTreeSet<Assertion> = kb.abox().cloned().collect();
            assert!(
                closure.is_subset(&grown),
                "materialize not monotone in case {case}"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "criterion 3 took {elapsed:?}");
    println!("criterion 3 (closure oracle, 1000 random KBs): pass in {elapsed:?}");
}

/// The same naive oracle also validates the closure of the ABox mined
/// from the bundled corpus.
#[test]
fn mined_corpus_closure_matches_naive_oracle() {
    let pipeline = pipeline();
    let mut kb = KnowledgeBase::with_builtin_tbox();
    let mut asserted = Vec::new();
    for (id, text) in corpus_docs() {
        for assertion in pipeline.mine(&id, &text).assertions {
            kb.assert_fact(assertion.clone()).unwrap();
            asserted.push(assertion);
        }
    }
    kb.materialize();
    let closure: BTreeSet<Assertion> = kb.abox().cloned().collect();
    assert_eq!(closure, naive_closure(&builtin_tbox(), &asserted));
}

// ---------------------------------------------------------------------------
// Criterion 4: PC/CP classification, exhaustive over <= 3 premises
// ---------------------------------------------------------------------------

/// Reachability oracle for the ordering roles: the closure of `before`
/// is the transitive closure of planted before-edges plus inverted
/// after-edges; the closure of `after` is its mirror.
fn ordering_closure(
    before: &[(String, String)],
    after: &[(String, String)],
) -> BTreeSet<(String, String)> {
    let mut edges: BTreeSet<(String, String)> = before.iter().cloned().collect();
    for (x, y) in after {
        edges.insert((y.clone(), x.clone()));
    }
    loop {
        let mut fresh = Vec::new();
        for (a, b) in &edges {
            for (c, d) in &edges {
                if b == c && !edges.contains(&(a.clone(), d.clone())) {
                    fresh.push((a.clone(), d.clone()));
                }
            }
        }
        if fresh.is_empty() {
            return edges;
        }
        edges.extend(fresh);
    }
}

fn check_classification(
    premise_count: usize,
    before: Vec<(String, String)>,
    after: Vec<(String, String)>,
) {
    let mut kb = KnowledgeBase::with_builtin_tbox();
    kb.assert_fact(Assertion::concept("c", "Claim")).unwrap();
    kb.assert_fact(Assertion::role("a", "c", "hasClaim")).unwrap();
    for i in 0..premise_count {
        let p = format!("p{i}");
        kb.assert_fact(Assertion::concept(&p, "Premise")).unwrap();
        kb.assert_fact(Assertion::role("a", &p, "hasPremise")).unwrap();
    }
    for (x, y) in &before {
        kb.assert_fact(Assertion::role(x, y, "before")).unwrap();
    }
    for (x, y) in &after {
        kb.assert_fact(Assertion::role(x, y, "after")).unwrap();
    }
    kb.classify_individuals();

    let before_closure = ordering_closure(&before, &after);
    let expect_pc = (0..premise_count)
        .any(|i| before_closure.contains(&(format!("p{i}"), "c".to_string())));
    let expect_cp = (0..premise_count)
        .any(|i| before_closure.contains(&("c".to_string(), format!("p{i}"))));

    let got_pc = kb.contains(&Assertion::concept("a", "PCArgument"));
    let got_cp = kb.contains(&Assertion::concept("a", "CPArgument"));
    assert_eq!(
        got_pc, expect_pc,
        "PCArgument mismatch: premises={premise_count} before={before:?} after={after:?}"
    );
    assert_eq!(
        got_cp, expect_cp,
        "CPArgument mismatch: premises={premise_count} before={before:?} after={after:?}"
    );
    // An argument with a claim and premises always classifies as Argument.
    assert!(kb.contains(&Assertion::concept("a", "Argument")));
}

#[test]
fn criterion_4_classification_exhaustive() {
    let started = Instant::now();
    let mut cases = 0;

    // Every combination of direct premise-claim edges: for each premise,
    // one of {none, (p,c):before, (p,c):after, (c,p):before, (c,p):after}.
    for premise_count in 1..=3usize {
        let configs = 5usize.pow(premise_count as u32);
        for config in 0..configs {
            let mut before = Vec::new();
            let mut after = Vec::new();
            let mut remaining = config;
            for i in 0..premise_count {
                let p = format!("p{i}");
                match remaining % 5 {
                    0 => {}
                    1 => before.push((p, "c".to_string())),
                    2 => after.push((p, "c".to_string())),
                    3 => before.push(("c".to_string(), p)),
                    _ => after.push(("c".to_string(), p)),
                }
                remaining /= 5;
            }
            check_classification(premise_count, before, after);
            cases += 1;
        }
    }

    // Every ordering of claim and premises as a before-chain, so PC/CP
    // membership arrives through transitivity.
    for premise_count in 1..=3usize {
        let mut names: Vec<String> = vec!["c".to_string()];
        names.extend((0..premise_count).map(|i| format!("p{i}")));
        for order in permute(&names) {
            let before: Vec<(String, String)> = order
                .windows(2)
                .map(|w| (w[0].clone(), w[1].clone()))
                .collect();
            check_classification(premise_count, before, Vec::new());
            cases += 1;
        }
    }

    let elapsed = started.elapsed();
    println!("criterion 4 (classification, {cases} exhaustive cases): pass in {elapsed:?}");
}

fn permute(items: &[String]) -> Vec<Vec<String>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut tail in permute(&rest) {
            tail.insert(0, item.clone());
            out.push(tail);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Criterion 5: evaluation metrics
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_evaluation_metrics() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4217);

    // Planted-error corpora: construct span sets realising (tp, fp, fn)
    // exactly, then check the scores against the formula.
    for _ in 0..200 {
        let tp = rng.gen_range(0..20usize);
        let fp = rng.gen_range(0..20usize);
        let fn_ = rng.gen_range(0..20usize);

        let gold: Vec<Span> = (0..tp + fn_).map(|i| Span::new(10 * i, 10 * i + 5)).collect();
        let mut pred: Vec<Span> = gold.iter().take(tp).copied().collect();
        for j in 0..fp {
            let base = 10 * (tp + fn_ + j) + 7;
            pred.push(Span::new(base, base + 2));
        }

        let counts = argmine::eval::align_spans(&pred, &gold, MatchMode::Strict);
        assert_eq!((counts.tp, counts.fp, counts.fn_), (tp, fp, fn_));

        let (p, r, f) = prf_scores(counts.tp, counts.fp, counts.fn_);
        let expect_p = if tp + fp == 0 {
            if fn_ == 0 { 1.0 } else { 0.0 }
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let expect_r = if tp + fn_ == 0 {
            if fp == 0 { 1.0 } else { 0.0 }
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let expect_f = if expect_p + expect_r == 0.0 {
            0.0
        } else {
            2.0 * expect_p * expect_r / (expect_p + expect_r)
        };
        assert!((p - expect_p).abs() < 1e-12);
        assert!((r - expect_r).abs() < 1e-12);
        assert!((f - expect_f).abs() < 1e-12);
    }

    // F1 bounds on 10^5 random count triples.
    for _ in 0..100_000 {
        let tp = rng.gen_range(0..1000usize);
        let fp = rng.gen_range(0..1000usize);
        let fn_ = rng.gen_range(0..1000usize);
        let (p, r, f) = prf_scores(tp, fp, fn_);
        assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&f));
        if p + r > 0.0 {
            assert!(p.min(r) <= f + 1e-12 && f <= p.max(r) + 1e-12, "tp={tp} fp={fp} fn={fn_}");
        }
    }

    let elapsed = started.elapsed();
    println!("criterion 5 (metrics: planted errors + 1e5 bound checks): pass in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// Criterion 6: round-trips
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_round_trips() {
    let started = Instant::now();

    // ABox export/parse identity on the mined corpus.
    let pipeline = pipeline();
    let mut kb = KnowledgeBase::with_builtin_tbox();
    for (id, text) in corpus_docs() {
        for assertion in pipeline.mine(&id, &text).assertions {
            kb.assert_fact(assertion).unwrap();
        }
    }
    kb.materialize();
    let exported = export_abox(&kb, false);
    let reparsed: BTreeSet<Assertion> = parse_abox(&exported).unwrap().into_iter().collect();
    let original: BTreeSet<Assertion> = kb.asserted().cloned().collect();
    assert!(!original.is_empty(), "mined corpus ABox should not be empty");
    assert_eq!(reparsed, original, "ABox export/parse identity");

    // Every shipped gazetteer entry, planted with filler separation,
    // produces exactly one Lookup of its majorType.
    let lists_dir = data_dir().join("lists");
    let def = std::fs::read_to_string(lists_dir.join("argmine.def")).unwrap();
    let gazetteer =
        argmine::gazetteer::Gazetteer::load(&lists_dir.join("argmine.def")).unwrap();
    let mut lists_checked = 0;
    for line in def.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(':');
        let file = parts.next().unwrap();
        let major = parts.next().unwrap();
        let content = std::fs::read_to_string(lists_dir.join(file)).unwrap();
        let entries: Vec<&str> = argmine::text::list_lines(&content).collect();
        assert!(!entries.is_empty(), "{file} is empty");

        let text = entries.join(" xylophone ");
        let mut doc = Document::from_text(major, text);
        argmine::gazetteer::annotate_lookups(&mut doc, &gazetteer);
        let found: Vec<String> = doc
            .annotations_of("Lookup")
            .filter(|a| a.feature("majorType") == Some(major))
            .map(|a| doc.slice(a.span).to_lowercase())
            .collect();
        let planted: Vec<String> = entries.iter().map(|e| e.to_lowercase()).collect();
        assert_eq!(found, planted, "round-trip for {major}");
        lists_checked += 1;
    }
    assert_eq!(lists_checked, 9, "all nine shipped lists checked");

    let elapsed = started.elapsed();
    println!("criterion 6 (ABox and gazetteer round-trips): pass in {elapsed:?}");
}

// ---------------------------------------------------------------------------
// Criterion 7: byte-identical pipeline runs
// ---------------------------------------------------------------------------

fn run_binary(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_argmine"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn full_pipeline_run(out_root: &Path, jobs: &str) {
    let gazetteer = data_dir().join("lists/argmine.def");
    let gold = data_dir().join("gold");
    let mut inputs: Vec<PathBuf> = std::fs::read_dir(data_dir().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    inputs.sort();

    let annotate_dir = out_root.join("annotate");
    let mine_dir = out_root.join("mine");
    let abox = out_root.join("mined.abox");
    let csv = out_root.join("report.csv");

    let mut args: Vec<String> = vec![
        "annotate".into(),
        "--gazetteer".into(),
        gazetteer.display().to_string(),
        "--out".into(),
        annotate_dir.display().to_string(),
        "--jobs".into(),
        jobs.into(),
    ];
    args.extend(inputs.iter().map(|p| p.display().to_string()));
    let out = run_binary(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "annotate failed: {}", String::from_utf8_lossy(&out.stderr));

    let mut args: Vec<String> = vec![
        "mine".into(),
        "--gazetteer".into(),
        gazetteer.display().to_string(),
        "--out".into(),
        mine_dir.display().to_string(),
        "--abox".into(),
        abox.display().to_string(),
        "--classify".into(),
        "--jobs".into(),
        jobs.into(),
    ];
    args.extend(inputs.iter().map(|p| p.display().to_string()));
    let out = run_binary(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success(), "mine failed: {}", String::from_utf8_lossy(&out.stderr));

    let out = run_binary(&[
        "eval",
        "--pred",
        &mine_dir.display().to_string(),
        "--gold",
        &gold.display().to_string(),
        "--csv",
        &csv.display().to_string(),
    ]);
    assert!(out.status.success(), "eval failed: {}", String::from_utf8_lossy(&out.stderr));
}

fn dir_files_sorted(root: &Path) -> Vec<PathBuf> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                files.push(path);
            }
        }
    }
    files.sort();
    files
}

#[test]
fn criterion_7_determinism() {
    let started = Instant::now();
    let root = tempfile::tempdir().unwrap();
    let run1 = root.path().join("run1");
    let run2 = root.path().join("run2");
    let run3 = root.path().join("run3");
    full_pipeline_run(&run1, "1");
    full_pipeline_run(&run2, "1");
    full_pipeline_run(&run3, "4");

    let files1 = dir_files_sorted(&run1);
    assert!(files1.len() > 60, "expected a full output tree, got {}", files1.len());
    for reference in &files1 {
        let rel = reference.strip_prefix(&run1).unwrap();
        let bytes = std::fs::read(reference).unwrap();
        for other_root in [&run2, &run3] {
            let other = other_root.join(rel);
            let other_bytes = std::fs::read(&other)
                .unwrap_or_else(|e| panic!("missing {} in {}: {e}", rel.display(), other_root.display()));
            assert_eq!(
                bytes, other_bytes,
                "file {} differs between runs",
                rel.display()
            );
        }
    }

    // The mined corpus must also reproduce the committed evaluation
    // expectations exactly.
    let produced = std::fs::read_to_string(run1.join("report.csv")).unwrap();
    let committed =
        std::fs::read_to_string(data_dir().join("expected/eval_expected.csv")).unwrap();
    assert_eq!(produced, committed, "evaluation report matches committed expectations");

    let elapsed = started.elapsed();
    println!("criterion 7 (byte-identical runs, {} files x 3 runs): pass in {elapsed:?}", files1.len());
}

// ---------------------------------------------------------------------------
// Cross-cutting: mined corpus classifications land in the ABox
// ---------------------------------------------------------------------------

#[test]
fn mined_corpus_classifications_match_fixtures() {
    let pipeline = pipeline();
    let fixtures = load_fixtures();
    let mut kb = KnowledgeBase::with_builtin_tbox();
    for (id, text) in corpus_docs() {
        for assertion in pipeline.mine(&id, &text).assertions {
            kb.assert_fact(assertion).unwrap();
        }
    }
    kb.classify_individuals();

    for (id, expected) in &fixtures {
        let Some(class) = &expected.class else { continue };
        let arg = format!("{id}_arg1");
        let concept = match class.as_str() {
            "PC" => "PCArgument",
            "CP" => "CPArgument",
            _ => "ClaimPremiseArgument",
        };
        assert!(
            kb.query_concept_instances(concept).unwrap().contains(&arg),
            "{arg} should be a {concept}"
        );
        assert!(
            kb.query_concept_instances("Argument").unwrap().contains(&arg),
            "{arg} should be an Argument via subsumption"
        );
    }

    // Order-class sanity: span order backs the asserted class.
    let pc = kb.query_concept_instances("PCArgument").unwrap();
    assert!(pc.contains("ex_pcargument_arg1"), "{pc:?}");

    // Subrole closure lifts the asserted claim indicator to hasIndicator.
    assert!(kb.contains(&Assertion::literal_role(
        "ex_argument_c1",
        "Key informants highlighted",
        "hasIndicator"
    )));
    assert!(kb.contains(&Assertion::literal_role(
        "ex_claimpremise_p1",
        "In particular",
        "hasIndicator"
    )));
}

/// The mining gold corpus agrees with the fixtures (same spans), so the
/// evaluation example "pred equals gold" scores all ones.
#[test]
fn gold_corpus_matches_fixtures() {
    let gold = load_corpus_dir(&data_dir().join("gold")).unwrap();
    let fixtures = load_fixtures();
    assert_eq!(gold.len(), fixtures.len());
    for doc in &gold {
        let expected = &fixtures[&doc.id];
        let claims: BTreeSet<(usize, usize, String)> = doc
            .annotations_of("Claim")
            .map(|a| (a.span.start, a.span.end, a.feature("kind").unwrap().to_string()))
            .collect();
        assert_eq!(claims, expected.claims, "gold claims of {}", doc.id);
    }
    let report = evaluate_corpus(&gold, &gold, MatchMode::Strict).unwrap();
    for row in &report.rows {
        assert_eq!((row.precision, row.recall, row.f1), (1.0, 1.0, 1.0));
    }
}
