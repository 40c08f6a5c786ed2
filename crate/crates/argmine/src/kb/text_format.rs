//! Text serialisation for ABoxes and extra TBox axioms.
//!
//! ABox format, one assertion per line, `#` comments:
//!
//! ```text
//! doc1_arg1 : CPArgument
//! (doc1_arg1, doc1_c1) : hasClaim
//! (doc1_c1, "Patients report on the risk") : hasText
//! ```
//!
//! A quoted object is a literal on a data role and an individual name
//! everywhere else; names that are not simple identifiers are quoted on
//! output. TBox files use one axiom per line: `C subClassOf D`,
//! `transitive r`, `inverse r s`, `subRole r s`, `domain r C`,
//! `range r C`.

use super::{is_data_role, Assertion, KbError, KnowledgeBase, Obj, TBoxAxiom};

/// Serialise the ABox: asserted facts, then (optionally) the derived
/// closure under a marker comment.
pub fn export_abox(kb: &KnowledgeBase, with_derived: bool) -> String {
    let mut out = String::new();
    for assertion in kb.asserted() {
        out.push_str(&format_assertion(assertion));
        out.push('\n');
    }
    if with_derived {
        out.push_str("# derived\n");
        for assertion in kb.derived() {
            out.push_str(&format_assertion(assertion));
            out.push('\n');
        }
    }
    out
}

pub fn format_assertion(assertion: &Assertion) -> String {
    match assertion {
        Assertion::Concept {
            individual,
            concept,
        } => format!("{} : {}", quote_name(individual), concept),
        Assertion::Role {
            subject,
            object,
            role,
        } => {
            let obj = match object {
                Obj::Individual(name) => quote_name(name),
                Obj::Literal(text) => quoted(text),
            };
            format!("({}, {}) : {}", quote_name(subject), obj, role)
        }
    }
}

/// Parse an ABox file into assertions, in line order.
pub fn parse_abox(content: &str) -> Result<Vec<Assertion>, KbError> {
    let mut out = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw).trim().to_string();
        if line.is_empty() {
            continue;
        }
        out.push(parse_assertion(&line, lineno)?);
    }
    Ok(out)
}

fn parse_assertion(line: &str, lineno: usize) -> Result<Assertion, KbError> {
    let err = |reason: &str| KbError::Parse {
        line: lineno,
        reason: reason.to_string(),
    };
    let mut scanner = Scanner::new(line, lineno);
    if scanner.peek() == Some('(') {
        scanner.advance();
        let (subject, subject_quoted) = scanner.name()?;
        if subject_quoted && subject.is_empty() {
            return Err(err("empty subject"));
        }
        scanner.expect(',')?;
        let (object, object_quoted) = scanner.name()?;
        scanner.expect(')')?;
        scanner.expect(':')?;
        let role = scanner.rest();
        if role.is_empty() {
            return Err(err("missing role name"));
        }
        let object = if is_data_role(&role) {
            if !object_quoted {
                return Err(KbError::Parse {
                    line: lineno,
                    reason: format!("data role {role} requires a quoted literal object"),
                });
            }
            Obj::Literal(object)
        } else {
            Obj::Individual(object)
        };
        Ok(Assertion::Role {
            subject,
            object,
            role,
        })
    } else {
        let (individual, _) = scanner.name()?;
        scanner.expect(':')?;
        let concept = scanner.rest();
        if concept.is_empty() {
            return Err(err("missing concept name"));
        }
        Ok(Assertion::Concept {
            individual,
            concept,
        })
    }
}

/// Parse a TBox file of extra axioms.
pub fn parse_tbox(content: &str) -> Result<Vec<TBoxAxiom>, KbError> {
    let mut out = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw).trim().to_string();
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let axiom = match words.as_slice() {
            [sub, "subClassOf", sup] => TBoxAxiom::AtomicSubsumption {
                sub: sub.to_string(),
                sup: sup.to_string(),
            },
            ["transitive", role] => TBoxAxiom::Transitive {
                role: role.to_string(),
            },
            ["inverse", role, inverse] => TBoxAxiom::Inverse {
                role: role.to_string(),
                inverse: inverse.to_string(),
            },
            ["subRole", sub, sup] => TBoxAxiom::SubRole {
                sub: sub.to_string(),
                sup: sup.to_string(),
            },
            ["domain", role, concept] => TBoxAxiom::Domain {
                role: role.to_string(),
                concept: concept.to_string(),
            },
            ["range", role, concept] => TBoxAxiom::Range {
                role: role.to_string(),
                concept: concept.to_string(),
            },
            _ => {
                return Err(KbError::Parse {
                    line: lineno,
                    reason: format!("unrecognised axiom {line:?}"),
                })
            }
        };
        out.push(axiom);
    }
    Ok(out)
}

/// Drop a `#` comment, respecting quoted strings.
fn strip_comment(line: &str) -> &str {
    let mut in_quotes = false;
    let mut escaped = false;
    for (idx, c) in line.char_indices() {
        match c {
            '\\' if in_quotes && !escaped => {
                escaped = true;
                continue;
            }
            '"' if !escaped => in_quotes = !in_quotes,
            '#' if !in_quotes => return &line[..idx],
            _ => {}
        }
        escaped = false;
    }
    line
}

fn is_simple_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn quote_name(name: &str) -> String {
    if is_simple_name(name) {
        name.to_string()
    } else {
        quoted(name)
    }
}

fn quoted(text: &str) -> String {
    format!("\"{}\"", text.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Character scanner for one assertion line.
struct Scanner {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Scanner {
    fn new(line: &str, lineno: usize) -> Scanner {
        Scanner {
            chars: line.chars().collect(),
            pos: 0,
            line: lineno,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn advance(&mut self) {
        self.pos += 1;
    }

    fn expect(&mut self, want: char) -> Result<(), KbError> {
        match self.peek() {
            Some(c) if c == want => {
                self.advance();
                Ok(())
            }
            other => Err(KbError::Parse {
                line: self.line,
                reason: format!("expected {want:?}, found {other:?}"),
            }),
        }
    }

    /// A name: quoted string or bare token. Returns (name, was_quoted).
    fn name(&mut self) -> Result<(String, bool), KbError> {
        match self.peek() {
            Some('"') => {
                self.advance();
                let mut s = String::new();
                loop {
                    match self.chars.get(self.pos) {
                        Some('"') => {
                            self.advance();
                            return Ok((s, true));
                        }
                        Some('\\') => {
                            if let Some(&next) = self.chars.get(self.pos + 1) {
                                s.push(next);
                                self.pos += 2;
                            } else {
                                self.advance();
                            }
                        }
                        Some(&c) => {
                            s.push(c);
                            self.advance();
                        }
                        None => {
                            return Err(KbError::Parse {
                                line: self.line,
                                reason: "unterminated quoted name".to_string(),
                            })
                        }
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(&c) = self.chars.get(self.pos) {
                    if c == ',' || c == ')' || c == ':' {
                        break;
                    }
                    s.push(c);
                    self.pos += 1;
                }
                let s = s.trim().to_string();
                if s.is_empty() {
                    return Err(KbError::Parse {
                        line: self.line,
                        reason: "empty name".to_string(),
                    });
                }
                Ok((s, false))
            }
            None => Err(KbError::Parse {
                line: self.line,
                reason: "unexpected end of line".to_string(),
            }),
        }
    }

    fn rest(&mut self) -> String {
        self.skip_ws();
        self.chars[self.pos..].iter().collect::<String>().trim().to_string()
    }
}

/// Load parsed assertions into a KB, reporting the offending line on
/// malformed facts.
pub fn load_abox(kb: &mut KnowledgeBase, content: &str) -> Result<(), KbError> {
    for (idx, raw) in content.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw).trim().to_string();
        if line.is_empty() {
            continue;
        }
        let assertion = parse_assertion(&line, lineno)?;
        kb.assert_fact(assertion).map_err(|e| KbError::Parse {
            line: lineno,
            reason: e.to_string(),
        })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn concept_assertion_round_trips() {
        let parsed = parse_abox("a : BreastCancer\n").unwrap();
        assert_eq!(parsed, vec![Assertion::concept("a", "BreastCancer")]);
        assert_eq!(format_assertion(&parsed[0]), "a : BreastCancer");
    }

    #[test]
    fn role_assertion_round_trips() {
        let parsed = parse_abox("(doc1_arg1, doc1_c1) : hasClaim\n").unwrap();
        assert_eq!(parsed, vec![Assertion::role("doc1_arg1", "doc1_c1", "hasClaim")]);
        assert_eq!(
            format_assertion(&parsed[0]),
            "(doc1_arg1, doc1_c1) : hasClaim"
        );
    }

    #[test]
    fn empty_file_is_empty_abox() {
        assert!(parse_abox("").unwrap().is_empty());
        assert!(parse_abox("# only a comment\n\n").unwrap().is_empty());
    }

    #[test]
    fn quoted_objects_follow_role_kind() {
        let parsed = parse_abox(
            "(a, \"Chemotherapy\") : appliedTreatment\n(c, \"In particular\") : hasIndicator\n",
        )
        .unwrap();
        assert_eq!(
            parsed[0],
            Assertion::role("a", "Chemotherapy", "appliedTreatment")
        );
        assert_eq!(
            parsed[1],
            Assertion::literal_role("c", "In particular", "hasIndicator")
        );
    }

    #[test]
    fn spaced_individual_names_are_quoted_on_output() {
        let a = Assertion::role("a", "Skin irritation or dimpling", "manifestedSymptom");
        let line = format_assertion(&a);
        assert_eq!(line, "(a, \"Skin irritation or dimpling\") : manifestedSymptom");
        assert_eq!(parse_abox(&line).unwrap()[0], a);
    }

    #[test]
    fn bare_object_on_data_role_is_a_parse_error() {
        let err = parse_abox("(a, b) : hasText\n").unwrap_err();
        assert!(matches!(err, KbError::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_abox("a : X\n(broken\n").unwrap_err();
        match err {
            KbError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn export_parse_identity_on_assertion_sets() {
        let mut kb = KnowledgeBase::with_builtin_tbox();
        kb.assert_fact(Assertion::concept("a", "BreastCancer")).unwrap();
        kb.assert_fact(Assertion::role("a", "b", "before")).unwrap();
        kb.assert_fact(Assertion::literal_role("c", "it \"quotes\" and \\slashes\\", "hasText"))
            .unwrap();
        kb.assert_fact(Assertion::role("a", "Family history", "affectedDomain"))
            .unwrap();
        kb.materialize();

        let exported = export_abox(&kb, false);
        let reparsed: BTreeSet<Assertion> = parse_abox(&exported).unwrap().into_iter().collect();
        let original: BTreeSet<Assertion> = kb.asserted().cloned().collect();
        assert_eq!(reparsed, original);
    }

    #[test]
    fn derived_facts_export_under_marker() {
        let mut kb = KnowledgeBase::with_builtin_tbox();
        kb.assert_fact(Assertion::role("a", "b", "before")).unwrap();
        kb.materialize();
        let full = export_abox(&kb, true);
        assert!(full.contains("# derived"));
        assert!(full.contains("(b, a) : after"));
        let plain = export_abox(&kb, false);
        assert!(!plain.contains("after"));
    }

    #[test]
    fn tbox_axioms_parse() {
        let parsed = parse_tbox(
            "Melanoma subClassOf Cancer\ntransitive partOf\ninverse above below\nsubRole hasMainClaim hasClaim\ndomain partOf Thing\nrange partOf Thing\n",
        )
        .unwrap();
        assert_eq!(parsed.len(), 6);
        assert_eq!(
            parsed[0],
            TBoxAxiom::AtomicSubsumption {
                sub: "Melanoma".to_string(),
                sup: "Cancer".to_string()
            }
        );
        assert!(parse_tbox("frobnicate x y\n").is_err());
    }
}
