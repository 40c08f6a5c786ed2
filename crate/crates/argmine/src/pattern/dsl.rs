//! Concrete syntax for pattern rules: parser and round-trip printer.

use thiserror::Error;

use super::{
    Constraint, FeatureValue, NodeKind, PatternElement, PatternNode, Phase, Quantifier, RhsAction,
    Rule,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DslError {
    #[error("syntax error at line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("line {line}: rule {rule} action references unbound label :{label}")]
    UnknownBinding {
        line: usize,
        rule: String,
        label: String,
    },
}

fn syntax(line: usize, reason: impl Into<String>) -> DslError {
    DslError::Syntax {
        line,
        reason: reason.into(),
    }
}

/// Parse rule source into phases, in source order.
///
/// Rules appearing before any `Phase:` header go into an implicit phase
/// named `Main`.
pub fn parse_rules(source: &str) -> Result<Vec<Phase>, DslError> {
    let mut phases: Vec<Phase> = Vec::new();
    let mut current: Option<Phase> = None;

    let lines: Vec<&str> = source.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let line = lines[i].trim();
        let lineno = i + 1;
        if line.is_empty() || line.starts_with('#') {
            i += 1;
            continue;
        }
        if let Some(name) = line.strip_prefix("Phase:") {
            if let Some(phase) = current.take() {
                phases.push(phase);
            }
            let name = name.trim();
            if name.is_empty() {
                return Err(syntax(lineno, "Phase: requires a name"));
            }
            current = Some(Phase {
                name: name.to_string(),
                input: None,
                max_gap: 0,
                rules: Vec::new(),
            });
            i += 1;
        } else if let Some(types) = line.strip_prefix("Input:") {
            let phase = current
                .as_mut()
                .ok_or_else(|| syntax(lineno, "Input: before any Phase:"))?;
            phase.input = Some(types.split_whitespace().map(String::from).collect());
            i += 1;
        } else if let Some(gap) = line.strip_prefix("Gap:") {
            let phase = current
                .as_mut()
                .ok_or_else(|| syntax(lineno, "Gap: before any Phase:"))?;
            phase.max_gap = gap
                .trim()
                .parse()
                .map_err(|_| syntax(lineno, format!("invalid gap {:?}", gap.trim())))?;
            i += 1;
        } else if let Some(name) = line.strip_prefix("Rule:") {
            let rule_name = name.trim().to_string();
            if rule_name.is_empty() {
                return Err(syntax(lineno, "Rule: requires a name"));
            }
            i += 1;
            let mut priority = 0;
            // Optional Priority: header directly after the rule name.
            while i < lines.len() {
                let l = lines[i].trim();
                if let Some(p) = l.strip_prefix("Priority:") {
                    priority = p
                        .trim()
                        .parse()
                        .map_err(|_| syntax(i + 1, format!("invalid priority {:?}", p.trim())))?;
                    i += 1;
                } else if l.is_empty() || l.starts_with('#') {
                    i += 1;
                } else {
                    break;
                }
            }
            // Body: accumulate until the next header keyword or EOF.
            let body_start = i;
            let mut body = String::new();
            while i < lines.len() {
                let l = lines[i].trim();
                if l.starts_with("Rule:")
                    || l.starts_with("Phase:")
                    || l.starts_with("Input:")
                    || l.starts_with("Gap:")
                    || l.starts_with("Priority:")
                {
                    break;
                }
                if !body.is_empty() {
                    body.push('\n');
                }
                body.push_str(lines[i]);
                i += 1;
            }
            let rule = parse_rule_body(&rule_name, priority, &body, body_start + 1)?;
            let phase = current.get_or_insert_with(|| Phase {
                name: "Main".to_string(),
                input: None,
                max_gap: 0,
                rules: Vec::new(),
            });
            if phase.rules.iter().any(|r| r.name == rule.name) {
                return Err(syntax(
                    lineno,
                    format!("duplicate rule name {rule_name} in phase {}", phase.name),
                ));
            }
            phase.rules.push(rule);
        } else {
            return Err(syntax(lineno, format!("unexpected content {line:?}")));
        }
    }
    if let Some(phase) = current.take() {
        phases.push(phase);
    }
    Ok(phases)
}

// ---------------------------------------------------------------------------
// Rule-body lexer and parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
    Question,
    Star,
    Plus,
    Eq,
    EqEq,
    Arrow,
    Ident(String),
    Str(String),
}

struct Lexer {
    toks: Vec<(Tok, usize)>, // token + source line
    pos: usize,
    last_line: usize,
}

impl Lexer {
    fn new(body: &str, base_line: usize) -> Result<Lexer, DslError> {
        let mut toks = Vec::new();
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        let mut line = base_line;
        while i < chars.len() {
            let c = chars[i];
            match c {
                '\n' => {
                    line += 1;
                    i += 1;
                }
                c if c.is_whitespace() => i += 1,
                '#' => {
                    while i < chars.len() && chars[i] != '\n' {
                        i += 1;
                    }
                }
                '(' => {
                    toks.push((Tok::LParen, line));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, line));
                    i += 1;
                }
                '{' => {
                    toks.push((Tok::LBrace, line));
                    i += 1;
                }
                '}' => {
                    toks.push((Tok::RBrace, line));
                    i += 1;
                }
                ',' => {
                    toks.push((Tok::Comma, line));
                    i += 1;
                }
                ':' => {
                    toks.push((Tok::Colon, line));
                    i += 1;
                }
                '.' => {
                    toks.push((Tok::Dot, line));
                    i += 1;
                }
                '?' => {
                    toks.push((Tok::Question, line));
                    i += 1;
                }
                '*' => {
                    toks.push((Tok::Star, line));
                    i += 1;
                }
                '+' => {
                    toks.push((Tok::Plus, line));
                    i += 1;
                }
                '-' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                    toks.push((Tok::Arrow, line));
                    i += 3;
                }
                '=' if chars.get(i + 1) == Some(&'=') => {
                    toks.push((Tok::EqEq, line));
                    i += 2;
                }
                '=' => {
                    toks.push((Tok::Eq, line));
                    i += 1;
                }
                '"' => {
                    let mut s = String::new();
                    i += 1;
                    loop {
                        match chars.get(i) {
                            Some('"') => {
                                i += 1;
                                break;
                            }
                            Some('\\') if chars.get(i + 1).is_some() => {
                                s.push(chars[i + 1]);
                                i += 2;
                            }
                            Some(&c) => {
                                s.push(c);
                                i += 1;
                            }
                            None => return Err(syntax(line, "unterminated string literal")),
                        }
                    }
                    toks.push((Tok::Str(s), line));
                }
                c if c.is_alphanumeric() || c == '_' => {
                    let mut s = String::new();
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        s.push(chars[i]);
                        i += 1;
                    }
                    toks.push((Tok::Ident(s), line));
                }
                other => return Err(syntax(line, format!("unexpected character {other:?}"))),
            }
        }
        Ok(Lexer {
            toks,
            pos: 0,
            last_line: line,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l)| *l)
            .unwrap_or(self.last_line)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), DslError> {
        let line = self.line();
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(syntax(line, format!("expected {what}, found {other:?}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, DslError> {
        let line = self.line();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(syntax(line, format!("expected {what}, found {other:?}"))),
        }
    }
}

fn parse_rule_body(
    name: &str,
    priority: i32,
    body: &str,
    base_line: usize,
) -> Result<Rule, DslError> {
    let mut lx = Lexer::new(body, base_line)?;
    let mut lhs = Vec::new();
    while lx.peek() == Some(&Tok::LParen) {
        lhs.push(parse_group(&mut lx)?);
    }
    if lhs.is_empty() {
        return Err(syntax(lx.line(), format!("rule {name} has an empty pattern")));
    }
    if lhs.len() == 1
        && matches!(lhs[0].quantifier, Quantifier::Star | Quantifier::Plus)
    {
        return Err(syntax(
            lx.line(),
            format!("rule {name}: a Star/Plus element may not be the sole element"),
        ));
    }
    lx.expect(Tok::Arrow, "-->")?;
    let mut rhs = Vec::new();
    loop {
        rhs.push(parse_action(&mut lx)?);
        if lx.peek() == Some(&Tok::Comma) {
            lx.next();
        } else {
            break;
        }
    }
    if let Some(t) = lx.peek() {
        return Err(syntax(lx.line(), format!("trailing content {t:?}")));
    }

    // Every label used on the RHS must be bound on the LHS.
    let mut bound = Vec::new();
    collect_bindings(&lhs, &mut bound);
    for action in &rhs {
        let mut used = vec![action.label.clone()];
        for (_, v) in &action.features {
            if let FeatureValue::BindingText(l) = v {
                used.push(l.clone());
            }
        }
        for label in used {
            if !bound.contains(&label) {
                return Err(DslError::UnknownBinding {
                    line: base_line,
                    rule: name.to_string(),
                    label,
                });
            }
        }
    }

    Ok(Rule {
        name: name.to_string(),
        priority,
        lhs,
        rhs,
    })
}

fn collect_bindings(nodes: &[PatternNode], out: &mut Vec<String>) {
    for node in nodes {
        if let Some(b) = &node.binding {
            out.push(b.clone());
        }
        if let NodeKind::Sequence(inner) = &node.kind {
            collect_bindings(inner, out);
        }
    }
}

/// `'(' (element | group)+ ')' quant? (':' label)?`
fn parse_group(lx: &mut Lexer) -> Result<PatternNode, DslError> {
    lx.expect(Tok::LParen, "(")?;
    let mut children = Vec::new();
    loop {
        match lx.peek() {
            Some(Tok::LBrace) => {
                let element = parse_element(lx)?;
                children.push(PatternNode {
                    kind: NodeKind::Element(element),
                    quantifier: Quantifier::One,
                    binding: None,
                });
            }
            Some(Tok::LParen) => children.push(parse_group(lx)?),
            Some(Tok::RParen) => break,
            other => {
                return Err(syntax(
                    lx.line(),
                    format!("expected {{element}} or group, found {other:?}"),
                ))
            }
        }
    }
    lx.expect(Tok::RParen, ")")?;
    if children.is_empty() {
        return Err(syntax(lx.line(), "empty group"));
    }

    let quantifier = match lx.peek() {
        Some(Tok::Question) => {
            lx.next();
            Quantifier::Optional
        }
        Some(Tok::Star) => {
            lx.next();
            Quantifier::Star
        }
        Some(Tok::Plus) => {
            lx.next();
            Quantifier::Plus
        }
        _ => Quantifier::One,
    };
    let binding = if lx.peek() == Some(&Tok::Colon) {
        lx.next();
        Some(lx.ident("binding label")?)
    } else {
        None
    };

    // A group around a single bare element collapses to that element.
    let kind = if children.len() == 1
        && children[0].binding.is_none()
        && children[0].quantifier == Quantifier::One
    {
        children.pop().unwrap().kind
    } else {
        NodeKind::Sequence(children)
    };
    Ok(PatternNode {
        kind,
        quantifier,
        binding,
    })
}

/// `'{' constraint (',' constraint)* '}'`
fn parse_element(lx: &mut Lexer) -> Result<PatternElement, DslError> {
    lx.expect(Tok::LBrace, "{")?;
    let mut constraints = Vec::new();
    loop {
        let ty = lx.ident("annotation type")?;
        let mut features = Vec::new();
        while lx.peek() == Some(&Tok::Dot) {
            lx.next();
            let feature = lx.ident("feature name")?;
            lx.expect(Tok::EqEq, "==")?;
            let line = lx.line();
            match lx.next() {
                Some(Tok::Str(value)) => features.push((feature, value)),
                other => {
                    return Err(syntax(line, format!("expected string value, found {other:?}")))
                }
            }
        }
        constraints.push(Constraint { ty, features });
        match lx.peek() {
            Some(Tok::Comma) => {
                lx.next();
            }
            Some(Tok::RBrace) => break,
            other => return Err(syntax(lx.line(), format!("expected , or }}, found {other:?}"))),
        }
    }
    lx.expect(Tok::RBrace, "}")?;
    Ok(PatternElement { constraints })
}

/// `':' label '.' NewType '=' '{' feat '=' value (',' feat '=' value)* '}'`
fn parse_action(lx: &mut Lexer) -> Result<RhsAction, DslError> {
    lx.expect(Tok::Colon, ":")?;
    let label = lx.ident("binding label")?;
    lx.expect(Tok::Dot, ".")?;
    let new_type = lx.ident("annotation type")?;
    lx.expect(Tok::Eq, "=")?;
    lx.expect(Tok::LBrace, "{")?;
    let mut features = Vec::new();
    if lx.peek() != Some(&Tok::RBrace) {
        loop {
            let feature = lx.ident("feature name")?;
            lx.expect(Tok::Eq, "=")?;
            let line = lx.line();
            let value = match lx.next() {
                Some(Tok::Str(s)) => FeatureValue::Literal(s),
                Some(Tok::Colon) => {
                    let l = lx.ident("binding label")?;
                    lx.expect(Tok::Dot, ".")?;
                    let what = lx.ident("text")?;
                    if what != "text" {
                        return Err(syntax(line, format!("unknown binding accessor .{what}")));
                    }
                    FeatureValue::BindingText(l)
                }
                other => {
                    return Err(syntax(
                        line,
                        format!("expected string or :label.text, found {other:?}"),
                    ))
                }
            };
            features.push((feature, value));
            if lx.peek() == Some(&Tok::Comma) {
                lx.next();
            } else {
                break;
            }
        }
    }
    lx.expect(Tok::RBrace, "}")?;
    Ok(RhsAction {
        label,
        new_type,
        features,
    })
}

// ---------------------------------------------------------------------------
// Round-trip printer
// ---------------------------------------------------------------------------

/// Print phases back to the concrete syntax. `parse_rules(&print_phases(p))`
/// reproduces `p` exactly.
pub fn print_phases(phases: &[Phase]) -> String {
    let mut out = String::new();
    for phase in phases {
        out.push_str(&format!("Phase: {}\n", phase.name));
        if let Some(input) = &phase.input {
            out.push_str(&format!("Input: {}\n", input.join(" ")));
        }
        if phase.max_gap > 0 {
            out.push_str(&format!("Gap: {}\n", phase.max_gap));
        }
        out.push('\n');
        for rule in &phase.rules {
            out.push_str(&format!("Rule: {}\n", rule.name));
            if rule.priority != 0 {
                out.push_str(&format!("Priority: {}\n", rule.priority));
            }
            for node in &rule.lhs {
                print_node(node, &mut out);
            }
            out.push_str(" -->\n");
            let actions: Vec<String> = rule.rhs.iter().map(print_action).collect();
            out.push_str(&format!("    {}\n\n", actions.join(", ")));
        }
    }
    out
}

fn print_node(node: &PatternNode, out: &mut String) {
    out.push('(');
    match &node.kind {
        NodeKind::Element(element) => print_element(element, out),
        NodeKind::Sequence(children) => {
            for child in children {
                print_node(child, out);
            }
        }
    }
    out.push(')');
    match node.quantifier {
        Quantifier::One => {}
        Quantifier::Optional => out.push('?'),
        Quantifier::Star => out.push('*'),
        Quantifier::Plus => out.push('+'),
    }
    if let Some(b) = &node.binding {
        out.push(':');
        out.push_str(b);
    }
}

fn print_element(element: &PatternElement, out: &mut String) {
    out.push('{');
    let parts: Vec<String> = element
        .constraints
        .iter()
        .map(|c| {
            let mut s = c.ty.clone();
            for (f, v) in &c.features {
                s.push_str(&format!(".{f}==\"{}\"", escape(v)));
            }
            s
        })
        .collect();
    out.push_str(&parts.join(", "));
    out.push('}');
}

fn print_action(action: &RhsAction) -> String {
    let feats: Vec<String> = action
        .features
        .iter()
        .map(|(f, v)| match v {
            FeatureValue::Literal(s) => format!("{f}=\"{}\"", escape(s)),
            FeatureValue::BindingText(l) => format!("{f}=:{l}.text"),
        })
        .collect();
    format!(
        ":{}.{} = {{{}}}",
        action.label,
        action.new_type,
        feats.join(", ")
    )
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
