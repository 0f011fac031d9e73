//! The `.problem` language.
//!
//! ```text
//! # modus ponens
//! atom A C;
//! cond a = A;
//! cond c_given_a = C | A;
//! assess P(a) = 1;
//! assess P(c_given_a) = 0.9;
//! coherent?
//! extend C?
//! entails {c_given_a, a} => C?
//! iterated C | (c_given_a & a)?
//! rule mp?
//! ```
//!
//! Statements end with `;`, queries with `?`. Everything after `#` on a line
//! is a comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use pentail::event::{ConditionalEvent, EventExpr};
use pentail::rational::{in_unit_interval, parse_rational};
use pentail::Rational;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared name `{0}`")]
    Undeclared(String),
    #[error("`{0}` is already declared")]
    Duplicate(String),
    #[error("`{0}` is not a rational number")]
    NotRational(String),
    #[error("probability {0} is outside [0,1]")]
    OutOfRange(String),
    #[error("antecedent of `{0}` is unsatisfiable")]
    UnsatisfiableAntecedent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {kind}")]
pub struct ParseError {
    pub location: Location,
    pub kind: ParseErrorKind,
}

/// A conditional event as written in a query, remembering the declared name
/// it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Named {
    pub label: String,
    pub cond: Option<String>,
    pub event: ConditionalEvent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Event(Named),
    Conjunction(Named, Named),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Coherent,
    Extend(Target),
    Entails { premises: Vec<Named>, conclusion: Named },
    Iterated { conclusion: Named, premises: Vec<Named> },
    Rule(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub location: Location,
    pub text: String,
    pub kind: QueryKind,
    /// Assessments in force: those written before the query, later ones
    /// overriding earlier ones.
    pub assessments: BTreeMap<String, Rational>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProblemFile {
    pub atoms: Vec<String>,
    pub conds: BTreeMap<String, ConditionalEvent>,
    pub queries: Vec<Query>,
}

/// A statement with the offset of its first character in the source.
struct Statement {
    text: String,
    start: usize,
    terminator: char,
}

struct Parser<'a> {
    source: &'a str,
    line_starts: Vec<usize>,
    problem: ProblemFile,
    atoms: BTreeSet<String>,
    assessments: BTreeMap<String, Rational>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `s` at top-level occurrences of `sep`, returning each part with its
/// byte offset.
fn split_top(s: &str, sep: char) -> Vec<(usize, &str)> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut begin = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push((begin, &s[begin..i]));
                begin = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push((begin, &s[begin..]));
    parts
}

/// Trims whitespace, adjusting the offset.
fn trimmed(offset: usize, s: &str) -> (usize, &str) {
    let lead = s.len() - s.trim_start().len();
    (offset + lead, s.trim())
}

/// Removes one pair of parentheses enclosing the whole text.
fn strip_parens(offset: usize, s: &str) -> (usize, &str) {
    if s.starts_with('(') && s.ends_with(')') {
        let mut depth = 0;
        for (i, c) in s.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 && i + 1 < s.len() {
                        return (offset, s);
                    }
                }
                _ => {}
            }
        }
        return trimmed(offset + 1, &s[1..s.len() - 1]);
    }
    (offset, s)
}

impl<'a> Parser<'a> {
    fn new(source: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(source.match_indices('\n').map(|(i, _)| i + 1));
        Parser {
            source,
            line_starts,
            problem: ProblemFile::default(),
            atoms: BTreeSet::new(),
            assessments: BTreeMap::new(),
        }
    }

    fn location(&self, offset: usize) -> Location {
        let line = self.line_starts.partition_point(|&s| s <= offset);
        let start = self.line_starts[line - 1];
        Location { line, column: self.source[start..offset].chars().count() + 1 }
    }

    fn error(&self, offset: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { location: self.location(offset), kind }
    }

    fn syntax(&self, offset: usize, message: impl Into<String>) -> ParseError {
        self.error(offset, ParseErrorKind::Syntax(message.into()))
    }

    fn statements(&self) -> Result<Vec<Statement>, ParseError> {
        let clean = strip_comments(self.source);
        let mut out = Vec::new();
        let mut begin = 0;
        for (i, c) in clean.char_indices() {
            if c == ';' || c == '?' {
                let (start, text) = trimmed(begin, &clean[begin..i]);
                out.push(Statement { text: text.to_string(), start, terminator: c });
                begin = i + 1;
            }
        }
        let (start, rest) = trimmed(begin, &clean[begin..]);
        if !rest.is_empty() {
            return Err(self.syntax(start, "statement is missing its terminating `;` or `?`"));
        }
        Ok(out)
    }

    fn parse(mut self) -> Result<ProblemFile, ParseError> {
        for st in self.statements()? {
            let (offset, text) = (st.start, st.text.as_str());
            if text.is_empty() {
                return Err(self.syntax(offset, "empty statement"));
            }
            let keyword_end = text.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(text.len());
            let keyword = &text[..keyword_end];
            let (rest_offset, rest) = trimmed(offset + keyword_end, &text[keyword_end..]);
            match (keyword, st.terminator) {
                ("atom", ';') => self.atom(rest_offset, rest)?,
                ("cond", ';') => self.cond(rest_offset, rest)?,
                ("assess", ';') => self.assess(rest_offset, rest)?,
                ("coherent", '?') if rest.is_empty() => self.push(offset, text, QueryKind::Coherent),
                ("extend", '?') => {
                    let kind = QueryKind::Extend(self.target(rest_offset, rest)?);
                    self.push(offset, text, kind)
                }
                ("entails", '?') => {
                    let kind = self.entails(rest_offset, rest)?;
                    self.push(offset, text, kind)
                }
                ("iterated", '?') => {
                    let kind = self.iterated(rest_offset, rest)?;
                    self.push(offset, text, kind)
                }
                ("rule", '?') if is_identifier(&rest.replace('-', "_")) => {
                    self.push(offset, text, QueryKind::Rule(rest.to_string()))
                }
                ("atom" | "cond" | "assess", '?') => {
                    return Err(self.syntax(offset, format!("`{keyword}` declarations end with `;`")))
                }
                ("coherent" | "extend" | "entails" | "iterated" | "rule", ';') => {
                    return Err(self.syntax(offset, format!("`{keyword}` queries end with `?`")))
                }
                ("coherent" | "rule", _) => return Err(self.syntax(rest_offset, "unexpected text")),
                _ => return Err(self.syntax(offset, format!("unknown statement `{keyword}`"))),
            }
        }
        Ok(self.problem)
    }

    fn push(&mut self, offset: usize, text: &str, kind: QueryKind) {
        self.problem.queries.push(Query {
            location: self.location(offset),
            text: text.to_string(),
            kind,
            assessments: self.assessments.clone(),
        });
    }

    fn declared(&self, name: &str) -> bool {
        self.atoms.contains(name) || self.problem.conds.contains_key(name)
    }

    fn atom(&mut self, offset: usize, rest: &str) -> Result<(), ParseError> {
        if rest.is_empty() {
            return Err(self.syntax(offset, "expected at least one atom name"));
        }
        let mut pos = 0;
        for name in rest.split_whitespace() {
            let at = offset + rest[pos..].find(name).map_or(0, |i| i + pos);
            pos = at - offset + name.len();
            if !is_identifier(name) || name == "TRUE" || name == "FALSE" {
                return Err(self.syntax(at, format!("`{name}` is not a valid atom name")));
            }
            if self.declared(name) {
                return Err(self.error(at, ParseErrorKind::Duplicate(name.into())));
            }
            self.atoms.insert(name.to_string());
            self.problem.atoms.push(name.to_string());
        }
        Ok(())
    }

    fn cond(&mut self, offset: usize, rest: &str) -> Result<(), ParseError> {
        let Some(eq) = rest.find('=') else {
            return Err(self.syntax(offset, "expected `cond <name> = <event>`"));
        };
        let (name_offset, name) = trimmed(offset, &rest[..eq]);
        if !is_identifier(name) {
            return Err(self.syntax(name_offset, "expected a name before `=`"));
        }
        if self.declared(name) {
            return Err(self.error(name_offset, ParseErrorKind::Duplicate(name.into())));
        }
        let (expr_offset, expr) = trimmed(offset + eq + 1, &rest[eq + 1..]);
        let event = self.event(expr_offset, expr, name)?;
        self.problem.conds.insert(name.to_string(), event);
        Ok(())
    }

    fn assess(&mut self, offset: usize, rest: &str) -> Result<(), ParseError> {
        let shape = || "expected `assess P(<name>) = <rational>`";
        let Some(after_p) = rest.strip_prefix("P") else { return Err(self.syntax(offset, shape())) };
        let (open_offset, after_p) = trimmed(offset + 1, after_p);
        let Some(inner) = after_p.strip_prefix('(') else { return Err(self.syntax(open_offset, shape())) };
        let Some(close) = inner.find(')') else { return Err(self.syntax(open_offset, "unclosed `(`")) };
        let (name_offset, name) = trimmed(open_offset + 1, &inner[..close]);
        if !self.problem.conds.contains_key(name) {
            return Err(self.error(name_offset, ParseErrorKind::Undeclared(name.into())));
        }
        let (eq_offset, tail) = trimmed(open_offset + 1 + close + 1, &inner[close + 1..]);
        let Some(value) = tail.strip_prefix('=') else { return Err(self.syntax(eq_offset, "expected `=`")) };
        let (value_offset, value) = trimmed(eq_offset + 1, value);
        let v = parse_rational(value).map_err(|_| self.error(value_offset, ParseErrorKind::NotRational(value.into())))?;
        if !in_unit_interval(&v) {
            return Err(self.error(value_offset, ParseErrorKind::OutOfRange(value.into())));
        }
        self.assessments.insert(name.to_string(), v);
        Ok(())
    }

    /// A conditional event over declared atoms.
    fn event(&self, offset: usize, text: &str, label: &str) -> Result<ConditionalEvent, ParseError> {
        if text.is_empty() {
            return Err(self.syntax(offset, "expected an event"));
        }
        let bar = split_top(text, '|').into_iter().nth(1).map(|(i, _)| i - 1);
        let (consequent, antecedent) = match bar {
            Some(i) => ((offset, &text[..i]), Some(trimmed(offset + i + 1, &text[i + 1..]))),
            None => ((offset, text), None),
        };
        let expr = |(o, t): (usize, &str)| -> Result<EventExpr, ParseError> {
            let (o, t) = trimmed(o, t);
            let e = EventExpr::parse(t).map_err(|e| self.syntax(o + e.offset, e.message))?;
            for a in e.atoms() {
                if !self.atoms.contains(a.name()) {
                    let at = find_word(t, a.name()).map_or(o, |i| o + i);
                    return Err(self.error(at, ParseErrorKind::Undeclared(a.name().into())));
                }
            }
            Ok(e)
        };
        let e = expr(consequent)?;
        let h = match antecedent {
            Some(a) => expr(a)?,
            None => EventExpr::True,
        };
        ConditionalEvent::new(e, h)
            .map_err(|_| self.error(offset, ParseErrorKind::UnsatisfiableAntecedent(label.into())))
    }

    /// A declared conditional name or an inline event.
    fn named(&self, offset: usize, text: &str) -> Result<Named, ParseError> {
        let (offset, text) = trimmed(offset, text);
        if let Some(event) = self.problem.conds.get(text) {
            return Ok(Named { label: text.into(), cond: Some(text.into()), event: event.clone() });
        }
        let (o, t) = strip_parens(offset, text);
        let event = self.event(o, t, text)?;
        Ok(Named { label: text.into(), cond: None, event })
    }

    fn cond_names<'t>(&self, text: &'t str) -> Option<Vec<&'t str>> {
        let parts: Vec<&str> = split_top(text, '&').into_iter().map(|(_, p)| p.trim()).collect();
        (parts.len() > 1 && parts.iter().all(|p| self.problem.conds.contains_key(*p))).then_some(parts)
    }

    fn target(&self, offset: usize, text: &str) -> Result<Target, ParseError> {
        if text.is_empty() {
            return Err(self.syntax(offset, "expected a target after `extend`"));
        }
        match self.cond_names(text) {
            Some(parts) if parts.len() == 2 => {
                let parts = split_top(text, '&');
                Ok(Target::Conjunction(
                    self.named(offset + parts[0].0, parts[0].1)?,
                    self.named(offset + parts[1].0, parts[1].1)?,
                ))
            }
            Some(_) => Err(self.syntax(offset, "extension targets conjoin at most two conditionals")),
            None => Ok(Target::Event(self.named(offset, text)?)),
        }
    }

    fn entails(&self, offset: usize, text: &str) -> Result<QueryKind, ParseError> {
        let shape = "expected `entails {<premise>, ...} => <conclusion>`";
        let Some(arrow) = text.find("=>") else { return Err(self.syntax(offset, shape)) };
        let (set_offset, set) = trimmed(offset, &text[..arrow]);
        let Some(inner) = set.strip_prefix('{').and_then(|s| s.strip_suffix('}')) else {
            return Err(self.syntax(set_offset, shape));
        };
        let premises = split_top(inner, ',')
            .into_iter()
            .map(|(i, p)| {
                if p.trim().is_empty() {
                    Err(self.syntax(set_offset + 1 + i, "empty premise"))
                } else {
                    self.named(set_offset + 1 + i, p)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let conclusion = self.named(offset + arrow + 2, &text[arrow + 2..])?;
        Ok(QueryKind::Entails { premises, conclusion })
    }

    fn iterated(&self, offset: usize, text: &str) -> Result<QueryKind, ParseError> {
        let parts = split_top(text, '|');
        if parts.len() < 2 {
            return Err(self.syntax(offset, "expected `iterated <conclusion> | (<premise> & <premise>)`"));
        }
        // the antecedent follows the last top-level bar
        let (bar, _) = parts[parts.len() - 1];
        let conclusion = self.named(offset, &text[..bar - 1])?;
        let (ao, antecedent) = trimmed(offset + bar, &text[bar..]);
        let (io, inner) = strip_parens(ao, antecedent);
        let premises = match self.cond_names(inner) {
            Some(_) => split_top(inner, '&')
                .into_iter()
                .map(|(i, p)| self.named(io + i, p))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![self.named(ao, antecedent)?],
        };
        Ok(QueryKind::Iterated { conclusion, premises })
    }
}

/// Replaces comments with spaces so offsets are preserved.
fn strip_comments(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut in_comment = false;
    for c in text.chars() {
        match c {
            '#' => in_comment = true,
            '\n' => in_comment = false,
            _ => {}
        }
        if in_comment && c != '\n' {
            out.extend(std::iter::repeat_n(' ', c.len_utf8()));
        } else {
            out.push(c);
        }
    }
    out
}

fn find_word(text: &str, word: &str) -> Option<usize> {
    text.match_indices(word).map(|(i, _)| i).find(|&i| {
        let before = text[..i].chars().next_back();
        let after = text[i + word.len()..].chars().next();
        let boundary = |c: Option<char>| !c.is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
        boundary(before) && boundary(after)
    })
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ParseError> {
    Parser::new(text).parse()
}
