//! Terms, rewrite rules, the old-style TPDB `.trs` format and
//! dependency-pair generation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(symbol: &str, args: Vec<Term>) -> Term {
        Term::App(symbol.to_string(), args)
    }

    pub fn constant(symbol: &str) -> Term {
        Term::App(symbol.to_string(), Vec::new())
    }

    pub fn root(&self) -> Option<&str> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(x) => {
                if !out.contains(&x.as_str()) {
                    out.push(x);
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// All subterms in pre-order, starting with the term itself.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms<'a>(&'a self, out: &mut Vec<&'a Term>) {
        out.push(self);
        if let Term::App(_, args) = self {
            args.iter().for_each(|a| a.collect_subterms(out));
        }
    }

    /// Visits every `(symbol, arity)` occurrence.
    fn for_each_symbol(&self, f: &mut impl FnMut(&str, usize)) {
        if let Term::App(s, args) = self {
            f(s, args.len());
            args.iter().for_each(|a| a.for_each_symbol(f));
        }
    }

    /// Renames the root symbol `f` to `f#`. Variables are returned unchanged.
    pub fn sharp(&self) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(sharp_symbol(f), args.clone()),
        }
    }

    /// Display adapter; with `legacy` set, marked symbols `f#` render as `F`.
    pub fn display(&self, legacy: bool) -> TermDisplay<'_> {
        TermDisplay { term: self, legacy }
    }
}

pub fn sharp_symbol(f: &str) -> String {
    format!("{f}#")
}

/// `f#` as `F`, for output matching the capitalised convention.
pub fn legacy_symbol(f: &str) -> String {
    match f.strip_suffix('#') {
        Some(base) => {
            let mut chars = base.chars();
            match chars.next() {
                Some(c) => c.to_uppercase().chain(chars).collect(),
                None => f.to_string(),
            }
        }
        None => f.to_string(),
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    legacy: bool,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(x) => write!(f, "{x}"),
            Term::App(s, args) => {
                if self.legacy {
                    write!(f, "{}", legacy_symbol(s))?;
                } else {
                    write!(f, "{s}")?;
                }
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a.display(self.legacy))?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(false))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Rule {
        Rule { lhs, rhs }
    }

    /// Left-hand side is not a variable and the right-hand side introduces
    /// no fresh variables.
    pub fn is_well_formed(&self) -> bool {
        let lv = self.lhs.vars();
        !self.lhs.is_var() && self.rhs.vars().iter().all(|x| lv.contains(x))
    }

    pub fn display(&self, legacy: bool) -> String {
        format!(
            "{} -> {}",
            self.lhs.display(legacy),
            self.rhs.display(legacy)
        )
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(false))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trs {
    pub variables: Vec<String>,
    pub rules: Vec<Rule>,
    /// Rules written with `->=`, for relative termination problems.
    pub relative: Vec<Rule>,
    pub signature: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: rule `{rule}` has a variable left-hand side")]
    VariableLhs {
        line: usize,
        column: usize,
        rule: String,
    },
    #[error("{line}:{column}: variable `{var}` occurs in the right-hand side of `{rule}` but not in its left-hand side")]
    FreshVariable {
        line: usize,
        column: usize,
        var: String,
        rule: String,
    },
    #[error("{line}:{column}: symbol `{symbol}` used with arity {found}, previously {expected}")]
    ArityClash {
        line: usize,
        column: usize,
        symbol: String,
        expected: usize,
        found: usize,
    },
}

impl Trs {
    /// Every rewrite rule, strict ones first.
    pub fn all_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().chain(&self.relative)
    }

    /// Root symbols of the strict rules' left-hand sides.
    pub fn defined_symbols(&self) -> BTreeSet<&str> {
        self.rules.iter().filter_map(|r| r.lhs.root()).collect()
    }

    /// Builds a TRS from rules, inferring the signature and variable list.
    pub fn from_rules(rules: Vec<Rule>) -> Result<Trs, TrsError> {
        let mut trs = Trs {
            rules,
            ..Trs::default()
        };
        trs.finish(&[])?;
        Ok(trs)
    }

    fn finish(&mut self, positions: &[(usize, usize)]) -> Result<(), TrsError> {
        let pos = |i: usize| positions.get(i).copied().unwrap_or((0, 0));
        let rules: Vec<Rule> = self.all_rules().cloned().collect();
        for (i, rule) in rules.iter().enumerate() {
            let (line, column) = pos(i);
            if rule.lhs.is_var() {
                return Err(TrsError::VariableLhs {
                    line,
                    column,
                    rule: rule.to_string(),
                });
            }
            let lv = rule.lhs.vars();
            if let Some(x) = rule.rhs.vars().into_iter().find(|x| !lv.contains(x)) {
                return Err(TrsError::FreshVariable {
                    line,
                    column,
                    var: x.to_string(),
                    rule: rule.to_string(),
                });
            }
            let mut clash = None;
            for t in [&rule.lhs, &rule.rhs] {
                t.for_each_symbol(&mut |s, k| {
                    let expected = *self.signature.entry(s.to_string()).or_insert(k);
                    if expected != k && clash.is_none() {
                        clash = Some((s.to_string(), expected, k));
                    }
                });
            }
            if let Some((symbol, expected, found)) = clash {
                return Err(TrsError::ArityClash {
                    line,
                    column,
                    symbol,
                    expected,
                    found,
                });
            }
            for x in lv {
                if !self.variables.iter().any(|v| v == x) {
                    self.variables.push(x.to_string());
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Trs {
    /// Prints in the same dialect [`parse_trs`] reads.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(VAR")?;
        for v in &self.variables {
            write!(f, " {v}")?;
        }
        writeln!(f, ")")?;
        writeln!(f, "(RULES")?;
        for r in &self.rules {
            writeln!(f, "  {} -> {}", r.lhs, r.rhs)?;
        }
        for r in &self.relative {
            writeln!(f, "  {} ->= {}", r.lhs, r.rhs)?;
        }
        writeln!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Comma,
    Arrow,
    WeakArrow,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | ';' | '"')
}

fn lex(text: &str) -> Result<Vec<Spanned>, TrsError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (byte, c) = chars[k];
            let (line_no, column) = (ln + 1, byte + 1);
            let push = |out: &mut Vec<Spanned>, tok| {
                out.push(Spanned {
                    tok,
                    line: line_no,
                    column,
                })
            };
            match c {
                ';' => break,
                c if c.is_whitespace() => k += 1,
                '(' => {
                    push(&mut out, Tok::LParen);
                    k += 1;
                }
                ')' => {
                    push(&mut out, Tok::RParen);
                    k += 1;
                }
                ',' => {
                    push(&mut out, Tok::Comma);
                    k += 1;
                }
                '"' => {
                    return Err(TrsError::Syntax {
                        line: line_no,
                        column,
                        message: "unexpected `\"`".into(),
                    })
                }
                _ if line[byte..].starts_with("->=") => {
                    push(&mut out, Tok::WeakArrow);
                    k += 3;
                }
                _ if line[byte..].starts_with("->") => {
                    push(&mut out, Tok::Arrow);
                    k += 2;
                }
                _ => {
                    let start = byte;
                    let mut end = byte;
                    while k < chars.len() {
                        let (b, c) = chars[k];
                        if !is_ident_char(c) || line[b..].starts_with("->") {
                            break;
                        }
                        end = b + c.len_utf8();
                        k += 1;
                    }
                    push(&mut out, Tok::Ident(line[start..end].to_string()));
                }
            }
        }
    }
    Ok(out)
}

/// Term as read, before variables are told apart from constants.
#[derive(Debug, Clone)]
struct RawTerm {
    name: String,
    args: Option<Vec<RawTerm>>,
    line: usize,
    column: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.column))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, TrsError> {
        let (line, column) = self.here();
        Err(TrsError::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), TrsError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), TrsError> {
        match self.toks.get(self.pos) {
            Some(Spanned {
                tok: Tok::Ident(s),
                line,
                column,
            }) => {
                let out = (s.clone(), *line, *column);
                self.pos += 1;
                Ok(out)
            }
            _ => self.error("expected an identifier"),
        }
    }

    fn term(&mut self) -> Result<RawTerm, TrsError> {
        let (name, line, column) = self.ident()?;
        let args = if self.peek() == Some(&Tok::LParen) {
            self.pos += 1;
            let mut args = Vec::new();
            if self.peek() == Some(&Tok::RParen) {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    match self.peek() {
                        Some(Tok::Comma) => self.pos += 1,
                        Some(Tok::RParen) => {
                            self.pos += 1;
                            break;
                        }
                        _ => return self.error("expected `,` or `)` in argument list"),
                    }
                }
            }
            Some(args)
        } else {
            None
        };
        Ok(RawTerm {
            name,
            args,
            line,
            column,
        })
    }

    fn skip_section(&mut self) -> Result<(), TrsError> {
        let mut depth = 1;
        while depth > 0 {
            match self.peek() {
                Some(Tok::LParen) => depth += 1,
                Some(Tok::RParen) => depth -= 1,
                None => return self.error("unterminated section"),
                _ => {}
            }
            self.pos += 1;
        }
        Ok(())
    }
}

fn resolve(raw: &RawTerm, vars: &BTreeSet<String>) -> Result<Term, TrsError> {
    match &raw.args {
        None if vars.contains(&raw.name) => Ok(Term::Var(raw.name.clone())),
        None => Ok(Term::App(raw.name.clone(), Vec::new())),
        Some(_) if vars.contains(&raw.name) => Err(TrsError::Syntax {
            line: raw.line,
            column: raw.column,
            message: format!("variable `{}` applied to arguments", raw.name),
        }),
        Some(args) => Ok(Term::App(
            raw.name.clone(),
            args.iter()
                .map(|a| resolve(a, vars))
                .collect::<Result<_, _>>()?,
        )),
    }
}

/// Parses `(VAR x y) (RULES l -> r ...)`. Rules written `l ->= r` are
/// relative rules. Other sections such as `(COMMENT ...)` are skipped, and
/// `;` starts a comment that runs to the end of the line.
pub fn parse_trs(text: &str) -> Result<Trs, TrsError> {
    let toks = lex(text)?;
    let lines = text.lines().count().max(1);
    let last_len = text.lines().last().map_or(0, str::len);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (lines, last_len + 1),
    };
    let mut declared: Vec<String> = Vec::new();
    // (lhs, rhs, weak, line, column)
    let mut raw_rules: Vec<(RawTerm, RawTerm, bool, usize, usize)> = Vec::new();
    while p.peek().is_some() {
        p.expect(Tok::LParen, "`(` opening a section")?;
        let (section, _, _) = p.ident()?;
        match section.as_str() {
            "VAR" => {
                while let Some(Tok::Ident(_)) = p.peek() {
                    let (v, _, _) = p.ident()?;
                    if !declared.contains(&v) {
                        declared.push(v);
                    }
                }
                p.expect(Tok::RParen, "`)` closing VAR")?;
            }
            "RULES" => loop {
                if p.peek() == Some(&Tok::RParen) {
                    p.pos += 1;
                    break;
                }
                let (line, column) = p.here();
                let lhs = p.term()?;
                let weak = match p.peek() {
                    Some(Tok::Arrow) => false,
                    Some(Tok::WeakArrow) => true,
                    _ => return p.error("expected `->`"),
                };
                p.pos += 1;
                let rhs = p.term()?;
                raw_rules.push((lhs, rhs, weak, line, column));
            },
            _ => p.skip_section()?,
        }
    }
    let var_set: BTreeSet<String> = declared.iter().cloned().collect();
    let mut trs = Trs {
        variables: declared,
        ..Trs::default()
    };
    let mut strict_pos = Vec::new();
    let mut weak_pos = Vec::new();
    for (lhs, rhs, weak, line, column) in &raw_rules {
        let rule = Rule::new(resolve(lhs, &var_set)?, resolve(rhs, &var_set)?);
        if *weak {
            trs.relative.push(rule);
            weak_pos.push((*line, *column));
        } else {
            trs.rules.push(rule);
            strict_pos.push((*line, *column));
        }
    }
    strict_pos.extend(weak_pos);
    trs.finish(&strict_pos)?;
    Ok(trs)
}

/// For every rule `l -> r` and every subterm `t` of `r` rooted by a defined
/// symbol, the pair `l# -> t#`. Duplicates are dropped, first occurrence wins.
pub fn dependency_pairs(trs: &Trs) -> Vec<Rule> {
    let defined = trs.defined_symbols();
    let mut out: Vec<Rule> = Vec::new();
    for rule in &trs.rules {
        for t in rule.rhs.subterms() {
            if t.root().is_some_and(|f| defined.contains(f)) {
                let pair = Rule::new(rule.lhs.sharp(), t.sharp());
                if !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1: &str = "(VAR x) (RULES f(f(x)) -> f(g(f(x))) f(g(f(x))) -> x)";

    fn f(a: Term) -> Term {
        Term::app("f", vec![a])
    }
    fn g(a: Term) -> Term {
        Term::app("g", vec![a])
    }
    fn fs(a: Term) -> Term {
        Term::app("f#", vec![a])
    }
    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn parses_running_example() {
        let trs = parse_trs(EX1).unwrap();
        assert_eq!(trs.rules.len(), 2);
        assert_eq!(trs.rules[0], Rule::new(f(f(x())), f(g(f(x())))));
        assert_eq!(trs.rules[1], Rule::new(f(g(f(x()))), x()));
        assert_eq!(trs.signature.get("f"), Some(&1));
        assert_eq!(trs.signature.get("g"), Some(&1));
    }

    #[test]
    fn empty_rules() {
        let trs = parse_trs("(VAR x) (RULES )").unwrap();
        assert!(trs.rules.is_empty());
        assert!(dependency_pairs(&trs).is_empty());
    }

    #[test]
    fn rejects_variable_lhs() {
        let e = parse_trs("(VAR x) (RULES x -> f(x))").unwrap_err();
        assert!(
            matches!(
                e,
                TrsError::VariableLhs {
                    line: 1,
                    column: 16,
                    ..
                }
            ),
            "{e}"
        );
    }

    #[test]
    fn rejects_fresh_variable() {
        let e = parse_trs("(VAR x y)\n(RULES\n  f(x) -> g(y)\n)").unwrap_err();
        assert!(
            matches!(e, TrsError::FreshVariable { line: 3, ref var, .. } if var == "y"),
            "{e}"
        );
    }

    #[test]
    fn rejects_arity_clash() {
        let e = parse_trs("(VAR x) (RULES f(x) -> f(x,x))").unwrap_err();
        assert!(
            matches!(
                e,
                TrsError::ArityClash {
                    expected: 1,
                    found: 2,
                    ..
                }
            ),
            "{e}"
        );
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_trs("(VAR x)\n(RULES f(x) => x)").unwrap_err();
        assert!(
            matches!(
                e,
                TrsError::Syntax {
                    line: 2,
                    column: 13,
                    ..
                }
            ),
            "{e}"
        );
        assert!(parse_trs("(VAR x) (RULES f(x -> x)").is_err());
        assert!(parse_trs("(RULES f(x) -> x").is_err());
    }

    #[test]
    fn comments_and_other_sections() {
        let text =
            "; leading comment\n(VAR x) ; vars\n(COMMENT from (somewhere))\n(RULES f(x) -> x)\n";
        let trs = parse_trs(text).unwrap();
        assert_eq!(trs.rules.len(), 1);
    }

    #[test]
    fn constants_and_relative_rules() {
        let text = "(VAR x y z)\n(RULES\n f(a,g(y),z) -> f(a,y,g(y))\n a -> b\n f(x,y,z) ->= f(x,y,g(z))\n)";
        let trs = parse_trs(text).unwrap();
        assert_eq!(trs.rules.len(), 2);
        assert_eq!(trs.relative.len(), 1);
        assert_eq!(
            trs.rules[1],
            Rule::new(Term::constant("a"), Term::constant("b"))
        );
        assert_eq!(trs.signature.get("a"), Some(&0));
        assert_eq!(trs.signature.get("f"), Some(&3));
    }

    #[test]
    fn dependency_pairs_running_example() {
        let trs = parse_trs(EX1).unwrap();
        let dps = dependency_pairs(&trs);
        assert_eq!(
            dps,
            vec![
                Rule::new(fs(f(x())), fs(g(f(x())))),
                Rule::new(fs(f(x())), fs(x())),
            ]
        );
        assert!(dps.iter().all(Rule::is_well_formed));
        assert_eq!(dps[0].display(true), "F(f(x)) -> F(g(f(x)))");
    }

    #[test]
    fn dependency_pairs_without_defined_rhs() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> g(x) f(x) -> x)").unwrap();
        assert!(dependency_pairs(&trs).is_empty());
    }

    #[test]
    fn dependency_pairs_with_constants() {
        let text =
            "(VAR y z)\n(RULES\n f(a,g(y),z) -> f(a,y,g(y))\n f(b,g(y),z) -> f(a,y,z)\n a -> b\n)";
        let trs = parse_trs(text).unwrap();
        let dps: Vec<String> = dependency_pairs(&trs).iter().map(Rule::to_string).collect();
        assert_eq!(
            dps,
            vec![
                "f#(a,g(y),z) -> f#(a,y,g(y))",
                "f#(a,g(y),z) -> a#",
                "f#(b,g(y),z) -> f#(a,y,z)",
                "f#(b,g(y),z) -> a#",
            ]
        );
    }

    #[test]
    fn print_parse_round_trip() {
        let text = "(VAR x y z)\n(RULES\n f(a,g(y),z) -> f(a,y,g(y))\n a -> b\n f(x,y,z) ->= f(x,y,g(z))\n)";
        for src in [EX1, text] {
            let trs = parse_trs(src).unwrap();
            assert_eq!(parse_trs(&trs.to_string()).unwrap(), trs);
        }
        // marked symbols survive the printer too
        let pairs = Trs::from_rules(dependency_pairs(&parse_trs(EX1).unwrap())).unwrap();
        assert_eq!(parse_trs(&pairs.to_string()).unwrap(), pairs);
    }
}
