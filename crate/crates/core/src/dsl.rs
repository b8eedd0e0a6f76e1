//! The `.lax` text format: lexer, recursive-descent parser, span-carrying
//! diagnostics and a canonical emitter (one line per item).
//!
//! ```text
//! algebroid Aff1 { base {} fiber { e1:0, e2:0 } anchor {} bracket { [e1,e2] = e2; } }
//! submersion S1 { over Aff1; fiber { u:1 } }
//! cochain C on Aff1 { arity 2; values { (e1,e2) = e1; } symbol {} }
//! foliation Fx { ambient { x:1, y:1 } spanning { X = d/dx; } }
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num::{BigInt, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebroid::{AlgebroidError, AlgebroidPresentation, Entry};
use crate::deformation::{DeformationError, Multiderivation};
use crate::foliation::{foliation_algebroid, FoliationSpec};
use crate::graded::{fmt_linear_combination, EvenGenerator, GeneratorSet, GradedElement, Monomial, Scalar};
use crate::pullback::{vertical_name, SubmersionSpec};

pub const MAX_EXPONENT: u32 = 1000;
pub const MAX_WEIGHT: i64 = 100;
pub const MAX_ARITY: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Source location; `offset` and `length` count characters, `line` and
/// `column` are 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl Span {
    fn to(self, end: Span) -> Span {
        let stop = (end.offset + end.length).max(self.offset + self.length);
        Span { length: stop - self.offset, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub code: &'static str,
}

impl Diagnostic {
    fn error(code: &'static str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Error, span, message: message.into(), code }
    }

    fn warning(code: &'static str, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, span, message: message.into(), code }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// The diagnostic followed by the offending line and a caret marker.
    pub fn render(&self, source: &str) -> String {
        let Some(line) = source.lines().nth(self.span.line.saturating_sub(1)) else {
            return self.to_string();
        };
        let width = line.chars().count();
        let start = self.span.column.saturating_sub(1).min(width);
        let carets = self.span.length.clamp(1, (width - start).max(1));
        format!("{self}\n  | {line}\n  | {}{}", " ".repeat(start), "^".repeat(carets))
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}] {}:{}: {}", self.severity, self.code, self.span.line, self.span.column, self.message)
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    /// `d/d<name>`
    Partial(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: Span,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Partial(s) => format!("`d/d{s}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '!'
}

const SYMBOLS: [&str; 15] = ["{", "}", "[", "]", "(", ")", ",", ";", ":", "=", "+", "-", "*", "/", "^"];

fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < n {
        let c = chars[i];
        let here = Span { offset: i, line, column: col, length: 1 };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < n && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let ident_end = |from: usize| (from..n).find(|j| !is_ident_char(chars[*j])).unwrap_or(n);
        let (tok, len) = if c == 'd'
            && chars.get(i + 1) == Some(&'/')
            && chars.get(i + 2) == Some(&'d')
            && chars.get(i + 3).is_some_and(|c| is_ident_start(*c))
        {
            let end = ident_end(i + 3);
            (Tok::Partial(chars[i + 3..end].iter().collect()), end - i)
        } else if is_ident_start(c) {
            let end = ident_end(i);
            (Tok::Ident(chars[i..end].iter().collect()), end - i)
        } else if c.is_ascii_digit() {
            let end = (i..n).find(|j| !chars[*j].is_ascii_digit()).unwrap_or(n);
            let digits: String = chars[i..end].iter().collect();
            let value = digits.parse::<BigInt>().map_err(|_| Diagnostic::error("E001", here, "malformed number"))?;
            (Tok::Int(value), end - i)
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            (Tok::Sym("->"), 2)
        } else if let Some(s) = SYMBOLS.iter().find(|s| s.starts_with(c)) {
            (Tok::Sym(s), 1)
        } else {
            return Err(Diagnostic::error("E001", here, format!("unexpected character `{}`", c.escape_debug())));
        };
        out.push(Token { tok, span: Span { length: len, ..here } });
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, span: Span { offset: n, line, column: col, length: 0 } });
    Ok(out)
}

// ---------------------------------------------------------------- syntax

#[derive(Clone, Debug)]
struct Name {
    text: String,
    span: Span,
}

#[derive(Clone, Debug)]
struct Decl {
    name: Name,
    value: BigInt,
    span: Span,
}

#[derive(Clone, Debug)]
struct RawFactor {
    name: String,
    partial: bool,
    /// `u32::MAX` marks an exponent above the cap.
    exp: u32,
    span: Span,
}

#[derive(Clone, Debug)]
struct RawTerm {
    coeff: Scalar,
    factors: Vec<RawFactor>,
    span: Span,
}

#[derive(Clone, Debug)]
struct RawPoly {
    terms: Vec<RawTerm>,
}

#[derive(Clone, Debug)]
struct Statement {
    head: Vec<Name>,
    poly: RawPoly,
    span: Span,
}

#[derive(Clone, Debug)]
enum RawItem {
    Algebroid { name: Name, span: Span, base: Vec<Decl>, fiber: Vec<Decl>, anchor: Vec<Statement>, bracket: Vec<Statement> },
    Submersion { name: Name, span: Span, over: Name, fiber: Vec<Decl> },
    Cochain { name: Name, span: Span, on: Name, arity: (BigInt, Span), values: Vec<Statement>, symbol: Vec<Statement> },
    Foliation { name: Name, span: Span, ambient: Vec<Decl>, spanning: Vec<Statement> },
}

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn eat(&mut self, s: &str) -> Option<Span> {
        self.at(s).then(|| self.bump().span)
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        let t = self.peek();
        Diagnostic::error("E002", t.span, format!("expected {wanted}, found {}", describe(&t.tok)))
    }

    fn expect(&mut self, s: &str) -> PResult<Span> {
        self.eat(s).ok_or_else(|| self.unexpected(&format!("`{s}`")))
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        match &self.peek().tok {
            Tok::Ident(k) if k == kw => Ok(self.bump().span),
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn name(&mut self) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Ident(_) => {
                let t = self.bump();
                let Tok::Ident(text) = t.tok else { unreachable!() };
                Ok(Name { text, span: t.span })
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn int(&mut self) -> PResult<(BigInt, Span)> {
        match &self.peek().tok {
            Tok::Int(_) => {
                let t = self.bump();
                let Tok::Int(v) = t.tok else { unreachable!() };
                Ok((v, t.span))
            }
            _ => Err(self.unexpected("a number")),
        }
    }

    fn signed_int(&mut self) -> PResult<(BigInt, Span)> {
        match self.eat("-") {
            Some(s) => {
                let (v, e) = self.int()?;
                Ok((-v, s.to(e)))
            }
            None => self.int(),
        }
    }

    fn file(&mut self) -> PResult<Vec<RawItem>> {
        let mut items = Vec::new();
        while self.peek().tok != Tok::Eof {
            let kw = match &self.peek().tok {
                Tok::Ident(k) => k.clone(),
                _ => String::new(),
            };
            let item = match kw.as_str() {
                "algebroid" => self.algebroid()?,
                "submersion" => self.submersion()?,
                "cochain" => self.cochain()?,
                "foliation" => self.foliation()?,
                _ => return Err(self.unexpected("`algebroid`, `submersion`, `cochain` or `foliation`")),
            };
            items.push(item);
        }
        Ok(items)
    }

    /// `kw { [NAME : INT (, NAME : INT)*] }`
    fn decls(&mut self, kw: &str) -> PResult<Vec<Decl>> {
        self.keyword(kw)?;
        self.expect("{")?;
        let mut out = Vec::new();
        if self.eat("}").is_some() {
            return Ok(out);
        }
        loop {
            let name = self.name()?;
            self.expect(":")?;
            let (value, vs) = self.signed_int()?;
            out.push(Decl { span: name.span.to(vs), name, value });
            if self.eat(",").is_none() {
                break;
            }
        }
        self.expect("}")?;
        Ok(out)
    }

    /// `{ (statement ;)* }` where `head` parses everything before the
    /// polynomial, including the separator.
    fn statements(&mut self, mut head: impl FnMut(&mut Self) -> PResult<(Vec<Name>, Span)>) -> PResult<Vec<Statement>> {
        self.expect("{")?;
        let mut out = Vec::new();
        while self.eat("}").is_none() {
            let (names, start) = head(self)?;
            let poly = self.sum()?;
            let end = self.expect(";")?;
            out.push(Statement { head: names, poly, span: start.to(end) });
        }
        Ok(out)
    }

    fn index_list(&mut self) -> PResult<(Vec<Name>, Span)> {
        let open = self.expect("(")?;
        let mut names = Vec::new();
        if self.eat(")").is_none() {
            loop {
                names.push(self.name()?);
                if self.eat(",").is_none() {
                    break;
                }
            }
            self.expect(")")?;
        }
        Ok((names, open))
    }

    fn algebroid(&mut self) -> PResult<RawItem> {
        let start = self.keyword("algebroid")?;
        let name = self.name()?;
        self.expect("{")?;
        let base = self.decls("base")?;
        let fiber = self.decls("fiber")?;
        self.keyword("anchor")?;
        let anchor = self.statements(|p| {
            let n = p.name()?;
            p.expect("->")?;
            let s = n.span;
            Ok((vec![n], s))
        })?;
        self.keyword("bracket")?;
        let bracket = self.statements(|p| {
            let open = p.expect("[")?;
            let l = p.name()?;
            p.expect(",")?;
            let r = p.name()?;
            p.expect("]")?;
            p.expect("=")?;
            Ok((vec![l, r], open))
        })?;
        let end = self.expect("}")?;
        Ok(RawItem::Algebroid { name, span: start.to(end), base, fiber, anchor, bracket })
    }

    fn submersion(&mut self) -> PResult<RawItem> {
        let start = self.keyword("submersion")?;
        let name = self.name()?;
        self.expect("{")?;
        self.keyword("over")?;
        let over = self.name()?;
        self.expect(";")?;
        let fiber = self.decls("fiber")?;
        let end = self.expect("}")?;
        Ok(RawItem::Submersion { name, span: start.to(end), over, fiber })
    }

    fn cochain(&mut self) -> PResult<RawItem> {
        let start = self.keyword("cochain")?;
        let name = self.name()?;
        self.keyword("on")?;
        let on = self.name()?;
        self.expect("{")?;
        self.keyword("arity")?;
        let arity = self.int()?;
        self.expect(";")?;
        self.keyword("values")?;
        let values = self.statements(|p| {
            let head = p.index_list()?;
            p.expect("=")?;
            Ok(head)
        })?;
        self.keyword("symbol")?;
        let symbol = self.statements(|p| {
            let head = p.index_list()?;
            p.expect("->")?;
            Ok(head)
        })?;
        let end = self.expect("}")?;
        Ok(RawItem::Cochain { name, span: start.to(end), on, arity, values, symbol })
    }

    fn foliation(&mut self) -> PResult<RawItem> {
        let start = self.keyword("foliation")?;
        let name = self.name()?;
        self.expect("{")?;
        let ambient = self.decls("ambient")?;
        self.keyword("spanning")?;
        let spanning = self.statements(|p| {
            let n = p.name()?;
            p.expect("=")?;
            let s = n.span;
            Ok((vec![n], s))
        })?;
        let end = self.expect("}")?;
        Ok(RawItem::Foliation { name, span: start.to(end), ambient, spanning })
    }

    fn sum(&mut self) -> PResult<RawPoly> {
        let mut negative = self.eat("-").is_some();
        if !negative {
            self.eat("+");
        }
        let mut terms = vec![self.product(negative)?];
        loop {
            if self.eat("+").is_some() {
                negative = false;
            } else if self.eat("-").is_some() {
                negative = true;
            } else {
                break;
            }
            terms.push(self.product(negative)?);
        }
        Ok(RawPoly { terms })
    }

    fn product(&mut self, negative: bool) -> PResult<RawTerm> {
        let mut coeff = if negative { -Scalar::one() } else { Scalar::one() };
        let mut factors = Vec::new();
        let first = self.peek().span;
        let mut span;
        loop {
            let t = self.peek().clone();
            let end = match t.tok {
                Tok::Int(n) => {
                    self.bump();
                    let mut value = Scalar::from_integer(n);
                    let mut end = t.span;
                    if self.eat("/").is_some() {
                        let (d, ds) = self.int()?;
                        if d.is_zero() {
                            return Err(Diagnostic::error("E008", ds, "division by zero"));
                        }
                        value /= Scalar::from_integer(d);
                        end = ds;
                    }
                    coeff *= value;
                    end
                }
                Tok::Ident(name) => {
                    self.bump();
                    let mut exp = 1;
                    let mut end = t.span;
                    if self.eat("^").is_some() {
                        let (e, es) = self.int()?;
                        exp = e.to_u32().filter(|e| *e <= MAX_EXPONENT).unwrap_or(u32::MAX);
                        end = es;
                    }
                    factors.push(RawFactor { name, partial: false, exp, span: t.span.to(end) });
                    end
                }
                Tok::Partial(name) => {
                    self.bump();
                    factors.push(RawFactor { name, partial: true, exp: 1, span: t.span });
                    t.span
                }
                _ => return Err(self.unexpected("a number, a name or `d/d<coordinate>`")),
            };
            span = first.to(end);
            if self.eat("*").is_none() {
                break;
            }
        }
        Ok(RawTerm { coeff, factors, span })
    }
}

// ---------------------------------------------------------------- document

#[derive(Clone, Debug, PartialEq)]
pub struct NamedSubmersion {
    pub name: String,
    pub over: String,
    pub spec: SubmersionSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedCochain {
    pub name: String,
    pub on: String,
    pub cochain: Multiderivation,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Item {
    Algebroid(AlgebroidPresentation),
    Submersion(NamedSubmersion),
    Cochain(NamedCochain),
    Foliation(FoliationSpec),
}

impl Item {
    pub fn name(&self) -> &str {
        match self {
            Item::Algebroid(a) => a.name(),
            Item::Submersion(s) => &s.name,
            Item::Cochain(c) => &c.name,
            Item::Foliation(f) => &f.name,
        }
    }
}

/// Named objects in declaration order. Names are unique across kinds and
/// every reference points to an earlier item.
#[derive(Clone, Debug, Default)]
pub struct SpecDocument {
    items: Vec<Item>,
    /// Source location of every nonzero table entry, for diagnostics raised
    /// after parsing.
    entry_spans: Vec<(String, Entry, Span)>,
}

impl SpecDocument {
    pub fn items(&self) -> &[Item] {
        &self.items
    }

    /// Appends an item built in code; it carries no source spans.
    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|i| i.name() == name)
    }

    pub fn algebroid(&self, name: &str) -> Option<&AlgebroidPresentation> {
        match self.get(name)? {
            Item::Algebroid(a) => Some(a),
            _ => None,
        }
    }

    pub fn submersion(&self, name: &str) -> Option<&NamedSubmersion> {
        match self.get(name)? {
            Item::Submersion(s) => Some(s),
            _ => None,
        }
    }

    pub fn cochain(&self, name: &str) -> Option<&NamedCochain> {
        match self.get(name)? {
            Item::Cochain(c) => Some(c),
            _ => None,
        }
    }

    pub fn foliation(&self, name: &str) -> Option<&FoliationSpec> {
        match self.get(name)? {
            Item::Foliation(f) => Some(f),
            _ => None,
        }
    }

    pub fn algebroids(&self) -> impl Iterator<Item = &AlgebroidPresentation> {
        self.items.iter().filter_map(|i| match i {
            Item::Algebroid(a) => Some(a),
            _ => None,
        })
    }

    pub fn entry_span(&self, algebroid: &str, entry: &Entry) -> Option<Span> {
        self.entry_spans.iter().find(|(a, e, _)| a == algebroid && e == entry).map(|(_, _, s)| *s)
    }

    /// Weight homogeneity of every algebroid table, one diagnostic per
    /// offending algebroid.
    pub fn weight_diagnostics(&self) -> Vec<Diagnostic> {
        self.algebroids()
            .filter_map(|a| match a.check_weights() {
                Err(e @ AlgebroidError::WeightInhomogeneous { .. }) => {
                    let AlgebroidError::WeightInhomogeneous { entry, .. } = &e else { unreachable!() };
                    let span = self.entry_span(a.name(), entry).unwrap_or_default();
                    Some(Diagnostic::error("E007", span, format!("in `{}`: {e}", a.name())))
                }
                Err(e) => Some(Diagnostic::error("E008", Span::default(), e.to_string())),
                Ok(()) => None,
            })
            .collect()
    }
}

/// A parsed document and its warnings.
#[derive(Clone, Debug)]
pub struct Parsed {
    pub document: SpecDocument,
    pub warnings: Vec<Diagnostic>,
}

/// Parses a document. On failure every diagnostic (errors first) is
/// returned.
pub fn parse(text: &str) -> Result<Parsed, Vec<Diagnostic>> {
    let toks = lex(text).map_err(|d| vec![d])?;
    let raw = Parser { toks, pos: 0 }.file().map_err(|d| vec![d])?;
    let mut b = Builder::default();
    for item in raw {
        b.item(item);
    }
    let (mut errors, warnings): (Vec<_>, Vec<_>) = b.diags.into_iter().partition(Diagnostic::is_error);
    if errors.is_empty() {
        Ok(Parsed { document: b.doc, warnings })
    } else {
        errors.extend(warnings);
        Err(errors)
    }
}

/// [`parse`] for raw bytes; invalid UTF-8 is a lexical error.
pub fn parse_bytes(bytes: &[u8]) -> Result<Parsed, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse(text),
        Err(e) => {
            let prefix = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or("");
            let line = prefix.matches('\n').count() + 1;
            let column = prefix.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
            let span = Span { offset: prefix.chars().count(), line, column, length: 1 };
            Err(vec![Diagnostic::error("E001", span, "input is not valid UTF-8")])
        }
    }
}

#[derive(Default)]
struct Builder {
    doc: SpecDocument,
    diags: Vec<Diagnostic>,
    names: HashMap<String, Span>,
}

/// Which factor of a term names the table slot.
#[derive(Clone, Copy)]
enum Slot<'a> {
    /// A frame element of the presentation.
    Frame(&'a AlgebroidPresentation),
    /// `d/d<coordinate>`.
    Partial,
}

impl Builder {
    fn error(&mut self, code: &'static str, span: Span, message: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, span, message));
    }

    fn item(&mut self, raw: RawItem) {
        let (name, span) = match &raw {
            RawItem::Algebroid { name, span, .. }
            | RawItem::Submersion { name, span, .. }
            | RawItem::Cochain { name, span, .. }
            | RawItem::Foliation { name, span, .. } => (name.clone(), *span),
        };
        if self.names.contains_key(&name.text) {
            self.error("E004", name.span, format!("duplicate name `{}`", name.text));
            return;
        }
        self.names.insert(name.text.clone(), span);
        let built = match raw {
            RawItem::Algebroid { name, span, base, fiber, anchor, bracket } => {
                self.algebroid(&name, span, &base, &fiber, &anchor, &bracket).map(Item::Algebroid)
            }
            RawItem::Submersion { name, span, over, fiber } => {
                self.submersion(&name, span, &over, &fiber).map(Item::Submersion)
            }
            RawItem::Cochain { name, span, on, arity, values, symbol } => {
                self.cochain(&name, span, &on, &arity, &values, &symbol).map(Item::Cochain)
            }
            RawItem::Foliation { name, span, ambient, spanning } => {
                self.foliation(&name, span, &ambient, &spanning).map(Item::Foliation)
            }
        };
        if let Some(item) = built {
            self.doc.items.push(item);
        }
    }

    fn weight(&mut self, d: &Decl, min: i64) -> Option<i64> {
        match d.value.to_i64().filter(|w| (min..=MAX_WEIGHT).contains(w)) {
            Some(w) => Some(w),
            None => {
                self.error("E008", d.span, format!("weight of `{}` must lie in {min}..={MAX_WEIGHT}", d.name.text));
                None
            }
        }
    }

    /// Weights of a declaration list, rejecting duplicates against `taken`.
    fn declarations(&mut self, decls: &[Decl], min: i64, taken: &mut HashSet<String>) -> Option<Vec<(String, i64)>> {
        let mut out = Vec::new();
        let mut ok = true;
        for d in decls {
            if !taken.insert(d.name.text.clone()) {
                self.error("E004", d.name.span, format!("duplicate generator `{}`", d.name.text));
                ok = false;
            }
            match self.weight(d, min) {
                Some(w) => out.push((d.name.text.clone(), w)),
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    /// Interprets `Σ c · m · slot` as slot-indexed polynomials in the even
    /// generators of `gens`.
    fn linear(&mut self, poly: &RawPoly, gens: &Arc<GeneratorSet>, slot: Slot) -> Option<BTreeMap<usize, GradedElement>> {
        let what = match slot {
            Slot::Frame(_) => "frame element",
            Slot::Partial => "`d/d<coordinate>` factor",
        };
        let mut out: BTreeMap<usize, GradedElement> = BTreeMap::new();
        let mut ok = true;
        for term in &poly.terms {
            let mut exps = vec![0u32; gens.n_even()];
            let mut target: Option<usize> = None;
            let mut term_ok = true;
            for f in &term.factors {
                let as_slot = match slot {
                    Slot::Frame(p) if !f.partial => p.frame_index(&f.name),
                    Slot::Partial if f.partial => {
                        gens.lookup(&f.name).filter(|g| !gens.is_odd(*g)).map(|g| g.0)
                    }
                    _ => None,
                };
                if let Some(k) = as_slot {
                    if target.is_some() || f.exp != 1 {
                        self.error("E008", term.span, format!("each term needs exactly one {what}"));
                        term_ok = false;
                    }
                    target = Some(k);
                    continue;
                }
                let coord = if f.partial { None } else { gens.lookup(&f.name).filter(|g| !gens.is_odd(*g)) };
                let Some(g) = coord else {
                    let shown = if f.partial { format!("d/d{}", f.name) } else { f.name.clone() };
                    self.error("E003", f.span, format!("unknown identifier `{shown}`"));
                    term_ok = false;
                    continue;
                };
                let e = exps[g.0] as u64 + f.exp as u64;
                if e > MAX_EXPONENT as u64 {
                    self.error("E008", f.span, format!("exponent exceeds {MAX_EXPONENT}"));
                    term_ok = false;
                    continue;
                }
                exps[g.0] = e as u32;
            }
            if !term_ok {
                ok = false;
                continue;
            }
            match target {
                Some(k) => out
                    .entry(k)
                    .or_insert_with(|| GradedElement::zero(gens))
                    .add_term(Monomial::new(exps, 0), term.coeff.clone()),
                None if term.coeff.is_zero() && term.factors.is_empty() => {}
                None => {
                    self.error("E008", term.span, format!("term has no {what}"));
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }

    fn algebroid(
        &mut self,
        name: &Name,
        span: Span,
        base: &[Decl],
        fiber: &[Decl],
        anchor: &[Statement],
        bracket: &[Statement],
    ) -> Option<AlgebroidPresentation> {
        let mut taken = HashSet::new();
        let base = self.declarations(base, 1, &mut taken);
        let frame = self.declarations(fiber, -MAX_WEIGHT, &mut taken);
        let (base, frame) = (base?, frame?);
        let base: Vec<(String, u32)> = base.into_iter().map(|(n, w)| (n, w as u32)).collect();
        let frame: Vec<(String, i32)> = frame.into_iter().map(|(n, w)| (n, w as i32)).collect();
        let mut pres = match AlgebroidPresentation::new(&name.text, &base, &frame) {
            Ok(p) => p,
            Err(e) => {
                self.error("E008", span, e.to_string());
                return None;
            }
        };
        let gens = pres.gens().clone();
        let mut ok = true;
        let mut rows = HashSet::new();
        for st in anchor {
            let frame_name = &st.head[0];
            let Some(i) = pres.frame_index(&frame_name.text) else {
                self.error("E003", frame_name.span, format!("unknown frame element `{}`", frame_name.text));
                ok = false;
                continue;
            };
            if !rows.insert(i) {
                self.error("E004", st.span, format!("duplicate anchor row `{}`", frame_name.text));
                ok = false;
                continue;
            }
            let Some(comps) = self.linear(&st.poly, &gens, Slot::Partial) else {
                ok = false;
                continue;
            };
            for (a, p) in comps {
                if !p.is_zero() {
                    self.doc.entry_spans.push((name.text.clone(), pres.anchor_entry(i, a), st.span));
                }
                pres.set_anchor(i, a, p).expect("polynomial in the base coordinates");
            }
        }
        let mut given: HashMap<(usize, usize), (Vec<GradedElement>, Span)> = HashMap::new();
        for st in bracket {
            let (l, r) = (&st.head[0], &st.head[1]);
            let lookup = |n: &Name, b: &mut Self| {
                let i = pres.frame_index(&n.text);
                if i.is_none() {
                    b.error("E003", n.span, format!("unknown frame element `{}`", n.text));
                }
                i
            };
            let (i, j) = (lookup(l, self), lookup(r, self));
            let comps = self.linear(&st.poly, &gens, Slot::Frame(&pres));
            let (Some(i), Some(j), Some(comps)) = (i, j, comps) else {
                ok = false;
                continue;
            };
            let row: Vec<GradedElement> = (0..pres.rank())
                .map(|k| comps.get(&k).cloned().unwrap_or_else(|| GradedElement::zero(&gens)))
                .collect();
            if i == j {
                if row.iter().any(|p| !p.is_zero()) {
                    self.error("E006", st.span, "bracket of a generator with itself must be zero");
                    ok = false;
                }
                continue;
            }
            if given.contains_key(&(i, j)) {
                self.error("E004", st.span, format!("duplicate bracket pair [{},{}]", l.text, r.text));
                ok = false;
                continue;
            }
            if let Some((prev, _)) = given.get(&(j, i)) {
                if prev.iter().zip(&row).all(|(a, b)| *a == -b) {
                    self.diags.push(Diagnostic::warning(
                        "W001",
                        st.span,
                        format!("[{},{}] repeats [{},{}] by antisymmetry", l.text, r.text, r.text, l.text),
                    ));
                } else {
                    self.error("E005", st.span, format!("[{},{}] is not the negative of [{},{}]", l.text, r.text, r.text, l.text));
                    ok = false;
                }
                continue;
            }
            for (k, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    let entry = pres.bracket_entry(i.min(j), i.max(j), k);
                    self.doc.entry_spans.push((name.text.clone(), entry, st.span));
                }
                pres.set_bracket(i, j, k, p.clone()).expect("distinct indices");
            }
            given.insert((i, j), (row, st.span));
        }
        ok.then_some(pres)
    }

    fn submersion(&mut self, name: &Name, span: Span, over: &Name, fiber: &[Decl]) -> Option<NamedSubmersion> {
        let Some(base) = self.doc.algebroid(&over.text).cloned() else {
            self.error("E003", over.span, format!("unknown algebroid `{}`", over.text));
            return None;
        };
        let mut taken: HashSet<String> = base.gens().all().map(|g| base.gens().name(g).to_string()).collect();
        for d in fiber {
            if taken.contains(&vertical_name(&d.name.text)) {
                self.error("E004", d.name.span, format!("`{}` collides with a generator of `{}`", vertical_name(&d.name.text), over.text));
                return None;
            }
        }
        let fiber = self.declarations(fiber, 1, &mut taken)?;
        let fiber: Vec<(&str, u32)> = fiber.iter().map(|(n, w)| (n.as_str(), *w as u32)).collect();
        match SubmersionSpec::over(&base, &fiber) {
            Ok(spec) => Some(NamedSubmersion { name: name.text.clone(), over: over.text.clone(), spec }),
            Err(e) => {
                self.error("E008", span, e.to_string());
                None
            }
        }
    }

    fn cochain(
        &mut self,
        name: &Name,
        span: Span,
        on: &Name,
        arity: &(BigInt, Span),
        values: &[Statement],
        symbol: &[Statement],
    ) -> Option<NamedCochain> {
        let Some(pres) = self.doc.algebroid(&on.text).cloned() else {
            self.error("E003", on.span, format!("unknown algebroid `{}`", on.text));
            return None;
        };
        let Some(k) = arity.0.to_usize().filter(|k| *k <= MAX_ARITY) else {
            self.error("E008", arity.1, format!("arity must lie in 0..={MAX_ARITY}"));
            return None;
        };
        let gens = pres.gens().clone();
        let mut ok = true;
        let mut tables: [Vec<(Vec<usize>, usize, GradedElement)>; 2] = [Vec::new(), Vec::new()];
        let mut located: Vec<(Vec<usize>, Span)> = Vec::new();
        for (t, (statements, expected, slot)) in
            [(values, k, Slot::Frame(&pres)), (symbol, k.wrapping_sub(1), Slot::Partial)].into_iter().enumerate()
        {
            for st in statements {
                if st.head.len() != expected {
                    let msg = if k == 0 && t == 1 {
                        "an arity-0 cochain has no symbol".to_string()
                    } else {
                        format!("expected {expected} indices, found {}", st.head.len())
                    };
                    self.error("E008", st.span, msg);
                    ok = false;
                    continue;
                }
                let mut idx = Vec::new();
                for n in &st.head {
                    match pres.frame_index(&n.text) {
                        Some(i) => idx.push(i),
                        None => {
                            self.error("E003", n.span, format!("unknown frame element `{}`", n.text));
                            ok = false;
                        }
                    }
                }
                let Some(comps) = self.linear(&st.poly, &gens, slot) else {
                    ok = false;
                    continue;
                };
                if idx.len() != expected {
                    continue;
                }
                located.push((idx.clone(), st.span));
                tables[t].extend(comps.into_iter().map(|(m, p)| (idx.clone(), m, p)));
            }
        }
        if !ok {
            return None;
        }
        match Multiderivation::from_entries(&pres, k, &tables[0], &tables[1]) {
            Ok(cochain) => Some(NamedCochain { name: name.text.clone(), on: on.text.clone(), cochain }),
            Err(e) => {
                let (code, idx) = match &e {
                    DeformationError::NonAntisymmetric { indices, .. } => ("E005", Some(indices)),
                    DeformationError::RepeatedIndex(indices) => ("E005", Some(indices)),
                    DeformationError::IndexOutOfRange(indices) => ("E008", Some(indices)),
                    _ => ("E008", None),
                };
                let at = idx
                    .and_then(|idx| located.iter().rev().find(|(i, _)| i == idx))
                    .map_or(span, |(_, s)| *s);
                self.error(code, at, e.to_string());
                None
            }
        }
    }

    fn foliation(&mut self, name: &Name, span: Span, ambient: &[Decl], spanning: &[Statement]) -> Option<FoliationSpec> {
        let mut taken = HashSet::new();
        let coords = self.declarations(ambient, 1, &mut taken)?;
        let coords: Vec<(String, u32)> = coords.into_iter().map(|(n, w)| (n, w as u32)).collect();
        let gens = match GeneratorSet::new(
            coords.iter().map(|(n, w)| EvenGenerator { name: n.clone(), weight: *w }).collect(),
            Vec::new(),
        ) {
            Ok(g) => g,
            Err(e) => {
                self.error("E008", span, e.to_string());
                return None;
            }
        };
        let mut vectors = Vec::new();
        let mut ok = true;
        for st in spanning {
            let field = &st.head[0];
            if !taken.insert(field.text.clone()) {
                self.error("E004", field.span, format!("duplicate generator `{}`", field.text));
                ok = false;
                continue;
            }
            let Some(comps) = self.linear(&st.poly, &gens, Slot::Partial) else {
                ok = false;
                continue;
            };
            if comps.values().any(|p| p.terms().keys().any(|m| !m.is_one())) {
                self.error("E008", st.span, "spanning vectors must have constant coefficients");
                ok = false;
                continue;
            }
            let one = Monomial::one(coords.len());
            let v = (0..coords.len())
                .map(|a| comps.get(&a).map_or_else(Scalar::zero, |p| p.coefficient(&one)))
                .collect();
            vectors.push((field.text.clone(), v));
        }
        if !ok {
            return None;
        }
        let checked = FoliationSpec::new(&name.text, coords, vectors)
            .map_err(|e| e.to_string())
            .and_then(|f| foliation_algebroid(&f).map(|_| f).map_err(|e| e.to_string()));
        match checked {
            Ok(f) => Some(f),
            Err(msg) => {
                self.error("E008", span, msg);
                None
            }
        }
    }
}

// ---------------------------------------------------------------- emitter

fn block(parts: Vec<String>, sep: &str) -> String {
    if parts.is_empty() {
        "{}".into()
    } else {
        format!("{{ {} }}", parts.join(sep))
    }
}

/// `Σ_slot p_slot · slot`, slots in index order, monomials descending.
fn fmt_row<'a>(gens: &GeneratorSet, row: impl IntoIterator<Item = (String, &'a GradedElement)>) -> String {
    fmt_linear_combination(row.into_iter().flat_map(|(slot, p)| {
        p.terms()
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut f = m.factors(gens);
                f.push(slot.clone());
                (c.clone(), f)
            })
            .collect::<Vec<_>>()
    }))
}

pub fn emit_algebroid(p: &AlgebroidPresentation) -> String {
    let gens = p.gens();
    let base = p.base().iter().map(|g| format!("{}:{}", g.name, g.weight)).collect();
    let frame = p.frame().iter().map(|g| format!("{}:{}", g.name, g.weight)).collect();
    let anchor = (0..p.rank())
        .filter(|i| (0..p.base_dim()).any(|a| !p.anchor(*i, a).is_zero()))
        .map(|i| {
            let row = (0..p.base_dim()).map(|a| (format!("d/d{}", p.base()[a].name), p.anchor(i, a)));
            format!("{} -> {};", p.frame()[i].name, fmt_row(gens, row))
        })
        .collect();
    let bracket = p
        .bracket_rows()
        .map(|((i, j), row)| {
            let terms = row.iter().enumerate().map(|(k, c)| (p.frame()[k].name.clone(), c));
            format!("[{},{}] = {};", p.frame()[*i].name, p.frame()[*j].name, fmt_row(gens, terms))
        })
        .collect();
    format!(
        "algebroid {} {{ base {} fiber {} anchor {} bracket {} }}",
        p.name(),
        block(base, ", "),
        block(frame, ", "),
        block(anchor, " "),
        block(bracket, " ")
    )
}

fn emit_cochain(c: &NamedCochain) -> String {
    let m = &c.cochain;
    let gens = m.gens().clone();
    let frame = |i: usize| gens.odds()[i].name.clone();
    let head = |idx: &[usize]| idx.iter().map(|i| frame(*i)).collect::<Vec<_>>().join(",");
    let grouped = |entries: Vec<(Vec<usize>, usize, GradedElement)>| {
        let mut rows: BTreeMap<Vec<usize>, Vec<(usize, GradedElement)>> = BTreeMap::new();
        for (idx, t, p) in entries {
            rows.entry(idx).or_default().push((t, p));
        }
        rows
    };
    let values = grouped(m.value_entries())
        .into_iter()
        .map(|(idx, row)| {
            let terms: Vec<(String, &GradedElement)> = row.iter().map(|(k, p)| (frame(*k), p)).collect();
            format!("({}) = {};", head(&idx), fmt_row(&gens, terms))
        })
        .collect();
    let symbol = grouped(m.symbol_entries())
        .into_iter()
        .map(|(idx, row)| {
            let terms: Vec<(String, &GradedElement)> =
                row.iter().map(|(a, p)| (format!("d/d{}", gens.evens()[*a].name), p)).collect();
            format!("({}) -> {};", head(&idx), fmt_row(&gens, terms))
        })
        .collect();
    format!(
        "cochain {} on {} {{ arity {}; values {} symbol {} }}",
        c.name,
        c.on,
        m.arity(),
        block(values, " "),
        block(symbol, " ")
    )
}

fn emit_foliation(f: &FoliationSpec) -> String {
    let ambient = f.ambient.iter().map(|(n, w)| format!("{n}:{w}")).collect();
    let spanning = f
        .spanning
        .iter()
        .map(|(n, v)| {
            let terms = v
                .iter()
                .zip(&f.ambient)
                .map(|(c, (x, _))| (c.clone(), vec![format!("d/d{x}")]));
            format!("{n} = {};", fmt_linear_combination(terms))
        })
        .collect();
    format!("foliation {} {{ ambient {} spanning {} }}", f.name, block(ambient, ", "), block(spanning, " "))
}

pub fn emit_item(item: &Item) -> String {
    match item {
        Item::Algebroid(a) => emit_algebroid(a),
        Item::Submersion(s) => {
            let fiber = s.spec.fiber.iter().map(|(n, w)| format!("{n}:{w}")).collect();
            format!("submersion {} {{ over {}; fiber {} }}", s.name, s.over, block(fiber, ", "))
        }
        Item::Cochain(c) => emit_cochain(c),
        Item::Foliation(f) => emit_foliation(f),
    }
}

/// Canonical text: one line per item, in declaration order.
pub fn emit(doc: &SpecDocument) -> String {
    doc.items.iter().map(|i| emit_item(i) + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graded::{int, ratio};
    use proptest::prelude::*;

    const AFF1: &str = "algebroid Aff1 { base {} fiber { e1:0, e2:0 } anchor {} bracket { [e1,e2] = e2; } }";

    fn errors(text: &str) -> Vec<Diagnostic> {
        parse(text).expect_err("should be rejected")
    }

    #[test]
    fn aff1_canonical() {
        let doc = parse(AFF1).unwrap().document;
        assert_eq!(doc.algebroid("Aff1").unwrap(), &corpus::aff1());
        assert_eq!(emit(&doc), format!("{AFF1}\n"));
    }

    #[test]
    fn tangent_line() {
        let doc = parse("algebroid T1 { base { x:1 } fiber { X:1 } anchor { X -> d/dx; } bracket {} }").unwrap().document;
        let t = doc.algebroid("T1").unwrap();
        assert_eq!(t.anchor(0, 0), &t.constant(int(1)));
        assert!(crate::foliation::table_difference(t, &corpus::tr1()).is_none());
    }

    #[test]
    fn self_bracket_rejected() {
        let text = "algebroid A {\n  base {} fiber { e1:0, e2:0 } anchor {}\n  bracket { [e1,e1] = e2; }\n}";
        let d = &errors(text)[0];
        assert_eq!(d.code, "E006");
        assert_eq!(d.message, "bracket of a generator with itself must be zero");
        assert_eq!((d.span.line, d.span.column), (3, 13));
        assert_eq!(d.span.length, "[e1,e1] = e2;".len());
    }

    #[test]
    fn unknown_identifier_span() {
        let d = &errors("algebroid A { base { x:1 } fiber { X:1 } anchor { X -> z*d/dx; } bracket {} }")[0];
        assert_eq!((d.code, d.span.column, d.span.length), ("E003", 56, 1));
        let d = &errors("algebroid A { base { x:1 } fiber { X:1 } anchor { Y -> d/dx; } bracket {} }")[0];
        assert_eq!(d.code, "E003");
        let d = &errors("submersion S { over Nope; fiber { u:1 } }")[0];
        assert_eq!(d.code, "E003");
    }

    #[test]
    fn duplicates_and_antisymmetry() {
        let base = |b: &str| format!("algebroid A {{ base {{}} fiber {{ e1:0, e2:0 }} anchor {{}} bracket {{ {b} }} }}");
        assert_eq!(errors(&base("[e1,e2] = e2; [e1,e2] = e2;"))[0].code, "E004");
        assert_eq!(errors(&base("[e1,e2] = e2; [e2,e1] = e2;"))[0].code, "E005");
        let ok = parse(&base("[e1,e2] = e2; [e2,e1] = -e2;")).unwrap();
        assert_eq!(ok.warnings.len(), 1);
        assert_eq!(ok.warnings[0].code, "W001");
        let mut aff = corpus::aff1();
        aff.set_name("A");
        assert_eq!(ok.document.algebroid("A").unwrap(), &aff);
        assert_eq!(errors(&format!("{AFF1} {AFF1}"))[0].code, "E004");
    }

    #[test]
    fn zero_entries_are_omitted() {
        let doc = parse("algebroid A { base { x:1 } fiber { X:1, Y:1 } anchor { X -> 0*d/dx; } bracket { [X,Y] = 0*X; } }")
            .unwrap()
            .document;
        assert_eq!(
            emit(&doc),
            "algebroid A { base { x:1 } fiber { X:1, Y:1 } anchor {} bracket {} }\n"
        );
    }

    #[test]
    fn rationals_and_order() {
        let text = "algebroid B { base { x:1, y:1 } fiber { E:0 } anchor { E -> y*d/dy - 1/2*x*d/dy + 3/6*x^2*d/dx; } bracket {} }";
        let doc = parse(text).unwrap().document;
        let canon = emit(&doc);
        assert_eq!(
            canon,
            "algebroid B { base { x:1, y:1 } fiber { E:0 } anchor { E -> 1/2*x^2*d/dx - 1/2*x*d/dy + y*d/dy; } bracket {} }\n"
        );
        assert_eq!(emit(&parse(&canon).unwrap().document), canon);
        let b = doc.algebroid("B").unwrap();
        assert_eq!(b.anchor(0, 0), &(&b.variable(0) * &b.variable(0)).scale(&ratio(1, 2)));
    }

    #[test]
    fn weight_errors_are_deferred() {
        let text = "algebroid W {\n base { x:1 } fiber { X:1 }\n anchor { X -> x*d/dx; }\n bracket {}\n}";
        let doc = parse(text).unwrap().document;
        let d = doc.weight_diagnostics();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].code, d[0].span.line, d[0].span.column), ("E007", 3, 11));
        assert!(parse(AFF1).unwrap().document.weight_diagnostics().is_empty());
    }

    #[test]
    fn every_item_kind_round_trips() {
        let text = "\
# comment
algebroid Ab2 { base {} fiber { e1:0, e2:0 } anchor {} bracket {} }
submersion S { over Ab2; fiber { u:1, w:2 } }
cochain C on Ab2 { arity 2; values { (e2,e1) = -e2; } symbol {} }
cochain Z on Ab2 { arity 0; values { () = 0; } symbol {} }
foliation F { ambient { x:1, y:1 } spanning { X = d/dx + 2*d/dy; } }
algebroid T { base { x:1 } fiber { X:1 } anchor { X -> d/dx; } bracket {} }
cochain D on T { arity 1; values { (X) = x*X; } symbol { () -> x*d/dx; } }
";
        let doc = parse(text).unwrap().document;
        let c = &doc.cochain("C").unwrap().cochain;
        assert_eq!(c.value(&[0, 1], 1), GradedElement::one(c.gens()));
        assert_eq!(doc.submersion("S").unwrap().spec.fiber_dim(), 2);
        assert_eq!(doc.foliation("F").unwrap().spanning[0].1, vec![int(1), int(2)]);
        let canon = emit(&doc);
        assert!(canon.contains("cochain C on Ab2 { arity 2; values { (e1,e2) = e2; } symbol {} }"));
        assert!(canon.contains("cochain D on T { arity 1; values { (X) = x*X; } symbol { () -> x*d/dx; } }"));
        assert!(canon.contains("foliation F { ambient { x:1, y:1 } spanning { X = d/dx + 2*d/dy; } }"));
        assert_eq!(emit(&parse(&canon).unwrap().document), canon);
    }

    #[test]
    fn lexical_and_syntax_errors() {
        let d = &errors("algebroid A { base { x:1 } @ }")[0];
        assert_eq!((d.code, d.span.column), ("E001", 28));
        let d = &errors("algebroid A { base { x:1 }")[0];
        assert_eq!(d.code, "E002");
        assert!(d.message.contains("end of input"));
        let d = &parse_bytes(b"algebroid \xff").unwrap_err()[0];
        assert_eq!((d.code, d.span.column), ("E001", 11));
        assert_eq!(errors("algebroid A { base { x:0 } fiber {} anchor {} bracket {} }")[0].code, "E008");
        assert_eq!(
            errors("algebroid A { base { x:1 } fiber { X:1 } anchor { X -> x^1001*d/dx; } bracket {} }")[0].code,
            "E008"
        );
    }

    #[test]
    fn render_points_at_the_span() {
        let text = "algebroid A { base {} fiber { e1:0 } anchor {} bracket { [e1,e1] = e1; } }";
        let out = errors(text)[0].render(text);
        assert!(out.starts_with("error[E006] 1:58:"));
        assert!(out.ends_with(&format!("{}{}", " ".repeat(57), "^".repeat(13))));
    }

    proptest! {
        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..200)) {
            if let Err(diags) = parse_bytes(&bytes) {
                prop_assert!(!diags.is_empty());
                prop_assert!(diags.iter().all(|d| d.span.line >= 1 && d.span.column >= 1));
            }
        }

        #[test]
        fn token_soup_never_panics(words in proptest::collection::vec(
            prop::sample::select(vec![
                "algebroid", "A", "{", "}", "base", "fiber", "x", ":", "1", "-", "anchor", "bracket",
                "[", "]", ",", "=", ";", "->", "d/dx", "e1", "*", "^", "/", "0", "cochain", "on",
                "arity", "values", "symbol", "(", ")", "submersion", "over", "foliation", "ambient", "spanning",
            ]),
            0..60,
        )) {
            let _ = parse(&words.join(" "));
        }
    }
}
