use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::lexer::{lex, Tok, Token};
use super::spec::{ModelSpec, SymbolTable};
use super::{ParseError, ParseErrorKind};
use crate::criteria::{AnsatzKind, TransformAnsatz};
use crate::number::{real, Rational};
use crate::tensor::{
    label, AlgebraError, AtomRef, Factor, Monomial, ScalarAtom, Slot, TensorExpr, TensorSymbol,
};

const RESERVED: &[&str] = &["p", "q", "delta", "hbar", "im", "dim"];

#[derive(Debug)]
enum Ast {
    Sum(Vec<(bool, Term)>),
}

#[derive(Debug)]
struct Term {
    line: usize,
    col: usize,
    items: Vec<Item>,
}

#[derive(Debug)]
enum Item {
    Mul(Atom, u32),
    DivInt(BigInt),
    DivAtom(String, u32, usize, usize),
}

#[derive(Debug)]
enum Atom {
    Int(BigInt),
    Hbar,
    Im,
    Dim,
    Sym {
        name: String,
        primes: u32,
        indices: Vec<String>,
        line: usize,
        col: usize,
    },
    Paren(Box<Ast>),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(t.line, t.col, msg)
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::Prime => "`'`".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            Ok(())
        } else {
            Err(self.err_here(format!("expected `{c}`, found {}", Self::describe(&self.peek().tok))))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.err_here(format!("expected identifier, found {}", Self::describe(&other)))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            other => Err(self.err_here(format!("expected `{kw}`, found {}", Self::describe(other)))),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn expect_int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek().tok.clone() {
            Tok::Int(s) => {
                self.next();
                Ok(s.parse().expect("lexer yields digits"))
            }
            other => Err(self.err_here(format!("expected integer, found {}", Self::describe(&other)))),
        }
    }

    fn expect_small(&mut self) -> Result<u32, ParseError> {
        let t = self.peek().clone();
        let n = self.expect_int()?;
        u32::try_from(n).map_err(|_| ParseError::new(t.line, t.col, "integer out of range"))
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut terms = Vec::new();
        let mut neg = false;
        if self.eat_punct('-') {
            neg = true;
        } else {
            self.eat_punct('+');
        }
        loop {
            terms.push((neg, self.term()?));
            if self.eat_punct('+') {
                neg = false;
            } else if self.eat_punct('-') {
                neg = true;
            } else {
                break;
            }
        }
        Ok(Ast::Sum(terms))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let start = self.peek().clone();
        let mut items = vec![self.factor()?];
        loop {
            if self.eat_punct('*') {
                items.push(self.factor()?);
            } else if self.eat_punct('/') {
                let t = self.peek().clone();
                match t.tok {
                    Tok::Int(_) => {
                        let n = self.expect_int()?;
                        if n.is_zero() {
                            return Err(ParseError::new(t.line, t.col, "division by zero"));
                        }
                        items.push(Item::DivInt(n));
                    }
                    Tok::Ident(name) => {
                        self.next();
                        let k = if self.eat_punct('^') { self.expect_small()? } else { 1 };
                        items.push(Item::DivAtom(name, k, t.line, t.col));
                    }
                    other => {
                        return Err(self.err_here(format!(
                            "expected integer or scalar atom after `/`, found {}",
                            Self::describe(&other)
                        )))
                    }
                }
            } else {
                break;
            }
        }
        Ok(Term {
            line: start.line,
            col: start.col,
            items,
        })
    }

    fn factor(&mut self) -> Result<Item, ParseError> {
        let t = self.next();
        let atom = match t.tok {
            Tok::Int(s) => Atom::Int(s.parse().expect("digits")),
            Tok::Ident(s) if s == "hbar" => Atom::Hbar,
            Tok::Ident(s) if s == "im" => Atom::Im,
            Tok::Ident(s) if s == "dim" => Atom::Dim,
            Tok::Ident(name) => {
                let mut primes = 0;
                while self.peek().tok == Tok::Prime {
                    self.next();
                    primes += 1;
                }
                let mut indices = Vec::new();
                if self.eat_punct('[') {
                    loop {
                        indices.push(self.expect_ident()?);
                        if !self.eat_punct(',') {
                            break;
                        }
                    }
                    self.expect_punct(']')?;
                }
                Atom::Sym {
                    name,
                    primes,
                    indices,
                    line: t.line,
                    col: t.col,
                }
            }
            Tok::Punct('(') => {
                let inner = self.expr()?;
                self.expect_punct(')')?;
                Atom::Paren(Box::new(inner))
            }
            other => {
                return Err(ParseError::new(
                    t.line,
                    t.col,
                    format!("expected a factor, found {}", Self::describe(&other)),
                ))
            }
        };
        let k = if self.eat_punct('^') { self.expect_small()? } else { 1 };
        Ok(Item::Mul(atom, k))
    }
}

fn alg(line: usize, col: usize, e: AlgebraError) -> ParseError {
    let kind = match e {
        AlgebraError::Arity { .. } => ParseErrorKind::Arity,
        _ => ParseErrorKind::Invalid,
    };
    ParseError::new(line, col, e.to_string()).with_kind(kind)
}

struct Eval<'a> {
    table: &'a SymbolTable,
    fresh: usize,
}

impl Eval<'_> {
    fn expr(&mut self, ast: &Ast) -> Result<TensorExpr, ParseError> {
        let Ast::Sum(terms) = ast;
        let mut acc: Option<TensorExpr> = None;
        for (neg, t) in terms {
            let mut v = self.term(t)?;
            if *neg {
                v = v.neg();
            }
            acc = Some(match acc {
                None => v,
                Some(a) => {
                    if a.free() != v.free() {
                        return Err(ParseError::new(
                            t.line,
                            t.col,
                            format!(
                                "free indices {} do not match {}",
                                show_labels(v.free()),
                                show_labels(a.free())
                            ),
                        )
                        .with_kind(ParseErrorKind::Invalid));
                    }
                    a.add(&v).map_err(|e| alg(t.line, t.col, e))?
                }
            });
        }
        Ok(acc.unwrap_or_else(TensorExpr::scalar_zero))
    }

    fn term(&mut self, t: &Term) -> Result<TensorExpr, ParseError> {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut pieces: Vec<TensorExpr> = Vec::new();
        let mut scale = Rational::one();
        for item in &t.items {
            match item {
                Item::Mul(atom, k) => {
                    let (piece, labels) = self.atom(atom)?;
                    let piece = if *k == 1 {
                        piece
                    } else if !piece.free().is_empty() {
                        return Err(ParseError::new(t.line, t.col, "`^` applies only to scalar factors")
                            .with_kind(ParseErrorKind::Invalid));
                    } else {
                        piece.pow(*k).map_err(|e| alg(t.line, t.col, e))?
                    };
                    for l in labels {
                        *counts.entry(l).or_default() += if *k == 1 { 1 } else { 0 };
                    }
                    pieces.push(piece);
                }
                Item::DivInt(n) => scale /= Rational::from_integer(n.clone()),
                Item::DivAtom(name, k, line, col) => {
                    let atom = self.table.atoms.get(name).ok_or_else(|| {
                        ParseError::new(*line, *col, format!("`{name}` is not a declared scalar atom"))
                            .with_kind(ParseErrorKind::UndeclaredSymbol)
                    })?;
                    pieces.push(TensorExpr::inverse_atom(atom, *k).map_err(|e| alg(*line, *col, e))?);
                }
            }
        }
        if let Some((l, _)) = counts.iter().find(|(_, n)| **n > 2) {
            return Err(ParseError::new(t.line, t.col, format!("index `{l}` occurs more than twice"))
                .with_kind(ParseErrorKind::TripleIndex));
        }
        let mut acc = TensorExpr::rational(scale);
        for piece in pieces {
            let shared: Vec<_> = acc.free().intersection(piece.free()).cloned().collect();
            let mut piece = piece;
            let mut pairs = Vec::new();
            for l in shared {
                self.fresh += 1;
                let tmp = format!("#e{}", self.fresh);
                piece = piece.rename(&l, &tmp).map_err(|e| alg(t.line, t.col, e))?;
                pairs.push((l, tmp));
            }
            acc = acc.mul(&piece).map_err(|e| alg(t.line, t.col, e))?;
            for (l, tmp) in pairs {
                acc = acc.contract(&l, &tmp).map_err(|e| alg(t.line, t.col, e))?;
            }
        }
        Ok(acc)
    }

    /// Returns the factor and the index labels written on it.
    fn atom(&mut self, atom: &Atom) -> Result<(TensorExpr, Vec<String>), ParseError> {
        Ok(match atom {
            Atom::Int(n) => (TensorExpr::rational(Rational::from_integer(n.clone())), vec![]),
            Atom::Hbar => (TensorExpr::hbar(), vec![]),
            Atom::Im => (TensorExpr::im(), vec![]),
            Atom::Dim => (TensorExpr::dim(), vec![]),
            Atom::Paren(inner) => {
                let e = self.expr(inner)?;
                let labels = e.free().iter().map(|l| l.to_string()).collect();
                (e, labels)
            }
            Atom::Sym {
                name,
                primes,
                indices,
                line,
                col,
            } => {
                let (line, col) = (*line, *col);
                let idx: Vec<&str> = indices.iter().map(String::as_str).collect();
                let arity = |expected: usize| -> Result<(), ParseError> {
                    if idx.len() != expected {
                        Err(ParseError::new(
                            line,
                            col,
                            format!("`{name}` takes {expected} indices, found {}", idx.len()),
                        )
                        .with_kind(ParseErrorKind::Arity))
                    } else {
                        Ok(())
                    }
                };
                if *primes > 0 && !self.table.radials.contains(name) {
                    return Err(ParseError::new(line, col, format!("`{name}` is not a radial function"))
                        .with_kind(ParseErrorKind::Invalid));
                }
                let e = match name.as_str() {
                    "p" => {
                        arity(1)?;
                        TensorExpr::p(idx[0])
                    }
                    "q" => {
                        arity(1)?;
                        TensorExpr::from_monomial(Monomial::with_factors(
                            real(Rational::one()),
                            vec![Factor::Q(Slot::free(idx[0]))],
                        ))
                        .map_err(|e| alg(line, col, e))?
                    }
                    "delta" => {
                        arity(2)?;
                        TensorExpr::delta(idx[0], idx[1]).map_err(|e| alg(line, col, e))?
                    }
                    _ => {
                        if let Some(sym) = self.table.tensors.get(name) {
                            arity(sym.rank)?;
                            TensorExpr::tensor(sym, &idx).map_err(|e| alg(line, col, e))?
                        } else if self.table.radials.contains(name) {
                            arity(0)?;
                            TensorExpr::radial(name, *primes)
                        } else if let Some(a) = self.table.atoms.get(name) {
                            arity(0)?;
                            a.definition().clone()
                        } else {
                            return Err(ParseError::new(line, col, format!("undeclared symbol `{name}`"))
                                .with_kind(ParseErrorKind::UndeclaredSymbol));
                        }
                    }
                };
                (e, indices.clone())
            }
        })
    }
}

fn show_labels(s: &BTreeSet<crate::tensor::Label>) -> String {
    let v: Vec<String> = s.iter().map(|l| l.to_string()).collect();
    format!("[{}]", v.join(","))
}

fn invertible_at_origin(e: &TensorExpr) -> bool {
    e.terms()
        .iter()
        .any(|m| m.pp == 0 && m.denom.is_empty() && m.factors.iter().all(|f| matches!(f, Factor::Radial { .. })))
}

/// Parses a standalone expression against a symbol table.
pub fn parse_expr(text: &str, table: &SymbolTable) -> Result<TensorExpr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let ast = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return Err(p.err_here(format!("unexpected {}", Parser::describe(&p.peek().tok))));
    }
    Eval { table, fresh: 0 }.expr(&ast)
}

/// Parses an anonymous ansatz body such as `power(n: s)` against a model's
/// symbols.
pub fn parse_ansatz(text: &str, table: &SymbolTable) -> Result<TransformAnsatz, ParseError> {
    let mut mp = ModelParser {
        p: Parser { toks: lex(text)?, pos: 0 },
        table: table.clone(),
        fresh: 0,
    };
    let a = mp.ansatz_body("inline".to_string())?;
    if mp.p.peek().tok != Tok::Eof {
        return Err(mp.p.err_here(format!("unexpected {}", Parser::describe(&mp.p.peek().tok))));
    }
    Ok(a)
}

struct ModelParser {
    p: Parser,
    table: SymbolTable,
    fresh: usize,
}

impl ModelParser {
    fn eval(&mut self, ast: &Ast) -> Result<TensorExpr, ParseError> {
        let mut ev = Eval {
            table: &self.table,
            fresh: self.fresh,
        };
        let r = ev.expr(ast);
        self.fresh = ev.fresh;
        r
    }

    fn declare_check(&self, name: &str, at: &Token) -> Result<(), ParseError> {
        if RESERVED.contains(&name) || self.table.is_declared(name) {
            return Err(ParseError::new(at.line, at.col, format!("`{name}` is reserved or already declared"))
                .with_kind(ParseErrorKind::Invalid));
        }
        Ok(())
    }

    fn vector(&mut self, what: &str) -> Result<Option<(crate::tensor::Label, TensorExpr)>, ParseError> {
        self.p.expect_punct('[')?;
        let idx = self.p.expect_ident()?;
        self.p.expect_punct(']')?;
        self.p.expect_punct('=')?;
        let at = self.p.peek().clone();
        let ast = self.p.expr()?;
        let e = self.eval(&ast)?;
        let want: BTreeSet<_> = [label(&idx)].into_iter().collect();
        if e.free() != &want {
            return Err(ParseError::new(
                at.line,
                at.col,
                format!("{what}[{idx}] must have the single free index `{idx}`"),
            )
            .with_kind(ParseErrorKind::Invalid));
        }
        Ok(if e.is_empty() { None } else { Some((label(&idx), e)) })
    }

    fn ansatz_name(&mut self) -> Result<String, ParseError> {
        match self.p.peek().tok.clone() {
            Tok::Str(s) => {
                self.p.next();
                Ok(s)
            }
            _ => self.p.expect_ident(),
        }
    }

    fn unknown(&self, name: &str, at: &Token, seen: &BTreeSet<String>) -> Result<Arc<TensorSymbol>, ParseError> {
        self.declare_check(name, at)?;
        if seen.contains(name) {
            return Err(ParseError::new(at.line, at.col, format!("duplicate unknown `{name}`"))
                .with_kind(ParseErrorKind::Invalid));
        }
        Ok(TensorSymbol::unknown(name))
    }

    fn ansatz(&mut self) -> Result<TransformAnsatz, ParseError> {
        let name = self.ansatz_name()?;
        self.ansatz_body(name)
    }

    fn ansatz_body(&mut self, name: String) -> Result<TransformAnsatz, ParseError> {
        let at = self.p.peek().clone();
        let kind_word = self.p.expect_ident()?;
        let kind = match kind_word.as_str() {
            "logderiv" => {
                self.p.expect_punct('[')?;
                let idx = self.p.expect_ident()?;
                self.p.expect_punct(']')?;
                self.p.expect_punct('=')?;
                let at = self.p.peek().clone();
                let ast = self.p.expr()?;
                let value = self.eval(&ast)?;
                if value.free().iter().map(|l| l.to_string()).collect::<Vec<_>>() != vec![idx.clone()] {
                    return Err(ParseError::new(at.line, at.col, "log-derivative must carry its single free index")
                        .with_kind(ParseErrorKind::Invalid));
                }
                AnsatzKind::LogDerivative {
                    index: label(&idx),
                    value,
                }
            }
            "power" | "poly" => {
                self.p.expect_punct('(')?;
                let mut seen = BTreeSet::new();
                let mut power = Vec::new();
                let mut poly = Vec::new();
                loop {
                    let at = self.p.peek().clone();
                    let k = self.p.expect_ident()?;
                    let sym = self.unknown(&k, &at, &seen)?;
                    seen.insert(k);
                    self.p.expect_punct(':')?;
                    if kind_word == "power" {
                        let at = self.p.peek().clone();
                        let a = self.p.expect_ident()?;
                        let atom = self.table.atoms.get(&a).cloned().ok_or_else(|| {
                            ParseError::new(at.line, at.col, format!("`{a}` is not a declared scalar atom"))
                                .with_kind(ParseErrorKind::UndeclaredSymbol)
                        })?;
                        power.push((sym, atom));
                    } else {
                        let at = self.p.peek().clone();
                        let ast = self.p.expr()?;
                        let e = self.eval(&ast)?;
                        if !e.free().is_empty() || e.has_denominators() {
                            return Err(ParseError::new(
                                at.line,
                                at.col,
                                "polynomial basis elements must be scalars without denominators",
                            )
                            .with_kind(ParseErrorKind::Invalid));
                        }
                        poly.push((sym, e));
                    }
                    if !self.p.eat_punct(',') {
                        break;
                    }
                }
                self.p.expect_punct(')')?;
                if kind_word == "power" {
                    AnsatzKind::Power { exponents: power }
                } else {
                    AnsatzKind::Poly { coefficients: poly }
                }
            }
            other => {
                return Err(ParseError::new(
                    at.line,
                    at.col,
                    format!("unknown ansatz kind `{other}` (expected logderiv, power or poly)"),
                ))
            }
        };
        Ok(TransformAnsatz { name, kind })
    }

    fn model(mut self) -> Result<ModelSpec, ParseError> {
        self.p.expect_keyword("model")?;
        let name = match self.p.next() {
            Token { tok: Tok::Str(s), .. } => s,
            t => return Err(ParseError::new(t.line, t.col, "expected model name string")),
        };
        self.p.expect_punct('{')?;
        let mut dim = None;
        let mut f = None;
        let mut g = None;
        let mut h = None;
        let mut seen_g = false;
        let mut seen_h = false;
        let mut ansatze: Vec<TransformAnsatz> = Vec::new();
        loop {
            let at = self.p.peek().clone();
            let word = match &at.tok {
                Tok::Punct('}') => {
                    self.p.next();
                    break;
                }
                Tok::Ident(s) => s.clone(),
                other => return Err(self.p.err_here(format!("expected a declaration, found {}", Parser::describe(other)))),
            };
            self.p.next();
            let dup = |what: &str| {
                ParseError::new(at.line, at.col, format!("duplicate `{what}` declaration"))
                    .with_kind(ParseErrorKind::Invalid)
            };
            match word.as_str() {
                "dim" => {
                    if dim.is_some() {
                        return Err(dup("dim"));
                    }
                    let n = self.p.expect_small()?;
                    if n == 0 {
                        return Err(ParseError::new(at.line, at.col, "dimension must be positive")
                            .with_kind(ParseErrorKind::Invalid));
                    }
                    dim = Some(n);
                }
                "tensor" => {
                    let nt = self.p.peek().clone();
                    let tname = self.p.expect_ident()?;
                    self.declare_check(&tname, &nt)?;
                    self.p.expect_keyword("rank")?;
                    let rank = self.p.expect_small()? as usize;
                    let symmetric = if self.p.is_keyword("symmetric") {
                        self.p.next();
                        true
                    } else {
                        false
                    };
                    let order = if self.p.is_keyword("order") {
                        self.p.next();
                        self.p.expect_small()?
                    } else {
                        1
                    };
                    self.table
                        .tensors
                        .insert(tname.clone(), TensorSymbol::background(&tname, rank, symmetric, order));
                }
                "radial" => {
                    let nt = self.p.peek().clone();
                    let rname = self.p.expect_ident()?;
                    self.declare_check(&rname, &nt)?;
                    self.table.radials.insert(rname);
                }
                "scalaratom" => {
                    let nt = self.p.peek().clone();
                    let aname = self.p.expect_ident()?;
                    self.declare_check(&aname, &nt)?;
                    self.p.expect_punct('=')?;
                    let et = self.p.peek().clone();
                    let ast = self.p.expr()?;
                    let def = self.eval(&ast)?;
                    if !def.free().is_empty() || def.has_denominators() {
                        return Err(ParseError::new(
                            et.line,
                            et.col,
                            "a scalar atom must be a scalar without denominators",
                        )
                        .with_kind(ParseErrorKind::Invalid));
                    }
                    let atom = AtomRef(Arc::new(ScalarAtom {
                        name: label(&aname),
                        definition: def,
                    }));
                    if !invertible_at_origin(atom.definition()) {
                        return Err(ParseError::new(et.line, et.col, "a scalar atom needs a nonzero constant term")
                            .with_kind(ParseErrorKind::Invalid));
                    }
                    self.table.atoms.insert(aname, atom);
                }
                "f" => {
                    if f.is_some() {
                        return Err(dup("f"));
                    }
                    self.p.expect_punct('=')?;
                    let et = self.p.peek().clone();
                    let ast = self.p.expr()?;
                    let e = self.eval(&ast)?;
                    if !e.free().is_empty() {
                        return Err(ParseError::new(et.line, et.col, "f must not carry free indices")
                            .with_kind(ParseErrorKind::Invalid));
                    }
                    f = Some(e);
                }
                "g" => {
                    if seen_g {
                        return Err(dup("g"));
                    }
                    seen_g = true;
                    g = self.vector("g")?;
                }
                "h" => {
                    if seen_h {
                        return Err(dup("h"));
                    }
                    seen_h = true;
                    h = self.vector("h")?;
                }
                "ansatz" => {
                    let a = self.ansatz()?;
                    if ansatze.iter().any(|b| b.name == a.name) {
                        return Err(dup(&format!("ansatz {}", a.name)));
                    }
                    ansatze.push(a);
                }
                other => {
                    return Err(ParseError::new(at.line, at.col, format!("unknown declaration `{other}`")));
                }
            }
        }
        if self.p.peek().tok != Tok::Eof {
            return Err(self.p.err_here("text after the closing brace"));
        }
        Ok(ModelSpec {
            name,
            dim,
            symbols: self.table,
            f: f.unwrap_or_else(TensorExpr::one),
            g,
            h,
            ansatze,
        })
    }
}

/// Parses one model in the DSL.
pub fn parse_model(text: &str) -> Result<ModelSpec, ParseError> {
    ModelParser {
        p: Parser { toks: lex(text)?, pos: 0 },
        table: SymbolTable::default(),
        fresh: 0,
    }
    .model()
}
