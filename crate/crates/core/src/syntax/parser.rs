// SPDX-License-Identifier: Apache-2.0

use unicode_normalization::UnicodeNormalization;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, SourceSpan};
use crate::kernel::{ProofTerm, ScriptItem, Tactic, TacticScript};
use crate::logic::{sym, Binder, DeclKind, Declaration, Formula, Symbol, Term, Theory, UNRESOLVED_SORT};

const DECL_KEYWORDS: &[&str] = &[
    "universe",
    "universes",
    "constant",
    "constants",
    "axiom",
    "axioms",
    "theorem",
    "lemma",
];

const RESERVED: &[&str] = &[
    "universe",
    "universes",
    "constant",
    "constants",
    "axiom",
    "axioms",
    "theorem",
    "lemma",
    "begin",
    "end",
    "from",
    "with",
    "by",
    "have",
    "def",
    "variable",
    "variables",
    "example",
];

fn is_reserved(s: &str) -> bool {
    RESERVED.contains(&s)
}

struct Parser {
    src: String,
    toks: Vec<Token>,
    comments: Vec<(SourceSpan, String)>,
    pos: usize,
    /// Names of enclosing binders, innermost last.
    bound: Vec<Symbol>,
}

impl Parser {
    fn new(source: &str) -> Result<Self, ParseError> {
        let src: String = source.nfc().collect();
        let mut toks = Vec::new();
        let mut comments = Vec::new();
        for t in tokenize(&src)? {
            match t.tok {
                Tok::Comment(text) => comments.push((t.span, text)),
                _ => toks.push(t),
            }
        }
        Ok(Parser {
            src,
            toks,
            comments,
            pos: 0,
            bound: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            message: message.into(),
        })
    }

    fn expected<T>(&self, what: &str) -> Result<T, ParseError> {
        self.error(format!("expected {what}, found {}", self.peek().describe()))
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            self.expected(what)
        }
    }

    fn is_kw(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn eat_kw(&mut self, word: &str) -> bool {
        if self.is_kw(word) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// A non-reserved identifier, if one is next.
    fn peek_name(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) if !is_reserved(s) => Some(s),
            _ => None,
        }
    }

    fn expect_name(&mut self, what: &str) -> Result<Symbol, ParseError> {
        match self.peek_name() {
            Some(s) => {
                let s = sym(s);
                self.bump();
                Ok(s)
            }
            None => self.expected(what),
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            self.expected("end of input")
        }
    }

    // ---- formulas -------------------------------------------------------

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.formula()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.conjunction()?;
        if self.eat(&Tok::Or) {
            let rhs = self.disjunction()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::And) {
            let rhs = self.conjunction()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => self.quantifier(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Bottom => {
                self.bump();
                Ok(Formula::Falsum)
            }
            Tok::Ident(s) if !is_reserved(s) => self.atom(),
            _ => self.expected("a formula"),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = self.bump().tok == Tok::Forall;
        let binders = self.binders()?;
        let depth = self.bound.len();
        for b in &binders {
            self.bound.push(b.name.clone());
        }
        let body = self.formula();
        self.bound.truncate(depth);
        let mut f = body?;
        for b in binders.into_iter().rev() {
            f = if universal {
                Formula::Forall(b, Box::new(f))
            } else {
                Formula::Exists(b, Box::new(f))
            };
        }
        Ok(f)
    }

    /// `x y : s,` or `(x : s) (y : t),` or `x,` (sort resolved later).
    fn binders(&mut self) -> Result<Vec<Binder>, ParseError> {
        let mut out = Vec::new();
        loop {
            if self.eat(&Tok::LParen) {
                let names = self.binder_names()?;
                self.expect(Tok::Colon, "`:`")?;
                let sort = self.expect_name("a sort")?;
                self.expect(Tok::RParen, "`)`")?;
                out.extend(names.into_iter().map(|n| Binder { name: n, sort: sort.clone() }));
            } else if self.peek_name().is_some() {
                let names = self.binder_names()?;
                let sort = if self.eat(&Tok::Colon) {
                    self.expect_name("a sort")?
                } else {
                    sym(UNRESOLVED_SORT)
                };
                out.extend(names.into_iter().map(|n| Binder { name: n, sort: sort.clone() }));
            } else {
                break;
            }
        }
        if out.is_empty() {
            return self.expected("a bound variable");
        }
        self.expect(Tok::Comma, "`,` after binders")?;
        Ok(out)
    }

    fn binder_names(&mut self) -> Result<Vec<Symbol>, ParseError> {
        let mut names = vec![self.expect_name("a variable name")?];
        while let Some(n) = self.peek_name() {
            names.push(sym(n));
            self.bump();
        }
        Ok(names)
    }

    fn term(&mut self) -> Option<Term> {
        let t = match self.peek() {
            Tok::Ident(s) if !is_reserved(s) => match self.bound.iter().rposition(|b| &**b == s) {
                Some(i) => Term::Var((self.bound.len() - 1 - i) as u32),
                None => Term::Const(sym(s)),
            },
            Tok::Num(n) => Term::Numeral(*n),
            _ => return None,
        };
        self.bump();
        Some(t)
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let head = self.expect_name("a predicate")?;
        let mut args = Vec::new();
        while let Some(t) = self.term() {
            args.push(t);
        }
        if self.eat(&Tok::Eq) {
            let mut lhs = vec![Term::Const(head)];
            lhs.extend(args);
            let mut rhs = Vec::new();
            while let Some(t) = self.term() {
                rhs.push(t);
            }
            if rhs.is_empty() {
                return self.expected("a term after `=`");
            }
            return Ok(Formula::Equals(lhs, rhs));
        }
        Ok(Formula::Atom(head, args))
    }

    // ---- proof terms and tactics ---------------------------------------

    fn proof_term(&mut self) -> Result<ProofTerm, ParseError> {
        let start = self.span();
        let head = self.proof_atom()?;
        let mut args = Vec::new();
        while matches!(self.peek(), Tok::LParen) || self.peek_name().is_some() {
            args.push(self.proof_atom()?);
        }
        let special = match &head {
            ProofTerm::Name(n) => match &**n {
                "and.intro" => Some((2, 0)),
                "or.inl" => Some((1, 1)),
                "or.inr" => Some((1, 2)),
                _ => None,
            },
            _ => None,
        };
        let Some((arity, which)) = special else {
            return Ok(ProofTerm::app(head, args));
        };
        if args.len() != arity {
            return Err(ParseError {
                span: start.merge(self.prev_span()),
                message: format!(
                    "`{}` expects {arity} argument(s), found {}",
                    head.head_name().map(|s| &**s).unwrap_or("?"),
                    args.len()
                ),
            });
        }
        let mut it = args.into_iter();
        let a = Box::new(it.next().unwrap());
        Ok(match which {
            0 => ProofTerm::AndIntro(a, Box::new(it.next().unwrap())),
            1 => ProofTerm::OrInl(a),
            _ => ProofTerm::OrInr(a),
        })
    }

    fn proof_atom(&mut self) -> Result<ProofTerm, ParseError> {
        if self.eat(&Tok::LParen) {
            let t = self.proof_term()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(t);
        }
        Ok(ProofTerm::Name(self.expect_name("a proof term")?))
    }

    fn at_tactic_end(&self) -> bool {
        matches!(self.peek(), Tok::Comma | Tok::Semicolon | Tok::RBrace | Tok::Eof) || self.is_kw("end")
    }

    fn tactic(&mut self) -> Result<Tactic, ParseError> {
        let Tok::Ident(word) = self.peek().clone() else {
            return self.expected("a tactic");
        };
        let start = self.span();
        self.bump();
        let t = match word.as_str() {
            "intro" => Tactic::Intro(match self.peek_name() {
                Some(n) => {
                    let n = sym(n);
                    self.bump();
                    Some(n)
                }
                None => None,
            }),
            "apply" => Tactic::Apply(self.proof_term()?),
            "exact" | "from" => Tactic::Exact(self.proof_term()?),
            "assumption" => Tactic::Assumption,
            "split" => Tactic::Split,
            "left" => Tactic::Left,
            "right" => Tactic::Right,
            "contradiction" => Tactic::Contradiction,
            "sorry" => Tactic::Sorry,
            "use" | "existsi" => Tactic::Use(self.expect_name("a witness")?),
            "cases" => {
                let target = self.proof_term()?;
                let mut names = Vec::new();
                if self.eat_kw("with") {
                    names = self.binder_names()?;
                }
                Tactic::Cases { target, names }
            }
            "have" => self.have()?,
            _ => {
                // Skip to the end of the tactic, respecting nesting.
                let mut depth = 0usize;
                loop {
                    match self.peek() {
                        Tok::Eof => break,
                        Tok::LParen | Tok::LBrace => depth += 1,
                        Tok::RParen => depth = depth.saturating_sub(1),
                        Tok::RBrace if depth == 0 => break,
                        Tok::RBrace => depth -= 1,
                        Tok::Comma | Tok::Semicolon if depth == 0 => break,
                        Tok::Ident(s) if depth == 0 && s == "end" => break,
                        _ => {}
                    }
                    self.bump();
                }
                let end = if self.pos > 0 { self.prev_span().end } else { start.end };
                let text = self.src[start.start..end.max(start.end)].trim().to_string();
                return Ok(Tactic::Opaque(text));
            }
        };
        if !self.at_tactic_end() {
            return self.expected("`,` or end of tactic");
        }
        Ok(t)
    }

    fn have(&mut self) -> Result<Tactic, ParseError> {
        let name = match self.peek_name() {
            Some(n) => {
                let n = sym(n);
                self.bump();
                Some(n)
            }
            None => None,
        };
        let formula = if self.eat(&Tok::Colon) {
            Some(self.formula()?)
        } else {
            None
        };
        let proof = if self.eat(&Tok::Assign) {
            Some(self.proof_term()?)
        } else if self.peek() == &Tok::Comma && matches!(self.peek_at(1), Tok::Ident(s) if s == "from") {
            self.bump();
            self.bump();
            Some(self.proof_term()?)
        } else {
            None
        };
        if formula.is_none() && proof.is_none() {
            return self.expected("`:` or `:=` after `have`");
        }
        Ok(Tactic::Have { name, formula, proof })
    }

    /// Items up to (not including) `end` or `}`.
    fn items(&mut self) -> Result<Vec<ScriptItem>, ParseError> {
        let mut items = Vec::new();
        loop {
            if self.peek() == &Tok::RBrace || self.is_kw("end") || self.peek() == &Tok::Eof {
                break;
            }
            let start = self.span();
            if self.eat(&Tok::LBrace) {
                let inner = self.items()?;
                self.expect(Tok::RBrace, "`}`")?;
                if inner.is_empty() {
                    return Err(ParseError {
                        span: start.merge(self.prev_span()),
                        message: "empty tactic block".into(),
                    });
                }
                items.push(ScriptItem::Block(inner, start.merge(self.prev_span())));
            } else {
                let t = self.tactic()?;
                items.push(ScriptItem::Tactic(t, start.merge(self.prev_span())));
            }
            if !(self.eat(&Tok::Comma) || self.eat(&Tok::Semicolon)) {
                break;
            }
        }
        Ok(items)
    }

    fn script(&mut self) -> Result<TacticScript, ParseError> {
        let start = self.span();
        let items = if self.eat_kw("begin") {
            let items = self.items()?;
            if !self.eat_kw("end") {
                return self.expected("`end`");
            }
            items
        } else if self.eat_kw("by") {
            let s = self.span();
            let t = self.tactic()?;
            vec![ScriptItem::Tactic(t, s.merge(self.prev_span()))]
        } else {
            let items = self.items()?;
            if self.peek() == &Tok::RBrace {
                return self.error("unbalanced `}`");
            }
            items
        };
        if items.is_empty() {
            return Err(ParseError {
                span: start.merge(self.prev_span()),
                message: "empty proof script".into(),
            });
        }
        Ok(TacticScript { items })
    }

    // ---- declarations ---------------------------------------------------

    fn at_line_start(&self) -> bool {
        self.pos == 0 || self.toks[self.pos - 1].span.line < self.span().line
    }

    fn at_decl_keyword(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if DECL_KEYWORDS.contains(&s.as_str()))
    }

    fn theory(&mut self) -> Result<Theory, ParseError> {
        let mut theory = Theory::new();
        let mut next_comment = 0;
        while self.peek() != &Tok::Eof {
            let start = self.span();
            let mut comments = Vec::new();
            while next_comment < self.comments.len() && self.comments[next_comment].0.start < start.start {
                comments.push(self.comments[next_comment].1.clone());
                next_comment += 1;
            }
            let Tok::Ident(kw) = self.peek().clone() else {
                return self.expected("a declaration");
            };
            self.bump();
            let mut decls = match kw.as_str() {
                "universe" | "universes" => {
                    while self.peek_name().is_some() {
                        self.bump();
                    }
                    Vec::new()
                }
                "constant" | "constants" => self.constants()?,
                "axiom" | "axioms" => {
                    let name = self.expect_name("an axiom name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let f = self.formula()?;
                    vec![Declaration {
                        name,
                        kind: DeclKind::Axiom(f),
                        comments: Vec::new(),
                        span: None,
                    }]
                }
                "theorem" | "lemma" => {
                    let name = self.expect_name("a theorem name")?;
                    self.expect(Tok::Colon, "`:`")?;
                    let statement = self.formula()?;
                    let script = if self.eat(&Tok::Assign) {
                        Some(self.script()?)
                    } else {
                        None
                    };
                    let after_end = script.is_some();
                    let d = Declaration {
                        name,
                        kind: DeclKind::Theorem { statement, script },
                        comments: Vec::new(),
                        span: None,
                    };
                    if after_end && self.peek() != &Tok::Eof && !(self.at_decl_keyword() && self.at_line_start()) {
                        self.skip_prose(&mut theory);
                    }
                    vec![d]
                }
                _ => {
                    self.pos -= 1;
                    return self.expected("a declaration");
                }
            };
            let span = start.merge(self.prev_span());
            if let Some(first) = decls.first_mut() {
                first.comments = comments;
            }
            for d in &mut decls {
                d.span = Some(span);
            }
            // Comments inside the declaration belong to nobody.
            while next_comment < self.comments.len() && self.comments[next_comment].0.start < span.end {
                next_comment += 1;
            }
            for d in decls {
                theory.push(d);
            }
        }
        theory.trailing_comments = self.comments[next_comment..].iter().map(|(_, c)| c.clone()).collect();
        if let Some(sort) = theory.single_sort() {
            resolve_theory_sorts(&mut theory, &sort);
        }
        Ok(theory)
    }

    /// Skips text after a proof block up to the next declaration keyword
    /// at the start of a line.
    fn skip_prose(&mut self, theory: &mut Theory) {
        let span = self.span();
        while self.peek() != &Tok::Eof && !(self.at_decl_keyword() && self.at_line_start()) {
            self.bump();
        }
        theory.warnings.push(format!(
            "{}:{}: ignored text after proof block",
            span.line, span.column
        ));
    }

    fn constants(&mut self) -> Result<Vec<Declaration>, ParseError> {
        let mut names = vec![self.expect_name("a constant name")?];
        while let Some(n) = self.peek_name() {
            names.push(sym(n));
            self.bump();
        }
        self.expect(Tok::Colon, "`:`")?;
        let kind = self.type_expr()?;
        Ok(names
            .into_iter()
            .map(|name| Declaration {
                name,
                kind: kind.clone(),
                comments: Vec::new(),
                span: None,
            })
            .collect())
    }

    fn type_expr(&mut self) -> Result<DeclKind, ParseError> {
        if self.is_kw("Type") || self.is_kw("Sort") {
            self.bump();
            // Optional universe level.
            if (self.peek_name().is_some() && !self.at_line_start()) || matches!(self.peek(), Tok::Num(_)) {
                self.bump();
            }
            return Ok(DeclKind::Sort);
        }
        let mut parts = vec![self.expect_name("a type")?];
        while self.eat(&Tok::Arrow) {
            parts.push(self.expect_name("a type")?);
        }
        let result = parts.pop().unwrap();
        Ok(match (&*result, parts.is_empty()) {
            ("Prop", _) => DeclKind::Predicate { args: parts },
            (_, true) => DeclKind::Constant { sort: result },
            (_, false) => DeclKind::Function { args: parts, result },
        })
    }
}

fn resolve_script_sorts(items: &mut [ScriptItem], sort: &Symbol) {
    for item in items {
        match item {
            ScriptItem::Tactic(Tactic::Have { formula: Some(f), .. }, _) => f.resolve_sorts(sort),
            ScriptItem::Block(inner, _) => resolve_script_sorts(inner, sort),
            ScriptItem::Tactic(..) => {}
        }
    }
}

fn resolve_theory_sorts(theory: &mut Theory, sort: &Symbol) {
    let names: Vec<Symbol> = theory.decls().iter().map(|d| d.name.clone()).collect();
    for n in names {
        let Some(d) = theory.get_mut(&n) else { continue };
        match &mut d.kind {
            DeclKind::Axiom(f) => f.resolve_sorts(sort),
            DeclKind::Theorem { statement, script } => {
                statement.resolve_sorts(sort);
                if let Some(s) = script {
                    resolve_script_sorts(&mut s.items, sort);
                }
            }
            _ => {}
        }
    }
}

/// Parses without running `check_wf`. Binder sorts left implicit are
/// resolved when the theory declares exactly one sort.
pub fn parse_theory_unchecked(source: &str) -> Result<Theory, ParseError> {
    Parser::new(source)?.theory()
}

pub fn parse_formula(source: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(source)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_proof_term(source: &str) -> Result<ProofTerm, ParseError> {
    let mut p = Parser::new(source)?;
    let t = p.proof_term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a single tactic; a trailing comma is allowed.
pub fn parse_tactic(source: &str) -> Result<Tactic, ParseError> {
    let mut p = Parser::new(source)?;
    let t = p.tactic()?;
    p.eat(&Tok::Comma);
    p.expect_eof()?;
    Ok(t)
}

/// Parses `begin ... end`, `by tac`, or a bare comma-separated tactic list.
pub fn parse_script(source: &str) -> Result<TacticScript, ParseError> {
    let mut p = Parser::new(source)?;
    let s = p.script()?;
    p.expect_eof()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let got = f("Likes x Cat ∧ Chases x Cat → Blue x");
        let want = Formula::implies(
            Formula::and(Formula::atom("Likes", &["x", "Cat"]), Formula::atom("Chases", &["x", "Cat"])),
            Formula::atom("Blue", &["x"]),
        );
        assert_eq!(got, want);
        let (p, q, r) = (Formula::atom("P", &[]), Formula::atom("Q", &[]), Formula::atom("R", &[]));
        assert_eq!(f("P ∨ Q ∨ R"), Formula::or(p.clone(), Formula::or(q.clone(), r.clone())));
        assert_eq!(f("P → Q → R"), Formula::implies(p.clone(), Formula::implies(q.clone(), r)));
        assert_eq!(f("¬ P ∧ Q"), Formula::and(Formula::not(p.clone()), q.clone()));
        assert_eq!(f("P ↔ Q ∨ P"), Formula::iff(p.clone(), Formula::or(q, p)));
    }

    #[test]
    fn quantifier_body_is_maximal() {
        let got = f("∀ x : obj, P x → Q x");
        assert!(matches!(got, Formula::Forall(_, ref b) if matches!(**b, Formula::Implies(..))));
        let grouped = f("∀ (x : obj) (y : obj), R x y");
        assert_eq!(grouped, f("∀ x y : obj, R x y"));
        let Formula::Forall(_, inner) = grouped else { panic!() };
        let Formula::Forall(_, body) = *inner else { panic!() };
        assert_eq!(*body, Formula::Atom(sym("R"), vec![Term::Var(1), Term::Var(0)]));
    }

    #[test]
    fn ascii_aliases() {
        assert_eq!(f("forall x : obj, ~ P x /\\ Q \\/ R -> S <-> T"), f("∀ x : obj, ¬ P x ∧ Q ∨ R → S ↔ T"));
    }

    #[test]
    fn equality_and_numerals_parse() {
        assert_eq!(
            f("weight Bob = 86"),
            Formula::Equals(vec![Term::constant("weight"), Term::constant("Bob")], vec![Term::Numeral(86)])
        );
    }

    #[test]
    fn formula_errors_carry_spans() {
        let e = parse_formula("P ∧").unwrap_err();
        assert_eq!(e.span.start, "P ∧".len());
        let e = parse_formula("P ∧ (Q").unwrap_err();
        assert!(e.message.contains("`)`"), "{}", e.message);
    }

    #[test]
    fn proof_terms() {
        let t = parse_proof_term("R3 Cow (and.intro H1 H2)").unwrap();
        assert_eq!(
            t,
            ProofTerm::App(
                Box::new(ProofTerm::name("R3")),
                vec![
                    ProofTerm::name("Cow"),
                    ProofTerm::AndIntro(Box::new(ProofTerm::name("H1")), Box::new(ProofTerm::name("H2")))
                ]
            )
        );
        assert_eq!(
            parse_proof_term("A6 (or.inr h)").unwrap(),
            ProofTerm::App(Box::new(ProofTerm::name("A6")), vec![ProofTerm::OrInr(Box::new(ProofTerm::name("h")))])
        );
        assert!(parse_proof_term("and.intro H1").is_err());
    }

    #[test]
    fn tactic_forms() {
        assert_eq!(parse_tactic("intro h").unwrap(), Tactic::Intro(Some(sym("h"))));
        assert_eq!(parse_tactic("from A1").unwrap(), Tactic::Exact(ProofTerm::name("A1")));
        assert_eq!(
            parse_tactic("have temp := A2 sea_eel h").unwrap(),
            Tactic::Have {
                name: Some(sym("temp")),
                formula: None,
                proof: Some(ProofTerm::App(
                    Box::new(ProofTerm::name("A2")),
                    vec![ProofTerm::name("sea_eel"), ProofTerm::name("h")]
                )),
            }
        );
        assert_eq!(
            parse_tactic("cases h with a b").unwrap(),
            Tactic::Cases {
                target: ProofTerm::name("h"),
                names: vec![sym("a"), sym("b")]
            }
        );
        assert_eq!(parse_tactic("ring").unwrap(), Tactic::Opaque("ring".into()));
        assert_eq!(parse_tactic("simp at h ⊢").unwrap(), Tactic::Opaque("simp at h ⊢".into()));
    }

    #[test]
    fn have_from_form() {
        let s = parse_script("begin have h1 : ¬ P, from A1, contradiction end").unwrap();
        assert_eq!(s.items.len(), 2);
        let ScriptItem::Tactic(Tactic::Have { proof, formula, .. }, _) = &s.items[0] else { panic!() };
        assert_eq!(proof, &Some(ProofTerm::name("A1")));
        assert_eq!(formula, &Some(Formula::not(Formula::atom("P", &[]))));
    }

    #[test]
    fn nested_blocks() {
        let s = parse_script("begin cases h, { left, assumption, }, { right, assumption } end").unwrap();
        assert_eq!(s.items.len(), 3);
        assert!(matches!(&s.items[1], ScriptItem::Block(b, _) if b.len() == 2));
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn script_errors() {
        assert!(parse_script("begin end").is_err());
        assert!(parse_script("").is_err());
        assert!(parse_script("begin { split end").is_err());
        let e = parse_theory_unchecked("constant obj : Type\nconstant P : Prop\ntheorem t : P := begin").unwrap_err();
        assert!(e.message.contains("end of input"), "{}", e.message);
    }

    #[test]
    fn declarations_and_comments() {
        let src = "universe u\n\nconstant obj : Type u\nconstant Cat Cow : obj\n\
                   constant Likes : obj → obj → Prop\n-- the cat\naxiom T1 : Likes Cat Cow\n-- The answer is True\n";
        let t = parse_theory_unchecked(src).unwrap();
        assert_eq!(t.decls().len(), 5);
        assert_eq!(t.get("Cow").unwrap().kind, DeclKind::Constant { sort: sym("obj") });
        assert_eq!(t.predicate_args("Likes").unwrap().len(), 2);
        assert_eq!(t.get("T1").unwrap().comments, vec!["the cat".to_string()]);
        assert_eq!(t.trailing_comments, vec!["The answer is True".to_string()]);
    }

    #[test]
    fn implicit_binder_sort_resolves_with_single_sort() {
        let t = parse_theory_unchecked("constant obj : Type\nconstant P : obj → Prop\naxiom A : ∀ x, P x").unwrap();
        assert_eq!(t.axiom("A").unwrap(), &Formula::forall("x", "obj", Formula::Atom(sym("P"), vec![Term::Var(0)])));
    }

    #[test]
    fn prose_after_end_warns() {
        let src = "constant P : Prop\naxiom A : P\ntheorem t : P :=\nbegin\n  exact A,\nend\n\nThat settles it.\n\naxiom B : P\n";
        let t = parse_theory_unchecked(src).unwrap();
        assert_eq!(t.warnings.len(), 1);
        assert!(t.get("B").is_some());
    }

    #[test]
    fn stray_character_is_an_error_outside_prose() {
        let e = parse_theory_unchecked("constant P : Prop\naxiom A : P @").unwrap_err();
        assert_eq!(e.span.start, 30);
    }

    #[test]
    fn nfc_normalisation_makes_compositions_equal() {
        let composed = parse_formula("P\u{00e9}").unwrap();
        let decomposed = parse_formula("Pe\u{0301}").unwrap();
        assert_eq!(composed, decomposed);
    }
}
