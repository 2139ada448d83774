use crate::abstraction::bracket;
use crate::kernel::{Const, Context, Mode, Signature, Term, Type, Var, typecheck};
use crate::logic::Formula;
use crate::proof::{
    AxiomInstance, AxiomName, Justification, ParamKind, ParamValue, ProofLine, ProofScript,
    RuleName,
};
use crate::verify::RelTable;

use super::lex::{Lexer, ParseError, Span, Tok};

/// Context-value bindings and relation truth tables for the verifier.
#[derive(Debug, Clone, Default)]
pub struct Bindings {
    pub values: Vec<(String, Term)>,
    pub rels: RelTable,
}

struct Parser<'a> {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    sig: &'a Signature,
    /// Innermost binding last; lookup scans from the end.
    scope: Vec<Var>,
}

impl<'a> Parser<'a> {
    fn new(sig: &'a Signature, input: &str) -> Result<Parser<'a>, ParseError> {
        Ok(Parser {
            toks: Lexer::tokenize(input)?,
            pos: 0,
            sig,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        if self.pos + 1 < self.toks.len() {
            &self.toks[self.pos + 1].0
        } else {
            &Tok::Eof
        }
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.err(format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.span(), message)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.err(format!("expected an identifier, found {}", other.describe()))),
        }
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Nat(n) => {
                self.next();
                Ok(n)
            }
            ref other => Err(self.err(format!("expected a number, found {}", other.describe()))),
        }
    }

    /// Deduplicated typing context from the scope, innermost binding wins.
    fn typing_context(&self) -> Context {
        let mut ctx = Context::new();
        let mut seen: Vec<&str> = Vec::new();
        for v in self.scope.iter().rev() {
            if !seen.contains(&v.name.as_str()) {
                seen.push(&v.name);
                let _ = ctx.push(v.clone());
            }
        }
        ctx
    }

    fn lookup_scope(&self, name: &str) -> Option<&Var> {
        self.scope.iter().rev().find(|v| v.name == name)
    }

    // ---- types ----

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.ty_postfix()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.ty()?;
            Ok(Type::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    /// A type without a top-level arrow; used where an arrow would be
    /// ambiguous (atom annotations). Arrows need parentheses there.
    fn ty_postfix(&mut self) -> Result<Type, ParseError> {
        let mut t = self.ty_atom()?;
        while self.eat(&Tok::Star) {
            t = Type::star(t);
        }
        Ok(t)
    }

    fn ty_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let t = self.ty()?;
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(s) if s == self.sig.ground_name() => {
                self.next();
                Ok(Type::Ground)
            }
            Tok::Ident(s) => Err(self.err(format!(
                "unknown type name `{s}` (the ground type is `{}`)",
                self.sig.ground_name()
            ))),
            other => Err(self.err(format!("expected a type, found {}", other.describe()))),
        }
    }

    // ---- terms ----

    fn bracket_indices(&mut self, n: usize) -> Result<Vec<Type>, ParseError> {
        self.expect(&Tok::LBracket)?;
        let mut out = Vec::new();
        for i in 0..n {
            if i > 0 {
                self.expect(&Tok::Comma)?;
            }
            out.push(self.ty()?);
        }
        self.expect(&Tok::RBracket)?;
        Ok(out)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let mut t = self.term()?;
                while !self.eat(&Tok::RParen) {
                    let a = self.term()?;
                    t = Term::app(t, a);
                }
                Ok(t)
            }
            Tok::Backslash => {
                // \x:T, y:U. body  expands through bracket abstraction.
                self.next();
                let mut binders = Vec::new();
                loop {
                    let name = self.ident()?;
                    self.expect(&Tok::Colon)?;
                    let ty = self.ty()?;
                    binders.push(Var::new(name, ty));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
                self.expect(&Tok::Dot)?;
                let depth = self.scope.len();
                self.scope.extend(binders.iter().cloned());
                let body = self.term();
                self.scope.truncate(depth);
                let body = body?;
                Ok(binders
                    .iter()
                    .rev()
                    .fold(body, |acc, x| bracket(x, &acc)))
            }
            Tok::Nat(n) => {
                if self.sig.mode != Mode::Arithmetic {
                    return Err(self.err("numerals require arithmetic mode"));
                }
                self.next();
                Ok(Term::numeral(n))
            }
            Tok::Zero => {
                self.next();
                Ok(Term::Const(Const::Zero))
            }
            Tok::Suc => {
                self.next();
                Ok(Term::Const(Const::Succ))
            }
            Tok::Pi => {
                self.next();
                let mut ix = self.bracket_indices(2)?;
                let second = ix.pop().unwrap();
                let first = ix.pop().unwrap();
                Ok(Term::Const(Const::Pi { first, second }))
            }
            Tok::Sig => {
                self.next();
                let mut ix = self.bracket_indices(3)?;
                let c = ix.pop().unwrap();
                let b = ix.pop().unwrap();
                let a = ix.pop().unwrap();
                Ok(Term::Const(Const::Sigma { a, b, c }))
            }
            Tok::Set => {
                self.next();
                let mut ix = self.bracket_indices(1)?;
                Ok(Term::Const(Const::Sing(ix.pop().unwrap())))
            }
            Tok::Cup => {
                self.next();
                let mut ix = self.bracket_indices(1)?;
                Ok(Term::Const(Const::Cup(ix.pop().unwrap())))
            }
            Tok::Bigcup => {
                self.next();
                let mut ix = self.bracket_indices(2)?;
                let to = ix.pop().unwrap();
                let from = ix.pop().unwrap();
                Ok(Term::Const(Const::BigCup { from, to }))
            }
            Tok::Rec => {
                self.next();
                let mut ix = self.bracket_indices(1)?;
                Ok(Term::Const(Const::Rec(ix.pop().unwrap())))
            }
            Tok::Ident(name) => {
                self.next();
                if let Some(v) = self.lookup_scope(&name) {
                    return Ok(Term::Var(v.clone()));
                }
                if let Some(c) = self.sig.lookup_term_symbol(&name) {
                    return Ok(Term::Const(c));
                }
                Err(self.err(format!("unbound name `{name}`")))
            }
            other => Err(self.err(format!("expected a term, found {}", other.describe()))),
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if matches!(self.peek(), Tok::All | Tok::Ex) {
            return self.quantified();
        }
        self.implication()
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let universal = match self.next() {
            Tok::All => true,
            Tok::Ex => false,
            _ => unreachable!(),
        };
        let name = self.ident()?;
        if self.eat(&Tok::Colon) {
            let ty = self.ty()?;
            self.expect(&Tok::Dot)?;
            let v = Var::new(name, ty);
            self.scope.push(v.clone());
            let body = self.formula();
            self.scope.pop();
            let body = body?;
            Ok(if universal {
                Formula::forall(v, body)
            } else {
                Formula::exists(v, body)
            })
        } else if self.eat(&Tok::In) {
            let bound_span = self.span();
            let bound = self.term()?;
            let ctx = self.typing_context();
            let bound_ty = typecheck(self.sig, &ctx, &bound)
                .map_err(|e| ParseError::new(bound_span, e.to_string()))?;
            let elem = match bound_ty {
                Type::Star(e) => *e,
                other => {
                    return Err(ParseError::new(
                        bound_span,
                        format!(
                            "quantifier bound must have a star type, got {}",
                            other.show(self.sig.ground_name())
                        ),
                    ))
                }
            };
            self.expect(&Tok::Dot)?;
            let v = Var::new(name, elem);
            self.scope.push(v.clone());
            let body = self.formula();
            self.scope.pop();
            let body = body?;
            Ok(if universal {
                Formula::bforall(v, bound, body)
            } else {
                Formula::bexists(v, bound, body)
            })
        } else {
            Err(self.err("expected `:` or `in` after the bound variable"))
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(Formula::imp(lhs, rhs))
        } else if self.eat(&Tok::Iff) {
            let rhs = if matches!(self.peek(), Tok::All | Tok::Ex) {
                self.quantified()?
            } else {
                self.disjunction()?
            };
            // Biconditional sugar: stored as the two implications.
            Ok(Formula::and(
                Formula::imp(lhs.clone(), rhs.clone()),
                Formula::imp(rhs, lhs),
            ))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            if matches!(self.peek(), Tok::All | Tok::Ex) {
                let rhs = self.quantified()?;
                lhs = Formula::or(lhs, rhs);
                break;
            }
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            if matches!(self.peek(), Tok::All | Tok::Ex) {
                let rhs = self.quantified()?;
                lhs = Formula::and(lhs, rhs);
                break;
            }
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Tilde) {
            let inner = self.unary()?;
            return Ok(Formula::neg(inner));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bot => {
                self.next();
                Ok(Formula::Bot)
            }
            Tok::Ident(name)
                if self.sig.rel_arity(&name).is_some() && *self.peek2() == Tok::LParen =>
            {
                self.next();
                self.expect(&Tok::LParen)?;
                let mut args = Vec::new();
                if !self.eat(&Tok::RParen) {
                    loop {
                        args.push(self.term()?);
                        if self.eat(&Tok::RParen) {
                            break;
                        }
                        self.expect(&Tok::Comma)?;
                    }
                }
                Ok(Formula::Rel(name, args))
            }
            Tok::LParen => {
                // Could be a parenthesized term starting an atom, or a
                // parenthesized formula. Try the atom first, rewind on
                // failure.
                let save = self.pos;
                match self.atom() {
                    Ok(f) => Ok(f),
                    Err(_) => {
                        self.pos = save;
                        self.expect(&Tok::LParen)?;
                        let f = self.formula()?;
                        self.expect(&Tok::RParen)?;
                        Ok(f)
                    }
                }
            }
            _ => self.atom(),
        }
    }

    /// `t = u : rho` or `t in u : rho`; the annotation is a postfix type
    /// (parenthesize arrows).
    fn atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let is_eq = match self.next() {
            Tok::Eq => true,
            Tok::In => false,
            other => {
                return Err(self.err(format!(
                    "expected `=` or `in` in an atom, found {}",
                    other.describe()
                )))
            }
        };
        let rhs = self.term()?;
        self.expect(&Tok::Colon)?;
        let rho = self.ty_postfix()?;
        Ok(if is_eq {
            Formula::Eq(rho, lhs, rhs)
        } else {
            Formula::Mem(rho, lhs, rhs)
        })
    }

    // ---- contexts, files ----

    fn var_decl(&mut self) -> Result<Var, ParseError> {
        let name = self.ident()?;
        self.expect(&Tok::Colon)?;
        let ty = self.ty()?;
        Ok(Var::new(name, ty))
    }

    fn context_header(&mut self) -> Result<Context, ParseError> {
        let mut ctx = Context::new();
        if self.eat(&Tok::Context) {
            loop {
                let span = self.span();
                let v = self.var_decl()?;
                ctx.push(v)
                    .map_err(|e| ParseError::new(span, e.to_string()))?;
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::Semi)?;
        }
        Ok(ctx)
    }

    fn eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.err(format!("trailing input: {}", self.peek().describe())))
        }
    }

    // ---- proof scripts ----

    fn axiom_params(&mut self, name: AxiomName) -> Result<Vec<ParamValue>, ParseError> {
        let spec = name.params();
        self.expect(&Tok::LBrace)?;
        let depth = self.scope.len();
        let mut out = Vec::new();
        for (i, (key, kind)) in spec.iter().enumerate() {
            if i > 0 {
                self.expect(&Tok::Semi)?;
            }
            let got = self.ident()?;
            if got != *key {
                self.scope.truncate(depth);
                return Err(self.err(format!(
                    "axiom {} expects parameter `{key}` here (parameters are given in a fixed order), found `{got}`",
                    name.as_str()
                )));
            }
            self.expect(&Tok::Assign)?;
            match kind {
                ParamKind::Var => {
                    let v = self.var_decl()?;
                    self.scope.push(v.clone());
                    out.push(ParamValue::Var(v));
                }
                ParamKind::Term => {
                    let t = self.term()?;
                    out.push(ParamValue::Term(t));
                }
                ParamKind::Formula => {
                    let f = self.formula()?;
                    out.push(ParamValue::Formula(f));
                }
            }
        }
        self.scope.truncate(depth);
        self.expect(&Tok::RBrace)?;
        Ok(out)
    }

    fn justification(&mut self) -> Result<Justification, ParseError> {
        match self.next() {
            Tok::Axiom => {
                let name_span = self.span();
                let name_str = self.ident()?;
                let name = AxiomName::from_str(&name_str).ok_or_else(|| {
                    ParseError::new(name_span, format!("unknown axiom `{name_str}`"))
                })?;
                let params = self.axiom_params(name)?;
                Ok(Justification::Axiom(AxiomInstance { name, params }))
            }
            Tok::Rule => {
                let name_span = self.span();
                let name_str = self.ident()?;
                let name = RuleName::from_str(&name_str).ok_or_else(|| {
                    ParseError::new(name_span, format!("unknown rule `{name_str}`"))
                })?;
                self.expect(&Tok::From)?;
                let mut premises = vec![self.nat()? as usize];
                while self.eat(&Tok::Comma) {
                    premises.push(self.nat()? as usize);
                }
                Ok(Justification::Rule { name, premises })
            }
            Tok::Assumption => {
                let name = self.ident()?;
                Ok(Justification::Assumption(name))
            }
            other => Err(self.err(format!(
                "expected `axiom`, `rule` or `assumption`, found {}",
                other.describe()
            ))),
        }
    }

    fn proof(&mut self) -> Result<ProofScript, ParseError> {
        let context = self.context_header()?;
        self.scope = context.vars().to_vec();
        let mut assumptions = Vec::new();
        while self.eat(&Tok::Assume) {
            let name = self.ident()?;
            self.expect(&Tok::Colon)?;
            let f = self.formula()?;
            self.expect(&Tok::Semi)?;
            assumptions.push((name, f));
        }
        let mut lines = Vec::new();
        while *self.peek() != Tok::Eof {
            let number = self.nat()? as usize;
            self.expect(&Tok::RParen)?;
            let formula = self.formula()?;
            self.expect(&Tok::By)?;
            let just = self.justification()?;
            lines.push(ProofLine {
                number,
                formula,
                just,
            });
        }
        Ok(ProofScript {
            context,
            assumptions,
            lines,
        })
    }
}

/// Parses a type against the signature's ground-type name.
pub fn parse_type_str(sig: &Signature, input: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(sig, input)?;
    let t = p.ty()?;
    p.eof()?;
    Ok(t)
}

/// Parses a term whose free variables come from `ctx`.
pub fn parse_term_str(sig: &Signature, ctx: &Context, input: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(sig, input)?;
    p.scope = ctx.vars().to_vec();
    let t = p.term()?;
    p.eof()?;
    Ok(t)
}

/// Parses a formula whose free variables come from `ctx`.
pub fn parse_formula_str(
    sig: &Signature,
    ctx: &Context,
    input: &str,
) -> Result<Formula, ParseError> {
    let mut p = Parser::new(sig, input)?;
    p.scope = ctx.vars().to_vec();
    let f = p.formula()?;
    p.eof()?;
    Ok(f)
}

/// Term file: optional `context x:T, ...;` header, then one term.
pub fn parse_term_file(sig: &Signature, input: &str) -> Result<(Context, Term), ParseError> {
    let mut p = Parser::new(sig, input)?;
    let ctx = p.context_header()?;
    p.scope = ctx.vars().to_vec();
    let t = p.term()?;
    p.eof()?;
    Ok((ctx, t))
}

/// Formula file: optional context header, then one formula.
pub fn parse_formula_file(sig: &Signature, input: &str) -> Result<(Context, Formula), ParseError> {
    let mut p = Parser::new(sig, input)?;
    let ctx = p.context_header()?;
    p.scope = ctx.vars().to_vec();
    let f = p.formula()?;
    p.eof()?;
    Ok((ctx, f))
}

/// Signature file: `mode logic;` or `mode arithmetic;` first, then
/// `const name : type;`, `fun name / arity;`, `rel name / arity;`.
pub fn parse_signature_file(input: &str) -> Result<Signature, ParseError> {
    // The ground-type name depends on the mode, so scan the mode first with
    // a placeholder signature.
    let placeholder = Signature::arithmetic();
    let mut p = Parser::new(&placeholder, input)?;
    p.expect(&Tok::Mode)?;
    let mode_span = p.span();
    let mode = match p.next() {
        Tok::Logic => Mode::Logic,
        Tok::Arithmetic => Mode::Arithmetic,
        other => {
            return Err(ParseError::new(
                mode_span,
                format!("expected `logic` or `arithmetic`, found {}", other.describe()),
            ))
        }
    };
    p.expect(&Tok::Semi)?;
    // Re-lex with a signature of the right mode for ground-name resolution.
    let sig_for_types = match mode {
        Mode::Arithmetic => Signature::arithmetic(),
        Mode::Logic => Signature::new(mode, vec![("_g".into(), Type::Ground)], vec![], vec![])
            .expect("placeholder"),
    };
    let rest_pos = p.pos;
    let toks = p.toks.clone();
    let mut p = Parser {
        toks,
        pos: rest_pos,
        sig: &sig_for_types,
        scope: Vec::new(),
    };
    let mut consts = Vec::new();
    let mut funs = Vec::new();
    let mut rels = Vec::new();
    let header_span = p.span();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::ConstKw => {
                p.next();
                let name = p.ident()?;
                p.expect(&Tok::Colon)?;
                let ty = p.ty()?;
                p.expect(&Tok::Semi)?;
                consts.push((name, ty));
            }
            Tok::Fun => {
                p.next();
                let name = p.ident()?;
                p.expect(&Tok::Slash)?;
                let arity = p.nat()? as usize;
                p.expect(&Tok::Semi)?;
                funs.push((name, arity));
            }
            Tok::Rel => {
                p.next();
                let name = p.ident()?;
                p.expect(&Tok::Slash)?;
                let arity = p.nat()? as usize;
                p.expect(&Tok::Semi)?;
                rels.push((name, arity));
            }
            other => {
                return Err(p.err(format!(
                    "expected `const`, `fun` or `rel`, found {}",
                    other.describe()
                )))
            }
        }
    }
    Signature::new(mode, consts, funs, rels)
        .map_err(|e| ParseError::new(header_span, e.to_string()))
}

/// Proof script file.
pub fn parse_proof_file(sig: &Signature, input: &str) -> Result<ProofScript, ParseError> {
    let mut p = Parser::new(sig, input)?;
    p.proof()
}

/// Bindings file: `bind x := term;` entries and `table P := (1) (2,3);`
/// truth tables, in any order. Bound terms must be closed.
pub fn parse_bindings_file(sig: &Signature, input: &str) -> Result<Bindings, ParseError> {
    let mut p = Parser::new(sig, input)?;
    let mut out = Bindings::default();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Bind => {
                p.next();
                let name = p.ident()?;
                p.expect(&Tok::Assign)?;
                let t = p.term()?;
                p.expect(&Tok::Semi)?;
                out.values.push((name, t));
            }
            Tok::Table => {
                p.next();
                let name = p.ident()?;
                p.expect(&Tok::Assign)?;
                let mut rows = Vec::new();
                while p.eat(&Tok::LParen) {
                    let mut row = vec![p.nat()?];
                    while p.eat(&Tok::Comma) {
                        row.push(p.nat()?);
                    }
                    p.expect(&Tok::RParen)?;
                    rows.push(row);
                }
                p.expect(&Tok::Semi)?;
                out.rels.insert(name, rows);
            }
            other => {
                return Err(p.err(format!(
                    "expected `bind` or `table`, found {}",
                    other.describe()
                )))
            }
        }
    }
    Ok(out)
}
