//! Types, signatures, terms and the typing relation of the star combinatory
//! calculus. Everything here is immutable once constructed; all operations
//! are pure functions.

use std::fmt;
use thiserror::Error;

/// Finite types over a single ground type, closed under arrows and the
/// star (finite nonempty set) former.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Ground,
    Arrow(Box<Type>, Box<Type>),
    Star(Box<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn star(elem: Type) -> Type {
        Type::Star(Box::new(elem))
    }

    /// Builds `a1 -> a2 -> ... -> tail`.
    pub fn arrows(args: &[Type], tail: Type) -> Type {
        args.iter()
            .rev()
            .fold(tail, |acc, a| Type::arrow(a.clone(), acc))
    }

    /// Unique decomposition `s1 -> ... -> sn -> rho` with `rho` ground or star.
    pub fn decompose(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Type::Arrow(a, b) = cur {
            args.push(a.as_ref());
            cur = b.as_ref();
        }
        (args, cur)
    }

    /// True iff the type has the shape `r1 -> ... -> rn -> tau*` (n >= 0).
    pub fn is_end_star(&self) -> bool {
        matches!(self.decompose().1, Type::Star(_))
    }

    /// Element type when `self` is `tau*`.
    pub fn star_elem(&self) -> Option<&Type> {
        match self {
            Type::Star(e) => Some(e),
            _ => None,
        }
    }

    /// Renders the type with the given ground-type name (`G` or `N`).
    pub fn show(&self, ground: &str) -> String {
        fn go(t: &Type, ground: &str, out: &mut String, arrow_ctx: bool) {
            match t {
                Type::Ground => out.push_str(ground),
                Type::Star(e) => {
                    let needs = matches!(e.as_ref(), Type::Arrow(..));
                    if needs {
                        out.push('(');
                    }
                    go(e, ground, out, false);
                    if needs {
                        out.push(')');
                    }
                    out.push('*');
                }
                Type::Arrow(a, b) => {
                    if arrow_ctx {
                        out.push('(');
                    }
                    let left_needs = matches!(a.as_ref(), Type::Arrow(..));
                    go(a, ground, out, left_needs);
                    out.push_str("->");
                    go(b, ground, out, false);
                    if arrow_ctx {
                        out.push(')');
                    }
                }
            }
        }
        let mut s = String::new();
        go(self, ground, &mut s, false);
        s
    }
}

/// Whether the signature speaks pure first-order logic (ground type `G`)
/// or arithmetic (ground type `N` with `0`, `S` and the recursors).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Logic,
    Arithmetic,
}

impl Mode {
    pub fn ground_name(self) -> &'static str {
        match self {
            Mode::Logic => "G",
            Mode::Arithmetic => "N",
        }
    }
}

/// First-order signature lifted to all finite types. In arithmetic mode the
/// term language is fixed (zero, successor, recursors); declared constants
/// and function symbols are only admitted in logic mode so that the
/// normal-form shape theorems stay true.
#[derive(Debug, Clone)]
pub struct Signature {
    pub mode: Mode,
    consts: Vec<(String, Type)>,
    funs: Vec<(String, usize)>,
    rels: Vec<(String, usize)>,
}

#[derive(Debug, Error)]
pub enum SignatureError {
    #[error("duplicate symbol `{0}`")]
    Duplicate(String),
    #[error("arithmetic mode fixes the term language; `{0}` cannot be declared")]
    ArithmeticTermSymbol(String),
    #[error("logic mode requires at least one constant of ground type")]
    NoGroundConstant,
    #[error("constant `{0}` must have a first-order type (ground arguments and result)")]
    NonFirstOrderConst(String),
}

fn is_first_order(ty: &Type) -> bool {
    let (args, tail) = ty.decompose();
    *tail == Type::Ground && args.iter().all(|a| **a == Type::Ground)
}

impl Signature {
    pub fn new(
        mode: Mode,
        consts: Vec<(String, Type)>,
        funs: Vec<(String, usize)>,
        rels: Vec<(String, usize)>,
    ) -> Result<Signature, SignatureError> {
        let mut seen: Vec<&str> = Vec::new();
        for name in consts
            .iter()
            .map(|(n, _)| n)
            .chain(funs.iter().map(|(n, _)| n))
            .chain(rels.iter().map(|(n, _)| n))
        {
            if seen.contains(&name.as_str()) {
                return Err(SignatureError::Duplicate(name.clone()));
            }
            seen.push(name);
        }
        if mode == Mode::Arithmetic && (!consts.is_empty() || !funs.is_empty()) {
            let name = consts
                .first()
                .map(|(n, _)| n.clone())
                .or_else(|| funs.first().map(|(n, _)| n.clone()))
                .unwrap();
            return Err(SignatureError::ArithmeticTermSymbol(name));
        }
        if let Some((n, _)) = consts.iter().find(|(_, t)| !is_first_order(t)) {
            return Err(SignatureError::NonFirstOrderConst(n.clone()));
        }
        let sig = Signature {
            mode,
            consts,
            funs,
            rels,
        };
        if mode == Mode::Logic && sig.first_ground_constant().is_none() {
            return Err(SignatureError::NoGroundConstant);
        }
        Ok(sig)
    }

    pub fn pure_logic(consts: &[&str]) -> Signature {
        Signature::new(
            Mode::Logic,
            consts
                .iter()
                .map(|c| (c.to_string(), Type::Ground))
                .collect(),
            Vec::new(),
            Vec::new(),
        )
        .expect("valid test signature")
    }

    pub fn arithmetic() -> Signature {
        Signature::new(Mode::Arithmetic, Vec::new(), Vec::new(), Vec::new())
            .expect("arithmetic signature")
    }

    pub fn ground_name(&self) -> &'static str {
        self.mode.ground_name()
    }

    pub fn const_type(&self, name: &str) -> Option<&Type> {
        self.consts.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn fun_arity(&self, name: &str) -> Option<usize> {
        self.funs.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn rel_arity(&self, name: &str) -> Option<usize> {
        self.rels.iter().find(|(n, _)| n == name).map(|(_, a)| *a)
    }

    pub fn consts(&self) -> &[(String, Type)] {
        &self.consts
    }

    pub fn funs(&self) -> &[(String, usize)] {
        &self.funs
    }

    pub fn rels(&self) -> &[(String, usize)] {
        &self.rels
    }

    /// First declared constant of ground type, or a 0-ary function symbol.
    pub fn first_ground_constant(&self) -> Option<Const> {
        if self.mode == Mode::Arithmetic {
            return Some(Const::Zero);
        }
        for (n, t) in &self.consts {
            if *t == Type::Ground {
                return Some(Const::User {
                    name: n.clone(),
                    ty: t.clone(),
                });
            }
        }
        self.funs.iter().find(|(_, a)| *a == 0).map(|(n, _)| Const::User {
            name: n.clone(),
            ty: Type::Ground,
        })
    }

    /// Type of a declared symbol used in term position.
    pub fn lookup_term_symbol(&self, name: &str) -> Option<Const> {
        if let Some(t) = self.const_type(name) {
            return Some(Const::User {
                name: name.to_string(),
                ty: t.clone(),
            });
        }
        if let Some(arity) = self.fun_arity(name) {
            let ty = Type::arrows(&vec![Type::Ground; arity], Type::Ground);
            return Some(Const::User {
                name: name.to_string(),
                ty,
            });
        }
        None
    }

    /// Canonical closed inhabitant of a type: the first ground constant at
    /// ground type, a singleton at star types, a constant function at arrows.
    pub fn inhabit(&self, ty: &Type) -> Term {
        match ty {
            Type::Ground => Term::Const(
                self.first_ground_constant()
                    .expect("signature provides a ground constant"),
            ),
            Type::Star(e) => Term::app(
                Term::Const(Const::Sing(e.as_ref().clone())),
                self.inhabit(e),
            ),
            Type::Arrow(a, b) => Term::app(
                Term::Const(Const::Pi {
                    first: b.as_ref().clone(),
                    second: a.as_ref().clone(),
                }),
                self.inhabit(b),
            ),
        }
    }
}

/// Constants of the calculus. Combinator, star and arithmetic constants
/// carry their type indices explicitly; declared symbols carry their type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Const {
    /// `PI[s,t] : s -> t -> s`
    Pi { first: Type, second: Type },
    /// `SIG[r,s,t] : (r -> s -> t) -> (r -> s) -> r -> t`
    Sigma { a: Type, b: Type, c: Type },
    /// `SET[s] : s -> s*`
    Sing(Type),
    /// `CUP[s] : s* -> s* -> s*`
    Cup(Type),
    /// `BIGCUP[s,t] : s* -> (s -> t*) -> t*`
    BigCup { from: Type, to: Type },
    /// `ZERO : N`
    Zero,
    /// `SUC : N -> N`
    Succ,
    /// `REC[s] : N -> s -> (s -> N -> s) -> s`
    Rec(Type),
    /// Declared constant or function symbol.
    User { name: String, ty: Type },
}

impl Const {
    /// The schema type instantiated at the constant's indices.
    pub fn ty(&self) -> Type {
        match self {
            Const::Pi { first, second } => Type::arrow(
                first.clone(),
                Type::arrow(second.clone(), first.clone()),
            ),
            Const::Sigma { a, b, c } => Type::arrow(
                Type::arrow(a.clone(), Type::arrow(b.clone(), c.clone())),
                Type::arrow(
                    Type::arrow(a.clone(), b.clone()),
                    Type::arrow(a.clone(), c.clone()),
                ),
            ),
            Const::Sing(s) => Type::arrow(s.clone(), Type::star(s.clone())),
            Const::Cup(s) => Type::arrow(
                Type::star(s.clone()),
                Type::arrow(Type::star(s.clone()), Type::star(s.clone())),
            ),
            Const::BigCup { from, to } => Type::arrow(
                Type::star(from.clone()),
                Type::arrow(
                    Type::arrow(from.clone(), Type::star(to.clone())),
                    Type::star(to.clone()),
                ),
            ),
            Const::Zero => Type::Ground,
            Const::Succ => Type::arrow(Type::Ground, Type::Ground),
            Const::Rec(s) => Type::arrow(
                Type::Ground,
                Type::arrow(
                    s.clone(),
                    Type::arrow(
                        Type::arrow(s.clone(), Type::arrow(Type::Ground, s.clone())),
                        s.clone(),
                    ),
                ),
            ),
            Const::User { ty, .. } => ty.clone(),
        }
    }

    /// True for constants only available in arithmetic mode.
    pub fn is_arithmetic(&self) -> bool {
        matches!(self, Const::Zero | Const::Succ | Const::Rec(_))
    }
}

/// Typed variable. Identity is the pair (name, type).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Var {
    pub name: String,
    pub ty: Type,
}

impl Var {
    pub fn new(name: impl Into<String>, ty: Type) -> Var {
        Var {
            name: name.into(),
            ty,
        }
    }
}

/// Binder-free terms: constants, variables and applications.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Const(Const),
    Var(Var),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn var(name: impl Into<String>, ty: Type) -> Term {
        Term::Var(Var::new(name, ty))
    }

    /// Head and argument list of the application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(a.as_ref());
            cur = f.as_ref();
        }
        args.reverse();
        (cur, args)
    }

    /// Numeral `S ... S 0` with n successors.
    pub fn numeral(n: u64) -> Term {
        let mut t = Term::Const(Const::Zero);
        for _ in 0..n {
            t = Term::app(Term::Const(Const::Succ), t);
        }
        t
    }

    /// Decodes a numeral spine, if the term is one.
    pub fn as_numeral_literal(&self) -> Option<u64> {
        let mut n = 0u64;
        let mut cur = self;
        loop {
            match cur {
                Term::Const(Const::Zero) => return Some(n),
                Term::App(f, a) if matches!(f.as_ref(), Term::Const(Const::Succ)) => {
                    n += 1;
                    cur = a.as_ref();
                }
                _ => return None,
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::App(f, a) => f.is_closed() && a.is_closed(),
        }
    }

    pub fn free_vars(&self) -> Vec<Var> {
        fn go(t: &Term, acc: &mut Vec<Var>) {
            match t {
                Term::Const(_) => {}
                Term::Var(v) => {
                    if !acc.contains(v) {
                        acc.push(v.clone());
                    }
                }
                Term::App(f, a) => {
                    go(f, acc);
                    go(a, acc);
                }
            }
        }
        let mut acc = Vec::new();
        go(self, &mut acc);
        acc
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Const(_) => false,
            Term::Var(w) => w == v,
            Term::App(f, a) => f.contains_var(v) || a.contains_var(v),
        }
    }
}

/// Ordered list of typed variables; duplicate names are rejected.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context {
    vars: Vec<Var>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn of(vars: Vec<Var>) -> Result<Context, TypeError> {
        let mut ctx = Context::new();
        for v in vars {
            ctx.push(v)?;
        }
        Ok(ctx)
    }

    pub fn push(&mut self, v: Var) -> Result<(), TypeError> {
        if self.vars.iter().any(|w| w.name == v.name) {
            return Err(TypeError::ShadowedVar { name: v.name });
        }
        self.vars.push(v);
        Ok(())
    }

    pub fn extended(&self, v: Var) -> Result<Context, TypeError> {
        let mut c = self.clone();
        c.push(v)?;
        Ok(c)
    }

    pub fn lookup(&self, name: &str) -> Option<&Var> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.vars.iter().any(|w| w == v)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unbound variable `{name}`")]
    UnboundVar { name: String },
    #[error("variable `{name}` shadows an earlier declaration")]
    ShadowedVar { name: String },
    #[error("application type mismatch: expected argument of type {expected}, got {actual}")]
    AppMismatch { expected: String, actual: String },
    #[error("head of application has non-function type {ty}")]
    NotAFunction { ty: String },
    #[error("unknown constant `{name}`")]
    UnknownConst { name: String },
    #[error("arithmetic constant `{name}` is unavailable in pure-logic mode")]
    ArithmeticConstInLogicMode { name: String },
    #[error("substitution type mismatch: variable `{var}` has type {expected}, term has type {actual}")]
    SubstMismatch {
        var: String,
        expected: String,
        actual: String,
    },
}

/// Computes the unique type of `t` under `ctx`, or reports why there is none.
/// Constants in arithmetic position are rejected in logic mode.
pub fn typecheck(sig: &Signature, ctx: &Context, t: &Term) -> Result<Type, TypeError> {
    let g = sig.ground_name();
    match t {
        Term::Const(c) => {
            if sig.mode == Mode::Logic && c.is_arithmetic() {
                return Err(TypeError::ArithmeticConstInLogicMode {
                    name: format!("{c:?}"),
                });
            }
            Ok(c.ty())
        }
        Term::Var(v) => {
            if ctx.contains(v) {
                Ok(v.ty.clone())
            } else {
                Err(TypeError::UnboundVar {
                    name: v.name.clone(),
                })
            }
        }
        Term::App(f, a) => {
            let tf = typecheck(sig, ctx, f)?;
            let ta = typecheck(sig, ctx, a)?;
            match tf {
                Type::Arrow(dom, cod) => {
                    if *dom == ta {
                        Ok(*cod)
                    } else {
                        Err(TypeError::AppMismatch {
                            expected: dom.show(g),
                            actual: ta.show(g),
                        })
                    }
                }
                other => Err(TypeError::NotAFunction { ty: other.show(g) }),
            }
        }
    }
}

/// Replaces every occurrence of `x` in `t` by `s`. Terms are binder-free,
/// so no capture is possible.
pub fn subst_term(t: &Term, x: &Var, s: &Term) -> Term {
    match t {
        Term::Const(_) => t.clone(),
        Term::Var(v) => {
            if v == x {
                s.clone()
            } else {
                t.clone()
            }
        }
        Term::App(f, a) => Term::app(subst_term(f, x, s), subst_term(a, x, s)),
    }
}

/// Typed substitution entry point: checks that `s` has the type of `x`.
pub fn subst_term_checked(
    sig: &Signature,
    ctx: &Context,
    t: &Term,
    x: &Var,
    s: &Term,
) -> Result<Term, TypeError> {
    let ts = typecheck(sig, ctx, s)?;
    if ts != x.ty {
        return Err(TypeError::SubstMismatch {
            var: x.name.clone(),
            expected: x.ty.show(sig.ground_name()),
            actual: ts.show(sig.ground_name()),
        });
    }
    Ok(subst_term(t, x, s))
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Type {
        Type::Ground
    }

    #[test]
    fn constant_types_match_their_schemas() {
        let pi = Const::Pi {
            first: g(),
            second: g(),
        };
        assert_eq!(pi.ty(), Type::arrows(&[g(), g()], g()));

        let sing = Const::Sing(g());
        assert_eq!(sing.ty(), Type::arrow(g(), Type::star(g())));

        let rec = Const::Rec(g());
        assert_eq!(
            rec.ty(),
            Type::arrows(
                &[g(), g(), Type::arrows(&[g(), g()], g())],
                g()
            )
        );
    }

    #[test]
    fn typecheck_bigcup_application() {
        let sig = Signature::pure_logic(&["c"]);
        let x = Var::new("x", Type::star(g()));
        let f = Var::new("f", Type::arrow(g(), Type::star(g())));
        let ctx = Context::of(vec![x.clone(), f.clone()]).unwrap();
        let t = Term::apps(
            Term::Const(Const::BigCup { from: g(), to: g() }),
            [Term::Var(x), Term::Var(f)],
        );
        assert_eq!(typecheck(&sig, &ctx, &t).unwrap(), Type::star(g()));
    }

    #[test]
    fn typecheck_partial_application() {
        let sig = Signature::pure_logic(&["c"]);
        let t = Term::app(
            Term::Const(Const::Pi {
                first: g(),
                second: g(),
            }),
            Term::Const(Const::User {
                name: "c".into(),
                ty: g(),
            }),
        );
        assert_eq!(
            typecheck(&sig, &Context::new(), &t).unwrap(),
            Type::arrow(g(), g())
        );
    }

    #[test]
    fn typecheck_reports_domain_mismatch() {
        let sig = Signature::pure_logic(&["c"]);
        let f = Var::new("f", Type::arrow(g(), g()));
        let ctx = Context::of(vec![f.clone()]).unwrap();
        let t = Term::app(Term::Const(Const::Sing(g())), Term::Var(f));
        match typecheck(&sig, &ctx, &t) {
            Err(TypeError::AppMismatch { expected, actual }) => {
                assert_eq!(expected, "G");
                assert_eq!(actual, "G->G");
            }
            other => panic!("expected mismatch, got {other:?}"),
        }
    }

    #[test]
    fn end_star_shapes() {
        assert!(Type::star(g()).is_end_star());
        assert!(Type::arrow(g(), Type::star(g())).is_end_star());
        assert!(!Type::arrow(g(), g()).is_end_star());
        assert!(!g().is_end_star());
    }

    #[test]
    fn decompose_ends_in_ground_or_star() {
        let t = Type::arrows(
            &[g(), Type::star(g())],
            Type::star(Type::arrow(g(), g())),
        );
        let (args, tail) = t.decompose();
        assert_eq!(args.len(), 2);
        assert!(matches!(tail, Type::Star(_)));
    }

    #[test]
    fn subst_replaces_only_the_named_typed_var() {
        let sig = Signature::pure_logic(&["c"]);
        let x = Var::new("x", g());
        let y = Var::new("y", g());
        let c = Term::Const(Const::User {
            name: "c".into(),
            ty: g(),
        });
        let pi = Term::Const(Const::Pi {
            first: g(),
            second: g(),
        });
        let t = Term::apps(pi.clone(), [Term::Var(x.clone()), Term::Var(y.clone())]);
        let ctx = Context::of(vec![x.clone(), y.clone()]).unwrap();
        let r = subst_term_checked(&sig, &ctx, &t, &x, &c).unwrap();
        assert_eq!(r, Term::apps(pi, [c.clone(), Term::Var(y.clone())]));

        let idpos = subst_term(&Term::Var(x.clone()), &x, &c);
        assert_eq!(idpos, c);

        let s = Term::app(Term::Const(Const::Sing(g())), Term::Var(y.clone()));
        assert_eq!(subst_term(&s, &x, &c), s);
    }

    #[test]
    fn subst_preserves_typing() {
        let sig = Signature::pure_logic(&["c"]);
        let x = Var::new("x", g());
        let c = Term::Const(Const::User {
            name: "c".into(),
            ty: g(),
        });
        let t = Term::app(Term::Const(Const::Sing(g())), Term::Var(x.clone()));
        let ctx = Context::of(vec![x.clone()]).unwrap();
        let before = typecheck(&sig, &ctx, &t).unwrap();
        let after = typecheck(&sig, &Context::new(), &subst_term(&t, &x, &c)).unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn contexts_reject_shadowing() {
        let mut ctx = Context::new();
        ctx.push(Var::new("x", g())).unwrap();
        assert!(matches!(
            ctx.push(Var::new("x", Type::star(g()))),
            Err(TypeError::ShadowedVar { .. })
        ));
    }

    #[test]
    fn arithmetic_signature_rejects_term_symbols() {
        let err = Signature::new(
            Mode::Arithmetic,
            vec![("c".into(), Type::Ground)],
            vec![],
            vec![],
        );
        assert!(matches!(
            err,
            Err(SignatureError::ArithmeticTermSymbol(_))
        ));
    }

    #[test]
    fn numerals_round_trip() {
        assert_eq!(Term::numeral(3).as_numeral_literal(), Some(3));
        assert_eq!(Term::numeral(0).as_numeral_literal(), Some(0));
        let sig = Signature::arithmetic();
        assert_eq!(
            typecheck(&sig, &Context::new(), &Term::numeral(5)).unwrap(),
            Type::Ground
        );
    }
}
