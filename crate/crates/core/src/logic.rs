//! Formulas of the logic: formation, well-formedness diagnostics,
//! existential-freeness, capture-avoiding substitution and free variables.

use thiserror::Error;

use crate::kernel::{subst_term, Context, Signature, Term, Type, TypeError, Var, typecheck};

/// Formulas. Negation and the biconditional are parse-time sugar
/// (`~A` is `A -> bot`, `A <-> B` is the conjunction of both directions),
/// so neither has a node here.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    /// `l = r : rho` with both sides of type `rho`.
    Eq(Type, Term, Term),
    /// `e in s : rho` with `e : rho` and `s : rho*`.
    Mem(Type, Term, Term),
    /// Relational atom over ground-typed argument terms.
    Rel(String, Vec<Term>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
    /// `all x in t . A` — `t : rho*` must not contain the bound variable.
    BForall(Var, Term, Box<Formula>),
    BExists(Var, Term, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }
    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }
    pub fn forall(x: Var, a: Formula) -> Formula {
        Formula::Forall(x, Box::new(a))
    }
    pub fn exists(x: Var, a: Formula) -> Formula {
        Formula::Exists(x, Box::new(a))
    }
    pub fn bforall(x: Var, t: Term, a: Formula) -> Formula {
        Formula::BForall(x, t, Box::new(a))
    }
    pub fn bexists(x: Var, t: Term, a: Formula) -> Formula {
        Formula::BExists(x, t, Box::new(a))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Bot | Formula::Eq(..) | Formula::Mem(..) | Formula::Rel(..)
        )
    }
}

/// A well-formedness finding. Diagnostics are reported, never thrown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub at: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.at, self.message)
    }
}

#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("ill-formed formula:\n{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    IllFormed(Vec<Diagnostic>),
    #[error(transparent)]
    Type(#[from] TypeError),
}

fn check_term(
    sig: &Signature,
    ctx: &Context,
    t: &Term,
    at: &str,
    out: &mut Vec<Diagnostic>,
) -> Option<Type> {
    match typecheck(sig, ctx, t) {
        Ok(ty) => Some(ty),
        Err(e) => {
            out.push(Diagnostic {
                at: at.to_string(),
                message: e.to_string(),
            });
            None
        }
    }
}

fn well_formed_at(
    sig: &Signature,
    ctx: &Context,
    f: &Formula,
    at: &str,
    out: &mut Vec<Diagnostic>,
) {
    let g = sig.ground_name();
    match f {
        Formula::Bot => {}
        Formula::Eq(rho, l, r) => {
            let tl = check_term(sig, ctx, l, at, out);
            let tr = check_term(sig, ctx, r, at, out);
            if let (Some(tl), Some(tr)) = (tl, tr) {
                if tl != *rho || tr != *rho {
                    out.push(Diagnostic {
                        at: at.to_string(),
                        message: format!(
                            "equality annotated at {} but sides have types {} and {}",
                            rho.show(g),
                            tl.show(g),
                            tr.show(g)
                        ),
                    });
                }
            }
        }
        Formula::Mem(rho, e, s) => {
            let te = check_term(sig, ctx, e, at, out);
            let ts = check_term(sig, ctx, s, at, out);
            if let (Some(te), Some(ts)) = (te, ts) {
                if te != *rho {
                    out.push(Diagnostic {
                        at: at.to_string(),
                        message: format!(
                            "membership annotated at {} but element has type {}",
                            rho.show(g),
                            te.show(g)
                        ),
                    });
                }
                if ts != Type::star(rho.clone()) {
                    out.push(Diagnostic {
                        at: at.to_string(),
                        message: format!(
                            "membership set side must have type {}, got {}",
                            Type::star(rho.clone()).show(g),
                            ts.show(g)
                        ),
                    });
                }
            }
        }
        Formula::Rel(name, args) => match sig.rel_arity(name) {
            None => out.push(Diagnostic {
                at: at.to_string(),
                message: format!("unknown relation symbol `{name}`"),
            }),
            Some(arity) => {
                if args.len() != arity {
                    out.push(Diagnostic {
                        at: at.to_string(),
                        message: format!(
                            "relation `{name}` expects {arity} arguments, got {}",
                            args.len()
                        ),
                    });
                }
                for (i, a) in args.iter().enumerate() {
                    if let Some(ty) = check_term(sig, ctx, a, at, out) {
                        if ty != Type::Ground {
                            out.push(Diagnostic {
                                at: format!("{at}.arg{i}"),
                                message: format!(
                                    "relation arguments must be ground, got {}",
                                    ty.show(g)
                                ),
                            });
                        }
                    }
                }
            }
        },
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            well_formed_at(sig, ctx, a, &format!("{at}.l"), out);
            well_formed_at(sig, ctx, b, &format!("{at}.r"), out);
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => match ctx.extended(x.clone()) {
            Ok(ctx2) => well_formed_at(sig, &ctx2, a, &format!("{at}.body"), out),
            Err(e) => out.push(Diagnostic {
                at: at.to_string(),
                message: e.to_string(),
            }),
        },
        Formula::BForall(x, t, a) | Formula::BExists(x, t, a) => {
            if t.contains_var(x) {
                out.push(Diagnostic {
                    at: at.to_string(),
                    message: format!("bound mentions bound variable `{}`", x.name),
                });
            }
            if let Some(ts) = check_term(sig, ctx, t, at, out) {
                if ts != Type::star(x.ty.clone()) {
                    out.push(Diagnostic {
                        at: at.to_string(),
                        message: format!(
                            "quantifier bound must have type {}, got {}",
                            Type::star(x.ty.clone()).show(g),
                            ts.show(g)
                        ),
                    });
                }
            }
            match ctx.extended(x.clone()) {
                Ok(ctx2) => well_formed_at(sig, &ctx2, a, &format!("{at}.body"), out),
                Err(e) => out.push(Diagnostic {
                    at: at.to_string(),
                    message: e.to_string(),
                }),
            }
        }
    }
}

/// Collects every typing and side-condition violation. Empty diagnostics
/// means the formula is well-formed under the context.
pub fn well_formed(sig: &Signature, ctx: &Context, f: &Formula) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    well_formed_at(sig, ctx, f, "formula", &mut out);
    out
}

/// True iff no unbounded existential quantifier occurs. Bounded
/// existentials are permitted.
pub fn is_exists_free(f: &Formula) -> bool {
    match f {
        Formula::Bot | Formula::Eq(..) | Formula::Mem(..) | Formula::Rel(..) => true,
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            is_exists_free(a) && is_exists_free(b)
        }
        Formula::Forall(_, a) | Formula::BForall(_, _, a) | Formula::BExists(_, _, a) => {
            is_exists_free(a)
        }
        Formula::Exists(..) => false,
    }
}

/// Free variables in first-occurrence order. Variables of bounded-quantifier
/// bound terms count as free occurrences.
pub fn free_vars(f: &Formula) -> Vec<Var> {
    fn insert(acc: &mut Vec<Var>, v: Var) {
        if !acc.contains(&v) {
            acc.push(v);
        }
    }
    fn term_vars(t: &Term, acc: &mut Vec<Var>) {
        for v in t.free_vars() {
            insert(acc, v);
        }
    }
    fn go(f: &Formula, bound: &mut Vec<Var>, acc: &mut Vec<Var>) {
        match f {
            Formula::Bot => {}
            Formula::Eq(_, l, r) | Formula::Mem(_, l, r) => {
                let mut vs = Vec::new();
                term_vars(l, &mut vs);
                term_vars(r, &mut vs);
                for v in vs {
                    if !bound.contains(&v) {
                        insert(acc, v);
                    }
                }
            }
            Formula::Rel(_, args) => {
                for a in args {
                    for v in a.free_vars() {
                        if !bound.contains(&v) {
                            insert(acc, v);
                        }
                    }
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                go(a, bound, acc);
                go(b, bound, acc);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                go(a, bound, acc);
                bound.pop();
            }
            Formula::BForall(x, t, a) | Formula::BExists(x, t, a) => {
                for v in t.free_vars() {
                    if !bound.contains(&v) {
                        insert(acc, v);
                    }
                }
                bound.push(x.clone());
                go(a, bound, acc);
                bound.pop();
            }
        }
    }
    let mut acc = Vec::new();
    go(f, &mut Vec::new(), &mut acc);
    acc
}

/// All variable names appearing anywhere in the formula, bound or free.
/// Fresheners consult this to avoid collisions.
pub fn all_var_names(f: &Formula) -> Vec<String> {
    fn term_names(t: &Term, acc: &mut Vec<String>) {
        for v in t.free_vars() {
            if !acc.contains(&v.name) {
                acc.push(v.name);
            }
        }
    }
    fn go(f: &Formula, acc: &mut Vec<String>) {
        match f {
            Formula::Bot => {}
            Formula::Eq(_, l, r) | Formula::Mem(_, l, r) => {
                term_names(l, acc);
                term_names(r, acc);
            }
            Formula::Rel(_, args) => args.iter().for_each(|a| term_names(a, acc)),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                go(a, acc);
                go(b, acc);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                if !acc.contains(&x.name) {
                    acc.push(x.name.clone());
                }
                go(a, acc);
            }
            Formula::BForall(x, t, a) | Formula::BExists(x, t, a) => {
                if !acc.contains(&x.name) {
                    acc.push(x.name.clone());
                }
                term_names(t, acc);
                go(a, acc);
            }
        }
    }
    let mut acc = Vec::new();
    go(f, &mut acc);
    acc
}

fn rename_binder(old: &Var, taken: &[String]) -> Var {
    let mut name = format!("{}'", old.name);
    while taken.contains(&name) {
        name.push('\'');
    }
    Var::new(name, old.ty.clone())
}

/// Capture-avoiding substitution of `s` for `x`. Binders are renamed with
/// the prime scheme (`y`, `y'`, `y''`, ...) when capture threatens.
pub fn subst_formula(f: &Formula, x: &Var, s: &Term) -> Formula {
    let s_vars: Vec<Var> = s.free_vars();
    fn go(f: &Formula, x: &Var, s: &Term, s_vars: &[Var]) -> Formula {
        match f {
            Formula::Bot => Formula::Bot,
            Formula::Eq(rho, l, r) => {
                Formula::Eq(rho.clone(), subst_term(l, x, s), subst_term(r, x, s))
            }
            Formula::Mem(rho, l, r) => {
                Formula::Mem(rho.clone(), subst_term(l, x, s), subst_term(r, x, s))
            }
            Formula::Rel(name, args) => Formula::Rel(
                name.clone(),
                args.iter().map(|a| subst_term(a, x, s)).collect(),
            ),
            Formula::And(a, b) => Formula::and(go(a, x, s, s_vars), go(b, x, s, s_vars)),
            Formula::Or(a, b) => Formula::or(go(a, x, s, s_vars), go(b, x, s, s_vars)),
            Formula::Imp(a, b) => Formula::imp(go(a, x, s, s_vars), go(b, x, s, s_vars)),
            Formula::Forall(y, a) | Formula::Exists(y, a) => {
                let rebuild: fn(Var, Formula) -> Formula = match f {
                    Formula::Forall(..) => Formula::forall,
                    _ => Formula::exists,
                };
                if y == x {
                    return rebuild(y.clone(), a.as_ref().clone());
                }
                if s_vars.contains(y) && free_in(a, x) {
                    let taken: Vec<String> = all_var_names(a)
                        .into_iter()
                        .chain(s_vars.iter().map(|v| v.name.clone()))
                        .collect();
                    let y2 = rename_binder(y, &taken);
                    let renamed = go(a, y, &Term::Var(y2.clone()), &[y2.clone()]);
                    rebuild(y2, go(&renamed, x, s, s_vars))
                } else {
                    rebuild(y.clone(), go(a, x, s, s_vars))
                }
            }
            Formula::BForall(y, t, a) | Formula::BExists(y, t, a) => {
                let rebuild: fn(Var, Term, Formula) -> Formula = match f {
                    Formula::BForall(..) => Formula::bforall,
                    _ => Formula::bexists,
                };
                let t2 = subst_term(t, x, s);
                if y == x {
                    // The side condition keeps x out of t, so only the bound
                    // term can change.
                    return rebuild(y.clone(), t2, a.as_ref().clone());
                }
                if s_vars.contains(y) && free_in(a, x) {
                    let taken: Vec<String> = all_var_names(a)
                        .into_iter()
                        .chain(s_vars.iter().map(|v| v.name.clone()))
                        .collect();
                    let y2 = rename_binder(y, &taken);
                    let renamed = go(a, y, &Term::Var(y2.clone()), &[y2.clone()]);
                    rebuild(y2, t2, go(&renamed, x, s, s_vars))
                } else {
                    rebuild(y.clone(), t2, go(a, x, s, s_vars))
                }
            }
        }
    }
    go(f, x, s, &s_vars)
}

/// True iff `x` occurs free in the formula.
pub fn free_in(f: &Formula, x: &Var) -> bool {
    free_vars(f).contains(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Const, Signature};

    fn g() -> Type {
        Type::Ground
    }

    fn n(k: u64) -> Term {
        Term::numeral(k)
    }

    fn eq_n(l: Term, r: Term) -> Formula {
        Formula::Eq(g(), l, r)
    }

    #[test]
    fn well_formed_catches_bound_variable_in_bound() {
        let sig = Signature::arithmetic();
        let x = Var::new("x", g());
        let bound = Term::app(Term::Const(Const::Sing(g())), Term::Var(x.clone()));
        let f = Formula::bforall(x.clone(), bound, eq_n(Term::Var(x.clone()), n(0)));
        let diags = well_formed(&sig, &Context::new(), &f);
        assert!(diags
            .iter()
            .any(|d| d.message.contains("bound mentions bound variable")));
    }

    #[test]
    fn well_formed_accepts_numeral_equation() {
        let sig = Signature::arithmetic();
        let f = eq_n(n(0), n(1));
        assert!(well_formed(&sig, &Context::new(), &f).is_empty());
    }

    #[test]
    fn membership_set_side_must_be_star() {
        let sig = Signature::arithmetic();
        let f = Formula::Mem(g(), n(0), n(0));
        let diags = well_formed(&sig, &Context::new(), &f);
        assert!(!diags.is_empty());
    }

    #[test]
    fn exists_freeness() {
        let x = Var::new("x", g());
        let t = Term::app(Term::Const(Const::Sing(g())), n(0));
        let f = Formula::forall(
            x.clone(),
            Formula::imp(Formula::Mem(g(), Term::Var(x.clone()), t.clone()), Formula::Bot),
        );
        assert!(is_exists_free(&f));

        let e = Formula::exists(x.clone(), eq_n(Term::Var(x.clone()), n(0)));
        assert!(!is_exists_free(&e));

        let y = Var::new("y", g());
        let bounded = Formula::forall(
            y.clone(),
            Formula::bexists(
                x.clone(),
                t,
                eq_n(Term::Var(x.clone()), Term::Var(y.clone())),
            ),
        );
        assert!(is_exists_free(&bounded));
    }

    #[test]
    fn substitution_basics() {
        let x = Var::new("x", g());
        let f = eq_n(Term::Var(x.clone()), n(0));
        assert_eq!(subst_formula(&f, &x, &n(1)), eq_n(n(1), n(0)));

        let closed = Formula::forall(x.clone(), f.clone());
        assert_eq!(subst_formula(&closed, &x, &n(1)), closed);
    }

    #[test]
    fn substitution_renames_on_capture() {
        // (ex y . y = x)[y/x]  ==>  ex y' . y' = y
        let x = Var::new("x", g());
        let y = Var::new("y", g());
        let f = Formula::exists(
            y.clone(),
            eq_n(Term::Var(y.clone()), Term::Var(x.clone())),
        );
        let out = subst_formula(&f, &x, &Term::Var(y.clone()));
        let y2 = Var::new("y'", g());
        assert_eq!(
            out,
            Formula::exists(
                y2.clone(),
                eq_n(Term::Var(y2), Term::Var(y)),
            )
        );
    }

    #[test]
    fn substitution_preserves_well_formedness_and_exists_freeness() {
        let sig = Signature::arithmetic();
        let x = Var::new("x", g());
        let z = Var::new("z", g());
        let bound = Term::app(Term::Const(Const::Sing(g())), Term::Var(x.clone()));
        let f = Formula::bforall(
            z.clone(),
            bound,
            eq_n(Term::Var(z.clone()), Term::Var(x.clone())),
        );
        let ctx = Context::of(vec![x.clone()]).unwrap();
        assert!(well_formed(&sig, &ctx, &f).is_empty());
        assert!(is_exists_free(&f));
        let out = subst_formula(&f, &x, &n(2));
        assert!(well_formed(&sig, &Context::new(), &out).is_empty());
        assert!(is_exists_free(&out));
    }

    #[test]
    fn free_vars_of_bounded_quantifier_include_bound_term() {
        let x = Var::new("x", g());
        let y = Var::new("y", g());
        let t = Var::new("t", Type::star(g()));
        let f = Formula::bforall(
            x.clone(),
            Term::Var(t.clone()),
            eq_n(Term::Var(x.clone()), Term::Var(y.clone())),
        );
        let fv = free_vars(&f);
        assert!(fv.contains(&t));
        assert!(fv.contains(&y));
        assert!(!fv.contains(&x));

        assert!(free_vars(&Formula::Bot).is_empty());
        let e = Formula::exists(x.clone(), eq_n(Term::Var(x.clone()), Term::Var(x.clone())));
        assert!(free_vars(&e).is_empty());
    }
}
