//! Bracket abstraction (combinatorial completeness) and the derived set
//! combinators: pointwise union, indexed union and the inclusion check.

use thiserror::Error;

use crate::kernel::{Const, Term, Type, Var};
use crate::rewrite::{enumerate_set, normalize, Budget, RewriteError, WitnessSet};

#[derive(Debug, Error)]
pub enum AbstractionError {
    #[error("expected an end-star type, got {ty}")]
    NotEndStar { ty: String },
    #[error("operand type mismatch: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

/// The typed identity combinator `SIG PI PI` at type `rho -> rho`.
fn identity(rho: &Type) -> Term {
    let r2r = Type::arrow(rho.clone(), rho.clone());
    Term::apps(
        Term::Const(Const::Sigma {
            a: rho.clone(),
            b: r2r.clone(),
            c: rho.clone(),
        }),
        [
            Term::Const(Const::Pi {
                first: rho.clone(),
                second: r2r,
            }),
            Term::Const(Const::Pi {
                first: rho.clone(),
                second: rho.clone(),
            }),
        ],
    )
}

/// Type of a term given the types of its free variables; brackets only need
/// this locally, so the walk is structural.
fn local_type(t: &Term) -> Type {
    match t {
        Term::Const(c) => c.ty(),
        Term::Var(v) => v.ty.clone(),
        Term::App(f, _) => match local_type(f) {
            Type::Arrow(_, cod) => *cod,
            other => other, // ill-typed input; callers typecheck upstream
        },
    }
}

/// Classic three-clause abstraction: `bracket(x, t)` is a binder-free term
/// of type `type(x) -> type(t)` whose application to any `s` reduces to
/// `t[s/x]`. Free variables are those of `t` minus `x`.
pub fn bracket(x: &Var, t: &Term) -> Term {
    if let Term::Var(v) = t {
        if v == x {
            return identity(&x.ty);
        }
    }
    if !t.contains_var(x) {
        return Term::app(
            Term::Const(Const::Pi {
                first: local_type(t),
                second: x.ty.clone(),
            }),
            t.clone(),
        );
    }
    match t {
        Term::App(f, a) => {
            let ta = local_type(a);
            let tb = match local_type(f) {
                Type::Arrow(_, cod) => *cod,
                other => other,
            };
            Term::apps(
                Term::Const(Const::Sigma {
                    a: x.ty.clone(),
                    b: ta,
                    c: tb,
                }),
                [bracket(x, f), bracket(x, a)],
            )
        }
        // A variable equal to x or a term not containing x was handled above.
        _ => unreachable!("non-application containing the abstracted variable"),
    }
}

/// Iterated abstraction over a variable tuple, innermost binder last:
/// `bracket_vars([x1,..,xn], t)` builds the curried n-ary function.
pub fn bracket_vars(xs: &[Var], t: &Term) -> Term {
    xs.iter().rev().fold(t.clone(), |acc, x| bracket(x, &acc))
}

/// Componentwise iterated abstraction: one curried function per body term.
pub fn bracket_tuple(xs: &[Var], ts: &[Term]) -> Vec<Term> {
    ts.iter().map(|t| bracket_vars(xs, t)).collect()
}

/// Fresh variables of the given types whose names avoid `avoid`.
pub fn fresh_vars(prefix: &str, types: &[Type], avoid: &[Term]) -> Vec<Var> {
    let mut used: Vec<String> = avoid
        .iter()
        .flat_map(|t| t.free_vars().into_iter().map(|v| v.name))
        .collect();
    let mut out = Vec::new();
    let mut k = 0usize;
    for ty in types {
        loop {
            let name = format!("{prefix}{k}");
            k += 1;
            if !used.contains(&name) {
                used.push(name.clone());
                out.push(Var::new(name, ty.clone()));
                break;
            }
        }
    }
    out
}

/// Pointwise union at an end-star type: at `tau*` this is literally
/// `CUP a b`; at `r1 -> .. -> rn -> tau*` the arguments are distributed.
pub fn sqcup(a: &Term, b: &Term, sigma: &Type) -> Result<Term, AbstractionError> {
    let (arg_tys, tail) = sigma.decompose();
    let elem = match tail {
        Type::Star(e) => e.as_ref().clone(),
        _ => {
            return Err(AbstractionError::NotEndStar {
                ty: format!("{sigma:?}"),
            })
        }
    };
    if arg_tys.is_empty() {
        return Ok(Term::apps(
            Term::Const(Const::Cup(elem)),
            [a.clone(), b.clone()],
        ));
    }
    let tys: Vec<Type> = arg_tys.into_iter().cloned().collect();
    let xs = fresh_vars("x", &tys, &[a.clone(), b.clone()]);
    let args: Vec<Term> = xs.iter().cloned().map(Term::Var).collect();
    let body = Term::apps(
        Term::Const(Const::Cup(elem)),
        [
            Term::apps(a.clone(), args.clone()),
            Term::apps(b.clone(), args),
        ],
    );
    Ok(bracket_vars(&xs, &body))
}

/// Indexed union `|_|_{w in F} f w` at an end-star result type: pointwise
/// `BIGCUP` of the family, with the extra arguments distributed.
pub fn big_sqcup(family_set: &Term, f: &Term, sigma: &Type) -> Result<Term, AbstractionError> {
    let (arg_tys, tail) = sigma.decompose();
    let out_elem = match tail {
        Type::Star(e) => e.as_ref().clone(),
        _ => {
            return Err(AbstractionError::NotEndStar {
                ty: format!("{sigma:?}"),
            })
        }
    };
    let from = match local_type(family_set) {
        Type::Star(e) => *e,
        other => {
            return Err(AbstractionError::Mismatch(format!(
                "family bound must have star type, got {other:?}"
            )))
        }
    };
    if arg_tys.is_empty() {
        return Ok(Term::apps(
            Term::Const(Const::BigCup {
                from,
                to: out_elem,
            }),
            [family_set.clone(), f.clone()],
        ));
    }
    let tys: Vec<Type> = arg_tys.into_iter().cloned().collect();
    let xs = fresh_vars("x", &tys, &[family_set.clone(), f.clone()]);
    let args: Vec<Term> = xs.iter().cloned().map(Term::Var).collect();
    let w = fresh_vars("w", &[from.clone()], &[family_set.clone(), f.clone()])
        .pop()
        .expect("one fresh variable");
    // \x1..xn. BIGCUP F (\w. f w x1..xn)
    let applied = Term::apps(
        Term::app(f.clone(), Term::Var(w.clone())),
        args,
    );
    let body = Term::apps(
        Term::Const(Const::BigCup {
            from,
            to: out_elem,
        }),
        [family_set.clone(), bracket(&w, &applied)],
    );
    Ok(bracket_vars(&xs, &body))
}

/// Result of an inclusion check. At base star types the answer is exact;
/// at higher end-star types only the supplied probe tuples are examined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InclusionVerdict {
    Exact(bool),
    ProbeLimited(bool),
}

impl InclusionVerdict {
    pub fn holds(&self) -> bool {
        matches!(
            self,
            InclusionVerdict::Exact(true) | InclusionVerdict::ProbeLimited(true)
        )
    }
}

/// Equality of enumerated elements: numerals and hereditarily star-over-
/// ground values compare extensionally, everything else syntactically on
/// normal forms.
pub fn elements_equal(a: &Term, b: &Term, ty: &Type, budget: Budget) -> Result<bool, RewriteError> {
    match ty {
        Type::Star(e) => {
            let ea = enumerate_set(a, budget)?;
            let eb = enumerate_set(b, budget)?;
            witness_sets_equal(&ea, &eb, e, budget)
        }
        _ => Ok(normalize(a, budget)? == normalize(b, budget)?),
    }
}

pub fn witness_sets_equal(
    a: &WitnessSet,
    b: &WitnessSet,
    elem_ty: &Type,
    budget: Budget,
) -> Result<bool, RewriteError> {
    Ok(witness_subset(a, b, elem_ty, budget)? && witness_subset(b, a, elem_ty, budget)?)
}

pub fn witness_subset(
    a: &WitnessSet,
    b: &WitnessSet,
    elem_ty: &Type,
    budget: Budget,
) -> Result<bool, RewriteError> {
    for x in a.elements() {
        let mut found = false;
        for y in b.elements() {
            if elements_equal(x, y, elem_ty, budget)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decides `a` included in `b` at end-star type `sigma`. Exact at `tau*`;
/// at higher types the conjunction runs over the probe tuples only.
pub fn subseteq_check(
    a: &Term,
    b: &Term,
    sigma: &Type,
    probes: &[Vec<Term>],
    budget: Budget,
) -> Result<InclusionVerdict, AbstractionError> {
    let (arg_tys, tail) = sigma.decompose();
    let elem = match tail {
        Type::Star(e) => e.as_ref().clone(),
        _ => {
            return Err(AbstractionError::NotEndStar {
                ty: format!("{sigma:?}"),
            })
        }
    };
    if arg_tys.is_empty() {
        let ea = enumerate_set(a, budget)?;
        let eb = enumerate_set(b, budget)?;
        return Ok(InclusionVerdict::Exact(witness_subset(
            &ea, &eb, &elem, budget,
        )?));
    }
    let mut all = true;
    for tuple in probes {
        if tuple.len() != arg_tys.len() {
            return Err(AbstractionError::Mismatch(format!(
                "probe tuple has {} arguments, type expects {}",
                tuple.len(),
                arg_tys.len()
            )));
        }
        let fa = Term::apps(a.clone(), tuple.iter().cloned());
        let fb = Term::apps(b.clone(), tuple.iter().cloned());
        let ea = enumerate_set(&fa, budget)?;
        let eb = enumerate_set(&fb, budget)?;
        if !witness_subset(&ea, &eb, &elem, budget)? {
            all = false;
        }
    }
    Ok(InclusionVerdict::ProbeLimited(all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{subst_term, Context, Signature, typecheck};

    fn g() -> Type {
        Type::Ground
    }

    fn n(k: u64) -> Term {
        Term::numeral(k)
    }

    fn sing(e: Term) -> Term {
        Term::app(Term::Const(Const::Sing(g())), e)
    }

    #[test]
    fn bracket_identity_and_constant() {
        let sig = Signature::arithmetic();
        let x = Var::new("x", g());
        let ix = bracket(&x, &Term::Var(x.clone()));
        let applied = Term::app(ix, n(7));
        assert_eq!(
            normalize(&applied, Budget::default()).unwrap(),
            n(7)
        );

        let konst = bracket(&x, &n(3));
        let applied = Term::app(konst.clone(), n(9));
        assert_eq!(normalize(&applied, Budget::default()).unwrap(), n(3));
        assert_eq!(
            typecheck(&sig, &Context::new(), &konst).unwrap(),
            Type::arrow(g(), g())
        );
    }

    #[test]
    fn bracket_application_clause() {
        // bracket(x, S x) applied to 4 reduces to 5.
        let x = Var::new("x", g());
        let body = Term::app(Term::Const(Const::Succ), Term::Var(x.clone()));
        let f = bracket(&x, &body);
        let applied = Term::app(f, n(4));
        assert_eq!(normalize(&applied, Budget::default()).unwrap(), n(5));
    }

    #[test]
    fn beta_simulation_equation() {
        let x = Var::new("x", g());
        let body = sing(Term::app(Term::Const(Const::Succ), Term::Var(x.clone())));
        let s = n(2);
        let lhs = normalize(&Term::app(bracket(&x, &body), s.clone()), Budget::default()).unwrap();
        let rhs = normalize(&subst_term(&body, &x, &s), Budget::default()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn free_variable_contract() {
        let x = Var::new("x", g());
        let y = Var::new("y", g());
        let body = Term::apps(
            Term::Const(Const::Cup(g())),
            [sing(Term::Var(x.clone())), sing(Term::Var(y.clone()))],
        );
        let abs = bracket(&x, &body);
        let fv = abs.free_vars();
        assert!(fv.contains(&y));
        assert!(!fv.contains(&x));
    }

    #[test]
    fn bracket_tuple_projections() {
        let x = Var::new("x", g());
        let y = Var::new("y", g());
        let pair = bracket_tuple(
            &[x.clone(), y.clone()],
            &[Term::Var(y.clone()), Term::Var(x.clone())],
        );
        // Swapped projections: applied to (c, d) they give (d, c).
        let first = Term::apps(pair[0].clone(), [n(1), n(2)]);
        let second = Term::apps(pair[1].clone(), [n(1), n(2)]);
        assert_eq!(normalize(&first, Budget::default()).unwrap(), n(2));
        assert_eq!(normalize(&second, Budget::default()).unwrap(), n(1));
    }

    #[test]
    fn sqcup_base_case_is_literal_union() {
        let a = sing(n(0));
        let b = sing(n(1));
        let u = sqcup(&a, &b, &Type::star(g())).unwrap();
        assert_eq!(
            u,
            Term::apps(Term::Const(Const::Cup(g())), [a, b])
        );
    }

    #[test]
    fn sqcup_distributes_arguments() {
        // At N -> N*, (f sqcup g) 0 normalizes to CUP (f 0) (g 0).
        let fv = Term::var("f", Type::arrow(g(), Type::star(g())));
        let gv = Term::var("g", Type::arrow(g(), Type::star(g())));
        let ty = Type::arrow(g(), Type::star(g()));
        let u = sqcup(&fv, &gv, &ty).unwrap();
        let applied = normalize(&Term::app(u, n(0)), Budget::default()).unwrap();
        let expected = Term::apps(
            Term::Const(Const::Cup(g())),
            [
                Term::app(fv, n(0)),
                Term::app(gv, n(0)),
            ],
        );
        assert_eq!(applied, expected);
    }

    #[test]
    fn sqcup_enumerations_union() {
        // With closed f, g the pointwise union enumerates both sides.
        let x = Var::new("x", g());
        let f = bracket(&x, &sing(Term::Var(x.clone())));
        let gfun = bracket(
            &x,
            &sing(Term::app(Term::Const(Const::Succ), Term::Var(x.clone()))),
        );
        let ty = Type::arrow(g(), Type::star(g()));
        let u = sqcup(&f, &gfun, &ty).unwrap();
        let at0 = enumerate_set(&Term::app(u, n(0)), Budget::default()).unwrap();
        let ef = enumerate_set(&Term::app(f, n(0)), Budget::default()).unwrap();
        let eg = enumerate_set(&Term::app(gfun, n(0)), Budget::default()).unwrap();
        assert!(ef.is_subset(&at0));
        assert!(eg.is_subset(&at0));
    }

    #[test]
    fn big_sqcup_base_cases() {
        let x = Var::new("x", g());
        let f = bracket(&x, &sing(Term::Var(x.clone())));
        // Over a singleton family the union is the single application.
        let t = big_sqcup(&sing(n(0)), &f, &Type::star(g())).unwrap();
        assert_eq!(
            normalize(&t, Budget::default()).unwrap(),
            normalize(&Term::app(f.clone(), n(0)), Budget::default()).unwrap()
        );
        // Over a two-element family both members appear.
        let fam = Term::apps(
            Term::Const(Const::Cup(g())),
            [sing(n(0)), sing(n(1))],
        );
        let t = big_sqcup(&fam, &f, &Type::star(g())).unwrap();
        let ws = enumerate_set(&t, Budget::default()).unwrap();
        assert_eq!(ws.elements(), &[n(0), n(1)]);
    }

    #[test]
    fn big_sqcup_pointwise_at_higher_type() {
        // sigma = N -> N*: (bigsqcup_{w in F} f w) a == BIGCUP F (\w. f w a).
        let w = Var::new("wv", g());
        let a = Var::new("av", g());
        let inner = bracket(
            &a,
            &sing(Term::apps(
                Term::Const(Const::Cup(g())),
                [sing(Term::Var(w.clone())), sing(Term::Var(a.clone()))],
            )),
        );
        // f : N -> N -> N** is overkill; use f w a = {w} u {a} at N -> N -> N*.
        let f = bracket(
            &w,
            &bracket_vars(
                &[a.clone()],
                &Term::apps(
                    Term::Const(Const::Cup(g())),
                    [sing(Term::Var(w.clone())), sing(Term::Var(a.clone()))],
                ),
            ),
        );
        let _ = inner;
        let fam = Term::apps(
            Term::Const(Const::Cup(g())),
            [sing(n(3)), sing(n(5))],
        );
        let sigma = Type::arrow(g(), Type::star(g()));
        let u = big_sqcup(&fam, &f, &sigma).unwrap();
        let got = enumerate_set(&Term::app(u, n(9)), Budget::default()).unwrap();
        // Direct build: BIGCUP F (\w. f w 9)
        let direct = Term::apps(
            Term::Const(Const::BigCup { from: g(), to: g() }),
            [
                fam,
                bracket(
                    &w,
                    &Term::apps(f, [Term::Var(w.clone()), n(9)]),
                ),
            ],
        );
        let expected = enumerate_set(&direct, Budget::default()).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn inclusion_exact_at_base() {
        let a = sing(n(0));
        let b = Term::apps(
            Term::Const(Const::Cup(g())),
            [sing(n(0)), sing(n(1))],
        );
        let v = subseteq_check(&a, &b, &Type::star(g()), &[], Budget::default()).unwrap();
        assert_eq!(v, InclusionVerdict::Exact(true));
        let v = subseteq_check(&b, &a, &Type::star(g()), &[], Budget::default()).unwrap();
        assert_eq!(v, InclusionVerdict::Exact(false));
        let v = subseteq_check(&b, &b, &Type::star(g()), &[], Budget::default()).unwrap();
        assert_eq!(v, InclusionVerdict::Exact(true));
    }

    #[test]
    fn inclusion_probe_limited_at_higher_type() {
        let x = Var::new("x", g());
        let f = bracket(&x, &sing(Term::Var(x.clone())));
        let gfun = bracket(
            &x,
            &sing(Term::app(Term::Const(Const::Succ), Term::Var(x.clone()))),
        );
        let sigma = Type::arrow(g(), Type::star(g()));
        let fg = sqcup(&f, &gfun, &sigma).unwrap();
        let probes: Vec<Vec<Term>> = (0..3).map(|k| vec![n(k)]).collect();
        let v = subseteq_check(&f, &fg, &sigma, &probes, Budget::default()).unwrap();
        assert_eq!(v, InclusionVerdict::ProbeLimited(true));
        let v = subseteq_check(&fg, &f, &sigma, &probes, Budget::default()).unwrap();
        assert_eq!(v, InclusionVerdict::ProbeLimited(false));
    }
}
