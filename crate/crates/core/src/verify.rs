//! Evaluator for the decidable arithmetic fragment, used to validate
//! extracted realizers and to test monotonicity and witness-disjunction
//! properties.
//!
//! Equality at `N*` (and hereditarily star-over-N types) is evaluated
//! extensionally on enumerations. The theory's equality axioms do not
//! include extensionality; the evaluator is a model of the theory, not the
//! theory itself, and extensional sets model the star axioms.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kernel::{Mode, Signature, Term, Type};
use crate::logic::Formula;
use crate::rewrite::{as_numeral, enumerate_set, normalize, Budget, RewriteError};

/// Truth tables for relation symbols: the set of argument tuples on which
/// the relation holds. Relations without a table are undecidable.
#[derive(Debug, Clone, Default)]
pub struct RelTable {
    tables: Vec<(String, BTreeSet<Vec<u64>>)>,
}

impl RelTable {
    pub fn new() -> RelTable {
        RelTable::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, rows: impl IntoIterator<Item = Vec<u64>>) {
        self.tables.push((name.into(), rows.into_iter().collect()));
    }

    pub fn lookup(&self, name: &str) -> Option<&BTreeSet<Vec<u64>>> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.tables.iter().map(|(n, _)| n.as_str())
    }
}

/// Three-valued verdict. `Undecidable` marks formulas outside the fragment,
/// never a failed computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalVerdict {
    True,
    False,
    Undecidable(String),
}

impl EvalVerdict {
    pub fn is_true(&self) -> bool {
        *self == EvalVerdict::True
    }
    pub fn is_false(&self) -> bool {
        *self == EvalVerdict::False
    }
}

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("evaluation requires arithmetic mode")]
    NotArithmetic,
    #[error("closed normal term of type N is not a numeral (kernel bug): {0:?}")]
    NotNumeral(Term),
}

/// Normalizes a closed term of type N and decodes it. By the normal-form
/// shape theorem the decode cannot fail on well-typed closed input.
pub fn eval_term_nat(sig: &Signature, t: &Term, budget: Budget) -> Result<u64, EvalError> {
    if sig.mode != Mode::Arithmetic {
        return Err(EvalError::NotArithmetic);
    }
    match as_numeral(t, budget)? {
        Some(n) => Ok(n),
        None => Err(EvalError::NotNumeral(normalize(t, budget)?)),
    }
}

/// Equality at element type `ty` is decidable when `ty` is `N` or a star
/// over a decidable type; arrows are out.
fn decidable_eq_type(ty: &Type) -> bool {
    match ty {
        Type::Ground => true,
        Type::Star(e) => decidable_eq_type(e),
        Type::Arrow(..) => false,
    }
}

fn eq_at(
    sig: &Signature,
    ty: &Type,
    a: &Term,
    b: &Term,
    budget: Budget,
) -> Result<Option<bool>, EvalError> {
    match ty {
        Type::Ground => {
            let na = eval_term_nat(sig, a, budget)?;
            let nb = eval_term_nat(sig, b, budget)?;
            Ok(Some(na == nb))
        }
        Type::Star(e) => {
            if !decidable_eq_type(e) {
                return Ok(None);
            }
            let ea = enumerate_set(a, budget)?;
            let eb = enumerate_set(b, budget)?;
            let sub = |xs: &[Term], ys: &[Term]| -> Result<bool, EvalError> {
                for x in xs {
                    let mut found = false;
                    for y in ys {
                        if eq_at(sig, e, x, y, budget)? == Some(true) {
                            found = true;
                            break;
                        }
                    }
                    if !found {
                        return Ok(false);
                    }
                }
                Ok(true)
            };
            Ok(Some(
                sub(ea.elements(), eb.elements())? && sub(eb.elements(), ea.elements())?,
            ))
        }
        Type::Arrow(..) => Ok(None),
    }
}

fn verdict_and(a: EvalVerdict, b: EvalVerdict) -> EvalVerdict {
    use EvalVerdict::*;
    match (a, b) {
        (False, _) | (_, False) => False,
        (True, True) => True,
        (Undecidable(r), _) | (_, Undecidable(r)) => Undecidable(r),
    }
}

fn verdict_or(a: EvalVerdict, b: EvalVerdict) -> EvalVerdict {
    use EvalVerdict::*;
    match (a, b) {
        (True, _) | (_, True) => True,
        (False, False) => False,
        (Undecidable(r), _) | (_, Undecidable(r)) => Undecidable(r),
    }
}

fn verdict_imp(a: EvalVerdict, b: EvalVerdict) -> EvalVerdict {
    use EvalVerdict::*;
    match (a, b) {
        (False, _) => True,
        (_, True) => True,
        (True, False) => False,
        (True, Undecidable(r)) | (Undecidable(r), _) => Undecidable(r),
    }
}

/// Classical truth value of a closed formula in the fragment: equality and
/// membership over hereditarily-enumerable types, relational atoms with a
/// supplied table, connectives (Kleene three-valued), and bounded
/// quantifiers over closed star-typed bounds. Unbounded quantifiers and
/// higher-type equality are undecidable.
pub fn eval_formula(
    sig: &Signature,
    f: &Formula,
    rels: &RelTable,
    budget: Budget,
) -> Result<EvalVerdict, EvalError> {
    if sig.mode != Mode::Arithmetic {
        return Err(EvalError::NotArithmetic);
    }
    let g = sig.ground_name();
    match f {
        Formula::Bot => Ok(EvalVerdict::False),
        Formula::Eq(rho, a, b) => {
            if let Some(v) = a.free_vars().into_iter().chain(b.free_vars()).next() {
                return Ok(EvalVerdict::Undecidable(format!(
                    "free variable `{}` in atom",
                    v.name
                )));
            }
            match eq_at(sig, rho, a, b, budget)? {
                Some(true) => Ok(EvalVerdict::True),
                Some(false) => Ok(EvalVerdict::False),
                None => Ok(EvalVerdict::Undecidable(format!(
                    "equality at type {} is outside the fragment",
                    rho.show(g)
                ))),
            }
        }
        Formula::Mem(rho, e, s) => {
            if let Some(v) = e.free_vars().into_iter().chain(s.free_vars()).next() {
                return Ok(EvalVerdict::Undecidable(format!(
                    "free variable `{}` in atom",
                    v.name
                )));
            }
            if !decidable_eq_type(rho) {
                return Ok(EvalVerdict::Undecidable(format!(
                    "membership at element type {} is outside the fragment",
                    rho.show(g)
                )));
            }
            let es = enumerate_set(s, budget)?;
            for w in es.elements() {
                if eq_at(sig, rho, e, w, budget)? == Some(true) {
                    return Ok(EvalVerdict::True);
                }
            }
            Ok(EvalVerdict::False)
        }
        Formula::Rel(name, args) => match rels.lookup(name) {
            None => Ok(EvalVerdict::Undecidable(format!(
                "no truth table for relation `{name}`"
            ))),
            Some(rows) => {
                let mut tuple = Vec::with_capacity(args.len());
                for a in args {
                    if let Some(v) = a.free_vars().first() {
                        return Ok(EvalVerdict::Undecidable(format!(
                            "free variable `{}` in atom",
                            v.name
                        )));
                    }
                    tuple.push(eval_term_nat(sig, a, budget)?);
                }
                Ok(if rows.contains(&tuple) {
                    EvalVerdict::True
                } else {
                    EvalVerdict::False
                })
            }
        },
        Formula::And(a, b) => Ok(verdict_and(
            eval_formula(sig, a, rels, budget)?,
            eval_formula(sig, b, rels, budget)?,
        )),
        Formula::Or(a, b) => Ok(verdict_or(
            eval_formula(sig, a, rels, budget)?,
            eval_formula(sig, b, rels, budget)?,
        )),
        Formula::Imp(a, b) => Ok(verdict_imp(
            eval_formula(sig, a, rels, budget)?,
            eval_formula(sig, b, rels, budget)?,
        )),
        Formula::Forall(..) | Formula::Exists(..) => {
            Ok(EvalVerdict::Undecidable("unbounded quantifier".to_string()))
        }
        Formula::BForall(x, t, body) | Formula::BExists(x, t, body) => {
            if let Some(v) = t.free_vars().first() {
                return Ok(EvalVerdict::Undecidable(format!(
                    "free variable `{}` in quantifier bound",
                    v.name
                )));
            }
            let elems = enumerate_set(t, budget)?;
            let universal = matches!(f, Formula::BForall(..));
            let mut acc = if universal {
                EvalVerdict::True
            } else {
                EvalVerdict::False
            };
            for w in elems.elements() {
                let inst = crate::logic::subst_formula(body, x, w);
                let v = eval_formula(sig, &inst, rels, budget)?;
                acc = if universal {
                    verdict_and(acc, v)
                } else {
                    verdict_or(acc, v)
                };
                match (&acc, universal) {
                    (EvalVerdict::False, true) | (EvalVerdict::True, false) => return Ok(acc),
                    _ => {}
                }
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::bracket;
    use crate::kernel::{Const, Var};

    fn g() -> Type {
        Type::Ground
    }

    fn n(k: u64) -> Term {
        Term::numeral(k)
    }

    fn sing(e: Term) -> Term {
        Term::app(Term::Const(Const::Sing(g())), e)
    }

    fn cup(a: Term, b: Term) -> Term {
        Term::apps(Term::Const(Const::Cup(g())), [a, b])
    }

    fn sig() -> Signature {
        Signature::arithmetic()
    }

    #[test]
    fn nat_evaluation() {
        assert_eq!(eval_term_nat(&sig(), &n(1), Budget::default()).unwrap(), 1);
        // REC 3 0 (\x,m. S (S x)) doubles: 6.
        let x = Var::new("x", g());
        let m = Var::new("m", g());
        let body = Term::app(
            Term::Const(Const::Succ),
            Term::app(Term::Const(Const::Succ), Term::Var(x.clone())),
        );
        let step = bracket(&x, &bracket(&m, &body));
        let t = Term::apps(Term::Const(Const::Rec(g())), [n(3), n(0), step]);
        assert_eq!(eval_term_nat(&sig(), &t, Budget::default()).unwrap(), 6);
        // PI 2 5 projects.
        let p = Term::apps(
            Term::Const(Const::Pi {
                first: g(),
                second: g(),
            }),
            [n(2), n(5)],
        );
        assert_eq!(eval_term_nat(&sig(), &p, Budget::default()).unwrap(), 2);
    }

    #[test]
    fn bounded_forall_over_literal_set() {
        let x = Var::new("x", g());
        let f = Formula::bforall(
            x.clone(),
            cup(sing(n(0)), sing(n(1))),
            Formula::Eq(g(), Term::Var(x.clone()), Term::Var(x.clone())),
        );
        assert_eq!(
            eval_formula(&sig(), &f, &RelTable::new(), Budget::default()).unwrap(),
            EvalVerdict::True
        );
    }

    #[test]
    fn membership_follows_reduction() {
        // 0 in BIGCUP {0} (\x. {S x}) is false: the set is {1}.
        let x = Var::new("x", g());
        let f = bracket(
            &x,
            &sing(Term::app(Term::Const(Const::Succ), Term::Var(x.clone()))),
        );
        let set = Term::apps(
            Term::Const(Const::BigCup { from: g(), to: g() }),
            [sing(n(0)), f],
        );
        let formula = Formula::Mem(g(), n(0), set);
        assert_eq!(
            eval_formula(&sig(), &formula, &RelTable::new(), Budget::default()).unwrap(),
            EvalVerdict::False
        );
    }

    #[test]
    fn unbounded_quantifier_is_undecidable() {
        let x = Var::new("x", g());
        let f = Formula::forall(
            x.clone(),
            Formula::Eq(g(), Term::Var(x.clone()), Term::Var(x)),
        );
        match eval_formula(&sig(), &f, &RelTable::new(), Budget::default()).unwrap() {
            EvalVerdict::Undecidable(r) => assert!(r.contains("unbounded")),
            other => panic!("expected undecidable, got {other:?}"),
        }
    }

    #[test]
    fn star_axioms_hold_semantically() {
        // w in {x} iff w = x; w in x u y iff w in x or w in y.
        let b = Budget::default();
        let rels = RelTable::new();
        for w in 0..3u64 {
            for x in 0..3u64 {
                let lhs = eval_formula(
                    &sig(),
                    &Formula::Mem(g(), n(w), sing(n(x))),
                    &rels,
                    b,
                )
                .unwrap();
                let rhs = eval_formula(&sig(), &Formula::Eq(g(), n(w), n(x)), &rels, b).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        let s1 = cup(sing(n(0)), sing(n(2)));
        let s2 = sing(n(1));
        for w in 0..4u64 {
            let in_union = eval_formula(
                &sig(),
                &Formula::Mem(g(), n(w), cup(s1.clone(), s2.clone())),
                &rels,
                b,
            )
            .unwrap();
            let either = eval_formula(
                &sig(),
                &Formula::or(
                    Formula::Mem(g(), n(w), s1.clone()),
                    Formula::Mem(g(), n(w), s2.clone()),
                ),
                &rels,
                b,
            )
            .unwrap();
            assert_eq!(in_union, either);
        }
    }

    #[test]
    fn extensional_star_equality() {
        let b = Budget::default();
        let rels = RelTable::new();
        let lhs = cup(sing(n(0)), sing(n(1)));
        let rhs = cup(sing(n(1)), cup(sing(n(0)), sing(n(0))));
        let f = Formula::Eq(Type::star(g()), lhs, rhs);
        assert_eq!(eval_formula(&sig(), &f, &rels, b).unwrap(), EvalVerdict::True);
    }

    #[test]
    fn relation_tables() {
        let mut rels = RelTable::new();
        rels.insert(
            "P",
            vec![vec![0], vec![2]],
        );
        let sigr = Signature::new(
            Mode::Arithmetic,
            vec![],
            vec![],
            vec![("P".into(), 1)],
        )
        .unwrap();
        let t = Formula::Rel("P".into(), vec![n(2)]);
        let fa = Formula::Rel("P".into(), vec![n(1)]);
        assert_eq!(
            eval_formula(&sigr, &t, &rels, Budget::default()).unwrap(),
            EvalVerdict::True
        );
        assert_eq!(
            eval_formula(&sigr, &fa, &rels, Budget::default()).unwrap(),
            EvalVerdict::False
        );
        let missing = Formula::Rel("Q".into(), vec![n(1)]);
        assert!(matches!(
            eval_formula(&sigr, &missing, &rels, Budget::default()).unwrap(),
            EvalVerdict::Undecidable(_)
        ));
    }
}
