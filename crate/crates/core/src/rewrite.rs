//! The conversion relation of the calculus: one-step reduction, full
//! normalization under two strategies, surface elements, set-like
//! recognition, witness enumeration and numeral decoding.

use thiserror::Error;

use crate::kernel::{Const, Term, Type};

/// Default step budget. Exhaustion signals a kernel bug, not a user error:
/// the calculus is strongly normalizing.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u64);

impl Default for Budget {
    fn default() -> Budget {
        Budget(DEFAULT_BUDGET)
    }
}

/// Which redex the full normalizer contracts first. Leftmost-outermost is
/// the canonical strategy; rightmost-innermost exists for confluence
/// testing only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

/// Name of the conversion applied at a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Sigma,
    Pi,
    BigCupSing,
    BigCupCup,
    RecZero,
    RecSucc,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Sigma => "sigma",
            Rule::Pi => "pi",
            Rule::BigCupSing => "bigcup-sing",
            Rule::BigCupCup => "bigcup-cup",
            Rule::RecZero => "rec-zero",
            Rule::RecSucc => "rec-suc",
        }
    }
}

/// Path from the root: 0 descends into the function, 1 into the argument.
pub type Position = Vec<u8>;

pub fn show_position(pos: &[u8]) -> String {
    if pos.is_empty() {
        "-".to_string()
    } else {
        pos.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

/// One recorded reduction step.
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub position: Position,
    pub rule: Rule,
    pub result: Term,
}

/// A reduction run: start term, steps in order, budget consumed.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub start: Term,
    pub steps: Vec<TraceStep>,
    pub budget_used: u64,
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("step budget exhausted after {used} steps; trace tail:\n{tail}")]
    BudgetExhausted { used: u64, tail: String },
    #[error("expected a term of star type, got {ty}")]
    NotStarType { ty: String },
    #[error("term is not closed: free variable `{var}`")]
    OpenTerm { var: String },
    #[error("closed normal star term has no surface elements (kernel bug): {term:?}")]
    EmptyEnumeration { term: Term },
}

/// Tries the six conversions at the root of `t`.
fn contract_root(t: &Term) -> Option<(Rule, Term)> {
    let (head, args) = t.spine();
    let c = match head {
        Term::Const(c) => c,
        _ => return None,
    };
    match c {
        Const::Sigma { .. } if args.len() >= 3 => {
            // SIG t q r ~> t r (q r)
            let (t1, q, r) = (args[0], args[1], args[2]);
            let contracted = Term::app(
                Term::app(t1.clone(), r.clone()),
                Term::app(q.clone(), r.clone()),
            );
            Some((Rule::Sigma, Term::apps(contracted, args[3..].iter().map(|a| (*a).clone()))))
        }
        Const::Pi { .. } if args.len() >= 2 => {
            // PI t q ~> t
            Some((
                Rule::Pi,
                Term::apps(args[0].clone(), args[2..].iter().map(|a| (*a).clone())),
            ))
        }
        Const::BigCup { from, to } if args.len() >= 2 => {
            let (set, f) = (args[0], args[1]);
            let (shead, sargs) = set.spine();
            match shead {
                // BIGCUP (SET t) q ~> q t
                Term::Const(Const::Sing(_)) if sargs.len() == 1 => Some((
                    Rule::BigCupSing,
                    Term::apps(
                        Term::app(f.clone(), sargs[0].clone()),
                        args[2..].iter().map(|a| (*a).clone()),
                    ),
                )),
                // BIGCUP (CUP t q) r ~> CUP (BIGCUP t r) (BIGCUP q r)
                Term::Const(Const::Cup(_)) if sargs.len() == 2 => {
                    let bigcup = Term::Const(Const::BigCup {
                        from: from.clone(),
                        to: to.clone(),
                    });
                    let left = Term::apps(bigcup.clone(), [sargs[0].clone(), f.clone()]);
                    let right = Term::apps(bigcup, [sargs[1].clone(), f.clone()]);
                    let cup = Term::Const(Const::Cup(to.clone()));
                    Some((
                        Rule::BigCupCup,
                        Term::apps(
                            Term::apps(cup, [left, right]),
                            args[2..].iter().map(|a| (*a).clone()),
                        ),
                    ))
                }
                _ => None,
            }
        }
        Const::Rec(_) if args.len() >= 3 => {
            let (n, q, r) = (args[0], args[1], args[2]);
            match n {
                // REC 0 q r ~> q
                Term::Const(Const::Zero) => Some((
                    Rule::RecZero,
                    Term::apps(q.clone(), args[3..].iter().map(|a| (*a).clone())),
                )),
                // REC (SUC t) q r ~> r (REC t q r) t
                Term::App(f, t1) if matches!(f.as_ref(), Term::Const(Const::Succ)) => {
                    let rec = Term::apps(
                        Term::Const(c.clone()),
                        [t1.as_ref().clone(), q.clone(), r.clone()],
                    );
                    let contracted = Term::apps(r.clone(), [rec, t1.as_ref().clone()]);
                    Some((
                        Rule::RecSucc,
                        Term::apps(contracted, args[3..].iter().map(|a| (*a).clone())),
                    ))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

fn step_at(t: &Term, strategy: Strategy, pos: &mut Position) -> Option<(Rule, Term)> {
    match strategy {
        Strategy::LeftmostOutermost => {
            if let Some(hit) = contract_root(t) {
                return Some(hit);
            }
            if let Term::App(f, a) = t {
                pos.push(0);
                if let Some((rule, f2)) = step_at(f, strategy, pos) {
                    return Some((rule, Term::app(f2, a.as_ref().clone())));
                }
                pos.pop();
                pos.push(1);
                if let Some((rule, a2)) = step_at(a, strategy, pos) {
                    return Some((rule, Term::app(f.as_ref().clone(), a2)));
                }
                pos.pop();
            }
            None
        }
        Strategy::RightmostInnermost => {
            if let Term::App(f, a) = t {
                pos.push(1);
                if let Some((rule, a2)) = step_at(a, strategy, pos) {
                    return Some((rule, Term::app(f.as_ref().clone(), a2)));
                }
                pos.pop();
                pos.push(0);
                if let Some((rule, f2)) = step_at(f, strategy, pos) {
                    return Some((rule, Term::app(f2, a.as_ref().clone())));
                }
                pos.pop();
            }
            contract_root(t).map(|(rule, t2)| (rule, t2))
        }
    }
}

/// Applies exactly one conversion at the leftmost-outermost redex.
/// Returns `None` iff `t` is normal.
pub fn step(t: &Term) -> Option<Term> {
    let mut pos = Vec::new();
    step_at(t, Strategy::LeftmostOutermost, &mut pos).map(|(_, t2)| t2)
}

pub fn is_normal(t: &Term) -> bool {
    step_with_position(t, Strategy::LeftmostOutermost).is_none()
}

fn step_with_position(t: &Term, strategy: Strategy) -> Option<(Position, Rule, Term)> {
    let mut pos = Vec::new();
    step_at(t, strategy, &mut pos).map(|(rule, t2)| (pos, rule, t2))
}

/// Iterates one-step reduction to the normal form under the given strategy.
pub fn normalize_with(t: &Term, budget: Budget, strategy: Strategy) -> Result<Term, RewriteError> {
    let mut cur = t.clone();
    let mut used = 0u64;
    loop {
        match step_with_position(&cur, strategy) {
            None => return Ok(cur),
            Some((_, _, next)) => {
                used += 1;
                if used > budget.0 {
                    let tail = trace_tail(&cur, strategy, 5);
                    return Err(RewriteError::BudgetExhausted { used, tail });
                }
                cur = next;
            }
        }
    }
}

/// Canonical normalization: leftmost-outermost.
pub fn normalize(t: &Term, budget: Budget) -> Result<Term, RewriteError> {
    normalize_with(t, budget, Strategy::LeftmostOutermost)
}

/// Normalization recording every step, for `--trace` output and diagnostics.
pub fn normalize_traced(t: &Term, budget: Budget) -> Result<(Term, ReductionTrace), RewriteError> {
    let mut trace = ReductionTrace {
        start: t.clone(),
        steps: Vec::new(),
        budget_used: 0,
    };
    let mut cur = t.clone();
    loop {
        match step_with_position(&cur, Strategy::LeftmostOutermost) {
            None => return Ok((cur, trace)),
            Some((pos, rule, next)) => {
                trace.budget_used += 1;
                if trace.budget_used > budget.0 {
                    let tail = trace
                        .steps
                        .iter()
                        .rev()
                        .take(5)
                        .map(|s| format!("{} {} ...", show_position(&s.position), s.rule.name()))
                        .collect::<Vec<_>>()
                        .join("\n");
                    return Err(RewriteError::BudgetExhausted {
                        used: trace.budget_used,
                        tail,
                    });
                }
                trace.steps.push(TraceStep {
                    position: pos,
                    rule,
                    result: next.clone(),
                });
                cur = next;
            }
        }
    }
}

fn trace_tail(from: &Term, strategy: Strategy, n: usize) -> String {
    let mut cur = from.clone();
    let mut lines = Vec::new();
    for _ in 0..n {
        match step_with_position(&cur, strategy) {
            None => break,
            Some((pos, rule, next)) => {
                lines.push(format!("{} {}", show_position(&pos), rule.name()));
                cur = next;
            }
        }
    }
    lines.join("\n")
}

/// Finite list of witnesses read off a set-like structure: ordered by first
/// occurrence, deduplicated by syntactic equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessSet {
    pub elem_ty: Type,
    elements: Vec<Term>,
}

impl WitnessSet {
    pub fn new(elem_ty: Type) -> WitnessSet {
        WitnessSet {
            elem_ty,
            elements: Vec::new(),
        }
    }

    pub fn insert(&mut self, t: Term) {
        if !self.elements.contains(&t) {
            self.elements.push(t);
        }
    }

    pub fn elements(&self) -> &[Term] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.elements.contains(t)
    }

    pub fn is_subset(&self, other: &WitnessSet) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }

    /// Rebuilds a set-like term `SET e1 CUP SET e2 ...` from the elements.
    /// Panics on empty sets: star types denote nonempty sets.
    pub fn to_term(&self) -> Term {
        let sing = |e: &Term| {
            Term::app(Term::Const(Const::Sing(self.elem_ty.clone())), e.clone())
        };
        let mut iter = self.elements.iter();
        let first = iter.next().expect("witness sets are nonempty");
        iter.fold(sing(first), |acc, e| {
            Term::apps(Term::Const(Const::Cup(self.elem_ty.clone())), [acc, sing(e)])
        })
    }
}

/// Element type of a star-typed term, via its head. Used where the caller
/// has already typechecked the term.
fn star_elem_ty(t: &Term) -> Option<Type> {
    let (head, args) = t.spine();
    match head {
        Term::Const(Const::Sing(e)) if args.len() == 1 => Some(e.clone()),
        Term::Const(Const::Cup(e)) if args.len() == 2 => Some(e.clone()),
        Term::Const(Const::BigCup { to, .. }) if args.len() == 2 => Some(to.clone()),
        Term::Var(v) => v.ty.star_elem().cloned(),
        _ => None,
    }
}

/// Surface elements: `{q}` for a singleton, the union of both sides for a
/// union node, empty in any other case.
pub fn surface_elements(t: &Term, elem_ty: &Type) -> WitnessSet {
    fn go(t: &Term, acc: &mut WitnessSet) {
        let (head, args) = t.spine();
        match head {
            Term::Const(Const::Sing(_)) if args.len() == 1 => {
                acc.insert(args[0].clone());
            }
            Term::Const(Const::Cup(_)) if args.len() == 2 => {
                go(args[0], acc);
                go(args[1], acc);
            }
            _ => {}
        }
    }
    let mut acc = WitnessSet::new(elem_ty.clone());
    go(t, &mut acc);
    acc
}

/// True iff the top-level star structure is built from singletons and
/// unions only. Inner terms need not be normal.
pub fn is_set_like(t: &Term) -> bool {
    let (head, args) = t.spine();
    match head {
        Term::Const(Const::Sing(_)) => args.len() == 1,
        Term::Const(Const::Cup(_)) => args.len() == 2 && is_set_like(args[0]) && is_set_like(args[1]),
        _ => false,
    }
}

/// Normalizes a closed star-typed term and enumerates its witnesses, each
/// normalized. Nonempty by the normal-form shape theorem.
pub fn enumerate_set(t: &Term, budget: Budget) -> Result<WitnessSet, RewriteError> {
    if let Some(v) = t.free_vars().first() {
        return Err(RewriteError::OpenTerm {
            var: v.name.clone(),
        });
    }
    let nf = normalize(t, budget)?;
    let elem_ty = star_elem_ty(&nf).ok_or_else(|| RewriteError::NotStarType {
        ty: "non-star head".to_string(),
    })?;
    let raw = surface_elements(&nf, &elem_ty);
    let mut out = WitnessSet::new(elem_ty);
    for e in raw.elements() {
        out.insert(normalize(e, budget)?);
    }
    if out.is_empty() {
        return Err(RewriteError::EmptyEnumeration { term: nf });
    }
    Ok(out)
}

/// Normalizes a closed term of type N and decodes the numeral. `None`
/// signals a non-numeral normal form, which the shape theorem rules out
/// for well-typed closed input.
pub fn as_numeral(t: &Term, budget: Budget) -> Result<Option<u64>, RewriteError> {
    if let Some(v) = t.free_vars().first() {
        return Err(RewriteError::OpenTerm {
            var: v.name.clone(),
        });
    }
    let nf = normalize(t, budget)?;
    Ok(nf.as_numeral_literal())
}
