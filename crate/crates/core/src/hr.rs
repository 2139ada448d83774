//! The witness-set translation `A  |->  ex xs . A_m(xs)`: every formula is
//! mapped to a tuple of fresh end-star-typed existential variables together
//! with an existential-free matrix, plus the instantiation machinery and a
//! monotonicity probe over the decidable fragment.

use thiserror::Error;

use crate::kernel::{Context, Signature, Term, Type, Var};
use crate::logic::{
    all_var_names, free_vars, is_exists_free, subst_formula, well_formed, Diagnostic, Formula,
};
use crate::rewrite::{Budget, RewriteError, WitnessSet};
use crate::verify::{eval_formula, EvalError, EvalVerdict, RelTable};

/// Deterministic fresh-name source. Candidate names are the connective
/// letter first (`Z`, `U`, `X`, `W`), then `letter#k` with a shared counter;
/// anything colliding with the input formula or context is skipped.
#[derive(Debug, Clone)]
pub struct Freshener {
    counter: u64,
    reserved: Vec<String>,
}

impl Freshener {
    pub fn new(seed: u64, reserved: Vec<String>) -> Freshener {
        Freshener {
            counter: seed,
            reserved,
        }
    }

    pub fn for_formula(seed: u64, f: &Formula, ctx: &Context) -> Freshener {
        let mut reserved = all_var_names(f);
        for v in ctx.vars() {
            if !reserved.contains(&v.name) {
                reserved.push(v.name.clone());
            }
        }
        Freshener::new(seed, reserved)
    }

    pub fn fresh(&mut self, letter: &str, ty: Type) -> Var {
        let bare = letter.to_string();
        if !self.reserved.contains(&bare) {
            self.reserved.push(bare.clone());
            return Var::new(bare, ty);
        }
        loop {
            let name = format!("{letter}#{}", self.counter);
            self.counter += 1;
            if !self.reserved.contains(&name) {
                self.reserved.push(name.clone());
                return Var::new(name, ty);
            }
        }
    }
}

/// Translation result: the existential variable tuple (possibly empty, all
/// end-star-typed) and the existential-free matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HRResult {
    pub evars: Vec<Var>,
    pub matrix: Formula,
}

#[derive(Debug, Error)]
pub enum HrError {
    #[error("ill-formed input formula:\n{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    IllFormed(Vec<Diagnostic>),
    #[error("witness count {got} does not match evar count {want}")]
    WitnessArity { want: usize, got: usize },
    #[error("probe requires all evars of type N*; evar `{0}` is not")]
    ProbeEvarType(String),
    #[error("probe sets are not componentwise included")]
    ProbeNotIncluded,
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn translate(f: &Formula, fr: &mut Freshener) -> HRResult {
    match f {
        Formula::Bot | Formula::Eq(..) | Formula::Mem(..) | Formula::Rel(..) => HRResult {
            evars: Vec::new(),
            matrix: f.clone(),
        },
        Formula::And(a, b) | Formula::Or(a, b) => {
            let ra = translate(a, fr);
            let rb = translate(b, fr);
            let mut evars = ra.evars;
            evars.extend(rb.evars);
            let matrix = match f {
                Formula::And(..) => Formula::and(ra.matrix, rb.matrix),
                _ => Formula::or(ra.matrix, rb.matrix),
            };
            HRResult { evars, matrix }
        }
        Formula::Imp(a, b) => {
            let ra = translate(a, fr);
            let rb = translate(b, fr);
            // One functional per conclusion evar, curried over the whole
            // premise tuple left to right.
            let prem_tys: Vec<Type> = ra.evars.iter().map(|v| v.ty.clone()).collect();
            let mut evars = Vec::new();
            let mut matrix = rb.matrix;
            for u in &rb.evars {
                let uf = fr.fresh("U", Type::arrows(&prem_tys, u.ty.clone()));
                let applied = Term::apps(
                    Term::Var(uf.clone()),
                    ra.evars.iter().map(|x| Term::Var(x.clone())),
                );
                matrix = subst_formula(&matrix, u, &applied);
                evars.push(uf);
            }
            let mut body = Formula::imp(ra.matrix, matrix);
            for x in ra.evars.iter().rev() {
                body = Formula::forall(x.clone(), body);
            }
            HRResult {
                evars,
                matrix: body,
            }
        }
        Formula::Exists(z, a) => {
            let ra = translate(a, fr);
            let zset = fr.fresh("Z", Type::star(z.ty.clone()));
            let mut evars = vec![zset.clone()];
            evars.extend(ra.evars);
            HRResult {
                evars,
                matrix: Formula::bexists(z.clone(), Term::Var(zset), ra.matrix),
            }
        }
        Formula::Forall(z, a) => {
            let ra = translate(a, fr);
            let mut evars = Vec::new();
            let mut matrix = ra.matrix;
            for x in &ra.evars {
                let xf = fr.fresh("X", Type::arrow(z.ty.clone(), x.ty.clone()));
                let applied = Term::app(Term::Var(xf.clone()), Term::Var(z.clone()));
                matrix = subst_formula(&matrix, x, &applied);
                evars.push(xf);
            }
            HRResult {
                evars,
                matrix: Formula::forall(z.clone(), matrix),
            }
        }
        Formula::BExists(z, t, a) => {
            let ra = translate(a, fr);
            HRResult {
                evars: ra.evars,
                matrix: Formula::bexists(z.clone(), t.clone(), ra.matrix),
            }
        }
        Formula::BForall(z, t, a) => {
            let ra = translate(a, fr);
            HRResult {
                evars: ra.evars,
                matrix: Formula::bforall(z.clone(), t.clone(), ra.matrix),
            }
        }
    }
}

/// Translates a well-formed formula. Deterministic given the freshener.
pub fn hr_translate(
    sig: &Signature,
    ctx: &Context,
    f: &Formula,
    fr: &mut Freshener,
) -> Result<HRResult, HrError> {
    let diags = well_formed(sig, ctx, f);
    if !diags.is_empty() {
        return Err(HrError::IllFormed(diags));
    }
    Ok(translate(f, fr))
}

/// Translation without the well-formedness gate, for callers that have
/// already checked the formula.
pub fn hr_translate_unchecked(f: &Formula, fr: &mut Freshener) -> HRResult {
    translate(f, fr)
}

/// Matrix with each existential variable replaced by the corresponding
/// witness term, positionally.
pub fn hr_matrix_instantiate(h: &HRResult, witnesses: &[Term]) -> Result<Formula, HrError> {
    if witnesses.len() != h.evars.len() {
        return Err(HrError::WitnessArity {
            want: h.evars.len(),
            got: witnesses.len(),
        });
    }
    let mut m = h.matrix.clone();
    for (v, w) in h.evars.iter().zip(witnesses) {
        m = subst_formula(&m, v, w);
    }
    Ok(m)
}

/// Outcome of one monotonicity instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeOutcome {
    Holds,
    Fails { smaller: String, larger: String },
    Undecidable(String),
}

/// Tests the monotonicity implication on one instance: with every evar of
/// type `N*`, witness sets `smaller` componentwise included in `larger`,
/// the matrix at `smaller` must entail the matrix at `larger`.
pub fn monotonicity_probe(
    sig: &Signature,
    ctx: &Context,
    f: &Formula,
    smaller: &[WitnessSet],
    larger: &[WitnessSet],
    rels: &RelTable,
    budget: Budget,
) -> Result<ProbeOutcome, HrError> {
    let mut fr = Freshener::for_formula(0, f, ctx);
    let h = hr_translate(sig, ctx, f, &mut fr)?;
    let nstar = Type::star(Type::Ground);
    for v in &h.evars {
        if v.ty != nstar {
            return Err(HrError::ProbeEvarType(v.name.clone()));
        }
    }
    if smaller.len() != h.evars.len() || larger.len() != h.evars.len() {
        return Err(HrError::WitnessArity {
            want: h.evars.len(),
            got: smaller.len().max(larger.len()),
        });
    }
    for (s, l) in smaller.iter().zip(larger) {
        if !s.is_subset(l) {
            return Err(HrError::ProbeNotIncluded);
        }
    }
    let small_terms: Vec<Term> = smaller.iter().map(WitnessSet::to_term).collect();
    let large_terms: Vec<Term> = larger.iter().map(WitnessSet::to_term).collect();
    let at_small = hr_matrix_instantiate(&h, &small_terms)?;
    let at_large = hr_matrix_instantiate(&h, &large_terms)?;
    let vs = eval_formula(sig, &at_small, rels, budget)?;
    let vl = eval_formula(sig, &at_large, rels, budget)?;
    match (vs, vl) {
        (EvalVerdict::Undecidable(r), _) | (_, EvalVerdict::Undecidable(r)) => {
            Ok(ProbeOutcome::Undecidable(r))
        }
        (EvalVerdict::True, EvalVerdict::False) => Ok(ProbeOutcome::Fails {
            smaller: format!("{at_small:?}"),
            larger: format!("{at_large:?}"),
        }),
        _ => Ok(ProbeOutcome::Holds),
    }
}

/// Checks the structural invariants of a translation result against the
/// input; used by tests and the fuzz entry point.
pub fn hr_invariants_violations(f: &Formula, h: &HRResult) -> Vec<String> {
    let mut out = Vec::new();
    for v in &h.evars {
        if !v.ty.is_end_star() {
            out.push(format!("evar `{}` is not end-star-typed", v.name));
        }
    }
    if !is_exists_free(&h.matrix) {
        out.push("matrix contains an unbounded existential".to_string());
    }
    if is_exists_free(f) {
        if !h.evars.is_empty() {
            out.push("existential-free input produced evars".to_string());
        }
        if h.matrix != *f {
            out.push("existential-free input not translated to itself".to_string());
        }
    }
    let fv_input = free_vars(f);
    let mut fv_matrix = free_vars(&h.matrix);
    fv_matrix.retain(|v| !h.evars.contains(v));
    if fv_matrix != fv_input {
        // Order-insensitive comparison; declaration order differs by clause.
        let mut a = fv_matrix.clone();
        let mut b = fv_input.clone();
        a.sort_by(|x, y| x.name.cmp(&y.name));
        b.sort_by(|x, y| x.name.cmp(&y.name));
        if a != b {
            out.push(format!(
                "free variables not preserved: input {:?}, matrix-minus-evars {:?}",
                b.iter().map(|v| &v.name).collect::<Vec<_>>(),
                a.iter().map(|v| &v.name).collect::<Vec<_>>()
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Const, Signature};
    use crate::logic::is_exists_free;

    fn g() -> Type {
        Type::Ground
    }

    fn sig_logic() -> Signature {
        Signature::new(
            crate::kernel::Mode::Logic,
            vec![("c".into(), g())],
            vec![],
            vec![("P".into(), 1), ("Q".into(), 1), ("R2".into(), 2)],
        )
        .unwrap()
    }

    fn translate_closed(sig: &Signature, f: &Formula) -> HRResult {
        let mut fr = Freshener::for_formula(0, f, &Context::new());
        hr_translate(sig, &Context::new(), f, &mut fr).unwrap()
    }

    #[test]
    fn atomic_formula_is_fixed() {
        let sig = sig_logic();
        let f = Formula::Rel("P".into(), vec![Term::Const(Const::User {
            name: "c".into(),
            ty: g(),
        })]);
        let h = translate_closed(&sig, &f);
        assert!(h.evars.is_empty());
        assert_eq!(h.matrix, f);
    }

    #[test]
    fn existential_introduces_a_set_variable() {
        let sig = sig_logic();
        let z = Var::new("z", g());
        let f = Formula::exists(z.clone(), Formula::Rel("P".into(), vec![Term::Var(z.clone())]));
        let h = translate_closed(&sig, &f);
        assert_eq!(h.evars.len(), 1);
        assert_eq!(h.evars[0].ty, Type::star(g()));
        assert_eq!(
            h.matrix,
            Formula::bexists(
                z.clone(),
                Term::Var(h.evars[0].clone()),
                Formula::Rel("P".into(), vec![Term::Var(z)])
            )
        );
    }

    #[test]
    fn forall_exists_gives_a_function_variable() {
        let sig = sig_logic();
        let z = Var::new("z", g());
        let w = Var::new("w", g());
        let f = Formula::forall(
            z.clone(),
            Formula::exists(
                w.clone(),
                Formula::Rel("R2".into(), vec![Term::Var(z.clone()), Term::Var(w.clone())]),
            ),
        );
        let h = translate_closed(&sig, &f);
        assert_eq!(h.evars.len(), 1);
        assert_eq!(h.evars[0].ty, Type::arrow(g(), Type::star(g())));
        // matrix: all z . ex w in (W z) . R2(z, w)
        let wz = Term::app(Term::Var(h.evars[0].clone()), Term::Var(z.clone()));
        assert_eq!(
            h.matrix,
            Formula::forall(
                z.clone(),
                Formula::bexists(
                    w.clone(),
                    wz,
                    Formula::Rel("R2".into(), vec![Term::Var(z), Term::Var(w)])
                )
            )
        );
    }

    #[test]
    fn implication_into_existential() {
        let sig = sig_logic();
        let c = Term::Const(Const::User {
            name: "c".into(),
            ty: g(),
        });
        let w = Var::new("w", g());
        let f = Formula::imp(
            Formula::Rel("P".into(), vec![c.clone()]),
            Formula::exists(w.clone(), Formula::Rel("Q".into(), vec![Term::Var(w.clone())])),
        );
        let h = translate_closed(&sig, &f);
        assert_eq!(h.evars.len(), 1);
        assert_eq!(h.evars[0].ty, Type::star(g()));
        assert_eq!(
            h.matrix,
            Formula::imp(
                Formula::Rel("P".into(), vec![c]),
                Formula::bexists(
                    w.clone(),
                    Term::Var(h.evars[0].clone()),
                    Formula::Rel("Q".into(), vec![Term::Var(w)])
                )
            )
        );
    }

    #[test]
    fn implication_curries_over_premise_tuple() {
        let sig = sig_logic();
        let z = Var::new("z", g());
        let w = Var::new("w", g());
        let f = Formula::imp(
            Formula::exists(z.clone(), Formula::Rel("P".into(), vec![Term::Var(z.clone())])),
            Formula::exists(w.clone(), Formula::Rel("Q".into(), vec![Term::Var(w.clone())])),
        );
        let h = translate_closed(&sig, &f);
        assert_eq!(h.evars.len(), 1);
        assert_eq!(
            h.evars[0].ty,
            Type::arrow(Type::star(g()), Type::star(g()))
        );
        // matrix: all Z . (ex z in Z . P(z)) -> ex w in (U Z) . Q(w)
        match &h.matrix {
            Formula::Forall(zv, body) => {
                assert_eq!(zv.ty, Type::star(g()));
                match body.as_ref() {
                    Formula::Imp(_, rhs) => match rhs.as_ref() {
                        Formula::BExists(_, bound, _) => {
                            assert_eq!(
                                *bound,
                                Term::app(
                                    Term::Var(h.evars[0].clone()),
                                    Term::Var(zv.clone())
                                )
                            );
                        }
                        other => panic!("unexpected rhs {other:?}"),
                    },
                    other => panic!("unexpected body {other:?}"),
                }
            }
            other => panic!("unexpected matrix {other:?}"),
        }
    }

    #[test]
    fn matrix_is_always_exists_free_and_evars_end_star() {
        let sig = sig_logic();
        let z = Var::new("z", g());
        let w = Var::new("w", g());
        let f = Formula::imp(
            Formula::forall(
                z.clone(),
                Formula::exists(w.clone(), Formula::Rel("R2".into(), vec![Term::Var(z.clone()), Term::Var(w.clone())])),
            ),
            Formula::exists(z.clone(), Formula::Rel("P".into(), vec![Term::Var(z.clone())])),
        );
        let h = translate_closed(&sig, &f);
        assert!(is_exists_free(&h.matrix));
        assert!(h.evars.iter().all(|v| v.ty.is_end_star()));
        assert!(hr_invariants_violations(&f, &h).is_empty());
    }

    #[test]
    fn instantiation_replaces_positionally() {
        let sig = sig_logic();
        let z = Var::new("z", g());
        let f = Formula::exists(z.clone(), Formula::Rel("P".into(), vec![Term::Var(z.clone())]));
        let h = translate_closed(&sig, &f);
        let c = Term::Const(Const::User {
            name: "c".into(),
            ty: g(),
        });
        let witness = Term::app(Term::Const(Const::Sing(g())), c);
        let inst = hr_matrix_instantiate(&h, &[witness.clone()]).unwrap();
        assert_eq!(
            inst,
            Formula::bexists(z.clone(), witness, Formula::Rel("P".into(), vec![Term::Var(z)]))
        );
        // Arity mismatch is an error.
        assert!(hr_matrix_instantiate(&h, &[]).is_err());
    }

    #[test]
    fn translation_is_deterministic() {
        let sig = sig_logic();
        let z = Var::new("z", g());
        let f = Formula::exists(z.clone(), Formula::Rel("P".into(), vec![Term::Var(z)]));
        let a = translate_closed(&sig, &f);
        let b = translate_closed(&sig, &f);
        assert_eq!(a, b);
    }

    #[test]
    fn freshener_avoids_reserved_names() {
        let mut fr = Freshener::new(0, vec!["Z".into(), "Z#0".into()]);
        let v = fr.fresh("Z", Type::star(g()));
        assert_eq!(v.name, "Z#1");
    }
}
