use crate::kernel::{Const, Mode, Signature, Term, Type};
use crate::logic::Formula;

pub fn print_type(sig: &Signature, t: &Type) -> String {
    t.show(sig.ground_name())
}

/// Postfix-position annotation: arrow types need parentheses there.
fn print_type_annot(sig: &Signature, t: &Type) -> String {
    match t {
        Type::Arrow(..) => format!("({})", t.show(sig.ground_name())),
        _ => t.show(sig.ground_name()),
    }
}

fn print_const(sig: &Signature, c: &Const) -> String {
    let ty = |t: &Type| t.show(sig.ground_name());
    match c {
        Const::Pi { first, second } => format!("PI[{},{}]", ty(first), ty(second)),
        Const::Sigma { a, b, c } => format!("SIG[{},{},{}]", ty(a), ty(b), ty(c)),
        Const::Sing(s) => format!("SET[{}]", ty(s)),
        Const::Cup(s) => format!("CUP[{}]", ty(s)),
        Const::BigCup { from, to } => format!("BIGCUP[{},{}]", ty(from), ty(to)),
        Const::Zero => "ZERO".to_string(),
        Const::Succ => "SUC".to_string(),
        Const::Rec(s) => format!("REC[{}]", ty(s)),
        Const::User { name, .. } => name.clone(),
    }
}

/// Fully parenthesized application; numeral spines print as decimals in
/// arithmetic mode.
pub fn print_term(sig: &Signature, t: &Term) -> String {
    if sig.mode == Mode::Arithmetic {
        if let Some(n) = t.as_numeral_literal() {
            return n.to_string();
        }
    }
    match t {
        Term::Const(c) => print_const(sig, c),
        Term::Var(v) => v.name.clone(),
        Term::App(..) => {
            let (head, args) = t.spine();
            let mut out = String::from("(");
            out.push_str(&print_term(sig, head));
            for a in args {
                out.push(' ');
                out.push_str(&print_term(sig, a));
            }
            out.push(')');
            out
        }
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Forall(..) | Formula::Exists(..) | Formula::BForall(..) | Formula::BExists(..) => 0,
        Formula::Imp(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        _ => 4,
    }
}

fn print_at(sig: &Signature, f: &Formula, level: u8, out: &mut String) {
    let needs = prec(f) < level;
    if needs {
        out.push('(');
    }
    match f {
        Formula::Bot => out.push_str("bot"),
        Formula::Eq(rho, l, r) => {
            out.push_str(&print_term(sig, l));
            out.push_str(" = ");
            out.push_str(&print_term(sig, r));
            out.push_str(" : ");
            out.push_str(&print_type_annot(sig, rho));
        }
        Formula::Mem(rho, l, r) => {
            out.push_str(&print_term(sig, l));
            out.push_str(" in ");
            out.push_str(&print_term(sig, r));
            out.push_str(" : ");
            out.push_str(&print_type_annot(sig, rho));
        }
        Formula::Rel(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&print_term(sig, a));
            }
            out.push(')');
        }
        Formula::And(a, b) => {
            print_at(sig, a, 3, out);
            out.push_str(" & ");
            print_at(sig, b, 4, out);
        }
        Formula::Or(a, b) => {
            print_at(sig, a, 2, out);
            out.push_str(" | ");
            print_at(sig, b, 3, out);
        }
        Formula::Imp(a, b) => {
            print_at(sig, a, 2, out);
            out.push_str(" -> ");
            print_at(sig, b, 1, out);
        }
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            out.push_str(if matches!(f, Formula::Forall(..)) {
                "all "
            } else {
                "ex "
            });
            out.push_str(&x.name);
            out.push(':');
            out.push_str(&print_type(sig, &x.ty));
            out.push_str(" . ");
            print_at(sig, a, 0, out);
        }
        Formula::BForall(x, t, a) | Formula::BExists(x, t, a) => {
            out.push_str(if matches!(f, Formula::BForall(..)) {
                "all "
            } else {
                "ex "
            });
            out.push_str(&x.name);
            out.push_str(" in ");
            out.push_str(&print_term(sig, t));
            out.push_str(" . ");
            print_at(sig, a, 0, out);
        }
    }
    if needs {
        out.push(')');
    }
}

pub fn print_formula(sig: &Signature, f: &Formula) -> String {
    let mut out = String::new();
    print_at(sig, f, 0, &mut out);
    out
}
