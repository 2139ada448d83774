//! Concrete syntax: lexer, parsers and printers for types, terms,
//! signatures, formulas, proof scripts and binding files.
//!
//! Application is fully parenthesized and n-ary: `(f a b)` associates to
//! the left. Two derived forms are accepted for writability and expand at
//! parse time, leaving the AST binder-free: `\x:T. t` (and `\x:T, y:U. t`)
//! expands through bracket abstraction, and decimal literals expand to
//! numerals in arithmetic mode. `~A` and `A <-> B` are formula sugar.
//! Line comments start with `--`.

mod lex;
mod parse;
mod print;

pub use lex::{Lexer, ParseError, Span, Tok};
pub use parse::{
    parse_bindings_file, parse_formula_file, parse_formula_str, parse_proof_file,
    parse_signature_file, parse_term_file, parse_term_str, parse_type_str, Bindings,
};
pub use print::{print_formula, print_term, print_type};
