//! Terms, binding, parsing and printing.

pub mod alg;
pub mod parse;
pub mod prefix;
pub mod print;
pub mod subst;
pub mod term;

pub use alg::{parse_alg_term, AlgTerm};
pub use parse::{parse_file, parse_term, Item, Located, ParseError};
pub use subst::{alpha_eq, free_names, fresh, occurs_free, subst, subst_clock, subst_tick, FreeNames};
pub use term::{Abs, Clocks, Kind, Name, Term};
