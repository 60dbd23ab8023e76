//! Set functors, terminal sequences, bisimilarity and weak bisimilarity on
//! the truncated delay monad.

pub mod bisim;
pub mod file;
pub mod functor;
pub mod stage_law;
pub mod terminal;
pub mod weak;

pub use functor::FunctorExpr;
pub use terminal::{terminal_sequence, Coalgebra, TerminalSeq};
