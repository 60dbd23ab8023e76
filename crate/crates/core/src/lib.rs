pub mod cli;
pub mod coalgebra;
pub mod kernel;
pub mod model;
pub mod report;
pub mod syntax;
pub mod theories;
pub mod value;
