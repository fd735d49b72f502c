pub mod fuzz;
pub mod logical;
pub mod rounds;
pub mod sweep;
