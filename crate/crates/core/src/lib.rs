pub mod calculus;
pub mod conditions;
pub mod config;
pub mod io;
pub mod optimizer;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod symbols;
