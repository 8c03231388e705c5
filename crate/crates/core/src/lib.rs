pub mod arc;
pub mod bounds;
pub mod calculus;
pub mod cli;
pub mod config;
pub mod error;
pub mod function;
pub mod harness;
pub mod jet;
pub mod optimize;
pub mod quadrature;
pub mod selftest;
pub mod divided_difference;
pub mod interpolation;
pub mod wide;
