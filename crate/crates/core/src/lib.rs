//! Variable words over increasing alphabet ladders.

pub mod cli;
pub mod coloring;
pub mod hj;
pub mod largeness;
pub mod span;
pub mod word;
