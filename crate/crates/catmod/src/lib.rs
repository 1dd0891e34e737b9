//! Exact computations for truncated modules over graded combinatorial
//! categories: N^d, FI, OI, FI_d, OI_d, FI^d and OI^d.

pub mod category;
pub mod exactla;
pub mod modrep;
pub mod inductive;
pub mod homology;
pub mod cli;
