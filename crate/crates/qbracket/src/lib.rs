//! Exact q-series machinery for partition q-brackets.

pub mod characters;
pub mod cli;
pub mod correlators;
pub mod partitions;
pub mod quasimodular;
pub mod rational;
pub mod report;
pub mod series;
pub mod setcomb;
pub mod skew;
pub mod special;
