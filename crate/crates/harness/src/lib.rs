//! Test harness: extremal functions, seeded families, verification suites,
//! reports and the `affiq` command line.

pub mod cli;
pub mod extremals;
pub mod families;
pub mod poincare;
pub mod report;
pub mod suites;
