//! IO companion to `emqs-core`: scenario files, ledgers, matrix export,
//! verdict reports, and the command-line front end.

pub mod compare;
pub mod ledger;
pub mod matrix_market;
pub mod scenario;
pub mod verdict;
