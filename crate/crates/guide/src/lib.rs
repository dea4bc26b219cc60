//! Runs the code blocks of the book as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/programs.md")]
pub mod programs {}
#[doc = include_str!("../../../book/src/answer-sets.md")]
pub mod answer_sets {}
#[doc = include_str!("../../../book/src/transformations.md")]
pub mod transformations {}
#[doc = include_str!("../../../book/src/paracoherent.md")]
pub mod paracoherent {}
#[doc = include_str!("../../../book/src/algorithms.md")]
pub mod algorithms {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
