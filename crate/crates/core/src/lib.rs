//! Paracoherent answer sets of ground disjunctive logic programs.
//!
//! An incoherent program (one without answer sets, typically because of
//! cyclic default negation) still has *paracoherent* answer sets:
//! semi-stable models, read off the epistemic kappa transformation, and
//! semi-equilibrium models, read off the epistemic HT transformation. Both
//! are the answer sets of the transformed program whose *gap* (atoms believed
//! but not derived) is subset-minimal.
//!
//! The crate is split along the pipeline:
//!
//! * [`program`]: rules, signatures, the text parser and printer.
//! * [`transform`]: the kappa and HT transformations, gap rules, the `Π_M`
//!   constraints and the gap weak constraints.
//! * [`engine`]: a small disjunctive answer-set solver (reduct, minimality
//!   check, enumeration with blocking constraints, optimisation).
//! * [`algorithms`]: Filtering, Guess&Check, Minimize, Split and the
//!   weak-constraint method, plus full enumeration.
//! * [`oracle`]: exhaustive reference implementations used to certify results.
//! * [`bench`]: the comparison harness and transformation size report.
//!
//! ```
//! use paracoherent::{algorithms, program, transform};
//!
//! let p = program::parse("b :- not a. c :- not b. a :- c. d :- not d.").unwrap();
//! let tp = transform::kappa_transform(&p).unwrap();
//! let all = algorithms::enumerate_all(&tp, &Default::default()).unwrap();
//! let mut models: Vec<_> = all.models.iter().map(|m| m.model.names(tp.program.signature())).collect();
//! models.sort();
//! assert_eq!(models, [vec!["a", "c", "k_a", "k_d"], vec!["b", "k_b", "k_d"]]);
//! ```

pub mod algorithms;
pub mod bench;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod program;
pub mod transform;

pub use error::{Error, Result};
