//! Occur-check analysis for logic programs.
//!
//! The crate answers two families of questions about unification without the
//! occur-check, as performed by most Prolog engines:
//!
//! * dynamic: given an equation set, a program and a query, can any
//!   unification run or SLD-derivation hit an occur-check, and is there at
//!   least one run that avoids it (`unify`, `sld`);
//! * static: do the mode-based syntactic conditions (tidiness, nice/well
//!   modedness, weak linearity, weak tidiness) that guarantee freedom from the
//!   occur-check hold for a program and query (`modes`, `report`).

pub mod corpus;
pub mod modes;
pub mod parser;
pub mod report;
pub mod sld;
pub mod term;
pub mod unify;

pub use term::{Atom, Clause, Equation, EquationSet, Program, Query, Substitution, Term};
