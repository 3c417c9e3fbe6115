//! Exact computation with self-similar group and graph actions, their germ
//! groupoids and Steinberg algebras over Q and GF(p).

pub mod action;
pub mod coeff;
pub mod error;
pub mod germs;
pub mod grigorchuk;
pub mod isg;
pub mod katsura;
pub mod report;
pub mod steinberg;
pub mod word;

pub use action::{AutomatonSystem, Bounds, GroupElement, SelfSimilar};
pub use coeff::{Field, Matrix, Scalar};
pub use error::{Error, Result};
pub use word::{EventuallyPeriodic, Letter, Word};
