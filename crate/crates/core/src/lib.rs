//! Exact F-pure thresholds of quasi-homogeneous polynomials with isolated
//! singularities over prime fields.

pub mod basep;
pub mod candidates;
pub mod corpus;
pub mod error;
pub mod fptengine;
pub mod gradedpoly;
pub mod lct;
pub mod rational;

pub use error::{FptError, Result};
pub use rational::Rational;
