//! Exact computation and structural verification of homological rotation
//! sets for symbolic Axiom A surface dynamics.

pub mod analysis;
pub mod config;
pub mod conley;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod geom;
pub mod heteroclinic;
pub mod markov;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod rational;
pub mod validation;
