// negated float comparisons below are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coboson;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod mode;
pub mod operator;
pub mod protocols;
pub mod rdm;
pub mod sector;
pub mod state;
