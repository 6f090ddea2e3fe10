//! Reference implementations and randomized checks shared by the integration
//! tests and the acceptance suite. Nothing here calls the search or fitting
//! code it is used to verify.

#![allow(dead_code, clippy::needless_range_loop)]

pub mod data;
pub mod invariants;
pub mod psa_o_ref;
pub mod psa_s_ref;
pub mod spectra;
