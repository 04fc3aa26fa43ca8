//! Test-only oracles, written without reference to the simulator code.

#![allow(dead_code)]

pub mod ctmc;
pub mod props;
