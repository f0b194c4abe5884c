//! Shared test oracles.

#![allow(dead_code)]

pub mod audit;
pub mod interval;
