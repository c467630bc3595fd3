//! Experiment harness for the `qmi-core` optimizers: seeded ensemble runs,
//! report files and fixture verification.

pub mod config;
pub mod kv;
pub mod output;
pub mod run;
pub mod verify;
