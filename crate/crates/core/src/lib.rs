//! An embeddable Prolog engine, a host boundary with deep and opaque
//! conversion regimes, and a harness for measuring crossing overhead.

pub mod bench;
pub mod bridge;
pub mod engine;
pub mod reader;
pub mod terms;
