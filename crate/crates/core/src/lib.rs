pub mod causal;
pub mod channel;
pub mod cli;
pub mod disint;
pub mod error;
pub mod kernel;
pub mod laws;
pub mod nestedq;
pub mod netmodel;
pub mod inference;
