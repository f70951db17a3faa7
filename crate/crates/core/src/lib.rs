//! GPU-free building blocks for an LLM training pipeline: corpus
//! ingestion and mixing, rule-based quality filtering, exact and
//! near-duplicate removal, safety screening, BPE tokenizer training and
//! vocabulary merging, SFT sequence packing, 3D-parallelism planning,
//! preference-optimization numerics, rotary-embedding length
//! extrapolation, and prompt-orchestration pipelines over an abstract
//! generation client.

pub mod align;
pub mod corpus;
pub mod dedup;
pub mod error;
pub mod orchestration;
pub mod packing;
pub mod planner;
pub mod quality;
pub mod rope;
pub mod safety;
pub mod tokenizer;

pub use error::{Error, Result};
