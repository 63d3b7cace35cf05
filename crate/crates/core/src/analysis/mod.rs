//! Monte Carlo logical error rates, pseudothreshold search and the closed-form
//! scaling formulas of concatenated coding.

mod formulas;
mod memory;
mod report;
mod threshold;

pub use formulas::{
    allowed_error_rate, block_error_tradeoff, concatenation_flow, factoring_resources, min_block_error, numeric_optimum, optimal_t,
    required_block_size, BlockExponent, FlowTrace, Resources,
};
pub use memory::{estimate_logical_error_rate, estimate_with, wilson_interval, LogicalErrorEstimate, MemoryConfig, MemoryProtocol};
pub use report::{config_digest, write_csv, CSV_HEADER};
pub use threshold::{
    analytic_crossing, pseudothreshold, NoiseFamily, Reference, Side, ThresholdConfig, ThresholdEstimate, ThresholdStep,
};
