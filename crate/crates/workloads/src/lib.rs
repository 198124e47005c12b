//! The benchmark workloads: five monitors (bounded buffer, sorted linked
//! list, round-robin access, parametrized bounded buffer, ticketed
//! readers/writers) with matching sequential oracles, coarse-lock and
//! fine-grained-lock baselines, and seeded, reproducible drivers.

pub mod driver;
pub mod error;
pub mod locks;
pub mod monitors;
pub mod oracle;
pub mod states;
pub mod streams;

pub use driver::{outside_work, run_active, run_locked, RunOutput, Workload, WorkloadConfig};
pub use error::WorkloadError;
pub use monitors::{
    build_bounded_buffer, build_parametrized_buffer, build_round_robin, build_sorted_list,
    build_ticketed_rw,
};
pub use oracle::{check_history, OracleViolation};
