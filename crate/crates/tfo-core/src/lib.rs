//! Online team formation with outsourcing.
//!
//! Tasks arrive one at a time, each requiring a set of skills. A policy
//! decides, per task, which workers to hire (one-time fee plus a recurring
//! salary), keep, fire, or outsource (per-task fee), so that every task is
//! covered and the total cost stays small against the offline optimum.
//!
//! The crate provides:
//!
//! * [`model`] -- skills, workers, tasks, marketplaces, validation, ledgers;
//! * [`setcover`] -- the greedy cover used by every policy plus an exact
//!   enumeration oracle;
//! * [`policies`] -- baselines (always-outsource, always-hire, ski-rental),
//!   the charge-accumulating heuristics, and the adaptive meta-policy;
//! * [`primal_dual`] -- the multiplicative-weight fractional state with
//!   randomized rounding behind the `lumpsum` and `tfo` policies, including
//!   dual tracking for certified lower bounds;
//! * [`workload`] -- synthetic marketplace generation, coherent task streams,
//!   and the line-oriented file formats;
//! * [`oracle`] -- an exact offline optimum for tiny instances and empirical
//!   competitive-ratio measurement;
//! * [`harness`] -- seeded multi-stream experiment orchestration with CSV
//!   emission.

pub mod bitset;
pub mod harness;
pub mod model;
pub mod money;
pub mod oracle;
pub mod policies;
pub mod primal_dual;
pub mod seeding;
pub mod setcover;
pub mod workload;

pub use bitset::BitSet;
pub use model::{
    cover_check, validate_marketplace, CostBreakdown, CostLedger, Marketplace, SkillId,
    StepOutcome, Task, ValidationReport, Worker, WorkerId, WorkerSpec,
};
pub use money::Money;
pub use policies::{Policy, PolicyError, PolicyKind};
