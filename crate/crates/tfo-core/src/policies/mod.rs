//! The policy interface and the non-primal-dual algorithms.
//!
//! A policy consumes one task per period and produces a [`StepOutcome`] that
//! itemizes who was fired at the start of the period, who was hired, who was
//! outsourced, and what each cost. Policies are addressable by the CLI names
//! in [`PolicyKind`].

mod adaptive;
mod baselines;
mod heuristics;

use std::sync::Arc;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::model::{CostLedger, Marketplace, StepOutcome, Task, WorkerId};
use crate::money::Money;
use crate::setcover::CoverError;

pub use adaptive::TfoAdaptive;
pub use baselines::{AlwaysHire, AlwaysOutsource, SkiRental};
pub(crate) use heuristics::hire_span;
pub use heuristics::{LumpSumHeuristic, TfoHeuristic};

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("policy {policy}: {requirement}")]
    Unsupported {
        policy: &'static str,
        requirement: String,
    },
}

/// One online algorithm consuming a task stream.
pub trait Policy {
    fn name(&self) -> &'static str;

    /// Process the next task, mutating internal state and the ledger.
    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError>;

    /// Restore the initial state (including the RNG, for seeded policies).
    fn reset(&mut self);

    fn ledger(&self) -> &CostLedger;

    /// Workers currently hired.
    fn team(&self) -> &BitSet;

    /// Certified lower bound on the offline optimum, in currency units, for
    /// policies that track dual state.
    fn dual_lower_bound(&self) -> Option<f64> {
        None
    }

    /// Whether step costs include salaries for the current team. The lump-sum
    /// policies model a salary-free setting and return false.
    fn charges_salary(&self) -> bool {
        true
    }
}

/// The policies addressable by name on the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    AlwaysOutsource,
    AlwaysHire,
    SkiRental,
    LumpSumHeuristic,
    LumpSum,
    TfoHeuristic,
    Tfo,
    TfoAdaptive,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 8] = [
        PolicyKind::AlwaysOutsource,
        PolicyKind::AlwaysHire,
        PolicyKind::SkiRental,
        PolicyKind::LumpSumHeuristic,
        PolicyKind::LumpSum,
        PolicyKind::TfoHeuristic,
        PolicyKind::Tfo,
        PolicyKind::TfoAdaptive,
    ];

    pub fn cli_name(&self) -> &'static str {
        match self {
            PolicyKind::AlwaysOutsource => "always-outsource",
            PolicyKind::AlwaysHire => "always-hire",
            PolicyKind::SkiRental => "ski-rental",
            PolicyKind::LumpSumHeuristic => "lumpsum-heuristic",
            PolicyKind::LumpSum => "lumpsum",
            PolicyKind::TfoHeuristic => "tfo-heuristic",
            PolicyKind::Tfo => "tfo",
            PolicyKind::TfoAdaptive => "tfo-adaptive",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<PolicyKind> {
        PolicyKind::ALL.iter().copied().find(|k| k.cli_name() == name)
    }

    /// Stable id used in seed derivation; never reassigned.
    pub fn stable_id(&self) -> u64 {
        match self {
            PolicyKind::AlwaysOutsource => 1,
            PolicyKind::AlwaysHire => 2,
            PolicyKind::SkiRental => 3,
            PolicyKind::LumpSumHeuristic => 4,
            PolicyKind::LumpSum => 5,
            PolicyKind::TfoHeuristic => 6,
            PolicyKind::Tfo => 7,
            PolicyKind::TfoAdaptive => 8,
        }
    }

    /// Instantiate the policy for a marketplace. `seed` feeds the randomized
    /// policies and is ignored by the deterministic ones.
    pub fn build(
        &self,
        market: Arc<Marketplace>,
        seed: u64,
    ) -> Result<Box<dyn Policy>, PolicyError> {
        Ok(match self {
            PolicyKind::AlwaysOutsource => Box::new(AlwaysOutsource::new(market)),
            PolicyKind::AlwaysHire => Box::new(AlwaysHire::new(market)),
            PolicyKind::SkiRental => Box::new(SkiRental::new(market)?),
            PolicyKind::LumpSumHeuristic => Box::new(LumpSumHeuristic::new(market)?),
            PolicyKind::LumpSum => {
                Box::new(crate::primal_dual::LumpSumPolicy::new(market, seed))
            }
            PolicyKind::TfoHeuristic => Box::new(TfoHeuristic::new(market)),
            PolicyKind::Tfo => Box::new(crate::primal_dual::TfoPolicy::new(market, seed)),
            PolicyKind::TfoAdaptive => Box::new(TfoAdaptive::new(market, seed)?),
        })
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// Hired-team bookkeeping shared by the hiring policies: membership, covered
/// skills (by reference count), and the per-period salary bill.
#[derive(Clone, Debug)]
pub(crate) struct TeamState {
    members: BitSet,
    skills: BitSet,
    skill_cover_count: Vec<u32>,
    salary_per_period: Money,
}

impl TeamState {
    pub fn new(market: &Marketplace) -> Self {
        Self {
            members: BitSet::new(market.worker_count()),
            skills: BitSet::new(market.skill_count()),
            skill_cover_count: vec![0; market.skill_count()],
            salary_per_period: Money::ZERO,
        }
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn skills(&self) -> &BitSet {
        &self.skills
    }

    pub fn salary_per_period(&self) -> Money {
        self.salary_per_period
    }

    pub fn contains(&self, r: WorkerId) -> bool {
        self.members.contains(r)
    }

    pub fn hire(&mut self, r: WorkerId, market: &Marketplace) {
        debug_assert!(!self.members.contains(r));
        self.members.insert(r);
        self.salary_per_period += market.worker(r).salary;
        for s in market.worker(r).skills.iter() {
            self.skill_cover_count[s] += 1;
            self.skills.insert(s);
        }
    }

    pub fn fire(&mut self, r: WorkerId, market: &Marketplace) {
        debug_assert!(self.members.contains(r));
        self.members.remove(r);
        self.salary_per_period -= market.worker(r).salary;
        for s in market.worker(r).skills.iter() {
            self.skill_cover_count[s] -= 1;
            if self.skill_cover_count[s] == 0 {
                self.skills.remove(s);
            }
        }
    }
}
