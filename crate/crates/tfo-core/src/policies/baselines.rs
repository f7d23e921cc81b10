//! Baseline policies: always-outsource, always-hire, and ski-rental.

use std::sync::Arc;

use crate::bitset::BitSet;
use crate::model::{CostLedger, Marketplace, StepOutcome, Task};
use crate::money::Money;
use crate::policies::{Policy, PolicyError, TeamState};
use crate::setcover::{greedy_cover, CoverError};

/// Never hires; covers each task with a greedy outsourcing cover.
pub struct AlwaysOutsource {
    market: Arc<Marketplace>,
    team: BitSet,
    ledger: CostLedger,
    t: usize,
}

impl AlwaysOutsource {
    pub fn new(market: Arc<Marketplace>) -> Self {
        let team = BitSet::new(market.worker_count());
        Self {
            market,
            team,
            ledger: CostLedger::new(),
            t: 0,
        }
    }
}

impl Policy for AlwaysOutsource {
    fn name(&self) -> &'static str {
        "always-outsource"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let mut outcome = StepOutcome::empty(self.t);
        if !task.skills.is_empty() {
            let candidates = self.market.pool_union(&task.skills);
            let sol = greedy_cover(
                &task.skills,
                &candidates,
                |r| self.market.worker(r).outsource_fee,
                &self.market,
            )?;
            outcome.outsourced = sol.selected;
            outcome.outsourced.sort_unstable();
            outcome.step_cost.outsourcing = sol.cost;
        }
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        self.ledger = CostLedger::new();
        self.t = 0;
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn team(&self) -> &BitSet {
        &self.team
    }
}

/// Hires a greedy cover (by hiring fee) of each task's uncovered skills and
/// never fires; salaries accrue for every hired worker every period.
pub struct AlwaysHire {
    market: Arc<Marketplace>,
    team: TeamState,
    ledger: CostLedger,
    t: usize,
}

impl AlwaysHire {
    pub fn new(market: Arc<Marketplace>) -> Self {
        let team = TeamState::new(&market);
        Self {
            market,
            team,
            ledger: CostLedger::new(),
            t: 0,
        }
    }
}

impl Policy for AlwaysHire {
    fn name(&self) -> &'static str {
        "always-hire"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let mut outcome = StepOutcome::empty(self.t);
        let mut uncovered = task.skills.clone();
        uncovered.difference_with(self.team.skills());
        if !uncovered.is_empty() {
            let candidates = self.market.pool_union(&uncovered);
            let sol = greedy_cover(
                &uncovered,
                &candidates,
                |r| self.market.worker(r).hiring_fee,
                &self.market,
            )?;
            for &r in &sol.selected {
                self.team.hire(r, &self.market);
            }
            outcome.hired = sol.selected;
            outcome.hired.sort_unstable();
            outcome.step_cost.hiring = sol.cost;
        }
        outcome.step_cost.salary = self.team.salary_per_period();
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        self.team = TeamState::new(&self.market);
        self.ledger = CostLedger::new();
        self.t = 0;
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn team(&self) -> &BitSet {
        self.team.members()
    }
}

/// The rent-or-buy rule for the single-worker special case: outsource while
/// the accumulated outsourcing spend stays below the hiring fee, hire at the
/// first task where it would reach it.
pub struct SkiRental {
    market: Arc<Marketplace>,
    team: TeamState,
    paid_outsourcing: Money,
    ledger: CostLedger,
    t: usize,
}

impl SkiRental {
    /// Requires a single-worker marketplace.
    pub fn new(market: Arc<Marketplace>) -> Result<Self, PolicyError> {
        if market.worker_count() != 1 {
            return Err(PolicyError::Unsupported {
                policy: "ski-rental",
                requirement: format!(
                    "requires exactly one worker, marketplace has {}",
                    market.worker_count()
                ),
            });
        }
        let team = TeamState::new(&market);
        Ok(Self {
            market,
            team,
            paid_outsourcing: Money::ZERO,
            ledger: CostLedger::new(),
            t: 0,
        })
    }
}

impl Policy for SkiRental {
    fn name(&self) -> &'static str {
        "ski-rental"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let mut outcome = StepOutcome::empty(self.t);
        let worker = self.market.worker(0);
        if !task.skills.is_subset_of(&worker.skills) {
            let mut missing = task.skills.clone();
            missing.difference_with(&worker.skills);
            return Err(CoverError::Uncoverable {
                skill: missing.first().expect("missing skill"),
            }
            .into());
        }
        if self.team.contains(0) {
            outcome.step_cost.salary = self.team.salary_per_period();
        } else if !task.skills.is_empty() {
            if self.paid_outsourcing + worker.outsource_fee < worker.hiring_fee {
                self.paid_outsourcing += worker.outsource_fee;
                outcome.outsourced.push(0);
                outcome.step_cost.outsourcing = worker.outsource_fee;
            } else {
                self.team.hire(0, &self.market);
                outcome.hired.push(0);
                outcome.step_cost.hiring = worker.hiring_fee;
                outcome.step_cost.salary = self.team.salary_per_period();
            }
        }
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        self.team = TeamState::new(&self.market);
        self.paid_outsourcing = Money::ZERO;
        self.ledger = CostLedger::new();
        self.t = 0;
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn team(&self) -> &BitSet {
        self.team.members()
    }
}
