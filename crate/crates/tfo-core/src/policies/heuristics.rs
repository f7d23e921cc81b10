//! Charge-accumulating heuristics.
//!
//! Both heuristics outsource each task's uncovered skills through a greedy
//! cover and add every payment to a per-worker charge counter `delta`. A
//! worker is hired once the accumulated charge reaches a threshold: the
//! hiring fee in the salary-free setting, or the full cost of a fixed-length
//! hiring interval (`C + eta * sigma`, with `eta = ceil(C / sigma)`) when
//! salaries apply, after which the worker is fired again `eta` periods later.
//!
//! The hire lands in the same period as the outsourcing payment that pushed
//! the charge over the threshold, so that period pays both.

use std::sync::Arc;

use crate::bitset::BitSet;
use crate::model::{CostLedger, Marketplace, StepOutcome, Task, WorkerId};
use crate::money::Money;
use crate::policies::{Policy, PolicyError, TeamState};
use crate::setcover::greedy_cover;

/// Periods a hired worker stays before being fired; `None` means forever
/// (zero salary). `eta = ceil(C / sigma)` computed on exact cents.
pub(crate) fn hire_span(market: &Marketplace, r: WorkerId) -> Option<usize> {
    let w = market.worker(r);
    if w.salary.is_zero() {
        None
    } else {
        let (c, s) = (w.hiring_fee.cents(), w.salary.cents());
        Some(((c + s - 1) / s) as usize)
    }
}

/// Charge threshold at which the worker is hired: `C + eta * sigma`, which
/// degenerates to `C` when the salary is zero.
fn hire_threshold(market: &Marketplace, r: WorkerId) -> Money {
    let w = market.worker(r);
    match hire_span(market, r) {
        None => w.hiring_fee,
        Some(eta) => w.hiring_fee + Money::from_cents(w.salary.cents() * eta as i64),
    }
}

/// The salary-free heuristic: hire a worker once the outsourcing payments
/// made to them reach the hiring fee. Never fires.
pub struct LumpSumHeuristic {
    market: Arc<Marketplace>,
    team: TeamState,
    delta: Vec<Money>,
    ledger: CostLedger,
    t: usize,
}

impl LumpSumHeuristic {
    /// Requires a salary-free marketplace; with salaries, use the
    /// interval-firing generalization [`TfoHeuristic`].
    pub fn new(market: Arc<Marketplace>) -> Result<Self, PolicyError> {
        if let Some(w) = market.workers().iter().find(|w| !w.salary.is_zero()) {
            return Err(PolicyError::Unsupported {
                policy: "lumpsum-heuristic",
                requirement: format!("requires zero salaries, worker {} has {}", w.id, w.salary),
            });
        }
        let team = TeamState::new(&market);
        let delta = vec![Money::ZERO; market.worker_count()];
        Ok(Self {
            market,
            team,
            delta,
            ledger: CostLedger::new(),
            t: 0,
        })
    }
}

impl Policy for LumpSumHeuristic {
    fn name(&self) -> &'static str {
        "lumpsum-heuristic"
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
                |r| self.market.worker(r).outsource_fee,
                &self.market,
            )?;
            outcome.step_cost.outsourcing = sol.cost;
            for &r in &sol.selected {
                self.delta[r] += self.market.worker(r).outsource_fee;
                if self.delta[r] >= self.market.worker(r).hiring_fee {
                    self.team.hire(r, &self.market);
                    outcome.hired.push(r);
                    outcome.step_cost.hiring += self.market.worker(r).hiring_fee;
                }
            }
            outcome.outsourced = sol.selected;
            outcome.outsourced.sort_unstable();
            outcome.hired.sort_unstable();
        }
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        self.team = TeamState::new(&self.market);
        self.delta = vec![Money::ZERO; self.market.worker_count()];
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

/// The general heuristic: like [`LumpSumHeuristic`] but with the interval
/// threshold `C + eta * sigma`, salaries charged per hired period, and a
/// firing clock that releases each worker after `eta` periods.
pub struct TfoHeuristic {
    market: Arc<Marketplace>,
    team: TeamState,
    delta: Vec<Money>,
    /// Periods since hire, for hired workers.
    hire_age: Vec<usize>,
    eta: Vec<Option<usize>>,
    threshold: Vec<Money>,
    ledger: CostLedger,
    t: usize,
}

impl TfoHeuristic {
    pub fn new(market: Arc<Marketplace>) -> Self {
        let n = market.worker_count();
        let eta = (0..n).map(|r| hire_span(&market, r)).collect();
        let threshold = (0..n).map(|r| hire_threshold(&market, r)).collect();
        let team = TeamState::new(&market);
        Self {
            market,
            team,
            delta: vec![Money::ZERO; n],
            hire_age: vec![0; n],
            eta,
            threshold,
            ledger: CostLedger::new(),
            t: 0,
        }
    }
}

impl Policy for TfoHeuristic {
    fn name(&self) -> &'static str {
        "tfo-heuristic"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let mut outcome = StepOutcome::empty(self.t);

        // Fire workers whose interval elapsed; their charge restarts from 0.
        let expired: Vec<WorkerId> = self
            .team
            .members()
            .iter()
            .filter(|&r| self.eta[r] == Some(self.hire_age[r]))
            .collect();
        for &r in &expired {
            self.team.fire(r, &self.market);
            self.delta[r] = Money::ZERO;
        }
        outcome.fired = expired;

        let mut uncovered = task.skills.clone();
        uncovered.difference_with(self.team.skills());
        if !uncovered.is_empty() {
            let candidates = self.market.pool_union(&uncovered);
            let sol = greedy_cover(
                &uncovered,
                &candidates,
                |r| self.market.worker(r).outsource_fee,
                &self.market,
            )?;
            outcome.step_cost.outsourcing = sol.cost;
            for &r in &sol.selected {
                self.delta[r] += self.market.worker(r).outsource_fee;
                if self.delta[r] >= self.threshold[r] {
                    self.team.hire(r, &self.market);
                    self.hire_age[r] = 0;
                    outcome.hired.push(r);
                    outcome.step_cost.hiring += self.market.worker(r).hiring_fee;
                }
            }
            outcome.outsourced = sol.selected;
            outcome.outsourced.sort_unstable();
            outcome.hired.sort_unstable();
        }

        outcome.step_cost.salary = self.team.salary_per_period();
        for r in self.team.members().iter() {
            self.hire_age[r] += 1;
        }
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        let n = self.market.worker_count();
        self.team = TeamState::new(&self.market);
        self.delta = vec![Money::ZERO; n];
        self.hire_age = vec![0; n];
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Task;

    /// The two-worker trap: the greedy ratio always prefers the slightly
    /// cheaper outsource fee, accumulating charge against a huge hiring fee,
    /// while hiring the other worker once would have settled everything.
    pub(crate) fn pathological_market(m: f64) -> Marketplace {
        Marketplace::from_rows(
            1,
            &[(&[0], 1.0, m, 0.0), (&[0], 1.1, 2.0, 0.0)],
        )
    }

    #[test]
    fn lumpsum_heuristic_rejects_salaried_marketplaces() {
        let market = Arc::new(Marketplace::from_rows(1, &[(&[0], 2.0, 5.0, 1.0)]));
        assert!(LumpSumHeuristic::new(market).is_err());
    }

    #[test]
    fn lumpsum_heuristic_charge_accumulates_to_hire() {
        // lambda=2, C=5: delta hits 6 >= 5 on the third task.
        let market = Arc::new(Marketplace::from_rows(1, &[(&[0], 2.0, 5.0, 0.0)]));
        let mut policy = LumpSumHeuristic::new(market).unwrap();
        let task = Task::new(1, [0]);
        let o1 = policy.step(&task).unwrap();
        let o2 = policy.step(&task).unwrap();
        let o3 = policy.step(&task).unwrap();
        assert!(o1.hired.is_empty() && o2.hired.is_empty());
        assert_eq!(o3.hired, vec![0]);
        assert_eq!(o3.outsourced, vec![0]);
        assert_eq!(o3.step_cost.total(), Money::from_units(7.0));
        assert_eq!(policy.ledger().total(), Money::from_units(11.0));
    }

    #[test]
    fn lumpsum_heuristic_pathological_instance() {
        let market = Arc::new(pathological_market(100.0));
        let mut policy = LumpSumHeuristic::new(market).unwrap();
        let task = Task::new(1, [0]);
        let mut hire_period = None;
        for t in 1..=200 {
            let out = policy.step(&task).unwrap();
            assert!(out.fired.is_empty(), "never fires without salaries");
            if !out.hired.is_empty() {
                assert_eq!(out.hired, vec![0]);
                hire_period.get_or_insert(t);
            }
        }
        assert_eq!(hire_period, Some(100));
        assert_eq!(policy.ledger().total(), Money::from_units(200.0));
    }

    #[test]
    fn lumpsum_heuristic_covered_task_is_free() {
        let market = Arc::new(Marketplace::from_rows(1, &[(&[0], 2.0, 2.0, 0.0)]));
        let mut policy = LumpSumHeuristic::new(market).unwrap();
        let task = Task::new(1, [0]);
        policy.step(&task).unwrap(); // delta reaches C immediately
        let out = policy.step(&task).unwrap();
        assert_eq!(out, StepOutcome::empty(2));
    }

    #[test]
    fn tfo_heuristic_interval_trace() {
        // lambda=2, C=4, sigma=1: eta=4, threshold 8; hire on the 4th task,
        // salaries through the 7th, fired at the start of the 8th.
        let market = Arc::new(Marketplace::from_rows(1, &[(&[0], 2.0, 4.0, 1.0)]));
        let mut policy = TfoHeuristic::new(market);
        assert_eq!(policy.eta[0], Some(4));
        assert_eq!(policy.threshold[0], Money::from_units(8.0));
        let task = Task::new(1, [0]);
        let mut totals = Vec::new();
        let mut outs = Vec::new();
        for _ in 0..8 {
            let o = policy.step(&task).unwrap();
            totals.push(o.step_cost.total().as_units());
            outs.push(o);
        }
        assert_eq!(totals, vec![2.0, 2.0, 2.0, 7.0, 1.0, 1.0, 1.0, 2.0]);
        assert_eq!(outs[3].hired, vec![0]);
        assert_eq!(outs[7].fired, vec![0]);
        // After firing, the charge restarts: the 8th task outsources again.
        assert_eq!(outs[7].outsourced, vec![0]);
    }

    #[test]
    fn eta_definition() {
        let market = Marketplace::from_rows(1, &[(&[0], 20.0, 10.0, 3.0)]);
        assert_eq!(hire_span(&market, 0), Some(4));
    }

    #[test]
    fn tfo_heuristic_degenerates_to_lumpsum_without_salaries() {
        let market = Arc::new(pathological_market(100.0));
        let mut tfo = TfoHeuristic::new(market.clone());
        let mut lump = LumpSumHeuristic::new(market).unwrap();
        let task = Task::new(1, [0]);
        for _ in 0..150 {
            let a = tfo.step(&task).unwrap();
            let b = lump.step(&task).unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(tfo.ledger(), lump.ledger());
    }
}
