//! The adaptive meta-policy: run every component in parallel as a shadow
//! simulation, follow whichever is cheapest, and pay real hiring fees when a
//! switch requires materializing a different shadow's team.
//!
//! Shadows advance on the identical task stream with their own ledgers. After
//! each task, a candidate shadow is compared as `shadow total + switch cost`,
//! where the switch cost is the sum of hiring fees of workers the candidate
//! holds but the materialized team does not; firing materialized workers the
//! candidate does not hold is free (firing is pre-paid in the hiring fee).
//! Strictly cheaper wins; ties keep the current policy. Between switches the
//! active shadow's outcomes are materialized verbatim, so a run that never
//! switches costs exactly what the active component would.

use std::sync::Arc;

use crate::bitset::BitSet;
use crate::model::{CostLedger, Marketplace, StepOutcome, Task, WorkerId};
use crate::money::Money;
use crate::policies::{
    AlwaysHire, AlwaysOutsource, Policy, PolicyError, PolicyKind, TfoHeuristic,
};
use crate::primal_dual::TfoPolicy;
use crate::seeding::mix;

/// Components simulated by [`TfoAdaptive`], in fixed comparison order. The
/// first is the initial active policy (zero commitment).
pub const ADAPTIVE_COMPONENTS: [PolicyKind; 4] = [
    PolicyKind::AlwaysOutsource,
    PolicyKind::AlwaysHire,
    PolicyKind::TfoHeuristic,
    PolicyKind::Tfo,
];

/// Salt folded with the adaptive policy's seed to derive each shadow's seed:
/// `mix(seed, [shadow kind stable id])`.
pub fn shadow_seed(seed: u64, kind: PolicyKind) -> u64 {
    mix(seed, &[kind.stable_id()])
}

pub struct TfoAdaptive {
    market: Arc<Marketplace>,
    shadows: Vec<Box<dyn Policy>>,
    active: usize,
    /// Workers actually on the payroll.
    team: BitSet,
    ledger: CostLedger,
    seed: u64,
    t: usize,
    switches: usize,
}

impl TfoAdaptive {
    pub fn new(market: Arc<Marketplace>, seed: u64) -> Result<Self, PolicyError> {
        let shadows = Self::build_shadows(&market, seed);
        let team = BitSet::new(market.worker_count());
        Ok(Self {
            market,
            shadows,
            active: 0,
            team,
            ledger: CostLedger::new(),
            seed,
            t: 0,
            switches: 0,
        })
    }

    fn build_shadows(market: &Arc<Marketplace>, seed: u64) -> Vec<Box<dyn Policy>> {
        ADAPTIVE_COMPONENTS
            .iter()
            .map(|kind| -> Box<dyn Policy> {
                match kind {
                    PolicyKind::AlwaysOutsource => Box::new(AlwaysOutsource::new(market.clone())),
                    PolicyKind::AlwaysHire => Box::new(AlwaysHire::new(market.clone())),
                    PolicyKind::TfoHeuristic => Box::new(TfoHeuristic::new(market.clone())),
                    PolicyKind::Tfo => {
                        Box::new(TfoPolicy::new(market.clone(), shadow_seed(seed, *kind)))
                    }
                    _ => unreachable!("not an adaptive component"),
                }
            })
            .collect()
    }

    /// Hiring fees owed to adopt `shadow`'s team given the current payroll.
    fn switch_cost(&self, shadow: usize) -> Money {
        self.shadows[shadow]
            .team()
            .iter()
            .filter(|&r| !self.team.contains(r))
            .map(|r| self.market.worker(r).hiring_fee)
            .sum()
    }

    /// Component names with their shadow ledgers, in component order.
    pub fn shadow_ledgers(&self) -> Vec<(PolicyKind, &CostLedger)> {
        ADAPTIVE_COMPONENTS
            .iter()
            .copied()
            .zip(self.shadows.iter().map(|s| s.ledger()))
            .collect()
    }

    pub fn active_component(&self) -> PolicyKind {
        ADAPTIVE_COMPONENTS[self.active]
    }

    pub fn switch_count(&self) -> usize {
        self.switches
    }
}

impl Policy for TfoAdaptive {
    fn name(&self) -> &'static str {
        "tfo-adaptive"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let outcomes: Vec<StepOutcome> = self
            .shadows
            .iter_mut()
            .map(|s| s.step(task))
            .collect::<Result<_, _>>()?;

        // Pick the cheapest shadow, charging candidates for the hires a
        // switch would require. Strict improvement only; ties keep current.
        let mut best = self.active;
        let mut best_metric = self.shadows[self.active].ledger().total();
        for i in 0..self.shadows.len() {
            if i == self.active {
                continue;
            }
            let metric = self.shadows[i].ledger().total() + self.switch_cost(i);
            if metric < best_metric {
                best = i;
                best_metric = metric;
            }
        }

        let outcome = if best == self.active {
            // Materialize verbatim; the payroll mirrors the active shadow.
            let mut outcome = outcomes[self.active].clone();
            outcome.t = self.t;
            for &r in &outcome.fired {
                self.team.remove(r);
            }
            for &r in &outcome.hired {
                self.team.insert(r);
            }
            debug_assert_eq!(&self.team, self.shadows[self.active].team());
            outcome
        } else {
            // Reconcile the payroll with the new shadow's team: pay hiring
            // fees for workers it holds that we do not, fire the rest free.
            self.switches += 1;
            let target = self.shadows[best].team().clone();
            let hired: Vec<WorkerId> = target.iter().filter(|&r| !self.team.contains(r)).collect();
            let fired: Vec<WorkerId> = self.team.iter().filter(|&r| !target.contains(r)).collect();
            let shadow_cost = &outcomes[best].step_cost;
            let outcome = StepOutcome {
                t: self.t,
                outsourced: outcomes[best].outsourced.clone(),
                step_cost: crate::model::CostBreakdown {
                    outsourcing: shadow_cost.outsourcing,
                    hiring: hired.iter().map(|&r| self.market.worker(r).hiring_fee).sum(),
                    salary: shadow_cost.salary,
                },
                hired,
                fired,
            };
            self.team = target;
            self.active = best;
            outcome
        };

        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        self.shadows = Self::build_shadows(&self.market, self.seed);
        self.active = 0;
        self.team = BitSet::new(self.market.worker_count());
        self.ledger = CostLedger::new();
        self.t = 0;
        self.switches = 0;
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn team(&self) -> &BitSet {
        &self.team
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Task;
    use crate::policies::LumpSumHeuristic;

    fn pathological_market() -> Arc<Marketplace> {
        Arc::new(Marketplace::from_rows(
            1,
            &[(&[0], 1.0, 100.0, 0.0), (&[0], 1.1, 2.0, 0.0)],
        ))
    }

    #[test]
    fn stays_on_initial_component_under_ties() {
        // One task: every component covers it once; always-outsource stays
        // active because nothing is strictly cheaper after switch costs.
        let market = Arc::new(Marketplace::from_rows(1, &[(&[0], 2.0, 8.0, 0.2)]));
        let mut policy = TfoAdaptive::new(market, 1).unwrap();
        policy.step(&Task::new(1, [0])).unwrap();
        assert_eq!(policy.active_component(), PolicyKind::AlwaysOutsource);
        assert_eq!(policy.switch_count(), 0);
    }

    #[test]
    fn shadows_match_standalone_runs() {
        let market = Arc::new(Marketplace::from_rows(
            2,
            &[(&[0], 2.0, 6.0, 0.5), (&[1], 3.0, 9.0, 0.5)],
        ));
        let seed = 77;
        let tasks: Vec<Task> = (0..30)
            .map(|i| Task::new(2, [i % 2]))
            .collect();
        let mut adaptive = TfoAdaptive::new(market.clone(), seed).unwrap();
        let mut standalone: Vec<Box<dyn Policy>> = ADAPTIVE_COMPONENTS
            .iter()
            .map(|kind| {
                kind.build(market.clone(), shadow_seed(seed, *kind))
                    .unwrap()
            })
            .collect();
        for task in &tasks {
            adaptive.step(task).unwrap();
            for policy in &mut standalone {
                policy.step(task).unwrap();
            }
        }
        for ((_, shadow_ledger), policy) in adaptive.shadow_ledgers().iter().zip(&standalone) {
            assert_eq!(*shadow_ledger, policy.ledger(), "shadow diverged from standalone");
        }
    }

    /// When always-outsource stays cheapest throughout, the meta-policy
    /// never switches and its ledger equals the baseline's exactly.
    #[test]
    fn matches_always_outsource_when_it_dominates() {
        // Huge hiring fees and near-fee salaries make every hiring shadow
        // strictly worse; verified to produce zero switches for this seed.
        let market = Arc::new(Marketplace::from_rows(
            2,
            &[(&[0], 2.0, 60.0, 1.8), (&[1], 3.0, 90.0, 2.7)],
        ));
        let mut adaptive = TfoAdaptive::new(market.clone(), 13).unwrap();
        let mut baseline = AlwaysOutsource::new(market);
        for i in 0..60 {
            let task = Task::new(2, [i % 2]);
            adaptive.step(&task).unwrap();
            baseline.step(&task).unwrap();
        }
        assert_eq!(adaptive.switch_count(), 0);
        assert_eq!(adaptive.ledger().total(), baseline.ledger().total());
    }

    #[test]
    fn adaptive_beats_heuristic_on_pathological_stream() {
        let market = pathological_market();
        let task = Task::new(1, [0]);
        let mut adaptive = TfoAdaptive::new(market.clone(), 5).unwrap();
        let mut heuristic = LumpSumHeuristic::new(market).unwrap();
        for _ in 0..200 {
            adaptive.step(&task).unwrap();
            heuristic.step(&task).unwrap();
        }
        assert_eq!(heuristic.ledger().total(), Money::from_units(200.0));
        assert!(
            adaptive.ledger().total() <= heuristic.ledger().total(),
            "adaptive {} vs heuristic {}",
            adaptive.ledger().total(),
            heuristic.ledger().total()
        );
    }

    #[test]
    fn ledger_replays_from_outcomes() {
        let market = Arc::new(Marketplace::from_rows(
            2,
            &[(&[0], 2.0, 4.0, 0.4), (&[1], 1.5, 3.0, 0.3)],
        ));
        let mut policy = TfoAdaptive::new(market, 9).unwrap();
        let tasks: Vec<Task> = (0..40).map(|i| Task::new(2, [i % 2])).collect();
        let mut replay = crate::model::CostBreakdown::ZERO;
        for task in &tasks {
            let out = policy.step(task).unwrap();
            replay.add(&out.step_cost);
        }
        assert_eq!(replay, *policy.ledger().cumulative());
    }
}
