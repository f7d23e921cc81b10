//! Domain types: skills, workers, tasks, marketplaces, and cost accounting.
//!
//! Skills are interned to dense indices `0..m` and every skill set is a
//! fixed-size bitset over the universe, so coverage checks cost a handful of
//! word operations. Worker costs follow three marketplace assumptions:
//!
//! * salary below outsourcing fee (`sigma < lambda`),
//! * outsourcing fee below hire-plus-salary (`lambda < C + sigma`),
//! * salary at most the hiring fee (`sigma <= C`).
//!
//! [`validate_marketplace`] checks all three per worker and rejects instances
//! that violate them; callers can downgrade cost-rule violations to warnings
//! (`force`), which keeps the algorithms well-defined but voids their
//! guarantees.

use std::collections::HashMap;
use std::fmt;

use crate::bitset::BitSet;
use crate::money::Money;

/// Dense skill index in `0..m`.
pub type SkillId = usize;
/// Dense worker index in `0..n`.
pub type WorkerId = usize;

/// A worker with a skill set and the three per-worker costs.
#[derive(Clone, Debug)]
pub struct Worker {
    pub id: WorkerId,
    /// Display label, e.g. the id column of an ingested marketplace file.
    pub label: String,
    /// Skills possessed, as a bitset over the skill universe.
    pub skills: BitSet,
    /// Fee paid each time the worker performs a task while not hired.
    pub outsource_fee: Money,
    /// One-time fee paid on hire; covers the eventual firing as well.
    pub hiring_fee: Money,
    /// Recurring fee paid for every period the worker stays hired.
    pub salary: Money,
}

/// Input row for [`Marketplace::new`].
#[derive(Clone, Debug)]
pub struct WorkerSpec {
    pub label: String,
    pub skills: Vec<SkillId>,
    pub outsource_fee: Money,
    pub hiring_fee: Money,
    pub salary: Money,
}

/// Immutable worker pool with a skill -> workers index.
#[derive(Clone, Debug)]
pub struct Marketplace {
    workers: Vec<Worker>,
    skill_names: Vec<String>,
    skill_index: HashMap<String, SkillId>,
    /// `pools[s]` lists, in ascending id order, the workers possessing skill `s`.
    pools: Vec<Vec<WorkerId>>,
}

impl Marketplace {
    pub fn new(skill_names: Vec<String>, specs: Vec<WorkerSpec>) -> Self {
        let m = skill_names.len();
        let workers: Vec<Worker> = specs
            .into_iter()
            .enumerate()
            .map(|(id, spec)| Worker {
                id,
                label: spec.label,
                skills: BitSet::from_indices(m, spec.skills),
                outsource_fee: spec.outsource_fee,
                hiring_fee: spec.hiring_fee,
                salary: spec.salary,
            })
            .collect();
        let mut pools = vec![Vec::new(); m];
        for w in &workers {
            for s in w.skills.iter() {
                pools[s].push(w.id);
            }
        }
        let skill_index = skill_names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.clone(), i))
            .collect();
        Self {
            workers,
            skill_names,
            skill_index,
            pools,
        }
    }

    /// Build a marketplace from `(skills, lambda, C, sigma)` rows in currency
    /// units, with generated skill and worker labels.
    pub fn from_rows(skill_count: usize, rows: &[(&[SkillId], f64, f64, f64)]) -> Self {
        let names = (0..skill_count).map(|i| format!("s{i}")).collect();
        let specs = rows
            .iter()
            .enumerate()
            .map(|(i, (skills, lambda, hire, salary))| WorkerSpec {
                label: format!("w{i}"),
                skills: skills.to_vec(),
                outsource_fee: Money::from_units(*lambda),
                hiring_fee: Money::from_units(*hire),
                salary: Money::from_units(*salary),
            })
            .collect();
        Self::new(names, specs)
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    pub fn skill_count(&self) -> usize {
        self.skill_names.len()
    }

    pub fn worker(&self, id: WorkerId) -> &Worker {
        &self.workers[id]
    }

    pub fn workers(&self) -> &[Worker] {
        &self.workers
    }

    pub fn pool(&self, skill: SkillId) -> &[WorkerId] {
        &self.pools[skill]
    }

    pub fn skill_name(&self, skill: SkillId) -> &str {
        &self.skill_names[skill]
    }

    pub fn skill_names(&self) -> &[String] {
        &self.skill_names
    }

    pub fn skill_id(&self, name: &str) -> Option<SkillId> {
        self.skill_index.get(name).copied()
    }

    pub fn max_hiring_fee(&self) -> Money {
        self.workers
            .iter()
            .map(|w| w.hiring_fee)
            .max()
            .unwrap_or(Money::ZERO)
    }

    pub fn max_outsource_fee(&self) -> Money {
        self.workers
            .iter()
            .map(|w| w.outsource_fee)
            .max()
            .unwrap_or(Money::ZERO)
    }

    /// Ascending, deduplicated union of the pools of the given skills.
    pub fn pool_union(&self, skills: &BitSet) -> Vec<WorkerId> {
        let mut seen = BitSet::new(self.worker_count());
        for s in skills.iter() {
            for &r in &self.pools[s] {
                seen.insert(r);
            }
        }
        seen.iter().collect()
    }

    /// Union of skills over a set of workers.
    pub fn team_skills(&self, team: impl IntoIterator<Item = WorkerId>) -> BitSet {
        let mut skills = BitSet::new(self.skill_count());
        for r in team {
            skills.union_with(&self.workers[r].skills);
        }
        skills
    }

    /// Derive a marketplace with the same workers and skills but costs
    /// re-derived from the outsourcing fees: `C = alpha * lambda`,
    /// `sigma = beta * lambda`.
    pub fn with_cost_factors(&self, alpha: Option<f64>, beta: Option<f64>) -> Marketplace {
        let mut market = self.clone();
        for w in &mut market.workers {
            if let Some(a) = alpha {
                w.hiring_fee = w.outsource_fee.scale(a);
            }
            if let Some(b) = beta {
                w.salary = w.outsource_fee.scale(b);
            }
        }
        market
    }
}

/// One arriving task: the set of skills it requires.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Task {
    pub skills: BitSet,
}

impl Task {
    pub fn new(skill_count: usize, skills: impl IntoIterator<Item = SkillId>) -> Self {
        Self {
            skills: BitSet::from_indices(skill_count, skills),
        }
    }
}

/// Itemized costs of one period (also used for cumulative totals).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostBreakdown {
    pub outsourcing: Money,
    pub hiring: Money,
    pub salary: Money,
}

impl CostBreakdown {
    pub const ZERO: CostBreakdown = CostBreakdown {
        outsourcing: Money::ZERO,
        hiring: Money::ZERO,
        salary: Money::ZERO,
    };

    pub fn total(&self) -> Money {
        self.outsourcing + self.hiring + self.salary
    }

    pub fn add(&mut self, other: &CostBreakdown) {
        self.outsourcing += other.outsourcing;
        self.hiring += other.hiring;
        self.salary += other.salary;
    }
}

/// Decision record for one period.
///
/// `hired` lists workers hired during the period and `fired` those let go at
/// its start; the two never overlap. A worker may appear in `outsourced` and
/// `hired` at once when a policy pays for outsourced work and then hires the
/// same worker at the end of the period. A worker already on the team may
/// appear in `hired` when a fixed-length hiring interval is renewed
/// back-to-back: the expiring interval's fire and the new hire fall in the
/// same period, so the worker never actually leaves but a fresh hiring fee
/// is paid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    /// 1-based period index.
    pub t: usize,
    pub outsourced: Vec<WorkerId>,
    pub hired: Vec<WorkerId>,
    pub fired: Vec<WorkerId>,
    pub step_cost: CostBreakdown,
}

impl StepOutcome {
    pub fn empty(t: usize) -> Self {
        Self {
            t,
            outsourced: Vec::new(),
            hired: Vec::new(),
            fired: Vec::new(),
            step_cost: CostBreakdown::ZERO,
        }
    }
}

/// Cumulative cost totals plus the per-period trajectory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CostLedger {
    cumulative: CostBreakdown,
    trajectory: Vec<CostBreakdown>,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one period's costs and append the running totals.
    pub fn record(&mut self, cost: &CostBreakdown) {
        self.cumulative.add(cost);
        self.trajectory.push(self.cumulative);
    }

    pub fn cumulative(&self) -> &CostBreakdown {
        &self.cumulative
    }

    pub fn total(&self) -> Money {
        self.cumulative.total()
    }

    /// Cumulative totals after each recorded period.
    pub fn trajectory(&self) -> &[CostBreakdown] {
        &self.trajectory
    }

    pub fn periods(&self) -> usize {
        self.trajectory.len()
    }
}

/// True iff the team of hired plus outsourced workers covers the task.
pub fn cover_check(
    hired: &[WorkerId],
    outsourced: &[WorkerId],
    task: &Task,
    market: &Marketplace,
) -> bool {
    let mut skills = market.team_skills(hired.iter().copied());
    skills.union_with(&market.team_skills(outsourced.iter().copied()));
    task.skills.is_subset_of(&skills)
}

/// A cost-assumption violation for one worker. These are the downgradable
/// kind: the algorithms stay well-defined, only their guarantees are voided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CostRuleViolation {
    /// `sigma >= lambda`
    SalaryNotBelowOutsource,
    /// `lambda >= C + sigma`
    OutsourceNotBelowHirePlusSalary,
    /// `sigma > C`
    SalaryExceedsHiringFee,
}

impl fmt::Display for CostRuleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            CostRuleViolation::SalaryNotBelowOutsource => "salary_not_below_outsource",
            CostRuleViolation::OutsourceNotBelowHirePlusSalary => {
                "outsource_not_below_hire_plus_salary"
            }
            CostRuleViolation::SalaryExceedsHiringFee => "salary_exceeds_hiring_fee",
        };
        f.write_str(name)
    }
}

/// Per-worker and structural findings from [`validate_marketplace`].
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    /// Cost-rule violations, per offending worker.
    pub worker_violations: Vec<(WorkerId, Vec<CostRuleViolation>)>,
    /// Skills possessed by no worker.
    pub orphan_skills: Vec<SkillId>,
    /// Defects no override can repair (empty pool, empty worker list, ...).
    pub structural_errors: Vec<String>,
}

impl ValidationReport {
    /// Marketplace passes every check.
    pub fn is_accepted(&self) -> bool {
        self.worker_violations.is_empty()
            && self.orphan_skills.is_empty()
            && self.structural_errors.is_empty()
    }

    /// Marketplace is usable when cost-rule violations are downgraded to
    /// warnings; structural problems still reject.
    pub fn is_accepted_with_force(&self) -> bool {
        self.orphan_skills.is_empty() && self.structural_errors.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_accepted() {
            return writeln!(f, "marketplace accepted");
        }
        for err in &self.structural_errors {
            writeln!(f, "structural: {err}")?;
        }
        for skill in &self.orphan_skills {
            writeln!(f, "skill {skill}: empty pool")?;
        }
        for (worker, violations) in &self.worker_violations {
            for v in violations {
                writeln!(f, "worker {worker}: {v}")?;
            }
        }
        Ok(())
    }
}

/// Check the marketplace invariants and the three cost assumptions.
pub fn validate_marketplace(market: &Marketplace) -> ValidationReport {
    let mut report = ValidationReport::default();
    if market.worker_count() == 0 {
        report.structural_errors.push("empty worker list".into());
    }
    for w in market.workers() {
        if w.skills.is_empty() {
            report
                .structural_errors
                .push(format!("worker {} has no skills", w.id));
        }
        if !w.outsource_fee.is_positive() {
            report
                .structural_errors
                .push(format!("worker {} has non-positive outsourcing fee", w.id));
        }
        if !w.hiring_fee.is_positive() {
            report
                .structural_errors
                .push(format!("worker {} has non-positive hiring fee", w.id));
        }
        if w.salary < Money::ZERO {
            report
                .structural_errors
                .push(format!("worker {} has negative salary", w.id));
        }
        let mut violations = Vec::new();
        if w.salary >= w.outsource_fee {
            violations.push(CostRuleViolation::SalaryNotBelowOutsource);
        }
        if w.outsource_fee >= w.hiring_fee + w.salary {
            violations.push(CostRuleViolation::OutsourceNotBelowHirePlusSalary);
        }
        if w.salary > w.hiring_fee {
            violations.push(CostRuleViolation::SalaryExceedsHiringFee);
        }
        if !violations.is_empty() {
            report.worker_violations.push((w.id, violations));
        }
    }
    for skill in 0..market.skill_count() {
        if market.pool(skill).is_empty() {
            report.orphan_skills.push(skill);
        }
    }
    report
}
