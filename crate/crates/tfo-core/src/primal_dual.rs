//! Multiplicative-weight primal-dual policies with randomized rounding.
//!
//! Both policies maintain a fractional hire level `x~_r` per worker and a
//! fractional outsource level `f~_r` per worker per task. When a task arrives
//! with skills the hired team does not cover, the levels of every worker in
//! an uncovered skill's pool are raised multiplicatively until the pool's
//! combined level reaches 1, and the per-task increments are then rounded to
//! hire/outsource marks by repeated Bernoulli sampling. Acting on every mark
//! would buy a repetition-count factor more workers than the task needs, so
//! only a minimum-cost cover of the marks is materialized (hire marks first:
//! their accumulated mass indicates recurring demand), unselected hire marks
//! park as pending hires that materialize once actually needed, and a
//! deterministic per-skill fallback guarantees coverage regardless of the
//! random draws.
//!
//! The two variants differ in hire weights, repetition counts, and firing:
//!
//! * [`LumpSumPolicy`] targets the salary-free setting: weights are the
//!   hiring fees, the repetition count is fixed, hires are permanent, and the
//!   fallback hires the cheapest owner of each still-uncovered skill.
//! * [`TfoPolicy`] handles salaries by hiring for fixed-length intervals of
//!   `eta_r = ceil(C_r / sigma_r)` periods at inflated weight `3 * C_r`
//!   (an interval's fee plus salaries never exceed that), firing on expiry,
//!   and falling back to outsourcing the cheapest owner instead of hiring.
//!
//! Every while-loop iteration also grows a dual objective by one unit and
//! charges the matching dual rows; scaling the accumulated dual value by its
//! worst constraint violation yields a certified lower bound on the offline
//! optimum ([`FractionalState::dual_bound`]).

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::model::{CostLedger, Marketplace, SkillId, StepOutcome, Task, WorkerId};
use crate::money::Money;
use crate::policies::{hire_span, Policy, PolicyError, TeamState};
use crate::seeding::rng_from;
use crate::setcover::CoverError;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PdParamError {
    #[error("skill universe must be non-empty")]
    EmptySkillUniverse,
}

/// Rounding repetitions for the lump-sum policy: `ceil(ln m + ln C_max)`,
/// clamped to at least one repetition.
pub fn rho1(skill_count: usize, max_hiring_fee_units: f64) -> Result<u32, PdParamError> {
    if skill_count == 0 {
        return Err(PdParamError::EmptySkillUniverse);
    }
    debug_assert!(max_hiring_fee_units > 0.0);
    let raw = (skill_count as f64).ln() + max_hiring_fee_units.ln();
    Ok((raw.ceil().max(1.0)) as u32)
}

/// Rounding repetitions for the interval policy at period `t`:
/// `ceil(ln m + ln lambda_max + 2 ln t)`, clamped to at least one.
pub fn rho2(skill_count: usize, max_outsource_fee_units: f64, t: usize) -> u32 {
    debug_assert!(skill_count >= 1 && max_outsource_fee_units > 0.0 && t >= 1);
    let raw = (skill_count as f64).ln()
        + max_outsource_fee_units.ln()
        + 2.0 * (t as f64).ln();
    (raw.ceil().max(1.0)) as u32
}

/// Fractional levels plus the dual accumulators.
///
/// `hire_row[r]` holds the whole-run dual mass on worker `r`'s hire
/// constraint, `task_row[r]` the current task's mass on the outsource
/// constraint; `max_violation` tracks the worst ratio of any row to its
/// bound.
pub struct FractionalState {
    x_tilde: Vec<f64>,
    f_tilde: Vec<f64>,
    /// Hire weights in currency units: `C_r` or `3 C_r` depending on mode.
    hire_weight_units: Vec<f64>,
    lambda_units: Vec<f64>,
    n: f64,
    track_dual: bool,
    dual_sum: u64,
    hire_row: Vec<u64>,
    task_row: Vec<u64>,
    touched: Vec<WorkerId>,
    touch_stamp: Vec<u32>,
    stamp: u32,
    max_violation: f64,
    /// Extra divisor on the certified bound; the interval restriction loses
    /// a factor 3 against the unrestricted offline optimum.
    dual_scale: f64,
}

impl FractionalState {
    pub fn new(
        market: &Marketplace,
        hire_weight_factor: f64,
        dual_scale: f64,
        track_dual: bool,
    ) -> Self {
        let n = market.worker_count();
        Self {
            x_tilde: vec![0.0; n],
            f_tilde: vec![0.0; n],
            hire_weight_units: market
                .workers()
                .iter()
                .map(|w| w.hiring_fee.as_units() * hire_weight_factor)
                .collect(),
            lambda_units: market
                .workers()
                .iter()
                .map(|w| w.outsource_fee.as_units())
                .collect(),
            n: n as f64,
            track_dual,
            dual_sum: 0,
            hire_row: vec![0; n],
            task_row: vec![0; n],
            touched: Vec::new(),
            touch_stamp: vec![0; n],
            stamp: 0,
            max_violation: 0.0,
            dual_scale,
        }
    }

    pub fn x_tilde(&self, r: WorkerId) -> f64 {
        self.x_tilde[r]
    }

    pub fn f_tilde(&self, r: WorkerId) -> f64 {
        self.f_tilde[r]
    }

    pub fn dual_sum(&self) -> u64 {
        self.dual_sum
    }

    /// Zero the per-task levels and dual rows of the previous task.
    pub fn begin_task(&mut self) {
        let touched = std::mem::take(&mut self.touched);
        for &r in &touched {
            self.f_tilde[r] = 0.0;
            self.task_row[r] = 0;
        }
        self.touched = touched;
        self.touched.clear();
        self.stamp = self.stamp.wrapping_add(1);
    }

    fn touch(&mut self, r: WorkerId) {
        if self.touch_stamp[r] != self.stamp {
            self.touch_stamp[r] = self.stamp;
            self.touched.push(r);
        }
    }

    /// Raise the pool's combined level until the covering constraint for
    /// `skill` is fractionally satisfied; returns the iteration count.
    pub fn raise_until_covered(
        &mut self,
        skill: SkillId,
        pool: &[WorkerId],
    ) -> Result<u64, CoverError> {
        if pool.is_empty() {
            return Err(CoverError::Uncoverable { skill });
        }
        let mut iterations = 0;
        loop {
            let sum: f64 = pool
                .iter()
                .map(|&r| self.x_tilde[r] + self.f_tilde[r])
                .sum();
            if sum >= 1.0 {
                break;
            }
            iterations += 1;
            for &r in pool {
                self.touch(r);
                let h = self.hire_weight_units[r];
                self.x_tilde[r] = self.x_tilde[r] * (1.0 + 1.0 / h) + 1.0 / (self.n * h);
            }
            for &r in pool {
                let l = self.lambda_units[r];
                self.f_tilde[r] = self.f_tilde[r] * (1.0 + 1.0 / l) + 1.0 / (self.n * l);
            }
            if self.track_dual {
                self.dual_sum += 1;
                for &r in pool {
                    self.hire_row[r] += 1;
                    self.task_row[r] += 1;
                }
            }
        }
        Ok(iterations)
    }

    /// Fold the task's dual rows into the running violation maximum.
    fn settle_dual(&mut self) {
        if !self.track_dual {
            return;
        }
        let mut v = self.max_violation;
        for &r in &self.touched {
            let hire = self.hire_row[r] as f64 / self.hire_weight_units[r];
            let task = self.task_row[r] as f64 / self.lambda_units[r];
            v = v.max(hire).max(task);
        }
        self.max_violation = v;
    }

    /// Certified lower bound on the offline optimum, in currency units: the
    /// dual objective scaled into feasibility by the worst violation.
    pub fn dual_bound(&self) -> f64 {
        if self.dual_sum == 0 {
            return 0.0;
        }
        self.dual_sum as f64 / (self.dual_scale * self.max_violation.max(1.0))
    }

    fn reset_level(&mut self, r: WorkerId) {
        self.x_tilde[r] = 0.0;
    }
}

/// Repeatedly sample hire/outsource marks for the candidates; a worker
/// sampled for both is hired only. Probabilities clamp to `[0, 1]`.
/// Returns sorted, disjoint id lists.
pub fn randomized_round(
    candidates: &[WorkerId],
    hire_probs: &[f64],
    outsource_probs: &[f64],
    rho: u32,
    rng: &mut ChaCha8Rng,
) -> (Vec<WorkerId>, Vec<WorkerId>) {
    debug_assert_eq!(candidates.len(), hire_probs.len());
    debug_assert_eq!(candidates.len(), outsource_probs.len());
    let mut hire_mark = vec![false; candidates.len()];
    let mut out_mark = vec![false; candidates.len()];
    for _ in 0..rho {
        for i in 0..candidates.len() {
            if rng.gen::<f64>() < hire_probs[i].min(1.0) {
                hire_mark[i] = true;
            }
            if rng.gen::<f64>() < outsource_probs[i].min(1.0) {
                out_mark[i] = true;
            }
        }
    }
    let mut hired = Vec::new();
    let mut outsourced = Vec::new();
    for (i, &r) in candidates.iter().enumerate() {
        if hire_mark[i] {
            hired.push(r);
        } else if out_mark[i] {
            outsourced.push(r);
        }
    }
    hired.sort_unstable();
    outsourced.sort_unstable();
    (hired, outsourced)
}

/// A committed fixed-length hiring interval (periods are 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub worker: WorkerId,
    pub start: usize,
    pub len: usize,
}

/// Open and committed hiring intervals of a [`TfoPolicy`] run.
#[derive(Clone, Debug, Default)]
pub struct IntervalRegistry {
    /// `active[r] = (start, expiry period)`; no expiry for zero-salary workers.
    active: HashMap<WorkerId, (usize, Option<usize>)>,
    expiry_schedule: HashMap<usize, Vec<WorkerId>>,
    history: Vec<Interval>,
}

impl IntervalRegistry {
    fn open(&mut self, r: WorkerId, start: usize, eta: Option<usize>) {
        let expiry = eta.map(|e| start + e);
        self.active.insert(r, (start, expiry));
        if let Some(e) = expiry {
            self.expiry_schedule.entry(e).or_default().push(r);
        }
    }

    /// Commit and return the intervals expiring at the start of period `t`.
    fn expire_at(&mut self, t: usize) -> Vec<WorkerId> {
        let mut fired = self.expiry_schedule.remove(&t).unwrap_or_default();
        fired.sort_unstable();
        for &r in &fired {
            let (start, _) = self.active.remove(&r).expect("scheduled worker is active");
            self.history.push(Interval {
                worker: r,
                start,
                len: t - start,
            });
        }
        fired
    }

    /// Intervals that ran their full length.
    pub fn history(&self) -> &[Interval] {
        &self.history
    }

    /// All intervals, with still-open ones truncated at `horizon` (the last
    /// processed period).
    pub fn intervals_as_of(&self, horizon: usize) -> Vec<Interval> {
        let mut all = self.history.clone();
        for (&r, &(start, _)) in &self.active {
            all.push(Interval {
                worker: r,
                start,
                len: horizon + 1 - start,
            });
        }
        all.sort_by_key(|iv| (iv.worker, iv.start));
        all
    }
}

/// Expand intervals into the per-period hired indicator `g[r][t-1]`.
pub fn alt_to_tfo(
    intervals: &[Interval],
    horizon: usize,
) -> std::collections::BTreeMap<WorkerId, Vec<bool>> {
    let mut g = std::collections::BTreeMap::new();
    for iv in intervals {
        let row: &mut Vec<bool> = g.entry(iv.worker).or_insert_with(|| vec![false; horizon]);
        for t in iv.start..iv.start + iv.len {
            if t <= horizon {
                row[t - 1] = true;
            }
        }
    }
    g
}

/// Interval costs under the two accountings: the per-period ledger (`C_r`
/// once plus `sigma_r` per hired period) and the interval-restricted one
/// (`3 C_r` per interval). The former never exceeds the latter for committed
/// intervals.
pub fn interval_cost_comparison(intervals: &[Interval], market: &Marketplace) -> (Money, Money) {
    let mut per_period = Money::ZERO;
    let mut interval_fee = Money::ZERO;
    for iv in intervals {
        let w = market.worker(iv.worker);
        per_period += w.hiring_fee + Money::from_cents(w.salary.cents() * iv.len as i64);
        interval_fee += w.hiring_fee.scale(3.0);
    }
    (per_period, interval_fee)
}

/// Greedy partial cover used to thin the rounding marks: pick marked workers
/// by weight per newly covered skill until nothing marked helps anymore.
/// Covered skills are removed from `uncovered`; returns the picks.
///
/// Acting on every mark would hire and outsource a constant factor (the
/// repetition count) more workers than a task needs, so only a minimum-cost
/// cover of the marks is materialized; the rest are discarded.
fn select_cover_from_marks<F>(
    uncovered: &mut BitSet,
    marked: &[WorkerId],
    weight: F,
    market: &Marketplace,
) -> Vec<WorkerId>
where
    F: Fn(WorkerId) -> Money,
{
    let mut selected = Vec::new();
    let mut taken = vec![false; marked.len()];
    loop {
        let mut best: Option<(usize, WorkerId, Money, usize)> = None;
        for (i, &r) in marked.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let gain = market.worker(r).skills.intersection_len(uncovered);
            if gain == 0 {
                continue;
            }
            let w = weight(r);
            let better = match best {
                None => true,
                Some((_, best_r, best_w, best_gain)) => {
                    let lhs = w.cents() as i128 * best_gain as i128;
                    let rhs = best_w.cents() as i128 * gain as i128;
                    lhs < rhs || (lhs == rhs && r < best_r)
                }
            };
            if better {
                best = Some((i, r, w, gain));
            }
        }
        let Some((i, r, _, _)) = best else {
            return selected;
        };
        taken[i] = true;
        selected.push(r);
        uncovered.difference_with(&market.worker(r).skills);
    }
}

/// Hire the cheapest (by hiring fee) unhired owner of each skill still in
/// `uncovered`, rechecking as fallback hires knock out several skills.
fn hire_fallback(
    team: &mut TeamState,
    uncovered: &mut BitSet,
    market: &Marketplace,
    hired: &mut Vec<WorkerId>,
) -> Result<(), CoverError> {
    let skills: Vec<SkillId> = uncovered.iter().collect();
    for s in skills {
        if !uncovered.contains(s) {
            continue;
        }
        let fallback = market
            .pool(s)
            .iter()
            .copied()
            .filter(|&r| !team.contains(r))
            .min_by_key(|&r| (market.worker(r).hiring_fee, r))
            .ok_or(CoverError::Uncoverable { skill: s })?;
        team.hire(fallback, market);
        hired.push(fallback);
        uncovered.difference_with(&market.worker(fallback).skills);
    }
    Ok(())
}

/// Outsource the cheapest (by outsourcing fee) unhired owner of each skill
/// still in `uncovered`.
fn outsource_fallback(
    team: &TeamState,
    uncovered: &mut BitSet,
    market: &Marketplace,
    outsourced: &mut Vec<WorkerId>,
) -> Result<(), CoverError> {
    let skills: Vec<SkillId> = uncovered.iter().collect();
    for s in skills {
        if !uncovered.contains(s) {
            continue;
        }
        let fallback = market
            .pool(s)
            .iter()
            .copied()
            .filter(|&r| !team.contains(r))
            .min_by_key(|&r| (market.worker(r).outsource_fee, r))
            .ok_or(CoverError::Uncoverable { skill: s })?;
        outsourced.push(fallback);
        uncovered.difference_with(&market.worker(fallback).skills);
    }
    Ok(())
}

/// State shared by the two policies' per-task pipelines.
///
/// Besides the fractional state and the hired team, the pipeline keeps the
/// pool of *pending hires*: workers whose hire mark was sampled but not
/// selected. A mark consumes the worker's fractional increment, so dropping
/// it outright would bleed hiring mass and starve future decisions; instead
/// the decision parks, costs nothing while parked, and materializes as a
/// real hire the next time a required skill of the worker goes uncovered.
struct PdPipeline {
    market: Arc<Marketplace>,
    frac: FractionalState,
    team: TeamState,
    seen: BitSet,
    pending_hires: BitSet,
}

impl PdPipeline {
    fn new(market: Arc<Marketplace>, weight_factor: f64, dual_scale: f64) -> Self {
        let frac = FractionalState::new(&market, weight_factor, dual_scale, true);
        let team = TeamState::new(&market);
        let seen = BitSet::new(market.worker_count());
        let pending_hires = BitSet::new(market.worker_count());
        Self {
            market,
            frac,
            team,
            seen,
            pending_hires,
        }
    }

    /// Skills of the task not covered by the hired team.
    fn uncovered_set(&self, task: &Task) -> BitSet {
        let mut u = task.skills.clone();
        u.difference_with(self.team.skills());
        u
    }

    /// Hire pending workers that own still-uncovered skills, by ascending
    /// skill and cheapest hiring fee. Covered skills leave `uncovered`;
    /// returns the materialized hires.
    fn materialize_pending(&mut self, uncovered: &mut BitSet) -> Vec<WorkerId> {
        if self.pending_hires.is_empty() || uncovered.is_empty() {
            return Vec::new();
        }
        let market = self.market.clone();
        let mut hired = Vec::new();
        let skills: Vec<SkillId> = uncovered.iter().collect();
        for s in skills {
            if !uncovered.contains(s) {
                continue;
            }
            let pick = market
                .pool(s)
                .iter()
                .copied()
                .filter(|&r| self.pending_hires.contains(r) && !self.team.contains(r))
                .min_by_key(|&r| (market.worker(r).hiring_fee, r));
            if let Some(r) = pick {
                self.pending_hires.remove(r);
                self.team.hire(r, &market);
                uncovered.difference_with(&market.worker(r).skills);
                hired.push(r);
            }
        }
        hired
    }

    /// Union of the uncovered skills' pools, in first-touch order. Every
    /// member is unhired: a hired owner would have covered its skill.
    fn candidates(&mut self, uncovered: &[SkillId]) -> Vec<WorkerId> {
        let market = self.market.clone();
        self.seen.clear();
        let mut out = Vec::new();
        for &s in uncovered {
            for &r in market.pool(s) {
                debug_assert!(!self.team.contains(r));
                if !self.seen.contains(r) {
                    self.seen.insert(r);
                    out.push(r);
                }
            }
        }
        out
    }

    /// Snapshot, raise every uncovered skill, and diff: returns the per-
    /// candidate hire increments and outsource levels.
    fn raise_task(
        &mut self,
        uncovered: &[SkillId],
        candidates: &[WorkerId],
    ) -> Result<(Vec<f64>, Vec<f64>), CoverError> {
        self.frac.begin_task();
        let snapshot: Vec<f64> = candidates.iter().map(|&r| self.frac.x_tilde[r]).collect();
        let market = self.market.clone();
        for &s in uncovered {
            self.frac.raise_until_covered(s, market.pool(s))?;
        }
        #[cfg(debug_assertions)]
        for &s in uncovered {
            let sum: f64 = market
                .pool(s)
                .iter()
                .map(|&r| self.frac.x_tilde[r] + self.frac.f_tilde[r])
                .sum();
            debug_assert!(sum >= 1.0, "skill {s} left fractionally uncovered");
        }
        self.frac.settle_dual();
        let hire_probs = candidates
            .iter()
            .zip(&snapshot)
            .map(|(&r, &old)| self.frac.x_tilde[r] - old)
            .collect();
        let out_probs = candidates.iter().map(|&r| self.frac.f_tilde[r]).collect();
        Ok((hire_probs, out_probs))
    }
}

/// Primal-dual policy for the salary-free setting.
pub struct LumpSumPolicy {
    pipeline: PdPipeline,
    rho: u32,
    rng: ChaCha8Rng,
    seed: u64,
    ledger: CostLedger,
    t: usize,
}

impl LumpSumPolicy {
    pub fn new(market: Arc<Marketplace>, seed: u64) -> Self {
        let rho = rho1(market.skill_count(), market.max_hiring_fee().as_units())
            .expect("marketplace has at least one skill");
        Self {
            pipeline: PdPipeline::new(market, 1.0, 1.0),
            rho,
            rng: rng_from(seed),
            seed,
            ledger: CostLedger::new(),
            t: 0,
        }
    }

    /// Disable dual-row tracking (benchmark mode).
    pub fn set_track_dual(&mut self, on: bool) {
        self.pipeline.frac.track_dual = on;
    }

    pub fn fractional(&self) -> &FractionalState {
        &self.pipeline.frac
    }
}

impl Policy for LumpSumPolicy {
    fn name(&self) -> &'static str {
        "lumpsum"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let mut outcome = StepOutcome::empty(self.t);
        let market = self.pipeline.market.clone();
        let mut still = self.pipeline.uncovered_set(task);
        let mut hired = self.pipeline.materialize_pending(&mut still);
        let mut outsourced = Vec::new();
        if !still.is_empty() {
            let uncovered: Vec<SkillId> = still.iter().collect();
            let candidates = self.pipeline.candidates(&uncovered);
            let (hire_probs, out_probs) = self.pipeline.raise_task(&uncovered, &candidates)?;
            let (hire_marks, out_marks) =
                randomized_round(&candidates, &hire_probs, &out_probs, self.rho, &mut self.rng);
            // Materialize a minimum-cost cover of the marks, hire marks
            // first (their accumulated mass indicates recurring demand),
            // then thin the outsource marks over whatever is left.
            let selected = select_cover_from_marks(
                &mut still,
                &hire_marks,
                |r| market.worker(r).hiring_fee,
                &market,
            );
            for &r in &selected {
                self.pipeline.team.hire(r, &market);
                self.pipeline.pending_hires.remove(r);
            }
            for &r in &hire_marks {
                if !selected.contains(&r) {
                    self.pipeline.pending_hires.insert(r);
                }
            }
            hired.extend(selected);
            outsourced = select_cover_from_marks(
                &mut still,
                &out_marks,
                |r| market.worker(r).outsource_fee,
                &market,
            );
            hire_fallback(&mut self.pipeline.team, &mut still, &market, &mut hired)?;
        }
        hired.sort_unstable();
        outsourced.sort_unstable();
        outcome.step_cost.hiring = hired.iter().map(|&r| market.worker(r).hiring_fee).sum();
        outcome.step_cost.outsourcing = outsourced
            .iter()
            .map(|&r| market.worker(r).outsource_fee)
            .sum();
        outcome.hired = hired;
        outcome.outsourced = outsourced;
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        let market = self.pipeline.market.clone();
        let track = self.pipeline.frac.track_dual;
        self.pipeline = PdPipeline::new(market, 1.0, 1.0);
        self.pipeline.frac.track_dual = track;
        self.rng = rng_from(self.seed);
        self.ledger = CostLedger::new();
        self.t = 0;
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn team(&self) -> &BitSet {
        self.pipeline.team.members()
    }

    fn dual_lower_bound(&self) -> Option<f64> {
        Some(self.pipeline.frac.dual_bound())
    }

    /// Models the salary-free problem: salaries are treated as zero.
    fn charges_salary(&self) -> bool {
        false
    }
}

/// Primal-dual policy with salaries: fixed-length hiring intervals, inflated
/// hire weights, and an outsourcing fallback.
pub struct TfoPolicy {
    pipeline: PdPipeline,
    intervals: IntervalRegistry,
    eta: Vec<Option<usize>>,
    rng: ChaCha8Rng,
    seed: u64,
    ledger: CostLedger,
    t: usize,
}

impl TfoPolicy {
    pub fn new(market: Arc<Marketplace>, seed: u64) -> Self {
        let eta = (0..market.worker_count())
            .map(|r| hire_span(&market, r))
            .collect();
        Self {
            pipeline: PdPipeline::new(market, 3.0, 3.0),
            intervals: IntervalRegistry::default(),
            eta,
            rng: rng_from(seed),
            seed,
            ledger: CostLedger::new(),
            t: 0,
        }
    }

    pub fn set_track_dual(&mut self, on: bool) {
        self.pipeline.frac.track_dual = on;
    }

    pub fn intervals(&self) -> &IntervalRegistry {
        &self.intervals
    }

    pub fn fractional(&self) -> &FractionalState {
        &self.pipeline.frac
    }

    /// Number of tasks processed.
    pub fn periods(&self) -> usize {
        self.t
    }
}

impl Policy for TfoPolicy {
    fn name(&self) -> &'static str {
        "tfo"
    }

    fn step(&mut self, task: &Task) -> Result<StepOutcome, PolicyError> {
        self.t += 1;
        let mut outcome = StepOutcome::empty(self.t);
        let market = self.pipeline.market.clone();

        // Fire workers whose interval expired; their level restarts at zero.
        let expired = self.intervals.expire_at(self.t);
        for &r in &expired {
            self.pipeline.team.fire(r, &market);
            self.pipeline.frac.reset_level(r);
        }
        let mut still = self.pipeline.uncovered_set(task);
        let mut hired = self.pipeline.materialize_pending(&mut still);
        for &r in &hired {
            self.intervals.open(r, self.t, self.eta[r]);
        }
        let mut outsourced = Vec::new();
        if !still.is_empty() {
            let uncovered: Vec<SkillId> = still.iter().collect();
            let candidates = self.pipeline.candidates(&uncovered);
            let (hire_probs, out_probs) = self.pipeline.raise_task(&uncovered, &candidates)?;
            let rho = rho2(
                market.skill_count(),
                market.max_outsource_fee().as_units(),
                self.t,
            );
            let (hire_marks, out_marks) =
                randomized_round(&candidates, &hire_probs, &out_probs, rho, &mut self.rng);
            let selected = select_cover_from_marks(
                &mut still,
                &hire_marks,
                |r| market.worker(r).hiring_fee,
                &market,
            );
            for &r in &selected {
                self.pipeline.team.hire(r, &market);
                self.pipeline.pending_hires.remove(r);
                self.intervals.open(r, self.t, self.eta[r]);
            }
            for &r in &hire_marks {
                if !selected.contains(&r) {
                    self.pipeline.pending_hires.insert(r);
                }
            }
            hired.extend(selected);
            outsourced = select_cover_from_marks(
                &mut still,
                &out_marks,
                |r| market.worker(r).outsource_fee,
                &market,
            );
            outsource_fallback(&self.pipeline.team, &mut still, &market, &mut outsourced)?;
        }
        hired.sort_unstable();
        outsourced.sort_unstable();

        // A worker fired and re-hired within the same period never actually
        // left the team: report the hire (a fresh interval was paid for) and
        // drop the fire.
        outcome.fired = expired.into_iter().filter(|r| !hired.contains(r)).collect();
        outcome.step_cost.hiring = hired.iter().map(|&r| market.worker(r).hiring_fee).sum();
        outcome.step_cost.outsourcing = outsourced
            .iter()
            .map(|&r| market.worker(r).outsource_fee)
            .sum();
        outcome.step_cost.salary = self.pipeline.team.salary_per_period();
        outcome.hired = hired;
        outcome.outsourced = outsourced;
        self.ledger.record(&outcome.step_cost);
        Ok(outcome)
    }

    fn reset(&mut self) {
        let market = self.pipeline.market.clone();
        let track = self.pipeline.frac.track_dual;
        self.pipeline = PdPipeline::new(market, 3.0, 3.0);
        self.pipeline.frac.track_dual = track;
        self.intervals = IntervalRegistry::default();
        self.rng = rng_from(self.seed);
        self.ledger = CostLedger::new();
        self.t = 0;
    }

    fn ledger(&self) -> &CostLedger {
        &self.ledger
    }

    fn team(&self) -> &BitSet {
        self.pipeline.team.members()
    }

    fn dual_lower_bound(&self) -> Option<f64> {
        Some(self.pipeline.frac.dual_bound())
    }
}
