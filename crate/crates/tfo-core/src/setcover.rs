//! Weighted set cover over workers.
//!
//! [`greedy_cover`] is the ratio-greedy approximation every policy uses to
//! assemble teams; [`exact_cover`] is a small exhaustive solver kept as an
//! independent oracle for tests and for the offline optimum. The weight
//! function is a parameter so one implementation serves outsourcing covers
//! (`lambda`), hiring covers (`C`), and anything in between.

use std::collections::HashMap;

use thiserror::Error;

use crate::bitset::BitSet;
use crate::model::{Marketplace, SkillId, WorkerId};
use crate::money::Money;

/// A selected team covering a required skill set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSolution {
    /// Selected workers; greedy keeps selection order, exact is sorted.
    pub selected: Vec<WorkerId>,
    pub cost: Money,
    pub covered: BitSet,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("skill {skill} is not possessed by any candidate")]
    Uncoverable { skill: SkillId },
    #[error("exact cover supports at most {limit} candidates, got {got}")]
    TooManyCandidates { got: usize, limit: usize },
    #[error("exact cover supports at most {limit} required skills, got {got}")]
    TooManySkills { got: usize, limit: usize },
}

/// Greedily select candidates by lowest weight per newly covered skill.
///
/// Ties are broken toward the lowest worker id, and ratio comparisons use
/// integer cross-multiplication, so identical inputs always yield identical
/// selections.
pub fn greedy_cover<F>(
    required: &BitSet,
    candidates: &[WorkerId],
    weight: F,
    market: &Marketplace,
) -> Result<CoverSolution, CoverError>
where
    F: Fn(WorkerId) -> Money,
{
    let mut uncovered = required.clone();
    let mut selected = Vec::new();
    let mut taken = vec![false; market.worker_count()];
    let mut cost = Money::ZERO;

    while !uncovered.is_empty() {
        let mut best: Option<(WorkerId, Money, usize)> = None;
        for &r in candidates {
            if taken[r] {
                continue;
            }
            let gain = market.worker(r).skills.intersection_len(&uncovered);
            if gain == 0 {
                continue;
            }
            let w = weight(r);
            let better = match best {
                None => true,
                Some((best_r, best_w, best_gain)) => {
                    // w / gain < best_w / best_gain, by cross-multiplication.
                    let lhs = w.cents() as i128 * best_gain as i128;
                    let rhs = best_w.cents() as i128 * gain as i128;
                    lhs < rhs || (lhs == rhs && r < best_r)
                }
            };
            if better {
                best = Some((r, w, gain));
            }
        }
        let Some((r, w, _)) = best else {
            return Err(CoverError::Uncoverable {
                skill: uncovered.first().expect("uncovered non-empty"),
            });
        };
        taken[r] = true;
        selected.push(r);
        cost += w;
        uncovered.difference_with(&market.worker(r).skills);
    }

    Ok(CoverSolution {
        selected,
        cost,
        covered: required.clone(),
    })
}

const EXACT_CANDIDATE_LIMIT: usize = 20;
const EXACT_SKILL_LIMIT: usize = 64;

/// Minimum-weight cover by exhaustive enumeration.
///
/// Branches on the lowest uncovered skill, which prunes every subset that
/// cannot become a cover; among equal-cost covers the lexicographically
/// smallest id set wins. Guarded to at most 20 candidates and 64 required
/// skills.
pub fn exact_cover<F>(
    required: &BitSet,
    candidates: &[WorkerId],
    weight: F,
    market: &Marketplace,
) -> Result<CoverSolution, CoverError>
where
    F: Fn(WorkerId) -> Money,
{
    if candidates.len() > EXACT_CANDIDATE_LIMIT {
        return Err(CoverError::TooManyCandidates {
            got: candidates.len(),
            limit: EXACT_CANDIDATE_LIMIT,
        });
    }
    let skills: Vec<SkillId> = required.iter().collect();
    if skills.len() > EXACT_SKILL_LIMIT {
        return Err(CoverError::TooManySkills {
            got: skills.len(),
            limit: EXACT_SKILL_LIMIT,
        });
    }

    // Remap required skills onto bits of a u64.
    let full: u64 = if skills.is_empty() {
        0
    } else {
        (1u64 << (skills.len() - 1) << 1).wrapping_sub(1)
    };
    let masks: Vec<u64> = candidates
        .iter()
        .map(|&r| {
            let ws = &market.worker(r).skills;
            skills
                .iter()
                .enumerate()
                .filter(|(_, &s)| ws.contains(s))
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();

    let mut memo: HashMap<u64, Option<(Money, Vec<WorkerId>)>> = HashMap::new();
    let best = solve(full, candidates, &masks, &weight, &mut memo);
    match best {
        Some((cost, mut ids)) => {
            ids.sort_unstable();
            Ok(CoverSolution {
                selected: ids,
                cost,
                covered: required.clone(),
            })
        }
        None => {
            // Some required skill has no candidate owner; name the first one.
            let mut owned = 0u64;
            for m in &masks {
                owned |= m;
            }
            let missing = (full & !owned).trailing_zeros() as usize;
            Err(CoverError::Uncoverable {
                skill: skills[missing],
            })
        }
    }
}

fn solve<F>(
    uncovered: u64,
    candidates: &[WorkerId],
    masks: &[u64],
    weight: &F,
    memo: &mut HashMap<u64, Option<(Money, Vec<WorkerId>)>>,
) -> Option<(Money, Vec<WorkerId>)>
where
    F: Fn(WorkerId) -> Money,
{
    if uncovered == 0 {
        return Some((Money::ZERO, Vec::new()));
    }
    if let Some(cached) = memo.get(&uncovered) {
        return cached.clone();
    }
    let pivot = 1u64 << uncovered.trailing_zeros();
    let mut best: Option<(Money, Vec<WorkerId>)> = None;
    for (i, &r) in candidates.iter().enumerate() {
        if masks[i] & pivot == 0 {
            continue;
        }
        if let Some((sub_cost, sub_ids)) = solve(uncovered & !masks[i], candidates, masks, weight, memo)
        {
            let cost = sub_cost + weight(r);
            let mut ids = sub_ids;
            let pos = ids.partition_point(|&x| x < r);
            ids.insert(pos, r);
            let replace = match &best {
                None => true,
                Some((bc, bids)) => cost < *bc || (cost == *bc && ids < *bids),
            };
            if replace {
                best = Some((cost, ids));
            }
        }
    }
    memo.insert(uncovered, best.clone());
    best
}
