use std::sync::Arc;

use super::engine::Individual;
use super::objectives::{dominates, ObjectiveSet, ObjectiveVector};
use crate::error::{Error, Result};

/// Hall of fame: every non-dominated individual seen so far.
///
/// A candidate is admitted when no member dominates it and no member is its
/// twin (same genome, or an identical objective vector); admitting it evicts
/// the members it dominates. The first evaluation of a genome that makes it
/// in is the one kept.
#[derive(Debug, Clone)]
pub struct ParetoArchive {
    objectives: ObjectiveSet,
    members: Vec<Individual>,
}

impl ParetoArchive {
    pub fn new(objectives: ObjectiveSet) -> Self {
        ParetoArchive { objectives, members: Vec::new() }
    }

    pub fn objective_set(&self) -> ObjectiveSet {
        self.objectives
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn into_members(self) -> Vec<Individual> {
        self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Offers one evaluated individual; returns whether it was admitted.
    pub fn insert(&mut self, candidate: Individual) -> Result<bool> {
        let objectives = candidate.objectives.ok_or(Error::Unevaluated(candidate.id))?;
        let set = self.objectives;
        let key = set.project(&objectives);
        let mut blocked = false;
        for m in &self.members {
            let theirs = m.objectives.as_ref().expect("archive members are evaluated");
            if dominates(set.project(theirs), key) || is_twin(m, &candidate, theirs, &objectives) {
                blocked = true;
                break;
            }
        }
        if blocked {
            return Ok(false);
        }
        self.members.retain(|m| {
            let theirs = m.objectives.as_ref().expect("archive members are evaluated");
            !dominates(key, set.project(theirs))
        });
        self.members.push(candidate);
        Ok(true)
    }

    /// Offers individuals in order; returns how many were admitted.
    pub fn absorb<I: IntoIterator<Item = Individual>>(&mut self, candidates: I) -> Result<usize> {
        let mut admitted = 0;
        for c in candidates {
            admitted += usize::from(self.insert(c)?);
        }
        Ok(admitted)
    }

    /// Union of several archives, re-pruned to the non-dominated set.
    pub fn merge<'a>(objectives: ObjectiveSet, archives: impl IntoIterator<Item = &'a ParetoArchive>) -> Result<Self> {
        let mut merged = ParetoArchive::new(objectives);
        for a in archives {
            merged.absorb(a.members.iter().cloned())?;
        }
        Ok(merged)
    }

    /// True when no member dominates another.
    pub fn is_consistent(&self) -> bool {
        let set = self.objectives;
        self.members.iter().all(|a| {
            self.members.iter().all(|b| match (&a.objectives, &b.objectives) {
                (Some(x), Some(y)) => !dominates(set.project(x), set.project(y)),
                _ => false,
            })
        })
    }

    /// Smallest value reached on each objective by any member.
    pub fn best(&self) -> Option<[f64; 4]> {
        let mut it = self.members.iter().filter_map(|m| m.objectives);
        let first = it.next()?;
        Some(it.fold(first.0, |acc, v| std::array::from_fn(|k| acc[k].min(v.0[k]))))
    }
}

fn is_twin(a: &Individual, b: &Individual, oa: &ObjectiveVector, ob: &ObjectiveVector) -> bool {
    oa == ob || Arc::ptr_eq(&a.genome, &b.genome) || a.genome == b.genome
}

/// Non-dominated subset of `items`, with twins collapsed to their first occurrence.
pub fn non_dominated_subset(
    objectives: ObjectiveSet,
    items: impl IntoIterator<Item = Individual>,
) -> Result<Vec<Individual>> {
    let mut a = ParetoArchive::new(objectives);
    a.absorb(items)?;
    Ok(a.into_members())
}
