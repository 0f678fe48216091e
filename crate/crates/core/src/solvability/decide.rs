//! Backtracking search for a simplicial map `U → O` carried by
//! `Δ ∘ Bary⁻¹`, and the maximality check built on it.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::complex::{check_carried, check_simplicial, Simplex, SimplicialMap, VertexId};
use crate::error::{Error, Result};
use crate::solvability::condition::Condition;
use crate::solvability::ucomplex::{build_u, carrier_on_u, ConditionComplex};
use crate::task::ColorlessTask;

pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Solvable(SimplicialMap),
    Unsolvable,
    /// The node budget ran out before the search finished.
    Budget,
}

impl Decision {
    pub fn is_solvable(&self) -> bool {
        matches!(self, Decision::Solvable(_))
    }

    /// `{"result": …, "witness": {label: output value}}`.
    pub fn to_json(&self, task: &ColorlessTask, u: &ConditionComplex) -> serde_json::Value {
        match self {
            Decision::Solvable(map) => {
                let witness: BTreeMap<String, String> = map
                    .entries()
                    .iter()
                    .map(|(v, out)| (u.label(*v), task.output().value(*out).to_string()))
                    .collect();
                json!({"result": "solvable", "witness": witness})
            }
            Decision::Unsolvable => json!({"result": "unsolvable"}),
            Decision::Budget => json!({"result": "budget"}),
        }
    }
}

struct Search<'a> {
    u: &'a ConditionComplex,
    /// Allowed output generators for chains whose top is this vertex.
    allowed: BTreeMap<VertexId, Vec<Simplex>>,
    /// Members size, to find the top of a chain.
    size: BTreeMap<VertexId, usize>,
    facets_of: BTreeMap<VertexId, Vec<usize>>,
    order_key: BTreeMap<VertexId, usize>,
    domains: BTreeMap<VertexId, Vec<VertexId>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Whether the assigned part of every chain through `v` stays allowed.
    fn consistent(&self, v: VertexId, assignment: &BTreeMap<VertexId, VertexId>) -> bool {
        for &f in &self.facets_of[&v] {
            let facet = &self.u.complex.facets()[f];
            let assigned: Vec<VertexId> = facet.iter().filter(|w| assignment.contains_key(w)).collect();
            let others: Vec<VertexId> = assigned.iter().copied().filter(|w| *w != v).collect();
            for mask in 0u32..(1 << others.len()) {
                let mut chain = vec![v];
                chain.extend((0..others.len()).filter(|i| mask & (1 << i) != 0).map(|i| others[i]));
                let top = *chain.iter().max_by_key(|w| self.size[w]).unwrap();
                let image: Simplex = chain.iter().map(|w| assignment[w]).collect();
                if !self.allowed[&top].iter().any(|g| image.is_subset(g)) {
                    return false;
                }
            }
        }
        true
    }

    fn live_values(&self, v: VertexId, assignment: &mut BTreeMap<VertexId, VertexId>) -> Vec<VertexId> {
        let mut live = Vec::new();
        for &value in &self.domains[&v] {
            assignment.insert(v, value);
            if self.consistent(v, assignment) {
                live.push(value);
            }
            assignment.remove(&v);
        }
        live
    }

    fn run(&mut self, assignment: &mut BTreeMap<VertexId, VertexId>) -> Option<bool> {
        let unassigned: Vec<VertexId> = self.domains.keys().copied().filter(|v| !assignment.contains_key(v)).collect();
        if unassigned.is_empty() {
            return Some(true);
        }
        let mut best: Option<(VertexId, Vec<VertexId>)> = None;
        for v in unassigned {
            let live = self.live_values(v, assignment);
            if live.is_empty() {
                return Some(false);
            }
            let better = match &best {
                None => true,
                Some((b, values)) => (live.len(), self.order_key[&v]) < (values.len(), self.order_key[b]),
            };
            if better {
                best = Some((v, live));
            }
        }
        let (v, values) = best.expect("nonempty");
        for value in values {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            assignment.insert(v, value);
            match self.run(assignment) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            assignment.remove(&v);
        }
        Some(false)
    }
}

/// Decides whether some simplicial map `U → O` is carried by `Δ ∘ Bary⁻¹`.
/// Variables are chosen by fewest remaining values, ties broken by larger
/// chain degree then smaller id; values are tried in increasing output id,
/// so the witness is deterministic. A witness is re-verified before it is
/// returned.
pub fn decide(task: &ColorlessTask, u: &ConditionComplex, budget: u64) -> Result<Decision> {
    let mut allowed = BTreeMap::new();
    let mut domains = BTreeMap::new();
    let mut size = BTreeMap::new();
    for v in u.complex.vertex_ids() {
        let tag = u.tags.get(&v).ok_or(Error::Untagged(v))?;
        let gens = task.delta_on_values(&u.values[&v])?;
        let domain: BTreeSet<VertexId> = gens.iter().flat_map(|g| g.iter()).collect();
        domains.insert(v, domain.into_iter().collect::<Vec<_>>());
        allowed.insert(v, gens);
        size.insert(v, tag.len());
    }
    let mut facets_of: BTreeMap<VertexId, Vec<usize>> = u.complex.vertex_ids().map(|v| (v, Vec::new())).collect();
    for (i, facet) in u.complex.facets().iter().enumerate() {
        for v in facet.iter() {
            facets_of.get_mut(&v).unwrap().push(i);
        }
    }
    let mut ranked: Vec<VertexId> = u.complex.vertex_ids().collect();
    ranked.sort_by(|a, b| facets_of[b].len().cmp(&facets_of[a].len()).then(a.cmp(b)));
    let order_key = ranked.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut search = Search { u, allowed, size, facets_of, order_key, domains, nodes: 0, budget };
    let mut assignment = BTreeMap::new();
    match search.run(&mut assignment) {
        None => Ok(Decision::Budget),
        Some(false) => Ok(Decision::Unsolvable),
        Some(true) => {
            let map = SimplicialMap::new(assignment);
            let carrier = carrier_on_u(task, u);
            if !check_simplicial(&map, &u.complex, task.output())?
                || !check_carried(&map, &u.complex, task.output(), &carrier)?
            {
                unreachable!("search produced a map that fails verification");
            }
            Ok(Decision::Solvable(map))
        }
    }
}

/// Exhaustive reference: tries every vertex map `V(U) → V(O)`.
pub fn decide_exhaustive(task: &ColorlessTask, u: &ConditionComplex) -> Result<bool> {
    let sources: Vec<VertexId> = u.complex.vertex_ids().collect();
    let targets: Vec<VertexId> = task.output().vertex_ids().collect();
    let carrier = carrier_on_u(task, u);
    for assignment in crate::complex::cartesian_power(&targets, sources.len()) {
        let map = SimplicialMap::new(sources.iter().copied().zip(assignment));
        if check_carried(&map, &u.complex, task.output(), &carrier)? {
            return Ok(true);
        }
    }
    Ok(false)
}

pub fn decide_condition(task: &ColorlessTask, condition: &Condition, budget: u64) -> Result<Decision> {
    decide(task, &build_u(condition), budget)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Maximality {
    pub maximal: bool,
    /// A configuration outside the condition whose addition keeps the task
    /// solvable, when one exists.
    pub counterexample: Option<Simplex>,
}

/// A condition is maximal when the task is solvable on it and adding any
/// configuration outside it (with its faces) makes the task unsolvable.
/// Configurations are tried in decreasing order of their value ranks, so
/// for binary values `(1,1,0)` comes before `(1,0,0)`.
pub fn is_maximal(task: &ColorlessTask, condition: &Condition, budget: u64) -> Result<Maximality> {
    match decide_condition(task, condition, budget)? {
        Decision::Budget => return Err(Error::SearchBudget(budget)),
        Decision::Unsolvable => return Ok(Maximality { maximal: false, counterexample: None }),
        Decision::Solvable(_) => {}
    }
    let mut candidates: Vec<Simplex> = condition
        .configurations()
        .iter()
        .filter(|c| !condition.contains(c))
        .cloned()
        .collect();
    candidates.sort_by(|a, b| b.cmp(a));
    for candidate in candidates {
        let extended = condition.with_simplex(&candidate)?;
        match decide_condition(task, &extended, budget)? {
            Decision::Budget => return Err(Error::SearchBudget(budget)),
            Decision::Solvable(_) => return Ok(Maximality { maximal: false, counterexample: Some(candidate) }),
            Decision::Unsolvable => {}
        }
    }
    Ok(Maximality { maximal: true, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Value, ValueOrder};
    use crate::task::make_kset;

    fn setup(k: usize) -> (ColorlessTask, ValueOrder) {
        let values = [Value::from("0"), Value::from("1")];
        (make_kset(&values, k).unwrap(), ValueOrder::new(values).unwrap())
    }

    #[test]
    fn c2_is_solvable_and_full_is_not() {
        let (task, order) = setup(1);
        let c2 = Condition::c2(2, 1, 1, &order).unwrap();
        assert!(decide_condition(&task, &c2, DEFAULT_SEARCH_BUDGET).unwrap().is_solvable());
        let full = Condition::full(2, 1, &order).unwrap();
        assert_eq!(decide_condition(&task, &full, DEFAULT_SEARCH_BUDGET).unwrap(), Decision::Unsolvable);
    }

    #[test]
    fn tiny_budget_reports_budget() {
        let (task, order) = setup(1);
        let full = Condition::full(2, 1, &order).unwrap();
        assert_eq!(decide_condition(&task, &full, 0).unwrap(), Decision::Budget);
    }

    #[test]
    fn empty_condition_is_not_maximal() {
        let (task, order) = setup(1);
        let empty = Condition::empty(2, 1, &order).unwrap();
        let m = is_maximal(&task, &empty, DEFAULT_SEARCH_BUDGET).unwrap();
        assert!(!m.maximal);
        assert!(m.counterexample.is_some());
    }
}
