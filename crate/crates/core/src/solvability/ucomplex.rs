//! The condition complex `U(C)`: members of a condition ordered by
//! inclusion, realized at their isobarycenters.

use std::collections::{BTreeMap, BTreeSet};

use crate::complex::{AbstractComplex, Carrier, Simplex, Value, VertexData, VertexId};
use crate::error::{Error, Result};
use crate::geometry::{BaryGeometry, BaryPoint};
use crate::solvability::condition::Condition;
use crate::task::ColorlessTask;

/// `U(C)` or one of its skeleta. Vertex `v` stands for the member
/// `tags[v]` of the condition; simplices are inclusion chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionComplex {
    pub complex: AbstractComplex,
    pub tags: BTreeMap<VertexId, Simplex>,
    pub values: BTreeMap<VertexId, BTreeSet<Value>>,
}

impl ConditionComplex {
    pub fn vertex_of(&self, member: &Simplex) -> Option<VertexId> {
        self.tags.iter().find(|(_, m)| *m == member).map(|(v, _)| *v)
    }

    pub fn label(&self, v: VertexId) -> String {
        self.complex.value(v).to_string()
    }

    /// The largest member of a chain.
    pub fn top(&self, chain: &Simplex) -> Result<Simplex> {
        chain
            .iter()
            .map(|v| self.tags.get(&v).ok_or(Error::Untagged(v)))
            .try_fold(None::<&Simplex>, |best, tag| {
                let tag = tag?;
                Ok(Some(match best {
                    Some(b) if b.len() >= tag.len() => b,
                    _ => tag,
                }))
            })
            .map(|t| t.cloned().unwrap_or_default())
    }

    /// Isobarycenter of vertex `v`'s member, in the ambient barycentric
    /// coordinates.
    pub fn position(&self, geometry: &BaryGeometry, v: VertexId) -> Result<BaryPoint> {
        geometry.iso(self.tags.get(&v).ok_or(Error::Untagged(v))?)
    }
}

/// All maximal chains of the poset `members` under strict inclusion.
fn maximal_chains(members: &[Simplex]) -> Vec<Vec<usize>> {
    let below = |a: &Simplex, b: &Simplex| a.len() < b.len() && a.is_subset(b);
    let covers: Vec<Vec<usize>> = (0..members.len())
        .map(|i| {
            (0..members.len())
                .filter(|&j| {
                    below(&members[i], &members[j])
                        && !members.iter().any(|m| below(&members[i], m) && below(m, &members[j]))
                })
                .collect()
        })
        .collect();
    let minimal: Vec<usize> = (0..members.len())
        .filter(|&i| !members.iter().any(|m| below(m, &members[i])))
        .collect();
    let mut chains = Vec::new();
    let mut stack: Vec<Vec<usize>> = minimal.into_iter().map(|i| vec![i]).collect();
    while let Some(chain) = stack.pop() {
        let last = *chain.last().unwrap();
        if covers[last].is_empty() {
            chains.push(chain);
            continue;
        }
        for &next in &covers[last] {
            let mut longer = chain.clone();
            longer.push(next);
            stack.push(longer);
        }
    }
    chains
}

/// Builds `U(C)`. Members are numbered by dimension, then
/// lexicographically; each vertex's payload value is its label.
pub fn build_u(condition: &Condition) -> ConditionComplex {
    let mut members: Vec<Simplex> = condition.members().iter().cloned().collect();
    members.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let ids: Vec<VertexId> = (0..members.len()).map(|i| VertexId(i as u32)).collect();
    let payloads = members
        .iter()
        .zip(&ids)
        .map(|(m, id)| (*id, VertexData::valued(condition.label(m))));
    let chains = maximal_chains(&members)
        .into_iter()
        .map(|chain| chain.into_iter().map(|i| ids[i]).collect::<Simplex>());
    let complex = AbstractComplex::new(payloads, chains).expect("chains of members");
    let values = ids.iter().zip(&members).map(|(id, m)| (*id, condition.ambient().giv(m))).collect();
    let tags = ids.into_iter().zip(members).collect();
    ConditionComplex { complex, tags, values }
}

/// The `k`-skeleton of `U(C)`.
pub fn kin(condition: &Condition, k: usize) -> ConditionComplex {
    let u = build_u(condition);
    let complex = u.complex.skeleton(k as isize);
    ConditionComplex { complex, tags: u.tags, values: u.values }
}

/// `Δ ∘ Bary⁻¹` on `U`: a chain is carried by `Δ` of the values of its
/// largest member.
pub struct UCarrier<'a> {
    pub task: &'a ColorlessTask,
    pub u: &'a ConditionComplex,
}

impl Carrier for UCarrier<'_> {
    fn generators(&self, chain: &Simplex) -> Result<Vec<Simplex>> {
        if chain.is_empty() {
            return Ok(Vec::new());
        }
        let top = self.u.top(chain)?;
        let top_vertex = self.u.vertex_of(&top).ok_or_else(|| Error::SimplexNotFound(top.clone()))?;
        self.task.delta_on_values(&self.u.values[&top_vertex])
    }
}

pub fn carrier_on_u<'a>(task: &'a ColorlessTask, u: &'a ConditionComplex) -> UCarrier<'a> {
    UCarrier { task, u }
}
