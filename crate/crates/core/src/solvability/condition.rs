//! Conditions: face-closed families of proper input simplices.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{AbstractComplex, Simplex, Value, ValueOrder, VertexData, VertexId};
use crate::error::{Error, Result};

/// A family of simplices of an ambient complex, closed under taking faces
/// of dimension at least `min_dim`.
///
/// Over a pseudosphere `P_n(V)` the ambient vertex for process `p` holding
/// the value of rank `r` has id `p * |V| + r`, so facets compare like their
/// value-rank vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    ambient: AbstractComplex,
    pseudosphere: Option<(usize, ValueOrder)>,
    min_dim: usize,
    members: BTreeSet<Simplex>,
}

/// Value multiplicities, largest value first under `order`.
fn counts_by_value(values: &[Value], order: &ValueOrder) -> Result<Vec<usize>> {
    let mut counts = vec![0usize; order.len()];
    for v in values {
        let rank = order
            .rank(v)
            .ok_or_else(|| Error::InvalidCondition(format!("value {v} outside the value order")))?;
        counts[rank] += 1;
    }
    Ok(counts.into_iter().rev().filter(|c| *c > 0).collect())
}

/// Whether a configuration satisfies the first classical condition: the
/// multiplicities of its `k` largest values add up to more than `t`.
pub fn c1_holds(values: &[Value], order: &ValueOrder, t: usize, k: usize) -> Result<bool> {
    let counts = counts_by_value(values, order)?;
    Ok(counts.iter().take(k).sum::<usize>() > t)
}

/// Whether a configuration satisfies the second classical condition: with
/// `a_i` the `i`-th largest multiplicity, `Σ_{i≤k} a_i - k·a_{k+1} > t`.
pub fn c2_holds(values: &[Value], order: &ValueOrder, t: usize, k: usize) -> Result<bool> {
    let mut counts = counts_by_value(values, order)?;
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let top: usize = counts.iter().take(k).sum();
    let next = counts.get(k).copied().unwrap_or(0);
    Ok(top as i64 - (k * next) as i64 > t as i64)
}

fn check_params(n: usize, t: usize, k: usize, values: &ValueOrder) -> Result<()> {
    if t > n {
        return Err(Error::InvalidCondition(format!("t = {t} exceeds n = {n}")));
    }
    if k == 0 {
        return Err(Error::InvalidCondition("k must be at least 1".into()));
    }
    if values.is_empty() {
        return Err(Error::InvalidCondition("no input values".into()));
    }
    Ok(())
}

impl Condition {
    /// Closes `generators` under faces of dimension at least `min_dim`.
    pub fn from_generators(
        ambient: AbstractComplex,
        generators: impl IntoIterator<Item = Simplex>,
        min_dim: usize,
    ) -> Result<Self> {
        let mut members = BTreeSet::new();
        for g in generators {
            if !ambient.contains(&g) || g.is_empty() {
                return Err(Error::InvalidCondition(format!("{g} is not a simplex of the ambient complex")));
            }
            if g.dim() < min_dim as isize {
                return Err(Error::InvalidCondition(format!("{g} has dimension below {min_dim}")));
            }
            members.extend(g.faces().into_iter().filter(|f| f.dim() >= min_dim as isize));
        }
        Ok(Condition { ambient, pseudosphere: None, min_dim, members })
    }

    /// The condition on `P_n(values)` generated by the full configurations
    /// accepted by `keep`, closed under faces with at least `n + 1 - t`
    /// processes.
    pub fn from_configurations(
        n: usize,
        t: usize,
        values: &ValueOrder,
        keep: impl Fn(&[Value]) -> Result<bool>,
    ) -> Result<Self> {
        if t > n {
            return Err(Error::InvalidCondition(format!("t = {t} exceeds n = {n}")));
        }
        let base = AbstractComplex::full_simplex(values.values().iter().map(|v| VertexData::valued(v.clone())));
        let ambient = base.pseudosphere(n).into_complex();
        let mut generators = Vec::new();
        for facet in ambient.facets() {
            let config: Vec<Value> = facet.iter().map(|v| ambient.value(v)).collect();
            if keep(&config)? {
                generators.push(facet.clone());
            }
        }
        let mut condition = Condition::from_generators(ambient, generators, n - t)?;
        condition.pseudosphere = Some((n, values.clone()));
        Ok(condition)
    }

    pub fn full(n: usize, t: usize, values: &ValueOrder) -> Result<Self> {
        Condition::from_configurations(n, t, values, |_| Ok(true))
    }

    pub fn empty(n: usize, t: usize, values: &ValueOrder) -> Result<Self> {
        Condition::from_configurations(n, t, values, |_| Ok(false))
    }

    pub fn c1(n: usize, t: usize, k: usize, values: &ValueOrder) -> Result<Self> {
        check_params(n, t, k, values)?;
        Condition::from_configurations(n, t, values, |c| c1_holds(c, values, t, k))
    }

    pub fn c2(n: usize, t: usize, k: usize, values: &ValueOrder) -> Result<Self> {
        check_params(n, t, k, values)?;
        Condition::from_configurations(n, t, values, |c| c2_holds(c, values, t, k))
    }

    /// Keeps a configuration when the values elected on its
    /// `(n + 1 - t)`-process sub-configurations number at most `k`.
    /// `select` receives the processes of the subset and their values.
    pub fn selection(
        n: usize,
        t: usize,
        k: usize,
        values: &ValueOrder,
        select: impl Fn(&[usize], &[Value]) -> Value,
    ) -> Result<Self> {
        check_params(n, t, k, values)?;
        let size = n + 1 - t;
        let subsets: Vec<Vec<usize>> = (0u64..(1 << (n + 1)))
            .filter(|m| m.count_ones() as usize == size)
            .map(|m| (0..=n).filter(|p| m & (1 << p) != 0).collect())
            .collect();
        Condition::from_configurations(n, t, values, |config| {
            let elected: BTreeSet<Value> = subsets
                .iter()
                .map(|procs| {
                    let vals: Vec<Value> = procs.iter().map(|&p| config[p].clone()).collect();
                    select(procs, &vals)
                })
                .collect();
            Ok(elected.len() <= k)
        })
    }

    /// Adds a simplex together with its faces of dimension at least
    /// `min_dim`.
    pub fn with_simplex(&self, simplex: &Simplex) -> Result<Self> {
        let mut next = Condition::from_generators(
            self.ambient.clone(),
            self.members.iter().cloned().chain(std::iter::once(simplex.clone())),
            self.min_dim,
        )?;
        next.pseudosphere = self.pseudosphere.clone();
        Ok(next)
    }

    /// Re-closes the condition with another lower dimension bound.
    pub fn with_min_dim(&self, min_dim: usize) -> Result<Self> {
        let generators: Vec<Simplex> = self.members.iter().filter(|m| m.dim() >= min_dim as isize).cloned().collect();
        let mut next = Condition::from_generators(self.ambient.clone(), generators, min_dim)?;
        next.pseudosphere = self.pseudosphere.clone();
        Ok(next)
    }

    pub fn ambient(&self) -> &AbstractComplex {
        &self.ambient
    }

    pub fn min_dim(&self) -> usize {
        self.min_dim
    }

    pub fn members(&self) -> &BTreeSet<Simplex> {
        &self.members
    }

    pub fn contains(&self, simplex: &Simplex) -> bool {
        self.members.contains(simplex)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Process count and value order when the ambient is a pseudosphere.
    pub fn pseudosphere(&self) -> Option<(usize, &ValueOrder)> {
        self.pseudosphere.as_ref().map(|(n, v)| (*n, v))
    }

    /// Facets of the ambient complex, which for a pseudosphere are the full
    /// input configurations.
    pub fn configurations(&self) -> &[Simplex] {
        self.ambient.facets()
    }

    /// Ambient vertex of process `p` holding `value`.
    pub fn vertex_for(&self, p: usize, value: &Value) -> Result<VertexId> {
        let (n, order) = self
            .pseudosphere
            .as_ref()
            .ok_or_else(|| Error::InvalidCondition("ambient is not a pseudosphere".into()))?;
        let rank = order
            .rank(value)
            .ok_or_else(|| Error::InvalidCondition(format!("value {value} outside the value order")))?;
        if p > *n {
            return Err(Error::InvalidCondition(format!("process {p} out of range")));
        }
        Ok(VertexId((p * order.len() + rank) as u32))
    }

    /// Ambient simplex of a full or partial configuration given as
    /// `(process, value)` pairs.
    pub fn simplex_for(&self, pairs: &[(usize, Value)]) -> Result<Simplex> {
        let simplex: Simplex = pairs.iter().map(|(p, v)| self.vertex_for(*p, v)).collect::<Result<_>>()?;
        let procs: BTreeSet<usize> = pairs.iter().map(|(p, _)| *p).collect();
        if procs.len() != pairs.len() {
            return Err(Error::InvalidCondition("a process appears twice".into()));
        }
        Ok(simplex)
    }

    /// `(process, value)` pairs of an ambient simplex, when colored.
    pub fn pairs(&self, simplex: &Simplex) -> Vec<(Option<usize>, Value)> {
        simplex.iter().map(|v| (self.ambient.color(v), self.ambient.value(v))).collect()
    }

    /// Human-readable label: `p=v,…` for colored simplices, the
    /// concatenated values otherwise.
    pub fn label(&self, simplex: &Simplex) -> String {
        let pairs = self.pairs(simplex);
        if pairs.iter().all(|(p, _)| p.is_some()) {
            pairs
                .iter()
                .map(|(p, v)| format!("{}={}", p.unwrap(), v))
                .collect::<Vec<_>>()
                .join(",")
        } else {
            pairs.iter().map(|(_, v)| v.to_string()).collect()
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientJson {
    n: usize,
    values: Vec<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairJson {
    proc: usize,
    value: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionJson {
    ambient: AmbientJson,
    members: Vec<Vec<PairJson>>,
}

impl Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let (n, order) = self
            .pseudosphere()
            .ok_or_else(|| S::Error::custom("only pseudosphere conditions have a JSON form"))?;
        let members = self
            .members
            .iter()
            .map(|m| {
                self.pairs(m)
                    .into_iter()
                    .map(|(p, value)| PairJson { proc: p.expect("colored"), value })
                    .collect()
            })
            .collect();
        ConditionJson { ambient: AmbientJson { n, values: order.values().to_vec() }, members }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = ConditionJson::deserialize(deserializer)?;
        let order = ValueOrder::new(json.ambient.values).map_err(D::Error::custom)?;
        let n = json.ambient.n;
        let empty = Condition::empty(n, 0, &order).map_err(D::Error::custom)?;
        let mut generators = Vec::new();
        for member in json.members {
            let pairs: Vec<(usize, Value)> = member.into_iter().map(|p| (p.proc, p.value)).collect();
            generators.push(empty.simplex_for(&pairs).map_err(D::Error::custom)?);
        }
        let min_dim = generators.iter().map(|g| g.dim().max(0) as usize).min().unwrap_or(n);
        let mut condition = Condition::from_generators(empty.ambient, generators, min_dim).map_err(D::Error::custom)?;
        condition.pseudosphere = Some((n, order));
        Ok(condition)
    }
}

/// Multiset of values of a configuration, as counts keyed by value.
pub fn value_multiset(condition: &Condition, simplex: &Simplex) -> BTreeMap<Value, usize> {
    let mut counts = BTreeMap::new();
    for v in simplex.iter() {
        *counts.entry(condition.ambient().value(v)).or_insert(0) += 1;
    }
    counts
}
