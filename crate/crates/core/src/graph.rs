//! Process sets and immediate-snapshot instant graphs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_PROCESSES: usize = 64;

/// A set of process indices in `0..64`, stored as a bitmask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcSet(u64);

impl ProcSet {
    pub const EMPTY: ProcSet = ProcSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ProcSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{0, …, n}`.
    pub fn full(n: usize) -> Self {
        assert!(n < MAX_PROCESSES);
        if n == 63 {
            ProcSet(u64::MAX)
        } else {
            ProcSet((1u64 << (n + 1)) - 1)
        }
    }

    pub fn singleton(p: usize) -> Self {
        assert!(p < MAX_PROCESSES);
        ProcSet(1 << p)
    }

    pub fn contains(self, p: usize) -> bool {
        p < MAX_PROCESSES && self.0 & (1 << p) != 0
    }

    pub fn insert(&mut self, p: usize) {
        assert!(p < MAX_PROCESSES);
        self.0 |= 1 << p;
    }

    pub fn remove(&mut self, p: usize) {
        if p < MAX_PROCESSES {
            self.0 &= !(1 << p);
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: ProcSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: ProcSet) -> ProcSet {
        ProcSet(self.0 | other.0)
    }

    pub fn intersection(self, other: ProcSet) -> ProcSet {
        ProcSet(self.0 & other.0)
    }

    pub fn difference(self, other: ProcSet) -> ProcSet {
        ProcSet(self.0 & !other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..MAX_PROCESSES).filter(move |p| self.contains(*p))
    }

    /// All subsets, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = ProcSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let current = next?;
            next = if current == full { None } else { Some((current.wrapping_sub(full)) & full) };
            Some(ProcSet(current))
        })
    }
}

impl FromIterator<usize> for ProcSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = ProcSet::EMPTY;
        for p in iter {
            set.insert(p);
        }
        set
    }
}

impl fmt::Display for ProcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for ProcSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ProcSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(p) = items.iter().find(|p| **p >= MAX_PROCESSES) {
            return Err(serde::de::Error::custom(format!("process index {p} out of range")));
        }
        Ok(items.into_iter().collect())
    }
}

/// One communication round: `In(p)` is the set of processes whose message
/// `p` receives. Construction checks self-delivery, Containment and
/// Immediacy, so every value of this type is an immediate-snapshot graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InstantGraph {
    participants: ProcSet,
    in_sets: BTreeMap<usize, ProcSet>,
}

impl InstantGraph {
    pub fn new(in_sets: BTreeMap<usize, ProcSet>) -> Result<Self> {
        if in_sets.is_empty() {
            return Err(Error::InvalidGraph("no participants".into()));
        }
        let participants: ProcSet = in_sets.keys().copied().collect();
        for (&p, &view) in &in_sets {
            if !view.contains(p) {
                return Err(Error::InvalidGraph(format!("process {p} does not receive its own message")));
            }
            if !view.is_subset(participants) {
                return Err(Error::InvalidGraph(format!("In({p}) = {view} leaves the participant set")));
            }
        }
        for (&a, &view_a) in &in_sets {
            for (&b, &view_b) in &in_sets {
                if !view_a.is_subset(view_b) && !view_b.is_subset(view_a) {
                    return Err(Error::InvalidGraph(format!("In({a}) and In({b}) are incomparable")));
                }
                // Immediacy: a ∈ In(b) implies In(a) ⊆ In(b).
                if view_b.contains(a) && !view_a.is_subset(view_b) {
                    return Err(Error::InvalidGraph(format!("{a} ∈ In({b}) but In({a}) ⊄ In({b})")));
                }
            }
        }
        Ok(InstantGraph { participants, in_sets })
    }

    /// Graph of an ordered set partition: a process in block `j` sees the
    /// union of blocks `0..=j`.
    pub fn from_ordered_partition(blocks: &[ProcSet]) -> Result<Self> {
        let mut seen = ProcSet::EMPTY;
        let mut in_sets = BTreeMap::new();
        for &block in blocks {
            if block.is_empty() || !block.intersection(seen).is_empty() {
                return Err(Error::InvalidGraph("blocks must be nonempty and disjoint".into()));
            }
            seen = seen.union(block);
            for p in block.iter() {
                in_sets.insert(p, seen);
            }
        }
        InstantGraph::new(in_sets)
    }

    /// Everyone hears everyone.
    pub fn complete(participants: ProcSet) -> Self {
        InstantGraph::from_ordered_partition(&[participants]).expect("complete graph")
    }

    pub fn participants(&self) -> ProcSet {
        self.participants
    }

    pub fn in_set(&self, p: usize) -> Option<ProcSet> {
        self.in_sets.get(&p).copied()
    }

    pub fn in_sets(&self) -> &BTreeMap<usize, ProcSet> {
        &self.in_sets
    }

    /// The blocks of the ordered partition, from earliest to latest.
    pub fn ordered_partition(&self) -> Vec<ProcSet> {
        let mut views: Vec<ProcSet> = self.in_sets.values().copied().collect();
        views.sort_by_key(|v| v.len());
        views.dedup();
        let mut previous = ProcSet::EMPTY;
        views
            .into_iter()
            .map(|view| {
                let block = view.difference(previous);
                previous = view;
                block
            })
            .collect()
    }

    /// Whether `p`'s message reaches `q` in this round.
    pub fn delivers(&self, p: usize, q: usize) -> bool {
        self.in_set(q).is_some_and(|view| view.contains(p))
    }
}

impl fmt::Display for InstantGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.ordered_partition().iter().enumerate() {
            if i > 0 {
                f.write_str(" < ")?;
            }
            write!(f, "{block}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    participants: ProcSet,
    #[serde(rename = "in")]
    in_sets: BTreeMap<String, ProcSet>,
}

impl Serialize for InstantGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            participants: self.participants,
            in_sets: self.in_sets.iter().map(|(p, v)| (p.to_string(), *v)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InstantGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let json = GraphJson::deserialize(deserializer)?;
        let mut in_sets = BTreeMap::new();
        for (key, view) in json.in_sets {
            let p: usize = key
                .parse()
                .ok()
                .filter(|p| *p < MAX_PROCESSES)
                .ok_or_else(|| D::Error::custom(format!("bad process key {key:?}")))?;
            in_sets.insert(p, view);
        }
        let graph = InstantGraph::new(in_sets).map_err(D::Error::custom)?;
        if graph.participants != json.participants {
            return Err(D::Error::custom("participants do not match the keys of \"in\""));
        }
        Ok(graph)
    }
}

/// All ordered set partitions of `set`, first block chosen in increasing
/// bitmask order.
pub fn ordered_partitions(set: ProcSet) -> Vec<Vec<ProcSet>> {
    if set.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in set.subsets().filter(|s| !s.is_empty()) {
        for mut rest in ordered_partitions(set.difference(first)) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every immediate-snapshot graph on `participants`, in a fixed order.
pub fn enumerate_ims(participants: ProcSet) -> Result<Vec<InstantGraph>> {
    if participants.is_empty() {
        return Err(Error::InvalidGraph("empty participant set".into()));
    }
    ordered_partitions(participants)
        .iter()
        .map(|blocks| InstantGraph::from_ordered_partition(blocks))
        .collect()
}
