//! Message adversaries over ultimately periodic words `u·v^ω`.
//!
//! Every property used here (who is eventually heard by everyone, who is
//! never heard after a given round) depends only on which letters occur in
//! the cycle and in a finite prefix, so membership is decided exactly.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::Value;
use crate::error::{Error, Result};
use crate::graph::{enumerate_ims, InstantGraph, ProcSet};

/// The infinite word `head · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct UpWord {
    head: Vec<InstantGraph>,
    cycle: Vec<InstantGraph>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UpWordJson {
    #[serde(default)]
    head: Vec<InstantGraph>,
    cycle: Vec<InstantGraph>,
}

impl<'de> Deserialize<'de> for UpWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = UpWordJson::deserialize(deserializer)?;
        UpWord::new(json.head, json.cycle).map_err(serde::de::Error::custom)
    }
}

impl UpWord {
    pub fn new(head: Vec<InstantGraph>, cycle: Vec<InstantGraph>) -> Result<Self> {
        let Some(first) = cycle.first() else {
            return Err(Error::InvalidGraph("empty cycle".into()));
        };
        let participants = first.participants();
        if participants != ProcSet::full(participants.len() - 1) {
            return Err(Error::InvalidGraph(format!("participants {participants} are not 0..=n")));
        }
        if head.iter().chain(&cycle).any(|g| g.participants() != participants) {
            return Err(Error::InvalidGraph("letters disagree on the participant set".into()));
        }
        Ok(UpWord { head, cycle })
    }

    pub fn periodic(cycle: Vec<InstantGraph>) -> Result<Self> {
        UpWord::new(Vec::new(), cycle)
    }

    pub fn head(&self) -> &[InstantGraph] {
        &self.head
    }

    pub fn cycle(&self) -> &[InstantGraph] {
        &self.cycle
    }

    pub fn n(&self) -> usize {
        self.cycle[0].participants().len() - 1
    }

    pub fn processes(&self) -> ProcSet {
        self.cycle[0].participants()
    }

    /// Letter at 1-based round `round`.
    pub fn letter(&self, round: usize) -> &InstantGraph {
        assert!(round >= 1);
        let i = round - 1;
        if i < self.head.len() {
            &self.head[i]
        } else {
            &self.cycle[(i - self.head.len()) % self.cycle.len()]
        }
    }

    /// The same word with one copy of the cycle moved into the head.
    pub fn unrolled(&self) -> UpWord {
        let mut head = self.head.clone();
        head.extend(self.cycle.iter().cloned());
        UpWord { head, cycle: self.cycle.clone() }
    }

    /// The distinct letters occurring at rounds strictly after `round`.
    fn letters_after(&self, round: usize) -> impl Iterator<Item = &InstantGraph> {
        let start = round.min(self.head.len());
        self.head[start..].iter().chain(&self.cycle)
    }
}

/// Processes heard by every process infinitely often.
pub fn q_of(w: &UpWord) -> ProcSet {
    let all = w.processes();
    all.iter()
        .filter(|&p| all.iter().all(|q| w.cycle.iter().any(|g| g.delivers(p, q))))
        .collect()
}

/// Processes that some process never hears in any round after `round`.
pub fn k_r(w: &UpWord, round: usize) -> ProcSet {
    let all = w.processes();
    all.iter()
        .filter(|&p| all.iter().any(|q| w.letters_after(round).all(|g| !g.delivers(p, q))))
        .collect()
}

/// Whether no process outside `Q(w)` is heard by a process of `Q(w)` after
/// `round`.
fn crashes_by(w: &UpWord, round: usize) -> bool {
    let live = q_of(w);
    let crashed = w.processes().difference(live);
    w.letters_after(round)
        .all(|g| crashed.iter().all(|p| live.iter().all(|q| !g.delivers(p, q))))
}

/// An inclusion-closed family of process sets, the sets allowed to crash.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<ProcSet>", into = "Vec<ProcSet>")]
pub struct CoreCollection(BTreeSet<ProcSet>);

impl CoreCollection {
    pub fn new(sets: impl IntoIterator<Item = ProcSet>) -> Result<Self> {
        let sets: BTreeSet<ProcSet> = sets.into_iter().collect();
        if !sets.contains(&ProcSet::EMPTY) {
            return Err(Error::InvalidAdversary("core collection must contain the empty set".into()));
        }
        for s in &sets {
            if let Some(missing) = s.subsets().find(|sub| !sets.contains(sub)) {
                return Err(Error::InvalidAdversary(format!("{s} is allowed but its subset {missing} is not")));
            }
        }
        Ok(CoreCollection(sets))
    }

    /// The smallest inclusion-closed family containing `sets` and `∅`.
    pub fn closure(sets: impl IntoIterator<Item = ProcSet>) -> Self {
        let mut closed = BTreeSet::from([ProcSet::EMPTY]);
        for s in sets {
            closed.extend(s.subsets());
        }
        CoreCollection(closed)
    }

    /// All sets of at most `t` processes among `0..=n`.
    pub fn t_resilient(n: usize, t: usize) -> Self {
        CoreCollection(ProcSet::full(n).subsets().filter(|s| s.len() <= t).collect())
    }

    pub fn contains(&self, set: ProcSet) -> bool {
        self.0.contains(&set)
    }

    pub fn sets(&self) -> &BTreeSet<ProcSet> {
        &self.0
    }
}

impl TryFrom<Vec<ProcSet>> for CoreCollection {
    type Error = Error;
    fn try_from(sets: Vec<ProcSet>) -> Result<Self> {
        CoreCollection::new(sets)
    }
}

impl From<CoreCollection> for Vec<ProcSet> {
    fn from(c: CoreCollection) -> Self {
        c.0.into_iter().collect()
    }
}

/// Input values indexed by process.
pub type Configuration = Vec<Value>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySpec {
    Iis,
    TResilient { t: usize },
    CoreResilient { core: CoreCollection },
    /// At most `t` crashes, all of them effective after round `r`.
    RestrictedTResilient { t: usize, r: usize },
    /// Crash sets from `core`, all effective after round `r`.
    RestrictedCore { core: CoreCollection, r: usize },
    ConditionBased { allowed: BTreeSet<Configuration>, inner: Box<AdversarySpec> },
    InputDependent { branches: BTreeMap<Configuration, AdversarySpec> },
}

impl AdversarySpec {
    fn validate(&self, n: usize) -> Result<()> {
        let within = |core: &CoreCollection| core.sets().iter().all(|s| s.is_subset(ProcSet::full(n)));
        match self {
            AdversarySpec::Iis => Ok(()),
            AdversarySpec::TResilient { t } | AdversarySpec::RestrictedTResilient { t, .. } if *t > n => {
                Err(Error::InvalidAdversary(format!("t = {t} exceeds n = {n}")))
            }
            AdversarySpec::TResilient { .. } | AdversarySpec::RestrictedTResilient { .. } => Ok(()),
            AdversarySpec::CoreResilient { core } | AdversarySpec::RestrictedCore { core, .. } => {
                if within(core) {
                    Ok(())
                } else {
                    Err(Error::InvalidAdversary("core set names a process outside 0..=n".into()))
                }
            }
            AdversarySpec::ConditionBased { allowed, inner } => {
                check_configurations(allowed.iter(), n)?;
                inner.validate(n)
            }
            AdversarySpec::InputDependent { branches } => {
                check_configurations(branches.keys(), n)?;
                branches.values().try_for_each(|s| s.validate(n))
            }
        }
    }

    fn needs_input(&self) -> bool {
        matches!(self, AdversarySpec::ConditionBased { .. } | AdversarySpec::InputDependent { .. })
    }
}

fn check_configurations<'a>(configs: impl Iterator<Item = &'a Configuration>, n: usize) -> Result<()> {
    for c in configs {
        if c.len() != n + 1 {
            return Err(Error::InvalidAdversary(format!("configuration of length {} for {} processes", c.len(), n + 1)));
        }
    }
    Ok(())
}

/// A validated adversary on processes `0..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AdversaryJson", into = "AdversaryJson")]
pub struct MessageAdversary {
    n: usize,
    spec: AdversarySpec,
}

#[derive(Clone, Serialize, Deserialize)]
struct AdversaryJson {
    n: usize,
    spec: AdversarySpec,
}

impl TryFrom<AdversaryJson> for MessageAdversary {
    type Error = Error;
    fn try_from(json: AdversaryJson) -> Result<Self> {
        MessageAdversary::new(json.n, json.spec)
    }
}

impl From<MessageAdversary> for AdversaryJson {
    fn from(a: MessageAdversary) -> Self {
        AdversaryJson { n: a.n, spec: a.spec }
    }
}

/// A sampled finite prefix and an infinite admissible word extending it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScenarioPrefix {
    pub prefix: Vec<InstantGraph>,
    pub witness: UpWord,
}

impl MessageAdversary {
    pub fn new(n: usize, spec: AdversarySpec) -> Result<Self> {
        spec.validate(n)?;
        Ok(MessageAdversary { n, spec })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &AdversarySpec {
        &self.spec
    }

    /// Exact membership of `w`. `input` is required exactly for
    /// condition-based and input-dependent adversaries; an input outside
    /// the condition is an error, not a plain `false`.
    pub fn contains(&self, input: Option<&Configuration>, w: &UpWord) -> Result<bool> {
        if w.n() != self.n {
            return Err(Error::InvalidAdversary(format!("word on {} processes, adversary on {}", w.n() + 1, self.n + 1)));
        }
        self.spec_contains(&self.spec, input, w)
    }

    fn spec_contains(&self, spec: &AdversarySpec, input: Option<&Configuration>, w: &UpWord) -> Result<bool> {
        let crashed = || w.processes().difference(q_of(w));
        Ok(match spec {
            AdversarySpec::Iis => true,
            AdversarySpec::TResilient { t } => crashed().len() <= *t,
            AdversarySpec::CoreResilient { core } => core.contains(crashed()),
            AdversarySpec::RestrictedTResilient { t, r } => crashed().len() <= *t && crashes_by(w, *r),
            AdversarySpec::RestrictedCore { core, r } => core.contains(crashed()) && crashes_by(w, *r),
            AdversarySpec::ConditionBased { allowed, inner } => {
                let input = require_input(input)?;
                if !allowed.contains(input) {
                    return Err(Error::OutsideCondition);
                }
                self.spec_contains(inner, Some(input), w)?
            }
            AdversarySpec::InputDependent { branches } => {
                let input = require_input(input)?;
                let inner = branches.get(input).ok_or(Error::OutsideCondition)?;
                self.spec_contains(inner, Some(input), w)?
            }
        })
    }

    /// Samples `rounds` letters that extend to a member word; the witness
    /// word is returned alongside. Deterministic for a given seed.
    pub fn sample_prefix(&self, input: Option<&Configuration>, rounds: usize, seed: u64) -> Result<ScenarioPrefix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (allowed, r) = self.crash_options(&self.spec, input)?;
        let all = ProcSet::full(self.n);
        let candidates: Vec<ProcSet> = allowed.into_iter().filter(|s| *s != all).collect();
        let crashed = *candidates.choose(&mut rng).ok_or(Error::EmptyAdversary)?;
        let live = all.difference(crashed);
        let letters = enumerate_ims(all)?;
        let mut prefix = Vec::with_capacity(rounds);
        for i in 0..rounds {
            let round = i + 1;
            let letter = match r {
                Some(r) if round > r => {
                    let mut blocks = random_ordered_partition(live, &mut rng);
                    blocks.extend(random_ordered_partition(crashed, &mut rng));
                    InstantGraph::from_ordered_partition(&blocks)?
                }
                _ => letters.choose(&mut rng).expect("nonempty").clone(),
            };
            prefix.push(letter);
        }
        let mut blocks = vec![live];
        blocks.extend(random_ordered_partition(crashed, &mut rng));
        let cycle = vec![InstantGraph::from_ordered_partition(&blocks)?];
        let witness = UpWord::new(prefix.clone(), cycle)?;
        debug_assert!(self.contains(input, &witness).unwrap_or(false));
        Ok(ScenarioPrefix { prefix, witness })
    }

    /// Crash sets the adversary tolerates and the round after which crashes
    /// must be effective, if restricted.
    fn crash_options(&self, spec: &AdversarySpec, input: Option<&Configuration>) -> Result<(Vec<ProcSet>, Option<usize>)> {
        let all = ProcSet::full(self.n);
        Ok(match spec {
            AdversarySpec::Iis => (all.subsets().collect(), None),
            AdversarySpec::TResilient { t } => (all.subsets().filter(|s| s.len() <= *t).collect(), None),
            AdversarySpec::CoreResilient { core } => (core.sets().iter().copied().collect(), None),
            AdversarySpec::RestrictedTResilient { t, r } => (all.subsets().filter(|s| s.len() <= *t).collect(), Some(*r)),
            AdversarySpec::RestrictedCore { core, r } => (core.sets().iter().copied().collect(), Some(*r)),
            AdversarySpec::ConditionBased { allowed, inner } => {
                let input = require_input(input)?;
                if allowed.is_empty() {
                    return Err(Error::EmptyAdversary);
                }
                if !allowed.contains(input) {
                    return Err(Error::OutsideCondition);
                }
                self.crash_options(inner, Some(input))?
            }
            AdversarySpec::InputDependent { branches } => {
                let input = require_input(input)?;
                let inner = branches.get(input).ok_or(Error::OutsideCondition)?;
                self.crash_options(inner, Some(input))?
            }
        })
    }

    pub fn requires_input(&self) -> bool {
        self.spec.needs_input()
    }
}

fn require_input(input: Option<&Configuration>) -> Result<&Configuration> {
    input.ok_or_else(|| Error::InvalidAdversary("this adversary needs an input configuration".into()))
}

fn random_ordered_partition(set: ProcSet, rng: &mut impl Rng) -> Vec<ProcSet> {
    let mut items: Vec<usize> = set.iter().collect();
    items.shuffle(rng);
    let mut blocks = Vec::new();
    let mut current = ProcSet::EMPTY;
    for (i, p) in items.iter().enumerate() {
        current.insert(*p);
        if i + 1 == items.len() || rng.gen_bool(0.5) {
            blocks.push(current);
            current = ProcSet::EMPTY;
        }
    }
    blocks
}

/// Every word on processes `0..=n` with head length at most `max_head` and
/// cycle length between one and `max_cycle`.
pub fn enumerate_up_words(n: usize, max_head: usize, max_cycle: usize) -> Result<Vec<UpWord>> {
    let letters = enumerate_ims(ProcSet::full(n))?;
    let words_of_len = |len: usize| -> Vec<Vec<InstantGraph>> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    letters.iter().map(move |l| {
                        let mut next = w.clone();
                        next.push(l.clone());
                        next
                    })
                })
                .collect();
        }
        out
    };
    let mut words = Vec::new();
    for head_len in 0..=max_head {
        for head in words_of_len(head_len) {
            for cycle_len in 1..=max_cycle {
                for cycle in words_of_len(cycle_len) {
                    words.push(UpWord::new(head.clone(), cycle)?);
                }
            }
        }
    }
    Ok(words)
}
