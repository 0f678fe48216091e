//! Colorless tasks `(I, O, Δ)` and the carrier transforms that preserve
//! solvability: dimension capping and per-vertex determinization.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::complex::{
    cartesian_power, check_simplicial, AbstractComplex, Carrier, Simplex, SimplicialMap, Value, VertexData,
    VertexId,
};
use crate::error::{Error, Result};

/// Carrier of a task, stored symbolically. Evaluation needs the task's
/// complexes, see [`ColorlessTask::delta`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Delta {
    /// Outputs are sets of at most `k` values among the inputs.
    KSet { k: usize },
    /// Explicit generators for each simplex of the input complex.
    Table(BTreeMap<Simplex, Vec<Simplex>>),
    /// Keeps only output simplices of dimension at most that of the input.
    DimCapped(Box<Delta>),
    /// Sends each input vertex to the single chosen output vertex.
    VertexFixed { base: Box<Delta>, choice: BTreeMap<VertexId, VertexId> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorlessTask {
    input: AbstractComplex,
    output: AbstractComplex,
    delta: Delta,
}

fn maximal(simplices: impl IntoIterator<Item = Simplex>) -> Vec<Simplex> {
    let all: BTreeSet<Simplex> = simplices.into_iter().filter(|s| !s.is_empty()).collect();
    all.iter().filter(|s| !all.iter().any(|t| t != *s && s.is_subset(t))).cloned().collect()
}

fn subsets_of_size(simplex: &Simplex, size: usize) -> Vec<Simplex> {
    simplex.faces().into_iter().filter(|f| f.len() == size).collect()
}

impl ColorlessTask {
    /// Validates that every generator lies in `output`, that Δ is nonempty
    /// on every simplex of `input`, and that Δ is monotone.
    pub fn new(input: AbstractComplex, output: AbstractComplex, delta: Delta) -> Result<Self> {
        let task = ColorlessTask { input, output, delta };
        let simplices = task.input.simplices();
        let mut images = BTreeMap::new();
        for sigma in &simplices {
            let gens = task.delta(sigma)?;
            if gens.is_empty() {
                return Err(Error::EmptyCarrier(sigma.clone()));
            }
            if let Some(bad) = gens.iter().find(|g| !task.output.contains(g)) {
                return Err(Error::InvalidTask(format!("Δ({sigma}) allows {bad}, which is not an output simplex")));
            }
            images.insert(sigma.clone(), gens);
        }
        for (sigma, gens) in &images {
            for face in sigma.boundary_faces() {
                let covered = images[&face].iter().all(|g| gens.iter().any(|h| g.is_subset(h)));
                if !covered {
                    return Err(Error::InvalidTask(format!("Δ is not monotone on {face} ⊆ {sigma}")));
                }
            }
        }
        Ok(task)
    }

    pub fn input(&self) -> &AbstractComplex {
        &self.input
    }

    pub fn output(&self) -> &AbstractComplex {
        &self.output
    }

    pub fn delta_spec(&self) -> &Delta {
        &self.delta
    }

    /// Generators of `Δ(σ)`. `Δ(∅) = {∅}`, represented by no generators.
    pub fn delta(&self, sigma: &Simplex) -> Result<Vec<Simplex>> {
        if sigma.is_empty() {
            return Ok(Vec::new());
        }
        self.eval(&self.delta, sigma)
    }

    fn eval(&self, delta: &Delta, sigma: &Simplex) -> Result<Vec<Simplex>> {
        Ok(match delta {
            Delta::KSet { k } => {
                if !self.input.contains(sigma) {
                    return Err(Error::SimplexNotFound(sigma.clone()));
                }
                let values = self.input.giv(sigma);
                let allowed = self.output.vertices_with_values(&values);
                subsets_of_size(&allowed, (*k).min(allowed.len()))
            }
            Delta::Table(table) => match table.get(sigma) {
                Some(gens) => gens.clone(),
                None if self.input.contains(sigma) => Vec::new(),
                None => return Err(Error::SimplexNotFound(sigma.clone())),
            },
            Delta::DimCapped(base) => {
                let cap = sigma.len();
                let gens = self.eval(base, sigma)?;
                maximal(gens.into_iter().flat_map(|g| {
                    if g.len() <= cap {
                        vec![g]
                    } else {
                        subsets_of_size(&g, cap)
                    }
                }))
            }
            Delta::VertexFixed { base, choice } => {
                if sigma.len() == 1 {
                    let v = sigma.vertices()[0];
                    vec![Simplex::new([*choice.get(&v).ok_or(Error::InvalidChoice(v))?])]
                } else {
                    self.eval(base, sigma)?
                }
            }
        })
    }

    /// `Δ` applied to the input simplex formed by the vertices carrying
    /// `values`.
    pub fn delta_on_values(&self, values: &BTreeSet<Value>) -> Result<Vec<Simplex>> {
        let sigma = self.input.vertices_with_values(values);
        if sigma.len() != values.len() {
            return Err(Error::InvalidTask("value missing from the input complex".into()));
        }
        self.delta(&sigma)
    }

    pub fn allows(&self, sigma: &Simplex, image: &Simplex) -> Result<bool> {
        Carrier::allows(self, sigma, image)
    }
}

impl Carrier for ColorlessTask {
    fn generators(&self, simplex: &Simplex) -> Result<Vec<Simplex>> {
        self.delta(simplex)
    }
}

/// k-set agreement on `values`: `I` is the full simplex on the values
/// (vertex `i` carries `values[i]`), `O` is the set of all value sets of size
/// at most `k` on the same ids.
pub fn make_kset(values: &[Value], k: usize) -> Result<ColorlessTask> {
    if k == 0 || k > values.len() {
        return Err(Error::InvalidTask(format!("k = {k} out of range for {} values", values.len())));
    }
    if values.iter().collect::<BTreeSet<_>>().len() != values.len() {
        return Err(Error::InvalidTask("duplicate value".into()));
    }
    let input = AbstractComplex::full_simplex(values.iter().map(|v| VertexData::valued(v.clone())));
    let output = input.skeleton(k as isize - 1);
    ColorlessTask::new(input, output, Delta::KSet { k })
}

/// Replaces `Δ` by its dimension-capped version `Δ̄`. Fails when some
/// `Δ̄(σ)` is empty, in which case the task is unsolvable outright.
pub fn nonexpanding(task: &ColorlessTask) -> Result<ColorlessTask> {
    if matches!(task.delta, Delta::DimCapped(_)) {
        return Ok(task.clone());
    }
    ColorlessTask::new(task.input.clone(), task.output.clone(), Delta::DimCapped(Box::new(task.delta.clone())))
}

pub fn is_nonexpanding(task: &ColorlessTask) -> Result<bool> {
    for sigma in task.input.simplices() {
        if task.delta(&sigma)?.iter().any(|g| g.len() > sigma.len()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output vertices allowed for an input vertex.
fn vertex_options(task: &ColorlessTask, v: VertexId) -> Result<Vec<VertexId>> {
    let gens = task.delta(&Simplex::new([v]))?;
    let options: BTreeSet<VertexId> = gens.iter().flat_map(|g| g.iter()).collect();
    Ok(options.into_iter().collect())
}

/// All total vertex choices compatible with `Δ`, in lexicographic order.
pub fn choices(task: &ColorlessTask) -> Result<Vec<BTreeMap<VertexId, VertexId>>> {
    let mut out = vec![BTreeMap::new()];
    for v in task.input.vertex_ids() {
        let options = vertex_options(task, v)?;
        out = out
            .into_iter()
            .flat_map(|partial| {
                options.iter().map(move |u| {
                    let mut next = partial.clone();
                    next.insert(v, *u);
                    next
                })
            })
            .collect();
    }
    Ok(out)
}

/// `Δ_P`: vertex `v` may only output `choice[v]`; higher simplices keep `Δ`.
pub fn vertex_deterministic(task: &ColorlessTask, choice: &BTreeMap<VertexId, VertexId>) -> Result<ColorlessTask> {
    for v in task.input.vertex_ids() {
        let chosen = choice.get(&v).ok_or(Error::InvalidChoice(v))?;
        if !vertex_options(task, v)?.contains(chosen) {
            return Err(Error::InvalidChoice(v));
        }
    }
    let delta = Delta::VertexFixed { base: Box::new(task.delta.clone()), choice: choice.clone() };
    ColorlessTask::new(task.input.clone(), task.output.clone(), delta)
}

fn contained_in(inner: &[Simplex], outer: &[Simplex]) -> bool {
    inner.iter().all(|g| outer.iter().any(|h| g.is_subset(h)))
}

/// Whether `Δ(f(σ)) ⊆ Δ(σ)` for every σ in `domain`.
pub fn check_delta_compatible(task: &ColorlessTask, f: &SimplicialMap, domain: &[Simplex]) -> Result<bool> {
    for sigma in domain {
        let image = f.image(sigma)?;
        if !contained_in(&task.delta(&image)?, &task.delta(sigma)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks a decision map on a subdivision stage: `tags[v]` is the input
/// simplex carrying vertex `v`, and every simplex of `stage` must be sent
/// into `Δ` of the union of its vertices' tags.
pub fn check_solution(
    task: &ColorlessTask,
    stage: &AbstractComplex,
    tags: &BTreeMap<VertexId, Simplex>,
    decision: &SimplicialMap,
) -> Result<bool> {
    for v in stage.vertex_ids() {
        if !tags.contains_key(&v) {
            return Err(Error::Untagged(v));
        }
    }
    if !check_simplicial(decision, stage, &task.output)? {
        return Ok(false);
    }
    for facet in stage.facets() {
        for simplex in facet.faces() {
            let carrier = simplex.iter().fold(Simplex::empty(), |acc, v| acc.union(&tags[&v]));
            if !task.allows(&carrier, &decision.image(&simplex)?)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Maps carriers expressed in a valued complex (such as a pseudosphere) to
/// the input simplices with the same values.
pub fn tags_by_value(
    task: &ColorlessTask,
    valued: &AbstractComplex,
    carriers: &BTreeMap<VertexId, Simplex>,
) -> Result<BTreeMap<VertexId, Simplex>> {
    carriers
        .iter()
        .map(|(v, carrier)| {
            let values = valued.giv(carrier);
            let sigma = task.input.vertices_with_values(&values);
            if sigma.len() != values.len() {
                return Err(Error::InvalidTask(format!("carrier of {v} uses a value outside the input")));
            }
            Ok((*v, sigma))
        })
        .collect()
}

/// Exhaustive candidate sweep: every vertex map from `stage` to the output,
/// stopping at the first valid one. Only for tiny stages.
pub fn find_solution_exhaustive(
    task: &ColorlessTask,
    stage: &AbstractComplex,
    tags: &BTreeMap<VertexId, Simplex>,
) -> Result<Option<SimplicialMap>> {
    let sources: Vec<VertexId> = stage.vertex_ids().collect();
    let targets: Vec<VertexId> = task.output.vertex_ids().collect();
    for assignment in cartesian_power(&targets, sources.len()) {
        let map = SimplicialMap::new(sources.iter().copied().zip(assignment));
        if check_solution(task, stage, tags, &map)? {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

#[derive(Serialize, Deserialize)]
struct DeltaEntry {
    simplex: Simplex,
    allowed: Vec<Simplex>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TaskJson {
    Named { kind: String, values: Vec<Value>, k: usize },
    Explicit { input: AbstractComplex, output: AbstractComplex, delta: Vec<DeltaEntry> },
}

impl Serialize for ColorlessTask {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let json = match &self.delta {
            Delta::KSet { k } => TaskJson::Named {
                kind: "kset".into(),
                values: self.input.vertex_ids().map(|v| self.input.value(v)).collect(),
                k: *k,
            },
            _ => {
                let mut delta = Vec::new();
                for simplex in self.input.simplices() {
                    let allowed = self.delta(&simplex).map_err(S::Error::custom)?;
                    delta.push(DeltaEntry { simplex, allowed });
                }
                TaskJson::Explicit { input: self.input.clone(), output: self.output.clone(), delta }
            }
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ColorlessTask {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match TaskJson::deserialize(deserializer)? {
            TaskJson::Named { kind, values, k } => {
                if kind != "kset" {
                    return Err(D::Error::custom(format!("unknown task kind {kind:?}")));
                }
                make_kset(&values, k).map_err(D::Error::custom)
            }
            TaskJson::Explicit { input, output, delta } => {
                let table = delta.into_iter().map(|e| (e.simplex, e.allowed)).collect();
                ColorlessTask::new(input, output, Delta::Table(table)).map_err(D::Error::custom)
            }
        }
    }
}
