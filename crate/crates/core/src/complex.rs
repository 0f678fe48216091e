//! Abstract and chromatic simplicial complexes, stored by facets.
//!
//! A complex keeps its maximal simplices only; membership of an arbitrary
//! simplex is a subset query against the facets. Vertex payloads (process
//! color, input value) are optional so the same container can hold colorless
//! input complexes, pseudospheres and the uncolored condition complex.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Opaque input/output label. Its order is not meaningful; use a
/// [`ValueOrder`] wherever an order on values is needed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Value(String);

impl Value {
    pub fn new(label: impl Into<String>) -> Self {
        Value(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Value {
    fn from(label: &str) -> Self {
        Value(label.to_owned())
    }
}

impl From<String> for Value {
    fn from(label: String) -> Self {
        Value(label)
    }
}

/// A user-supplied total order on values: position in the list is rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Value>", into = "Vec<Value>")]
pub struct ValueOrder(Vec<Value>);

impl ValueOrder {
    pub fn new(values: impl IntoIterator<Item = impl Into<Value>>) -> Result<Self> {
        let values: Vec<Value> = values.into_iter().map(Into::into).collect();
        let distinct: BTreeSet<&Value> = values.iter().collect();
        if distinct.len() != values.len() {
            return Err(Error::Parse("duplicate value in value order".into()));
        }
        Ok(ValueOrder(values))
    }

    pub fn rank(&self, value: &Value) -> Option<usize> {
        self.0.iter().position(|v| v == value)
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<Value>> for ValueOrder {
    type Error = Error;
    fn try_from(values: Vec<Value>) -> Result<Self> {
        ValueOrder::new(values)
    }
}

impl From<ValueOrder> for Vec<Value> {
    fn from(order: ValueOrder) -> Self {
        order.0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexData {
    pub color: Option<usize>,
    pub value: Option<Value>,
}

impl VertexData {
    pub fn colored(color: usize) -> Self {
        VertexData { color: Some(color), value: None }
    }

    pub fn valued(value: impl Into<Value>) -> Self {
        VertexData { color: None, value: Some(value.into()) }
    }

    pub fn colored_value(color: usize, value: impl Into<Value>) -> Self {
        VertexData { color: Some(color), value: Some(value.into()) }
    }
}

/// A finite set of vertices, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut vertices: Vec<VertexId> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        Simplex(vertices)
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        Simplex::new(ids.into_iter().map(VertexId))
    }

    pub fn empty() -> Self {
        Simplex(Vec::new())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `-1` for the empty simplex.
    pub fn dim(&self) -> isize {
        self.0.len() as isize - 1
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_subset(&self, other: &Simplex) -> bool {
        let mut it = other.0.iter();
        'outer: for v in &self.0 {
            for w in it.by_ref() {
                match w.cmp(v) {
                    std::cmp::Ordering::Less => continue,
                    std::cmp::Ordering::Equal => continue 'outer,
                    std::cmp::Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &Simplex) -> Simplex {
        Simplex::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn intersection(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().copied().filter(|v| other.contains(*v)).collect())
    }

    pub fn difference(&self, other: &Simplex) -> Simplex {
        Simplex(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn is_disjoint(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    pub fn without(&self, v: VertexId) -> Simplex {
        Simplex(self.0.iter().copied().filter(|w| *w != v).collect())
    }

    pub fn with(&self, v: VertexId) -> Simplex {
        Simplex::new(self.0.iter().copied().chain(std::iter::once(v)))
    }

    /// Codimension-1 faces.
    pub fn boundary_faces(&self) -> Vec<Simplex> {
        if self.0.len() <= 1 {
            return Vec::new();
        }
        self.0.iter().map(|v| self.without(*v)).collect()
    }

    /// All nonempty faces, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let n = self.0.len();
        assert!(n < 32, "simplex too large to enumerate faces");
        (1u32..(1 << n))
            .map(|mask| {
                Simplex(
                    (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| self.0[i])
                        .collect(),
                )
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }
}

impl From<Vec<VertexId>> for Simplex {
    fn from(vertices: Vec<VertexId>) -> Self {
        Simplex::new(vertices)
    }
}

impl From<Simplex> for Vec<VertexId> {
    fn from(simplex: Simplex) -> Self {
        simplex.0
    }
}

impl FromIterator<VertexId> for Simplex {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        Simplex::new(iter)
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Keeps only maximal simplices, sorted lexicographically.
fn reduce_to_facets(simplices: impl IntoIterator<Item = Simplex>) -> Vec<Simplex> {
    let distinct: HashSet<Simplex> = simplices.into_iter().filter(|s| !s.is_empty()).collect();
    let mut candidates: Vec<Simplex> = distinct.into_iter().collect();
    candidates.sort_unstable_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut facets: Vec<Simplex> = Vec::new();
    let mut by_vertex: HashMap<VertexId, Vec<usize>> = HashMap::new();
    for s in candidates {
        let first = s.0[0];
        let covered = by_vertex
            .get(&first)
            .is_some_and(|idx| idx.iter().any(|&i| s.is_subset(&facets[i])));
        if covered {
            continue;
        }
        let index = facets.len();
        for v in s.iter() {
            by_vertex.entry(v).or_default().push(index);
        }
        facets.push(s);
    }
    facets.sort_unstable();
    facets
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbstractComplex {
    vertices: BTreeMap<VertexId, VertexData>,
    facets: Vec<Simplex>,
}

impl AbstractComplex {
    /// Builds a complex from vertex payloads and a generating family of
    /// simplices; non-maximal generators are dropped. Every vertex must be
    /// covered by some generator and every generator must use known vertices.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, VertexData)>,
        simplices: impl IntoIterator<Item = Simplex>,
    ) -> Result<Self> {
        let vertices: BTreeMap<VertexId, VertexData> = vertices.into_iter().collect();
        let facets = reduce_to_facets(simplices);
        let mut covered = BTreeSet::new();
        for facet in &facets {
            for v in facet.iter() {
                if !vertices.contains_key(&v) {
                    return Err(Error::MalformedComplex(format!(
                        "facet {facet} uses unknown vertex {v}"
                    )));
                }
                covered.insert(v);
            }
        }
        if covered.len() != vertices.len() {
            let orphan = vertices.keys().find(|v| !covered.contains(v)).unwrap();
            return Err(Error::MalformedComplex(format!(
                "vertex {orphan} belongs to no facet"
            )));
        }
        Ok(AbstractComplex { vertices, facets })
    }

    /// Complex whose vertex payloads are taken from `self`, restricted to the
    /// vertices used by `simplices`.
    pub fn subcomplex(&self, simplices: impl IntoIterator<Item = Simplex>) -> Result<Self> {
        let simplices: Vec<Simplex> = simplices.into_iter().collect();
        let mut used = BTreeSet::new();
        for s in &simplices {
            for v in s.iter() {
                if !self.vertices.contains_key(&v) {
                    return Err(Error::VertexNotFound(v));
                }
                used.insert(v);
            }
        }
        let vertices = used.into_iter().map(|v| (v, self.vertices[&v].clone()));
        AbstractComplex::new(vertices, simplices)
    }

    /// Full simplex on the given vertex payloads, ids `0..n`.
    pub fn full_simplex(payloads: impl IntoIterator<Item = VertexData>) -> Self {
        let vertices: Vec<(VertexId, VertexData)> = payloads
            .into_iter()
            .enumerate()
            .map(|(i, d)| (VertexId(i as u32), d))
            .collect();
        let facet = Simplex::new(vertices.iter().map(|(v, _)| *v));
        AbstractComplex::new(vertices, [facet]).expect("full simplex is well formed")
    }

    /// Standard chromatic n-simplex: vertex `i` has color `i`.
    pub fn standard_simplex(n: usize) -> ChromaticComplex {
        let complex = AbstractComplex::full_simplex((0..=n).map(VertexData::colored));
        ChromaticComplex::new(complex).expect("standard simplex is chromatic")
    }

    pub fn empty() -> Self {
        AbstractComplex::default()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_data(&self, v: VertexId) -> Option<&VertexData> {
        self.vertices.get(&v)
    }

    pub fn vertices(&self) -> &BTreeMap<VertexId, VertexData> {
        &self.vertices
    }

    pub fn color(&self, v: VertexId) -> Option<usize> {
        self.vertices.get(&v).and_then(|d| d.color)
    }

    /// The vertex's value payload, or its id rendered as a label.
    pub fn value(&self, v: VertexId) -> Value {
        match self.vertices.get(&v).and_then(|d| d.value.clone()) {
            Some(value) => value,
            None => Value(v.0.to_string()),
        }
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn dim(&self) -> isize {
        self.facets.iter().map(Simplex::dim).max().unwrap_or(-1)
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim();
        self.facets.iter().all(|f| f.dim() == d)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains_key(&v)
    }

    /// The empty simplex is contained in every complex.
    pub fn contains(&self, simplex: &Simplex) -> bool {
        simplex.is_empty() || self.facets.iter().any(|f| simplex.is_subset(f))
    }

    /// Every nonempty simplex, ordered by dimension then lexicographically.
    pub fn simplices(&self) -> Vec<Simplex> {
        let all: BTreeSet<Simplex> = self.facets.iter().flat_map(Simplex::faces).collect();
        let mut all: Vec<Simplex> = all.into_iter().collect();
        all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        all
    }

    pub fn simplices_of_dim(&self, dim: usize) -> Vec<Simplex> {
        self.simplices().into_iter().filter(|s| s.len() == dim + 1).collect()
    }

    /// Simplices of dimension at most `level`; `-1` gives the empty complex.
    pub fn skeleton(&self, level: isize) -> AbstractComplex {
        if level < 0 {
            return AbstractComplex::empty();
        }
        let keep = level as usize + 1;
        let mut generators = BTreeSet::new();
        for facet in &self.facets {
            if facet.len() <= keep {
                generators.insert(facet.clone());
            } else {
                for face in facet.faces() {
                    if face.len() == keep {
                        generators.insert(face);
                    }
                }
            }
        }
        self.subcomplex(generators).expect("skeleton of a valid complex")
    }

    fn require(&self, simplex: &Simplex) -> Result<()> {
        if simplex.is_empty() || !self.contains(simplex) {
            return Err(Error::SimplexNotFound(simplex.clone()));
        }
        Ok(())
    }

    /// Union of the simplices containing `simplex`, with their faces.
    pub fn star(&self, simplex: &Simplex) -> Result<AbstractComplex> {
        self.require(simplex)?;
        let facets = self.facets.iter().filter(|f| simplex.is_subset(f)).cloned();
        self.subcomplex(facets)
    }

    /// Simplices of the star that are disjoint from `simplex`.
    pub fn link(&self, simplex: &Simplex) -> Result<AbstractComplex> {
        self.require(simplex)?;
        let generators = self
            .facets
            .iter()
            .filter(|f| simplex.is_subset(f))
            .map(|f| f.difference(simplex));
        self.subcomplex(generators)
    }

    /// Complex of the codimension-1 faces of `simplex`.
    pub fn boundary(&self, simplex: &Simplex) -> Result<AbstractComplex> {
        self.require(simplex)?;
        self.subcomplex(simplex.boundary_faces())
    }

    /// `C(T)`: the subcomplex of simplices whose vertices all lie in `kept`.
    pub fn induced(&self, kept: &Simplex) -> AbstractComplex {
        let generators = self.facets.iter().map(|f| f.intersection(kept));
        self.subcomplex(generators).expect("induced subcomplex")
    }

    pub fn is_chromatic(&self) -> bool {
        self.vertices.values().all(|d| d.color.is_some())
            && self.facets.iter().all(|f| {
                let colors: BTreeSet<usize> = f.iter().filter_map(|v| self.color(v)).collect();
                colors.len() == f.len()
            })
    }

    /// Barycentric subdivision: vertices are the nonempty simplices, facets
    /// are the maximal chains under strict containment.
    pub fn barycentric(&self) -> Barycentric {
        let cells_in_order = self.simplices();
        let ids: HashMap<&Simplex, VertexId> = cells_in_order
            .iter()
            .enumerate()
            .map(|(i, s)| (s, VertexId(i as u32)))
            .collect();
        let mut chains = Vec::new();
        for facet in &self.facets {
            for order in permutations(facet.vertices()) {
                let chain = (1..=order.len())
                    .map(|len| ids[&Simplex::new(order[..len].iter().copied())])
                    .collect::<Simplex>();
                chains.push(chain);
            }
        }
        let vertices = cells_in_order
            .iter()
            .enumerate()
            .map(|(i, _)| (VertexId(i as u32), VertexData::default()));
        let complex = AbstractComplex::new(vertices, chains).expect("barycentric subdivision");
        let cells = cells_in_order
            .into_iter()
            .enumerate()
            .map(|(i, s)| (VertexId(i as u32), s))
            .collect();
        Barycentric { complex, cells }
    }

    /// Multi-value encoding: vertices `Π × V(I)`, a colored set is a simplex
    /// iff its values form a simplex of `I`. Vertex `(p, v)` gets id
    /// `p * |V(I)| + rank(v)`.
    pub fn pseudosphere(&self, n: usize) -> ChromaticComplex {
        let base: Vec<VertexId> = self.vertex_ids().collect();
        let width = base.len();
        let index: HashMap<VertexId, usize> = base.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let id = |p: usize, v: VertexId| VertexId((p * width + index[&v]) as u32);
        let vertices = (0..=n).flat_map(|p| {
            base.iter()
                .map(move |&v| (p, v))
                .collect::<Vec<_>>()
        });
        let vertices: Vec<(VertexId, VertexData)> = vertices
            .map(|(p, v)| (id(p, v), VertexData::colored_value(p, self.value(v))))
            .collect();
        let mut generators = BTreeSet::new();
        for facet in &self.facets {
            for assignment in cartesian_power(facet.vertices(), n + 1) {
                generators.insert(
                    assignment
                        .iter()
                        .enumerate()
                        .map(|(p, v)| id(p, *v))
                        .collect::<Simplex>(),
                );
            }
        }
        let complex = AbstractComplex::new(vertices, generators).expect("pseudosphere");
        ChromaticComplex::new(complex).expect("pseudosphere is chromatic")
    }

    /// Unique-value encoding: vertex with the `i`-th value gets color `i`.
    pub fn unique_value_complex(&self, order: &ValueOrder) -> Result<ChromaticComplex> {
        let mut vertices = Vec::new();
        for v in self.vertex_ids() {
            let value = self.value(v);
            let rank = order.rank(&value).ok_or_else(|| {
                Error::MalformedComplex(format!("value {value} missing from the order"))
            })?;
            vertices.push((v, VertexData::colored_value(rank, value)));
        }
        let complex = AbstractComplex::new(vertices, self.facets.clone())?;
        ChromaticComplex::new(complex)
    }

    /// Distinct values carried by the vertices of `simplex`.
    pub fn giv(&self, simplex: &Simplex) -> BTreeSet<Value> {
        simplex.iter().map(|v| self.value(v)).collect()
    }

    /// Vertex ids carrying one of the given values.
    pub fn vertices_with_values(&self, values: &BTreeSet<Value>) -> Simplex {
        self.vertex_ids().filter(|v| values.contains(&self.value(*v))).collect()
    }
}

/// Result of [`AbstractComplex::barycentric`]: each new vertex remembers the
/// simplex of the original complex it stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barycentric {
    pub complex: AbstractComplex,
    pub cells: BTreeMap<VertexId, Simplex>,
}

impl Barycentric {
    pub fn cell(&self, v: VertexId) -> Option<&Simplex> {
        self.cells.get(&v)
    }

    pub fn vertex_of(&self, cell: &Simplex) -> Option<VertexId> {
        self.cells.iter().find(|(_, s)| *s == cell).map(|(v, _)| *v)
    }
}

pub(crate) fn permutations<T: Copy>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

pub(crate) fn cartesian_power<T: Copy>(items: &[T], power: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..power {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                items.iter().map(move |&x| {
                    let mut next = prefix.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    out
}

/// A complex whose vertices are all colored, with distinct colors in every
/// simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChromaticComplex(AbstractComplex);

impl ChromaticComplex {
    pub fn new(complex: AbstractComplex) -> Result<Self> {
        for (v, data) in complex.vertices() {
            if data.color.is_none() {
                return Err(Error::NotChromatic(format!("vertex {v} has no color")));
            }
        }
        for facet in complex.facets() {
            let colors: BTreeSet<usize> = facet.iter().filter_map(|v| complex.color(v)).collect();
            if colors.len() != facet.len() {
                return Err(Error::NotChromatic(format!("facet {facet} repeats a color")));
            }
        }
        Ok(ChromaticComplex(complex))
    }

    pub fn as_complex(&self) -> &AbstractComplex {
        &self.0
    }

    pub fn into_complex(self) -> AbstractComplex {
        self.0
    }

    /// Colors of `simplex`, sorted.
    pub fn colors(&self, simplex: &Simplex) -> Vec<usize> {
        let mut colors: Vec<usize> = simplex.iter().filter_map(|v| self.0.color(v)).collect();
        colors.sort_unstable();
        colors
    }

    /// The vertex of `simplex` with the given color.
    pub fn vertex_of_color(&self, simplex: &Simplex, color: usize) -> Option<VertexId> {
        simplex.iter().find(|v| self.0.color(*v) == Some(color))
    }
}

impl Deref for ChromaticComplex {
    type Target = AbstractComplex;
    fn deref(&self) -> &AbstractComplex {
        &self.0
    }
}

impl TryFrom<AbstractComplex> for ChromaticComplex {
    type Error = Error;
    fn try_from(complex: AbstractComplex) -> Result<Self> {
        ChromaticComplex::new(complex)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplicialMap {
    map: BTreeMap<VertexId, VertexId>,
}

impl SimplicialMap {
    pub fn new(map: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        SimplicialMap { map: map.into_iter().collect() }
    }

    pub fn identity(complex: &AbstractComplex) -> Self {
        SimplicialMap::new(complex.vertex_ids().map(|v| (v, v)))
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.map.get(&v).copied()
    }

    pub fn entries(&self) -> &BTreeMap<VertexId, VertexId> {
        &self.map
    }

    pub fn image(&self, simplex: &Simplex) -> Result<Simplex> {
        simplex
            .iter()
            .map(|v| self.get(v).ok_or(Error::VertexNotFound(v)))
            .collect()
    }
}

/// A monotone assignment of output subcomplexes to simplices, represented by
/// the generating facets of each assigned subcomplex.
pub trait Carrier {
    fn generators(&self, simplex: &Simplex) -> Result<Vec<Simplex>>;

    fn allows(&self, simplex: &Simplex, image: &Simplex) -> Result<bool> {
        if image.is_empty() {
            return Ok(true);
        }
        Ok(self.generators(simplex)?.iter().any(|g| image.is_subset(g)))
    }
}

/// Allows every simplex of the target complex.
pub struct FullCarrier<'a>(pub &'a AbstractComplex);

impl Carrier for FullCarrier<'_> {
    fn generators(&self, _: &Simplex) -> Result<Vec<Simplex>> {
        Ok(self.0.facets().to_vec())
    }
}

/// Explicit table from simplices to generators. Simplices absent from the
/// table have no carrier.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableCarrier {
    pub table: BTreeMap<Simplex, Vec<Simplex>>,
}

impl Carrier for TableCarrier {
    fn generators(&self, simplex: &Simplex) -> Result<Vec<Simplex>> {
        if simplex.is_empty() {
            return Ok(Vec::new());
        }
        self.table
            .get(simplex)
            .cloned()
            .ok_or_else(|| Error::SimplexNotFound(simplex.clone()))
    }
}

impl TableCarrier {
    pub fn is_monotone(&self) -> bool {
        self.table.iter().all(|(sigma, gens)| {
            self.table.iter().all(|(tau, tau_gens)| {
                !sigma.is_subset(tau)
                    || gens.iter().all(|g| tau_gens.iter().any(|h| g.is_subset(h)))
            })
        })
    }
}

fn check_map_domain(f: &SimplicialMap, source: &AbstractComplex, target: &AbstractComplex) -> Result<()> {
    for v in source.vertex_ids() {
        let image = f.get(v).ok_or(Error::VertexNotFound(v))?;
        if !target.contains_vertex(image) {
            return Err(Error::VertexNotFound(image));
        }
    }
    Ok(())
}

/// Checks that `f` sends every simplex of `source` to a simplex of `target`.
/// Facets suffice since complexes are closed under faces.
pub fn check_simplicial(f: &SimplicialMap, source: &AbstractComplex, target: &AbstractComplex) -> Result<bool> {
    check_map_domain(f, source, target)?;
    for facet in source.facets() {
        if !target.contains(&f.image(facet)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks that `f(σ) ∈ carrier(σ)` for every simplex σ of `source`, and that
/// every image is a simplex of `target`.
pub fn check_carried(
    f: &SimplicialMap,
    source: &AbstractComplex,
    target: &AbstractComplex,
    carrier: &dyn Carrier,
) -> Result<bool> {
    check_map_domain(f, source, target)?;
    for simplex in source.simplices() {
        let image = f.image(&simplex)?;
        if !target.contains(&image) || !carrier.allows(&simplex, &image)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexJson {
    vertices: Vec<VertexJson>,
    facets: Vec<Vec<u32>>,
}

impl Serialize for AbstractComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let json = ComplexJson {
            vertices: self
                .vertices
                .iter()
                .map(|(v, d)| VertexJson {
                    id: v.0,
                    color: d.color,
                    value: d.value.as_ref().map(|x| x.0.clone()),
                })
                .collect(),
            facets: self.facets.iter().map(|f| f.iter().map(|v| v.0).collect()).collect(),
        };
        json.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AbstractComplex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = ComplexJson::deserialize(deserializer)?;
        let mut vertices = BTreeMap::new();
        for v in json.vertices {
            let data = VertexData { color: v.color, value: v.value.map(Value) };
            if vertices.insert(VertexId(v.id), data).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate vertex id {}", v.id)));
            }
        }
        let facets = json.facets.into_iter().map(Simplex::from_ids);
        AbstractComplex::new(vertices, facets).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ChromaticComplex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChromaticComplex {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let complex = AbstractComplex::deserialize(deserializer)?;
        ChromaticComplex::new(complex).map_err(serde::de::Error::custom)
    }
}
