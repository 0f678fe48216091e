//! The standard chromatic subdivision, combinatorial and geometric, its
//! iterates, and the partial subdivision operator used by terminating
//! subdivisions.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::complex::{AbstractComplex, ChromaticComplex, Simplex, VertexData, VertexId};
use crate::error::{Error, Result};
use crate::geometry::BaryPoint;
use crate::graph::{enumerate_ims, InstantGraph, ProcSet};
use crate::rational::{determinant, rat, Rational};

pub const DEFAULT_FACET_BUDGET: usize = 1_000_000;

/// A vertex of `Chr C`: the process owning `vertex` after seeing the
/// vertices in `view`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChrVertex {
    pub vertex: VertexId,
    pub view: Simplex,
}

/// Number of ordered set partitions of a `k`-element set.
pub fn fubini(k: usize) -> usize {
    // a(k) = Σ_{j=1..k} C(k,j) a(k-j)
    let mut a = vec![1usize; k + 1];
    for m in 1..=k {
        let mut binom = 1usize;
        let mut total = 0usize;
        for j in 1..=m {
            binom = binom * (m - j + 1) / j;
            total = total.saturating_add(binom.saturating_mul(a[m - j]));
        }
        a[m] = total;
    }
    a[k]
}

fn colors_of(c: &ChromaticComplex, simplex: &Simplex) -> ProcSet {
    simplex.iter().filter_map(|v| c.color(v)).collect()
}

/// `Chr C` together with the combinatorial meaning of each new vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChrComplex {
    pub complex: ChromaticComplex,
    pub vertices: BTreeMap<VertexId, ChrVertex>,
    index: BTreeMap<ChrVertex, VertexId>,
}

impl ChrComplex {
    fn from_facets(base: &ChromaticComplex, facets: Vec<Vec<ChrVertex>>) -> Self {
        let keys: BTreeSet<ChrVertex> = facets.iter().flatten().cloned().collect();
        let index: BTreeMap<ChrVertex, VertexId> =
            keys.into_iter().enumerate().map(|(i, k)| (k, VertexId(i as u32))).collect();
        let vertices: BTreeMap<VertexId, ChrVertex> = index.iter().map(|(k, v)| (*v, k.clone())).collect();
        let payloads = vertices.iter().map(|(id, key)| {
            let own = base.vertex_data(key.vertex).cloned().unwrap_or_default();
            (*id, VertexData { color: own.color, value: own.value })
        });
        let simplices = facets.iter().map(|f| f.iter().map(|k| index[k]).collect::<Simplex>());
        let complex = AbstractComplex::new(payloads, simplices).expect("subdivision is well formed");
        let complex = ChromaticComplex::new(complex).expect("subdivision is chromatic");
        ChrComplex { complex, vertices, index }
    }

    pub fn vertex(&self, key: &ChrVertex) -> Option<VertexId> {
        self.index.get(key).copied()
    }

    /// The simplex of the base complex carrying `v`.
    pub fn carrier(&self, v: VertexId) -> Option<&Simplex> {
        self.vertices.get(&v).map(|k| &k.view)
    }

    /// The facet of `Chr σ` induced by `graph`, where `graph`'s participants
    /// are the colors of `sigma`.
    pub fn graph_to_simplex(&self, base: &ChromaticComplex, graph: &InstantGraph, sigma: &Simplex) -> Result<Simplex> {
        if !base.contains(sigma) || sigma.is_empty() {
            return Err(Error::SimplexNotFound(sigma.clone()));
        }
        if graph.participants() != colors_of(base, sigma) {
            return Err(Error::InvalidGraph(format!("participants of {graph} differ from colors of {sigma}")));
        }
        graph_facet(base, graph, sigma)
            .iter()
            .map(|k| self.vertex(k).ok_or_else(|| Error::NotAFacet(format!("{sigma} not subdivided here"))))
            .collect()
    }

    /// Inverse of [`ChrComplex::graph_to_simplex`]: the instant graph whose
    /// induced facet of `Chr σ` is `facet`.
    pub fn simplex_to_graph(&self, base: &ChromaticComplex, facet: &Simplex) -> Result<InstantGraph> {
        let not_facet = || Error::NotAFacet(facet.to_string());
        let keys: Vec<&ChrVertex> = facet
            .iter()
            .map(|v| self.vertices.get(&v).ok_or_else(not_facet))
            .collect::<Result<_>>()?;
        let sigma = keys.iter().fold(Simplex::empty(), |acc, k| acc.union(&k.view));
        let owners: Simplex = keys.iter().map(|k| k.vertex).collect();
        if owners != sigma || !self.complex.contains(facet) {
            return Err(not_facet());
        }
        let in_sets = keys
            .iter()
            .map(|k| Ok((base.color(k.vertex).ok_or_else(not_facet)?, colors_of(base, &k.view))))
            .collect::<Result<BTreeMap<usize, ProcSet>>>()?;
        InstantGraph::new(in_sets).map_err(|_| not_facet())
    }
}

fn graph_facet(base: &ChromaticComplex, graph: &InstantGraph, sigma: &Simplex) -> Vec<ChrVertex> {
    sigma
        .iter()
        .map(|v| {
            let color = base.color(v).expect("chromatic");
            let seen = graph.in_set(color).expect("participant");
            let view = sigma.iter().filter(|w| seen.contains(base.color(*w).unwrap())).collect();
            ChrVertex { vertex: v, view }
        })
        .collect()
}

fn check_budget(facets: &[Simplex], budget: usize) -> Result<()> {
    let needed = facets.iter().fold(0usize, |acc, f| acc.saturating_add(fubini(f.len())));
    if needed > budget {
        return Err(Error::FacetBudget { needed, budget });
    }
    Ok(())
}

/// The standard chromatic subdivision: one facet per facet σ of `c` and
/// immediate-snapshot graph on the colors of σ.
pub fn chr(c: &ChromaticComplex, budget: usize) -> Result<ChrComplex> {
    check_budget(c.facets(), budget)?;
    let mut facets = Vec::new();
    for sigma in c.facets() {
        for graph in enumerate_ims(colors_of(c, sigma))? {
            facets.push(graph_facet(c, &graph, sigma));
        }
    }
    Ok(ChrComplex::from_facets(c, facets))
}

/// Vertex `i` of the standard simplex placed at barycentric coordinate `e_i`.
pub fn zeta(points: &[BaryPoint], i: usize) -> Result<BaryPoint> {
    if points.is_empty() {
        return Err(Error::InvalidPoint("zeta of an empty point set".into()));
    }
    if i >= points.len() {
        return Err(Error::InvalidPoint(format!("index {i} out of range")));
    }
    let d = points.len() as i64 - 1;
    let coefficients: Vec<Rational> = (0..points.len())
        .map(|j| if j == i { rat(1, 2 * d + 1) } else { rat(2, 2 * d + 1) })
        .collect();
    BaryPoint::affine_combination(points, &coefficients)
}

/// A chromatic complex with exact barycentric coordinates for its vertices,
/// expressed over a fixed list of axes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeoComplex {
    pub complex: ChromaticComplex,
    pub coords: BTreeMap<VertexId, BaryPoint>,
}

impl GeoComplex {
    /// Places the `k`-th vertex of `complex` (in id order) at `e_k`.
    pub fn embed(complex: ChromaticComplex) -> Self {
        let dim = complex.vertex_count();
        let coords = complex
            .vertex_ids()
            .enumerate()
            .map(|(k, v)| (v, BaryPoint::vertex(dim, k)))
            .collect();
        GeoComplex { complex, coords }
    }

    pub fn standard(n: usize) -> Self {
        GeoComplex::embed(AbstractComplex::standard_simplex(n))
    }

    pub fn point(&self, v: VertexId) -> &BaryPoint {
        &self.coords[&v]
    }

    pub fn points(&self, simplex: &Simplex) -> Vec<BaryPoint> {
        simplex.iter().map(|v| self.coords[&v].clone()).collect()
    }

    /// Volume of a full-dimensional facet relative to the base simplex:
    /// the absolute determinant of its barycentric coordinate rows.
    pub fn relative_volume(&self, facet: &Simplex) -> Rational {
        let rows: Vec<Vec<Rational>> = facet.iter().map(|v| self.coords[&v].weights().to_vec()).collect();
        if rows.len() != rows.first().map_or(0, Vec::len) {
            return Rational::zero();
        }
        determinant(rows).abs()
    }

    pub fn total_volume(&self) -> Rational {
        self.complex.facets().iter().map(|f| self.relative_volume(f)).sum()
    }

    /// Restricts to a subcomplex of `self.complex`, keeping coordinates.
    pub fn restrict(&self, sub: AbstractComplex) -> Result<GeoComplex> {
        let coords = sub.vertex_ids().map(|v| (v, self.coords[&v].clone())).collect();
        Ok(GeoComplex { complex: ChromaticComplex::new(sub)?, coords })
    }
}

/// `Chr` with every new vertex placed at `ζ` of its view.
pub fn chr_geometric(g: &GeoComplex, budget: usize) -> Result<(ChrComplex, GeoComplex)> {
    let sub = chr(&g.complex, budget)?;
    let mut coords = BTreeMap::new();
    for (id, key) in &sub.vertices {
        let own = key.view.vertices().iter().position(|v| *v == key.vertex).expect("vertex in its view");
        coords.insert(*id, zeta(&g.points(&key.view), own)?);
    }
    let geo = GeoComplex { complex: sub.complex.clone(), coords };
    Ok((sub, geo))
}

/// An iterated subdivision, with each vertex tagged by the simplex of the
/// original complex carrying it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdivision {
    pub complex: ChromaticComplex,
    pub carriers: BTreeMap<VertexId, Simplex>,
    pub coords: Option<BTreeMap<VertexId, BaryPoint>>,
}

impl Subdivision {
    fn identity(c: &ChromaticComplex) -> Self {
        let carriers = c.vertex_ids().map(|v| (v, Simplex::new([v]))).collect();
        Subdivision { complex: c.clone(), carriers, coords: None }
    }

    fn compose(&self, step: &ChrComplex) -> BTreeMap<VertexId, Simplex> {
        step.vertices
            .iter()
            .map(|(id, key)| {
                let carrier = key.view.iter().fold(Simplex::empty(), |acc, w| acc.union(&self.carriers[&w]));
                (*id, carrier)
            })
            .collect()
    }

    /// The simplex of the original complex carrying `simplex`.
    pub fn carrier_of(&self, simplex: &Simplex) -> Result<Simplex> {
        simplex.iter().try_fold(Simplex::empty(), |acc, v| {
            let carrier = self.carriers.get(&v).ok_or(Error::Untagged(v))?;
            Ok(acc.union(carrier))
        })
    }

    pub fn geo(&self) -> Option<GeoComplex> {
        self.coords.as_ref().map(|coords| GeoComplex { complex: self.complex.clone(), coords: coords.clone() })
    }
}

fn check_iterated_budget(c: &ChromaticComplex, rounds: usize, budget: usize) -> Result<()> {
    // Facet counts multiply by the per-facet Fubini number at each round.
    let mut needed = 0usize;
    for facet in c.facets() {
        let per = fubini(facet.len());
        let mut count = 1usize;
        for _ in 0..rounds {
            count = count.saturating_mul(per);
        }
        needed = needed.saturating_add(count);
    }
    if needed > budget {
        return Err(Error::FacetBudget { needed, budget });
    }
    Ok(())
}

/// `Chr^rounds C`, combinatorially.
pub fn iterate_chr(c: &ChromaticComplex, rounds: usize, budget: usize) -> Result<Subdivision> {
    check_iterated_budget(c, rounds, budget)?;
    let mut current = Subdivision::identity(c);
    for _ in 0..rounds {
        let step = chr(&current.complex, budget)?;
        let carriers = current.compose(&step);
        current = Subdivision { complex: step.complex, carriers, coords: None };
    }
    Ok(current)
}

/// `Chr^rounds` of a geometric complex, with exact coordinates.
pub fn iterate_chr_geometric(g: &GeoComplex, rounds: usize, budget: usize) -> Result<Subdivision> {
    check_iterated_budget(&g.complex, rounds, budget)?;
    let mut current = Subdivision::identity(&g.complex);
    let mut geo = g.clone();
    for _ in 0..rounds {
        let (step, next) = chr_geometric(&geo, budget)?;
        let carriers = current.compose(&step);
        current = Subdivision { complex: step.complex, carriers, coords: None };
        geo = next;
    }
    current.coords = Some(geo.coords);
    Ok(current)
}

/// A vertex of `EChr(T, C)`: either an untouched terminated vertex or a
/// subdivision vertex of a live face.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EchrVertex {
    Kept(VertexId),
    Split(ChrVertex),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchrComplex {
    pub complex: ChromaticComplex,
    pub vertices: BTreeMap<VertexId, EchrVertex>,
}

/// Subdivides the live part `σ \ T` of every facet σ and joins it with the
/// terminated part `σ ∩ T`. A facet entirely in `T` is kept as is.
pub fn echr(terminated: &Simplex, c: &ChromaticComplex, budget: usize) -> Result<EchrComplex> {
    for v in terminated.iter() {
        if !c.contains_vertex(v) {
            return Err(Error::VertexNotFound(v));
        }
    }
    let live_parts: Vec<Simplex> = c.facets().iter().map(|f| f.difference(terminated)).collect();
    check_budget(&live_parts, budget)?;
    let mut facets: Vec<Vec<EchrVertex>> = Vec::new();
    for sigma in c.facets() {
        let live = sigma.difference(terminated);
        let kept: Vec<EchrVertex> = sigma.intersection(terminated).iter().map(EchrVertex::Kept).collect();
        if live.is_empty() {
            facets.push(kept);
            continue;
        }
        for graph in enumerate_ims(colors_of(c, &live))? {
            let mut facet: Vec<EchrVertex> = graph_facet(c, &graph, &live).into_iter().map(EchrVertex::Split).collect();
            facet.extend(kept.iter().cloned());
            facets.push(facet);
        }
    }
    let keys: BTreeSet<EchrVertex> = facets.iter().flatten().cloned().collect();
    let index: BTreeMap<EchrVertex, VertexId> =
        keys.into_iter().enumerate().map(|(i, k)| (k, VertexId(i as u32))).collect();
    let payloads = index.iter().map(|(key, id)| {
        let owner = match key {
            EchrVertex::Kept(v) => *v,
            EchrVertex::Split(k) => k.vertex,
        };
        (*id, c.vertex_data(owner).cloned().unwrap_or_default())
    });
    let simplices = facets.iter().map(|f| f.iter().map(|k| index[k]).collect::<Simplex>());
    let complex = ChromaticComplex::new(AbstractComplex::new(payloads, simplices)?)?;
    let vertices = index.into_iter().map(|(k, v)| (v, k)).collect();
    Ok(EchrComplex { complex, vertices })
}

/// Total relative volume must equal one for a subdivision of the standard
/// simplex; exposed for callers checking soundness of a geometric stage.
pub fn is_volume_preserving(g: &GeoComplex) -> bool {
    g.total_volume() == Rational::one()
}
