//! Exact rational geometry: barycentric points, the Chromatic Average
//! algorithm, geometrization of executions, restricted-adversary point
//! membership and radial retraction inside a barycentric subdivision.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::adversary::UpWord;
use crate::chr::{chr_geometric, GeoComplex};
use crate::complex::{AbstractComplex, ChromaticComplex, Simplex, VertexId};
use crate::error::{Error, Result};
use crate::graph::InstantGraph;
use crate::rational::{format_rational, int, parse_rational, rat, solve_unique, Rational};

/// Exact barycentric coordinates over a fixed list of axes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaryPoint(Vec<Rational>);

impl BaryPoint {
    /// Checks that weights are nonnegative and sum to one.
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidPoint("no coordinates".into()));
        }
        if weights.iter().any(Signed::is_negative) {
            return Err(Error::InvalidPoint("negative weight".into()));
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidPoint(format!("weights sum to {}", format_rational(&total))));
        }
        Ok(BaryPoint(weights))
    }

    /// The unit vector `e_i` with `len` coordinates.
    pub fn vertex(len: usize, i: usize) -> Self {
        let mut weights = vec![Rational::zero(); len];
        weights[i] = Rational::one();
        BaryPoint(weights)
    }

    /// `Σ coefficients[j] · points[j]`, with coefficients summing to one.
    pub fn affine_combination(points: &[BaryPoint], coefficients: &[Rational]) -> Result<BaryPoint> {
        let dim = points.first().map_or(0, BaryPoint::len);
        if points.len() != coefficients.len() || points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidPoint("mismatched affine combination".into()));
        }
        let mut weights = vec![Rational::zero(); dim];
        for (point, c) in points.iter().zip(coefficients) {
            if c.is_zero() {
                continue;
            }
            for (w, x) in weights.iter_mut().zip(&point.0) {
                *w += c * x;
            }
        }
        BaryPoint::new(weights)
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    /// Number of coordinates, always at least one.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Axes with positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i].is_positive()).collect()
    }

    pub fn l1_distance(&self, other: &BaryPoint) -> Rational {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    /// Cartesian coordinates in the triangle with axis 0 at `(0,0)`, axis 1
    /// at `(1/2, √3/2)` and axis 2 at `(1,0)`. Returns `(x, y/√3)` so both
    /// components stay rational.
    pub fn to_figure(&self) -> Option<(Rational, Rational)> {
        if self.0.len() != 3 {
            return None;
        }
        let half = rat(1, 2);
        let x = &self.0[2] + &self.0[1] * &half;
        let y_over_sqrt3 = &self.0[1] * &half;
        Some((x, y_over_sqrt3))
    }

    /// Inverse of [`BaryPoint::to_figure`].
    pub fn from_figure(x: Rational, y_over_sqrt3: Rational) -> Result<Self> {
        let w1 = &y_over_sqrt3 * int(2);
        let w2 = x - &w1 * rat(1, 2);
        let w0 = int(1) - &w1 - &w2;
        BaryPoint::new(vec![w0, w1, w2])
    }

    /// Position on a segment in the 1D figure embedding `axis 0 ↦ 0`,
    /// `axis 1 ↦ 1`.
    pub fn to_segment(&self) -> Option<Rational> {
        (self.0.len() == 2).then(|| self.0[1].clone())
    }
}

impl fmt::Display for BaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, w) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for BaryPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for BaryPoint {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        let weights = items
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        BaryPoint::new(weights).map_err(serde::de::Error::custom)
    }
}

/// Equal-weight average.
pub fn iso(points: &[BaryPoint]) -> Result<BaryPoint> {
    if points.is_empty() {
        return Err(Error::InvalidPoint("isobarycenter of nothing".into()));
    }
    let share = rat(1, points.len() as i64);
    BaryPoint::affine_combination(points, &vec![share; points.len()])
}

/// Position of every participating process.
pub type GeoSimplex = BTreeMap<usize, BaryPoint>;

/// Process `i` at `e_i` for `i in 0..=n`.
pub fn standard_positions(n: usize) -> GeoSimplex {
    (0..=n).map(|i| (i, BaryPoint::vertex(n + 1, i))).collect()
}

/// One round of the Chromatic Average algorithm: a process seeing `d + 1`
/// positions moves to `x_i / (2d+1) + Σ_{j≠i} 2 x_j / (2d+1)`.
pub fn chromatic_average_step(positions: &GeoSimplex, graph: &InstantGraph) -> Result<GeoSimplex> {
    let mut next = positions.clone();
    for (&p, view) in graph.in_sets() {
        let own = positions
            .get(&p)
            .ok_or_else(|| Error::InvalidPoint(format!("no position for process {p}")))?;
        let d = view.len() as i64 - 1;
        let mut points = vec![own.clone()];
        let mut coefficients = vec![rat(1, 2 * d + 1)];
        for q in view.iter().filter(|q| *q != p) {
            let other = positions
                .get(&q)
                .ok_or_else(|| Error::InvalidPoint(format!("no position for process {q}")))?;
            points.push(other.clone());
            coefficients.push(rat(2, 2 * d + 1));
        }
        next.insert(p, BaryPoint::affine_combination(&points, &coefficients)?);
    }
    Ok(next)
}

pub fn geo_prefix(prefix: &[InstantGraph], base: &GeoSimplex) -> Result<GeoSimplex> {
    prefix.iter().try_fold(base.clone(), |acc, g| chromatic_average_step(&acc, g))
}

/// Largest pairwise L1 distance.
pub fn diameter(positions: &GeoSimplex) -> Rational {
    let points: Vec<&BaryPoint> = positions.values().collect();
    let mut best = Rational::zero();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = a.l1_distance(b);
            if d > best {
                best = d;
            }
        }
    }
    best
}

pub const DEFAULT_LIMIT_ROUNDS: usize = 10_000;

/// Approximates the limit point of `w` from the standard positions: returns
/// the isobarycenter of the first geometrized prefix whose diameter is below
/// `epsilon`, together with that diameter. Every later position stays in
/// the convex hull of that prefix, so the diameter bounds the error.
///
/// When a process hears only itself in every cycle letter, everyone else
/// converges to it and the limit is returned exactly with radius zero.
pub fn geo_limit(w: &UpWord, epsilon: &Rational, max_rounds: usize) -> Result<(BaryPoint, Rational)> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidPoint("epsilon must be positive".into()));
    }
    let n = w.n();
    let mut positions = geo_prefix(w.head(), &standard_positions(n))?;
    let anchor = (0..=n).find(|&p| {
        w.cycle().iter().all(|g| g.in_set(p).is_some_and(|v| v.len() == 1))
    });
    if let Some(p) = anchor {
        return Ok((positions[&p].clone(), Rational::zero()));
    }
    let mut rounds = w.head().len();
    loop {
        let start = diameter(&positions);
        for g in w.cycle() {
            let current = diameter(&positions);
            if &current < epsilon {
                let points: Vec<BaryPoint> = positions.values().cloned().collect();
                return Ok((iso(&points)?, current));
            }
            if rounds >= max_rounds {
                return Err(Error::NotContracting(format!("diameter still {current} after {rounds} rounds")));
            }
            positions = chromatic_average_step(&positions, g)?;
            rounds += 1;
        }
        let end = diameter(&positions);
        if end >= start && !(&end < epsilon) {
            return Err(Error::NotContracting(format!("diameter {end} did not shrink over a cycle")));
        }
    }
}

/// Exact convex-hull membership: solves for the barycentric weights of
/// `p` with respect to affinely independent `vertices`.
pub fn in_hull(p: &BaryPoint, vertices: &[BaryPoint]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let dim = p.len();
    let mut rows: Vec<Vec<Rational>> = (0..dim)
        .map(|axis| vertices.iter().map(|v| v.weights()[axis].clone()).collect())
        .collect();
    let mut rhs: Vec<Rational> = p.weights().to_vec();
    rows.push(vec![Rational::one(); vertices.len()]);
    rhs.push(Rational::one());
    match solve_unique(rows, rhs) {
        Some(lambda) => lambda.iter().all(|l| !l.is_negative()),
        None => false,
    }
}

fn check_in_realization(p: &BaryPoint, complex: &AbstractComplex) -> Result<Simplex> {
    let ids: Vec<VertexId> = complex.vertex_ids().collect();
    if p.len() != ids.len() {
        return Err(Error::InvalidPoint(format!("expected {} coordinates, got {}", ids.len(), p.len())));
    }
    let support: Simplex = p.support().into_iter().map(|i| ids[i]).collect();
    if !complex.contains(&support) {
        return Err(Error::OutsideRealization);
    }
    Ok(support)
}

/// Membership in the geometrization of the 0-restricted t-resilient model:
/// the carrier of `p` (the face spanned by its support) has dimension at
/// least `n - t`. Coordinates are over the vertices of `complex` in id order.
pub fn restricted_membership(p: &BaryPoint, complex: &AbstractComplex, n: usize, t: usize) -> Result<bool> {
    let support = check_in_realization(p, complex)?;
    Ok(support.dim() >= n as isize - t as isize)
}

/// Depth-bounded test for the t-resilient geometrization: `p` must avoid the
/// `(n-t-1)`-skeleton of `Chr^i` for every `i ≤ depth`. A `false` answer is
/// definitive; `true` only certifies the first `depth` levels.
pub fn fractal_membership(
    p: &BaryPoint,
    complex: &ChromaticComplex,
    n: usize,
    t: usize,
    depth: usize,
    budget: usize,
) -> Result<bool> {
    check_in_realization(p, complex)?;
    let level = n as isize - t as isize - 1;
    let mut geo = GeoComplex::embed(complex.clone());
    for i in 0..=depth {
        if i > 0 {
            geo = chr_geometric(&geo, budget)?.1;
        }
        for simplex in geo.complex.skeleton(level).facets() {
            if in_hull(p, &geo.points(simplex)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Geometry of `Bary C` inside `|C|`, with points over the vertices of `C`
/// in id order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaryGeometry {
    complex: AbstractComplex,
    axes: Vec<VertexId>,
}

/// An element of a carrier chain with its weight in the chain's
/// barycentric coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainTerm {
    pub cell: Simplex,
    pub weight: Rational,
}

impl BaryGeometry {
    pub fn new(complex: AbstractComplex) -> Self {
        let axes = complex.vertex_ids().collect();
        BaryGeometry { complex, axes }
    }

    pub fn complex(&self) -> &AbstractComplex {
        &self.complex
    }

    pub fn axes(&self) -> &[VertexId] {
        &self.axes
    }

    fn axis(&self, v: VertexId) -> usize {
        self.axes.binary_search(&v).expect("vertex of the complex")
    }

    pub fn iso(&self, cell: &Simplex) -> Result<BaryPoint> {
        if cell.is_empty() || !self.complex.contains(cell) {
            return Err(Error::SimplexNotFound(cell.clone()));
        }
        let points: Vec<BaryPoint> = cell.iter().map(|v| BaryPoint::vertex(self.axes.len(), self.axis(v))).collect();
        iso(&points)
    }

    /// Writes `p` in the barycentric subdivision: sorting the weights in
    /// decreasing order `w_1 ≥ … ≥ w_m`, the prefix `τ_j` of the `j` heaviest
    /// vertices gets weight `j (w_j - w_{j+1})`. Terms of weight zero are
    /// dropped. Ties are broken by vertex id, which only affects zero terms.
    pub fn carrier_chain(&self, p: &BaryPoint) -> Result<Vec<ChainTerm>> {
        check_in_realization(p, &self.complex)?;
        let mut order: Vec<usize> = p.support();
        order.sort_by(|&a, &b| p.0[b].cmp(&p.0[a]).then(a.cmp(&b)));
        let mut chain = Vec::new();
        for j in 0..order.len() {
            let next = order.get(j + 1).map_or(Rational::zero(), |&k| p.0[k].clone());
            let weight = (&p.0[order[j]] - next) * int(j as i64 + 1);
            if weight.is_positive() {
                let cell = order[..=j].iter().map(|&k| self.axes[k]).collect();
                chain.push(ChainTerm { cell, weight });
            }
        }
        Ok(chain)
    }

    pub fn from_chain(&self, chain: &[ChainTerm]) -> Result<BaryPoint> {
        let points = chain.iter().map(|t| self.iso(&t.cell)).collect::<Result<Vec<_>>>()?;
        let weights: Vec<Rational> = chain.iter().map(|t| t.weight.clone()).collect();
        BaryPoint::affine_combination(&points, &weights)
    }

    /// Projects `p` from `iso(center)` onto the link of `iso(center)` in
    /// `Bary C`. Points already in the link are returned unchanged.
    pub fn radial_retract(&self, p: &BaryPoint, center: &Simplex) -> Result<BaryPoint> {
        if center.is_empty() || !self.complex.contains(center) {
            return Err(Error::SimplexNotFound(center.clone()));
        }
        let chain = self.carrier_chain(p)?;
        let comparable = chain.iter().all(|t| t.cell.is_subset(center) || center.is_subset(&t.cell));
        let top = chain.last().map(|t| t.cell.union(center)).unwrap_or_else(|| center.clone());
        if !comparable || !self.complex.contains(&top) {
            return Err(Error::OutsideStar);
        }
        let Some(position) = chain.iter().position(|t| &t.cell == center) else {
            return Ok(p.clone());
        };
        if chain.len() == 1 {
            return Err(Error::DegenerateProjection);
        }
        let removed = &chain[position].weight;
        let scale = (Rational::one() - removed).recip();
        let rest: Vec<ChainTerm> = chain
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != position)
            .map(|(_, t)| ChainTerm { cell: t.cell.clone(), weight: &t.weight * &scale })
            .collect();
        self.from_chain(&rest)
    }

    /// Applies the radial retractions of a strictly increasing chain, from
    /// the smallest element up.
    pub fn chain_retract(&self, p: &BaryPoint, chain: &[Simplex]) -> Result<BaryPoint> {
        for pair in chain.windows(2) {
            if !(pair[0].is_subset(&pair[1]) && pair[0] != pair[1]) {
                return Err(Error::InvalidPoint("retraction chain is not strictly increasing".into()));
            }
        }
        chain.iter().try_fold(p.clone(), |acc, center| self.radial_retract(&acc, center))
    }

    /// Retracts `p` away from every removed cell of its carrier chain, which
    /// picks the carrier-minimal maximal chain through `p`. Fails with
    /// [`Error::DegenerateProjection`] when every cell of the chain is
    /// removed.
    pub fn retract_outside(&self, p: &BaryPoint, is_removed: impl Fn(&Simplex) -> bool) -> Result<BaryPoint> {
        let removed: Vec<Simplex> = self
            .carrier_chain(p)?
            .into_iter()
            .map(|t| t.cell)
            .filter(|c| is_removed(c))
            .collect();
        self.chain_retract(p, &removed)
    }

    /// Whether `p` lies in the realization of the subcomplex of `Bary C`
    /// spanned by chains of kept cells.
    pub fn in_kept_part(&self, p: &BaryPoint, is_kept: impl Fn(&Simplex) -> bool) -> Result<bool> {
        Ok(self.carrier_chain(p)?.iter().all(|t| is_kept(&t.cell)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ProcSet, InstantGraph};
    use crate::complex::VertexData;

    fn point(weights: &[(i64, i64)]) -> BaryPoint {
        BaryPoint::new(weights.iter().map(|&(a, b)| rat(a, b)).collect()).unwrap()
    }

    #[test]
    fn point_validation() {
        assert!(BaryPoint::new(vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(BaryPoint::new(vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(BaryPoint::new(vec![]).is_err());
        let p = point(&[(1, 2), (1, 2)]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"["1/2","1/2"]"#);
        assert_eq!(serde_json::from_str::<BaryPoint>(&text).unwrap(), p);
    }

    #[test]
    fn isobarycenters() {
        let e = |i| BaryPoint::vertex(3, i);
        assert_eq!(iso(&[e(0), e(1), e(2)]).unwrap(), point(&[(1, 3), (1, 3), (1, 3)]));
        assert_eq!(iso(&[e(0), e(2)]).unwrap(), point(&[(1, 2), (0, 1), (1, 2)]));
        assert!(iso(&[]).is_err());
    }

    #[test]
    fn figure_embedding_round_trip() {
        let p = point(&[(2, 5), (1, 5), (2, 5)]);
        let (x, ys) = p.to_figure().unwrap();
        assert_eq!((x.clone(), ys.clone()), (rat(1, 2), rat(1, 10)));
        assert_eq!(BaryPoint::from_figure(x, ys).unwrap(), p);
    }

    #[test]
    fn silent_process_does_not_move() {
        let g = InstantGraph::from_ordered_partition(&[ProcSet::singleton(0), ProcSet::singleton(1)]).unwrap();
        let next = chromatic_average_step(&standard_positions(1), &g).unwrap();
        assert_eq!(next[&0], BaryPoint::vertex(2, 0));
        assert_eq!(next[&1], point(&[(2, 3), (1, 3)]));
    }

    #[test]
    fn hull_membership() {
        let e = |i| BaryPoint::vertex(3, i);
        assert!(in_hull(&point(&[(1, 2), (1, 2), (0, 1)]), &[e(0), e(1)]));
        assert!(!in_hull(&point(&[(1, 3), (1, 3), (1, 3)]), &[e(0), e(1)]));
        assert!(in_hull(&e(2), &[e(2)]));
    }

    fn glued_triangles() -> AbstractComplex {
        let vertices = (1..=4).map(|i| (VertexId(i), VertexData::valued(i.to_string())));
        AbstractComplex::new(vertices, [Simplex::from_ids([1, 2, 3]), Simplex::from_ids([2, 3, 4])]).unwrap()
    }

    #[test]
    fn carrier_chain_reconstructs_point() {
        let geo = BaryGeometry::new(glued_triangles());
        let p = point(&[(1, 2), (1, 3), (1, 6), (0, 1)]);
        let chain = geo.carrier_chain(&p).unwrap();
        assert_eq!(chain.len(), 3);
        assert_eq!(chain[0].cell, Simplex::from_ids([1]));
        assert_eq!(geo.from_chain(&chain).unwrap(), p);
        let outside = point(&[(1, 2), (0, 1), (0, 1), (1, 2)]);
        assert!(matches!(geo.carrier_chain(&outside), Err(Error::OutsideRealization)));
    }

    #[test]
    fn radial_retraction_cases() {
        let geo = BaryGeometry::new(glued_triangles());
        let v1 = Simplex::from_ids([1]);
        let edge = Simplex::from_ids([1, 2]);
        // Midpoint of [vertex 1, iso(12)] goes to iso(12).
        let mid = BaryPoint::affine_combination(&[geo.iso(&v1).unwrap(), geo.iso(&edge).unwrap()], &[rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(geo.radial_retract(&mid, &v1).unwrap(), geo.iso(&edge).unwrap());
        // Points of the link are fixed.
        let link_point = geo.iso(&edge).unwrap();
        assert_eq!(geo.radial_retract(&link_point, &v1).unwrap(), link_point);
        assert!(matches!(geo.radial_retract(&geo.iso(&v1).unwrap(), &v1), Err(Error::DegenerateProjection)));
        let far = geo.iso(&Simplex::from_ids([2, 3, 4])).unwrap();
        assert!(matches!(geo.radial_retract(&far, &v1), Err(Error::OutsideStar)));
        assert_eq!(geo.chain_retract(&far, &[]).unwrap(), far);
    }
}
