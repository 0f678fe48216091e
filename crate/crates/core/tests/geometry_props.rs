use proptest::prelude::*;

use topoadv::adversary::UpWord;
use topoadv::complex::{AbstractComplex, Simplex};
use topoadv::geometry::{
    chromatic_average_step, geo_limit, geo_prefix, in_hull, restricted_membership, fractal_membership,
    standard_positions, BaryGeometry, BaryPoint, DEFAULT_LIMIT_ROUNDS,
};
use topoadv::graph::{InstantGraph, ProcSet};
use topoadv::rational::{int, rat, Rational};

const N: usize = 2;

/// A random immediate-snapshot graph on `0..=n`, from a permutation and a
/// choice of block boundaries.
fn arb_graph(n: usize) -> impl Strategy<Value = InstantGraph> {
    (Just((0..=n).collect::<Vec<usize>>()).prop_shuffle(), any::<u8>()).prop_map(|(perm, cuts)| {
        let mut blocks = vec![ProcSet::EMPTY];
        for (i, p) in perm.iter().enumerate() {
            if i > 0 && cuts & (1 << i) != 0 {
                blocks.push(ProcSet::EMPTY);
            }
            blocks.last_mut().unwrap().insert(*p);
        }
        InstantGraph::from_ordered_partition(&blocks).unwrap()
    })
}

fn arb_point(dim: usize) -> impl Strategy<Value = BaryPoint> {
    prop::collection::vec(0i64..6, dim).prop_filter_map("nonzero", |raw| {
        let total: i64 = raw.iter().sum();
        (total > 0).then(|| BaryPoint::new(raw.iter().map(|w| rat(*w, total)).collect()).unwrap())
    })
}

proptest! {
    #[test]
    fn prefixes_nest(word in prop::collection::vec(arb_graph(N), 1..5)) {
        let mut outer = standard_positions(N);
        for g in &word {
            let inner = chromatic_average_step(&outer, g).unwrap();
            let hull: Vec<BaryPoint> = outer.values().cloned().collect();
            for p in inner.values() {
                prop_assert!(in_hull(p, &hull));
            }
            outer = inner;
        }
        prop_assert_eq!(outer, geo_prefix(&word, &standard_positions(N)).unwrap());
    }

    #[test]
    fn limit_stays_inside_every_prefix(head in prop::collection::vec(arb_graph(N), 0..3), cycle in prop::collection::vec(arb_graph(N), 1..3)) {
        let w = UpWord::new(head, cycle).unwrap();
        let (limit, radius) = geo_limit(&w, &rat(1, 100), DEFAULT_LIMIT_ROUNDS).unwrap();
        prop_assert!(radius < rat(1, 100));
        for len in 0..4 {
            let prefix: Vec<InstantGraph> = (1..=len).map(|r| w.letter(r).clone()).collect();
            let positions = geo_prefix(&prefix, &standard_positions(N)).unwrap();
            let hull: Vec<BaryPoint> = positions.values().cloned().collect();
            prop_assert!(in_hull(&limit, &hull));
        }
    }

    #[test]
    fn restricted_membership_is_depth_zero_fractal(p in arb_point(N + 1), t in 0usize..=N) {
        let base = AbstractComplex::standard_simplex(N);
        let direct = restricted_membership(&p, &base, N, t).unwrap();
        let fractal = fractal_membership(&p, &base, N, t, 0, 1000).unwrap();
        prop_assert_eq!(direct, fractal);
        prop_assert_eq!(direct, p.support().len() > N - t);
    }

    #[test]
    fn chain_decomposition_round_trips(p in arb_point(4)) {
        let geometry = BaryGeometry::new(AbstractComplex::standard_simplex(3).into_complex());
        let chain = geometry.carrier_chain(&p).unwrap();
        let total: Rational = chain.iter().map(|t| t.weight.clone()).sum();
        prop_assert_eq!(total, int(1));
        for pair in chain.windows(2) {
            prop_assert!(pair[0].cell.is_subset(&pair[1].cell));
        }
        prop_assert_eq!(geometry.from_chain(&chain).unwrap(), p);
    }

    #[test]
    fn retraction_is_idempotent(p in arb_point(4), level in 0usize..2) {
        let geometry = BaryGeometry::new(AbstractComplex::standard_simplex(3).into_complex());
        let removed = |c: &Simplex| c.len() <= level + 1;
        match geometry.retract_outside(&p, removed) {
            Ok(r) => {
                prop_assert!(geometry.in_kept_part(&r, |c| !removed(c)).unwrap());
                prop_assert_eq!(geometry.retract_outside(&r, removed).unwrap(), r);
            }
            // Only points whose whole chain is removed have nowhere to go.
            Err(_) => prop_assert!(geometry.carrier_chain(&p).unwrap().iter().all(|t| removed(&t.cell))),
        }
    }

    #[test]
    fn point_json_and_figure_round_trip(p in arb_point(3)) {
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(&serde_json::from_str::<BaryPoint>(&text).unwrap(), &p);
        let (x, y) = p.to_figure().unwrap();
        prop_assert_eq!(BaryPoint::from_figure(x, y).unwrap(), p);
    }
}

#[test]
fn silent_process_limit_is_exact() {
    let complete = InstantGraph::complete(ProcSet::full(1));
    let only_zero = InstantGraph::from_ordered_partition(&[ProcSet::singleton(0), ProcSet::singleton(1)]).unwrap();
    let w = UpWord::new(vec![complete], vec![only_zero]).unwrap();
    let (limit, radius) = geo_limit(&w, &rat(1, 1000), DEFAULT_LIMIT_ROUNDS).unwrap();
    assert_eq!(radius, int(0));
    assert_eq!(limit.weights(), &[rat(1, 3), rat(2, 3)]);
}

#[test]
fn retraction_from_a_lone_center_is_degenerate() {
    let geometry = BaryGeometry::new(AbstractComplex::standard_simplex(2).into_complex());
    let edge = Simplex::from_ids([0, 1]);
    let center = geometry.iso(&edge).unwrap();
    assert!(geometry.radial_retract(&center, &edge).is_err());
    let nearby = BaryPoint::new(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
    let projected = geometry.radial_retract(&nearby, &edge).unwrap();
    assert!(!geometry.carrier_chain(&projected).unwrap().iter().any(|t| t.cell == edge));
}
