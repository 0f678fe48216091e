use std::collections::BTreeSet;

use proptest::prelude::*;

use topoadv::chr::{chr, chr_geometric, echr, fubini, iterate_chr, iterate_chr_geometric, GeoComplex, DEFAULT_FACET_BUDGET};
use topoadv::complex::{AbstractComplex, Simplex};
use topoadv::geometry::{geo_prefix, standard_positions, BaryPoint};
use topoadv::graph::{enumerate_ims, ProcSet};
use topoadv::rational::int;
use topoadv::Error;

#[test]
fn graphs_and_facets_correspond_one_to_one() {
    for n in 0..=3 {
        let base = AbstractComplex::standard_simplex(n);
        let sub = chr(&base, DEFAULT_FACET_BUDGET).unwrap();
        let sigma = base.facets()[0].clone();
        let mut seen = BTreeSet::new();
        for graph in enumerate_ims(ProcSet::full(n)).unwrap() {
            let facet = sub.graph_to_simplex(&base, &graph, &sigma).unwrap();
            assert!(sub.complex.facets().contains(&facet));
            assert_eq!(sub.simplex_to_graph(&base, &facet).unwrap(), graph);
            seen.insert(facet);
        }
        assert_eq!(seen.len(), sub.complex.facets().len());
    }
}

#[test]
fn subdivision_restricts_to_faces() {
    let base = AbstractComplex::standard_simplex(3);
    let sub = chr(&base, DEFAULT_FACET_BUDGET).unwrap();
    for tau in base.facets()[0].faces() {
        let inside: Vec<Simplex> = sub
            .complex
            .simplices_of_dim(tau.len() - 1)
            .into_iter()
            .filter(|s| s.iter().all(|v| sub.carrier(v).unwrap().is_subset(&tau)))
            .collect();
        assert_eq!(inside.len(), fubini(tau.len()), "face {tau}");
    }
}

#[test]
fn chromatic_average_matches_subdivision_coordinates() {
    for n in 1..=3 {
        let g = GeoComplex::standard(n);
        let (sub, geo) = chr_geometric(&g, DEFAULT_FACET_BUDGET).unwrap();
        let sigma = g.complex.facets()[0].clone();
        for graph in enumerate_ims(ProcSet::full(n)).unwrap() {
            let facet = sub.graph_to_simplex(&g.complex, &graph, &sigma).unwrap();
            let positions = geo_prefix(&[graph], &standard_positions(n)).unwrap();
            for v in facet.iter() {
                let color = sub.complex.color(v).unwrap();
                assert_eq!(geo.point(v), &positions[&color]);
            }
        }
    }
}

#[test]
fn combinatorial_keys_agree_with_coordinates() {
    let (sub, geo) = chr_geometric(&GeoComplex::standard(3), DEFAULT_FACET_BUDGET).unwrap();
    let points: BTreeSet<&BaryPoint> = sub.vertices.keys().map(|v| geo.point(*v)).collect();
    assert_eq!(points.len(), sub.vertices.len());
}

#[test]
fn iterated_carriers_cover_the_base() {
    let base = AbstractComplex::standard_simplex(2);
    let sub = iterate_chr(&base, 2, DEFAULT_FACET_BUDGET).unwrap();
    for facet in sub.complex.facets() {
        assert_eq!(sub.carrier_of(facet).unwrap(), base.facets()[0]);
    }
    let corners = sub.carriers.values().filter(|c| c.len() == 1).count();
    assert_eq!(corners, 3);
}

#[test]
fn budget_is_checked_before_work() {
    let base = AbstractComplex::standard_simplex(3);
    match iterate_chr(&base, 3, 10_000) {
        Err(Error::FacetBudget { needed, budget }) => assert_eq!((needed, budget), (75 * 75 * 75, 10_000)),
        other => panic!("expected budget error, got {other:?}"),
    }
}

#[test]
fn echr_extremes() {
    let base = AbstractComplex::standard_simplex(2);
    let all = base.facets()[0].clone();
    let frozen = echr(&all, &base, DEFAULT_FACET_BUDGET).unwrap();
    assert_eq!(frozen.complex.facets().len(), 1);
    let live = echr(&Simplex::empty(), &base, DEFAULT_FACET_BUDGET).unwrap();
    assert_eq!(live.complex.facets().len(), 13);
    assert!(echr(&Simplex::from_ids([7]), &base, DEFAULT_FACET_BUDGET).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn volume_is_preserved(n in 0usize..=2, rounds in 0usize..=2) {
        let sub = iterate_chr_geometric(&GeoComplex::standard(n), rounds, DEFAULT_FACET_BUDGET).unwrap();
        let geo = sub.geo().unwrap();
        prop_assert_eq!(geo.total_volume(), int(1));
        prop_assert_eq!(geo.complex.facets().len(), fubini(n + 1).pow(rounds as u32));
        for facet in geo.complex.facets() {
            prop_assert!(geo.relative_volume(facet) > int(0));
        }
    }
}
