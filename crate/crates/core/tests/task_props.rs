use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use topoadv::chr::{iterate_chr, DEFAULT_FACET_BUDGET};
use topoadv::complex::{AbstractComplex, ChromaticComplex, Simplex, SimplicialMap, Value, VertexData, VertexId};
use topoadv::task::{
    check_delta_compatible, check_solution, choices, find_solution_exhaustive, is_nonexpanding, make_kset, nonexpanding,
    tags_by_value, vertex_deterministic,
};
use topoadv::{ColorlessTask, Error};

fn values(names: &[&str]) -> Vec<Value> {
    names.iter().map(|s| Value::from(*s)).collect()
}

fn pseudosphere(names: &[&str], n: usize) -> ChromaticComplex {
    AbstractComplex::full_simplex(values(names).into_iter().map(VertexData::valued)).pseudosphere(n)
}

fn output_vertex(task: &ColorlessTask, value: &Value) -> VertexId {
    task.output().vertices_with_values(&BTreeSet::from([value.clone()])).vertices()[0]
}

#[test]
fn binary_consensus_after_one_round_has_no_solution() {
    let task = make_kset(&values(&["0", "1"]), 1).unwrap();
    let inputs = pseudosphere(&["0", "1"], 1);
    let stage = iterate_chr(&inputs, 1, DEFAULT_FACET_BUDGET).unwrap();
    assert_eq!(stage.complex.vertex_count(), 12);
    let tags = tags_by_value(&task, &inputs, &stage.carriers).unwrap();
    assert_eq!(find_solution_exhaustive(&task, &stage.complex, &tags).unwrap(), None);
}

#[test]
fn deciding_own_input_solves_set_agreement_with_enough_room() {
    let names = ["0", "1", "2"];
    let task = make_kset(&values(&names), 3).unwrap();
    let inputs = pseudosphere(&names, 2);
    let stage = iterate_chr(&inputs, 1, DEFAULT_FACET_BUDGET).unwrap();
    let tags = tags_by_value(&task, &inputs, &stage.carriers).unwrap();
    let own = SimplicialMap::new(stage.complex.vertex_ids().map(|v| (v, output_vertex(&task, &stage.complex.value(v)))));
    assert!(check_solution(&task, &stage.complex, &tags, &own).unwrap());

    let consensus = make_kset(&values(&names), 1).unwrap();
    assert!(!check_solution(&consensus, &stage.complex, &tags, &own).unwrap());
}

#[test]
fn missing_tags_are_reported() {
    let task = make_kset(&values(&["0", "1"]), 1).unwrap();
    let inputs = pseudosphere(&["0", "1"], 1);
    let map = SimplicialMap::new(inputs.vertex_ids().map(|v| (v, VertexId(0))));
    assert!(matches!(check_solution(&task, &inputs, &BTreeMap::new(), &map), Err(Error::Untagged(_))));
}

#[test]
fn kset_parameters_are_validated() {
    assert!(make_kset(&values(&["0", "1"]), 0).is_err());
    assert!(make_kset(&values(&["0", "1"]), 3).is_err());
    assert!(make_kset(&values(&["0", "0"]), 1).is_err());
}

#[test]
fn table_tasks_need_carriers_everywhere() {
    let input = AbstractComplex::full_simplex(values(&["a", "b"]).into_iter().map(VertexData::valued));
    let output = input.clone();
    let mut table = BTreeMap::new();
    table.insert(Simplex::from_ids([0]), vec![Simplex::from_ids([0])]);
    table.insert(Simplex::from_ids([0, 1]), vec![Simplex::from_ids([0, 1])]);
    let partial = ColorlessTask::new(input.clone(), output.clone(), topoadv::Delta::Table(table.clone()));
    assert!(matches!(partial, Err(Error::EmptyCarrier(_))));
    table.insert(Simplex::from_ids([1]), vec![Simplex::from_ids([1])]);
    let task = ColorlessTask::new(input, output, topoadv::Delta::Table(table)).unwrap();
    let text = serde_json::to_string(&task).unwrap();
    let back: ColorlessTask = serde_json::from_str(&text).unwrap();
    for sigma in task.input().simplices() {
        assert_eq!(back.delta(&sigma).unwrap(), task.delta(&sigma).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kset_delta_matches_definition(m in 2usize..5, k in 1usize..4, mask in 1u32..16) {
        let k = k.min(m);
        let names: Vec<Value> = (0..m).map(|i| Value::new(format!("v{i}"))).collect();
        let task = make_kset(&names, k).unwrap();
        let sigma = Simplex::from_ids((0..m as u32).filter(|i| mask & (1 << i) != 0));
        prop_assume!(!sigma.is_empty());
        let gens = task.delta(&sigma).unwrap();
        for g in &gens {
            prop_assert!(g.is_subset(&sigma));
            prop_assert_eq!(g.len(), k.min(sigma.len()));
        }
        let expected: usize = {
            let (a, b) = (sigma.len(), k.min(sigma.len()));
            (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
        };
        prop_assert_eq!(gens.len(), expected);
    }

    #[test]
    fn nonexpanding_is_idempotent(m in 2usize..5, k in 1usize..4) {
        let names: Vec<Value> = (0..m).map(|i| Value::new(i.to_string())).collect();
        let task = make_kset(&names, k.min(m)).unwrap();
        let once = nonexpanding(&task).unwrap();
        let twice = nonexpanding(&once).unwrap();
        prop_assert!(is_nonexpanding(&once).unwrap());
        for sigma in task.input().simplices() {
            prop_assert_eq!(once.delta(&sigma).unwrap(), twice.delta(&sigma).unwrap());
        }
    }

    #[test]
    fn vertex_choices_keep_delta_on_higher_simplices(m in 2usize..4) {
        let names: Vec<Value> = (0..m).map(|i| Value::new(i.to_string())).collect();
        let task = make_kset(&names, m).unwrap();
        let all = choices(&task).unwrap();
        prop_assert_eq!(all.len(), 1);
        let fixed = vertex_deterministic(&task, &all[0]).unwrap();
        for sigma in task.input().simplices() {
            prop_assert_eq!(fixed.delta(&sigma).unwrap(), task.delta(&sigma).unwrap());
        }
    }

    #[test]
    fn face_collapse_is_compatible_on_its_domain(m in 2usize..5, k in 1usize..3, mask in 1u32..16, target in 0u32..4) {
        let names: Vec<Value> = (0..m).map(|i| Value::new(i.to_string())).collect();
        let task = make_kset(&names, k.min(m)).unwrap();
        let sigma = Simplex::from_ids((0..m as u32).filter(|i| mask & (1 << i) != 0));
        prop_assume!(!sigma.is_empty());
        let onto = sigma.vertices()[target as usize % sigma.len()];
        let collapse = SimplicialMap::new(task.input().vertex_ids().map(|v| (v, if sigma.contains(v) { onto } else { v })));
        prop_assert!(check_delta_compatible(&task, &collapse, &[sigma]).unwrap());
    }
}
