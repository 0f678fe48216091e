//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so each criterion reports PASS/FAIL on its own line and the
//! process exits nonzero if any fails.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::panic;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use topoadv::adversary::{enumerate_up_words, k_r, q_of, AdversarySpec, CoreCollection, MessageAdversary, UpWord};
use topoadv::chr::{chr, chr_geometric, iterate_chr_geometric, zeta, GeoComplex, DEFAULT_FACET_BUDGET};
use topoadv::complex::{AbstractComplex, Simplex, Value, ValueOrder, VertexData, VertexId};
use topoadv::geometry::{geo_prefix, in_hull, standard_positions, BaryGeometry, BaryPoint};
use topoadv::graph::{enumerate_ims, InstantGraph, ProcSet};
use topoadv::rational::{int, rat, Rational};
use topoadv::solvability::condition::value_multiset;
use topoadv::solvability::{build_u, decide, is_maximal, kin, Condition, Decision, DEFAULT_SEARCH_BUDGET};
use topoadv::task::{make_kset, ColorlessTask};

fn set(items: &[usize]) -> ProcSet {
    items.iter().copied().collect()
}

fn within(limit: Duration, start: Instant, what: &str) {
    let elapsed = start.elapsed();
    assert!(elapsed < limit, "{what} took {elapsed:?}, limit {limit:?}");
}

/// Counts immediate-snapshot graphs on `m` processes by filtering all arc
/// subsets, without going through ordered partitions.
fn brute_force_ims_count(m: usize) -> usize {
    let arcs: Vec<(usize, usize)> = (0..m).flat_map(|p| (0..m).filter(move |q| *q != p).map(move |q| (p, q))).collect();
    let mut count = 0;
    for mask in 0u64..(1 << arcs.len()) {
        let mut view = vec![1u64 << 0; m];
        for (q, v) in view.iter_mut().enumerate() {
            *v = 1 << q;
        }
        for (i, &(p, q)) in arcs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                view[q] |= 1 << p;
            }
        }
        let sub = |a: u64, b: u64| a & !b == 0;
        let containment = (0..m).all(|a| (0..m).all(|b| sub(view[a], view[b]) || sub(view[b], view[a])));
        let immediacy = (0..m).all(|a| (0..m).all(|b| view[b] & (1 << a) == 0 || sub(view[a], view[b])));
        if containment && immediacy {
            count += 1;
        }
    }
    count
}

fn criterion_1() {
    let start = Instant::now();
    for (n, expected) in [(1usize, 3usize), (2, 13)] {
        assert_eq!(enumerate_ims(ProcSet::full(n)).unwrap().len(), expected);
        let sub = chr(&AbstractComplex::standard_simplex(n), DEFAULT_FACET_BUDGET).unwrap();
        assert_eq!(sub.complex.facets().len(), expected);
    }
    let brute = brute_force_ims_count(4);
    assert_eq!(brute, 75);
    assert_eq!(enumerate_ims(ProcSet::full(3)).unwrap().len(), brute);
    let sub = chr(&AbstractComplex::standard_simplex(3), DEFAULT_FACET_BUDGET).unwrap();
    assert_eq!(sub.complex.facets().len(), brute);
    within(Duration::from_secs(10), start, "counting");
}

fn criterion_2() {
    // Segment: x_b at 0, x_n at 1.
    let b = BaryPoint::vertex(2, 0);
    let n = BaryPoint::vertex(2, 1);
    assert_eq!(zeta(&[b.clone(), n.clone()], 1).unwrap().to_segment().unwrap(), rat(1, 3));
    assert_eq!(zeta(&[b, n], 0).unwrap().to_segment().unwrap(), rat(2, 3));
    // Triangle: b, g, n on axes 0, 1, 2.
    let tri: Vec<BaryPoint> = (0..3).map(|i| BaryPoint::vertex(3, i)).collect();
    let g = zeta(&tri, 1).unwrap();
    assert_eq!(g.to_figure().unwrap(), (rat(1, 2), rat(1, 10)));
    assert_eq!(g.weights(), &[rat(2, 5), rat(1, 5), rat(2, 5)]);
}

fn criterion_3() {
    // In(n) = {n}, In(b) = {b, n}, In(g) = {b, g, n}; b = 0, g = 1, n = 2.
    let graph = InstantGraph::from_ordered_partition(&[set(&[2]), set(&[0]), set(&[1])]).unwrap();
    let positions = geo_prefix(&[graph], &standard_positions(2)).unwrap();
    let facet: BTreeSet<(Rational, Rational)> = positions.values().map(|p| p.to_figure().unwrap()).collect();
    let expected: BTreeSet<(Rational, Rational)> =
        [(rat(2, 3), int(0)), (int(1), int(0)), (rat(1, 2), rat(1, 10))].into_iter().collect();
    assert_eq!(facet, expected);
}

fn criterion_4() {
    for n in 0..=3 {
        let (_, geo) = chr_geometric(&GeoComplex::standard(n), DEFAULT_FACET_BUDGET).unwrap();
        assert_eq!(geo.total_volume(), int(1), "Chr(S^{n})");
    }
    let twice = iterate_chr_geometric(&GeoComplex::standard(2), 2, DEFAULT_FACET_BUDGET).unwrap();
    let geo = twice.geo().unwrap();
    assert_eq!(geo.complex.facets().len(), 169);
    assert_eq!(geo.total_volume(), int(1));
}

fn glued_triangles() -> AbstractComplex {
    let vertices = (1..=4).map(|i| (VertexId(i), VertexData::valued(i.to_string())));
    AbstractComplex::new(vertices, [Simplex::from_ids([1, 2, 3]), Simplex::from_ids([2, 3, 4])]).unwrap()
}

fn glued_condition() -> Condition {
    let ambient = glued_triangles();
    let facets = ambient.facets().to_vec();
    Condition::from_generators(ambient, facets, 1).unwrap()
}

fn criterion_5() {
    let condition = glued_condition();
    let u = build_u(&condition);
    let labels: BTreeSet<String> = u.complex.vertex_ids().map(|v| u.label(v)).collect();
    let expected: BTreeSet<String> = ["12", "13", "23", "123", "24", "34", "234"].iter().map(|s| s.to_string()).collect();
    assert_eq!(labels, expected);
    let edges: BTreeSet<(String, String)> = u
        .complex
        .simplices_of_dim(1)
        .iter()
        .map(|e| (u.label(e.vertices()[0]), u.label(e.vertices()[1])))
        .collect();
    let expected_edges: BTreeSet<(String, String)> = [
        ("12", "123"),
        ("13", "123"),
        ("23", "123"),
        ("23", "234"),
        ("24", "234"),
        ("34", "234"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    assert_eq!(edges, expected_edges);
    assert_eq!(u.complex.facets().len(), 6);
    assert_eq!(kin(&condition, 2), u);
}

fn binary_setup(k: usize) -> (ColorlessTask, ValueOrder) {
    let values = [Value::from("0"), Value::from("1")];
    (make_kset(&values, k).unwrap(), ValueOrder::new(values).unwrap())
}

fn timed_decide(task: &ColorlessTask, condition: &Condition) -> (Decision, topoadv::solvability::ConditionComplex) {
    let start = Instant::now();
    let u = build_u(condition);
    let decision = decide(task, &u, DEFAULT_SEARCH_BUDGET).unwrap();
    within(Duration::from_secs(5), start, "decide");
    (decision, u)
}

fn criterion_6() {
    let (consensus, order) = binary_setup(1);
    let c2 = Condition::c2(2, 1, 1, &order).unwrap();
    assert!(timed_decide(&consensus, &c2).0.is_solvable());

    let added = c2.simplex_for(&[(0, "1".into()), (1, "1".into()), (2, "0".into())]).unwrap();
    let extended = c2.with_simplex(&added).unwrap();
    let (decision, u) = timed_decide(&consensus, &extended);
    let Decision::Solvable(witness) = decision else { panic!("C2 + (1,1,0) should be solvable") };
    let vertex = u.vertex_of(&added).unwrap();
    assert_eq!(consensus.output().value(witness.get(vertex).unwrap()), Value::from("1"));

    let full = Condition::full(2, 1, &order).unwrap();
    assert_eq!(timed_decide(&consensus, &full).0, Decision::Unsolvable);
    let (two_set, _) = binary_setup(2);
    assert!(timed_decide(&two_set, &full).0.is_solvable());
}

fn criterion_7() {
    let start = Instant::now();
    let (consensus, order) = binary_setup(1);
    let c1 = Condition::c1(2, 1, 1, &order).unwrap();
    let m1 = is_maximal(&consensus, &c1, DEFAULT_SEARCH_BUDGET).unwrap();
    assert!(m1.maximal);
    let c2 = Condition::c2(2, 1, 1, &order).unwrap();
    let m2 = is_maximal(&consensus, &c2, DEFAULT_SEARCH_BUDGET).unwrap();
    assert!(!m2.maximal);
    let counter = m2.counterexample.expect("counterexample");
    let multiset = value_multiset(&c2, &counter);
    assert_eq!(multiset, BTreeMap::from([(Value::from("0"), 1), (Value::from("1"), 2)]));
    within(Duration::from_secs(60), start, "maximality");
}

/// Tries every vertex map `V(U) → V(O)` and checks each chain against Δ of
/// its largest member's values directly.
fn exhaustive_oracle(task: &ColorlessTask, condition: &Condition) -> bool {
    let u = build_u(condition);
    let sources: Vec<VertexId> = u.complex.vertex_ids().collect();
    let targets: Vec<VertexId> = task.output().vertex_ids().collect();
    let chains = u.complex.simplices();
    let allowed: Vec<Vec<Simplex>> = chains
        .iter()
        .map(|chain| {
            let top = chain.iter().map(|v| &u.tags[&v]).max_by_key(|m| m.len()).unwrap();
            task.delta_on_values(&condition.ambient().giv(top)).unwrap()
        })
        .collect();
    let total = targets.len().pow(sources.len() as u32);
    (0..total).any(|mut code| {
        let mut map = BTreeMap::new();
        for v in &sources {
            map.insert(*v, targets[code % targets.len()]);
            code /= targets.len();
        }
        chains.iter().zip(&allowed).all(|(chain, gens)| {
            let image: Simplex = chain.iter().map(|v| map[&v]).collect();
            gens.iter().any(|g| image.is_subset(g))
        })
    })
}

fn criterion_8() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    let mut solvable = 0;
    while checked < 50 {
        let n = rng.gen_range(1..=2usize);
        let t = rng.gen_range(0..=n);
        let value_count = rng.gen_range(2..=3usize);
        let names: Vec<Value> = (0..value_count).map(|i| Value::new(i.to_string())).collect();
        let k = rng.gen_range(1..=value_count.min(2));
        let order = ValueOrder::new(names.clone()).unwrap();
        let density: f64 = rng.gen_range(0.05..0.4);
        let picks = RefCell::new(ChaCha8Rng::seed_from_u64(rng.gen()));
        let condition =
            Condition::from_configurations(n, t, &order, |_| Ok(picks.borrow_mut().gen_bool(density))).unwrap();
        let u = build_u(&condition);
        if u.complex.vertex_count() > 8 {
            continue;
        }
        let task = make_kset(&names, k).unwrap();
        let decided = decide(&task, &u, DEFAULT_SEARCH_BUDGET).unwrap();
        assert_ne!(decided, Decision::Budget);
        assert_eq!(decided.is_solvable(), exhaustive_oracle(&task, &condition), "n={n} t={t} k={k}");
        checked += 1;
        solvable += usize::from(decided.is_solvable());
    }
    assert!(solvable > 0 && solvable < checked, "sample has {solvable}/{checked} solvable");
}

fn random_weights(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..count).map(|_| rng.gen_range(1..=20)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| rat(w, total)).collect()
}

fn criterion_9() {
    let condition = glued_condition();
    let u = build_u(&condition);
    let geometry = BaryGeometry::new(condition.ambient().clone());
    let axes = geometry.axes().to_vec();
    // Isobarycenters computed here, independently of the library.
    let iso_of = |cell: &Simplex| -> BaryPoint {
        let weights = axes
            .iter()
            .map(|a| if cell.contains(*a) { rat(1, cell.len() as i64) } else { int(0) })
            .collect();
        BaryPoint::new(weights).unwrap()
    };
    let u_hulls: Vec<Vec<BaryPoint>> = u
        .complex
        .facets()
        .iter()
        .map(|f| f.iter().map(|v| iso_of(&u.tags[&v])).collect())
        .collect();
    let in_u = |p: &BaryPoint| u_hulls.iter().any(|h| in_hull(p, h));
    let removed = |cell: &Simplex| !condition.contains(cell);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let facets = condition.ambient().facets().to_vec();
    for _ in 0..100 {
        // A point of |I| whose carrier has dimension at least 1.
        let facet = &facets[rng.gen_range(0..facets.len())];
        let size = rng.gen_range(2..=facet.len());
        let mut support: Vec<VertexId> = facet.vertices().to_vec();
        while support.len() > size {
            support.remove(rng.gen_range(0..support.len()));
        }
        let w = random_weights(&mut rng, support.len());
        let weights: Vec<Rational> = axes
            .iter()
            .map(|a| support.iter().position(|s| s == a).map_or(int(0), |i| w[i].clone()))
            .collect();
        let p = BaryPoint::new(weights).unwrap();
        let r = geometry.retract_outside(&p, removed).unwrap();
        assert!(in_u(&r), "retraction of {p} left |U|: {r}");
        assert_eq!(geometry.retract_outside(&r, removed).unwrap(), r);

        // A point of |U| built from a random chain.
        let chain = &u.complex.facets()[rng.gen_range(0..u.complex.facets().len())];
        let cw = random_weights(&mut rng, chain.len());
        let points: Vec<BaryPoint> = chain.iter().map(|v| iso_of(&u.tags[&v])).collect();
        let q = BaryPoint::affine_combination(&points, &cw).unwrap();
        assert!(in_u(&q));
        assert_eq!(geometry.retract_outside(&q, removed).unwrap(), q);
    }
}

fn criterion_10() {
    let complete = InstantGraph::complete(ProcSet::full(1));
    let only_zero = InstantGraph::from_ordered_partition(&[set(&[0]), set(&[1])]).unwrap();
    let only_one = InstantGraph::from_ordered_partition(&[set(&[1]), set(&[0])]).unwrap();
    let crash = UpWord::new(vec![complete.clone()], vec![only_zero.clone()]).unwrap();
    assert_eq!(q_of(&crash), set(&[0]));
    assert_eq!(k_r(&crash, 1), set(&[1]));
    assert_eq!(k_r(&crash, 0), ProcSet::EMPTY);
    let alternating = UpWord::new(vec![complete], vec![only_zero, only_one]).unwrap();
    assert_eq!(q_of(&alternating), set(&[0, 1]));
    let r11 = MessageAdversary::new(1, AdversarySpec::TResilient { t: 1 }).unwrap();
    assert!(r11.contains(None, &crash).unwrap());

    let words = enumerate_up_words(1, 2, 2).unwrap();
    assert_eq!(words.len(), 156);
    let families = [
        vec![],
        vec![set(&[0])],
        vec![set(&[1])],
        vec![set(&[0]), set(&[1])],
        vec![set(&[0, 1])],
    ];
    for family in families {
        let core = CoreCollection::closure(family);
        let h = MessageAdversary::new(1, AdversarySpec::CoreResilient { core: core.clone() }).unwrap();
        let restricted = |r| MessageAdversary::new(1, AdversarySpec::RestrictedCore { core: core.clone(), r }).unwrap();
        for w in &words {
            let mut previous = restricted(0).contains(None, w).unwrap();
            for r in 1..=3 {
                let current = restricted(r).contains(None, w).unwrap();
                assert!(!previous || current, "H_{} ⊄ H_{r} on {w:?}", r - 1);
                previous = current;
            }
            assert!(!previous || h.contains(None, w).unwrap());
        }
    }
}

fn main() {
    let criteria: [(&str, fn()); 10] = [
        ("instant-graph and Chr facet counts 3/13/75", criterion_1),
        ("zeta coordinates", criterion_2),
        ("geometrization of the n<b<g immediate-snapshot graph", criterion_3),
        ("exact subdivision volumes", criterion_4),
        ("U/Kin of the glued-triangles instance", criterion_5),
        ("decision suite n=2 t=1 binary values", criterion_6),
        ("maximality of C1 and C2", criterion_7),
        ("decide agrees with exhaustive search", criterion_8),
        ("radial retraction properties", criterion_9),
        ("adversary semantics and H_0 ⊆ H_r ⊆ H", criterion_10),
    ];
    panic::set_hook(Box::new(|info| eprintln!("  {info}")));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check);
        let status = if outcome.is_ok() { "PASS" } else { "FAIL" };
        if outcome.is_err() {
            failures += 1;
        }
        println!("criterion {:>2}: {status} {name} ({:.2?})", i + 1, start.elapsed());
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
