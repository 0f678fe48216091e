//! Shared fixtures for the benchmarks in `benches/`.

use topoadv::complex::{Value, ValueOrder};
use topoadv::task::make_kset;
use topoadv::{ColorlessTask, Condition};

/// Binary k-set agreement with its value order.
pub fn binary_kset(k: usize) -> (ColorlessTask, ValueOrder) {
    let values = [Value::from("0"), Value::from("1")];
    (make_kset(&values, k).expect("valid k"), ValueOrder::new(values).expect("distinct values"))
}

/// The named binary conditions on three processes with one crash.
pub fn binary_conditions() -> Vec<(&'static str, Condition)> {
    let (_, order) = binary_kset(1);
    vec![
        ("c1", Condition::c1(2, 1, 1, &order).expect("c1")),
        ("c2", Condition::c2(2, 1, 1, &order).expect("c2")),
        ("full", Condition::full(2, 1, &order).expect("full")),
    ]
}
