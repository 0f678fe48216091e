//! Parsers for the compact command-line forms of graphs, words, tasks,
//! conditions and adversaries. Any argument starting with `@` names a JSON
//! file instead.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use topoadv::adversary::{AdversarySpec, CoreCollection};
use topoadv::complex::{Simplex, Value, ValueOrder};
use topoadv::rational::parse_rational;
use topoadv::task::make_kset;
use topoadv::{BaryPoint, ColorlessTask, Condition, InstantGraph, ProcSet, UpWord};

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn file_arg(arg: &str) -> Option<&Path> {
    arg.strip_prefix('@').map(Path::new)
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn values(list: &str) -> Result<Vec<Value>, CliError> {
    let values: Vec<Value> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Value::from).collect();
    if values.is_empty() {
        return Err(usage("empty value list"));
    }
    Ok(values)
}

fn proc_set(block: &str) -> Result<ProcSet, CliError> {
    block
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| usage(format!("bad process id {p:?}"))))
        .collect()
}

/// `2|0|1`: an ordered partition, earliest block first.
pub fn graph(text: &str) -> Result<InstantGraph, CliError> {
    let blocks = text.split('|').map(proc_set).collect::<Result<Vec<_>, _>>()?;
    InstantGraph::from_ordered_partition(&blocks).map_err(usage)
}

/// Letters separated by `;`.
pub fn letters(text: &str) -> Result<Vec<InstantGraph>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';').map(graph).collect()
}

/// `head/cycle` with letters separated by `;`, or just a cycle, or `@file`.
pub fn word(text: &str) -> Result<UpWord, CliError> {
    if let Some(path) = file_arg(text) {
        return read_json(path);
    }
    let (head, cycle) = text.split_once('/').unwrap_or(("", text));
    UpWord::new(letters(head)?, letters(cycle)?).map_err(usage)
}

/// Letters of a finite prefix, or `@file` holding a JSON list of graphs.
pub fn prefix(text: &str) -> Result<Vec<InstantGraph>, CliError> {
    match file_arg(text) {
        Some(path) => read_json(path),
        None => letters(text),
    }
}

pub fn point(text: &str) -> Result<BaryPoint, CliError> {
    let weights = text.split(',').map(|w| parse_rational(w.trim())).collect::<Result<Vec<_>, _>>().map_err(usage)?;
    BaryPoint::new(weights).map_err(usage)
}

pub fn simplex(text: &str) -> Result<Simplex, CliError> {
    let ids = text
        .split(',')
        .map(|v| v.trim().parse::<u32>().map_err(|_| usage(format!("bad vertex id {v:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Simplex::from_ids(ids))
}

/// `kset:0,1:k=1` or `@task.json`.
pub fn task(text: &str) -> Result<ColorlessTask, CliError> {
    if let Some(path) = file_arg(text) {
        return read_json(path);
    }
    let malformed = || usage(format!("task {text:?} is not of the form kset:VALUES:k=K"));
    let mut parts = text.splitn(3, ':');
    if parts.next() != Some("kset") {
        return Err(malformed());
    }
    let list = parts.next().ok_or_else(malformed)?;
    let k = parts
        .next()
        .and_then(|s| s.strip_prefix("k="))
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(malformed)?;
    make_kset(&values(list)?, k).map_err(usage)
}

pub struct ConditionParams<'a> {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub values: &'a ValueOrder,
}

/// `c1`, `c2`, `full`, `empty`, or `@condition.json`.
pub fn condition(text: &str, params: &ConditionParams) -> Result<Condition, CliError> {
    if let Some(path) = file_arg(text) {
        return read_json(path);
    }
    let ConditionParams { n, t, k, values } = *params;
    match text {
        "c1" => Condition::c1(n, t, k, values),
        "c2" => Condition::c2(n, t, k, values),
        "full" => Condition::full(n, t, values),
        "empty" => Condition::empty(n, t, values),
        other => return Err(usage(format!("unknown condition {other:?}; use c1, c2, full, empty or @FILE"))),
    }
    .map_err(usage)
}

/// `iis`, `t=T`, `t=T;r=R`, `core=0|1,2` (maximal crash sets, optionally with
/// `;r=R`), or `@file`.
pub fn adversary(text: &str) -> Result<AdversarySpec, CliError> {
    if let Some(path) = file_arg(text) {
        return read_json(path);
    }
    if text == "iis" {
        return Ok(AdversarySpec::Iis);
    }
    let mut t = None;
    let mut r = None;
    let mut core = None;
    for part in text.split(';') {
        let (key, value) = part.split_once('=').ok_or_else(|| usage(format!("bad adversary part {part:?}")))?;
        let number = || value.parse::<usize>().map_err(|_| usage(format!("bad number {value:?}")));
        match key {
            "t" => t = Some(number()?),
            "r" => r = Some(number()?),
            "core" => {
                let sets = value.split('|').filter(|s| !s.is_empty()).map(proc_set).collect::<Result<Vec<_>, _>>()?;
                core = Some(CoreCollection::closure(sets));
            }
            other => return Err(usage(format!("unknown adversary key {other:?}"))),
        }
    }
    match (t, core, r) {
        (Some(t), None, None) => Ok(AdversarySpec::TResilient { t }),
        (Some(t), None, Some(r)) => Ok(AdversarySpec::RestrictedTResilient { t, r }),
        (None, Some(core), None) => Ok(AdversarySpec::CoreResilient { core }),
        (None, Some(core), Some(r)) => Ok(AdversarySpec::RestrictedCore { core, r }),
        _ => Err(usage(format!("adversary {text:?} needs exactly one of t= or core="))),
    }
}
