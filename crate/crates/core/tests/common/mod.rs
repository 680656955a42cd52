//! Independent reference implementations the library is checked against.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use forestjudge::{Grammar, Incidence, Value};
use rand::Rng;

/// Result of the rule-by-rule fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleClosure {
    pub candidates: BTreeSet<usize>,
    pub derived: BTreeMap<String, Value>,
    pub conflict: bool,
}

/// Applies the four propagation rules one at a time until nothing changes,
/// working on plain id sets rather than the library's bitsets.
///
/// 1. a property judged bad rules out every analysis it holds for;
/// 2. a property judged good rules out every analysis it does not hold for;
/// 3. a property holding only for ruled-out analyses is bad;
/// 4. a property holding for every analysis still in play is good.
///
/// Rules 1 and 2 also fire on values found by 3 and 4.
pub fn fixpoint(assertions: &BTreeMap<String, Value>, incidence: &Incidence) -> OracleClosure {
    let n = incidence.analysis_count();
    let holds: Vec<(String, BTreeSet<usize>)> =
        incidence.entries().map(|(p, h)| (p.key.clone(), (0..n).filter(|&a| h.contains(a)).collect())).collect();
    let mut labels: BTreeMap<String, Value> =
        assertions.iter().filter(|(k, _)| incidence.contains(k)).map(|(k, v)| (k.clone(), *v)).collect();
    let mut ruled_out: BTreeSet<usize> = BTreeSet::new();
    loop {
        let mut changed = false;
        for (key, set) in &holds {
            match labels.get(key) {
                Some(Value::Bad) => {
                    for &a in set {
                        changed |= ruled_out.insert(a);
                    }
                }
                Some(Value::Good) => {
                    for a in (0..n).filter(|a| !set.contains(a)) {
                        changed |= ruled_out.insert(a);
                    }
                }
                None => {}
            }
        }
        let alive: BTreeSet<usize> = (0..n).filter(|a| !ruled_out.contains(a)).collect();
        if alive.is_empty() {
            return OracleClosure { candidates: alive, derived: BTreeMap::new(), conflict: true };
        }
        for (key, set) in &holds {
            if labels.contains_key(key) {
                continue;
            }
            if set.iter().all(|a| ruled_out.contains(a)) {
                labels.insert(key.clone(), Value::Bad);
                changed = true;
            } else if alive.iter().all(|a| set.contains(a)) {
                labels.insert(key.clone(), Value::Good);
                changed = true;
            }
        }
        if !changed {
            let derived = labels.into_iter().filter(|(k, _)| !assertions.contains_key(k)).collect();
            return OracleClosure { candidates: alive, derived, conflict: false };
        }
    }
}

/// A random incidence with `n` analyses and up to `max_props` properties.
/// Holds-sets are drawn at random, so duplicates and universal or empty
/// properties all occur.
pub fn random_incidence(rng: &mut impl Rng, n: usize, max_props: usize) -> Incidence {
    use forestjudge::{AnalysisSet, Property, Span};
    let count = rng.gen_range(1..=max_props);
    let entries = (0..count)
        .map(|i| {
            let density = rng.gen_range(0.0..1.0);
            let ids: Vec<usize> = (0..n).filter(|_| rng.gen_bool(density)).collect();
            let kind = i % 3;
            let p = match kind {
                0 => Property::constituent("X", Span::new(i, i + 1 + i % 4).unwrap(), format!("phrase {i}")).unwrap(),
                1 => Property::constituent("Y", Span::new(i, i + 2).unwrap(), format!("other {i}")).unwrap(),
                _ => Property::new(forestjudge::PropertyContent::WordSense {
                    index: i,
                    word: format!("w{i}"),
                    sense: format!("w{i}.s"),
                    gloss: format!("gloss {i}"),
                })
                .unwrap(),
            };
            (p, AnalysisSet::from_ids(n, ids).unwrap())
        })
        .collect();
    Incidence::new(n, entries).unwrap()
}

/// A random assertion map over the incidence's keys.
pub fn random_assertions(rng: &mut impl Rng, incidence: &Incidence, max: usize) -> Vec<(String, Value)> {
    let keys: Vec<&str> = incidence.properties().iter().map(|p| p.key.as_str()).collect();
    let count = rng.gen_range(0..=max.min(keys.len()));
    (0..count)
        .map(|_| {
            let k = keys[rng.gen_range(0..keys.len())].to_string();
            let v = if rng.gen_bool(0.5) { Value::Good } else { Value::Bad };
            (k, v)
        })
        .collect()
}

/// Latest value per key.
pub fn latest(judgments: &[(String, Value)]) -> BTreeMap<String, Value> {
    judgments.iter().cloned().collect()
}

/// Every tree of `cat` over tokens `[i, j)` by plain top-down search, as
/// bracketings without words. `depth` bounds unary chains.
pub fn top_down(grammar: &Grammar, words: &[String], cat: &str, i: usize, j: usize, depth: usize) -> Vec<String> {
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    if j == i + 1 {
        if let Some(entries) = grammar.entries(&words[i]) {
            if entries.iter().any(|e| e.category == cat) {
                out.push(format!("({cat} {i})"));
            }
        }
    }
    for rule in grammar.rules().iter().filter(|r| r.parent == cat) {
        for parts in compositions(i, j, rule.children.len()) {
            let mut partial: Vec<String> = vec![String::new()];
            for (c, (a, b)) in rule.children.iter().zip(&parts) {
                let subs = top_down(grammar, words, c, *a, *b, depth - 1);
                partial = partial.iter().flat_map(|p| subs.iter().map(move |s| format!("{p} {s}"))).collect();
                if partial.is_empty() {
                    break;
                }
            }
            out.extend(partial.into_iter().map(|p| format!("({cat}/{}{p})", rule.name)));
        }
    }
    out
}

/// All ways to cut `[i, j)` into `k` non-empty consecutive pieces.
fn compositions(i: usize, j: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    if k == 0 {
        return if i == j { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for mid in i + 1..=j {
        for mut rest in compositions(mid, j, k - 1) {
            rest.insert(0, (i, mid));
            out.push(rest);
        }
    }
    out
}

/// Skeleton of a library tree in the same notation as `top_down`.
pub fn skeleton(node: &forestjudge::Node) -> String {
    if node.is_preterminal() {
        return format!("({} {})", node.category, node.span.start);
    }
    let kids: Vec<String> = node.children.iter().map(skeleton).collect();
    format!("({}/{} {})", node.category, node.rule.as_deref().unwrap_or("?"), kids.join(" "))
}
