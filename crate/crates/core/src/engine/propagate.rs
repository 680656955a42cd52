use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{AnalysisSet, Incidence, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Consistent,
    Conflict,
}

/// Result of closing a set of assertions under the propagation rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    /// Analyses that may still be the good one.
    pub candidates: AnalysisSet,
    /// Values forced on properties that were not asserted.
    pub derived: BTreeMap<String, Value>,
    pub state: SessionState,
}

/// Computes the fixpoint of the four propagation rules in closed form.
///
/// Rules 1 and 2 prune: an analysis survives iff it holds every property
/// asserted good and none asserted bad. Rules 3 and 4 label: an unasserted
/// property is good iff it holds for every survivor and bad iff it holds for
/// none. A labelled property is uniform over the survivors, so it cannot prune
/// further and one pass reaches the fixpoint. With no survivors the
/// assertions contradict each other and nothing is derived.
///
/// Keys absent from the incidence are ignored.
pub fn propagate(assertions: &BTreeMap<String, Value>, incidence: &Incidence) -> Closure {
    let n = incidence.analysis_count();
    let mut candidates = AnalysisSet::full(n);
    for (key, value) in assertions {
        let Some(pos) = incidence.position(key) else {
            continue;
        };
        let holds = incidence.holds_at(pos);
        match value {
            Value::Good => candidates.intersect_with(holds),
            Value::Bad => candidates.subtract(holds),
        }
    }
    if candidates.is_empty() {
        return Closure { candidates, derived: BTreeMap::new(), state: SessionState::Conflict };
    }
    let size = candidates.len();
    let mut derived = BTreeMap::new();
    for (property, holds) in incidence.entries() {
        if assertions.contains_key(&property.key) {
            continue;
        }
        let overlap = candidates.intersection_len(holds);
        if overlap == size {
            derived.insert(property.key.clone(), Value::Good);
        } else if overlap == 0 {
            derived.insert(property.key.clone(), Value::Bad);
        }
    }
    Closure { candidates, derived, state: SessionState::Consistent }
}
