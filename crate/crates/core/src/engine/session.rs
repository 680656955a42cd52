use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::extract::{abstract_property, ClassMap};
use crate::model::{AnalysisSet, Incidence, Property, Provenance, Value};

use super::{propagate, AutoConfig, Closure, EngineError, PriorTable, SessionState};

/// A user-level assertion and where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Assertion {
    pub value: Value,
    pub provenance: Provenance,
}

/// Counts shown in the control panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Status {
    pub possibly_good: usize,
    pub undecided: usize,
    pub state: SessionState,
}

/// The judging state of one sentence. Sessions are immutable values: every
/// operation returns a new session with the closure recomputed from scratch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    incidence: Arc<Incidence>,
    user: BTreeMap<String, Assertion>,
    auto: BTreeMap<String, Value>,
    auto_mode: bool,
    auto_conflict: bool,
    closure: Closure,
}

impl Session {
    pub fn new(incidence: Arc<Incidence>) -> Result<Session, EngineError> {
        if incidence.analysis_count() == 0 {
            return Err(EngineError::NoAnalyses);
        }
        Ok(Session::build(incidence, BTreeMap::new(), BTreeMap::new(), false, false))
    }

    /// A session with the given assertions already in place. Auto mode is on
    /// iff there are automatic assertions.
    pub fn with_assertions(
        incidence: Arc<Incidence>,
        user: BTreeMap<String, Assertion>,
        auto: BTreeMap<String, Value>,
    ) -> Result<Session, EngineError> {
        if incidence.analysis_count() == 0 {
            return Err(EngineError::NoAnalyses);
        }
        if let Some(k) = user.keys().chain(auto.keys()).find(|k| !incidence.contains(k)) {
            return Err(EngineError::UnknownKey(k.clone()));
        }
        if let Some((k, _)) = user.iter().find(|(_, a)| !a.provenance.is_user_level()) {
            return Err(EngineError::DerivedAssertion(k.clone()));
        }
        let auto_mode = !auto.is_empty();
        Ok(Session::build(incidence, user, auto, auto_mode, false))
    }

    fn build(
        incidence: Arc<Incidence>,
        user: BTreeMap<String, Assertion>,
        auto: BTreeMap<String, Value>,
        auto_mode: bool,
        auto_conflict: bool,
    ) -> Session {
        let mut effective = auto.clone();
        effective.extend(user.iter().map(|(k, a)| (k.clone(), a.value)));
        let closure = propagate(&effective, &incidence);
        Session { incidence, user, auto, auto_mode, auto_conflict, closure }
    }

    pub fn incidence(&self) -> &Arc<Incidence> {
        &self.incidence
    }

    pub fn user_assertions(&self) -> &BTreeMap<String, Assertion> {
        &self.user
    }

    pub fn auto_assertions(&self) -> &BTreeMap<String, Value> {
        &self.auto
    }

    pub fn derived(&self) -> &BTreeMap<String, Value> {
        &self.closure.derived
    }

    pub fn candidates(&self) -> &AnalysisSet {
        &self.closure.candidates
    }

    pub fn state(&self) -> SessionState {
        self.closure.state
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn auto_mode(&self) -> bool {
        self.auto_mode
    }

    /// Set when automatic assertions were dropped because they conflicted.
    pub fn auto_conflict(&self) -> bool {
        self.auto_conflict
    }

    /// Automatic assertions overlaid by user-level ones.
    pub fn effective_assertions(&self) -> BTreeMap<String, Value> {
        let mut out = self.auto.clone();
        out.extend(self.user.iter().map(|(k, a)| (k.clone(), a.value)));
        out
    }

    /// Current value of a property: user-level first, then automatic, then derived.
    pub fn value_of(&self, key: &str) -> Option<(Value, Provenance)> {
        if let Some(a) = self.user.get(key) {
            return Some((a.value, a.provenance));
        }
        if let Some(v) = self.auto.get(key) {
            return Some((*v, Provenance::Auto));
        }
        self.closure.derived.get(key).map(|v| (*v, Provenance::Derived))
    }

    pub fn judge(&self, key: &str, value: Value) -> Result<Session, EngineError> {
        self.judge_as(key, value, Provenance::User)
    }

    /// Records an assertion, replacing any earlier one on the same key at the
    /// same level, then recomputes the closure.
    pub fn judge_as(&self, key: &str, value: Value, provenance: Provenance) -> Result<Session, EngineError> {
        if !self.incidence.contains(key) {
            return Err(EngineError::UnknownKey(key.to_string()));
        }
        let mut user = self.user.clone();
        let mut auto = self.auto.clone();
        match provenance {
            Provenance::User | Provenance::PosPropagated => {
                user.insert(key.to_string(), Assertion { value, provenance });
            }
            Provenance::Auto => {
                auto.insert(key.to_string(), value);
            }
            Provenance::Derived => return Err(EngineError::DerivedAssertion(key.to_string())),
        }
        let auto_mode = self.auto_mode || provenance == Provenance::Auto;
        Ok(Session::build(self.incidence.clone(), user, auto, auto_mode, self.auto_conflict))
    }

    /// Drops every user-level assertion. Automatic assertions survive when
    /// auto mode is on.
    pub fn reset(&self) -> Session {
        let auto = if self.auto_mode { self.auto.clone() } else { BTreeMap::new() };
        Session::build(self.incidence.clone(), BTreeMap::new(), auto, self.auto_mode, self.auto_conflict)
    }

    pub fn status(&self) -> Status {
        let undecided = self
            .incidence
            .displayed_discriminants(false)
            .into_iter()
            .filter(|p| self.value_of(&p.key).is_none())
            .count();
        Status { possibly_good: self.closure.candidates.len(), undecided, state: self.closure.state }
    }

    /// The undecided displayed discriminant whose answer, either way, leaves
    /// the fewest candidates. Ties go to the friendlier kind, then the key.
    pub fn suggest_next(&self) -> Option<&Property> {
        if self.closure.state == SessionState::Conflict || self.closure.candidates.len() <= 1 {
            return None;
        }
        let size = self.closure.candidates.len();
        self.incidence
            .displayed_discriminants(false)
            .into_iter()
            .filter(|p| self.value_of(&p.key).is_none())
            .min_by_key(|p| {
                let holds = self.incidence.holds(&p.key).expect("displayed key exists");
                let inside = self.closure.candidates.intersection_len(holds);
                (inside.max(size - inside), p.friendliness(), p.key.clone())
            })
    }

    /// Pre-judges discriminants whose pooled history is lopsided enough.
    ///
    /// Replaces any previous automatic assertions. When they contradict each
    /// other or the user's judgments, all of them are dropped and the session
    /// is flagged.
    pub fn auto_resolve(&self, priors: &PriorTable, classes: &ClassMap, config: &AutoConfig) -> Session {
        let mut auto = BTreeMap::new();
        for p in self.incidence.discriminants() {
            let generic = abstract_property(p, classes).generic_key();
            let Some(counts) = priors.get(&generic) else { continue };
            if counts.support() < config.min_support || counts.agreement() < config.min_agreement {
                continue;
            }
            if let Some(v) = counts.majority() {
                auto.insert(p.key.clone(), v);
            }
        }
        let had_auto = !auto.is_empty();
        let session = Session::build(self.incidence.clone(), self.user.clone(), auto, true, false);
        if session.state() == SessionState::Conflict && had_auto {
            return Session::build(self.incidence.clone(), self.user.clone(), BTreeMap::new(), true, true);
        }
        session
    }
}
