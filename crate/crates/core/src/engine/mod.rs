//! The judging engine: user judgments, the propagation closure, automatic
//! resolution from corpus priors, and next-judgment suggestions.

mod priors;
mod propagate;
mod session;

pub use priors::{PriorCounts, PriorTable};
pub use propagate::{propagate, Closure, SessionState};
pub use session::{Assertion, Session, Status};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("a session needs at least one analysis")]
    NoAnalyses,
    #[error("unknown property key {0:?}")]
    UnknownKey(String),
    #[error("derived values cannot be asserted ({0})")]
    DerivedAssertion(String),
    #[error("invalid auto-resolution config: {0}")]
    InvalidConfig(String),
    #[error("prior table line {line}: expected key, good and bad counts")]
    PriorSyntax { line: usize },
}

/// Thresholds for automatic resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoConfig {
    pub min_support: u64,
    pub min_agreement: f64,
}

impl AutoConfig {
    pub fn new(min_support: u64, min_agreement: f64) -> Result<AutoConfig, EngineError> {
        if min_support < 1 {
            return Err(EngineError::InvalidConfig("min_support must be at least 1".into()));
        }
        if !(min_agreement > 0.5 && min_agreement <= 1.0) {
            return Err(EngineError::InvalidConfig(format!("min_agreement {min_agreement} must lie in (0.5, 1]")));
        }
        Ok(AutoConfig { min_support, min_agreement })
    }
}

impl Default for AutoConfig {
    fn default() -> Self {
        AutoConfig { min_support: 10, min_agreement: 0.99 }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::extract::ClassMap;
    use crate::model::{AnalysisSet, Incidence, Property, Provenance, Span, Value};

    /// Six analyses shaped like the flights-to-Boston sentence: three
    /// structures crossed with two senses of "serve".
    fn boston() -> Arc<Incidence> {
        let p = |cat: &str, s: usize, e: usize, ids: &[usize]| {
            (
                Property::constituent(cat, Span::new(s, e).unwrap(), cat).unwrap(),
                AnalysisSet::from_ids(6, ids.iter().copied()).unwrap(),
            )
        };
        Arc::new(
            Incidence::new(
                6,
                vec![
                    p("NP", 2, 9, &[0, 1]),
                    p("ADVP", 6, 9, &[2, 3, 4, 5]),
                    p("NPB", 2, 6, &[0, 1, 2, 3]),
                    p("PPV", 4, 6, &[4, 5]),
                    p("SP", 6, 7, &[0, 2, 4]),
                    p("SF", 6, 7, &[1, 3, 5]),
                    p("VP", 6, 9, &[0, 1, 2, 3, 4, 5]),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn fresh_session() {
        let s = Session::new(boston()).unwrap();
        assert_eq!(s.candidates().len(), 6);
        assert_eq!(s.status(), Status { possibly_good: 6, undecided: 6, state: SessionState::Consistent });
        assert_eq!(s.derived().get("c:VP:6-9"), Some(&Value::Good));
        let empty = Incidence::new(0, vec![]).unwrap();
        assert_eq!(Session::new(Arc::new(empty)), Err(EngineError::NoAnalyses));
    }

    #[test]
    fn narrowing_to_one() {
        let s = Session::new(boston()).unwrap().judge("c:NP:2-9", Value::Good).unwrap();
        assert_eq!(s.status().possibly_good, 2);
        assert_eq!(s.status().undecided, 2);
        assert_eq!(s.derived().get("c:ADVP:6-9"), Some(&Value::Bad));
        assert_eq!(s.derived().get("c:NPB:2-6"), Some(&Value::Good));
        let s = s.judge("c:SP:6-7", Value::Good).unwrap();
        assert_eq!(s.candidates().iter().collect::<Vec<_>>(), [0]);
        assert_eq!(s.value_of("c:SF:6-7"), Some((Value::Bad, Provenance::Derived)));
        assert_eq!(s.status().undecided, 0);
        assert!(s.suggest_next().is_none());
    }

    #[test]
    fn conflict_and_reset() {
        let s = Session::new(boston())
            .unwrap()
            .judge("c:NP:2-9", Value::Good)
            .unwrap()
            .judge("c:ADVP:6-9", Value::Good)
            .unwrap();
        assert_eq!(s.state(), SessionState::Conflict);
        assert!(s.derived().is_empty());
        assert_eq!(s.status().possibly_good, 0);
        let r = s.reset();
        assert_eq!(r, Session::new(boston()).unwrap());
        assert_eq!(r.reset(), r);
    }

    #[test]
    fn supersession() {
        let fresh = Session::new(boston()).unwrap();
        let flip = fresh.judge("c:ADVP:6-9", Value::Good).unwrap().judge("c:ADVP:6-9", Value::Bad).unwrap();
        assert_eq!(flip, fresh.judge("c:ADVP:6-9", Value::Bad).unwrap());
        assert!(matches!(fresh.judge("c:nope", Value::Good), Err(EngineError::UnknownKey(_))));
    }

    #[test]
    fn universal_property_judged_bad_conflicts() {
        let s = Session::new(boston()).unwrap().judge("c:VP:6-9", Value::Bad).unwrap();
        assert_eq!(s.state(), SessionState::Conflict);
    }

    #[test]
    fn suggestion_prefers_balanced_split() {
        let s = Session::new(boston()).unwrap();
        // sense properties split 3/3, everything else is 2/4
        assert_eq!(s.suggest_next().unwrap().key, "c:SF:6-7");
    }

    #[test]
    fn auto_resolution_thresholds() {
        let fresh = Session::new(boston()).unwrap();
        let classes = ClassMap::new();
        let mut priors = PriorTable::new();
        priors.set("c:PPV:ppv", 0, 40);
        let s = fresh.auto_resolve(&priors, &classes, &AutoConfig::default());
        assert_eq!(s.value_of("c:PPV:4-6"), Some((Value::Bad, Provenance::Auto)));
        assert_eq!(s.candidates().len(), 4);

        let mut tie = PriorTable::new();
        tie.set("c:PPV:ppv", 5, 5);
        assert!(fresh.auto_resolve(&tie, &classes, &AutoConfig::new(1, 0.51).unwrap()).auto_assertions().is_empty());

        // the user overrides the automatic value
        let over = s.judge("c:PPV:4-6", Value::Good).unwrap();
        assert_eq!(over.value_of("c:PPV:4-6"), Some((Value::Good, Provenance::User)));
        assert_eq!(over.candidates().len(), 2);

        // reset keeps automatic assertions
        assert_eq!(over.reset().value_of("c:PPV:4-6"), Some((Value::Bad, Provenance::Auto)));
    }

    #[test]
    fn conflicting_auto_assertions_are_dropped() {
        let mut priors = PriorTable::new();
        priors.set("c:NP:np", 40, 0);
        priors.set("c:ADVP:advp", 40, 0);
        let s = Session::new(boston()).unwrap().auto_resolve(&priors, &ClassMap::new(), &AutoConfig::default());
        assert!(s.auto_conflict());
        assert!(s.auto_assertions().is_empty());
        assert_eq!(s.state(), SessionState::Consistent);
        assert_eq!(s.candidates().len(), 6);
    }

    #[test]
    fn config_validation() {
        assert!(AutoConfig::new(0, 0.9).is_err());
        assert!(AutoConfig::new(1, 0.5).is_err());
        assert!(AutoConfig::new(1, 1.01).is_err());
        assert!(AutoConfig::new(1, 1.0).is_ok());
    }

    #[test]
    fn empty_assertions_label_universal_properties_only() {
        let inc = boston();
        let c = propagate(&BTreeMap::new(), &inc);
        assert_eq!(c.candidates.len(), 6);
        assert_eq!(c.derived.len(), 1);
        assert_eq!(c.derived.get("c:VP:6-9"), Some(&Value::Good));
    }
}
