//! JSON views returned by the service.

use serde::Serialize;

use forestjudge::{Property, Provenance, RecordStatus, SentenceRecord, Session, SessionState};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TokenView {
    pub index: usize,
    pub surface: String,
    pub pos: String,
    pub lemma: String,
}

/// One property with its current value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ItemView {
    pub key: String,
    pub kind: &'static str,
    pub display: String,
    /// `good`, `bad` or `undecided`.
    pub value: &'static str,
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeView {
    /// Analysis id as used by the engine.
    pub analysis: usize,
    /// Positions of the parses sharing this property set.
    pub members: Vec<usize>,
    pub possibly_good: bool,
    pub tree: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExpertView {
    pub non_discriminants: Vec<ItemView>,
    pub forest: Vec<TreeView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SentenceView {
    pub id: String,
    pub text: String,
    pub tokens: Vec<TokenView>,
    pub discriminants: Vec<ItemView>,
    /// Discriminants left out of `discriminants` because of their kind.
    pub hidden_count: usize,
    pub analyses: usize,
    pub possibly_good: usize,
    pub undecided: usize,
    pub state: SessionState,
    pub auto_conflict: bool,
    pub status: RecordStatus,
    pub failure_type: Option<String>,
    pub comment: Option<String>,
    /// Pass back as `seq` to make a write conditional on this state.
    pub last_sequence: u64,
    pub suggested: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expert: Option<ExpertView>,
}

fn item(session: &Session, p: &Property) -> ItemView {
    let (value, provenance) = match session.value_of(&p.key) {
        Some((v, by)) => (v.as_str(), Some(by)),
        None => ("undecided", None),
    };
    ItemView { key: p.key.clone(), kind: p.kind().as_str(), display: p.display.clone(), value, provenance }
}

impl SentenceView {
    pub fn build(record: &SentenceRecord, session: &Session, expert: bool) -> SentenceView {
        let inc = session.incidence();
        let shown = inc.displayed_discriminants(expert);
        let total = inc.discriminants().count();
        let status = session.status();
        let sentence = record.sentence();
        let expert = expert.then(|| ExpertView {
            non_discriminants: inc
                .properties()
                .iter()
                .filter(|p| !inc.is_discriminant(&p.key).unwrap_or(false))
                .map(|p| item(session, p))
                .collect(),
            forest: inc
                .groups()
                .iter()
                .enumerate()
                .map(|(id, members)| TreeView {
                    analysis: id,
                    members: members.clone(),
                    possibly_good: session.candidates().contains(id),
                    tree: record.analyses()[members[0]].tree.to_bracketed(sentence),
                })
                .collect(),
        });
        SentenceView {
            id: record.id().to_string(),
            text: sentence.text(),
            tokens: sentence
                .tokens
                .iter()
                .map(|t| TokenView {
                    index: t.index,
                    surface: t.surface.clone(),
                    pos: t.pos.clone(),
                    lemma: t.lemma.clone(),
                })
                .collect(),
            hidden_count: total - shown.len(),
            discriminants: shown.into_iter().map(|p| item(session, p)).collect(),
            analyses: inc.analysis_count(),
            possibly_good: status.possibly_good,
            undecided: status.undecided,
            state: status.state,
            auto_conflict: session.auto_conflict(),
            status: record.status(),
            failure_type: record.failure_type().map(str::to_string),
            comment: record.comment().map(str::to_string),
            last_sequence: record.last_sequence(),
            suggested: session.suggest_next().map(|p| p.key.clone()),
            expert,
        }
    }

    pub fn value_of(&self, key: &str) -> Option<&'static str> {
        self.discriminants.iter().find(|d| d.key == key).map(|d| d.value)
    }
}
