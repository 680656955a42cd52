use std::collections::HashMap;
use std::fmt;

use super::{ModelError, Property, PropertyKind};

/// A set of analysis ids over a fixed universe `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AnalysisSet {
    words: Vec<u64>,
    universe: usize,
}

impl AnalysisSet {
    pub fn empty(universe: usize) -> Self {
        AnalysisSet { words: vec![0; universe.div_ceil(64)], universe }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = AnalysisSet::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = usize>) -> Result<Self, ModelError> {
        let mut s = AnalysisSet::empty(universe);
        for id in ids {
            if id >= universe {
                return Err(ModelError::AnalysisOutOfRange { id, count: universe });
            }
            s.insert(id);
        }
        Ok(s)
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, id: usize) {
        assert!(id < self.universe, "analysis {id} outside universe {}", self.universe);
        self.words[id / 64] |= 1 << (id % 64);
    }

    pub fn remove(&mut self, id: usize) {
        if id < self.universe {
            self.words[id / 64] &= !(1 << (id % 64));
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        id < self.universe && self.words[id / 64] & (1 << (id % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &AnalysisSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersect_with(&mut self, other: &AnalysisSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn subtract(&mut self, other: &AnalysisSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection_len(&self, other: &AnalysisSet) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for AnalysisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The analysis × property incidence for one sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    analysis_count: usize,
    properties: Vec<Property>,
    holds: Vec<AnalysisSet>,
    index: HashMap<String, usize>,
    /// Source analyses collapsed into each incidence analysis.
    groups: Vec<Vec<usize>>,
}

impl Incidence {
    /// Builds an incidence from properties and their holds-sets. Properties are
    /// stored sorted by key; duplicate keys are rejected.
    pub fn new(analysis_count: usize, entries: Vec<(Property, AnalysisSet)>) -> Result<Incidence, ModelError> {
        let groups = (0..analysis_count).map(|i| vec![i]).collect();
        Incidence::with_groups(analysis_count, entries, groups)
    }

    pub(crate) fn with_groups(
        analysis_count: usize,
        mut entries: Vec<(Property, AnalysisSet)>,
        groups: Vec<Vec<usize>>,
    ) -> Result<Incidence, ModelError> {
        entries.sort_by(|a, b| a.0.key.cmp(&b.0.key));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (p, set)) in entries.iter().enumerate() {
            if set.universe() != analysis_count {
                return Err(ModelError::AnalysisOutOfRange { id: set.universe(), count: analysis_count });
            }
            if index.insert(p.key.clone(), i).is_some() {
                return Err(ModelError::DuplicateKey(p.key.clone()));
            }
        }
        let (properties, holds) = entries.into_iter().unzip();
        Ok(Incidence { analysis_count, properties, holds, index, groups })
    }

    pub fn analysis_count(&self) -> usize {
        self.analysis_count
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn position(&self, key: &str) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    pub fn property(&self, key: &str) -> Result<&Property, ModelError> {
        self.position(key).map(|i| &self.properties[i]).ok_or_else(|| ModelError::UnknownKey(key.to_string()))
    }

    pub fn holds(&self, key: &str) -> Result<&AnalysisSet, ModelError> {
        self.position(key).map(|i| &self.holds[i]).ok_or_else(|| ModelError::UnknownKey(key.to_string()))
    }

    pub fn holds_at(&self, position: usize) -> &AnalysisSet {
        &self.holds[position]
    }

    /// Property/holds-set pairs in key order.
    pub fn entries(&self) -> impl Iterator<Item = (&Property, &AnalysisSet)> {
        self.properties.iter().zip(&self.holds)
    }

    /// Original analysis indices merged into each incidence analysis.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn multiplicity(&self, analysis: usize) -> usize {
        self.groups.get(analysis).map_or(0, Vec::len)
    }

    pub fn is_discriminant(&self, key: &str) -> Result<bool, ModelError> {
        Ok(self.is_discriminant_at(self.position(key).ok_or_else(|| ModelError::UnknownKey(key.into()))?))
    }

    pub(crate) fn is_discriminant_at(&self, position: usize) -> bool {
        let n = self.holds[position].len();
        n > 0 && n < self.analysis_count
    }

    pub fn discriminants(&self) -> impl Iterator<Item = &Property> {
        self.properties.iter().enumerate().filter(|(i, _)| self.is_discriminant_at(*i)).map(|(_, p)| p)
    }

    /// Discriminants in display order: friendliness, then wider spans first,
    /// then key. Hidden kinds are included only in expert mode.
    pub fn displayed_discriminants(&self, expert: bool) -> Vec<&Property> {
        let mut out: Vec<&Property> = self.discriminants().filter(|p| expert || p.kind().is_displayed()).collect();
        sort_for_display(&mut out);
        out
    }

    pub fn kind_count(&self, kind: PropertyKind) -> usize {
        self.properties.iter().filter(|p| p.kind() == kind).count()
    }
}

pub fn sort_for_display(props: &mut [&Property]) {
    props.sort_by(|a, b| {
        a.friendliness()
            .cmp(&b.friendliness())
            .then_with(|| {
                let wa = a.span().map_or(0, |s| s.width());
                let wb = b.span().map_or(0, |s| s.width());
                wb.cmp(&wa)
            })
            .then_with(|| a.key.cmp(&b.key))
    });
}

/// True iff the property holds for some but not all analyses.
pub fn is_discriminant(incidence: &Incidence, key: &str) -> Result<bool, ModelError> {
    incidence.is_discriminant(key)
}
