//! Property extraction: from an analysis to its property list, and from a
//! set of analyses to their incidence.

mod classes;
mod heads;

pub use classes::ClassMap;
pub use heads::HeadTable;

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::model::{
    Analysis, AnalysisSet, Incidence, ModelError, Node, Property, PropertyContent, Sentence, Triple, TripleEnd,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("no head entry for rule {0}")]
    MissingHead(String),
    #[error("head {head} of rule {rule} out of range for {children} children")]
    HeadOutOfRange { rule: String, head: usize, children: usize },
    #[error("no analyses to build an incidence from")]
    NoAnalyses,
    #[error("class map line {line}: {message}")]
    ClassMapSyntax { line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

struct Extractor<'a> {
    analysis: &'a Analysis,
    sentence: &'a Sentence,
    heads: &'a HeadTable,
}

impl Extractor<'_> {
    fn lexical_head(&self, node: &Node) -> Result<usize, ExtractError> {
        let mut n = node;
        while !n.is_preterminal() {
            n = &n.children[self.heads.head_of(n)?];
        }
        Ok(n.span.start)
    }

    fn end(&self, index: usize) -> TripleEnd {
        TripleEnd::new(index, self.sentence.tokens[index].lemma.clone(), self.analysis.sense_of(self.sentence, index))
    }

    /// The preposition token heading `node`, if it is a prepositional phrase.
    fn preposition_of(&self, node: &Node) -> Result<Option<usize>, ExtractError> {
        if node.is_preterminal() {
            return Ok(None);
        }
        let head = &node.children[self.heads.head_of(node)?];
        if head.is_preterminal() && self.sentence.tokens[head.span.start].is_preposition() {
            Ok(Some(head.span.start))
        } else {
            Ok(None)
        }
    }

    /// Low iff `head` is the rightmost attachment site left of `start`.
    fn is_low(&self, head: usize, start: usize) -> bool {
        let nearest = self.sentence.tokens[..start].iter().rposition(|t| t.is_attachment_site());
        nearest == Some(head)
    }

    fn triple(&self, head: usize, relation: &str, low: bool, dependent: usize) -> Triple {
        Triple { head: self.end(head), relation: relation.to_string(), low, dependent: self.end(dependent) }
    }

    fn triples(&self, node: &Node, out: &mut Vec<Property>) -> Result<(), ExtractError> {
        let h = self.heads.head_of(node)?;
        let head_tok = self.lexical_head(&node.children[h])?;
        let is_pp = self.preposition_of(node)?.is_some();
        let conj =
            node.children.iter().find(|c| c.is_preterminal() && self.sentence.tokens[c.span.start].is_conjunction());
        for (i, child) in node.children.iter().enumerate() {
            if i == h {
                continue;
            }
            if child.is_preterminal() && self.sentence.tokens[child.span.start].is_function_word() {
                continue;
            }
            if let Some(c) = conj {
                let relation = &self.sentence.tokens[c.span.start].lemma;
                let dep = self.lexical_head(child)?;
                let low = self.is_low(head_tok, child.span.start);
                out.push(Property::new(PropertyContent::SemanticTriple(self.triple(head_tok, relation, low, dep)))?);
            } else if let Some(prep) = self.preposition_of(child)? {
                let ph = self.heads.head_of(child)?;
                let object = child.children.iter().enumerate().find(|(j, _)| *j != ph);
                if let Some((_, object)) = object {
                    let dep = self.lexical_head(object)?;
                    let relation = &self.sentence.tokens[prep].lemma;
                    let low = self.is_low(head_tok, child.span.start);
                    out.push(Property::new(PropertyContent::SemanticTriple(
                        self.triple(head_tok, relation, low, dep),
                    ))?);
                }
            } else if !is_pp {
                let dep = self.lexical_head(child)?;
                let label = child.category.to_lowercase();
                let low = self.is_low(head_tok, child.span.start);
                out.push(Property::new(PropertyContent::ArgTriple(self.triple(head_tok, &label, low, dep)))?);
            }
        }
        Ok(())
    }
}

/// Extracts every property of one analysis, in a fixed order: constituents
/// (preorder), triples, word senses, sentence type, rule names.
pub fn extract_properties(
    analysis: &Analysis,
    sentence: &Sentence,
    heads: &HeadTable,
) -> Result<Vec<Property>, ExtractError> {
    analysis.validate(sentence)?;
    let ex = Extractor { analysis, sentence, heads };
    let internal = analysis.tree.internal_nodes();
    let mut out = Vec::new();

    for node in &internal {
        out.push(Property::constituent(node.category.clone(), node.span, sentence.surfaces(node.span))?);
    }
    for node in &internal {
        ex.triples(node, &mut out)?;
    }
    for (&index, tag) in &analysis.senses {
        out.push(Property::new(PropertyContent::WordSense {
            index,
            word: sentence.tokens[index].lemma.clone(),
            sense: tag.label.clone(),
            gloss: tag.gloss.clone(),
        })?);
    }
    out.push(Property::new(PropertyContent::SentenceType(analysis.sentence_type))?);
    let mut seen = HashSet::new();
    for node in &internal {
        if let Some(rule) = &node.rule {
            if seen.insert(rule.as_str()) {
                out.push(Property::new(PropertyContent::RuleName(rule.clone()))?);
            }
        }
    }
    Ok(out)
}

/// Unions the property sets of all analyses into an incidence. Analyses with
/// identical property sets are collapsed into one, keeping the first as the
/// representative; `Incidence::groups` records the members.
pub fn build_incidence(
    analyses: &[Analysis],
    sentence: &Sentence,
    heads: &HeadTable,
) -> Result<Incidence, ExtractError> {
    if analyses.is_empty() {
        return Err(ExtractError::NoAnalyses);
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut signatures: Vec<Vec<String>> = Vec::new();
    let mut per_group: Vec<Vec<Property>> = Vec::new();
    for (i, a) in analyses.iter().enumerate() {
        let props = extract_properties(a, sentence, heads)?;
        let mut sig: Vec<String> = props.iter().map(|p| p.key.clone()).collect();
        sig.sort();
        sig.dedup();
        match signatures.iter().position(|s| *s == sig) {
            Some(g) => groups[g].push(i),
            None => {
                signatures.push(sig);
                groups.push(vec![i]);
                per_group.push(props);
            }
        }
    }
    let n = groups.len();
    let mut table: BTreeMap<String, (Property, AnalysisSet)> = BTreeMap::new();
    for (g, props) in per_group.into_iter().enumerate() {
        for p in props {
            table.entry(p.key.clone()).or_insert_with(|| (p, AnalysisSet::empty(n))).1.insert(g);
        }
    }
    Ok(Incidence::with_groups(n, table.into_values().collect(), groups)?)
}

/// Replaces the words of a triple by their semantic classes. Other kinds are
/// returned unchanged. Idempotent: the sense used for lookup is kept.
pub fn abstract_property(property: &Property, classes: &ClassMap) -> Property {
    let abstract_end = |e: &TripleEnd| TripleEnd {
        index: e.index,
        word: classes.get(&e.sense).or_else(|| classes.get(&e.word)).unwrap_or(&e.word).to_string(),
        sense: e.sense.clone(),
    };
    let content = match &property.content {
        PropertyContent::SemanticTriple(t) => PropertyContent::SemanticTriple(Triple {
            head: abstract_end(&t.head),
            dependent: abstract_end(&t.dependent),
            ..t.clone()
        }),
        PropertyContent::ArgTriple(t) => PropertyContent::ArgTriple(Triple {
            head: abstract_end(&t.head),
            dependent: abstract_end(&t.dependent),
            ..t.clone()
        }),
        _ => return property.clone(),
    };
    Property::new(content).expect("abstraction preserves completeness")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PropertyKind, SentenceType, Token};

    fn sentence() -> Sentence {
        let toks = [("show", "v"), ("me", "pron"), ("flights", "n"), ("to", "p"), ("Boston", "name")];
        let lemmas = ["show", "me", "flight", "to", "Boston"];
        Sentence::new(
            "s",
            toks.iter().zip(lemmas).enumerate().map(|(i, ((w, p), l))| Token::new(i, *w, *p, l)).collect(),
        )
        .unwrap()
    }

    fn pp() -> Node {
        Node::branch("PP", Some("pp".into()), Some(0), vec![Node::leaf("P", 3), Node::leaf("Name", 4)]).unwrap()
    }

    fn low_reading() -> Analysis {
        let np = Node::branch("NP", Some("np_pp".into()), Some(0), vec![Node::leaf("N", 2), pp()]).unwrap();
        let vp = Node::branch("VP", Some("vp".into()), Some(0), vec![Node::leaf("V", 0), Node::leaf("Pron", 1), np])
            .unwrap();
        Analysis::new(vp, BTreeMap::new(), SentenceType::Imperative)
    }

    fn high_reading() -> Analysis {
        let vp = Node::branch(
            "VP",
            Some("vp_pp".into()),
            Some(0),
            vec![Node::leaf("V", 0), Node::leaf("Pron", 1), Node::leaf("N", 2), pp()],
        )
        .unwrap();
        Analysis::new(vp, BTreeMap::new(), SentenceType::Imperative)
    }

    #[test]
    fn attachment_triples_carry_low_flag() {
        let s = sentence();
        let heads = HeadTable::new();
        let low = extract_properties(&low_reading(), &s, &heads).unwrap();
        let high = extract_properties(&high_reading(), &s, &heads).unwrap();
        let shown = |ps: &[Property]| -> Vec<String> {
            ps.iter().filter(|p| p.kind() == PropertyKind::SemanticTriple).map(|p| p.display.clone()).collect()
        };
        assert_eq!(shown(&low), ["flight to Boston"]);
        assert_eq!(shown(&high), ["show -to Boston"]);
    }

    #[test]
    fn one_constituent_per_internal_node() {
        let s = sentence();
        let a = low_reading();
        let props = extract_properties(&a, &s, &HeadTable::new()).unwrap();
        let n = props.iter().filter(|p| p.kind() == PropertyKind::Constituent).count();
        assert_eq!(n, a.tree.internal_nodes().len());
        assert_eq!(props.iter().filter(|p| p.kind() == PropertyKind::SentenceType).count(), 1);
    }

    #[test]
    fn missing_head_names_rule() {
        let s = sentence();
        let np = Node::branch("XP", Some("xp_odd".into()), None, vec![Node::leaf("N", 2), pp()]).unwrap();
        let vp = Node::branch("VP", None, None, vec![Node::leaf("V", 0), Node::leaf("Pron", 1), np]).unwrap();
        let a = Analysis::new(vp, BTreeMap::new(), SentenceType::Imperative);
        let err = extract_properties(&a, &s, &HeadTable::new()).unwrap_err();
        assert!(err.to_string().contains("xp_odd"), "{err}");
    }

    #[test]
    fn duplicate_analyses_collapse() {
        let s = sentence();
        let inc = build_incidence(&[low_reading(), high_reading(), low_reading()], &s, &HeadTable::new()).unwrap();
        assert_eq!(inc.analysis_count(), 2);
        assert_eq!(inc.groups(), &[vec![0, 2], vec![1]]);
        assert!(build_incidence(&[], &s, &HeadTable::new()).is_err());
    }

    #[test]
    fn abstraction_is_idempotent_and_local_to_triples() {
        let s = sentence();
        let mut classes = ClassMap::new();
        classes.insert("boston", "cc_city");
        let props = extract_properties(&high_reading(), &s, &HeadTable::new()).unwrap();
        for p in &props {
            let once = abstract_property(p, &classes);
            assert_eq!(abstract_property(&once, &classes), once);
            assert_eq!(once.kind(), p.kind());
            assert_eq!(once.span(), p.span());
            if p.kind() == PropertyKind::SemanticTriple {
                assert_eq!(once.display, "show -to cc_city");
                assert_eq!(once.generic_key(), "t:show:-to:cc_city");
            } else if p.kind() != PropertyKind::ArgTriple {
                assert_eq!(&once, p);
            }
        }
    }
}
