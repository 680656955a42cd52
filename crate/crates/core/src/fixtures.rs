//! Reference sentences and corpora used by the tests, the benchmarks and the
//! command-line demo.
//!
//! `b6` and `w14` are parsed with the bundled grammar. `f154` is built
//! directly at incidence level because no small grammar yields its 154
//! readings in the required shape.

use std::collections::BTreeMap;

use crate::grammar::{parse_all, Grammar, DEFAULT_MAX_ANALYSES};
use crate::model::{
    Analysis, AnalysisSet, Incidence, Node, Property, PropertyContent, Sentence, SentenceType, Span, Token, Triple,
    TripleEnd,
};

pub const B6_TEXT: &str = "Show me the flights to Boston serving a meal";
pub const W14_TEXT: &str = "Show me the flights serving meals on Wednesday";

/// "the flights to Boston serving a meal" as one NP (relative reading).
pub const B6_NP: &str = "c:NP:2-9";
/// "serving a meal" as an adverbial.
pub const B6_ADVP: &str = "c:ADVP:6-9";
pub const B6_VP: &str = "c:VP:6-9";
pub const B6_PROVIDE: &str = "w:6:serve.provide";
pub const B6_FLYTO: &str = "w:6:serve.flyto";
pub const B6_FLIGHT_TO_BOSTON: &str = "t:3:to:+:5:flight:boston";
pub const B6_SHOW_TO_BOSTON: &str = "t:0:to:-:5:show:boston";

/// "the flights serving meals on Wednesday".
pub const W14_NP_ALL: &str = "c:NP:2-8";
/// "the flights serving meals".
pub const W14_NP_REL: &str = "c:NP:2-6";
/// "serving meals on Wednesday".
pub const W14_VP_LONG: &str = "c:VP:4-8";
pub const W14_PROVIDE: &str = "w:4:serve.provide";
/// "on Wednesday" modifying "flights" (not the nearest head, hence `-`).
pub const W14_FLIGHT_ON_WEDNESDAY: &str = "t:3:on:-:7:flight:wednesday";

/// Bracketing of the hand-built seventh reading for the extended merge
/// fixture: a flat NP taking both modifiers at once.
pub const B6_FLAT_READING: &str = "(S/s_imp^0 (VP/vp_v_pron_np^0 (V Show) (Pron me) \
     (NP/np_np_pp_vp^0 (NP/np_det_n^1 (Det the) (N flights)) (PP/pp_p_name^0 (P to) (Name Boston)) \
     (VP/vp_ger_np^0 (Ving serving) (NP/np_det_n^1 (Det a) (N meal))))))";

pub fn parse_text(id: &str, text: &str) -> (Sentence, Vec<Analysis>) {
    let g = Grammar::bundled();
    let s = g.tokenize(id, text).expect("fixture words are in the lexicon");
    let a = parse_all(&s, &g, DEFAULT_MAX_ANALYSES).expect("fixture parses");
    (s, a)
}

/// The six readings of the Boston sentence: three structures, each with both
/// senses of "serve".
pub fn b6() -> (Sentence, Vec<Analysis>) {
    parse_text("b6", B6_TEXT)
}

/// The fourteen readings of the Wednesday sentence.
pub fn w14() -> (Sentence, Vec<Analysis>) {
    parse_text("w14", W14_TEXT)
}

/// B6 as a grammar without the adverbial gerund would analyse it.
pub fn b6_minus_adv() -> (Sentence, Vec<Analysis>) {
    let (s, a) = b6();
    let kept = a.into_iter().filter(|a| a.tree.internal_nodes().iter().all(|n| n.category != "ADVP")).collect();
    (s, kept)
}

/// B6 plus a seventh reading that agrees with the relative, "provide" one on
/// every narrated judgment.
pub fn b6_plus_flat() -> (Sentence, Vec<Analysis>) {
    let (s, mut a) = b6();
    let tree = Node::parse_bracketed(B6_FLAT_READING, &s).expect("valid bracketing");
    let provide = a[0].senses.clone();
    a.push(Analysis::new(tree, provide, SentenceType::Imperative));
    (s, a)
}

/// Twin sentences for POS propagation: the same tag sequence with different
/// city names, plus one sentence with a different sequence.
pub const TWIN_TEXTS: [&str; 3] =
    ["show me flights to Boston", "show me flights to Denver", "show me the flights to Boston"];

/// Ten sentences of the form "show me flights to <city>".
pub const SUSPECT_CITIES: [&str; 10] = [
    "Boston",
    "Denver",
    "Dallas",
    "Atlanta",
    "Pittsburgh",
    "Baltimore",
    "Oakland",
    "Philadelphia",
    "New York",
    "San Francisco",
];

pub const F154_ANALYSES: usize = 154;
/// "the earliest flight that has no stops from Washington to San Francisco on Friday".
pub const F154_NP: &str = "c:NP:2-15";
/// The relative clause "that has no stops".
pub const F154_REL: &str = "c:REL:5-9";

const F154_WORDS: [(&str, &str, &str); 15] = [
    ("What", "wh", "what"),
    ("is", "v", "be"),
    ("the", "det", "the"),
    ("earliest", "adj", "earliest"),
    ("flight", "n", "flight"),
    ("that", "rel", "that"),
    ("has", "v", "have"),
    ("no", "det", "no"),
    ("stops", "n", "stop"),
    ("from", "p", "from"),
    ("Washington", "name", "Washington"),
    ("to", "p", "to"),
    ("San Francisco", "name", "San Francisco"),
    ("on", "p", "on"),
    ("Friday", "name", "Friday"),
];

pub fn f154_sentence() -> Sentence {
    let tokens = F154_WORDS.iter().enumerate().map(|(i, (s, p, l))| Token::new(i, *s, *p, *l)).collect();
    Sentence::new("f154", tokens).expect("valid fixture sentence")
}

struct Builder<'s> {
    sentence: &'s Sentence,
    table: BTreeMap<String, (Property, Vec<usize>)>,
}

impl Builder<'_> {
    fn add(&mut self, p: Property, analysis: usize) {
        self.table.entry(p.key.clone()).or_insert_with(|| (p, Vec::new())).1.push(analysis);
    }

    fn constituent(&self, cat: &str, start: usize, end: usize) -> Property {
        let span = Span::new(start, end).expect("fixture span");
        Property::constituent(cat, span, self.sentence.surfaces(span)).expect("fixture constituent")
    }

    fn end(&self, index: usize) -> TripleEnd {
        let t = &self.sentence.tokens[index];
        TripleEnd::new(index, t.lemma.clone(), t.lemma.to_lowercase())
    }

    /// A prepositional triple; `prep` is the preposition's index and the
    /// object follows it.
    fn pp(&self, head: usize, prep: usize) -> Property {
        let low = (0..prep).rev().find(|&i| self.sentence.tokens[i].is_attachment_site()) == Some(head);
        let relation = self.sentence.tokens[prep].lemma.clone();
        Property::new(PropertyContent::SemanticTriple(Triple {
            head: self.end(head),
            relation,
            low,
            dependent: self.end(prep + 1),
        }))
        .expect("fixture triple")
    }

    fn arg(&self, head: usize, label: &str, dependent: usize) -> Property {
        Property::new(PropertyContent::ArgTriple(Triple {
            head: self.end(head),
            relation: label.to_string(),
            low: true,
            dependent: self.end(dependent),
        }))
        .expect("fixture arg triple")
    }

    fn sense(&self, index: usize, sense: &str, gloss: &str) -> Property {
        Property::new(PropertyContent::WordSense {
            index,
            word: self.sentence.tokens[index].lemma.clone(),
            sense: sense.to_string(),
            gloss: gloss.to_string(),
        })
        .expect("fixture sense")
    }
}

/// A 154-reading incidence for the "earliest flight" question.
///
/// * Readings 0-19 take the whole span 2-15 as one NP. Readings 0 and 1 are
///   the right ones and differ only in a hidden argument relation; 2-19 each
///   carry one wrong attachment of their own.
/// * Readings 20-153 stop the NP at "flight" and vary the attachment of the
///   three PPs, the presence of the relative clause and the sense of "stop".
///
/// Approving the long NP leaves 20 readings; approving the relative clause
/// then leaves 2.
pub fn f154() -> Incidence {
    let sentence = f154_sentence();
    let mut b = Builder { sentence: &sentence, table: BTreeMap::new() };
    let (flight, has, stops, is) = (4, 6, 8, 1);
    let (from, to, on) = (9, 11, 13);
    let (washington, francisco) = (10, 12);
    let senses = [("stop.layover", "layover"), ("stop.halt", "halt"), ("stop.station", "station")];

    // one wrong attachment each for readings 2-19
    let wrong: Vec<Property> = {
        let mut v = Vec::new();
        for prep in [from, to, on] {
            for head in [is, 3, has, stops, washington, francisco] {
                if head < prep && !(head == stops && prep == from) {
                    v.push(b.pp(head, prep));
                }
            }
        }
        for (s, e) in [(10, 13), (10, 15), (12, 15), (6, 15)] {
            v.push(b.constituent(if s == 6 { "VP" } else { "NP" }, s, e));
        }
        v
    };
    assert_eq!(wrong.len(), 18);

    for a in 0..F154_ANALYSES {
        b.add(Property::new(PropertyContent::SentenceType(SentenceType::WhQuestion)).expect("type"), a);
        b.add(b.constituent("S", 0, 15), a);
        b.add(b.arg(is, "subj", 0), a);
        if a < 20 {
            b.add(b.sense(stops, senses[0].0, senses[0].1), a);
            b.add(b.constituent("NP", 2, 15), a);
            if a < 2 {
                b.add(b.constituent("REL", 5, 9), a);
                for prep in [from, to, on] {
                    b.add(b.pp(flight, prep), a);
                }
                b.add(b.arg(has, if a == 0 { "obj" } else { "comp" }, stops), a);
            } else {
                b.add(b.pp(stops, from), a);
                b.add(wrong[a - 2].clone(), a);
            }
            continue;
        }
        let m = a - 20;
        let from_head = [flight, stops, has][m % 3];
        let to_head = [flight, stops, washington][(m / 3) % 3];
        let on_head = [flight, has, is][(m / 9) % 3];
        b.add(b.constituent("NP", 2, 5), a);
        b.add(b.pp(from_head, from), a);
        b.add(b.pp(to_head, to), a);
        b.add(b.pp(on_head, on), a);
        if (m / 27) % 2 == 0 {
            b.add(b.constituent("REL", 5, 9), a);
        }
        let (s, g) = senses[(m / 54) % 3];
        b.add(b.sense(stops, s, g), a);
    }
    let entries = b
        .table
        .into_values()
        .map(|(p, ids)| (p, AnalysisSet::from_ids(F154_ANALYSES, ids).expect("ids in range")))
        .collect();
    Incidence::new(F154_ANALYSES, entries).expect("distinct keys")
}
