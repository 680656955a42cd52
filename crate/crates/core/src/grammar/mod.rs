//! A small context-free grammar with a sense lexicon, and an exhaustive
//! chart parser over it.
//!
//! Grammar files are UTF-8 text. `#` starts a comment. Three kinds of line:
//!
//! ```text
//! %start S imperative
//! np_det_n: NP -> Det N [head=1]
//! serving ving Ving serve.provide provide
//! ```
//!
//! Lexicon lines are `word POS Category sense gloss`; the gloss runs to the
//! end of the line and `-` means none. Multi-word entries join their words
//! with `_`. The lemma of an entry is its sense up to the first `.`.

mod parser;

pub use parser::{parse_all, DEFAULT_MAX_ANALYSES};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use thiserror::Error;

use crate::extract::HeadTable;
use crate::model::{ModelError, Sentence, SentenceType, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("grammar line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid rule {rule}: {message}")]
    Rule { rule: String, message: String },
    #[error("grammar declares no start category")]
    NoStart,
    #[error("unknown word {0:?}")]
    UnknownWord(String),
    #[error("{count} analyses exceed the limit of {limit}")]
    TooManyAnalyses { count: u128, limit: usize },
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub parent: String,
    pub children: Vec<String>,
    pub head: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub pos: String,
    pub category: String,
    pub sense: String,
    pub gloss: Option<String>,
}

impl LexEntry {
    pub fn lemma(&self) -> &str {
        self.sense.split('.').next().unwrap_or(&self.sense)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Rule>,
    /// Lower-cased word (words of multi-word entries joined by spaces) to entries.
    lexicon: BTreeMap<String, Vec<LexEntry>>,
    starts: Vec<(String, SentenceType)>,
    warnings: Vec<String>,
    longest_entry: usize,
}

const BUNDLED: &str = include_str!("../../data/atis.grammar");

fn valid_symbol(s: &str) -> bool {
    !s.is_empty() && !s.contains(['/', '^', '(', ')', '\\', ':']) && !s.chars().any(char::is_whitespace)
}

impl Grammar {
    /// The ATIS-like demonstration grammar shipped with the crate.
    pub fn bundled() -> Grammar {
        Grammar::parse(BUNDLED).expect("bundled grammar is valid")
    }

    pub fn bundled_source() -> &'static str {
        BUNDLED
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn starts(&self) -> &[(String, SentenceType)] {
        &self.starts
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn entries(&self, word: &str) -> Option<&[LexEntry]> {
        self.lexicon.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn head_table(&self) -> HeadTable {
        let mut t = HeadTable::new();
        for r in &self.rules {
            if let Some(h) = r.head {
                t.insert(r.parent.clone(), r.name.clone(), h);
            }
        }
        t
    }

    pub fn parse(text: &str) -> Result<Grammar, GrammarError> {
        let mut rules: Vec<Rule> = Vec::new();
        let mut lexicon: BTreeMap<String, Vec<LexEntry>> = BTreeMap::new();
        let mut starts = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: &str| GrammarError::Syntax { line: line_no, message: message.into() };
            if let Some(rest) = line.strip_prefix('%') {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    ["start", cat, ty] if valid_symbol(cat) => {
                        let ty: SentenceType = ty.parse().map_err(|_| syntax("unknown sentence type"))?;
                        starts.push((cat.to_string(), ty));
                    }
                    _ => return Err(syntax("expected `%start Category sentence-type`")),
                }
            } else if line.contains("->") {
                rules.push(parse_rule(line).map_err(|m| syntax(&m))?);
            } else {
                let (word, entry) = parse_lex(line).map_err(|m| syntax(&m))?;
                lexicon.entry(word).or_default().push(entry);
            }
        }
        let longest_entry = lexicon.keys().map(|w| w.split(' ').count()).max().unwrap_or(1);
        let mut g = Grammar { rules, lexicon, starts, warnings: Vec::new(), longest_entry };
        g.validate()?;
        Ok(g)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Grammar, GrammarError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| GrammarError::Io(format!("{}: {e}", path.display())))?;
        Grammar::parse(&text)
    }

    fn validate(&mut self) -> Result<(), GrammarError> {
        let mut names = HashSet::new();
        for r in &self.rules {
            if !names.insert(r.name.as_str()) {
                return Err(GrammarError::Rule { rule: r.name.clone(), message: "duplicate rule name".into() });
            }
            if let Some(h) = r.head {
                if h >= r.children.len() {
                    return Err(GrammarError::Rule {
                        rule: r.name.clone(),
                        message: format!("head {h} out of range for {} children", r.children.len()),
                    });
                }
            }
        }
        if self.starts.is_empty() {
            return Err(GrammarError::NoStart);
        }
        if let Some(rule) = self.unary_cycle() {
            return Err(GrammarError::Rule { rule, message: "unary rules form a cycle".into() });
        }
        let produced: HashSet<&str> = self
            .rules
            .iter()
            .map(|r| r.parent.as_str())
            .chain(self.lexicon.values().flatten().map(|e| e.category.as_str()))
            .collect();
        let unreachable: BTreeSet<&str> = self
            .rules
            .iter()
            .flat_map(|r| r.children.iter().map(String::as_str))
            .chain(self.starts.iter().map(|(c, _)| c.as_str()))
            .filter(|c| !produced.contains(c))
            .collect();
        if !unreachable.is_empty() {
            let list: Vec<&str> = unreachable.into_iter().collect();
            self.warnings.push(format!("unreachable categories: {}", list.join(", ")));
        }
        Ok(())
    }

    /// Name of a rule on a unary cycle, if any.
    fn unary_cycle(&self) -> Option<String> {
        let mut edges: HashMap<&str, Vec<&Rule>> = HashMap::new();
        for r in self.rules.iter().filter(|r| r.children.len() == 1) {
            edges.entry(r.parent.as_str()).or_default().push(r);
        }
        fn visit<'a>(
            cat: &'a str,
            edges: &HashMap<&'a str, Vec<&'a Rule>>,
            path: &mut Vec<&'a str>,
            done: &mut HashSet<&'a str>,
        ) -> Option<String> {
            if done.contains(cat) {
                return None;
            }
            for r in edges.get(cat).into_iter().flatten() {
                let child = r.children[0].as_str();
                if path.contains(&child) || child == cat {
                    return Some(r.name.clone());
                }
                path.push(child);
                let found = visit(child, edges, path, done);
                path.pop();
                if found.is_some() {
                    return found;
                }
            }
            done.insert(cat);
            None
        }
        let mut done = HashSet::new();
        for start in edges.keys() {
            let mut path = vec![*start];
            if let Some(r) = visit(start, &edges, &mut path, &mut done) {
                return Some(r);
            }
        }
        None
    }

    /// Splits text into lexicon words, preferring the longest multi-word
    /// entry, and tags each token with the POS of its first entry.
    /// Sentence-final punctuation and commas are dropped.
    pub fn tokenize(&self, id: &str, text: &str) -> Result<Sentence, GrammarError> {
        let words: Vec<&str> = text
            .split_whitespace()
            .map(|w| w.trim_matches(|c: char| matches!(c, '?' | '.' | ',' | '!')))
            .filter(|w| !w.is_empty())
            .collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < words.len() {
            let mut matched = None;
            for len in (1..=self.longest_entry.min(words.len() - i)).rev() {
                let joined = words[i..i + len].join(" ");
                if let Some(entries) = self.entries(&joined) {
                    matched = Some((len, joined, &entries[0]));
                    break;
                }
            }
            let (len, _, entry) = matched.ok_or_else(|| GrammarError::UnknownWord(words[i].to_string()))?;
            let surface = words[i..i + len].join(" ");
            tokens.push(Token::new(tokens.len(), surface, entry.pos.clone(), entry.lemma().replace('_', " ")));
            i += len;
        }
        Ok(Sentence::new(id, tokens)?)
    }
}

fn parse_rule(line: &str) -> Result<Rule, String> {
    let (name, body) = line.split_once(':').ok_or("rule needs `name:`")?;
    let name = name.trim();
    if !valid_symbol(name) {
        return Err(format!("bad rule name {name:?}"));
    }
    let (body, head) = match body.split_once('[') {
        Some((b, h)) => {
            let h = h.trim().strip_suffix(']').ok_or("unterminated head annotation")?;
            let k = h
                .trim()
                .strip_prefix("head=")
                .ok_or("expected [head=k]")?
                .trim()
                .parse::<usize>()
                .map_err(|_| "head index is not a number")?;
            (b, Some(k))
        }
        None => (body, None),
    };
    let (parent, rhs) = body.split_once("->").ok_or("rule needs `->`")?;
    let parent = parent.trim();
    if !valid_symbol(parent) {
        return Err(format!("bad category {parent:?}"));
    }
    let children: Vec<String> = rhs.split_whitespace().map(str::to_string).collect();
    if children.is_empty() {
        return Err(format!("rule {name} has an empty right-hand side"));
    }
    if let Some(c) = children.iter().find(|c| !valid_symbol(c)) {
        return Err(format!("bad category {c:?}"));
    }
    Ok(Rule { name: name.to_string(), parent: parent.to_string(), children, head })
}

fn parse_lex(line: &str) -> Result<(String, LexEntry), String> {
    let mut fields = line.split_whitespace();
    let (Some(word), Some(pos), Some(category), Some(sense)) =
        (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err("lexicon lines need `word POS Category sense gloss`".into());
    };
    if !valid_symbol(category) {
        return Err(format!("bad category {category:?}"));
    }
    let gloss = fields.collect::<Vec<_>>().join(" ");
    let gloss = match gloss.as_str() {
        "" | "-" => None,
        g => Some(g.to_string()),
    };
    Ok((
        word.replace('_', " ").to_lowercase(),
        LexEntry { pos: pos.to_string(), category: category.to_string(), sense: sense.to_string(), gloss },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_grammar_loads_cleanly() {
        let g = Grammar::bundled();
        assert!(g.warnings().is_empty(), "{:?}", g.warnings());
        assert!(!g.rules().is_empty());
    }

    #[test]
    fn duplicate_rule_rejected() {
        let text = "%start S other\na: S -> X\na: S -> Y\nx x X x -\ny y Y y -\n";
        let err = Grammar::parse(text).unwrap_err();
        assert!(matches!(err, GrammarError::Rule { ref rule, .. } if rule == "a"), "{err}");
    }

    #[test]
    fn unreachable_category_warns() {
        let g = Grammar::parse("%start S other\na: S -> X Z\nx x X x -\n").unwrap();
        assert_eq!(g.warnings(), ["unreachable categories: Z"]);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = Grammar::parse("%start S other\n\nbad line\n").unwrap_err();
        assert_eq!(
            err,
            GrammarError::Syntax { line: 3, message: "lexicon lines need `word POS Category sense gloss`".into() }
        );
        assert!(matches!(Grammar::parse("a: S ->\n"), Err(GrammarError::Syntax { line: 1, .. })));
        assert!(matches!(
            Grammar::parse("a: S -> X [head=3]\n%start S other\nx x X x\n"),
            Err(GrammarError::Rule { .. })
        ));
        assert_eq!(Grammar::parse("x x X x -\n").unwrap_err(), GrammarError::NoStart);
    }

    #[test]
    fn unary_cycles_rejected() {
        let text = "%start S other\na: S -> T\nb: T -> S\nc: T -> X\nx x X x -\n";
        assert!(matches!(Grammar::parse(text), Err(GrammarError::Rule { .. })));
    }

    #[test]
    fn tokenizer_joins_multiword_entries() {
        let g = Grammar::bundled();
        let s = g.tokenize("s1", "Show me flights to New York?").unwrap();
        let surfaces: Vec<_> = s.tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["Show", "me", "flights", "to", "New York"]);
        assert_eq!(s.tokens[2].lemma, "flight");
        assert_eq!(s.tokens[4].pos, "name");
        assert_eq!(g.tokenize("s2", "show me zeppelins"), Err(GrammarError::UnknownWord("zeppelins".into())));
    }
}
