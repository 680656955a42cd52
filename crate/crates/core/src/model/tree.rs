//! Parse trees and their labeled-bracketing serialization.
//!
//! Internal nodes are written `(CAT/rule^head child ...)`, preterminals
//! `(CAT word)`. The rule and head annotations are optional. Words escape
//! spaces, parentheses and backslashes with a backslash.

use super::{ModelError, Sentence, Span};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub category: String,
    pub span: Span,
    pub rule: Option<String>,
    pub head: Option<usize>,
    /// Empty for preterminals, which cover exactly one token.
    pub children: Vec<Node>,
}

impl Node {
    pub fn leaf(category: impl Into<String>, index: usize) -> Node {
        Node { category: category.into(), span: Span::single(index), rule: None, head: None, children: Vec::new() }
    }

    /// Builds an internal node whose span is the union of its children.
    pub fn branch(
        category: impl Into<String>,
        rule: Option<String>,
        head: Option<usize>,
        children: Vec<Node>,
    ) -> Result<Node, ModelError> {
        let category = category.into();
        let (first, last) = match (children.first(), children.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(ModelError::InvalidTree(format!("{category} node has no children"))),
        };
        for pair in children.windows(2) {
            if pair[0].span.end != pair[1].span.start {
                return Err(ModelError::InvalidTree(format!(
                    "{category} node has non-adjacent children {} and {}",
                    pair[0].span, pair[1].span
                )));
            }
        }
        if let Some(h) = head {
            if h >= children.len() {
                return Err(ModelError::InvalidTree(format!(
                    "{category} node head {h} out of range for {} children",
                    children.len()
                )));
            }
        }
        Ok(Node { span: Span { start: first.span.start, end: last.span.end }, category, rule, head, children })
    }

    pub fn is_preterminal(&self) -> bool {
        self.children.is_empty()
    }

    /// Internal nodes in preorder.
    pub fn internal_nodes(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            if !n.is_preterminal() {
                out.push(n);
                stack.extend(n.children.iter().rev());
            }
        }
        out
    }

    /// Checks the structural invariants against a sentence: the root spans all
    /// tokens, every node's span is the union of its children, heads are in range.
    pub fn validate(&self, sentence_len: usize) -> Result<(), ModelError> {
        if self.span != (Span { start: 0, end: sentence_len }) {
            return Err(ModelError::InvalidTree(format!(
                "root spans {} but sentence has {sentence_len} tokens",
                self.span
            )));
        }
        self.validate_node()
    }

    fn validate_node(&self) -> Result<(), ModelError> {
        if self.is_preterminal() {
            if self.span.width() != 1 {
                return Err(ModelError::InvalidTree(format!("preterminal {} spans {}", self.category, self.span)));
            }
            return Ok(());
        }
        if self.children.first().map(|c| c.span.start) != Some(self.span.start)
            || self.children.last().map(|c| c.span.end) != Some(self.span.end)
        {
            return Err(ModelError::InvalidTree(format!(
                "{} node span {} is not covered by its children",
                self.category, self.span
            )));
        }
        for pair in self.children.windows(2) {
            if pair[0].span.end != pair[1].span.start {
                return Err(ModelError::InvalidTree(format!("{} node has non-adjacent children", self.category)));
            }
        }
        if let Some(h) = self.head {
            if h >= self.children.len() {
                return Err(ModelError::InvalidTree(format!("{} node head {h} out of range", self.category)));
            }
        }
        self.children.iter().try_for_each(Node::validate_node)
    }

    pub fn to_bracketed(&self, sentence: &Sentence) -> String {
        let mut out = String::new();
        self.write_bracketed(sentence, &mut out);
        out
    }

    fn write_bracketed(&self, sentence: &Sentence, out: &mut String) {
        out.push('(');
        out.push_str(&self.category);
        if self.is_preterminal() {
            out.push(' ');
            escape_word(&sentence.tokens[self.span.start].surface, out);
        } else {
            if let Some(rule) = &self.rule {
                out.push('/');
                out.push_str(rule);
            }
            if let Some(h) = self.head {
                out.push('^');
                out.push_str(&h.to_string());
            }
            for c in &self.children {
                out.push(' ');
                c.write_bracketed(sentence, out);
            }
        }
        out.push(')');
    }

    /// Parses a bracketing, assigning preterminals to consecutive tokens of
    /// `sentence` and checking that their words match.
    pub fn parse_bracketed(text: &str, sentence: &Sentence) -> Result<Node, ModelError> {
        let items = lex(text)?;
        let mut parser = BracketParser { items: &items, pos: 0, next_token: 0, sentence };
        let node = parser.node()?;
        if parser.pos != items.len() {
            return Err(ModelError::Bracketing("trailing input after tree".into()));
        }
        node.validate(sentence.len())?;
        Ok(node)
    }
}

fn escape_word(word: &str, out: &mut String) {
    for ch in word.chars() {
        if matches!(ch, ' ' | '(' | ')' | '\\') {
            out.push('\\');
        }
        out.push(ch);
    }
}

#[derive(Debug, PartialEq)]
enum Item {
    Open,
    Close,
    Atom(String),
}

fn lex(text: &str) -> Result<Vec<Item>, ModelError> {
    let mut items = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            '(' => {
                chars.next();
                items.push(Item::Open);
            }
            ')' => {
                chars.next();
                items.push(Item::Close);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '\\' {
                        chars.next();
                        match chars.next() {
                            Some(esc) => atom.push(esc),
                            None => return Err(ModelError::Bracketing("dangling escape".into())),
                        }
                    } else if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    } else {
                        atom.push(c);
                        chars.next();
                    }
                }
                items.push(Item::Atom(atom));
            }
        }
    }
    Ok(items)
}

struct BracketParser<'a> {
    items: &'a [Item],
    pos: usize,
    next_token: usize,
    sentence: &'a Sentence,
}

impl BracketParser<'_> {
    fn expect_open(&mut self) -> Result<(), ModelError> {
        match self.items.get(self.pos) {
            Some(Item::Open) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ModelError::Bracketing(format!("expected '(' at item {}", self.pos))),
        }
    }

    fn atom(&mut self) -> Result<String, ModelError> {
        match self.items.get(self.pos) {
            Some(Item::Atom(a)) => {
                self.pos += 1;
                Ok(a.clone())
            }
            _ => Err(ModelError::Bracketing(format!("expected a label at item {}", self.pos))),
        }
    }

    fn node(&mut self) -> Result<Node, ModelError> {
        self.expect_open()?;
        let label = self.atom()?;
        match self.items.get(self.pos) {
            Some(Item::Atom(_)) => {
                let word = self.atom()?;
                self.close()?;
                let index = self.next_token;
                let token =
                    self.sentence.tokens.get(index).ok_or_else(|| {
                        ModelError::Bracketing(format!("tree has more words than the sentence ({word})"))
                    })?;
                if token.surface != word {
                    return Err(ModelError::Bracketing(format!(
                        "word {word:?} does not match token {index} {:?}",
                        token.surface
                    )));
                }
                self.next_token += 1;
                Ok(Node::leaf(label, index))
            }
            Some(Item::Open) => {
                let (category, rule, head) = split_label(&label)?;
                let mut children = Vec::new();
                while let Some(Item::Open) = self.items.get(self.pos) {
                    children.push(self.node()?);
                }
                self.close()?;
                Node::branch(category, rule, head, children)
            }
            _ => Err(ModelError::Bracketing(format!("node {label} has no content"))),
        }
    }

    fn close(&mut self) -> Result<(), ModelError> {
        match self.items.get(self.pos) {
            Some(Item::Close) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ModelError::Bracketing(format!("expected ')' at item {}", self.pos))),
        }
    }
}

fn split_label(label: &str) -> Result<(String, Option<String>, Option<usize>), ModelError> {
    let (rest, head) = match label.rsplit_once('^') {
        Some((rest, h)) => {
            let h = h.parse().map_err(|_| ModelError::Bracketing(format!("bad head index in {label}")))?;
            (rest, Some(h))
        }
        None => (label, None),
    };
    let (category, rule) = match rest.split_once('/') {
        Some((c, r)) => (c.to_string(), Some(r.to_string())),
        None => (rest.to_string(), None),
    };
    if category.is_empty() {
        return Err(ModelError::Bracketing(format!("empty category in {label}")));
    }
    Ok((category, rule, head))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Token;

    fn sentence(words: &[&str]) -> Sentence {
        let tokens = words.iter().enumerate().map(|(i, w)| Token::new(i, *w, "n", *w)).collect();
        Sentence::new("t", tokens).unwrap()
    }

    #[test]
    fn bracketing_round_trip_with_escapes() {
        let s = sentence(&["show", "New York", "(x)"]);
        let np =
            Node::branch("NP", Some("np_x".into()), Some(0), vec![Node::leaf("Name", 1), Node::leaf("N", 2)]).unwrap();
        let root = Node::branch("VP", Some("vp_v_np".into()), Some(0), vec![Node::leaf("V", 0), np]).unwrap();
        let text = root.to_bracketed(&s);
        assert_eq!(text, r"(VP/vp_v_np^0 (V show) (NP/np_x^0 (Name New\ York) (N \(x\))))");
        assert_eq!(Node::parse_bracketed(&text, &s).unwrap(), root);
    }

    #[test]
    fn rejects_mismatched_words_and_partial_cover() {
        let s = sentence(&["a", "b"]);
        assert!(Node::parse_bracketed("(X (A a) (B c))", &s).is_err());
        assert!(Node::parse_bracketed("(X (A a))", &s).is_err());
        assert!(Node::parse_bracketed("(X/r^5 (A a) (B b))", &s).is_err());
        assert!(Node::parse_bracketed("(X (A a) (B b)", &s).is_err());
        assert!(Node::parse_bracketed("(X (A a) (B b))", &s).is_ok());
    }

    #[test]
    fn internal_nodes_preorder() {
        let inner = Node::branch("B", None, None, vec![Node::leaf("x", 1), Node::leaf("y", 2)]).unwrap();
        let root = Node::branch("A", None, None, vec![Node::leaf("w", 0), inner]).unwrap();
        let cats: Vec<_> = root.internal_nodes().iter().map(|n| n.category.as_str()).collect();
        assert_eq!(cats, ["A", "B"]);
    }
}
