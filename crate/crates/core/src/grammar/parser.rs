use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::model::{Analysis, Node, SenseTag, Sentence};

use super::{Grammar, GrammarError, LexEntry};

pub const DEFAULT_MAX_ANALYSES: usize = 10_000;

#[derive(Debug, Clone)]
enum Deriv {
    Lexical,
    Rule { rule: usize, bounds: Vec<usize> },
}

type Cell = HashMap<String, Vec<Deriv>>;

struct Chart<'g> {
    grammar: &'g Grammar,
    /// `cells[i][len - 1]` covers `[i, i + len)`.
    cells: Vec<Vec<Cell>>,
    /// Lexical entries per token and preterminal category.
    lexical: Vec<Vec<(String, Vec<&'g LexEntry>)>>,
}

impl<'g> Chart<'g> {
    fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i][j - i - 1]
    }

    fn has(&self, cat: &str, i: usize, j: usize) -> bool {
        self.cell(i, j).contains_key(cat)
    }

    fn build(grammar: &'g Grammar, sentence: &Sentence) -> Result<Chart<'g>, GrammarError> {
        let n = sentence.len();
        let mut lexical = Vec::with_capacity(n);
        for t in &sentence.tokens {
            let entries = grammar.entries(&t.surface).ok_or_else(|| GrammarError::UnknownWord(t.surface.clone()))?;
            let mut by_cat: Vec<(String, Vec<&LexEntry>)> = Vec::new();
            for e in entries {
                match by_cat.iter_mut().find(|(c, _)| *c == e.category) {
                    Some((_, v)) => v.push(e),
                    None => by_cat.push((e.category.clone(), vec![e])),
                }
            }
            lexical.push(by_cat);
        }
        let mut chart = Chart { grammar, cells: (0..n).map(|i| vec![Cell::new(); n - i]).collect(), lexical };
        for len in 1..=n {
            for i in 0..=n - len {
                chart.fill(i, i + len);
            }
        }
        Ok(chart)
    }

    fn fill(&mut self, i: usize, j: usize) {
        let mut cell = Cell::new();
        if j == i + 1 {
            for (cat, _) in &self.lexical[i] {
                cell.entry(cat.clone()).or_default().push(Deriv::Lexical);
            }
        }
        for (r, rule) in self.grammar.rules.iter().enumerate() {
            if rule.children.len() < 2 {
                continue;
            }
            let mut found = Vec::new();
            self.splits(&rule.children, i, j, &mut Vec::new(), &mut found);
            for bounds in found {
                cell.entry(rule.parent.clone()).or_default().push(Deriv::Rule { rule: r, bounds });
            }
        }
        // unary closure over the same span; the grammar has no unary cycles
        loop {
            let mut changed = false;
            for (r, rule) in self.grammar.rules.iter().enumerate() {
                if rule.children.len() != 1 || !cell.contains_key(&rule.children[0]) {
                    continue;
                }
                let derivs = cell.entry(rule.parent.clone()).or_default();
                if !derivs.iter().any(|d| matches!(d, Deriv::Rule { rule, .. } if *rule == r)) {
                    derivs.push(Deriv::Rule { rule: r, bounds: Vec::new() });
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for derivs in cell.values_mut() {
            derivs.sort_by_key(|d| match d {
                Deriv::Lexical => 0,
                Deriv::Rule { rule, .. } => rule + 1,
            });
        }
        self.cells[i][j - i - 1] = cell;
    }

    /// All ways to cover `[start, end)` with `cats` in order, each child non-empty.
    fn splits(&self, cats: &[String], start: usize, end: usize, bounds: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let (first, rest) = cats.split_first().expect("non-empty");
        if end - start < cats.len() {
            return;
        }
        if rest.is_empty() {
            if self.has(first, start, end) {
                out.push(bounds.clone());
            }
            return;
        }
        for mid in start + 1..=end - rest.len() {
            if self.has(first, start, mid) {
                bounds.push(mid);
                self.splits(rest, mid, end, bounds, out);
                bounds.pop();
            }
        }
    }

    fn children_spans(&self, i: usize, j: usize, bounds: &[usize]) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(bounds.len() + 2);
        edges.push(i);
        edges.extend_from_slice(bounds);
        edges.push(j);
        edges.windows(2).map(|w| (w[0], w[1])).collect()
    }

    fn senses(&self, cat: &str, i: usize) -> usize {
        self.lexical[i].iter().find(|(c, _)| c == cat).map_or(0, |(_, e)| e.len())
    }

    /// Number of analyses (trees times sense assignments) for `cat` over `[i, j)`.
    fn count(&self, cat: &str, i: usize, j: usize, memo: &mut HashMap<(String, usize, usize), u128>) -> u128 {
        if let Some(&c) = memo.get(&(cat.to_string(), i, j)) {
            return c;
        }
        let mut total: u128 = 0;
        for d in self.cell(i, j).get(cat).into_iter().flatten() {
            let c = match d {
                Deriv::Lexical => self.senses(cat, i) as u128,
                Deriv::Rule { rule, bounds } => {
                    let rule = &self.grammar.rules[*rule];
                    self.children_spans(i, j, bounds)
                        .into_iter()
                        .zip(&rule.children)
                        .fold(1u128, |acc, ((a, b), c)| acc.saturating_mul(self.count(c, a, b, memo)))
                }
            };
            total = total.saturating_add(c);
        }
        memo.insert((cat.to_string(), i, j), total);
        total
    }

    /// Trees (without sense choices) in derivation order.
    fn trees(
        &self,
        cat: &str,
        i: usize,
        j: usize,
        memo: &mut HashMap<(String, usize, usize), Rc<Vec<Node>>>,
    ) -> Rc<Vec<Node>> {
        if let Some(t) = memo.get(&(cat.to_string(), i, j)) {
            return t.clone();
        }
        let mut out = Vec::new();
        for d in self.cell(i, j).get(cat).into_iter().flatten() {
            match d {
                Deriv::Lexical => out.push(Node::leaf(cat, i)),
                Deriv::Rule { rule, bounds } => {
                    let r = &self.grammar.rules[*rule];
                    let options: Vec<Rc<Vec<Node>>> = self
                        .children_spans(i, j, bounds)
                        .into_iter()
                        .zip(&r.children)
                        .map(|((a, b), c)| self.trees(c, a, b, memo))
                        .collect();
                    for combo in product(&options) {
                        let node = Node::branch(r.parent.clone(), Some(r.name.clone()), r.head, combo)
                            .expect("chart children are adjacent");
                        out.push(node);
                    }
                }
            }
        }
        let out = Rc::new(out);
        memo.insert((cat.to_string(), i, j), out.clone());
        out
    }
}

/// Cartesian product, leftmost position varying slowest.
fn product(options: &[Rc<Vec<Node>>]) -> Vec<Vec<Node>> {
    let mut acc: Vec<Vec<Node>> = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for prefix in &acc {
            for o in opts.iter() {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

fn preterminals<'a>(node: &'a Node, out: &mut Vec<&'a Node>) {
    if node.is_preterminal() {
        out.push(node);
    } else {
        node.children.iter().for_each(|c| preterminals(c, out));
    }
}

/// Every complete analysis of `sentence` rooted in a start category, crossed
/// with every sense assignment, in a fixed order: start categories in
/// declaration order, then derivations by rule order and split position
/// (leftmost first), then sense choices with earlier tokens varying slowest.
pub fn parse_all(sentence: &Sentence, grammar: &Grammar, max_analyses: usize) -> Result<Vec<Analysis>, GrammarError> {
    let n = sentence.len();
    let chart = Chart::build(grammar, sentence)?;
    let mut counts = HashMap::new();
    let total: u128 =
        grammar.starts.iter().map(|(cat, _)| chart.count(cat, 0, n, &mut counts)).fold(0, u128::saturating_add);
    if total > max_analyses as u128 {
        return Err(GrammarError::TooManyAnalyses { count: total, limit: max_analyses });
    }
    let mut memo = HashMap::new();
    let mut out = Vec::with_capacity(total as usize);
    for (cat, ty) in &grammar.starts {
        for tree in chart.trees(cat, 0, n, &mut memo).iter() {
            let mut leaves = Vec::new();
            preterminals(tree, &mut leaves);
            let choices: Vec<(usize, Vec<&LexEntry>)> = leaves
                .iter()
                .filter_map(|leaf| {
                    let i = leaf.span.start;
                    let (_, entries) = chart.lexical[i].iter().find(|(c, _)| *c == leaf.category)?;
                    (entries.len() > 1).then(|| (i, entries.clone()))
                })
                .collect();
            let mut assignments: Vec<BTreeMap<usize, SenseTag>> = vec![BTreeMap::new()];
            for (i, entries) in &choices {
                let mut next = Vec::new();
                for a in &assignments {
                    for e in entries {
                        let mut a = a.clone();
                        a.insert(
                            *i,
                            SenseTag {
                                label: e.sense.clone(),
                                gloss: e.gloss.clone().unwrap_or_else(|| e.sense.clone()),
                            },
                        );
                        next.push(a);
                    }
                }
                assignments = next;
            }
            for senses in assignments {
                out.push(Analysis::new(tree.clone(), senses, *ty));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Vec<Analysis> {
        let g = Grammar::bundled();
        let s = g.tokenize("t", text).unwrap();
        parse_all(&s, &g, DEFAULT_MAX_ANALYSES).unwrap()
    }

    #[test]
    fn fixture_counts() {
        assert_eq!(parse("show me the flights to Boston serving a meal").len(), 6);
        assert_eq!(parse("show me the flights serving meals on Wednesday").len(), 14);
        assert_eq!(parse("show me flights").len(), 1);
        assert_eq!(parse("show me flights to New York").len(), 2);
    }

    #[test]
    fn elliptical_answer() {
        let a = parse("Boston");
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].sentence_type, crate::model::SentenceType::EllipticalNp);
    }

    #[test]
    fn overflow_reports_count() {
        let g = Grammar::bundled();
        let s = g.tokenize("t", "show me the flights serving meals on Wednesday").unwrap();
        assert_eq!(parse_all(&s, &g, 13), Err(GrammarError::TooManyAnalyses { count: 14, limit: 13 }));
    }

    #[test]
    fn output_is_valid_and_duplicate_free() {
        let g = Grammar::bundled();
        let s = g.tokenize("t", "show me the flights serving meals on Wednesday").unwrap();
        let all = parse_all(&s, &g, DEFAULT_MAX_ANALYSES).unwrap();
        for a in &all {
            a.validate(&s).unwrap();
        }
        let unique: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(unique.len(), all.len());
        assert_eq!(all, parse_all(&s, &g, DEFAULT_MAX_ANALYSES).unwrap());
    }
}
