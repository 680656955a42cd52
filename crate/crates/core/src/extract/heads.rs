use std::collections::HashMap;

use crate::model::Node;

use super::ExtractError;

/// Which child heads each (category, rule) pair.
///
/// Nodes that carry their own head index use it; otherwise the explicit table
/// is consulted, then the defaults: the leftmost child for verbal and
/// sentential categories, the rightmost nominal child for noun phrases.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HeadTable {
    explicit: HashMap<(String, String), usize>,
}

impl HeadTable {
    pub fn new() -> Self {
        HeadTable::default()
    }

    pub fn insert(&mut self, category: impl Into<String>, rule: impl Into<String>, head: usize) {
        self.explicit.insert((category.into(), rule.into()), head);
    }

    pub fn len(&self) -> usize {
        self.explicit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.explicit.is_empty()
    }

    pub fn head_of(&self, node: &Node) -> Result<usize, ExtractError> {
        let rule = node.rule.as_deref().unwrap_or("");
        let head = node
            .head
            .or_else(|| self.explicit.get(&(node.category.clone(), rule.to_string())).copied())
            .or_else(|| default_head(node));
        match head {
            Some(h) if h < node.children.len() => Ok(h),
            Some(h) => {
                Err(ExtractError::HeadOutOfRange { rule: display_rule(node), head: h, children: node.children.len() })
            }
            None => Err(ExtractError::MissingHead(display_rule(node))),
        }
    }
}

fn display_rule(node: &Node) -> String {
    match &node.rule {
        Some(r) => format!("{r} ({})", node.category),
        None => node.category.clone(),
    }
}

fn default_head(node: &Node) -> Option<usize> {
    let cat = node.category.as_str();
    if cat.starts_with("NP") {
        node.children.iter().rposition(|c| c.category.starts_with('N'))
    } else if cat.starts_with('V') || cat.starts_with('S') {
        Some(0)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(cat: &str, rule: Option<&str>, kids: &[&str]) -> Node {
        let children = kids.iter().enumerate().map(|(i, c)| Node::leaf(*c, i)).collect();
        Node::branch(cat, rule.map(str::to_string), None, children).unwrap()
    }

    #[test]
    fn defaults_and_explicit_entries() {
        let t = HeadTable::new();
        assert_eq!(t.head_of(&node("VP", Some("vp"), &["V", "NP"])).unwrap(), 0);
        assert_eq!(t.head_of(&node("NP", Some("np"), &["Det", "Adj", "N", "PP"])).unwrap(), 2);
        let err = t.head_of(&node("PP", Some("pp_p_np"), &["P", "NP"])).unwrap_err();
        assert!(err.to_string().contains("pp_p_np"));

        let mut t = HeadTable::new();
        t.insert("PP", "pp_p_np", 0);
        assert_eq!(t.head_of(&node("PP", Some("pp_p_np"), &["P", "NP"])).unwrap(), 0);
    }
}
