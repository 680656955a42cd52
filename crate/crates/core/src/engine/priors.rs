use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::Value;

use super::EngineError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PriorCounts {
    pub good: u64,
    pub bad: u64,
}

impl PriorCounts {
    pub fn support(&self) -> u64 {
        self.good + self.bad
    }

    pub fn majority(&self) -> Option<Value> {
        match self.good.cmp(&self.bad) {
            std::cmp::Ordering::Greater => Some(Value::Good),
            std::cmp::Ordering::Less => Some(Value::Bad),
            std::cmp::Ordering::Equal => None,
        }
    }

    /// Share of the majority polarity; 0 when there is no support.
    pub fn agreement(&self) -> f64 {
        match self.support() {
            0 => 0.0,
            total => self.good.max(self.bad) as f64 / total as f64,
        }
    }

    pub fn record(&mut self, value: Value) {
        match value {
            Value::Good => self.good += 1,
            Value::Bad => self.bad += 1,
        }
    }
}

/// Good/bad outcome counts per generic (class-abstracted) property key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PriorTable {
    counts: BTreeMap<String, PriorCounts>,
}

impl PriorTable {
    pub fn new() -> Self {
        PriorTable::default()
    }

    pub fn record(&mut self, key: impl Into<String>, value: Value) {
        self.counts.entry(key.into()).or_default().record(value);
    }

    pub fn set(&mut self, key: impl Into<String>, good: u64, bad: u64) {
        self.counts.insert(key.into(), PriorCounts { good, bad });
    }

    pub fn get(&self, key: &str) -> Option<PriorCounts> {
        self.counts.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, PriorCounts)> {
        self.counts.iter().map(|(k, c)| (k.as_str(), *c))
    }

    /// Tab-separated `key, good, bad`, one row per key in key order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, c) in &self.counts {
            let _ = writeln!(out, "{k}\t{}\t{}", c.good, c.bad);
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<PriorTable, EngineError> {
        let mut table = PriorTable::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let bad_row = || EngineError::PriorSyntax { line: n + 1 };
            if cols.len() != 3 {
                return Err(bad_row());
            }
            let good = cols[1].parse().map_err(|_| bad_row())?;
            let bad = cols[2].parse().map_err(|_| bad_row())?;
            table.set(cols[0], good, bad);
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_and_majority() {
        let c = PriorCounts { good: 0, bad: 40 };
        assert_eq!(c.majority(), Some(Value::Bad));
        assert_eq!(c.agreement(), 1.0);
        let tie = PriorCounts { good: 5, bad: 5 };
        assert_eq!(tie.majority(), None);
        assert_eq!(tie.agreement(), 0.5);
        assert_eq!(PriorCounts::default().agreement(), 0.0);
    }

    #[test]
    fn tsv_round_trip() {
        let mut t = PriorTable::new();
        t.set("t:show:-to:cc_city", 0, 40);
        t.record("w:serve.provide", Value::Good);
        let text = t.to_tsv();
        assert_eq!(text, "t:show:-to:cc_city\t0\t40\nw:serve.provide\t1\t0\n");
        assert_eq!(PriorTable::from_tsv(&text).unwrap(), t);
        assert!(PriorTable::from_tsv("k\t1\n").is_err());
        assert!(PriorTable::from_tsv("k\tx\t1\n").is_err());
    }
}
