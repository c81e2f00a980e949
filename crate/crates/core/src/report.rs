//! Violation reports shared by every validator and law suite.
//!
//! A [`Report`] keeps a per-law tally of how many instances were checked and
//! how many failed, plus the first `cap` failing witnesses of each law in the
//! order they were found. Iteration order inside the validators is fixed, so two runs on
//! the same input produce identical reports.

use std::fmt;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

/// Default number of stored witnesses per law.
pub const DEFAULT_CAP: usize = 100;

/// Named indices identifying one failing instance of a law.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness(Vec<(&'static str, usize)>);

impl Witness {
    pub fn new() -> Self {
        Witness(Vec::new())
    }

    pub fn with(mut self, key: &'static str, value: usize) -> Self {
        self.0.push((key, value));
        self
    }

    pub fn get(&self, key: &str) -> Option<usize> {
        self.0.iter().find(|(k, _)| *k == key).map(|&(_, v)| v)
    }

    pub fn entries(&self) -> &[(&'static str, usize)] {
        &self.0
    }
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Builds a [`Witness`] from `key = value` pairs.
#[macro_export]
macro_rules! witness {
    ($($key:ident = $value:expr),* $(,)?) => {
        $crate::report::Witness::new()$(.with(stringify!($key), $value))*
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: &'static str,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawTally {
    pub law: &'static str,
    pub checked: u64,
    pub failed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    cap: usize,
    tallies: Vec<LawTally>,
    /// Stored witnesses per entry of `tallies`.
    stored: Vec<usize>,
    violations: Vec<Violation>,
}

impl Default for Report {
    fn default() -> Self {
        Report::new()
    }
}

impl Report {
    pub fn new() -> Self {
        Report::with_cap(DEFAULT_CAP)
    }

    pub fn with_cap(cap: usize) -> Self {
        Report {
            cap,
            tallies: Vec::new(),
            stored: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn slot(&mut self, law: &'static str) -> usize {
        match self.tallies.iter().position(|t| t.law == law) {
            Some(pos) => pos,
            None => {
                self.tallies.push(LawTally {
                    law,
                    checked: 0,
                    failed: 0,
                });
                self.stored.push(0);
                self.tallies.len() - 1
            }
        }
    }

    /// Stores a witness unless `law` already has `cap` of them.
    fn store(&mut self, pos: usize, violation: impl FnOnce() -> Violation) {
        if self.stored[pos] < self.cap {
            self.stored[pos] += 1;
            self.violations.push(violation());
        }
    }

    /// Registers `n` checked instances of `law`.
    pub fn checked(&mut self, law: &'static str, n: u64) {
        let pos = self.slot(law);
        self.tallies[pos].checked += n;
    }

    /// Records a failing instance. The instance is not counted as checked;
    /// callers count their loop iterations with [`Report::checked`].
    pub fn violation(&mut self, law: &'static str, witness: Witness) {
        let pos = self.slot(law);
        self.tallies[pos].failed += 1;
        self.store(pos, || Violation { law, witness });
    }

    /// Checks one instance: counts it and records `witness()` if `ok` is false.
    pub fn expect(&mut self, law: &'static str, ok: bool, witness: impl FnOnce() -> Witness) {
        let pos = self.slot(law);
        self.tallies[pos].checked += 1;
        if !ok {
            self.tallies[pos].failed += 1;
            self.store(pos, || Violation {
                law,
                witness: witness(),
            });
        }
    }

    /// Appends another report's tallies and witnesses, keeping this report's cap.
    pub fn merge(&mut self, other: Report) {
        for t in other.tallies {
            let pos = self.slot(t.law);
            self.tallies[pos].checked += t.checked;
            self.tallies[pos].failed += t.failed;
        }
        for v in other.violations {
            let pos = self.slot(v.law);
            self.store(pos, || v);
        }
    }

    /// Folds every law of `inner` into the single law `law`, prefixing each
    /// stored witness with `prefix`.
    pub fn absorb(&mut self, law: &'static str, inner: &Report, prefix: &Witness) {
        let pos = self.slot(law);
        for t in &inner.tallies {
            self.tallies[pos].checked += t.checked;
            self.tallies[pos].failed += t.failed;
        }
        for v in &inner.violations {
            self.store(pos, || {
                let mut w = prefix.clone();
                w.0.extend_from_slice(&v.witness.0);
                Violation { law, witness: w }
            });
        }
    }

    pub fn is_empty(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }

    pub fn total_failed(&self) -> u64 {
        self.tallies.iter().map(|t| t.failed).sum()
    }

    pub fn tallies(&self) -> &[LawTally] {
        &self.tallies
    }

    pub fn tally(&self, law: &str) -> Option<&LawTally> {
        self.tallies.iter().find(|t| t.law == law)
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn violations_of<'a>(&'a self, law: &'a str) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| v.law == law)
    }

    pub fn has_violation(&self, law: &str) -> bool {
        self.tally(law).is_some_and(|t| t.failed > 0)
    }

    /// Laws with at least one failure, in first-seen order.
    pub fn failed_laws(&self) -> Vec<&'static str> {
        self.tallies
            .iter()
            .filter(|t| t.failed > 0)
            .map(|t| t.law)
            .collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.tallies {
            let status = if t.failed == 0 { "pass" } else { "FAIL" };
            writeln!(
                f,
                "{status:4} {:<28} checked={} failed={}",
                t.law, t.checked, t.failed
            )?;
        }
        for v in &self.violations {
            writeln!(f, "  {}: {}", v.law, v.witness)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_bounds_witnesses_but_not_counts() {
        let mut r = Report::with_cap(2);
        for i in 0..5 {
            r.expect("law", false, || witness!(i = i));
        }
        r.expect("other", false, || witness!(i = 9));
        assert_eq!(r.violations().len(), 3);
        assert_eq!(r.violations_of("other").count(), 1);
        assert_eq!(r.tally("law").unwrap().failed, 5);
        assert_eq!(r.tally("law").unwrap().checked, 5);
        assert!(!r.is_empty());
    }

    #[test]
    fn witness_serializes_in_insertion_order() {
        let w = witness!(zeta = 3, eta = 1);
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"zeta":3,"eta":1}"#);
    }

    #[test]
    fn merge_adds_tallies() {
        let mut a = Report::new();
        a.checked("x", 3);
        let mut b = Report::new();
        b.expect("x", false, || witness!(k = 1));
        b.checked("y", 2);
        a.merge(b);
        assert_eq!(a.tally("x").unwrap().checked, 4);
        assert_eq!(a.tally("y").unwrap().checked, 2);
        assert_eq!(a.failed_laws(), vec!["x"]);
    }
}
