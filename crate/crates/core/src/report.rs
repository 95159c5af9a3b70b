//! Named slack lists returned by every membership test.

use std::fmt;

/// One evaluated constraint. The constraint holds when `value >= -floor`.
///
/// For linear constraints `value` is the signed slack and `floor` is the
/// linear tolerance; for semidefinite constraints `value` is the smallest
/// eigenvalue and `floor` the scaled eigenvalue floor.
#[derive(Debug, Clone, PartialEq)]
pub struct Slack {
    pub name: String,
    pub value: f64,
    pub floor: f64,
}

impl Slack {
    pub fn new(name: impl Into<String>, value: f64, floor: f64) -> Self {
        Self { name: name.into(), value, floor }
    }

    pub fn holds(&self) -> bool {
        self.value >= -self.floor
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub slacks: Vec<Slack>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, value: f64, floor: f64) {
        self.slacks.push(Slack::new(name, value, floor));
    }

    pub fn extend(&mut self, other: Report) {
        self.slacks.extend(other.slacks);
    }

    /// Prefixes every constraint name, used when composing reports.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for s in &mut self.slacks {
            s.name = format!("{prefix}{}", s.name);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.slacks.iter().all(Slack::holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Slack> {
        self.slacks.iter().filter(|s| !s.holds())
    }

    pub fn get(&self, name: &str) -> Option<&Slack> {
        self.slacks.iter().find(|s| s.name == name)
    }

    /// Smallest slack relative to its floor; negative iff some constraint fails.
    pub fn worst(&self) -> Option<&Slack> {
        self.slacks.iter().min_by(|a, b| (a.value + a.floor).total_cmp(&(b.value + b.floor)))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bad: Vec<_> = self.violations().collect();
        if bad.is_empty() {
            return write!(f, "all {} constraints hold", self.slacks.len());
        }
        write!(f, "{} violated:", bad.len())?;
        for s in bad {
            write!(f, " [{} = {:.3e}]", s.name, s.value)?;
        }
        Ok(())
    }
}
