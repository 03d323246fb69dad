//! RIPPER decision-list learner: per-class grow/prune rule induction with
//! FOIL-gain growing, (p-n)/(p+n) pruning, error-rate and
//! description-length stopping, and missing-aware classification.
//!
//! Classes are learned from least to most prevalent; the most prevalent
//! class becomes the default. A condition tested against a missing value is
//! unsatisfied, both during training coverage counting and at
//! classification time.

mod induce;
mod mdl;

pub use induce::{grow_rule, induce, prune_rule};
pub use mdl::description_length;

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeSpec, Dataset};
use crate::error::{Error, Result};

/// Comparison operator of a rule condition. Equality is reserved for
/// categorical-numeric attributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Le,
    Ge,
    Eq,
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Op::Le => write!(f, "<="),
            Op::Ge => write!(f, ">="),
            Op::Eq => write!(f, "="),
        }
    }
}

/// One antecedent literal: `attribute op threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub attribute: usize,
    pub op: Op,
    pub threshold: f64,
}

impl Condition {
    /// A missing value never satisfies a condition.
    pub fn satisfied(&self, row: &[Option<f64>]) -> bool {
        match row[self.attribute] {
            None => false,
            Some(v) => match self.op {
                Op::Le => v <= self.threshold,
                Op::Ge => v >= self.threshold,
                Op::Eq => v == self.threshold,
            },
        }
    }
}

/// A conjunctive rule predicting `target_class`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub target_class: usize,
}

impl Rule {
    pub fn new(target_class: usize) -> Self {
        Rule {
            conditions: Vec::new(),
            target_class,
        }
    }

    pub fn covers(&self, row: &[Option<f64>]) -> bool {
        self.conditions.iter().all(|c| c.satisfied(row))
    }

    /// Adds a condition, tightening in place when one with the same
    /// (attribute, operator) pair already exists. Keeps the invariant that
    /// no pair repeats.
    pub fn push_condition(&mut self, cond: Condition) {
        if let Some(existing) = self
            .conditions
            .iter_mut()
            .find(|c| c.attribute == cond.attribute && c.op == cond.op)
        {
            existing.threshold = match cond.op {
                Op::Le => existing.threshold.min(cond.threshold),
                Op::Ge => existing.threshold.max(cond.threshold),
                Op::Eq => cond.threshold,
            };
        } else {
            self.conditions.push(cond);
        }
    }
}

/// An ordered decision list with a default class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub default_class: usize,
}

impl RuleSet {
    /// First-match classification; falls through to the default class.
    pub fn classify(&self, row: &[Option<f64>]) -> usize {
        for rule in &self.rules {
            if rule.covers(row) {
                return rule.target_class;
            }
        }
        self.default_class
    }

    /// Fraction of rows whose predicted class equals the recorded class.
    pub fn accuracy(&self, data: &Dataset) -> f64 {
        if data.n_rows() == 0 {
            return 0.0;
        }
        let hits = (0..data.n_rows())
            .filter(|&r| self.classify(data.row(r)) == data.class_of(r))
            .count();
        hits as f64 / data.n_rows() as f64
    }

    /// Human-readable text form, one rule per line, final default line.
    pub fn render(&self, schema: &[AttributeSpec], class_labels: &[String]) -> String {
        let mut out = String::new();
        for rule in &self.rules {
            let body = rule
                .conditions
                .iter()
                .map(|c| format!("({} {} {})", schema[c.attribute].name, c.op, c.threshold))
                .collect::<Vec<_>>()
                .join(" and ");
            out.push_str(&format!("{body} => {}\n", class_labels[rule.target_class]));
        }
        out.push_str(&format!("default => {}\n", class_labels[self.default_class]));
        out
    }
}

/// Induction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipperConfig {
    /// Fraction of each pos/neg subset that goes to the grow side.
    pub grow_ratio: f64,
    /// Stop a class once total description length exceeds the best seen by
    /// this many bits.
    pub mdl_slack_bits: f64,
    /// Reject a rule whose covered error rate on the pruning sets exceeds
    /// this.
    pub rule_error_threshold: f64,
    pub seed: u64,
    /// Post-induction replacement/revision rounds; 0 disables the pass.
    pub optimize_rounds: usize,
}

impl Default for RipperConfig {
    fn default() -> Self {
        RipperConfig {
            grow_ratio: 2.0 / 3.0,
            mdl_slack_bits: 64.0,
            rule_error_threshold: 0.5,
            seed: 0,
            optimize_rounds: 0,
        }
    }
}

impl RipperConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.grow_ratio > 0.0 && self.grow_ratio < 1.0) {
            return Err(Error::Config(format!(
                "grow_ratio must lie in (0,1), got {}",
                self.grow_ratio
            )));
        }
        if self.mdl_slack_bits <= 0.0 {
            return Err(Error::Config(format!(
                "mdl_slack_bits must be positive, got {}",
                self.mdl_slack_bits
            )));
        }
        if !(self.rule_error_threshold > 0.0 && self.rule_error_threshold <= 1.0) {
            return Err(Error::Config(format!(
                "rule_error_threshold must lie in (0,1], got {}",
                self.rule_error_threshold
            )));
        }
        Ok(())
    }
}
