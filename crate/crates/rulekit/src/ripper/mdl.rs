//! Minimum-description-length accounting for rule sets.
//!
//! Total length = theory bits + exception bits. Theory bits charge each
//! literal the information needed to pick one condition out of all possible
//! threshold conditions on the data. Exception bits charge the binomial
//! cost of identifying the false positives among covered rows and the false
//! negatives among uncovered rows.

use crate::dataset::Dataset;
use crate::ripper::RuleSet;

/// Number of distinct threshold conditions available on `data`: two
/// operators per midpoint between consecutive distinct observed values of
/// each attribute. Clamped to 2 so a literal is never free.
pub(crate) fn possible_conditions(data: &Dataset) -> f64 {
    let mut total = 0usize;
    for attr in 0..data.n_attributes() {
        let mut values: Vec<f64> = (0..data.n_rows()).filter_map(|r| data.cell(r, attr)).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        if values.len() > 1 {
            total += 2 * (values.len() - 1);
        }
    }
    (total as f64).max(2.0)
}

/// log2 of (n choose k), exact up to float rounding.
fn log2_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut bits = 0.0;
    for i in 0..k {
        bits += ((n - i) as f64).log2() - ((i + 1) as f64).log2();
    }
    bits
}

/// Total description length of `ruleset` with respect to `data`, in bits.
pub fn description_length(ruleset: &RuleSet, data: &Dataset) -> f64 {
    description_length_with(ruleset, data, possible_conditions(data))
}

pub(crate) fn description_length_with(
    ruleset: &RuleSet,
    data: &Dataset,
    n_possible: f64,
) -> f64 {
    let per_literal = n_possible.log2();
    let theory_bits: f64 = ruleset
        .rules
        .iter()
        .map(|r| r.conditions.len() as f64 * per_literal)
        .sum();

    let mut covered = 0usize;
    let mut false_pos = 0usize;
    let mut uncovered = 0usize;
    let mut false_neg = 0usize;
    for r in 0..data.n_rows() {
        let row = data.row(r);
        match ruleset.rules.iter().find(|rule| rule.covers(row)) {
            Some(rule) => {
                covered += 1;
                if rule.target_class != data.class_of(r) {
                    false_pos += 1;
                }
            }
            None => {
                uncovered += 1;
                if ruleset.default_class != data.class_of(r) {
                    false_neg += 1;
                }
            }
        }
    }
    let exception_bits = log2_choose(covered, false_pos) + log2_choose(uncovered, false_neg);
    theory_bits + exception_bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeKind, Dataset};
    use crate::ripper::{Condition, Op, Rule};
    use ndarray::Array2;

    fn line_data(n: usize, boundary: f64) -> Dataset {
        let features = Array2::from_shape_fn((n, 1), |(r, _)| r as f64);
        let classes = (0..n).map(|r| usize::from((r as f64) >= boundary)).collect();
        Dataset::from_array(
            vec!["x0".into()],
            AttributeKind::Continuous,
            &features,
            "cls".into(),
            vec!["lo".into(), "hi".into()],
            classes,
        )
        .unwrap()
    }

    #[test]
    fn empty_ruleset_on_default_predictable_data_costs_nothing() {
        let features = Array2::from_shape_fn((8, 1), |(r, _)| r as f64);
        let data = Dataset::from_array(
            vec!["x0".into()],
            AttributeKind::Continuous,
            &features,
            "cls".into(),
            vec!["a".into(), "b".into()],
            vec![0, 0, 0, 0, 0, 0, 0, 1],
        )
        .unwrap();
        // Default predicts the majority; the one off-class row costs bits.
        let perfect = RuleSet {
            rules: vec![],
            default_class: 0,
        };
        let l = description_length(&perfect, &data);
        assert!(l > 0.0); // one false negative

        let all_default = Dataset::from_array(
            vec!["x0".into()],
            AttributeKind::Continuous,
            &features,
            "cls".into(),
            vec!["a".into(), "b".into()],
            vec![0; 8],
        );
        // Dataset requires two labels but rows may all share one.
        let data = all_default.unwrap();
        let l = description_length(&perfect, &data);
        assert!(l.abs() < 1e-12, "expected ~0 bits, got {l}");
    }

    #[test]
    fn redundant_rule_strictly_increases_theory_bits() {
        let data = line_data(20, 10.0);
        let rule = Rule {
            conditions: vec![Condition {
                attribute: 0,
                op: Op::Ge,
                threshold: 9.5,
            }],
            target_class: 1,
        };
        let one = RuleSet {
            rules: vec![rule.clone()],
            default_class: 0,
        };
        let two = RuleSet {
            rules: vec![rule.clone(), rule],
            default_class: 0,
        };
        // The duplicate changes no coverage decision, so the difference is
        // pure theory bits.
        let l1 = description_length(&one, &data);
        let l2 = description_length(&two, &data);
        assert!(l2 > l1, "l1 = {l1}, l2 = {l2}");
    }

    #[test]
    fn extra_random_rule_costs_more_than_the_correct_rule_alone() {
        let data = line_data(50, 25.0);
        let correct = Rule {
            conditions: vec![Condition {
                attribute: 0,
                op: Op::Ge,
                threshold: 24.5,
            }],
            target_class: 1,
        };
        let noise = Rule {
            conditions: vec![Condition {
                attribute: 0,
                op: Op::Le,
                threshold: 7.5,
            }],
            target_class: 1,
        };
        let clean = RuleSet {
            rules: vec![correct.clone()],
            default_class: 0,
        };
        let noisy = RuleSet {
            rules: vec![correct, noise],
            default_class: 0,
        };
        let l_clean = description_length(&clean, &data);
        let l_noisy = description_length(&noisy, &data);
        assert!(
            l_clean < l_noisy,
            "clean {l_clean} bits should undercut noisy {l_noisy} bits"
        );
    }

    #[test]
    fn exception_bits_match_direct_binomial_computation() {
        // 20 rows, rule covers rows >= 9.5 (positives but also two
        // mislabeled), so fp and fn are known exactly.
        let data = line_data(20, 10.0);
        let rs = RuleSet {
            rules: vec![Rule {
                conditions: vec![Condition {
                    attribute: 0,
                    op: Op::Ge,
                    threshold: 7.5,
                }],
                target_class: 1,
            }],
            default_class: 0,
        };
        // Coverage: rows 8..19 (12 rows), fp = rows 8,9 (class lo) = 2.
        // Uncovered: rows 0..7, all class lo, fn = 0.
        let n_possible = possible_conditions(&data);
        let expected_theory = n_possible.log2();
        let expected_exceptions = {
            // log2 C(12,2) = log2 66
            (66.0f64).log2()
        };
        let l = description_length(&rs, &data);
        assert!((l - expected_theory - expected_exceptions).abs() < 1e-9);
    }

    #[test]
    fn possible_conditions_counts_midpoints() {
        // one attribute, 20 distinct values -> 19 midpoints, 2 ops.
        let data = line_data(20, 10.0);
        assert_eq!(possible_conditions(&data), 38.0);
    }
}
