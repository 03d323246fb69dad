//! Rule growing, pruning and the per-class induction loop.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{class_prevalence_order, split_grow_prune, Dataset};
use crate::error::{Error, Result};
use crate::ripper::mdl::{description_length_with, possible_conditions};
use crate::ripper::{Condition, Op, RipperConfig, Rule, RuleSet};

/// FOIL information gain of refining a rule from (p0, n0) covered
/// positives/negatives to (p1, n1).
pub(crate) fn foil_gain(p0: f64, n0: f64, p1: f64, n1: f64) -> f64 {
    if p1 <= 0.0 || p0 <= 0.0 {
        return f64::NEG_INFINITY;
    }
    p1 * ((p1 / (p1 + n1)).log2() - (p0 / (p0 + n0)).log2())
}

/// Best single condition over the currently covered instances, with its
/// gain. Candidate thresholds are midpoints between consecutive distinct
/// observed values; instances missing the tested attribute count as not
/// covered. Ties resolve to the lowest attribute, `<=` before `>=`, then
/// the smallest threshold.
fn best_condition(
    pos: &Dataset,
    neg: &Dataset,
    pos_covered: &[usize],
    neg_covered: &[usize],
) -> Option<(Condition, f64)> {
    let p0 = pos_covered.len() as f64;
    let n0 = neg_covered.len() as f64;
    let mut best: Option<(Condition, f64)> = None;

    for attr in 0..pos.n_attributes() {
        let mut pos_vals: Vec<f64> = pos_covered.iter().filter_map(|&r| pos.cell(r, attr)).collect();
        let mut neg_vals: Vec<f64> = neg_covered.iter().filter_map(|&r| neg.cell(r, attr)).collect();
        pos_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        neg_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut distinct: Vec<f64> = Vec::with_capacity(pos_vals.len() + neg_vals.len());
        distinct.extend_from_slice(&pos_vals);
        distinct.extend_from_slice(&neg_vals);
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        if distinct.len() < 2 {
            continue;
        }

        let (mut pi, mut ni) = (0usize, 0usize);
        for i in 0..distinct.len() - 1 {
            let v = distinct[i];
            while pi < pos_vals.len() && pos_vals[pi] <= v {
                pi += 1;
            }
            while ni < neg_vals.len() && neg_vals[ni] <= v {
                ni += 1;
            }
            let threshold = 0.5 * (v + distinct[i + 1]);
            let (p_le, n_le) = (pi as f64, ni as f64);
            let p_ge = pos_vals.len() as f64 - p_le;
            let n_ge = neg_vals.len() as f64 - n_le;
            for (op, p1, n1) in [(Op::Le, p_le, n_le), (Op::Ge, p_ge, n_ge)] {
                let gain = foil_gain(p0, n0, p1, n1);
                if gain > best.map_or(f64::NEG_INFINITY, |(_, g)| g) {
                    best = Some((
                        Condition {
                            attribute: attr,
                            op,
                            threshold,
                        },
                        gain,
                    ));
                }
            }
        }
    }
    best
}

/// Extends `rule` with gain-maximal conditions until it covers no negative
/// instance or no condition has positive gain. The covered index lists are
/// shrunk in step.
fn grow_into(
    rule: &mut Rule,
    pos: &Dataset,
    neg: &Dataset,
    pos_covered: &mut Vec<usize>,
    neg_covered: &mut Vec<usize>,
) {
    while !neg_covered.is_empty() {
        let Some((cond, gain)) = best_condition(pos, neg, pos_covered, neg_covered) else {
            break;
        };
        if gain <= 0.0 {
            break;
        }
        rule.push_condition(cond);
        pos_covered.retain(|&r| cond.satisfied(pos.row(r)));
        neg_covered.retain(|&r| cond.satisfied(neg.row(r)));
    }
}

/// Greedily grows one rule for `target` on the growing sets.
pub fn grow_rule(grow_pos: &Dataset, grow_neg: &Dataset, target: usize) -> Rule {
    let mut rule = Rule::new(target);
    let mut pos_covered: Vec<usize> = (0..grow_pos.n_rows()).collect();
    let mut neg_covered: Vec<usize> = (0..grow_neg.n_rows()).collect();
    grow_into(&mut rule, grow_pos, grow_neg, &mut pos_covered, &mut neg_covered);
    rule
}

/// Covered positive/negative counts of a condition list on a pos/neg pair.
fn covered_counts(conds: &[Condition], pos: &Dataset, neg: &Dataset) -> (usize, usize) {
    let covers = |d: &Dataset, r: usize| conds.iter().all(|c| c.satisfied(d.row(r)));
    let p = (0..pos.n_rows()).filter(|&r| covers(pos, r)).count();
    let n = (0..neg.n_rows()).filter(|&r| covers(neg, r)).count();
    (p, n)
}

/// Pruning objective v = (p - n) / (p + n) on the pruning sets; -1 when the
/// candidate covers nothing, so empty coverage is never preferred.
pub(crate) fn prune_value(conds: &[Condition], prune_pos: &Dataset, prune_neg: &Dataset) -> f64 {
    let (p, n) = covered_counts(conds, prune_pos, prune_neg);
    if p + n == 0 {
        -1.0
    } else {
        (p as f64 - n as f64) / (p as f64 + n as f64)
    }
}

/// Deletes the final-suffix of conditions that maximizes v on the pruning
/// sets; ties favor the shorter rule. A rule is never pruned to empty.
pub fn prune_rule(rule: &Rule, prune_pos: &Dataset, prune_neg: &Dataset) -> Rule {
    if rule.conditions.is_empty() {
        return rule.clone();
    }
    let mut best_len = rule.conditions.len();
    let mut best_v = f64::NEG_INFINITY;
    for k in (1..=rule.conditions.len()).rev() {
        let v = prune_value(&rule.conditions[..k], prune_pos, prune_neg);
        if v >= best_v {
            best_v = v;
            best_len = k;
        }
    }
    Rule {
        conditions: rule.conditions[..best_len].to_vec(),
        target_class: rule.target_class,
    }
}

/// Grows, prunes and screens rules for one class, appending accepted rules
/// and removing the positives they cover from `working`. Stops on rule
/// rejection (covered error rate above the threshold on the pruning sets),
/// lack of coverage progress, or the description-length budget.
fn cover_class(
    rules: &mut Vec<Rule>,
    working: &mut Vec<usize>,
    target: usize,
    train: &Dataset,
    config: &RipperConfig,
    default_class: usize,
    n_possible: f64,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    let mut min_dl = description_length_with(
        &RuleSet {
            rules: rules.clone(),
            default_class,
        },
        train,
        n_possible,
    );

    loop {
        let pos_rows: Vec<usize> = working
            .iter()
            .copied()
            .filter(|&r| train.class_of(r) == target)
            .collect();
        if pos_rows.is_empty() {
            break;
        }
        let neg_rows: Vec<usize> = working
            .iter()
            .copied()
            .filter(|&r| train.class_of(r) != target)
            .collect();
        if neg_rows.is_empty() {
            break;
        }

        let pos = train.subset(&pos_rows);
        let neg = train.subset(&neg_rows);
        let pos_split = split_grow_prune(&pos, config.grow_ratio, rng.next_u64())?;
        let neg_split = split_grow_prune(&neg, config.grow_ratio, rng.next_u64())?;

        let grown = grow_rule(&pos_split.grow, &neg_split.grow, target);
        if grown.conditions.is_empty() {
            break;
        }
        let pruned = prune_rule(&grown, &pos_split.prune, &neg_split.prune);

        let (p, n) = covered_counts(&pruned.conditions, &pos_split.prune, &neg_split.prune);
        if p + n == 0 {
            break;
        }
        let error = n as f64 / (p + n) as f64;
        if error > config.rule_error_threshold {
            break;
        }

        // Every accepted rule must claim at least one remaining positive.
        let covered_pos: Vec<usize> = pos_rows
            .iter()
            .copied()
            .filter(|&r| pruned.covers(train.row(r)))
            .collect();
        if covered_pos.is_empty() {
            break;
        }

        rules.push(pruned);
        working.retain(|r| !covered_pos.contains(r));

        let dl = description_length_with(
            &RuleSet {
                rules: rules.clone(),
                default_class,
            },
            train,
            n_possible,
        );
        if dl < min_dl {
            min_dl = dl;
        } else if dl > min_dl + config.mdl_slack_bits {
            break;
        }
    }
    Ok(())
}

/// Induces a decision list on the training data: classes are processed from
/// least to most prevalent, the most prevalent becomes the default.
pub fn induce(train: &Dataset, config: &RipperConfig) -> Result<RuleSet> {
    config.validate()?;
    let counts = train.class_counts();
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::Data(
            "rule induction needs at least 2 classes present".into(),
        ));
    }

    let order = class_prevalence_order(train);
    let default_class = *order.last().unwrap();
    let n_possible = possible_conditions(train);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut rules: Vec<Rule> = Vec::new();
    let mut working: Vec<usize> = (0..train.n_rows()).collect();
    for &target in &order[..order.len() - 1] {
        if counts[target] == 0 {
            continue;
        }
        cover_class(
            &mut rules,
            &mut working,
            target,
            train,
            config,
            default_class,
            n_possible,
            &mut rng,
        )?;
    }

    let mut ruleset = RuleSet {
        rules,
        default_class,
    };
    if config.optimize_rounds > 0 {
        optimize(&mut ruleset, train, config, n_possible, &mut rng)?;
    }
    Ok(ruleset)
}

/// Replacement/revision pass: each rule competes against a freshly grown
/// replacement and a literal-extended revision; the variant giving the
/// smallest total description length stays. A mop-up then covers positives
/// the revised list no longer reaches.
fn optimize(
    ruleset: &mut RuleSet,
    train: &Dataset,
    config: &RipperConfig,
    n_possible: f64,
    rng: &mut ChaCha8Rng,
) -> Result<()> {
    for _ in 0..config.optimize_rounds {
        for i in 0..ruleset.rules.len() {
            let target = ruleset.rules[i].target_class;
            // Rows the earlier rules do not already claim.
            let context: Vec<usize> = (0..train.n_rows())
                .filter(|&r| !ruleset.rules[..i].iter().any(|ru| ru.covers(train.row(r))))
                .collect();
            let pos_rows: Vec<usize> = context
                .iter()
                .copied()
                .filter(|&r| train.class_of(r) == target)
                .collect();
            let neg_rows: Vec<usize> = context
                .iter()
                .copied()
                .filter(|&r| train.class_of(r) != target)
                .collect();
            if pos_rows.len() < 2 || neg_rows.len() < 2 {
                continue;
            }
            let pos = train.subset(&pos_rows);
            let neg = train.subset(&neg_rows);
            let pos_split = split_grow_prune(&pos, config.grow_ratio, rng.next_u64())?;
            let neg_split = split_grow_prune(&neg, config.grow_ratio, rng.next_u64())?;

            let replacement = prune_rule(
                &grow_rule(&pos_split.grow, &neg_split.grow, target),
                &pos_split.prune,
                &neg_split.prune,
            );

            let mut revision = ruleset.rules[i].clone();
            let mut pc: Vec<usize> = (0..pos_split.grow.n_rows())
                .filter(|&r| revision.covers(pos_split.grow.row(r)))
                .collect();
            let mut nc: Vec<usize> = (0..neg_split.grow.n_rows())
                .filter(|&r| revision.covers(neg_split.grow.row(r)))
                .collect();
            grow_into(&mut revision, &pos_split.grow, &neg_split.grow, &mut pc, &mut nc);
            let revision = prune_rule(&revision, &pos_split.prune, &neg_split.prune);

            let original = ruleset.rules[i].clone();
            let mut best_rule = original.clone();
            let mut best_dl = f64::INFINITY;
            for candidate in [original, replacement, revision] {
                if candidate.conditions.is_empty() {
                    continue;
                }
                let mut trial = ruleset.clone();
                trial.rules[i] = candidate.clone();
                let dl = description_length_with(&trial, train, n_possible);
                if dl < best_dl {
                    best_dl = dl;
                    best_rule = candidate;
                }
            }
            ruleset.rules[i] = best_rule;
        }

        // Mop-up: rerun the covering loop on whatever the list now misses.
        let mut working: Vec<usize> = (0..train.n_rows())
            .filter(|&r| !ruleset.rules.iter().any(|ru| ru.covers(train.row(r))))
            .collect();
        let order = class_prevalence_order(train);
        let default_class = ruleset.default_class;
        for &target in &order[..order.len() - 1] {
            cover_class(
                &mut ruleset.rules,
                &mut working,
                target,
                train,
                config,
                default_class,
                n_possible,
                rng,
            )?;
        }
    }
    Ok(())
}
