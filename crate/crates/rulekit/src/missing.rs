//! Missing-completely-at-random gap injection.
//!
//! Each eligible feature cell is masked by an independent seeded Bernoulli
//! draw, so the mask is statistically independent of the stored values. The
//! class column is structurally exempt. Injection composes: cells that are
//! already missing stay missing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Which feature columns an injection plan targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Every feature column.
    All,
    /// A seeded uniform choice of floor(m/2) feature columns.
    Half,
}

impl std::fmt::Display for Scope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scope::All => write!(f, "all"),
            Scope::Half => write!(f, "half"),
        }
    }
}

/// One configured injection: a rate, a column scope and a seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectionPlan {
    pub rate: f64,
    pub scope: Scope,
    pub seed: u64,
    /// Explicit half-scope column subset; drawn from the seed when absent.
    pub half_selection: Option<Vec<usize>>,
    /// Mask an exact count of cells (round(rate * eligible)) instead of
    /// independent per-cell draws.
    pub exact_count: bool,
}

impl InjectionPlan {
    pub fn new(rate: f64, scope: Scope, seed: u64) -> Self {
        InjectionPlan {
            rate,
            scope,
            seed,
            half_selection: None,
            exact_count: false,
        }
    }

    fn validate(&self, n_attributes: usize) -> Result<()> {
        if !(0.0..=0.95).contains(&self.rate) {
            return Err(Error::Config(format!(
                "missing rate must lie in [0, 0.95], got {}",
                self.rate
            )));
        }
        if let Some(sel) = &self.half_selection {
            if self.scope != Scope::Half {
                return Err(Error::Config("half_selection given but scope is not half".into()));
            }
            if sel.len() != n_attributes / 2 {
                return Err(Error::Config(format!(
                    "half_selection has {} columns, expected floor({n_attributes}/2) = {}",
                    sel.len(),
                    n_attributes / 2
                )));
            }
            if sel.iter().any(|&c| c >= n_attributes) {
                return Err(Error::Config("half_selection column out of range".into()));
            }
        }
        Ok(())
    }
}

/// Columns targeted by a plan, resolved against a schema of size m.
fn eligible_columns(plan: &InjectionPlan, m: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match plan.scope {
        Scope::All => (0..m).collect(),
        Scope::Half => match &plan.half_selection {
            Some(sel) => {
                let mut sel = sel.clone();
                sel.sort_unstable();
                sel
            }
            None => {
                let mut cols: Vec<usize> = (0..m).collect();
                cols.shuffle(rng);
                cols.truncate(m / 2);
                cols.sort_unstable();
                cols
            }
        },
    }
}

/// Masks eligible cells of a copy of `data` per the plan and returns it.
pub fn inject_mcar(data: &Dataset, plan: &InjectionPlan) -> Result<Dataset> {
    let m = data.n_attributes();
    plan.validate(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let cols = eligible_columns(plan, m, &mut rng);

    let mut mask: Vec<(usize, usize)> = Vec::new();
    if plan.exact_count {
        let mut slots: Vec<(usize, usize)> = (0..data.n_rows())
            .flat_map(|r| cols.iter().map(move |&c| (r, c)))
            .collect();
        let target = (plan.rate * slots.len() as f64).round() as usize;
        slots.shuffle(&mut rng);
        mask.extend(slots.into_iter().take(target));
    } else {
        for r in 0..data.n_rows() {
            for &c in &cols {
                if rng.gen::<f64>() < plan.rate {
                    mask.push((r, c));
                }
            }
        }
    }
    Ok(data.with_masked(&mask))
}

/// Splitmix-style seed derivation so every grid cell gets an independent
/// stream from one benchmark seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(index.wrapping_mul(0xbf58_476d_1ce4_e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Builds the benchmark grid: one injected copy of `test` per
/// (level, scope) pair, in level-major order with scope All before Half.
/// When `include_clean` is set, the untouched test set is prepended as a
/// rate-0, all-scope cell.
pub fn build_test_grid(
    test: &Dataset,
    levels: &[f64],
    seed: u64,
    include_clean: bool,
) -> Result<Vec<(InjectionPlan, Dataset)>> {
    if levels.is_empty() {
        return Err(Error::Config("no missingness levels given".into()));
    }
    if let Some(&bad) = levels.iter().find(|&&l| !(l > 0.0 && l <= 0.95)) {
        return Err(Error::Config(format!(
            "missingness levels must lie in (0, 0.95], got {bad}"
        )));
    }
    let mut grid = Vec::with_capacity(levels.len() * 2 + usize::from(include_clean));
    if include_clean {
        let plan = InjectionPlan::new(0.0, Scope::All, derive_seed(seed, 0));
        grid.push((plan, test.clone()));
    }
    for (i, &level) in levels.iter().enumerate() {
        for (j, scope) in [Scope::All, Scope::Half].into_iter().enumerate() {
            let plan = InjectionPlan::new(
                level,
                scope,
                derive_seed(seed, (1 + i * 2 + j) as u64),
            );
            let injected = inject_mcar(test, &plan)?;
            grid.push((plan, injected));
        }
    }
    Ok(grid)
}

/// Fraction of missing cells among the given columns.
pub fn measure_missing_rate(data: &Dataset, scope: &[usize]) -> Result<f64> {
    if scope.is_empty() {
        return Err(Error::Config("missing-rate scope is empty".into()));
    }
    if let Some(&bad) = scope.iter().find(|&&c| c >= data.n_attributes()) {
        return Err(Error::Data(format!("scope column {bad} out of range")));
    }
    let total = data.n_rows() * scope.len();
    if total == 0 {
        return Ok(0.0);
    }
    let missing = (0..data.n_rows())
        .map(|r| scope.iter().filter(|&&c| data.cell(r, c).is_none()).count())
        .sum::<usize>();
    Ok(missing as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeKind, Dataset};
    use ndarray::Array2;
    use rand::RngCore;

    fn grid_data(n: usize, m: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let features = Array2::from_shape_fn((n, m), |_| rng.next_u32() as f64 / u32::MAX as f64);
        Dataset::from_array(
            (0..m).map(|i| format!("x{i}")).collect(),
            AttributeKind::Continuous,
            &features,
            "cls".into(),
            vec!["a".into(), "b".into()],
            (0..n).map(|i| i % 2).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rate_zero_is_identity() {
        let data = grid_data(20, 5);
        let out = inject_mcar(&data, &InjectionPlan::new(0.0, Scope::All, 3)).unwrap();
        assert_eq!(out, data);
    }

    #[test]
    fn realized_count_within_binomial_bounds() {
        // 100x10 cells at rate 0.25: mean 250, 3 sigma ~ 41.
        let data = grid_data(100, 10);
        let out = inject_mcar(&data, &InjectionPlan::new(0.25, Scope::All, 11)).unwrap();
        let missing = out.missing_cell_count();
        assert!((209..=291).contains(&missing), "missing = {missing}");
    }

    #[test]
    fn half_scope_touches_exactly_half_the_columns() {
        let data = grid_data(200, 10);
        let out = inject_mcar(&data, &InjectionPlan::new(0.10, Scope::Half, 5)).unwrap();
        let touched: Vec<usize> = (0..10)
            .filter(|&c| (0..200).any(|r| data.cell(r, c).is_some() && out.cell(r, c).is_none()))
            .collect();
        assert_eq!(touched.len(), 5, "touched columns: {touched:?}");
        let untouched = (0..10).filter(|c| !touched.contains(c)).count();
        assert_eq!(untouched, 5);
    }

    #[test]
    fn explicit_half_selection_is_honored() {
        let data = grid_data(50, 6);
        let mut plan = InjectionPlan::new(0.5, Scope::Half, 1);
        plan.half_selection = Some(vec![0, 2, 4]);
        let out = inject_mcar(&data, &plan).unwrap();
        for c in [1usize, 3, 5] {
            for r in 0..50 {
                assert_eq!(out.cell(r, c), data.cell(r, c));
            }
        }
        let hit = (0..50).any(|r| out.cell(r, 0).is_none());
        assert!(hit);
    }

    #[test]
    fn half_selection_size_is_validated() {
        let data = grid_data(10, 6);
        let mut plan = InjectionPlan::new(0.5, Scope::Half, 1);
        plan.half_selection = Some(vec![0, 1]);
        assert!(matches!(inject_mcar(&data, &plan), Err(Error::Config(_))));
    }

    #[test]
    fn rate_out_of_range_is_config_error() {
        let data = grid_data(5, 3);
        for rate in [-0.1, 0.951, 1.5] {
            let res = inject_mcar(&data, &InjectionPlan::new(rate, Scope::All, 0));
            assert!(matches!(res, Err(Error::Config(_))), "rate {rate}");
        }
    }

    #[test]
    fn exact_count_mode_hits_target_exactly() {
        let data = grid_data(40, 10);
        let mut plan = InjectionPlan::new(0.3, Scope::All, 8);
        plan.exact_count = true;
        let out = inject_mcar(&data, &plan).unwrap();
        assert_eq!(out.missing_cell_count(), 120);
    }

    #[test]
    fn injection_composes_on_prior_missingness() {
        let data = grid_data(50, 4);
        let first = inject_mcar(&data, &InjectionPlan::new(0.4, Scope::All, 1)).unwrap();
        let second = inject_mcar(&first, &InjectionPlan::new(0.4, Scope::All, 2)).unwrap();
        for r in 0..50 {
            for c in 0..4 {
                if first.cell(r, c).is_none() {
                    assert_eq!(second.cell(r, c), None);
                }
            }
        }
        assert!(second.missing_cell_count() >= first.missing_cell_count());
    }

    #[test]
    fn grid_has_two_cells_per_level_and_is_deterministic() {
        let data = grid_data(30, 8);
        let levels = [0.10, 0.25, 0.30, 0.40, 0.50];
        let grid = build_test_grid(&data, &levels, 7, false).unwrap();
        assert_eq!(grid.len(), 10);
        let again = build_test_grid(&data, &levels, 7, false).unwrap();
        assert_eq!(grid, again);

        let single = build_test_grid(&data, &[0.5], 7, false).unwrap();
        assert_eq!(single.len(), 2);

        let with_clean = build_test_grid(&data, &levels, 7, true).unwrap();
        assert_eq!(with_clean.len(), 11);
        assert_eq!(with_clean[0].1, data);
    }

    #[test]
    fn measured_rate_matches_target_over_many_cells() {
        // 10^5 eligible cells at rate 0.5; binomial 3 sigma ~ 0.0047.
        let data = grid_data(10_000, 10);
        let out = inject_mcar(&data, &InjectionPlan::new(0.5, Scope::All, 21)).unwrap();
        let cols: Vec<usize> = (0..10).collect();
        let rate = measure_missing_rate(&out, &cols).unwrap();
        assert!((rate - 0.5).abs() < 0.005, "rate = {rate}");
    }

    #[test]
    fn complete_data_measures_zero() {
        let data = grid_data(10, 4);
        let cols: Vec<usize> = (0..4).collect();
        assert_eq!(measure_missing_rate(&data, &cols).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_scope_rates_combine_by_weighted_average() {
        let data = grid_data(500, 6);
        let out = inject_mcar(&data, &InjectionPlan::new(0.3, Scope::Half, 13)).unwrap();
        let left: Vec<usize> = (0..3).collect();
        let right: Vec<usize> = (3..6).collect();
        let all: Vec<usize> = (0..6).collect();
        let r_left = measure_missing_rate(&out, &left).unwrap();
        let r_right = measure_missing_rate(&out, &right).unwrap();
        let r_all = measure_missing_rate(&out, &all).unwrap();
        let combined = (r_left * 3.0 + r_right * 3.0) / 6.0;
        assert!((combined - r_all).abs() < 1e-12);
    }

    #[test]
    fn rate_monotonicity_in_realized_counts() {
        let data = grid_data(10_000, 10);
        let lo = inject_mcar(&data, &InjectionPlan::new(0.2, Scope::All, 17)).unwrap();
        let hi = inject_mcar(&data, &InjectionPlan::new(0.6, Scope::All, 17)).unwrap();
        assert!(lo.missing_cell_count() < hi.missing_cell_count());
    }

    #[test]
    fn mask_is_independent_of_cell_values() {
        // MCAR check: mean of masked vs unmasked values of one column,
        // averaged over seeds, should agree closely.
        let data = grid_data(2_000, 3);
        let mut masked_sum = 0.0;
        let mut masked_n = 0usize;
        let mut kept_sum = 0.0;
        let mut kept_n = 0usize;
        for seed in 0..40 {
            let out = inject_mcar(&data, &InjectionPlan::new(0.4, Scope::All, seed)).unwrap();
            for r in 0..data.n_rows() {
                let v = data.cell(r, 0).unwrap();
                if out.cell(r, 0).is_none() {
                    masked_sum += v;
                    masked_n += 1;
                } else {
                    kept_sum += v;
                    kept_n += 1;
                }
            }
        }
        let diff = (masked_sum / masked_n as f64 - kept_sum / kept_n as f64).abs();
        assert!(diff < 0.01, "mean gap between masked and kept values: {diff}");
    }
}
