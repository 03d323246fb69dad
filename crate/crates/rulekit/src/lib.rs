//! Rule-induction toolkit: the RIPPER decision-list learner, PCA and
//! Bayesian-evidence ARD feature-selection front-ends, and a benchmark
//! harness that measures classification accuracy under controlled
//! missing-completely-at-random gap injection.

pub mod dataset;
pub mod error;
pub mod linalg;
pub mod pca;
pub mod ripper;
pub mod missing;

pub use dataset::{
    class_prevalence_order, load_csv, save_csv, split_grow_prune, AttributeKind, AttributeSpec,
    CsvOptions, Dataset, SplitPair,
};
pub use error::{Error, Result};
pub use missing::{build_test_grid, inject_mcar, measure_missing_rate, InjectionPlan, Scope};
