//! Histogram distances built on the Poisson-Binomial Radius, distance-RBF
//! kernels, a precomputed-kernel SVM, and the statistics used to evaluate
//! them.
//!
//! ```
//! use pbr_core::{pbr, FeatureVector};
//!
//! let x = FeatureVector::new(vec![1.0, 15.0, 24.0, 32.0, 2.0])?.normalize()?;
//! let y = FeatureVector::new(vec![3.0, 15.0, 26.0, 33.0, 52.0])?.normalize()?;
//! let d = pbr(&x, &y)?;
//! assert!((d - 0.0437632).abs() < 1e-6);
//! # Ok::<(), pbr_core::Error>(())
//! ```

pub mod dataio;
pub mod distances;
pub mod error;
pub mod harness;
pub mod histcore;
pub mod kernels;
pub mod pbd;
pub mod stats;
pub mod svm;

pub use dataio::{load_any, load_csv, save_any, save_csv, synth_dirichlet, toy_fixture, SynthParams};
pub use distances::{difference_vector, evaluate, evaluate_flagged, pbr, DifferenceVector, Evaluation, MeasureId};
pub use error::{Error, Result};
pub use harness::{
    compare_methods, grid_search, macro_accuracy, run_benchmark, BenchmarkConfig, BenchmarkReport, ChosenParams,
    GridSpec, MethodReport, SignificanceMatrix,
};
pub use histcore::{normalize, Dataset, FeatureVector};
pub use kernels::{check_pd, gram, kernel_value, BaseMatrix, GramMatrix, KernelFamily, KernelSpec, PdAudit};
pub use pbd::{lecam_check, pb_moments, pb_pmf, BernoulliVector, LeCamCheck, Pmf};
pub use stats::{
    audit_feature_distributions, bonferroni, ks_two_sample, wilcoxon_signed_rank, AuditReport, TestKind, TestResult,
};
pub use svm::{
    decision_value, predict_ovr, train_binary, train_ovr, BinaryProblem, ModelDocument, OvrModel, SmoConfig, SvmModel,
};
