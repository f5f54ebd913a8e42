//! Repeated train/test benchmarking with cross-validated hyperparameters and
//! paired significance testing between methods.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histcore::Dataset;
use crate::kernels::{BaseMatrix, KernelFamily, KernelSpec};
use crate::stats::{median_sorted, wilcoxon_signed_rank};
use crate::svm::{count_svs, predict_ovr, train_ovr, SmoConfig};

/// Mixes a base seed with a stream index (SplitMix64 finalizer), so that
/// independent streams can be derived without sharing one generator.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hyperparameter grid. `C = 2^log2_c`, `gamma = 2^log2_gamma`; polynomial
/// kernels search `degrees` instead of `gamma`, linear kernels only `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub log2_c: Vec<i32>,
    pub log2_gamma: Vec<i32>,
    pub degrees: Vec<u32>,
}

impl Default for GridSpec {
    /// `log2 C` in `-2..=16` and `log2 gamma` in `-4..=8`, both in steps of
    /// 2, and degrees `1..=5`.
    fn default() -> Self {
        Self {
            log2_c: (-2..=16).step_by(2).collect(),
            log2_gamma: (-4..=8).step_by(2).collect(),
            degrees: (1..=5).collect(),
        }
    }
}

impl GridSpec {
    /// A custom grid. Values are sorted and deduplicated so that ties in
    /// cross-validation accuracy resolve towards smaller values.
    pub fn new(mut log2_c: Vec<i32>, mut log2_gamma: Vec<i32>, mut degrees: Vec<u32>) -> Result<Self> {
        for v in [&mut log2_c, &mut log2_gamma] {
            v.sort_unstable();
            v.dedup();
        }
        degrees.sort_unstable();
        degrees.dedup();
        if log2_c.is_empty() || log2_gamma.is_empty() || degrees.is_empty() {
            return Err(Error::InvalidParameter("grid axes must be non-empty".into()));
        }
        if log2_c.iter().chain(&log2_gamma).any(|e| e.abs() > 60) {
            return Err(Error::InvalidParameter("grid exponents must lie in -60..=60".into()));
        }
        if degrees.iter().any(|d| !(1..=5).contains(d)) {
            return Err(Error::InvalidParameter("degrees must lie in 1..=5".into()));
        }
        Ok(Self {
            log2_c,
            log2_gamma,
            degrees,
        })
    }

    /// Kernel candidates for `family`, in ascending hyperparameter order.
    pub fn kernels(&self, family: KernelFamily) -> Vec<KernelSpec> {
        match family {
            KernelFamily::Linear => vec![KernelSpec::Linear],
            KernelFamily::Polynomial => self
                .degrees
                .iter()
                .map(|&degree| KernelSpec::Polynomial { degree })
                .collect(),
            KernelFamily::DRbf(measure) => self
                .log2_gamma
                .iter()
                .map(|&g| KernelSpec::DRbf {
                    measure,
                    gamma: 2f64.powi(g),
                })
                .collect(),
        }
    }
}

/// Hyperparameters picked by cross-validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChosenParams {
    pub log2_c: i32,
    pub c: f64,
    pub kernel: KernelSpec,
    /// Mean macro accuracy over the validation folds, in percent.
    pub cv_accuracy: f64,
}

/// Mean of per-class accuracies in percent, over classes present in `labels`.
pub fn macro_accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput);
    }
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |&m| m + 1);
    let mut total = vec![0usize; k];
    let mut correct = vec![0usize; k];
    for (&p, &l) in predictions.iter().zip(labels) {
        total[l] += 1;
        if p == l {
            correct[l] += 1;
        }
    }
    let (sum, present) = total
        .iter()
        .zip(&correct)
        .filter(|(&t, _)| t > 0)
        .fold((0.0, 0usize), |(s, n), (&t, &c)| (s + c as f64 / t as f64, n + 1));
    Ok(100.0 * sum / present as f64)
}

/// Assigns each position to one of `folds` folds so that every class is
/// spread as evenly as possible. Needs at least `folds` members per class.
pub fn stratified_folds(labels: &[usize], num_classes: usize, folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidParameter("at least 2 folds are needed".into()));
    }
    let mut by_class = vec![Vec::new(); num_classes];
    for (i, &l) in labels.iter().enumerate() {
        if l >= num_classes {
            return Err(Error::InvalidDataset(format!("label {l} out of range")));
        }
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for (class, mut members) in by_class.into_iter().enumerate() {
        if members.len() < folds {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
                needed: folds,
            });
        }
        members.shuffle(&mut rng);
        for (k, i) in members.into_iter().enumerate() {
            assignment[i] = k % folds;
        }
    }
    Ok(assignment)
}

/// Cross-validated grid search on a precomputed base matrix. `train`
/// indexes into the base matrix and `labels[i]` is the class of `train[i]`.
///
/// The first best candidate wins, visiting `C` ascending and then the
/// kernel parameter ascending.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_base(
    base: &BaseMatrix,
    train: &[usize],
    labels: &[usize],
    num_classes: usize,
    grid: &GridSpec,
    folds: usize,
    seed: u64,
    smo: &SmoConfig,
) -> Result<ChosenParams> {
    if train.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            left: train.len(),
            right: labels.len(),
        });
    }
    let assignment = stratified_folds(labels, num_classes, folds, seed)?;
    let split: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| {
            let (val, fit): (Vec<usize>, Vec<usize>) = (0..train.len()).partition(|&i| assignment[i] == f);
            (fit, val)
        })
        .collect();

    let kernels = grid.kernels(base.family());
    let cs: Vec<f64> = grid.log2_c.iter().map(|&e| 2f64.powi(e)).collect();
    // accuracy[kernel][c], averaged over folds
    let accuracy: Vec<Vec<f64>> = kernels
        .par_iter()
        .map(|spec| {
            let mut acc = vec![0.0; cs.len()];
            for (fit, val) in &split {
                let fit_ids: Vec<usize> = fit.iter().map(|&i| train[i]).collect();
                let val_ids: Vec<usize> = val.iter().map(|&i| train[i]).collect();
                let fit_labels: Vec<usize> = fit.iter().map(|&i| labels[i]).collect();
                let val_labels: Vec<usize> = val.iter().map(|&i| labels[i]).collect();
                let g_fit = base.kernel(spec, &fit_ids, &fit_ids)?;
                let g_val = base.kernel(spec, &val_ids, &fit_ids)?;
                for (slot, &c) in acc.iter_mut().zip(&cs) {
                    let model = train_ovr(&g_fit, &fit_labels, num_classes, c, smo)?;
                    let pred = predict_ovr(&model, &g_val)?;
                    *slot += macro_accuracy(&pred, &val_labels)? / folds as f64;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;

    let mut best: Option<ChosenParams> = None;
    for (ci, (&log2_c, &c)) in grid.log2_c.iter().zip(&cs).enumerate() {
        for (ki, spec) in kernels.iter().enumerate() {
            let a = accuracy[ki][ci];
            if best.is_none_or(|b| a > b.cv_accuracy) {
                best = Some(ChosenParams {
                    log2_c,
                    c,
                    kernel: *spec,
                    cv_accuracy: a,
                });
            }
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Cross-validated grid search over one training set.
pub fn grid_search(
    train: &Dataset,
    family: KernelFamily,
    grid: &GridSpec,
    folds: usize,
    seed: u64,
) -> Result<ChosenParams> {
    train.require_classification()?;
    let base = BaseMatrix::compute(family, train.vectors())?;
    let ids: Vec<usize> = (0..train.len()).collect();
    grid_search_base(
        &base,
        &ids,
        train.labels(),
        train.num_classes(),
        grid,
        folds,
        seed,
        &SmoConfig::default(),
    )
}

/// Settings of [`run_benchmark`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub train_per_class: usize,
    pub repeats: usize,
    pub folds: usize,
    pub grid: GridSpec,
    pub seed: u64,
    /// L1-normalize every vector before any kernel is computed.
    pub normalize: bool,
    #[serde(skip)]
    pub smo: SmoConfig,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            train_per_class: 50,
            repeats: 10,
            folds: 5,
            grid: GridSpec::default(),
            seed: 0,
            normalize: true,
            smo: SmoConfig::default(),
        }
    }
}

/// One method's results over all repeats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub family: KernelFamily,
    /// Test macro accuracy per repeat, in percent.
    pub accuracies: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (0 for a single repeat).
    pub std: f64,
    /// Training macro accuracy per repeat, in percent.
    pub train_accuracies: Vec<f64>,
    /// Distinct support vectors per repeat.
    pub sv_counts: Vec<usize>,
    pub sv_mean: f64,
    pub chosen: Vec<ChosenParams>,
    /// Repeats whose final model hit the iteration budget.
    pub non_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub seed: u64,
    pub repeats: usize,
    pub train_per_class: usize,
    pub folds: usize,
    pub num_samples: usize,
    pub num_classes: usize,
    pub grid: GridSpec,
    pub methods: Vec<MethodReport>,
}

impl BenchmarkReport {
    pub fn method(&self, name: &str) -> Option<&MethodReport> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// One row per method. `flags` marks a significant difference from the
    /// baseline (`+` at 0.05, `*` at 0.005) when a comparison is given.
    pub fn summary_csv(&self, significance: Option<&SignificanceMatrix>) -> String {
        let mut out = String::from("method,mean,std,sv_mean,flags,direction\n");
        for m in &self.methods {
            let cmp = significance.and_then(|s| s.comparisons.iter().find(|c| c.method == m.method));
            let (flags, direction) = match (significance, cmp) {
                (Some(s), _) if s.baseline == m.method => ("baseline", ""),
                (_, Some(c)) => (c.flags(), c.direction.as_str()),
                _ => ("", ""),
            };
            out.push_str(&format!(
                "{},{:?},{:?},{:?},{},{}\n",
                m.method, m.mean, m.std, m.sv_mean, flags, direction
            ));
        }
        out
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

struct RepeatOutcome {
    test_accuracy: f64,
    train_accuracy: f64,
    svs: usize,
    chosen: ChosenParams,
    converged: bool,
}

/// Draws `train_per_class` members of every class for training; the rest
/// are the test set. Both lists are ascending.
pub fn stratified_split(dataset: &Dataset, train_per_class: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for mut members in dataset.class_indices() {
        members.shuffle(&mut rng);
        let (a, b) = members.split_at(train_per_class.min(members.len()));
        train.extend_from_slice(a);
        test.extend_from_slice(b);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Repeated random-split benchmark. Every repeat uses one stratified split
/// (and one fold assignment) shared by all methods, so that per-repeat
/// accuracies are paired across methods.
pub fn run_benchmark(data: &Dataset, methods: &[KernelFamily], config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    data.require_classification()?;
    if methods.is_empty() {
        return Err(Error::InvalidParameter("no methods given".into()));
    }
    if config.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be positive".into()));
    }
    if config.train_per_class < config.folds {
        return Err(Error::InvalidParameter(format!(
            "train_per_class ({}) must be at least the number of folds ({})",
            config.train_per_class, config.folds
        )));
    }
    for (class, &count) in data.class_counts().iter().enumerate() {
        if count <= config.train_per_class {
            return Err(Error::ClassTooSmall {
                class,
                count,
                needed: config.train_per_class + 1,
            });
        }
    }
    let data = if config.normalize {
        data.normalized()?
    } else {
        data.clone()
    };
    let bases = methods
        .iter()
        .map(|&f| BaseMatrix::compute(f, data.vectors()))
        .collect::<Result<Vec<_>>>()?;
    let k = data.num_classes();

    let per_repeat: Vec<Vec<RepeatOutcome>> = (0..config.repeats)
        .into_par_iter()
        .map(|r| {
            let repeat_seed = derive_seed(config.seed, r as u64);
            let (train, test) = stratified_split(&data, config.train_per_class, repeat_seed);
            let train_labels: Vec<usize> = train.iter().map(|&i| data.labels()[i]).collect();
            let test_labels: Vec<usize> = test.iter().map(|&i| data.labels()[i]).collect();
            let fold_seed = derive_seed(repeat_seed, u64::MAX);
            bases
                .iter()
                .map(|base| {
                    let chosen = grid_search_base(
                        base,
                        &train,
                        &train_labels,
                        k,
                        &config.grid,
                        config.folds,
                        fold_seed,
                        &config.smo,
                    )?;
                    let g_train = base.kernel(&chosen.kernel, &train, &train)?;
                    let model = train_ovr(&g_train, &train_labels, k, chosen.c, &config.smo)?;
                    let g_test = base.kernel(&chosen.kernel, &test, &train)?;
                    let test_pred = predict_ovr(&model, &g_test)?;
                    let train_pred = predict_ovr(&model, &g_train)?;
                    Ok(RepeatOutcome {
                        test_accuracy: macro_accuracy(&test_pred, &test_labels)?,
                        train_accuracy: macro_accuracy(&train_pred, &train_labels)?,
                        svs: count_svs(&model),
                        chosen,
                        converged: model.models.iter().all(|m| m.converged),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let reports = methods
        .iter()
        .enumerate()
        .map(|(mi, &family)| {
            let outcomes: Vec<&RepeatOutcome> = per_repeat.iter().map(|r| &r[mi]).collect();
            let accuracies: Vec<f64> = outcomes.iter().map(|o| o.test_accuracy).collect();
            let sv_counts: Vec<usize> = outcomes.iter().map(|o| o.svs).collect();
            let (mean, std) = mean_std(&accuracies);
            let sv_mean = sv_counts.iter().sum::<usize>() as f64 / sv_counts.len() as f64;
            MethodReport {
                method: family.name(),
                family,
                mean,
                std,
                train_accuracies: outcomes.iter().map(|o| o.train_accuracy).collect(),
                sv_mean,
                chosen: outcomes.iter().map(|o| o.chosen).collect(),
                non_converged: outcomes.iter().filter(|o| !o.converged).count(),
                accuracies,
                sv_counts,
            }
        })
        .collect();

    Ok(BenchmarkReport {
        seed: config.seed,
        repeats: config.repeats,
        train_per_class: config.train_per_class,
        folds: config.folds,
        num_samples: data.len(),
        num_classes: k,
        grid: config.grid.clone(),
        methods: reports,
    })
}

/// Significance levels used when comparing methods with the baseline.
pub const COMPARISON_ALPHAS: [f64; 2] = [0.05, 0.005];

/// Baseline-vs-method outcome of a paired signed-rank test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub method: String,
    pub statistic: f64,
    pub p_value: f64,
    /// Per-repeat accuracies were identical, so no test was run.
    pub identical: bool,
    /// Bonferroni-corrected decisions at [`COMPARISON_ALPHAS`].
    pub significant: Vec<bool>,
    /// `baseline_better`, `baseline_worse`, `tie` or `identical`, from the
    /// median of baseline minus method accuracy.
    pub direction: String,
}

impl Comparison {
    fn flags(&self) -> &'static str {
        match self.significant.as_slice() {
            [_, true, ..] => "*",
            [true, ..] => "+",
            _ => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub baseline: String,
    pub methods: Vec<String>,
    pub alphas: Vec<f64>,
    /// Number of baseline comparisons the correction divides by.
    pub num_comparisons: usize,
    pub comparisons: Vec<Comparison>,
    /// Symmetric two-sided p-values between all methods; 1 on the diagonal
    /// and for identical accuracy lists.
    pub p_values: Vec<Vec<f64>>,
}

fn paired_test(a: &[f64], b: &[f64]) -> Result<Option<(f64, f64)>> {
    match wilcoxon_signed_rank(a, b) {
        Ok(t) => Ok(Some((t.statistic, t.p_value))),
        Err(Error::AllZeroDifferences) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Compares every method with `baseline` on the per-repeat accuracies.
pub fn compare_methods(report: &BenchmarkReport, baseline: &str) -> Result<SignificanceMatrix> {
    if report.methods.len() < 2 {
        return Err(Error::InvalidParameter("at least two methods are needed".into()));
    }
    let b = report
        .method(baseline)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown baseline method '{baseline}'")))?;
    let n = report.methods.len();
    let mut p_values = vec![vec![1.0; n]; n];
    for (i, a) in report.methods.iter().enumerate() {
        for (j, c) in report.methods.iter().enumerate().skip(i + 1) {
            let p = paired_test(&a.accuracies, &c.accuracies)?.map_or(1.0, |(_, p)| p);
            p_values[i][j] = p;
            p_values[j][i] = p;
        }
    }
    let others: Vec<&MethodReport> = report.methods.iter().filter(|m| m.method != baseline).collect();
    let m = others.len();
    let comparisons = others
        .iter()
        .map(|o| {
            let test = paired_test(&b.accuracies, &o.accuracies)?;
            let mut diffs: Vec<f64> = b.accuracies.iter().zip(&o.accuracies).map(|(x, y)| x - y).collect();
            diffs.sort_by(f64::total_cmp);
            let median = median_sorted(&diffs).unwrap_or(0.0);
            let (statistic, p_value, identical) = match test {
                Some((s, p)) => (s, p, false),
                None => (0.0, 1.0, true),
            };
            let direction = if identical {
                "identical"
            } else if median > 0.0 {
                "baseline_better"
            } else if median < 0.0 {
                "baseline_worse"
            } else {
                "tie"
            };
            Ok(Comparison {
                method: o.method.clone(),
                statistic,
                p_value,
                identical,
                significant: COMPARISON_ALPHAS
                    .iter()
                    .map(|&a| !identical && p_value < a / m as f64)
                    .collect(),
                direction: direction.into(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(SignificanceMatrix {
        baseline: baseline.into(),
        methods: report.methods.iter().map(|m| m.method.clone()).collect(),
        alphas: COMPARISON_ALPHAS.to_vec(),
        num_comparisons: m,
        comparisons,
        p_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distances::MeasureId;

    #[test]
    fn macro_accuracy_basic() {
        assert_eq!(macro_accuracy(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 100.0);
        // class 0: 1/2, class 1: 1/1
        assert_eq!(macro_accuracy(&[0, 1, 1], &[0, 0, 1]).unwrap(), 75.0);
        assert_eq!(macro_accuracy(&[], &[]), Err(Error::EmptyInput));
        assert!(macro_accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn default_grid() {
        let g = GridSpec::default();
        assert_eq!(g.log2_c, vec![-2, 0, 2, 4, 6, 8, 10, 12, 14, 16]);
        assert_eq!(g.log2_gamma, vec![-4, -2, 0, 2, 4, 6, 8]);
        assert_eq!(g.degrees, vec![1, 2, 3, 4, 5]);
        assert_eq!(g.kernels(KernelFamily::Linear).len(), 1);
        assert_eq!(g.kernels(KernelFamily::Polynomial).len(), 5);
        let rbf = g.kernels(KernelFamily::DRbf(MeasureId::Pbr));
        assert_eq!(
            rbf[0],
            KernelSpec::DRbf {
                measure: MeasureId::Pbr,
                gamma: 0.0625
            }
        );
    }

    #[test]
    fn custom_grid_is_sorted_and_checked() {
        let g = GridSpec::new(vec![4, 0, 4], vec![2, -2], vec![3, 1]).unwrap();
        assert_eq!(g.log2_c, vec![0, 4]);
        assert_eq!(g.log2_gamma, vec![-2, 2]);
        assert_eq!(g.degrees, vec![1, 3]);
        assert!(GridSpec::new(vec![], vec![0], vec![1]).is_err());
        assert!(GridSpec::new(vec![0], vec![0], vec![6]).is_err());
    }

    #[test]
    fn folds_are_stratified() {
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let a = stratified_folds(&labels, 3, 5, 1).unwrap();
        for f in 0..5 {
            for c in 0..3 {
                let n = (0..30).filter(|&i| a[i] == f && labels[i] == c).count();
                assert_eq!(n, 2);
            }
        }
        assert_eq!(a, stratified_folds(&labels, 3, 5, 1).unwrap());
    }

    #[test]
    fn too_small_class_is_reported() {
        let labels = vec![0, 0, 0, 0, 0, 1, 1, 1];
        assert_eq!(
            stratified_folds(&labels, 2, 5, 0),
            Err(Error::ClassTooSmall {
                class: 1,
                count: 3,
                needed: 5
            })
        );
    }

    #[test]
    fn split_sizes() {
        let ds = crate::dataio::synth_dirichlet(&crate::dataio::SynthParams {
            classes: 3,
            dims: 4,
            per_class: 10,
            concentration: 10.0,
            separation: 1.0,
            seed: 0,
        })
        .unwrap();
        let (train, test) = stratified_split(&ds, 4, 7);
        assert_eq!(train.len(), 12);
        assert_eq!(test.len(), 18);
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..1000).map(|r| derive_seed(7, r)).collect();
        assert_eq!(s.len(), 1000);
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }

    fn report_with(accs: &[Vec<f64>]) -> BenchmarkReport {
        let names = ["pbr", "l1", "l2"];
        BenchmarkReport {
            seed: 0,
            repeats: accs[0].len(),
            train_per_class: 5,
            folds: 5,
            num_samples: 0,
            num_classes: 2,
            grid: GridSpec::default(),
            methods: accs
                .iter()
                .zip(names)
                .map(|(a, n)| MethodReport {
                    method: n.into(),
                    family: KernelFamily::parse(n).unwrap(),
                    accuracies: a.clone(),
                    mean: mean_std(a).0,
                    std: mean_std(a).1,
                    train_accuracies: vec![],
                    sv_counts: vec![],
                    sv_mean: 0.0,
                    chosen: vec![],
                    non_converged: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn identical_methods_are_flagged_not_errors() {
        let a: Vec<f64> = (0..10).map(|i| 80.0 + i as f64).collect();
        let better: Vec<f64> = a.iter().map(|x| x + 5.0).collect();
        let r = report_with(&[a.clone(), a.clone(), better]);
        let s = compare_methods(&r, "pbr").unwrap();
        assert_eq!(s.num_comparisons, 2);
        assert!(s.comparisons[0].identical);
        assert_eq!(s.comparisons[0].direction, "identical");
        assert_eq!(s.comparisons[0].significant, vec![false, false]);
        // ten positive differences: exact two-sided p = 2 / 1024
        let c = &s.comparisons[1];
        assert_eq!(c.direction, "baseline_worse");
        assert!((c.p_value - 2.0 / 1024.0).abs() < 1e-15);
        // corrected thresholds 0.025 and 0.0025
        assert_eq!(c.significant, vec![true, true]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s.p_values[i][j], s.p_values[j][i]);
            }
        }
        assert!(compare_methods(&r, "nope").is_err());
        let csv = r.summary_csv(Some(&s));
        assert!(csv.starts_with("method,mean,std,sv_mean,flags,direction\npbr,"));
        assert!(csv.contains(",baseline,"));
        assert!(csv.contains(",*,baseline_worse"));
    }

    #[test]
    fn sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }
}
