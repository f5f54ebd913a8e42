//! C-SVC on precomputed kernels, solved by sequential minimal optimization.
//!
//! The dual is handled in minimisation form,
//!
//! ```text
//! min f(a) = 1/2 a'Qa - sum(a),  Q_ij = y_i y_j K_ij,  0 <= a_i <= C,  y'a = 0
//! ```
//!
//! with maximal-violating-pair working-set selection. The kernel is used as
//! given: indefinite Gram matrices are accepted, and a pair whose curvature
//! is not positive is moved to the better end of its feasible segment.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{GramMatrix, KernelSpec};

/// Alphas above this are support vectors.
pub const SV_THRESHOLD: f64 = 1e-12;

/// Curvature at or below this is treated as non-positive.
const MIN_CURVATURE: f64 = 1e-12;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoConfig {
    /// Stop once the maximal KKT violation `m(a) - M(a)` is below this.
    pub tol: f64,
    /// Iteration budget is `max_passes * M` for `M` training points.
    pub max_passes: usize,
    /// Record the dual objective after every iteration.
    pub record_objective: bool,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_passes: 10_000,
            record_objective: false,
        }
    }
}

impl SmoConfig {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Index and value of an extreme `-y G` entry.
type Extreme = (usize, f64);

/// One binary training problem over a square training Gram matrix.
#[derive(Debug, Clone, Copy)]
pub struct BinaryProblem<'a> {
    gram: &'a GramMatrix,
    labels: &'a [i8],
    c: f64,
}

impl<'a> BinaryProblem<'a> {
    pub fn new(gram: &'a GramMatrix, labels: &'a [i8], c: f64) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::NotSquare {
                rows: gram.rows(),
                cols: gram.cols(),
            });
        }
        if gram.rows() != labels.len() {
            return Err(Error::DimensionMismatch {
                left: gram.rows(),
                right: labels.len(),
            });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidProblem(format!("C must be positive, got {c}")));
        }
        if labels.iter().any(|&y| y != 1 && y != -1) {
            return Err(Error::InvalidProblem("labels must be +1 or -1".into()));
        }
        if !(labels.contains(&1) && labels.contains(&-1)) {
            return Err(Error::InvalidProblem("both classes must be present".into()));
        }
        Ok(Self { gram, labels, c })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn labels(&self) -> &[i8] {
        self.labels
    }

    #[inline]
    fn q(&self, i: usize, j: usize) -> f64 {
        f64::from(self.labels[i] * self.labels[j]) * self.gram.get(i, j)
    }

    /// `Qa - 1`.
    pub fn gradient(&self, alpha: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let mut g = -1.0;
                for (j, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        g += self.q(i, j) * a;
                    }
                }
                g
            })
            .collect()
    }

    /// Dual objective in maximisation form, `sum(a) - 1/2 a'Qa`.
    pub fn dual_objective(&self, alpha: &[f64]) -> f64 {
        let g = self.gradient(alpha);
        -0.5 * alpha.iter().zip(&g).map(|(a, g)| a * (g - 1.0)).sum::<f64>()
    }

    /// Maximal KKT violation `m(a) - M(a)` (0 if either index set is empty).
    pub fn kkt_violation(&self, alpha: &[f64]) -> f64 {
        let g = self.gradient(alpha);
        let (up, low) = self.extremes(alpha, &g);
        match (up, low) {
            (Some((_, m)), Some((_, mm))) => (m - mm).max(0.0),
            _ => 0.0,
        }
    }

    fn in_up(&self, t: usize, a: f64) -> bool {
        if self.labels[t] == 1 {
            a < self.c
        } else {
            a > 0.0
        }
    }

    fn in_low(&self, t: usize, a: f64) -> bool {
        if self.labels[t] == 1 {
            a > 0.0
        } else {
            a < self.c
        }
    }

    /// `(argmax_{I_up} -y G, argmin_{I_low} -y G)` with lowest-index ties.
    fn extremes(&self, alpha: &[f64], g: &[f64]) -> (Option<Extreme>, Option<Extreme>) {
        let mut up: Option<Extreme> = None;
        let mut low: Option<Extreme> = None;
        for t in 0..self.len() {
            let v = -f64::from(self.labels[t]) * g[t];
            if self.in_up(t, alpha[t]) && up.is_none_or(|(_, best)| v > best) {
                up = Some((t, v));
            }
            if self.in_low(t, alpha[t]) && low.is_none_or(|(_, best)| v < best) {
                low = Some((t, v));
            }
        }
        (up, low)
    }
}

/// A trained binary classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    /// Dual coefficients, one per training point, each in `[0, C]`.
    pub alpha: Vec<f64>,
    /// Training labels (`+1` / `-1`).
    pub y: Vec<i8>,
    pub bias: f64,
    pub c: f64,
    /// Indices with `alpha > SV_THRESHOLD`, ascending.
    pub sv_indices: Vec<usize>,
    /// Class treated as `+1` when the model is part of a one-vs-rest bundle.
    pub positive_class: Option<usize>,
    /// False if the iteration budget ran out before the tolerance was met.
    pub converged: bool,
    pub iterations: usize,
    /// Dual objective after each iteration (only when requested).
    pub objective_trace: Vec<f64>,
}

impl SvmModel {
    fn from_parts(alpha: Vec<f64>, y: Vec<i8>, bias: f64, c: f64) -> Self {
        let sv_indices = alpha
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > SV_THRESHOLD)
            .map(|(i, _)| i)
            .collect();
        Self {
            alpha,
            y,
            bias,
            c,
            sv_indices,
            positive_class: None,
            converged: true,
            iterations: 0,
            objective_trace: Vec::new(),
        }
    }

    /// The same decision function with the classes swapped.
    pub fn negated(&self) -> Self {
        Self {
            y: self.y.iter().map(|&y| -y).collect(),
            bias: -self.bias,
            ..self.clone()
        }
    }

    pub fn num_svs(&self) -> usize {
        self.sv_indices.len()
    }

    /// `sum alpha_i y_i`, which the solver keeps at zero.
    pub fn equality_residual(&self) -> f64 {
        self.alpha.iter().zip(&self.y).map(|(a, &y)| a * f64::from(y)).sum()
    }
}

/// Trains one binary C-SVC with SMO.
///
/// Running out of iterations is not an error: the last iterate is returned
/// with `converged = false`.
pub fn train_binary(problem: &BinaryProblem<'_>, config: &SmoConfig) -> Result<SvmModel> {
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            config.tol
        )));
    }
    let n = problem.len();
    let c = problem.c;
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = config.max_passes.saturating_mul(n).max(1);
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        let (up, low) = problem.extremes(&alpha, &grad);
        let (Some((i, m_up)), Some((j, m_low))) = (up, low) else {
            converged = true;
            break;
        };
        let gap = m_up - m_low;
        if gap < config.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let yi = f64::from(problem.labels[i]);
        let yj = f64::from(problem.labels[j]);
        // Step t moves alpha_i by y_i t and alpha_j by -y_j t.
        let room_i = if yi > 0.0 { c - alpha[i] } else { alpha[i] };
        let room_j = if yj > 0.0 { alpha[j] } else { c - alpha[j] };
        let t_max = room_i.min(room_j);
        let eta = problem.gram.get(i, i) + problem.gram.get(j, j) - 2.0 * problem.gram.get(i, j);
        let t = if eta > MIN_CURVATURE {
            (gap / eta).min(t_max)
        } else {
            // Non-positive curvature: the objective along the segment is
            // concave or linear with negative slope, so the far end is best.
            t_max
        };

        let old_i = alpha[i];
        let old_j = alpha[j];
        let mut new_i = old_i + yi * t;
        let mut new_j = old_j - yj * t;
        if t == room_i {
            new_i = if yi > 0.0 { c } else { 0.0 };
        }
        if t == room_j {
            new_j = if yj > 0.0 { 0.0 } else { c };
        }
        new_i = new_i.clamp(0.0, c);
        new_j = new_j.clamp(0.0, c);
        alpha[i] = new_i;
        alpha[j] = new_j;

        let di = new_i - old_i;
        let dj = new_j - old_j;
        for (k, g) in grad.iter_mut().enumerate() {
            *g += problem.q(k, i) * di + problem.q(k, j) * dj;
        }
        if config.record_objective {
            trace.push(-0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>());
        }
    }

    if !converged {
        converged = match problem.extremes(&alpha, &grad) {
            (Some((_, m_up)), Some((_, m_low))) => m_up - m_low < config.tol,
            _ => true,
        };
    }
    let bias = -compute_rho(problem, &alpha, &grad);
    let mut model = SvmModel::from_parts(alpha, problem.labels.to_vec(), bias, c);
    model.converged = converged;
    model.iterations = iterations;
    model.objective_trace = trace;
    Ok(model)
}

/// Threshold `rho` (`bias = -rho`): mean of `y_i G_i` over free alphas, or the
/// midpoint of the interval allowed by the bounded ones.
fn compute_rho(problem: &BinaryProblem<'_>, alpha: &[f64], grad: &[f64]) -> f64 {
    let c = problem.c;
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    for t in 0..problem.len() {
        let y = problem.labels[t];
        let yg = f64::from(y) * grad[t];
        if alpha[t] >= c {
            if y == -1 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y == 1 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free_sum += yg;
            free_count += 1;
        }
    }
    if free_count > 0 {
        free_sum / free_count as f64
    } else {
        let mid = 0.5 * (ub + lb);
        if mid.is_finite() {
            mid
        } else if ub.is_finite() {
            ub
        } else if lb.is_finite() {
            lb
        } else {
            0.0
        }
    }
}

/// `sum alpha_i y_i k_i + bias` for one kernel row against the training set.
pub fn decision_value(model: &SvmModel, kernel_row: &[f64]) -> Result<f64> {
    if kernel_row.len() != model.alpha.len() {
        return Err(Error::DimensionMismatch {
            left: kernel_row.len(),
            right: model.alpha.len(),
        });
    }
    Ok(decision_unchecked(model, kernel_row))
}

#[inline]
fn decision_unchecked(model: &SvmModel, kernel_row: &[f64]) -> f64 {
    model
        .sv_indices
        .iter()
        .map(|&i| model.alpha[i] * f64::from(model.y[i]) * kernel_row[i])
        .sum::<f64>()
        + model.bias
}

/// One-vs-rest bundle: `models[k]` separates class `k` from the others.
#[derive(Debug, Clone, PartialEq)]
pub struct OvrModel {
    pub models: Vec<SvmModel>,
    pub num_classes: usize,
}

/// Trains one binary model per class on a square training Gram matrix.
///
/// With exactly two classes a single problem is solved and the second model
/// is its negation, so predictions match the sign of the binary model.
pub fn train_ovr(
    gram: &GramMatrix,
    labels: &[usize],
    num_classes: usize,
    c: f64,
    config: &SmoConfig,
) -> Result<OvrModel> {
    if num_classes < 2 {
        return Err(Error::InvalidProblem(format!(
            "one-vs-rest needs at least 2 classes, got {num_classes}"
        )));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::InvalidProblem(format!("label {bad} out of range")));
    }
    let binary_labels = |k: usize| -> Vec<i8> { labels.iter().map(|&l| if l == k { 1 } else { -1 }).collect() };
    let mut models = if num_classes == 2 {
        let y = binary_labels(0);
        let m = train_binary(&BinaryProblem::new(gram, &y, c)?, config)?;
        let neg = m.negated();
        vec![m, neg]
    } else {
        (0..num_classes)
            .into_par_iter()
            .map(|k| {
                let y = binary_labels(k);
                train_binary(&BinaryProblem::new(gram, &y, c)?, config)
            })
            .collect::<Result<Vec<_>>>()?
    };
    for (k, m) in models.iter_mut().enumerate() {
        m.positive_class = Some(k);
    }
    Ok(OvrModel { models, num_classes })
}

/// Decision values of every class model for one kernel row.
pub fn ovr_decision_values(ovr: &OvrModel, kernel_row: &[f64]) -> Result<Vec<f64>> {
    ovr.models.iter().map(|m| decision_value(m, kernel_row)).collect()
}

/// Argmax over class decision values; ties go to the lowest class index.
pub fn predict_ovr(ovr: &OvrModel, kernel_rows: &GramMatrix) -> Result<Vec<usize>> {
    (0..kernel_rows.rows())
        .map(|r| {
            let values = ovr_decision_values(ovr, kernel_rows.row(r))?;
            Ok(argmax_lowest(&values))
        })
        .collect()
}

pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Distinct training points that are support vectors of any class model.
pub fn count_svs(ovr: &OvrModel) -> usize {
    ovr.models
        .iter()
        .flat_map(|m| m.sv_indices.iter().copied())
        .collect::<BTreeSet<_>>()
        .len()
}

/// JSON form of a trained one-vs-rest model.
///
/// Each class model stores its support vectors sparsely as
/// `[training index, alpha * y]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format: String,
    pub version: u32,
    pub kernel: KernelSpec,
    #[serde(rename = "C")]
    pub c: f64,
    pub train_size: usize,
    /// Whether feature vectors were L1-normalized before the kernel.
    #[serde(default = "yes")]
    pub normalized: bool,
    pub class_order: Vec<String>,
    pub models: Vec<ClassModelDocument>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModelDocument {
    pub class: String,
    pub bias: f64,
    pub converged: bool,
    pub coef: Vec<(usize, f64)>,
}

pub const MODEL_FORMAT: &str = "pbr-svm-model";

impl ModelDocument {
    pub fn from_model(ovr: &OvrModel, kernel: KernelSpec, class_order: &[String]) -> Result<Self> {
        if class_order.len() != ovr.num_classes {
            return Err(Error::InvalidParameter(format!(
                "{} class names for {} classes",
                class_order.len(),
                ovr.num_classes
            )));
        }
        let first = ovr
            .models
            .first()
            .ok_or_else(|| Error::InvalidProblem("empty model".into()))?;
        Ok(Self {
            format: MODEL_FORMAT.into(),
            version: 1,
            kernel,
            c: first.c,
            train_size: first.alpha.len(),
            normalized: true,
            class_order: class_order.to_vec(),
            models: ovr
                .models
                .iter()
                .zip(class_order)
                .map(|(m, name)| ClassModelDocument {
                    class: name.clone(),
                    bias: m.bias,
                    converged: m.converged,
                    coef: m
                        .sv_indices
                        .iter()
                        .map(|&i| (i, m.alpha[i] * f64::from(m.y[i])))
                        .collect(),
                })
                .collect(),
        })
    }

    pub fn to_model(&self) -> Result<OvrModel> {
        if self.format != MODEL_FORMAT {
            return Err(Error::Format(format!("unexpected model format '{}'", self.format)));
        }
        let models = self
            .models
            .iter()
            .enumerate()
            .map(|(k, doc)| {
                let mut alpha = vec![0.0; self.train_size];
                let mut y = vec![1i8; self.train_size];
                for &(i, v) in &doc.coef {
                    if i >= self.train_size {
                        return Err(Error::Format(format!("support vector index {i} out of range")));
                    }
                    alpha[i] = v.abs();
                    y[i] = if v < 0.0 { -1 } else { 1 };
                }
                let mut m = SvmModel::from_parts(alpha, y, doc.bias, self.c);
                m.converged = doc.converged;
                m.positive_class = Some(k);
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(OvrModel {
            num_classes: models.len(),
            models,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn matrix(n: usize, values: Vec<f64>) -> GramMatrix {
        GramMatrix::from_values(n, n, values, KernelSpec::Linear).unwrap()
    }

    #[test]
    fn two_point_analytic_dual() {
        // K = I, labels (+1, -1): the dual is 2a - a^2, maximised at a = 1.
        let g = matrix(2, vec![1.0, 0.0, 0.0, 1.0]);
        let y = [1, -1];
        let p = BinaryProblem::new(&g, &y, 10.0).unwrap();
        let m = train_binary(&p, &SmoConfig::default()).unwrap();
        assert_abs_diff_eq!(m.alpha[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(m.alpha[1], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(m.bias, 0.0, epsilon = 1e-8);
        assert!(m.converged);
        assert_abs_diff_eq!(decision_value(&m, g.row(0)).unwrap(), 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(decision_value(&m, g.row(1)).unwrap(), -1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(p.dual_objective(&m.alpha), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_point_with_both_labels() {
        // K = all ones: the dual is 2a, so both alphas hit C.
        let g = matrix(2, vec![1.0; 4]);
        let y = [1, -1];
        let p = BinaryProblem::new(&g, &y, 1.0).unwrap();
        let m = train_binary(&p, &SmoConfig::default()).unwrap();
        assert_eq!(m.alpha, vec![1.0, 1.0]);
        assert_eq!(m.bias, 0.0);
        assert_eq!(decision_value(&m, g.row(0)).unwrap(), 0.0);
        assert_eq!(m.sv_indices, vec![0, 1]);
    }

    #[test]
    fn one_class_is_invalid() {
        let g = matrix(2, vec![1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            BinaryProblem::new(&g, &[1, 1], 1.0),
            Err(Error::InvalidProblem(_))
        ));
        assert!(BinaryProblem::new(&g, &[1, -1], 0.0).is_err());
        assert!(BinaryProblem::new(&g, &[1, -1, 1], 1.0).is_err());
        assert!(BinaryProblem::new(&g, &[1, 0], 1.0).is_err());
    }

    #[test]
    fn zero_alpha_decision_is_bias() {
        let m = SvmModel::from_parts(vec![0.0; 3], vec![1, -1, 1], 0.25, 1.0);
        assert_eq!(decision_value(&m, &[5.0, 6.0, 7.0]).unwrap(), 0.25);
        assert!(decision_value(&m, &[5.0]).is_err());
        assert_eq!(m.num_svs(), 0);
    }

    #[test]
    fn indefinite_gram_is_accepted() {
        let g = matrix(3, vec![1.0, 2.0, 0.0, 2.0, 1.0, 0.5, 0.0, 0.5, 1.0]);
        let y = [1, -1, 1];
        let p = BinaryProblem::new(&g, &y, 2.0).unwrap();
        let cfg = SmoConfig {
            record_objective: true,
            ..SmoConfig::default()
        };
        let m = train_binary(&p, &cfg).unwrap();
        assert!(m.alpha.iter().all(|&a| (0.0..=2.0).contains(&a)));
        assert!(m.equality_residual().abs() <= 1e-10);
        for w in m.objective_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn ovr_two_class_matches_binary_sign() {
        let g = matrix(
            4,
            vec![
                1.0, 0.8, 0.1, 0.2, //
                0.8, 1.0, 0.2, 0.1, //
                0.1, 0.2, 1.0, 0.7, //
                0.2, 0.1, 0.7, 1.0,
            ],
        );
        let labels = [0, 0, 1, 1];
        let ovr = train_ovr(&g, &labels, 2, 1.0, &SmoConfig::default()).unwrap();
        let y: Vec<i8> = labels.iter().map(|&l| if l == 0 { 1 } else { -1 }).collect();
        let bin = train_binary(&BinaryProblem::new(&g, &y, 1.0).unwrap(), &SmoConfig::default()).unwrap();
        let preds = predict_ovr(&ovr, &g).unwrap();
        for (r, &p) in preds.iter().enumerate() {
            let f = decision_value(&bin, g.row(r)).unwrap();
            assert_eq!(p, if f >= 0.0 { 0 } else { 1 });
        }
        assert_eq!(preds, vec![0, 0, 1, 1]);
    }

    #[test]
    fn ties_go_to_lowest_class() {
        assert_eq!(argmax_lowest(&[0.5, 0.5, 0.5]), 0);
        assert_eq!(argmax_lowest(&[0.1, 0.5, 0.5]), 1);
        let m = SvmModel::from_parts(vec![0.0; 2], vec![1, -1], 0.0, 1.0);
        let ovr = OvrModel {
            models: vec![m.clone(), m.clone(), m],
            num_classes: 3,
        };
        let rows = GramMatrix::from_values(1, 2, vec![0.3, 0.4], KernelSpec::Linear).unwrap();
        assert_eq!(predict_ovr(&ovr, &rows).unwrap(), vec![0]);
    }

    #[test]
    fn sv_counting() {
        let zero = SvmModel::from_parts(vec![0.0; 3], vec![1, -1, 1], 0.0, 1.0);
        let ovr = OvrModel {
            models: vec![zero.clone(), zero],
            num_classes: 2,
        };
        assert_eq!(count_svs(&ovr), 0);

        let g = matrix(2, vec![1.0, 0.0, 0.0, 1.0]);
        let ovr = train_ovr(&g, &[0, 1], 2, 10.0, &SmoConfig::default()).unwrap();
        assert_eq!(count_svs(&ovr), 2);
    }

    #[test]
    fn model_document_round_trip() {
        let g = matrix(3, vec![1.0, 0.2, 0.1, 0.2, 1.0, 0.3, 0.1, 0.3, 1.0]);
        let ovr = train_ovr(&g, &[0, 1, 2], 3, 4.0, &SmoConfig::default()).unwrap();
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let doc = ModelDocument::from_model(&ovr, KernelSpec::Linear, &names).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        let back: ModelDocument = serde_json::from_str(&json).unwrap();
        let model = back.to_model().unwrap();
        for r in 0..3 {
            let a = ovr_decision_values(&ovr, g.row(r)).unwrap();
            let b = ovr_decision_values(&model, g.row(r)).unwrap();
            assert_eq!(a, b);
        }
        assert_eq!(count_svs(&model), count_svs(&ovr));
    }

    #[test]
    fn budget_exhaustion_is_flagged_not_fatal() {
        let g = matrix(
            4,
            vec![
                1.0, 0.9, 0.1, 0.2, //
                0.9, 1.0, 0.2, 0.1, //
                0.1, 0.2, 1.0, 0.9, //
                0.2, 0.1, 0.9, 1.0,
            ],
        );
        let y = [1, 1, -1, -1];
        let p = BinaryProblem::new(&g, &y, 100.0).unwrap();
        let cfg = SmoConfig {
            tol: 1e-14,
            max_passes: 0,
            record_objective: false,
        };
        let m = train_binary(&p, &cfg).unwrap();
        assert!(!m.converged);
        assert_eq!(m.iterations, 1);
    }
}
