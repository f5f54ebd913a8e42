//! Feature vectors (histograms / descriptors) and labelled datasets.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Tolerance on `|sum - 1|` for a vector flagged as L1-normalized.
pub const NORMALIZED_SUM_TOL: f64 = 1e-12;

/// Smallest supported feature dimension.
pub const MIN_DIM: usize = 2;

/// A dense, non-negative feature vector of dimension `N >= 2`.
///
/// Values are shared behind an `Arc`, so clones are cheap and the vector is
/// immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Arc<[f64]>,
    normalized: bool,
}

impl FeatureVector {
    /// Builds a raw (not normalized) feature vector.
    pub fn new(values: impl Into<Vec<f64>>) -> Result<Self> {
        let values = values.into();
        check_elements(&values)?;
        Ok(Self {
            values: values.into(),
            normalized: false,
        })
    }

    /// Builds a vector that is already L1-normalized. Fails if the sum is
    /// further than [`NORMALIZED_SUM_TOL`] from one.
    pub fn new_normalized(values: impl Into<Vec<f64>>) -> Result<Self> {
        let values = values.into();
        check_elements(&values)?;
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > NORMALIZED_SUM_TOL {
            return Err(Error::InvariantViolation {
                index: values.len().saturating_sub(1),
                reason: format!("normalized vector sums to {sum}"),
            });
        }
        Ok(Self {
            values: values.into(),
            normalized: true,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// L1-normalizes the vector (see [`normalize`]).
    pub fn normalize(&self) -> Result<Self> {
        normalize(self)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn check_elements(values: &[f64]) -> Result<()> {
    if values.len() < MIN_DIM {
        return Err(Error::DimensionTooSmall(values.len()));
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeElement { index, value });
        }
    }
    Ok(())
}

/// Scales `v` so its elements sum to one. Order is preserved.
pub fn normalize(v: &FeatureVector) -> Result<FeatureVector> {
    let values = normalize_slice(v.values())?;
    Ok(FeatureVector {
        values: values.into(),
        normalized: true,
    })
}

/// Slice form of [`normalize`]; also rejects negative and non-finite input.
pub fn normalize_slice(values: &[f64]) -> Result<Vec<f64>> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeElement { index, value });
        }
    }
    let sum: f64 = values.iter().sum();
    if sum == 0.0 {
        return Err(Error::AllZero);
    }
    Ok(values.iter().map(|&v| v / sum).collect())
}

/// Checks that two slices can be compared bin-to-bin: equal dimension
/// `>= 2`, all elements finite and non-negative.
pub fn validate_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < MIN_DIM {
        return Err(Error::DimensionTooSmall(x.len()));
    }
    for side in [x, y] {
        for (index, &value) in side.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvariantViolation {
                    index,
                    reason: format!("element {value} is not a finite non-negative number"),
                });
            }
        }
    }
    Ok(())
}

/// A labelled collection of feature vectors with a uniform dimension.
///
/// Labels are dense class ids `0..num_classes()`; `class_names[id]` gives the
/// external name of each class.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    vectors: Vec<FeatureVector>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(vectors: Vec<FeatureVector>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if let Some(first) = vectors.first() {
            let dim = first.dim();
            if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: bad.dim(),
                });
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::InvalidDataset(format!(
                "label {bad} has no class name ({} classes)",
                class_names.len()
            )));
        }
        Ok(Self {
            vectors,
            labels,
            class_names,
        })
    }

    /// Builds a dataset from string labels; class ids are assigned in order
    /// of first appearance.
    pub fn from_named(vectors: Vec<FeatureVector>, names: &[String]) -> Result<Self> {
        let mut class_names: Vec<String> = Vec::new();
        let labels = names
            .iter()
            .map(|name| match class_names.iter().position(|c| c == name) {
                Some(id) => id,
                None => {
                    class_names.push(name.clone());
                    class_names.len() - 1
                }
            })
            .collect();
        Self::new(vectors, labels, class_names)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Feature dimension, or 0 for an empty dataset.
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, FeatureVector::dim)
    }

    pub fn vectors(&self) -> &[FeatureVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Indices of the members of each class, in dataset order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Selects rows by index. Class ids and names are kept as-is.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }

    /// Returns a copy with every vector L1-normalized.
    pub fn normalized(&self) -> Result<Self> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                if v.is_normalized() {
                    Ok(v.clone())
                } else {
                    v.normalize()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            vectors,
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
        })
    }

    /// Fails unless at least two classes are present.
    pub fn require_classification(&self) -> Result<()> {
        let present = self.class_counts().iter().filter(|&&c| c > 0).count();
        if present < 2 {
            return Err(Error::InvalidDataset(format!(
                "classification needs at least 2 classes, found {present}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalizes_uniform_histogram() {
        let v = FeatureVector::new(vec![20.0; 5]).unwrap();
        let n = v.normalize().unwrap();
        assert!(n.is_normalized());
        assert_eq!(n.values(), &[0.2; 5]);
    }

    #[test]
    fn normalizes_toy_histogram() {
        let v = FeatureVector::new(vec![1.0, 15.0, 24.0, 32.0, 2.0]).unwrap();
        let n = v.normalize().unwrap();
        let expected = [1.0 / 74.0, 15.0 / 74.0, 24.0 / 74.0, 32.0 / 74.0, 2.0 / 74.0];
        assert_eq!(n.values(), &expected);
    }

    #[test]
    fn all_zero_is_rejected() {
        let v = FeatureVector::new(vec![0.0; 3]).unwrap();
        assert_eq!(v.normalize(), Err(Error::AllZero));
    }

    #[test]
    fn negative_is_rejected() {
        assert!(matches!(
            normalize_slice(&[1.0, -0.5]),
            Err(Error::NegativeElement { index: 1, .. })
        ));
        assert!(matches!(
            FeatureVector::new(vec![1.0, -2.0, 3.0]),
            Err(Error::NegativeElement { index: 1, .. })
        ));
    }

    #[test]
    fn dimension_floor() {
        assert_eq!(FeatureVector::new(vec![1.0]), Err(Error::DimensionTooSmall(1)));
    }

    #[test]
    fn normalized_constructor_checks_sum() {
        assert!(FeatureVector::new_normalized(vec![0.5, 0.5]).is_ok());
        assert!(FeatureVector::new_normalized(vec![0.5, 0.6]).is_err());
    }

    #[test]
    fn validate_pair_cases() {
        assert!(validate_pair(&[1.0; 5], &[2.0; 5]).is_ok());
        assert_eq!(
            validate_pair(&[1.0; 5], &[1.0; 4]),
            Err(Error::DimensionMismatch { left: 5, right: 4 })
        );
        assert!(matches!(
            validate_pair(&[1.0, -1.0, 0.0], &[1.0, 1.0, 1.0]),
            Err(Error::InvariantViolation { index: 1, .. })
        ));
    }

    #[test]
    fn dataset_validates_shapes() {
        let v = FeatureVector::new(vec![1.0, 2.0]).unwrap();
        let w = FeatureVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(Dataset::new(vec![v.clone()], vec![0, 1], vec!["a".into()]).is_err());
        assert!(Dataset::new(vec![v.clone(), w], vec![0, 0], vec!["a".into()]).is_err());
        assert!(Dataset::new(vec![v.clone()], vec![3], vec!["a".into()]).is_err());
        let names = vec!["b".to_string(), "a".to_string(), "b".to_string()];
        let ds = Dataset::from_named(vec![v.clone(), v.clone(), v], &names).unwrap();
        assert_eq!(ds.labels(), &[0, 1, 0]);
        assert_eq!(ds.class_names(), &["b".to_string(), "a".to_string()]);
        assert_eq!(ds.class_counts(), vec![2, 1]);
        assert!(ds.require_classification().is_ok());
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..100.0, 2..40).prop_filter("needs positive mass", |v| v.iter().any(|&x| x > 1e-6))
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(v in positive_vec()) {
            let once = normalize_slice(&v).unwrap();
            let twice = normalize_slice(&once).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() <= 1e-15);
            }
            prop_assert!((once.iter().sum::<f64>() - 1.0).abs() <= NORMALIZED_SUM_TOL);
        }

        #[test]
        fn normalize_preserves_ratios_and_argmax(v in positive_vec()) {
            let n = normalize_slice(&v).unwrap();
            let argmax = |s: &[f64]| s.iter().enumerate()
                .fold(0, |best, (i, &x)| if x > s[best] { i } else { best });
            prop_assert_eq!(argmax(&v), argmax(&n));
            for i in 0..v.len() {
                for j in 0..v.len() {
                    if v[j] > 1e-3 {
                        let r0 = v[i] / v[j];
                        let r1 = n[i] / n[j];
                        prop_assert!((r0 - r1).abs() <= 1e-12 * r0.max(1.0));
                    }
                }
            }
        }
    }
}
