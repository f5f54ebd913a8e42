//! Distance-substituted RBF kernels, baseline kernels, Gram matrices and a
//! positive-definiteness audit.

use std::io::{Read, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distances::{evaluate_slices, MeasureId};
use crate::error::{Error, Result};
use crate::histcore::{validate_pair, Dataset, FeatureVector};

/// A kernel together with its hyperparameters.
///
/// The polynomial kernel is `(<x, y> + 1)^degree`; its coefficient is fixed
/// at one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Polynomial { degree: u32 },
    DRbf { measure: MeasureId, gamma: f64 },
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec::Linear
    }

    pub fn polynomial(degree: u32) -> Result<Self> {
        let spec = KernelSpec::Polynomial { degree };
        spec.validate()?;
        Ok(spec)
    }

    pub fn d_rbf(measure: MeasureId, gamma: f64) -> Result<Self> {
        let spec = KernelSpec::DRbf { measure, gamma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { degree } if (1..=5).contains(&degree) => Ok(()),
            KernelSpec::Polynomial { degree } => Err(Error::InvalidKernel(format!(
                "polynomial degree {degree} outside 1..=5"
            ))),
            KernelSpec::DRbf { gamma, .. } if gamma > 0.0 && gamma.is_finite() => Ok(()),
            KernelSpec::DRbf { gamma, .. } => Err(Error::InvalidKernel(format!("gamma must be positive, got {gamma}"))),
        }
    }

    pub fn family(&self) -> KernelFamily {
        match *self {
            KernelSpec::Linear => KernelFamily::Linear,
            KernelSpec::Polynomial { .. } => KernelFamily::Polynomial,
            KernelSpec::DRbf { measure, .. } => KernelFamily::DRbf(measure),
        }
    }

    /// Maps a base value (inner product or distance, see
    /// [`KernelFamily::base_value`]) to the kernel value.
    #[inline]
    pub fn from_base(&self, base: f64) -> f64 {
        match *self {
            KernelSpec::Linear => base,
            KernelSpec::Polynomial { degree } => (base + 1.0).powi(degree as i32),
            KernelSpec::DRbf { gamma, .. } => {
                if base.is_infinite() {
                    0.0
                } else {
                    (-gamma * base).exp()
                }
            }
        }
    }
}

/// A kernel with its hyperparameters left open; the unit the benchmark
/// grid-searches over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "measure", rename_all = "snake_case")]
pub enum KernelFamily {
    Linear,
    Polynomial,
    DRbf(MeasureId),
}

impl KernelFamily {
    /// Short method name: `linear`, `poly`, or the measure name.
    pub fn name(&self) -> String {
        match self {
            KernelFamily::Linear => "linear".into(),
            KernelFamily::Polynomial => "poly".into(),
            KernelFamily::DRbf(m) => m.name().into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(KernelFamily::Linear),
            "poly" | "polynomial" => Ok(KernelFamily::Polynomial),
            other => Ok(KernelFamily::DRbf(other.parse()?)),
        }
    }

    /// The hyperparameter-free part of the kernel: the inner product for the
    /// linear and polynomial kernels, the distance for distance-RBF kernels.
    pub fn base_value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        match self {
            KernelFamily::Linear | KernelFamily::Polynomial => {
                if x.len() != y.len() {
                    return Err(Error::DimensionMismatch {
                        left: x.len(),
                        right: y.len(),
                    });
                }
                Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
            }
            KernelFamily::DRbf(m) => evaluate_slices(*m, x, y),
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// `K(x, y)` for one pair.
pub fn kernel_value(spec: &KernelSpec, x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    spec.validate()?;
    validate_pair(x.values(), y.values())?;
    Ok(spec.from_base(spec.family().base_value(x.values(), y.values())?))
}

/// Dense row-major kernel matrix with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    values: Vec<f64>,
    rows: usize,
    cols: usize,
    pub spec: KernelSpec,
    pub row_ids: Vec<usize>,
    pub col_ids: Vec<usize>,
}

impl GramMatrix {
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>, spec: KernelSpec) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: rows * cols,
            });
        }
        Ok(Self {
            values,
            rows,
            cols,
            spec,
            row_ids: (0..rows).collect(),
            col_ids: (0..cols).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn transpose(&self) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                values[j * self.rows + i] = self.get(i, j);
            }
        }
        Self {
            values,
            rows: self.cols,
            cols: self.rows,
            spec: self.spec,
            row_ids: self.col_ids.clone(),
            col_ids: self.row_ids.clone(),
        }
    }

    /// Largest `|g_ij - g_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Writes the little-endian binary form: magic `PBRG`, u32 version,
    /// u32 rows, u32 cols, u32 tag length, tag bytes (kernel spec as JSON),
    /// then row-major f64 values.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let tag = serde_json::to_vec(&self.spec).map_err(|e| Error::Format(e.to_string()))?;
        w.write_all(GRAM_MAGIC)?;
        w.write_all(&GRAM_VERSION.to_le_bytes())?;
        w.write_all(&to_u32(self.rows)?.to_le_bytes())?;
        w.write_all(&to_u32(self.cols)?.to_le_bytes())?;
        w.write_all(&to_u32(tag.len())?.to_le_bytes())?;
        w.write_all(&tag)?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != GRAM_MAGIC {
            return Err(Error::Format("bad Gram magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != GRAM_VERSION {
            return Err(Error::Format(format!("unsupported Gram version {version}")));
        }
        let rows = read_u32(&mut r)? as usize;
        let cols = read_u32(&mut r)? as usize;
        let tag_len = read_u32(&mut r)? as usize;
        let mut tag = vec![0u8; tag_len];
        r.read_exact(&mut tag)?;
        let spec: KernelSpec = serde_json::from_slice(&tag).map_err(|e| Error::Format(e.to_string()))?;
        let mut values = Vec::with_capacity(rows * cols);
        let mut buf = [0u8; 8];
        for _ in 0..rows * cols {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        Self::from_values(rows, cols, values, spec)
    }
}

pub const GRAM_MAGIC: &[u8; 4] = b"PBRG";
pub const GRAM_VERSION: u32 = 1;

pub(crate) fn to_u32(n: usize) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Format(format!("{n} does not fit in u32")))
}

pub(crate) fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

/// Kernel matrix between the vectors of two datasets.
///
/// When `rows` and `cols` are the same dataset each unordered pair is
/// evaluated once and mirrored, so the result is exactly symmetric.
pub fn gram(spec: &KernelSpec, rows: &Dataset, cols: &Dataset) -> Result<GramMatrix> {
    if std::ptr::eq(rows, cols) {
        self_gram(spec, rows.vectors())
    } else {
        cross_gram(spec, rows.vectors(), cols.vectors())
    }
}

pub fn cross_gram(spec: &KernelSpec, rows: &[FeatureVector], cols: &[FeatureVector]) -> Result<GramMatrix> {
    spec.validate()?;
    check_uniform(rows, cols)?;
    let family = spec.family();
    let values: Vec<f64> = rows
        .par_iter()
        .map(|x| {
            cols.iter()
                .map(|y| family.base_value(x.values(), y.values()).map(|b| spec.from_base(b)))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?
        .concat();
    GramMatrix::from_values(rows.len(), cols.len(), values, *spec)
}

pub fn self_gram(spec: &KernelSpec, vectors: &[FeatureVector]) -> Result<GramMatrix> {
    spec.validate()?;
    let base = BaseMatrix::compute(spec.family(), vectors)?;
    let n = vectors.len();
    let values = base.values.iter().map(|&b| spec.from_base(b)).collect();
    GramMatrix::from_values(n, n, values, *spec)
}

fn check_uniform(rows: &[FeatureVector], cols: &[FeatureVector]) -> Result<()> {
    let dim = rows.first().or(cols.first()).map_or(0, FeatureVector::dim);
    for v in rows.iter().chain(cols) {
        if v.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: v.dim(),
            });
        }
    }
    Ok(())
}

/// Symmetric matrix of base values (distances or inner products) over one
/// set of vectors. Kernels for any hyperparameter value, and for any subset
/// of rows and columns, are derived from it without touching the features
/// again.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMatrix {
    family: KernelFamily,
    n: usize,
    values: Vec<f64>,
}

impl BaseMatrix {
    pub fn compute(family: KernelFamily, vectors: &[FeatureVector]) -> Result<Self> {
        check_uniform(vectors, &[])?;
        let n = vectors.len();
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                (i..n)
                    .map(|j| family.base_value(vectors[i].values(), vectors[j].values()))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut values = vec![0.0; n * n];
        for (i, row) in upper.into_iter().enumerate() {
            for (k, v) in row.into_iter().enumerate() {
                let j = i + k;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(Self { family, n, values })
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Kernel values for `rows x cols` (indices into the underlying set).
    pub fn kernel(&self, spec: &KernelSpec, rows: &[usize], cols: &[usize]) -> Result<GramMatrix> {
        spec.validate()?;
        if spec.family() != self.family {
            return Err(Error::InvalidKernel(format!(
                "spec family {} does not match base family {}",
                spec.family().name(),
                self.family.name()
            )));
        }
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                values.push(spec.from_base(self.get(i, j)));
            }
        }
        let mut g = GramMatrix::from_values(rows.len(), cols.len(), values, *spec)?;
        g.row_ids = rows.to_vec();
        g.col_ids = cols.to_vec();
        Ok(g)
    }
}

/// Result of a positive-definiteness audit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdAudit {
    pub is_pd: bool,
    pub min_eigenvalue_estimate: f64,
}

/// Tries an unjittered Cholesky factorization and reports the smallest
/// eigenvalue from a symmetric eigendecomposition.
pub fn check_pd(g: &GramMatrix) -> Result<PdAudit> {
    if !g.is_square() {
        return Err(Error::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let asym = g.max_asymmetry();
    if asym > 1e-10 {
        return Err(Error::NotSymmetric(asym));
    }
    let n = g.rows();
    let m = DMatrix::from_row_slice(n, n, g.values());
    let is_pd = n > 0 && m.clone().cholesky().is_some();
    let min_eigenvalue_estimate = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PdAudit {
        is_pd,
        min_eigenvalue_estimate,
    })
}
