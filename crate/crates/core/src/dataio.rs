//! Feature files, synthetic histogram data and fixed example histograms.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};
use crate::histcore::{normalize_slice, Dataset, FeatureVector};
use crate::kernels::{read_u32, to_u32};

/// Raw toy histograms: two images of one class and a uniform reference.
pub const TOY_RAW: [[f64; 5]; 3] = [
    [1.0, 15.0, 24.0, 32.0, 2.0],
    [3.0, 15.0, 26.0, 33.0, 52.0],
    [20.0, 20.0, 20.0, 20.0, 20.0],
];

/// The normalized toy histograms `(d, e, f)`.
pub fn toy_fixture() -> [FeatureVector; 3] {
    TOY_RAW.map(|raw| {
        FeatureVector::new(raw.to_vec())
            .and_then(|v| v.normalize())
            .expect("toy histograms are valid")
    })
}

/// Raw histograms `(x, y, z)` for which, once normalized,
/// `PBR(x, z) > PBR(x, y) + PBR(y, z)` (margin about 0.102).
pub const PBR_TRIANGLE_WITNESS_RAW: [[f64; 3]; 3] = [[4.0, 19.0, 19.0], [16.0, 8.0, 11.0], [19.0, 1.0, 1.0]];

/// Raw histograms `(x, y, z)` for which, once normalized,
/// `L1BRD(x, z) > L1BRD(x, y) + L1BRD(y, z)` (margin about 0.631).
pub const L1BRD_TRIANGLE_WITNESS_RAW: [[f64; 3]; 3] = [[0.0, 4.0, 1.0], [5.0, 4.0, 1.0], [6.0, 0.0, 0.0]];

pub fn normalized_triple(raw: &[[f64; 3]; 3]) -> [FeatureVector; 3] {
    raw.map(|r| {
        FeatureVector::new(r.to_vec())
            .and_then(|v| v.normalize())
            .expect("witness histograms are valid")
    })
}

/// Reads a feature CSV: header `label,f0,f1,...`, then one row per sample
/// with a string label and non-negative numeric features.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let file = File::open(path)?;
    read_csv(BufReader::new(file))
}

pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.get(0).map(str::trim) != Some("label") {
        return Err(Error::Parse {
            line: 1,
            message: "first column must be 'label'".into(),
        });
    }
    let dim = header.len() - 1;
    let mut vectors = Vec::new();
    let mut names = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let line = k + 2;
        let record = record.map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != dim + 1 {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", dim + 1, record.len()),
            });
        }
        let mut values = Vec::with_capacity(dim);
        for (column, field) in record.iter().skip(1).enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("'{field}' is not a number (column {})", column + 1),
            })?;
            if v < 0.0 {
                return Err(Error::NegativeFeature {
                    line,
                    column: column + 1,
                });
            }
            values.push(v);
        }
        let v = FeatureVector::new(values).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        vectors.push(v);
        names.push(record[0].to_string());
    }
    Dataset::from_named(vectors, &names)
}

/// Writes a dataset as feature CSV. Values use the shortest decimal form
/// that reads back to the same `f64`.
pub fn save_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    write_csv(dataset, BufWriter::new(file))
}

pub fn write_csv<W: Write>(dataset: &Dataset, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut header = vec!["label".to_string()];
    header.extend((0..dataset.dim()).map(|i| format!("f{i}")));
    wtr.write_record(&header).map_err(csv_err)?;
    for (v, &label) in dataset.vectors().iter().zip(dataset.labels()) {
        let mut row = vec![dataset.class_names()[label].clone()];
        row.extend(v.values().iter().map(|x| format!("{x:?}")));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub const FEATURE_MAGIC: &[u8; 4] = b"PBRF";
pub const FEATURE_VERSION: u32 = 1;

/// Fixed-size header of the binary feature format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureFileHeader {
    pub version: u32,
    pub dim: usize,
    pub rows: usize,
    pub has_labels: bool,
}

/// Binary feature format, little-endian: magic `PBRF`, u32 version, u32 N,
/// u32 M, u8 label flag, M*N row-major f64, then (if labelled) u32 class
/// count, each class name as u32 length + UTF-8 bytes, and M u32 class ids.
pub fn write_binary<W: Write>(dataset: &Dataset, mut w: W) -> Result<()> {
    w.write_all(FEATURE_MAGIC)?;
    w.write_all(&FEATURE_VERSION.to_le_bytes())?;
    w.write_all(&to_u32(dataset.dim())?.to_le_bytes())?;
    w.write_all(&to_u32(dataset.len())?.to_le_bytes())?;
    w.write_all(&[1u8])?;
    for v in dataset.vectors() {
        for x in v.values() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.write_all(&to_u32(dataset.num_classes())?.to_le_bytes())?;
    for name in dataset.class_names() {
        w.write_all(&to_u32(name.len())?.to_le_bytes())?;
        w.write_all(name.as_bytes())?;
    }
    for &l in dataset.labels() {
        w.write_all(&to_u32(l)?.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_header<R: Read>(r: &mut R) -> Result<FeatureFileHeader> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FEATURE_MAGIC {
        return Err(Error::Format("bad feature-file magic".into()));
    }
    let version = read_u32(r)?;
    if version != FEATURE_VERSION {
        return Err(Error::Format(format!("unsupported feature-file version {version}")));
    }
    let dim = read_u32(r)? as usize;
    let rows = read_u32(r)? as usize;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    if dim < 2 || rows < 1 {
        return Err(Error::Format(format!("invalid header: N = {dim}, M = {rows}")));
    }
    Ok(FeatureFileHeader {
        version,
        dim,
        rows,
        has_labels: flag[0] != 0,
    })
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Dataset> {
    let header = read_header(&mut r)?;
    let mut buf = [0u8; 8];
    let mut vectors = Vec::with_capacity(header.rows);
    for _ in 0..header.rows {
        let mut values = Vec::with_capacity(header.dim);
        for _ in 0..header.dim {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        vectors.push(FeatureVector::new(values)?);
    }
    if !header.has_labels {
        let n = vectors.len();
        return Dataset::new(vectors, vec![0; n], vec!["unlabeled".into()]);
    }
    let num_classes = read_u32(&mut r)? as usize;
    let mut class_names = Vec::with_capacity(num_classes);
    for _ in 0..num_classes {
        let len = read_u32(&mut r)? as usize;
        let mut bytes = vec![0u8; len];
        r.read_exact(&mut bytes)?;
        class_names.push(String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?);
    }
    let labels = (0..header.rows)
        .map(|_| read_u32(&mut r).map(|l| l as usize))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(vectors, labels, class_names)
}

/// Loads `.bin` files as binary features and anything else as CSV.
pub fn load_any(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "bin") {
        read_binary(BufReader::new(File::open(path)?))
    } else {
        load_csv(path)
    }
}

pub fn save_any(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if path.extension().is_some_and(|e| e == "bin") {
        let mut w = BufWriter::new(File::create(path)?);
        write_binary(dataset, &mut w)?;
        w.flush()?;
        Ok(())
    } else {
        save_csv(dataset, path)
    }
}

/// Parameters of [`synth_dirichlet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub classes: usize,
    pub dims: usize,
    pub per_class: usize,
    /// Dirichlet concentration (sum of the parameters) around each centre.
    pub concentration: f64,
    /// How far class centres move away from the uniform histogram; centres
    /// are `(1 - w) u + w r` with `w = s / (1 + s)` and `r ~ Dir(1)`.
    pub separation: f64,
    pub seed: u64,
}

/// Draws labelled histograms: each class has a centre on the simplex and
/// its members are `Dir(concentration * centre)` samples. Rows are grouped
/// by class; class names are `c0, c1, ...`.
pub fn synth_dirichlet(p: &SynthParams) -> Result<Dataset> {
    if p.classes < 2 {
        return Err(Error::InvalidParameter("classes must be at least 2".into()));
    }
    if p.dims < 2 {
        return Err(Error::InvalidParameter("dims must be at least 2".into()));
    }
    if p.per_class == 0 {
        return Err(Error::InvalidParameter("per_class must be positive".into()));
    }
    if !(p.concentration > 0.0 && p.concentration.is_finite()) {
        return Err(Error::InvalidParameter("concentration must be positive".into()));
    }
    if !(p.separation >= 0.0 && p.separation.is_finite()) {
        return Err(Error::InvalidParameter("separation must be non-negative".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let w = p.separation / (1.0 + p.separation);
    let uniform = 1.0 / p.dims as f64;
    let centers: Vec<Vec<f64>> = (0..p.classes)
        .map(|_| {
            let r = dirichlet(&mut rng, &vec![1.0; p.dims]);
            r.iter().map(|&x| (1.0 - w) * uniform + w * x).collect()
        })
        .collect();

    let mut vectors = Vec::with_capacity(p.classes * p.per_class);
    let mut labels = Vec::with_capacity(p.classes * p.per_class);
    for (k, center) in centers.iter().enumerate() {
        let shape: Vec<f64> = center.iter().map(|c| p.concentration * c).collect();
        for _ in 0..p.per_class {
            let v = dirichlet(&mut rng, &shape);
            vectors.push(FeatureVector::new_normalized(v)?);
            labels.push(k);
        }
    }
    let names = (0..p.classes).map(|k| format!("c{k}")).collect();
    Dataset::new(vectors, labels, names)
}

fn dirichlet<R: Rng>(rng: &mut R, shape: &[f64]) -> Vec<f64> {
    loop {
        let g: Vec<f64> = shape
            .iter()
            .map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng))
            .collect();
        if let Ok(v) = normalize_slice(&g) {
            return v;
        }
    }
}
