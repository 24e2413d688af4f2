//! Binary artifact formats. Multi-byte integers are little-endian; bulk
//! samples are f32 on disk, parameters f64. Every format round-trips
//! bit-exactly.
//!
//! ```text
//! RVF1  video volume    "RVF1" + u32 rows, cols, frames
//!                       + frames * (rows*cols) f32, row-major
//! MCH1  filter          "MCH1" + u32 dims + f64 alpha, beta, gamma
//!                       + u8 view tag + u32 label length + UTF-8 label
//!                       + (tag 2 only: f64 a11, a12, a21, a22, b1, b2)
//!                       + voxels f32, frame-major
//! PHI1  matrix          "PHI1" + u8 distribution + u64 seed + u32 K, D
//!                       + u8 materialized + (if 1: K*D f32, row-major)
//! CMP1  measurements    "CMP1" + PHI1 header (seed-only)
//!                       + u32 rows, cols, columns + u8 derivative order
//!                       + f32 sigma + columns * K f32
//! MDL1  classifier      "MDL1" + u32 classes, dim
//!                       + per class (dim f64 weights + f64 bias)
//!                       + dim f64 mean + dim f64 std
//!                       + f64 lambda + u64 epochs + u64 seed
//! BNK1  filter bank     "BNK1" + u32 count + count MCH1 records
//! ```
//!
//! Decoding rebuilds the in-memory types through their validating
//! constructors; a constructor rejection means the file content is
//! inconsistent, so it is reported as a format error naming the file.

use std::path::Path;

use smash_core::{
    AffineView, Bank, Compressed, CompressedVideo, Distribution, Error, Filter, FilterBank,
    MachFilter, Matrix, MatrixId, MeasurementMatrix, Result, SvmHyperparams, SvmModel, ViewTag,
    Volume,
};

use super::{atomic_write, path_str, read_file, ByteReader, ByteWriter};

/// Demotes a constructor error raised while rebuilding a decoded type to a
/// format error on the file (I/O errors pass through untouched).
fn decode_err(path: &str, e: Error) -> Error {
    if e.is_io() {
        e
    } else {
        Error::Format {
            path: path.to_string(),
            detail: e.to_string(),
        }
    }
}

fn dim_u32(r: &mut ByteReader) -> Result<usize> {
    Ok(r.u32()? as usize)
}

fn dims_out(path: &Path, what: &str, dims: &[usize]) -> Result<Vec<u32>> {
    dims.iter()
        .map(|&d| {
            u32::try_from(d).map_err(|_| Error::Format {
                path: path_str(path),
                detail: format!("{what} extent {d} exceeds the u32 format limit"),
            })
        })
        .collect()
}

/// Guards the element count before allocating: the product of u32 extents
/// can overflow usize arithmetic long before `take` would notice.
fn checked_count(r: &ByteReader, extents: &[usize]) -> Result<usize> {
    let mut product: u128 = 1;
    for &e in extents {
        product *= e as u128;
    }
    if product * 4 > usize::MAX as u128 {
        return Err(r.format_err("dimension overflow".to_string()));
    }
    Ok(product as usize)
}

// ---- RVF1: video volumes -----------------------------------------------

pub fn encode_volume(w: &mut ByteWriter, v: &Volume, path: &Path) -> Result<()> {
    let d = dims_out(path, "volume", &[v.rows(), v.cols(), v.frames()])?;
    w.bytes(b"RVF1");
    for e in d {
        w.u32(e);
    }
    w.f32_slice(v.data());
    Ok(())
}

pub fn decode_volume(r: &mut ByteReader) -> Result<Volume> {
    r.magic("RVF1")?;
    let rows = dim_u32(r)?;
    let cols = dim_u32(r)?;
    let frames = dim_u32(r)?;
    let count = checked_count(r, &[rows, cols, frames])?;
    let data = r.f32_slice(count)?;
    Volume::new(rows, cols, frames, data).map_err(|e| decode_err(r.path(), e))
}

pub fn save_volume(path: &Path, v: &Volume) -> Result<()> {
    let mut w = ByteWriter::new();
    encode_volume(&mut w, v, path)?;
    atomic_write(path, &w.into_bytes())
}

pub fn load_volume(path: &Path) -> Result<Volume> {
    let bytes = read_file(path)?;
    let name = path_str(path);
    let mut r = ByteReader::new(&bytes, &name);
    let v = decode_volume(&mut r)?;
    r.finish()?;
    Ok(v)
}

// ---- MCH1: correlation filters -------------------------------------------

pub fn encode_filter(w: &mut ByteWriter, f: &Filter, path: &Path) -> Result<()> {
    let vol = f.volume();
    let d = dims_out(path, "filter", &[vol.rows(), vol.cols(), vol.frames()])?;
    w.bytes(b"MCH1");
    for e in d {
        w.u32(e);
    }
    w.f64(f.alpha());
    w.f64(f.beta());
    w.f64(f.gamma());
    let tag = f.view_tag();
    w.u8(tag.code());
    let label = f.label().as_bytes();
    let label_len = u32::try_from(label.len()).map_err(|_| Error::Format {
        path: path_str(path),
        detail: "label exceeds the u32 format limit".to_string(),
    })?;
    w.u32(label_len);
    w.bytes(label);
    if let ViewTag::Compensated(view) = tag {
        for row in view.a {
            w.f64(row[0]);
            w.f64(row[1]);
        }
        w.f64(view.b[0]);
        w.f64(view.b[1]);
    }
    w.f32_slice(vol.data());
    Ok(())
}

pub fn decode_filter(r: &mut ByteReader) -> Result<Filter> {
    r.magic("MCH1")?;
    let rows = dim_u32(r)?;
    let cols = dim_u32(r)?;
    let frames = dim_u32(r)?;
    let alpha = r.f64()?;
    let beta = r.f64()?;
    let gamma = r.f64()?;
    let tag_code = r.u8()?;
    let label_len = r.u32()? as usize;
    let label = String::from_utf8(r.take(label_len)?.to_vec())
        .map_err(|_| r.format_err("label is not valid UTF-8".to_string()))?;
    let tag = match tag_code {
        0 => ViewTag::Type1,
        1 => ViewTag::Type2,
        2 => {
            let a = [[r.f64()?, r.f64()?], [r.f64()?, r.f64()?]];
            let b = [r.f64()?, r.f64()?];
            ViewTag::Compensated(AffineView::new(a, b).map_err(|e| decode_err(r.path(), e))?)
        }
        other => return Err(r.format_err(format!("unknown view tag {other}"))),
    };
    let count = checked_count(r, &[rows, cols, frames])?;
    let data = r.f32_slice(count)?;
    let volume = Volume::new(rows, cols, frames, data).map_err(|e| decode_err(r.path(), e))?;
    Ok(MachFilter::from_parts(volume, alpha, beta, gamma, label, tag))
}

pub fn save_filter(path: &Path, f: &Filter) -> Result<()> {
    let mut w = ByteWriter::new();
    encode_filter(&mut w, f, path)?;
    atomic_write(path, &w.into_bytes())
}

pub fn load_filter(path: &Path) -> Result<Filter> {
    let bytes = read_file(path)?;
    let name = path_str(path);
    let mut r = ByteReader::new(&bytes, &name);
    let f = decode_filter(&mut r)?;
    r.finish()?;
    Ok(f)
}

// ---- PHI1: measurement matrices ------------------------------------------

fn encode_matrix_header(w: &mut ByteWriter, id: MatrixId, materialized: bool, path: &Path) -> Result<()> {
    let d = dims_out(path, "matrix", &[id.rows, id.cols])?;
    w.bytes(b"PHI1");
    w.u8(id.distribution.code());
    w.u64(id.seed);
    w.u32(d[0]);
    w.u32(d[1]);
    w.u8(materialized as u8);
    Ok(())
}

fn decode_matrix_header(r: &mut ByteReader) -> Result<(MatrixId, bool)> {
    r.magic("PHI1")?;
    let code = r.u8()?;
    let distribution = Distribution::from_code(code)
        .ok_or_else(|| r.format_err(format!("unknown distribution code {code}")))?;
    let seed = r.u64()?;
    let rows = dim_u32(r)?;
    let cols = dim_u32(r)?;
    let materialized = match r.u8()? {
        0 => false,
        1 => true,
        other => return Err(r.format_err(format!("materialized flag must be 0 or 1, got {other}"))),
    };
    Ok((
        MatrixId {
            distribution,
            seed,
            rows,
            cols,
        },
        materialized,
    ))
}

/// Seed-only files regenerate on load and are a few bytes; materialized
/// files carry the entries. The two load to bit-identical matrices.
pub fn save_matrix(path: &Path, m: &Matrix, materialized: bool) -> Result<()> {
    let mut w = ByteWriter::new();
    encode_matrix_header(&mut w, m.id(), materialized, path)?;
    if materialized {
        w.f32_slice(m.entries());
    }
    atomic_write(path, &w.into_bytes())
}

pub fn load_matrix(path: &Path) -> Result<Matrix> {
    let bytes = read_file(path)?;
    let name = path_str(path);
    let mut r = ByteReader::new(&bytes, &name);
    let (id, materialized) = decode_matrix_header(&mut r)?;
    let matrix = if materialized {
        let count = checked_count(&r, &[id.rows, id.cols])?;
        let entries = r.f32_slice(count)?;
        MeasurementMatrix::from_entries(id, entries).map_err(|e| decode_err(&name, e))?
    } else {
        Matrix::generate(id.distribution, id.seed, id.rows, id.cols)
            .map_err(|e| decode_err(&name, e))?
    };
    r.finish()?;
    Ok(matrix)
}

// ---- CMP1: compressed measurement streams --------------------------------

pub fn save_measurements(path: &Path, z: &Compressed) -> Result<()> {
    let mut w = ByteWriter::new();
    let id = z.matrix_id();
    w.bytes(b"CMP1");
    encode_matrix_header(&mut w, id, false, path)?;
    let (rows, cols) = z.frame_dims();
    let d = dims_out(path, "measurement stream", &[rows, cols, z.columns()])?;
    for e in d {
        w.u32(e);
    }
    w.u8(z.derivative_order());
    w.f32(z.noise_sigma() as f32);
    w.f32_slice(z.data());
    atomic_write(path, &w.into_bytes())
}

pub fn load_measurements(path: &Path) -> Result<Compressed> {
    let bytes = read_file(path)?;
    let name = path_str(path);
    let mut r = ByteReader::new(&bytes, &name);
    r.magic("CMP1")?;
    // The embedded matrix identity reuses the PHI1 layout, always seed-only.
    let (id, materialized) = decode_matrix_header(&mut r)?;
    if materialized {
        return Err(r.format_err("embedded matrix header must be seed-only".to_string()));
    }
    let rows = dim_u32(&mut r)?;
    let cols = dim_u32(&mut r)?;
    let columns = dim_u32(&mut r)?;
    let order = r.u8()?;
    let sigma = r.f32()? as f64;
    let count = checked_count(&r, &[id.rows, columns])?;
    let data = r.f32_slice(count)?;
    let z = CompressedVideo::from_parts(id, rows, cols, columns, data, sigma, order)
        .map_err(|e| decode_err(&name, e))?;
    r.finish()?;
    Ok(z)
}

// ---- MDL1: trained classifiers -------------------------------------------

pub fn save_model(path: &Path, m: &SvmModel) -> Result<()> {
    let mut w = ByteWriter::new();
    let d = dims_out(path, "model", &[m.classes(), m.dim()])?;
    w.bytes(b"MDL1");
    w.u32(d[0]);
    w.u32(d[1]);
    for (weights, &bias) in m.weights().iter().zip(m.biases()) {
        w.f64_slice(weights);
        w.f64(bias);
    }
    w.f64_slice(m.mean());
    w.f64_slice(m.std());
    let hp = m.hyperparams();
    w.f64(hp.lambda);
    w.u64(hp.epochs as u64);
    w.u64(hp.seed);
    atomic_write(path, &w.into_bytes())
}

pub fn load_model(path: &Path) -> Result<SvmModel> {
    let bytes = read_file(path)?;
    let name = path_str(path);
    let mut r = ByteReader::new(&bytes, &name);
    r.magic("MDL1")?;
    let classes = dim_u32(&mut r)?;
    let dim = dim_u32(&mut r)?;
    checked_count(&r, &[classes, dim])?;
    let mut weights = Vec::with_capacity(classes);
    let mut biases = Vec::with_capacity(classes);
    for _ in 0..classes {
        weights.push(r.f64_slice(dim)?);
        biases.push(r.f64()?);
    }
    let mean = r.f64_slice(dim)?;
    let std = r.f64_slice(dim)?;
    let lambda = r.f64()?;
    let epochs = usize::try_from(r.u64()?)
        .map_err(|_| r.format_err("epoch count exceeds this platform's usize".to_string()))?;
    let seed = r.u64()?;
    let model = SvmModel::from_parts(
        weights,
        biases,
        mean,
        std,
        SvmHyperparams {
            lambda,
            epochs,
            seed,
        },
    )
    .map_err(|e| decode_err(&name, e))?;
    r.finish()?;
    Ok(model)
}

// ---- BNK1: filter banks ----------------------------------------------------

pub fn save_bank(path: &Path, bank: &Bank) -> Result<()> {
    let mut w = ByteWriter::new();
    let count = u32::try_from(bank.len()).map_err(|_| Error::Format {
        path: path_str(path),
        detail: "bank exceeds the u32 format limit".to_string(),
    })?;
    w.bytes(b"BNK1");
    w.u32(count);
    for f in bank.filters() {
        encode_filter(&mut w, f, path)?;
    }
    atomic_write(path, &w.into_bytes())
}

pub fn load_bank(path: &Path) -> Result<Bank> {
    let bytes = read_file(path)?;
    let name = path_str(path);
    let mut r = ByteReader::new(&bytes, &name);
    r.magic("BNK1")?;
    let count = r.u32()? as usize;
    let mut filters = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        filters.push(decode_filter(&mut r)?);
    }
    let bank = FilterBank::from_filters(filters).map_err(|e| decode_err(&name, e))?;
    r.finish()?;
    Ok(bank)
}
