//! Binary PGM (P5) ingestion. A directory of zero-padded frame files reads
//! as one volume, frames ordered by file name; sample bytes are scaled to
//! [0, 1] by 1/255.

use std::path::Path;

use smash_core::{Result, Volume};

use super::{path_str, read_file, ByteReader};

/// Pulls the next header token, skipping whitespace and '#' comments.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize, what: &str, r: &ByteReader) -> Result<usize> {
    let tok = token(bytes, pos).ok_or_else(|| r.format_err(format!("missing {what}")))?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| r.format_err(format!("{what} is not a decimal number")))
}

/// One P5 frame: (rows, cols, samples in [0, 1]).
pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let name = path_str(path);
    let r = ByteReader::new(bytes, &name);
    let mut pos = 0usize;
    match token(bytes, &mut pos) {
        Some(b"P5") => {}
        _ => return Err(r.format_err("not a binary PGM (expected P5)".to_string())),
    }
    let cols = header_number(bytes, &mut pos, "width", &r)?;
    let rows = header_number(bytes, &mut pos, "height", &r)?;
    let maxval = header_number(bytes, &mut pos, "maxval", &r)?;
    if maxval == 0 || maxval > 255 {
        return Err(r.format_err(format!("maxval {maxval} unsupported; 8-bit only")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(r.format_err("missing whitespace before the raster".to_string()));
    }
    pos += 1;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| r.format_err("dimension overflow".to_string()))?;
    let raster = &bytes[pos..];
    if raster.len() != count {
        return Err(r.format_err(format!(
            "raster holds {} bytes, expected {count} for {cols}x{rows}",
            raster.len()
        )));
    }
    let data = raster.iter().map(|&b| b as f64 / 255.0).collect();
    Ok((rows, cols, data))
}

pub fn load_pgm(path: &Path) -> Result<(usize, usize, Vec<f64>)> {
    let bytes = read_file(path)?;
    parse_pgm(&bytes, path)
}

/// Reads every `.pgm` file in `dir` (non-recursive) as one volume, frames
/// in lexicographic file-name order.
pub fn read_pgm_dir(dir: &Path) -> Result<Volume> {
    let name = path_str(dir);
    let fail = |detail: String| smash_core::Error::Format {
        path: name.clone(),
        detail,
    };
    let mut frames: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| fail(format!("cannot list: {e}")))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("pgm"))
                .unwrap_or(false)
        })
        .collect();
    if frames.is_empty() {
        return Err(fail("no .pgm frames".to_string()));
    }
    frames.sort_by(|a, b| a.file_name().cmp(&b.file_name()));

    let (rows, cols, mut data) = load_pgm(&frames[0])?;
    data.reserve(rows * cols * (frames.len() - 1));
    for frame in &frames[1..] {
        let (r, c, samples) = load_pgm(frame)?;
        if (r, c) != (rows, cols) {
            return Err(fail(format!(
                "{} is {c}x{r} but the first frame is {cols}x{rows}",
                path_str(frame)
            )));
        }
        data.extend_from_slice(&samples);
    }
    Volume::new(rows, cols, frames.len(), data)
}
