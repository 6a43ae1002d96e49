//! Image stacks as data matrices: one column-major vectorized 8-bit
//! grayscale frame per column.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, ExtendedColorType, ImageEncoder, ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Clone, Debug)]
pub struct FrameStack {
    /// (height·width) × frames.
    pub matrix: DenseMatrix,
    pub frame_height: usize,
    pub frame_width: usize,
    /// Source file names in column order.
    pub frame_names: Vec<String>,
}

/// A decoded 8-bit grayscale image, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayFrame {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<u8>,
}

impl GrayFrame {
    /// Keeps every `factor`-th pixel along both axes, starting at (0, 0).
    pub fn decimate(&self, factor: usize) -> GrayFrame {
        let height = self.height.div_ceil(factor);
        let width = self.width.div_ceil(factor);
        let mut pixels = Vec::with_capacity(height * width);
        for r in (0..self.height).step_by(factor) {
            for c in (0..self.width).step_by(factor) {
                pixels.push(self.pixels[r * self.width + c]);
            }
        }
        GrayFrame { height, width, pixels }
    }

    /// Column-major vectorization: entry `c·height + r` is pixel `(r, c)`.
    pub fn to_column(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pixels.len());
        for c in 0..self.width {
            for r in 0..self.height {
                out.push(f64::from(self.pixels[r * self.width + c]));
            }
        }
        out
    }
}

fn image_error(path: &Path, reason: impl ToString) -> Error {
    Error::Image { path: path.to_path_buf(), reason: reason.to_string() }
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayFrame> {
    let path = path.as_ref();
    let reader = ImageReader::with_format(BufReader::new(File::open(path)?), ImageFormat::Pnm);
    let img = reader.decode().map_err(|e| image_error(path, e))?;
    if img.color() != ColorType::L8 {
        return Err(image_error(path, format!("expected 8-bit grayscale, found {:?}", img.color())));
    }
    let gray = img.into_luma8();
    let (width, height) = gray.dimensions();
    Ok(GrayFrame { height: height as usize, width: width as usize, pixels: gray.into_raw() })
}

/// Writes a binary (P5) graymap.
pub fn write_pgm(path: impl AsRef<Path>, frame: &GrayFrame) -> Result<()> {
    let path = path.as_ref();
    let writer = BufWriter::new(File::create(path)?);
    PnmEncoder::new(writer)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(&frame.pixels, frame.width as u32, frame.height as u32, ExtendedColorType::L8)
        .map_err(|e| image_error(path, e))
}

fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_pgm = path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
        if is_pgm && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

/// Loads every `.pgm` in `dir`, sorted by file name, into a frame matrix.
pub fn load_frame_stack(dir: impl AsRef<Path>, downsample: usize) -> Result<FrameStack> {
    let dir = dir.as_ref();
    if downsample == 0 {
        return Err(Error::InvalidArgument("downsample factor must be positive".into()));
    }
    let paths = frame_paths(dir)?;
    if paths.is_empty() {
        return Err(Error::InvalidInput(format!("no .pgm frames in {}", dir.display())));
    }
    let mut columns = Vec::with_capacity(paths.len());
    let mut names = Vec::with_capacity(paths.len());
    let mut shape = None;
    for path in &paths {
        let frame = read_pgm(path)?;
        match shape {
            None => shape = Some((frame.height, frame.width)),
            Some(s) if s != (frame.height, frame.width) => {
                return Err(Error::InvalidInput(format!(
                    "{} is {}x{} but earlier frames are {}x{}",
                    path.display(),
                    frame.height,
                    frame.width,
                    s.0,
                    s.1
                )));
            }
            Some(_) => {}
        }
        let frame = if downsample > 1 { frame.decimate(downsample) } else { frame };
        columns.push(frame.to_column());
        names.push(path.file_name().expect("file path").to_string_lossy().into_owned());
    }
    let (h, w) = shape.expect("at least one frame");
    Ok(FrameStack {
        matrix: DenseMatrix::from_columns(&columns)?,
        frame_height: h.div_ceil(downsample),
        frame_width: w.div_ceil(downsample),
        frame_names: names,
    })
}

/// Inverse of the frame vectorization. Values are rounded and clamped to
/// `[0, 255]`; returns how many pixels needed clamping.
pub fn write_frame(column: &[f64], frame_height: usize, frame_width: usize, path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    if column.len() != frame_height * frame_width || column.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "column of length {} does not fit a {frame_height}x{frame_width} frame",
            column.len()
        )));
    }
    let mut pixels = vec![0u8; column.len()];
    let mut clamped = 0;
    for c in 0..frame_width {
        for r in 0..frame_height {
            let v = column[c * frame_height + r].round();
            if !(0.0..=255.0).contains(&v) {
                clamped += 1;
            }
            pixels[r * frame_width + c] = v.clamp(0.0, 255.0) as u8;
        }
    }
    if clamped > 0 {
        log::warn!("{}: clamped {clamped} pixel(s) to [0, 255]", path.display());
    }
    write_pgm(path, &GrayFrame { height: frame_height, width: frame_width, pixels })?;
    Ok(clamped)
}
