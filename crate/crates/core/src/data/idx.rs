//! IDX container (MNIST/EMNIST) reader. Uncompressed files only.

use std::path::Path;

use super::LabeledDataset;
use crate::error::{Error, Result};

/// Unsigned-byte, 3-D (images).
pub const IDX_IMAGE_MAGIC: u32 = 0x0000_0803;
/// Unsigned-byte, 1-D (labels).
pub const IDX_LABEL_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxHeader {
    pub magic: u32,
    pub dims: Vec<u32>,
}

impl IdxHeader {
    fn byte_len(&self) -> usize {
        4 + 4 * self.dims.len()
    }

    fn element_count(&self) -> usize {
        self.dims.iter().map(|&d| d as usize).product()
    }
}

fn parse_err(path: &Path, field: &'static str, detail: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), field, detail: detail.into() }
}

fn read_u32_be(bytes: &[u8], at: usize) -> Option<u32> {
    bytes.get(at..at + 4).map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

fn parse_header(bytes: &[u8], expected_magic: u32, path: &Path) -> Result<IdxHeader> {
    let magic = read_u32_be(bytes, 0)
        .ok_or_else(|| parse_err(path, "magic", format!("file is only {} bytes", bytes.len())))?;
    if magic != expected_magic {
        return Err(parse_err(
            path,
            "magic",
            format!("expected {expected_magic:#010x}, found {magic:#010x}"),
        ));
    }
    let ndims = (magic & 0xff) as usize;
    let dims = (0..ndims)
        .map(|d| {
            read_u32_be(bytes, 4 + 4 * d)
                .ok_or_else(|| parse_err(path, "dimensions", format!("header truncated at dim {d}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let header = IdxHeader { magic, dims };
    let expected = header.byte_len() + header.element_count();
    if bytes.len() < expected {
        return Err(parse_err(
            path,
            "data",
            format!("truncated: need {expected} bytes, file has {}", bytes.len()),
        ));
    }
    if bytes.len() > expected {
        return Err(parse_err(
            path,
            "data",
            format!("{} trailing bytes after {expected}", bytes.len() - expected),
        ));
    }
    Ok(header)
}

/// Parses an image file. Returns `(header, pixels scaled to [0, 1])`.
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<(IdxHeader, Vec<f64>)> {
    let header = parse_header(bytes, IDX_IMAGE_MAGIC, path)?;
    let pixels = bytes[header.byte_len()..].iter().map(|&b| f64::from(b) / 255.0).collect();
    Ok((header, pixels))
}

pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<(IdxHeader, Vec<usize>)> {
    let header = parse_header(bytes, IDX_LABEL_MAGIC, path)?;
    let labels = bytes[header.byte_len()..].iter().map(|&b| usize::from(b)).collect();
    Ok((header, labels))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Loads an image/label IDX pair. Images are flattened row-major.
pub fn load_idx(image_path: impl AsRef<Path>, label_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let (image_path, label_path) = (image_path.as_ref(), label_path.as_ref());
    let (ih, pixels) = parse_idx_images(&read_file(image_path)?, image_path)?;
    let (lh, labels) = parse_idx_labels(&read_file(label_path)?, label_path)?;
    let (n_images, rows, cols) = (ih.dims[0] as usize, ih.dims[1] as usize, ih.dims[2] as usize);
    let n_labels = lh.dims[0] as usize;
    if n_images != n_labels {
        return Err(parse_err(
            label_path,
            "count",
            format!("{n_labels} labels for {n_images} images in {}", image_path.display()),
        ));
    }
    if rows * cols == 0 {
        return Err(parse_err(image_path, "dimensions", format!("empty image {rows}x{cols}")));
    }
    let n_classes = labels.iter().copied().max().map_or(1, |m| m + 1);
    LabeledDataset::new(rows * cols, pixels, labels, n_classes)?.with_image_shape(rows, cols)
}
