//! IDX image/label parsing and threshold binarization.
//!
//! IDX is the big-endian container used by MNIST: a 4-byte magic
//! `0x00 0x00 <type> <ndims>` followed by `ndims` u32 sizes and row-major data.
//! Gzip-compressed input is detected by its `1F 8B` prefix.

use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};
use crate::patterns::{Pattern, PatternSet, Source};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;
pub const DEFAULT_THRESHOLD: u8 = 128;

/// Raw grayscale images prior to binarization.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayscaleImagePool {
    pub images: Vec<Vec<u8>>,
    pub rows: usize,
    pub cols: usize,
    pub labels: Option<Vec<u8>>,
}

impl GrayscaleImagePool {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn pixels_per_image(&self) -> usize {
        self.rows * self.cols
    }

    /// Attaches labels; the count must match the image count.
    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.images.len() {
            return Err(Error::Format(format!(
                "{} labels for {} images",
                labels.len(),
                self.images.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Keeps the first `per_label` images of each label, in file order.
    /// Fails if any label present in the file has fewer images.
    pub fn balanced(&self, per_label: usize) -> Result<Self> {
        let labels = self
            .labels
            .as_ref()
            .ok_or_else(|| Error::Spec("balanced selection needs labels".into()))?;
        let mut seen = [0usize; 256];
        let mut images = Vec::new();
        let mut kept = Vec::new();
        for (img, &label) in self.images.iter().zip(labels) {
            let slot = &mut seen[label as usize];
            if *slot < per_label {
                *slot += 1;
                images.push(img.clone());
                kept.push(label);
            }
        }
        let mut available = [0usize; 256];
        for &label in labels {
            available[label as usize] += 1;
        }
        if let Some(short) = (0..256).find(|&l| available[l] > 0 && available[l] < per_label) {
            return Err(Error::InsufficientPatterns {
                needed: per_label,
                actual: available[short],
            });
        }
        Ok(GrayscaleImagePool {
            images,
            rows: self.rows,
            cols: self.cols,
            labels: Some(kept),
        })
    }

    /// Binarizes every image into one [`PatternSet`] tagged `image_pool`.
    pub fn to_pattern_set(&self, threshold: u8, rule: ThresholdRule) -> Result<PatternSet> {
        let n = self.pixels_per_image();
        let patterns = self
            .images
            .iter()
            .map(|img| binarize_with(img, threshold, rule, n))
            .collect::<Result<Vec<_>>>()?;
        PatternSet::new(patterns, Source::ImagePool)
    }
}

/// Pixel comparison used by [`binarize_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// `pixel >= threshold` maps to `+1`.
    #[default]
    AtLeast,
    /// `pixel > threshold` maps to `+1`.
    Above,
}

fn maybe_gunzip(raw: &[u8]) -> Result<std::borrow::Cow<'_, [u8]>> {
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw)
            .read_to_end(&mut out)
            .map_err(|e| Error::Format(format!("gzip: {e}")))?;
        Ok(out.into())
    } else {
        Ok(raw.into())
    }
}

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().unwrap()))
        .ok_or(Error::Length {
            expected: offset + 4,
            actual: bytes.len(),
        })
}

/// Parses an IDX header with the given magic; returns dims and the payload.
fn parse_idx(raw: &[u8], magic: u32) -> Result<(Vec<usize>, &[u8])> {
    let found = be_u32(raw, 0)?;
    if found != magic {
        return Err(Error::Format(format!(
            "IDX magic {found:#010x}, expected {magic:#010x}"
        )));
    }
    let ndims = (magic & 0xff) as usize;
    let dims = (0..ndims)
        .map(|d| be_u32(raw, 4 + 4 * d).map(|v| v as usize))
        .collect::<Result<Vec<_>>>()?;
    let header = 4 + 4 * ndims;
    let payload_len: usize = dims.iter().product();
    let payload = &raw[header..];
    if payload.len() != payload_len {
        return Err(Error::Length {
            expected: header + payload_len,
            actual: raw.len(),
        });
    }
    Ok((dims, payload))
}

pub fn read_idx_images(raw: &[u8]) -> Result<GrayscaleImagePool> {
    let raw = maybe_gunzip(raw)?;
    let (dims, payload) = parse_idx(&raw, IDX_IMAGES_MAGIC)?;
    let (count, rows, cols) = (dims[0], dims[1], dims[2]);
    if rows == 0 || cols == 0 {
        return Err(Error::Format(format!(
            "degenerate image size {rows}x{cols}"
        )));
    }
    let images = payload
        .chunks_exact(rows * cols)
        .map(<[u8]>::to_vec)
        .collect::<Vec<_>>();
    debug_assert_eq!(images.len(), count);
    Ok(GrayscaleImagePool {
        images,
        rows,
        cols,
        labels: None,
    })
}

pub fn read_idx_labels(raw: &[u8]) -> Result<Vec<u8>> {
    let raw = maybe_gunzip(raw)?;
    let (_, payload) = parse_idx(&raw, IDX_LABELS_MAGIC)?;
    Ok(payload.to_vec())
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

/// Loads an image file and, optionally, its label file.
pub fn load_idx_pool(
    images: impl AsRef<Path>,
    labels: Option<&Path>,
) -> Result<GrayscaleImagePool> {
    let pool = read_idx_images(&read_file(images.as_ref())?)?;
    match labels {
        Some(path) => pool.with_labels(read_idx_labels(&read_file(path)?)?),
        None => Ok(pool),
    }
}

/// Binarizes with the default `>=` rule.
pub fn binarize(image: &[u8], threshold: u8, n_neurons: usize) -> Result<Pattern> {
    binarize_with(image, threshold, ThresholdRule::AtLeast, n_neurons)
}

pub fn binarize_with(
    image: &[u8],
    threshold: u8,
    rule: ThresholdRule,
    n_neurons: usize,
) -> Result<Pattern> {
    if image.len() != n_neurons {
        return Err(Error::Dimension {
            expected: n_neurons,
            actual: image.len(),
        });
    }
    Ok(Pattern::from_bools(image.iter().map(|&px| match rule {
        ThresholdRule::AtLeast => px >= threshold,
        ThresholdRule::Above => px > threshold,
    })))
}
