//! IDX (MNIST) file parsing.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const NUM_CLASSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
}

/// Images flattened row-major with pixels scaled to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MnistDataset {
    pub images: Vec<f64>,
    pub labels: Vec<u8>,
    pub features: usize,
    pub split: Split,
}

impl MnistDataset {
    pub fn new(images: Vec<f64>, labels: Vec<u8>, features: usize, split: Split) -> Result<Self> {
        if features == 0 || images.len() != labels.len() * features {
            return Err(Error::CountMismatch {
                images: images.len().checked_div(features).unwrap_or(0),
                labels: labels.len(),
            });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= NUM_CLASSES) {
            return Err(Error::LabelOutOfRange {
                index,
                label,
                classes: NUM_CLASSES,
            });
        }
        Ok(Self {
            images,
            labels,
            features,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[f64] {
        &self.images[i * self.features..(i + 1) * self.features]
    }

    /// The first `n` examples (all of them if `n` exceeds the size).
    pub fn head(&self, n: usize) -> Self {
        let n = n.min(self.len());
        Self {
            images: self.images[..n * self.features].to_vec(),
            labels: self.labels[..n].to_vec(),
            features: self.features,
            split: self.split,
        }
    }
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    let b = bytes.get(at..at + 4).ok_or(Error::TruncatedFile {
        needed: at + 4,
        found: bytes.len(),
    })?;
    Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::BadMagic { expected, found });
    }
    Ok(())
}

/// Parses an image file; returns `(pixels in [0,1], count, rows * cols)`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(Vec<f64>, usize, usize)> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    let features = rows * cols;
    let needed = 16 + count * features;
    if bytes.len() < needed {
        return Err(Error::TruncatedFile {
            needed,
            found: bytes.len(),
        });
    }
    let pixels = bytes[16..needed].iter().map(|&v| v as f64 / 255.0).collect();
    Ok((pixels, count, features))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    check_magic(bytes, LABEL_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let needed = 8 + count;
    if bytes.len() < needed {
        return Err(Error::TruncatedFile {
            needed,
            found: bytes.len(),
        });
    }
    let labels = bytes[8..needed].to_vec();
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= NUM_CLASSES) {
        return Err(Error::LabelOutOfRange {
            index,
            label,
            classes: NUM_CLASSES,
        });
    }
    Ok(labels)
}

pub fn load_mnist_idx(image_path: &Path, label_path: &Path, split: Split) -> Result<MnistDataset> {
    let (images, count, features) = parse_idx_images(&std::fs::read(image_path)?)?;
    let labels = parse_idx_labels(&std::fs::read(label_path)?)?;
    if count != labels.len() {
        return Err(Error::CountMismatch {
            images: count,
            labels: labels.len(),
        });
    }
    MnistDataset::new(images, labels, features, split)
}

/// Standard MNIST file names inside a directory.
#[derive(Debug, Clone)]
pub struct MnistPaths {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub valid_images: PathBuf,
    pub valid_labels: PathBuf,
}

impl MnistPaths {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            train_images: dir.join("train-images-idx3-ubyte"),
            train_labels: dir.join("train-labels-idx1-ubyte"),
            valid_images: dir.join("t10k-images-idx3-ubyte"),
            valid_labels: dir.join("t10k-labels-idx1-ubyte"),
        }
    }

    pub fn exist(&self) -> bool {
        [&self.train_images, &self.train_labels, &self.valid_images, &self.valid_labels]
            .iter()
            .all(|p| p.is_file())
    }

    pub fn load(&self) -> Result<(MnistDataset, MnistDataset)> {
        Ok((
            load_mnist_idx(&self.train_images, &self.train_labels, Split::Train)?,
            load_mnist_idx(&self.valid_images, &self.valid_labels, Split::Valid)?,
        ))
    }
}
