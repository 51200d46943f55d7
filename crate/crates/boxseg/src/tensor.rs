//! UACT binary tensor interchange.
//!
//! Layout: magic `UACT`, version byte `0x01`, little-endian u32 channel,
//! height, and width counts, then `C*H*W` little-endian f32 values,
//! channel-major then row-major. Round trips are bit-exact.

use std::path::Path;

use boxseg_core::attention::FeatureStack;
use boxseg_core::{ActivationMap, ActivationStack, BoundaryMap, ClassId, ImageDims};

use crate::error::DataError;
use crate::masks::write_atomic;

pub const MAGIC: [u8; 4] = *b"UACT";
pub const VERSION: u8 = 0x01;
/// Header: magic + version + three u32 extents.
pub const HEADER_LEN: usize = 4 + 1 + 3 * 4;

/// A dense f32 tensor with grid dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    channels: u32,
    dims: ImageDims,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(channels: u32, dims: ImageDims, data: Vec<f32>) -> Result<Self, DataError> {
        let expected = channels as usize * dims.n_pixels();
        if channels == 0 {
            return Err(DataError::EmptyTensor);
        }
        if data.len() != expected {
            return Err(DataError::Truncated {
                expected: expected * 4,
                got: data.len() * 4,
            });
        }
        Ok(Self {
            channels,
            dims,
            data,
        })
    }

    pub fn channels(&self) -> u32 {
        self.channels
    }

    pub fn dims(&self) -> ImageDims {
        self.dims
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[f32] {
        let n = self.dims.n_pixels();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.channels.to_le_bytes());
        out.extend_from_slice(&self.dims.height().to_le_bytes());
        out.extend_from_slice(&self.dims.width().to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DataError> {
        if bytes.len() < HEADER_LEN {
            return Err(DataError::Truncated {
                expected: HEADER_LEN,
                got: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().expect("sliced");
        if magic != MAGIC {
            return Err(DataError::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(DataError::BadVersion(bytes[4]));
        }
        let channels = u32::from_le_bytes(bytes[5..9].try_into().expect("sliced"));
        let height = u32::from_le_bytes(bytes[9..13].try_into().expect("sliced"));
        let width = u32::from_le_bytes(bytes[13..17].try_into().expect("sliced"));
        let dims = ImageDims::new(height, width)
            .map_err(|_| DataError::EmptyTensor)?;
        if channels == 0 {
            return Err(DataError::EmptyTensor);
        }
        let count = channels as usize * dims.n_pixels();
        let expected = HEADER_LEN + count * 4;
        if bytes.len() != expected {
            return Err(DataError::Truncated {
                expected,
                got: bytes.len(),
            });
        }
        let data = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes(b.try_into().expect("chunked")))
            .collect();
        Ok(Self {
            channels,
            dims,
            data,
        })
    }

    /// A single-channel tensor from a boundary map (f64 narrowed to f32).
    pub fn from_boundary_map(map: &BoundaryMap) -> Self {
        Self {
            channels: 1,
            dims: map.dims(),
            data: map.values().iter().map(|&v| v as f32).collect(),
        }
    }

    /// Interprets a single-channel tensor as a boundary probability map.
    pub fn to_boundary_map(&self) -> Result<BoundaryMap, DataError> {
        if self.channels != 1 {
            return Err(DataError::MaskFormat(format!(
                "boundary tensors have one channel, got {}",
                self.channels
            )));
        }
        Ok(BoundaryMap::new(
            self.dims,
            self.data.iter().map(|&v| v as f64).collect(),
        )?)
    }

    /// Interprets the channels as a classifier feature stack.
    pub fn to_feature_stack(&self) -> Result<FeatureStack, DataError> {
        let channels = (0..self.channels as usize)
            .map(|c| self.channel(c).iter().map(|&v| v as f64).collect())
            .collect();
        Ok(FeatureStack::new(self.dims, channels)?)
    }

    /// Interprets channel `c` as the activation map of object class `c + 1`.
    ///
    /// All-zero channels are treated as "class not predicted" and skipped;
    /// the remaining channels are re-normalized into `[0, 1]`.
    pub fn to_activation_stack(&self) -> Result<ActivationStack, DataError> {
        if self.channels as usize > ClassId::OBJECTS.len() {
            return Err(DataError::MaskFormat(format!(
                "activation tensors carry at most {} channels, got {}",
                ClassId::OBJECTS.len(),
                self.channels
            )));
        }
        let mut maps = Vec::new();
        for (slot, class) in ClassId::OBJECTS[..self.channels as usize].iter().enumerate() {
            let channel = self.channel(slot);
            if channel.iter().all(|&v| v == 0.0) {
                continue;
            }
            let values: Vec<f64> = channel.iter().map(|&v| v as f64).collect();
            maps.push(ActivationMap::new(self.dims, *class, values)?.normalized());
        }
        Ok(ActivationStack::new(self.dims, maps)?)
    }
}

pub fn write_tensor(tensor: &Tensor, path: &Path) -> Result<(), DataError> {
    write_atomic(path, &tensor.to_bytes())
}

pub fn read_tensor(path: &Path) -> Result<Tensor, DataError> {
    let bytes = std::fs::read(path).map_err(|e| DataError::io(path, e))?;
    Tensor::from_bytes(&bytes)
}
