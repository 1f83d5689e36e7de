//! Dense 3D scalar grids: the "segvol" file format, preprocessing utilities,
//! and voxel-level metrics.
//!
//! A volume is a flat array in x-fastest order (`index = x + nx*(y + ny*z)`)
//! plus dimensions and voxel spacing. Two payload types exist: binary masks
//! (`u8`, values 0/1) and float maps (`f32`). On disk a volume is a JSON
//! header next to a little-endian raw file:
//!
//! ```json
//! {"dims":[nx,ny,nz],"dtype":"u8","spacing":[sx,sy,sz],"data":"name.raw"}
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payload type of a [`Volume`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dtype {
    #[serde(rename = "u8")]
    U8,
    #[serde(rename = "f32")]
    F32,
}

/// Voxel payload. Binary masks hold only 0/1; float maps hold finite values.
#[derive(Debug, Clone, PartialEq)]
pub enum VolumeData {
    U8(Vec<u8>),
    F32(Vec<f32>),
}

impl VolumeData {
    pub fn len(&self) -> usize {
        match self {
            VolumeData::U8(d) => d.len(),
            VolumeData::F32(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            VolumeData::U8(_) => Dtype::U8,
            VolumeData::F32(_) => Dtype::F32,
        }
    }
}

/// Dense 3D scalar grid, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    dims: [usize; 3],
    spacing: [f64; 3],
    data: VolumeData,
}

/// JSON sidecar describing a raw payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeHeader {
    pub dims: [usize; 3],
    pub dtype: Dtype,
    #[serde(default = "unit_spacing")]
    pub spacing: [f64; 3],
    /// Raw payload filename, resolved relative to the header's directory.
    pub data: String,
}

fn unit_spacing() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}

fn check_dims_spacing(dims: [usize; 3], spacing: [f64; 3]) -> Result<()> {
    if dims.contains(&0) {
        return Err(Error::invalid(format!("dims must be positive, got {dims:?}")));
    }
    if spacing.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::invalid(format!(
            "spacing must be positive and finite, got {spacing:?}"
        )));
    }
    Ok(())
}

impl Volume {
    /// Binary mask from raw data. Rejects values other than 0/1.
    pub fn from_u8(dims: [usize; 3], spacing: [f64; 3], data: Vec<u8>) -> Result<Self> {
        check_dims_spacing(dims, spacing)?;
        let expected = dims[0] * dims[1] * dims[2];
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "data length {} does not match dims {:?} ({} voxels)",
                data.len(),
                dims,
                expected
            )));
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(Error::NonBinaryVoxel { index, value });
        }
        Ok(Volume {
            dims,
            spacing,
            data: VolumeData::U8(data),
        })
    }

    /// Float map from raw data. Rejects NaN and infinities; range is not
    /// constrained here (standardized volumes are legal). Operations with
    /// probability-map semantics check [0, 1] themselves.
    pub fn from_f32(dims: [usize; 3], spacing: [f64; 3], data: Vec<f32>) -> Result<Self> {
        check_dims_spacing(dims, spacing)?;
        let expected = dims[0] * dims[1] * dims[2];
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "data length {} does not match dims {:?} ({} voxels)",
                data.len(),
                dims,
                expected
            )));
        }
        if let Some((index, _)) = data.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteVoxel { index });
        }
        Ok(Volume {
            dims,
            spacing,
            data: VolumeData::F32(data),
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn spacing(&self) -> [f64; 3] {
        self.spacing
    }

    pub fn dtype(&self) -> Dtype {
        self.data.dtype()
    }

    pub fn data(&self) -> &VolumeData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Flat index of voxel (x, y, z); x varies fastest.
    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    pub fn as_u8(&self) -> Result<&[u8]> {
        match &self.data {
            VolumeData::U8(d) => Ok(d),
            VolumeData::F32(_) => Err(Error::invalid("expected a binary (u8) volume, got f32")),
        }
    }

    pub fn as_f32(&self) -> Result<&[f32]> {
        match &self.data {
            VolumeData::F32(d) => Ok(d),
            VolumeData::U8(_) => Err(Error::invalid("expected a float (f32) volume, got u8")),
        }
    }

    /// Number of foreground voxels in a binary mask.
    pub fn foreground_count(&self) -> Result<usize> {
        Ok(self.as_u8()?.iter().filter(|&&v| v == 1).count())
    }
}

fn raw_path_for(header_path: &Path, data: &str) -> PathBuf {
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    dir.join(data)
}

/// Load a volume from its JSON header; the raw payload must match the header
/// byte-for-byte in length.
pub fn load_volume(header_path: impl AsRef<Path>) -> Result<Volume> {
    let header_path = header_path.as_ref();
    let text = fs::read_to_string(header_path).map_err(|e| Error::io(header_path, e))?;
    let header: VolumeHeader = serde_json::from_str(&text).map_err(|e| Error::Malformed {
        what: "volume header",
        path: header_path.to_path_buf(),
        detail: e.to_string(),
    })?;
    check_dims_spacing(header.dims, header.spacing)?;

    let raw_path = raw_path_for(header_path, &header.data);
    let bytes = fs::read(&raw_path).map_err(|e| Error::io(&raw_path, e))?;
    let voxels = header.dims[0] * header.dims[1] * header.dims[2];
    let expected = match header.dtype {
        Dtype::U8 => voxels as u64,
        Dtype::F32 => 4 * voxels as u64,
    };
    if bytes.len() as u64 != expected {
        return Err(Error::SizeMismatch {
            path: raw_path,
            expected,
            actual: bytes.len() as u64,
        });
    }
    match header.dtype {
        Dtype::U8 => Volume::from_u8(header.dims, header.spacing, bytes),
        Dtype::F32 => {
            let data: Vec<f32> = bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                .collect();
            Volume::from_f32(header.dims, header.spacing, data)
        }
    }
}

/// Save a volume as `<stem>.json` + `<stem>.raw` next to each other.
/// `load_volume(save_volume(v))` reproduces `v` bit-exactly.
pub fn save_volume(v: &Volume, header_path: impl AsRef<Path>) -> Result<()> {
    let header_path = header_path.as_ref();
    let stem = header_path
        .file_stem()
        .ok_or_else(|| Error::invalid(format!("header path {header_path:?} has no file stem")))?;
    let raw_name = format!("{}.raw", stem.to_string_lossy());

    let header = VolumeHeader {
        dims: v.dims,
        dtype: v.dtype(),
        spacing: v.spacing,
        data: raw_name.clone(),
    };
    let text = serde_json::to_string_pretty(&header).expect("header serializes");
    fs::write(header_path, text).map_err(|e| Error::io(header_path, e))?;

    let raw_path = raw_path_for(header_path, &raw_name);
    let bytes: Vec<u8> = match &v.data {
        VolumeData::U8(d) => d.clone(),
        VolumeData::F32(d) => d.iter().flat_map(|x| x.to_le_bytes()).collect(),
    };
    fs::write(&raw_path, bytes).map_err(|e| Error::io(&raw_path, e))?;
    Ok(())
}

/// Rescale a float volume to zero mean and unit standard deviation
/// (population), then clip to [-3, 3]. Mean and std are not recomputed after
/// clipping.
pub fn standardize(v: &Volume) -> Result<Volume> {
    let data = v.as_f32()?;
    let n = data.len() as f64;
    let mean = data.iter().map(|&x| x as f64).sum::<f64>() / n;
    let var = data
        .iter()
        .map(|&x| {
            let d = x as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    if var <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let std = var.sqrt();
    let out: Vec<f32> = data
        .iter()
        .map(|&x| (((x as f64 - mean) / std).clamp(-3.0, 3.0)) as f32)
        .collect();
    Volume::from_f32(v.dims, v.spacing, out)
}

fn check_probability(data: &[f32]) -> Result<()> {
    if let Some((index, &value)) = data
        .iter()
        .enumerate()
        .find(|(_, &v)| !(0.0..=1.0).contains(&v))
    {
        return Err(Error::NotProbability { index, value });
    }
    Ok(())
}

/// Threshold a probability map into a binary mask. A voxel becomes foreground
/// iff its value is >= `threshold` (ties go to foreground). The comparison
/// happens in the data's own precision (f32), so a threshold like 0.7 ties
/// with a stored 0.7 instead of falling between adjacent representable
/// values.
pub fn binarize(v: &Volume, threshold: f64) -> Result<Volume> {
    let data = v.as_f32()?;
    check_probability(data)?;
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::invalid(format!(
            "binarize threshold must be in [0, 1], got {threshold}"
        )));
    }
    let t = threshold as f32;
    let out: Vec<u8> = data.iter().map(|&p| u8::from(p >= t)).collect();
    Volume::from_u8(v.dims, v.spacing, out)
}

/// Standard voxel intersection-over-union between two binary masks.
/// Two all-zero masks agree perfectly and score 1.
pub fn voxel_iou(gt: &Volume, pred: &Volume) -> Result<f64> {
    if gt.dims != pred.dims {
        return Err(Error::DimsMismatch {
            a: gt.dims,
            b: pred.dims,
        });
    }
    let a = gt.as_u8()?;
    let b = pred.as_u8()?;
    let mut inter = 0u64;
    let mut union = 0u64;
    for (&x, &y) in a.iter().zip(b) {
        inter += u64::from(x & y);
        union += u64::from(x | y);
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(inter as f64 / union as f64)
}

/// Mean voxel-wise binary entropy of a probability map, in nats.
/// Uses the convention 0*ln(0) = 0.
pub fn mean_entropy(v: &Volume) -> Result<f64> {
    let data = v.as_f32()?;
    check_probability(data)?;
    let sum: f64 = data
        .iter()
        .map(|&p| {
            let p = p as f64;
            let mut h = 0.0;
            if p > 0.0 {
                h -= p * p.ln();
            }
            if p < 1.0 {
                h -= (1.0 - p) * (1.0 - p).ln();
            }
            h
        })
        .sum();
    Ok(sum / data.len() as f64)
}
