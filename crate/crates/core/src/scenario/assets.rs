//! Source video preparation and a decode cache keyed by loss set.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use super::config::{VideoConfig, VideoSource};
use crate::codec::{
    decode_with_concealment, encode_sequence, load_passthrough, psnr_y_sequence, read_yuv420, Bitstream, RawFrame,
    SyntheticSequence,
};
use crate::error::{ConfigError, Result};

/// Everything a run needs about the transmitted video, shared across runs.
#[derive(Debug)]
pub struct VideoAssets {
    /// Original pictures, absent in pass-through mode.
    pub raw: Option<Vec<RawFrame>>,
    pub bitstream: Bitstream,
    psnr_cache: Mutex<HashMap<Vec<u32>, Arc<Vec<f64>>>>,
}

impl VideoAssets {
    pub fn prepare(v: &VideoConfig) -> Result<Self> {
        let gop = v.gop();
        let (raw, bitstream) = match v.source {
            VideoSource::Synthetic => {
                let raw = SyntheticSequence::new(v.width, v.height)
                    .with_motion(v.motion)
                    .with_texture(v.texture)
                    .frames(v.frames);
                let bs = encode_sequence(&raw, &gop)?;
                (Some(raw), bs)
            }
            VideoSource::Yuv => {
                let path = v.path.as_deref().ok_or_else(|| ConfigError::Validation("video.path missing".into()))?;
                let raw = read_yuv420(path, v.width, v.height, v.frames)?;
                let bs = encode_sequence(&raw, &gop)?;
                (Some(raw), bs)
            }
            VideoSource::Passthrough => {
                let (path, sidecar) = match (v.path.as_deref(), v.sidecar.as_deref()) {
                    (Some(p), Some(s)) => (p, s),
                    _ => return Err(ConfigError::Validation("video.path and video.sidecar missing".into()).into()),
                };
                (None, load_passthrough(path, sidecar, gop)?)
            }
        };
        Ok(Self::from_parts(raw, bitstream))
    }

    pub fn from_parts(raw: Option<Vec<RawFrame>>, bitstream: Bitstream) -> Self {
        Self {
            raw,
            bitstream,
            psnr_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn frame_count(&self) -> usize {
        self.bitstream.frame_count()
    }

    /// Per-frame Y-PSNR of the concealed decode for a loss set, or `None`
    /// when the stream cannot be decoded locally.
    pub fn frame_psnr(&self, lost: &BTreeSet<u32>) -> Result<Option<Arc<Vec<f64>>>> {
        let Some(raw) = self.raw.as_ref() else {
            return Ok(None);
        };
        let key: Vec<u32> = lost.iter().copied().collect();
        if let Some(hit) = self.psnr_cache.lock().expect("cache lock").get(&key) {
            return Ok(Some(hit.clone()));
        }
        let shown = decode_with_concealment(&self.bitstream, lost)?;
        let psnr = Arc::new(psnr_y_sequence(raw, &shown)?);
        self.psnr_cache
            .lock()
            .expect("cache lock")
            .insert(key, psnr.clone());
        Ok(Some(psnr))
    }
}
