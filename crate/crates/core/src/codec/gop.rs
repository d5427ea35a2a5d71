use serde::{Deserialize, Serialize};

use crate::error::CodecError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FrameType {
    I,
    B,
}

impl FrameType {
    pub fn as_u8(self) -> u8 {
        match self {
            FrameType::I => 0,
            FrameType::B => 1,
        }
    }

    pub fn from_u8(b: u8) -> Option<Self> {
        match b {
            0 => Some(FrameType::I),
            1 => Some(FrameType::B),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FrameType::I => "I",
            FrameType::B => "B",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GopConfig {
    pub gop_size: u32,
    pub b_frames: u32,
    pub frame_rate: f64,
    pub qp: u8,
}

impl Default for GopConfig {
    fn default() -> Self {
        Self {
            gop_size: 4,
            b_frames: 3,
            frame_rate: 24.0,
            qp: 32,
        }
    }
}

impl GopConfig {
    pub fn with_qp(qp: u8) -> Self {
        Self {
            qp,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), CodecError> {
        if self.gop_size == 0 || self.gop_size > 255 {
            return Err(CodecError::InvalidGop(format!("gop size {} out of range", self.gop_size)));
        }
        if self.b_frames + 1 != self.gop_size {
            return Err(CodecError::InvalidGop(format!(
                "b_frames must equal gop_size - 1 ({} vs {})",
                self.b_frames, self.gop_size
            )));
        }
        if self.qp > 51 {
            return Err(CodecError::InvalidGop(format!("qp {} outside [0, 51]", self.qp)));
        }
        if !(self.frame_rate > 0.0) || !self.frame_rate.is_finite() {
            return Err(CodecError::InvalidGop(format!("frame rate {} must be positive", self.frame_rate)));
        }
        Ok(())
    }

    pub fn frame_type(&self, index: u32) -> FrameType {
        if index.is_multiple_of(self.gop_size) {
            FrameType::I
        } else {
            FrameType::B
        }
    }

    /// The I frame a B frame predicts from.
    pub fn ref_index(&self, index: u32) -> u32 {
        index - index % self.gop_size
    }
}

/// Quantizer step `2^((qp − 4) / 6)`; qp 4 is step 1.
pub fn quant_step(qp: u8) -> f64 {
    2f64.powf((qp as f64 - 4.0) / 6.0)
}
