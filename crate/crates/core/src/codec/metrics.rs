//! Luma PSNR and stream bitrate.

use super::frame::RawFrame;
use super::toy::Bitstream;
use crate::error::CodecError;

/// Reported for identical planes instead of +∞.
pub const PSNR_CAP_DB: f64 = 99.0;

pub fn mse(a: &[u8], b: &[u8]) -> f64 {
    let sum: u64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    sum as f64 / a.len() as f64
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * (255.0f64 * 255.0 / mse).log10()).min(PSNR_CAP_DB)
    }
}

pub fn psnr_y(reference: &RawFrame, reconstructed: &RawFrame) -> Result<f64, CodecError> {
    if reference.dims() != reconstructed.dims() {
        return Err(CodecError::DimensionMismatch {
            expected: reference.dims(),
            got: reconstructed.dims(),
        });
    }
    Ok(psnr_from_mse(mse(&reference.y, &reconstructed.y)))
}

/// Per-frame Y-PSNR, paired by position.
pub fn psnr_y_sequence(reference: &[RawFrame], reconstructed: &[RawFrame]) -> Result<Vec<f64>, CodecError> {
    if reference.len() != reconstructed.len() {
        return Err(CodecError::Malformed(format!(
            "sequence lengths differ: {} vs {}",
            reference.len(),
            reconstructed.len()
        )));
    }
    reference.iter().zip(reconstructed).map(|(a, b)| psnr_y(a, b)).collect()
}

/// Arithmetic mean of per-frame Y-PSNR in dB.
pub fn mean_psnr_y(reference: &[RawFrame], reconstructed: &[RawFrame]) -> Result<f64, CodecError> {
    let v = psnr_y_sequence(reference, reconstructed)?;
    Ok(v.iter().sum::<f64>() / v.len().max(1) as f64)
}

/// Total payload bits divided by the sequence's playing time.
pub fn bitrate_of(bs: &Bitstream) -> f64 {
    bitrate_from_bytes(bs.total_payload_bytes(), bs.frame_count(), bs.header.gop.frame_rate)
}

pub fn bitrate_from_bytes(payload_bytes: usize, frame_count: usize, frame_rate: f64) -> f64 {
    if frame_count == 0 {
        return 0.0;
    }
    payload_bytes as f64 * 8.0 / (frame_count as f64 / frame_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(y: u8) -> RawFrame {
        RawFrame::filled(16, 8, y, 128, 128).unwrap()
    }

    #[test]
    fn identical_frames_hit_cap() {
        assert_eq!(psnr_y(&frame(77), &frame(77)).unwrap(), 99.0);
    }

    #[test]
    fn unit_difference() {
        let p = psnr_y(&frame(100), &frame(101)).unwrap();
        assert!((p - 10.0 * 65025f64.log10()).abs() < 1e-12);
        assert!((p - 48.13).abs() < 0.005);
    }

    #[test]
    fn full_scale_difference_is_zero_db() {
        assert_eq!(psnr_y(&frame(0), &frame(255)).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_dims() {
        let other = RawFrame::filled(8, 8, 0, 0, 0).unwrap();
        assert!(matches!(psnr_y(&frame(0), &other), Err(CodecError::DimensionMismatch { .. })));
    }

    #[test]
    fn bitrate_arithmetic() {
        assert!((bitrate_from_bytes(15_000, 10, 24.0) - 288_000.0).abs() < 1e-9);
        assert!((bitrate_from_bytes(30_000, 10, 24.0) - 576_000.0).abs() < 1e-9);
        assert_eq!(bitrate_from_bytes(0, 10, 24.0), 0.0);
    }
}
