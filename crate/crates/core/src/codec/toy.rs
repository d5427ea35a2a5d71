//! GOP-structured toy codec.
//!
//! I frames quantize samples directly; B frames quantize the residual against
//! the most recent decoded I frame. Both go through the same lossless coder.

use std::collections::BTreeSet;

use super::compress::{compress_plane, decompress_plane};
use super::frame::RawFrame;
use super::gop::{quant_step, FrameType, GopConfig};
use crate::error::CodecError;

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedFrame {
    pub index: u32,
    pub frame_type: FrameType,
    pub payload: Vec<u8>,
    pub qp: u8,
    /// Reference I frame for B frames; `None` for I frames.
    pub ref_index: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitstreamHeader {
    pub width: usize,
    pub height: usize,
    pub gop: GopConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bitstream {
    pub header: BitstreamHeader,
    pub frames: Vec<EncodedFrame>,
    /// Payloads are foreign bytes (pass-through mode) and cannot be decoded.
    pub opaque: bool,
}

impl Bitstream {
    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn total_payload_bytes(&self) -> usize {
        self.frames.iter().map(|f| f.payload.len()).sum()
    }
}

/// Rounding offset for intra samples (plain rounding).
const INTRA_OFFSET: f64 = 0.5;
/// Dead-zone offset for inter residuals: small residuals quantize to zero.
const INTER_OFFSET: f64 = 1.0 / 6.0;

fn quantize(v: f64, step: f64, offset: f64) -> i32 {
    let mag = (v.abs() / step + offset).floor() as i32;
    if v < 0.0 {
        -mag
    } else {
        mag
    }
}

fn dequantize(idx: i32, step: f64) -> i32 {
    (idx as f64 * step).round() as i32
}

fn clamp_u8(v: i32) -> u8 {
    v.clamp(0, 255) as u8
}

/// Returns the payload and the decoder-side reconstruction.
fn encode_intra(frame: &RawFrame, step: f64) -> (Vec<u8>, RawFrame) {
    let mut payload = Vec::new();
    let mut recon = frame.clone();
    for (src, dst) in frame.planes().into_iter().zip(recon.planes_mut()) {
        let idx: Vec<i32> = src.iter().map(|&s| quantize(s as f64, step, INTRA_OFFSET)).collect();
        compress_plane(&idx, &mut payload);
        for (d, q) in dst.iter_mut().zip(&idx) {
            *d = clamp_u8(dequantize(*q, step));
        }
    }
    (payload, recon)
}

fn encode_inter(frame: &RawFrame, reference: &RawFrame, step: f64) -> Vec<u8> {
    let mut payload = Vec::new();
    for (src, refp) in frame.planes().into_iter().zip(reference.planes()) {
        let idx: Vec<i32> = src
            .iter()
            .zip(refp)
            .map(|(&s, &r)| quantize(s as f64 - r as f64, step, INTER_OFFSET))
            .collect();
        compress_plane(&idx, &mut payload);
    }
    payload
}

/// Residual planes of `frame` against `reference`, before quantization.
pub fn residual(frame: &RawFrame, reference: &RawFrame) -> Vec<Vec<i32>> {
    frame
        .planes()
        .into_iter()
        .zip(reference.planes())
        .map(|(s, r)| s.iter().zip(r).map(|(&a, &b)| a as i32 - b as i32).collect())
        .collect()
}

pub fn encode_sequence(frames: &[RawFrame], cfg: &GopConfig) -> Result<Bitstream, CodecError> {
    cfg.validate()?;
    let first = frames.first().ok_or(CodecError::EmptyInput)?;
    let dims = first.dims();
    super::frame::check_dims(dims.0, dims.1)?;
    if let Some(bad) = frames.iter().find(|f| f.dims() != dims) {
        return Err(CodecError::DimensionMismatch {
            expected: dims,
            got: bad.dims(),
        });
    }
    let step = quant_step(cfg.qp);
    let mut out = Vec::with_capacity(frames.len());
    let mut reference: Option<RawFrame> = None;
    for (i, f) in frames.iter().enumerate() {
        let index = i as u32;
        let ft = cfg.frame_type(index);
        let (payload, ref_index) = match ft {
            FrameType::I => {
                let (p, recon) = encode_intra(f, step);
                reference = Some(recon);
                (p, None)
            }
            FrameType::B => {
                let r = reference.as_ref().expect("first frame is always I");
                (encode_inter(f, r, step), Some(cfg.ref_index(index)))
            }
        };
        out.push(EncodedFrame {
            index,
            frame_type: ft,
            payload,
            qp: cfg.qp,
            ref_index,
        });
    }
    Ok(Bitstream {
        header: BitstreamHeader {
            width: dims.0,
            height: dims.1,
            gop: *cfg,
        },
        frames: out,
        opaque: false,
    })
}

fn decode_planes(payload: &[u8], width: usize, height: usize) -> Result<[Vec<i32>; 3], CodecError> {
    let c = (width / 2) * (height / 2);
    let mut pos = 0;
    let y = decompress_plane(payload, &mut pos, width * height)?;
    let u = decompress_plane(payload, &mut pos, c)?;
    let v = decompress_plane(payload, &mut pos, c)?;
    if pos != payload.len() {
        return Err(CodecError::Malformed("trailing bytes after frame payload".into()));
    }
    Ok([y, u, v])
}

fn decode_intra(f: &EncodedFrame, width: usize, height: usize) -> Result<RawFrame, CodecError> {
    let step = quant_step(f.qp);
    let [y, u, v] = decode_planes(&f.payload, width, height)?;
    let map = |p: Vec<i32>| p.into_iter().map(|q| clamp_u8(dequantize(q, step))).collect();
    RawFrame::from_planes(width, height, map(y), map(u), map(v))
}

fn decode_inter(f: &EncodedFrame, reference: &RawFrame) -> Result<RawFrame, CodecError> {
    let step = quant_step(f.qp);
    let planes = decode_planes(&f.payload, reference.width, reference.height)?;
    let mut out = reference.clone();
    for (dst, idx) in out.planes_mut().into_iter().zip(planes) {
        for (d, q) in dst.iter_mut().zip(idx) {
            *d = clamp_u8(*d as i32 + dequantize(q, step));
        }
    }
    Ok(out)
}

pub fn decode(bs: &Bitstream) -> Result<Vec<RawFrame>, CodecError> {
    decode_with_concealment(bs, &BTreeSet::new())
}

/// Decodes with frame-repeat concealment.
///
/// A lost frame is replaced by the previously displayed one (mid-grey if none
/// exists yet). A lost I frame's substitute becomes the reference for its B
/// frames, so the error persists until the next intact I frame.
pub fn decode_with_concealment(bs: &Bitstream, lost: &BTreeSet<u32>) -> Result<Vec<RawFrame>, CodecError> {
    if bs.opaque {
        return Err(CodecError::Malformed("pass-through bitstream cannot be decoded".into()));
    }
    let (w, h) = (bs.header.width, bs.header.height);
    let mut shown: Vec<RawFrame> = Vec::with_capacity(bs.frames.len());
    let mut reference: Option<RawFrame> = None;
    for f in &bs.frames {
        let previous = || match shown.last() {
            Some(p) => Ok(p.clone()),
            None => RawFrame::filled(w, h, 128, 128, 128),
        };
        let is_lost = lost.contains(&f.index);
        let pic = match (f.frame_type, is_lost) {
            (FrameType::I, false) => {
                let pic = decode_intra(f, w, h)?;
                reference = Some(pic.clone());
                pic
            }
            (FrameType::I, true) => {
                let sub = previous()?;
                reference = Some(sub.clone());
                sub
            }
            (FrameType::B, false) => {
                let r = match reference.as_ref() {
                    Some(r) => r.clone(),
                    None => RawFrame::filled(w, h, 128, 128, 128)?,
                };
                decode_inter(f, &r)?
            }
            (FrameType::B, true) => previous()?,
        };
        shown.push(pic);
    }
    Ok(shown)
}
