//! `VNS1` bitstream container.
//!
//! ```text
//! "VNS1" | width u32 | height u32 | gop_size u8 | qp u8 | frame_count u32
//! then per frame: index u32 | type u8 (0 = I, 1 = B) | payload_len u32 | payload
//! ```
//! All integers little-endian. Frame rate is not stored; readers supply it.

use std::collections::BTreeMap;
use std::path::Path;

use super::gop::{FrameType, GopConfig};
use super::toy::{Bitstream, BitstreamHeader, EncodedFrame};
use crate::error::{CodecError, Error};

pub const MAGIC: &[u8; 4] = b"VNS1";

pub fn write_bitstream(bs: &Bitstream) -> Vec<u8> {
    let mut out = Vec::with_capacity(17 + bs.total_payload_bytes() + 9 * bs.frames.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(bs.header.width as u32).to_le_bytes());
    out.extend_from_slice(&(bs.header.height as u32).to_le_bytes());
    out.push(bs.header.gop.gop_size as u8);
    out.push(bs.header.gop.qp);
    out.extend_from_slice(&(bs.frames.len() as u32).to_le_bytes());
    for f in &bs.frames {
        out.extend_from_slice(&f.index.to_le_bytes());
        out.push(f.frame_type.as_u8());
        out.extend_from_slice(&(f.payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&f.payload);
    }
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or_else(|| CodecError::Malformed(format!("truncated at byte {}", self.pos)))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

pub fn read_bitstream(data: &[u8], frame_rate: f64) -> Result<Bitstream, CodecError> {
    let mut c = Cursor { data, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(CodecError::Malformed("bad magic".into()));
    }
    let width = c.u32()? as usize;
    let height = c.u32()? as usize;
    let gop_size = c.u8()? as u32;
    let qp = c.u8()?;
    let count = c.u32()?;
    let gop = GopConfig {
        gop_size,
        b_frames: gop_size.saturating_sub(1),
        frame_rate,
        qp,
    };
    gop.validate()?;
    let mut frames = Vec::with_capacity(count.min(1 << 16) as usize);
    for expected in 0..count {
        let index = c.u32()?;
        if index != expected {
            return Err(CodecError::Malformed(format!("frame index {index}, expected {expected}")));
        }
        let frame_type = FrameType::from_u8(c.u8()?)
            .ok_or_else(|| CodecError::Malformed(format!("bad frame type for frame {index}")))?;
        if frame_type != gop.frame_type(index) {
            return Err(CodecError::Malformed(format!("frame {index} type breaks GOP layout")));
        }
        let len = c.u32()? as usize;
        let payload = c.take(len)?.to_vec();
        let ref_index = (frame_type == FrameType::B).then(|| gop.ref_index(index));
        frames.push(EncodedFrame {
            index,
            frame_type,
            payload,
            qp,
            ref_index,
        });
    }
    if c.pos != data.len() {
        return Err(CodecError::Malformed("trailing bytes after last frame".into()));
    }
    Ok(Bitstream {
        header: BitstreamHeader { width, height, gop },
        frames,
        opaque: false,
    })
}

/// Loads an arbitrary byte file as an opaque bitstream. The sidecar CSV has a
/// header row and columns `frame_index,frame_type,offset,length`.
pub fn load_passthrough(bin: &Path, sidecar: &Path, gop: GopConfig) -> Result<Bitstream, Error> {
    let data = std::fs::read(bin)?;
    let mut rd = csv::Reader::from_path(sidecar)?;
    let mut frames = BTreeMap::new();
    for rec in rd.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<&str, Error> {
            rec.get(i)
                .map(str::trim)
                .ok_or_else(|| Error::Other(format!("sidecar row missing column {i}")))
        };
        let parse = |i: usize| -> Result<usize, Error> {
            field(i)?
                .parse::<usize>()
                .map_err(|e| Error::Other(format!("sidecar column {i}: {e}")))
        };
        let index = parse(0)? as u32;
        let frame_type = match field(1)? {
            "I" | "i" => FrameType::I,
            "B" | "b" | "P" | "p" => FrameType::B,
            other => return Err(Error::Other(format!("unknown frame type {other:?}"))),
        };
        let (off, len) = (parse(2)?, parse(3)?);
        let payload = data
            .get(off..off + len)
            .ok_or_else(|| Error::Other(format!("frame {index} range {off}+{len} outside file")))?
            .to_vec();
        let ref_index = (frame_type == FrameType::B).then(|| gop.ref_index(index));
        frames.insert(
            index,
            EncodedFrame {
                index,
                frame_type,
                payload,
                qp: gop.qp,
                ref_index,
            },
        );
    }
    let frames: Vec<EncodedFrame> = frames.into_values().collect();
    if frames.iter().enumerate().any(|(i, f)| f.index != i as u32) {
        return Err(Error::Other("sidecar frame indices must be contiguous from 0".into()));
    }
    Ok(Bitstream {
        header: BitstreamHeader {
            width: 0,
            height: 0,
            gop,
        },
        frames,
        opaque: true,
    })
}
