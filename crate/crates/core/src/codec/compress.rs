//! Lossless coder for quantized sample planes.
//!
//! Samples are differenced against their left neighbour (raster order), then
//! written as alternating `zero_run, zigzag(value)` LEB128 varints. A plane is
//! self-delimiting given its sample count.

use crate::error::CodecError;

fn put_varint(out: &mut Vec<u8>, mut v: u64) {
    while v >= 0x80 {
        out.push((v as u8) | 0x80);
        v >>= 7;
    }
    out.push(v as u8);
}

fn get_varint(data: &[u8], pos: &mut usize) -> Result<u64, CodecError> {
    let mut v = 0u64;
    let mut shift = 0;
    loop {
        let b = *data
            .get(*pos)
            .ok_or_else(|| CodecError::Malformed("truncated varint".into()))?;
        *pos += 1;
        v |= ((b & 0x7f) as u64) << shift;
        if b & 0x80 == 0 {
            return Ok(v);
        }
        shift += 7;
        if shift > 63 {
            return Err(CodecError::Malformed("varint overflow".into()));
        }
    }
}

fn zigzag(v: i32) -> u64 {
    ((v << 1) ^ (v >> 31)) as u32 as u64
}

fn unzigzag(v: u64) -> i32 {
    let v = v as u32;
    ((v >> 1) as i32) ^ -((v & 1) as i32)
}

pub fn compress_plane(samples: &[i32], out: &mut Vec<u8>) {
    let mut prev = 0i32;
    let mut run = 0u64;
    for &s in samples {
        let d = s - prev;
        prev = s;
        if d == 0 {
            run += 1;
        } else {
            put_varint(out, run);
            put_varint(out, zigzag(d));
            run = 0;
        }
    }
    if run > 0 {
        // Trailing zeros: a run with no following literal.
        put_varint(out, run);
    }
}

/// Decodes `count` samples starting at `*pos`, advancing it past the plane.
pub fn decompress_plane(data: &[u8], pos: &mut usize, count: usize) -> Result<Vec<i32>, CodecError> {
    let mut out = Vec::with_capacity(count);
    let mut prev = 0i32;
    while out.len() < count {
        let run = get_varint(data, pos)? as usize;
        if out.len() + run > count {
            return Err(CodecError::Malformed("zero run past end of plane".into()));
        }
        out.extend(std::iter::repeat_n(prev, run));
        if out.len() == count {
            break;
        }
        let d = unzigzag(get_varint(data, pos)?);
        prev += d;
        out.push(prev);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn all_zero_plane_is_tiny() {
        let mut out = Vec::new();
        compress_plane(&vec![0; 1_000_000], &mut out);
        assert!(out.len() <= 3);
        let mut pos = 0;
        assert_eq!(decompress_plane(&out, &mut pos, 1_000_000).unwrap(), vec![0; 1_000_000]);
    }

    #[test]
    fn truncated_input_is_an_error() {
        let mut out = Vec::new();
        compress_plane(&[5, 9, -3, 7], &mut out);
        let mut pos = 0;
        assert!(decompress_plane(&out[..out.len() - 1], &mut pos, 4).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(samples in proptest::collection::vec(-300i32..300, 0..2000)) {
            let mut out = vec![0xAA];
            compress_plane(&samples, &mut out);
            let mut pos = 1;
            let back = decompress_plane(&out, &mut pos, samples.len()).unwrap();
            prop_assert_eq!(back, samples);
            prop_assert_eq!(pos, out.len());
        }
    }
}
