use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{CodecError, Error};

/// Planar 8-bit 4:2:0 picture.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawFrame {
    pub width: usize,
    pub height: usize,
    pub y: Vec<u8>,
    pub u: Vec<u8>,
    pub v: Vec<u8>,
}

impl RawFrame {
    pub fn filled(width: usize, height: usize, y: u8, u: u8, v: u8) -> Result<Self, CodecError> {
        check_dims(width, height)?;
        let c = (width / 2) * (height / 2);
        Ok(Self {
            width,
            height,
            y: vec![y; width * height],
            u: vec![u; c],
            v: vec![v; c],
        })
    }

    pub fn from_planes(width: usize, height: usize, y: Vec<u8>, u: Vec<u8>, v: Vec<u8>) -> Result<Self, CodecError> {
        check_dims(width, height)?;
        let c = (width / 2) * (height / 2);
        if y.len() != width * height || u.len() != c || v.len() != c {
            return Err(CodecError::Malformed(format!(
                "plane sizes {}/{}/{} do not match {width}x{height} 4:2:0",
                y.len(),
                u.len(),
                v.len()
            )));
        }
        Ok(Self { width, height, y, u, v })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn frame_bytes(width: usize, height: usize) -> usize {
        width * height + 2 * (width / 2) * (height / 2)
    }

    pub(crate) fn planes(&self) -> [&[u8]; 3] {
        [&self.y, &self.u, &self.v]
    }

    pub(crate) fn planes_mut(&mut self) -> [&mut Vec<u8>; 3] {
        [&mut self.y, &mut self.u, &mut self.v]
    }
}

pub(crate) fn check_dims(width: usize, height: usize) -> Result<(), CodecError> {
    if width == 0 || height == 0 || !width.is_multiple_of(2) || !height.is_multiple_of(2) {
        return Err(CodecError::OddDimensions(width, height));
    }
    Ok(())
}

/// Reads `count` frames of frame-sequential Y, U, V planes.
pub fn read_yuv420(path: &Path, width: usize, height: usize, count: usize) -> Result<Vec<RawFrame>, Error> {
    check_dims(width, height)?;
    let mut rd = BufReader::new(File::open(path)?);
    let c = (width / 2) * (height / 2);
    let mut frames = Vec::with_capacity(count);
    for _ in 0..count {
        let mut y = vec![0; width * height];
        let mut u = vec![0; c];
        let mut v = vec![0; c];
        rd.read_exact(&mut y)?;
        rd.read_exact(&mut u)?;
        rd.read_exact(&mut v)?;
        frames.push(RawFrame { width, height, y, u, v });
    }
    Ok(frames)
}

/// Reads every whole frame in the file.
pub fn read_yuv420_all(path: &Path, width: usize, height: usize) -> Result<Vec<RawFrame>, Error> {
    check_dims(width, height)?;
    let len = std::fs::metadata(path)?.len() as usize;
    let count = len / RawFrame::frame_bytes(width, height);
    read_yuv420(path, width, height, count)
}

pub fn write_yuv420(path: &Path, frames: &[RawFrame]) -> Result<(), Error> {
    let mut w = BufWriter::new(File::create(path)?);
    for f in frames {
        for p in f.planes() {
            w.write_all(p)?;
        }
    }
    w.flush()?;
    Ok(())
}
