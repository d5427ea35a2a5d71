//! Synthetic test content: a drifting gradient with a light texture and a
//! moving bright rectangle.

use super::frame::RawFrame;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSequence {
    pub width: usize,
    pub height: usize,
    /// Background drift in pixels per frame; the rectangle moves twice as fast.
    pub motion: f64,
    pub texture: f64,
}

impl SyntheticSequence {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            motion: 4.0,
            texture: 6.0,
        }
    }

    pub fn with_motion(mut self, motion: f64) -> Self {
        self.motion = motion;
        self
    }

    pub fn with_texture(mut self, texture: f64) -> Self {
        self.texture = texture;
        self
    }

    pub fn frame(&self, k: usize) -> RawFrame {
        let (w, h) = (self.width, self.height);
        let shift = self.motion * k as f64;
        let rw = (w / 5).max(2);
        let rh = (h / 5).max(2);
        let span_x = (w - rw).max(1) as f64;
        let span_y = (h - rh).max(1) as f64;
        // Rectangle bounces along a diagonal.
        let rx = triangle(2.0 * shift / span_x) * span_x;
        let ry = triangle(shift / span_y) * span_y;
        let mut y = vec![0u8; w * h];
        for row in 0..h {
            for col in 0..w {
                let xs = col as f64 + shift;
                let mut v = 40.0 + 150.0 * xs / w as f64 + 30.0 * row as f64 / h as f64;
                v += self.texture * ((xs * 0.9).sin() * (row as f64 * 0.7).cos());
                let (fx, fy) = (col as f64 - rx, row as f64 - ry);
                if fx >= 0.0 && fx < rw as f64 && fy >= 0.0 && fy < rh as f64 {
                    v = 225.0 + self.texture * ((fx * 0.5).cos() + (fy * 0.5).sin());
                }
                y[row * w + col] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
        let (cw, ch) = (w / 2, h / 2);
        let mut u = vec![0u8; cw * ch];
        let mut vplane = vec![0u8; cw * ch];
        for row in 0..ch {
            for col in 0..cw {
                let xs = col as f64 + shift / 2.0;
                u[row * cw + col] = (110.0 + 30.0 * xs / cw as f64).round().clamp(0.0, 255.0) as u8;
                vplane[row * cw + col] = (150.0 - 25.0 * row as f64 / ch as f64).round().clamp(0.0, 255.0) as u8;
            }
        }
        RawFrame {
            width: w,
            height: h,
            y,
            u,
            v: vplane,
        }
    }

    pub fn frames(&self, count: usize) -> Vec<RawFrame> {
        (0..count).map(|k| self.frame(k)).collect()
    }
}

/// Periodic triangle wave in [0, 1] with period 2.
fn triangle(t: f64) -> f64 {
    let m = t.rem_euclid(2.0);
    if m <= 1.0 {
        m
    } else {
        2.0 - m
    }
}
