//! Toy GOP codec, concealment-aware decoder, and quality metrics.

pub mod compress;
pub mod container;
pub mod frame;
pub mod gop;
pub mod metrics;
pub mod synth;
pub mod toy;

pub use container::{load_passthrough, read_bitstream, write_bitstream};
pub use frame::{read_yuv420, read_yuv420_all, write_yuv420, RawFrame};
pub use gop::{quant_step, FrameType, GopConfig};
pub use metrics::{bitrate_from_bytes, bitrate_of, mean_psnr_y, psnr_y, psnr_y_sequence, PSNR_CAP_DB};
pub use synth::SyntheticSequence;
pub use toy::{decode, decode_with_concealment, encode_sequence, Bitstream, BitstreamHeader, EncodedFrame};
