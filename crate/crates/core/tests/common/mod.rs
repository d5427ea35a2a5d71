#![allow(dead_code)]

use std::path::{Path, PathBuf};

use vnsim::scenario::{ScenarioConfig, VideoSource};

pub fn profile_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../profiles/paper.profile")
}

pub fn paper_profile() -> ScenarioConfig {
    ScenarioConfig::load(&profile_path()).expect("profile loads")
}

/// Writes a pass-through bitstream whose frames have the given payload sizes
/// and points `cfg.video` at it.
pub fn use_passthrough(cfg: &mut ScenarioConfig, dir: &Path, sizes: &[usize]) {
    let bin = dir.join("stream.bin");
    let sidecar = dir.join("stream.csv");
    let mut data = Vec::new();
    let mut index = String::from("frame_index,frame_type,offset,length\n");
    for (k, &len) in sizes.iter().enumerate() {
        let ty = if k % cfg.video.gop_size as usize == 0 { "I" } else { "B" };
        index.push_str(&format!("{k},{ty},{},{len}\n", data.len()));
        data.extend((0..len).map(|i| (i * 7 + k) as u8));
    }
    std::fs::write(&bin, data).unwrap();
    std::fs::write(&sidecar, index).unwrap();
    cfg.video.source = VideoSource::Passthrough;
    cfg.video.path = Some(bin);
    cfg.video.sidecar = Some(sidecar);
}

/// A small, fast scenario: 64x48 synthetic video over the given config.
pub fn small_video(cfg: &mut ScenarioConfig) {
    cfg.video.width = 64;
    cfg.video.height = 48;
    cfg.video.texture = 0.0;
}
