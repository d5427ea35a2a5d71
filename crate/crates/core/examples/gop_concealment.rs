//! Loss propagation in an I/B GOP: losing one I frame costs more than losing
//! any single B frame, because its B frames are predicted from the substitute.
//!
//! cargo run --release --example gop_concealment

use std::collections::BTreeSet;

use vnsim::codec::{decode_with_concealment, encode_sequence, psnr_y_sequence, GopConfig, SyntheticSequence};

fn main() {
    let gop = GopConfig::with_qp(32);
    let raw = SyntheticSequence::new(832, 480).with_texture(0.7).frames(10);
    let bs = encode_sequence(&raw, &gop).unwrap();
    let mean_psnr = |lost: &BTreeSet<u32>| {
        let shown = decode_with_concealment(&bs, lost).unwrap();
        let p = psnr_y_sequence(&raw, &shown).unwrap();
        (p.iter().sum::<f64>() / p.len() as f64, p)
    };
    let (clean, _) = mean_psnr(&BTreeSet::new());
    println!("lossless mean Y-PSNR {clean:.2} dB, GOP size {}", gop.gop_size);
    for f in &bs.frames {
        println!("  frame {} {} {:>6} bytes", f.index, f.frame_type.label(), f.payload.len());
    }

    println!("\nlost  type  mean drop (dB)  per-frame PSNR");
    for k in 0..bs.frame_count() as u32 {
        let (m, per) = mean_psnr(&BTreeSet::from([k]));
        let per: Vec<String> = per.iter().map(|p| format!("{p:.1}")).collect();
        println!("{k:>4}  {:>4}  {:>14.3}  {}", gop.frame_type(k).label(), clean - m, per.join(" "));
    }
}
