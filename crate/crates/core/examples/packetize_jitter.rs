//! MTU fragmentation, out-of-order reassembly, a lost fragment, and the
//! smoothed interarrival jitter estimator.
//!
//! cargo run --example packetize_jitter

use vnsim::codec::{EncodedFrame, FrameType};
use vnsim::sim::SimTime;
use vnsim::transport::{
    JitterEstimator, LossCause, Packetizer, Reassembler, Reassembly, DEFAULT_HEADER_BYTES,
};

fn frame(index: u32, len: usize) -> EncodedFrame {
    EncodedFrame {
        index,
        frame_type: if index == 0 { FrameType::I } else { FrameType::B },
        payload: (0..len).map(|i| i as u8).collect(),
        qp: 32,
        ref_index: (index > 0).then_some(0),
    }
}

fn main() {
    let mut p = Packetizer::new(7, 1400, DEFAULT_HEADER_BYTES).unwrap();
    let i_frame = frame(0, 3000);
    let segs = p.packetize(&i_frame).unwrap();
    println!("3000 B frame, MTU 1400, header {DEFAULT_HEADER_BYTES} B:");
    for s in &segs {
        println!("  seq {} frag {}/{} payload {} B", s.seq, s.frag_index + 1, s.frag_count, s.payload.len());
    }

    let mut r = Reassembler::new();
    for (k, idx) in [2usize, 0, 1].into_iter().enumerate() {
        match r.on_segment(&segs[idx], SimTime::from_millis(k as u64)).unwrap() {
            Reassembly::Complete(c) => {
                assert_eq!(c.payload, i_frame.payload);
                println!("reordered 2,0,1: frame {} complete at {}", c.frame_index, c.completed_at);
            }
            other => println!("fragment {idx}: {other:?}"),
        }
    }

    let b = p.packetize(&frame(1, 2000)).unwrap();
    r.mark_fragment_lost(1, FrameType::B, b[0].frag_count, LossCause::Corrupt).unwrap();
    let verdict = r.on_segment(&b[1], SimTime::from_millis(5)).unwrap();
    println!("frame 1 with a corrupt fragment: {verdict:?}, outcome {:?}", r.outcomes(2));

    let mut j = JitterEstimator::default();
    println!("\ntransit (ms)  jitter estimate (ms)");
    for (k, transit_ms) in [20.0, 20.0, 36.0, 20.0, 22.0, 21.0, 20.0].into_iter().enumerate() {
        j.update(SimTime::from_millis_f64(transit_ms).unwrap());
        println!("{k:>2} {transit_ms:>9.1}  {:>8.4}", j.jitter_ns() / 1e6);
    }
    println!("lifetime mean of the estimate: {:.4} ms", j.mean_ns() / 1e6);
}
