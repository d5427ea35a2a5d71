//! Random-walk pedestrians reflected inside the default bounding box, and the
//! speed-to-loss mapping used for vehicles.
//!
//! cargo run --example random_walk

use vnsim::mobility::{advance_reflecting, rw_step, speed_excess_per, BoundingBox, MobilityState, SpeedDegradationConfig};
use vnsim::sim::RngStream;

fn main() {
    let bbox = BoundingBox::default();
    let mut rng = RngStream::new(3, "walk/node0");
    let mut node = MobilityState::random_walk((10.0, 10.0));
    println!("epoch        x        y  speed");
    for epoch in 0..10 {
        rw_step(&mut node, &bbox, &mut rng);
        assert!(bbox.contains(node.position));
        println!("{epoch:>5} {:>8.2} {:>8.2} {:>6.2}", node.position.0, node.position.1, node.speed());
    }

    let mut car = MobilityState::constant_velocity((bbox.x_max - 10.0, 100.0), (30.0, 0.0));
    advance_reflecting(&mut car, &bbox, 1.0);
    println!("\ncar 10 m from the east wall at 30 m/s, after 1 s: x = {:.1}, vx = {:.1}", car.position.0, car.velocity.0);

    let cfg = SpeedDegradationConfig::default();
    println!("\nspeed (m/s)  added loss probability");
    for v in (20..=120).step_by(10) {
        println!("{v:>11}  {:.3}", speed_excess_per(v as f64, &cfg));
    }
}
