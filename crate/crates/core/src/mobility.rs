//! Node position processes and the speed-dependent loss hook.
//!
//! Random-walk nodes reflect off the bounding box; constant-velocity nodes are
//! never reflected and may leave it.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::sim::{RngStream, SimTime};

pub type Position = (f64, f64);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for BoundingBox {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            x_max: 4500.0,
            y_min: 0.0,
            y_max: 4500.0,
        }
    }
}

impl BoundingBox {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.x_min < self.x_max && self.y_min < self.y_max {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("degenerate bounding box {self:?}")))
        }
    }

    pub fn contains(&self, (x, y): Position) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    pub fn random_position(&self, stream: &mut RngStream) -> Position {
        let x = stream.uniform_range(self.x_min, self.x_max);
        let y = stream.uniform_range(self.y_min, self.y_max);
        (x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MobilityModel {
    #[default]
    Static,
    RandomWalk,
    ConstantVelocity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityState {
    pub position: Position,
    pub velocity: (f64, f64),
    pub model: MobilityModel,
    pub walk_epoch: SimTime,
    pub speed_range: (f64, f64),
}

impl MobilityState {
    pub fn stationary(position: Position) -> Self {
        Self {
            position,
            velocity: (0.0, 0.0),
            model: MobilityModel::Static,
            walk_epoch: SimTime::from_secs(1),
            speed_range: (0.0, 0.0),
        }
    }

    pub fn constant_velocity(position: Position, velocity: (f64, f64)) -> Self {
        Self {
            position,
            velocity,
            model: MobilityModel::ConstantVelocity,
            walk_epoch: SimTime::from_secs(1),
            speed_range: (0.0, 0.0),
        }
    }

    /// Pedestrian defaults: 1 s epochs, speeds uniform on [0.5, 2] m/s.
    pub fn random_walk(position: Position) -> Self {
        Self {
            position,
            velocity: (0.0, 0.0),
            model: MobilityModel::RandomWalk,
            walk_epoch: SimTime::from_secs(1),
            speed_range: (0.5, 2.0),
        }
    }

    pub fn speed(&self) -> f64 {
        self.velocity.0.hypot(self.velocity.1)
    }
}

/// Position of a constant-velocity node `t` after its reference point.
pub fn cv_position_at(state: &MobilityState, t: SimTime) -> Position {
    let dt = t.as_secs_f64();
    (
        state.position.0 + state.velocity.0 * dt,
        state.position.1 + state.velocity.1 * dt,
    )
}

/// Folds one coordinate back into `[lo, hi]`, flipping the velocity component
/// on every wall hit.
fn reflect_axis(mut x: f64, mut v: f64, lo: f64, hi: f64) -> (f64, f64) {
    loop {
        if x > hi {
            x = 2.0 * hi - x;
            v = -v;
        } else if x < lo {
            x = 2.0 * lo - x;
            v = -v;
        } else {
            return (x, v);
        }
    }
}

/// Advances `state` by `dt` along its current velocity, reflecting off walls.
pub fn advance_reflecting(state: &mut MobilityState, bbox: &BoundingBox, dt: f64) {
    let (x, vx) = reflect_axis(
        state.position.0 + state.velocity.0 * dt,
        state.velocity.0,
        bbox.x_min,
        bbox.x_max,
    );
    let (y, vy) = reflect_axis(
        state.position.1 + state.velocity.1 * dt,
        state.velocity.1,
        bbox.y_min,
        bbox.y_max,
    );
    state.position = (x, y);
    state.velocity = (vx, vy);
}

/// One walk epoch: redraw heading and speed, then move for `walk_epoch`.
/// Consumes exactly two draws.
pub fn rw_step(state: &mut MobilityState, bbox: &BoundingBox, stream: &mut RngStream) {
    let heading = stream.uniform() * TAU;
    let speed = stream.uniform_range(state.speed_range.0, state.speed_range.1);
    state.velocity = (speed * heading.cos(), speed * heading.sin());
    advance_reflecting(state, bbox, state.walk_epoch.as_secs_f64());
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedDegradationConfig {
    pub v_crit: f64,
    pub slope: f64,
    pub per_cap: f64,
}

impl Default for SpeedDegradationConfig {
    fn default() -> Self {
        Self {
            v_crit: 80.0,
            slope: 0.004,
            per_cap: 0.5,
        }
    }
}

impl SpeedDegradationConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.v_crit >= 0.0 && self.slope >= 0.0 && (0.0..=1.0).contains(&self.per_cap) {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!("invalid speed degradation config {self:?}")))
        }
    }
}

/// Added packet-error probability for a node moving at `speed` m/s:
/// zero up to and including `v_crit`, then a clamped linear ramp.
pub fn speed_excess_per(speed: f64, cfg: &SpeedDegradationConfig) -> f64 {
    (cfg.slope * (speed - cfg.v_crit).max(0.0)).min(cfg.per_cap)
}

pub fn distance(a: Position, b: Position) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cv_positions() {
        let still = MobilityState::constant_velocity((12.0, 7.0), (0.0, 0.0));
        assert_eq!(cv_position_at(&still, SimTime::from_secs(100)), (12.0, 7.0));
        let moving = MobilityState::constant_velocity((0.0, 0.0), (10.0, 0.0));
        assert_eq!(cv_position_at(&moving, SimTime::from_secs(5)), (50.0, 0.0));
        // Constant-velocity nodes are allowed to leave the area.
        let fast = MobilityState::constant_velocity((4400.0, 0.0), (100.0, 0.0));
        assert!(!BoundingBox::default().contains(cv_position_at(&fast, SimTime::from_secs(2))));
    }

    #[test]
    fn reflection_at_wall() {
        let bbox = BoundingBox::default();
        let mut st = MobilityState::random_walk((4500.0, 100.0));
        st.velocity = (3.0, 0.0);
        advance_reflecting(&mut st, &bbox, 1.0);
        assert!(st.velocity.0 < 0.0);
        assert!(bbox.contains(st.position));
        assert_eq!(st.position, (4497.0, 100.0));
    }

    #[test]
    fn random_walk_stays_in_box() {
        let bbox = BoundingBox::default();
        let mut stream = RngStream::new(4, "rw");
        let mut st = MobilityState::random_walk(bbox.random_position(&mut stream));
        // Fast walkers make wall hits frequent.
        st.speed_range = (0.0, 2000.0);
        for _ in 0..100_000 {
            rw_step(&mut st, &bbox, &mut stream);
            assert!(bbox.contains(st.position), "{:?}", st.position);
        }
    }

    #[test]
    fn zero_speed_walk_is_stationary() {
        let bbox = BoundingBox::default();
        let mut stream = RngStream::new(4, "rw0");
        let mut st = MobilityState::random_walk((1000.0, 2000.0));
        st.speed_range = (0.0, 0.0);
        for _ in 0..100 {
            rw_step(&mut st, &bbox, &mut stream);
        }
        assert_eq!(st.position, (1000.0, 2000.0));
    }

    #[test]
    fn speed_ramp_values() {
        let cfg = SpeedDegradationConfig::default();
        assert_eq!(speed_excess_per(50.0, &cfg), 0.0);
        assert_eq!(speed_excess_per(80.0, &cfg), 0.0);
        assert!((speed_excess_per(100.0, &cfg) - 0.08).abs() < 1e-12);
        assert_eq!(speed_excess_per(1e6, &cfg), cfg.per_cap);
    }

    #[test]
    fn speed_ramp_shape_on_grid() {
        let cfg = SpeedDegradationConfig::default();
        let mut prev = 0.0;
        for i in 0..=4000 {
            let v = i as f64 * 0.1;
            let p = speed_excess_per(v, &cfg);
            if v <= cfg.v_crit {
                assert_eq!(p, 0.0);
            }
            assert!(p >= prev && p <= cfg.per_cap);
            prev = p;
        }
    }

    #[test]
    fn distances() {
        assert_eq!(distance((1.0, 1.0), (1.0, 1.0)), 0.0);
        assert_eq!(distance((0.0, 0.0), (3.0, 4.0)), 5.0);
    }

    proptest! {
        #[test]
        fn distance_symmetric(ax in -1e4f64..1e4, ay in -1e4f64..1e4, bx in -1e4f64..1e4, by in -1e4f64..1e4) {
            prop_assert_eq!(distance((ax, ay), (bx, by)), distance((bx, by), (ax, ay)));
        }

        #[test]
        fn reflection_preserves_speed(x in 0.0f64..4500.0, y in 0.0f64..4500.0,
                                      vx in -5000.0f64..5000.0, vy in -5000.0f64..5000.0,
                                      dt in 0.0f64..10.0) {
            let bbox = BoundingBox::default();
            let mut st = MobilityState::random_walk((x, y));
            st.velocity = (vx, vy);
            let before = st.speed();
            advance_reflecting(&mut st, &bbox, dt);
            prop_assert!(bbox.contains(st.position));
            prop_assert_eq!(st.speed(), before);
        }
    }
}
