//! Closed-form microscopic simulator of a one-direction, three-lane highway
//! whose rightmost exit forks off as an off-ramp.
//!
//! Route 0 vehicles stay on the mainline at their lane ordinate. Route 1
//! vehicles follow the mainline up to `junction_x`, then descend along a cubic
//! Hermite ramp (zero slope at both ends) to `ramp_end`, after which they keep
//! the ramp heading (horizontal).
//!
//! Random stream order per vehicle, from a single `ChaCha8Rng` seeded with
//! `rng_seed`: route draw, lane draw, speed draw, lateral offset draw.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const NUM_LANES: usize = 3;

/// Seed used for generation and sampling when none is given.
pub const DEFAULT_SEED: u64 = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Scenario geometry, population and seed. All lengths in meters, speeds in
/// meters per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_vehicles: usize,
    pub num_steps: usize,
    /// Lane center ordinates, strictly decreasing (left lane first).
    pub lane_y: [f64; NUM_LANES],
    pub junction_x: f64,
    pub ramp_end: (f64, f64),
    pub speed_range: (f64, f64),
    pub route2_probability: f64,
    /// Abscissa of the lead vehicle at step 0.
    pub spawn_x: f64,
    /// Each following vehicle spawns this far behind the previous one.
    pub spawn_spacing: f64,
    /// Half-width of the uniform per-vehicle lateral offset.
    pub lane_noise: f64,
    pub rng_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_vehicles: 600,
            num_steps: 100,
            lane_y: [0.0, -0.5, -1.0],
            junction_x: 200.0,
            ramp_end: (260.0, -2.0),
            speed_range: (10.0, 30.0),
            route2_probability: 0.5,
            spawn_x: 0.0,
            spawn_spacing: 0.05,
            lane_noise: 0.05,
            rng_seed: DEFAULT_SEED,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_vehicles < 1 {
            return Err(invalid("vehicles", "must be at least 1"));
        }
        if self.num_steps < 1 {
            return Err(invalid("steps", "must be at least 1"));
        }
        if self.lane_y.iter().any(|y| !y.is_finite()) {
            return Err(invalid("lane_y", "must be finite"));
        }
        if !self.lane_y.windows(2).all(|w| w[0] > w[1]) {
            return Err(invalid("lane_y", "must be strictly decreasing"));
        }
        if !self.junction_x.is_finite() {
            return Err(invalid("junction_x", "must be finite"));
        }
        let (rx, ry) = self.ramp_end;
        if !(rx.is_finite() && ry.is_finite()) {
            return Err(invalid("ramp_end", "must be finite"));
        }
        if rx <= self.junction_x {
            return Err(invalid("ramp_end", "abscissa must exceed junction_x"));
        }
        if ry >= self.lane_y[NUM_LANES - 1] {
            return Err(invalid("ramp_end", "ordinate must lie below every lane"));
        }
        let (lo, hi) = self.speed_range;
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
            return Err(invalid(
                "speed_range",
                "must be a nonempty interval with positive lower bound",
            ));
        }
        if !(0.0..=1.0).contains(&self.route2_probability) {
            return Err(invalid("route2_probability", "must lie in [0, 1]"));
        }
        if !self.spawn_x.is_finite() {
            return Err(invalid("spawn_x", "must be finite"));
        }
        if !(self.spawn_spacing.is_finite() && self.spawn_spacing > 0.0) {
            return Err(invalid("spawn_spacing", "must be positive"));
        }
        if !(self.lane_noise.is_finite() && self.lane_noise >= 0.0) {
            return Err(invalid("lane_noise", "must be non-negative"));
        }
        Ok(())
    }

    /// Spawn abscissa of the `index`-th vehicle.
    pub fn spawn_x_of(&self, index: usize) -> f64 {
        self.spawn_x - index as f64 * self.spawn_spacing
    }
}

/// Route outcome at the junction, recorded as `0` (`Straight`) or `1` (`Ramp`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Straight,
    Ramp,
}

impl Route {
    pub fn as_u8(self) -> u8 {
        match self {
            Route::Straight => 0,
            Route::Ramp => 1,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Route::Straight),
            1 => Some(Route::Ramp),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub vehicle_id: String,
    pub step: usize,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub route: Route,
}

/// Vehicle observations sorted by `(step, vehicle_id)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub points: Vec<TrajectoryPoint>,
}

impl Trace {
    /// Builds a trace and puts the points into canonical order.
    pub fn from_points(mut points: Vec<TrajectoryPoint>) -> Self {
        points.sort_by(|a, b| {
            a.step
                .cmp(&b.step)
                .then_with(|| a.vehicle_id.cmp(&b.vehicle_id))
        });
        Trace { points }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of steps spanned, i.e. the largest step plus one.
    pub fn num_steps(&self) -> usize {
        self.points.iter().map(|p| p.step + 1).max().unwrap_or(0)
    }

    /// Distinct vehicle ids in sorted order.
    pub fn vehicle_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.points.iter().map(|p| p.vehicle_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn num_vehicles(&self) -> usize {
        self.vehicle_ids().len()
    }

    /// Points grouped per vehicle, in vehicle-id order, each group ordered by step.
    pub fn by_vehicle(&self) -> Vec<(&str, Vec<&TrajectoryPoint>)> {
        let mut groups: std::collections::BTreeMap<&str, Vec<&TrajectoryPoint>> =
            std::collections::BTreeMap::new();
        for p in &self.points {
            groups.entry(p.vehicle_id.as_str()).or_default().push(p);
        }
        groups
            .into_iter()
            .map(|(id, mut pts)| {
                pts.sort_by_key(|p| p.step);
                (id, pts)
            })
            .collect()
    }
}

/// Ordinate of the ramp centerline at abscissa `x`, starting from lane
/// ordinate `lane_y` at the junction.
fn ramp_y(config: &ScenarioConfig, lane_y: f64, x: f64) -> f64 {
    let (rx, ry) = config.ramp_end;
    if x < config.junction_x {
        return lane_y;
    }
    if x >= rx {
        return ry;
    }
    let t = (x - config.junction_x) / (rx - config.junction_x);
    let h = t * t * (3.0 - 2.0 * t);
    lane_y + (ry - lane_y) * h
}

/// Noise-free position of a vehicle spawned at `config.spawn_x`.
pub fn vehicle_position(
    config: &ScenarioConfig,
    route: Route,
    lane_index: usize,
    speed: f64,
    step: usize,
) -> (f64, f64) {
    vehicle_position_from(config, config.spawn_x, route, lane_index, speed, step)
}

/// Noise-free position of a vehicle spawned at `spawn_x`.
pub fn vehicle_position_from(
    config: &ScenarioConfig,
    spawn_x: f64,
    route: Route,
    lane_index: usize,
    speed: f64,
    step: usize,
) -> (f64, f64) {
    let lane_y = config.lane_y[lane_index];
    let x = spawn_x + speed * step as f64;
    let y = match route {
        Route::Straight => lane_y,
        Route::Ramp => ramp_y(config, lane_y, x),
    };
    (x, y)
}

pub fn vehicle_id(index: usize, num_vehicles: usize) -> String {
    let width = num_vehicles.saturating_sub(1).to_string().len();
    format!("veh{index:0width$}")
}

pub fn generate_trace(config: &ScenarioConfig) -> Result<Trace, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let (lo, hi) = config.speed_range;
    let mut points = Vec::with_capacity(config.num_vehicles * config.num_steps);

    for index in 0..config.num_vehicles {
        let route = if rng.gen::<f64>() < config.route2_probability {
            Route::Ramp
        } else {
            Route::Straight
        };
        let lane = rng.gen_range(0..NUM_LANES);
        let speed = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        let offset = if config.lane_noise > 0.0 {
            rng.gen_range(-config.lane_noise..=config.lane_noise)
        } else {
            0.0
        };

        let id = vehicle_id(index, config.num_vehicles);
        let spawn_x = config.spawn_x_of(index);
        for step in 0..config.num_steps {
            let (x, y) = vehicle_position_from(config, spawn_x, route, lane, speed, step);
            points.push(TrajectoryPoint {
                vehicle_id: id.clone(),
                step,
                x,
                y: y + offset,
                speed,
                route,
            });
        }
    }
    Ok(Trace::from_points(points))
}
