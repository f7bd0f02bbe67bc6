//! `key = value` scenario files. Keys mirror the [`ScenarioConfig`] fields;
//! `#` starts a comment. Pairs are written comma separated:
//!
//! ```text
//! num_vehicles = 600
//! lane_y = 0, -0.5, -1
//! ramp_end = 260, -2
//! speed_range = 10, 30
//! ```

use mobpred_core::traffic_sim::{ScenarioConfig, NUM_LANES};

use crate::error::{CliError, Result};

fn reals(key: &str, value: &str, expected: usize) -> Result<Vec<f64>> {
    let parts: Vec<f64> = value
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::usage(format!("config key `{key}`: expected numbers, got `{value}`")))?;
    if parts.len() != expected {
        return Err(CliError::usage(format!(
            "config key `{key}`: expected {expected} values, got {}",
            parts.len()
        )));
    }
    Ok(parts)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("config key `{key}`: invalid value `{value}`")))
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", idx + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "num_vehicles" => cfg.num_vehicles = parse(key, value)?,
            "num_steps" => cfg.num_steps = parse(key, value)?,
            "lane_y" => {
                let v = reals(key, value, NUM_LANES)?;
                cfg.lane_y = [v[0], v[1], v[2]];
            }
            "junction_x" => cfg.junction_x = parse(key, value)?,
            "ramp_end" => {
                let v = reals(key, value, 2)?;
                cfg.ramp_end = (v[0], v[1]);
            }
            "speed_range" => {
                let v = reals(key, value, 2)?;
                cfg.speed_range = (v[0], v[1]);
            }
            "route2_probability" => cfg.route2_probability = parse(key, value)?,
            "spawn_x" => cfg.spawn_x = parse(key, value)?,
            "spawn_spacing" => cfg.spawn_spacing = parse(key, value)?,
            "lane_noise" => cfg.lane_noise = parse(key, value)?,
            "rng_seed" => cfg.rng_seed = parse(key, value)?,
            other => return Err(CliError::usage(format!("unknown config key `{other}`"))),
        }
    }
    Ok(cfg)
}
