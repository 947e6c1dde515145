//! Wind-farm layout proxy with a Gaussian-deficit wake model.
//!
//! For a scenario with free-stream speed `U` blowing along unit vector `w`,
//! a turbine `j` located upstream of turbine `i` at downstream distance
//! `dx = (p_i - p_j)·w > 0` and lateral offset `dy` reduces the speed at `i`
//! by the fraction
//!
//! ```text
//! sigma(dx) = k·dx + D/√8
//! C(dx)     = 1 - sqrt(1 - Ct / (8 (sigma/D)²))
//! deficit   = C(dx) · exp(-dy² / (2 sigma²))
//! ```
//!
//! Deficits of all upstream turbines add linearly; the effective speed is
//! `U · max(0, 1 - Σ deficit)` and each turbine produces
//! `½ ρ A Cp u³` (reported in MW). The objective is minus the total farm
//! power averaged over the scenarios, or exactly `0` when any two turbines
//! are closer than `min_spacing_factor · D`.

use alloc::format;
use alloc::vec::Vec;

use crate::math;
use crate::problems::Objective;
use crate::rng::Rng;
use crate::space::{Point, SearchSpace, VariableSpec};

const AIR_DENSITY: f64 = 1.225;
const POWER_COEFFICIENT: f64 = 0.45;

#[derive(Clone, Debug, PartialEq)]
pub struct WindwakeConfig {
    pub n_turbines: usize,
    pub n_scenarios: usize,
    /// Side of the square field, metres.
    pub field_side: f64,
    /// Rotor diameter `D`, metres.
    pub rotor_diameter: f64,
    /// Minimum allowed pairwise distance in rotor diameters.
    pub min_spacing_factor: f64,
    /// Wake expansion rate `k`.
    pub wake_expansion: f64,
    /// Thrust coefficient `Ct`, at most 1.
    pub thrust_coefficient: f64,
    pub seed: u64,
}

impl Default for WindwakeConfig {
    fn default() -> Self {
        Self {
            n_turbines: 5,
            n_scenarios: 5,
            field_side: 1000.0,
            rotor_diameter: 100.0,
            min_spacing_factor: 2.0,
            wake_expansion: 0.05,
            thrust_coefficient: 0.8,
            seed: 0,
        }
    }
}

/// One wind condition: direction (radians, direction the wind blows
/// towards) and free-stream speed (m/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub direction: f64,
    pub speed: f64,
}

#[derive(Clone, Debug)]
pub struct Windwake {
    config: WindwakeConfig,
    scenarios: Vec<Scenario>,
    space: SearchSpace,
}

impl Windwake {
    /// # Panics
    /// If fewer than two turbines or no scenario are requested.
    pub fn new(config: WindwakeConfig) -> Self {
        assert!(config.n_turbines >= 2, "windwake needs at least two turbines");
        assert!(config.n_scenarios >= 1, "windwake needs at least one scenario");
        assert!(config.thrust_coefficient > 0.0 && config.thrust_coefficient <= 1.0);
        let mut rng = Rng::stream(config.seed, 0x57_1D);
        let scenarios = (0..config.n_scenarios)
            .map(|_| Scenario {
                direction: rng.uniform(0.0, 2.0 * core::f64::consts::PI),
                speed: rng.uniform(6.0, 11.0),
            })
            .collect();
        let vars = (0..config.n_turbines)
            .flat_map(|t| {
                [
                    VariableSpec::continuous(&format!("x{t}"), 0.0, config.field_side),
                    VariableSpec::continuous(&format!("y{t}"), 0.0, config.field_side),
                ]
            })
            .collect();
        let space = SearchSpace::new(vars).expect("windwake space is valid");
        Self { config, scenarios, space }
    }

    pub fn config(&self) -> &WindwakeConfig {
        &self.config
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    /// Power of an unwaked turbine at `speed`, MW.
    pub fn turbine_power(&self, speed: f64) -> f64 {
        let radius = self.config.rotor_diameter / 2.0;
        let area = core::f64::consts::PI * radius * radius;
        0.5 * AIR_DENSITY * area * POWER_COEFFICIENT * speed * speed * speed * 1e-6
    }

    /// Whether all pairwise distances respect the spacing constraint.
    pub fn feasible(&self, coords: &[(f64, f64)]) -> bool {
        let min = self.config.min_spacing_factor * self.config.rotor_diameter;
        for (i, a) in coords.iter().enumerate() {
            for b in &coords[i + 1..] {
                let (dx, dy) = (a.0 - b.0, a.1 - b.1);
                if math::sqrt(dx * dx + dy * dy) < min {
                    return false;
                }
            }
        }
        true
    }

    /// Total farm power (MW) under one scenario.
    pub fn farm_power(&self, coords: &[(f64, f64)], scenario: &Scenario) -> f64 {
        let (wx, wy) = (math::cos(scenario.direction), math::sin(scenario.direction));
        let d = self.config.rotor_diameter;
        let ct = self.config.thrust_coefficient;
        let mut total = 0.0;
        for (i, pi) in coords.iter().enumerate() {
            let mut deficit = 0.0;
            for (j, pj) in coords.iter().enumerate() {
                if i == j {
                    continue;
                }
                let (rx, ry) = (pi.0 - pj.0, pi.1 - pj.1);
                let down = rx * wx + ry * wy;
                if down <= 0.0 {
                    continue;
                }
                let lateral = -rx * wy + ry * wx;
                let sigma = self.config.wake_expansion * down + d / math::sqrt(8.0);
                let ratio = sigma / d;
                let centre = 1.0 - math::sqrt(1.0 - ct / (8.0 * ratio * ratio));
                deficit += centre * math::exp(-lateral * lateral / (2.0 * sigma * sigma));
            }
            let speed = scenario.speed * (1.0 - deficit).max(0.0);
            total += self.turbine_power(speed);
        }
        total
    }

    fn coords(&self, p: &Point) -> Vec<(f64, f64)> {
        p.values.chunks(2).map(|c| (c[0].as_f64(), c[1].as_f64())).collect()
    }
}

impl Objective for Windwake {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn value(&self, p: &Point) -> f64 {
        let coords = self.coords(p);
        if !self.feasible(&coords) {
            return 0.0;
        }
        let power: f64 = self.scenarios.iter().map(|s| self.farm_power(&coords, s)).sum();
        -(power / self.scenarios.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{sample_uniform, Value};

    fn point(ww: &Windwake, coords: &[(f64, f64)]) -> Point {
        ww.space().point(coords.iter().flat_map(|&(x, y)| [Value::Real(x), Value::Real(y)]).collect())
    }

    #[test]
    fn coincident_turbines_return_zero() {
        let ww = Windwake::new(WindwakeConfig { n_turbines: 2, ..Default::default() });
        let v = ww.value(&point(&ww, &[(300.0, 300.0), (300.0, 300.0)]));
        assert_eq!(v.to_bits(), 0.0f64.to_bits());
    }

    #[test]
    fn default_space_has_ten_continuous_variables() {
        let ww = Windwake::new(WindwakeConfig::default());
        assert_eq!(ww.space().dim(), 10);
        assert!(ww.space().is_continuous());
    }

    #[test]
    fn cross_wind_pair_doubles_single_power() {
        let ww = Windwake::new(WindwakeConfig {
            n_turbines: 2,
            n_scenarios: 1,
            field_side: 4000.0,
            seed: 3,
            ..Default::default()
        });
        let s = ww.scenarios()[0];
        // perpendicular to the wind, 3 km apart, centred in the field
        let (px, py) = (-math::sin(s.direction), math::cos(s.direction));
        let c = 2000.0;
        let coords = [(c - 1500.0 * px, c - 1500.0 * py), (c + 1500.0 * px, c + 1500.0 * py)];
        let single = ww.turbine_power(s.speed);
        let v = ww.value(&point(&ww, &coords));
        assert!((v + 2.0 * single).abs() < 1e-12 * single, "{v} vs {}", -2.0 * single);
    }

    /// Straight-line transcription of the documented wake formula.
    fn reference_value(ww: &Windwake, coords: &[(f64, f64)]) -> f64 {
        let cfg = ww.config();
        let min = cfg.min_spacing_factor * cfg.rotor_diameter;
        for i in 0..coords.len() {
            for j in 0..coords.len() {
                if i != j && ((coords[i].0 - coords[j].0).powi(2) + (coords[i].1 - coords[j].1).powi(2)).sqrt() < min {
                    return 0.0;
                }
            }
        }
        let area = core::f64::consts::PI * (cfg.rotor_diameter / 2.0).powi(2);
        let mut mean = 0.0;
        for s in ww.scenarios() {
            let w = (s.direction.cos(), s.direction.sin());
            let mut farm = 0.0;
            for i in 0..coords.len() {
                let mut sum = 0.0;
                for j in 0..coords.len() {
                    let r = (coords[i].0 - coords[j].0, coords[i].1 - coords[j].1);
                    let down = r.0 * w.0 + r.1 * w.1;
                    if j == i || down <= 0.0 {
                        continue;
                    }
                    let lat = r.1 * w.0 - r.0 * w.1;
                    let sigma = cfg.wake_expansion * down + cfg.rotor_diameter / 8f64.sqrt();
                    let c = 1.0 - (1.0 - cfg.thrust_coefficient / (8.0 * (sigma / cfg.rotor_diameter).powi(2))).sqrt();
                    sum += c * (-(lat * lat) / (2.0 * sigma * sigma)).exp();
                }
                let u = s.speed * (1.0 - sum).max(0.0);
                farm += 0.5 * 1.225 * area * 0.45 * u.powi(3) / 1e6;
            }
            mean += farm / ww.scenarios().len() as f64;
        }
        -mean
    }

    #[test]
    fn random_layouts_match_reference() {
        let ww = Windwake::new(WindwakeConfig { seed: 11, ..Default::default() });
        let mut rng = Rng::new(4);
        let mut checked_feasible = 0;
        for _ in 0..200 {
            let p = sample_uniform(ww.space(), &mut rng);
            let coords = ww.coords(&p);
            let want = reference_value(&ww, &coords);
            let got = ww.value(&p);
            if want != 0.0 {
                checked_feasible += 1;
            }
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{got} vs {want}");
        }
        assert!(checked_feasible > 10);
    }

    #[test]
    fn wakes_reduce_power() {
        let ww = Windwake::new(WindwakeConfig { n_turbines: 2, n_scenarios: 1, ..Default::default() });
        let s = ww.scenarios()[0];
        let (wx, wy) = (s.direction.cos(), s.direction.sin());
        let a = (500.0 - 200.0 * wx, 500.0 - 200.0 * wy);
        let b = (500.0 + 200.0 * wx, 500.0 + 200.0 * wy);
        let v = ww.value(&point(&ww, &[a, b]));
        assert!(v < 0.0 && v > -2.0 * ww.turbine_power(s.speed));
    }
}
