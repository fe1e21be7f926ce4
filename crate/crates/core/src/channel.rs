//! Multipath channel generation and effective channels at the array ports.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{RaaError, Result};
use crate::geometry::{HbfCodebook, RaaGeometry};
use crate::response::{AntennaPattern, ArrayModel};

/// Gives up on a truncated-normal draw after this many rejections.
const MAX_ANGLE_DRAWS: usize = 100_000;

/// Independent random stream for one Monte Carlo trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathComponent {
    pub gain: Complex64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipathChannel {
    /// One-based user id.
    pub user: usize,
    pub paths: Vec<PathComponent>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioMode {
    SingleUser,
    MultiUser,
}

/// Scenario layout. Angles follow `start + step·i` with `i` one-based: the
/// fixed path angles of the single user, or the mean angles of the users.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: ScenarioMode,
    pub user_count: usize,
    pub paths_per_user: usize,
    pub path_magnitude: f64,
    pub angle_start: f64,
    pub angle_step: f64,
    /// Standard deviation of multi-user path angles around the user mean.
    pub angle_spread: f64,
    /// Path angles are confined to `[-coverage, coverage]`.
    pub coverage: f64,
}

impl ScenarioConfig {
    /// One user, five paths at `-0.5π + 0.15π·l`, each with power 0.2.
    pub fn single_user() -> Self {
        Self {
            mode: ScenarioMode::SingleUser,
            user_count: 1,
            paths_per_user: 5,
            path_magnitude: 0.2f64.sqrt(),
            angle_start: -0.5 * PI,
            angle_step: 0.15 * PI,
            angle_spread: 0.0,
            coverage: 0.5 * PI,
        }
    }

    /// Five users with two paths each (power 0.5), angles `N(θ̄_k, (0.1π)²)`
    /// around `θ̄_k = -0.5π + 0.15π·k`.
    pub fn multi_user() -> Self {
        Self {
            mode: ScenarioMode::MultiUser,
            user_count: 5,
            paths_per_user: 2,
            path_magnitude: 0.5f64.sqrt(),
            angle_start: -0.5 * PI,
            angle_step: 0.15 * PI,
            angle_spread: 0.1 * PI,
            coverage: 0.5 * PI,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.user_count == 0 || self.paths_per_user == 0 {
            return Err(RaaError::InvalidArgument(
                "scenario needs at least one user and one path".into(),
            ));
        }
        if !(self.path_magnitude >= 0.0 && self.path_magnitude.is_finite()) {
            return Err(RaaError::InvalidArgument(format!(
                "path magnitude must be non-negative, got {}",
                self.path_magnitude
            )));
        }
        if !(self.coverage > 0.0 && self.angle_spread >= 0.0) {
            return Err(RaaError::InvalidArgument(
                "coverage must be positive and angle spread non-negative".into(),
            ));
        }
        if self.mode == ScenarioMode::SingleUser && self.user_count != 1 {
            return Err(RaaError::InvalidArgument(
                "single-user scenario must have exactly one user".into(),
            ));
        }
        Ok(())
    }

    /// Angle of slot `i` (one-based).
    pub fn slot_angle(&self, i: usize) -> f64 {
        self.angle_start + self.angle_step * i as f64
    }
}

fn random_phase<R: Rng + ?Sized>(magnitude: f64, rng: &mut R) -> Complex64 {
    Complex64::from_polar(magnitude, rng.gen_range(0.0..2.0 * PI))
}

/// Fixed path angles with independent uniform phases.
pub fn generate_single_user<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<MultipathChannel> {
    if config.mode != ScenarioMode::SingleUser {
        return Err(RaaError::InvalidArgument(
            "single-user generation needs a single-user scenario".into(),
        ));
    }
    config.validate()?;
    let paths = (1..=config.paths_per_user)
        .map(|l| {
            let theta = config.slot_angle(l);
            if theta.abs() > config.coverage {
                return Err(RaaError::ConstraintViolation(format!(
                    "path angle {theta} lies outside the coverage range"
                )));
            }
            Ok(PathComponent {
                gain: random_phase(config.path_magnitude, rng),
                theta,
            })
        })
        .collect::<Result<_>>()?;
    Ok(MultipathChannel { user: 1, paths })
}

/// Per-user Gaussian path angles, redrawn until they fall inside the coverage
/// range. Draw order per path: angle (with any redraws), then phase.
pub fn generate_multi_user<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Vec<MultipathChannel>> {
    if config.mode != ScenarioMode::MultiUser {
        return Err(RaaError::InvalidArgument(
            "multi-user generation needs a multi-user scenario".into(),
        ));
    }
    config.validate()?;
    (1..=config.user_count)
        .map(|k| {
            let mean = config.slot_angle(k);
            let normal = Normal::new(mean, config.angle_spread)
                .map_err(|e| RaaError::InvalidArgument(e.to_string()))?;
            let paths = (0..config.paths_per_user)
                .map(|_| {
                    let theta = (0..MAX_ANGLE_DRAWS)
                        .map(|_| normal.sample(rng))
                        .find(|t| t.abs() <= config.coverage)
                        .ok_or_else(|| {
                            RaaError::ConstraintViolation(format!(
                                "user {k}: no angle inside coverage after {MAX_ANGLE_DRAWS} draws"
                            ))
                        })?;
                    Ok(PathComponent {
                        gain: random_phase(config.path_magnitude, rng),
                        theta,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(MultipathChannel { user: k, paths })
        })
        .collect()
}

/// `h = Σ_l α_l · r(θ_l)` over the ports of `array`.
pub fn effective_channel(
    array: ArrayModel<'_>,
    pattern: &AntennaPattern,
    channel: &MultipathChannel,
) -> Vec<Complex64> {
    let mut h = vec![Complex64::new(0.0, 0.0); array.port_count()];
    for path in &channel.paths {
        let r = array.response(pattern, path.theta);
        for (acc, v) in h.iter_mut().zip(&r.values) {
            *acc += path.gain * v;
        }
    }
    h
}

pub fn effective_channel_raa(
    geom: &RaaGeometry,
    pattern: &AntennaPattern,
    channel: &MultipathChannel,
) -> Vec<Complex64> {
    effective_channel(ArrayModel::Raa(geom), pattern, channel)
}

pub fn effective_channel_hbf(
    codebook: &HbfCodebook,
    pattern: &AntennaPattern,
    channel: &MultipathChannel,
) -> Vec<Complex64> {
    effective_channel(ArrayModel::Hbf(codebook), pattern, channel)
}

pub const CHANNEL_CSV_HEADER: &str = "user,path,re_alpha,im_alpha,theta_rad";

/// Appends one CSV row per path; paths are numbered from 1.
pub fn write_channel_rows(out: &mut String, prefix: &str, channels: &[MultipathChannel]) {
    for chan in channels {
        for (l, p) in chan.paths.iter().enumerate() {
            let _ = writeln!(
                out,
                "{prefix}{},{},{},{},{}",
                chan.user,
                l + 1,
                p.gain.re,
                p.gain.im,
                p.theta
            );
        }
    }
}

pub fn channels_to_csv(channels: &[MultipathChannel]) -> String {
    let mut out = format!("{CHANNEL_CSV_HEADER}\n");
    write_channel_rows(&mut out, "", channels);
    out
}
