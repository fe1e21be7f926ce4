//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Angles accept a `pi`
//! suffix (`0.5pi`, `0.3*pi`, `pi`). SNR grids are `start:step:stop` or a
//! comma list. The resolved configuration is echoed into every CSV header.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::channel::ScenarioConfig;
use crate::cost::PriceList;
use crate::error::{RaaError, Result};
use crate::geometry::{HbfCodebook, RaaGeometry};
use crate::response::{AntennaPattern, Architecture, PatternKind, DEFAULT_A_MAX_DB};
use crate::selection::{SelectionMethod, DEFAULT_EXHAUSTIVE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    BeamPattern,
    SingleUser,
    MultiUser,
    Cost,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::BeamPattern => "beam_pattern",
            ExperimentKind::SingleUser => "single_user",
            ExperimentKind::MultiUser => "multi_user",
            ExperimentKind::Cost => "cost",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = RaaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "beam_pattern" => Ok(ExperimentKind::BeamPattern),
            "single_user" => Ok(ExperimentKind::SingleUser),
            "multi_user" => Ok(ExperimentKind::MultiUser),
            "cost" => Ok(ExperimentKind::Cost),
            other => Err(RaaError::Config(format!("unknown experiment `{other}`"))),
        }
    }
}

/// Which element patterns an experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternChoice {
    Isotropic,
    Directional,
    Both,
}

impl PatternChoice {
    pub fn kinds(self) -> Vec<PatternKind> {
        match self {
            PatternChoice::Isotropic => vec![PatternKind::Isotropic],
            PatternChoice::Directional => vec![PatternKind::Directional],
            PatternChoice::Both => vec![PatternKind::Isotropic, PatternKind::Directional],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PatternChoice::Isotropic => "isotropic",
            PatternChoice::Directional => "directional",
            PatternChoice::Both => "both",
        }
    }
}

impl FromStr for PatternChoice {
    type Err = RaaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "isotropic" => Ok(PatternChoice::Isotropic),
            "directional" => Ok(PatternChoice::Directional),
            "both" => Ok(PatternChoice::Both),
            other => Err(RaaError::Config(format!(
                "unknown pattern choice `{other}`"
            ))),
        }
    }
}

/// dB parameters of the three element patterns in play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternParams {
    pub raa_g0_db: f64,
    pub raa_theta_3db: f64,
    pub hbf_g0_db: f64,
    pub hbf_theta_3db: f64,
    pub a_max_db: f64,
    pub iso_g0_db: f64,
}

impl Default for PatternParams {
    fn default() -> Self {
        Self {
            raa_g0_db: 5.1335,
            raa_theta_3db: 0.3 * PI,
            hbf_g0_db: 0.0,
            hbf_theta_3db: PI,
            a_max_db: DEFAULT_A_MAX_DB,
            iso_g0_db: -2.816,
        }
    }
}

impl PatternParams {
    pub fn pattern(&self, kind: PatternKind, arch: Architecture) -> Result<AntennaPattern> {
        match (kind, arch) {
            (PatternKind::Isotropic, _) => Ok(AntennaPattern::isotropic(self.iso_g0_db)),
            (PatternKind::Directional, Architecture::Raa) => {
                AntennaPattern::directional(self.raa_g0_db, self.raa_theta_3db, self.a_max_db)
            }
            (PatternKind::Directional, Architecture::Hbf) => {
                AntennaPattern::directional(self.hbf_g0_db, self.hbf_theta_3db, self.a_max_db)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub elements_per_ray: usize,
    pub eta_max: f64,
    pub offset: Option<f64>,
    pub wavelength: f64,
    pub pattern: PatternChoice,
    pub patterns: PatternParams,
    pub n_rf: usize,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<SelectionMethod>,
    pub beam_points: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub prices: PriceList,
    pub exhaustive_cap: u128,
    pub dump_channels: bool,
    pub users: usize,
    pub paths: usize,
    pub angle_spread: f64,
}

/// `-10, -8, …, 10` dB.
pub fn default_snr_grid() -> Vec<f64> {
    (0..=10).map(|i| -10.0 + 2.0 * i as f64).collect()
}

impl ExperimentConfig {
    pub fn defaults(experiment: ExperimentKind) -> Self {
        let single = ScenarioConfig::single_user();
        let multi = ScenarioConfig::multi_user();
        let mut cfg = Self {
            experiment,
            elements_per_ray: 16,
            eta_max: 0.5 * PI,
            offset: None,
            wavelength: 1.0,
            pattern: PatternChoice::Both,
            patterns: PatternParams::default(),
            n_rf: 5,
            snr_grid_db: default_snr_grid(),
            trials: 1,
            seed: 1,
            methods: vec![SelectionMethod::TopMagnitude],
            beam_points: 2001,
            theta_min: -0.5 * PI,
            theta_max: 0.5 * PI,
            prices: PriceList::default(),
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
            dump_channels: false,
            users: single.user_count,
            paths: single.paths_per_user,
            angle_spread: multi.angle_spread,
        };
        match experiment {
            ExperimentKind::BeamPattern => cfg.elements_per_ray = 8,
            ExperimentKind::SingleUser => cfg.trials = 1000,
            ExperimentKind::MultiUser => {
                cfg.trials = 500;
                cfg.methods = vec![SelectionMethod::Greedy, SelectionMethod::Exhaustive];
                cfg.users = multi.user_count;
                cfg.paths = multi.paths_per_user;
            }
            ExperimentKind::Cost => cfg.n_rf = 1,
        }
        cfg
    }

    /// Defaults for `experiment`, then every assignment in `text`.
    pub fn from_kv_str(experiment: ExperimentKind, text: &str) -> Result<Self> {
        let mut cfg = Self::defaults(experiment);
        cfg.apply_kv(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_kv(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                RaaError::Config(format!("line {}: expected key = value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| RaaError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    /// Assigns one key. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.experiment {
                    return Err(RaaError::Config(format!(
                        "config is for {kind} but {} was requested",
                        self.experiment
                    )));
                }
            }
            "m" | "M" => self.elements_per_ray = parse(key, value)?,
            "eta_max" => self.eta_max = parse_angle(value)?,
            "d" | "D" => {
                self.offset = match value {
                    "" | "min" | "auto" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "lambda" => self.wavelength = parse(key, value)?,
            "pattern" => self.pattern = value.parse()?,
            "raa_g0_db" => self.patterns.raa_g0_db = parse(key, value)?,
            "raa_theta_3db" => self.patterns.raa_theta_3db = parse_angle(value)?,
            "hbf_g0_db" => self.patterns.hbf_g0_db = parse(key, value)?,
            "hbf_theta_3db" => self.patterns.hbf_theta_3db = parse_angle(value)?,
            "a_max_db" => self.patterns.a_max_db = parse(key, value)?,
            "iso_g0_db" => self.patterns.iso_g0_db = parse(key, value)?,
            "n_rf" => self.n_rf = parse(key, value)?,
            "snr_db" => self.snr_grid_db = parse_grid(value)?,
            "trials" => self.trials = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "methods" => self.methods = parse_methods(value)?,
            "beam_points" => self.beam_points = parse(key, value)?,
            "theta_min" => self.theta_min = parse_angle(value)?,
            "theta_max" => self.theta_max = parse_angle(value)?,
            "p_sw" => self.prices.switch = parse(key, value)?,
            "p_ant" => self.prices.antenna = parse(key, value)?,
            "p_ps" => self.prices.phase_shifter = parse(key, value)?,
            "exhaustive_cap" => self.exhaustive_cap = parse_count(value)?,
            "dump_channels" => self.dump_channels = parse(key, value)?,
            "users" => self.users = parse(key, value)?,
            "paths" => self.paths = parse(key, value)?,
            "angle_spread" => self.angle_spread = parse_angle(value)?,
            other => return Err(RaaError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(RaaError::Config("trials must be at least 1".into()));
        }
        if self.snr_grid_db.is_empty() {
            return Err(RaaError::Config("SNR grid is empty".into()));
        }
        check_grid(&self.snr_grid_db)?;
        if self.n_rf == 0 {
            return Err(RaaError::Config("n_rf must be at least 1".into()));
        }
        let ordered = self.theta_min.is_finite()
            && self.theta_max.is_finite()
            && self.theta_min <= self.theta_max;
        if self.beam_points == 0 || !ordered {
            return Err(RaaError::Config(
                "beam grid needs points and theta_min <= theta_max".into(),
            ));
        }
        if self.users == 0 || self.paths == 0 {
            return Err(RaaError::Config("users and paths must be positive".into()));
        }
        if self.experiment == ExperimentKind::SingleUser && self.users != 1 {
            return Err(RaaError::Config(
                "single-user experiment needs users = 1".into(),
            ));
        }
        if self.experiment == ExperimentKind::MultiUser && self.methods.is_empty() {
            return Err(RaaError::Config("no selection methods given".into()));
        }
        self.prices.validate()?;
        for kind in [PatternKind::Isotropic, PatternKind::Directional] {
            for arch in [Architecture::Raa, Architecture::Hbf] {
                self.patterns.pattern(kind, arch)?;
            }
        }
        self.geometry()?;
        if self.experiment != ExperimentKind::Cost {
            self.codebook()?;
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<RaaGeometry> {
        RaaGeometry::new(
            self.elements_per_ray,
            self.eta_max,
            self.offset,
            self.wavelength,
        )
    }

    /// Baseline codebook over an `M`-element ULA with `N' = M` codewords.
    pub fn codebook(&self) -> Result<HbfCodebook> {
        HbfCodebook::new(self.elements_per_ray)
    }

    pub fn scenario(&self) -> ScenarioConfig {
        let base = match self.experiment {
            ExperimentKind::MultiUser => ScenarioConfig::multi_user(),
            _ => ScenarioConfig::single_user(),
        };
        ScenarioConfig {
            user_count: self.users,
            paths_per_user: self.paths,
            path_magnitude: (1.0 / self.paths as f64).sqrt(),
            angle_spread: self.angle_spread,
            coverage: self.eta_max,
            ..base
        }
    }

    /// Every resolved key in a fixed order. The output path is not included.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        put("experiment", self.experiment.to_string());
        put("m", self.elements_per_ray.to_string());
        put("eta_max", self.eta_max.to_string());
        put(
            "d",
            self.offset.map_or_else(|| "min".into(), |d| d.to_string()),
        );
        put("lambda", self.wavelength.to_string());
        put("pattern", self.pattern.as_str().into());
        put("raa_g0_db", self.patterns.raa_g0_db.to_string());
        put("raa_theta_3db", self.patterns.raa_theta_3db.to_string());
        put("hbf_g0_db", self.patterns.hbf_g0_db.to_string());
        put("hbf_theta_3db", self.patterns.hbf_theta_3db.to_string());
        put("a_max_db", self.patterns.a_max_db.to_string());
        put("iso_g0_db", self.patterns.iso_g0_db.to_string());
        put("n_rf", self.n_rf.to_string());
        let grid: Vec<String> = self.snr_grid_db.iter().map(f64::to_string).collect();
        put("snr_db", grid.join(","));
        put("trials", self.trials.to_string());
        put("seed", self.seed.to_string());
        let methods: Vec<&str> = self.methods.iter().map(|m| m.as_str()).collect();
        put("methods", methods.join(","));
        put("beam_points", self.beam_points.to_string());
        put("theta_min", self.theta_min.to_string());
        put("theta_max", self.theta_max.to_string());
        put("p_sw", self.prices.switch.to_string());
        put("p_ant", self.prices.antenna.to_string());
        put("p_ps", self.prices.phase_shifter.to_string());
        put("exhaustive_cap", self.exhaustive_cap.to_string());
        put("dump_channels", self.dump_channels.to_string());
        put("users", self.users.to_string());
        put("paths", self.paths.to_string());
        put("angle_spread", self.angle_spread.to_string());
        out
    }

    /// [`to_kv`](Self::to_kv) as `# ` comment lines for CSV headers.
    pub fn header(&self) -> String {
        self.to_kv().lines().map(|l| format!("# {l}\n")).collect()
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| RaaError::Config(format!("cannot parse `{value}` for {key}")))
}

/// Plain radians, or a multiple of pi: `pi`, `0.5pi`, `0.5*pi`, `-pi`.
pub fn parse_angle(value: &str) -> Result<f64> {
    let v = value.trim();
    let bad = || RaaError::Config(format!("cannot parse angle `{value}`"));
    match v.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim().trim_end_matches('*').trim();
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            Ok(c * PI)
        }
        None => v.parse::<f64>().map_err(|_| bad()),
    }
}

/// `start:step:stop` (inclusive, with rounding slack) or `a,b,c`.
pub fn parse_grid(value: &str) -> Result<Vec<f64>> {
    let bad = || RaaError::Config(format!("cannot parse SNR grid `{value}`"));
    let grid = if value.contains(':') {
        let parts: Vec<f64> = value
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        let [start, step, stop] = parts[..] else {
            return Err(bad());
        };
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + step * i as f64).collect()
    } else {
        value
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?
    };
    check_grid(&grid)?;
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|v| !v.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RaaError::Config(
            "SNR grid must be finite and strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn parse_methods(value: &str) -> Result<Vec<SelectionMethod>> {
    let mut out: Vec<SelectionMethod> = Vec::new();
    for part in value.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let m: SelectionMethod = part.parse()?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

/// Integer count, also accepting `1e6` style.
fn parse_count(value: &str) -> Result<u128> {
    let v = value.trim();
    v.parse::<u128>().or_else(|_| {
        v.parse::<f64>()
            .ok()
            .filter(|f| f.is_finite() && *f >= 0.0 && f.fract() == 0.0)
            .map(|f| f as u128)
            .ok_or_else(|| RaaError::Config(format!("cannot parse count `{value}`")))
    })
}
