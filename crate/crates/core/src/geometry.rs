//! Ray antenna array geometry and the DFT-codebook baseline.
//!
//! A ray array is `N` simple uniform linear arrays (sULAs) of `M` half-wavelength
//! spaced elements fanned out around a reference ray. Rays are indexed either by
//! their signed ray index `n ∈ {-(N-1)/2, …, (N-1)/2}` or by the zero-based port
//! `p = n + (N-1)/2` that feeds the selection network. Public accessors take ports.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{RaaError, Result};

/// Angular spacing between adjacent rays: the peak-to-null width `arcsin(2/M)`.
pub fn ray_spacing(elements_per_ray: usize) -> Result<f64> {
    if elements_per_ray < 2 {
        return Err(RaaError::InvalidArgument(format!(
            "elements per ray must be at least 2, got {elements_per_ray}"
        )));
    }
    Ok((2.0 / elements_per_ray as f64).asin())
}

/// Ray count and orientations for `M` elements per ray covering `[-η_max, η_max]`.
///
/// Adjacent orientations differ by `arcsin(2/M)`, so every ray's main-lobe peak
/// lands on its neighbours' first nulls.
pub fn design_orientations(elements_per_ray: usize, eta_max: f64) -> Result<(usize, Vec<f64>)> {
    let spacing = ray_spacing(elements_per_ray)?;
    check_eta_max(eta_max)?;
    // Slack absorbs rounding when eta_max is an exact multiple of the spacing.
    let half = (eta_max / spacing + 1e-9).floor() as usize;
    let count = 2 * half + 1;
    let orientations = (0..count)
        .map(|p| (p as f64 - half as f64) * spacing)
        .collect();
    Ok((count, orientations))
}

/// Smallest offset `D` keeping first elements of adjacent rays `λ/2` apart.
pub fn min_ray_spacing(elements_per_ray: usize, wavelength: f64) -> Result<f64> {
    let spacing = ray_spacing(elements_per_ray)?;
    check_positive("wavelength", wavelength)?;
    Ok(wavelength / (4.0 * (0.5 * spacing).sin()))
}

fn check_eta_max(eta_max: f64) -> Result<()> {
    if !(eta_max > 0.0 && eta_max <= PI) {
        return Err(RaaError::InvalidArgument(format!(
            "maximum orientation must lie in (0, pi], got {eta_max}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(RaaError::InvalidArgument(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// A fully specified ray antenna array. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct RaaGeometry {
    elements_per_ray: usize,
    orientations: Vec<f64>,
    offset: f64,
    eta_max: f64,
    wavelength: f64,
}

impl RaaGeometry {
    /// Builds an array, defaulting the ray offset to [`min_ray_spacing`].
    pub fn new(
        elements_per_ray: usize,
        eta_max: f64,
        offset: Option<f64>,
        wavelength: f64,
    ) -> Result<Self> {
        let (_, orientations) = design_orientations(elements_per_ray, eta_max)?;
        let min_offset = min_ray_spacing(elements_per_ray, wavelength)?;
        let offset = match offset {
            None => min_offset,
            Some(d) if !d.is_finite() => {
                return Err(RaaError::InvalidArgument(format!(
                    "offset must be finite, got {d}"
                )))
            }
            Some(d) if d < min_offset => {
                return Err(RaaError::ConstraintViolation(format!(
                    "ray offset {d} is below the minimum {min_offset} for M = {elements_per_ray}"
                )))
            }
            Some(d) => d,
        };
        Ok(Self {
            elements_per_ray,
            orientations,
            offset,
            eta_max,
            wavelength,
        })
    }

    /// Array with `λ = 1` and the minimum offset.
    pub fn with_defaults(elements_per_ray: usize, eta_max: f64) -> Result<Self> {
        Self::new(elements_per_ray, eta_max, None, 1.0)
    }

    pub fn elements_per_ray(&self) -> usize {
        self.elements_per_ray
    }

    pub fn ray_count(&self) -> usize {
        self.orientations.len()
    }

    /// Orientations in port order, from `-η_max` side to `+η_max` side.
    pub fn orientations(&self) -> &[f64] {
        &self.orientations
    }

    pub fn orientation(&self, port: usize) -> Result<f64> {
        self.orientations
            .get(port)
            .copied()
            .ok_or(RaaError::IndexOutOfRange {
                index: port,
                len: self.ray_count(),
            })
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn eta_max(&self) -> f64 {
        self.eta_max
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Signed ray index of a port.
    pub fn ray_index(&self, port: usize) -> i64 {
        port as i64 - (self.ray_count() as i64 - 1) / 2
    }

    /// Port of a signed ray index, if the ray exists.
    pub fn port(&self, ray_index: i64) -> Option<usize> {
        let p = ray_index + (self.ray_count() as i64 - 1) / 2;
        (0..self.ray_count() as i64)
            .contains(&p)
            .then_some(p as usize)
    }

    pub fn covers(&self, theta: f64) -> bool {
        theta.abs() <= self.eta_max
    }

    /// Key-value dump used for config echo in output headers.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "M={}", self.elements_per_ray);
        let _ = writeln!(out, "N={}", self.ray_count());
        let _ = writeln!(out, "D={}", self.offset);
        let _ = writeln!(out, "eta_max={}", self.eta_max);
        let _ = writeln!(out, "lambda={}", self.wavelength);
        let etas: Vec<String> = self.orientations.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "eta={}", etas.join(","));
        out
    }

    /// Rebuilds a geometry from [`to_kv`](Self::to_kv) output. `N` and `eta`
    /// are checked against the design rule rather than trusted.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut m = None;
        let mut n = None;
        let mut d = None;
        let mut eta_max = None;
        let mut lambda = 1.0;
        let mut eta: Option<Vec<f64>> = None;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| RaaError::Config(format!("expected key=value, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "M" => m = Some(parse_num::<usize>(key, value)?),
                "N" => n = Some(parse_num::<usize>(key, value)?),
                "D" => d = Some(parse_num::<f64>(key, value)?),
                "eta_max" => eta_max = Some(parse_num::<f64>(key, value)?),
                "lambda" => lambda = parse_num::<f64>(key, value)?,
                "eta" => {
                    eta = Some(
                        value
                            .split(',')
                            .map(|v| parse_num::<f64>(key, v.trim()))
                            .collect::<Result<_>>()?,
                    )
                }
                other => return Err(RaaError::Config(format!("unknown geometry key `{other}`"))),
            }
        }
        let m = m.ok_or_else(|| RaaError::Config("missing key M".into()))?;
        let eta_max = eta_max.ok_or_else(|| RaaError::Config("missing key eta_max".into()))?;
        let geom = Self::new(m, eta_max, d, lambda)?;
        if let Some(n) = n {
            if n != geom.ray_count() {
                return Err(RaaError::ConstraintViolation(format!(
                    "N = {n} does not match the designed ray count {}",
                    geom.ray_count()
                )));
            }
        }
        if let Some(eta) = eta {
            let matches = eta.len() == geom.ray_count()
                && eta
                    .iter()
                    .zip(geom.orientations())
                    .all(|(a, b)| (a - b).abs() <= 1e-12);
            if !matches {
                return Err(RaaError::ConstraintViolation(
                    "orientation list does not follow the design rule".into(),
                ));
            }
        }
        Ok(geom)
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| RaaError::Config(format!("cannot parse `{value}` for key {key}")))
}

/// DFT codebook for an `M`-element half-wavelength ULA.
///
/// Codeword `n` (for `n = -M/2 … M/2-1`) points at `θ_n = arcsin(2n/M)`; the
/// sines are stored exactly so the codebook is uniform in the sine domain.
#[derive(Debug, Clone, PartialEq)]
pub struct HbfCodebook {
    elements: usize,
    sines: Vec<f64>,
    angles: Vec<f64>,
}

impl HbfCodebook {
    /// Full codebook with `N' = M` codewords.
    pub fn new(elements: usize) -> Result<Self> {
        if elements < 2 || !elements.is_multiple_of(2) {
            return Err(RaaError::InvalidArgument(format!(
                "DFT codebook needs an even element count >= 2, got {elements}"
            )));
        }
        let half = (elements / 2) as i64;
        let sines: Vec<f64> = (-half..half).map(|n| n as f64 / half as f64).collect();
        let angles = sines.iter().map(|s| s.asin()).collect();
        Ok(Self {
            elements,
            sines,
            angles,
        })
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn codeword_count(&self) -> usize {
        self.sines.len()
    }

    pub fn codeword_angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn codeword_sines(&self) -> &[f64] {
        &self.sines
    }

    /// Signed codeword index `n` of a port.
    pub fn codeword_index(&self, port: usize) -> i64 {
        port as i64 - (self.elements / 2) as i64
    }
}
