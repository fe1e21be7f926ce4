//! Element patterns, sULA responses and combined beam outputs.

use std::f64::consts::PI;
use std::fmt;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{RaaError, Result};
use crate::geometry::{HbfCodebook, RaaGeometry};

/// Front-to-back attenuation used by the directional presets.
pub const DEFAULT_A_MAX_DB: f64 = 30.0;

/// Element radiation pattern. Gains are given in dB and converted to linear
/// power by [`element_gain`](Self::element_gain).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AntennaPattern {
    Isotropic {
        g0_db: f64,
    },
    /// 3GPP parabolic-in-dB pattern clipped at `a_max_db` below the peak.
    Directional {
        g0_db: f64,
        theta_3db: f64,
        a_max_db: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Isotropic,
    Directional,
}

impl PatternKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PatternKind::Isotropic => "isotropic",
            PatternKind::Directional => "directional",
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl AntennaPattern {
    pub fn isotropic(g0_db: f64) -> Self {
        AntennaPattern::Isotropic { g0_db }
    }

    pub fn directional(g0_db: f64, theta_3db: f64, a_max_db: f64) -> Result<Self> {
        if !(theta_3db > 0.0 && theta_3db.is_finite()) {
            return Err(RaaError::InvalidArgument(format!(
                "3 dB beamwidth must be positive, got {theta_3db}"
            )));
        }
        if !(a_max_db > 0.0 && a_max_db.is_finite()) {
            return Err(RaaError::InvalidArgument(format!(
                "front-to-back attenuation must be positive, got {a_max_db}"
            )));
        }
        Ok(AntennaPattern::Directional {
            g0_db,
            theta_3db,
            a_max_db,
        })
    }

    /// Narrow directional element of a ray: 0.3π beamwidth, 5.1335 dB peak.
    pub fn raa_directional() -> Self {
        AntennaPattern::Directional {
            g0_db: 5.1335,
            theta_3db: 0.3 * PI,
            a_max_db: DEFAULT_A_MAX_DB,
        }
    }

    /// Wide directional element of the baseline ULA: π beamwidth, 0 dB peak.
    pub fn hbf_directional() -> Self {
        AntennaPattern::Directional {
            g0_db: 0.0,
            theta_3db: PI,
            a_max_db: DEFAULT_A_MAX_DB,
        }
    }

    /// Isotropic element radiating the same total power as the directional ones.
    pub fn isotropic_matched() -> Self {
        AntennaPattern::Isotropic { g0_db: -2.816 }
    }

    pub fn kind(&self) -> PatternKind {
        match self {
            AntennaPattern::Isotropic { .. } => PatternKind::Isotropic,
            AntennaPattern::Directional { .. } => PatternKind::Directional,
        }
    }

    pub fn peak_gain_db(&self) -> f64 {
        match *self {
            AntennaPattern::Isotropic { g0_db } | AntennaPattern::Directional { g0_db, .. } => {
                g0_db
            }
        }
    }

    /// Gain in dB towards `psi`, measured from the element boresight.
    pub fn gain_db(&self, psi: f64) -> f64 {
        match *self {
            AntennaPattern::Isotropic { g0_db } => g0_db,
            AntennaPattern::Directional {
                g0_db,
                theta_3db,
                a_max_db,
            } => {
                let ratio = wrap_angle(psi) / theta_3db;
                g0_db - (12.0 * ratio * ratio).min(a_max_db)
            }
        }
    }

    /// Linear power gain towards `psi`.
    pub fn element_gain(&self, psi: f64) -> f64 {
        db_to_linear(self.gain_db(psi))
    }
}

/// Wraps an angle into `[-π, π]`.
fn wrap_angle(psi: f64) -> f64 {
    if (-PI..=PI).contains(&psi) {
        psi
    } else {
        (psi + PI).rem_euclid(2.0 * PI) - PI
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Dirichlet kernel `H_M(u) = Σ_{m<M} e^{jπmu}` in closed form.
///
/// Where `sin(πu/2)` vanishes (`u = 2k`) the ratio is replaced by its limit
/// `M·(-1)^{k(M-1)}`.
pub fn dirichlet_kernel(elements: usize, u: f64) -> Complex64 {
    let m = elements as f64;
    let phase = Complex64::from_polar(1.0, 0.5 * PI * (m - 1.0) * u);
    let den = (0.5 * PI * u).sin();
    let ratio = if den.abs() < 1e-12 {
        let k = (0.5 * u).round() as i64;
        if (k * (elements as i64 - 1)) % 2 == 0 {
            m
        } else {
            -m
        }
    } else {
        (0.5 * PI * m * u).sin() / den
    };
    phase * ratio
}

/// Element responses `e^{jπ m sin(θ-η)}` of one ray, `m = 0 … M-1`.
pub fn sula_response(geom: &RaaGeometry, port: usize, theta: f64) -> Result<Vec<Complex64>> {
    let eta = geom.orientation(port)?;
    let s = (theta - eta).sin();
    Ok((0..geom.elements_per_ray())
        .map(|m| Complex64::from_polar(1.0, PI * m as f64 * s))
        .collect())
}

/// Response of a ray's first element: offset phase times the element amplitude.
pub fn ray_reference_gain(
    geom: &RaaGeometry,
    pattern: &AntennaPattern,
    port: usize,
    theta: f64,
) -> Result<Complex64> {
    let eta = geom.orientation(port)?;
    Ok(reference_gain(geom, pattern, eta, theta))
}

fn reference_gain(geom: &RaaGeometry, pattern: &AntennaPattern, eta: f64, theta: f64) -> Complex64 {
    let rel = theta - eta;
    let phase = 2.0 * PI / geom.wavelength() * geom.offset() * rel.sin();
    Complex64::from_polar(pattern.element_gain(rel).sqrt(), phase)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    Raa,
    Hbf,
}

impl Architecture {
    pub fn as_str(self) -> &'static str {
        match self {
            Architecture::Raa => "raa",
            Architecture::Hbf => "hbf",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Combined output of every port towards one path angle.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamResponse {
    pub theta: f64,
    pub values: Vec<Complex64>,
    pub architecture: Architecture,
}

impl BeamResponse {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Outputs of all `N` ray combiners: `r_n(θ) = b(θ, η_n)·H_M(sin(θ-η_n))`.
pub fn raa_output(geom: &RaaGeometry, pattern: &AntennaPattern, theta: f64) -> BeamResponse {
    let m = geom.elements_per_ray();
    let values = geom
        .orientations()
        .iter()
        .map(|&eta| {
            reference_gain(geom, pattern, eta, theta) * dirichlet_kernel(m, (theta - eta).sin())
        })
        .collect();
    BeamResponse {
        theta,
        values,
        architecture: Architecture::Raa,
    }
}

/// DFT-codebook beam outputs: `sqrt(G(θ))·H_M(sin θ - sin θ_n)`.
pub fn hbf_output(codebook: &HbfCodebook, pattern: &AntennaPattern, theta: f64) -> BeamResponse {
    let m = codebook.elements();
    let amplitude = pattern.element_gain(theta).sqrt();
    let s = theta.sin();
    let values = codebook
        .codeword_sines()
        .iter()
        .map(|&sn| amplitude * dirichlet_kernel(m, s - sn))
        .collect();
    BeamResponse {
        theta,
        values,
        architecture: Architecture::Hbf,
    }
}

/// Either array architecture, for code that treats both uniformly.
#[derive(Debug, Clone, Copy)]
pub enum ArrayModel<'a> {
    Raa(&'a RaaGeometry),
    Hbf(&'a HbfCodebook),
}

impl ArrayModel<'_> {
    pub fn architecture(&self) -> Architecture {
        match self {
            ArrayModel::Raa(_) => Architecture::Raa,
            ArrayModel::Hbf(_) => Architecture::Hbf,
        }
    }

    pub fn port_count(&self) -> usize {
        match self {
            ArrayModel::Raa(g) => g.ray_count(),
            ArrayModel::Hbf(c) => c.codeword_count(),
        }
    }

    /// Elements combined per port; this sets the post-combining noise power.
    pub fn elements_per_port(&self) -> usize {
        match self {
            ArrayModel::Raa(g) => g.elements_per_ray(),
            ArrayModel::Hbf(c) => c.elements(),
        }
    }

    pub fn covers(&self, theta: f64) -> bool {
        match self {
            ArrayModel::Raa(g) => g.covers(theta),
            ArrayModel::Hbf(_) => theta.abs() <= 0.5 * PI,
        }
    }

    pub fn response(&self, pattern: &AntennaPattern, theta: f64) -> BeamResponse {
        match self {
            ArrayModel::Raa(g) => raa_output(g, pattern, theta),
            ArrayModel::Hbf(c) => hbf_output(c, pattern, theta),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub magnitudes: Vec<f64>,
    pub max_magnitude: f64,
    /// False when `theta` lies outside the array's coverage range.
    pub in_coverage: bool,
}

impl SweepRow {
    pub fn max_magnitude_db(&self) -> f64 {
        20.0 * self.max_magnitude.log10()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamSweep {
    pub architecture: Architecture,
    pub pattern: PatternKind,
    pub port_count: usize,
    pub rows: Vec<SweepRow>,
}

impl BeamSweep {
    pub fn out_of_coverage(&self) -> usize {
        self.rows.iter().filter(|r| !r.in_coverage).count()
    }

    /// CSV body: `theta_rad,port_0..port_{N-1},max_magnitude_dB`. Port columns
    /// hold linear magnitudes; the last column is `20·log10` of the row maximum.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# architecture={}", self.architecture);
        let _ = writeln!(out, "# pattern={}", self.pattern);
        let _ = writeln!(out, "# out_of_coverage_points={}", self.out_of_coverage());
        out.push_str("theta_rad");
        for p in 0..self.port_count {
            let _ = write!(out, ",port_{p}");
        }
        out.push_str(",max_magnitude_dB\n");
        for row in &self.rows {
            let _ = write!(out, "{}", row.theta);
            for m in &row.magnitudes {
                let _ = write!(out, ",{m}");
            }
            let _ = writeln!(out, ",{}", row.max_magnitude_db());
        }
        out
    }
}

/// Magnitude response of every port over an angle grid, in grid order.
pub fn beam_pattern_sweep(
    array: ArrayModel<'_>,
    pattern: &AntennaPattern,
    grid: &[f64],
) -> Result<BeamSweep> {
    if grid.is_empty() {
        return Err(RaaError::InvalidArgument("angle grid is empty".into()));
    }
    if let Some(bad) = grid.iter().find(|t| !t.is_finite()) {
        return Err(RaaError::InvalidArgument(format!(
            "non-finite grid angle {bad}"
        )));
    }
    let rows = grid
        .iter()
        .map(|&theta| {
            let resp = array.response(pattern, theta);
            let magnitudes = resp.magnitudes();
            let max_magnitude = magnitudes.iter().copied().fold(0.0, f64::max);
            SweepRow {
                theta,
                magnitudes,
                max_magnitude,
                in_coverage: array.covers(theta),
            }
        })
        .collect();
    Ok(BeamSweep {
        architecture: array.architecture(),
        pattern: pattern.kind(),
        port_count: array.port_count(),
        rows,
    })
}

/// `points` evenly spaced angles from `lo` to `hi` inclusive. The midpoint is
/// exact, so a symmetric odd-length grid contains `0.0`.
pub fn angle_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..points)
            .map(|i| {
                let t = i as f64 / (points - 1) as f64;
                lo * (1.0 - t) + hi * t
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> AntennaPattern {
        AntennaPattern::isotropic(0.0)
    }

    #[test]
    fn directional_peak_gain() {
        let g = AntennaPattern::raa_directional().element_gain(0.0);
        // 10^0.51335 = 3.26099400198727...
        assert!((g - 3.260_994_001_987_272).abs() < 1e-12);
    }

    #[test]
    fn directional_half_beamwidth_is_three_db_down() {
        let p = AntennaPattern::directional(2.0, 0.7, 25.0).unwrap();
        assert!((p.gain_db(0.35) - (2.0 - 3.0)).abs() < 1e-12);
        assert!((p.gain_db(-0.35) - (2.0 - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn directional_floor_and_wrap() {
        let p = AntennaPattern::raa_directional();
        assert!((p.gain_db(0.5 * PI) - (5.1335 - 30.0)).abs() < 1e-12);
        // 2π - 0.1 sits 0.1 rad from boresight.
        assert!((p.gain_db(2.0 * PI - 0.1) - p.gain_db(-0.1)).abs() < 1e-9);
    }

    #[test]
    fn isotropic_matched_gain() {
        let p = AntennaPattern::isotropic_matched();
        for psi in [-3.0, -1.0, 0.0, 0.4, 2.9] {
            // 10^-0.2816 = 0.52287755531344...
            assert!((p.element_gain(psi) - 0.522_877_555_313_441_5).abs() < 1e-12);
        }
    }

    #[test]
    fn pattern_validation() {
        assert!(AntennaPattern::directional(0.0, 0.0, 30.0).is_err());
        assert!(AntennaPattern::directional(0.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn dirichlet_peak_null_and_sidelobe() {
        assert_eq!(dirichlet_kernel(8, 0.0), Complex64::new(8.0, 0.0));
        assert!(dirichlet_kernel(8, 2.0 / 8.0).norm() < 1e-14);
        // |sin(π/2) / sin(π/16)| = 5.1258308954830...
        assert!((dirichlet_kernel(8, 1.0 / 8.0).norm() - 5.125_830_895_483_012).abs() < 1e-12);
    }

    #[test]
    fn dirichlet_limit_at_plus_minus_two_matches_sum() {
        for m in 1..10 {
            for u in [2.0, -2.0] {
                let direct: Complex64 = (0..m)
                    .map(|k| Complex64::from_polar(1.0, PI * k as f64 * u))
                    .sum();
                assert!(
                    (dirichlet_kernel(m, u) - direct).norm() < 1e-9,
                    "M={m} u={u}"
                );
            }
        }
    }

    #[test]
    fn sula_response_cases() {
        let g = RaaGeometry::with_defaults(8, 0.5 * PI).unwrap();
        let eta = g.orientation(3).unwrap();
        for v in sula_response(&g, 3, eta).unwrap() {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert!(matches!(
            sula_response(&g, 13, 0.0),
            Err(RaaError::IndexOutOfRange { .. })
        ));

        let g2 = RaaGeometry::with_defaults(2, 0.5 * PI).unwrap();
        // Port 0 has η = -π/2, so θ = 0 gives θ - η = π/2.
        let r = sula_response(&g2, 0, 0.0).unwrap();
        assert!((r[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((r[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reference_gain_cases() {
        let g = RaaGeometry::with_defaults(16, 0.5 * PI).unwrap();
        let eta = g.orientation(5).unwrap();
        let b = ray_reference_gain(&g, &unit(), 5, eta).unwrap();
        assert!((b - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let b = ray_reference_gain(&g, &AntennaPattern::raa_directional(), 5, eta).unwrap();
        assert!((b.re - 1.805_822_250_939_242_4).abs() < 1e-12);
        assert!(b.im.abs() < 1e-15);

        let far = RaaGeometry::new(16, 0.5 * PI, Some(40.0), 1.0).unwrap();
        for theta in [-1.2, -0.3, 0.05, 0.9] {
            let a = ray_reference_gain(&g, &AntennaPattern::raa_directional(), 2, theta).unwrap();
            let b = ray_reference_gain(&far, &AntennaPattern::raa_directional(), 2, theta).unwrap();
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        assert!(ray_reference_gain(&g, &unit(), 25, 0.0).is_err());
    }

    #[test]
    fn raa_output_peak_and_adjacent_nulls() {
        let g = RaaGeometry::with_defaults(8, 0.5 * PI).unwrap();
        let pat = AntennaPattern::raa_directional();
        for p in 1..12 {
            let r = raa_output(&g, &pat, g.orientations()[p]);
            assert_eq!(r.values.len(), 13);
            let peak = 8.0 * pat.element_gain(0.0).sqrt();
            assert!((r.values[p].norm() - peak).abs() < 1e-12);
            assert!(r.values[p - 1].norm() < 1e-12);
            assert!(r.values[p + 1].norm() < 1e-12);
        }
    }

    #[test]
    fn hbf_output_cases() {
        let cb = HbfCodebook::new(16).unwrap();
        for (p, &theta) in cb.codeword_angles().iter().enumerate() {
            let r = hbf_output(&cb, &unit(), theta);
            assert_eq!(r.values.len(), 16);
            assert!((r.values[p].norm() - 16.0).abs() < 1e-12);
        }
        let r = hbf_output(&cb, &AntennaPattern::hbf_directional(), 0.0);
        assert!((r.values[8].norm() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn sweep_rows_match_single_outputs() {
        let g = RaaGeometry::with_defaults(8, 0.5 * PI).unwrap();
        let grid = angle_grid(-0.5 * PI, 0.5 * PI, 101);
        assert_eq!(grid[50], 0.0);
        let pat = AntennaPattern::isotropic_matched();
        let sweep = beam_pattern_sweep(ArrayModel::Raa(&g), &pat, &grid).unwrap();
        assert_eq!(sweep.rows.len(), 101);
        let row = &sweep.rows[50];
        assert!((row.max_magnitude - 8.0 * pat.element_gain(0.0).sqrt()).abs() < 1e-12);
        let direct = raa_output(&g, &pat, grid[17]).magnitudes();
        assert_eq!(sweep.rows[17].magnitudes, direct);
        assert!(beam_pattern_sweep(ArrayModel::Raa(&g), &pat, &[]).is_err());
    }

    #[test]
    fn sweep_flags_out_of_coverage_angles() {
        let g = RaaGeometry::with_defaults(8, 0.25 * PI).unwrap();
        let grid = angle_grid(-0.5 * PI, 0.5 * PI, 5);
        let sweep = beam_pattern_sweep(ArrayModel::Raa(&g), &unit(), &grid).unwrap();
        assert_eq!(sweep.out_of_coverage(), 2);
        let csv = sweep.to_csv();
        assert!(csv.contains("# out_of_coverage_points=2"));
        let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
        assert!(header.starts_with("theta_rad,port_0,"));
        assert!(header.ends_with(&format!("port_{},max_magnitude_dB", g.ray_count() - 1)));
    }

    #[test]
    fn raa_and_hbf_agree_near_broadside_with_isotropic_elements() {
        let g = RaaGeometry::with_defaults(8, 0.5 * PI).unwrap();
        let cb = HbfCodebook::new(8).unwrap();
        let pat = AntennaPattern::isotropic_matched();
        let grid = angle_grid(-0.1 * PI, 0.1 * PI, 201);
        let a = beam_pattern_sweep(ArrayModel::Raa(&g), &pat, &grid).unwrap();
        let b = beam_pattern_sweep(ArrayModel::Hbf(&cb), &pat, &grid).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert!(
                (ra.max_magnitude_db() - rb.max_magnitude_db()).abs() < 0.5,
                "θ={}",
                ra.theta
            );
        }
    }

    proptest! {
        #[test]
        fn dirichlet_magnitude_is_even_and_bounded(m in 1usize..64, u in -2.0f64..2.0) {
            let a = dirichlet_kernel(m, u).norm();
            let b = dirichlet_kernel(m, -u).norm();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!(a <= m as f64 + 1e-9);
        }

        #[test]
        fn dirichlet_matches_phasor_sum(m in 1usize..40, u in -2.0f64..2.0) {
            let direct: Complex64 = (0..m)
                .map(|k| Complex64::from_polar(1.0, PI * k as f64 * u))
                .sum();
            prop_assert!((dirichlet_kernel(m, u) - direct).norm() < 1e-9);
        }

        #[test]
        fn output_magnitudes_do_not_depend_on_offset(extra in 0.0f64..20.0, theta in -1.5f64..1.5) {
            let a = RaaGeometry::with_defaults(16, 0.5 * PI).unwrap();
            let b = RaaGeometry::new(16, 0.5 * PI, Some(a.offset() + extra), 1.0).unwrap();
            let pat = AntennaPattern::raa_directional();
            let ra = raa_output(&a, &pat, theta);
            let rb = raa_output(&b, &pat, theta);
            for (x, y) in ra.values.iter().zip(&rb.values) {
                prop_assert!((x.norm() - y.norm()).abs() < 1e-12);
            }
        }
    }
}
