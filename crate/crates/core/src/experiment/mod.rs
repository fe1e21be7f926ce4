//! Experiment runners: beam patterns, single-user SNR, multi-user sum rate
//! and hardware cost. Each run is a pure function of its configuration and
//! returns a [`ResultTable`] plus named CSV artifacts.
//!
//! Trial `t` draws its channel from stream `t` of the configured seed, and the
//! same realization is reused for both architectures, both element patterns
//! and every SNR point.

pub mod config;

use std::fmt::Write as _;

use num_complex::Complex64;

pub use config::{ExperimentConfig, ExperimentKind, PatternChoice, PatternParams};

use crate::channel::{
    effective_channel, generate_multi_user, generate_single_user, trial_rng, write_channel_rows,
    MultipathChannel, CHANNEL_CSV_HEADER,
};
use crate::cost::CostReport;
use crate::error::{RaaError, Result};
use crate::geometry::{HbfCodebook, RaaGeometry};
use crate::response::{angle_grid, beam_pattern_sweep, Architecture, ArrayModel, PatternKind};
use crate::selection::{
    exhaustive_selection, greedy_selection, select_rays_single_user, snr_single_user, sum_rate,
    LinkBudget, SelectionMethod, SelectionRecord, SelectionSet, SELECTION_CSV_HEADER,
};
use crate::stats::RunningStats;

pub const RESULT_CSV_HEADER: &str =
    "experiment,architecture,pattern,transmit_snr_db,metric,mean,std_err,trials,seed";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub architecture: Architecture,
    pub pattern: Option<PatternKind>,
    pub transmit_snr_db: Option<f64>,
    pub metric: String,
    pub mean: f64,
    pub std_err: f64,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn find(
        &self,
        architecture: Architecture,
        pattern: Option<PatternKind>,
        transmit_snr_db: Option<f64>,
        metric: &str,
    ) -> Option<&ResultRow> {
        self.rows.iter().find(|r| {
            r.architecture == architecture
                && r.pattern == pattern
                && r.transmit_snr_db == transmit_snr_db
                && r.metric == metric
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{RESULT_CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.experiment,
                r.architecture,
                r.pattern.map_or("", PatternKind::as_str),
                r.transmit_snr_db.map(|v| v.to_string()).unwrap_or_default(),
                r.metric,
                r.mean,
                r.std_err,
                r.trials,
                r.seed
            );
        }
        out
    }
}

/// A named secondary CSV, e.g. a beam sweep or a selection dump.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub table: ResultTable,
    pub artifacts: Vec<Artifact>,
}

impl ExperimentReport {
    /// Result table CSV with the resolved config as a comment header.
    pub fn table_csv(&self) -> String {
        format!("{}{}", self.config.header(), self.table.to_csv())
    }

    pub fn artifact_csv(&self, artifact: &Artifact) -> String {
        format!("{}{}", self.config.header(), artifact.csv)
    }

    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }
}

/// Runs whichever experiment the config names.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    match config.experiment {
        ExperimentKind::BeamPattern => run_beam_pattern(config),
        ExperimentKind::SingleUser => run_single_user(config),
        ExperimentKind::MultiUser => run_multi_user(config),
        ExperimentKind::Cost => run_cost(config),
    }
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.experiment != kind {
        return Err(RaaError::InvalidArgument(format!(
            "{} config passed to the {kind} runner",
            config.experiment
        )));
    }
    config.validate()
}

fn arrays<'a>(geom: &'a RaaGeometry, codebook: &'a HbfCodebook) -> [ArrayModel<'a>; 2] {
    [ArrayModel::Raa(geom), ArrayModel::Hbf(codebook)]
}

/// Beam sweeps of both architectures. Per-port columns are linear magnitudes.
pub fn run_beam_pattern(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::BeamPattern)?;
    let geom = config.geometry()?;
    let codebook = config.codebook()?;
    let grid = angle_grid(config.theta_min, config.theta_max, config.beam_points);
    let mut table = ResultTable::default();
    let mut artifacts = Vec::new();
    for kind in config.pattern.kinds() {
        for array in arrays(&geom, &codebook) {
            let arch = array.architecture();
            let pattern = config.patterns.pattern(kind, arch)?;
            let sweep = beam_pattern_sweep(array, &pattern, &grid)?;
            let boresight = 20.0 * array.response(&pattern, 0.0).max_magnitude().log10();
            let peak = sweep
                .rows
                .iter()
                .map(|r| r.max_magnitude_db())
                .fold(f64::NEG_INFINITY, f64::max);
            let floor = sweep
                .rows
                .iter()
                .filter(|r| r.in_coverage)
                .map(|r| r.max_magnitude_db())
                .fold(f64::INFINITY, f64::min);
            for (metric, value) in [
                ("boresight_max_magnitude_db", boresight),
                ("peak_max_magnitude_db", peak),
                ("min_max_magnitude_db", floor),
            ] {
                table.rows.push(ResultRow {
                    experiment: config.experiment,
                    architecture: arch,
                    pattern: Some(kind),
                    transmit_snr_db: None,
                    metric: metric.into(),
                    mean: value,
                    std_err: 0.0,
                    trials: 1,
                    seed: config.seed,
                });
            }
            artifacts.push(Artifact {
                name: format!("beam_{arch}_{kind}"),
                csv: sweep.to_csv(),
            });
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        table,
        artifacts,
    })
}

/// Per-cell accumulators indexed by (pattern, architecture, SNR point, slot).
struct Grid {
    cells: Vec<RunningStats>,
    patterns: usize,
    snrs: usize,
    slots: usize,
}

impl Grid {
    fn new(patterns: usize, snrs: usize, slots: usize) -> Self {
        Self {
            cells: vec![RunningStats::default(); patterns * 2 * snrs * slots],
            patterns,
            snrs,
            slots,
        }
    }

    fn at(&mut self, pattern: usize, arch: usize, snr: usize, slot: usize) -> &mut RunningStats {
        debug_assert!(pattern < self.patterns);
        &mut self.cells[((pattern * 2 + arch) * self.snrs + snr) * self.slots + slot]
    }
}

fn arch_index(arch: Architecture) -> usize {
    match arch {
        Architecture::Raa => 0,
        Architecture::Hbf => 1,
    }
}

fn dump_channels(out: &mut String, trial: usize, channels: &[MultipathChannel]) {
    write_channel_rows(out, &format!("{trial},"), channels);
}

/// Maximum single-user SNR with top-magnitude selection on both architectures.
/// The reported metric is the per-trial SNR in dB, averaged over trials.
pub fn run_single_user(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::SingleUser)?;
    let geom = config.geometry()?;
    let codebook = config.codebook()?;
    let scenario = config.scenario();
    let kinds = config.pattern.kinds();
    let budgets = budgets(config)?;
    let mut stats = Grid::new(kinds.len(), budgets.len(), 1);
    let mut channel_dump = format!("trial,{CHANNEL_CSV_HEADER}\n");

    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial as u64);
        let chan = generate_single_user(&scenario, &mut rng)?;
        if config.dump_channels {
            dump_channels(&mut channel_dump, trial, std::slice::from_ref(&chan));
        }
        for (pi, &kind) in kinds.iter().enumerate() {
            for array in arrays(&geom, &codebook) {
                let arch = array.architecture();
                let pattern = config.patterns.pattern(kind, arch)?;
                let h = effective_channel(array, &pattern, &chan);
                let selection = select_rays_single_user(&h, config.n_rf)?;
                for (si, budget) in budgets.iter().enumerate() {
                    let budget = budget.with_elements(array.elements_per_port())?;
                    let snr = snr_single_user(&h, &selection, &budget)?;
                    stats
                        .at(pi, arch_index(arch), si, 0)
                        .push(10.0 * snr.log10());
                }
            }
        }
    }

    let mut table = ResultTable::default();
    for (pi, &kind) in kinds.iter().enumerate() {
        for arch in [Architecture::Raa, Architecture::Hbf] {
            for (si, &snr_db) in config.snr_grid_db.iter().enumerate() {
                let s = *stats.at(pi, arch_index(arch), si, 0);
                table
                    .rows
                    .push(stat_row(config, arch, kind, snr_db, "snr_db", &s));
            }
        }
    }
    let mut artifacts = Vec::new();
    if config.dump_channels {
        artifacts.push(Artifact {
            name: "channels".into(),
            csv: channel_dump,
        });
    }
    Ok(ExperimentReport {
        config: config.clone(),
        table,
        artifacts,
    })
}

/// Transmit SNR points; the element count is filled in per architecture.
fn budgets(config: &ExperimentConfig) -> Result<Vec<LinkBudget>> {
    config
        .snr_grid_db
        .iter()
        .map(|&db| LinkBudget::from_db(db, 1))
        .collect()
}

impl LinkBudget {
    fn with_elements(&self, elements: usize) -> Result<LinkBudget> {
        LinkBudget::new(self.transmit_snr(), elements)
    }
}

fn stat_row(
    config: &ExperimentConfig,
    arch: Architecture,
    kind: PatternKind,
    snr_db: f64,
    metric: &str,
    s: &RunningStats,
) -> ResultRow {
    ResultRow {
        experiment: config.experiment,
        architecture: arch,
        pattern: Some(kind),
        transmit_snr_db: Some(snr_db),
        metric: metric.into(),
        mean: s.mean(),
        std_err: s.std_err(),
        trials: s.count(),
        seed: config.seed,
    }
}

/// Ports with the largest total channel power across users.
fn top_aggregate_power(channels: &[Vec<Complex64>], n_rf: usize) -> Result<SelectionSet> {
    let ports = channels.first().map_or(0, Vec::len);
    let aggregate: Vec<Complex64> = (0..ports)
        .map(|p| {
            let power: f64 = channels.iter().map(|h| h[p].norm_sqr()).sum();
            Complex64::new(power.sqrt(), 0.0)
        })
        .collect();
    select_rays_single_user(&aggregate, n_rf)
}

fn run_method(
    method: SelectionMethod,
    channels: &[Vec<Complex64>],
    config: &ExperimentConfig,
    budget: &LinkBudget,
) -> Result<(SelectionSet, f64, u128)> {
    match method {
        SelectionMethod::Greedy => {
            let g = greedy_selection(channels, config.n_rf, budget)?;
            let rate = g.rate();
            Ok((g.selection, rate, g.evaluations as u128))
        }
        SelectionMethod::Exhaustive => {
            let e = exhaustive_selection(channels, config.n_rf, budget, config.exhaustive_cap)?;
            Ok((e.selection, e.rate, e.candidates))
        }
        SelectionMethod::TopMagnitude => {
            let s = top_aggregate_power(channels, config.n_rf)?;
            let rate = sum_rate(&s, channels, budget)?;
            Ok((s, rate, 1))
        }
    }
}

/// Multi-user sum rates for every configured selection method. When both
/// greedy and exhaustive run, `greedy_gap` reports exhaustive minus greedy.
pub fn run_multi_user(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::MultiUser)?;
    let geom = config.geometry()?;
    let codebook = config.codebook()?;
    let scenario = config.scenario();
    let kinds = config.pattern.kinds();
    let budgets = budgets(config)?;
    let methods = &config.methods;
    let gap = methods.contains(&SelectionMethod::Greedy)
        && methods.contains(&SelectionMethod::Exhaustive);
    let slots = methods.len() + usize::from(gap);
    let mut stats = Grid::new(kinds.len(), budgets.len(), slots);
    let mut selections = format!("pattern,architecture,transmit_snr_db,{SELECTION_CSV_HEADER}\n");
    let mut channel_dump = format!("trial,{CHANNEL_CSV_HEADER}\n");

    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial as u64);
        let users = generate_multi_user(&scenario, &mut rng)?;
        if config.dump_channels {
            dump_channels(&mut channel_dump, trial, &users);
        }
        for (pi, &kind) in kinds.iter().enumerate() {
            for array in arrays(&geom, &codebook) {
                let arch = array.architecture();
                let pattern = config.patterns.pattern(kind, arch)?;
                let channels: Vec<Vec<Complex64>> = users
                    .iter()
                    .map(|u| effective_channel(array, &pattern, u))
                    .collect();
                for (si, budget) in budgets.iter().enumerate() {
                    let budget = budget.with_elements(array.elements_per_port())?;
                    let mut greedy_rate = None;
                    let mut exhaustive_rate = None;
                    for (mi, &method) in methods.iter().enumerate() {
                        let (selection, rate, evaluations) =
                            run_method(method, &channels, config, &budget)?;
                        stats.at(pi, arch_index(arch), si, mi).push(rate);
                        match method {
                            SelectionMethod::Greedy => greedy_rate = Some(rate),
                            SelectionMethod::Exhaustive => exhaustive_rate = Some(rate),
                            SelectionMethod::TopMagnitude => {}
                        }
                        SelectionRecord {
                            trial,
                            method,
                            selection,
                            rate,
                            evaluations,
                        }
                        .write_csv_row(
                            &mut selections,
                            &format!("{kind},{arch},{},", config.snr_grid_db[si]),
                        );
                    }
                    if let (Some(g), Some(e)) = (greedy_rate, exhaustive_rate) {
                        stats
                            .at(pi, arch_index(arch), si, methods.len())
                            .push(e - g);
                    }
                }
            }
        }
    }

    let mut table = ResultTable::default();
    for (pi, &kind) in kinds.iter().enumerate() {
        for arch in [Architecture::Raa, Architecture::Hbf] {
            for (si, &snr_db) in config.snr_grid_db.iter().enumerate() {
                for (mi, method) in methods.iter().enumerate() {
                    let s = *stats.at(pi, arch_index(arch), si, mi);
                    let metric = format!("sum_rate_{method}");
                    table
                        .rows
                        .push(stat_row(config, arch, kind, snr_db, &metric, &s));
                }
                if gap {
                    let s = *stats.at(pi, arch_index(arch), si, methods.len());
                    table
                        .rows
                        .push(stat_row(config, arch, kind, snr_db, "greedy_gap", &s));
                }
            }
        }
    }
    let mut artifacts = vec![Artifact {
        name: "selections".into(),
        csv: selections,
    }];
    if config.dump_channels {
        artifacts.push(Artifact {
            name: "channels".into(),
            csv: channel_dump,
        });
    }
    Ok(ExperimentReport {
        config: config.clone(),
        table,
        artifacts,
    })
}

/// Hardware cost of both architectures for the configured geometry.
pub fn run_cost(config: &ExperimentConfig) -> Result<ExperimentReport> {
    expect_kind(config, ExperimentKind::Cost)?;
    let geom = config.geometry()?;
    let report = CostReport::new(
        config.n_rf,
        geom.ray_count(),
        geom.elements_per_ray(),
        &config.prices,
    )?;
    let row = |arch, metric: &str, value| ResultRow {
        experiment: config.experiment,
        architecture: arch,
        pattern: None,
        transmit_snr_db: None,
        metric: metric.into(),
        mean: value,
        std_err: 0.0,
        trials: 1,
        seed: config.seed,
    };
    let table = ResultTable {
        rows: vec![
            row(Architecture::Raa, "cost", report.raa),
            row(Architecture::Hbf, "cost", report.hbf),
            row(
                Architecture::Raa,
                "ratio_to_hbf",
                report.ratio().unwrap_or(f64::NAN),
            ),
        ],
    };
    Ok(ExperimentReport {
        config: config.clone(),
        table,
        artifacts: vec![Artifact {
            name: "cost".into(),
            csv: report.to_csv(),
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::defaults(kind);
        cfg.trials = 4;
        cfg.snr_grid_db = vec![-10.0, 0.0, 10.0];
        cfg
    }

    #[test]
    fn runner_rejects_wrong_kind() {
        let cfg = small(ExperimentKind::Cost);
        assert!(run_single_user(&cfg).is_err());
        assert!(run_cost(&cfg).is_ok());
    }

    #[test]
    fn beam_pattern_single_point_grid() {
        let mut cfg = small(ExperimentKind::BeamPattern);
        cfg.beam_points = 1;
        cfg.theta_min = 0.0;
        cfg.theta_max = 0.0;
        let rep = run_beam_pattern(&cfg).unwrap();
        assert_eq!(rep.artifacts.len(), 4);
        for a in &rep.artifacts {
            let data: Vec<&str> = a.csv.lines().filter(|l| !l.starts_with('#')).collect();
            assert_eq!(data.len(), 2, "{}", a.name);
        }
    }

    #[test]
    fn beam_pattern_isotropic_boresight_parity() {
        let cfg = small(ExperimentKind::BeamPattern);
        let rep = run_beam_pattern(&cfg).unwrap();
        let iso = Some(PatternKind::Isotropic);
        let raa = rep
            .table
            .find(Architecture::Raa, iso, None, "boresight_max_magnitude_db")
            .unwrap();
        let hbf = rep
            .table
            .find(Architecture::Hbf, iso, None, "boresight_max_magnitude_db")
            .unwrap();
        assert!((raa.mean - hbf.mean).abs() < 1e-12);
        // 8 elements at -2.816 dB each: 20·log10(8) - 2.816 dB.
        assert!((raa.mean - (20.0 * 8f64.log10() - 2.816)).abs() < 1e-9);
    }

    #[test]
    fn single_user_snr_has_unit_slope() {
        let rep = run_single_user(&small(ExperimentKind::SingleUser)).unwrap();
        for kind in [PatternKind::Isotropic, PatternKind::Directional] {
            for arch in [Architecture::Raa, Architecture::Hbf] {
                let v: Vec<f64> = [-10.0, 0.0, 10.0]
                    .iter()
                    .map(|&s| {
                        rep.table
                            .find(arch, Some(kind), Some(s), "snr_db")
                            .unwrap()
                            .mean
                    })
                    .collect();
                assert!((v[1] - v[0] - 10.0).abs() < 1e-9);
                assert!((v[2] - v[1] - 10.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn multi_user_rows_and_selection_dump() {
        let mut cfg = small(ExperimentKind::MultiUser);
        cfg.trials = 2;
        cfg.elements_per_ray = 8;
        cfg.methods = vec![
            SelectionMethod::Greedy,
            SelectionMethod::Exhaustive,
            SelectionMethod::TopMagnitude,
        ];
        cfg.dump_channels = true;
        let rep = run_multi_user(&cfg).unwrap();
        // 2 patterns × 2 architectures × 3 SNRs × (3 methods + gap).
        assert_eq!(rep.table.rows.len(), 2 * 2 * 3 * 4);
        let dump = &rep.artifact("selections").unwrap().csv;
        assert_eq!(dump.lines().count(), 1 + 2 * 2 * 2 * 3 * 3);
        let channels = &rep.artifact("channels").unwrap().csv;
        assert_eq!(channels.lines().count(), 1 + 2 * 5 * 2);
        for row in rep.table.rows.iter().filter(|r| r.metric == "greedy_gap") {
            assert!(row.mean >= 0.0);
        }
    }

    #[test]
    fn multi_user_cap_error_surfaces() {
        let mut cfg = small(ExperimentKind::MultiUser);
        cfg.trials = 1;
        cfg.exhaustive_cap = 10;
        assert!(matches!(
            run_multi_user(&cfg),
            Err(RaaError::CapExceeded { .. })
        ));
    }

    #[test]
    fn cost_defaults_and_sweep() {
        let rep = run_cost(&small(ExperimentKind::Cost)).unwrap();
        let csv = &rep.artifact("cost").unwrap().csv;
        assert!(csv.contains("raa,1,25,16,7.00,0.0069"));
        assert!(csv.contains("hbf,1,16,16,1015.20,"));

        for m in 4..=64 {
            let mut cfg = small(ExperimentKind::Cost);
            cfg.elements_per_ray = m;
            cfg.eta_max = 0.5 * PI;
            let rep = run_cost(&cfg).unwrap();
            let ratio = rep
                .table
                .find(Architecture::Raa, None, None, "ratio_to_hbf")
                .unwrap();
            assert!(ratio.mean < 1.0, "M={m}");
        }
    }

    #[test]
    fn cost_with_free_parts_flags_ratio() {
        let mut cfg = small(ExperimentKind::Cost);
        cfg.prices = crate::cost::PriceList {
            switch: 0.0,
            antenna: 0.0,
            phase_shifter: 0.0,
        };
        let rep = run_cost(&cfg).unwrap();
        assert!(rep.artifact("cost").unwrap().csv.contains("undefined"));
        assert!(rep
            .table
            .find(Architecture::Raa, None, None, "ratio_to_hbf")
            .unwrap()
            .mean
            .is_nan());
    }

    #[test]
    fn reruns_are_identical() {
        let cfg = small(ExperimentKind::SingleUser);
        assert_eq!(
            run(&cfg).unwrap().table_csv(),
            run(&cfg).unwrap().table_csv()
        );
    }
}
