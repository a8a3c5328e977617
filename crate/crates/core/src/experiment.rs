//! Experiment orchestration: runs (workload, algorithm, seed) cells,
//! measures competitive ratios against the exact oracle or a certified
//! lower bound, checks them against the explicit guarantee constants,
//! and renders CSV/JSON reports with stable bytes.

use std::f64::consts::E;
use std::fmt;
use std::path::PathBuf;

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clairvoyant::ClairvoyantPolicy;
use crate::engine::{run, EngineError};
use crate::generator::{generate, GenError, GeneratorParams};
use crate::model::Workload;
use crate::nonclairvoyant::NonClairvoyantPolicy;
use crate::oracle::{lower_bound, optimal_makespan, OracleError, DEFAULT_ORACLE_LIMIT};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("competitive ratio reference is zero")]
    ZeroReference,
    #[error("workload {id}: {source}")]
    Generate { id: String, source: GenError },
    #[error("workload {id}: {source}")]
    Run { id: String, source: EngineError },
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to parse workload file {path}: {source}")]
    ParseWorkload {
        path: PathBuf,
        source: serde_json::Error,
    },
}

/// `makespan / reference`, exact. The caller records whether the
/// reference is the true optimal or a lower bound; against a lower bound
/// the result only overestimates the true competitive ratio, so bound
/// checks stay conservative.
pub fn competitive_ratio(makespan: u64, reference: u64) -> Result<Rational64, ExperimentError> {
    if reference == 0 {
        return Err(ExperimentError::ZeroReference);
    }
    Ok(Rational64::new(makespan as i64, reference as i64))
}

/// `s / beta` as a float, shared by the guarantee constants.
fn s_over_beta(workload: &Workload) -> f64 {
    let beta = workload.global_beta();
    let ratio = Rational64::new(workload.resource_count() as i64, 1) / beta;
    ratio.to_f64().expect("s/beta fits in f64 at desk scale")
}

/// Competitive-ratio guarantee of the conflict-graph-aware policy:
/// `32 * l * sqrt(s / beta) + 1` where `l` is the duration group count.
pub fn clairvoyant_guarantee(workload: &Workload) -> f64 {
    32.0 * workload.duration_group_count() as f64 * s_over_beta(workload).sqrt() + 1.0
}

/// High-probability competitive-ratio guarantee of the randomized
/// policy: `512 * e * l * sqrt(s / beta) * ln(n) + 1`.
pub fn non_clairvoyant_guarantee(workload: &Workload) -> f64 {
    512.0
        * E
        * workload.duration_group_count() as f64
        * s_over_beta(workload).sqrt()
        * (workload.len() as f64).ln()
        + 1.0
}

/// High-probability per-transaction response-time guarantee of the
/// randomized policy: `16 * e * (degree + 1) * tau * ln(n)` steps from
/// issue to commit, where `degree` counts the transaction's conflicts
/// and `tau` bounds every duration.
pub fn response_time_guarantee(degree: usize, tau: u64, n: usize) -> f64 {
    16.0 * E * (degree as f64 + 1.0) * tau as f64 * (n as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    Clairvoyant,
    NonClairvoyant,
}

impl AlgorithmKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmKind::Clairvoyant => "clairvoyant",
            AlgorithmKind::NonClairvoyant => "non-clairvoyant",
        }
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

impl SeedRange {
    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.start..self.start + self.count
    }
}

/// Where a workload comes from: generated in place or loaded from a
/// workload JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WorkloadSource {
    Generate { id: String, params: GeneratorParams },
    File { id: String, path: PathBuf },
}

impl WorkloadSource {
    pub fn id(&self) -> &str {
        match self {
            WorkloadSource::Generate { id, .. } | WorkloadSource::File { id, .. } => id,
        }
    }

    pub fn load(&self) -> Result<Workload, ExperimentError> {
        match self {
            WorkloadSource::Generate { id, params } => {
                generate(params).map_err(|source| ExperimentError::Generate {
                    id: id.clone(),
                    source,
                })
            }
            WorkloadSource::File { path, .. } => {
                let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
                    path: path.clone(),
                    source,
                })?;
                Workload::from_json_str(&text).map_err(|source| ExperimentError::ParseWorkload {
                    path: path.clone(),
                    source,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub workloads: Vec<WorkloadSource>,
    pub algorithms: Vec<AlgorithmKind>,
    pub seeds: SeedRange,
    /// Largest instance handed to the exact optimal-makespan search;
    /// larger workloads fall back to lower-bound references.
    #[serde(default = "default_oracle_limit")]
    pub oracle_limit: usize,
}

fn default_oracle_limit() -> usize {
    DEFAULT_ORACLE_LIMIT
}

impl ExperimentConfig {
    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    /// Exact optimal makespan; the ratio is the true competitive ratio.
    Optimal,
    /// Certified lower bound; the ratio overestimates the truth.
    LowerBound,
}

impl ReferenceKind {
    fn as_str(&self) -> &'static str {
        match self {
            ReferenceKind::Optimal => "optimal",
            ReferenceKind::LowerBound => "lower-bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// The guarantee holds on every run.
    Deterministic,
    /// The guarantee holds with high probability over the seed.
    HighProbability,
}

impl BoundKind {
    fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Deterministic => "deterministic",
            BoundKind::HighProbability => "high-probability",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub workload: String,
    pub algo: AlgorithmKind,
    pub seed: u64,
    pub makespan: u64,
    pub lower_bound: u64,
    pub optimal: Option<u64>,
    pub reference_kind: ReferenceKind,
    pub ratio: f64,
    /// Guarantee constant the ratio is checked against.
    pub ratio_bound: f64,
    pub bound_kind: BoundKind,
    pub bound_satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub rows: usize,
    pub mean_ratio: f64,
    pub max_ratio: f64,
    pub bound_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    pub fn violations(&self) -> usize {
        self.aggregate.bound_violations
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Fixed column order; ratios carry six significant digits.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(
            "workload,algo,seed,makespan,lower_bound,optimal,reference_kind,ratio,ratio_bound,bound_kind,bound_satisfied\n",
        );
        for row in &self.rows {
            let optimal = row.optimal.map_or(String::new(), |v| v.to_string());
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                row.workload,
                row.algo,
                row.seed,
                row.makespan,
                row.lower_bound,
                optimal,
                row.reference_kind.as_str(),
                format_sig6(row.ratio),
                format_sig6(row.ratio_bound),
                row.bound_kind.as_str(),
                row.bound_satisfied,
            ));
        }
        out
    }
}

/// Formats with six significant digits.
fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = 5 - x.abs().log10().floor() as i64;
    format!("{:.*}", digits.max(0) as usize, x)
}

/// Executes every (workload, algorithm, seed) cell of the config and
/// assembles the report, rows sorted by (workload, algorithm, seed).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, ExperimentError> {
    let mut rows = Vec::new();
    for source in &config.workloads {
        let id = source.id().to_string();
        let workload = source.load()?;
        let bound_report = lower_bound(&workload);
        let optimal = match optimal_makespan(&workload, config.oracle_limit) {
            Ok(v) => Some(v),
            Err(OracleError::TooManyTransactions { .. }) => None,
            Err(_) => None,
        };
        let reference = optimal.map_or(bound_report.best, |o| o.max(bound_report.best));
        let reference_kind = if optimal.is_some() {
            ReferenceKind::Optimal
        } else {
            ReferenceKind::LowerBound
        };

        for &algo in &config.algorithms {
            let (ratio_bound, bound_kind) = match algo {
                AlgorithmKind::Clairvoyant => {
                    (clairvoyant_guarantee(&workload), BoundKind::Deterministic)
                }
                AlgorithmKind::NonClairvoyant => (
                    non_clairvoyant_guarantee(&workload),
                    BoundKind::HighProbability,
                ),
            };
            for seed in config.seeds.iter() {
                let trace = match algo {
                    AlgorithmKind::Clairvoyant => {
                        run(&workload, &mut ClairvoyantPolicy::new(&workload))
                    }
                    AlgorithmKind::NonClairvoyant => {
                        run(&workload, &mut NonClairvoyantPolicy::new(&workload, seed))
                    }
                }
                .map_err(|source| ExperimentError::Run {
                    id: id.clone(),
                    source,
                })?;
                let ratio = competitive_ratio(trace.makespan, reference)?
                    .to_f64()
                    .expect("ratio fits in f64");
                rows.push(ExperimentRow {
                    workload: id.clone(),
                    algo,
                    seed,
                    makespan: trace.makespan,
                    lower_bound: bound_report.best,
                    optimal,
                    reference_kind,
                    ratio,
                    ratio_bound,
                    bound_kind,
                    bound_satisfied: ratio <= ratio_bound,
                });
            }
        }
    }
    rows.sort_by(|a, b| {
        a.workload
            .cmp(&b.workload)
            .then(a.algo.as_str().cmp(b.algo.as_str()))
            .then(a.seed.cmp(&b.seed))
    });

    let count = rows.len();
    let mean_ratio = if count == 0 {
        0.0
    } else {
        rows.iter().map(|r| r.ratio).sum::<f64>() / count as f64
    };
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let bound_violations = rows.iter().filter(|r| !r.bound_satisfied).count();
    Ok(ExperimentReport {
        rows,
        aggregate: Aggregate {
            rows: count,
            mean_ratio,
            max_ratio,
            bound_violations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_with(params: GeneratorParams) -> ExperimentConfig {
        ExperimentConfig {
            workloads: vec![WorkloadSource::Generate {
                id: "w0".into(),
                params,
            }],
            algorithms: vec![AlgorithmKind::Clairvoyant, AlgorithmKind::NonClairvoyant],
            seeds: SeedRange { start: 0, count: 3 },
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }

    fn tiny_params() -> GeneratorParams {
        GeneratorParams {
            n: 1,
            resource_count: 1,
            beta_target: Rational64::from_integer(1),
            read_only_fraction: Rational64::from_integer(0),
            tau_min: 2,
            tau_max: 2,
            lambda_min: 1,
            lambda_max: 1,
            seed: 0,
        }
    }

    #[test]
    fn single_transaction_gives_ratio_one() {
        let report = run_experiment(&config_with(tiny_params())).unwrap();
        assert_eq!(report.rows.len(), 6);
        for row in &report.rows {
            assert_eq!(row.ratio, 1.0);
            assert_eq!(row.reference_kind, ReferenceKind::Optimal);
            assert!(row.bound_satisfied);
        }
        assert_eq!(report.violations(), 0);
    }

    #[test]
    fn competitive_ratio_examples() {
        assert_eq!(competitive_ratio(3, 3).unwrap(), Rational64::from_integer(1));
        assert_eq!(competitive_ratio(6, 3).unwrap(), Rational64::from_integer(2));
        assert!(matches!(
            competitive_ratio(1, 0),
            Err(ExperimentError::ZeroReference)
        ));
    }

    #[test]
    fn reports_are_byte_identical_across_reruns() {
        let params = GeneratorParams {
            n: 5,
            resource_count: 4,
            beta_target: Rational64::new(1, 2),
            read_only_fraction: Rational64::new(1, 4),
            tau_min: 1,
            tau_max: 3,
            lambda_min: 1,
            lambda_max: 3,
            seed: 11,
        };
        let config = config_with(params);
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        assert_eq!(a.to_json_string(), b.to_json_string());
    }

    #[test]
    fn oversized_workload_degrades_to_lower_bound_reference() {
        let params = GeneratorParams {
            n: 6,
            resource_count: 4,
            beta_target: Rational64::new(1, 2),
            read_only_fraction: Rational64::from_integer(0),
            tau_min: 1,
            tau_max: 2,
            lambda_min: 1,
            lambda_max: 2,
            seed: 3,
        };
        let mut config = config_with(params);
        config.oracle_limit = 4;
        let report = run_experiment(&config).unwrap();
        for row in &report.rows {
            assert_eq!(row.reference_kind, ReferenceKind::LowerBound);
            assert_eq!(row.optimal, None);
        }
    }

    #[test]
    fn csv_shape_is_stable() {
        let report = run_experiment(&config_with(tiny_params())).unwrap();
        let csv = report.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "workload,algo,seed,makespan,lower_bound,optimal,reference_kind,ratio,ratio_bound,bound_kind,bound_satisfied"
        );
        let first = lines.next().unwrap();
        assert!(first.starts_with("w0,clairvoyant,0,2,2,2,optimal,1.00000,"));
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(1.0), "1.00000");
        assert_eq!(format_sig6(182.34567), "182.346");
        assert_eq!(format_sig6(0.05), "0.0500000");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(0.0), "0");
    }

    #[test]
    fn config_json_round_trip() {
        let config = config_with(tiny_params());
        let json = serde_json::to_string_pretty(&config).unwrap();
        let back = ExperimentConfig::from_json_str(&json).unwrap();
        assert_eq!(config, back);
        // oracle_limit falls back to the default when omitted.
        let minimal = r#"{
            "workloads": [{"kind": "file", "id": "w", "path": "w.json"}],
            "algorithms": ["clairvoyant"],
            "seeds": {"start": 0, "count": 1}
        }"#;
        let parsed = ExperimentConfig::from_json_str(minimal).unwrap();
        assert_eq!(parsed.oracle_limit, DEFAULT_ORACLE_LIMIT);
    }
}
