use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig, ExperimentKind, SweepPoint};
use crate::array_sim::{Scenario, SegmentTruth, SnapshotStream};
use crate::linalg::{identity, solve_hpd};
use crate::mcg::McgState;
use crate::wc::{Criterion, WcState};
use crate::{CMatrix, CVector, Complex64, Error, Result};

/// Diagonal loading of the loaded-SMI baseline, in units of `σ_n²`.
pub const SMI_LOADING: f64 = 10.0;

/// `(R̂ + 10σ_n²I)⁻¹a` with `R̂` the sample covariance of `batch`.
pub fn loaded_smi(batch: &[CVector], a: &CVector, sigma_n2: f64) -> Result<CVector> {
    if batch.is_empty() {
        return Err(Error::Domain("loaded-SMI needs at least one snapshot".into()));
    }
    let mut smi = LoadedSmi::new(a.clone(), sigma_n2)?;
    for x in batch {
        smi.push(x);
    }
    smi.weights()
}

/// Running form of [`loaded_smi`].
#[derive(Debug, Clone)]
pub struct LoadedSmi {
    presumed: CVector,
    loading: f64,
    sum: CMatrix,
    count: usize,
}

impl LoadedSmi {
    pub fn new(presumed: CVector, sigma_n2: f64) -> Result<Self> {
        if !(sigma_n2 > 0.0 && sigma_n2.is_finite()) {
            return Err(Error::Domain(format!("noise power must be positive, got {sigma_n2}")));
        }
        let m = presumed.len();
        Ok(Self {
            presumed,
            loading: SMI_LOADING * sigma_n2,
            sum: CMatrix::zeros(m, m),
            count: 0,
        })
    }

    pub fn push(&mut self, x: &CVector) {
        self.sum.gerc(Complex64::new(1.0, 0.0), x, x, Complex64::new(1.0, 0.0));
        self.count += 1;
    }

    pub fn weights(&self) -> Result<CVector> {
        let m = self.presumed.len();
        let scale = if self.count == 0 { 0.0 } else { 1.0 / self.count as f64 };
        let r = self.sum.map(|v| v * scale) + identity(m) * Complex64::new(self.loading, 0.0);
        solve_hpd(&r, &self.presumed)
    }
}

enum Runner {
    Wc(Box<WcState>),
    Mcg(Box<McgState>),
    Smi(LoadedSmi),
    Optimal,
}

impl Runner {
    fn new(alg: Algorithm, presumed: &CVector, point: &SweepPoint, sigma_n2: f64) -> Result<Self> {
        let wc = point.wc.params(sigma_n2);
        Ok(match alg {
            Algorithm::WcCcm => Self::Wc(Box::new(WcState::new(Criterion::ConstantModulus, presumed.clone(), wc)?)),
            Algorithm::WcCmv => Self::Wc(Box::new(WcState::new(Criterion::MinimumVariance, presumed.clone(), wc)?)),
            Algorithm::RcmvMcg => Self::Mcg(Box::new(McgState::new_cmv(presumed.clone(), point.mcg.cmv_params())?)),
            Algorithm::RccmMcg => Self::Mcg(Box::new(McgState::new_ccm(presumed.clone(), point.mcg.ccm_params())?)),
            Algorithm::LoadedSmi => Self::Smi(LoadedSmi::new(presumed.clone(), sigma_n2)?),
            Algorithm::Optimal => Self::Optimal,
        })
    }

    fn step(&mut self, x: &CVector) -> Result<()> {
        match self {
            Self::Wc(s) => {
                s.step(x)?;
            }
            Self::Mcg(s) => s.step(x),
            Self::Smi(s) => s.push(x),
            Self::Optimal => {}
        }
        Ok(())
    }

    fn aborted(&self) -> bool {
        matches!(self, Self::Wc(s) if s.exceeded_failure_budget())
    }

    fn sinr_db(&self, truth: &SegmentTruth) -> Result<f64> {
        match self {
            Self::Wc(s) => truth.sinr_db(&s.w),
            Self::Mcg(s) => truth.sinr_db(&s.w),
            Self::Smi(s) => truth.sinr_db(&s.weights()?),
            Self::Optimal => truth.optimal_sinr_db(),
        }
    }
}

/// SINR samples of one trial, `values[alg][k]` at the `k`-th evaluation index.
struct TrialOutcome {
    values: Vec<Vec<f64>>,
    aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub algorithm: String,
    pub x_value: f64,
    pub sinr_db_mean: f64,
    pub sinr_db_std: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbortedTrial {
    pub x_value: f64,
    pub trial: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub aborted: Vec<AbortedTrial>,
    pub warnings: Vec<String>,
}

/// Snapshot indices at which SINR is recorded.
fn eval_indices(cfg: &ExperimentConfig) -> Vec<usize> {
    let n = cfg.snapshots;
    match cfg.experiment {
        ExperimentKind::SinrVsSnapshots => {
            let mut v: Vec<usize> = (1..=n).filter(|i| i % cfg.eval_every == 0).collect();
            if v.last() != Some(&n) {
                v.push(n);
            }
            v
        }
        ExperimentKind::GammaSweep => {
            let keep = ((n as f64 * cfg.steady_state_fraction).ceil() as usize).max(1);
            ((n + 1 - keep)..=n).collect()
        }
        ExperimentKind::SinrVsSnr | ExperimentKind::SinrVsEpsilon => vec![n],
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    scenario: &Scenario,
    point: &SweepPoint,
    trial: usize,
    evals: &[usize],
) -> Result<TrialOutcome> {
    let g = scenario.geometry;
    let presumed_doa = scenario.desired_doa()?;
    let presumed = g.steering_vector(presumed_doa)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ trial as u64);
    let actual = if scenario.mismatch.resample_per_trial {
        scenario.mismatch.realize(&g, presumed_doa, &mut rng)?
    } else {
        let mut fixed = ChaCha8Rng::seed_from_u64(cfg.seed);
        scenario.mismatch.realize(&g, presumed_doa, &mut fixed)?
    };
    let truth = scenario.truth(&actual)?;
    let steering = scenario.actual_steering(&actual)?;
    let sigma_n2 = scenario.noise_power();
    let mut runners = cfg
        .algorithms
        .iter()
        .map(|&alg| Runner::new(alg, &presumed, point, sigma_n2))
        .collect::<Result<Vec<_>>>()?;
    let mut values = vec![Vec::with_capacity(evals.len()); runners.len()];
    let mut next_eval = 0;
    let last_segment = truth.len().saturating_sub(1);
    for snap in SnapshotStream::new(scenario, steering, cfg.snapshots, rng)? {
        for r in &mut runners {
            r.step(&snap.x)?;
        }
        if next_eval < evals.len() && evals[next_eval] == snap.index {
            next_eval += 1;
            let k = scenario.segment_index(snap.index).unwrap_or(last_segment);
            for (r, out) in runners.iter().zip(&mut values) {
                out.push(r.sinr_db(&truth[k])?);
            }
        }
    }
    let aborted = cfg
        .algorithms
        .iter()
        .zip(&runners)
        .find(|(_, r)| r.aborted())
        .map(|(alg, _)| format!("{} exceeded the solver failure budget", alg.name()));
    Ok(TrialOutcome { values, aborted })
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every trial at every sweep point. Trial `t` draws all of its
/// randomness from a generator seeded with `seed ^ t`, so results do not
/// depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let evals = eval_indices(cfg);
    let mut rows = Vec::new();
    let mut aborted = Vec::new();
    for point in cfg.sweep_points() {
        let scenario = cfg.build_scenario(point.snr_db)?;
        let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &scenario, &point, t, &evals))
            .collect();
        let mut kept = Vec::with_capacity(cfg.trials);
        for (t, outcome) in outcomes.into_iter().enumerate() {
            let reason = match outcome {
                Ok(TrialOutcome { aborted: None, values }) => {
                    kept.push(values);
                    continue;
                }
                Ok(TrialOutcome { aborted: Some(reason), .. }) => reason,
                Err(e @ (Error::Numerical(_) | Error::Domain(_))) => e.to_string(),
                Err(e) => return Err(e),
            };
            aborted.push(AbortedTrial { x_value: point.x_value, trial: t, reason });
        }
        if kept.is_empty() {
            continue;
        }
        for (a, alg) in cfg.algorithms.iter().enumerate() {
            let mut push = |x_value: f64, samples: Vec<f64>| {
                let (mean, std) = mean_std(&samples);
                rows.push(ResultRow {
                    experiment: cfg.experiment.name().to_string(),
                    algorithm: alg.name().to_string(),
                    x_value,
                    sinr_db_mean: mean,
                    sinr_db_std: std,
                    trials: samples.len(),
                });
            };
            match cfg.experiment {
                ExperimentKind::SinrVsSnapshots => {
                    for (k, &i) in evals.iter().enumerate() {
                        push(i as f64, kept.iter().map(|v| v[a][k]).collect());
                    }
                }
                _ => {
                    let per_trial = kept
                        .iter()
                        .map(|v| v[a].iter().sum::<f64>() / v[a].len() as f64)
                        .collect();
                    push(point.x_value, per_trial);
                }
            }
        }
    }
    Ok(RunReport {
        rows,
        aborted,
        warnings: cfg.warnings(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_sim::{ArrayGeometry, MismatchModel};
    use crate::harness::config::ScenarioId;

    fn presumed(m: usize) -> CVector {
        ArrayGeometry::new(m).unwrap().steering_vector(93.0).unwrap()
    }

    #[test]
    fn zero_batch_gives_scaled_steering_vector() {
        let a = presumed(6);
        let w = loaded_smi(&[CVector::zeros(6)], &a, 0.5).unwrap();
        assert!((w - a.map(|v| v / 5.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_covariance_gives_a_over_eleven() {
        let m = 4;
        let a = presumed(m);
        let batch: Vec<CVector> = (0..m)
            .map(|k| CVector::from_fn(m, |i, _| Complex64::new(if i == k { m as f64 } else { 0.0 }, 0.0).sqrt()))
            .collect();
        let w = loaded_smi(&batch, &a, 1.0).unwrap();
        assert!((w - a.map(|v| v / 11.0)).norm() < 1e-12);
    }

    #[test]
    fn sample_covariance_is_hermitian_outer_product() {
        let a = presumed(3);
        let x = CVector::from_vec(vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, -2.0),
            Complex64::new(0.5, 0.0),
        ]);
        let mut smi = LoadedSmi::new(a.clone(), 1.0).unwrap();
        smi.push(&x);
        let r = &x * x.adjoint() + identity(3) * Complex64::new(10.0, 0.0);
        let expected = r.lu().solve(&a).unwrap();
        assert!((smi.weights().unwrap() - expected).norm() < 1e-12);
    }

    #[test]
    fn empty_batch_is_rejected() {
        assert!(loaded_smi(&[], &presumed(3), 1.0).is_err());
    }

    #[test]
    fn evaluation_grid() {
        let mut c = ExperimentConfig { snapshots: 60, eval_every: 25, ..Default::default() };
        assert_eq!(eval_indices(&c), vec![25, 50, 60]);
        c.experiment = ExperimentKind::GammaSweep;
        c.steady_state_fraction = 0.1;
        assert_eq!(eval_indices(&c), vec![55, 56, 57, 58, 59, 60]);
        c.experiment = ExperimentKind::SinrVsSnr;
        assert_eq!(eval_indices(&c), vec![60]);
    }

    #[test]
    fn small_run_produces_bounded_rows() {
        let cfg = ExperimentConfig {
            scenario: ScenarioId::Table5,
            algorithms: vec![Algorithm::RcmvMcg, Algorithm::LoadedSmi, Algorithm::Optimal],
            trials: 3,
            snapshots: 100,
            mismatch: MismatchModel::none(),
            ..Default::default()
        };
        let report = run_experiment(&cfg).unwrap();
        assert!(report.aborted.is_empty());
        assert_eq!(report.rows.len(), 3 * 4);
        for chunk in report.rows.chunks(4).take(2) {
            for (row, opt) in chunk.iter().zip(&report.rows[8..]) {
                assert!(row.sinr_db_mean <= opt.sinr_db_mean + 1e-9);
                assert_eq!(row.trials, 3);
            }
        }
    }
}
