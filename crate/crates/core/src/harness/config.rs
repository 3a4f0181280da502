//! Experiment configuration, stored as TOML with dotted section names.
//!
//! ```toml
//! experiment = "sinr-vs-snapshots"
//! scenario = "table4"
//! algorithms = ["wc-ccm", "wc-cmv", "loaded-smi", "optimal"]
//! trials = 50
//! snapshots = 2000
//! seed = 1
//! snr_db = 0.0
//!
//! [wc]
//! epsilon = 2.1
//!
//! [mcg]
//! eta = 0.25
//!
//! [mismatch]
//! angle_std_deg = 2.0
//! ```
//!
//! Every key is optional; missing keys take the defaults listed on the
//! field docs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::array_sim::{ArrayGeometry, MismatchModel, Scenario, Segment, SIGNAL_POWER};
use crate::mcg::McgParams;
use crate::wc::{convexity_check, WcParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SinrVsSnapshots,
    SinrVsSnr,
    SinrVsEpsilon,
    GammaSweep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SinrVsSnapshots => "sinr-vs-snapshots",
            Self::SinrVsSnr => "sinr-vs-snr",
            Self::SinrVsEpsilon => "sinr-vs-epsilon",
            Self::GammaSweep => "gamma-sweep",
        }
    }

    pub fn x_label(self) -> &'static str {
        match self {
            Self::SinrVsSnapshots => "snapshots",
            Self::SinrVsSnr => "SNR (dB)",
            Self::SinrVsEpsilon => "epsilon",
            Self::GammaSweep => "gamma",
        }
    }

    pub fn is_sweep(self) -> bool {
        self != Self::SinrVsSnapshots
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioId {
    Table4,
    Table5,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    WcCcm,
    WcCmv,
    RcmvMcg,
    RccmMcg,
    LoadedSmi,
    Optimal,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Self::WcCcm,
        Self::WcCmv,
        Self::RcmvMcg,
        Self::RccmMcg,
        Self::LoadedSmi,
        Self::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::WcCcm => "wc-ccm",
            Self::WcCmv => "wc-cmv",
            Self::RcmvMcg => "rcmv-mcg",
            Self::RccmMcg => "rccm-mcg",
            Self::LoadedSmi => "loaded-smi",
            Self::Optimal => "optimal",
        }
    }

    pub fn is_worst_case(self) -> bool {
        matches!(self, Self::WcCcm | Self::WcCmv)
    }

    pub fn is_mcg(self) -> bool {
        matches!(self, Self::RcmvMcg | Self::RccmMcg)
    }
}

/// Worst-case SOCP parameters; `σ_n²` follows from the SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WcSection {
    /// 2.1
    pub epsilon: f64,
    /// 1.0
    pub delta: f64,
    /// 1.0
    pub gamma: f64,
    /// 0.995
    pub mu: f64,
}

impl Default for WcSection {
    fn default() -> Self {
        Self {
            epsilon: 2.1,
            delta: 1.0,
            gamma: 1.0,
            mu: 0.995,
        }
    }
}

impl WcSection {
    pub fn params(&self, sigma_n2: f64) -> WcParams {
        WcParams {
            epsilon: self.epsilon,
            delta: self.delta,
            gamma: self.gamma,
            mu: self.mu,
            sigma_n2,
        }
    }
}

/// Parameters shared by both MCG variants plus the two multiplier step sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McgSection {
    /// 2.1
    pub epsilon_tilde: f64,
    /// 1.0
    pub delta: f64,
    /// 1.0
    pub gamma: f64,
    /// 0.995
    pub mu: f64,
    /// 0.25
    pub eta: f64,
    /// 800
    pub mu_lambda_cmv: f64,
    /// 100
    pub mu_lambda_ccm: f64,
    /// 200
    pub delta_lambda_max: f64,
    /// 1.0
    pub lambda_0: f64,
}

impl Default for McgSection {
    fn default() -> Self {
        let d = McgParams::cmv_default();
        Self {
            epsilon_tilde: d.epsilon_tilde,
            delta: d.delta,
            gamma: d.gamma,
            mu: d.mu,
            eta: d.eta,
            mu_lambda_cmv: d.mu_lambda,
            mu_lambda_ccm: McgParams::ccm_default().mu_lambda,
            delta_lambda_max: d.delta_lambda_max,
            lambda_0: d.lambda_0,
        }
    }
}

impl McgSection {
    fn params(&self, mu_lambda: f64) -> McgParams {
        McgParams {
            epsilon_tilde: self.epsilon_tilde,
            delta: self.delta,
            gamma: self.gamma,
            mu: self.mu,
            eta: self.eta,
            mu_lambda,
            delta_lambda_max: self.delta_lambda_max,
            lambda_0: self.lambda_0,
        }
    }

    pub fn cmv_params(&self) -> McgParams {
        self.params(self.mu_lambda_cmv)
    }

    pub fn ccm_params(&self) -> McgParams {
        self.params(self.mu_lambda_ccm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomScenario {
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `sinr-vs-snapshots`
    pub experiment: ExperimentKind,
    /// `table4`
    pub scenario: ScenarioId,
    /// `wc-ccm, wc-cmv, loaded-smi, optimal`
    pub algorithms: Vec<Algorithm>,
    /// 50
    pub trials: usize,
    /// Snapshots per trial, 2000.
    pub snapshots: usize,
    /// 1
    pub seed: u64,
    /// 10
    pub sensors: usize,
    /// Presumed direction of the desired user, 93°.
    pub desired_doa_deg: f64,
    /// Per-element SNR, 0 dB; overridden by an SNR sweep.
    pub snr_db: f64,
    /// Sweep values (SNR, ε or γ); ignored for `sinr-vs-snapshots`.
    pub sweep: Vec<f64>,
    /// Snapshot spacing of SINR evaluations, 25.
    pub eval_every: usize,
    /// Fraction of the run averaged by `gamma-sweep`, 0.2.
    pub steady_state_fraction: f64,
    pub wc: WcSection,
    pub mcg: McgSection,
    pub mismatch: MismatchModel,
    /// Schedule for `scenario = "custom"`.
    pub custom: Option<CustomScenario>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::SinrVsSnapshots,
            scenario: ScenarioId::Table4,
            algorithms: vec![
                Algorithm::WcCcm,
                Algorithm::WcCmv,
                Algorithm::LoadedSmi,
                Algorithm::Optimal,
            ],
            trials: 50,
            snapshots: 2000,
            seed: 1,
            sensors: 10,
            desired_doa_deg: 93.0,
            snr_db: 0.0,
            sweep: Vec::new(),
            eval_every: 25,
            steady_state_fraction: 0.2,
            wc: WcSection::default(),
            mcg: McgSection::default(),
            mismatch: MismatchModel::default(),
            custom: None,
        }
    }
}

/// One point of the x axis, with the parameters it overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub x_value: f64,
    pub snr_db: f64,
    pub wc: WcSection,
    pub mcg: McgSection,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn geometry(&self) -> Result<ArrayGeometry> {
        ArrayGeometry::new(self.sensors).map_err(|e| Error::Config(e.to_string()))
    }

    /// The interference schedule at the given SNR.
    pub fn build_scenario(&self, snr_db: f64) -> Result<Scenario> {
        let g = self.geometry()?;
        let mut scenario = match self.scenario {
            ScenarioId::Table4 => Scenario::table4(g, self.snapshots, snr_db),
            ScenarioId::Table5 => Scenario::table5(g, self.snapshots, snr_db),
            ScenarioId::Custom => {
                let custom = self
                    .custom
                    .as_ref()
                    .ok_or_else(|| Error::Config("scenario = \"custom\" needs a [custom] section".into()))?;
                Scenario {
                    geometry: g,
                    segments: custom.segments.clone(),
                    snr_db,
                    mismatch: self.mismatch,
                    seed: self.seed,
                }
            }
        };
        if self.scenario != ScenarioId::Custom {
            for seg in &mut scenario.segments {
                for src in seg.sources.iter_mut().filter(|s| s.is_desired) {
                    src.doa_deg = self.desired_doa_deg;
                }
            }
        }
        scenario.mismatch = self.mismatch;
        scenario.seed = self.seed;
        Ok(scenario)
    }

    /// The x-axis points of a sweep, or the single operating point of a
    /// `sinr-vs-snapshots` run.
    pub fn sweep_points(&self) -> Vec<SweepPoint> {
        let base = SweepPoint {
            x_value: 0.0,
            snr_db: self.snr_db,
            wc: self.wc,
            mcg: self.mcg,
        };
        if !self.experiment.is_sweep() {
            return vec![base];
        }
        self.sweep
            .iter()
            .map(|&x| {
                let mut p = SweepPoint { x_value: x, ..base };
                match self.experiment {
                    ExperimentKind::SinrVsSnr => p.snr_db = x,
                    ExperimentKind::SinrVsEpsilon => {
                        p.wc.epsilon = x;
                        p.mcg.epsilon_tilde = x;
                    }
                    ExperimentKind::GammaSweep => {
                        p.wc.gamma = x;
                        p.mcg.gamma = x;
                    }
                    ExperimentKind::SinrVsSnapshots => {}
                }
                p
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.snapshots == 0 {
            return bad("snapshots must be at least 1".into());
        }
        if self.eval_every == 0 {
            return bad("eval_every must be at least 1".into());
        }
        if !(self.steady_state_fraction > 0.0 && self.steady_state_fraction <= 1.0) {
            return bad("steady_state_fraction must lie in (0, 1]".into());
        }
        if self.algorithms.is_empty() {
            return bad("at least one algorithm is required".into());
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return bad("algorithms must not repeat".into());
        }
        if self.experiment.is_sweep() && self.sweep.is_empty() {
            return bad(format!("{} needs sweep values", self.experiment.name()));
        }
        if self.sweep.iter().any(|v| !v.is_finite()) {
            return bad("sweep values must be finite".into());
        }
        let m = self.sensors;
        for point in self.sweep_points() {
            let scenario = self.build_scenario(point.snr_db)?;
            scenario.validate().map_err(|e| Error::Config(e.to_string()))?;
            let wrap = |e: Error| Error::Config(format!("x = {}: {e}", point.x_value));
            if self.algorithms.iter().any(|a| a.is_worst_case()) {
                point.wc.params(scenario.noise_power()).validate(m).map_err(wrap)?;
            }
            if self.algorithms.contains(&Algorithm::RcmvMcg) {
                point.mcg.cmv_params().validate(m).map_err(wrap)?;
            }
            if self.algorithms.contains(&Algorithm::RccmMcg) {
                point.mcg.ccm_params().validate(m).map_err(wrap)?;
            }
        }
        Ok(())
    }

    /// Non-fatal advisories, currently the CCM convexity condition.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let ccm = self.algorithms.iter().any(|a| matches!(a, Algorithm::WcCcm | Algorithm::RccmMcg));
        if !ccm {
            return out;
        }
        for point in self.sweep_points() {
            for (name, gamma, delta) in [
                ("wc", point.wc.gamma, point.wc.delta),
                ("mcg", point.mcg.gamma, point.mcg.delta),
            ] {
                let check = convexity_check(gamma, delta, SIGNAL_POWER);
                if !check.satisfied {
                    out.push(format!(
                        "{name}: γ = {gamma} exceeds δ·σ_s² = {} (convexity margin {})",
                        delta * SIGNAL_POWER,
                        check.margin
                    ));
                }
            }
        }
        out.dedup();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_the_reference_settings() {
        let c = ExperimentConfig::default();
        assert_eq!(c.sensors, 10);
        assert_eq!(c.wc, WcSection { epsilon: 2.1, delta: 1.0, gamma: 1.0, mu: 0.995 });
        let cmv = c.mcg.cmv_params();
        let ccm = c.mcg.ccm_params();
        assert_eq!((cmv.mu_lambda, ccm.mu_lambda, cmv.delta_lambda_max), (800.0, 100.0, 200.0));
        assert_eq!(cmv.epsilon_tilde, 2.1);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn empty_document_is_the_default() {
        assert_eq!(ExperimentConfig::from_toml_str("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = ExperimentConfig::default();
        c.experiment = ExperimentKind::GammaSweep;
        c.scenario = ScenarioId::Table5;
        c.sweep = vec![0.2, 0.5, 1.0];
        c.algorithms = vec![Algorithm::RccmMcg, Algorithm::Optimal];
        c.mcg.eta = 0.1;
        c.mismatch.angle_std_deg = 1.0;
        let text = c.to_toml_string().unwrap();
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn custom_scenario_round_trips() {
        let text = r#"
scenario = "custom"
snapshots = 100
algorithms = ["optimal"]

[[custom.segments]]
start = 1
end = 100
sources = [
  { doa_deg = 93.0, power_db_rel = 0.0, is_desired = true },
  { doa_deg = 120.0, power_db_rel = 10.0, is_desired = false },
]
"#;
        let c = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(c.custom.as_ref().unwrap().segments[0].sources.len(), 2);
        let back = ExperimentConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_configurations() {
        for text in [
            "trials = 0",
            "algorithms = []",
            "algorithms = [\"wc-ccm\", \"wc-ccm\"]",
            "experiment = \"gamma-sweep\"",
            "unknown_key = 1",
            "[wc]\nepsilon = 3.3",
            "[mcg]\neta = 0.7\n",
            "scenario = \"custom\"",
            "algorithms = [\"sideways\"]",
        ] {
            let text = if text.starts_with("[mcg]") {
                format!("algorithms = [\"rcmv-mcg\"]\n{text}")
            } else {
                text.to_string()
            };
            assert!(
                matches!(ExperimentConfig::from_toml_str(&text), Err(Error::Config(_))),
                "accepted: {text}"
            );
        }
    }

    #[test]
    fn epsilon_sweep_is_checked_point_by_point() {
        let text = "experiment = \"sinr-vs-epsilon\"\nsweep = [2.1, 3.0]\n";
        assert!(ExperimentConfig::from_toml_str(text).is_ok());
        let text = "experiment = \"sinr-vs-epsilon\"\nsweep = [2.1, 3.2]\n";
        assert!(ExperimentConfig::from_toml_str(text).is_err());
    }

    #[test]
    fn convexity_advisory_for_large_gamma() {
        let mut c = ExperimentConfig::default();
        assert!(c.warnings().is_empty());
        c.experiment = ExperimentKind::GammaSweep;
        c.sweep = vec![0.5, 2.0];
        let w = c.warnings();
        assert!(!w.is_empty() && w.iter().all(|s| s.contains("γ = 2")));
    }
}
