//! Uniform linear array signal model, steering-vector mismatch and SINR.
//!
//! Element `m` (zero based) of the steering vector towards `θ` is
//! `exp(j·π·m·cos θ)`: half-wavelength spacing, angles in degrees from the
//! array axis so that broadside is 90°.
//!
//! The desired user transmits unit-modulus symbols with i.i.d. uniform
//! phase, interferers are circular complex Gaussian and the sensor noise is
//! circular complex Gaussian with per-element variance `σ_n² = σ_s² / SNR`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{outer, quad_form, solve_hpd, CMatrix, CVector};
use crate::{Error, Result};

/// Half-wavelength uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    num_sensors: usize,
}

impl ArrayGeometry {
    pub fn new(num_sensors: usize) -> Result<Self> {
        if num_sensors < 2 {
            return Err(Error::Domain(format!(
                "array needs at least 2 sensors, got {num_sensors}"
            )));
        }
        Ok(Self { num_sensors })
    }

    pub fn num_sensors(&self) -> usize {
        self.num_sensors
    }

    /// Steering vector `a(θ)`; every entry has unit modulus so `‖a‖² = M`.
    pub fn steering_vector(&self, theta_deg: f64) -> Result<CVector> {
        if !(theta_deg > 0.0 && theta_deg < 180.0) {
            return Err(Error::Domain(format!(
                "direction of arrival {theta_deg}° outside (0°, 180°)"
            )));
        }
        Ok(self.steering_unchecked(theta_deg))
    }

    /// Like [`steering_vector`](Self::steering_vector) but accepts any angle.
    /// Scatterer angles drawn around an endfire look direction may leave
    /// (0°, 180°); the phase law is still well defined there.
    fn steering_unchecked(&self, theta_deg: f64) -> CVector {
        let phase = PI * theta_deg.to_radians().cos();
        CVector::from_fn(self.num_sensors, |m, _| {
            Complex64::from_polar(1.0, phase * m as f64)
        })
    }
}

/// One narrowband source. The desired user is constant modulus, every other
/// source is circular complex Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub doa_deg: f64,
    /// Power relative to the desired user, in dB.
    pub power_db_rel: f64,
    #[serde(default)]
    pub is_desired: bool,
}

impl SourceSpec {
    pub fn desired(doa_deg: f64) -> Self {
        Self {
            doa_deg,
            power_db_rel: 0.0,
            is_desired: true,
        }
    }

    pub fn interferer(doa_deg: f64, power_db_rel: f64) -> Self {
        Self {
            doa_deg,
            power_db_rel,
            is_desired: false,
        }
    }

    /// Linear power relative to the desired user.
    pub fn power(&self) -> f64 {
        10f64.powf(self.power_db_rel / 10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MismatchKind {
    None,
    LocalCoherentScattering,
}

/// Distribution of the scatterer angles around the presumed direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleDistribution {
    #[default]
    Gaussian,
    /// Uniform with the configured standard deviation (half-width `√3·std`).
    Uniform,
}

/// Local coherent scattering: `a₁ = a + Σₖ exp(jΦₖ)·a(θₖ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MismatchModel {
    pub kind: MismatchKind,
    pub num_paths: usize,
    pub angle_std_deg: f64,
    pub angle_distribution: AngleDistribution,
    pub resample_per_trial: bool,
}

impl Default for MismatchModel {
    fn default() -> Self {
        Self {
            kind: MismatchKind::LocalCoherentScattering,
            num_paths: 4,
            angle_std_deg: 2.0,
            angle_distribution: AngleDistribution::Gaussian,
            resample_per_trial: true,
        }
    }
}

impl MismatchModel {
    pub fn none() -> Self {
        Self {
            kind: MismatchKind::None,
            ..Self::default()
        }
    }

    /// Draws the actual desired steering vector for one trial.
    pub fn realize<R: Rng + ?Sized>(
        &self,
        geometry: &ArrayGeometry,
        presumed_doa_deg: f64,
        rng: &mut R,
    ) -> Result<CVector> {
        let presumed = geometry.steering_vector(presumed_doa_deg)?;
        if self.kind == MismatchKind::None || self.num_paths == 0 {
            return Ok(presumed);
        }
        let mut phases = Vec::with_capacity(self.num_paths);
        let mut angles = Vec::with_capacity(self.num_paths);
        for _ in 0..self.num_paths {
            phases.push(rng.random::<f64>() * 2.0 * PI);
            let offset = match self.angle_distribution {
                AngleDistribution::Gaussian => {
                    let normal = Normal::new(0.0, self.angle_std_deg)
                        .map_err(|e| Error::Domain(e.to_string()))?;
                    normal.sample(rng)
                }
                AngleDistribution::Uniform => {
                    let half = 3f64.sqrt() * self.angle_std_deg;
                    (rng.random::<f64>() * 2.0 - 1.0) * half
                }
            };
            angles.push(presumed_doa_deg + offset);
        }
        Ok(scattered_steering(geometry, &presumed, &phases, &angles))
    }
}

/// `a + Σₖ exp(jΦₖ)·a(θₖ)` for explicit path phases (radians) and angles (degrees).
pub fn scattered_steering(
    geometry: &ArrayGeometry,
    presumed: &CVector,
    phases: &[f64],
    angles_deg: &[f64],
) -> CVector {
    let mut actual = presumed.clone();
    for (&phi, &theta) in phases.iter().zip(angles_deg) {
        let path = geometry.steering_unchecked(theta);
        actual.axpy(Complex64::from_polar(1.0, phi), &path, Complex64::new(1.0, 0.0));
    }
    actual
}

/// A contiguous block of snapshots `start..=end` (one based) with a fixed
/// set of active sources.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub sources: Vec<SourceSpec>,
}

impl Segment {
    pub fn desired(&self) -> Option<&SourceSpec> {
        self.sources.iter().find(|s| s.is_desired)
    }

    pub fn interferers(&self) -> impl Iterator<Item = &SourceSpec> {
        self.sources.iter().filter(|s| !s.is_desired)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: ArrayGeometry,
    pub segments: Vec<Segment>,
    /// Per-element SNR of the desired user, `σ_s²/σ_n²` in dB.
    pub snr_db: f64,
    pub mismatch: MismatchModel,
    pub seed: u64,
}

/// Desired-user signal power; the desired user is unit modulus.
pub const SIGNAL_POWER: f64 = 1.0;

impl Scenario {
    /// Two-segment schedule with the same desired user at 93°, switching
    /// interferers at snapshot 1001.
    fn two_segment(
        geometry: ArrayGeometry,
        first: &[(f64, f64)],
        second: &[(f64, f64)],
        snapshots: usize,
        snr_db: f64,
    ) -> Self {
        let build = |list: &[(f64, f64)]| {
            let mut sources = vec![SourceSpec::desired(93.0)];
            sources.extend(list.iter().map(|&(p, doa)| SourceSpec::interferer(doa, p)));
            sources
        };
        let mut segments = vec![Segment {
            start: 1,
            end: snapshots.min(1000),
            sources: build(first),
        }];
        if snapshots > 1000 {
            segments.push(Segment {
                start: 1001,
                end: snapshots,
                sources: build(second),
            });
        }
        Self {
            geometry,
            segments,
            snr_db,
            mismatch: MismatchModel::default(),
            seed: 0,
        }
    }

    /// Interference schedule used for the worst-case SOCP experiments.
    pub fn table4(geometry: ArrayGeometry, snapshots: usize, snr_db: f64) -> Self {
        Self::two_segment(
            geometry,
            &[(13.0, 120.0), (1.0, 140.0), (22.0, 67.0), (10.0, 157.0)],
            &[(30.0, 120.0), (25.0, 170.0), (4.0, 104.0), (9.0, 68.0)],
            snapshots,
            snr_db,
        )
    }

    /// Interference schedule used for the low-complexity experiments.
    pub fn table5(geometry: ArrayGeometry, snapshots: usize, snr_db: f64) -> Self {
        Self::two_segment(
            geometry,
            &[(10.0, 120.0), (5.0, 140.0), (10.0, 150.0), (7.0, 105.0)],
            &[(30.0, 120.0), (34.0, 170.0), (6.0, 104.0), (9.0, 68.0)],
            snapshots,
            snr_db,
        )
    }

    pub fn num_snapshots(&self) -> usize {
        self.segments.last().map_or(0, |s| s.end)
    }

    pub fn noise_power(&self) -> f64 {
        SIGNAL_POWER / 10f64.powf(self.snr_db / 10.0)
    }

    /// Index of the segment active at snapshot `i` (one based).
    pub fn segment_index(&self, i: usize) -> Option<usize> {
        self.segments.iter().position(|s| s.start <= i && i <= s.end)
    }

    /// Presumed DoA of the desired user (taken from the first segment).
    pub fn desired_doa(&self) -> Result<f64> {
        self.segments
            .first()
            .and_then(|s| s.desired())
            .map(|s| s.doa_deg)
            .ok_or_else(|| Error::Config("scenario has no desired user".into()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Config("scenario has no segments".into()));
        }
        let mut next = 1;
        for (k, seg) in self.segments.iter().enumerate() {
            if seg.start != next || seg.end < seg.start {
                return Err(Error::Config(format!(
                    "segment {k} covers {}..={} but must start at {next} and be nonempty",
                    seg.start, seg.end
                )));
            }
            next = seg.end + 1;
            let desired: Vec<_> = seg.sources.iter().filter(|s| s.is_desired).collect();
            if desired.len() != 1 {
                return Err(Error::Config(format!(
                    "segment {k} must have exactly one desired source, found {}",
                    desired.len()
                )));
            }
            if desired[0].power_db_rel != 0.0 {
                return Err(Error::Config(format!(
                    "segment {k}: desired source power must be 0 dB"
                )));
            }
            for s in &seg.sources {
                if !(s.doa_deg > 0.0 && s.doa_deg < 180.0) {
                    return Err(Error::Config(format!(
                        "segment {k}: DoA {}° outside (0°, 180°)",
                        s.doa_deg
                    )));
                }
            }
        }
        let doa = self.desired_doa()?;
        if self
            .segments
            .iter()
            .any(|s| s.desired().map(|d| d.doa_deg) != Some(doa))
        {
            return Err(Error::Config(
                "desired user must keep the same DoA across segments".into(),
            ));
        }
        Ok(())
    }

    /// Actual steering vectors of every source, per segment. The desired user
    /// uses `desired_actual`; interferers are exactly on their nominal DoA.
    pub fn actual_steering(&self, desired_actual: &CVector) -> Result<Vec<Vec<CVector>>> {
        self.segments
            .iter()
            .map(|seg| {
                seg.sources
                    .iter()
                    .map(|s| {
                        if s.is_desired {
                            Ok(desired_actual.clone())
                        } else {
                            self.geometry.steering_vector(s.doa_deg)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Analytic covariance truth for every segment.
    pub fn truth(&self, desired_actual: &CVector) -> Result<Vec<SegmentTruth>> {
        let m = self.geometry.num_sensors();
        let noise = self.noise_power();
        self.segments
            .iter()
            .map(|seg| {
                let mut r_in = CMatrix::identity(m, m) * Complex64::new(noise, 0.0);
                for s in seg.interferers() {
                    let a = self.geometry.steering_vector(s.doa_deg)?;
                    r_in += outer(&a) * Complex64::new(s.power(), 0.0);
                }
                Ok(SegmentTruth {
                    desired: desired_actual.clone(),
                    signal_power: SIGNAL_POWER,
                    r_s: outer(desired_actual) * Complex64::new(SIGNAL_POWER, 0.0),
                    r_in,
                })
            })
            .collect()
    }
}

/// Analytic second-order statistics of one segment.
#[derive(Debug, Clone)]
pub struct SegmentTruth {
    pub desired: CVector,
    pub signal_power: f64,
    pub r_s: CMatrix,
    pub r_in: CMatrix,
}

impl SegmentTruth {
    pub fn sinr_db(&self, w: &CVector) -> Result<f64> {
        sinr_db(w, &self.r_s, &self.r_in)
    }

    pub fn optimal_sinr_db(&self) -> Result<f64> {
        optimal_sinr_db(&self.desired, self.signal_power, &self.r_in)
    }
}

/// One array observation `x(i)`; `index` is one based.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub index: usize,
    pub x: CVector,
}

/// Deterministic snapshot generator `x(i) = Σ a_d s_d(i) + n(i)`.
pub struct SnapshotStream<'a, R: Rng> {
    scenario: &'a Scenario,
    steering: Vec<Vec<CVector>>,
    noise_std: f64,
    next_index: usize,
    count: usize,
    rng: R,
}

impl<'a, R: Rng> SnapshotStream<'a, R> {
    /// `steering[k][d]` is the actual steering vector of source `d` in segment `k`.
    pub fn new(
        scenario: &'a Scenario,
        steering: Vec<Vec<CVector>>,
        count: usize,
        rng: R,
    ) -> Result<Self> {
        if steering.len() != scenario.segments.len() {
            return Err(Error::Domain("one steering list per segment required".into()));
        }
        let m = scenario.geometry.num_sensors();
        for (seg, list) in scenario.segments.iter().zip(&steering) {
            if list.len() != seg.sources.len() || list.iter().any(|a| a.len() != m) {
                return Err(Error::Domain(
                    "steering vectors do not match the segment sources".into(),
                ));
            }
        }
        Ok(Self {
            scenario,
            steering,
            noise_std: (scenario.noise_power() / 2.0).sqrt(),
            next_index: 1,
            count,
            rng,
        })
    }

    fn gaussian(&mut self, std: f64) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re * std, im * std)
    }
}

impl<R: Rng> Iterator for SnapshotStream<'_, R> {
    type Item = Snapshot;

    fn next(&mut self) -> Option<Snapshot> {
        if self.next_index > self.count {
            return None;
        }
        let i = self.next_index;
        self.next_index += 1;
        let m = self.scenario.geometry.num_sensors();
        // snapshots beyond the last segment keep the final segment active
        let k = self
            .scenario
            .segment_index(i)
            .unwrap_or(self.scenario.segments.len().saturating_sub(1));
        let mut x = CVector::zeros(m);
        if let Some(seg) = self.scenario.segments.get(k) {
            for d in 0..seg.sources.len() {
                let source = &seg.sources[d];
                let symbol = if source.is_desired {
                    let phase = self.rng.random::<f64>() * 2.0 * PI;
                    Complex64::from_polar(SIGNAL_POWER.sqrt(), phase)
                } else {
                    self.gaussian((source.power() / 2.0).sqrt())
                };
                x.axpy(symbol, &self.steering[k][d], Complex64::new(1.0, 0.0));
            }
        }
        for m_idx in 0..m {
            let n = self.gaussian(self.noise_std);
            x[m_idx] += n;
        }
        Some(Snapshot { index: i, x })
    }
}

/// `10·log₁₀(wᴴR_s w / wᴴR_{i+n} w)`.
pub fn sinr_db(w: &CVector, r_s: &CMatrix, r_in: &CMatrix) -> Result<f64> {
    if w.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err(Error::Domain("SINR of a zero beamformer is undefined".into()));
    }
    let signal = quad_form(w, r_s);
    let interference = quad_form(w, r_in);
    if interference <= 0.0 {
        return Err(Error::Numerical(
            "interference-plus-noise power is not positive".into(),
        ));
    }
    Ok(10.0 * (signal / interference).log10())
}

/// `10·log₁₀(σ_s² a₁ᴴ R_{i+n}⁻¹ a₁)`, the SINR of `w ∝ R_{i+n}⁻¹ a₁`.
pub fn optimal_sinr_db(a1: &CVector, sigma_s2: f64, r_in: &CMatrix) -> Result<f64> {
    let w = optimal_weights(a1, r_in)?;
    let value = sigma_s2 * a1.dotc(&w).re;
    if value <= 0.0 {
        return Err(Error::Numerical("optimal SINR is not positive".into()));
    }
    Ok(10.0 * value.log10())
}

/// `R_{i+n}⁻¹ a₁`.
pub fn optimal_weights(a1: &CVector, r_in: &CMatrix) -> Result<CVector> {
    solve_hpd(r_in, a1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn broadside_steering_is_all_ones() {
        let g = ArrayGeometry::new(4).unwrap();
        let a = g.steering_vector(90.0).unwrap();
        for v in a.iter() {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn sixty_degrees_gives_quarter_turn() {
        let g = ArrayGeometry::new(2).unwrap();
        let a = g.steering_vector(60.0).unwrap();
        assert!((a[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((a[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_norm_is_m() {
        let g = ArrayGeometry::new(10).unwrap();
        let a = g.steering_vector(93.0).unwrap();
        assert!((a.norm_squared() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_angle_is_rejected() {
        let g = ArrayGeometry::new(4).unwrap();
        assert!(g.steering_vector(0.0).is_err());
        assert!(g.steering_vector(180.0).is_err());
        assert!(g.steering_vector(-5.0).is_err());
        assert!(ArrayGeometry::new(1).is_err());
    }

    #[test]
    fn no_mismatch_returns_presumed() {
        let g = ArrayGeometry::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a1 = MismatchModel::none().realize(&g, 93.0, &mut rng).unwrap();
        assert_eq!(a1, g.steering_vector(93.0).unwrap());
    }

    #[test]
    fn degenerate_scattering_is_coherent_sum() {
        let g = ArrayGeometry::new(6).unwrap();
        let a = g.steering_vector(93.0).unwrap();
        let a1 = scattered_steering(&g, &a, &[0.0; 4], &[93.0; 4]);
        let expected = &a * c(5.0, 0.0);
        assert!((a1 - expected).norm() < 1e-12);
    }

    #[test]
    fn scattering_is_reproducible_per_seed() {
        let g = ArrayGeometry::new(10).unwrap();
        let model = MismatchModel::default();
        let a = g.steering_vector(93.0).unwrap();
        let first = model
            .realize(&g, 93.0, &mut ChaCha8Rng::seed_from_u64(11))
            .unwrap();
        let second = model
            .realize(&g, 93.0, &mut ChaCha8Rng::seed_from_u64(11))
            .unwrap();
        assert!((&first - &a).norm() > 0.0);
        assert_eq!(first, second);
    }

    #[test]
    fn table4_first_segment_matches_schedule() {
        let g = ArrayGeometry::new(10).unwrap();
        let s = Scenario::table4(g, 2000, 0.0);
        s.validate().unwrap();
        let seg = &s.segments[0];
        let powers: Vec<f64> = seg.sources.iter().map(|s| s.power_db_rel).collect();
        let doas: Vec<f64> = seg.sources.iter().map(|s| s.doa_deg).collect();
        assert_eq!(powers, vec![0.0, 13.0, 1.0, 22.0, 10.0]);
        assert_eq!(doas, vec![93.0, 120.0, 140.0, 67.0, 157.0]);
        assert_eq!((s.segments[1].start, s.segments[1].end), (1001, 2000));
    }

    #[test]
    fn validation_rejects_gaps_and_missing_desired() {
        let g = ArrayGeometry::new(4).unwrap();
        let mut s = Scenario::table5(g, 2000, 0.0);
        s.segments[1].start = 1002;
        assert!(s.validate().is_err());
        let mut s = Scenario::table5(g, 2000, 0.0);
        s.segments[0].sources[0].is_desired = false;
        assert!(s.validate().is_err());
    }

    #[test]
    fn noiseless_desired_user_has_constant_output_modulus() {
        let g = ArrayGeometry::new(8).unwrap();
        let s = Scenario {
            geometry: g,
            segments: vec![Segment {
                start: 1,
                end: 50,
                sources: vec![SourceSpec::desired(93.0)],
            }],
            snr_db: f64::INFINITY,
            mismatch: MismatchModel::none(),
            seed: 0,
        };
        s.validate().unwrap();
        assert_eq!(s.noise_power(), 0.0);
        let a1 = g.steering_vector(93.0).unwrap();
        let steering = s.actual_steering(&a1).unwrap();
        let w = &a1 / c(8.0, 0.0);
        let stream = SnapshotStream::new(&s, steering, 50, ChaCha8Rng::seed_from_u64(1)).unwrap();
        for snap in stream {
            let y = w.dotc(&snap.x);
            assert!((y.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_covariance_converges_to_scaled_identity() {
        let g = ArrayGeometry::new(4).unwrap();
        let s = Scenario {
            geometry: g,
            segments: vec![Segment {
                start: 1,
                end: 100_000,
                sources: vec![],
            }],
            snr_db: 0.0,
            mismatch: MismatchModel::none(),
            seed: 0,
        };
        let stream = SnapshotStream::new(&s, vec![vec![]], 100_000, ChaCha8Rng::seed_from_u64(9))
            .unwrap();
        let mut r = CMatrix::zeros(4, 4);
        let mut n = 0.0;
        for snap in stream {
            r += outer(&snap.x);
            n += 1.0;
        }
        r /= c(n, 0.0);
        let err = (&r - CMatrix::identity(4, 4)).norm() / CMatrix::identity(4, 4).norm();
        assert!(err < 0.05, "relative Frobenius error {err}");
    }

    #[test]
    fn identical_seeds_give_identical_streams() {
        let g = ArrayGeometry::new(5).unwrap();
        let s = Scenario::table4(g, 30, 10.0);
        let a1 = g.steering_vector(93.0).unwrap();
        let run = |seed| {
            let st = s.actual_steering(&a1).unwrap();
            SnapshotStream::new(&s, st, 30, ChaCha8Rng::seed_from_u64(seed))
                .unwrap()
                .map(|s| s.x)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }

    #[test]
    fn sinr_of_matched_filter_in_white_noise() {
        let g = ArrayGeometry::new(10).unwrap();
        let a = g.steering_vector(93.0).unwrap();
        let r_s = outer(&a);
        let r_in = CMatrix::identity(10, 10);
        let v = sinr_db(&a, &r_s, &r_in).unwrap();
        assert!((v - 10.0).abs() < 1e-12);
        let scaled = &a * c(0.0, 7.0);
        assert!((sinr_db(&scaled, &r_s, &r_in).unwrap() - v).abs() < 1e-12);
        assert!((optimal_sinr_db(&a, 1.0, &r_in).unwrap() - 10.0).abs() < 1e-12);
        assert!(sinr_db(&CVector::zeros(10), &r_s, &r_in).is_err());
    }

    #[test]
    fn sinr_matches_explicit_quadratic_forms_for_two_sources() {
        let g = ArrayGeometry::new(6).unwrap();
        let a = g.steering_vector(93.0).unwrap();
        let b = g.steering_vector(120.0).unwrap();
        let r_s = outer(&a);
        let r_in = outer(&b) * c(10.0, 0.0) + CMatrix::identity(6, 6) * c(0.5, 0.0);
        let w = CVector::from_fn(6, |k, _| c(1.0 + k as f64 * 0.3, -0.2 * k as f64));
        // explicit element sums
        let mut num = c(0.0, 0.0);
        let mut den = c(0.0, 0.0);
        for i in 0..6 {
            for j in 0..6 {
                num += w[i].conj() * r_s[(i, j)] * w[j];
                den += w[i].conj() * r_in[(i, j)] * w[j];
            }
        }
        let expected = 10.0 * (num.re / den.re).log10();
        assert!((sinr_db(&w, &r_s, &r_in).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn optimal_sinr_equals_sinr_of_optimal_weights() {
        let g = ArrayGeometry::new(10).unwrap();
        let s = Scenario::table4(g, 1000, 0.0);
        let a1 = g.steering_vector(93.0).unwrap();
        let truth = &s.truth(&a1).unwrap()[0];
        let w = optimal_weights(&a1, &truth.r_in).unwrap();
        let direct = truth.sinr_db(&w).unwrap();
        let opt = truth.optimal_sinr_db().unwrap();
        assert!((direct - opt).abs() < 1e-9);
        // any other beamformer does no better
        assert!(truth.sinr_db(&a1).unwrap() <= opt + 1e-12);
    }
}
