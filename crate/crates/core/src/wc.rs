//! Worst-case robust beamformers solved as second-order cone programs.
//!
//! Both designs share the spherical-uncertainty constraint
//! `Re{wᴴa} − δ ≥ ε‖w‖₂`, `Im{wᴴa} = 0` and differ in the objective:
//!
//! * CMV minimises `wᴴR̂ₓₓw`;
//! * CCM minimises the locally approximated constant-modulus cost
//!   `wᴴR̂ₐw − 2γ Re{d̂ᴴw}` with `R̂ₐ = E{|y|²xxᴴ}` and `d̂ = E{y*x}`, where
//!   `y = wᴴ(i−1)x(i)`.
//!
//! With `u = [τ; Re w; Im w]` the CCM program is
//!
//! ```text
//! min τ  s.t.  [½ + τ/2 + γd̆ᵀw̆;  ½ − τ/2 − γd̆ᵀw̆;  R̆w̆] ∈ SOC(2M+2)
//!              [ăᵀw̆ − δ;  εw̆]                          ∈ SOC(2M+1)
//!              āᵀw̆                                    ∈ {0}
//! ```
//!
//! The first cone is a rotated quadratic epigraph: it holds exactly when
//! `τ ≥ ‖R̆w̆‖² − 2γd̆ᵀw̆`. The CMV program replaces it with
//! `[τ; R̆w̆] ∈ SOC(2M+1)`, i.e. `τ ≥ ‖R̆w̆‖`, which has the same minimiser.

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::estimators::{cholesky_upper, complexify, embed_real, RealEmbedding, WindowedEstimates};
use crate::linalg::{CMatrix, CVector};
use crate::socp::{self, Cone, ConeProgram, SolveStatus, SolverSettings};
use crate::{Error, Result};

/// Fraction of failed snapshots above which a run is aborted.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WcParams {
    /// Radius `ε` of the steering-vector uncertainty sphere.
    pub epsilon: f64,
    /// Distortionless level `δ`.
    pub delta: f64,
    /// Constant-modulus target `γ` (ignored by the CMV design).
    pub gamma: f64,
    /// Forgetting factor `μ`.
    pub mu: f64,
    /// Noise power used for `R̂(0) = σ_n² I`.
    pub sigma_n2: f64,
}

impl WcParams {
    pub fn validate(&self, m: usize) -> Result<()> {
        check_epsilon(self.epsilon, m)?;
        if !(self.delta > 0.0) {
            return Err(Error::Domain(format!("δ must be positive, got {}", self.delta)));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::Domain(format!("γ must be nonnegative, got {}", self.gamma)));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::Domain(format!("μ must lie in (0, 1), got {}", self.mu)));
        }
        if !(self.sigma_n2 > 0.0) {
            return Err(Error::Domain("σ_n² must be positive".into()));
        }
        Ok(())
    }
}

/// No `w` satisfies the worst-case constraint once `ε ≥ ‖a‖ = √M`.
fn check_epsilon(epsilon: f64, m: usize) -> Result<()> {
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("ε must be nonnegative, got {epsilon}")));
    }
    let limit = (m as f64).sqrt();
    if epsilon >= limit {
        return Err(Error::InfeasibleParameters(format!(
            "ε = {epsilon} is not below √M = {limit:.6}"
        )));
    }
    Ok(())
}

/// Appends the robust constraint rows `[ăᵀw̆ − δ; εw̆] ∈ SOC(2M+1)` and
/// `āᵀw̆ = 0` to rows starting at `row`.
fn robust_rows(
    emb: &RealEmbedding,
    epsilon: f64,
    delta: f64,
    offset: &mut DVector<f64>,
    map: &mut DMatrix<f64>,
    row: usize,
) {
    let n2 = emb.a_breve.len();
    offset[row] = -delta;
    for k in 0..n2 {
        map[(row, 1 + k)] = emb.a_breve[k];
        map[(row + 1 + k, 1 + k)] = epsilon;
        map[(row + 1 + n2, 1 + k)] = emb.a_bar[k];
    }
}

/// `min wᴴRw  s.t.  Re{wᴴa} − δ ≥ ε‖w‖, Im{wᴴa} = 0`.
pub fn build_wc_cmv(r_hat: &CMatrix, a: &CVector, epsilon: f64, delta: f64) -> Result<ConeProgram> {
    let m = a.len();
    check_epsilon(epsilon, m)?;
    let factor = cholesky_upper(r_hat)?;
    let emb = embed_real(&factor, &CVector::zeros(m), a)?;
    let n2 = 2 * m;
    let rows = 2 * n2 + 3;
    let mut offset = DVector::zeros(rows);
    let mut map = DMatrix::zeros(rows, n2 + 1);
    map[(0, 0)] = 1.0;
    map.view_mut((1, 1), (n2, n2)).copy_from(&emb.r_acr);
    robust_rows(&emb, epsilon, delta, &mut offset, &mut map, n2 + 1);
    let mut objective = DVector::zeros(n2 + 1);
    objective[0] = 1.0;
    ConeProgram::new(
        objective,
        offset,
        map,
        vec![Cone::Soc(n2 + 1), Cone::Soc(n2 + 1), Cone::Zero(1)],
    )
}

/// `min wᴴRₐw − 2γRe{dᴴw}  s.t.  Re{wᴴa} − δ ≥ ε‖w‖, Im{wᴴa} = 0`.
pub fn build_wc_ccm(
    ra_hat: &CMatrix,
    d_hat: &CVector,
    a: &CVector,
    epsilon: f64,
    delta: f64,
    gamma: f64,
) -> Result<ConeProgram> {
    let m = a.len();
    check_epsilon(epsilon, m)?;
    let factor = cholesky_upper(ra_hat)?;
    let emb = embed_real(&factor, d_hat, a)?;
    let n2 = 2 * m;
    let rows = 2 * n2 + 4;
    let mut offset = DVector::zeros(rows);
    let mut map = DMatrix::zeros(rows, n2 + 1);
    offset[0] = 0.5;
    offset[1] = 0.5;
    map[(0, 0)] = 0.5;
    map[(1, 0)] = -0.5;
    for k in 0..n2 {
        map[(0, 1 + k)] = gamma * emb.d_r[k];
        map[(1, 1 + k)] = -gamma * emb.d_r[k];
    }
    map.view_mut((2, 1), (n2, n2)).copy_from(&emb.r_acr);
    robust_rows(&emb, epsilon, delta, &mut offset, &mut map, n2 + 2);
    let mut objective = DVector::zeros(n2 + 1);
    objective[0] = 1.0;
    ConeProgram::new(
        objective,
        offset,
        map,
        vec![Cone::Soc(n2 + 2), Cone::Soc(n2 + 1), Cone::Zero(1)],
    )
}

/// `w = [u₂ … u_{M+1}] + j[u_{M+2} … u_{2M+1}]`.
pub fn weights_from_solution(u: &DVector<f64>) -> CVector {
    complexify(&u.as_slice()[1..])
}

/// Solves a worst-case program and returns the beamformer, or the solver
/// status when it did not reach optimality.
pub fn solve_weights(
    prog: &ConeProgram,
    settings: &SolverSettings,
) -> Result<std::result::Result<CVector, SolveStatus>> {
    let sol = socp::solve(prog, settings)?;
    Ok(match sol.status {
        SolveStatus::Optimal => Ok(weights_from_solution(&sol.u)),
        other => Err(other),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    MinimumVariance,
    ConstantModulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    /// The program was not solved; the previous weights were kept.
    Held,
}

/// Adaptive worst-case beamformer: one cone program per snapshot.
#[derive(Debug, Clone)]
pub struct WcState {
    pub criterion: Criterion,
    pub params: WcParams,
    pub presumed: CVector,
    pub w: CVector,
    pub est: WindowedEstimates,
    pub settings: SolverSettings,
    pub steps: usize,
    pub failures: usize,
    /// Where to write the cone program of failed snapshots, if anywhere.
    pub dump_dir: Option<PathBuf>,
}

impl WcState {
    /// `R̂(0) = σ_n² I`, `d̂(0) = 0`, `w(0) = a/M`.
    pub fn new(criterion: Criterion, presumed: CVector, params: WcParams) -> Result<Self> {
        let m = presumed.len();
        params.validate(m)?;
        let est = WindowedEstimates::new(m, params.sigma_n2, params.mu)?;
        let w = &presumed / Complex64::new(m as f64, 0.0);
        Ok(Self {
            criterion,
            params,
            presumed,
            w,
            est,
            settings: SolverSettings::default(),
            steps: 0,
            failures: 0,
            dump_dir: None,
        })
    }

    pub fn build_program(&self) -> Result<ConeProgram> {
        let p = &self.params;
        match self.criterion {
            Criterion::MinimumVariance => build_wc_cmv(&self.est.r_hat, &self.presumed, p.epsilon, p.delta),
            Criterion::ConstantModulus => {
                // common positive scale on R̂ₐ and d̂: same argmin, O(1) epigraph
                let m = self.presumed.len() as f64;
                let scale = self.est.r_hat.trace().re / m;
                let inv = Complex64::new(1.0 / scale, 0.0);
                build_wc_ccm(
                    &(&self.est.r_hat * inv),
                    &(&self.est.d_hat * inv),
                    &self.presumed,
                    p.epsilon,
                    p.delta,
                    p.gamma,
                )
            }
        }
    }

    /// Absorbs `x(i)` into the estimates, then re-solves for `w(i)`.
    pub fn step(&mut self, x: &CVector) -> Result<StepOutcome> {
        match self.criterion {
            Criterion::MinimumVariance => self.est.update_rxx(x),
            Criterion::ConstantModulus => {
                let y = self.w.dotc(x);
                self.est.update_ra_d(x, y);
            }
        }
        self.steps += 1;
        let solved = match self.build_program() {
            Ok(prog) => match socp::solve(&prog, &self.settings)? {
                sol if sol.status == SolveStatus::Optimal => Some(weights_from_solution(&sol.u)),
                _ => {
                    self.dump(&prog)?;
                    None
                }
            },
            Err(Error::Numerical(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(match solved {
            Some(w) => {
                self.w = w;
                StepOutcome::Accepted
            }
            None => {
                self.failures += 1;
                StepOutcome::Held
            }
        })
    }

    fn dump(&self, prog: &ConeProgram) -> Result<()> {
        if let Some(dir) = &self.dump_dir {
            std::fs::create_dir_all(dir)?;
            socp::write_file(prog, dir.join(format!("wc-step-{}.txt", self.steps)))?;
        }
        Ok(())
    }

    pub fn failure_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.failures as f64 / self.steps as f64
        }
    }

    pub fn exceeded_failure_budget(&self) -> bool {
        self.failure_rate() > MAX_FAILURE_RATE
    }

    /// `Re{wᴴa} − δ − ε‖w‖` and `Im{wᴴa}` for the current weights.
    pub fn constraint_slack(&self) -> (f64, f64) {
        let wa = self.w.dotc(&self.presumed);
        (
            wa.re - self.params.delta - self.params.epsilon * self.w.norm(),
            wa.im,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityCheck {
    pub satisfied: bool,
    /// `δσ_s² − γ`.
    pub margin: f64,
}

/// Sufficient condition `γ ≤ δ·σ_s²` for the CCM cost to be convex.
pub fn convexity_check(gamma: f64, delta: f64, sigma_s2: f64) -> ConvexityCheck {
    let margin = delta * sigma_s2 - gamma;
    ConvexityCheck {
        satisfied: margin >= 0.0,
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonReport {
    /// `c = aᴴw` in `w = c·a/M + b` with `b ⟂ a`.
    pub c: Complex64,
    /// `‖b‖²/|c|²`; `None` when `w` is (numerically) orthogonal to `a`.
    pub ratio: Option<f64>,
    /// `1/ε² − 1/M`.
    pub bound: f64,
    pub bound_satisfied: Option<bool>,
    /// `δ/(1 − ε/√M)`, the smallest `c` the constraint allows.
    pub amplification_floor: f64,
}

pub fn epsilon_ratio_diagnostic(
    w: &CVector,
    a: &CVector,
    epsilon: f64,
    delta: f64,
) -> Result<EpsilonReport> {
    let m = a.len();
    if w.len() != m {
        return Err(Error::Domain("w and a differ in length".into()));
    }
    let mf = m as f64;
    let c = a.dotc(w);
    let b = w - a * (c / mf);
    let ratio = (c.norm() > 1e-12 * w.norm().max(f64::MIN_POSITIVE)).then(|| b.norm_squared() / c.norm_sqr());
    let bound = if epsilon > 0.0 {
        1.0 / (epsilon * epsilon) - 1.0 / mf
    } else {
        f64::INFINITY
    };
    let floor = delta / (1.0 - epsilon / mf.sqrt());
    Ok(EpsilonReport {
        c,
        ratio,
        bound,
        bound_satisfied: ratio.map(|r| r <= bound),
        amplification_floor: floor,
    })
}
