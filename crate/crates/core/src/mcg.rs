//! Low-complexity robust beamformers: one modified conjugate-gradient
//! iteration per snapshot, alternated with a Lagrange multiplier update.
//!
//! The robust constraint is relaxed to `ε̃‖w‖² ≤ Re{wᴴa} − δ` and enters the
//! cost through `λ̂`. In steady state the CG vector tracks
//!
//! * CMV: `v = [R̂ₓₓ + ε̃λ̂I]⁻¹a`, `w = λ̂v/2`;
//! * CCM: `w = [R̂ₐ + ε̃λ̂I]⁻¹[γd̂ + λ̂a/2]`.
//!
//! Every step is O(M²) and allocation-free.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::estimators::WindowedEstimates;
use crate::linalg::CVector;
use crate::wc::Criterion;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McgParams {
    pub epsilon_tilde: f64,
    pub delta: f64,
    pub gamma: f64,
    pub mu: f64,
    pub eta: f64,
    pub mu_lambda: f64,
    pub delta_lambda_max: f64,
    pub lambda_0: f64,
}

impl McgParams {
    pub fn cmv_default() -> Self {
        Self {
            epsilon_tilde: 2.1,
            delta: 1.0,
            gamma: 1.0,
            mu: 0.995,
            eta: 0.25,
            mu_lambda: 800.0,
            delta_lambda_max: 200.0,
            lambda_0: 1.0,
        }
    }

    pub fn ccm_default() -> Self {
        Self {
            mu_lambda: 100.0,
            ..Self::cmv_default()
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let bound = epsilon_tilde_bound(m);
        if !(self.epsilon_tilde > 0.0) {
            return Err(Error::Domain("ε̃ must be positive".into()));
        }
        if self.epsilon_tilde > bound {
            return Err(Error::InfeasibleParameters(format!(
                "ε̃ = {} exceeds M/2 = {bound}",
                self.epsilon_tilde
            )));
        }
        if !(0.0..=0.5).contains(&self.eta) {
            return Err(Error::Domain(format!("η must lie in [0, 0.5], got {}", self.eta)));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::Domain(format!("μ must lie in (0, 1), got {}", self.mu)));
        }
        if !(self.delta > 0.0) {
            return Err(Error::Domain("δ must be positive".into()));
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::Domain("γ must be nonnegative".into()));
        }
        if !(self.mu_lambda > 0.0 && self.delta_lambda_max > 0.0 && self.lambda_0 > 0.0) {
            return Err(Error::Domain("μ_λ, δ_λmax and λ̂₀ must be positive".into()));
        }
        Ok(())
    }
}

/// Largest `ε̃` for which the relaxed constraint admits a solution.
pub fn epsilon_tilde_bound(m: usize) -> f64 {
    m as f64 / 2.0
}

/// `ε̃‖w‖² − Re{wᴴa} + δ`; positive when the constraint is violated.
pub fn constraint_violation(w: &CVector, a: &CVector, epsilon_tilde: f64, delta: f64) -> f64 {
    epsilon_tilde * w.norm_squared() - w.dotc(a).re + delta
}

/// One multiplier step, halved until it keeps `λ̂` positive and stays below
/// `δ_λmax`.
pub fn lambda_update(lambda_hat: f64, w: &CVector, a: &CVector, params: &McgParams) -> f64 {
    let mut step = params.mu_lambda * constraint_violation(w, a, params.epsilon_tilde, params.delta);
    if !step.is_finite() {
        return lambda_hat;
    }
    while step <= -lambda_hat || step >= params.delta_lambda_max {
        step /= 2.0;
    }
    lambda_hat + step
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub i: usize,
    pub lambda_hat: f64,
    pub alpha: f64,
    pub beta: Complex64,
    /// `Re{wᴴa} − δ − ε̃‖w‖²`.
    pub slack: f64,
}

pub fn trace_csv(records: &[TraceRecord]) -> String {
    let mut out = String::from("i,lambda_hat,alpha,beta_re,beta_im,slack\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.i, r.lambda_hat, r.alpha, r.beta.re, r.beta.im, r.slack
        );
    }
    out
}

#[derive(Debug, Clone)]
pub struct McgState {
    pub criterion: Criterion,
    pub params: McgParams,
    pub presumed: CVector,
    pub w: CVector,
    /// CG vector of the CMV variant (`w = λ̂v/2`); unused for CCM.
    pub v: CVector,
    pub p: CVector,
    pub g: CVector,
    /// `λ̂(i+1)`, the multiplier the next step will use.
    pub lambda_hat: f64,
    /// `λ̂(i)`.
    pub lambda_prev: f64,
    pub est: WindowedEstimates,
    pub steps: usize,
    pub last_alpha: f64,
    pub last_beta: Complex64,
    pub trace: Option<Vec<TraceRecord>>,
    p_r: CVector,
    g_prev: CVector,
}

impl McgState {
    /// `v(0) = 0`, `p(1) = g(0) = a`, `R̂(0) = δI`, `λ̂(0) = λ̂(1) = λ̂₀`.
    pub fn new_cmv(presumed: CVector, params: McgParams) -> Result<Self> {
        let m = presumed.len();
        Self::init(Criterion::MinimumVariance, presumed, params, CVector::zeros(m))
    }

    /// `w(0) = a/M`, `p(1) = g(0) = a`, `R̂ₐ(0) = δI`, `d̂(0) = 0`.
    pub fn new_ccm(presumed: CVector, params: McgParams) -> Result<Self> {
        let w = &presumed / Complex64::new(presumed.len() as f64, 0.0);
        Self::init(Criterion::ConstantModulus, presumed, params, w)
    }

    fn init(criterion: Criterion, presumed: CVector, params: McgParams, w: CVector) -> Result<Self> {
        let m = presumed.len();
        params.validate(m)?;
        Ok(Self {
            criterion,
            params,
            w,
            v: CVector::zeros(m),
            p: presumed.clone(),
            g: presumed.clone(),
            lambda_hat: params.lambda_0,
            lambda_prev: params.lambda_0,
            est: WindowedEstimates::new(m, params.delta, params.mu)?,
            steps: 0,
            last_alpha: 0.0,
            last_beta: Complex64::new(0.0, 0.0),
            trace: None,
            p_r: CVector::zeros(m),
            g_prev: CVector::zeros(m),
            presumed,
        })
    }

    /// Processes `x(i)`; the CCM output `y = wᴴ(i−1)x(i)` is formed here.
    pub fn step(&mut self, x: &CVector) {
        match self.criterion {
            Criterion::MinimumVariance => self.mcg_cmv_step(x),
            Criterion::ConstantModulus => {
                let y = self.w.dotc(x);
                self.mcg_ccm_step(x, y);
            }
        }
    }

    /// `p_R = [R̂ + λ̂ε̃I]p`, `ν` and `α`, shared by both variants.
    fn direction_terms(&mut self) -> (f64, f64) {
        let pm = &self.params;
        let lam = self.lambda_hat;
        let one = Complex64::new(1.0, 0.0);
        self.p_r.gemv(one, &self.est.r_hat, &self.p, Complex64::new(0.0, 0.0));
        self.p_r.axpy(Complex64::new(lam * pm.epsilon_tilde, 0.0), &self.p, one);
        let nu = (lam - pm.mu * self.lambda_prev) * pm.epsilon_tilde;
        let curvature = self.p.dotc(&self.p_r).re;
        let alpha = if curvature > 0.0 {
            (pm.mu - pm.eta) * self.p.dotc(&self.g).re / curvature
        } else {
            0.0
        };
        (nu, alpha)
    }

    /// Polak-Ribière `β` and `p(i+1) = g(i) + βp(i)`.
    fn update_direction(&mut self) {
        let denom = self.g_prev.norm_squared();
        let beta = if denom > 0.0 {
            (self.g.dotc(&self.g) - self.g_prev.dotc(&self.g)) / denom
        } else {
            Complex64::new(0.0, 0.0)
        };
        self.p.axpy(Complex64::new(1.0, 0.0), &self.g, beta);
        self.last_beta = beta;
    }

    fn finish(&mut self) {
        self.lambda_prev = self.lambda_hat;
        self.lambda_hat = lambda_update(self.lambda_hat, &self.w, &self.presumed, &self.params);
        self.steps += 1;
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRecord {
                i: self.steps,
                lambda_hat: self.lambda_prev,
                alpha: self.last_alpha,
                beta: self.last_beta,
                slack: -constraint_violation(&self.w, &self.presumed, self.params.epsilon_tilde, self.params.delta),
            });
        }
    }

    pub fn mcg_cmv_step(&mut self, x: &CVector) {
        let mu = self.params.mu;
        self.est.update_rxx(x);
        let (nu, alpha) = self.direction_terms();
        let c = |v: f64| Complex64::new(v, 0.0);
        // g(i) from v(i−1), before v moves
        let xv = x.dotc(&self.v);
        self.g_prev.copy_from(&self.g);
        self.g.scale_mut(mu);
        self.g.axpy(c(1.0 - mu), &self.presumed, c(1.0));
        self.g.axpy(c(-alpha), &self.p_r, c(1.0));
        self.g.axpy(-xv, x, c(1.0));
        self.g.axpy(c(-nu), &self.v, c(1.0));
        self.v.axpy(c(alpha), &self.p, c(1.0));
        self.update_direction();
        self.w.copy_from(&self.v);
        self.w.scale_mut(self.lambda_hat / 2.0);
        self.last_alpha = alpha;
        self.finish();
    }

    /// `y` must be `wᴴ(i−1)x(i)`.
    pub fn mcg_ccm_step(&mut self, x: &CVector, y: Complex64) {
        let pm = self.params;
        self.est.update_ra_d(x, y);
        let (nu, alpha) = self.direction_terms();
        let c = |v: f64| Complex64::new(v, 0.0);
        let xw = x.dotc(&self.w) * y.norm_sqr();
        self.g_prev.copy_from(&self.g);
        self.g.scale_mut(pm.mu);
        self.g.axpy(c(-alpha), &self.p_r, c(1.0));
        self.g.axpy(y.conj() * pm.gamma - xw, x, c(1.0));
        self.g.axpy(c(nu / (2.0 * pm.epsilon_tilde)), &self.presumed, c(1.0));
        self.g.axpy(c(-nu), &self.w, c(1.0));
        self.w.axpy(c(alpha), &self.p, c(1.0));
        self.update_direction();
        self.last_alpha = alpha;
        self.finish();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array_sim::ArrayGeometry;
    use crate::linalg::{solve_hpd, CMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn steering(m: usize) -> CVector {
        ArrayGeometry::new(m).unwrap().steering_vector(93.0).unwrap()
    }

    #[test]
    fn epsilon_tilde_limit() {
        assert_eq!(epsilon_tilde_bound(10), 5.0);
        let mut p = McgParams::cmv_default();
        assert!(p.validate(10).is_ok());
        p.epsilon_tilde = 6.0;
        assert!(matches!(p.validate(10), Err(Error::InfeasibleParameters(_))));
        p.epsilon_tilde = 2.1;
        p.eta = 0.6;
        assert!(p.validate(10).is_err());
    }

    #[test]
    fn lambda_unchanged_when_constraint_is_tight() {
        // ε̃|w|² − Re{wᴴa} + δ = 0 with w = 1, a = 3, ε̃ = 2, δ = 1
        let w = CVector::from_element(1, c(1.0, 0.0));
        let a = CVector::from_element(1, c(3.0, 0.0));
        let p = McgParams { epsilon_tilde: 2.0, ..McgParams::cmv_default() };
        assert_eq!(lambda_update(4.0, &w, &a, &p), 4.0);
    }

    #[test]
    fn lambda_step_is_capped_by_halving() {
        // violation 0.5: ε̃ = 1, w = 1, a = 1.5, δ = 1
        let w = CVector::from_element(1, c(1.0, 0.0));
        let a = CVector::from_element(1, c(1.5, 0.0));
        let p = McgParams { epsilon_tilde: 1.0, mu_lambda: 800.0, delta_lambda_max: 200.0, ..McgParams::cmv_default() };
        assert_eq!(lambda_update(10.0, &w, &a, &p), 110.0);
    }

    #[test]
    fn lambda_stays_positive_on_large_negative_step() {
        // violation −1/32 · 640 = −20 = −2λ̂ for λ̂ = 10
        let w = CVector::from_element(1, c(1.0, 0.0));
        let a = CVector::from_element(1, c(2.03125, 0.0));
        let p = McgParams { epsilon_tilde: 1.0, mu_lambda: 640.0, ..McgParams::cmv_default() };
        let next = lambda_update(10.0, &w, &a, &p);
        assert!(next > 0.0);
        assert!((next - 5.0).abs() < 1e-9);
    }

    #[test]
    fn nu_vanishes_for_constant_multiplier_and_unit_forgetting() {
        let (lam, mu, eps) = (3.0_f64, 1.0_f64, 2.1_f64);
        assert_eq!((lam - mu * lam) * eps, 0.0);
    }

    #[test]
    fn eta_equal_to_mu_freezes_cg_vector() {
        let a = steering(6);
        let p = McgParams { mu: 0.5, eta: 0.5, ..McgParams::cmv_default() };
        let mut st = McgState::new_cmv(a.clone(), p).unwrap();
        for k in 0..5 {
            st.step(&CVector::from_fn(6, |i, _| c((i + k) as f64, 1.0)));
            assert_eq!(st.last_alpha, 0.0);
            assert_eq!(st.v, CVector::zeros(6));
        }
        let mut st = McgState::new_ccm(a.clone(), McgParams { mu: 0.5, eta: 0.5, ..McgParams::ccm_default() }).unwrap();
        st.step(&CVector::from_fn(6, |i, _| c(i as f64, 1.0)));
        assert_eq!(st.w, &a / c(6.0, 0.0));
    }

    #[test]
    fn zero_input_ccm_gradient_drops_data_terms() {
        let a = steering(6);
        let params = McgParams { gamma: 0.0, ..McgParams::ccm_default() };
        let mut st = McgState::new_ccm(a.clone(), params).unwrap();
        let (g0, w0) = (st.g.clone(), st.w.clone());
        st.step(&CVector::zeros(6));
        let nu = (1.0 - params.mu) * params.lambda_0 * params.epsilon_tilde;
        let r = CMatrix::identity(6, 6) * c(params.mu * params.delta + params.lambda_0 * params.epsilon_tilde, 0.0);
        let p_r = &r * &a;
        let expected = &g0 * c(params.mu, 0.0) - &p_r * c(st.last_alpha, 0.0)
            + (&a / c(2.0 * params.epsilon_tilde, 0.0) - &w0) * c(nu, 0.0);
        assert!((&st.g - expected).norm() < 1e-12);
    }

    #[test]
    fn beta_is_zero_when_gradient_does_not_move() {
        let a = steering(6);
        let mut st = McgState::new_cmv(a.clone(), McgParams::cmv_default()).unwrap();
        st.g_prev.copy_from(&st.g);
        st.update_direction();
        assert_eq!(st.last_beta, c(0.0, 0.0));
        assert_eq!(st.p, a);
    }

    #[test]
    fn step_size_has_the_sign_of_the_gradient_projection() {
        let a = steering(6);
        let mut st = McgState::new_cmv(a, McgParams::cmv_default()).unwrap();
        for k in 0..200 {
            let x = CVector::from_fn(6, |i, _| c(((i * 7 + k * 3) % 11) as f64 - 5.0, ((i + k) % 5) as f64 - 2.0));
            let before = st.p.dotc(&st.g).re;
            st.step(&x);
            assert!(st.last_alpha * before >= 0.0);
            assert!(st.lambda_hat > 0.0);
        }
    }

    #[test]
    fn cmv_converges_to_regularised_solution_on_constant_statistics() {
        // deterministic cycling snapshots: the fixed point is the loaded solve
        let m = 6;
        let a = steering(m);
        let mut st = McgState::new_cmv(a.clone(), McgParams::cmv_default()).unwrap();
        let xs: Vec<CVector> = (0..4)
            .map(|k| CVector::from_fn(m, |i, _| c(((i + k) % 3) as f64 - 1.0, ((2 * i + k) % 4) as f64 * 0.5)))
            .collect();
        for i in 0..3000 {
            st.step(&xs[i % 4]);
        }
        let mut r = st.est.r_hat.clone();
        for k in 0..m {
            r[(k, k)] += c(st.params.epsilon_tilde * st.lambda_prev, 0.0);
        }
        let oracle = solve_hpd(&r, &a).unwrap();
        let err = (&st.v - &oracle).norm() / oracle.norm();
        assert!(err < 0.05, "relative error {err}");
    }

    #[test]
    fn trace_records_every_step() {
        let a = steering(6);
        let mut st = McgState::new_ccm(a, McgParams::ccm_default()).unwrap();
        st.trace = Some(Vec::new());
        for _ in 0..3 {
            st.step(&CVector::from_element(6, c(1.0, 0.0)));
        }
        let text = trace_csv(st.trace.as_ref().unwrap());
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("i,lambda_hat,alpha,beta_re,beta_im,slack\n1,"));
    }
}
