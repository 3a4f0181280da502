use nalgebra::DVector;

use super::{Cone, ConeProgram, ConeSolution};

/// Optimality residuals recomputed from the program data and the returned
/// primal/dual pair only.
///
/// Feasibility residuals are componentwise relative: each cone block (primal)
/// and each variable (dual) is measured against `1 + |data| + |F|·|iterate|`
/// restricted to that block or variable, and the worst one is reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    /// Worst cone violation of `f + Fᵀu` over the blocks.
    pub primal_residual: f64,
    /// Worst entry of `F z − p`, plus the dual-cone violation of `z`.
    pub dual_residual: f64,
    /// `|pᵀu + fᵀz|` relative to `1 + |pᵀu|`.
    pub duality_gap: f64,
    /// `|sᵀz|` over the second-order blocks, relative to `1 + |pᵀu|`.
    pub complementarity: f64,
}

impl KktReport {
    pub fn max(&self) -> f64 {
        self.primal_residual
            .max(self.dual_residual)
            .max(self.duality_gap)
            .max(self.complementarity)
    }
}

/// Distance-like violation of `v` from `SOC(k)`.
fn soc_violation(v: &[f64]) -> f64 {
    let tail = v[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    (tail - v[0]).max(0.0)
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

pub fn check_kkt(prog: &ConeProgram, sol: &ConeSolution) -> KktReport {
    residuals(prog, &sol.u, &sol.z)
}

pub(crate) fn residuals(prog: &ConeProgram, u: &DVector<f64>, z: &DVector<f64>) -> KktReport {
    let s = prog.slack(u);
    let abs_map = prog.map.abs();
    let mag_s = &abs_map * u.abs();
    let mag_z = abs_map.tr_mul(&z.abs());
    let mut primal: f64 = 0.0;
    let mut dual_cone: f64 = 0.0;
    let mut comp = 0.0;
    for (cone, range) in prog.blocks() {
        let sb = &s.as_slice()[range.clone()];
        let zb = &z.as_slice()[range.clone()];
        let scale = 1.0
            + norm(prog.offset.as_slice()[range.clone()].iter().copied())
            + norm(mag_s.as_slice()[range.clone()].iter().copied());
        match cone {
            Cone::Zero(_) => primal = primal.max(norm(sb.iter().copied()) / scale),
            Cone::Soc(_) => {
                primal = primal.max(soc_violation(sb) / scale);
                dual_cone = dual_cone.max(soc_violation(zb) / (1.0 + norm(zb.iter().copied())));
                comp += sb.iter().zip(zb).map(|(a, b)| a * b).sum::<f64>();
            }
        }
    }
    let stationarity = prog.map.tr_mul(z) - &prog.objective;
    let dual = (0..prog.num_vars())
        .map(|j| stationarity[j].abs() / (1.0 + prog.objective[j].abs() + mag_z[j]))
        .fold(0.0, f64::max);
    let pobj = prog.objective.dot(u);
    let dobj = -prog.offset.dot(z);
    let scale = 1.0 + pobj.abs();
    KktReport {
        primal_residual: primal,
        dual_residual: dual + dual_cone,
        duality_gap: (pobj - dobj).abs() / scale,
        complementarity: comp.abs() / scale,
    }
}
