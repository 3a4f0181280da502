//! Dense second-order cone programming.
//!
//! Problems are stated in the form
//!
//! ```text
//! minimize    pᵀu
//! subject to  s = f + Fᵀu ∈ K₁ × … × K_r
//! ```
//!
//! where each `Kⱼ` is either a second-order cone `SOC(k) = {(t, x) : t ≥ ‖x‖₂}`
//! or the zero cone `{0}ᵏ`. The associated dual is
//!
//! ```text
//! maximize    −fᵀz
//! subject to  F z = p,   z ∈ K*
//! ```
//!
//! with `K*` the product of second-order cones (self dual) and free blocks
//! for the zero cones.
//!
//! The coefficient matrix is stored as the `m × n` matrix [`ConeProgram::map`]
//! (that is `Fᵀ`), so that the slack is `offset + map · u`.

mod ipm;
mod kkt;
mod text;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub use ipm::solve;
pub use kkt::{check_kkt, KktReport};
pub use text::{dump, load, read_file, write_file};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// Second-order cone of the given dimension; the first coordinate bounds
    /// the Euclidean norm of the rest.
    Soc(usize),
    /// Equality to zero.
    Zero(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Soc(k) | Cone::Zero(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeProgram {
    /// `p`, length `n`.
    pub objective: DVector<f64>,
    /// `f`, length `m`.
    pub offset: DVector<f64>,
    /// `Fᵀ`, `m × n`.
    pub map: DMatrix<f64>,
    pub cones: Vec<Cone>,
}

impl ConeProgram {
    pub fn new(
        objective: DVector<f64>,
        offset: DVector<f64>,
        map: DMatrix<f64>,
        cones: Vec<Cone>,
    ) -> Result<Self> {
        let prog = Self {
            objective,
            offset,
            map,
            cones,
        };
        prog.validate()?;
        Ok(prog)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.offset.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let m = self.num_rows();
        if self.map.nrows() != m || self.map.ncols() != n {
            return Err(Error::Domain(format!(
                "map is {}×{}, expected {m}×{n}",
                self.map.nrows(),
                self.map.ncols()
            )));
        }
        let total: usize = self.cones.iter().map(Cone::dim).sum();
        if total != m {
            return Err(Error::Domain(format!(
                "cone dimensions sum to {total}, expected {m}"
            )));
        }
        if self.cones.iter().any(|c| c.dim() == 0) {
            return Err(Error::Domain("cones must have positive dimension".into()));
        }
        let finite = self.objective.iter().all(|v| v.is_finite())
            && self.offset.iter().all(|v| v.is_finite())
            && self.map.iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Domain("cone program data must be finite".into()));
        }
        Ok(())
    }

    /// `f + Fᵀu`.
    pub fn slack(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.offset + &self.map * u
    }

    /// Row ranges of each cone.
    pub fn blocks(&self) -> impl Iterator<Item = (Cone, std::ops::Range<usize>)> + '_ {
        let mut start = 0;
        self.cones.iter().map(move |&c| {
            let range = start..start + c.dim();
            start += c.dim();
            (c, range)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// A certificate of primal infeasibility was found.
    Infeasible,
    /// A certificate of dual infeasibility (unbounded objective) was found.
    Unbounded,
    /// Stopped without meeting the tolerances.
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct ConeSolution {
    pub u: DVector<f64>,
    /// Dual variable `z`, one entry per row of the program.
    pub z: DVector<f64>,
    pub status: SolveStatus,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub duality_gap: f64,
    pub iterations: usize,
}

impl ConeSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    pub fn objective(&self, prog: &ConeProgram) -> f64 {
        prog.objective.dot(&self.u)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    /// Relative tolerance on residuals and duality gap.
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the step to the cone boundary actually taken.
    pub step_fraction: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
            step_fraction: 0.99,
        }
    }
}
