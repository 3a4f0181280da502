//! Homogeneous self-dual primal-dual interior-point method with
//! Nesterov-Todd scaling and a Mehrotra predictor-corrector step.
//!
//! Internally the program is rewritten as
//!
//! ```text
//! minimize cᵀx  s.t.  G x + s = h,  A x = b,  s ∈ K
//! ```
//!
//! with `c = p`, `G = −Fᵀ_K`, `h = f_K` for the second-order rows and
//! `A = Fᵀ_0`, `b = −f_0` for the zero-cone rows. The embedding variables
//! `τ, κ` give infeasibility certificates when `τ → 0`.
//!
//! Before solving, rows and columns are equilibrated (Ruiz scaling, one factor
//! per second-order block so cone membership is unchanged).

use nalgebra::{DMatrix, DVector};

use super::kkt::residuals;
use super::{Cone, ConeProgram, ConeSolution, SolveStatus, SolverSettings};
use crate::Result;

const STATIC_REG: f64 = 1e-10;
const REFINE_STEPS: usize = 3;
/// Refinement stops once the backward error is below this.
const REFINE_FLOOR: f64 = 1e-14;
const RUIZ_PASSES: usize = 10;

/// Second-order blocks of the `K` part, as `(start, dim)`.
type Blocks = Vec<(usize, usize)>;

struct Standard {
    c: DVector<f64>,
    g: DMatrix<f64>,
    h: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    blocks: Blocks,
    soc_rows: Vec<usize>,
    zero_rows: Vec<usize>,
    /// Row scaling, indexed by original row.
    row_scale: DVector<f64>,
    /// Column scaling: `u = col_scale ∘ x`.
    col_scale: DVector<f64>,
}

/// Row groups that must share one scale factor.
fn row_groups(prog: &ConeProgram) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    for (cone, range) in prog.blocks() {
        match cone {
            Cone::Soc(_) => groups.push(range),
            Cone::Zero(_) => groups.extend(range.map(|r| r..r + 1)),
        }
    }
    groups
}

fn equilibrate(prog: &ConeProgram) -> (DVector<f64>, DVector<f64>) {
    let (m, n) = (prog.num_rows(), prog.num_vars());
    let groups = row_groups(prog);
    let mut d = DVector::from_element(m, 1.0);
    let mut e = DVector::from_element(n, 1.0);
    let entry = |d: &DVector<f64>, e: &DVector<f64>, i: usize, j: usize| (d[i] * prog.map[(i, j)] * e[j]).abs();
    for _ in 0..RUIZ_PASSES {
        for g in &groups {
            let peak = g
                .clone()
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| entry(&d, &e, i, j))
                .fold(0.0, f64::max);
            if peak > 0.0 {
                let f = peak.sqrt();
                for i in g.clone() {
                    d[i] /= f;
                }
            }
        }
        for j in 0..n {
            let peak = (0..m).map(|i| entry(&d, &e, i, j)).fold(0.0, f64::max);
            if peak > 0.0 {
                e[j] /= peak.sqrt();
            }
        }
    }
    (d, e)
}

impl Standard {
    fn new(prog: &ConeProgram) -> Self {
        let (row_scale, col_scale) = equilibrate(prog);
        let scaled = |i: usize, j: usize| row_scale[i] * prog.map[(i, j)] * col_scale[j];
        let mut soc_rows = Vec::new();
        let mut zero_rows = Vec::new();
        let mut blocks = Vec::new();
        for (cone, range) in prog.blocks() {
            match cone {
                Cone::Soc(k) => {
                    blocks.push((soc_rows.len(), k));
                    soc_rows.extend(range);
                }
                Cone::Zero(_) => zero_rows.extend(range),
            }
        }
        let n = prog.num_vars();
        let g = DMatrix::from_fn(soc_rows.len(), n, |i, j| -scaled(soc_rows[i], j));
        let h = DVector::from_fn(soc_rows.len(), |i, _| row_scale[soc_rows[i]] * prog.offset[soc_rows[i]]);
        let a = DMatrix::from_fn(zero_rows.len(), n, |i, j| scaled(zero_rows[i], j));
        let b = DVector::from_fn(zero_rows.len(), |i, _| -row_scale[zero_rows[i]] * prog.offset[zero_rows[i]]);
        Self {
            c: prog.objective.component_mul(&col_scale),
            g,
            h,
            a,
            b,
            blocks,
            soc_rows,
            zero_rows,
            row_scale,
            col_scale,
        }
    }

    fn n(&self) -> usize {
        self.c.len()
    }

    fn p(&self) -> usize {
        self.b.len()
    }

    fn mk(&self) -> usize {
        self.h.len()
    }

    /// Maps internal `(x, y, z)` back to the original `(u, z)` pair.
    fn original(
        &self,
        m: usize,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        tau: f64,
    ) -> (DVector<f64>, DVector<f64>) {
        let u = x.component_mul(&self.col_scale) / tau;
        let mut zo = DVector::zeros(m);
        for (k, &row) in self.soc_rows.iter().enumerate() {
            zo[row] = self.row_scale[row] * z[k] / tau;
        }
        for (k, &row) in self.zero_rows.iter().enumerate() {
            zo[row] = -self.row_scale[row] * y[k] / tau;
        }
        (u, zo)
    }
}

fn slice<'a>(v: &'a DVector<f64>, (start, dim): (usize, usize)) -> &'a [f64] {
    &v.as_slice()[start..start + dim]
}

fn tail_norm(v: &[f64]) -> f64 {
    v[1..].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `t² − ‖x‖²` computed as a product for accuracy.
fn soc_det(v: &[f64]) -> f64 {
    let t = tail_norm(v);
    (v[0] - t) * (v[0] + t)
}

fn jordan_product(u: &DVector<f64>, v: &DVector<f64>, blocks: &Blocks) -> DVector<f64> {
    let mut out = DVector::zeros(u.len());
    for &(start, dim) in blocks {
        let ub = &u.as_slice()[start..start + dim];
        let vb = &v.as_slice()[start..start + dim];
        out[start] = ub.iter().zip(vb).map(|(a, b)| a * b).sum();
        for k in 1..dim {
            out[start + k] = ub[0] * vb[k] + vb[0] * ub[k];
        }
    }
    out
}

/// Solves `λ ∘ x = v` blockwise.
fn jordan_divide(lambda: &DVector<f64>, v: &DVector<f64>, blocks: &Blocks) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for &(start, dim) in blocks {
        let l = &lambda.as_slice()[start..start + dim];
        let vb = &v.as_slice()[start..start + dim];
        let det = soc_det(l);
        let cross: f64 = (1..dim).map(|k| l[k] * vb[k]).sum();
        let x0 = (l[0] * vb[0] - cross) / det;
        out[start] = x0;
        for k in 1..dim {
            out[start + k] = (vb[k] - x0 * l[k]) / l[0];
        }
    }
    out
}

fn identity_element(len: usize, blocks: &Blocks) -> DVector<f64> {
    let mut e = DVector::zeros(len);
    for &(start, _) in blocks {
        e[start] = 1.0;
    }
    e
}

/// Largest `α ≥ 0` (possibly infinite) with `u + α·du` in the cone product.
fn max_step(u: &DVector<f64>, du: &DVector<f64>, blocks: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for &blk in blocks {
        alpha = alpha.min(max_step_soc(slice(u, blk), slice(du, blk)));
    }
    alpha
}

fn max_step_soc(u: &[f64], d: &[f64]) -> f64 {
    let dot_tail: f64 = (1..u.len()).map(|k| u[k] * d[k]).sum();
    let qa = d[0] * d[0] - tail_norm(d).powi(2);
    let qb = 2.0 * (u[0] * d[0] - dot_tail);
    let qc = soc_det(u).max(0.0);
    if qc == 0.0 {
        return 0.0;
    }
    // smallest positive root of qa α² + qb α + qc
    let mut best = f64::INFINITY;
    if qa.abs() < 1e-300 {
        if qb < 0.0 {
            best = -qc / qb;
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * sq);
            for root in [q / qa, if q != 0.0 { qc / q } else { f64::INFINITY }] {
                if root > 0.0 {
                    best = best.min(root);
                }
            }
        }
    }
    // a one-dimensional cone is the half line
    if u.len() == 1 && d[0] < 0.0 {
        best = best.min(-u[0] / d[0]);
    }
    best
}

/// Nesterov-Todd scaling matrices, one symmetric block per cone, with
/// `W z = W⁻¹ s = λ`.
fn nt_scaling(s: &DVector<f64>, z: &DVector<f64>, blocks: &Blocks) -> Option<Vec<DMatrix<f64>>> {
    let mut out = Vec::with_capacity(blocks.len());
    for &blk in blocks {
        let sb = slice(s, blk);
        let zb = slice(z, blk);
        let sd = soc_det(sb);
        let zd = soc_det(zb);
        if !(sd > 0.0 && zd > 0.0 && sb[0] > 0.0 && zb[0] > 0.0) {
            return None;
        }
        let (ss, zs) = (sd.sqrt(), zd.sqrt());
        let dim = blk.1;
        let sbar: Vec<f64> = sb.iter().map(|v| v / ss).collect();
        let zbar: Vec<f64> = zb.iter().map(|v| v / zs).collect();
        let dot: f64 = sbar.iter().zip(&zbar).map(|(a, b)| a * b).sum();
        let gamma = ((1.0 + dot) / 2.0).sqrt();
        let mut wbar = vec![0.0; dim];
        wbar[0] = (sbar[0] + zbar[0]) / (2.0 * gamma);
        for k in 1..dim {
            wbar[k] = (sbar[k] - zbar[k]) / (2.0 * gamma);
        }
        let eta = (sd / zd).sqrt().sqrt();
        let mut w = DMatrix::zeros(dim, dim);
        w[(0, 0)] = wbar[0];
        for k in 1..dim {
            w[(0, k)] = wbar[k];
            w[(k, 0)] = wbar[k];
            for l in 1..dim {
                w[(k, l)] = wbar[k] * wbar[l] / (1.0 + wbar[0]);
            }
            w[(k, k)] += 1.0;
        }
        out.push(w * eta);
    }
    Some(out)
}

fn apply_blocks(ws: &[DMatrix<f64>], v: &DVector<f64>, blocks: &Blocks) -> DVector<f64> {
    let mut out = DVector::zeros(v.len());
    for (w, &(start, dim)) in ws.iter().zip(blocks) {
        let r = w * v.rows(start, dim);
        out.rows_mut(start, dim).copy_from(&r);
    }
    out
}

/// Factored reduced KKT system
/// `[0 Aᵀ Gᵀ; A 0 0; G 0 −W²]`, regularised on the first two diagonal blocks
/// and refined against the unregularised matrix.
struct KktSystem {
    exact: DMatrix<f64>,
    /// Largest entry of `exact`.
    scale: f64,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl KktSystem {
    /// The iteration-independent part: `A`, `G` and their transposes.
    fn template(data: &Standard) -> (DMatrix<f64>, f64) {
        let (n, p, mk) = (data.n(), data.p(), data.mk());
        let size = n + p + mk;
        let mut k = DMatrix::zeros(size, size);
        k.view_mut((n, 0), (p, n)).copy_from(&data.a);
        k.view_mut((0, n), (n, p)).copy_from(&data.a.transpose());
        k.view_mut((n + p, 0), (mk, n)).copy_from(&data.g);
        k.view_mut((0, n + p), (n, mk)).copy_from(&data.g.transpose());
        let scale = data.a.amax().max(data.g.amax()).max(1.0);
        (k, scale)
    }

    fn new(data: &Standard, template: &(DMatrix<f64>, f64), ws: Option<&[DMatrix<f64>]>) -> Self {
        let (n, p, mk) = (data.n(), data.p(), data.mk());
        let mut k = template.0.clone();
        let mut scale = template.1;
        match ws {
            Some(ws) => {
                for (w, &(start, dim)) in ws.iter().zip(&data.blocks) {
                    let w2 = w * w;
                    scale = scale.max(w2.amax());
                    let off = n + p + start;
                    k.view_mut((off, off), (dim, dim)).copy_from(&(-w2));
                }
            }
            None => {
                for i in 0..mk {
                    k[(n + p + i, n + p + i)] = -1.0;
                }
            }
        }
        let mut reg = k.clone();
        for i in 0..n {
            reg[(i, i)] += STATIC_REG;
        }
        for i in n..n + p {
            reg[(i, i)] -= STATIC_REG;
        }
        Self {
            scale,
            exact: k,
            lu: reg.lu(),
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let mut sol = self.lu.solve(rhs)?;
        for _ in 0..REFINE_STEPS {
            let r = rhs - &self.exact * &sol;
            if r.amax() <= REFINE_FLOOR * (rhs.amax() + self.scale * sol.amax()) {
                break;
            }
            let corr = self.lu.solve(&r)?;
            sol += corr;
        }
        if sol.iter().all(|v| v.is_finite()) {
            Some(sol)
        } else {
            None
        }
    }
}

struct Direction {
    dx: DVector<f64>,
    dy: DVector<f64>,
    dz: DVector<f64>,
    ds: DVector<f64>,
    dtau: f64,
    dkappa: f64,
    /// `W⁻¹Δs` and `WΔz`, for the second-order correction.
    scaled_ds: DVector<f64>,
    scaled_dz: DVector<f64>,
}

struct Iterate {
    x: DVector<f64>,
    y: DVector<f64>,
    z: DVector<f64>,
    s: DVector<f64>,
    tau: f64,
    kappa: f64,
}

struct Residuals {
    rx: DVector<f64>,
    ry: DVector<f64>,
    rz: DVector<f64>,
    rt: f64,
}

fn hsd_residuals(d: &Standard, it: &Iterate) -> Residuals {
    Residuals {
        rx: d.a.tr_mul(&it.y) + d.g.tr_mul(&it.z) + &d.c * it.tau,
        ry: &d.a * &it.x - &d.b * it.tau,
        rz: &d.g * &it.x + &it.s - &d.h * it.tau,
        rt: it.kappa + d.c.dot(&it.x) + d.b.dot(&it.y) + d.h.dot(&it.z),
    }
}

#[allow(clippy::too_many_arguments)]
fn direction(
    d: &Standard,
    kkt: &KktSystem,
    x1: &DVector<f64>,
    ws: &[DMatrix<f64>],
    lambda: &DVector<f64>,
    it: &Iterate,
    res: &Residuals,
    keep: f64,
    ds_target: &DVector<f64>,
    dk_target: f64,
) -> Option<Direction> {
    let (n, p, mk) = (d.n(), d.p(), d.mk());
    let ldiv = jordan_divide(lambda, ds_target, &d.blocks);
    let w_ldiv = apply_blocks(ws, &ldiv, &d.blocks);
    let mut rhs = DVector::zeros(n + p + mk);
    rhs.rows_mut(0, n).copy_from(&(&res.rx * -keep));
    rhs.rows_mut(n, p).copy_from(&(&res.ry * -keep));
    rhs.rows_mut(n + p, mk)
        .copy_from(&(&res.rz * -keep - &w_ldiv));
    let x2 = kkt.solve(&rhs)?;
    let q_dot = |v: &DVector<f64>| {
        d.c.dot(&v.rows(0, n)) + d.b.dot(&v.rows(n, p)) + d.h.dot(&v.rows(n + p, mk))
    };
    let rhs_tau = -keep * res.rt - dk_target / it.tau;
    let denom = q_dot(x1) - it.kappa / it.tau;
    if denom == 0.0 || !denom.is_finite() {
        return None;
    }
    let dtau = (rhs_tau - q_dot(&x2)) / denom;
    let full = x2 + x1 * dtau;
    let dx = full.rows(0, n).into_owned();
    let dy = full.rows(n, p).into_owned();
    let dz = full.rows(n + p, mk).into_owned();
    let scaled_dz = apply_blocks(ws, &dz, &d.blocks);
    let scaled_ds = &ldiv - &scaled_dz;
    let ds = apply_blocks(ws, &scaled_ds, &d.blocks);
    let dkappa = (dk_target - it.kappa * dtau) / it.tau;
    Some(Direction {
        dx,
        dy,
        dz,
        ds,
        dtau,
        dkappa,
        scaled_ds,
        scaled_dz,
    })
}

fn step_length(it: &Iterate, dir: &Direction, blocks: &Blocks) -> f64 {
    let mut alpha = max_step(&it.s, &dir.ds, blocks).min(max_step(&it.z, &dir.dz, blocks));
    if dir.dtau < 0.0 {
        alpha = alpha.min(-it.tau / dir.dtau);
    }
    if dir.dkappa < 0.0 {
        alpha = alpha.min(-it.kappa / dir.dkappa);
    }
    alpha
}

/// Moves `v` into the interior of the cone product if it is outside or too
/// close to the boundary.
fn shift_into_cone(v: &mut DVector<f64>, blocks: &Blocks) {
    let worst = blocks
        .iter()
        .map(|&blk| {
            let b = slice(v, blk);
            tail_norm(b) - b[0]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    if worst > -1e-6 * (1.0 + v.norm()) {
        for &(start, _) in blocks {
            v[start] += 1.0 + worst.max(0.0);
        }
    }
}

/// Solves `min pᵀu s.t. f + Fᵀu ∈ K`. Deterministic: no randomised choices.
pub fn solve(prog: &ConeProgram, settings: &SolverSettings) -> Result<ConeSolution> {
    prog.validate()?;
    let d = Standard::new(prog);
    let (n, p, mk) = (d.n(), d.p(), d.mk());
    let m = prog.num_rows();
    let nu = d.blocks.len() as f64;

    // starting point from two least-squares style solves with W = I
    let template = KktSystem::template(&d);
    let init = KktSystem::new(&d, &template, None);
    let mut rhs = DVector::zeros(n + p + mk);
    rhs.rows_mut(n, p).copy_from(&d.b);
    rhs.rows_mut(n + p, mk).copy_from(&d.h);
    let primal = init.solve(&rhs);
    let mut rhs = DVector::zeros(n + p + mk);
    rhs.rows_mut(0, n).copy_from(&(-&d.c));
    let dual = init.solve(&rhs);
    let (x, s) = match &primal {
        Some(v) => (v.rows(0, n).into_owned(), -v.rows(n + p, mk).into_owned()),
        None => (DVector::zeros(n), DVector::zeros(mk)),
    };
    let (y, z) = match &dual {
        Some(v) => (v.rows(n, p).into_owned(), v.rows(n + p, mk).into_owned()),
        None => (DVector::zeros(p), DVector::zeros(mk)),
    };
    let mut it = Iterate {
        x,
        y,
        z,
        s,
        tau: 1.0,
        kappa: 1.0,
    };
    shift_into_cone(&mut it.s, &d.blocks);
    shift_into_cone(&mut it.z, &d.blocks);

    let e = identity_element(mk, &d.blocks);
    let c_scale = d.c.norm().max(1.0);
    let bh_scale = d.b.norm().max(d.h.norm()).max(1.0);
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    for iter in 0..=settings.max_iter {
        iterations = iter;
        let (u, zo) = d.original(m, &it.x, &it.y, &it.z, it.tau);
        let report = residuals(prog, &u, &zo);
        if report.max() <= settings.tol {
            status = SolveStatus::Optimal;
            break;
        }
        // infeasibility certificates (τ driven towards zero)
        if it.tau < it.kappa {
            let hz_by = d.h.dot(&it.z) + d.b.dot(&it.y);
            if hz_by < 0.0 {
                let r = (d.a.tr_mul(&it.y) + d.g.tr_mul(&it.z)).norm() / c_scale;
                if r / -hz_by <= settings.tol {
                    status = SolveStatus::Infeasible;
                    break;
                }
            }
            let cx = d.c.dot(&it.x);
            if cx < 0.0 {
                let r = (&d.a * &it.x)
                    .norm()
                    .max((&d.g * &it.x + &it.s).norm())
                    / bh_scale;
                if r / -cx <= settings.tol {
                    status = SolveStatus::Unbounded;
                    break;
                }
            }
        }
        if iter == settings.max_iter {
            break;
        }

        let Some(ws) = nt_scaling(&it.s, &it.z, &d.blocks) else {
            break;
        };
        let lambda = apply_blocks(&ws, &it.z, &d.blocks);
        let mu = (it.s.dot(&it.z) + it.tau * it.kappa) / (nu + 1.0);
        let kkt = KktSystem::new(&d, &template, Some(&ws));
        let mut q = DVector::zeros(n + p + mk);
        q.rows_mut(0, n).copy_from(&(-&d.c));
        q.rows_mut(n, p).copy_from(&d.b);
        q.rows_mut(n + p, mk).copy_from(&d.h);
        let Some(x1) = kkt.solve(&q) else { break };
        let res = hsd_residuals(&d, &it);

        // predictor
        let lam_sq = jordan_product(&lambda, &lambda, &d.blocks);
        let ds_aff = -&lam_sq;
        let dk_aff = -it.tau * it.kappa;
        let Some(aff) = direction(&d, &kkt, &x1, &ws, &lambda, &it, &res, 1.0, &ds_aff, dk_aff)
        else {
            break;
        };
        let alpha_aff = step_length(&it, &aff, &d.blocks).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3);

        // corrector
        let cross = jordan_product(&aff.scaled_ds, &aff.scaled_dz, &d.blocks);
        let ds_cc = -lam_sq - cross + &e * (sigma * mu);
        let dk_cc = -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
        let Some(dir) = direction(
            &d,
            &kkt,
            &x1,
            &ws,
            &lambda,
            &it,
            &res,
            1.0 - sigma,
            &ds_cc,
            dk_cc,
        ) else {
            break;
        };
        let alpha = (settings.step_fraction * step_length(&it, &dir, &d.blocks)).min(1.0);
        if !(alpha > 1e-12) {
            break;
        }
        it.x += &dir.dx * alpha;
        it.y += &dir.dy * alpha;
        it.z += &dir.dz * alpha;
        it.s += &dir.ds * alpha;
        it.tau += dir.dtau * alpha;
        it.kappa += dir.dkappa * alpha;
    }

    let (u, z) = match status {
        // certificates are reported unnormalised by τ
        SolveStatus::Infeasible | SolveStatus::Unbounded => d.original(m, &it.x, &it.y, &it.z, 1.0),
        _ => d.original(m, &it.x, &it.y, &it.z, it.tau),
    };
    let report = residuals(prog, &u, &z);
    Ok(ConeSolution {
        u,
        z,
        status,
        primal_residual: report.primal_residual,
        dual_residual: report.dual_residual,
        duality_gap: report.duality_gap.max(report.complementarity),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nt_scaling_maps_z_and_s_to_the_same_point() {
        let s = DVector::from_vec(vec![3.0, 1.0, -0.5, 2.0, 0.2]);
        let z = DVector::from_vec(vec![2.0, -0.3, 1.1, 0.7, 0.1]);
        let blocks = vec![(0, 3), (3, 2)];
        let ws = nt_scaling(&s, &z, &blocks).unwrap();
        let wz = apply_blocks(&ws, &z, &blocks);
        let winv_s: Vec<f64> = ws
            .iter()
            .zip(&blocks)
            .flat_map(|(w, &(start, dim))| {
                let inv = w.clone().try_inverse().unwrap();
                (inv * s.rows(start, dim)).iter().copied().collect::<Vec<_>>()
            })
            .collect();
        for (a, b) in wz.iter().zip(&winv_s) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn jordan_divide_inverts_product() {
        let l = DVector::from_vec(vec![2.0, 0.5, -0.7]);
        let v = DVector::from_vec(vec![0.3, 1.0, 2.0]);
        let blocks = vec![(0, 3)];
        let x = jordan_divide(&l, &v, &blocks);
        let back = jordan_product(&l, &x, &blocks);
        assert!((back - v).norm() < 1e-12);
    }

    #[test]
    fn max_step_hits_boundary() {
        let u = [1.0, 0.0];
        let d = [0.0, 1.0];
        assert!((max_step_soc(&u, &d) - 1.0).abs() < 1e-12);
        let d = [1.0, 0.0];
        assert!(max_step_soc(&u, &d).is_infinite());
        assert!((max_step_soc(&[2.0], &[-1.0]) - 2.0).abs() < 1e-12);
    }
}
