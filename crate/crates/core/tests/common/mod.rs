//! Shared test support: planted-optimum cone programs and a grid oracle.

#![allow(dead_code)]

use beamform::socp::{Cone, ConeProgram};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A random cone program together with an optimal primal/dual pair built
/// by hand, so the optimal value `pᵀu* = −fᵀz*` is known exactly.
pub struct Planted {
    pub prog: ConeProgram,
    pub u_star: DVector<f64>,
    pub z_star: DVector<f64>,
    pub optimum: f64,
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Complementary `(s, z)` pair for one second-order block.
fn complementary_block(rng: &mut ChaCha8Rng, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let kind = rng.random_range(0..3);
    let interior = |rng: &mut ChaCha8Rng| {
        let mut v = vec![0.0; dim];
        let tail: Vec<f64> = (1..dim).map(|_| gauss(rng)).collect();
        let norm = tail.iter().map(|x| x * x).sum::<f64>().sqrt();
        v[0] = norm + 0.5 + rng.random::<f64>();
        v[1..].copy_from_slice(&tail);
        v
    };
    match (kind, dim) {
        // s on the boundary, z on the opposite ray
        (0, d) if d > 1 => {
            let dir = unit_vector(rng, d - 1);
            let (rs, rz) = (0.5 + rng.random::<f64>(), 0.5 + rng.random::<f64>());
            let mut s = vec![rs];
            s.extend(dir.iter().map(|x| rs * x));
            let mut z = vec![rz];
            z.extend(dir.iter().map(|x| -rz * x));
            (s, z)
        }
        (1, _) => (interior(rng), vec![0.0; dim]),
        _ => (vec![0.0; dim], interior(rng)),
    }
}

pub fn planted(seed: u64, max_vars: usize) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_vars);
    let mut cones = Vec::new();
    let mut s = Vec::new();
    let mut z = Vec::new();
    let num_soc = rng.random_range(1..=3);
    for _ in 0..num_soc {
        let dim = rng.random_range(1..=5);
        let (sb, zb) = complementary_block(&mut rng, dim);
        cones.push(Cone::Soc(dim));
        s.extend(sb);
        z.extend(zb);
    }
    if n >= 2 && rng.random_bool(0.5) {
        let dim = rng.random_range(1..n.min(3));
        cones.push(Cone::Zero(dim));
        s.extend(std::iter::repeat(0.0).take(dim));
        z.extend((0..dim).map(|_| gauss(&mut rng)));
    }
    let m = s.len();
    let map = DMatrix::from_fn(m, n, |_, _| gauss(&mut rng));
    let u_star = DVector::from_fn(n, |_, _| gauss(&mut rng));
    let s = DVector::from_vec(s);
    let z_star = DVector::from_vec(z);
    let offset = &s - &map * &u_star;
    let objective = map.tr_mul(&z_star);
    let optimum = -offset.dot(&z_star);
    let prog = ConeProgram::new(objective, offset, map, cones).unwrap();
    Planted {
        prog,
        u_star,
        z_star,
        optimum,
    }
}

/// Membership of `f + Fᵀu` in the cone product, with tolerance.
pub fn feasible(prog: &ConeProgram, u: &DVector<f64>, tol: f64) -> bool {
    let s = prog.slack(u);
    prog.blocks().all(|(cone, r)| {
        let b = &s.as_slice()[r];
        match cone {
            Cone::Zero(_) => b.iter().all(|v| v.abs() <= tol),
            Cone::Soc(_) => {
                let tail = b[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                b[0] + tol >= tail
            }
        }
    })
}

/// Brute force over a two-dimensional grid centred at `centre`, refined
/// around the best feasible point.
pub fn grid_minimum(prog: &ConeProgram, centre: &DVector<f64>, half_width: f64) -> Option<f64> {
    assert_eq!(prog.num_vars(), 2);
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut c = centre.clone();
    let mut w = half_width;
    for _ in 0..12 {
        let steps = 200;
        for i in 0..=steps {
            for j in 0..=steps {
                let u = DVector::from_vec(vec![
                    c[0] - w + 2.0 * w * i as f64 / steps as f64,
                    c[1] - w + 2.0 * w * j as f64 / steps as f64,
                ]);
                if feasible(prog, &u, 0.0) {
                    let v = prog.objective.dot(&u);
                    if best.as_ref().is_none_or(|(b, _)| v < *b) {
                        best = Some((v, u));
                    }
                }
            }
        }
        let (_, u) = best.as_ref()?;
        c = u.clone();
        w *= 0.1;
    }
    best.map(|(v, _)| v)
}
