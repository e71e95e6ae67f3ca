//! Counterexample search: the convex combination on a face of the simplex
//! whose roots stray furthest from the real line.
//!
//! The search maximises a signed objective: the non-real margin when the
//! combination has non-real roots, and otherwise minus the smallest gap
//! between its roots on the projective line (roots `x` placed at angle
//! `2 atan x`, roots at infinity at angle `pi`). The objective is continuous
//! where a real double root splits into a conjugate pair, including at
//! infinity, so local moves can climb from the real region into the non-real
//! one. A barycentric grid seeds a multi-start pattern search that moves
//! weight between pairs of members.

use std::f64::consts::PI;

use crate::poly::Family;
use crate::rootfind::analyze;
use crate::tolerance::Tolerances;

use super::MARGIN_BAND;

/// Grid resolution for two-member faces.
const PAIR_GRID: usize = 512;
/// Grid resolution per barycentric axis for larger faces.
const FACE_GRID: usize = 48;
const MIN_STEP: f64 = 1e-9;
/// Grid points used as pattern-search starts.
const STARTS: usize = 6;

/// Relative non-real margin of `sum w_i f_i` (0 for real-rooted or zero combinations).
pub fn combination_margin(family: &Family, weights: &[f64], tol: &Tolerances) -> f64 {
    objective(family, weights, tol).max(0.0)
}

fn objective(family: &Family, weights: &[f64], tol: &Tolerances) -> f64 {
    let p = family.combine(weights);
    let Ok(a) = analyze(&p, tol) else {
        return f64::NEG_INFINITY;
    };
    if !a.complex.is_empty() {
        return a.margin;
    }
    let mut angles: Vec<f64> = Vec::new();
    for &(r, m) in &a.real {
        if m > 1 {
            return 0.0;
        }
        angles.push(2.0 * r.atan());
    }
    if a.roots_at_infinity > 1 {
        return 0.0;
    }
    if a.roots_at_infinity == 1 {
        angles.push(PI);
    }
    if angles.len() < 2 {
        return -1.0;
    }
    angles.sort_by(|x, y| x.total_cmp(y));
    let wrap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    let gap = angles
        .windows(2)
        .fold(wrap, |g, w| g.min(w[1] - w[0]));
    -gap / (2.0 * PI)
}

/// Weights (over the whole family, zero off `face`) maximising the
/// non-real margin on the face, together with that margin.
pub fn worst_combination(family: &Family, face: &[usize], tol: &Tolerances) -> (Vec<f64>, f64) {
    let n = family.len();
    let k = face.len();
    let expand = |local: &[f64]| {
        let mut w = vec![0.0; n];
        for (&i, &x) in face.iter().zip(local) {
            w[i] = x;
        }
        w
    };
    let eval = |local: &[f64]| objective(family, &expand(local), tol);

    let grid = if k <= 2 { PAIR_GRID } else { FACE_GRID };
    let mut scored: Vec<(f64, Vec<f64>)> = barycentric_grid(k, grid)
        .into_iter()
        .map(|w| (eval(&w), w))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].1.clone();
    let mut best_m = scored[0].0;
    if k >= 2 && best_m <= tol.tau_root * MARGIN_BAND {
        for (m0, start) in scored.into_iter().take(STARTS) {
            let (w, m) = pattern_search(start, m0, 1.0 / grid as f64, &eval);
            if m > best_m {
                best_m = m;
                best = w;
            }
        }
    }
    (expand(&best), best_m.max(0.0))
}

fn pattern_search(
    mut best: Vec<f64>,
    mut best_m: f64,
    mut step: f64,
    eval: &impl Fn(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let k = best.len();
    while step >= MIN_STEP {
        let mut improved = false;
        for a in 0..k {
            for b in 0..k {
                if a == b || best[b] < step {
                    continue;
                }
                let mut cand = best.clone();
                cand[a] += step;
                cand[b] -= step;
                let m = eval(&cand);
                if m > best_m {
                    best_m = m;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, best_m)
}

/// All points of the `k`-simplex with coordinates in `(1/grid) Z`.
fn barycentric_grid(k: usize, grid: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, grid: usize, out: &mut Vec<Vec<f64>>) {
        let k = cur.len();
        if pos + 1 == k {
            cur[pos] = left;
            out.push(cur.iter().map(|&c| c as f64 / grid as f64).collect());
            return;
        }
        for c in 0..=left {
            cur[pos] = c;
            rec(pos + 1, left - c, cur, grid, out);
        }
    }
    if k > 0 {
        rec(0, grid, &mut cur, grid, &mut out);
    }
    out
}
