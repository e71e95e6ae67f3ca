//! Where can a convex combination of a 3-compatible family have a double root?
//!
//! At a non-simple root `r` of `sum c_i f_i` the weight vector lies in the
//! kernel of the 2 x n matrix with rows `f_i(r)` and `f_i'(r)`. Candidates for
//! `r` are the roots of members and of pairwise Wronskians; at each, kernel
//! vectors with support at most two are read off directly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interlace::wronskian;
use crate::poly::{Family, Poly};
use crate::rootfind::real_clusters;
use crate::tolerance::Tolerances;

use super::proper::zero_convex_combination;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignEntry {
    pub member: usize,
    /// Sign of `f(r)`: -1, 0 or 1.
    pub member_sign: i8,
    /// Sign of `h''(r)` for the witnessed combination `h`.
    pub curvature_sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonSimpleDiagnostic {
    pub location: f64,
    /// Convex weights on the original members, support at most two.
    pub witness_weights: Vec<f64>,
    /// Members vanishing at `location`.
    pub member_roots: Vec<usize>,
    pub sign_report: Vec<SignEntry>,
    /// `|h(r)|` and `|h'(r)|` relative to their evaluation magnitudes.
    pub residuals: [f64; 2],
    /// No member vanishes at `location`.
    pub missing_member_root: bool,
    /// Some member has `h''(r) f(r) > 0` beyond `tau_sign`.
    pub sign_violation: bool,
}

fn sign_of(v: f64, reference: f64, tol: &Tolerances) -> i8 {
    if v.abs() <= tol.tau_sign * reference {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

/// Relative sizes of `h(r)` and `h'(r)`. A hit needs the first below
/// `tau_sign` and the second below `tau_root`.
fn residuals(h: &Poly, r: f64) -> [f64; 2] {
    let dh = h.derivative();
    let rel = |p: &Poly| {
        let a = p.eval_abs(r);
        if a == 0.0 {
            0.0
        } else {
            p.eval(r).abs() / a
        }
    };
    [rel(h), rel(&dh)]
}

/// All support-at-most-two double-root witnesses of a proper family.
pub fn nonsimple_root_diagnostics(
    family: &Family,
    tol: &Tolerances,
) -> Result<Vec<NonSimpleDiagnostic>> {
    if let Some(weights) = zero_convex_combination(family, tol) {
        return Err(Error::NotProper { weights });
    }
    let n = family.len();
    let unit: Vec<Poly> = family
        .members()
        .iter()
        .map(|p| p.scaled(1.0 / p.scale()))
        .collect();
    let member_roots: Vec<Vec<f64>> = unit
        .iter()
        .map(|p| real_clusters(p, tol).map(|c| c.into_iter().map(|x| x.0).collect()))
        .collect::<Result<_>>()?;

    let mut candidates: Vec<f64> = member_roots.iter().flatten().copied().collect();
    for i in 0..n {
        for j in i + 1..n {
            let (w, _) = wronskian(&unit[i], &unit[j], tol);
            if w.scale() > tol.tau_zero {
                if let Ok(c) = real_clusters(&w, tol) {
                    candidates.extend(c.into_iter().map(|x| x.0));
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.total_cmp(b));
    let near = |a: f64, b: f64| (a - b).abs() <= 10.0 * tol.tau_root * (1.0 + a.abs().max(b.abs()));
    candidates.dedup_by(|a, b| near(*a, *b));

    let mut out: Vec<NonSimpleDiagnostic> = Vec::new();
    for &r0 in &candidates {
        for i in 0..n {
            for j in std::iter::once(None).chain((i + 1..n).map(Some)) {
                let Some((r, c, h)) = refine(&unit, i, j, r0) else {
                    continue;
                };
                let res = residuals(&h, r);
                if res[0] > tol.tau_sign || res[1] > tol.tau_root {
                    continue;
                }
                let d = report(family, &unit, &member_roots, &c, &h, r, tol);
                let seen = out.iter().any(|e| {
                    near(e.location, r)
                        && e.witness_weights
                            .iter()
                            .zip(&d.witness_weights)
                            .all(|(a, b)| (a - b).abs() <= tol.tau_root)
                });
                if !seen {
                    out.push(d);
                }
            }
        }
    }
    Ok(out)
}

/// Weights on the unit members supported on `{i}` or `{i, j}` annihilating
/// the value and slope columns at `r`, if the columns allow it.
fn kernel_weights(unit: &[Poly], i: usize, j: Option<usize>, r: f64) -> Option<Vec<f64>> {
    let n = unit.len();
    let col = |k: usize| [unit[k].eval(r), unit[k].derivative().eval(r)];
    let mut w = vec![0.0; n];
    match j {
        None => w[i] = 1.0,
        Some(j) => {
            let (a, b) = (col(i), col(j));
            if a[0] * b[0] + a[1] * b[1] >= 0.0 {
                return None;
            }
            // Antiparallel columns: |b| a + |a| b vanishes.
            let na = a[0].hypot(a[1]);
            let nb = b[0].hypot(b[1]);
            w[i] = nb / (na + nb);
            w[j] = na / (na + nb);
        }
    }
    Some(w)
}

/// Alternates Newton steps towards a critical point of the combination with
/// recomputing its weights there.
fn refine(unit: &[Poly], i: usize, j: Option<usize>, r0: f64) -> Option<(f64, Vec<f64>, Poly)> {
    let mut r = r0;
    let mut c = kernel_weights(unit, i, j, r)?;
    let mut h = combine(unit, &c);
    for _ in 0..4 {
        let d1 = h.derivative();
        let d2 = d1.derivative().eval(r);
        if d2 == 0.0 {
            break;
        }
        let step = d1.eval(r) / d2;
        if !(step.abs() <= 1e-3 * (1.0 + r.abs())) {
            break;
        }
        r -= step;
        c = kernel_weights(unit, i, j, r)?;
        h = combine(unit, &c);
    }
    if h.is_zero() {
        return None;
    }
    Some((r, c, h))
}

fn combine(unit: &[Poly], c: &[f64]) -> Poly {
    let mut h = Poly::zero(unit[0].ambient_degree());
    for (p, &w) in unit.iter().zip(c) {
        if w != 0.0 {
            h = h.add(&p.scaled(w));
        }
    }
    h
}

fn report(
    family: &Family,
    unit: &[Poly],
    member_roots: &[Vec<f64>],
    c: &[f64],
    h: &Poly,
    r: f64,
    tol: &Tolerances,
) -> NonSimpleDiagnostic {
    let radius = 10.0 * tol.tau_root * (1.0 + r.abs().max(1.0));
    let vanishing: Vec<usize> = (0..unit.len())
        .filter(|&i| member_roots[i].iter().any(|&x| (x - r).abs() <= radius))
        .collect();
    let h2 = h.nth_derivative(2);
    let curv = h2.eval(r);
    let curv_sign = sign_of(curv, h2.eval_abs(r), tol);
    let mut violation = false;
    let sign_report = unit
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let v = p.eval(r);
            let s = if vanishing.contains(&i) {
                0
            } else {
                sign_of(v, p.eval_abs(r), tol)
            };
            if curv * v > tol.tau_sign * h2.eval_abs(r) * p.eval_abs(r) {
                violation = true;
            }
            SignEntry {
                member: i,
                member_sign: s,
                curvature_sign: curv_sign,
            }
        })
        .collect();
    // Weights on the original (unnormalised) members.
    let mut w: Vec<f64> = c
        .iter()
        .zip(family.members())
        .map(|(x, p)| x / p.scale())
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    NonSimpleDiagnostic {
        location: r,
        witness_weights: w,
        missing_member_root: vanishing.is_empty(),
        member_roots: vanishing,
        sign_report,
        residuals: residuals(h, r),
        sign_violation: violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Poly {
        Poly::new(c.to_vec())
    }

    #[test]
    fn single_square_member() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![p(&[0.0, 0.0, 1.0]), p(&[-1.0, 0.0, 1.0])]).unwrap();
        let diags = nonsimple_root_diagnostics(&fam, &tol).unwrap();
        assert_eq!(diags.len(), 1, "{diags:?}");
        let d = &diags[0];
        assert!(d.location.abs() < 1e-9);
        assert_eq!(d.witness_weights, vec![1.0, 0.0]);
        assert_eq!(d.member_roots, vec![0]);
        assert!(!d.missing_member_root && !d.sign_violation);
    }

    #[test]
    fn interlacing_pair_has_none() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![p(&[-3.0, 2.0, 1.0]), p(&[-3.0, -2.0, 1.0])]).unwrap();
        assert!(nonsimple_root_diagnostics(&fam, &tol).unwrap().is_empty());
    }

    #[test]
    fn double_root_member() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![p(&[1.0, -2.0, 1.0])]).unwrap();
        let diags = nonsimple_root_diagnostics(&fam, &tol).unwrap();
        assert_eq!(diags.len(), 1);
        assert!((diags[0].location - 1.0).abs() < 1e-6);
    }

    #[test]
    fn double_root_on_an_edge() {
        let tol = Tolerances::default();
        // 0.4 (t+1)(t-0.5) + 0.6 (t+1)(t+2) = (t+1)^2.
        let f1 = Poly::from_roots(1.0, &[-1.0, 0.5], 2);
        let f2 = Poly::from_roots(1.0, &[-1.0, -2.0], 2);
        let f3 = Poly::from_roots(1.0, &[-0.2, -1.5], 2);
        let fam = Family::new(vec![f1, f2, f3]).unwrap();
        let diags = nonsimple_root_diagnostics(&fam, &tol).unwrap();
        let at = diags
            .iter()
            .find(|d| (d.location + 1.0).abs() < 1e-6)
            .expect("double root at -1");
        assert!((at.witness_weights[0] - 0.4).abs() < 1e-9);
        assert!((at.witness_weights[1] - 0.6).abs() < 1e-9);
        assert_eq!(at.member_roots, vec![0, 1]);
        assert!(!at.sign_violation);
    }
}
