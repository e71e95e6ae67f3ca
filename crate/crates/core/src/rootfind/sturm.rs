//! Floating-point Sturm sequences: distinct real root counts and bisection
//! isolation. Used as an independent cross-check of the eigenvalue pass.

use crate::poly::{Degree, Poly};
use crate::tolerance::Tolerances;

/// Coefficients ascending, trimmed so the last entry is the leading one.
fn trim(mut c: Vec<f64>, floor: f64) -> Vec<f64> {
    while c.len() > 1 && c.last().is_some_and(|x| x.abs() <= floor) {
        c.pop();
    }
    c
}

fn rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let q = r[dr] / lead;
        for i in 0..=db {
            r[dr - db + i] -= q * b[i];
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0.0);
    }
    r
}

/// Sturm chain of `p`, each entry normalised to unit max-coefficient.
pub fn chain(p: &Poly, tol: &Tolerances) -> Option<Vec<Vec<f64>>> {
    let k = match p.effective_degree(tol) {
        Degree::IsZero => return None,
        Degree::Finite { degree, .. } => degree,
    };
    let s = p.scale();
    let p0: Vec<f64> = p.coeffs()[..=k].iter().map(|c| c / s).collect();
    if k == 0 {
        return Some(vec![p0]);
    }
    let d = Poly::new(p0.clone()).derivative();
    let ds = d.scale();
    let p1: Vec<f64> = d.coeffs().iter().map(|c| c / ds).collect();
    let floor = 1e3 * f64::EPSILON * (k as f64 + 1.0);
    let mut seq = vec![p0, trim(p1, floor)];
    loop {
        let n = seq.len();
        let b = &seq[n - 1];
        if b.len() == 1 {
            break;
        }
        let r = rem(&seq[n - 2], b);
        let rs = r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if rs <= floor {
            break;
        }
        let r: Vec<f64> = r.iter().map(|x| -x / rs).collect();
        seq.push(trim(r, floor));
    }
    Some(seq)
}

fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn sign_changes(vals: impl Iterator<Item = f64>) -> usize {
    let mut last = 0.0_f64;
    let mut n = 0;
    for v in vals {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            n += 1;
        }
        last = v;
    }
    n
}

fn changes_at(seq: &[Vec<f64>], x: f64) -> usize {
    sign_changes(seq.iter().map(|c| eval(c, x)))
}

fn changes_at_infinity(seq: &[Vec<f64>], positive: bool) -> usize {
    sign_changes(seq.iter().map(|c| {
        let lead = *c.last().unwrap();
        let deg = c.len() - 1;
        if positive || deg % 2 == 0 {
            lead
        } else {
            -lead
        }
    }))
}

/// Number of distinct real roots, or `None` for the zero polynomial.
pub fn count_distinct_real_roots(p: &Poly, tol: &Tolerances) -> Option<usize> {
    let seq = chain(p, tol)?;
    let neg = changes_at_infinity(&seq, false);
    let pos = changes_at_infinity(&seq, true);
    Some(neg.saturating_sub(pos))
}

/// Cauchy bound on root moduli.
fn cauchy_bound(c: &[f64]) -> f64 {
    let lead = c.last().unwrap().abs();
    1.0 + c[..c.len() - 1]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs() / lead))
}

/// Disjoint intervals `(a, b]`, each holding exactly one distinct real root,
/// bisected until narrower than `width`. Ascending order.
pub fn isolate(p: &Poly, tol: &Tolerances, width: f64) -> Vec<(f64, f64)> {
    let Some(seq) = chain(p, tol) else {
        return Vec::new();
    };
    let bound = cauchy_bound(&seq[0]);
    let mut out = Vec::new();
    let mut stack = vec![(-bound, bound, changes_at(&seq, -bound), changes_at(&seq, bound))];
    while let Some((a, b, va, vb)) = stack.pop() {
        let count = va.saturating_sub(vb);
        if count == 0 {
            continue;
        }
        if (count == 1 && b - a <= width) || b - a <= f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            out.push((a, b));
            continue;
        }
        let m = 0.5 * (a + b);
        let vm = changes_at(&seq, m);
        stack.push((a, m, va, vm));
        stack.push((m, b, vm, vb));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out
}
