//! Real roots with multiplicities and a quantified real-rootedness test.
//!
//! Roots come from companion-matrix eigenvalues, polished by Newton steps and
//! grouped into multiplicities by clustering. A Sturm-sequence counter
//! cross-checks verdicts that sit near the tolerance band.

mod eigen;
pub mod sturm;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Degree, Poly};
use crate::tolerance::Tolerances;

pub use eigen::companion_roots;

/// Sorted finite real roots with multiplicities plus the count at infinity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootSpectrum {
    /// `(value, multiplicity)`, strictly descending in value.
    pub roots: Vec<(f64, usize)>,
    pub roots_at_infinity: usize,
    /// Smallest distance between distinct finite roots; `+inf` with fewer than two.
    pub min_gap: f64,
}

impl RootSpectrum {
    /// Number of finite roots counted with multiplicity.
    pub fn finite_count(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }

    /// Finite roots repeated by multiplicity, descending: `lambda_1 >= lambda_2 >= ...`.
    pub fn lambdas(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|&(r, m)| std::iter::repeat_n(r, m))
            .collect()
    }

    /// True when some finite root has multiplicity above one.
    pub fn has_multiple_root(&self) -> bool {
        self.roots.iter().any(|r| r.1 > 1)
    }

    /// `max(1, max |root|)`.
    pub fn spread(&self) -> f64 {
        self.roots.iter().fold(1.0_f64, |m, r| m.max(r.0.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    RealRooted,
    NotRealRooted,
    Borderline,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealRootedness {
    pub verdict: Verdict,
    /// Largest imaginary part among computed roots, relative to the root spread.
    pub margin: f64,
}

/// Everything the eigenvalue pass learns about a nonzero polynomial.
#[derive(Clone, Debug)]
pub(crate) struct Analysis {
    /// Real clusters, descending.
    pub real: Vec<(f64, usize)>,
    /// Roots left off the real line (one entry per root, conjugates included).
    pub complex: Vec<Complex64>,
    pub roots_at_infinity: usize,
    pub spread: f64,
    pub margin: f64,
}

impl Analysis {
    fn spectrum(&self) -> RootSpectrum {
        let mut min_gap = f64::INFINITY;
        for w in self.real.windows(2) {
            min_gap = min_gap.min(w[0].0 - w[1].0);
        }
        RootSpectrum {
            roots: self.real.clone(),
            roots_at_infinity: self.roots_at_infinity,
            min_gap,
        }
    }
}

/// Real roots of a real-rooted polynomial.
pub fn real_roots(p: &Poly, tol: &Tolerances) -> Result<RootSpectrum> {
    let a = analyze(p, tol)?;
    if !a.complex.is_empty() {
        return Err(Error::NotRealRooted { margin: a.margin });
    }
    Ok(a.spectrum())
}

/// Real clusters of any nonzero polynomial, ignoring its non-real roots.
pub fn real_clusters(p: &Poly, tol: &Tolerances) -> Result<Vec<(f64, usize)>> {
    Ok(analyze(p, tol)?.real)
}

/// Verdict with margin; `Borderline` when the margin is within a factor 10 of
/// `tau_root`, or when the Sturm count disputes the eigenvalue pass.
pub fn is_real_rooted(p: &Poly, tol: &Tolerances) -> Result<RealRootedness> {
    let a = analyze(p, tol)?;
    let margin = a.margin;
    let mut verdict = if a.complex.is_empty() {
        Verdict::RealRooted
    } else {
        Verdict::NotRealRooted
    };
    if margin > tol.tau_root / 10.0 && margin <= tol.tau_root * 10.0 {
        verdict = Verdict::Borderline;
    }
    if verdict != Verdict::Borderline && disputed(&a, tol) {
        let distinct_eigen = a.real.len();
        if let Some(distinct_sturm) = sturm::count_distinct_real_roots(p, tol) {
            if distinct_sturm != distinct_eigen {
                verdict = Verdict::Borderline;
            }
        }
    }
    Ok(RealRootedness { verdict, margin })
}

fn disputed(a: &Analysis, tol: &Tolerances) -> bool {
    if a.margin > tol.tau_root / 100.0 && a.margin <= tol.tau_root * 100.0 {
        return true;
    }
    let radius = tol.tau_root * (1.0 + a.spread);
    a.real.windows(2).any(|w| w[0].0 - w[1].0 < 100.0 * radius)
}

/// Eigenvalue pass, polishing, clustering and multiple-root merging.
pub(crate) fn analyze(p: &Poly, tol: &Tolerances) -> Result<Analysis> {
    let (k, roots_at_infinity) = match p.effective_degree(tol) {
        Degree::IsZero => return Err(Error::ZeroPolynomial),
        Degree::Finite {
            degree,
            roots_at_infinity,
        } => (degree, roots_at_infinity),
    };
    let c = &p.coeffs()[..=k];
    let zeros_at_origin = c.iter().take_while(|&&x| x == 0.0).count();
    let core = &c[zeros_at_origin..];
    let mut roots = raw_roots(core);
    polish(core, &mut roots);

    let spread = roots
        .iter()
        .fold(1.0_f64, |m, z| m.max(z.norm()));
    let radius = tol.tau_root * (1.0 + spread);
    let snap = tol.tau_root * spread;

    // Conjugate pairs with negligible imaginary part become two real roots.
    let mut reals: Vec<f64> = Vec::new();
    let mut complex: Vec<Complex64> = Vec::new();
    let mut snapped_margin = 0.0_f64;
    for z in &roots {
        if z.im.abs() <= snap {
            reals.push(z.re);
            snapped_margin = snapped_margin.max(z.im.abs() / spread);
        } else {
            complex.push(*z);
        }
    }
    reals.extend(std::iter::repeat_n(0.0, zeros_at_origin));
    reals.sort_by(|a, b| b.total_cmp(a));

    // Single linkage on the real line.
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    let mut members: Vec<Vec<f64>> = Vec::new();
    for &r in &reals {
        match members.last_mut() {
            Some(last) if last.last().is_some_and(|&prev| prev - r <= radius) => last.push(r),
            _ => members.push(vec![r]),
        }
    }
    let full = Poly::new(c.to_vec());
    for m in &members {
        if m.len() > 1 && certified_simple(&full, m, tol) {
            clusters.extend(m.iter().map(|&r| (r, 1)));
        } else {
            clusters.push((m.iter().sum::<f64>() / m.len() as f64, m.len()));
        }
    }
    let (clusters, complex) = merge_multiple_roots(&full, clusters, complex, tol, spread);

    let margin = complex
        .iter()
        .fold(snapped_margin, |m, z| m.max(z.im.abs() / spread));

    let mut real = clusters;
    for cl in real.iter_mut() {
        if cl.1 == 1 {
            cl.0 = newton_real(&full, cl.0);
        }
    }
    real.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(Analysis {
        real,
        complex,
        roots_at_infinity,
        spread,
        margin,
    })
}

/// True when `p` changes sign strictly between and around the descending
/// roots `xs`, so each is a simple root even though the cluster radius, which
/// scales with the largest root, grouped them.
fn certified_simple(p: &Poly, xs: &[f64], tol: &Tolerances) -> bool {
    let gap = xs.windows(2).fold(f64::INFINITY, |g, w| g.min(w[0] - w[1]));
    if gap <= 0.0 {
        return false;
    }
    let mut points = vec![xs[0] + 0.5 * gap];
    points.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    points.push(xs[xs.len() - 1] - 0.5 * gap);
    let signs: Vec<f64> = points
        .iter()
        .map(|&t| {
            let v = p.eval(t);
            if v.abs() > tol.tau_sign * p.eval_abs(t) {
                v.signum()
            } else {
                0.0
            }
        })
        .collect();
    signs.windows(2).all(|w| w[0] * w[1] < 0.0)
}

fn raw_roots(c: &[f64]) -> Vec<Complex64> {
    let k = c.len() - 1;
    match k {
        0 => Vec::new(),
        1 => vec![Complex64::new(-c[0] / c[1], 0.0)],
        2 => quadratic(c[2], c[1], c[0]),
        _ => companion_roots(c),
    }
}

fn quadratic(a: f64, b: f64, c: f64) -> Vec<Complex64> {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * disc.sqrt());
        if q == 0.0 {
            return vec![Complex64::new(0.0, 0.0); 2];
        }
        vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        vec![Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn horner_c(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// A few Newton steps per root, kept only while the residual drops.
fn polish(c: &[f64], roots: &mut [Complex64]) {
    for z in roots.iter_mut() {
        let (mut pz, _) = horner_c(c, *z);
        for _ in 0..3 {
            let (_, dp) = horner_c(c, *z);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *z - pz / dp;
            let (pc, _) = horner_c(c, cand);
            if pc.norm() < pz.norm() {
                *z = cand;
                pz = pc;
            } else {
                break;
            }
        }
    }
}

fn newton_real(p: &Poly, x0: f64) -> f64 {
    let dp = p.derivative();
    let mut x = x0;
    let mut fx = p.eval(x).abs();
    for _ in 0..4 {
        let d = dp.eval(x);
        if d == 0.0 {
            break;
        }
        let cand = x - p.eval(x) / d;
        let fc = p.eval(cand).abs();
        if fc < fx && (cand - x0).abs() <= 1e-3 * (1.0 + x0.abs()) {
            x = cand;
            fx = fc;
        } else {
            break;
        }
    }
    x
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Groups within the loose radius `sqrt(tau_root) * (1 + spread)` that are
/// numerically indistinguishable from one real root of multiplicity `m`
/// collapse into that root.
fn merge_multiple_roots(
    p: &Poly,
    clusters: Vec<(f64, usize)>,
    complex: Vec<Complex64>,
    tol: &Tolerances,
    spread: f64,
) -> (Vec<(f64, usize)>, Vec<Complex64>) {
    let loose = tol.tau_root.sqrt() * (1.0 + spread);
    let radius = tol.tau_root * (1.0 + spread);
    // Points: real clusters (with counts) and single complex roots.
    let mut pts: Vec<(Complex64, usize, bool)> = clusters
        .iter()
        .map(|&(r, m)| (Complex64::new(r, 0.0), m, true))
        .collect();
    pts.extend(complex.iter().map(|&z| (z, 1, false)));
    if pts.len() < 2 {
        return (clusters, complex);
    }
    let n = pts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (pts[i].0 - pts[j].0).norm() <= loose {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let scale_coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.abs()).collect();
    let k = p.ambient_degree();
    let mut out_real = Vec::new();
    let mut out_complex = Vec::new();
    for idx in groups.values() {
        let m: usize = idx.iter().map(|&i| pts[i].1).sum();
        let all_real_single = idx.len() == 1;
        let weighted: Complex64 = idx
            .iter()
            .map(|&i| pts[i].0 * pts[i].1 as f64)
            .sum::<Complex64>()
            / m as f64;
        let conj_closed = weighted.im.abs() <= radius;
        let accept = !all_real_single && conj_closed && m >= 2 && {
            let c = refine_center(p, weighted.re, m, loose);
            is_multiple_root(p, &scale_coeffs, k, c, m, radius)
        };
        if accept {
            let c = refine_center(p, weighted.re, m, loose);
            out_real.push((c, m));
        } else {
            for &i in idx {
                if pts[i].2 {
                    out_real.push((pts[i].0.re, pts[i].1));
                } else {
                    out_complex.push(pts[i].0);
                }
            }
        }
    }
    out_real.sort_by(|a, b| b.0.total_cmp(&a.0));
    (out_real, out_complex)
}

/// Newton on `p^(m-1)`, which has a simple root at an `m`-fold root of `p`.
fn refine_center(p: &Poly, c0: f64, m: usize, window: f64) -> f64 {
    let q = p.nth_derivative(m - 1);
    let dq = q.derivative();
    let mut c = c0;
    for _ in 0..6 {
        let d = dq.eval(c);
        if d == 0.0 {
            break;
        }
        let next = c - q.eval(c) / d;
        if !next.is_finite() || (next - c0).abs() > window {
            break;
        }
        c = next;
    }
    c
}

/// Every Taylor coefficient below order `m` is explained either by roots
/// within `radius` of `c` or by the rounding error of evaluating it.
fn is_multiple_root(p: &Poly, abs_coeffs: &[f64], k: usize, c: f64, m: usize, radius: f64) -> bool {
    let q = p.taylor_at(c);
    if m >= q.len() {
        return false;
    }
    let qm = q[m].abs();
    if qm == 0.0 {
        return false;
    }
    let ac = c.abs();
    let gamma = 64.0 * (k as f64 + 1.0) * f64::EPSILON;
    (0..m).all(|j| {
        let bound: f64 = (j..abs_coeffs.len())
            .map(|i| binom(i, j) * abs_coeffs[i] * ac.powi((i - j) as i32))
            .sum();
        q[j].abs() <= binom(m, j) * radius.powi((m - j) as i32) * qm + gamma * bound
    })
}
