//! Brute-force validation by sampling convex combinations.
//!
//! Vertices, edge midpoints and the centroid come first, followed by
//! Dirichlet(1, ..., 1) draws. Sample `k` is drawn from its own ChaCha stream,
//! so reports do not depend on how the work is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::poly::{Family, Poly};
use crate::rootfind::analyze;
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub sample: usize,
    pub weights: Vec<f64>,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub samples: usize,
    /// Samples whose combination has non-real margin above `tau_root`, by sample index.
    pub violations: Vec<Violation>,
    /// `tau_root` minus the largest non-real margin seen: positive when every
    /// sample is real-rooted, and larger the further the worst sample is from failing.
    pub min_real_margin: f64,
    /// Smallest gap between distinct roots over real-rooted samples; 0 when
    /// some sample has a multiple root, `+inf` when no sample has two roots.
    pub min_gap_observed: f64,
    /// Samples whose combination is the zero polynomial.
    pub zero_samples: usize,
    pub seed: u64,
}

/// The `k`-th weight vector of the sampling sequence for `n` members.
pub fn sample_weights(n: usize, k: usize, seed: u64) -> Vec<f64> {
    if let Some(w) = deterministic_point(n, k) {
        return w;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    // Normalised unit exponentials are Dirichlet(1, ..., 1).
    let mut w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    } else {
        let i = rng.gen_range(0..n);
        w.iter_mut().enumerate().for_each(|(j, x)| *x = f64::from(u8::from(j == i)));
    }
    w
}

/// Vertices, then edge midpoints in lexicographic order, then the centroid
/// (listed only for three or more members, where it is a new point).
fn deterministic_point(n: usize, k: usize) -> Option<Vec<f64>> {
    let mut w = vec![0.0; n];
    if k < n {
        w[k] = 1.0;
        return Some(w);
    }
    let mut e = k - n;
    for i in 0..n {
        let row = n - 1 - i;
        if e < row {
            w[i] = 0.5;
            w[i + 1 + e] = 0.5;
            return Some(w);
        }
        e -= row;
    }
    (e == 0 && n >= 3).then(|| vec![1.0 / n as f64; n])
}

struct Sample {
    margin: f64,
    min_gap: f64,
    zero: bool,
}

fn evaluate(p: &Poly, tol: &Tolerances) -> Sample {
    match analyze(p, tol) {
        Err(_) => Sample {
            margin: 0.0,
            min_gap: f64::INFINITY,
            zero: true,
        },
        Ok(a) => {
            let mut gap = f64::INFINITY;
            if a.real.iter().any(|r| r.1 > 1) {
                gap = 0.0;
            }
            for w in a.real.windows(2) {
                gap = gap.min(w[0].0 - w[1].0);
            }
            Sample {
                margin: a.margin,
                min_gap: gap,
                zero: false,
            }
        }
    }
}

/// Evaluates `n_samples` convex combinations of `family`.
pub fn sample_convex_combinations(
    family: &Family,
    n_samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> OracleReport {
    let n = family.len();
    let results: Vec<(Vec<f64>, Sample)> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let w = sample_weights(n, k, seed);
            let s = evaluate(&family.combine(&w), tol);
            (w, s)
        })
        .collect();
    let mut violations = Vec::new();
    let mut worst = 0.0_f64;
    let mut min_gap = f64::INFINITY;
    let mut zero_samples = 0;
    for (k, (w, s)) in results.into_iter().enumerate() {
        worst = worst.max(s.margin);
        zero_samples += usize::from(s.zero);
        if s.margin > tol.tau_root {
            violations.push(Violation {
                sample: k,
                weights: w,
                margin: s.margin,
            });
        } else {
            min_gap = min_gap.min(s.min_gap);
        }
    }
    OracleReport {
        samples: n_samples,
        violations,
        min_real_margin: tol.tau_root - worst,
        min_gap_observed: min_gap,
        zero_samples,
        seed,
    }
}

/// One row of an edge scan: real spectrum (descending, with multiplicity) or
/// a non-real flag with its margin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub s: f64,
    pub roots: Option<Vec<f64>>,
    pub complex_margin: f64,
    pub is_zero: bool,
}

/// Spectra of `(1 - s) f + s g` at `k` equispaced `s` in `[0, 1]`.
pub fn edge_scan(f: &Poly, g: &Poly, k: usize, tol: &Tolerances) -> Vec<ScanRow> {
    assert!(k >= 2, "an edge scan needs at least two points");
    let fam = Family::new(vec![f.clone(), g.clone()]).expect("edge endpoints share an ambient degree");
    (0..k)
        .map(|i| {
            let s = i as f64 / (k - 1) as f64;
            let p = fam.combine(&[1.0 - s, s]);
            match analyze(&p, tol) {
                Err(_) => ScanRow {
                    s,
                    roots: None,
                    complex_margin: 0.0,
                    is_zero: true,
                },
                Ok(a) if a.complex.is_empty() => ScanRow {
                    s,
                    roots: Some(
                        a.real
                            .iter()
                            .flat_map(|&(r, m)| std::iter::repeat_n(r, m))
                            .collect(),
                    ),
                    complex_margin: a.margin,
                    is_zero: false,
                },
                Ok(a) => ScanRow {
                    s,
                    roots: None,
                    complex_margin: a.margin,
                    is_zero: false,
                },
            }
        })
        .collect()
}

/// CSV with header `s,root_1,...,root_d,complex_margin`. Missing roots (roots
/// at infinity, non-real or zero rows) leave their columns empty.
pub fn scan_to_csv(rows: &[ScanRow], d: usize) -> String {
    let mut out = String::from("s");
    for j in 1..=d {
        out.push_str(&format!(",root_{j}"));
    }
    out.push_str(",complex_margin\n");
    for row in rows {
        out.push_str(&format!("{}", row.s));
        for j in 0..d {
            out.push(',');
            if let Some(r) = row.roots.as_ref().and_then(|r| r.get(j)) {
                out.push_str(&format!("{r}"));
            }
        }
        out.push(',');
        if row.roots.is_none() {
            out.push_str(&format!("{}", row.complex_margin));
        }
        out.push('\n');
    }
    out
}
