//! Perturbations that push a compatible family's simplex away from
//! non-simple roots, and the reduction of non-proper combinations.

use crate::error::{Error, Result};
use crate::interlace::{common_interleaver, interlaces, InterleaverFailure};
use crate::mobius::{rotation_to_infinity, separated_point};
use crate::poly::{strip_common_roots, Family, Poly};
use crate::rootfind::real_roots;
use crate::tolerance::Tolerances;

use super::proper::zero_convex_combination;
use super::{decide_small, triples, Verdict};

fn require_proper(family: &Family, tol: &Tolerances) -> Result<()> {
    match zero_convex_combination(family, tol) {
        Some(weights) => Err(Error::NotProper { weights }),
        None => Ok(()),
    }
}

/// Fails with `Not3Compatible` on the first triple (or the pair, for two
/// members) proven incompatible. Inconclusive triples pass.
fn require_3_compatible(family: &Family, tol: &Tolerances) -> Result<()> {
    let n = family.len();
    if n < 3 {
        let r = decide_small(family, tol)?;
        if r.verdict == Verdict::Incompatible {
            return Err(Error::Not3Compatible {
                triple: (0..n).collect(),
            });
        }
        return Ok(());
    }
    for t in triples(n) {
        if decide_small(&family.select(&t), tol)?.verdict == Verdict::Incompatible {
            return Err(Error::Not3Compatible { triple: t.to_vec() });
        }
    }
    Ok(())
}

/// `f_i + epsilon * sum_j f_j` for a proper, 3-compatible family without a
/// root shared by every member (finite or at infinity).
pub fn perturb_family_mean(family: &Family, epsilon: f64, tol: &Tolerances) -> Result<Family> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    super::check_real_rooted(family, tol)?;
    require_proper(family, tol)?;
    let d = family.ambient_degree();
    if family
        .members()
        .iter()
        .all(|p| p.effective_degree(tol).degree().is_none_or(|k| k < d))
    {
        return Err(Error::CommonRootPresent {
            root: f64::INFINITY,
        });
    }
    let stripped = strip_common_roots(family, tol)?;
    if let Some(&root) = stripped.shared_roots.first() {
        return Err(Error::CommonRootPresent { root });
    }
    require_3_compatible(family, tol)?;
    let mean = family.sum();
    Ok(family.map(|p| p.add(&mean.scaled(epsilon))))
}

/// Root-shift perturbation of a proper compatible family: in a frame where
/// the interleaver `g` and every member have full degree and `g` has positive
/// leading coefficient, roots move by
/// `lambda_j(g) - 3j eps`, `lambda_j(f_i) - (3j + 1/i) eps` for positive members
/// (numbered `1..=m`) and `lambda_j(f_k) - (3j - 1/k) eps` for negative members
/// (numbered `m+1..=n`). `epsilon` halves until the result interlaces strictly.
pub fn simplex_interior_perturbation(
    family: &Family,
    epsilon: f64,
    tol: &Tolerances,
) -> Result<Family> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    super::check_real_rooted(family, tol)?;
    require_proper(family, tol)?;
    let res = common_interleaver(family, tol)?;
    let g = match (res.witness, res.failure_reason) {
        (Some(g), _) => g,
        (None, Some(InterleaverFailure::NotProper)) => {
            return Err(Error::NotProper {
                weights: zero_convex_combination(family, tol).unwrap_or_default(),
            })
        }
        (None, Some(InterleaverFailure::RetryBudgetExhausted)) => {
            return Err(Error::RetryBudgetExhausted {
                attempts: res.attempts,
            })
        }
        (None, _) => return Err(Error::NotCompatible),
    };

    let mut roots: Vec<f64> = real_roots(&g, tol)?.lambdas();
    for p in family.members() {
        roots.extend(real_roots(p, tol)?.lambdas());
    }
    let spread = roots.iter().fold(1.0_f64, |m, r| m.max(r.abs()));
    let t0 = separated_point(&roots, 10.0 * tol.tau_root * spread).unwrap_or(3.0 * spread);
    let m = rotation_to_infinity(t0);
    let d = family.ambient_degree();
    let mut rg = m.push_forward(&g);
    // Joint negation keeps every relation f_i << g intact.
    let flip = if rg.coeffs()[d] < 0.0 { -1.0 } else { 1.0 };
    rg = rg.scaled(flip);
    let rf: Vec<Poly> = family
        .members()
        .iter()
        .map(|p| m.push_forward(p).scaled(flip))
        .collect();
    let g_roots = real_roots(&rg, tol)?.lambdas();
    let f_roots: Vec<Vec<f64>> = rf
        .iter()
        .map(|p| real_roots(p, tol).map(|s| s.lambdas()))
        .collect::<Result<_>>()?;
    if g_roots.len() != d || f_roots.iter().any(|r| r.len() != d) {
        return Err(Error::RetryBudgetExhausted { attempts: 0 });
    }
    // Positive members are numbered 1..=m in family order, negative ones m+1..=n.
    let positive: Vec<usize> = (0..rf.len()).filter(|&i| rf[i].coeffs()[d] > 0.0).collect();
    let negative: Vec<usize> = (0..rf.len()).filter(|&i| rf[i].coeffs()[d] < 0.0).collect();
    let mut offset = vec![0.0; rf.len()];
    for (pos, &i) in positive.iter().enumerate() {
        offset[i] = 1.0 / (pos + 1) as f64;
    }
    for (pos, &k) in negative.iter().enumerate() {
        offset[k] = -1.0 / (positive.len() + pos + 1) as f64;
    }

    let mut eps = epsilon;
    let mut attempts = 0;
    while attempts < tol.max_retries.max(1) {
        attempts += 1;
        let shift = |roots: &[f64], extra: f64| -> Vec<f64> {
            roots
                .iter()
                .enumerate()
                .map(|(j, r)| r - (3.0 * (j + 1) as f64 + extra) * eps)
                .collect()
        };
        let gt_roots = shift(&g_roots, 0.0);
        let ft_roots: Vec<Vec<f64>> = f_roots
            .iter()
            .zip(&offset)
            .map(|(r, &o)| shift(r, o))
            .collect();
        let mut all: Vec<f64> = gt_roots.clone();
        all.extend(ft_roots.iter().flatten());
        all.sort_by(|a, b| a.total_cmp(b));
        let gap = all.windows(2).fold(f64::INFINITY, |m, w| m.min(w[1] - w[0]));
        // Halving only shrinks the gap, so a gap below resolution is final.
        if gap <= tol.tau_sign * (1.0 + spread_of(&all)) {
            break;
        }
        let gt = m.act(&Poly::from_roots(flip * rg.coeffs()[d], &gt_roots, d));
        let members: Vec<Poly> = rf
            .iter()
            .zip(&ft_roots)
            .map(|(p, r)| m.act(&Poly::from_roots(flip * p.coeffs()[d], r, d)))
            .collect();
        if members
            .iter()
            .all(|f| interlaces(f, &gt, tol).unwrap_or(false))
        {
            let mut fam = Family::new(members)?;
            if let Some(labels) = family.labels() {
                fam = fam.with_labels(labels.to_vec())?;
            }
            return Ok(fam);
        }
        eps *= 0.5;
    }
    Err(Error::RetryBudgetExhausted { attempts })
}

fn spread_of(roots: &[f64]) -> f64 {
    roots.iter().fold(1.0_f64, |m, r| m.max(r.abs()))
}

/// Removes the largest multiple `s` of a zero combination `zero` from the
/// convex weights `weights` such that the result stays nonnegative; the result
/// has at least one fewer member in its support and the same combination.
/// Returns the reduced weights and `s`.
pub fn nonproper_reduction(weights: &[f64], zero: &[f64]) -> (Vec<f64>, f64) {
    let s = weights
        .iter()
        .zip(zero)
        .filter(|(_, &z)| z > 0.0)
        .map(|(&w, &z)| w / z)
        .fold(f64::INFINITY, f64::min);
    let s = if s.is_finite() { s } else { 0.0 };
    let reduced = weights
        .iter()
        .zip(zero)
        .map(|(&w, &z)| {
            let v = w - s * z;
            if v.abs() <= 8.0 * f64::EPSILON * w.abs().max(s * z.abs()) {
                0.0
            } else {
                v.max(0.0)
            }
        })
        .collect();
    (reduced, s)
}
