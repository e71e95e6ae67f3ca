//! Compatibility deciders, properness, perturbations and non-simple-root diagnostics.
//!
//! A family is decided triple by triple. A proper triple is compatible exactly
//! when it has a common interleaver; a triple with a vanishing convex
//! combination `a f_i + b f_j + c f_k = 0` (`a >= 0`, `b, c > 0`) is
//! compatible exactly when `f_i`, `f_j` interlace one way or the other.
//! Negative verdicts are always backed by an explicit non-real-rooted
//! combination whose margin clears `10 * tau_root`; anything weaker is
//! reported as inconclusive.

mod diagnostics;
mod perturb;
pub mod proper;
pub mod search;

use serde::{Deserialize, Serialize};

pub use diagnostics::{nonsimple_root_diagnostics, NonSimpleDiagnostic, SignEntry};
pub use perturb::{nonproper_reduction, perturb_family_mean, simplex_interior_perturbation};
pub use proper::{min_norm_convex_combination, zero_convex_combination};

use crate::error::{Error, Result};
use crate::interlace::{common_interleaver, hko_pair, interlaces, InterleaverFailure};
use crate::poly::{Family, Poly};
use crate::rootfind::is_real_rooted;
use crate::tolerance::Tolerances;

/// Counterexamples must clear `tau_root` by this factor to count as incompatible.
pub const MARGIN_BAND: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Compatible,
    Incompatible,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Witness {
    /// Every member interlaces `poly`.
    Interleaver { poly: Poly },
    /// `sum weights_i f_i = 0` and the named pair interlaces one way or the other.
    ZeroComboPlusInterlacing { weights: Vec<f64>, pair: [usize; 2] },
    /// `sum weights_i f_i` is not real-rooted.
    Counterexample { weights: Vec<f64>, margin: f64 },
    /// The members at `indices` combined with `weights` are not real-rooted.
    TripleCounterexample {
        indices: Vec<usize>,
        weights: Vec<f64>,
        margin: f64,
    },
    /// The strongest evidence found sits inside the tolerance band.
    MarginBand { margin: f64 },
    /// Every triple is compatible; no single interleaver is attached.
    AllTriplesCompatible,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    /// Smallest normalised residual of a convex combination.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properness_residual: Option<f64>,
    /// Largest non-real margin found by the counterexample search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_margin: Option<f64>,
    /// Perturbation attempts spent by the interleaver search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interleaver_attempts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interleaver_failure: Option<InterleaverFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatReport {
    pub verdict: Verdict,
    pub witness: Witness,
    pub margins: Margins,
    pub triples_checked: usize,
}

impl CompatReport {
    fn new(verdict: Verdict, witness: Witness) -> Self {
        CompatReport {
            verdict,
            witness,
            margins: Margins::default(),
            triples_checked: 0,
        }
    }

    /// Re-checks the witness against `family` independently of how it was produced.
    pub fn verify(&self, family: &Family, tol: &Tolerances) -> bool {
        let check = || -> Result<bool> {
            Ok(match &self.witness {
                Witness::Interleaver { poly } => {
                    let mut ok = true;
                    for f in family.members() {
                        ok &= interlaces(f, poly, tol)?;
                    }
                    ok
                }
                Witness::ZeroComboPlusInterlacing { weights, pair } => {
                    let combo = family.linear_combination(weights)?;
                    let reference = weights
                        .iter()
                        .zip(family.members())
                        .fold(0.0_f64, |m, (w, p)| m.max(w.abs() * p.scale()));
                    combo.scale() <= tol.tau_proper * reference.max(f64::MIN_POSITIVE)
                        && hko_pair(family.get(pair[0]), family.get(pair[1]), tol)?
                }
                Witness::Counterexample { weights, .. } => {
                    let p = family.linear_combination(weights)?;
                    !p.is_zero() && is_real_rooted(&p, tol)?.margin > tol.tau_root
                }
                Witness::TripleCounterexample {
                    indices, weights, ..
                } => {
                    let sub = family.select(indices);
                    let p = sub.linear_combination(weights)?;
                    !p.is_zero() && is_real_rooted(&p, tol)?.margin > tol.tau_root
                }
                Witness::MarginBand { .. } | Witness::AllTriplesCompatible => true,
            })
        };
        check().unwrap_or(false)
    }
}

/// Fails with `NotRealRootedInput` for the first member that is not real-rooted.
pub fn check_real_rooted(family: &Family, tol: &Tolerances) -> Result<()> {
    for (i, p) in family.members().iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let r = is_real_rooted(p, tol)?;
        if r.margin > tol.tau_root {
            return Err(Error::NotRealRootedInput {
                index: i,
                margin: r.margin,
            });
        }
    }
    Ok(())
}

/// Counterexample over the whole of `family`, or an inconclusive band report.
fn refute(family: &Family, mut report: CompatReport, tol: &Tolerances) -> CompatReport {
    let face: Vec<usize> = (0..family.len()).collect();
    let (weights, margin) = search::worst_combination(family, &face, tol);
    report.margins.counterexample_margin = Some(margin);
    if margin > MARGIN_BAND * tol.tau_root {
        report.verdict = Verdict::Incompatible;
        report.witness = Witness::Counterexample { weights, margin };
    } else {
        report.verdict = Verdict::Inconclusive;
        report.witness = Witness::MarginBand { margin };
    }
    report
}

fn normalized(p: &Poly) -> Poly {
    let s = p.scale();
    if s == 0.0 {
        p.clone()
    } else {
        p.scaled(1.0 / s)
    }
}

/// Proper-family decision: interleaver, else counterexample search.
fn decide_proper(family: &Family, residual: f64, tol: &Tolerances) -> Result<CompatReport> {
    let res = common_interleaver(family, tol)?;
    let mut report = CompatReport::new(Verdict::Inconclusive, Witness::MarginBand { margin: 0.0 });
    report.margins.properness_residual = Some(residual);
    report.margins.interleaver_attempts = Some(res.attempts);
    report.margins.interleaver_failure = res.failure_reason;
    if let Some(g) = res.witness {
        report.verdict = Verdict::Compatible;
        report.witness = Witness::Interleaver { poly: g };
        return Ok(report);
    }
    Ok(refute(family, report, tol))
}

/// Pair decision: compatible iff the pair has a common interleaver or is a
/// negative multiple of the other (`a f = -b g`).
pub fn pair_compatible(f: &Poly, g: &Poly, tol: &Tolerances) -> Result<CompatReport> {
    let family = Family::new(vec![f.clone(), g.clone()])?;
    check_real_rooted(&family, tol)?;
    decide_small(&family, tol)
}

/// Triple decision following the zero-combination / interleaver split.
pub fn triple_compatible(f1: &Poly, f2: &Poly, f3: &Poly, tol: &Tolerances) -> Result<CompatReport> {
    let family = Family::new(vec![f1.clone(), f2.clone(), f3.clone()])?;
    check_real_rooted(&family, tol)?;
    decide_small(&family, tol)
}

/// Decides a family of at most three real-rooted members.
fn decide_small(family: &Family, tol: &Tolerances) -> Result<CompatReport> {
    let n = family.len();
    debug_assert!(n <= 3);
    let nonzero: Vec<usize> = (0..n).filter(|&i| !family.get(i).is_zero()).collect();
    if nonzero.len() < n {
        // Zero members contribute nothing to the simplex.
        let mut report = if nonzero.is_empty() {
            CompatReport::new(Verdict::Compatible, Witness::AllTriplesCompatible)
        } else {
            let sub = family.select(&nonzero);
            lift(decide_small(&sub, tol)?, &nonzero, n)
        };
        report.triples_checked = usize::from(n == 3);
        return Ok(report);
    }
    if n == 1 {
        let mut r = CompatReport::new(
            Verdict::Compatible,
            Witness::Interleaver {
                poly: normalized(family.get(0)),
            },
        );
        r.margins.properness_residual = Some(1.0);
        return Ok(r);
    }
    let (weights, residual) = min_norm_convex_combination(family);
    let zero = if tol.exact_rational {
        proper::exact_zero_convex_combination(family)
    } else {
        (residual <= tol.tau_proper).then(|| weights.clone())
    };
    let mut report = match zero {
        None => decide_proper(family, residual, tol)?,
        Some(w) => {
            // Smallest weight plays the role of `a >= 0`; pair it with the next member.
            let i = (0..n)
                .min_by(|&a, &b| w[a].total_cmp(&w[b]))
                .expect("family is nonempty");
            let j = (0..n).find(|&j| j != i).expect("at least two members");
            let mut report = if hko_pair(family.get(i), family.get(j), tol)? {
                CompatReport::new(
                    Verdict::Compatible,
                    Witness::ZeroComboPlusInterlacing {
                        weights: w,
                        pair: [i.min(j), i.max(j)],
                    },
                )
            } else {
                refute(
                    family,
                    CompatReport::new(Verdict::Inconclusive, Witness::MarginBand { margin: 0.0 }),
                    tol,
                )
            };
            report.margins.properness_residual = Some(residual);
            report
        }
    };
    report.triples_checked = usize::from(n == 3);
    Ok(report)
}

/// Re-indexes a report on a sub-family back to the parent family.
fn lift(mut report: CompatReport, indices: &[usize], n: usize) -> CompatReport {
    let spread = |w: &[f64]| {
        let mut out = vec![0.0; n];
        for (&i, &x) in indices.iter().zip(w) {
            out[i] = x;
        }
        out
    };
    report.witness = match report.witness {
        Witness::ZeroComboPlusInterlacing { weights, pair } => Witness::ZeroComboPlusInterlacing {
            weights: spread(&weights),
            pair: [indices[pair[0]], indices[pair[1]]],
        },
        Witness::Counterexample { weights, margin } => Witness::Counterexample {
            weights: spread(&weights),
            margin,
        },
        Witness::TripleCounterexample {
            indices: sub,
            weights,
            margin,
        } => Witness::TripleCounterexample {
            indices: sub.iter().map(|&k| indices[k]).collect(),
            weights,
            margin,
        },
        other => other,
    };
    report
}

/// All `C(n, 3)` index triples in lexicographic order.
pub fn triples(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k]))
    })
}

/// Family decision over all triples. The first incompatible triple (in
/// lexicographic order) is reported; any inconclusive triple makes the whole
/// verdict inconclusive unless an incompatible one exists. Compatible proper
/// families carry a common interleaver when one is found.
pub fn family_compatible(family: &Family, tol: &Tolerances) -> Result<CompatReport> {
    check_real_rooted(family, tol)?;
    let n = family.len();
    if n < 3 {
        return decide_small(family, tol);
    }
    let mut checked = 0;
    let mut band: Option<(Vec<usize>, f64)> = None;
    for t in triples(n) {
        let sub = family.select(&t);
        let r = decide_small(&sub, tol)?;
        checked += 1;
        match r.verdict {
            Verdict::Compatible => {}
            Verdict::Incompatible => {
                let (weights, margin) = match r.witness {
                    Witness::Counterexample { weights, margin } => (weights, margin),
                    _ => unreachable!("incompatible triples carry a counterexample"),
                };
                let mut report = CompatReport::new(
                    Verdict::Incompatible,
                    Witness::TripleCounterexample {
                        indices: t.to_vec(),
                        weights,
                        margin,
                    },
                );
                report.margins = r.margins;
                report.triples_checked = checked;
                return Ok(report);
            }
            Verdict::Inconclusive => {
                if band.is_none() {
                    let m = r.margins.counterexample_margin.unwrap_or(0.0);
                    band = Some((t.to_vec(), m));
                }
            }
        }
    }
    if let Some((_, margin)) = band {
        let mut report = CompatReport::new(Verdict::Inconclusive, Witness::MarginBand { margin });
        report.margins.counterexample_margin = Some(margin);
        report.triples_checked = checked;
        return Ok(report);
    }
    let (_, residual) = min_norm_convex_combination(family);
    let zero = if tol.exact_rational {
        proper::exact_zero_convex_combination(family).is_some()
    } else {
        residual <= tol.tau_proper
    };
    let mut report = CompatReport::new(Verdict::Compatible, Witness::AllTriplesCompatible);
    report.margins.properness_residual = Some(residual);
    if !zero && family.members().iter().all(|p| !p.is_zero()) {
        let res = common_interleaver(family, tol)?;
        report.margins.interleaver_attempts = Some(res.attempts);
        report.margins.interleaver_failure = res.failure_reason;
        if let Some(g) = res.witness {
            report.witness = Witness::Interleaver { poly: g };
        }
    }
    report.triples_checked = checked;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Poly {
        Poly::new(c.to_vec())
    }
    fn g() -> Poly {
        p(&[-3.0, 2.0, 1.0])
    }
    fn h() -> Poly {
        p(&[-3.0, -2.0, 1.0])
    }
    fn f(r: f64) -> Poly {
        p(&[r * r, 0.0, -1.0])
    }

    #[test]
    fn pair_examples() {
        let tol = Tolerances::default();
        assert_eq!(pair_compatible(&f(2.0), &g(), &tol).unwrap().verdict, Verdict::Compatible);
        let r = pair_compatible(&f(0.5), &g(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Incompatible);
        assert!(r.verify(&Family::new(vec![f(0.5), g()]).unwrap(), &tol));
        assert_eq!(pair_compatible(&g(), &h(), &tol).unwrap().verdict, Verdict::Compatible);
        // a f = -b g degeneracy.
        let t = p(&[0.0, 1.0]);
        let r = pair_compatible(&t, &t.scaled(-2.0), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
    }

    #[test]
    fn triple_examples() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![f(3f64.sqrt()), g(), h()]).unwrap();
        let r = triple_compatible(&f(3f64.sqrt()), &g(), &h(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
        assert!(matches!(r.witness, Witness::ZeroComboPlusInterlacing { .. }));
        assert!(r.verify(&fam, &tol));

        let r = triple_compatible(&f(2.0), &g(), &h(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Incompatible);
        assert!(r.verify(&Family::new(vec![f(2.0), g(), h()]).unwrap(), &tol));

        let t = p(&[0.0, 1.0]);
        let r = triple_compatible(&t, &t.neg(), &t, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
    }

    #[test]
    fn exact_mode_triple() {
        let tol = Tolerances {
            exact_rational: true,
            ..Tolerances::default()
        };
        let r = triple_compatible(&p(&[3.0, 0.0, -1.0]), &g(), &h(), &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
        if let Witness::ZeroComboPlusInterlacing { weights, .. } = &r.witness {
            assert_eq!(weights, &vec![0.5, 0.25, 0.25]);
        } else {
            panic!("expected the zero-combination branch");
        }
    }

    #[test]
    fn family_examples() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![
            p(&[0.0, -2.0, 1.0]),
            p(&[3.0, -4.0, 1.0]),
            p(&[8.0, -6.0, 1.0]),
        ])
        .unwrap();
        let r = family_compatible(&fam, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
        assert!(matches!(r.witness, Witness::Interleaver { .. }));
        assert!(r.verify(&fam, &tol));
        assert_eq!(r.triples_checked, 1);

        let fam = Family::new(vec![f(2.0), g(), h(), p(&[-3.0, 0.0, 1.0])]).unwrap();
        let r = family_compatible(&fam, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Incompatible);
        match &r.witness {
            Witness::TripleCounterexample { indices, .. } => assert_eq!(indices, &vec![0, 1, 2]),
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(r.verify(&fam, &tol));

        let fam = Family::new(vec![g()]).unwrap();
        assert_eq!(family_compatible(&fam, &tol).unwrap().verdict, Verdict::Compatible);
    }

    #[test]
    fn zero_members_are_harmless() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![g(), Poly::zero(2), h()]).unwrap();
        let r = family_compatible(&fam, &tol).unwrap();
        assert_eq!(r.verdict, Verdict::Compatible);
    }

    #[test]
    fn rejects_non_real_rooted_members() {
        let tol = Tolerances::default();
        let fam = Family::new(vec![g(), p(&[1.0, 0.0, 1.0])]).unwrap();
        assert!(matches!(
            family_compatible(&fam, &tol),
            Err(Error::NotRealRootedInput { index: 1, .. })
        ));
    }

    #[test]
    fn report_json_shape() {
        let tol = Tolerances::default();
        let r = triple_compatible(&f(2.0), &g(), &h(), &tol).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "Incompatible");
        assert_eq!(v["witness"]["kind"], "Counterexample");
        assert!(v["margins"].is_object());
        assert_eq!(v["triples_checked"], 1);
    }
}
