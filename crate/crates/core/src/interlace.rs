//! The interlacing relation `f << g`, Wronskian signs, the pair test and
//! common interleavers.
//!
//! `f << g` is the base root-alternation relation
//! `lambda_1(g) >= lambda_1(f) >= lambda_2(g) >= ...` for positive leading
//! coefficients, closed under `f << g => g << -f`, with `0 << f` and `f << 0`.
//! Unwinding the closure: equal leading signs compare roots of `(f, g)`,
//! opposite signs compare roots of `(g, f)`.

use serde::{Deserialize, Serialize};

use crate::compat::proper::zero_convex_combination;
use crate::error::{Error, Result};
use crate::mobius::{rotation_to_infinity, separated_point};
use crate::poly::{product_of_linears, strip_common_roots, Family, Poly};
use crate::rootfind::{real_clusters, real_roots};
use crate::tolerance::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignClass {
    NonPositive,
    NonNegative,
    IdenticallyZero,
    Indefinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterleaverFailure {
    NotPairwiseConsistent,
    NotProper,
    RetryBudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterleaverResult {
    pub witness: Option<Poly>,
    pub failure_reason: Option<InterleaverFailure>,
    /// Perturbation attempts spent on the mixed-sign path (0 on the direct path).
    pub attempts: usize,
}

impl InterleaverResult {
    fn found(g: Poly, attempts: usize) -> Self {
        InterleaverResult {
            witness: Some(g),
            failure_reason: None,
            attempts,
        }
    }

    fn failed(reason: InterleaverFailure, attempts: usize) -> Self {
        InterleaverResult {
            witness: None,
            failure_reason: Some(reason),
            attempts,
        }
    }
}

/// Roots (descending, with multiplicity) and leading sign of a real-rooted polynomial.
#[derive(Clone, Debug)]
pub(crate) struct Signed {
    pub lambdas: Vec<f64>,
    /// `+1`, `-1`, or `0` for the zero polynomial.
    pub sign: i8,
}

pub(crate) fn signed_spectrum(p: &Poly, index: usize, tol: &Tolerances) -> Result<Signed> {
    if p.is_zero() {
        return Ok(Signed {
            lambdas: Vec::new(),
            sign: 0,
        });
    }
    let spectrum = real_roots(p, tol).map_err(|e| match e {
        Error::NotRealRooted { margin } => Error::NotRealRootedInput { index, margin },
        other => other,
    })?;
    let sign = if p.leading_coefficient(tol) > 0.0 { 1 } else { -1 };
    Ok(Signed {
        lambdas: spectrum.lambdas(),
        sign,
    })
}

fn spread_of(lists: &[&[f64]]) -> f64 {
    lists
        .iter()
        .flat_map(|l| l.iter())
        .fold(1.0_f64, |m, r| m.max(r.abs()))
}

/// Base alternation `lambda_1(g) >= lambda_1(f) >= lambda_2(g) >= ...` with
/// `deg f` equal to `deg g` or one less.
fn base(f: &[f64], g: &[f64], slack: f64) -> bool {
    if f.len() != g.len() && f.len() + 1 != g.len() {
        return false;
    }
    let mut prev = f64::INFINITY;
    for j in 0..g.len() {
        for x in [Some(g[j]), f.get(j).copied()].into_iter().flatten() {
            if x > prev + slack {
                return false;
            }
            prev = x;
        }
    }
    true
}

pub(crate) fn interlaces_signed(f: &Signed, g: &Signed, tol: &Tolerances) -> bool {
    if f.sign == 0 || g.sign == 0 {
        return true;
    }
    let slack = tol.tau_root * spread_of(&[&f.lambdas, &g.lambdas]);
    if f.sign == g.sign {
        base(&f.lambdas, &g.lambdas, slack)
    } else {
        base(&g.lambdas, &f.lambdas, slack)
    }
}

/// `f << g` within `tau_root` slack on root comparisons.
pub fn interlaces(f: &Poly, g: &Poly, tol: &Tolerances) -> Result<bool> {
    let fs = signed_spectrum(f, 0, tol)?;
    let gs = signed_spectrum(g, 1, tol)?;
    Ok(interlaces_signed(&fs, &gs, tol))
}

/// `f << g` or `g << f`: equivalently, every real combination `af + bg` is real-rooted.
pub fn hko_pair(f: &Poly, g: &Poly, tol: &Tolerances) -> Result<bool> {
    let fs = signed_spectrum(f, 0, tol)?;
    let gs = signed_spectrum(g, 1, tol)?;
    Ok(interlaces_signed(&fs, &gs, tol) || interlaces_signed(&gs, &fs, tol))
}

/// `W[f, g] = f' g - g' f` in `R^{2d-2}[t]` together with its sign class on the real line.
///
/// Coefficients are accumulated pairwise as `(j - i)(a_j b_i - a_i b_j)`, which
/// makes `W[g, f] = -W[f, g]` hold bit for bit.
pub fn wronskian(f: &Poly, g: &Poly, tol: &Tolerances) -> (Poly, SignClass) {
    let d = f.ambient_degree().max(g.ambient_degree());
    let a = f.embed(d);
    let b = g.embed(d);
    let (a, b) = (a.coeffs(), b.coeffs());
    let out_deg = (2 * d).saturating_sub(2);
    let mut w = vec![0.0; out_deg + 1];
    for j in 1..=d {
        for i in 0..j {
            let k = i + j - 1;
            w[k] += (j - i) as f64 * (a[j] * b[i] - a[i] * b[j]);
        }
    }
    let w = Poly::new(w);
    let class = sign_class(&w, f.scale() * g.scale(), tol);
    (w, class)
}

fn sign_class(w: &Poly, reference: f64, tol: &Tolerances) -> SignClass {
    if w.scale() <= tol.tau_zero * reference {
        return SignClass::IdenticallyZero;
    }
    let mut xs: Vec<f64> = real_clusters(w, tol)
        .map(|c| c.into_iter().map(|r| r.0).collect())
        .unwrap_or_default();
    xs.sort_by(|a, b| a.total_cmp(b));
    let spread = xs.iter().fold(1.0_f64, |m, r| m.max(r.abs()));
    let mut samples = vec![-2.0 * spread, 2.0 * spread];
    samples.extend(xs.windows(2).map(|p| 0.5 * (p[0] + p[1])));
    let (mut pos, mut neg) = (false, false);
    let mut total = 0.0;
    for x in samples {
        let v = w.eval(x);
        let thr = tol.tau_sign * w.eval_abs(x);
        pos |= v > thr;
        neg |= v < -thr;
        total += v;
    }
    match (pos, neg) {
        (true, true) => SignClass::Indefinite,
        (true, false) => SignClass::NonNegative,
        (false, true) => SignClass::NonPositive,
        (false, false) if total > 0.0 => SignClass::NonNegative,
        (false, false) => SignClass::NonPositive,
    }
}

/// A real-rooted `g` with `f_i << g` for every member, or the reason none was found.
///
/// Same-sign families take the direct route `lambda_j(g) = max_i lambda_j(f_i)`.
/// Mixed-sign families are rotated so that one sign class can be pushed to
/// infinity; see [`InterleaverResult::attempts`] for the perturbation budget used.
pub fn common_interleaver(family: &Family, tol: &Tolerances) -> Result<InterleaverResult> {
    if let Some(i) = family.members().iter().position(Poly::is_zero) {
        return Err(Error::ZeroMember { index: i });
    }
    let spectra: Vec<Signed> = family
        .members()
        .iter()
        .enumerate()
        .map(|(i, p)| signed_spectrum(p, i, tol))
        .collect::<Result<_>>()?;
    let d = family.ambient_degree();
    let same_sign = spectra.iter().all(|s| s.sign == spectra[0].sign);
    let near_full = spectra.iter().all(|s| s.lambdas.len() + 1 >= d);
    if same_sign && near_full {
        let lists: Vec<&[f64]> = spectra.iter().map(|s| s.lambdas.as_slice()).collect();
        match max_root_interleaver(&lists, d, tol) {
            Some(g) => {
                let g = if spectra[0].sign < 0 { g.neg() } else { g };
                if verify(&spectra, &g, tol) {
                    return Ok(InterleaverResult::found(g, 0));
                }
            }
            None if spectra.iter().all(|s| s.lambdas.len() == d) => {
                return Ok(InterleaverResult::failed(
                    InterleaverFailure::NotPairwiseConsistent,
                    0,
                ));
            }
            None => {}
        }
    }
    mixed_interleaver(family, &spectra, tol)
}

fn verify(spectra: &[Signed], g: &Poly, tol: &Tolerances) -> bool {
    match signed_spectrum(g, 0, tol) {
        Ok(gs) => spectra.iter().all(|f| interlaces_signed(f, &gs, tol)),
        Err(_) => false,
    }
}

/// `lambda_j(g) = max_i lambda_j(f_i)` for root lists of same-sign members,
/// provided `lambda_{j+1}(f_i) <= lambda_j(f_k)` for all `i, k`. Members with a
/// root at infinity simply lack their last entry. Normalised to max coefficient 1.
fn max_root_interleaver(lists: &[&[f64]], d: usize, tol: &Tolerances) -> Option<Poly> {
    let slack = tol.tau_root * spread_of(lists);
    let top = lists.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut roots = Vec::with_capacity(top);
    for j in 0..top {
        let hi = lists
            .iter()
            .filter_map(|l| l.get(j))
            .fold(f64::NEG_INFINITY, |m, &r| m.max(r));
        roots.push(hi);
        let floor = lists
            .iter()
            .filter_map(|l| l.get(j))
            .fold(f64::INFINITY, |m, &r| m.min(r));
        let next = lists
            .iter()
            .filter_map(|l| l.get(j + 1))
            .fold(f64::NEG_INFINITY, |m, &r| m.max(r));
        if next > floor + slack {
            return None;
        }
    }
    let g = Poly::from_roots(1.0, &roots, d);
    let s = g.scale();
    Some(g.scaled(1.0 / s))
}

/// Rotation, common-root stripping, mean perturbation with a halving
/// schedule, and a second rotation that makes every leading sign agree.
fn mixed_interleaver(
    family: &Family,
    spectra: &[Signed],
    tol: &Tolerances,
) -> Result<InterleaverResult> {
    if zero_convex_combination(family, tol).is_some() {
        return Ok(InterleaverResult::failed(InterleaverFailure::NotProper, 0));
    }
    let all_roots: Vec<f64> = spectra.iter().flat_map(|s| s.lambdas.iter().copied()).collect();
    let spread = spread_of(&[&all_roots]);
    let t0 = separated_point(&all_roots, 10.0 * tol.tau_root * spread).unwrap_or(3.0 * spread);
    let m1 = rotation_to_infinity(t0);
    let rotated = family.map(|p| {
        let q = m1.push_forward(p);
        q.scaled(1.0 / q.scale())
    });
    let stripped = strip_common_roots(&rotated, tol)?;
    let shared = product_of_linears(&stripped.shared_roots);
    let reduced = &stripped.reduced;
    let mean = reduced.sum();

    let original: Vec<Signed> = spectra.to_vec();
    let budget = tol.max_retries.max(1);
    let mut eps = tol.epsilon_perturb;
    for attempt in 1..=budget {
        // The unperturbed family is tried first; perturbation only breaks ties.
        let e = if attempt == 1 { 0.0 } else { eps };
        if attempt > 1 {
            eps *= 0.5;
        }
        let perturbed = reduced.map(|p| p.add(&mean.scaled(e)));
        let Some(g) = rotated_interleaver(&perturbed, tol) else {
            continue;
        };
        let g = m1.act(&g.mul(&shared));
        let g = g.scaled(1.0 / g.scale());
        if verify(&original, &g, tol) {
            return Ok(InterleaverResult::found(g, attempt));
        }
    }
    Ok(InterleaverResult::failed(
        InterleaverFailure::RetryBudgetExhausted,
        budget,
    ))
}

/// Interleaver for a family whose members all have full degree, found by
/// rotating a point `s` to infinity where `s` lies above every root of one
/// sign class and between the top two roots of every member of the other.
fn rotated_interleaver(family: &Family, tol: &Tolerances) -> Option<Poly> {
    let d = family.ambient_degree();
    let spectra: Vec<Signed> = family
        .members()
        .iter()
        .map(|p| signed_spectrum(p, 0, tol).ok())
        .collect::<Option<_>>()?;
    if spectra.iter().any(|s| s.sign == 0) {
        return None;
    }
    let direct = |fam: &Family, spectra: &[Signed]| -> Option<Poly> {
        let sign = spectra[0].sign;
        if spectra.iter().any(|s| s.sign != sign || s.lambdas.len() + 1 < fam.ambient_degree()) {
            return None;
        }
        let lists: Vec<&[f64]> = spectra.iter().map(|s| s.lambdas.as_slice()).collect();
        let g = max_root_interleaver(&lists, fam.ambient_degree(), tol)?;
        Some(if sign < 0 { g.neg() } else { g })
    };
    if spectra.iter().all(|s| s.sign == spectra[0].sign) {
        return direct(family, &spectra);
    }
    let s = split_point(&spectra, 1).or_else(|| split_point(&spectra, -1))?;
    let m2 = rotation_to_infinity(s);
    let turned = family.map(|p| {
        let q = m2.push_forward(p);
        q.scaled(1.0 / q.scale())
    });
    let turned_spectra: Vec<Signed> = turned
        .members()
        .iter()
        .map(|p| signed_spectrum(p, 0, tol).ok())
        .collect::<Option<_>>()?;
    let g = direct(&turned, &turned_spectra)?;
    let back = m2.act(&g);
    debug_assert_eq!(back.ambient_degree(), d);
    Some(back)
}

/// Midpoint of the admissible interval for the rotation point when members
/// with leading sign `up` are treated as the upper class.
fn split_point(spectra: &[Signed], up: i8) -> Option<f64> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for s in spectra {
        if s.sign == up {
            if let Some(&l1) = s.lambdas.first() {
                lo = lo.max(l1);
            }
        } else {
            let l1 = *s.lambdas.first()?;
            hi = hi.min(l1);
            if let Some(&l2) = s.lambdas.get(1) {
                lo = lo.max(l2);
            }
        }
    }
    if lo.is_infinite() || hi.is_infinite() || hi <= lo {
        return None;
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }
    fn p(c: &[f64]) -> Poly {
        Poly::new(c.to_vec())
    }
    fn g() -> Poly {
        p(&[-3.0, 2.0, 1.0])
    }
    fn h() -> Poly {
        p(&[-3.0, -2.0, 1.0])
    }

    #[test]
    fn interlaces_examples() {
        let t = tol();
        assert!(interlaces(&g(), &h(), &t).unwrap());
        assert!(interlaces(&h(), &g().neg(), &t).unwrap());
        assert!(interlaces(&Poly::zero(2), &g(), &t).unwrap());
        assert!(interlaces(&g(), &Poly::zero(2), &t).unwrap());
        assert!(!interlaces(&h(), &g(), &t).unwrap());
    }

    #[test]
    fn sign_table_cases() {
        let t = tol();
        // g << h, so h << -g, -g << -h, -h << g.
        assert!(interlaces(&g().neg(), &h().neg(), &t).unwrap());
        assert!(interlaces(&h().neg(), &g(), &t).unwrap());
        assert!(!interlaces(&g(), &h().neg(), &t).unwrap());
        // (4 - t^2) << g: opposite signs compare the roots of g against (2, -2).
        assert!(interlaces(&p(&[4.0, 0.0, -1.0]), &g(), &t).unwrap());
    }

    #[test]
    fn degree_gap_and_reflexive() {
        let t = tol();
        let f = p(&[-1.0, 0.0, 1.0]);
        let x = p(&[0.0, 1.0, 0.0]);
        assert!(interlaces(&x, &f, &t).unwrap());
        assert!(!interlaces(&f, &x, &t).unwrap());
        assert!(interlaces(&f, &x.neg(), &t).unwrap());
        assert!(interlaces(&f, &f, &t).unwrap());
    }

    #[test]
    fn rejects_non_real_rooted() {
        let e = interlaces(&p(&[1.0, 0.0, 1.0]), &g(), &tol()).unwrap_err();
        assert!(matches!(e, Error::NotRealRootedInput { index: 0, .. }));
    }

    #[test]
    fn wronskian_examples() {
        let t = tol();
        let (w, c) = wronskian(&p(&[0.0, 1.0]), &p(&[-1.0, 1.0]), &t);
        assert_eq!(w, p(&[-1.0]));
        assert_eq!(c, SignClass::NonPositive);
        let (w, c) = wronskian(&g(), &h(), &t);
        assert_eq!(w, p(&[-12.0, 0.0, -4.0]));
        assert_eq!(c, SignClass::NonPositive);
        let (w, c) = wronskian(&g(), &g(), &t);
        assert!(w.is_zero());
        assert_eq!(c, SignClass::IdenticallyZero);
        let (_, c) = wronskian(&h(), &g(), &t);
        assert_eq!(c, SignClass::NonNegative);
        // Roots (2, 1) and (-1, -2) do not alternate, so W changes sign.
        let (_, c) = wronskian(&p(&[2.0, -3.0, 1.0]), &p(&[2.0, 3.0, 1.0]), &t);
        assert_eq!(c, SignClass::Indefinite);
    }

    #[test]
    fn hko_examples() {
        let t = tol();
        assert!(hko_pair(&g(), &h(), &t).unwrap());
        assert!(hko_pair(&g(), &p(&[4.0, 0.0, -1.0]), &t).unwrap());
        assert!(hko_pair(&p(&[0.0, 1.0]), &p(&[-10.0, 1.0]), &t).unwrap());
        assert!(!hko_pair(&p(&[-1.0, 0.0, 1.0]), &p(&[-16.0, 0.0, 1.0]), &t).unwrap());
    }

    fn roots_of(g: &Poly) -> Vec<f64> {
        real_roots(g, &tol()).unwrap().lambdas()
    }

    #[test]
    fn interleaver_examples() {
        let t = tol();
        let fam = Family::new(vec![p(&[0.0, -2.0, 1.0]), p(&[3.0, -4.0, 1.0])]).unwrap();
        let r = common_interleaver(&fam, &t).unwrap();
        let w = r.witness.unwrap();
        let rs = roots_of(&w);
        assert!((rs[0] - 3.0).abs() < 1e-9 && (rs[1] - 1.0).abs() < 1e-9);
        assert!((w.scale() - 1.0).abs() < 1e-15);

        let fam = Family::new(vec![g(), h()]).unwrap();
        let w = common_interleaver(&fam, &t).unwrap().witness.unwrap();
        let rs = roots_of(&w);
        assert!((rs[0] - 3.0).abs() < 1e-9 && (rs[1] + 1.0).abs() < 1e-9);

        let fam = Family::new(vec![p(&[3.0, 0.0, -1.0]), g(), h()]).unwrap();
        let r = common_interleaver(&fam, &t).unwrap();
        assert_eq!(r.failure_reason, Some(InterleaverFailure::NotProper));
    }

    #[test]
    fn inconsistent_positive_family() {
        let t = tol();
        let fam = Family::new(vec![p(&[2.0, -3.0, 1.0]), p(&[2.0, 3.0, 1.0])]).unwrap();
        let r = common_interleaver(&fam, &t).unwrap();
        assert_eq!(r.failure_reason, Some(InterleaverFailure::NotPairwiseConsistent));
        // Nested roots (1, -1) and (4, -4) are compatible without interlacing each other.
        let fam = Family::new(vec![p(&[-1.0, 0.0, 1.0]), p(&[-16.0, 0.0, 1.0])]).unwrap();
        assert!(common_interleaver(&fam, &t).unwrap().witness.is_some());
    }

    #[test]
    fn mixed_sign_interleaver() {
        let t = tol();
        // r = 2 lies in (1, 3): (4 - t^2, g) is compatible.
        let fam = Family::new(vec![p(&[4.0, 0.0, -1.0]), g()]).unwrap();
        let r = common_interleaver(&fam, &t).unwrap();
        let w = r.witness.expect("pair with r = 2 has an interleaver");
        for f in fam.members() {
            assert!(interlaces(f, &w, &t).unwrap());
        }
    }

    #[test]
    fn zero_member_rejected() {
        let fam = Family::new(vec![g(), Poly::zero(2)]).unwrap();
        assert!(matches!(
            common_interleaver(&fam, &tol()),
            Err(Error::ZeroMember { index: 1 })
        ));
    }
}
