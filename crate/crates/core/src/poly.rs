//! Polynomials living in a fixed ambient space `R^d[t]`.
//!
//! A [`Poly`] always carries exactly `d + 1` coefficients. Trailing zeros are
//! meaningful: a polynomial of actual degree `k < d` has a root at infinity of
//! multiplicity `d - k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Coefficients in ascending powers of `t`, length `ambient_degree + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

/// Outcome of [`Poly::effective_degree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degree {
    /// Every coefficient is exactly zero.
    IsZero,
    Finite {
        degree: usize,
        roots_at_infinity: usize,
    },
}

impl Degree {
    pub fn degree(self) -> Option<usize> {
        match self {
            Degree::IsZero => None,
            Degree::Finite { degree, .. } => Some(degree),
        }
    }
}

impl Poly {
    /// Builds a polynomial whose ambient degree is `coeffs.len() - 1`.
    ///
    /// Panics on an empty coefficient vector.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial needs at least one coefficient");
        Poly { coeffs }
    }

    /// Builds a polynomial in `R^d[t]`, padding with zeros. Fails if the
    /// coefficients do not fit or are not finite.
    pub fn with_ambient(mut coeffs: Vec<f64>, ambient_degree: usize) -> Result<Self> {
        if coeffs.len() > ambient_degree + 1 {
            let extra = &coeffs[ambient_degree + 1..];
            if extra.iter().any(|&c| c != 0.0) {
                return Err(Error::DegreeMismatch {
                    expected: ambient_degree + 1,
                    found: coeffs.len(),
                });
            }
            coeffs.truncate(ambient_degree + 1);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        coeffs.resize(ambient_degree + 1, 0.0);
        Ok(Poly { coeffs })
    }

    pub fn zero(ambient_degree: usize) -> Self {
        Poly {
            coeffs: vec![0.0; ambient_degree + 1],
        }
    }

    pub fn constant(c: f64, ambient_degree: usize) -> Self {
        let mut p = Poly::zero(ambient_degree);
        p.coeffs[0] = c;
        p
    }

    /// `lead * prod (t - r)` embedded in `R^d[t]`; `roots.len()` must not exceed `d`.
    pub fn from_roots(lead: f64, roots: &[f64], ambient_degree: usize) -> Self {
        assert!(roots.len() <= ambient_degree, "too many roots for the ambient degree");
        let mut c = vec![0.0; ambient_degree + 1];
        c[0] = lead;
        let mut len = 1;
        for &r in roots {
            for i in (0..=len).rev() {
                let lower = if i > 0 { c[i - 1] } else { 0.0 };
                let here = if i < len { c[i] } else { 0.0 };
                c[i] = lower - r * here;
            }
            len += 1;
        }
        Poly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn ambient_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Largest absolute coefficient.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Zero relative to an external reference scale.
    pub fn is_negligible(&self, reference: f64, tol: &Tolerances) -> bool {
        self.scale() <= tol.tau_zero * reference
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// `sum |c_k| |t|^k`, the natural magnitude against which `eval(t)` is compared.
    pub fn eval_abs(&self, t: f64) -> f64 {
        let a = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * a + c.abs())
    }

    /// Formal derivative; the ambient degree drops by one (constants stay at 0).
    pub fn derivative(&self) -> Poly {
        let d = self.ambient_degree();
        if d == 0 {
            return Poly::zero(0);
        }
        Poly {
            coeffs: (1..=d).map(|k| k as f64 * self.coeffs[k]).collect(),
        }
    }

    /// The `k`-th derivative.
    pub fn nth_derivative(&self, k: usize) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    /// Degree above the `tau_zero` noise floor, relative to the largest coefficient.
    pub fn effective_degree(&self, tol: &Tolerances) -> Degree {
        let scale = self.scale();
        if scale == 0.0 {
            return Degree::IsZero;
        }
        let cutoff = tol.tau_zero * scale;
        let degree = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > cutoff)
            .expect("nonzero polynomial has a coefficient above a relative cutoff below 1");
        Degree::Finite {
            degree,
            roots_at_infinity: self.ambient_degree() - degree,
        }
    }

    /// Coefficient at the effective degree, or 0 for the zero polynomial.
    pub fn leading_coefficient(&self, tol: &Tolerances) -> f64 {
        match self.effective_degree(tol) {
            Degree::IsZero => 0.0,
            Degree::Finite { degree, .. } => self.coeffs[degree],
        }
    }

    pub fn scaled(&self, c: f64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn neg(&self) -> Poly {
        self.scaled(-1.0)
    }

    /// Sum of two polynomials in the same ambient space.
    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.ambient_degree(), other.ambient_degree());
        Poly {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    /// Product; ambient degrees add.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly { coeffs: out }
    }

    /// Multiplies by `(t - r)`, raising the ambient degree by one.
    pub fn mul_linear(&self, r: f64) -> Poly {
        let d = self.ambient_degree();
        let mut out = vec![0.0; d + 2];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k + 1] += c;
            out[k] -= r * c;
        }
        Poly { coeffs: out }
    }

    /// Synthetic division by `(t - r)`: returns the quotient in `R^{d-1}[t]` and the remainder.
    pub fn deflate(&self, r: f64) -> (Poly, f64) {
        let d = self.ambient_degree();
        if d == 0 {
            return (Poly::zero(0), self.coeffs[0]);
        }
        let mut q = vec![0.0; d];
        let mut acc = 0.0;
        for k in (1..=d).rev() {
            acc = acc * r + self.coeffs[k];
            q[k - 1] = acc;
        }
        let rem = acc * r + self.coeffs[0];
        (Poly { coeffs: q }, rem)
    }

    /// The same polynomial viewed in a larger ambient space.
    pub fn embed(&self, ambient_degree: usize) -> Poly {
        assert!(ambient_degree >= self.ambient_degree());
        let mut c = self.coeffs.clone();
        c.resize(ambient_degree + 1, 0.0);
        Poly { coeffs: c }
    }

    /// Taylor coefficients at `c`: `q_j = p^(j)(c) / j!`, so `p(c + s) = sum q_j s^j`.
    pub fn taylor_at(&self, c: f64) -> Vec<f64> {
        let mut q = self.coeffs.clone();
        let n = q.len();
        for i in 0..n {
            for k in (i..n - 1).rev() {
                q[k] += c * q[k + 1];
            }
        }
        q
    }

    /// Maximum absolute coefficient difference after normalising both by `other`'s scale.
    pub fn relative_distance(&self, other: &Poly) -> f64 {
        assert_eq!(self.ambient_degree(), other.ambient_degree());
        let s = other.scale().max(self.scale()).max(f64::MIN_POSITIVE);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
            / s
    }
}

/// An ordered, nonempty list of polynomials sharing one ambient degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    members: Vec<Poly>,
    labels: Option<Vec<String>>,
}

impl Family {
    pub fn new(members: Vec<Poly>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::EmptyFamily);
        };
        let d = first.ambient_degree();
        if let Some(bad) = members.iter().find(|p| p.ambient_degree() != d) {
            return Err(Error::DegreeMismatch {
                expected: d + 1,
                found: bad.ambient_degree() + 1,
            });
        }
        Ok(Family {
            members,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.members.len() {
            return Err(Error::LengthMismatch {
                expected: self.members.len(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn members(&self) -> &[Poly] {
        &self.members
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn ambient_degree(&self) -> usize {
        self.members[0].ambient_degree()
    }

    pub fn get(&self, i: usize) -> &Poly {
        &self.members[i]
    }

    /// Sub-family picked by index, labels carried along.
    pub fn select(&self, indices: &[usize]) -> Family {
        Family {
            members: indices.iter().map(|&i| self.members[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i].clone()).collect()),
        }
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Family {
        Family {
            members: self.members.iter().map(f).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Largest coefficient over all members.
    pub fn scale(&self) -> f64 {
        self.members.iter().fold(0.0_f64, |m, p| m.max(p.scale()))
    }

    /// `sum w_i f_i`. Coefficients that cancel down to rounding noise are
    /// flushed to exact zero so degree drops are not hidden by round-off.
    pub fn linear_combination(&self, weights: &[f64]) -> Result<Poly> {
        if weights.len() != self.members.len() {
            return Err(Error::LengthMismatch {
                expected: self.members.len(),
                found: weights.len(),
            });
        }
        Ok(self.combine(weights))
    }

    /// Infallible form of [`Family::linear_combination`]; panics on length mismatch.
    pub(crate) fn combine(&self, weights: &[f64]) -> Poly {
        assert_eq!(weights.len(), self.members.len());
        let d = self.ambient_degree();
        let noise = 4.0 * (self.members.len() as f64 + 1.0) * f64::EPSILON;
        let coeffs = (0..=d)
            .map(|k| {
                let mut sum = 0.0;
                let mut bound = 0.0;
                for (w, p) in weights.iter().zip(&self.members) {
                    let term = w * p.coeffs[k];
                    sum += term;
                    bound += term.abs();
                }
                if sum.abs() <= noise * bound {
                    0.0
                } else {
                    sum
                }
            })
            .collect();
        Poly { coeffs }
    }

    /// `sum f_i`.
    pub fn sum(&self) -> Poly {
        self.combine(&vec![1.0; self.members.len()])
    }
}

/// Factored polynomials and roots shared by every member of a family.
#[derive(Clone, Debug)]
pub struct StrippedFamily {
    pub reduced: Family,
    pub shared_roots: Vec<f64>,
}

/// Divides out every finite root common to all members.
///
/// Roots are paired across members when they agree within the clustering
/// radius; each member is then deflated by `(t - r)` at the cluster mean.
pub fn strip_common_roots(family: &Family, tol: &Tolerances) -> Result<StrippedFamily> {
    if let Some(i) = family.members().iter().position(Poly::is_zero) {
        return Err(Error::ZeroMember { index: i });
    }
    let mut members: Vec<Poly> = family.members().to_vec();
    let mut shared = Vec::new();
    loop {
        let clusters: Vec<Vec<(f64, usize)>> = members
            .iter()
            .map(|p| crate::rootfind::real_clusters(p, tol))
            .collect::<Result<_>>()?;
        let mut found = None;
        'outer: for &(r0, _) in &clusters[0] {
            let mut sum = r0;
            let radius = tol.tau_root * (1.0 + r0.abs().max(1.0));
            for cl in clusters.iter().skip(1) {
                match cl.iter().find(|(r, _)| (r - r0).abs() <= radius) {
                    Some((r, _)) => sum += r,
                    None => continue 'outer,
                }
            }
            found = Some(sum / clusters.len() as f64);
            break;
        }
        match found {
            Some(r) => {
                members = members.iter().map(|p| p.deflate(r).0).collect();
                shared.push(r);
            }
            None => break,
        }
    }
    shared.sort_by(|a, b| b.total_cmp(a));
    let mut reduced = Family::new(members)?;
    reduced.labels = family.labels.clone();
    Ok(StrippedFamily {
        reduced,
        shared_roots: shared,
    })
}

/// `prod (t - r)` over the given roots, as a polynomial of exact degree `roots.len()`.
pub fn product_of_linears(roots: &[f64]) -> Poly {
    Poly::from_roots(1.0, roots, roots.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn g() -> Poly {
        Poly::new(vec![-3.0, 2.0, 1.0])
    }

    fn h() -> Poly {
        Poly::new(vec![-3.0, -2.0, 1.0])
    }

    #[test]
    fn eval_examples() {
        assert_eq!(g().eval(1.0), 0.0);
        assert_eq!(Poly::new(vec![-3.0, 0.0, 1.0]).eval(0.0), -3.0);
        assert_eq!(Poly::zero(2).eval(5.0), 0.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(g().derivative(), Poly::new(vec![2.0, 2.0]));
        let c = Poly::constant(7.0, 0).derivative();
        assert_eq!(c, Poly::zero(0));
        let t = Poly::new(vec![0.0, 1.0, 0.0, 0.0]).derivative();
        assert_eq!(t, Poly::new(vec![1.0, 0.0, 0.0]));
        assert_eq!(t.ambient_degree(), 2);
    }

    #[test]
    fn linear_combination_examples() {
        let fam = Family::new(vec![g(), h()]).unwrap();
        let p = fam.linear_combination(&[0.5, 0.5]).unwrap();
        assert_eq!(p, Poly::new(vec![-3.0, 0.0, 1.0]));

        let fam = Family::new(vec![Poly::new(vec![3.0, 0.0, -1.0]), g(), h()]).unwrap();
        let p = fam.linear_combination(&[0.5, 0.25, 0.25]).unwrap();
        assert!(p.is_zero());

        let fam = Family::new(vec![g()]).unwrap();
        assert_eq!(fam.linear_combination(&[1.0]).unwrap(), g());
        assert!(matches!(
            fam.linear_combination(&[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn effective_degree_examples() {
        let t = Poly::new(vec![0.0, 1.0, 0.0]);
        assert_eq!(
            t.effective_degree(&tol()),
            Degree::Finite {
                degree: 1,
                roots_at_infinity: 1
            }
        );
        assert_eq!(
            g().effective_degree(&tol()),
            Degree::Finite {
                degree: 2,
                roots_at_infinity: 0
            }
        );
        assert_eq!(Poly::zero(2).effective_degree(&tol()), Degree::IsZero);
    }

    #[test]
    fn strip_common_roots_examples() {
        let a = Poly::from_roots(1.0, &[1.0, 0.0], 2);
        let b = Poly::from_roots(1.0, &[1.0, -1.0], 2);
        let s = strip_common_roots(&Family::new(vec![a, b]).unwrap(), &tol()).unwrap();
        assert_eq!(s.shared_roots.len(), 1);
        assert!((s.shared_roots[0] - 1.0).abs() < 1e-12);
        assert!(s.reduced.get(0).relative_distance(&Poly::new(vec![0.0, 1.0])) < 1e-12);
        assert!(s.reduced.get(1).relative_distance(&Poly::new(vec![1.0, 1.0])) < 1e-12);

        let s = strip_common_roots(&Family::new(vec![g(), h()]).unwrap(), &tol()).unwrap();
        assert!(s.shared_roots.is_empty());
        assert_eq!(s.reduced.members(), &[g(), h()]);

        let sq = Poly::new(vec![0.0, 0.0, 1.0]);
        let s = strip_common_roots(&Family::new(vec![sq.clone(), sq]).unwrap(), &tol()).unwrap();
        assert_eq!(s.shared_roots, vec![0.0, 0.0]);
        assert_eq!(s.reduced.get(0), &Poly::new(vec![1.0]));
    }

    #[test]
    fn strip_rejects_zero_member() {
        let fam = Family::new(vec![g(), Poly::zero(2)]).unwrap();
        assert!(matches!(
            strip_common_roots(&fam, &tol()),
            Err(Error::ZeroMember { index: 1 })
        ));
    }

    #[test]
    fn family_rejects_mixed_degrees() {
        assert!(Family::new(vec![g(), Poly::new(vec![1.0, 1.0])]).is_err());
        assert!(Family::new(vec![]).is_err());
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = Poly::new(vec![1.0, -2.0, 0.5, 3.0]);
        let q = p.taylor_at(0.7);
        assert!((q[0] - p.eval(0.7)).abs() < 1e-12);
        assert!((q[1] - p.derivative().eval(0.7)).abs() < 1e-12);
        assert!((q[2] - p.nth_derivative(2).eval(0.7) / 2.0).abs() < 1e-12);
        assert!((q[3] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn deflate_then_multiply_roundtrip() {
        let p = Poly::from_roots(2.0, &[3.0, -1.0, 0.5], 4);
        let (q, rem) = p.deflate(0.5);
        assert!(rem.abs() < 1e-12);
        assert!(q.mul_linear(0.5).relative_distance(&p) < 1e-14);
    }
}
