//! The SL2(R) action on `R^d[t]` and on the projective line.
//!
//! [`MobiusMap::act`] is the substitution `t -> (at + b)/(ct + d)` homogenised
//! to the ambient degree. Its roots are the *preimages* of the roots of the
//! input under the point action. [`MobiusMap::push_forward`] is `act` by the
//! inverse, which carries each root `r` to `act_point(r)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::tolerance::Tolerances;

/// A point of `R ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    Finite(f64),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<f64> {
        match self {
            Point::Finite(x) => Some(x),
            Point::Infinity => None,
        }
    }
}

/// `[[alpha, beta], [gamma, delta]]` with unit determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl MobiusMap {
    /// Checks `alpha*delta - beta*gamma = 1` within `tau_zero` (relative to the entries).
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, tol: &Tolerances) -> Result<Self> {
        let m = MobiusMap {
            alpha,
            beta,
            gamma,
            delta,
        };
        let size = (alpha.abs() * delta.abs()).max(beta.abs() * gamma.abs()).max(1.0);
        if (m.determinant() - 1.0).abs() > tol.tau_zero * size * 10.0 {
            return Err(Error::InvalidInput(format!(
                "determinant {} is not 1",
                m.determinant()
            )));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusMap {
            alpha: 1.0,
            beta: 0.0,
            gamma: 0.0,
            delta: 1.0,
        }
    }

    /// Rotation by angle `theta`: `[[cos, -sin], [sin, cos]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        MobiusMap {
            alpha: c,
            beta: -s,
            gamma: s,
            delta: c,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.alpha * self.delta - self.beta * self.gamma
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            alpha: self.delta,
            beta: -self.beta,
            gamma: -self.gamma,
            delta: self.alpha,
        }
    }

    /// Matrix product `self * other`; as point maps, `other` is applied first.
    pub fn compose(&self, other: &MobiusMap) -> Self {
        MobiusMap {
            alpha: self.alpha * other.alpha + self.beta * other.gamma,
            beta: self.alpha * other.beta + self.beta * other.delta,
            gamma: self.gamma * other.alpha + self.delta * other.gamma,
            delta: self.gamma * other.beta + self.delta * other.delta,
        }
    }

    /// `(alpha r + beta) / (gamma r + delta)`, projectively.
    pub fn act_point(&self, r: Point) -> Point {
        match r {
            Point::Infinity => {
                if self.gamma == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite(self.alpha / self.gamma)
                }
            }
            Point::Finite(x) => {
                let den = self.gamma * x + self.delta;
                if den == 0.0 {
                    Point::Infinity
                } else {
                    Point::Finite((self.alpha * x + self.beta) / den)
                }
            }
        }
    }

    /// `(gamma t + delta)^d * p((alpha t + beta) / (gamma t + delta))` in the same ambient degree.
    pub fn act(&self, p: &Poly) -> Poly {
        let d = p.ambient_degree();
        let num = powers(self.alpha, self.beta, d);
        let den = powers(self.gamma, self.delta, d);
        let mut out = vec![0.0; d + 1];
        for (k, &c) in p.coeffs().iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            // (alpha t + beta)^k * (gamma t + delta)^(d-k)
            let a = &num[k];
            let b = &den[d - k];
            for (i, x) in a.iter().enumerate() {
                if *x == 0.0 {
                    continue;
                }
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += c * x * y;
                }
            }
        }
        Poly::new(out)
    }

    /// `act` by the inverse map: roots move forward under `act_point`.
    pub fn push_forward(&self, p: &Poly) -> Poly {
        self.inverse().act(p)
    }
}

/// `(x t + y)^k` for `k = 0..=d`, expanded with one Pascal row per power.
fn powers(x: f64, y: f64, d: usize) -> Vec<Vec<f64>> {
    let mut pascal = vec![1.0_f64];
    let mut out = Vec::with_capacity(d + 1);
    for k in 0..=d {
        if k > 0 {
            let mut next = vec![1.0; k + 1];
            for i in 1..k {
                next[i] = pascal[i - 1] + pascal[i];
            }
            pascal = next;
        }
        let row: Vec<f64> = (0..=k)
            .map(|i| pascal[i] * x.powi(i as i32) * y.powi((k - i) as i32))
            .collect();
        out.push(row);
    }
    out
}

/// Orthogonal determinant-one map sending `t0` to infinity under [`MobiusMap::act_point`].
///
/// For `p(t0) != 0`, `push_forward(p)` then has no root at infinity.
pub fn rotation_to_infinity(t0: f64) -> MobiusMap {
    let n = (1.0 + t0 * t0).sqrt();
    let s = 1.0 / n;
    let c = -t0 / n;
    MobiusMap {
        alpha: c,
        beta: -s,
        gamma: s,
        delta: c,
    }
}

/// A finite point at least `min_sep` away from every given root, chosen to
/// maximise that separation among candidates spread around the roots.
pub fn separated_point(roots: &[f64], min_sep: f64) -> Option<f64> {
    if roots.is_empty() {
        return Some(0.0);
    }
    let lo = roots.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = (hi - lo).max(1.0);
    let mut cands: Vec<f64> = Vec::new();
    let mut sorted = roots.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    for w in sorted.windows(2) {
        cands.push(0.5 * (w[0] + w[1]));
    }
    cands.push(lo - 0.5 * pad);
    cands.push(hi + 0.5 * pad);
    let dist = |x: f64| roots.iter().fold(f64::INFINITY, |m, r| m.min((x - r).abs()));
    // Interior gaps keep rotated roots well conditioned; the exterior points are fallbacks.
    cands
        .into_iter()
        .map(|x| (x, dist(x)))
        .filter(|&(_, d)| d >= min_sep)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, _)| x)
}
