//! Properness: does some convex combination of the family vanish identically?
//!
//! The floating-point path minimises `|sum c_i u_i|` over the simplex, where
//! `u_i` are the members scaled to unit max-coefficient, by nonnegative least
//! squares on a system augmented with a heavily weighted `sum c_i = 1` row.
//! The exact path enumerates simplex faces in rational arithmetic.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Family;
use crate::tolerance::Tolerances;

/// Weight of the sum-to-one row in the augmented least-squares system.
const SIMPLEX_WEIGHT: f64 = 1e3;

/// Largest family handled by the exact face enumeration.
pub const EXACT_MAX_MEMBERS: usize = 12;

/// Weights of a convex combination that is (numerically) the zero polynomial,
/// or `None` when the family is proper.
///
/// In exact mode the search runs over rationals and falls back to floating
/// point only when the family is too large.
pub fn zero_convex_combination(family: &Family, tol: &Tolerances) -> Option<Vec<f64>> {
    if let Some(i) = family.members().iter().position(|p| p.is_zero()) {
        let mut w = vec![0.0; family.len()];
        w[i] = 1.0;
        return Some(w);
    }
    if tol.exact_rational && family.len() <= EXACT_MAX_MEMBERS {
        return exact_zero_convex_combination(family);
    }
    let (weights, residual) = min_norm_convex_combination(family);
    (residual <= tol.tau_proper).then_some(weights)
}

/// Convex weights minimising the normalised combination, with the residual
/// `max |sum c_i u_i|` in that normalisation. Weights refer to the original
/// members and sum to one.
pub fn min_norm_convex_combination(family: &Family) -> (Vec<f64>, f64) {
    let n = family.len();
    let rows = family.ambient_degree() + 1;
    let scales: Vec<f64> = family.members().iter().map(|p| p.scale()).collect();
    let mut a = DMatrix::<f64>::zeros(rows + 1, n);
    for (j, p) in family.members().iter().enumerate() {
        for (i, c) in p.coeffs().iter().enumerate() {
            a[(i, j)] = c / scales[j];
        }
        a[(rows, j)] = SIMPLEX_WEIGHT;
    }
    let mut b = DVector::<f64>::zeros(rows + 1);
    b[rows] = SIMPLEX_WEIGHT;
    let mut c = nnls(&a, &b);
    let total: f64 = c.iter().sum();
    if total <= 0.0 {
        c = DVector::from_element(n, 1.0 / n as f64);
    } else {
        c /= total;
    }
    let combo = a.rows(0, rows) * &c;
    let residual = combo.amax();
    let mut w: Vec<f64> = (0..n).map(|j| c[j] / scales[j]).collect();
    let wsum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= wsum);
    (w, residual)
}

/// Lawson–Hanson active-set solver for `min |Ax - b|` subject to `x >= 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let at = a.transpose();
    let tol = 10.0 * f64::EPSILON * a.amax() * (a.nrows().max(n) as f64);
    for _ in 0..3 * n + 10 {
        let w = &at * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match candidate {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => break,
        }
        for _ in 0..3 * n + 10 {
            let z = solve_passive(a, b, &passive);
            let bad: Vec<usize> = (0..n).filter(|&j| passive[j] && z[j] <= 0.0).collect();
            if bad.is_empty() {
                x = z;
                break;
            }
            let alpha = bad
                .iter()
                .map(|&j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            x += (z - &x) * alpha;
            for j in 0..n {
                if passive[j] && x[j] <= tol {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
        }
    }
    x
}

/// Unconstrained least squares on the passive columns, zero elsewhere.
fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let cols: Vec<usize> = (0..passive.len()).filter(|&j| passive[j]).collect();
    let sub = a.select_columns(cols.iter());
    let sol = sub
        .svd(true, true)
        .solve(b, f64::EPSILON * 16.0)
        .unwrap_or_else(|_| DVector::zeros(cols.len()));
    let mut z = DVector::<f64>::zeros(passive.len());
    for (k, &j) in cols.iter().enumerate() {
        z[j] = sol[k];
    }
    z
}

/// Exact search: every zero convex combination contains one supported on an
/// affinely independent set of members, where `[A_S; 1] c = [0; 1]` has a
/// unique strictly positive solution. Supports are tried by increasing size.
pub fn exact_zero_convex_combination(family: &Family) -> Option<Vec<f64>> {
    let n = family.len();
    let cols: Vec<Vec<BigRational>> = family
        .members()
        .iter()
        .map(|p| {
            p.coeffs()
                .iter()
                .map(|&c| BigRational::from_float(c).expect("coefficients are finite"))
                .collect()
        })
        .collect();
    let rows = family.ambient_degree() + 2;
    let max_support = n.min(rows);
    for size in 1..=max_support {
        for support in subsets(n, size) {
            if let Some(c) = solve_face(&cols, &support) {
                let mut w = vec![0.0; n];
                for (k, &j) in support.iter().enumerate() {
                    w[j] = c[k].to_f64().unwrap_or(0.0);
                }
                return Some(w);
            }
        }
    }
    None
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Unique solution of `[A_S; 1] c = [0; 1]` when it exists and is strictly positive.
fn solve_face(cols: &[Vec<BigRational>], support: &[usize]) -> Option<Vec<BigRational>> {
    let k = support.len();
    let d1 = cols[0].len();
    // Augmented matrix rows: coefficient rows then the sum row.
    let mut m: Vec<Vec<BigRational>> = (0..d1)
        .map(|i| {
            let mut row: Vec<BigRational> = support.iter().map(|&j| cols[j][i].clone()).collect();
            row.push(BigRational::zero());
            row
        })
        .collect();
    let mut sum_row = vec![BigRational::one(); k];
    sum_row.push(BigRational::one());
    m.push(sum_row);

    let mut pivot_row = 0;
    for col in 0..k {
        let Some(p) = (pivot_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            // Nullity in the support: a smaller support also works.
            return None;
        };
        m.swap(pivot_row, p);
        let inv = BigRational::one() / m[pivot_row][col].clone();
        for x in m[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..m.len() {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..=k {
                    let delta = &f * &m[pivot_row][c];
                    m[r][c] = &m[r][c] - delta;
                }
            }
        }
        pivot_row += 1;
    }
    if m[k..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let c: Vec<BigRational> = (0..k).map(|i| m[i][k].clone()).collect();
    c.iter().all(|x| x.is_positive()).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;

    fn fam(polys: &[&[f64]]) -> Family {
        Family::new(polys.iter().map(|c| Poly::new(c.to_vec())).collect()).unwrap()
    }

    fn cs() -> Family {
        fam(&[&[3.0, 0.0, -1.0], &[-3.0, 2.0, 1.0], &[-3.0, -2.0, 1.0]])
    }

    #[test]
    fn zero_combination_examples() {
        let tol = Tolerances::default();
        let w = zero_convex_combination(&cs(), &tol).unwrap();
        for (a, b) in w.iter().zip([0.5, 0.25, 0.25]) {
            assert!((a - b).abs() < 1e-9, "{w:?}");
        }
        let gh = fam(&[&[-3.0, 2.0, 1.0], &[-3.0, -2.0, 1.0]]);
        assert_eq!(zero_convex_combination(&gh, &tol), None);
        let w = zero_convex_combination(&fam(&[&[0.0, 1.0], &[0.0, -1.0]]), &tol).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_matches() {
        let tol = Tolerances {
            exact_rational: true,
            ..Tolerances::default()
        };
        assert_eq!(zero_convex_combination(&cs(), &tol), Some(vec![0.5, 0.25, 0.25]));
        let gh = fam(&[&[-3.0, 2.0, 1.0], &[-3.0, -2.0, 1.0]]);
        assert_eq!(zero_convex_combination(&gh, &tol), None);
        // r = 1.5 breaks the identity exactly.
        let off = fam(&[&[2.25, 0.0, -1.0], &[-3.0, 2.0, 1.0], &[-3.0, -2.0, 1.0]]);
        assert_eq!(zero_convex_combination(&off, &tol), None);
    }

    #[test]
    fn zero_member_is_a_vertex_solution() {
        let tol = Tolerances::default();
        let f = fam(&[&[1.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(zero_convex_combination(&f, &tol), Some(vec![0.0, 1.0]));
    }

    #[test]
    fn nnls_against_brute_force() {
        // Small problem where the unconstrained optimum has a negative entry.
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0, -1.0, 1.0]);
        let x = nnls(&a, &b);
        let obj = |x0: f64, x1: f64| {
            let r = &a * DVector::from_vec(vec![x0, x1]) - &b;
            r.norm_squared()
        };
        let mut best = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                best = best.min(obj(i as f64 * 0.01, j as f64 * 0.01));
            }
        }
        assert!(x.iter().all(|v| *v >= 0.0));
        assert!(obj(x[0], x[1]) <= best + 1e-9);
    }
}
