//! Companion-matrix eigenvalues via balancing and the Francis double-shift QR
//! iteration on the (already upper Hessenberg) companion matrix.

use num_complex::Complex64;

const RADIX: f64 = 2.0;
const MAX_ITS: usize = 60;

/// Dense row-major matrix with 1-based indexing, sized `(n+1)^2`.
struct Mat {
    n: usize,
    a: Vec<f64>,
}

impl Mat {
    fn new(n: usize) -> Self {
        Mat {
            n,
            a: vec![0.0; (n + 1) * (n + 1)],
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.n + 1) + j]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[i * (self.n + 1) + j]
    }
}

/// Roots of `c[0] + c[1] t + ... + c[k] t^k` with `c[k] != 0` and `k >= 1`.
pub fn companion_roots(c: &[f64]) -> Vec<Complex64> {
    let k = c.len() - 1;
    debug_assert!(k >= 1 && c[k] != 0.0);
    let mut m = Mat::new(k);
    // Hessenberg companion: first row holds -c[k-1-j]/c[k], unit subdiagonal.
    for j in 1..=k {
        *m.at_mut(1, j) = -c[k - j] / c[k];
    }
    for i in 2..=k {
        *m.at_mut(i, i - 1) = 1.0;
    }
    balance(&mut m);
    match hqr(&mut m) {
        Some(roots) => roots,
        None => fallback(c),
    }
}

fn fallback(c: &[f64]) -> Vec<Complex64> {
    let k = c.len() - 1;
    let mut m = nalgebra::DMatrix::<f64>::zeros(k, k);
    for j in 0..k {
        m[(0, j)] = -c[k - 1 - j] / c[k];
    }
    for i in 1..k {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

fn balance(m: &mut Mat) {
    let n = m.n;
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += m.at(j, i).abs();
                    r += m.at(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        *m.at_mut(i, j) *= g;
                    }
                    for j in 1..=n {
                        *m.at_mut(j, i) *= f;
                    }
                }
            }
        }
    }
}

#[inline]
fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Eigenvalues of an upper Hessenberg matrix; `None` if the iteration stalls.
fn hqr(m: &mut Mat) -> Option<Vec<Complex64>> {
    let n = m.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += m.at(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = m.at(l - 1, l - 1).abs() + m.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if m.at(l, l - 1).abs() + s == s {
                    *m.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = m.at(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = m.at(nn - 1, nn - 1);
                let mut w = m.at(nn, nn - 1) * m.at(nn - 1, nn);
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return None;
                    }
                    if its > 0 && its % 10 == 0 {
                        t += x;
                        for i in 1..=nn {
                            *m.at_mut(i, i) -= x;
                        }
                        let s = m.at(nn, nn - 1).abs() + m.at(nn - 1, nn - 2).abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let mut mm = nn - 2;
                    let (mut p, mut q, mut r);
                    loop {
                        let z = m.at(mm, mm);
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / m.at(mm + 1, mm) + m.at(mm, mm + 1);
                        q = m.at(mm + 1, mm + 1) - z - rr - ss;
                        r = m.at(mm + 2, mm + 1);
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if mm == l {
                            break;
                        }
                        let u = m.at(mm, mm - 1).abs() * (q.abs() + r.abs());
                        let v = p.abs()
                            * (m.at(mm - 1, mm - 1).abs() + z.abs() + m.at(mm + 1, mm + 1).abs());
                        if u + v == v {
                            break;
                        }
                        mm -= 1;
                    }
                    for i in (mm + 2)..=nn {
                        *m.at_mut(i, i - 2) = 0.0;
                        if i != mm + 2 {
                            *m.at_mut(i, i - 3) = 0.0;
                        }
                    }
                    let mut k = mm;
                    while k < nn {
                        if k != mm {
                            p = m.at(k, k - 1);
                            q = m.at(k + 1, k - 1);
                            r = 0.0;
                            if k != nn - 1 {
                                r = m.at(k + 2, k - 1);
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == mm {
                                if l != mm {
                                    *m.at_mut(k, k - 1) = -m.at(k, k - 1);
                                }
                            } else {
                                *m.at_mut(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            let z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = m.at(k, j) + q * m.at(k + 1, j);
                                if k != nn - 1 {
                                    pp += r * m.at(k + 2, j);
                                    *m.at_mut(k + 2, j) -= pp * z;
                                }
                                *m.at_mut(k + 1, j) -= pp * y;
                                *m.at_mut(k, j) -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * m.at(i, k) + y * m.at(i, k + 1);
                                if k != nn - 1 {
                                    pp += z * m.at(i, k + 2);
                                    *m.at_mut(i, k + 2) -= pp * r;
                                }
                                *m.at_mut(i, k + 1) -= pp * q;
                                *m.at_mut(i, k) -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l + 1 >= nn {
                break;
            }
        }
    }
    Some(
        (1..=n)
            .map(|i| Complex64::new(wr[i], wi[i]))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(roots: &[f64]) -> Vec<f64> {
        let mut c = vec![1.0];
        for r in roots {
            let mut n = vec![0.0; c.len() + 1];
            for (i, x) in c.iter().enumerate() {
                n[i + 1] += x;
                n[i] -= r * x;
            }
            c = n;
        }
        c
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn recovers_distinct_real_roots() {
        let roots = [-2.3, -1.6, -0.9, -0.2, 0.5, 1.2, 1.9, 2.6];
        let got = sorted_re(companion_roots(&expand(&roots)));
        for (a, b) in got.iter().zip(roots) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn complex_pair() {
        // t^3 + t = t (t^2 + 1)
        let mut got = companion_roots(&[0.0, 1.0, 0.0, 1.0]);
        got.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((got[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(got[1].norm() < 1e-12);
        assert!((got[2] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn agrees_with_nalgebra() {
        let c = [0.3, -1.7, 2.2, 0.4, -3.1, 1.0, 0.25];
        let mut a = companion_roots(&c);
        let mut b = fallback(&c);
        let key = |z: &Complex64| (z.re * 1e6).round() as i64 * 1_000_000 + (z.im * 1e3).round() as i64;
        a.sort_by_key(key);
        b.sort_by_key(key);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-9, "{x} vs {y}");
        }
    }
}
