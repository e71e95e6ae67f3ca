//! Property tests for the structural invariants of each module.

use proptest::prelude::*;

use rrcompat::compat::{
    family_compatible, nonproper_reduction, zero_convex_combination, Verdict,
};
use rrcompat::interlace::{common_interleaver, interlaces, wronskian, SignClass};
use rrcompat::mobius::{rotation_to_infinity, MobiusMap, Point};
use rrcompat::oracle::sample_convex_combinations;
use rrcompat::poly::{product_of_linears, strip_common_roots};
use rrcompat::rootfind::real_roots;
use rrcompat::{Family, Poly, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn lead() -> impl Strategy<Value = f64> {
    (0.25f64..4.0, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

/// Distinct roots in `[-span, span]` at least `sep` apart, descending.
fn spaced_roots(k: usize, span: f64, sep: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, k + 1).prop_map(move |u| {
        // Gaps proportional to u, shifted so that every gap is at least `sep`.
        let total: f64 = u.iter().sum::<f64>().max(1e-12);
        let free = 2.0 * span - sep * (k as f64 - 1.0).max(0.0);
        let mut x = span;
        let mut out = Vec::with_capacity(k);
        for (j, g) in u.iter().take(k).enumerate() {
            x -= free * g / total;
            if j > 0 {
                x -= sep;
            }
            out.push(x.max(-span));
        }
        out
    })
}

fn real_rooted(max_deg: usize) -> impl Strategy<Value = Poly> {
    (1..=max_deg)
        .prop_flat_map(|d| (spaced_roots(d, 5.0, 0.05), lead(), Just(d)))
        .prop_map(|(r, a, d)| Poly::from_roots(a, &r, d))
}

fn pair(max_deg: usize) -> impl Strategy<Value = (Poly, Poly)> {
    (1..=max_deg).prop_flat_map(|d| {
        (spaced_roots(d, 5.0, 0.05), spaced_roots(d, 5.0, 0.05), lead(), lead())
            .prop_map(move |(a, b, la, lb)| (Poly::from_roots(la, &a, d), Poly::from_roots(lb, &b, d)))
    })
}

/// `f <= g` pairs: `f`'s roots sit in the gaps of `g`'s.
fn interlacing_pair(max_deg: usize) -> impl Strategy<Value = (Poly, Poly)> {
    (1..=max_deg).prop_flat_map(|d| {
        (
            spaced_roots(d, 5.0, 0.1),
            prop::collection::vec(0.05f64..0.95, d),
            lead(),
            0.25f64..4.0,
        )
            .prop_map(move |(lam, u, lg, lf)| {
                let roots: Vec<f64> = (0..d)
                    .map(|j| {
                        let lo = if j + 1 < d { lam[j + 1] } else { lam[j] - 1.0 };
                        lo + (lam[j] - lo) * u[j]
                    })
                    .collect();
                (
                    Poly::from_roots(lf * lg.signum(), &roots, d),
                    Poly::from_roots(lg, &lam, d),
                )
            })
    })
}

fn compatible_family() -> impl Strategy<Value = Family> {
    (2usize..=5, 1usize..=5).prop_flat_map(|(d, n)| {
        (
            spaced_roots(d, 4.0, 0.2),
            prop::collection::vec((prop::collection::vec(0.05f64..0.95, d), lead()), n),
        )
            .prop_map(move |(lam, members)| {
                let polys = members
                    .into_iter()
                    .map(|(u, a)| {
                        let roots: Vec<f64> = (0..d)
                            .map(|j| {
                                let (hi, lo) = if a > 0.0 {
                                    (lam[j], if j + 1 < d { lam[j + 1] } else { lam[j] - 2.0 })
                                } else {
                                    (if j == 0 { lam[0] + 2.0 } else { lam[j - 1] }, lam[j])
                                };
                                lo + (hi - lo) * u[j]
                            })
                            .collect();
                        Poly::from_roots(a, &roots, d)
                    })
                    .collect();
                Family::new(polys).unwrap()
            })
    })
}

fn rotation() -> impl Strategy<Value = MobiusMap> {
    (-std::f64::consts::PI..std::f64::consts::PI).prop_map(MobiusMap::rotation)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn vertex_combination_recovers_member(fam in compatible_family(), pick in 0usize..5) {
        let i = pick % fam.len();
        let mut w = vec![0.0; fam.len()];
        w[i] = 1.0;
        prop_assert_eq!(&fam.linear_combination(&w).unwrap(), fam.get(i));
    }

    #[test]
    fn effective_degree_accounts_for_infinity(p in real_rooted(8), drop in 0usize..3) {
        let q = p.embed(p.ambient_degree() + drop);
        let deg = q.effective_degree(&tol());
        let spectrum = real_roots(&q, &tol()).unwrap();
        prop_assert_eq!(deg.degree().unwrap() + spectrum.roots_at_infinity, q.ambient_degree());
        prop_assert_eq!(spectrum.roots_at_infinity, drop);
    }

    #[test]
    fn strip_common_roots_reconstructs(
        shared in spaced_roots(2, 3.0, 0.5),
        k in 1usize..=2,
        fam in compatible_family(),
    ) {
        let shared = &shared[..k];
        let q = product_of_linears(shared);
        let lifted = fam.map(|p| p.mul(&q));
        let stripped = strip_common_roots(&lifted, &tol()).unwrap();
        prop_assert!(stripped.shared_roots.len() >= k);
        let back = product_of_linears(&stripped.shared_roots);
        for (r, p) in stripped.reduced.members().iter().zip(lifted.members()) {
            let rebuilt = r.mul(&back).embed(p.ambient_degree());
            prop_assert!(rebuilt.relative_distance(p) <= 10.0 * tol().tau_zero.max(1e-10));
        }
    }

    #[test]
    fn recovers_roots_and_multiplicities(
        sites in (1usize..=6).prop_flat_map(|k| spaced_roots(k, 10.0, 0.5)),
        mults in prop::collection::vec(1usize..=2, 6),
        a in lead(),
    ) {
        let mut roots = Vec::new();
        for (r, &m) in sites.iter().zip(&mults) {
            roots.extend(std::iter::repeat_n(*r, m));
        }
        let d = roots.len();
        prop_assume!(d <= 12);
        let p = Poly::from_roots(a, &roots, d);
        let spectrum = real_roots(&p, &tol()).unwrap();
        prop_assert_eq!(spectrum.roots.len(), sites.len());
        for ((r, m), (s, &ms)) in spectrum.roots.iter().zip(sites.iter().zip(&mults)) {
            prop_assert_eq!(*m, ms);
            prop_assert!((r - s).abs() <= tol().tau_root * (1.0 + s.abs()), "{} vs {}", r, s);
        }
    }

    #[test]
    fn multiplicity_drops_by_one_under_differentiation(
        sites in (1usize..=4).prop_flat_map(|k| spaced_roots(k, 3.0, 0.5)),
        mults in prop::collection::vec(1usize..=3, 4),
    ) {
        let mut roots = Vec::new();
        for (r, &m) in sites.iter().zip(&mults) {
            roots.extend(std::iter::repeat_n(*r, m));
        }
        let d = roots.len();
        prop_assume!(d >= 2);
        let p = Poly::from_roots(1.0, &roots, d);
        let t = tol();
        let dp = real_roots(&p.derivative(), &t).unwrap();
        for &(r, m) in &real_roots(&p, &t).unwrap().roots {
            let near = dp
                .roots
                .iter()
                .filter(|(x, _)| (x - r).abs() <= 1e-3 * (1.0 + r.abs()))
                .map(|&(_, k)| k)
                .sum::<usize>();
            prop_assert_eq!(near, m - 1, "root {} of multiplicity {}", r, m);
        }
    }

    #[test]
    fn roots_are_scale_invariant(p in real_rooted(10), c in 1e-3f64..1e3, neg in any::<bool>()) {
        let c = if neg { -c } else { c };
        let a = real_roots(&p, &tol()).unwrap();
        let b = real_roots(&p.scaled(c), &tol()).unwrap();
        prop_assert_eq!(a.roots.len(), b.roots.len());
        for (x, y) in a.roots.iter().zip(&b.roots) {
            prop_assert_eq!(x.1, y.1);
            prop_assert!((x.0 - y.0).abs() <= 1e-9 * (1.0 + x.0.abs()));
        }
    }

    #[test]
    fn act_moves_roots_to_preimages(p in real_rooted(6), m in rotation()) {
        let t = tol();
        let q = m.act(&p);
        let inv = m.inverse();
        let spec_p = real_roots(&p, &t).unwrap();
        let spec_q = real_roots(&q, &t).unwrap();
        let mut expected: Vec<Point> = spec_p
            .lambdas()
            .iter()
            .map(|&r| inv.act_point(Point::Finite(r)))
            .collect();
        expected.extend(std::iter::repeat_n(inv.act_point(Point::Infinity), spec_p.roots_at_infinity));
        let mut finite: Vec<f64> = expected.iter().filter_map(|x| x.finite()).filter(|x| x.abs() < 1e6).collect();
        finite.sort_by(|a, b| b.total_cmp(a));
        let got = spec_q.lambdas();
        prop_assume!(finite.len() == got.len());
        for (a, b) in finite.iter().zip(&got) {
            prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{:?} vs {:?}", finite, got);
        }
    }

    #[test]
    fn interlacing_is_rotation_invariant((f, g) in interlacing_pair(7), m in rotation()) {
        let t = tol();
        prop_assert!(interlaces(&f, &g, &t).unwrap());
        prop_assert!(interlaces(&m.act(&f), &m.act(&g), &t).unwrap());
    }

    #[test]
    fn wronskian_is_equivariant((f, g) in pair(8), m in rotation()) {
        let t = tol();
        let (w, _) = wronskian(&f, &g, &t);
        let (mw, _) = wronskian(&m.act(&f), &m.act(&g), &t);
        let expected = m.act(&w);
        prop_assert!(mw.relative_distance(&expected) < 1e-8);
    }

    #[test]
    fn wronskian_is_antisymmetric((f, g) in pair(8)) {
        let t = tol();
        let (a, _) = wronskian(&f, &g, &t);
        let (b, _) = wronskian(&g, &f, &t);
        prop_assert_eq!(a, b.neg());
    }

    #[test]
    fn wronskian_sign_follows_interlacing((f, g) in interlacing_pair(8)) {
        let t = tol();
        let (_, class) = wronskian(&f, &g, &t);
        prop_assert!(matches!(class, SignClass::NonPositive | SignClass::IdenticallyZero));
        let (_, class) = wronskian(&g, &f, &t);
        prop_assert!(matches!(class, SignClass::NonNegative | SignClass::IdenticallyZero));
    }

    #[test]
    fn interlacing_is_reflexive(p in real_rooted(10)) {
        prop_assert!(interlaces(&p, &p, &tol()).unwrap());
    }

    #[test]
    fn rotation_to_infinity_is_orthonormal(t0 in -1e3f64..1e3) {
        let m = rotation_to_infinity(t0);
        let t = tol();
        prop_assert!((m.alpha * m.alpha + m.beta * m.beta - 1.0).abs() <= t.tau_zero);
        prop_assert!((m.gamma * m.gamma + m.delta * m.delta - 1.0).abs() <= t.tau_zero);
        prop_assert!((m.alpha * m.gamma + m.beta * m.delta).abs() <= t.tau_zero);
        prop_assert!((m.determinant() - 1.0).abs() <= t.tau_zero);
    }

    #[test]
    fn interleaver_is_sound(fam in compatible_family(), seed in 0u64..1000) {
        let t = tol();
        let res = common_interleaver(&fam, &t).unwrap();
        if let Some(g) = res.witness {
            for f in fam.members() {
                prop_assert!(interlaces(f, &g, &t).unwrap());
            }
            let o = sample_convex_combinations(&fam, 300, seed, &t);
            prop_assert!(o.violations.is_empty());
        }
    }

    #[test]
    fn reports_reverify(fam in compatible_family()) {
        let t = tol();
        let report = family_compatible(&fam, &t).unwrap();
        prop_assert_ne!(report.verdict, Verdict::Incompatible);
        prop_assert!(report.verify(&fam, &t));
    }

    #[test]
    fn nonproper_reduction_reconstructs(
        w in prop::collection::vec(0.01f64..1.0, 4),
        z in prop::collection::vec(0.0f64..1.0, 4),
    ) {
        prop_assume!(z.iter().any(|&x| x > 0.01));
        let (reduced, s) = nonproper_reduction(&w, &z);
        prop_assert!(s > 0.0);
        prop_assert!(reduced.iter().all(|&x| x >= 0.0));
        prop_assert!(reduced.iter().filter(|&&x| x == 0.0).count() >= 1);
        for i in 0..4 {
            prop_assert!((reduced[i] + s * z[i] - w[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn oracle_is_deterministic(fam in compatible_family(), seed in any::<u64>()) {
        let t = tol();
        let a = sample_convex_combinations(&fam, 64, seed, &t);
        let b = sample_convex_combinations(&fam, 64, seed, &t);
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

/// Largest roots of compatible opposite-sign pairs differ; same-sign pairs have
/// `lambda_2(f) < lambda_1(g)`.
#[test]
fn root_separation_of_compatible_pairs() {
    use rand::{Rng, SeedableRng};
    let t = tol();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(51);
    let mut checked = (0, 0);
    for _ in 0..500 {
        let d = rng.gen_range(2..=6);
        let mut lam: Vec<f64> = (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect();
        lam.sort_by(|a, b| b.total_cmp(a));
        if lam.windows(2).any(|w| w[0] - w[1] < 0.2) {
            continue;
        }
        let member = |rng: &mut rand_chacha::ChaCha8Rng, positive: bool| {
            let roots: Vec<f64> = (0..d)
                .map(|j| {
                    let (hi, lo) = if positive {
                        (lam[j], if j + 1 < d { lam[j + 1] } else { lam[j] - 2.0 })
                    } else {
                        (if j == 0 { lam[0] + 2.0 } else { lam[j - 1] }, lam[j])
                    };
                    lo + (hi - lo) * rng.gen_range(0.05..0.95)
                })
                .collect();
            Poly::from_roots(if positive { 1.0 } else { -1.0 }, &roots, d)
        };
        let fa = rng.gen_bool(0.5);
        let fb = rng.gen_bool(0.5);
        let f = member(&mut rng, fa);
        let g = member(&mut rng, fb);
        let fam = Family::new(vec![f.clone(), g.clone()]).unwrap();
        if zero_convex_combination(&fam, &t).is_some() {
            continue;
        }
        let lf = real_roots(&f, &t).unwrap().lambdas();
        let lg = real_roots(&g, &t).unwrap().lambdas();
        if fa != fb {
            checked.0 += 1;
            assert!((lf[0] - lg[0]).abs() > t.tau_root, "{lf:?} {lg:?}");
        } else {
            checked.1 += 1;
            assert!(lf[1] < lg[0] && lg[1] < lf[0], "{lf:?} {lg:?}");
        }
    }
    assert!(checked.0 > 50 && checked.1 > 50, "{checked:?}");
}
