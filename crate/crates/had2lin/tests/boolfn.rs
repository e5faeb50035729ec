use had2lin::boolfn::{hadamard_matrix, points, BoolFn};
use had2lin::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn arb_fn(k: u8) -> impl Strategy<Value = BoolFn> {
    let n = points(k);
    let max = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    (0..=max).prop_map(move |bits| BoolFn::new(k, bits).unwrap())
}

fn arb_any() -> impl Strategy<Value = BoolFn> {
    (2u8..=4).prop_flat_map(arb_fn)
}

/// Affine span of a point set by brute force: the smallest coset of a
/// subspace containing all points, found by closing under x + y + z.
fn span_dim_bruteforce(pts: &[u32]) -> usize {
    if pts.is_empty() {
        return 0;
    }
    let mut set: std::collections::BTreeSet<u32> = pts.iter().copied().collect();
    loop {
        let v: Vec<u32> = set.iter().copied().collect();
        let before = set.len();
        for &x in &v {
            for &y in &v {
                for &z in &v {
                    set.insert(x ^ y ^ z);
                }
            }
        }
        if set.len() == before {
            return set.len().trailing_zeros() as usize;
        }
    }
}

#[test]
fn hadamard_k3_matches_the_reference_matrix() {
    let expected = [
        "0000000", "1010101", "0110011", "1100110", "0001111", "1011010", "0111100", "1101001",
    ];
    let m = hadamard_matrix(3).unwrap();
    let rows: Vec<String> = m.iter().map(|r| r.iter().map(|v| char::from(b'0' + v)).collect()).collect();
    assert_eq!(rows, expected);
}

#[test]
fn hadamard_with_zero_column_is_symmetric() {
    for k in 2..=4 {
        let m = hadamard_matrix(k).unwrap();
        let full: Vec<Vec<u8>> = m.iter().map(|r| std::iter::once(0).chain(r.iter().copied()).collect()).collect();
        for (i, row) in full.iter().enumerate() {
            assert!(row.iter().all(|&v| v <= 1));
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, full[j][i]);
            }
        }
        assert!(m[0].iter().all(|&v| v == 0));
    }
}

#[test]
fn chi_zero_is_constant_and_characters_are_affine() {
    for k in 1..=5 {
        assert_eq!(BoolFn::chi(k, 0).unwrap(), BoolFn::constant(k, false).unwrap());
        for alpha in 0..points(k) {
            let f = BoolFn::chi(k, alpha).unwrap();
            assert_eq!(f.dimension(), 0);
            assert_eq!((-f).dimension(), 0);
            assert!(f.is_affine());
            let fourier = f.fourier();
            for beta in 0..points(k) {
                let want = if beta == alpha { Rational::one() } else { Rational::zero() };
                assert_eq!(fourier.coefficient(beta), want);
            }
        }
    }
}

#[test]
fn serialisation_uses_one_for_minus() {
    let f = BoolFn::from_signs(&[1, -1, -1, 1]).unwrap();
    assert_eq!(f.to_string(), "0110");
    assert_eq!("0110".parse::<BoolFn>().unwrap(), f);
    assert_eq!(f.value(1), -1);
    assert_eq!(f.value(0), 1);
}

#[test]
fn four_dimensional_single_point_has_full_support() {
    // One −1 entry: every Fourier coefficient is nonzero.
    let f: BoolFn = "1000000000000000".parse().unwrap();
    assert_eq!(f.fourier().support().len(), 16);
    assert_eq!(f.dimension(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fourier_inverts_exactly(f in arb_any()) {
        prop_assert_eq!(f.fourier().invert(), Some(f));
    }

    #[test]
    fn parseval(f in arb_any()) {
        let total: Rational = f.fourier().coefficients().iter().map(|c| c * c).sum();
        prop_assert_eq!(total, Rational::one());
    }

    #[test]
    fn fourier_matches_direct_sum(f in arb_any()) {
        let k = f.k();
        let n = points(k);
        let fourier = f.fourier();
        for alpha in 0..n {
            let chi = BoolFn::chi(k, alpha).unwrap();
            let s: i64 = (0..n).map(|x| (chi.value(x) * f.value(x)) as i64).sum();
            prop_assert_eq!(fourier.coefficient(alpha), Rational::new(s.into(), (n as i64).into()));
        }
    }

    #[test]
    fn negation_flips_every_coefficient(f in arb_any()) {
        let a = f.fourier().coefficients();
        let b = (-f).fourier().coefficients();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| *x == -y.clone()));
        prop_assert_eq!(f.dimension(), (-f).dimension());
        prop_assert_eq!(-(-f), f);
    }

    #[test]
    fn dimension_matches_bruteforce_span(f in arb_any()) {
        prop_assert_eq!(f.dimension(), span_dim_bruteforce(&f.fourier().support()));
    }

    #[test]
    fn dist_is_a_metric((a, b, c) in (2u8..=4).prop_flat_map(|k| (arb_fn(k), arb_fn(k), arb_fn(k)))) {
        let d = |x: &BoolFn, y: &BoolFn| x.dist(y).unwrap();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &b).is_zero(), a == b);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c));
        prop_assert_eq!(d(&a, &-a), Rational::one());
        let n = points(a.k()) as i64;
        prop_assert_eq!(d(&a, &b), Rational::new((a.hamming(&b).unwrap() as i64).into(), n.into()));
    }
}
