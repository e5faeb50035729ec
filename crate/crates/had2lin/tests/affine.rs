use std::collections::{BTreeMap, BTreeSet, HashSet};

use had2lin::affine::{
    edge_orbits, enumerate_group, enumerate_lifts, group_order, lift_count, placement_orbits, stabilizer, AffineMap,
    OrbitLabel, SymmetryTables,
};
use had2lin::boolfn::{points, BoolFn};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_map(rng: &mut impl Rng, k: u8, kp: u8) -> AffineMap {
    loop {
        let cols: Vec<u8> = (0..kp).map(|_| rng.gen_range(0..points(k)) as u8).collect();
        let b = rng.gen_range(0..points(k));
        let beta = rng.gen_range(0..points(kp));
        if let Ok(m) = AffineMap::new(k, kp, &cols, b, beta, rng.gen()) {
            return m;
        }
    }
}

fn random_fn(rng: &mut impl Rng, k: u8) -> BoolFn {
    let n = points(k);
    let bits = if n == 32 { rng.gen() } else { rng.gen_range(0..1u32 << n) };
    BoolFn::new(k, bits).unwrap()
}

/// M(f)(y) = f(Ay + b)·(−1)^c·χ_β(y), evaluated point by point.
fn apply_by_definition(m: &AffineMap, f: &BoolFn) -> BoolFn {
    let signs: Vec<i8> = (0..points(m.codomain()))
        .map(|y| {
            let ay = m.columns().iter().enumerate().fold(0u32, |acc, (j, &c)| if y >> j & 1 == 1 { acc ^ c as u32 } else { acc });
            let x = ay ^ m.shift();
            let chi = if (m.character() & y).count_ones() % 2 == 1 { -1 } else { 1 };
            let sign = if m.sign() { -1 } else { 1 };
            f.value(x) * chi * sign
        })
        .collect();
    BoolFn::from_signs(&signs).unwrap()
}

#[test]
fn group_and_lift_counts() {
    assert_eq!(enumerate_group(1).unwrap().len(), 8);
    assert_eq!(enumerate_group(2).unwrap().len(), 192);
    assert_eq!(group_order(2), 192);
    assert_eq!(enumerate_lifts(2, 3).unwrap().count(), 2688);
    assert_eq!(lift_count(2, 3), 2688);
    assert_eq!(enumerate_lifts(3, 3).unwrap().count() as u64, group_order(3));
    let distinct: HashSet<AffineMap> = enumerate_lifts(2, 4).unwrap().collect();
    assert_eq!(distinct.len() as u64, lift_count(2, 4));
    assert!(enumerate_group(5).is_err());
}

#[test]
fn group_is_closed_under_composition() {
    let g: HashSet<AffineMap> = enumerate_group(2).unwrap().into_iter().collect();
    for a in &g {
        for b in &g {
            assert!(g.contains(&a.compose(b).unwrap()));
        }
    }
}

#[test]
fn rank_deficient_matrices_are_rejected() {
    assert!(AffineMap::new(2, 2, &[1, 1], 0, 0, false).is_err());
    assert!(AffineMap::new(2, 3, &[1, 2, 3], 0, 0, false).is_ok());
    assert!(AffineMap::new(2, 3, &[3, 3, 0], 0, 0, false).is_err());
}

#[test]
fn lift_example_from_k1_to_k2() {
    let m = AffineMap::new(1, 2, &[1, 0], 0, 0b10, false).unwrap();
    let f = BoolFn::chi(1, 1).unwrap();
    assert_eq!(m.apply(&f).unwrap(), BoolFn::chi(2, 0b11).unwrap());
}

#[test]
fn constants_map_to_signed_characters() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let m = random_map(&mut rng, 2, 3);
        let one = BoolFn::constant(2, false).unwrap();
        let want = BoolFn::chi(3, m.character()).unwrap();
        let want = if m.sign() { -want } else { want };
        assert_eq!(m.apply(&one).unwrap(), want);
    }
}

#[test]
fn identity_and_sharp_of_identity() {
    for k in 1..=5 {
        let id = AffineMap::identity(k).unwrap();
        assert_eq!(id.sharp(), id);
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let f = random_fn(&mut rng, k);
        assert_eq!(id.apply(&f).unwrap(), f);
    }
}

#[test]
fn apply_agrees_with_definition_and_preserves_distance_and_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (k, kp) in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 5)] {
        for _ in 0..100 {
            let m = random_map(&mut rng, k, kp);
            let (f1, f2) = (random_fn(&mut rng, k), random_fn(&mut rng, k));
            let (g1, g2) = (m.apply(&f1).unwrap(), m.apply(&f2).unwrap());
            assert_eq!(g1, apply_by_definition(&m, &f1));
            assert_eq!(g1.dist(&g2).unwrap(), f1.dist(&f2).unwrap());
            assert_eq!(g1.dimension(), f1.dimension());
        }
    }
}

#[test]
fn composition_and_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [2u8, 3] {
        let id = AffineMap::identity(k).unwrap();
        for _ in 0..100 {
            let (m1, m2) = (random_map(&mut rng, k, k), random_map(&mut rng, k, k));
            let f = random_fn(&mut rng, k);
            let both = m2.compose(&m1).unwrap();
            assert_eq!(both.apply(&f).unwrap(), m2.apply(&m1.apply(&f).unwrap()).unwrap());
            assert_eq!(id.compose(&m1).unwrap(), m1);
            assert_eq!(m1.inverse().unwrap().compose(&m1).unwrap(), id);
            assert_eq!(m1.sharp().sharp(), m1);
        }
    }
}

/// Sinks of g are g(α)χ_α; sources are their negations.
fn terminals(g: &BoolFn) -> (BTreeSet<BoolFn>, BTreeSet<BoolFn>) {
    let k = g.k();
    let sinks: BTreeSet<BoolFn> = (0..points(k))
        .map(|a| {
            let chi = BoolFn::chi(k, a).unwrap();
            if g.value(a) < 0 {
                -chi
            } else {
                chi
            }
        })
        .collect();
    let sources = sinks.iter().map(|f| -*f).collect();
    (sinks, sources)
}

#[test]
fn sharp_pulls_terminals_back_consistently() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (k, kp) in [(2, 2), (2, 3), (3, 4)] {
        for _ in 0..100 {
            let m = random_map(&mut rng, k, kp);
            let gp = random_fn(&mut rng, kp);
            let g = m.sharp().apply(&gp).unwrap();
            let (sinks, sources) = terminals(&g);
            let (sinks_p, sources_p) = terminals(&gp);
            for s in &sinks {
                assert!(sinks_p.contains(&m.apply(s).unwrap()));
            }
            for s in &sources {
                assert!(sources_p.contains(&m.apply(s).unwrap()));
            }
        }
    }
}

fn edge_counts(k: u8) -> BTreeMap<(String, String), u64> {
    edge_orbits(k)
        .unwrap()
        .into_iter()
        .map(|o| match o.canonical {
            OrbitLabel::Edge(a, b) => ((a.to_string(), b.to_string()), o.size),
            _ => unreachable!(),
        })
        .collect()
}

#[test]
fn edge_orbits_k2_and_k3() {
    let e2 = edge_counts(2);
    assert_eq!(e2.len(), 4);
    let sizes: Vec<u64> = e2.values().copied().collect();
    assert!(sizes.contains(&32) && sizes.contains(&24));
    let t = SymmetryTables::shared(2).unwrap();
    let size_of = |a: &str, b: &str| {
        let (a, b): (BoolFn, BoolFn) = (a.parse().unwrap(), b.parse().unwrap());
        t.edge_orbit_size(t.canonical_edge(a.bits(), b.bits())).unwrap()
    };
    assert_eq!(size_of("0000", "1000"), 32);
    assert_eq!(size_of("0000", "1100"), 24);
    assert_eq!(edge_counts(3).len(), 26);
}

#[test]
fn edge_orbits_partition_all_admissible_pairs() {
    for k in 2..=3u8 {
        let n = 1u64 << points(k);
        // Unordered pairs {f1, f2} with f2 ∉ {f1, −f1}.
        let pairs = n * (n - 2) / 2;
        let total: u64 = edge_orbits(k).unwrap().iter().map(|o| o.size).sum();
        assert_eq!(total, pairs);
    }
}

#[test]
fn edge_orbits_k4() {
    let orbits = edge_orbits(4).unwrap();
    assert_eq!(orbits.len(), 1061);
    let n = 1u64 << 16;
    assert_eq!(orbits.iter().map(|o| o.size).sum::<u64>(), n * (n - 2) / 2);
}

#[test]
fn group_elements_keep_edges_inside_their_orbit() {
    let t = SymmetryTables::shared(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (&key, _) in t.edge_orbit_sizes() {
        for _ in 0..5 {
            let m = random_map(&mut rng, 3, 3);
            let (a, b) = (m.apply_bits(key.0), m.apply_bits(key.1));
            assert_eq!(t.canonical_edge(a, b), key);
        }
    }
}

/// Placement orbits by union-find over the whole group.
fn placement_orbits_bruteforce(k: u8) -> Vec<u64> {
    let n = 1usize << points(k);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for m in enumerate_group(k).unwrap() {
        let s = m.sharp();
        for g in 0..n {
            let h = s.apply_bits(g as u32) as usize;
            let (a, b) = (find(&mut parent, g), find(&mut parent, h));
            parent[a] = b;
        }
    }
    let mut sizes: BTreeMap<usize, u64> = BTreeMap::new();
    for g in 0..n {
        *sizes.entry(find(&mut parent, g)).or_default() += 1;
    }
    let mut v: Vec<u64> = sizes.into_values().collect();
    v.sort();
    v
}

#[test]
fn placement_orbits_match_bruteforce() {
    for k in 2..=3u8 {
        let mut sizes: Vec<u64> = placement_orbits(k).unwrap().iter().map(|o| o.size).collect();
        sizes.sort();
        assert_eq!(sizes, placement_orbits_bruteforce(k));
        assert_eq!(sizes.iter().sum::<u64>(), 1 << points(k));
    }
}

#[test]
fn stabilizers_of_k2_placements() {
    let one = BoolFn::constant(2, false).unwrap();
    let t = SymmetryTables::shared(2).unwrap();
    let c = t.class_of(one.bits());
    assert_eq!(t.class_size(c), 8);
    let orbit: BTreeSet<u32> = t.class_members(c).iter().copied().collect();
    let chis: BTreeSet<u32> = (0..4).flat_map(|a| {
        let f = BoolFn::chi(2, a).unwrap();
        [f.bits(), (-f).bits()]
    }).collect();
    assert_eq!(orbit, chis);
    assert_eq!(stabilizer(&one).unwrap().len(), 24);

    let id = AffineMap::identity(2).unwrap();
    for g in 0..16u32 {
        let g = BoolFn::new(2, g).unwrap();
        let st = stabilizer(&g).unwrap();
        assert!(st.contains(&id));
        for m in &st {
            assert_eq!(m.sharp().apply(&g).unwrap(), g);
        }
        assert_eq!(st.len() as u64 * t.class_size(t.class_of(g.bits())), group_order(2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transport_to_class_representative(bits in 0u32..256) {
        let t = SymmetryTables::shared(3).unwrap();
        let c = t.class_of(bits);
        prop_assert_eq!(t.to_rep(bits).apply_bits(bits), t.rep(c));
        prop_assert_eq!(t.from_rep(bits).apply_bits(t.rep(c)), bits);
        for m in t.rep_stabilizer(c) {
            prop_assert_eq!(m.apply_bits(t.rep(c)), t.rep(c));
        }
    }
}
