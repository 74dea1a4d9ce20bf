mod support;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;

use kirbykit::form::{DecoratedModule, GTable, OrderedValue};
use kirbykit::genus::{
    a_g, check_genus_bound, kervaire_milnor_obstruction, sum_model, torsion_free_reduce, AgValue,
    CharClassInstance, DiskBundleTable,
};
use kirbykit::linalg::{self, IntMatrix};
use support::*;

fn random_table(
    g: &mut rand_chacha::ChaCha8Rng,
    g_max: u64,
    n_min: i64,
    n_max: i64,
) -> DiskBundleTable {
    let mut entries = BTreeMap::new();
    for n in n_min..=n_max {
        let mut v = g.gen_range(-3i64..=1);
        for gg in 0..=g_max {
            entries.insert((gg, n), finite(v));
            v += g.gen_range(0..=2);
        }
    }
    DiskBundleTable::new(entries).unwrap()
}

/// Scans downwards for the last genus whose entry is still below `r`.
fn a_g_oracle(r: i64, n: i64, t: &DiskBundleTable) -> AgValue {
    let below = |g: u64| *t.entry(g, n).unwrap() < finite(r);
    match (0..=t.g_max()).rev().find(|&g| below(g)) {
        None => AgValue::Finite(0),
        Some(g) if g == t.g_max() => AgValue::InfiniteBeyondCoverage { g_max: g },
        Some(g) => AgValue::Finite(g + 1),
    }
}

fn residue_oracle(q: &IntMatrix, alpha: &[BigInt]) -> i64 {
    let sq: i64 = q.bilinear(alpha, alpha).try_into().unwrap();
    let sigma: i64 = linalg::signature(q).unwrap().try_into().unwrap();
    let r = (sq - sigma).rem_euclid(16);
    if r >= 8 {
        r - 16
    } else {
        r
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn a_g_matches_scan_oracle(seed in any::<u64>()) {
        let mut g = rng(seed);
        let t = random_table(&mut g, 6, -2, 2);
        for n in -2..=2 {
            let mut last = AgValue::Finite(0);
            for r in -6..=16 {
                let v = a_g(&finite(r), n, &t).unwrap();
                prop_assert_eq!(v, a_g_oracle(r, n, &t));
                prop_assert!(v >= last, "A_G must be monotone in r");
                last = v;
            }
        }
    }

    #[test]
    fn kervaire_milnor_residue_is_basis_independent(seed in any::<u64>(), n in 1usize..=4) {
        let mut g = rng(seed);
        let diag: Vec<i64> = (0..n).map(|_| if g.gen_bool(0.5) { 1 } else { -1 }).collect();
        let q = IntMatrix::diagonal(&big(&diag));
        let alpha: Vec<i64> = (0..n).map(|_| 2 * g.gen_range(-2i64..=2) + 1).collect();
        let alpha = big(&alpha);
        let base = kervaire_milnor_obstruction(&CharClassInstance::new(q.clone(), alpha.clone()).unwrap());
        prop_assert_eq!(base.residue, residue_oracle(&q, &alpha));
        prop_assert_eq!(base.positive_genus_forced, base.residue != 0);
        let p = random_unimodular(&mut g, n, 4);
        let p_inv = linalg::unimodular_inverse(&p).unwrap();
        let moved = CharClassInstance::new(q.congruence(&p), p_inv.apply(&alpha)).unwrap();
        prop_assert_eq!(kervaire_milnor_obstruction(&moved), base);
    }

    #[test]
    fn torsion_free_reduction_of_free_module_is_identity(seed in any::<u64>(), n in 1usize..=3) {
        let mut g = rng(seed);
        let d = DecoratedModule::free(random_symmetric(&mut g, n, 3)).unwrap();
        let mut t = GTable::new();
        for x in box_classes(&d, 1) {
            if g.gen_bool(0.6) {
                t.insert(x, finite(g.gen_range(0..4)));
            }
        }
        let d = d.with_gvalues(t).unwrap();
        let red = torsion_free_reduce(&d).unwrap();
        prop_assert_eq!(&red.module, &d);
        prop_assert!(red.partial.is_empty());
        prop_assert_eq!(torsion_free_reduce(&red.module).unwrap().module, red.module);
    }

    #[test]
    fn torsion_free_reduction_takes_minima(seed in any::<u64>()) {
        let mut g = rng(seed);
        let d = DecoratedModule::new(orders(1, 1), IntMatrix::diagonal(&big(&[g.gen_range(-2..=2), 0])), GTable::new())
            .unwrap();
        let mut t = GTable::new();
        let mut full = BTreeMap::new();
        for x in box_classes(&d, 2) {
            if g.gen_bool(0.7) {
                let v = g.gen_range(0..5);
                t.insert(x.clone(), finite(v));
                full.entry(x[0].clone()).or_insert_with(Vec::new).push(v);
            }
        }
        let red = torsion_free_reduce(&d.with_gvalues(t).unwrap()).unwrap();
        for (a, vs) in &full {
            let min = *vs.iter().min().unwrap();
            prop_assert_eq!(red.module.g(std::slice::from_ref(a)), Some(&finite(min)));
            prop_assert_eq!(red.partial.contains(&vec![a.clone()]), vs.len() < 2);
        }
    }

    #[test]
    fn sum_model_copies_x_and_adds_z(seed in any::<u64>()) {
        let mut g = rng(seed);
        let x = DecoratedModule::free(random_symmetric(&mut g, 1, 3)).unwrap();
        let z = DecoratedModule::free(IntMatrix::zeros(1, 1)).unwrap();
        let mut tx = GTable::new();
        let mut tz = GTable::new();
        for v in -2..=2i64 {
            tx.insert(big(&[v]), finite(v.abs() + g.gen_range(0..2)));
            tz.insert(big(&[v]), finite(if v == 0 { 0 } else { g.gen_range(0..2) }));
        }
        let (x, z) = (x.with_gvalues(tx.clone()).unwrap(), z.with_gvalues(tz.clone()).unwrap());
        let s = sum_model(&x, &z).unwrap();
        prop_assert_eq!(s.form().get(1, 1), &BigInt::from(0));
        for a in -2..=2i64 {
            prop_assert_eq!(s.g(&big(&[a, 0])), tx.get(&big(&[a])));
            for b in -2..=2i64 {
                let want = tx[&big(&[a])].saturating_add(&tz[&big(&[b])]);
                prop_assert_eq!(s.g(&big(&[a, b])), Some(&want));
            }
        }
    }
}

#[test]
fn kervaire_milnor_fixtures() {
    let q = IntMatrix::diagonal(&big(&[-1, -1]));
    let km = kervaire_milnor_obstruction(&CharClassInstance::new(q, big(&[3, 1])).unwrap());
    assert_eq!(km.residue, -8);
    assert!(km.positive_genus_forced);

    let one = IntMatrix::diagonal(&big(&[1]));
    let km = kervaire_milnor_obstruction(&CharClassInstance::new(one, big(&[1])).unwrap());
    assert!(!km.positive_genus_forced);

    let hyp = IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
    let km = kervaire_milnor_obstruction(&CharClassInstance::new(hyp, big(&[0, 0])).unwrap());
    assert!(!km.positive_genus_forced);
}

#[test]
fn non_characteristic_classes_are_rejected() {
    let q = IntMatrix::diagonal(&big(&[1, 1]));
    assert!(CharClassInstance::new(q, big(&[2, 1])).is_err());
}

#[test]
fn identity_table_inverts_itself() {
    let t = DiskBundleTable::identity(10, -3, 3);
    for n in -3..=3 {
        for r in -5..=10 {
            assert_eq!(
                a_g(&finite(r), n, &t).unwrap(),
                AgValue::Finite(r.max(0) as u64)
            );
        }
        let beyond = a_g(&finite(11), n, &t).unwrap();
        assert_eq!(beyond, AgValue::InfiniteBeyondCoverage { g_max: 10 });
        assert!(!check_genus_bound(10, beyond));
        assert!(check_genus_bound(11, beyond));
    }
    assert!(a_g(&finite(0), 4, &t).is_err());
    assert_eq!(
        a_g(&OrderedValue::NegInf, 0, &t).unwrap(),
        AgValue::Finite(0)
    );
}

#[test]
fn tables_must_be_monotone_and_complete() {
    let mut e = BTreeMap::new();
    e.insert((0, 0), finite(2));
    e.insert((1, 0), finite(1));
    assert!(DiskBundleTable::new(e.clone()).is_err());
    e.insert((1, 0), finite(3));
    e.insert((0, 1), finite(0));
    assert!(DiskBundleTable::new(e).is_err());
}
