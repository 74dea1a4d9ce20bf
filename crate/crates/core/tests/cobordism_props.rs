mod support;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use kirbykit::cobordism::{
    attach, parse_trace, quasi_invertibility_certificate, stability_check_quasi, AttachCondition,
    AttachmentModel, CobordismModel, ConstructionMove,
};
use kirbykit::form::{DecoratedModule, GTable, ModuleHom};
use kirbykit::linalg::{self, FgAbelianGroup, IntMatrix};
use kirbykit::Error;
use support::*;

fn zero_module(n: usize) -> DecoratedModule {
    DecoratedModule::free(IntMatrix::zeros(n, n)).unwrap()
}

/// A strongly quasi-invertible model grown from a product by the moves
/// that add kernel classes.
fn random_cobordism(g: &mut ChaCha8Rng, m: usize, k_max: usize, torsion: bool) -> CobordismModel {
    let mut cob = CobordismModel::product(&zero_module(m)).unwrap();
    let mut k = 0;
    while k < k_max && g.gen_bool(0.7) {
        if g.gen_bool(0.5) {
            cob = cob.attach_slice_two_handles(1).unwrap();
        } else if torsion && g.gen_bool(0.5) {
            let v =
                DecoratedModule::new(vec![BigInt::from(2)], IntMatrix::zeros(1, 1), GTable::new())
                    .unwrap();
            cob = cob.sum_with_s4_piece(&v, false).unwrap();
        } else {
            let mut t = GTable::new();
            t.insert(big(&[1]), finite(g.gen_range(0..3)));
            cob = cob
                .sum_with_s4_piece(&zero_module(1).with_gvalues(t).unwrap(), true)
                .unwrap();
        }
        k += 1;
    }
    cob
}

fn random_lattice(g: &mut ChaCha8Rng, n: usize) -> DecoratedModule {
    let d = DecoratedModule::free(random_nondegenerate(g, n, 2)).unwrap();
    let mut t = GTable::new();
    for x in box_classes(&d, 1) {
        if x.iter().any(|v| !v.is_zero()) && g.gen_bool(0.5) {
            t.insert(x, finite(g.gen_range(0..3)));
        }
    }
    d.with_gvalues(t).unwrap()
}

/// `(H₂X ⊕ H₂P) / im(glue, −ι)` computed directly from a presentation.
fn mayer_vietoris_group(a: &AttachmentModel) -> FgAbelianGroup {
    let (xr, pr) = (a.x.rank(), a.cob.h2_p().rank());
    let maps = a
        .glue
        .matrix()
        .vstack(&a.cob.m_to_p().matrix().neg())
        .unwrap();
    let rels =
        a.x.relation_matrix()
            .block_diag(&a.cob.h2_p().relation_matrix());
    assert_eq!(rels.rows(), xr + pr);
    linalg::cokernel(&maps.hstack(&rels).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn attach_matches_mayer_vietoris(seed in any::<u64>()) {
        let mut g = rng(seed);
        let m = g.gen_range(0..=2);
        let cob = random_cobordism(&mut g, m, 2, true);
        // X = (a) ⊕ 0^m so the glued classes can land in the radical
        let a = g.gen_range(-2..=2);
        let n = 1 + m;
        let mut q = IntMatrix::zeros(n, n);
        q.set(0, 0, BigInt::from(a));
        let x = DecoratedModule::free(q).unwrap();
        let mut glue = IntMatrix::zeros(n, m);
        for j in 0..m {
            for i in 1..n {
                glue.set(i, j, BigInt::from(g.gen_range(-2..=2)));
            }
        }
        let glue = ModuleHom::new(glue, cob.h2_m().clone(), x.clone()).unwrap();
        let model = AttachmentModel::new(x, cob, glue).unwrap();
        let out = attach(&model).unwrap();
        prop_assert_eq!(out.condition, AttachCondition::StronglyQuasiInvertible);
        prop_assert_eq!(out.module.group(), mayer_vietoris_group(&model));
        // the K block pairs trivially with everything
        for i in out.x_rank..out.module.rank() {
            for j in 0..out.module.rank() {
                prop_assert!(out.module.form().get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn zero_genus_kernel_classes_force_equality(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let x = random_lattice(&mut g, n);
        let mut cob = CobordismModel::product(&zero_module(g.gen_range(0..=1))).unwrap();
        cob = cob.attach_slice_two_handles(g.gen_range(1..=2)).unwrap();
        let model = AttachmentModel::with_zero_glue(x.clone(), cob.clone()).unwrap();
        let out = attach(&model).unwrap();
        prop_assert!(out.intervals.is_empty());
        for (alpha, gx) in x.gvalues() {
            prop_assert_eq!(out.module.g(&out.class_of(alpha, &cob.h2_p().zero_vector())), Some(gx));
            for (beta, gp) in cob.h2_p().gvalues() {
                prop_assert!(gp.is_finite() && gp.as_finite().unwrap().is_zero());
                prop_assert_eq!(out.module.g(&out.class_of(alpha, beta)), Some(gx));
            }
        }
    }

    #[test]
    fn quasi_stability_has_no_violations(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.gen_range(1..=2);
        let x1 = random_lattice(&mut g, n);
        let x2 = if g.gen_bool(0.5) {
            let p = random_unimodular(&mut g, n, 2);
            let p_inv = linalg::unimodular_inverse(&p).unwrap();
            let t = x1.gvalues().iter().map(|(k, v)| (p.apply(k), v.clone())).collect();
            DecoratedModule::free(x1.form().congruence(&p_inv)).unwrap().with_gvalues(t).unwrap()
        } else {
            random_lattice(&mut g, n)
        };
        let k = g.gen_range(0..=1);
        let c1 = CobordismModel::product(&zero_module(0)).unwrap().attach_slice_two_handles(k).unwrap();
        let c2 = CobordismModel::product(&zero_module(0)).unwrap().attach_slice_two_handles(k).unwrap();
        let a1 = AttachmentModel::with_zero_glue(x1, c1).unwrap();
        let a2 = AttachmentModel::with_zero_glue(x2, c2).unwrap();
        let rep = stability_check_quasi(&a1, &a2, 2).unwrap();
        prop_assert!(rep.consistent, "{:?}", rep);
    }

    #[test]
    fn certificates_track_invertibility(seed in any::<u64>()) {
        let mut g = rng(seed);
        let all = [
            ConstructionMove::Restrict,
            ConstructionMove::ConnectedSumS4 { link_empty: true },
            ConstructionMove::ConnectedSumS4 { link_empty: false },
            ConstructionMove::BoundarySumS4 { link_empty: true },
            ConstructionMove::BoundarySumS4 { link_empty: false },
            ConstructionMove::OneHandle,
            ConstructionMove::CancelingPair,
            ConstructionMove::SliceTwoHandles,
        ];
        let len = g.gen_range(0..6);
        let trace: Vec<ConstructionMove> = (0..len).map(|_| all[g.gen_range(0..all.len())]).collect();
        let text: String = trace.iter().map(|m| format!("{m}\n")).collect();
        prop_assert_eq!(parse_trace(&text).unwrap(), trace.clone());
        let cert = quasi_invertibility_certificate(&trace);
        prop_assert!(cert.strongly_quasi_invertible);
        prop_assert_eq!(cert.steps.len(), trace.len());
        prop_assert_eq!(cert.invertible, trace.iter().all(|m| m.keeps_invertible()));
    }
}

#[test]
fn attach_refuses_without_a_sufficient_condition() {
    // H₂(M) = Z maps into H₂(P) = Z by 2, so the composite to H₂(R) = Z is
    // not an isomorphism
    let m = zero_module(1);
    let p = zero_module(1);
    let to_p = ModuleHom::new(IntMatrix::from_i64_rows(&[vec![2]]), m.clone(), p.clone()).unwrap();
    let to_r = ModuleHom::identity(&p);
    assert!(CobordismModel::new(to_p.clone(), to_r.clone(), false, true).is_err());
    let cob = CobordismModel::new(to_p, to_r, false, false).unwrap();
    let x = zero_module(1);
    let glue = ModuleHom::identity(&x);
    let model = AttachmentModel::new(x, cob, glue).unwrap();
    assert!(matches!(attach(&model), Err(Error::Refused(_))));
}

#[test]
fn glue_must_land_in_the_radical() {
    let cob = CobordismModel::product(&zero_module(1)).unwrap();
    let x = DecoratedModule::free(IntMatrix::from_i64_rows(&[vec![1]])).unwrap();
    let glue = ModuleHom::new(
        IntMatrix::from_i64_rows(&[vec![1]]),
        cob.h2_m().clone(),
        x.clone(),
    )
    .unwrap();
    assert!(AttachmentModel::new(x, cob, glue).is_err());
}

#[test]
fn unknown_trace_moves_are_rejected() {
    assert!(parse_trace("restrict\nfold_handle\n").is_err());
    assert_eq!(parse_trace("# only a comment\n\n").unwrap(), vec![]);
}
